"""Defines the document types flowing through corpus preprocessing."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from numforge.common.errors import InputError


@dataclass(frozen=True)
class RawDocument:
    """A textbook document before preprocessing."""

    doc_id: str
    subject: str
    text: str

    def __post_init__(self):
        if not self.doc_id:
            raise InputError('a document needs a non-empty doc_id')


@dataclass(frozen=True)
class Paragraph:
    """A paragraph of a clean document; ``index`` is its 0-based position."""

    index: int
    text: str


@dataclass(frozen=True)
class CleanDocument:
    """A preprocessed document split into non-empty paragraphs."""

    doc_id: str
    subject: str
    paragraphs: tuple[Paragraph, ...]

    def records(self) -> list[dict[str, Any]]:
        """Returns one JSON Lines record per paragraph."""
        return [{'doc_id': self.doc_id, 'subject': self.subject,
                 'index': paragraph.index, 'text': paragraph.text}
                for paragraph in self.paragraphs]

    def text(self) -> str:
        """Returns the paragraphs joined by blank lines."""
        return '\n\n'.join(paragraph.text for paragraph in self.paragraphs)


@dataclass(frozen=True)
class CorpusStats:
    """Summary counts of a clean corpus."""

    num_subjects: int
    num_documents: int
    num_tokens: int

    def to_dict(self) -> dict[str, int]:
        """Returns the statistics as a JSON-ready dictionary."""
        return {'num_subjects': self.num_subjects,
                'num_documents': self.num_documents,
                'num_tokens': self.num_tokens}
