"""Extracts numeric-sensitive instances from clean documents and selects a
random share of them."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from numforge.common.errors import InvalidCounts
from numforge.common.rng import SeededRng, sample_indices
from numforge.corpus.document import CleanDocument
from numforge.numct.config import PipelineConfig, ceil_ratio
from numforge.numeric.lexer import NumericLexer, NumericVariable

# a paragraph ending with one of these closes a grammatically intact instance
SENTENCE_TERMINALS: frozenset[str] = frozenset('。！？；.!?;:"」』”')


@dataclass(frozen=True)
class Instance:
    """
    A run of consecutive paragraphs of one document, joined by newlines, with
    its legitimate numeric variables. ``paragraph_span`` is inclusive.
    """

    instance_id: str
    doc_id: str
    paragraph_span: tuple[int, int]
    text: str
    numerics: tuple[NumericVariable, ...]

    @property
    def num_paragraphs(self) -> int:
        """Returns the number of paragraphs of the instance."""
        return self.paragraph_span[1] - self.paragraph_span[0] + 1

    def to_dict(self) -> dict[str, Any]:
        """Returns the JSON Lines record of the instance."""
        return {'instance_id': self.instance_id, 'doc_id': self.doc_id,
                'paragraph_span': list(self.paragraph_span),
                'text': self.text,
                'numerics': [nv.to_dict() for nv in self.numerics]}

    @classmethod
    def from_dict(cls, record: dict[str, Any]) -> Instance:
        """Returns the instance encoded by :meth:`to_dict`."""
        first, last = record['paragraph_span']
        return cls(record['instance_id'], record['doc_id'], (first, last),
                   record['text'],
                   tuple(NumericVariable.from_dict(nv)
                         for nv in record['numerics']))


def is_intact(paragraph: str) -> bool:
    """Returns true if the paragraph ends with sentence-terminal punctuation."""
    stripped: str = paragraph.rstrip()
    return bool(stripped) and stripped[-1] in SENTENCE_TERMINALS


def extract_instances(doc: CleanDocument, cfg: PipelineConfig,
                      lexer: NumericLexer | None = None) -> list[Instance]:
    """
    Scans a document once from its start. Each candidate takes the next
    ``n_min`` paragraphs and grows one paragraph at a time until its last
    paragraph is sentence-terminated or it holds ``n_max`` paragraphs; a
    candidate reaching the document end is kept as it is. Candidates without
    legitimate numeric variables are discarded but still consume their
    paragraphs, and a trailing remainder shorter than ``n_min`` is dropped.

    :param doc: The clean document
    :param cfg: The pipeline configuration
    :param lexer: The numeric lexer, the default vocabulary when None
    :return: The instances in document order
    """
    lexer = lexer or NumericLexer()
    paragraphs = doc.paragraphs
    instances: list[Instance] = []
    start: int = 0
    while len(paragraphs) - start >= cfg.n_min:
        end: int = start + cfg.n_min
        while not is_intact(paragraphs[end - 1].text) \
                and end - start < cfg.n_max and end < len(paragraphs):
            end += 1

        text: str = '\n'.join(paragraph.text
                              for paragraph in paragraphs[start:end])
        numerics: list[NumericVariable] = lexer.legitimate_numerics(text)
        if numerics:
            instances.append(Instance(
                instance_id=f'{doc.doc_id}:{start}-{end - 1}',
                doc_id=doc.doc_id, paragraph_span=(start, end - 1),
                text=text, numerics=tuple(numerics)))
        start = end

    return instances


def select_instances(instances: list[Instance], cfg: PipelineConfig,
                     rng: SeededRng) -> list[Instance]:
    """
    Returns ``ceil(r_ins * len(instances))`` instances drawn uniformly without
    replacement, in their original order.

    :param instances: All extracted instances
    :param cfg: The pipeline configuration
    :param rng: The random generator of the selection pass
    :return: The selected instances
    """
    size: int = ceil_ratio(cfg.r_ins, len(instances))
    return [instances[i]
            for i in sample_indices(rng, len(instances), size)]


def relevance_probability(n_ins: int, n_irr: int,
                          n_selected: int) -> Fraction:
    """
    Returns the probability that a uniform draw of ``n_selected`` of
    ``n_ins`` instances avoids all ``n_irr`` irrelevant ones:
    ``C(n_ins - n_irr, n_selected) / C(n_ins, n_selected)``, exactly.

    :param n_ins: The number of instances
    :param n_irr: The number of irrelevant instances among them
    :param n_selected: The number of instances drawn
    :return: The probability as an exact fraction
    """
    for name, value in (('n_ins', n_ins), ('n_irr', n_irr),
                        ('n_selected', n_selected)):
        if isinstance(value, bool) or not isinstance(value, int):
            raise InvalidCounts(f'{name} must be an integer, got {value!r}')

    if not 0 <= n_irr <= n_ins or not 0 <= n_selected <= n_ins:
        raise InvalidCounts(
            'expected 0 <= n_irr <= n_ins and 0 <= n_selected <= n_ins, got '
            f'n_ins={n_ins}, n_irr={n_irr}, n_selected={n_selected}')

    return Fraction(math.comb(n_ins - n_irr, n_selected),
                    math.comb(n_ins, n_selected))
