"""Implements the preprocessing passes: filtering, refinement, numeric
calibration and paragraph segmentation."""
from __future__ import annotations

import re
from dataclasses import replace

from numforge.common.errors import DocumentEmptied
from numforge.corpus.document import CleanDocument, Paragraph, RawDocument
from numforge.corpus.rules import RuleSet

# one or more blank lines, a line holding only whitespace counts as blank
_PARAGRAPH_BREAK = re.compile(r'\n\s*\n')

_SPACE: str = ' '
_BLANK_LINES: str = r'[ \t\r]*\n(?:[ \t\r]*\n)+[ \t]*'


def _split_numeric_pattern(rejoin_breaks: bool) -> re.Pattern:
    separator: str = f'(?:{_SPACE}|{_BLANK_LINES})' if rejoin_breaks \
        else _SPACE
    # "12 34", "3. 5", "3 .5" and the same across a paragraph break
    return re.compile(f'(?<=[0-9]){separator}(?=\\.?[0-9])'
                      f'|(?<=[0-9]\\.){separator}(?=[0-9])')


_SPLIT_NUMERIC = _split_numeric_pattern(rejoin_breaks=True)
_SPLIT_NUMERIC_INLINE = _split_numeric_pattern(rejoin_breaks=False)


def _drop_paragraphs(doc: RawDocument, rules: RuleSet) -> RawDocument:
    pieces: list[str] = _PARAGRAPH_BREAK.split(doc.text)
    kept: list[str] = [piece for piece in pieces if not rules.matches(piece)]
    if len(kept) == len(pieces):
        return doc

    if not any(piece.strip() for piece in kept):
        raise DocumentEmptied(doc.doc_id)

    return replace(doc, text='\n\n'.join(kept))


def filter_document(doc: RawDocument, rules: RuleSet) -> RawDocument:
    """
    Removes every paragraph matching a filter rule, e.g. publication
    information and reference lists. A document without matches is returned
    as it is.

    :param doc: The raw document
    :param rules: The filter rule set
    :return: The filtered document
    """
    return _drop_paragraphs(doc, rules)


def refine_document(doc: RawDocument, rules: RuleSet) -> RawDocument:
    """
    Removes every paragraph matching a refinement rule, e.g. tables of
    contents and section headings.

    :param doc: The raw document
    :param rules: The refine rule set
    :return: The refined document
    """
    return _drop_paragraphs(doc, rules)


def calibrate_numerics(doc: RawDocument,
                       rejoin_breaks: bool = True) -> RawDocument:
    """
    Rejoins numbers split by a single space or, when enabled, by a paragraph
    break, such as ``3. 5`` or ``12`` ending a paragraph followed by ``3.4``
    starting the next one. Digit groups separated by two or more spaces are
    left apart.

    :param doc: The raw document
    :param rejoin_breaks: Whether a paragraph break inside a number is removed
    :return: The calibrated document
    """
    pattern: re.Pattern = _SPLIT_NUMERIC if rejoin_breaks \
        else _SPLIT_NUMERIC_INLINE
    text: str = pattern.sub('', doc.text)
    return doc if text == doc.text else replace(doc, text=text)


def segment_paragraphs(doc: RawDocument) -> CleanDocument:
    """
    Splits a document on blank lines, trims every paragraph and drops the
    empty ones.

    :param doc: The filtered, refined and calibrated document
    :return: The clean document
    """
    texts: list[str] = [piece.strip()
                        for piece in _PARAGRAPH_BREAK.split(doc.text)]
    paragraphs: tuple[Paragraph, ...] = tuple(
        Paragraph(index, text)
        for index, text in enumerate(text for text in texts if text))
    if not paragraphs:
        raise DocumentEmptied(doc.doc_id)

    return CleanDocument(doc.doc_id, doc.subject, paragraphs)


def preprocess(doc: RawDocument, filter_rules: RuleSet, refine_rules: RuleSet,
               rejoin_breaks: bool = True) -> CleanDocument:
    """
    Runs filtering, refinement, numeric calibration and segmentation in this
    order.

    :param doc: The raw document
    :param filter_rules: The filter rule set
    :param refine_rules: The refine rule set
    :param rejoin_breaks: Whether calibration rejoins across paragraph breaks
    :return: The clean document
    """
    doc = filter_document(doc, filter_rules)
    doc = refine_document(doc, refine_rules)
    doc = calibrate_numerics(doc, rejoin_breaks)
    return segment_paragraphs(doc)
