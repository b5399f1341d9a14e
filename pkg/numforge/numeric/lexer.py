"""Detects numeric variables in text and flags the structural ones, such as
the ``3`` in ``Figure 3``, which are never masked."""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Any, Iterable

DEFAULT_STRUCTURAL_KEYWORDS: tuple[str, ...] = (
    'Figure', 'Table', 'Section', 'Chapter', 'Eq',
    '图', '表', '第', '章', '节', '式', '例')
DEFAULT_STRUCTURAL_SUFFIXES: tuple[str, ...] = ('章', '节', '题')


class NumericKind(enum.Enum):
    """The numeric type of a variable, decided by its surface form."""
    INTEGER = 'integer'
    FLOAT = 'float'


@dataclass(frozen=True)
class NumericVariable:
    """
    One occurrence of a number in a host text. ``start`` and ``end`` delimit
    the half-open character span of ``surface``; equal values at different
    spans are different variables.
    """

    nv_id: str
    start: int
    end: int
    surface: str
    kind: NumericKind
    value: Decimal
    structural: bool = False

    @property
    def span(self) -> tuple[int, int]:
        """Returns the half-open character span."""
        return self.start, self.end

    @property
    def decimal_places(self) -> int:
        """Returns the number of digits after the decimal point."""
        _, _, fraction = self.surface.partition('.')
        return len(fraction)

    def to_dict(self) -> dict[str, Any]:
        """Returns a JSON-ready representation; the value is a string."""
        return {'nv_id': self.nv_id, 'span': [self.start, self.end],
                'surface': self.surface, 'kind': self.kind.value,
                'value': str(self.value), 'structural': self.structural}

    @classmethod
    def from_dict(cls, record: dict[str, Any]) -> NumericVariable:
        """Returns the variable encoded by :meth:`to_dict`."""
        start, end = record['span']
        return cls(record['nv_id'], start, end, record['surface'],
                   NumericKind(record['kind']), Decimal(record['value']),
                   record.get('structural', False))


class NumericLexer:
    """
    Lexes numeric variables: an optional sign when the sign is not preceded by
    a digit, an ASCII digit run, and optionally one decimal point followed by
    a digit run. Thousands separators, exponents, percent signs and non-ASCII
    numerals are not part of a number, so ``3.5%`` yields ``3.5``.

    A variable is structural when the token right before it, ignoring one
    space, is a structural keyword, or when a structural suffix follows it
    immediately. ASCII keywords match whole words, case-insensitively and
    with an optional trailing period (``Eq. 2``).
    """

    _NUMBER = re.compile(r'(?<![0-9])(?:[+-](?=[0-9]))?[0-9]+(?:\.[0-9]+)?')

    def __init__(self,
                 keywords: Iterable[str] = DEFAULT_STRUCTURAL_KEYWORDS,
                 suffixes: Iterable[str] = DEFAULT_STRUCTURAL_SUFFIXES):
        """
        Constructs a lexer with the given structural vocabulary.

        :param keywords: Tokens that make the following number structural
        :param suffixes: Characters that make the preceding number structural
        """
        self._keywords: tuple[str, ...] = tuple(keywords)
        self._suffixes: tuple[str, ...] = tuple(suffixes)
        ascii_words: list[str] = [re.escape(keyword)
                                  for keyword in self._keywords
                                  if keyword.isascii()]
        self._ascii_keyword: re.Pattern | None = re.compile(
            r'(?<![A-Za-z])(?:' + '|'.join(ascii_words) + r')\.?$',
            re.IGNORECASE) if ascii_words else None
        self._other_keywords: tuple[str, ...] = tuple(
            keyword for keyword in self._keywords if not keyword.isascii())

    @property
    def keywords(self) -> tuple[str, ...]:
        """Returns the structural keywords."""
        return self._keywords

    @property
    def suffixes(self) -> tuple[str, ...]:
        """Returns the structural suffixes."""
        return self._suffixes

    def lex_numerics(self, text: str) -> list[NumericVariable]:
        """
        Returns every maximal numeric token of the text sorted by position,
        with its structural flag set.

        :param text: The host text
        :return: The numeric variables
        """
        variables: list[NumericVariable] = []
        for match in self._NUMBER.finditer(text):
            surface: str = match.group()
            variable = NumericVariable(
                nv_id=f'nv-{match.start()}', start=match.start(),
                end=match.end(), surface=surface,
                kind=NumericKind.FLOAT if '.' in surface
                else NumericKind.INTEGER,
                value=Decimal(surface))
            if self.detect_structural(text, variable):
                variable = NumericVariable(
                    variable.nv_id, variable.start, variable.end, surface,
                    variable.kind, variable.value, structural=True)
            variables.append(variable)

        return variables

    def detect_structural(self, text: str, nv: NumericVariable) -> bool:
        """
        Returns true if the variable serves the document structure.

        :param text: The host text the variable was lexed from
        :param nv: The variable
        :return: Whether the variable is structural
        """
        prefix: str = text[:nv.start]
        if prefix.endswith(' '):
            prefix = prefix[:-1]

        if self._ascii_keyword is not None \
                and self._ascii_keyword.search(prefix):
            return True

        if any(prefix.endswith(keyword) for keyword in self._other_keywords):
            return True

        return any(text.startswith(suffix, nv.end)
                   for suffix in self._suffixes)

    def legitimate_numerics(self, text: str) -> list[NumericVariable]:
        """
        Returns the non-structural numeric variables of the text, the ones
        that may be masked.

        :param text: The host text
        :return: The legitimate numeric variables
        """
        return [variable for variable in self.lex_numerics(text)
                if not variable.structural]


_DEFAULT_LEXER = NumericLexer()


def lex_numerics(text: str) -> list[NumericVariable]:
    """Lexes with the default structural vocabulary."""
    return _DEFAULT_LEXER.lex_numerics(text)


def detect_structural(text: str, nv: NumericVariable) -> bool:
    """Detects structural variables with the default vocabulary."""
    return _DEFAULT_LEXER.detect_structural(text, nv)


def legitimate_numerics(text: str) -> list[NumericVariable]:
    """Returns legitimate variables under the default vocabulary."""
    return _DEFAULT_LEXER.legitimate_numerics(text)
