"""Defines the pluggable tokenizers used to count corpus tokens and to build
training sequences."""
from __future__ import annotations

import hashlib
import re
from abc import ABC, abstractmethod

from numforge.common.errors import ConfigError


class Tokenizer(ABC):
    """
    Splits text into tokens and maps every token to a non-negative id.

    Ids are derived from the token text alone, so two runs, two processes or
    two machines always agree on them without sharing a vocabulary.
    """

    # ids are kept below 2^31 so that they fit a signed 32-bit integer
    _ID_MASK: int = 0x7fffffff

    name: str = ''

    @abstractmethod
    def tokenize(self, text: str) -> list[str]:
        """
        Returns the tokens of the given text in reading order.

        :param text: The text to split
        :return: The tokens
        """

    def token_id(self, token: str) -> int:
        """
        Returns the id of a token.

        :param token: The token
        :return: A stable id in [0, 2^31)
        """
        digest: bytes = hashlib.blake2b(token.encode('utf-8'),
                                        digest_size=4).digest()
        return int.from_bytes(digest, byteorder='little') & self._ID_MASK

    def encode(self, text: str) -> list[int]:
        """
        Returns the token ids of the given text.

        :param text: The text to encode
        :return: The token ids in reading order
        """
        return [self.token_id(token) for token in self.tokenize(text)]

    def count(self, text: str) -> int:
        """Returns the number of tokens of the given text."""
        return len(self.tokenize(text))


class DefaultTokenizer(Tokenizer):
    """
    One token per contiguous run of ASCII letters and digits, one token per
    CJK character and one token per any other non-space character.

    Under this tokenizer the blank marker ``____`` is four tokens long.
    """

    name: str = 'default'

    _TOKEN = re.compile(r'[A-Za-z0-9]+|\S')

    def tokenize(self, text: str) -> list[str]:
        return self._TOKEN.findall(text)


class WhitespaceTokenizer(Tokenizer):
    """One token per whitespace-separated word."""

    name: str = 'whitespace'

    def tokenize(self, text: str) -> list[str]:
        return text.split()


_TOKENIZERS: dict[str, type[Tokenizer]] = {
    DefaultTokenizer.name: DefaultTokenizer,
    WhitespaceTokenizer.name: WhitespaceTokenizer,
}


def get_tokenizer(name: str) -> Tokenizer:
    """
    Returns a tokenizer by its configuration name.

    :param name: One of 'default' or 'whitespace'
    :return: The tokenizer
    """
    try:
        return _TOKENIZERS[name]()
    except KeyError:
        raise ConfigError(f'unknown tokenizer {name!r}, expected one of '
                          f'{sorted(_TOKENIZERS)}') from None
