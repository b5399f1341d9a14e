"""Defines the seeded random streams that make every stage reproducible.

A run has one 64-bit seed. Each unit of work (an instance, a selection pass)
gets its own stream derived from the seed and a string key, so work can be
spread over workers without changing any draw.
"""
from __future__ import annotations

import hashlib

import numpy as np

SeededRng = np.random.Generator

_U64_MASK: int = (1 << 64) - 1


def key_entropy(key: str) -> int:
    """
    Returns the 64-bit integer mixed into a stream for the given key: the
    first eight bytes, little-endian, of the SHA-256 digest of its UTF-8 form.

    :param key: The key naming the unit of work
    :return: An unsigned 64-bit integer
    """
    digest: bytes = hashlib.sha256(key.encode('utf-8')).digest()
    return int.from_bytes(digest[:8], byteorder='little')


def derive_rng(seed: int, key: str = '') -> SeededRng:
    """
    Returns a PCG64 generator seeded with
    ``SeedSequence([seed, key_entropy(key)])``.

    :param seed: The run seed, reduced modulo 2^64
    :param key: The key naming the unit of work
    :return: The random generator
    """
    sequence = np.random.SeedSequence([seed & _U64_MASK, key_entropy(key)])
    return np.random.Generator(np.random.PCG64(sequence))


def uniform_int(rng: SeededRng, low: int, high: int) -> int:
    """
    Returns an integer drawn uniformly from the closed interval [low, high].
    Bounds outside the 64-bit range are handled by rejection sampling over
    raw random bytes.

    :param rng: The random generator
    :param low: The smallest value
    :param high: The largest value
    :return: The drawn integer
    """
    if low > high:
        raise ValueError('the lower bound is greater than the upper bound')

    if -(1 << 62) <= low and high <= (1 << 62):
        return int(rng.integers(low, high, endpoint=True))

    span: int = high - low + 1
    num_bytes: int = (span.bit_length() + 7) // 8 + 1
    limit: int = (1 << (8 * num_bytes)) // span * span
    while True:
        draw: int = int.from_bytes(rng.bytes(num_bytes), byteorder='little')
        if draw < limit:
            return low + draw % span


def sample_indices(rng: SeededRng, population: int, size: int) -> list[int]:
    """
    Returns a uniformly random subset of ``range(population)`` of the given
    size, drawn without replacement with the first ``size`` steps of a
    Fisher-Yates shuffle, sorted ascending.

    :param rng: The random generator
    :param population: The number of items to choose from
    :param size: The number of items to choose
    :return: The chosen indices in ascending order
    """
    if not 0 <= size <= population:
        raise ValueError(f'cannot choose {size} of {population} items')

    indices: list[int] = list(range(population))
    for i in range(size):
        j: int = int(rng.integers(i, population))
        indices[i], indices[j] = indices[j], indices[i]

    return sorted(indices[:size])
