"""Defines the hyperparameters of instance extraction and choice generation."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Any

from numforge.common.errors import ConfigError

MAX_SEED: int = (1 << 64) - 1


def ceil_ratio(ratio: float, count: int) -> int:
    """
    Returns ``ceil(ratio * count)`` computed on the decimal value of the ratio
    as written, so 0.07 * 100 is 7 and not 8.

    :param ratio: The ratio, as configured
    :param count: The number of items
    :return: The rounded-up product
    """
    return math.ceil(Fraction(repr(ratio)) * count)


@dataclass(frozen=True)
class PipelineConfig:
    """
    The hyperparameters of the dataset pipeline.

    ``n_min``/``n_max`` bound the paragraphs per instance, ``r_ins`` is the
    ratio of instances kept, ``r_nv`` the ratio of numeric variables masked
    per instance, ``n_cho`` the number of choices per question, ``s`` the
    scaler of the integer distractor interval and ``seed`` the 64-bit seed of
    every random draw.
    """

    n_min: int = 3
    n_max: int = 8
    r_ins: float = 0.05
    r_nv: float = 0.3
    n_cho: int = 4
    s: float = 1000
    seed: int = 42

    def __post_init__(self):
        for name in ('n_min', 'n_max', 'n_cho', 'seed'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f'{name} must be an integer, got {value!r}')

        for name in ('r_ins', 'r_nv', 's'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f'{name} must be a number, got {value!r}')

        self._require(1 <= self.n_min, '1 <= n_min')
        self._require(self.n_min <= self.n_max, 'n_min <= n_max')
        self._require(0 < self.r_ins <= 1, '0 < r_ins <= 1')
        self._require(0 < self.r_nv <= 1, '0 < r_nv <= 1')
        self._require(self.n_cho >= 2, 'n_cho >= 2')
        self._require(self.s > 0, 's > 0')
        self._require(0 <= self.seed <= MAX_SEED, '0 <= seed < 2^64')

    def _require(self, holds: bool, constraint: str):
        if not holds:
            raise ConfigError(f'constraint {constraint} violated by '
                              f'{self.to_dict()}')

    @property
    def scaler(self) -> Decimal:
        """Returns ``s`` as an exact decimal."""
        return Decimal(repr(self.s))

    def to_dict(self) -> dict[str, Any]:
        """Returns the configuration as a JSON-ready dictionary."""
        return asdict(self)
