"""Generates the wrong numeric choices (distractors) of a masked variable.

A floating-point value v gets distractors drawn uniformly from
[floor(v), floor(v) + 1], rounded to the decimal places of its surface form.
An integer value v gets integers drawn uniformly from [-s|v|, s|v|]; for
v = 0 the interval is widened to [-s, s].
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Any

from numforge.common.errors import InsufficientRange
from numforge.common.rng import SeededRng, sample_indices, uniform_int
from numforge.numct.config import PipelineConfig, ceil_ratio
from numforge.numct.extractor import Instance
from numforge.numeric.lexer import NumericKind, NumericVariable

log = logging.getLogger(__name__)

MAX_RETRIES: int = 100

# integer intervals up to this size are enumerated instead of rejection sampled
_ENUMERATION_LIMIT: int = 64


@dataclass(frozen=True)
class ChoiceSet:
    """The correct value of a masked variable and its distractors."""

    nv_ref: str
    correct_value: Decimal
    distractors: tuple[Decimal, ...]
    kind: NumericKind
    zero_widened: bool = False
    precision_escalated: bool = False

    def metadata(self) -> dict[str, Any]:
        """Returns the generation flags recorded with an instruction."""
        return {'kind': self.kind.value, 'zero_widened': self.zero_widened,
                'precision_escalated': self.precision_escalated}


def format_decimal(value: Decimal) -> str:
    """Returns the plain positional notation of a decimal, never scientific."""
    return format(value, 'f')


def format_like(value: Decimal, surface: str) -> str:
    """
    Writes a distractor in the style of the surface form it stands in for, so
    that no choice differs from the answer by its spelling alone. A
    non-negative value gets a plus sign when the surface has one. The integer
    part is zero-padded to the width of the surface when the surface has a
    leading zero (``05``, ``01.5``).

    :param value: The distractor value
    :param surface: The surface form of the masked variable
    :return: The rendered distractor
    """
    text: str = format_decimal(abs(value))
    whole, _, _ = surface.lstrip('+-').partition('.')
    if len(whole) > 1 and whole.startswith('0'):
        integer, dot, fraction = text.partition('.')
        text = integer.zfill(len(whole)) + dot + fraction

    if value < 0:
        return '-' + text

    return '+' + text if surface.startswith('+') else text


def select_variables(inst: Instance, cfg: PipelineConfig,
                     rng: SeededRng) -> list[NumericVariable]:
    """
    Returns ``ceil(r_nv * M)`` of the instance's M legitimate variables,
    drawn uniformly without replacement and ordered by position.

    :param inst: The instance
    :param cfg: The pipeline configuration
    :param rng: The random generator of the instance
    :return: The variables to mask
    """
    size: int = ceil_ratio(cfg.r_nv, len(inst.numerics))
    return [inst.numerics[i]
            for i in sample_indices(rng, len(inst.numerics), size)]


def gen_float_distractors(v: Decimal, n: int, rng: SeededRng,
                          places: int | None = None) -> list[Decimal]:
    """
    Returns n distinct values drawn uniformly from [floor(v), floor(v) + 1]
    and rounded to ``places`` decimals, none equal to v. After
    ``MAX_RETRIES`` rejected draws for one value, one more decimal place is
    used.

    :param v: The correct value
    :param n: The number of distractors
    :param rng: The random generator
    :param places: The decimal places, by default those of v
    :return: The distractors in generation order
    """
    if n < 1:
        raise ValueError('the number of distractors must be at least one')

    if places is None:
        places = max(0, -v.as_tuple().exponent)

    low: int = math.floor(v)
    taken: set[Decimal] = {v}
    distractors: list[Decimal] = []
    while len(distractors) < n:
        for _ in range(MAX_RETRIES):
            scale: int = 10 ** places
            # exact at any length, the decimal context would round to 28 digits
            candidate: Decimal = Decimal(
                f'{low * scale + uniform_int(rng, 0, scale)}E-{places}')
            if candidate not in taken:
                taken.add(candidate)
                distractors.append(candidate)
                break
        else:
            places += 1
            log.debug('escalated distractor precision of %s to %d places',
                      v, places)

    return distractors


def gen_int_distractors(v: int, n: int, s: Decimal | float,
                        rng: SeededRng) -> list[int]:
    """
    Returns n distinct integers drawn uniformly from [-s|v|, s|v|], none
    equal to v. For v = 0 the interval is [-s, s].

    :param v: The correct value
    :param n: The number of distractors
    :param s: The positive scaler
    :param rng: The random generator
    :return: The distractors in generation order
    """
    if n < 1:
        raise ValueError('the number of distractors must be at least one')

    scaler = Decimal(repr(s)) if isinstance(s, float) else Decimal(s)
    if scaler <= 0:
        raise ValueError('the scaler must be greater than zero')

    bound: int = math.floor(Fraction(scaler) * abs(v)) if v != 0 \
        else math.floor(scaler)
    size: int = 2 * bound + 1 - (1 if -bound <= v <= bound else 0)
    if size < n:
        raise InsufficientRange(f'[{-bound}, {bound}] holds {size} integers '
                                f'other than {v}, {n} are needed')

    if size <= _ENUMERATION_LIMIT:
        candidates: list[int] = [value for value in range(-bound, bound + 1)
                                 if value != v]
        order: list[int] = sample_indices(rng, len(candidates), n)
        # sample_indices sorts; shuffle the picks so the order is random too
        picks: list[int] = [candidates[i] for i in order]
        return [picks[i] for i in rng.permutation(n)]

    taken: set[int] = {v}
    distractors: list[int] = []
    while len(distractors) < n:
        for _ in range(MAX_RETRIES):
            candidate: int = uniform_int(rng, -bound, bound)
            if candidate not in taken:
                taken.add(candidate)
                distractors.append(candidate)
                break
        else:
            raise InsufficientRange(f'no new integer in [{-bound}, {bound}] '
                                    f'after {MAX_RETRIES} draws')

    return distractors


def make_choice_set(nv: NumericVariable, cfg: PipelineConfig,
                    rng: SeededRng) -> ChoiceSet:
    """
    Generates the ``n_cho - 1`` distractors of a legitimate variable with the
    generator matching its kind.

    :param nv: The variable to mask
    :param cfg: The pipeline configuration
    :param rng: The random generator of the instance
    :return: The choice set
    """
    if nv.structural:
        raise ValueError(f'structural variable {nv.nv_id} cannot be masked')

    n: int = cfg.n_cho - 1
    if nv.kind is NumericKind.FLOAT:
        distractors = gen_float_distractors(nv.value, n, rng,
                                            nv.decimal_places)
        escalated: bool = any(-d.as_tuple().exponent > nv.decimal_places
                              for d in distractors)
        return ChoiceSet(nv.nv_id, nv.value, tuple(distractors), nv.kind,
                         precision_escalated=escalated)

    value: int = int(nv.value)
    if value == 0:
        log.debug('widened the interval of zero-valued %s to [-s, s]',
                  nv.nv_id)

    distractors = gen_int_distractors(value, n, cfg.scaler, rng)
    return ChoiceSet(nv.nv_id, nv.value,
                     tuple(Decimal(d) for d in distractors), nv.kind,
                     zero_widened=value == 0)
