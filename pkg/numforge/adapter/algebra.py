"""Mixes two low-rank adapter modules and merges the result into foundation
weights.

A module is mixed as its full delta ``scale * Up @ Down``. The SVD mix
averages the two deltas and keeps the top ``r = max(r1, r2)`` singular
triplets of the average; the mean and sum mixes keep the average or the sum
as they are. Merging adds the mixed delta to the base weights.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from numforge.adapter.tensorfile import read_tensors, write_tensors
from numforge.common.errors import LayerMismatch, NumericalFailure, ShapeError

log = logging.getLogger(__name__)

WeightSet = dict[str, np.ndarray]

UP_SUFFIX: str = '.up'
DOWN_SUFFIX: str = '.down'
SCALE_ENTRY: str = '__scale__'

# singular values below this share of the largest one count as zero
RANK_TOLERANCE: float = 1e-8


class MixMethod(enum.Enum):
    """The ways two adapter deltas are combined."""
    SVD = 'svd'
    MEAN = 'mean'
    SUM = 'sum'


@dataclass(frozen=True)
class LowRankAdapter:
    """
    A low-rank adapter module: per layer a ``Down`` factor of shape
    (rank, k_cols) and an ``Up`` factor of shape (d, rank); the layer delta is
    ``scale * Up @ Down``.
    """

    name: str
    layers: dict[str, tuple[np.ndarray, np.ndarray]]
    rank: int
    scale: float = 1.0

    def __post_init__(self):
        if self.rank < 1:
            raise ShapeError(f'adapter {self.name!r}: rank must be at least 1')

        for layer, (down, up) in self.layers.items():
            if down.ndim != 2 or up.ndim != 2:
                raise ShapeError(f'layer {layer!r}: factors must be matrices')

            if up.shape[1] != self.rank or down.shape[0] != self.rank:
                raise ShapeError(
                    f'layer {layer!r}: Up {up.shape} and Down {down.shape} '
                    f'do not share the rank {self.rank}')


@dataclass(frozen=True)
class AdapterDelta:
    """Full delta matrices by layer, with the rank they are known to have at
    most."""

    name: str
    layers: WeightSet = field(default_factory=dict)
    effective_rank: int = 1


def _as_float64(matrix: np.ndarray) -> np.ndarray:
    return np.asarray(matrix, dtype=np.float64)


def numerical_rank(matrix: np.ndarray) -> int:
    """
    Returns the number of singular values of the matrix not below
    ``RANK_TOLERANCE`` times the largest one.

    :param matrix: The matrix
    :return: Its numerical rank
    """
    singular_values: np.ndarray = np.linalg.svd(_as_float64(matrix),
                                                compute_uv=False)
    if singular_values.size == 0 or singular_values[0] == 0:
        return 0

    return int(np.sum(singular_values >= RANK_TOLERANCE * singular_values[0]))


def expand_delta(adapter: LowRankAdapter) -> AdapterDelta:
    """
    Returns the full delta ``scale * Up @ Down`` of every layer.

    :param adapter: The adapter module
    :return: The delta, with effective rank the adapter rank
    """
    layers: WeightSet = {}
    for layer, (down, up) in sorted(adapter.layers.items()):
        if up.shape[1] != down.shape[0]:
            raise ShapeError(f'layer {layer!r}: Up {up.shape} cannot multiply '
                             f'Down {down.shape}')
        layers[layer] = adapter.scale * (_as_float64(up) @ _as_float64(down))

    return AdapterDelta(adapter.name, layers, adapter.rank)


def _check_compatible(d1: AdapterDelta, d2: AdapterDelta):
    if set(d1.layers) != set(d2.layers):
        only_first = sorted(set(d1.layers) - set(d2.layers))
        only_second = sorted(set(d2.layers) - set(d1.layers))
        raise LayerMismatch(f'{d1.name!r} and {d2.name!r} differ in layers: '
                            f'only in first {only_first}, only in second '
                            f'{only_second}')

    for layer, matrix in d1.layers.items():
        if matrix.shape != d2.layers[layer].shape:
            raise ShapeError(f'layer {layer!r}: shapes {matrix.shape} and '
                             f'{d2.layers[layer].shape} differ')


def mix_mean(d1: AdapterDelta, d2: AdapterDelta) -> AdapterDelta:
    """
    Returns the elementwise mean of two deltas.

    :param d1: The first delta
    :param d2: The second delta
    :return: The mean delta, effective rank ``r1 + r2``
    """
    _check_compatible(d1, d2)
    layers: WeightSet = {
        layer: (_as_float64(d1.layers[layer]) + _as_float64(d2.layers[layer]))
        / 2 for layer in sorted(d1.layers)}
    return AdapterDelta(f'mean({d1.name},{d2.name})', layers,
                        d1.effective_rank + d2.effective_rank)


def mix_sum(d1: AdapterDelta, d2: AdapterDelta) -> AdapterDelta:
    """
    Returns the elementwise sum of two deltas.

    :param d1: The first delta
    :param d2: The second delta
    :return: The summed delta, effective rank ``r1 + r2``
    """
    _check_compatible(d1, d2)
    layers: WeightSet = {
        layer: _as_float64(d1.layers[layer]) + _as_float64(d2.layers[layer])
        for layer in sorted(d1.layers)}
    return AdapterDelta(f'sum({d1.name},{d2.name})', layers,
                        d1.effective_rank + d2.effective_rank)


def truncated_svd(matrix: np.ndarray, rank: int, layer: str = '') \
        -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Returns the top ``rank`` singular triplets of a matrix as ``(U', s',
    V'^T)``, singular values in non-increasing order. Each column of U' is
    signed so that its largest-magnitude entry is positive, and the matching
    row of V'^T follows. A rank above ``min(d, k_cols)`` keeps everything.

    :param matrix: The matrix, shape (d, k_cols)
    :param rank: The number of triplets to keep
    :param layer: The layer name used in error messages
    :return: U' (d, r), s' (r,), V'^T (r, k_cols)
    """
    try:
        u, s, vt = np.linalg.svd(_as_float64(matrix), full_matrices=False)
    except np.linalg.LinAlgError as error:
        raise NumericalFailure(layer, f'SVD did not converge: {error}') \
            from error

    rank = min(rank, s.size)
    u, s, vt = u[:, :rank], s[:rank], vt[:rank, :]
    pivots: np.ndarray = np.argmax(np.abs(u), axis=0)
    signs: np.ndarray = np.where(u[pivots, np.arange(rank)] < 0, -1.0, 1.0)
    return u * signs, s, vt * signs[:, np.newaxis]


def mix_svd(d1: AdapterDelta, d2: AdapterDelta, r1: int | None = None,
            r2: int | None = None) -> AdapterDelta:
    """
    Averages two deltas and keeps, per layer, the top ``r = max(r1, r2)``
    singular triplets of the average: ``U' diag(s') V'^T``.

    :param d1: The first delta
    :param d2: The second delta
    :param r1: The rank of the first module, its effective rank by default
    :param r2: The rank of the second module, its effective rank by default
    :return: The mixed delta, effective rank r
    """
    r1 = d1.effective_rank if r1 is None else r1
    r2 = d2.effective_rank if r2 is None else r2
    if r1 < 1 or r2 < 1:
        raise ValueError(f'ranks must be at least 1, got {r1} and {r2}')

    rank: int = max(r1, r2)
    mean: AdapterDelta = mix_mean(d1, d2)
    layers: WeightSet = {}
    for layer, matrix in mean.layers.items():
        u, s, vt = truncated_svd(matrix, rank, layer)
        layers[layer] = (u * s) @ vt

    log.debug('mixed %d layers by SVD at rank %d', len(layers), rank)
    return AdapterDelta(f'svd({d1.name},{d2.name})', layers, rank)


def mix(d1: AdapterDelta, d2: AdapterDelta, method: MixMethod,
        r1: int | None = None, r2: int | None = None) -> AdapterDelta:
    """Mixes two deltas with the given method."""
    if method is MixMethod.SVD:
        return mix_svd(d1, d2, r1, r2)

    if method is MixMethod.MEAN:
        return mix_mean(d1, d2)

    return mix_sum(d1, d2)


def factorize(delta: AdapterDelta, rank: int | None = None) \
        -> LowRankAdapter:
    """
    Returns a low-rank adapter whose expansion is the rank-truncated delta:
    ``Up = U' diag(sqrt(s'))`` and ``Down = diag(sqrt(s')) V'^T``.

    :param delta: The delta to factorize
    :param rank: The rank of the factors, the effective rank by default
    :return: The adapter module with scale 1
    """
    rank = delta.effective_rank if rank is None else rank
    layers: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for layer, matrix in sorted(delta.layers.items()):
        u, s, vt = truncated_svd(matrix, rank, layer)
        root: np.ndarray = np.sqrt(s)
        down: np.ndarray = np.zeros((rank, matrix.shape[1]))
        up: np.ndarray = np.zeros((matrix.shape[0], rank))
        down[:s.size] = root[:, np.newaxis] * vt
        up[:, :s.size] = u * root
        layers[layer] = (down, up)

    return LowRankAdapter(delta.name, layers, rank)


def scale_delta(delta: AdapterDelta, factor: float) -> AdapterDelta:
    """Returns the delta multiplied by a scalar; -1 gives its inverse."""
    return AdapterDelta(delta.name, {layer: factor * _as_float64(matrix)
                                     for layer, matrix in delta.layers.items()},
                        delta.effective_rank)


def merge(base: WeightSet, mixed: AdapterDelta) -> WeightSet:
    """
    Adds a delta to the base weights of its layers; base layers without a
    delta are kept as they are.

    :param base: The foundation weights by layer
    :param mixed: The delta to merge
    :return: The merged weights, float64
    """
    missing = sorted(set(mixed.layers) - set(base))
    if missing:
        raise LayerMismatch(f'delta layers {missing} are not in the base '
                            'weights')

    merged: WeightSet = {}
    for layer, weight in base.items():
        weight = _as_float64(weight)
        if layer in mixed.layers:
            if weight.shape != mixed.layers[layer].shape:
                raise ShapeError(f'layer {layer!r}: base {weight.shape} and '
                                 f'delta {mixed.layers[layer].shape} differ')
            weight = weight + mixed.layers[layer]
        merged[layer] = weight

    return merged


def adapter_to_tensors(adapter: LowRankAdapter) -> WeightSet:
    """Returns the file entries of an adapter module."""
    tensors: WeightSet = {}
    for layer, (down, up) in sorted(adapter.layers.items()):
        tensors[layer + DOWN_SUFFIX] = down
        tensors[layer + UP_SUFFIX] = up
    if adapter.scale != 1.0:
        tensors[SCALE_ENTRY] = np.array([[adapter.scale]])

    return tensors


def tensors_to_delta(name: str, tensors: WeightSet,
                     declared_rank: int | None = None) -> AdapterDelta:
    """
    Interprets file entries either as an adapter module (``<layer>.up`` and
    ``<layer>.down`` pairs, optional ``__scale__``) or as full deltas, and
    returns the full delta. The rank of a module is the shared factor
    dimension; the rank of full deltas is the declared one or else their
    largest numerical rank.

    :param name: The name of the delta
    :param tensors: The file entries
    :param declared_rank: The rank to assume, if known
    :return: The full delta
    """
    scale: float = 1.0
    if SCALE_ENTRY in tensors:
        scale = float(tensors[SCALE_ENTRY].reshape(-1)[0])
    entries: WeightSet = {key: value for key, value in tensors.items()
                          if key != SCALE_ENTRY}

    ups = {key[:-len(UP_SUFFIX)] for key in entries if key.endswith(UP_SUFFIX)}
    downs = {key[:-len(DOWN_SUFFIX)] for key in entries
             if key.endswith(DOWN_SUFFIX)}
    if entries and ups and ups == downs \
            and len(entries) == len(ups) + len(downs):
        ranks = {entries[layer + UP_SUFFIX].shape[1] for layer in ups}
        if len(ranks) != 1:
            raise ShapeError(f'{name}: layers have different ranks '
                             f'{sorted(ranks)}')
        rank: int = declared_rank or ranks.pop()
        adapter = LowRankAdapter(
            name, {layer: (entries[layer + DOWN_SUFFIX],
                           entries[layer + UP_SUFFIX]) for layer in ups},
            rank=entries[next(iter(ups)) + UP_SUFFIX].shape[1], scale=scale)
        return AdapterDelta(name, expand_delta(adapter).layers, rank)

    layers: WeightSet = {layer: _as_float64(matrix)
                         for layer, matrix in sorted(entries.items())}
    rank = declared_rank or max([numerical_rank(matrix)
                                 for matrix in layers.values()] + [1])
    return AdapterDelta(name, layers, rank)


def load_delta(path: str | Path, declared_rank: int | None = None) \
        -> AdapterDelta:
    """Reads an adapter module or a full delta file as a full delta."""
    path = Path(path)
    return tensors_to_delta(path.stem, read_tensors(path), declared_rank)


def save_delta(path: str | Path, delta: AdapterDelta):
    """Writes full deltas, one entry per layer."""
    write_tensors(path, dict(sorted(delta.layers.items())))


def save_adapter(path: str | Path, adapter: LowRankAdapter):
    """Writes an adapter module as ``.down``/``.up`` entries."""
    write_tensors(path, adapter_to_tensors(adapter))
