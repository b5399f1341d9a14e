"""Reads and writes the NMLF tensor container.

Layout, little-endian::

    magic      4 bytes  b'NMLF'
    version    u32      1
    count      u32      number of entries
    per entry:
      name_len u16, name (UTF-8)
      dtype    u8       0 = float32, 1 = float64
      rows     u32, cols u32
      payload  rows * cols items, row-major

A file is valid only if it is consumed exactly, with no byte missing or left.
"""
from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from numforge.common.byte import ByteBuffer
from numforge.common.errors import InputError, ShapeError, TensorFormatError

log = logging.getLogger(__name__)

MAGIC: bytes = b'NMLF'
VERSION: int = 1

_DTYPE_CODES: dict[int, str] = {0: 'f4', 1: 'f8'}


def _dtype_code(matrix: np.ndarray) -> int:
    return 0 if matrix.dtype == np.float32 else 1


def encode_tensors(tensors: dict[str, np.ndarray]) -> bytes:
    """
    Returns the NMLF encoding of named matrices, in the mapping's order.
    float32 matrices stay float32, everything else is stored as float64.

    :param tensors: The matrices by name
    :return: The encoded container
    """
    buffer: ByteBuffer = ByteBuffer()
    buffer.put_bytes(MAGIC)
    buffer.put_word32(VERSION)
    buffer.put_word32(len(tensors))
    for name, matrix in tensors.items():
        matrix = np.asarray(matrix)
        if matrix.ndim != 2:
            raise ShapeError(f'entry {name!r} is not a matrix, shape '
                             f'{matrix.shape}')

        encoded_name: bytes = name.encode('utf-8')
        code: int = _dtype_code(matrix)
        buffer.put_word16(len(encoded_name))
        buffer.put_bytes(encoded_name)
        buffer.put_byte(code)
        buffer.put_word32(matrix.shape[0])
        buffer.put_word32(matrix.shape[1])
        buffer.put_array(matrix, _DTYPE_CODES[code])

    return buffer.bytes()


def decode_tensors(data: bytes) -> dict[str, np.ndarray]:
    """
    Returns the named matrices of an NMLF container, in file order.

    :param data: The encoded container
    :return: The matrices by name, float32 or float64 as stored
    """
    buffer: ByteBuffer = ByteBuffer.from_bytes(data)
    try:
        if buffer.get_bytes(len(MAGIC)) != MAGIC:
            raise TensorFormatError('bad magic, not an NMLF file')

        version: int = buffer.get_word32()
        if version != VERSION:
            raise TensorFormatError(f'unsupported NMLF version {version}')

        tensors: dict[str, np.ndarray] = {}
        for _ in range(buffer.get_word32()):
            name: str = buffer.get_bytes(buffer.get_word16()).decode('utf-8')
            code: int = buffer.get_byte()
            if code not in _DTYPE_CODES:
                raise TensorFormatError(f'entry {name!r}: unknown dtype code '
                                        f'{code}')

            rows: int = buffer.get_word32()
            cols: int = buffer.get_word32()
            if name in tensors:
                raise TensorFormatError(f'duplicate entry {name!r}')

            tensors[name] = buffer.get_array(rows * cols, _DTYPE_CODES[code]) \
                .reshape(rows, cols).astype(_DTYPE_CODES[code])
    except TensorFormatError:
        raise
    except ValueError as error:
        raise TensorFormatError(f'truncated or corrupt NMLF data: {error}') \
            from error

    if buffer.remaining() != 0:
        raise TensorFormatError(f'{buffer.remaining()} trailing bytes after '
                                'the last entry')

    return tensors


def read_tensors(path: str | Path) -> dict[str, np.ndarray]:
    """Returns the named matrices stored in an NMLF file."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f'input file not found: {path}')

    try:
        return decode_tensors(path.read_bytes())
    except TensorFormatError as error:
        raise TensorFormatError(f'{path}: {error}') from error


def write_tensors(path: str | Path, tensors: dict[str, np.ndarray]):
    """Writes named matrices to an NMLF file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_tensors(tensors))
    log.info('wrote %d tensors to %s', len(tensors), path)
