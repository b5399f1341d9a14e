"""Defines common components to operate at byte level."""
from __future__ import annotations

import struct

import numpy as np


# every multi-byte word and array item is little-endian
_ORDER: str = '<'


class ByteBuffer:
    """
    Implements a dynamic array of bytes with a higher level of abstraction to
    perform read and write operations of fixed-size words and arrays.

    The buffer has an unlimited capacity and all write operations are performed
    at the end of the buffer. Read operations are relative: each one starts
    where the previous read stopped. Multi-byte words are stored
    little-endian.
    """

    @classmethod
    def from_bytes(cls, data: bytes) -> ByteBuffer:
        """
        Returns a byte buffer holding a copy of the given bytes, ready to be
        read from its first byte.

        :param data: The bytes to store
        :return: The byte buffer
        """
        byte_buffer: ByteBuffer = ByteBuffer()
        byte_buffer.put_bytes(data)
        return byte_buffer

    def __init__(self):
        """Constructs an empty byte buffer."""
        self._data: bytearray = bytearray()
        self._index: int = 0

    def remaining(self) -> int:
        """Returns the number of bytes not read yet."""
        return len(self._data) - self._index

    def _read(self, num_bytes: int) -> bytes:
        if num_bytes < 0:
            raise ValueError('the given parameter is not greater than or '
                             + 'equal to zero')

        if num_bytes > self.remaining():
            raise ValueError(f'cannot read {num_bytes} bytes, only '
                             f'{self.remaining()} left')

        start: int = self._index
        self._index += num_bytes
        return bytes(self._data[start:self._index])

    def _unpack(self, fmt: str, size: int) -> int | float:
        return struct.unpack(_ORDER + fmt, self._read(size))[0]

    def _pack(self, fmt: str, value: int | float):
        self._data += struct.pack(_ORDER + fmt, value)

    def get_byte(self) -> int:
        """Returns the next relative unsigned byte."""
        return self._unpack('B', 1)

    def get_word16(self) -> int:
        """Returns the next relative unsigned 16-bit word."""
        return self._unpack('H', 2)

    def get_word32(self) -> int:
        """Returns the next relative unsigned 32-bit word."""
        return self._unpack('I', 4)

    def get_bytes(self, num_bytes: int) -> bytes:
        """
        Returns the next relative sequence of raw bytes.

        :param num_bytes: The number of bytes to read
        """
        return self._read(num_bytes)

    def get_array(self, count: int, item_type: str) -> np.ndarray:
        """
        Returns the next relative sequence of numbers decoded
        little-endian.

        :param count: The number of items to read
        :param item_type: The numpy item code, e.g. 'f4' or 'f8'
        :return: A one-dimensional array with the decoded items
        """
        dtype: np.dtype = np.dtype(_ORDER + item_type)
        raw: bytes = self._read(count * dtype.itemsize)
        return np.frombuffer(raw, dtype=dtype, count=count)

    def put_byte(self, byte: int):
        """
        Relative put method to write an unsigned byte.

        :param byte: The byte value to write
        """
        if not 0 <= byte <= 0xff:
            raise ValueError('the given parameter is not between 0 and 255')

        self._pack('B', byte)

    def put_word16(self, word: int):
        """
        Relative put method to write an unsigned 16-bit word.

        :param word: The 16-bit word to write
        """
        if not 0 <= word <= 0xffff:
            raise ValueError('the parameter given is not a 16-bit word')

        self._pack('H', word)

    def put_word32(self, word: int):
        """
        Relative put method to write an unsigned 32-bit word.

        :param word: The 32-bit word to write
        """
        if not 0 <= word <= 0xffffffff:
            raise ValueError('the parameter given is not a 32-bit word')

        self._pack('I', word)

    def put_bytes(self, data: bytes):
        """
        Relative put method to write raw bytes as they are.

        :param data: The bytes to write
        """
        self._data += data

    def put_array(self, values: np.ndarray, item_type: str):
        """
        Relative put method to write numbers in row-major order, encoded
        little-endian.

        :param values: The numbers to write
        :param item_type: The numpy item code, e.g. 'f4' or 'f8'
        """
        dtype: np.dtype = np.dtype(_ORDER + item_type)
        self._data += np.ascontiguousarray(values, dtype=dtype).tobytes()

    def bytes(self) -> bytes:
        """Returns an immutable byte array representation of the buffer."""
        return bytes(self._data)
