"""Defines the helpers that read and write the toolkit's text artifacts."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Iterable, Iterator

from numforge.common.errors import InputError

_CHUNK_SIZE: int = 1 << 20


def read_jsonl(path: str | Path) -> Iterator[dict[str, Any]]:
    """
    Yields the JSON objects stored one per line in the given file. Blank lines
    are skipped.

    :param path: The JSON Lines file
    :return: An iterator over the decoded objects
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f'input file not found: {path}')

    with path.open(encoding='utf-8') as stream:
        for line_number, line in enumerate(stream, start=1):
            if not line.strip():
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as error:
                raise InputError(f'{path}:{line_number}: {error.msg}') \
                    from error


def write_jsonl(path: str | Path, records: Iterable[dict[str, Any]]) -> int:
    """
    Writes one compact JSON object per line, UTF-8, keys in insertion order.

    :param path: The destination file, parent directories are created
    :param records: The objects to write
    :return: The number of lines written
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count: int = 0
    with path.open('w', encoding='utf-8', newline='\n') as stream:
        for record in records:
            stream.write(json.dumps(record, ensure_ascii=False,
                                    separators=(',', ':')))
            stream.write('\n')
            count += 1

    return count


def read_json(path: str | Path) -> Any:
    """Returns the decoded content of a JSON file."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f'input file not found: {path}')

    try:
        return json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as error:
        raise InputError(f'{path}: {error.msg}') from error


def write_json(path: str | Path, value: Any):
    """Writes a value as indented UTF-8 JSON followed by a newline."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(value, ensure_ascii=False, indent=2) + '\n',
                    encoding='utf-8', newline='\n')


def file_digest(path: str | Path) -> str:
    """
    Returns the SHA-256 digest of a file's content as ``sha256:<hex>``.

    :param path: The file to hash
    :return: The prefixed hexadecimal digest
    """
    digest = hashlib.sha256()
    with Path(path).open('rb') as stream:
        for chunk in iter(lambda: stream.read(_CHUNK_SIZE), b''):
            digest.update(chunk)

    return 'sha256:' + digest.hexdigest()
