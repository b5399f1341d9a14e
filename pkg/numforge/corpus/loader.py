"""Reads raw corpora described by a manifest and reads/writes clean corpora
as JSON Lines."""
from __future__ import annotations

import logging
from itertools import groupby
from pathlib import Path

from numforge.common.errors import InputError
from numforge.common.io import read_json, read_jsonl, write_jsonl
from numforge.corpus.document import CleanDocument, Paragraph, RawDocument

log = logging.getLogger(__name__)

CLEAN_CORPUS_FILE: str = 'corpus.jsonl'
STATS_FILE: str = 'stats.json'


def load_corpus(manifest_path: str | Path) -> list[RawDocument]:
    """
    Reads the documents listed by a JSON manifest of the form
    ``{"documents": [{"file": ..., "doc_id": ..., "subject": ...}]}``. Files
    are resolved against the manifest's directory.

    :param manifest_path: The manifest file
    :return: The raw documents in manifest order
    """
    manifest_path = Path(manifest_path)
    manifest = read_json(manifest_path)
    entries = manifest.get('documents') if isinstance(manifest, dict) \
        else None
    if not isinstance(entries, list) or not entries:
        raise InputError(f'{manifest_path}: expected a non-empty '
                         '"documents" list')

    docs: list[RawDocument] = []
    seen: set[str] = set()
    for entry in entries:
        missing = {'file', 'doc_id', 'subject'} - set(entry)
        if missing:
            raise InputError(f'{manifest_path}: entry {entry!r} lacks '
                             f'{sorted(missing)}')

        doc_id: str = str(entry['doc_id'])
        if doc_id in seen:
            raise InputError(f'{manifest_path}: duplicate doc_id {doc_id!r}')
        seen.add(doc_id)

        path: Path = manifest_path.parent / entry['file']
        if not path.is_file():
            raise InputError(f'input file not found: {path}')

        text: str = path.read_text(encoding='utf-8')
        if not text.strip():
            raise InputError(f'document {doc_id!r} ({path}) has no text')

        docs.append(RawDocument(doc_id, str(entry['subject']), text))

    log.info('loaded %d documents from %s', len(docs), manifest_path)
    return docs


def write_clean_corpus(path: str | Path, docs: list[CleanDocument]) -> int:
    """
    Writes a clean corpus, one ``{doc_id, subject, index, text}`` object per
    paragraph.

    :param path: The JSON Lines file
    :param docs: The clean documents
    :return: The number of paragraphs written
    """
    return write_jsonl(path, (record for doc in docs
                              for record in doc.records()))


def read_clean_corpus(path: str | Path) -> list[CleanDocument]:
    """
    Reads a clean corpus written by :func:`write_clean_corpus`. A directory is
    taken to hold the file ``corpus.jsonl``.

    :param path: The JSON Lines file or its directory
    :return: The clean documents in file order
    """
    path = Path(path)
    if path.is_dir():
        path = path / CLEAN_CORPUS_FILE

    docs: list[CleanDocument] = []
    for doc_id, records in groupby(read_jsonl(path),
                                   key=lambda record: record['doc_id']):
        records = list(records)
        indices = [record['index'] for record in records]
        if indices != list(range(len(records))):
            raise InputError(f'{path}: paragraphs of {doc_id!r} are not '
                             'contiguous from 0')

        docs.append(CleanDocument(
            doc_id, records[0]['subject'],
            tuple(Paragraph(record['index'], record['text'])
                  for record in records)))

    if not docs:
        raise InputError(f'{path}: the clean corpus is empty')

    return docs
