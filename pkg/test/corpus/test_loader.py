import json
import tempfile
import unittest
from pathlib import Path

from numforge.common.errors import InputError
from numforge.corpus.document import CleanDocument, Paragraph
from numforge.corpus.loader import (load_corpus, read_clean_corpus,
                                    write_clean_corpus)

FIXTURES = Path(__file__).resolve().parents[2] / 'fixtures'


class TestLoadCorpus(unittest.TestCase):

    """Unit test for the load_corpus function"""

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.root = Path(self.directory.name)

    def tearDown(self):
        self.directory.cleanup()

    def _manifest(self, entries: list[dict]) -> Path:
        path = self.root / 'manifest.json'
        path.write_text(json.dumps({'documents': entries}), encoding='utf-8')
        return path

    def test_fixture_manifest(self):
        actual_result = load_corpus(FIXTURES / 'manifest.json')

        self.assertEqual(['money-banking', 'securities', 'accounting'],
                         [doc.doc_id for doc in actual_result])
        self.assertEqual('证券投资学', actual_result[1].subject)

    def test_duplicate_doc_id(self):
        (self.root / 'a.txt').write_text('正文。', encoding='utf-8')
        manifest = self._manifest([
            {'file': 'a.txt', 'doc_id': 'a', 'subject': 's'},
            {'file': 'a.txt', 'doc_id': 'a', 'subject': 's'}])

        self.assertRaisesRegex(InputError, 'duplicate', load_corpus, manifest)

    def test_missing_file(self):
        manifest = self._manifest([
            {'file': 'absent.txt', 'doc_id': 'a', 'subject': 's'}])

        self.assertRaisesRegex(InputError, 'absent.txt', load_corpus,
                               manifest)

    def test_empty_text(self):
        (self.root / 'a.txt').write_text(' \n', encoding='utf-8')
        manifest = self._manifest([
            {'file': 'a.txt', 'doc_id': 'a', 'subject': 's'}])

        self.assertRaisesRegex(InputError, "'a'", load_corpus, manifest)

    def test_entry_without_subject(self):
        manifest = self._manifest([{'file': 'a.txt', 'doc_id': 'a'}])

        self.assertRaisesRegex(InputError, 'subject', load_corpus, manifest)


class TestCleanCorpus(unittest.TestCase):

    """Unit test for the clean corpus reader and writer"""

    def test_written_corpus_reads_back(self):
        docs = [CleanDocument('a', '会计学', (Paragraph(0, '甲。'),
                                              Paragraph(1, '乙。'))),
                CleanDocument('b', '金融学', (Paragraph(0, '丙。'),))]
        with tempfile.TemporaryDirectory() as directory:
            count = write_clean_corpus(Path(directory) / 'corpus.jsonl', docs)

            actual_result = read_clean_corpus(directory)

        self.assertEqual(3, count)
        self.assertEqual(docs, actual_result)

    def test_gap_in_indices(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'corpus.jsonl'
            path.write_text(
                '{"doc_id":"a","subject":"s","index":0,"text":"甲"}\n'
                '{"doc_id":"a","subject":"s","index":2,"text":"乙"}\n',
                encoding='utf-8')

            self.assertRaisesRegex(InputError, 'contiguous',
                                   read_clean_corpus, path)
