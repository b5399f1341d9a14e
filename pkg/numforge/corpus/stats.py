"""Computes the summary statistics of a clean corpus."""
from numforge.common.errors import InputError
from numforge.common.tokenizer import Tokenizer
from numforge.corpus.document import CleanDocument, CorpusStats


def corpus_stats(docs: list[CleanDocument],
                 tokenizer: Tokenizer) -> CorpusStats:
    """
    Counts the distinct subjects, the documents and the tokens of a corpus.

    :param docs: The clean documents
    :param tokenizer: The tokenizer defining what a token is
    :return: The corpus statistics
    """
    if not docs:
        raise InputError('cannot compute statistics of an empty corpus')

    num_tokens: int = sum(tokenizer.count(paragraph.text)
                          for doc in docs for paragraph in doc.paragraphs)
    return CorpusStats(num_subjects=len({doc.subject for doc in docs}),
                       num_documents=len(docs),
                       num_tokens=num_tokens)
