"""Defines benchmark questions, their numeric / non-numeric classification,
few-shot prompt assembly and answer picking."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import pandas as pd

from numforge.common.errors import InputError, InsufficientExemplars
from numforge.common.io import read_jsonl
from numforge.numct.instructions import DEFAULT_IDENTIFIERS, PromptTemplate
from numforge.numeric.lexer import NumericLexer

REQUIRED_FIELDS: tuple[str, ...] = ('qid', 'subject', 'subdomain', 'stem',
                                    'gold')

DEFAULT_HEADER: str = '以下是中国关于{subject}考试的单项选择题，请选出其中的正确答案。\n\n'
DEFAULT_BLOCK: str = '{question}\n{choices}\n答案：'
SHOT_SEPARATOR: str = '\n\n'

_LEXER = NumericLexer()


class Subdomain(enum.Enum):
    """The financial sub-domains questions are grouped in."""
    ACCOUNTING = 'Accounting'
    CERTIFICATE = 'Certificate'
    ECONOMY = 'Economy'
    FINANCE = 'Finance'

    @classmethod
    def parse(cls, value: str) -> Subdomain:
        """Returns the sub-domain named by a case-insensitive string."""
        for subdomain in cls:
            if subdomain.value.lower() == str(value).strip().lower():
                return subdomain
        raise InputError(f'unknown sub-domain {value!r}, expected one of '
                         f'{[subdomain.value for subdomain in cls]}')


class QuestionClass(enum.Enum):
    """Whether a question's options contain numeric variables."""
    NUMERIC = 'numeric'
    NON_NUMERIC = 'non-numeric'


@dataclass(frozen=True)
class EvalQuestion:
    """A multiple-choice question; ``gold`` is the identifier of the correct
    option."""

    qid: str
    subject: str
    subdomain: Subdomain
    stem: str
    options: tuple[str, ...]
    gold: str
    identifiers: tuple[str, ...] = DEFAULT_IDENTIFIERS

    def __post_init__(self):
        if len(self.options) != len(self.identifiers):
            raise InputError(f'question {self.qid!r}: {len(self.options)} '
                             f'options for identifiers {self.identifiers}')

        if self.gold not in self.identifiers:
            raise InputError(f'question {self.qid!r}: gold {self.gold!r} is '
                             f'not one of {self.identifiers}')

    @classmethod
    def from_dict(cls, record: dict[str, Any]) -> EvalQuestion:
        """
        Returns a question from a record holding either an ``options`` list
        or one column per identifier (``A``, ``B``, ...).

        :param record: The question record
        :return: The question
        """
        missing = [name for name in REQUIRED_FIELDS if name not in record]
        if missing:
            raise InputError(f'question record lacks {missing}: {record!r}')

        options = record.get('options')
        if isinstance(options, str):
            try:
                options = json.loads(options)
            except json.JSONDecodeError as error:
                raise InputError(f'question {record["qid"]!r}: options are '
                                 f'not a JSON list: {error.msg}') from error
        if options is None:
            options = [record[identifier]
                       for identifier in DEFAULT_IDENTIFIERS
                       if identifier in record]
        if not options:
            raise InputError(f'question {record["qid"]!r} has no options')

        options = tuple(str(option) for option in options)
        return cls(qid=str(record['qid']), subject=str(record['subject']),
                   subdomain=Subdomain.parse(record['subdomain']),
                   stem=str(record['stem']), options=options,
                   gold=str(record['gold']).strip(),
                   identifiers=DEFAULT_IDENTIFIERS[:len(options)])

    def to_dict(self) -> dict[str, Any]:
        """Returns the JSON Lines record of the question."""
        return {'qid': self.qid, 'subject': self.subject,
                'subdomain': self.subdomain.value, 'stem': self.stem,
                'options': list(self.options), 'gold': self.gold}


def load_questions(path: str | Path) -> list[EvalQuestion]:
    """
    Reads questions from a JSON Lines file or, for a ``.csv`` suffix, from a
    CSV file with the same columns.

    :param path: The question file
    :return: The questions in file order
    """
    path = Path(path)
    if path.suffix.lower() == '.csv':
        if not path.is_file():
            raise InputError(f'input file not found: {path}')
        frame: pd.DataFrame = pd.read_csv(path, dtype=str,
                                          keep_default_na=False)
        records = frame.to_dict(orient='records')
    else:
        records = list(read_jsonl(path))

    questions: list[EvalQuestion] = [EvalQuestion.from_dict(record)
                                     for record in records]
    qids = [question.qid for question in questions]
    if len(set(qids)) != len(qids):
        raise InputError(f'{path}: question ids are not unique')

    return questions


def classify_question(q: EvalQuestion,
                      lexer: NumericLexer = _LEXER) -> QuestionClass:
    """
    Returns NUMERIC if any option contains a numeric variable, structural or
    not, and NON_NUMERIC otherwise. The stem plays no part.

    :param q: The question
    :param lexer: The numeric lexer
    :return: The question class
    """
    if any(lexer.lex_numerics(option) for option in q.options):
        return QuestionClass.NUMERIC

    return QuestionClass.NON_NUMERIC


def render_question(q: EvalQuestion, template: PromptTemplate,
                    answer: str = '') -> str:
    """Renders one question block, followed by its answer if given."""
    return template.render(q.stem, q.identifiers, q.options) + answer


def assemble_few_shot(q: EvalQuestion, exemplars: Sequence[EvalQuestion],
                      k_shots: int,
                      template: PromptTemplate = PromptTemplate(
                          text=DEFAULT_BLOCK),
                      header: str = DEFAULT_HEADER) -> str:
    """
    Returns the prompt made of the header, the first ``k_shots`` exemplars
    each followed by its gold identifier, and the target question without an
    answer.

    :param q: The target question
    :param exemplars: The answered exemplars, taken in order
    :param k_shots: The number of exemplars to include
    :param template: The template of one question block
    :param header: The text opening the prompt, may use ``{subject}``
    :return: The prompt
    """
    if k_shots < 0:
        raise ValueError('the number of shots cannot be negative')

    if len(exemplars) < k_shots:
        raise InsufficientExemplars(f'{k_shots} shots requested, '
                                    f'{len(exemplars)} exemplars given')

    blocks: list[str] = [render_question(exemplar, template, exemplar.gold)
                         for exemplar in exemplars[:k_shots]]
    blocks.append(render_question(q, template))
    return header.format(subject=q.subject) + SHOT_SEPARATOR.join(blocks)


def pick_answer(scores: Sequence[float], identifiers: Sequence[str]) -> str:
    """
    Returns the identifier with the largest score; ties go to the lowest
    index.

    :param scores: One score per choice, e.g. the output logits
    :param identifiers: The identifiers aligned with the scores
    :return: The picked identifier
    """
    if not scores or not identifiers:
        raise InputError('cannot pick an answer among no choices')

    if len(scores) != len(identifiers):
        raise InputError(f'{len(scores)} scores for {len(identifiers)} '
                         'identifiers')

    return identifiers[int(np.argmax(np.asarray(scores, dtype=np.float64)))]


def split_questions(questions: Sequence[EvalQuestion],
                    lexer: NumericLexer = _LEXER) -> list[dict[str, Any]]:
    """
    Returns the record of every question tagged with its ``category``,
    'numeric' or 'non-numeric', in input order.

    :param questions: The questions
    :param lexer: The numeric lexer
    :return: The tagged records
    """
    return [dict(question.to_dict(),
                 category=classify_question(question, lexer).value)
            for question in questions]
