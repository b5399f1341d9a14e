"""Scores predictions against gold answers and reports accuracy per
sub-domain, split into numeric (n) and non-numeric (non-n) questions."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import pandas as pd

from numforge.common.errors import InputError, MissingPrediction
from numforge.common.io import read_jsonl
from numforge.evaluation.questions import (EvalQuestion, QuestionClass,
                                           Subdomain, classify_question,
                                           pick_answer)
from numforge.numeric.lexer import NumericLexer

log = logging.getLogger(__name__)

OVERALL: str = 'Overall'

COLUMNS: tuple[str, ...] = ('n', 'non-n', 'avg')
COUNT_COLUMNS: tuple[str, ...] = ('#n', '#non-n')

_MISSING: str = '-'


def _percent(correct: int, count: int) -> float | None:
    return 100.0 * correct / count if count else None


@dataclass(frozen=True)
class GroupScore:
    """The correct answers and question counts of one group of questions."""

    n_correct: int = 0
    n_count: int = 0
    non_n_correct: int = 0
    non_n_count: int = 0

    @property
    def count(self) -> int:
        """Returns the number of questions in the group."""
        return self.n_count + self.non_n_count

    @property
    def n_acc(self) -> float | None:
        """Returns the accuracy on numeric questions in percent."""
        return _percent(self.n_correct, self.n_count)

    @property
    def non_n_acc(self) -> float | None:
        """Returns the accuracy on non-numeric questions in percent."""
        return _percent(self.non_n_correct, self.non_n_count)

    @property
    def avg_acc(self) -> float | None:
        """Returns the pooled accuracy over all the questions in percent."""
        return _percent(self.n_correct + self.non_n_correct, self.count)

    def accuracies(self) -> dict[str, float | None]:
        """Returns the accuracies keyed by report column."""
        return dict(zip(COLUMNS, (self.n_acc, self.non_n_acc, self.avg_acc)))

    def tally(self, category: QuestionClass, correct: bool) -> GroupScore:
        """
        Returns the group with one more question of the given class.

        :param category: The class of the question
        :param correct: Whether the prediction equals the gold answer
        :return: The updated group
        """
        if category is QuestionClass.NUMERIC:
            return GroupScore(self.n_correct + correct, self.n_count + 1,
                              self.non_n_correct, self.non_n_count)

        return GroupScore(self.n_correct, self.n_count,
                          self.non_n_correct + correct, self.non_n_count + 1)

    def __add__(self, other: GroupScore) -> GroupScore:
        return GroupScore(self.n_correct + other.n_correct,
                          self.n_count + other.n_count,
                          self.non_n_correct + other.non_n_correct,
                          self.non_n_count + other.non_n_count)

    def to_dict(self) -> dict[str, Any]:
        """Returns the JSON object of the group."""
        return {'n_acc': self.n_acc, 'non_n_acc': self.non_n_acc,
                'avg_acc': self.avg_acc, 'n_correct': self.n_correct,
                'n_count': self.n_count, 'non_n_correct': self.non_n_correct,
                'non_n_count': self.non_n_count}


def _format(value: float | None) -> str:
    return _MISSING if value is None else f'{value:.1f}'


@dataclass(frozen=True)
class ScoreReport:
    """
    Accuracy per sub-domain, in sub-domain order, and over all questions.
    ``per_subject`` keeps the same figures per subject for the subject-level
    average.
    """

    per_subdomain: dict[Subdomain, GroupScore]
    overall: GroupScore
    per_subject: dict[str, GroupScore] = field(default_factory=dict)

    @property
    def subject_macro_avg(self) -> float | None:
        """Returns the unweighted mean over subjects of their pooled
        accuracy."""
        accuracies = [group.avg_acc for group in self.per_subject.values()
                      if group.avg_acc is not None]
        return float(np.mean(accuracies)) if accuracies else None

    def groups(self) -> dict[str, GroupScore]:
        """Returns the report rows: every sub-domain, then Overall."""
        rows: dict[str, GroupScore] = {subdomain.value: group for subdomain,
                                       group in self.per_subdomain.items()}
        rows[OVERALL] = self.overall
        return rows

    def to_frame(self) -> pd.DataFrame:
        """Returns the report as a table with one row per group."""
        return pd.DataFrame.from_dict(
            {name: [_format(group.n_acc), _format(group.non_n_acc),
                    _format(group.avg_acc), group.n_count, group.non_n_count]
             for name, group in self.groups().items()},
            orient='index', columns=list(COLUMNS + COUNT_COLUMNS))

    def render_table(self) -> str:
        """Returns the report as an aligned text table."""
        return self.to_frame().to_string()

    def to_dict(self) -> dict[str, Any]:
        """Returns the JSON object of the report."""
        return {'groups': {name: group.to_dict()
                           for name, group in self.groups().items()},
                'subjects': {subject: group.to_dict()
                             for subject, group in self.per_subject.items()},
                'subject_macro_avg': self.subject_macro_avg}


def score(questions: Sequence[EvalQuestion], predictions: dict[str, str],
          lexer: NumericLexer | None = None) -> ScoreReport:
    """
    Counts the correct predictions per sub-domain and question class.

    :param questions: The questions
    :param predictions: The predicted identifier by question id
    :param lexer: The numeric lexer, the default vocabulary when None
    :return: The report
    """
    lexer = lexer or NumericLexer()
    per_subdomain: dict[Subdomain, GroupScore] = {}
    per_subject: dict[str, GroupScore] = {}
    for question in questions:
        if question.qid not in predictions:
            raise MissingPrediction(question.qid)

        category: QuestionClass = classify_question(question, lexer)
        correct: bool = predictions[question.qid] == question.gold
        per_subdomain[question.subdomain] = per_subdomain.get(
            question.subdomain, GroupScore()).tally(category, correct)
        per_subject[question.subject] = per_subject.get(
            question.subject, GroupScore()).tally(category, correct)

    ordered: dict[Subdomain, GroupScore] = {
        subdomain: per_subdomain[subdomain] for subdomain in Subdomain
        if subdomain in per_subdomain}
    overall: GroupScore = sum(ordered.values(), GroupScore())
    log.info('scored %d questions, %d numeric', overall.count,
             overall.n_count)
    return ScoreReport(ordered, overall,
                       {subject: per_subject[subject]
                        for subject in sorted(per_subject)})


def predictions_from_scores(questions: Sequence[EvalQuestion],
                            records: Iterable[dict[str, Any]]) \
        -> dict[str, str]:
    """
    Turns prediction records into a map from question id to identifier. A
    record holds either an ``identifier`` or one score per choice in
    ``scores``, answered by the largest score.

    :param questions: The questions the records answer
    :param records: The prediction records
    :return: The predicted identifier by question id
    """
    by_qid: dict[str, EvalQuestion] = {question.qid: question
                                       for question in questions}
    predictions: dict[str, str] = {}
    for record in records:
        qid = str(record.get('qid', ''))
        if qid not in by_qid:
            log.warning('ignoring the prediction of unknown question %r', qid)
            continue

        if 'identifier' in record:
            predictions[qid] = str(record['identifier']).strip()
        elif 'scores' in record:
            predictions[qid] = pick_answer(list(record['scores']),
                                           by_qid[qid].identifiers)
        else:
            raise InputError(f'prediction of {qid!r} has neither an '
                             'identifier nor scores')

    return predictions


def load_predictions(path: str | Path,
                     questions: Sequence[EvalQuestion]) -> dict[str, str]:
    """Reads a JSON Lines prediction or score file."""
    return predictions_from_scores(questions, read_jsonl(path))


@dataclass(frozen=True)
class AggregateReport:
    """The mean and population standard deviation of every report cell over
    independent runs."""

    cells: dict[str, dict[str, tuple[float, float] | None]]
    runs: int

    def to_frame(self) -> pd.DataFrame:
        """Returns the table of ``mean (std)`` cells."""
        return pd.DataFrame.from_dict(
            {name: [_MISSING if cell is None else f'{cell[0]:.1f} '
                    f'({cell[1]:.1f})' for cell in columns.values()]
             for name, columns in self.cells.items()},
            orient='index', columns=list(COLUMNS))

    def render_table(self) -> str:
        """Returns the aggregate as an aligned text table."""
        return self.to_frame().to_string()

    def to_dict(self) -> dict[str, Any]:
        """Returns the JSON object of the aggregate."""
        return {'runs': self.runs,
                'groups': {name: {column: None if cell is None
                                  else {'mean': cell[0], 'std': cell[1]}
                                  for column, cell in columns.items()}
                           for name, columns in self.cells.items()}}


def aggregate_reports(reports: Sequence[ScoreReport]) -> AggregateReport:
    """
    Averages the accuracies of reports over the same groups.

    :param reports: The reports of independent runs
    :return: The aggregate report
    """
    if not reports:
        raise InputError('no report to aggregate')

    names: list[str] = list(reports[0].groups())
    if any(list(report.groups()) != names for report in reports):
        raise InputError('reports to aggregate cover different groups')

    cells: dict[str, dict[str, tuple[float, float] | None]] = {}
    for name in names:
        cells[name] = {}
        for column in COLUMNS:
            values = [report.groups()[name].accuracies()[column]
                      for report in reports]
            values = [value for value in values if value is not None]
            cells[name][column] = (float(np.mean(values)),
                                   float(np.std(values))) if values else None

    return AggregateReport(cells, len(reports))
