import random
import tempfile
import unittest
from pathlib import Path

from numforge.common.errors import InputError, MissingPrediction
from numforge.evaluation.questions import EvalQuestion, Subdomain
from numforge.evaluation.scoring import (OVERALL, AggregateReport, GroupScore,
                                         ScoreReport, aggregate_reports,
                                         load_predictions,
                                         predictions_from_scores, score)

_NUMERIC = ('10元', '20元', '30元', '40元')
_NON_NUMERIC = ('增加', '减少', '不变', '无法确定')


def _question(qid: str, subdomain: Subdomain, numeric: bool,
              subject: str = '金融学') -> EvalQuestion:
    return EvalQuestion(qid, subject, subdomain, '问题',
                        _NUMERIC if numeric else _NON_NUMERIC, 'A')


def _planted_questions() -> list[EvalQuestion]:
    counts = {Subdomain.ACCOUNTING: (68, 237),
              Subdomain.CERTIFICATE: (73, 261),
              Subdomain.ECONOMY: (42, 165),
              Subdomain.FINANCE: (56, 249)}
    questions: list[EvalQuestion] = []
    for subdomain, (n_count, non_n_count) in counts.items():
        questions += [_question(f'{subdomain.value}-n{i}', subdomain, True)
                      for i in range(n_count)]
        questions += [_question(f'{subdomain.value}-o{i}', subdomain, False)
                      for i in range(non_n_count)]

    return questions


class TestGroupScore(unittest.TestCase):

    """Unit test for the GroupScore class"""

    def test_empty(self):
        actual_result = GroupScore()

        self.assertEqual((None, None, None), (actual_result.n_acc,
                                              actual_result.non_n_acc,
                                              actual_result.avg_acc))

    def test_pooled_average(self):
        actual_result = GroupScore(n_correct=1, n_count=1, non_n_correct=0,
                                   non_n_count=3)

        self.assertEqual((100.0, 0.0, 25.0), (actual_result.n_acc,
                                              actual_result.non_n_acc,
                                              actual_result.avg_acc))

    def test_add(self):
        actual_result = GroupScore(1, 2, 3, 4) + GroupScore(1, 1, 0, 1)

        self.assertEqual(GroupScore(2, 3, 3, 5), actual_result)


class TestScore(unittest.TestCase):

    """Unit test for the score function"""

    def test_two_and_two(self):
        questions = [_question('n1', Subdomain.FINANCE, True),
                     _question('n2', Subdomain.FINANCE, True),
                     _question('o1', Subdomain.FINANCE, False),
                     _question('o2', Subdomain.FINANCE, False)]
        predictions = {'n1': 'A', 'n2': 'B', 'o1': 'A', 'o2': 'A'}

        actual_result: ScoreReport = score(questions, predictions)

        group = actual_result.groups()['Finance']
        self.assertEqual((50.0, 100.0, 75.0),
                         (group.n_acc, group.non_n_acc, group.avg_acc))
        self.assertEqual(group, actual_result.overall)

    def test_all_correct(self):
        questions = _planted_questions()

        actual_result: ScoreReport = score(
            questions, {q.qid: q.gold for q in questions})

        self.assertTrue(all(group.avg_acc == 100.0
                            for group in actual_result.groups().values()))

    def test_planted_counts(self):
        questions = _planted_questions()
        predictions = {q.qid: 'A' if i % 4 == 0 else 'B'
                       for i, q in enumerate(questions)}

        actual_result: ScoreReport = score(questions, predictions)

        self.assertEqual(['Accounting', 'Certificate', 'Economy', 'Finance',
                          OVERALL], list(actual_result.groups()))
        self.assertEqual([(68, 237), (73, 261), (42, 165), (56, 249)],
                         [(group.n_count, group.non_n_count) for group
                          in actual_result.per_subdomain.values()])
        self.assertEqual(1151, actual_result.overall.count)
        self.assertEqual(len(range(0, 1151, 4)),
                         actual_result.overall.n_correct
                         + actual_result.overall.non_n_correct)

    def test_order_independent(self):
        questions = _planted_questions()
        predictions = {q.qid: 'A' if i % 3 else 'C'
                       for i, q in enumerate(questions)}
        expected = score(questions, predictions).to_dict()
        shuffled = list(questions)
        random.Random(0).shuffle(shuffled)

        actual_result: ScoreReport = score(shuffled, predictions)

        self.assertEqual(expected, actual_result.to_dict())

    def test_only_present_subdomains(self):
        actual_result: ScoreReport = score(
            [_question('q', Subdomain.ECONOMY, False)], {'q': 'A'})

        self.assertEqual(['Economy', OVERALL], list(actual_result.groups()))

    def test_missing_prediction(self):
        self.assertRaises(MissingPrediction, score,
                          [_question('q', Subdomain.ECONOMY, False)], {})

    def test_subject_macro_average(self):
        questions = [_question('a1', Subdomain.FINANCE, True, '金融学'),
                     _question('a2', Subdomain.FINANCE, True, '金融学'),
                     _question('b1', Subdomain.FINANCE, True, '保险学')]
        predictions = {'a1': 'A', 'a2': 'A', 'b1': 'B'}

        actual_result: ScoreReport = score(questions, predictions)

        self.assertEqual(50.0, actual_result.subject_macro_avg)
        self.assertEqual(['保险学', '金融学'], list(actual_result.per_subject))

    def test_table(self):
        questions = [_question('n', Subdomain.FINANCE, True),
                     _question('o', Subdomain.ECONOMY, False)]

        actual_result = score(questions, {'n': 'A', 'o': 'B'}).to_frame()

        self.assertEqual(['100.0', '-', '100.0', 1, 0],
                         list(actual_result.loc['Finance']))
        self.assertEqual(['-', '0.0', '0.0', 0, 1],
                         list(actual_result.loc['Economy']))
        self.assertEqual('50.0', actual_result.loc[OVERALL, 'avg'])


class TestPredictions(unittest.TestCase):

    """Unit test for the predictions_from_scores and load_predictions
    functions"""

    _QUESTIONS = [_question('q1', Subdomain.FINANCE, True),
                  _question('q2', Subdomain.FINANCE, False)]

    def test_identifiers_and_scores(self):
        records = [{'qid': 'q1', 'identifier': ' C'},
                   {'qid': 'q2', 'scores': [0.1, 0.7, 0.7, 0.2]}]

        actual_result = predictions_from_scores(self._QUESTIONS, records)

        self.assertEqual({'q1': 'C', 'q2': 'B'}, actual_result)

    def test_unknown_question_skipped(self):
        with self.assertLogs('numforge.evaluation.scoring', 'WARNING'):
            actual_result = predictions_from_scores(
                self._QUESTIONS, [{'qid': 'q9', 'identifier': 'A'}])

        self.assertEqual({}, actual_result)

    def test_record_without_answer(self):
        self.assertRaises(InputError, predictions_from_scores,
                          self._QUESTIONS, [{'qid': 'q1'}])

    def test_load(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'predictions.jsonl'
            path.write_text('{"qid": "q1", "identifier": "A"}\n'
                            '{"qid": "q2", "scores": [0, 0, 0, 1]}\n',
                            encoding='utf-8')

            actual_result = load_predictions(path, self._QUESTIONS)

        self.assertEqual({'q1': 'A', 'q2': 'D'}, actual_result)


class TestAggregateReports(unittest.TestCase):

    """Unit test for the aggregate_reports function"""

    _QUESTIONS = [_question('n', Subdomain.FINANCE, True),
                  _question('o', Subdomain.FINANCE, False)]

    def test_mean_and_std(self):
        reports = [score(self._QUESTIONS, {'n': 'A', 'o': 'A'}),
                   score(self._QUESTIONS, {'n': 'B', 'o': 'A'})]

        actual_result: AggregateReport = aggregate_reports(reports)

        self.assertEqual(2, actual_result.runs)
        self.assertEqual((50.0, 50.0), actual_result.cells['Finance']['n'])
        self.assertEqual((100.0, 0.0),
                         actual_result.cells['Finance']['non-n'])
        self.assertEqual('75.0 (25.0)',
                         actual_result.to_frame().loc[OVERALL, 'avg'])

    def test_nothing_to_aggregate(self):
        self.assertRaises(InputError, aggregate_reports, [])

    def test_different_groups(self):
        reports = [score(self._QUESTIONS, {'n': 'A', 'o': 'A'}),
                   score([_question('e', Subdomain.ECONOMY, False)],
                         {'e': 'A'})]

        self.assertRaises(InputError, aggregate_reports, reports)
