import unittest
from decimal import Decimal

from parameterized import parameterized

from numforge.common.errors import ConfigError
from numforge.numct.config import PipelineConfig, ceil_ratio


class TestPipelineConfig(unittest.TestCase):

    """Unit test for the PipelineConfig class"""

    def test_defaults(self):
        actual_result = PipelineConfig()

        self.assertEqual((3, 8, 0.05, 0.3, 4, 1000),
                         (actual_result.n_min, actual_result.n_max,
                          actual_result.r_ins, actual_result.r_nv,
                          actual_result.n_cho, actual_result.s))

    @parameterized.expand([
        ('n_min above n_max', {'n_min': 10, 'n_max': 2}, 'n_min <= n_max'),
        ('zero n_min', {'n_min': 0}, '1 <= n_min'),
        ('zero r_ins', {'r_ins': 0}, '0 < r_ins <= 1'),
        ('r_nv above one', {'r_nv': 1.5}, '0 < r_nv <= 1'),
        ('single choice', {'n_cho': 1}, 'n_cho >= 2'),
        ('negative scaler', {'s': -1}, 's > 0'),
        ('negative seed', {'seed': -1}, '0 <= seed'),
    ])
    def test_constraint_named(self, _, fields, constraint):
        with self.assertRaises(ConfigError) as context:
            PipelineConfig(**fields)

        self.assertIn(constraint, str(context.exception))

    @parameterized.expand([
        ('float n_min', {'n_min': 2.5}),
        ('string ratio', {'r_ins': '0.5'}),
        ('boolean seed', {'seed': True}),
    ])
    def test_wrong_type(self, _, fields):
        self.assertRaises(ConfigError, PipelineConfig, **fields)

    def test_scaler_is_exact(self):
        actual_result: Decimal = PipelineConfig(s=0.1).scaler

        self.assertEqual(Decimal('0.1'), actual_result)


class TestCeilRatio(unittest.TestCase):

    """Unit test for the ceil_ratio function"""

    @parameterized.expand([
        ('exact product', 0.05, 100, 5),
        ('rounded up', 0.3, 7, 3),
        ('at least one', 0.05, 1, 1),
        ('binary float artefact', 0.07, 100, 7),
        ('nothing to choose from', 0.3, 0, 0),
        ('whole ratio', 1, 9, 9),
    ])
    def test_ceil(self, _, ratio, count, expected):
        actual_result: int = ceil_ratio(ratio, count)

        self.assertEqual(expected, actual_result)
