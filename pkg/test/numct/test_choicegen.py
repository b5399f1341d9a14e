import math
import unittest
from decimal import Decimal
from fractions import Fraction

from parameterized import parameterized

from numforge.common.errors import InsufficientRange
from numforge.common.rng import derive_rng
from numforge.numct.choicegen import (ChoiceSet, format_decimal, format_like,
                                      gen_float_distractors,
                                      gen_int_distractors, make_choice_set,
                                      select_variables)
from numforge.numct.config import PipelineConfig
from numforge.numct.extractor import Instance
from numforge.numeric.lexer import NumericKind, NumericVariable, lex_numerics


def _variable(text: str, index: int = 0):
    return lex_numerics(text)[index]


def _random_surface(rng) -> str:
    digits = int(rng.integers(1, 33))
    whole = str(int(rng.integers(1, 10))) + ''.join(
        str(int(d)) for d in rng.integers(0, 10, digits - 1))
    if digits == 1 and rng.random() < 0.2:
        whole = '0'
    sign = '-' if rng.random() < 0.3 else ''
    if rng.random() < 0.5:
        return sign + whole

    places = int(rng.integers(1, 5))
    return sign + whole + '.' + ''.join(
        str(int(d)) for d in rng.integers(0, 10, places))


class TestGenFloatDistractors(unittest.TestCase):

    """Unit test for the gen_float_distractors function"""

    def test_interval_law(self):
        rng = derive_rng(7, 'float-interval')
        values = [Decimal('3.14'), Decimal('0.5'), Decimal('-2.75'),
                  Decimal('99.999'), Decimal('10.0')]

        for trial in range(20000):
            v = values[trial % len(values)]
            places = -v.as_tuple().exponent

            actual_result = gen_float_distractors(v, 5, rng)

            low = int(v.to_integral_value(rounding='ROUND_FLOOR'))
            self.assertEqual(5, len(set(actual_result)))
            self.assertNotIn(v, actual_result)
            for distractor in actual_result:
                self.assertTrue(low <= distractor <= low + 1)
                self.assertEqual(-places, distractor.as_tuple().exponent)

    def test_escalates_precision(self):
        actual_result = gen_float_distractors(Decimal('3'), 3,
                                              derive_rng(1, 'escalate'),
                                              places=0)

        self.assertEqual(3, len(set(actual_result)))
        self.assertNotIn(Decimal('3'), actual_result)
        self.assertTrue(all(Decimal(3) <= d <= Decimal(4)
                            for d in actual_result))
        self.assertTrue(any(d.as_tuple().exponent < 0 for d in actual_result))

    def test_deterministic(self):
        expected = gen_float_distractors(Decimal('2.5'), 3,
                                         derive_rng(42, 'same'))

        actual_result = gen_float_distractors(Decimal('2.5'), 3,
                                              derive_rng(42, 'same'))

        self.assertEqual(expected, actual_result)

    def test_long_value_keeps_precision(self):
        v = Decimal('123456789012345678901234567890.5')

        actual_result = gen_float_distractors(v, 3, derive_rng(3, 'long'))

        self.assertEqual(3, len(set(actual_result)))
        self.assertNotIn(v, actual_result)
        for distractor in actual_result:
            self.assertTrue(math.floor(v) <= distractor <= math.floor(v) + 1)
            self.assertEqual(-1, distractor.as_tuple().exponent)

    def test_no_distractor(self):
        self.assertRaises(ValueError, gen_float_distractors, Decimal('1.5'),
                          0, derive_rng(0))


class TestGenIntDistractors(unittest.TestCase):

    """Unit test for the gen_int_distractors function"""

    @parameterized.expand([
        ('sampled interval', 250, 1000, 250000),
        ('enumerated interval', 10, 1, 10),
        ('negative value', -40, 2, 80),
        ('fractional scaler', 50, 0.3, 15),
        ('zero widened', 0, 1000, 1000),
    ])
    def test_interval_law(self, _, v, s, bound):
        rng = derive_rng(11, f'int-interval-{v}-{s}')

        for _ in range(2000):
            actual_result = gen_int_distractors(v, 3, s, rng)

            self.assertEqual(3, len(set(actual_result)))
            self.assertNotIn(v, actual_result)
            self.assertTrue(all(-bound <= d <= bound for d in actual_result))

    def test_uniform_over_enumerated_interval(self):
        rng = derive_rng(2, 'int-uniform')
        counts = {-2: 0, -1: 0, 0: 0, 1: 0}

        for _ in range(10000):
            counts[gen_int_distractors(2, 1, 1, rng)[0]] += 1

        actual_result = [count / 10000 for count in counts.values()]
        self.assertTrue(all(abs(share - 0.25) <= 0.02
                            for share in actual_result))

    @parameterized.expand([
        ('too narrow', 1, 3, 1),
        ('zero with tiny scaler', 0, 3, 0.5),
    ])
    def test_insufficient_range(self, _, v, n, s):
        self.assertRaises(InsufficientRange, gen_int_distractors, v, n, s,
                          derive_rng(0))

    def test_exactly_enough(self):
        actual_result = gen_int_distractors(1, 2, 1, derive_rng(0))

        self.assertEqual([-1, 0], sorted(actual_result))

    @parameterized.expand([
        ('integral scaler', 1000),
        ('fractional scaler', 0.3),
    ])
    def test_long_value(self, _, s):
        v = 123456789012345678901234567891
        bound = math.floor(Fraction(str(s)) * v)
        rng = derive_rng(5, f'long-{s}')

        for _ in range(200):
            actual_result = gen_int_distractors(v, 3, s, rng)

            self.assertEqual(3, len(set(actual_result)))
            self.assertNotIn(v, actual_result)
            self.assertTrue(all(-bound <= d <= bound for d in actual_result))

    @parameterized.expand([
        ('zero scaler', 0),
        ('negative scaler', -2),
    ])
    def test_invalid_scaler(self, _, s):
        self.assertRaises(ValueError, gen_int_distractors, 5, 1, s,
                          derive_rng(0))


class TestMakeChoiceSet(unittest.TestCase):

    """Unit test for the make_choice_set function"""

    def test_integer(self):
        nv = _variable('本金为10000元')

        actual_result: ChoiceSet = make_choice_set(nv, PipelineConfig(),
                                                   derive_rng(0, 'int'))

        self.assertEqual(NumericKind.INTEGER, actual_result.kind)
        self.assertEqual(3, len(actual_result.distractors))
        self.assertEqual(Decimal(10000), actual_result.correct_value)
        self.assertFalse(actual_result.zero_widened)

    def test_zero_widened(self):
        nv = _variable('余额为0元')

        actual_result: ChoiceSet = make_choice_set(nv, PipelineConfig(s=5),
                                                   derive_rng(0, 'zero'))

        self.assertTrue(actual_result.zero_widened)
        self.assertTrue(all(-5 <= d <= 5 for d in actual_result.distractors))
        self.assertTrue(actual_result.metadata()['zero_widened'])

    def test_float(self):
        nv = _variable('利率为3.25%')

        actual_result: ChoiceSet = make_choice_set(nv, PipelineConfig(),
                                                   derive_rng(0, 'float'))

        self.assertEqual(NumericKind.FLOAT, actual_result.kind)
        self.assertFalse(actual_result.precision_escalated)
        self.assertTrue(all(3 <= d <= 4 for d in actual_result.distractors))

    def test_float_escalated(self):
        nv = _variable('增长了1.0倍')

        actual_result: ChoiceSet = make_choice_set(
            nv, PipelineConfig(n_cho=13), derive_rng(0, 'escalated'))

        self.assertEqual(12, len(set(actual_result.distractors)))
        self.assertTrue(actual_result.precision_escalated)

    def test_interval_laws_over_random_values(self):
        driver = derive_rng(2024, 'random-values')
        scalers = (1000, 3, 2.5)

        for trial in range(100000):
            surface = _random_surface(driver)
            s = scalers[trial % len(scalers)]
            nv = NumericVariable('nv-0', 0, len(surface), surface,
                                 NumericKind.FLOAT if '.' in surface
                                 else NumericKind.INTEGER, Decimal(surface))

            actual_result: ChoiceSet = make_choice_set(
                nv, PipelineConfig(s=s),
                derive_rng(int(driver.integers(1 << 62)), 'choices'))

            choices = (nv.value,) + actual_result.distractors
            self.assertEqual(4, len(set(choices)))
            if nv.kind is NumericKind.FLOAT:
                low = math.floor(nv.value)
                self.assertTrue(all(low <= d <= low + 1
                                    for d in actual_result.distractors))
                self.assertTrue(all(
                    -d.as_tuple().exponent == nv.decimal_places
                    for d in actual_result.distractors))
            else:
                v = int(nv.value)
                bound = math.floor(Fraction(str(s)) * abs(v)) if v \
                    else math.floor(s)
                self.assertTrue(all(-bound <= d <= bound
                                    for d in actual_result.distractors))

    def test_structural(self):
        nv = _variable('见图3')

        self.assertRaises(ValueError, make_choice_set, nv, PipelineConfig(),
                          derive_rng(0))


class TestSelectVariables(unittest.TestCase):

    """Unit test for the select_variables function"""

    def test_count_and_order(self):
        text = '1元，2元，3元，4元，5元，6元，7元。'
        inst = Instance('doc:0-0', 'doc', (0, 0), text,
                        tuple(lex_numerics(text)))

        actual_result = select_variables(inst, PipelineConfig(r_nv=0.3),
                                         derive_rng(0, 'variables'))

        self.assertEqual(3, len(actual_result))
        self.assertEqual(sorted(actual_result, key=lambda nv: nv.start),
                         actual_result)


class TestFormatDecimal(unittest.TestCase):

    """Unit test for the format_decimal function"""

    @parameterized.expand([
        ('integer', Decimal(250000), '250000'),
        ('keeps trailing zero', Decimal('3.10'), '3.10'),
        ('never scientific', Decimal('1E+3'), '1000'),
        ('negative', Decimal('-0.5'), '-0.5'),
    ])
    def test_format(self, _, value, expected):
        actual_result: str = format_decimal(value)

        self.assertEqual(expected, actual_result)


class TestFormatLike(unittest.TestCase):

    """Unit test for the format_like function"""

    @parameterized.expand([
        ('plain', Decimal(17), '250', '17'),
        ('zero padded', Decimal(3), '05', '03'),
        ('zero padded negative', Decimal(-3), '05', '-03'),
        ('wider than surface', Decimal(1726), '05', '1726'),
        ('zero padded float', Decimal('1.5'), '01.2', '01.5'),
        ('plus sign', Decimal(5), '+5', '+5'),
        ('plus sign zero', Decimal(0), '+5', '+0'),
        ('negative under plus sign', Decimal(-4), '+5', '-4'),
        ('leading zero float', Decimal('0.3'), '0.5', '0.3'),
    ])
    def test_format(self, _, value, surface, expected):
        actual_result: str = format_like(value, surface)

        self.assertEqual(expected, actual_result)
