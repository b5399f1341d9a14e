import unittest

from parameterized import parameterized

from numforge.common.rng import (derive_rng, key_entropy, sample_indices,
                                 uniform_int)


class TestDeriveRng(unittest.TestCase):

    """Unit test for the derive_rng function"""

    def test_same_seed_and_key(self):
        expected = derive_rng(42, 'doc:0-2').integers(1 << 30, size=8)

        actual_result = derive_rng(42, 'doc:0-2').integers(1 << 30, size=8)

        self.assertEqual(list(expected), list(actual_result))

    @parameterized.expand([
        ('other seed', 43, 'doc:0-2'),
        ('other key', 42, 'doc:3-5'),
    ])
    def test_different_stream(self, _, seed, key):
        expected = derive_rng(42, 'doc:0-2').integers(1 << 30, size=8)

        actual_result = derive_rng(seed, key).integers(1 << 30, size=8)

        self.assertNotEqual(list(expected), list(actual_result))

    def test_key_entropy_is_64_bit(self):
        actual_result: int = key_entropy('select-instances')

        self.assertTrue(0 <= actual_result < 1 << 64)


class TestUniformInt(unittest.TestCase):

    """Unit test for the uniform_int function"""

    @parameterized.expand([
        ('small interval', -3, 3),
        ('single value', 7, 7),
        ('beyond 64 bits', -(10 ** 30), 10 ** 30),
    ])
    def test_within_bounds(self, _, low, high):
        rng = derive_rng(1, 'uniform')

        actual_result = [uniform_int(rng, low, high) for _ in range(500)]

        self.assertTrue(all(low <= value <= high for value in actual_result))

    def test_reaches_both_ends(self):
        rng = derive_rng(1, 'ends')

        actual_result = {uniform_int(rng, -2, 2) for _ in range(500)}

        self.assertEqual({-2, -1, 0, 1, 2}, actual_result)

    def test_reversed_bounds(self):
        self.assertRaises(ValueError, uniform_int, derive_rng(1), 2, 1)


class TestSampleIndices(unittest.TestCase):

    """Unit test for the sample_indices function"""

    def test_sorted_and_distinct(self):
        rng = derive_rng(7, 'sample')

        actual_result: list[int] = sample_indices(rng, 20, 6)

        self.assertEqual(sorted(set(actual_result)), actual_result)
        self.assertEqual(6, len(actual_result))

    @parameterized.expand([
        ('none', 5, 0, []),
        ('all', 4, 4, [0, 1, 2, 3]),
    ])
    def test_edge_sizes(self, _, population, size, expected):
        actual_result = sample_indices(derive_rng(7), population, size)

        self.assertEqual(expected, actual_result)

    def test_too_many(self):
        self.assertRaises(ValueError, sample_indices, derive_rng(7), 3, 4)

    def test_uniform_inclusion(self):
        rng = derive_rng(11, 'uniformity')
        counts = [0] * 20

        for _ in range(10000):
            for index in sample_indices(rng, 20, 5):
                counts[index] += 1

        actual_result = [count / 10000 for count in counts]
        self.assertTrue(all(abs(share - 0.25) <= 0.02
                            for share in actual_result))
