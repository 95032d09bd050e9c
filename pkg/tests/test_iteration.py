import unittest

from morasskit.iteration import (
    UnorderedError,
    ensure_increasing,
    is_increasing,
)


class TestEnsureIncreasing(unittest.TestCase):
    def test_increasing(self):
        self.assertEqual(list(ensure_increasing([1, 3, 7, 15])), [1, 3, 7, 15])

    def test_empty(self):
        self.assertEqual(list(ensure_increasing([])), [])

    def test_strict(self):
        with self.assertRaises(UnorderedError):
            list(ensure_increasing([1, 3, 3]))

        self.assertEqual(list(ensure_increasing([1, 3, 3], strict=False)), [1, 3, 3])

    def test_decrease(self):
        result = ensure_increasing([0, 2, 1], msg="Level sizes")
        self.assertEqual(next(result), 0)
        self.assertEqual(next(result), 2)
        with self.assertRaisesRegex(UnorderedError, "Level sizes"):
            next(result)

    def test_key(self):
        levels = [("a", 1), ("b", 2), ("c", 2)]
        with self.assertRaises(UnorderedError):
            list(ensure_increasing(levels, key=lambda item: item[1]))

        loose = ensure_increasing(levels, key=lambda item: item[1], strict=False)
        self.assertEqual(len(list(loose)), 3)


class TestIsIncreasing(unittest.TestCase):
    def test_values(self):
        self.assertTrue(is_increasing((0, 1, 5, 6)))
        self.assertFalse(is_increasing((0, 1, 1)))
        self.assertTrue(is_increasing((0, 1, 1), strict=False))
        self.assertTrue(is_increasing(()))

    def test_generator(self):
        self.assertTrue(is_increasing(x * x for x in range(5)))
