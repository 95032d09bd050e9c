import random
import unittest

import pytest  # type: ignore
from hypothesis import given, settings
from hypothesis import strategies as st

from morasskit.plam import (
    PCondition,
    PreconditionViolation,
    TypeCode,
    brute_force_upper_bound,
    color_compat,
    compatible,
    delta_system,
    dense_witness,
    directed_close,
    limit_algebra,
    parallel_close,
    split_extensions,
    split_norms,
    stronger,
    type_code,
)

from .strategies import conditions, random_condition


def cond(w, leq=(), dis=()):
    return PCondition.build(w, leq, dis)


# 0 <= 1
P = cond([0, 1], [(0, 1)])
# 0 <= 1 and d(1, 2)
Q = cond([0, 1, 2], [(0, 1)], [(1, 2)])
# d(0, 1)
R = cond([0, 1, 2], dis=[(0, 1)])
# d(1, 2)
T = cond([1, 2], dis=[(1, 2)])


class TestPCondition(unittest.TestCase):
    def test_points(self):
        self.assertEqual(
            P.points, frozenset({frozenset(), frozenset({1}), frozenset({0, 1})})
        )
        self.assertEqual(P.indices, (0, 1))
        self.assertEqual(P.w, frozenset({0, 1}))
        self.assertEqual(Q.project([0]), frozenset({frozenset(), frozenset({0})}))

    def test_equivalent(self):
        chain = cond([0, 1, 2], [(0, 1), (1, 2), (0, 2)])
        self.assertTrue(chain.equivalent(cond([0, 1, 2], [(0, 1), (1, 2)])))
        self.assertTrue(chain.canonical().equivalent(chain))
        self.assertFalse(chain.equivalent(cond([0, 1, 2], [(0, 1)])))
        self.assertFalse(P.equivalent(cond([0, 2], [(0, 2)])))

    def test_type_code(self):
        self.assertEqual(type_code(P), TypeCode(2, (0, 2, 3)))
        self.assertEqual(type_code(cond([4, 9], [(4, 9)])), type_code(P))
        self.assertNotEqual(type_code(cond([4, 9], [(9, 4)])), type_code(P))


class TestStronger(unittest.TestCase):
    def test_extension(self):
        self.assertTrue(stronger(P, Q))
        self.assertFalse(stronger(Q, P))
        self.assertTrue(stronger(P, P))

    def test_changes_the_projection(self):
        self.assertFalse(stronger(P, R))
        self.assertFalse(stronger(cond([0, 1]), Q))

    def test_implied_relation(self):
        # 0 <= 2 and d(1, 2) make 0 and 1 disjoint.
        s = cond([0, 1, 2], [(0, 2)], [(1, 2)])
        self.assertTrue(stronger(cond([0, 1], dis=[(0, 1)]), s))
        self.assertFalse(stronger(cond([0, 1]), s))


class TestCompatible(unittest.TestCase):
    def test_amalgam(self):
        amalgam = compatible(P, T)
        self.assertIsNotNone(amalgam)
        self.assertTrue(amalgam.equivalent(Q))
        self.assertTrue(stronger(P, amalgam) and stronger(T, amalgam))
        self.assertEqual(brute_force_upper_bound(P, T), amalgam.points)

    def test_disagreement(self):
        self.assertIsNone(compatible(P, R))
        self.assertIsNone(brute_force_upper_bound(P, R))

    def test_generator_zero_on_both_sides(self):
        # 0 is zero in both; the joint order puts 0 below 3 while q has d(0, 3).
        p = cond([0, 1, 2], [(0, 1), (0, 2)], [(1, 2)])
        q = cond([0, 1, 3, 4, 5], [(1, 3), (0, 4), (0, 5)], [(0, 3), (4, 5)])
        amalgam = compatible(p, q)

        self.assertIsNotNone(amalgam)
        self.assertEqual(amalgam.points, brute_force_upper_bound(p, q))
        self.assertNotIn(frozenset({0, 3}), amalgam.presentation.dis)

    def test_opposite_orders_on_zero_points(self):
        # 0 and 1 are zero on both sides; the joint order has 0 <= 1 <= 0.
        p = cond([0, 1, 2, 3], [(0, 1), (1, 2), (1, 3)], [(2, 3)])
        q = cond([0, 1, 4, 5], [(1, 0), (0, 4), (0, 5)], [(4, 5)])
        fibre = brute_force_upper_bound(p, q)
        amalgam = compatible(p, q)

        self.assertIsNotNone(fibre)
        self.assertIsNotNone(amalgam)
        self.assertEqual(amalgam.points, fibre)
        self.assertTrue(stronger(p, amalgam) and stronger(q, amalgam))
        self.assertTrue(all(not point & {0, 1} for point in amalgam.points))

    def test_opposite_orders_on_nonzero_points(self):
        self.assertIsNone(compatible(P, cond([0, 1], [(1, 0)])))
        self.assertIsNone(
            compatible(cond([0, 1, 2], [(0, 1)]), cond([0, 1, 3], [(1, 0)]))
        )

    def test_disjoint_index_sets(self):
        amalgam = compatible(P, cond([5, 6], dis=[(5, 6)]))
        self.assertEqual(len(amalgam.points), 3 * 3)


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_compatible_agrees_with_brute_force(seed):
    rng = random.Random(seed)
    p = random_condition(rng, 7, rng.randint(1, 5), density=0.5)
    q = random_condition(rng, 7, rng.randint(1, 5), density=0.5)

    amalgam = compatible(p, q)
    fibre = brute_force_upper_bound(p, q)
    assert (amalgam is None) == (fibre is None)
    if amalgam is not None:
        assert amalgam.points == fibre


@settings(max_examples=80, deadline=None)
@given(conditions(), conditions())
def test_compatible_with_orders_either_way(p, q):
    amalgam = compatible(p, q)
    fibre = brute_force_upper_bound(p, q)

    assert (amalgam is None) == (fibre is None)
    if amalgam is not None:
        assert amalgam.points == fibre
        assert stronger(p, amalgam) and stronger(q, amalgam)


class TestDeltaSystem(unittest.TestCase):
    def setUp(self):
        self.family = [cond([0, 1]), cond([0, 2]), cond([1, 2]), cond([0, 3])]

    def test_root(self):
        chosen, root = delta_system(self.family, 3)
        self.assertEqual(
            chosen, (self.family[0], self.family[1], self.family[3])
        )
        self.assertEqual(root, frozenset({0}))

    def test_none(self):
        self.assertIsNone(delta_system(self.family, 4))

    def test_trivial(self):
        self.assertEqual(delta_system(self.family, 0), ((), frozenset()))
        self.assertEqual(
            delta_system(self.family, 1), ((self.family[0],), frozenset({0, 1}))
        )

    def test_color_compat(self):
        self.assertTrue(color_compat(P, cond([0, 5], [(0, 5)])))
        self.assertFalse(color_compat(P, cond([1, 5], [(1, 5)])))
        self.assertFalse(color_compat(P, cond([0, 5], dis=[(0, 5)])))
        self.assertTrue(color_compat(P, cond([3, 5], [(3, 5)])))


class TestClosures(unittest.TestCase):
    def test_directed_close(self):
        self.assertTrue(directed_close([P, T]).equivalent(Q))
        self.assertTrue(directed_close([P]).equivalent(P))

    def test_directed_close_violations(self):
        with self.assertRaisesRegex(PreconditionViolation, "Members 0 and 1"):
            directed_close([P, R])
        with self.assertRaises(PreconditionViolation):
            directed_close([])

    def test_parallel_close(self):
        bound = parallel_close([cond([0]), P], [cond([2]), T])
        self.assertTrue(bound.equivalent(Q))

    def test_parallel_close_violations(self):
        with self.assertRaisesRegex(PreconditionViolation, "p is not increasing"):
            parallel_close([P, cond([0])], [cond([2]), T])
        with self.assertRaisesRegex(PreconditionViolation, "incompatible at step 1"):
            parallel_close([cond([0]), P], [cond([1]), R])
        with self.assertRaises(PreconditionViolation):
            parallel_close([P], [])
        with self.assertRaises(PreconditionViolation):
            parallel_close([], [])


class TestLimitAlgebra(unittest.TestCase):
    def test_keeps_needed_relations(self):
        system = {
            frozenset({0}): cond([0]),
            frozenset({1}): cond([1]),
            frozenset({0, 1}): P,
        }
        limit = limit_algebra(system)
        self.assertEqual(limit.generators, (0, 1))
        self.assertEqual(limit.leq, frozenset({(0, 1)}))

    def test_drops_redundant_relations(self):
        system = {
            frozenset({0, 1}): P,
            frozenset({0, 1, 2}): cond([0, 1, 2], [(0, 1), (1, 2), (0, 2)]),
        }
        limit = limit_algebra(system)
        self.assertEqual(limit.leq, frozenset({(0, 1), (1, 2)}))
        self.assertTrue(stronger(system[frozenset({0, 1, 2})], PCondition(limit)))

    def test_violations(self):
        with self.assertRaises(PreconditionViolation):
            limit_algebra({})
        with self.assertRaisesRegex(PreconditionViolation, "index set"):
            limit_algebra({frozenset({0, 1}): cond([0])})
        with self.assertRaisesRegex(PreconditionViolation, "not below"):
            limit_algebra({frozenset({0, 1}): P, frozenset({0, 1, 2}): R})

    def test_dense_witness(self):
        system = {
            frozenset({1, 2}): T,
            frozenset({0, 1}): P,
            frozenset({0, 1, 2}): Q,
        }
        self.assertEqual(dense_witness(system, 1), frozenset({0, 1}))
        self.assertEqual(dense_witness(system, 2), frozenset({1, 2}))
        self.assertIsNone(dense_witness(system, 5))


class TestSplitExtensions:
    @pytest.fixture
    def base(self):
        return [cond([0, 1], [(0, 1)]), cond([2, 3]), cond([4])]

    def test_split(self, base):
        chain, antichain = split_extensions(base, [1, 3, 4])

        assert all(stronger(c, chain) and stronger(c, antichain) for c in base)
        assert split_norms(chain, antichain, [1, 3, 4]) == {"chain": 3, "antichain": 1}
        assert compatible(chain, antichain) is None

    def test_single_fresh_index(self, base):
        chain, antichain = split_extensions(base, [4])

        assert chain.equivalent(antichain)

    def test_shared_index(self):
        with pytest.raises(PreconditionViolation, match="belongs to 2"):
            split_extensions([cond([0, 1], [(0, 1)]), cond([1, 2])], [1])

    def test_entangled_index(self):
        with pytest.raises(PreconditionViolation, match="related to indices"):
            split_extensions([cond([0, 1], [(0, 1)]), cond([0, 2])], [1])

    def test_zero_index(self):
        squeezed = cond([0, 1, 2], [(0, 1), (0, 2)], [(1, 2)])

        with pytest.raises(PreconditionViolation, match="zero in the base"):
            split_extensions([squeezed], [0])
