import unittest

import pytest  # type: ignore
from hypothesis import given, settings
from hypothesis import strategies as st

from morasskit.morass import (
    H,
    ID,
    DegenerateSplit,
    InvalidRange,
    MorassPrefix,
    Origin,
    amalgamate,
    build_prefix,
    covered_points,
    fresh_points,
    identity_map,
    maps_between,
    origin,
    resolve_split_rule,
    trace_origin,
    verify_axioms,
    word_map,
)


class TestBuildPrefix(unittest.TestCase):
    def test_zero_rule(self):
        p = build_prefix(4)
        self.assertEqual(p.levels, (1, 3, 7, 15, 31))
        self.assertEqual(p.splits, (0, 0, 0, 0))
        self.assertEqual(p.N, 4)

    def test_last_rule(self):
        p = build_prefix(3, "last")
        self.assertEqual(p.levels, (1, 3, 5, 7))
        self.assertEqual(p.splits, (0, 2, 4))

    def test_half_rule(self):
        self.assertEqual(build_prefix(3, "half").levels, (1, 3, 6, 10))

    def test_listed_rule(self):
        p = build_prefix(2, "0,1")
        self.assertEqual(p.splits, (0, 1))
        self.assertEqual(p.levels, (1, 3, 6))

    def test_degenerate_split(self):
        with self.assertRaises(DegenerateSplit):
            build_prefix(2, "const:1")
        with self.assertRaises(DegenerateSplit):
            build_prefix(2, [0, 5])

    def test_invalid_height(self):
        with self.assertRaises(ValueError):
            build_prefix(0)


class TestSplitRules(unittest.TestCase):
    def test_named(self):
        self.assertEqual(resolve_split_rule("zero")(3, 9), 0)
        self.assertEqual(resolve_split_rule("LAST")(3, 9), 8)
        self.assertEqual(resolve_split_rule("half")(3, 9), 4)
        self.assertEqual(resolve_split_rule(None)(3, 9), 0)

    def test_const(self):
        self.assertEqual(resolve_split_rule("const:2")(5, 9), 2)

    def test_callable(self):
        rule = resolve_split_rule(lambda alpha, theta: alpha)
        self.assertEqual(rule(3, 9), 3)

    def test_listed_runs_out(self):
        rule = resolve_split_rule("0,2")
        self.assertEqual(rule(1, 9), 2)
        with self.assertRaises(ValueError):
            rule(2, 9)

    def test_unknown(self):
        with self.assertRaises(ValueError):
            resolve_split_rule("bogus")
        with self.assertRaises(ValueError):
            resolve_split_rule("const:x")


class TestMorassPrefix(unittest.TestCase):
    def test_validation(self):
        with self.assertRaises(ValueError):
            MorassPrefix((1,), ())
        with self.assertRaises(ValueError):
            MorassPrefix((1, 3), (0, 0))
        with self.assertRaises(ValueError):
            MorassPrefix((1, 3, 7), (0, 3))
        with self.assertRaises(ValueError):
            MorassPrefix((1, 3, 2), (0, 0))
        with self.assertRaises(ValueError):
            MorassPrefix((0, 3), (0,))

    def test_one_step(self):
        p = build_prefix(2)
        self.assertEqual(p.one_step(0), ((0,), (2,)))
        self.assertEqual(p.one_step(1), ((0, 1, 2), (4, 5, 6)))

    def test_split_keeps_lower_points(self):
        p = build_prefix(3, "last")
        self.assertEqual(p.one_step(1), ((0, 1, 2), (0, 1, 4)))
        self.assertEqual(p.step(1, H, 1), 1)
        self.assertEqual(p.step(1, ID, 2), 2)

    def test_step_preimages(self):
        p = build_prefix(2)
        self.assertEqual(p.step_preimages(0, 0), [(ID, 0)])
        self.assertEqual(p.step_preimages(0, 2), [(H, 0)])
        self.assertEqual(p.step_preimages(0, 1), [])

        last = build_prefix(3, "last")
        self.assertEqual(last.step_preimages(1, 1), [(ID, 1), (H, 1)])
        self.assertEqual(last.step_preimages(1, 4), [(H, 2)])
        self.assertEqual(last.step_preimages(1, 3), [])


class TestMaps(unittest.TestCase):
    def setUp(self):
        self.p = build_prefix(3)

    def test_word_map(self):
        self.assertEqual(word_map(self.p, 0, (H, ID)).values, (2,))
        self.assertEqual(word_map(self.p, 0, (H, H)).values, (6,))
        self.assertEqual(identity_map(self.p, 1).values, (0, 1, 2))
        with self.assertRaises(ValueError):
            word_map(self.p, 0, ("up",))

    def test_maps_between(self):
        maps = maps_between(self.p, 0, 2)
        self.assertEqual([f.word for f in maps], [(ID, ID), (ID, H), (H, ID), (H, H)])
        self.assertEqual([f.values for f in maps], [(0,), (4,), (2,), (6,)])

    def test_maps_between_dedupes(self):
        p = build_prefix(2, "last")
        # The point of level 0 lies below k_1 = 2, so h_1 fixes it.
        maps = maps_between(p, 0, 2)
        self.assertEqual([f.word for f in maps], [(ID, ID), (H, ID), (H, H)])
        self.assertEqual([f.values for f in maps], [(0,), (2,), (4,)])

    def test_invalid_range(self):
        with self.assertRaises(InvalidRange):
            maps_between(self.p, 2, 2)
        with self.assertRaises(InvalidRange):
            maps_between(self.p, 1, 4)

    def test_compose(self):
        f = word_map(self.p, 1, (H,))
        g = word_map(self.p, 0, (H,))
        composite = f.compose(g)

        self.assertEqual(composite.values, (6,))
        self.assertEqual(composite.word, (H, H))
        self.assertEqual((composite.source, composite.target), (0, 2))
        with self.assertRaises(InvalidRange):
            g.compose(f)

    def test_preimage(self):
        f = word_map(self.p, 1, (H,))
        self.assertEqual(f.preimage(5), 1)
        self.assertIsNone(f.preimage(3))
        self.assertEqual(f.rng, frozenset({4, 5, 6}))
        self.assertTrue(f.is_increasing())


class TestCoverage(unittest.TestCase):
    def setUp(self):
        self.p = build_prefix(3)

    def test_covered_points(self):
        self.assertEqual(covered_points(self.p, 0, 2), frozenset({0, 2, 4, 6}))
        self.assertEqual(covered_points(self.p, 1, 2), frozenset({0, 1, 2, 4, 5, 6}))
        self.assertEqual(covered_points(self.p, 2, 2), frozenset(range(7)))

    def test_fresh_points(self):
        self.assertEqual(fresh_points(self.p, 0, 2), frozenset({1, 3, 5}))
        self.assertEqual(fresh_points(self.p, 1, 2), frozenset({3}))
        self.assertEqual(fresh_points(self.p, 2, 2), frozenset())

    def test_covered_matches_ranges(self):
        for alpha in range(3):
            for gamma in range(alpha + 1, 4):
                ranges = frozenset().union(
                    *(f.rng for f in maps_between(self.p, alpha, gamma))
                )
                self.assertEqual(covered_points(self.p, alpha, gamma), ranges)


class TestOrigin(unittest.TestCase):
    def setUp(self):
        self.p = build_prefix(3)

    def test_new_point(self):
        self.assertEqual(trace_origin(self.p, 2, 3), Origin(1, 3, 2, ()))

    def test_copied_point(self):
        found = trace_origin(self.p, 2, 5)
        self.assertEqual(found.level, 0)
        self.assertEqual(found.word, (H,))
        self.assertEqual(found.path(self.p), [1, 5])
        self.assertEqual(list(found.words()), [(H,)])

    def test_copy_of_level_zero(self):
        self.assertIsNone(trace_origin(self.p, 2, 0))
        self.assertIsNone(trace_origin(self.p, 2, 4))

    def test_origin_respects_coverage(self):
        self.assertEqual(origin(self.p, 0, 2, 5).level, 0)
        self.assertIsNone(origin(self.p, 0, 2, 4))
        self.assertIsNone(origin(self.p, 1, 2, 5))
        with self.assertRaises(InvalidRange):
            origin(self.p, 0, 2, 7)

    def test_branching_choices(self):
        p = build_prefix(3, "last")
        # The new point of level 0 lies below the splitting points above it.
        found = trace_origin(p, 3, 1)
        self.assertEqual(found.level, 0)
        self.assertEqual(found.choices, ((ID, H), (ID, H)))
        self.assertEqual(len(list(found.words())), 4)

    def test_not_new(self):
        # Level 2 has two points outside both one-step ranges.
        tampered = MorassPrefix((1, 3, 8), (0, 0))
        self.assertEqual(trace_origin(tampered, 2, 3).level, 1)
        with self.assertRaises(InvalidRange):
            trace_origin(tampered, 2, 4)


class TestAmalgamate(unittest.TestCase):
    def setUp(self):
        self.p = build_prefix(3)

    def test_amalgamation(self):
        f0 = word_map(self.p, 0, (H, ID, H))
        f1 = word_map(self.p, 1, (ID, H))
        found = amalgamate(self.p, f0, f1)

        self.assertEqual(found.gamma, 2)
        self.assertEqual(found.g.word, (H,))
        self.assertEqual(found.f0_head.word, (H, ID))
        self.assertEqual(found.f1_head.word, (ID,))
        self.assertEqual(found.g.compose(found.f0_head).values, f0.values)

    def test_no_gamma_below_top(self):
        f0 = word_map(self.p, 2, (H,))
        f1 = word_map(self.p, 2, (ID,))
        self.assertIsNone(amalgamate(self.p, f0, f1))

    def test_self_amalgamation(self):
        f = word_map(self.p, 0, (H, ID, H))
        found = amalgamate(self.p, f, f)

        self.assertEqual(found.gamma, 1)
        self.assertEqual(found.f0_head, found.f1_head)
        self.assertEqual(found.g.compose(found.f0_head).values, f.values)

    def test_self_amalgamation_needs_a_level_below_top(self):
        f = word_map(self.p, 2, (H,))
        self.assertIsNone(amalgamate(self.p, f, f))

    def test_target_must_be_top(self):
        with self.assertRaises(InvalidRange):
            amalgamate(self.p, word_map(self.p, 0, (H,)), word_map(self.p, 1, (H,)))


class TestVerifyAxioms:
    @pytest.mark.parametrize("rule", ["zero", "last", "half"])
    def test_built_prefixes_pass(self, rule):
        report = verify_axioms(build_prefix(5, rule))

        assert report.passed
        assert report.get("item3_surrogate").passed
        assert not report.get("item3_surrogate").exact

    def test_tampered_splitting_point(self):
        # h_1 = (1, 2, 3) does not send k_1 above theta_1.
        report = verify_axioms(MorassPrefix((1, 3, 4), (0, 0)))

        assert not report.passed
        assert "item5" in [check.name for check in report.failures()]

    def test_stalled_level(self):
        report = verify_axioms(MorassPrefix((1, 3, 3), (0, 0)))
        failed = [check.name for check in report.failures()]

        assert "item5" in failed
        assert "increasing2" in failed

    def test_sampled_amalgamation(self):
        report = verify_axioms(build_prefix(4), amalgamation_pair_limit=10, seed=3)
        detail = report.get("item6_surrogate").detail

        assert detail["sampled"]
        assert detail["pairs_tested"] == 10
        assert detail["seed"] == 3


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(min_value=0, max_value=6), min_size=1, max_size=4))
def test_fresh_points_grow_with_the_gap(offsets):
    splits = []
    levels = [1]
    for offset in offsets:
        k = min(offset, levels[-1] - 1)
        splits.append(k)
        levels.append(2 * levels[-1] - k + 1)
    p = MorassPrefix(tuple(levels), tuple(splits))

    for alpha in range(p.N + 1):
        for gamma in range(alpha, p.N + 1):
            assert len(fresh_points(p, alpha, gamma)) >= gamma - alpha
            for x in fresh_points(p, alpha, gamma):
                found = origin(p, alpha, gamma, x)
                assert found is not None and found.level >= alpha
