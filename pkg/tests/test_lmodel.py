import unittest

import pytest  # type: ignore

from morasskit.balg import SimpleFunction, dichotomy_check, norm_simple
from morasskit.lmodel import (
    C_VARIANT,
    PLAIN,
    GenModel,
    IllDefinedLimit,
    InsufficientLevels,
    UniverseTooLarge,
    alpha_sequence,
    check_theory,
    embed_check,
    extend_stage,
    initial_model,
    limit_model,
    parse_bits,
    plan_stages,
    presentation,
    pushforward,
    restrict,
    run_construction,
)
from morasskit.morass import build_prefix


class TestGenModel(unittest.TestCase):
    def setUp(self):
        self.m = GenModel(3, frozenset({(0, 2)}), frozenset({frozenset({1, 2})}))

    def test_normalises(self):
        m = GenModel(2, frozenset({(0, 0), (0, 1)}), block=((1, 0), (0, 0), (1, 0)))
        self.assertEqual(m.leq, frozenset({(0, 1)}))
        self.assertEqual(m.block, ((0, 0), (1, 0)))
        self.assertEqual(m.block_of(1), 0)
        self.assertIsNone(self.m.block_of(1))

    def test_restrict(self):
        self.assertEqual(restrict(self.m, 2), GenModel(2))
        self.assertEqual(self.m.restrict(3), self.m)
        with self.assertRaises(ValueError):
            restrict(self.m, 4)

    def test_pushforward(self):
        pushed = pushforward(self.m, [0, 2, 4], 5)
        self.assertEqual(pushed.leq, frozenset({(0, 4)}))
        self.assertEqual(pushed.sorted_dis(), [(2, 4)])
        with self.assertRaises(ValueError):
            pushforward(self.m, [0, 2], 5)

    def test_embed_check(self):
        pushed = pushforward(self.m, [0, 2, 4], 5)
        self.assertTrue(embed_check(self.m, pushed, [0, 2, 4]))
        self.assertFalse(embed_check(self.m, pushed, [0, 2, 3]))
        self.assertFalse(embed_check(self.m, pushed, [0, 2, 2]))
        self.assertFalse(embed_check(self.m, pushed, [0, 2, 5]))

    def test_presentation(self):
        p = presentation(self.m)
        self.assertEqual(p.generators, (0, 1, 2))
        self.assertTrue(p.is_leq(0, 2))
        self.assertTrue(p.is_dis(1, 2))


class TestCheckTheory(unittest.TestCase):
    def failed(self, m, variant=PLAIN):
        return [check.name for check in check_theory(m, variant).failures()]

    def test_consistent(self):
        m = GenModel(3, frozenset({(0, 1), (1, 2), (0, 2)}))
        self.assertEqual(self.failed(m), [])

    def test_intransitive(self):
        m = GenModel(3, frozenset({(0, 1), (1, 2)}))
        self.assertEqual(self.failed(m), ["transitive"])
        self.assertEqual(
            check_theory(m).get("transitive").detail["witnesses"], [[0, 1, 2]]
        )

    def test_symmetric(self):
        m = GenModel(2, frozenset({(0, 1), (1, 0)}))
        self.assertIn("antisymmetric", self.failed(m))

    def test_contradictory(self):
        m = GenModel(2, frozenset({(0, 1)}), frozenset({frozenset({0, 1})}))
        self.assertEqual(self.failed(m), ["contradictory"])

    def test_reflexive_disjointness(self):
        m = GenModel(2, dis=frozenset({frozenset({1})}))
        self.assertEqual(self.failed(m), ["antireflexive"])

    def test_outside_universe(self):
        m = GenModel(2, frozenset({(0, 5)}))
        self.assertIn("universe", self.failed(m))

    def test_blocks(self):
        unlabelled = GenModel(2, block=((0, 0),))
        self.assertEqual(self.failed(unlabelled, C_VARIANT), ["blocks_total"])
        shared = GenModel(2, block=((0, 0), (1, 0)))
        self.assertEqual(self.failed(shared, C_VARIANT), ["blocks_disjoint"])
        doubled = GenModel(1, block=((0, 0), (0, 1)))
        self.assertIn("one_block", self.failed(doubled, C_VARIANT))
        self.assertEqual(self.failed(doubled), [])

    def test_unknown_variant(self):
        with self.assertRaises(ValueError):
            check_theory(GenModel(1), "d")


class TestPlan(unittest.TestCase):
    def test_alpha_sequence(self):
        self.assertEqual(alpha_sequence(3), (0, 1, 3, 6))
        self.assertEqual(alpha_sequence(3, C_VARIANT), (0, 2, 5, 9))
        self.assertEqual(alpha_sequence(0), (0,))

    def test_plain_zero(self):
        plan = plan_stages(build_prefix(6), 3)
        self.assertEqual(plan.stages, 3)
        self.assertEqual(plan.fresh, ((1,), (3, 7), (15, 31, 63)))
        self.assertEqual(plan.extra, (None, None, None))
        self.assertEqual(plan.origins[1], (1, 2))

    def test_c_last(self):
        plan = plan_stages(build_prefix(5, "last"), 2, C_VARIANT)
        self.assertEqual(plan.fresh, ((1,), (5, 7)))
        self.assertEqual(plan.extra, (3, 9))
        # a_n is born at the top of its stage, so no A_n point shares its origin.
        self.assertNotIn(1, plan.origins[0])
        self.assertNotIn(4, plan.origins[1])

    def test_insufficient_levels(self):
        with self.assertRaises(InsufficientLevels):
            plan_stages(build_prefix(2), 3)

    def test_universe_too_large(self):
        with self.assertRaises(UniverseTooLarge):
            plan_stages(build_prefix(6), 3, max_universe=10)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            plan_stages(build_prefix(2), -1)
        with self.assertRaises(ValueError):
            plan_stages(build_prefix(2), 1, "d")


class TestParseBits(unittest.TestCase):
    def test_parse(self):
        self.assertEqual(parse_bits("0 1 1"), (0, 1, 1))
        self.assertEqual(parse_bits([1, 0]), (1, 0))
        with self.assertRaises(ValueError):
            parse_bits("012")


class TestExtendStage(unittest.TestCase):
    def setUp(self):
        self.p = build_prefix(3)
        self.plan = plan_stages(self.p, 2)

    def test_invalid_bit(self):
        with self.assertRaises(ValueError):
            extend_stage([initial_model()], self.plan, 0, 2)

    def test_chain(self):
        m = run_construction(self.p, 2, "01").models[3]
        self.assertIn((3, 7), m.leq)
        self.assertNotIn(frozenset({3, 7}), m.dis)

    def test_antichain(self):
        m = run_construction(self.p, 2, "00").models[3]
        self.assertIn(frozenset({3, 7}), m.dis)
        self.assertNotIn((3, 7), m.leq)

    def test_initial_model(self):
        self.assertEqual(initial_model(), GenModel(1))
        self.assertEqual(initial_model(C_VARIANT).block, ((0, 0),))


class TestRunConstruction:
    @pytest.mark.parametrize("bits", ["000", "011", "101", "111"])
    def test_plain(self, bits):
        p = build_prefix(6)
        construction = run_construction(p, 3, bits)

        assert construction.report.passed
        assert construction.bits == tuple(int(b) for b in bits)
        assert len(construction.models) == p.N + 1
        assert construction.top.theta == p.theta(p.N)
        for n, bit in enumerate(construction.bits):
            stage = presentation(construction.models[construction.plan.alpha[n + 1]])
            assert dichotomy_check(stage, construction.plan.fresh[n], bit)

    @pytest.mark.parametrize("bits", ["00", "01", "10", "11"])
    def test_c_variant(self, bits):
        p = build_prefix(5, "last")
        construction = run_construction(p, 2, bits, C_VARIANT)

        assert construction.variant == C_VARIANT
        assert construction.report.passed
        assert construction.report.get("extra_points").passed

    def test_stage_norms(self):
        construction = run_construction(build_prefix(6), 3, "010")
        plan = construction.plan
        norms = []
        for n in range(3):
            stage = presentation(construction.models[plan.alpha[n + 1]])
            f = SimpleFunction.indicator_sum(plan.fresh[n])
            norms.append(norm_simple(stage, f))

        assert norms == [1, 2, 1]

    def test_restrictions_inside_stages(self):
        construction = run_construction(build_prefix(3), 2, "11")
        models = construction.models

        assert models[2] == restrict(models[3], construction.prefix.theta(2))

    def test_too_few_bits(self):
        with pytest.raises(ValueError):
            run_construction(build_prefix(3), 2, "1")


class TestLimitModel:
    def test_limit_matches_top(self):
        construction = run_construction(build_prefix(4), 2, "10")
        limit = limit_model(construction.prefix, construction.models, construction.plan)

        assert limit.model == construction.top
        summary = limit.certificate.as_dict()
        assert summary["pairs"] == len(construction.top.leq) + len(
            construction.top.dis
        )
        assert summary["multi_route_pairs"] == limit.certificate.multi_route_pairs

    def test_plan_beyond_models(self):
        construction = run_construction(build_prefix(3), 2, "10")

        with pytest.raises(IllDefinedLimit):
            limit_model(construction.prefix, construction.models[:2], construction.plan)

    def test_inconsistent_top(self):
        construction = run_construction(build_prefix(4), 2, "10")
        models = list(construction.models)
        models[-1] = GenModel(models[-1].theta)

        with pytest.raises(IllDefinedLimit):
            limit_model(construction.prefix, models)

    def test_no_models(self):
        with pytest.raises(IllDefinedLimit):
            limit_model(build_prefix(2), [])
