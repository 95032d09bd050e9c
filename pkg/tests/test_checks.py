import unittest

from morasskit.checks import Check, CheckReport


class TestCheckReport(unittest.TestCase):
    def test_empty_report_passes(self):
        self.assertTrue(CheckReport().passed)
        self.assertEqual(CheckReport().failures(), [])

    def test_add(self):
        report = CheckReport()
        check = report.add("item1", True, bad_levels=[])

        self.assertEqual(check, Check("item1", True))
        self.assertEqual(check.detail, {"bad_levels": []})
        self.assertIs(report.get("item1"), check)
        self.assertTrue(report.passed)

    def test_surrogates_do_not_decide(self):
        report = CheckReport()
        report.add("item1", True)
        report.add("item6_surrogate", False, exact=False)

        self.assertTrue(report.passed)
        self.assertEqual(report.failures(), [])
        failures = report.failures(exact_only=False)
        self.assertEqual([c.name for c in failures], ["item6_surrogate"])

    def test_exact_failure(self):
        report = CheckReport()
        report.add("theory", False, failures=[{"level": 3}])

        self.assertFalse(report.passed)
        self.assertEqual(report.failures()[0].detail["failures"], [{"level": 3}])

    def test_extend_prefixes_names(self):
        inner = CheckReport()
        inner.add("nonzero", True)
        inner.add("nice_property", False)
        outer = CheckReport()
        outer.extend(inner, prefix="calg.")

        names = [c.name for c in outer.checks]
        self.assertEqual(names, ["calg.nonzero", "calg.nice_property"])
        self.assertFalse(outer.passed)

    def test_get_missing(self):
        with self.assertRaises(KeyError):
            CheckReport().get("item2")

    def test_as_dicts(self):
        report = CheckReport()
        report.add("dichotomy", True, failures=[])

        self.assertEqual(
            report.as_dicts(),
            [
                {
                    "name": "dichotomy",
                    "passed": True,
                    "exact": True,
                    "detail": {"failures": []},
                }
            ],
        )
