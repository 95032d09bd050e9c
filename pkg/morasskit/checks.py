from dataclasses import dataclass, field
from typing import Any, Dict, List


@dataclass(frozen=True)
class Check:
    """
    A single verdict. ``exact`` checks decide the overall result; the
    others are finite surrogates reported for information.
    """

    name: str
    passed: bool
    exact: bool = True
    detail: Dict[str, Any] = field(default_factory=dict, compare=False)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "exact": self.exact,
            "detail": self.detail,
        }


@dataclass
class CheckReport:
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks if check.exact)

    def add(self, name: str, passed: bool, exact: bool = True, **detail: Any) -> Check:
        check = Check(name, bool(passed), exact, detail)
        self.checks.append(check)
        return check

    def extend(self, other: "CheckReport", prefix: str = "") -> None:
        for check in other.checks:
            self.checks.append(
                Check(prefix + check.name, check.passed, check.exact, check.detail)
            )

    def failures(self, exact_only: bool = True) -> List[Check]:
        return [
            check
            for check in self.checks
            if not check.passed and (check.exact or not exact_only)
        ]

    def get(self, name: str) -> Check:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def as_dicts(self) -> List[Dict[str, Any]]:
        return [check.as_dict() for check in self.checks]
