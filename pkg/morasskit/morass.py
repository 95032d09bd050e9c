"""
Finite prefixes of neat simplified (omega,1)-morasses.

A prefix carries the level sizes theta_0 < ... < theta_N and, for every
alpha < N, the splitting point k_alpha of the one-step map h_alpha. The map
families F(alpha, gamma) are the word-composition closure of the one-step
families {id, h_alpha}, so composition (item 4) holds by construction.

Levels are initial segments of the natural numbers: level alpha is the set of
points 0 .. theta_alpha - 1.
"""
import itertools
import logging
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from morasskit.checks import Check, CheckReport
from morasskit.configuration import get_configuration
from morasskit.errors import MorassKitError
from morasskit.iteration import is_increasing

logger = logging.getLogger(__name__)

ID = "id"
H = "h"
STEPS = (ID, H)

Word = Tuple[str, ...]
SplitRule = Callable[[int, int], int]


class InvalidRange(MorassKitError):
    pass


class DegenerateSplit(MorassKitError):
    pass


@dataclass(frozen=True)
class MorassPrefix:
    """
    Level sizes theta_0..theta_N and splitting points k_0..k_{N-1}.

    h_alpha(i) = i for i < k_alpha and theta_{alpha+1} - theta_alpha + i
    otherwise, i.e. the part of level alpha above the splitting point is
    shifted onto the top of level alpha + 1. The axioms themselves are not
    enforced here; verify_axioms reports on them.
    """

    levels: Tuple[int, ...]
    splits: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(int(x) for x in self.levels))
        object.__setattr__(self, "splits", tuple(int(x) for x in self.splits))

        if len(self.levels) < 2:
            raise ValueError("A morass prefix needs at least two levels")
        if len(self.splits) != len(self.levels) - 1:
            raise ValueError(
                "Expected {} splitting points, found {}".format(
                    len(self.levels) - 1, len(self.splits)
                )
            )
        for alpha, theta in enumerate(self.levels):
            if theta < 1:
                raise ValueError("Level {} has size {} < 1".format(alpha, theta))
        for alpha, k in enumerate(self.splits):
            theta = self.levels[alpha]
            if not 0 <= k < theta:
                raise ValueError(
                    "Splitting point {} of level {} is outside [0, {})".format(
                        k, alpha, theta
                    )
                )
            if self.levels[alpha + 1] < theta:
                raise ValueError(
                    "Level {} is smaller than level {}".format(alpha + 1, alpha)
                )

    @property
    def N(self) -> int:
        return len(self.levels) - 1

    def theta(self, alpha: int) -> int:
        return self.levels[alpha]

    def shift(self, alpha: int) -> int:
        return self.levels[alpha + 1] - self.levels[alpha]

    def step(self, alpha: int, choice: str, point: int) -> int:
        """Applies the one-step map id_alpha or h_alpha to a point."""
        if choice == ID or point < self.splits[alpha]:
            return point
        return point + self.shift(alpha)

    def step_preimages(self, alpha: int, point: int) -> List[Tuple[str, int]]:
        """
        The (choice, preimage) pairs of a point of level alpha + 1 under the
        one-step maps from level alpha.
        """
        found = []
        if point < self.levels[alpha]:
            found.append((ID, point))
        k = self.splits[alpha]
        if point < k:
            found.append((H, point))
        else:
            source = point - self.shift(alpha)
            if k <= source < self.levels[alpha]:
                found.append((H, source))
        return found

    def one_step(self, alpha: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        theta = self.levels[alpha]
        identity = tuple(range(theta))
        h = tuple(self.step(alpha, H, i) for i in range(theta))
        return identity, h


@dataclass(frozen=True)
class MorassMap:
    """
    An order preserving map from level ``source`` to level ``target``.

    ``word[i]`` is the one-step choice taken from level source + i to
    source + i + 1, so the word is read bottom-up.
    """

    source: int
    target: int
    word: Word
    values: Tuple[int, ...] = field(compare=False)

    def __call__(self, point: int) -> int:
        return self.values[point]

    @property
    def rng(self) -> FrozenSet[int]:
        return frozenset(self.values)

    @property
    def function(self) -> Tuple[int, int, Tuple[int, ...]]:
        return (self.source, self.target, self.values)

    def is_increasing(self) -> bool:
        return is_increasing(self.values)

    def compose(self, inner: "MorassMap") -> "MorassMap":
        """self after inner."""
        if inner.target != self.source:
            raise InvalidRange(
                "Cannot compose a map into level {} with a map from level {}".format(
                    inner.target, self.source
                )
            )
        return MorassMap(
            inner.source,
            self.target,
            inner.word + self.word,
            tuple(self.values[v] for v in inner.values),
        )

    def preimage(self, point: int) -> Optional[int]:
        try:
            return self.values.index(point)
        except ValueError:
            return None


def _zero_rule(alpha: int, theta: int) -> int:
    return 0


def _last_rule(alpha: int, theta: int) -> int:
    return theta - 1


def _half_rule(alpha: int, theta: int) -> int:
    return theta // 2


NAMED_RULES: Dict[str, SplitRule] = {
    "zero": _zero_rule,
    "last": _last_rule,
    "half": _half_rule,
}


def resolve_split_rule(rule: Union[None, str, SplitRule, Sequence[int]]) -> SplitRule:
    """
    Turns a rule name ("zero", "last", "half", "const:K"), a comma separated list of
    splitting points, a sequence of points or a callable (alpha, theta) -> k
    into a callable.
    """
    if rule is None:
        return _zero_rule
    if callable(rule):
        return rule
    if isinstance(rule, str):
        name = rule.strip().lower()
        if name in NAMED_RULES:
            return NAMED_RULES[name]
        if name.startswith("const:"):
            try:
                constant = int(name[len("const:") :])
            except ValueError:
                raise ValueError("Unknown splitting rule: '{}'".format(rule))
            return lambda alpha, theta: constant
        try:
            points = [int(part) for part in name.split(",") if part.strip()]
        except ValueError:
            raise ValueError("Unknown splitting rule: '{}'".format(rule))
        return resolve_split_rule(points)

    points = list(rule)

    def listed(alpha: int, theta: int) -> int:
        if alpha >= len(points):
            raise ValueError("No splitting point listed for level {}".format(alpha))
        return points[alpha]

    return listed


def build_prefix(
    N: int, rule: Union[None, str, SplitRule, Sequence[int]] = None
) -> MorassPrefix:
    """
    Builds theta_0 = 1, theta_{alpha+1} = 2 theta_alpha - k_alpha + 1 with
    k_alpha given by the splitting rule, so that h_alpha(k_alpha) is exactly
    theta_alpha + 1.
    """
    if N < 1:
        raise ValueError("A morass prefix needs N >= 1, got {}".format(N))

    split_rule = resolve_split_rule(rule)
    levels = [1]
    splits = []
    for alpha in range(N):
        theta = levels[-1]
        k = int(split_rule(alpha, theta))
        if k == theta:
            raise DegenerateSplit(
                "Splitting point k_{} = theta_{} = {} leaves nothing to shift, "
                "so h_{} would equal the identity".format(alpha, alpha, theta, alpha)
            )
        if not 0 <= k < theta:
            raise DegenerateSplit(
                "Splitting point k_{} = {} is outside [0, {})".format(alpha, k, theta)
            )
        splits.append(k)
        levels.append(theta + (theta - k) + 1)

    logger.debug("Built morass prefix with levels {}".format(levels))
    return MorassPrefix(tuple(levels), tuple(splits))


def word_map(p: MorassPrefix, alpha: int, word: Sequence[str]) -> MorassMap:
    values = list(range(p.theta(alpha)))
    for offset, choice in enumerate(word):
        if choice not in STEPS:
            raise ValueError("Unknown one-step choice: '{}'".format(choice))
        level = alpha + offset
        values = [p.step(level, choice, v) for v in values]

    return MorassMap(alpha, alpha + len(word), tuple(word), tuple(values))


def identity_map(p: MorassPrefix, alpha: int) -> MorassMap:
    return MorassMap(alpha, alpha, (), tuple(range(p.theta(alpha))))


def _check_range(p: MorassPrefix, alpha: int, gamma: int, strict: bool) -> None:
    if alpha < 0 or gamma > p.N or alpha > gamma or (strict and alpha == gamma):
        raise InvalidRange(
            "Invalid level range ({}, {}) for a prefix with N = {}".format(
                alpha, gamma, p.N
            )
        )


@lru_cache(maxsize=512)
def maps_between(p: MorassPrefix, alpha: int, gamma: int) -> Tuple[MorassMap, ...]:
    """
    F(alpha, gamma): every word of length gamma - alpha with its induced
    function. Words inducing the same function are reported once, under
    the first word in id-before-h order.
    """
    _check_range(p, alpha, gamma, strict=True)

    seen = set()
    maps = []
    for word in itertools.product(STEPS, repeat=gamma - alpha):
        f = word_map(p, alpha, word)
        if f.values in seen:
            continue
        seen.add(f.values)
        maps.append(f)

    return tuple(maps)


def covered_points(p: MorassPrefix, alpha: int, gamma: int) -> FrozenSet[int]:
    """
    The union of the ranges of F(alpha, gamma), computed level by level as
    R_{beta+1} = R_beta | h_beta[R_beta].
    """
    _check_range(p, alpha, gamma, strict=False)

    covered = set(range(p.theta(alpha)))
    for beta in range(alpha, gamma):
        covered |= {p.step(beta, H, point) for point in covered}

    return frozenset(covered)


def fresh_points(p: MorassPrefix, alpha: int, gamma: int) -> FrozenSet[int]:
    """Points of level gamma outside every range of F(alpha, gamma)."""
    _check_range(p, alpha, gamma, strict=False)
    if alpha == gamma:
        return frozenset()

    covered = covered_points(p, alpha, gamma)
    return frozenset(x for x in range(p.theta(gamma)) if x not in covered)


@dataclass(frozen=True)
class Origin:
    """
    Where a fresh point comes from: the new point theta_level, born at level
    level + 1, is carried to the point by every word whose i-th letter is in
    ``choices[i]``. Both letters are allowed exactly where the carried point
    lies below the splitting point.
    """

    level: int
    point: int
    target: int
    choices: Tuple[Tuple[str, ...], ...]

    @property
    def word(self) -> Word:
        """The first realising word in id-before-h order."""
        return tuple(options[0] for options in self.choices)

    def words(self) -> Iterator[Word]:
        return itertools.product(*self.choices)

    def path(self, p: MorassPrefix) -> List[int]:
        """The copies of the point at levels level + 1 .. target."""
        points = [p.theta(self.level)]
        for offset, options in enumerate(self.choices):
            points.append(p.step(self.level + 1 + offset, options[0], points[-1]))
        return points


def trace_origin(p: MorassPrefix, gamma: int, point: int) -> Optional[Origin]:
    """
    Traces a point of level gamma back to the level at which it is born.
    Returns None for the copies of the point of level 0.

    Every point of a level above 0 is either the new point of that level or
    has a unique preimage in the level below, so the trace is a single path.
    """
    choices: List[Tuple[str, ...]] = []
    level = gamma
    x = point
    while level > 0:
        preimages = p.step_preimages(level - 1, x)
        if not preimages:
            break
        choices.append(tuple(choice for choice, _ in preimages))
        x = preimages[0][1]
        level -= 1

    if level == 0:
        return None
    if x != p.theta(level - 1):
        raise InvalidRange(
            "Point {} of level {} has no preimage and is not new".format(x, level)
        )
    return Origin(level - 1, point, gamma, tuple(reversed(choices)))


def origin(p: MorassPrefix, alpha: int, gamma: int, point: int) -> Optional[Origin]:
    """
    The birth of a point of level gamma. Returns None when the point is
    covered from level alpha.
    """
    _check_range(p, alpha, gamma, strict=False)
    if not 0 <= point < p.theta(gamma):
        raise InvalidRange("Level {} has no point {}".format(gamma, point))
    if point in covered_points(p, alpha, gamma):
        return None
    return trace_origin(p, gamma, point)


@dataclass(frozen=True)
class Amalgamation:
    gamma: int
    g: MorassMap
    f0_head: MorassMap
    f1_head: MorassMap


@lru_cache(maxsize=64)
def _factor_index(
    p: MorassPrefix, gamma: int
) -> Dict[Tuple[int, Tuple[int, ...]], Dict[Word, MorassMap]]:
    """
    For a level gamma < N, maps (source, values of g o f') to the words g in
    F(gamma, N) realising it, each with its head f'.
    """
    index: Dict[Tuple[int, Tuple[int, ...]], Dict[Word, MorassMap]] = {}
    for g in maps_between(p, gamma, p.N):
        for beta in range(gamma):
            for head in maps_between(p, beta, gamma):
                composite = g.compose(head)
                key = (beta, composite.values)
                index.setdefault(key, {}).setdefault(g.word, head)
    return index


def amalgamate(
    p: MorassPrefix, f0: MorassMap, f1: MorassMap
) -> Optional[Amalgamation]:
    """
    Searches gamma with beta_0, beta_1 < gamma < N and g in F(gamma, N)
    with f_l = g o f_l' for l < 2. Returns the solution with the least gamma
    (then the first g in word order), or None. gamma = N is excluded.
    """
    for f in (f0, f1):
        if f.target != p.N:
            raise InvalidRange(
                "Amalgamated maps must target the top level {}".format(p.N)
            )

    for gamma in range(max(f0.source, f1.source) + 1, p.N):
        index = _factor_index(p, gamma)
        heads0 = index.get((f0.source, f0.values), {})
        heads1 = index.get((f1.source, f1.values), {})
        common = sorted(set(heads0) & set(heads1), key=_word_order)
        if common:
            word = common[0]
            by_word = {g.word: g for g in maps_between(p, gamma, p.N)}
            return Amalgamation(gamma, by_word[word], heads0[word], heads1[word])

    return None


def _word_order(word: Word) -> Tuple[int, ...]:
    return tuple(STEPS.index(choice) for choice in word)


class AxiomReport(CheckReport):
    """Exact axiom checks followed by the item 3 and item 6 surrogates."""


def _ranges(p: MorassPrefix, alpha: int, gamma: int) -> FrozenSet[int]:
    if alpha == gamma:
        return frozenset(range(p.theta(gamma)))
    return frozenset().union(*(f.rng for f in maps_between(p, alpha, gamma)))


def verify_axioms(
    p: MorassPrefix, amalgamation_pair_limit: Optional[int] = None, seed: int = 0
) -> AxiomReport:
    """
    Checks items 1, 2, 4 and 5 exactly, the three parts of the increasing
    lemma for all alpha <= beta <= gamma <= N, and evaluates the finite
    surrogates of items 3 and 6.
    """
    if amalgamation_pair_limit is None:
        amalgamation_pair_limit = get_configuration().get_int(
            ["morass", "amalgamation_pair_limit"], 4000
        )

    report = AxiomReport()
    N = p.N
    levels = range(N + 1)

    bad_sizes = [alpha for alpha in levels if p.theta(alpha) < 1]
    report.add("item1", not bad_sizes, bad_levels=bad_sizes)

    bad_maps = []
    for alpha, beta in itertools.combinations(levels, 2):
        for f in maps_between(p, alpha, beta):
            inside = all(0 <= v < p.theta(beta) for v in f.values)
            if not (inside and f.is_increasing()):
                bad_maps.append({"source": alpha, "target": beta, "word": list(f.word)})
    report.add("item2", not bad_maps, bad_maps=bad_maps[:10])

    bad_compositions = []
    for alpha, beta, gamma in itertools.combinations(levels, 3):
        direct = {f.values for f in maps_between(p, alpha, gamma)}
        composed = {
            f.compose(g).values
            for g in maps_between(p, alpha, beta)
            for f in maps_between(p, beta, gamma)
        }
        if direct != composed:
            bad_compositions.append([alpha, beta, gamma])
    report.add("item4", not bad_compositions, bad_triples=bad_compositions[:10])

    bad_steps = []
    for alpha in range(N):
        identity, h = p.one_step(alpha)
        k = p.splits[alpha]
        family = {f.values for f in maps_between(p, alpha, alpha + 1)}
        reasons = []
        if family != {identity, h} or identity == h:
            reasons.append("family is not {id, h} with h != id")
        if not is_increasing(h) or not all(v < p.theta(alpha + 1) for v in h):
            reasons.append("h is not an increasing map into the next level")
        if h[:k] != identity[:k]:
            reasons.append("h differs from id below the splitting point")
        if not h[k] > p.theta(alpha):
            reasons.append(
                "h({}) = {} is not above theta = {}".format(k, h[k], p.theta(alpha))
            )
        if reasons:
            bad_steps.append({"level": alpha, "splitting_point": k, "reasons": reasons})
    report.add("item5", not bad_steps, bad_levels=bad_steps)

    ranges = {
        (alpha, gamma): _ranges(p, alpha, gamma)
        for alpha in levels
        for gamma in levels
        if alpha <= gamma
    }

    mismatched = [
        [alpha, gamma]
        for (alpha, gamma), covered in ranges.items()
        if covered != covered_points(p, alpha, gamma)
    ]
    report.add("coverage_recursion", not mismatched, mismatched=mismatched[:10])

    not_monotone = []
    for alpha, beta, gamma in itertools.combinations_with_replacement(levels, 3):
        if not ranges[(alpha, gamma)] <= ranges[(beta, gamma)]:
            not_monotone.append([alpha, beta, gamma])
    report.add("increasing1", not not_monotone, bad_triples=not_monotone[:10])

    bad_growth = []
    for alpha in range(N):
        if not p.theta(alpha) < p.theta(alpha + 1):
            bad_growth.append({"level": alpha, "reason": "theta does not increase"})
        elif p.theta(alpha) in ranges[(alpha, alpha + 1)]:
            bad_growth.append({"level": alpha, "reason": "theta is covered"})
    report.add("increasing2", not bad_growth, bad_levels=bad_growth)

    too_few = []
    for alpha, gamma in itertools.combinations_with_replacement(levels, 2):
        fresh = p.theta(gamma) - len(ranges[(alpha, gamma)])
        if fresh < gamma - alpha:
            too_few.append({"alpha": alpha, "gamma": gamma, "fresh": fresh})
    report.add("increasing3", not too_few, too_few=too_few[:10])

    coverage = frozenset().union(*(ranges[(alpha, N)] for alpha in range(N)))
    uncovered = sorted(set(range(p.theta(N))) - coverage)
    report.add(
        "item3_surrogate",
        p.theta(N - 1) in uncovered,
        exact=False,
        covered=len(coverage),
        uncovered=uncovered[:64],
        uncovered_count=len(uncovered),
    )

    report.checks.append(_amalgamation_surrogate(p, amalgamation_pair_limit, seed))

    for check in report.checks:
        if not check.passed:
            logger.info("Morass check {} failed: {}".format(check.name, check.detail))

    return report


def _amalgamation_surrogate(
    p: MorassPrefix, pair_limit: Optional[int], seed: int
) -> Check:
    maps = [f for beta in range(p.N) for f in maps_between(p, beta, p.N)]
    pairs: Iterable[Tuple[MorassMap, MorassMap]]
    total = len(maps) * len(maps)
    sampled = pair_limit is not None and total > pair_limit
    if sampled:
        rng = random.Random(seed)
        pairs = [(rng.choice(maps), rng.choice(maps)) for _ in range(pair_limit)]
    else:
        pairs = itertools.product(maps, repeat=2)

    tested = passed = inner_tested = inner_passed = 0
    for f0, f1 in pairs:
        solution = amalgamate(p, f0, f1)
        tested += 1
        passed += solution is not None
        # Pairs from level N - 1 have no gamma strictly between them and N.
        if max(f0.source, f1.source) < p.N - 1:
            inner_tested += 1
            inner_passed += solution is not None

    return Check(
        "item6_surrogate",
        tested == passed,
        exact=False,
        detail={
            "pairs_tested": tested,
            "pairs_amalgamated": passed,
            "inner_pairs_tested": inner_tested,
            "inner_pairs_amalgamated": inner_passed,
            "sampled": sampled,
            "seed": seed,
        },
    )
