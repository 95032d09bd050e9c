"""
Finite L-structures on morass levels and their stage-by-stage construction
from a stream of bits.

Every level beta + 1 is built from level beta: the relations of level beta
are pushed forward along id_beta and h_beta, the relations of the point
theta_beta born at level beta + 1 are added, and the order is transitively
closed. A stage n fixes a set A_n of fresh points at level alpha_{n+1} and
relates it as an antichain (bit 0) or a chain (bit 1). Each such relation is
placed at the birth level of the younger of its two points, so every
one-step map is an embedding and the levels inside a stage are restrictions
of its top level.

In the c variant every point carries the block of the point it is a copy
of, copies are pairwise disjoint, and each stage adds a point a_n born at
the top of the stage which is disjoint from everything reachable from
earlier stages.
"""
import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from morasskit.balg import BoolPresentation, dichotomy_check, generator_nonzero
from morasskit.checks import CheckReport
from morasskit.configuration import get_configuration
from morasskit.errors import MorassKitError
from morasskit.morass import (
    H,
    ID,
    MorassMap,
    MorassPrefix,
    Origin,
    Word,
    covered_points,
    fresh_points,
    trace_origin,
    word_map,
)

logger = logging.getLogger(__name__)

PLAIN = "plain"
C_VARIANT = "c"
VARIANTS = (PLAIN, C_VARIANT)

CONTRADICTION_CLAUSE = "d(x,y) and ≤*(x,y) are contradictory"

Pair = Tuple[int, int]
DisPair = FrozenSet[int]


class InsufficientLevels(MorassKitError):
    pass


class ConstructionFailure(MorassKitError):
    pass


class IllDefinedLimit(MorassKitError):
    pass


class UniverseTooLarge(MorassKitError):
    pass


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(
            "Unknown variant '{}', expected one of {}".format(
                variant, ", ".join(VARIANTS)
            )
        )


@dataclass(frozen=True)
class GenModel:
    """
    A finite structure on the points 0 .. theta - 1. ``leq`` is stored
    without reflexive pairs; ``block`` is empty in the plain variant.
    """

    theta: int
    leq: FrozenSet[Pair] = frozenset()
    dis: FrozenSet[DisPair] = frozenset()
    block: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "leq", frozenset((x, y) for x, y in self.leq if x != y)
        )
        object.__setattr__(self, "dis", frozenset(frozenset(pair) for pair in self.dis))
        object.__setattr__(self, "block", tuple(sorted(set(self.block))))

    @cached_property
    def block_map(self) -> Dict[int, int]:
        return dict(self.block)

    def block_of(self, x: int) -> Optional[int]:
        return self.block_map.get(x)

    def restrict(self, theta: int) -> "GenModel":
        return restrict(self, theta)

    def sorted_leq(self) -> List[Pair]:
        return sorted(self.leq)

    def sorted_dis(self) -> List[Tuple[int, ...]]:
        return sorted(tuple(sorted(pair)) for pair in self.dis)


def restrict(m: GenModel, theta: int) -> GenModel:
    """The substructure on the points 0 .. theta - 1."""
    if theta > m.theta:
        raise ValueError(
            "Cannot restrict a model on {} points to {} points".format(m.theta, theta)
        )
    return GenModel(
        theta,
        frozenset((x, y) for x, y in m.leq if x < theta and y < theta),
        frozenset(pair for pair in m.dis if max(pair) < theta),
        tuple((x, b) for x, b in m.block if x < theta),
    )


def _values(f) -> Sequence[int]:
    return f.values if isinstance(f, MorassMap) else f


def pushforward(m: GenModel, f, theta: int) -> GenModel:
    """The image of m along f, as a structure on theta points."""
    values = _values(f)
    if len(values) != m.theta:
        raise ValueError(
            "A map on {} points cannot push a model on {} points".format(
                len(values), m.theta
            )
        )
    return GenModel(
        theta,
        frozenset((values[x], values[y]) for x, y in m.leq),
        frozenset(frozenset(values[x] for x in pair) for pair in m.dis),
        tuple((values[x], b) for x, b in m.block),
    )


@dataclass(frozen=True)
class StagePlan:
    """
    The levels alpha_0 < ... < alpha_M, and for every stage n the increasing
    enumeration of A_n with the origin and the copying word of each point.
    ``extra[n]`` is a_n in the c variant and None otherwise.
    """

    prefix: MorassPrefix
    variant: str
    alpha: Tuple[int, ...]
    fresh: Tuple[Tuple[int, ...], ...]
    origins: Tuple[Tuple[int, ...], ...]
    words: Tuple[Tuple[Word, ...], ...]
    extra: Tuple[Optional[int], ...]

    @property
    def stages(self) -> int:
        return len(self.alpha) - 1


def alpha_sequence(M: int, variant: str = PLAIN) -> Tuple[int, ...]:
    """The least alpha_0 .. alpha_M allowed by the stage recurrence."""
    _check_variant(variant)
    alpha = [0]
    for n in range(M):
        alpha.append(alpha[-1] + n + (1 if variant == PLAIN else 2))
    return tuple(alpha)


def _covering_word(
    p: MorassPrefix, found: Origin, targets: Iterable[int]
) -> Optional[Word]:
    """
    A word realising the copy described by ``found`` whose range contains
    every target point of the top level, searched in id-before-h order.
    """
    targets = tuple(targets)
    top = found.target
    start = found.level + 1

    def search(level: int, points: Tuple[int, ...], suffix: Word) -> Optional[Word]:
        if level == start:
            return suffix
        for choice in found.choices[level - 1 - start]:
            preimages = []
            for x in points:
                matches = [s for c, s in p.step_preimages(level - 1, x) if c == choice]
                if not matches:
                    break
                preimages.append(matches[0])
            else:
                result = search(level - 1, tuple(preimages), (choice,) + suffix)
                if result is not None:
                    return result
        return None

    return search(top, targets, ())


def _select_fresh(
    p: MorassPrefix,
    lower: int,
    upper: int,
    size: int,
    excluded_origins: Set[int],
) -> Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[Word, ...]]:
    """
    The lexicographically least valid A_n: ``size`` fresh points of level
    upper (relative to lower) with pairwise distinct origins, such that every
    point is copied by a word whose range contains all points of smaller
    origin.
    """
    candidates = []
    for x in sorted(fresh_points(p, lower, upper)):
        found = trace_origin(p, upper, x)
        if found is not None and found.level not in excluded_origins:
            candidates.append(found)

    def words_for(chosen: Sequence[Origin]) -> Optional[Tuple[Word, ...]]:
        words = []
        for y in chosen:
            older = [x.point for x in chosen if x.level < y.level]
            word = _covering_word(p, y, older)
            if word is None:
                return None
            words.append(word)
        return tuple(words)

    def search(start: int, chosen: List[Origin]) -> Optional[List[Origin]]:
        if len(chosen) == size:
            return chosen
        used = {x.level for x in chosen}
        for index in range(start, len(candidates)):
            candidate = candidates[index]
            if candidate.level in used:
                continue
            extended = chosen + [candidate]
            if words_for(extended) is None:
                continue
            result = search(index + 1, extended)
            if result is not None:
                return result
        return None

    chosen = search(0, [])
    if chosen is None:
        raise InsufficientLevels(
            "No valid set of {} fresh points at level {} relative to level {}".format(
                size, upper, lower
            )
        )

    words = words_for(chosen)
    assert words is not None
    return (
        tuple(x.point for x in chosen),
        tuple(x.level for x in chosen),
        words,
    )


def plan_stages(
    p: MorassPrefix,
    M: int,
    variant: str = PLAIN,
    max_universe: Optional[int] = None,
) -> StagePlan:
    """
    The least alpha sequence for M stages with the lexicographically least
    valid A_n (and a_n) of each stage.
    """
    _check_variant(variant)
    if M < 0:
        raise ValueError("The stage count must not be negative, got {}".format(M))

    alpha = alpha_sequence(M, variant)
    if alpha[-1] > p.N:
        raise InsufficientLevels(
            "{} {} stages need {} levels, the prefix has N = {}".format(
                M, variant, alpha[-1], p.N
            )
        )

    if max_universe is None:
        max_universe = get_configuration().get_int(
            ["construction", "max_universe"], 131072
        )
    if p.theta(alpha[-1]) > max_universe:
        raise UniverseTooLarge(
            "Level {} has {} points, over the limit of {}".format(
                alpha[-1], p.theta(alpha[-1]), max_universe
            )
        )

    fresh, origins, words, extra = [], [], [], []
    for n in range(M):
        lower, upper = alpha[n], alpha[n + 1]
        excluded: Set[int] = set()
        a_n: Optional[int] = None
        if variant == C_VARIANT:
            excluded.add(upper - 1)
            a_n = p.theta(upper - 1)

        points, levels, stage_words = _select_fresh(p, lower, upper, n + 1, excluded)
        fresh.append(points)
        origins.append(levels)
        words.append(stage_words)
        extra.append(a_n)
        logger.debug("Stage {}: A = {}, a = {}".format(n, list(points), a_n))

    return StagePlan(
        p, variant, alpha, tuple(fresh), tuple(origins), tuple(words), tuple(extra)
    )


@dataclass
class _Births:
    """Relations of the new points, keyed by the level that introduces them."""

    leq: Dict[int, Set[Pair]] = field(default_factory=dict)
    dis: Dict[int, Set[DisPair]] = field(default_factory=dict)

    def add_leq(self, level: int, x: int, y: int) -> None:
        self.leq.setdefault(level, set()).add((x, y))

    def add_dis(self, level: int, x: int, y: int) -> None:
        self.dis.setdefault(level, set()).add(frozenset((x, y)))


def _stage_births(plan: StagePlan, n: int, bit: int) -> _Births:
    p = plan.prefix
    births = _Births()
    points = plan.fresh[n]

    for y, y_level, y_word in zip(points, plan.origins[n], plan.words[n]):
        birth = y_level + 1
        new = p.theta(y_level)
        f = word_map(p, birth, y_word)
        for x, x_level in zip(points, plan.origins[n]):
            if x_level >= y_level:
                continue
            z = f.preimage(x)
            if z is None:
                raise ConstructionFailure(
                    "Point {} is not in the range of the word copying {}".format(x, y)
                )
            if bit == 0:
                births.add_dis(birth, z, new)
            elif x < y:
                births.add_leq(birth, z, new)
            else:
                births.add_leq(birth, new, z)

    a_n = plan.extra[n]
    if a_n is not None:
        top = plan.alpha[n + 1]
        for x in sorted(covered_points(p, plan.alpha[n], top)):
            births.add_dis(top, x, a_n)

    return births


def _next_level(
    p: MorassPrefix,
    m: GenModel,
    beta: int,
    variant: str,
    new_leq: Iterable[Pair] = (),
    new_dis: Iterable[DisPair] = (),
) -> GenModel:
    """Level beta + 1 from level beta and the relations of its new point."""
    theta = p.theta(beta + 1)
    images = [pushforward(m, f, theta) for f in p.one_step(beta)]

    leq: Set[Pair] = set(new_leq)
    dis: Set[DisPair] = set(new_dis)
    block: Dict[int, int] = {}
    for image in images:
        leq |= image.leq
        dis |= image.dis
        for x, b in image.block:
            if block.setdefault(x, b) != b:
                raise ConstructionFailure(
                    "Point {} of level {} receives blocks {} and {}".format(
                        x, beta + 1, block[x], b
                    )
                )

    if variant == C_VARIANT:
        # One block per born point; the level 0 point has block 0.
        block[p.theta(beta)] = beta + 1
        members: Dict[int, List[int]] = {}
        for x, b in block.items():
            members.setdefault(b, []).append(x)
        for copies in members.values():
            dis.update(frozenset(pair) for pair in itertools.combinations(copies, 2))

    graph = nx.DiGraph(list(leq))
    if not nx.is_directed_acyclic_graph(graph):
        cycle = nx.find_cycle(graph)
        raise ConstructionFailure(
            "Level {} order has a cycle through {}".format(beta + 1, cycle)
        )
    closed = set(nx.transitive_closure_dag(graph).edges)

    for x, y in sorted(closed):
        if frozenset((x, y)) in dis:
            raise ConstructionFailure(
                "Level {} forces {} with the pair ({}, {})".format(
                    beta + 1, CONTRADICTION_CLAUSE, x, y
                )
            )

    return GenModel(theta, frozenset(closed), frozenset(dis), tuple(block.items()))


def initial_model(variant: str = PLAIN) -> GenModel:
    _check_variant(variant)
    return GenModel(1, block=((0, 0),) if variant == C_VARIANT else ())


def extend_stage(
    models: Sequence[GenModel], plan: StagePlan, n: int, bit: int
) -> GenModel:
    """
    Builds the model at level alpha_{n+1} from the model at level alpha_n.
    The models at the levels in between are its restrictions.
    """
    if bit not in (0, 1):
        raise ValueError("A stage bit must be 0 or 1, got {!r}".format(bit))
    lower, upper = plan.alpha[n], plan.alpha[n + 1]
    if len(models) <= lower:
        raise ConstructionFailure(
            "Stage {} needs the model at level {}, only {} levels are built".format(
                n, lower, len(models)
            )
        )

    births = _stage_births(plan, n, bit)
    m = models[lower]
    for beta in range(lower, upper):
        m = _next_level(
            plan.prefix,
            m,
            beta,
            plan.variant,
            births.leq.get(beta + 1, ()),
            births.dis.get(beta + 1, ()),
        )

    logger.info(
        "Stage {} (bit {}) built level {} with {} points, {} order and {} "
        "disjointness pairs".format(n, bit, upper, m.theta, len(m.leq), len(m.dis))
    )
    return m


class TheoryReport(CheckReport):
    pass


def check_theory(m: GenModel, variant: str = PLAIN) -> TheoryReport:
    """Verifies the clauses of the plain or c-variant theory on m."""
    _check_variant(variant)
    report = TheoryReport()

    outside = [
        x
        for x in itertools.chain(
            itertools.chain.from_iterable(m.leq),
            itertools.chain.from_iterable(m.dis),
            (x for x, _ in m.block),
        )
        if not 0 <= x < m.theta
    ]
    report.add(
        "universe",
        not outside,
        clause="relations stay inside the universe",
        witnesses=sorted(set(outside))[:10],
    )

    successors: Dict[int, Set[int]] = {}
    for x, y in m.leq:
        successors.setdefault(x, set()).add(y)

    intransitive = [
        [x, y, z]
        for x, y in sorted(m.leq)
        for z in sorted(successors.get(y, ()))
        if x != z and (x, z) not in m.leq
    ]
    report.add(
        "transitive",
        not intransitive,
        clause="≤* is transitive",
        witnesses=intransitive[:10],
    )

    symmetric = sorted([x, y] for x, y in m.leq if x < y and (y, x) in m.leq)
    report.add(
        "antisymmetric",
        not symmetric,
        clause="≤* is antisymmetric",
        witnesses=symmetric[:10],
    )

    loops = sorted(sorted(pair) for pair in m.dis if len(pair) != 2)
    report.add(
        "antireflexive",
        not loops,
        clause="d is symmetric and antireflexive",
        witnesses=loops[:10],
    )

    contradictions = sorted([x, y] for x, y in m.leq if frozenset((x, y)) in m.dis)
    report.add(
        "contradictory",
        not contradictions,
        clause=CONTRADICTION_CLAUSE,
        witnesses=contradictions[:10],
    )

    if variant == C_VARIANT:
        unlabelled = [x for x in range(m.theta) if x not in m.block_map]
        report.add(
            "blocks_total",
            not unlabelled,
            clause="every point is in a block",
            witnesses=unlabelled[:10],
        )

        labels: Dict[int, Set[int]] = {}
        for x, b in m.block:
            labels.setdefault(x, set()).add(b)
        doubled = sorted(x for x, found in labels.items() if len(found) > 1)
        report.add(
            "one_block",
            not doubled,
            clause="no point is in two blocks",
            witnesses=doubled[:10],
        )

        members: Dict[int, List[int]] = {}
        for x, b in m.block:
            members.setdefault(b, []).append(x)
        free = sorted(
            [x, y]
            for copies in members.values()
            for x, y in itertools.combinations(sorted(copies), 2)
            if frozenset((x, y)) not in m.dis
        )
        report.add(
            "blocks_disjoint",
            not free,
            clause="points sharing a block satisfy d",
            witnesses=free[:10],
        )

    return report


def embed_check(src: GenModel, dst: GenModel, f) -> bool:
    """True iff f preserves and reflects the order, disjointness and blocks."""
    values = _values(f)
    if len(values) != src.theta or any(not 0 <= v < dst.theta for v in values):
        return False
    if len(set(values)) != len(values):
        return False

    inverse = {v: x for x, v in enumerate(values)}
    pulled_leq = {
        (inverse[x], inverse[y]) for x, y in dst.leq if x in inverse and y in inverse
    }
    pulled_dis = {
        frozenset(inverse[x] for x in pair)
        for pair in dst.dis
        if all(x in inverse for x in pair)
    }
    if pulled_leq != set(src.leq) or pulled_dis != set(src.dis):
        return False

    src_blocks = src.block_map
    dst_blocks = dst.block_map
    return all(src_blocks.get(x) == dst_blocks.get(v) for x, v in enumerate(values))


def presentation(m: GenModel) -> BoolPresentation:
    """The Boolean algebra generated by the points, freely except for m."""
    return BoolPresentation(tuple(range(m.theta)), m.leq, m.dis, m.block)


RouteKey = Tuple[str, Tuple[int, ...]]

# Witness words kept per (pair, source level).
ROUTE_WORDS = 2


@dataclass(frozen=True)
class LimitCertificate:
    """
    For each relation pair of the top level, the source levels whose
    relations are pushed onto it, each with up to two witness words.
    """

    routes: Dict[RouteKey, Dict[int, Tuple[Word, ...]]]

    def route_count(self, key: RouteKey) -> int:
        return sum(len(words) for words in self.routes[key].values())

    @property
    def multi_route_pairs(self) -> int:
        return sum(1 for key in self.routes if self.route_count(key) > 1)

    def as_dict(self, limit: int = 10) -> Dict[str, object]:
        examples = [
            {
                "relation": kind,
                "pair": list(pair),
                "routes": [
                    [level, list(word)]
                    for level, words in sorted(self.routes[(kind, pair)].items())
                    for word in words
                ],
            }
            for kind, pair in sorted(self.routes)
            if self.route_count((kind, pair)) > 1
        ]
        return {
            "pairs": len(self.routes),
            "multi_route_pairs": self.multi_route_pairs,
            "examples": examples[:limit],
        }


@dataclass(frozen=True)
class LimitModel:
    model: GenModel
    certificate: LimitCertificate


def _relation_keys(m: GenModel) -> List[RouteKey]:
    keys: List[RouteKey] = [("leq", pair) for pair in sorted(m.leq)]
    keys.extend(("dis", pair) for pair in m.sorted_dis())
    return keys


def limit_model(
    p: MorassPrefix, models: Sequence[GenModel], plan: Optional[StagePlan] = None
) -> LimitModel:
    """
    Defines the relations of the top level existentially: a pair is related
    iff some f in F(alpha, top) maps a related pair of level alpha onto it.
    The images along all words are swept forward one level at a time. The
    result must equal the top model; pairs reached by several routes are
    recorded in the certificate.
    """
    top = len(models) - 1
    if top < 0 or top > p.N:
        raise IllDefinedLimit("Cannot take the limit of {} models".format(len(models)))
    if plan is not None and plan.alpha[-1] > top:
        raise IllDefinedLimit(
            "The plan reaches level {} but only {} levels are built".format(
                plan.alpha[-1], top
            )
        )

    current: Dict[RouteKey, Dict[int, List[Word]]] = {}
    for beta in range(top + 1):
        for key in _relation_keys(models[beta]):
            current.setdefault(key, {}).setdefault(beta, []).append(())
        if beta == top:
            break

        pushed: Dict[RouteKey, Dict[int, List[Word]]] = {}
        for choice, values in zip((ID, H), p.one_step(beta)):
            for (kind, pair), sources in current.items():
                image = tuple(values[x] for x in pair)
                if kind == "dis":
                    image = tuple(sorted(image))
                target = pushed.setdefault((kind, image), {})
                for source, words in sources.items():
                    kept = target.setdefault(source, [])
                    for word in words:
                        if len(kept) < ROUTE_WORDS:
                            kept.append(word + (choice,))
        current = pushed

    theta = models[top].theta
    leq = frozenset(pair for kind, pair in current if kind == "leq")
    dis = frozenset(frozenset(pair) for kind, pair in current if kind == "dis")
    limit = GenModel(theta, leq, dis, models[top].block)  # type: ignore

    if limit.leq != models[top].leq or limit.dis != models[top].dis:
        extra_leq = sorted(limit.leq - models[top].leq)
        extra_dis = sorted(tuple(sorted(x)) for x in limit.dis - models[top].dis)
        raise IllDefinedLimit(
            "The limit disagrees with level {}: extra order pairs {}, extra "
            "disjointness pairs {}".format(top, extra_leq[:5], extra_dis[:5])
        )

    conflicts = sorted(pair for pair in limit.leq if frozenset(pair) in limit.dis)
    if conflicts:
        raise IllDefinedLimit(
            "Routes disagree on the pairs {}: {}".format(
                conflicts[:5], CONTRADICTION_CLAUSE
            )
        )

    certificate = LimitCertificate(
        {
            key: {source: tuple(words) for source, words in sources.items()}
            for key, sources in current.items()
        }
    )
    logger.info(
        "Limit at level {}: {} relation pairs, {} reached by several routes".format(
            top, len(current), certificate.multi_route_pairs
        )
    )
    return LimitModel(limit, certificate)


@dataclass
class Construction:
    prefix: MorassPrefix
    plan: StagePlan
    bits: Tuple[int, ...]
    models: List[GenModel]
    report: CheckReport

    @property
    def variant(self) -> str:
        return self.plan.variant

    @property
    def top(self) -> GenModel:
        return self.models[-1]


def parse_bits(bits) -> Tuple[int, ...]:
    if isinstance(bits, str):
        bits = [ch for ch in bits.strip() if not ch.isspace()]
    parsed = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in parsed):
        raise ValueError("Bits must be 0 or 1, got {}".format(list(parsed)))
    return parsed


def run_construction(
    p: MorassPrefix,
    M: int,
    bits,
    variant: str = PLAIN,
    max_universe: Optional[int] = None,
) -> Construction:
    """
    Plans and builds M stages, fills the levels between stages with
    restrictions and the levels above the last stage with pushforwards, then
    checks the theory at every level, every one-step embedding and the
    dichotomy of every stage.
    """
    bits = parse_bits(bits)
    if len(bits) < M:
        raise ValueError("{} stages need {} bits, got {}".format(M, M, len(bits)))

    plan = plan_stages(p, M, variant, max_universe)
    models = [initial_model(variant)]
    for n in range(M):
        m = extend_stage(models, plan, n, bits[n])
        for beta in range(plan.alpha[n] + 1, plan.alpha[n + 1]):
            models.append(restrict(m, p.theta(beta)))
        models.append(m)
    for beta in range(len(models) - 1, p.N):
        models.append(_next_level(p, models[beta], beta, variant))

    report = CheckReport()
    theory_failures = []
    for level, m in enumerate(models):
        for check in check_theory(m, variant).failures():
            theory_failures.append({"level": level, "clause": check.detail["clause"]})
    report.add(
        "theory", not theory_failures, variant=variant, failures=theory_failures[:10]
    )

    bad_embeddings = []
    for beta in range(len(models) - 1):
        for choice, values in zip((ID, H), p.one_step(beta)):
            if not embed_check(models[beta], models[beta + 1], values):
                bad_embeddings.append({"level": beta, "map": choice})
    report.add("embeddings", not bad_embeddings, failures=bad_embeddings[:10])

    top_presentation = presentation(models[plan.alpha[-1]]) if M else None
    bad_stages = []
    for n in range(M):
        stage = presentation(models[plan.alpha[n + 1]])
        if not dichotomy_check(stage, plan.fresh[n], bits[n]):
            bad_stages.append(n)
    report.add("dichotomy", not bad_stages, failures=bad_stages)

    entangled = []
    bad_extra = []
    for n in range(M):
        m = models[plan.alpha[n + 1]]
        covered = covered_points(p, plan.alpha[n], plan.alpha[n + 1])
        fresh = set(plan.fresh[n])
        for x, y in itertools.chain(m.leq, (tuple(pair) for pair in m.dis)):
            if (x in fresh and y in covered) or (y in fresh and x in covered):
                entangled.append({"stage": n, "pair": sorted([x, y])})

        a_n = plan.extra[n]
        if a_n is not None:
            missing = [x for x in sorted(covered) if frozenset((x, a_n)) not in m.dis]
            shared = [
                x
                for x in range(m.theta)
                if x != a_n and m.block_of(x) == m.block_of(a_n)
            ]
            if missing or shared:
                bad_extra.append({"stage": n, "missing": missing[:5], "shared": shared})
    report.add("fresh_isolated", not entangled, failures=entangled[:10])
    if variant == C_VARIANT:
        report.add("extra_points", not bad_extra, failures=bad_extra[:10])

    if top_presentation is not None:
        zero = [
            g
            for g in top_presentation.generators
            if not generator_nonzero(top_presentation, g)
        ]
        report.add("generators_nonzero", not zero, zero=zero[:10])

    construction = Construction(p, plan, bits[:M], models, report)
    logger.info(
        "Built {} {} stages up to level {}: passed={}".format(
            M, variant, len(models) - 1, report.passed
        )
    )
    return construction
