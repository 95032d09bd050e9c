"""
Boolean algebras generated freely except for order and disjointness
relations, realised through their Stone spaces.

A presentation is read as a Horn formula over its generators: ``x <= y`` is
the clause (not x or y) and ``d(x, y)`` the clause (not x or not y). A point
of the Stone space is a 0/1 assignment satisfying every clause. Since every
clause has a negative literal, unit propagation decides whether a partial
assignment extends to a point, and the all-zero assignment is always one.
"""
import itertools
import logging
import math
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import (
    Any,
    Dict,
    FrozenSet,
    Hashable,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import networkx as nx

from morasskit.checks import CheckReport
from morasskit.configuration import get_configuration
from morasskit.errors import MorassKitError

logger = logging.getLogger(__name__)

Gen = Hashable
Pattern = FrozenSet[Gen]

ENUMERATE = "enumerate"
PROPAGATE = "propagate"
AUTO = "auto"
BACKENDS = (ENUMERATE, PROPAGATE, AUTO)


class TooLarge(MorassKitError):
    pass


class InvalidScenario(MorassKitError):
    pass


class InvalidPresentation(MorassKitError):
    pass


def _sort_key(g: Gen) -> Tuple[str, Any]:
    return (type(g).__name__, g)


def _sorted(gens: Iterable[Gen]) -> List[Gen]:
    return sorted(gens, key=_sort_key)


@dataclass(frozen=True)
class BoolPresentation:
    """
    Generators with ``leq`` pairs (x, y) meaning x <= y and unordered
    ``dis`` pairs meaning x and y are disjoint. ``blocks`` labels generators
    with block indices; the labels carry no relations of their own.
    """

    generators: Tuple[Gen, ...]
    leq: FrozenSet[Tuple[Gen, Gen]] = frozenset()
    dis: FrozenSet[FrozenSet[Gen]] = frozenset()
    blocks: Tuple[Tuple[Gen, int], ...] = ()

    def __post_init__(self):
        generators = tuple(_sorted(set(self.generators)))
        leq = frozenset((x, y) for x, y in self.leq if x != y)
        dis = frozenset(frozenset(pair) for pair in self.dis)
        blocks = self.blocks
        if isinstance(blocks, Mapping):
            blocks = blocks.items()
        blocks = tuple(sorted(set(blocks), key=lambda item: _sort_key(item[0])))

        object.__setattr__(self, "generators", generators)
        object.__setattr__(self, "leq", leq)
        object.__setattr__(self, "dis", dis)
        object.__setattr__(self, "blocks", blocks)

        self._validate()

    @classmethod
    def build(
        cls,
        generators: Iterable[Gen],
        leq: Iterable[Tuple[Gen, Gen]] = (),
        dis: Iterable[Iterable[Gen]] = (),
        blocks: Union[None, Mapping[Gen, int], Iterable[Tuple[Gen, int]]] = None,
    ) -> "BoolPresentation":
        return cls(
            tuple(generators),
            frozenset(tuple(pair) for pair in leq),  # type: ignore
            frozenset(frozenset(pair) for pair in dis),
            tuple(blocks.items() if isinstance(blocks, Mapping) else blocks or ()),
        )

    def _validate(self) -> None:
        known = set(self.generators)
        for x, y in self.leq:
            if x not in known or y not in known:
                raise InvalidPresentation(
                    "Relation {} <= {} mentions an unknown generator".format(x, y)
                )
        for pair in self.dis:
            if len(pair) != 2:
                raise InvalidPresentation(
                    "Disjointness must relate two distinct generators: {}".format(
                        _sorted(pair)
                    )
                )
            if not pair <= known:
                raise InvalidPresentation(
                    "Disjointness {} mentions an unknown generator".format(
                        _sorted(pair)
                    )
                )

        seen: Dict[Gen, int] = {}
        for g, block in self.blocks:
            if g not in known:
                raise InvalidPresentation(
                    "Block label on unknown generator {}".format(g)
                )
            if g in seen and seen[g] != block:
                raise InvalidPresentation(
                    "Generator {} has two blocks: {} and {}".format(g, seen[g], block)
                )
            seen[g] = block

        if not nx.is_directed_acyclic_graph(self.order_graph):
            cycle = nx.find_cycle(self.order_graph)
            raise InvalidPresentation(
                "The order relation has a cycle: {}".format(cycle)
            )

        for x, y in self.closure.edges:
            if frozenset((x, y)) in self.dis:
                raise InvalidPresentation(
                    "d({0}, {1}) and {0} <= {1} are contradictory".format(x, y)
                )

    def __len__(self) -> int:
        return len(self.generators)

    def __contains__(self, g: Gen) -> bool:
        return g in self.generator_set

    @cached_property
    def generator_set(self) -> FrozenSet[Gen]:
        return frozenset(self.generators)

    @cached_property
    def order_graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.generators)
        graph.add_edges_from(self.leq)
        return graph

    @cached_property
    def closure(self) -> nx.DiGraph:
        return nx.transitive_closure_dag(self.order_graph)

    @cached_property
    def up(self) -> Dict[Gen, Tuple[Gen, ...]]:
        return {g: tuple(self.order_graph.successors(g)) for g in self.generators}

    @cached_property
    def down(self) -> Dict[Gen, Tuple[Gen, ...]]:
        return {g: tuple(self.order_graph.predecessors(g)) for g in self.generators}

    @cached_property
    def dis_neighbours(self) -> Dict[Gen, Tuple[Gen, ...]]:
        neighbours: Dict[Gen, List[Gen]] = {g: [] for g in self.generators}
        for pair in self.dis:
            x, y = tuple(pair)
            neighbours[x].append(y)
            neighbours[y].append(x)
        return {g: tuple(_sorted(found)) for g, found in neighbours.items()}

    @cached_property
    def block_map(self) -> Dict[Gen, int]:
        return dict(self.blocks)

    @cached_property
    def components(self) -> Tuple[FrozenSet[Gen], ...]:
        """Connected components of the constraint graph, ordered by least member."""
        graph = nx.Graph()
        graph.add_nodes_from(self.generators)
        graph.add_edges_from(self.leq)
        graph.add_edges_from(tuple(pair) for pair in self.dis)
        found = [frozenset(c) for c in nx.connected_components(graph)]
        return tuple(sorted(found, key=lambda c: _sort_key(_sorted(c)[0])))

    @cached_property
    def component_of(self) -> Dict[Gen, FrozenSet[Gen]]:
        return {g: component for component in self.components for g in component}

    def block_of(self, g: Gen) -> Optional[int]:
        return self.block_map.get(g)

    def is_leq(self, x: Gen, y: Gen) -> bool:
        """x <= y follows from the order relations alone."""
        return x == y or self.closure.has_edge(x, y)

    def is_dis(self, x: Gen, y: Gen) -> bool:
        return frozenset((x, y)) in self.dis

    def with_relations(
        self,
        generators: Iterable[Gen] = (),
        leq: Iterable[Tuple[Gen, Gen]] = (),
        dis: Iterable[Iterable[Gen]] = (),
        blocks: Union[None, Mapping[Gen, int], Iterable[Tuple[Gen, int]]] = None,
    ) -> "BoolPresentation":
        """The presentation with extra generators and relations added."""
        extra_blocks = blocks.items() if isinstance(blocks, Mapping) else blocks or ()
        return BoolPresentation.build(
            itertools.chain(self.generators, generators),
            itertools.chain(self.leq, leq),
            itertools.chain(self.dis, dis),
            itertools.chain(self.blocks, extra_blocks),
        )

    def canonical(self) -> "BoolPresentation":
        """Same algebra with the order relation transitively closed."""
        return BoolPresentation(
            self.generators, frozenset(self.closure.edges), self.dis, self.blocks
        )


@dataclass(frozen=True)
class Assignment:
    """A point of the Stone space, given by the generators it maps to 1."""

    ones: FrozenSet[Gen] = frozenset()

    def __call__(self, g: Gen) -> int:
        return int(g in self.ones)

    def satisfies(self, p: BoolPresentation) -> bool:
        return _satisfies(p, self.ones)

    def as_dict(self, generators: Iterable[Gen]) -> Dict[Gen, int]:
        return {g: self(g) for g in generators}

    def sort_key(self) -> Tuple[int, List[Tuple[str, Any]]]:
        return (len(self.ones), [_sort_key(g) for g in _sorted(self.ones)])


Element = FrozenSet[Assignment]


def _satisfies(p: BoolPresentation, ones: FrozenSet[Gen]) -> bool:
    for x, y in p.leq:
        if x in ones and y not in ones:
            return False
    for pair in p.dis:
        if pair <= ones:
            return False
    return True


def propagate(
    p: BoolPresentation, ones: Iterable[Gen] = (), zeros: Iterable[Gen] = ()
) -> Optional[Tuple[Pattern, Pattern]]:
    """
    Unit propagation from the given decisions. Returns the forced (ones,
    zeros) or None on a conflict. Setting every undecided generator to 0
    completes a conflict-free result to a Stone point.
    """
    forced_ones = set()
    forced_zeros = set()
    queue = deque([(g, 1) for g in ones] + [(g, 0) for g in zeros])

    while queue:
        g, value = queue.popleft()
        if value:
            if g in forced_zeros:
                return None
            if g in forced_ones:
                continue
            forced_ones.add(g)
            queue.extend((successor, 1) for successor in p.up[g])
            queue.extend((neighbour, 0) for neighbour in p.dis_neighbours[g])
        else:
            if g in forced_ones:
                return None
            if g in forced_zeros:
                continue
            forced_zeros.add(g)
            queue.extend((predecessor, 0) for predecessor in p.down[g])

    return frozenset(forced_ones), frozenset(forced_zeros)


def _search(p: BoolPresentation, variables: Sequence[Gen]) -> Iterator[Pattern]:
    """
    Backtracking with unit propagation over ``variables``; yields the set of
    raised variables for every consistent decision of all of them.
    """
    scope = frozenset(variables)
    start = propagate(p)
    if start is None:
        return

    stack = [(0, start[0], start[1])]
    while stack:
        index, ones, zeros = stack.pop()
        while index < len(variables) and (
            variables[index] in ones or variables[index] in zeros
        ):
            index += 1

        if index == len(variables):
            yield ones & scope
            continue

        g = variables[index]
        # Pushed in reverse so that the 0 branch is explored first.
        for value in (1, 0):
            if value:
                decided = propagate(p, ones | {g}, zeros)
            else:
                decided = propagate(p, ones, zeros | {g})
            if decided is not None:
                stack.append((index + 1, decided[0], decided[1]))


def _enumerate(p: BoolPresentation, variables: Sequence[Gen]) -> Iterator[Pattern]:
    """All subsets of ``variables`` that satisfy every relation among them."""
    for bits in itertools.product((0, 1), repeat=len(variables)):
        ones = frozenset(g for g, bit in zip(variables, bits) if bit)
        if _satisfies(p, ones):
            yield ones


def _budget(budget: Optional[int]) -> int:
    if budget is not None:
        return budget
    return get_configuration().solver_budget()


def _max_points(max_points: Optional[int]) -> int:
    if max_points is not None:
        return max_points
    return get_configuration().get_int(["solver", "max_points"], 2 ** 20)


def _check_backend(backend: str) -> None:
    if backend not in BACKENDS:
        raise ValueError(
            "Unknown backend '{}', expected one of {}".format(
                backend, ", ".join(BACKENDS)
            )
        )


def _check_scope(p: BoolPresentation, scope: Iterable[Gen]) -> List[Gen]:
    scope = _sorted(set(scope))
    unknown = [g for g in scope if g not in p]
    if unknown:
        raise InvalidPresentation("Unknown generators: {}".format(unknown))
    return scope


def _component_patterns(
    p: BoolPresentation,
    component: FrozenSet[Gen],
    scope: Sequence[Gen],
    backend: str,
    budget: int,
) -> FrozenSet[Pattern]:
    """Projections onto ``scope`` of the Stone points of one component."""
    if backend == AUTO:
        backend = ENUMERATE if len(component) <= budget else PROPAGATE

    if backend == ENUMERATE:
        if len(component) > budget:
            raise TooLarge(
                "A constraint component has {} generators, over the enumeration "
                "budget of {}".format(len(component), budget)
            )
        scope_set = frozenset(scope)
        return frozenset(
            ones & scope_set for ones in _enumerate(p, _sorted(component))
        )

    return frozenset(_search(p, list(scope)))


def _product_size(parts: Sequence[FrozenSet[Pattern]]) -> int:
    return math.prod(len(part) for part in parts)


def _product(parts: Sequence[FrozenSet[Pattern]]) -> FrozenSet[Pattern]:
    return frozenset(
        frozenset().union(*combination) for combination in itertools.product(*parts)
    )


def projections(
    p: BoolPresentation,
    scope: Iterable[Gen],
    backend: str = AUTO,
    budget: Optional[int] = None,
    max_points: Optional[int] = None,
) -> FrozenSet[Pattern]:
    """
    The patterns (sets of raised scope generators) realised by Stone points of
    the whole presentation.

    The enumeration backend enumerates every generator of the presentation.
    The other backends work per constraint component of the scope, so that
    relations outside the scope still exclude extensions.
    """
    _check_backend(backend)
    scope = _check_scope(p, scope)
    budget = _budget(budget)
    max_points = _max_points(max_points)

    if backend == ENUMERATE:
        if len(p) > budget:
            raise TooLarge(
                "{} generators exceed the enumeration budget of {}".format(
                    len(p), budget
                )
            )
        scope_set = frozenset(scope)
        return frozenset(ones & scope_set for ones in _enumerate(p, p.generators))

    parts = []
    for component in p.components:
        inside = [g for g in scope if g in component]
        if inside:
            parts.append(_component_patterns(p, component, inside, backend, budget))

    if _product_size(parts) > max_points:
        raise TooLarge(
            "The projection onto {} generators has over {} points".format(
                len(scope), max_points
            )
        )
    return _product(parts)


def stone_points(
    p: BoolPresentation,
    backend: str = AUTO,
    budget: Optional[int] = None,
    max_points: Optional[int] = None,
) -> FrozenSet[Assignment]:
    """Every assignment satisfying the presentation."""
    patterns = projections(p, p.generators, backend, budget, max_points)
    logger.debug(
        "Presentation with {} generators has {} Stone points".format(
            len(p), len(patterns)
        )
    )
    return frozenset(Assignment(ones) for ones in patterns)


class ElementAlgebra(object):
    """
    The presented algebra, with elements as sets of Stone points. Generator g
    denotes the points that map g to 1.
    """

    def __init__(self, presentation: BoolPresentation, points: Iterable[Assignment]):
        self.presentation = presentation
        self.points: Tuple[Assignment, ...] = tuple(
            sorted(set(points), key=Assignment.sort_key)
        )
        self._top: Element = frozenset(self.points)

    @property
    def top(self) -> Element:
        return self._top

    @property
    def bottom(self) -> Element:
        return frozenset()

    def generator(self, g: Gen) -> Element:
        if g not in self.presentation:
            raise InvalidPresentation("Unknown generator {}".format(g))
        return frozenset(s for s in self.points if g in s.ones)

    def meet(self, a: Element, b: Element) -> Element:
        return a & b

    def join(self, a: Element, b: Element) -> Element:
        return a | b

    def join_all(self, elements: Iterable[Element]) -> Element:
        return frozenset().union(*elements)

    def complement(self, a: Element) -> Element:
        return self._top - a

    def leq(self, a: Element, b: Element) -> bool:
        return a <= b

    def disjoint(self, a: Element, b: Element) -> bool:
        return not (a & b)

    def is_zero(self, a: Element) -> bool:
        return not a

    def is_one(self, a: Element) -> bool:
        return a == self._top


def element_algebra(
    p: BoolPresentation, backend: str = AUTO, budget: Optional[int] = None
) -> ElementAlgebra:
    return ElementAlgebra(p, stone_points(p, backend, budget))


def generator_nonzero(p: BoolPresentation, g: Gen) -> bool:
    """True iff some Stone point maps g to 1."""
    _check_scope(p, [g])
    return propagate(p, ones=[g]) is not None


def is_disjoint(p: BoolPresentation, x: Gen, y: Gen) -> bool:
    """x and y meet in zero in the presented algebra."""
    return propagate(p, ones=[x, y]) is None


def is_below(p: BoolPresentation, x: Gen, y: Gen) -> bool:
    """x <= y in the presented algebra."""
    return propagate(p, ones=[x], zeros=[y]) is None


def nice_property(
    p: BoolPresentation,
    F: Iterable[Union[Gen, Element]],
    algebra: Optional[ElementAlgebra] = None,
    preferred: Sequence[Gen] = (),
) -> Optional[Assignment]:
    """
    Looks for a Stone point outside the join of F, witnessing that the join
    is not 1.

    For generators the witness raises a generator (``preferred`` ones first)
    while keeping every member of F at 0, and falls back to the all-zero point;
    a finite set of generators therefore never joins to 1. For elements of
    an ElementAlgebra the points are searched and None is returned when the
    join is the top.
    """
    members = list(F)

    if algebra is not None or any(isinstance(m, frozenset) for m in members):
        if algebra is None:
            algebra = element_algebra(p)
        covered = algebra.join_all(members)  # type: ignore
        for point in algebra.points:
            if point not in covered:
                return point
        return None

    zeros = frozenset(_check_scope(p, members))
    seen = set()
    for g in itertools.chain(preferred, p.generators):
        if g in seen or g in zeros:
            continue
        seen.add(g)
        decided = propagate(p, ones=[g], zeros=zeros)
        if decided is not None:
            return Assignment(decided[0])

    return Assignment(frozenset())


class CAlgebraReport(CheckReport):
    pass


def is_c_algebra(
    p: BoolPresentation,
    max_f: Optional[int] = None,
    subset_limit: Optional[int] = None,
    seed: Optional[int] = None,
    preferred: Sequence[Gen] = (),
) -> CAlgebraReport:
    """
    Checks that the blocks are antichains of pairwise disjoint nonzero
    elements which partition the generators, and that the generators have
    the nice property for every F of size at most ``max_f``. When there are
    more than ``subset_limit`` such F a seeded sample of that many is tested.
    """
    config = get_configuration()
    max_f = max_f if max_f is not None else config.get_int(["calg", "max_f"], 4)
    subset_limit = (
        subset_limit
        if subset_limit is not None
        else config.get_int(["calg", "subset_limit"], 200000)
    )
    seed = seed if seed is not None else config.get_int(["seed"], 0)

    report = CAlgebraReport()

    unlabelled = [g for g in p.generators if p.block_of(g) is None]
    report.add("blocks_total", not unlabelled, unlabelled=unlabelled[:10])

    members: Dict[int, List[Gen]] = {}
    for g, block in p.blocks:
        members.setdefault(block, []).append(g)

    zero = [g for g in p.generators if not generator_nonzero(p, g)]
    report.add("nonzero", not zero, zero=zero[:10])

    comparable = []
    overlapping = []
    for block, gens in sorted(members.items()):
        for x, y in itertools.combinations(gens, 2):
            if is_below(p, x, y) or is_below(p, y, x):
                comparable.append([block, x, y])
            if not is_disjoint(p, x, y):
                overlapping.append([block, x, y])
    report.add("antichain", not comparable, comparable=comparable[:10])
    report.add("pairwise_disjoint", not overlapping, overlapping=overlapping[:10])

    n = len(p)
    sizes = range(1, min(max_f, n) + 1)
    count = sum(math.comb(n, size) for size in sizes)
    sampled = count > subset_limit
    if sampled:
        rng = random.Random(seed)
        families: Iterable[Tuple[Gen, ...]] = (
            tuple(rng.sample(p.generators, rng.choice(list(sizes))))
            for _ in range(subset_limit)
        )
    else:
        families = itertools.chain.from_iterable(
            itertools.combinations(p.generators, size) for size in sizes
        )

    tested = raised = 0
    bad = []
    for family in families:
        witness = nice_property(p, family, preferred=preferred)
        tested += 1
        if witness is None or not witness.satisfies(p) or witness.ones & set(family):
            bad.append(list(family))
        elif witness.ones:
            raised += 1

    report.add(
        "nice_property",
        not bad,
        bound=max_f,
        subsets=count,
        tested=tested,
        raised_witnesses=raised,
        sampled=sampled,
        seed=seed,
        failures=bad[:10],
    )

    logger.info(
        "c-algebra check on {} generators: {} families tested, passed={}".format(
            n, tested, report.passed
        )
    )
    return report


@dataclass(frozen=True)
class SimpleFunction:
    """A finite rational combination of characteristic functions of generators."""

    terms: Tuple[Tuple[Fraction, Gen], ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "terms", tuple((Fraction(coef), g) for coef, g in self.terms)
        )

    @classmethod
    def parse(cls, text: str) -> "SimpleFunction":
        """
        Parses terms like ``1*g3, -1/2*a7, g9``. A generator name is an
        optional letter prefix followed by its index.
        """
        terms = []
        for raw in text.split(","):
            term = raw.strip()
            if not term:
                continue
            if "*" in term:
                coef_text, name = term.split("*", 1)
            else:
                coef_text, name = "1", term
            try:
                coef = Fraction(coef_text.strip())
            except (ValueError, ZeroDivisionError):
                raise ValueError("Invalid coefficient in term '{}'".format(term))
            terms.append((coef, parse_generator(name)))

        return cls(tuple(terms))

    @classmethod
    def indicator_sum(cls, generators: Iterable[Gen]) -> "SimpleFunction":
        return cls(tuple((Fraction(1), g) for g in generators))

    def coefficients(self) -> Dict[Gen, Fraction]:
        combined: Dict[Gen, Fraction] = {}
        for coef, g in self.terms:
            combined[g] = combined.get(g, Fraction(0)) + coef
        return {g: coef for g, coef in combined.items() if coef != 0}

    def generators(self) -> List[Gen]:
        return _sorted({g for _, g in self.terms})

    def __add__(self, other: "SimpleFunction") -> "SimpleFunction":
        return SimpleFunction(self.terms + other.terms)

    def scale(self, factor: Union[int, Fraction]) -> "SimpleFunction":
        return SimpleFunction(tuple((coef * factor, g) for coef, g in self.terms))

    def value(self, point: Assignment) -> Fraction:
        return sum(
            (coef for coef, g in self.terms if g in point.ones), Fraction(0)
        )

    def format(self) -> str:
        return ",".join("{}*g{}".format(coef, g) for coef, g in self.terms)


def parse_generator(name: str) -> Gen:
    name = name.strip()
    digits = name.lstrip("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
    if not digits or not digits.isdigit():
        raise ValueError("Invalid generator name '{}'".format(name))
    return int(digits)


def norm_simple(
    p: BoolPresentation,
    f: SimpleFunction,
    backend: str = AUTO,
    budget: Optional[int] = None,
) -> Fraction:
    """
    The sup norm of f on the Stone space: the largest |sum of the
    coefficients of raised generators| over all Stone points.

    Components of the constraint graph are independent, so outside the
    enumeration backend the extreme sums are added up per component.
    """
    _check_backend(backend)
    coefficients = f.coefficients()
    if not coefficients:
        return Fraction(0)
    scope = _check_scope(p, coefficients)

    def total(pattern: Pattern) -> Fraction:
        return sum((coefficients[g] for g in pattern), Fraction(0))

    if backend == ENUMERATE:
        sums = [total(pattern) for pattern in projections(p, scope, ENUMERATE, budget)]
        return max(abs(s) for s in sums)

    budget = _budget(budget)
    highest = lowest = Fraction(0)
    for component in p.components:
        inside = [g for g in scope if g in component]
        if not inside:
            continue
        sums = [
            total(pattern)
            for pattern in _component_patterns(p, component, inside, backend, budget)
        ]
        highest += max(sums)
        lowest += min(sums)

    return max(highest, -lowest)


def dichotomy_check(p: BoolPresentation, indices: Sequence[Gen], case: int) -> bool:
    """
    Case 0: the generators are pairwise disjoint. Case 1: they form an
    increasing chain in the given order.
    """
    _check_scope(p, indices)
    if case == 0:
        return all(is_disjoint(p, x, y) for x, y in itertools.combinations(indices, 2))
    if case == 1:
        return all(is_below(p, x, y) for x, y in zip(indices, indices[1:]))
    raise ValueError("The dichotomy case must be 0 or 1, got {}".format(case))


def _epsilon_bounds(n_star: int, c: Fraction) -> Tuple[Fraction, Fraction]:
    return (
        Fraction(n_star - c, n_star),
        Fraction(n_star ** 2 + 1 - c * n_star, c * n_star ** 2 + 1),
    )


def _validate_scenario(n_star: int, c: Fraction) -> None:
    if n_star < 3:
        raise InvalidScenario("n_star must be at least 3, got {}".format(n_star))
    if not 0 < c < n_star:
        raise InvalidScenario(
            "c must lie strictly between 0 and n_star = {}, got {}".format(n_star, c)
        )


@dataclass(frozen=True)
class EmbeddingScenario:
    n_star: int
    c: Fraction
    epsilon: Fraction

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        _validate_scenario(self.n_star, self.c)

        epsilon_max = min(_epsilon_bounds(self.n_star, self.c))
        if not 0 < self.epsilon < epsilon_max:
            raise InvalidScenario(
                "epsilon must lie in (0, {}), got {}".format(epsilon_max, self.epsilon)
            )


@dataclass
class ScenarioReport(CheckReport):
    n_star: int = 3
    c: Fraction = Fraction(1)
    epsilon_max: Fraction = Fraction(0)
    bounds: Tuple[Fraction, Fraction] = (Fraction(0), Fraction(0))


def scenario_bounds(n_star: int, c: Union[int, str, Fraction]) -> ScenarioReport:
    """
    epsilon_max = min{(n* - c)/n*, (n*^2 + 1 - c n*)/(c n*^2 + 1)} together with
    the exact arithmetic the norm contradiction relies on.
    """
    c = Fraction(c)
    _validate_scenario(n_star, c)

    bounds = _epsilon_bounds(n_star, c)
    report = ScenarioReport(n_star=n_star, c=c, epsilon_max=min(bounds), bounds=bounds)

    report.add(
        "epsilon_positive",
        report.epsilon_max > 0,
        epsilon_max=str(report.epsilon_max),
    )
    scaled = Fraction(n_star ** 2 + 1, n_star)
    report.add("scaled_chain_norm_exceeds", scaled > n_star, value=str(scaled))
    approximant = (n_star - 1) + Fraction(n_star ** 2 + 1, n_star ** 2 + 1)
    report.add("approximant_bound", approximant == n_star, value=str(approximant))

    return report


@dataclass(frozen=True)
class BranchReport:
    branch: str
    bit: int
    n_star: int
    approximant_bound: Fraction
    scaled_chain_norm: Fraction

    @property
    def contradiction(self) -> bool:
        """The approximants stay below n* while the chain forces more."""
        return self.approximant_bound < self.n_star < self.scaled_chain_norm


ANTICHAIN = "antichain"
CHAIN = "chain"


def dichotomy_branch(n_star: int, z_norm: Union[int, str, Fraction]) -> BranchReport:
    """
    The case split of the stage dichotomy: a ground-model norm below n* - 1
    selects pairwise disjointness (bit 0), anything else the chain (bit 1).
    """
    if n_star < 3:
        raise InvalidScenario("n_star must be at least 3, got {}".format(n_star))
    z_norm = Fraction(z_norm)

    bit = 0 if z_norm < n_star - 1 else 1
    return BranchReport(
        branch=ANTICHAIN if bit == 0 else CHAIN,
        bit=bit,
        approximant_bound=z_norm + (n_star ** 2 + 1) * Fraction(1, n_star ** 2 + 1),
        scaled_chain_norm=Fraction(n_star ** 2 + 1, n_star),
        n_star=n_star,
    )
