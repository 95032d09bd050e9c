"""
Conditions of the poset of small presented Boolean algebras over an index
set, ordered by embedding over the index part.

A condition p is a presentation whose generators are exactly its index set
w_p. ``stronger(p, q)`` means p <= q: q is the stronger condition and the
algebra of p embeds into that of q fixing w_p. This holds iff the Stone
points of q, projected onto w_p, are exactly the Stone points of p.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Set,
    Tuple,
)

import networkx as nx

from morasskit.balg import (
    BoolPresentation,
    InvalidPresentation,
    Pattern,
    SimpleFunction,
    generator_nonzero,
    norm_simple,
    projections,
)
from morasskit.errors import MorassKitError

logger = logging.getLogger(__name__)


class PreconditionViolation(MorassKitError):
    pass


@dataclass(frozen=True)
class PCondition:
    presentation: BoolPresentation

    @classmethod
    def build(
        cls,
        w: Iterable[int],
        leq: Iterable[Tuple[int, int]] = (),
        dis: Iterable[Iterable[int]] = (),
    ) -> "PCondition":
        return cls(BoolPresentation.build(w, leq, dis))

    @property
    def w(self) -> FrozenSet[int]:
        return self.presentation.generator_set

    @property
    def indices(self) -> Tuple[int, ...]:
        return self.presentation.generators  # type: ignore

    @cached_property
    def points(self) -> FrozenSet[Pattern]:
        return projections(self.presentation, self.indices)

    def project(self, scope: Iterable[int]) -> FrozenSet[Pattern]:
        scope = frozenset(scope)
        return frozenset(point & scope for point in self.points)

    def equivalent(self, other: "PCondition") -> bool:
        """Same index set and isomorphic algebras over it."""
        return self.w == other.w and self.points == other.points

    def canonical(self) -> "PCondition":
        return PCondition(self.presentation.canonical())


@dataclass(frozen=True)
class TypeCode:
    """
    The size of w_p and the Stone points of p as sorted bit masks over the
    positions of the increasing enumeration of w_p.
    """

    size: int
    masks: Tuple[int, ...]


def type_code(p: PCondition) -> TypeCode:
    position = {index: pos for pos, index in enumerate(p.indices)}
    masks = sorted(sum(1 << position[g] for g in point) for point in p.points)
    return TypeCode(len(p.indices), tuple(masks))


def stronger(p: PCondition, q: PCondition) -> bool:
    """p <= q: w_p is inside w_q and q projects onto exactly p's points."""
    return p.w <= q.w and q.project(p.w) == p.points


def _contract_cycles(
    indices: Sequence[int], leq: Iterable[Tuple[int, int]]
) -> Tuple[Dict[int, int], Set[Tuple[int, int]]]:
    """
    Maps every member of a cycle of the joint order to the least member of
    its strongly connected component, and rewrites the order so that the
    members sit below that representative, which inherits their relations
    to the rest. The rewritten order is acyclic.
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(indices)
    graph.add_edges_from(leq)

    rep: Dict[int, int] = {}
    for component in nx.strongly_connected_components(graph):
        if len(component) > 1:
            least = min(component)
            rep.update((g, least) for g in component)

    order: Set[Tuple[int, int]] = set()
    for x, y in graph.edges:
        rx, ry = rep.get(x, x), rep.get(y, y)
        if x in rep and y in rep and rx == ry:
            continue
        order.add((x, y))
        order.add((rx, ry))
    order.update((g, r) for g, r in rep.items() if g != r)
    return rep, order


def _union(conditions: Sequence[PCondition]) -> BoolPresentation:
    """
    All relations of the conditions together. A disjointness pair whose
    members the joint order makes comparable only says that the smaller one
    is zero; it is dropped when the other relations force that already.
    Points on a cycle of the joint order are equal, so the cycle is kept
    only when the other relations force them to zero.
    """
    indices = sorted(set(itertools.chain.from_iterable(c.indices for c in conditions)))
    rep, leq = _contract_cycles(
        indices,
        itertools.chain.from_iterable(c.presentation.leq for c in conditions),
    )
    order = BoolPresentation.build(indices, leq)

    dis: Set[FrozenSet[int]] = set()
    for pair in itertools.chain.from_iterable(c.presentation.dis for c in conditions):
        x, y = sorted(pair)
        dis.add(pair)
        rx, ry = rep.get(x, x), rep.get(y, y)
        if rx != ry:
            dis.add(frozenset((rx, ry)))

    lower: Dict[FrozenSet[int], int] = {}
    for pair in dis:
        x, y = sorted(pair)
        if order.is_leq(x, y):
            lower[pair] = x
        elif order.is_leq(y, x):
            lower[pair] = y

    union = order.with_relations(dis=dis - set(lower))
    for pair, g in sorted(lower.items(), key=lambda item: sorted(item[0])):
        if generator_nonzero(union, g):
            raise InvalidPresentation(
                "d({}, {}) makes {} zero, which nothing else forces".format(
                    *sorted(pair), g
                )
            )
    for r in sorted(set(rep.values())):
        if generator_nonzero(union, r):
            members = sorted(g for g, least in rep.items() if least == r)
            raise InvalidPresentation(
                "The joint order has a cycle through {} and nothing makes "
                "it zero".format(members)
            )
    return union


def compatible(p: PCondition, q: PCondition) -> Optional[PCondition]:
    """
    The amalgam of p and q presented by the union of their relations, or
    None when they disagree on w_p & w_q.
    """
    shared = p.w & q.w
    if p.project(shared) != q.project(shared):
        return None

    try:
        amalgam = PCondition(_union([p, q]))
    except InvalidPresentation:
        return None

    if not (stronger(p, amalgam) and stronger(q, amalgam)):
        return None
    return amalgam


def brute_force_upper_bound(
    p: PCondition, q: PCondition
) -> Optional[FrozenSet[Pattern]]:
    """
    Exhaustive oracle for compatibility. Every upper bound of p and q has
    its Stone points inside the fibre product of their point sets, so an
    upper bound exists iff the fibre product itself projects onto both.
    Returns the fibre product or None.
    """
    indices = sorted(p.w | q.w)
    fibre = []
    for bits in itertools.product((0, 1), repeat=len(indices)):
        point = frozenset(g for g, bit in zip(indices, bits) if bit)
        if point & p.w in p.points and point & q.w in q.points:
            fibre.append(point)

    fibre_set = frozenset(fibre)
    projected_p = frozenset(point & p.w for point in fibre_set)
    projected_q = frozenset(point & q.w for point in fibre_set)
    if projected_p == p.points and projected_q == q.points:
        return fibre_set
    return None


def delta_system(
    family: Sequence[PCondition], k: int
) -> Optional[Tuple[Tuple[PCondition, ...], FrozenSet[int]]]:
    """
    Searches k conditions whose index sets pairwise meet in one common root,
    taking the first such subfamily in family order.
    """
    if k <= 0:
        return (), frozenset()
    sets = [c.w for c in family]

    def search(
        start: int, chosen: List[int], root: Optional[FrozenSet[int]]
    ) -> Optional[Tuple[List[int], FrozenSet[int]]]:
        if len(chosen) == k:
            assert root is not None
            return chosen, root
        for index in range(start, len(sets)):
            candidate = sets[index]
            if not chosen:
                found = search(index + 1, [index], None if k > 1 else candidate)
            else:
                new_root = root if root is not None else sets[chosen[0]] & candidate
                if any(sets[i] & candidate != new_root for i in chosen):
                    continue
                found = search(index + 1, chosen + [index], new_root)
            if found is not None:
                return found
        return None

    result = search(0, [], None)
    if result is None:
        return None
    chosen, root = result
    return tuple(family[i] for i in chosen), root


def _initial_segment(w: FrozenSet[int], root: FrozenSet[int]) -> bool:
    if not root:
        return True
    bound = max(root)
    return all(x in root for x in w if x <= bound)


def color_compat(p: PCondition, q: PCondition) -> bool:
    """
    Same type, and the common indices form an initial segment of both index
    sets, so that the isomorphism of types fixes the root.
    """
    if type_code(p) != type_code(q):
        return False
    root = p.w & q.w
    return _initial_segment(p.w, root) and _initial_segment(q.w, root)


def _check_upper_bound(bound: PCondition, inputs: Sequence[PCondition], what: str):
    for index, c in enumerate(inputs):
        if not stronger(c, bound):
            raise PreconditionViolation(
                "The union of the {} is not stronger than member {}".format(what, index)
            )


def directed_close(family: Sequence[PCondition]) -> PCondition:
    """The union of a pairwise compatible family, stronger than every member."""
    family = list(family)
    if not family:
        raise PreconditionViolation("Cannot close an empty family")

    for (i, p), (j, q) in itertools.combinations(enumerate(family), 2):
        if compatible(p, q) is None:
            raise PreconditionViolation(
                "Members {} and {} have no common upper bound".format(i, j)
            )

    try:
        bound = PCondition(_union(family))
    except InvalidPresentation as e:
        raise PreconditionViolation("The family's union is inconsistent: {}".format(e))
    _check_upper_bound(bound, family, "family")
    return bound


def _check_increasing(sequence: Sequence[PCondition], name: str) -> None:
    for step in range(1, len(sequence)):
        if not stronger(sequence[step - 1], sequence[step]):
            raise PreconditionViolation(
                "Sequence {} is not increasing at step {}".format(name, step)
            )


def parallel_close(
    seq_p: Sequence[PCondition], seq_q: Sequence[PCondition]
) -> PCondition:
    """A common upper bound of two pointwise compatible increasing sequences."""
    if len(seq_p) != len(seq_q):
        raise PreconditionViolation(
            "Sequences have lengths {} and {}".format(len(seq_p), len(seq_q))
        )
    if not seq_p:
        raise PreconditionViolation("Cannot close empty sequences")

    _check_increasing(seq_p, "p")
    _check_increasing(seq_q, "q")
    for step, (p, q) in enumerate(zip(seq_p, seq_q)):
        if compatible(p, q) is None:
            raise PreconditionViolation(
                "The sequences are incompatible at step {}".format(step)
            )

    inputs = list(seq_p) + list(seq_q)
    try:
        bound = PCondition(_union(inputs))
    except InvalidPresentation as e:
        raise PreconditionViolation(
            "The sequences' union is inconsistent: {}".format(e)
        )
    _check_upper_bound(bound, inputs, "sequences")
    return bound


def limit_algebra(system: Mapping[FrozenSet[int], PCondition]) -> BoolPresentation:
    """
    The direct limit of a coherent system F -> p_F, presented by the union
    of the relations with every relation dropped that the system does not
    need.
    """
    system = {frozenset(F): p for F, p in system.items()}
    if not system:
        raise PreconditionViolation("The system is empty")

    for F, p in system.items():
        if p.w != F:
            raise PreconditionViolation(
                "Condition at {} has index set {}".format(sorted(F), sorted(p.w))
            )
    for (F, p), (G, q) in itertools.permutations(system.items(), 2):
        if F <= G and not stronger(p, q):
            raise PreconditionViolation(
                "Condition at {} is not below the one at {}".format(
                    sorted(F), sorted(G)
                )
            )

    conditions = [system[F] for F in sorted(system, key=lambda F: (len(F), sorted(F)))]
    try:
        union = _union(conditions)
    except InvalidPresentation as e:
        raise PreconditionViolation("The system's union is inconsistent: {}".format(e))

    def is_bound(candidate: BoolPresentation) -> bool:
        bound = PCondition(candidate)
        return all(stronger(p, bound) for p in conditions)

    if not is_bound(union):
        raise PreconditionViolation("The union is not stronger than every condition")

    leq = sorted(union.leq)
    dis = sorted(tuple(sorted(pair)) for pair in union.dis)
    for pair in list(leq):
        candidate = BoolPresentation.build(union.generators, set(leq) - {pair}, dis)
        if is_bound(candidate):
            leq.remove(pair)
    for dis_pair in list(dis):
        candidate = BoolPresentation.build(
            union.generators, leq, [d for d in dis if d != dis_pair]
        )
        if is_bound(candidate):
            dis.remove(dis_pair)

    limit = BoolPresentation.build(union.generators, leq, dis)
    logger.info(
        "Limit over {} conditions keeps {} of {} relations".format(
            len(conditions),
            len(leq) + len(dis),
            len(union.leq) + len(union.dis),
        )
    )
    return limit


def dense_witness(
    system: Mapping[FrozenSet[int], PCondition], i: int
) -> Optional[FrozenSet[int]]:
    """The least F in the system with i in F, by size and then elements."""
    found = [frozenset(F) for F in system if i in F]
    if not found:
        return None
    return min(found, key=lambda F: (len(F), sorted(F)))


def split_extensions(
    base: Sequence[PCondition], fresh: Sequence[int]
) -> Tuple[PCondition, PCondition]:
    """
    Extends the amalgam of the base conditions twice: once making the fresh
    indices an increasing chain in the given order, once making them
    pairwise disjoint. The sum of their characteristic functions has norm
    k + 1 in the first extension and 1 in the second.
    """
    base = list(base)
    fresh = list(fresh)

    for a in fresh:
        owners = [i for i, c in enumerate(base) if a in c.w]
        if len(owners) != 1:
            raise PreconditionViolation(
                "Fresh index {} belongs to {} base conditions".format(a, len(owners))
            )
        owner = base[owners[0]]
        others = frozenset().union(
            *(c.w for i, c in enumerate(base) if i != owners[0])
        )
        related = {y for x, y in owner.presentation.leq if x == a}
        related |= {x for x, y in owner.presentation.leq if y == a}
        related |= set(owner.presentation.dis_neighbours[a])
        entangled = sorted(related & others)
        if entangled:
            raise PreconditionViolation(
                "Fresh index {} is related to indices {} of other conditions".format(
                    a, entangled
                )
            )

    amalgam = directed_close(base).presentation
    chain = PCondition(amalgam.with_relations(leq=zip(fresh, fresh[1:])))
    antichain = PCondition(
        amalgam.with_relations(dis=itertools.combinations(fresh, 2))
    )

    for c in base:
        if not (stronger(c, chain) and stronger(c, antichain)):
            raise PreconditionViolation("A split extension does not extend the base")

    indicator = SimpleFunction.indicator_sum(fresh)
    norms = (
        norm_simple(chain.presentation, indicator),
        norm_simple(antichain.presentation, indicator),
    )
    expected = (len(fresh), min(len(fresh), 1))
    if norms != expected:
        raise PreconditionViolation(
            "Split norms are {} and {}, expected {} and {}; a fresh index is "
            "zero in the base".format(norms[0], norms[1], expected[0], expected[1])
        )

    logger.debug("Split {} fresh indices: norms {} and {}".format(len(fresh), *norms))
    return chain, antichain


def split_norms(
    chain: PCondition, antichain: PCondition, fresh: Sequence[int]
) -> Dict[str, object]:
    indicator = SimpleFunction.indicator_sum(fresh)
    return {
        "chain": norm_simple(chain.presentation, indicator),
        "antichain": norm_simple(antichain.presentation, indicator),
    }
