from fractions import Fraction
import itertools
import random
from typing import List, Optional, Sequence, Tuple

import networkx as nx
from hypothesis import strategies as st

from morasskit.balg import BoolPresentation, SimpleFunction
from morasskit.plam import PCondition


def consistent(
    generators: Sequence[int],
    leq: Sequence[Tuple[int, int]],
    dis: Sequence[Tuple[int, int]],
) -> BoolPresentation:
    """Drops the disjointness pairs that the order closure contradicts."""
    order = BoolPresentation.build(generators, acyclic(generators, leq))
    kept = [
        (x, y)
        for x, y in dis
        if x != y and not order.is_leq(x, y) and not order.is_leq(y, x)
    ]
    return order.with_relations(dis=kept)


def acyclic(
    generators: Sequence[int], leq: Sequence[Tuple[int, int]]
) -> List[Tuple[int, int]]:
    """Keeps the order pairs, in either direction, that close no cycle."""
    graph = nx.DiGraph()
    graph.add_nodes_from(generators)
    kept = []
    for x, y in leq:
        if x == y or nx.has_path(graph, y, x):
            continue
        graph.add_edge(x, y)
        kept.append((x, y))
    return kept


@st.composite
def presentations(
    draw, max_generators: int = 8, offset: int = 0, either_way: bool = False
) -> BoolPresentation:
    n = draw(st.integers(min_value=1, max_value=max_generators))
    generators = list(range(offset, offset + n))
    if either_way:
        order_pairs = list(itertools.permutations(generators, 2))
    else:
        order_pairs = list(itertools.combinations(generators, 2))
    pairs = list(itertools.combinations(generators, 2))
    leq = draw(st.lists(st.sampled_from(order_pairs), max_size=n)) if pairs else []
    dis = draw(st.lists(st.sampled_from(pairs), max_size=n)) if pairs else []
    return consistent(generators, leq, dis)


@st.composite
def conditions(draw, universe: int = 7, max_size: int = 5) -> PCondition:
    """Conditions over a random part of range(universe), ordered either way."""
    w = draw(
        st.lists(
            st.integers(min_value=0, max_value=universe - 1),
            min_size=1,
            max_size=max_size,
            unique=True,
        )
    )
    order_pairs = list(itertools.permutations(w, 2))
    pairs = list(itertools.combinations(w, 2))
    leq = draw(st.lists(st.sampled_from(order_pairs), max_size=len(w))) if pairs else []
    dis = draw(st.lists(st.sampled_from(pairs), max_size=len(w))) if pairs else []
    return PCondition(consistent(w, leq, dis))


@st.composite
def simple_functions(draw, generators: Sequence[int]) -> SimpleFunction:
    coefficients = st.fractions(
        min_value=-5, max_value=5, max_denominator=6
    ).filter(lambda c: c != 0)
    chosen = draw(st.lists(st.sampled_from(list(generators)), min_size=1, max_size=6))
    return SimpleFunction(tuple((draw(coefficients), g) for g in chosen))


def random_presentation(
    rng: random.Random,
    generators: Sequence[int],
    density: float = 0.25,
    either_way: bool = False,
) -> BoolPresentation:
    pairs = list(itertools.combinations(sorted(generators), 2))
    leq = [pair for pair in pairs if rng.random() < density / 2]
    if either_way:
        leq = [(y, x) if rng.random() < 0.5 else (x, y) for x, y in leq]
    dis = [pair for pair in pairs if rng.random() < density / 2]
    return consistent(generators, leq, dis)


def random_condition(
    rng: random.Random,
    universe: int,
    size: int,
    density: float = 0.3,
    either_way: bool = False,
) -> PCondition:
    w = rng.sample(range(universe), size)
    return PCondition(random_presentation(rng, w, density, either_way))


def random_function(
    rng: random.Random, generators: Sequence[int], terms: Optional[int] = None
) -> SimpleFunction:
    chosen: List[int] = [
        rng.choice(list(generators)) for _ in range(terms or len(generators))
    ]
    return SimpleFunction(
        tuple(
            (Fraction(rng.randint(-9, 9), rng.randint(1, 6)), g) for g in chosen
        )
    )
