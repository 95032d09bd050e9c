"""
Cohen conditions (finite partial functions from the naturals to {0, 1}),
the stage bits they decide, the density argument behind the stage
dichotomy and its pigeonhole guessing surrogate.
"""
import logging
import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import (
    Callable,
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from morasskit.errors import MorassKitError

logger = logging.getLogger(__name__)

NormOracle = Callable[[int, Sequence[int]], Fraction]


class NoData(MorassKitError):
    pass


class ConditionOutsideUniverse(MorassKitError):
    pass


@dataclass(frozen=True)
class CohenCondition:
    """A finite partial function, stored as increasing (n, bit) pairs."""

    values: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        merged: Dict[int, int] = {}
        for n, bit in self.values:
            n, bit = int(n), int(bit)
            if n < 0 or bit not in (0, 1):
                raise ValueError("Invalid condition entry {}:{}".format(n, bit))
            if merged.setdefault(n, bit) != bit:
                raise ValueError("Condition assigns {} two values".format(n))
        object.__setattr__(self, "values", tuple(sorted(merged.items())))

    @classmethod
    def from_dict(cls, mapping: Mapping[int, int]) -> "CohenCondition":
        return cls(tuple(mapping.items()))

    @classmethod
    def parse(cls, text: str) -> "CohenCondition":
        """Parses ``0:1,3:0``; an empty string or ``-`` is the empty condition."""
        text = text.strip()
        if text in ("", "-"):
            return cls()
        entries = []
        for item in text.split(","):
            try:
                n, bit = item.split(":")
                entries.append((int(n), int(bit)))
            except ValueError:
                raise ValueError("Invalid condition entry '{}'".format(item.strip()))
        return cls(tuple(entries))

    def format(self) -> str:
        if not self.values:
            return "-"
        return ",".join("{}:{}".format(n, bit) for n, bit in self.values)

    def as_dict(self) -> Dict[int, int]:
        return dict(self.values)

    @property
    def domain(self) -> Tuple[int, ...]:
        return tuple(n for n, _ in self.values)

    def get(self, n: int) -> Optional[int]:
        return self.as_dict().get(n)

    def __len__(self) -> int:
        return len(self.values)

    def with_value(self, n: int, bit: int) -> "CohenCondition":
        return CohenCondition(self.values + ((n, bit),))

    def sort_key(self) -> Tuple[int, Tuple[Tuple[int, int], ...]]:
        return (len(self.values), self.values)


def extends(p: CohenCondition, q: CohenCondition) -> bool:
    """True iff q extends p, i.e. q contains p as a function."""
    q_values = q.as_dict()
    return all(q_values.get(n) == bit for n, bit in p.values)


def compatible(p: CohenCondition, q: CohenCondition) -> Optional[CohenCondition]:
    """The union of p and q, or None when they disagree somewhere."""
    p_values = p.as_dict()
    for n, bit in q.values:
        if p_values.get(n, bit) != bit:
            return None
    return CohenCondition(p.values + q.values)


@dataclass(frozen=True)
class BitStream:
    """A finite prefix of the generic real, optionally drawn from a seed."""

    bits: Tuple[int, ...]
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("Bits must be 0 or 1")

    @classmethod
    def parse(cls, text: str) -> "BitStream":
        text = text.strip()
        if not set(text) <= {"0", "1"}:
            raise ValueError("Invalid bit string '{}'".format(text))
        return cls(tuple(int(ch) for ch in text))

    @classmethod
    def from_seed(cls, length: int, seed: int) -> "BitStream":
        rng = random.Random(seed)
        return cls(tuple(rng.randrange(2) for _ in range(length)), seed)

    def __len__(self) -> int:
        return len(self.bits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.bits)

    def __getitem__(self, n: int) -> int:
        return self.bits[n]

    def condition(self) -> CohenCondition:
        """The stream as the condition r restricted to its length."""
        return CohenCondition(tuple(enumerate(self.bits)))

    def format(self) -> str:
        return "".join(str(b) for b in self.bits)


def decided_bit(n_star: int, norm: Fraction) -> int:
    """0 exactly when the norm is strictly below n* - 1."""
    return 0 if norm < n_star - 1 else 1


def density_check(
    p: CohenCondition,
    n_star: int,
    oracle: NormOracle,
    enumerations: Optional[Callable[[int], Sequence[int]]] = None,
) -> CohenCondition:
    """
    Extends p into the dense set of conditions deciding some n >= n*^2 with
    q(n) = 0 iff the norm of the sum over the first n*^2 + 1 points of the
    n-th enumeration is below n* - 1.

    p itself is returned when a coordinate of its domain already witnesses
    the biconditional; otherwise the least n >= n*^2 outside dom(p) is added.
    """
    if n_star < 1:
        raise ValueError("n_star must be positive, got {}".format(n_star))
    threshold = n_star ** 2
    take = threshold + 1

    def norm(n: int) -> Fraction:
        indices = tuple(enumerations(n)[:take]) if enumerations else ()
        return Fraction(oracle(n, indices))

    for n, bit in p.values:
        if n >= threshold and bit == decided_bit(n_star, norm(n)):
            logger.debug("Condition {} already witnesses n = {}".format(p.format(), n))
            return p

    domain = set(p.domain)
    n = threshold
    while n in domain:
        n += 1
    q = p.with_value(n, decided_bit(n_star, norm(n)))
    logger.debug("Extended {} to {}".format(p.format(), q.format()))
    return q


def witnesses_density(
    q: CohenCondition,
    n_star: int,
    oracle: NormOracle,
    enumerations: Optional[Callable[[int], Sequence[int]]] = None,
) -> bool:
    """True iff q is in the dense set checked by density_check."""
    take = n_star ** 2 + 1
    for n, bit in q.values:
        if n < n_star ** 2:
            continue
        indices = tuple(enumerations(n)[:take]) if enumerations else ()
        if bit == decided_bit(n_star, Fraction(oracle(n, indices))):
            return True
    return False


class FileOracle(object):
    """
    Reads ground-model norms from ``n value`` lines with rational values
    such as ``5/2``; blank lines and ``#`` comments are skipped.
    """

    def __init__(
        self, file_path: str, default: Union[None, int, str, Fraction] = None
    ):
        from morasskit.textio import load, parse_oracle

        self.file_path = file_path
        self.values: Dict[int, Fraction] = load(file_path, parse_oracle)
        self.default = Fraction(default) if default is not None else None

    def __call__(self, n: int, indices: Sequence[int] = ()) -> Fraction:
        if n in self.values:
            return self.values[n]
        if self.default is not None:
            return self.default
        raise NoData("{} has no norm for n = {}".format(self.file_path, n))


@dataclass(frozen=True)
class Guess:
    condition: CohenCondition
    indices: Tuple[int, ...]
    j0: Dict[int, int]
    bound: int


def pigeonhole_guess(
    decisions: Iterable[Tuple[int, CohenCondition, int]],
    universe: Optional[Sequence[CohenCondition]] = None,
) -> Guess:
    """
    Picks the condition deciding the most indices. Ties go to the condition
    that comes first in the universe, which defaults to the distinct
    conditions ordered by size and then by their entries.
    """
    decisions = list(decisions)
    if not decisions:
        raise NoData("No decisions to guess from")

    seen_indices = set()
    for index, _, value in decisions:
        if index in seen_indices:
            raise ValueError("Index {} is decided twice".format(index))
        seen_indices.add(index)

    counts = Counter(condition for _, condition, _ in decisions)
    if universe is None:
        universe = sorted(counts, key=CohenCondition.sort_key)
    else:
        outside = [c.format() for c in counts if c not in set(universe)]
        if outside:
            raise ConditionOutsideUniverse(
                "Conditions outside the universe: {}".format(outside[:5])
            )

    order = {condition: rank for rank, condition in enumerate(universe)}
    best = min(counts, key=lambda c: (-counts[c], order[c]))

    indices: List[int] = sorted(index for index, c, _ in decisions if c == best)
    j0 = {index: value for index, c, value in decisions if c == best}
    bound = math.ceil(len(decisions) / len(counts))
    logger.info(
        "Condition {} decides {} of {} indices (bound {})".format(
            best.format(), len(indices), len(decisions), bound
        )
    )
    return Guess(best, tuple(indices), j0, bound)
