"""Internal groups for cut-and-project schemes.

Three kinds of locally compact abelian group appear as internal spaces here:

* ``cyclic-product``: a finite product of cyclic groups Z/b_1 x ... x Z/b_k,
  carrying normalized counting measure.  Element arithmetic is exact.
* ``torus``: the d-dimensional torus (R/Z)^d with normalized Lebesgue
  measure; coordinates are floats canonicalized into [0, 1).
* ``euclidean``: R^d with (unnormalized) Lebesgue measure.

Elements are plain tuples, ints for cyclic products and floats otherwise.
Groups validate every element they are handed, so mixing elements between
groups of different kinds or sizes fails loudly instead of corrupting data.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Tuple

from .errors import RefusalError

GroupElement = Tuple
FLOAT_TOL = 1e-9

CYCLIC = "cyclic-product"
TORUS = "torus"
EUCLIDEAN = "euclidean"


@dataclass(frozen=True)
class InternalGroup:
    """An internal space: cyclic product, torus, or euclidean factor.

    Instances are immutable and hashable; construct them through
    :func:`cyclic_product`, :func:`torus`, or :func:`euclidean`.
    """

    kind: str
    moduli: Tuple[int, ...] = ()
    dim: int = 0

    def __post_init__(self):
        if self.kind == CYCLIC:
            if any((not isinstance(b, int)) or b < 2 for b in self.moduli):
                raise ValueError("cyclic-product moduli must be integers >= 2")
            if self.dim != len(self.moduli):
                object.__setattr__(self, "dim", len(self.moduli))
        elif self.kind in (TORUS, EUCLIDEAN):
            if self.moduli:
                raise ValueError(f"{self.kind} groups take no moduli")
            if self.dim < 1:
                raise ValueError(f"{self.kind} dimension must be >= 1")
        else:
            raise ValueError(f"unknown internal group kind: {self.kind!r}")

    # -- basic facts ---------------------------------------------------

    @property
    def tolerance(self) -> float:
        """Comparison tolerance: exact for cyclic products, 1e-9 otherwise."""
        return 0.0 if self.kind == CYCLIC else FLOAT_TOL

    @property
    def order(self) -> Optional[int]:
        """Number of elements, or None for continuum groups."""
        if self.kind == CYCLIC:
            return math.prod(self.moduli)
        return None

    @property
    def is_compact(self) -> bool:
        return self.kind in (CYCLIC, TORUS)

    def describe(self) -> dict:
        if self.kind == CYCLIC:
            return {"kind": self.kind, "moduli": list(self.moduli)}
        return {"kind": self.kind, "dim": self.dim}

    # -- element handling ----------------------------------------------

    def validate(self, h: GroupElement) -> None:
        if not isinstance(h, tuple) or len(h) != self.dim:
            raise ValueError(
                f"element {h!r} does not belong to {self.kind} group of dim {self.dim}"
            )
        if self.kind == CYCLIC:
            for x, b in zip(h, self.moduli):
                if not isinstance(x, int) or not (0 <= x < b):
                    raise ValueError(f"residue {x!r} is not canonical modulo {b}")
        else:
            for x in h:
                if not isinstance(x, (int, float)) or isinstance(x, bool):
                    raise ValueError(f"coordinate {x!r} is not a real number")
            if self.kind == TORUS and any(not (0.0 <= x < 1.0) for x in h):
                raise ValueError(f"torus element {h!r} is not canonical in [0,1)")

    def canonical(self, h: Iterable) -> GroupElement:
        """Reduce raw coordinates to the canonical representative."""
        h = tuple(h)
        if len(h) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(h)}")
        if self.kind == CYCLIC:
            return tuple(int(x) % b for x, b in zip(h, self.moduli))
        if self.kind == TORUS:
            return tuple(_wrap_unit(float(x)) for x in h)
        return tuple(float(x) for x in h)

    def zero(self) -> GroupElement:
        if self.kind == CYCLIC:
            return (0,) * self.dim
        return (0.0,) * self.dim

    def add(self, a: GroupElement, b: GroupElement) -> GroupElement:
        self.validate(a)
        self.validate(b)
        if self.kind == CYCLIC:
            return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))
        if self.kind == TORUS:
            return tuple(_wrap_unit(x + y) for x, y in zip(a, b))
        return tuple(x + y for x, y in zip(a, b))

    def neg(self, a: GroupElement) -> GroupElement:
        self.validate(a)
        if self.kind == CYCLIC:
            return tuple((-x) % m for x, m in zip(a, self.moduli))
        if self.kind == TORUS:
            return tuple(_wrap_unit(-x) for x in a)
        return tuple(-x for x in a)

    def sub(self, a: GroupElement, b: GroupElement) -> GroupElement:
        return self.add(a, self.neg(b))

    def scale(self, n: int, a: GroupElement) -> GroupElement:
        """n-fold sum of a (n may be negative)."""
        self.validate(a)
        if self.kind == CYCLIC:
            return tuple((n * x) % m for x, m in zip(a, self.moduli))
        if self.kind == TORUS:
            return tuple(_wrap_unit(n * x) for x in a)
        return tuple(n * x for x in a)

    def eq(self, a: GroupElement, b: GroupElement) -> bool:
        self.validate(a)
        self.validate(b)
        if self.kind == CYCLIC:
            return a == b
        if self.kind == TORUS:
            return all(_circle_dist(x, y) <= FLOAT_TOL for x, y in zip(a, b))
        return all(abs(x - y) <= FLOAT_TOL for x, y in zip(a, b))

    def elements(self) -> Iterator[GroupElement]:
        """Enumerate all elements in lexicographic order (cyclic products only)."""
        if self.kind != CYCLIC:
            raise RefusalError("only cyclic-product groups are enumerable")
        return itertools.product(*(range(b) for b in self.moduli))

    def element_order(self, a: GroupElement) -> int:
        """Order of a in a cyclic-product group."""
        if self.kind != CYCLIC:
            raise RefusalError("element orders are computed for cyclic products only")
        self.validate(a)
        return math.lcm(*(b // math.gcd(x, b) for x, b in zip(a, self.moduli))) if a else 1


def cyclic_product(moduli: Iterable[int]) -> InternalGroup:
    """Finite product of cyclic groups; an empty list gives the trivial group."""
    return InternalGroup(CYCLIC, tuple(int(b) for b in moduli))


def torus(dim: int = 1) -> InternalGroup:
    return InternalGroup(TORUS, (), dim)


def euclidean(dim: int = 1) -> InternalGroup:
    return InternalGroup(EUCLIDEAN, (), dim)


def sample_haar(group: InternalGroup, count: int, seed: int) -> list:
    """Draw `count` Haar-distributed elements, deterministically from `seed`.

    Defined for the compact kinds only; a euclidean factor has no normalized
    Haar measure to sample from.
    """
    if group.kind == EUCLIDEAN:
        raise RefusalError("euclidean groups carry no normalized Haar measure")
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        if group.kind == CYCLIC:
            out.append(tuple(rng.randrange(b) for b in group.moduli))
        else:
            out.append(tuple(rng.random() for _ in range(group.dim)))
    return out


def _wrap_unit(x: float) -> float:
    y = x % 1.0
    # values within tolerance of the seam collapse to 0.0 so that canonical
    # representatives of equal torus elements compare equal
    if y >= 1.0 - FLOAT_TOL or y <= FLOAT_TOL:
        return 0.0
    return y


def _circle_dist(x: float, y: float) -> float:
    d = abs(x - y) % 1.0
    return min(d, 1.0 - d)


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of an internal group.

    `members` is a frozenset of canonical elements for the finitely many
    subgroups this package manipulates (period groups, quotient kernels), or
    None as the marker for the full group when that is not finite, e.g. the
    Haar period group of a null window on the torus.
    """

    group: InternalGroup
    members: Optional[frozenset] = None

    @classmethod
    def trivial(cls, group: InternalGroup) -> "Subgroup":
        return cls(group, frozenset([group.zero()]))

    @classmethod
    def full(cls, group: InternalGroup) -> "Subgroup":
        if group.kind == CYCLIC:
            return cls(group, frozenset(group.elements()))
        return cls(group, None)

    @classmethod
    def from_elements(cls, group: InternalGroup, elems, verify: bool = True) -> "Subgroup":
        members = frozenset(group.canonical(e) for e in elems)
        sub = cls(group, members)
        if verify:
            if not any(group.eq(e, group.zero()) for e in members):
                raise ValueError("subgroup must contain the identity")
            for a in members:
                for b in members:
                    if not sub.contains(group.add(a, b)):
                        raise ValueError(f"set is not closed under addition at {a} + {b}")
        return sub

    @classmethod
    def generated(cls, group: InternalGroup, generators) -> "Subgroup":
        """Closure of `generators` under the group operation (finite closures only)."""
        members = [group.zero()]
        frontier = [group.canonical(g) for g in generators]
        while frontier:
            g = frontier.pop()
            if any(group.eq(g, m) for m in members):
                continue
            members.append(g)
            frontier.extend(group.add(g, m) for m in list(members))
            if len(members) > 1_000_000:
                raise RefusalError("subgroup closure exceeds enumeration budget")
        return cls(group, frozenset(members))

    @property
    def is_full_marker(self) -> bool:
        return self.members is None

    def is_full(self) -> bool:
        if self.members is None:
            return True
        order = self.group.order
        return order is not None and len(self.members) == order

    def is_trivial(self) -> bool:
        return self.members is not None and len(self.members) == 1

    @property
    def order(self) -> Optional[int]:
        if self.members is None:
            return self.group.order
        return len(self.members)

    def contains(self, h: GroupElement) -> bool:
        if self.members is None:
            self.group.validate(h)
            return True
        if self.group.kind == CYCLIC:
            return h in self.members
        return any(self.group.eq(h, m) for m in self.members)

    def elements(self) -> tuple:
        """Members in sorted order; refuses on the full-group marker."""
        if self.members is None:
            raise RefusalError("cannot enumerate a continuum subgroup")
        return tuple(sorted(self.members))

    def same(self, other: "Subgroup") -> bool:
        """Set equality, tolerance-aware for float coordinates."""
        if self.group != other.group:
            return False
        if self.members is None or other.members is None:
            return self.is_full() and other.is_full()
        if self.group.kind == CYCLIC:
            return self.members == other.members
        if len(self.members) != len(other.members):
            return False
        return all(other.contains(m) for m in self.members)

    def describe(self) -> dict:
        if self.members is None:
            return {"full_group": True}
        return {"full_group": self.is_full(), "elements": [list(e) for e in self.elements()]}
