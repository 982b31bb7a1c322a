"""Cut-and-project schemes: a physical group, an internal group, a lattice.

A scheme couples the physical group G (the integers, or the real line) with
an internal group H through a lattice L in G x H that projects injectively
to G and with dense image to H.  Two concrete families are supported:

* G = Z with a compact internal group (cyclic product or 1-torus); the
  lattice is the graph {(n, star(n))} of a homomorphism determined by the
  star image of 1.
* G = R with a 1-dimensional euclidean internal group; the lattice is
  spanned by two basis rows (g_i, h_i), as in Fibonacci-type schemes.

Density of the star image and injectivity of the physical projection are
validated at construction, exactly for cyclic products and by a small-
denominator rationality heuristic for the continuum cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Optional, Tuple, Union

from .errors import BudgetError
from .groups import (
    CYCLIC,
    EUCLIDEAN,
    TORUS,
    GroupElement,
    InternalGroup,
)

DEFAULT_MAX_POINTS = 5_000_000

PHYSICAL_Z = "Z"
PHYSICAL_R = "R"


@dataclass(frozen=True)
class Region:
    """Half-open interval [lo, hi) of physical coordinates."""

    lo: Union[int, float]
    hi: Union[int, float]

    def __post_init__(self):
        if self.hi < self.lo:
            raise ValueError("region upper bound below lower bound")

    @property
    def length(self):
        return self.hi - self.lo

    def contains(self, g) -> bool:
        return self.lo <= g < self.hi


class LatticePoint(NamedTuple):
    g: Union[int, float]
    h: GroupElement
    coeffs: Union[int, Tuple[int, int]]


@dataclass(frozen=True)
class Scheme:
    physical: str
    internal: InternalGroup
    star_gen: Optional[GroupElement] = None
    basis: Optional[Tuple[Tuple[float, float], Tuple[float, float]]] = None
    dens_l: Union[Fraction, float] = Fraction(1)

    def star(self, n: int) -> GroupElement:
        """Internal coordinate of the lattice point over n (G = Z only)."""
        if self.physical != PHYSICAL_Z:
            raise ValueError("star(n) indexes integer-physical lattices only")
        return self.internal.scale(n, self.star_gen)

    def lattice_point(self, m: int, n: int) -> "LatticePoint":
        """The lattice point m*r1 + n*r2 (G = R only)."""
        if self.physical != PHYSICAL_R:
            raise ValueError("coefficient pairs index real-physical lattices only")
        (a1, b1), (a2, b2) = self.basis
        return LatticePoint(m * a1 + n * a2, (m * b1 + n * b2,), (m, n))

    def describe(self) -> dict:
        d = {"physical": self.physical, "internal": self.internal.describe()}
        if self.star_gen is not None:
            d["star_generator"] = list(self.star_gen)
        if self.basis is not None:
            d["basis"] = [list(r) for r in self.basis]
        d["dens_l"] = float(self.dens_l)
        return d


def build_scheme(
    physical: str,
    internal: InternalGroup,
    star_generator=None,
    basis=None,
) -> Scheme:
    """Construct and validate a scheme.

    For G = Z the star generator must generate a dense subgroup of the
    internal group: exact coverage for cyclic products, and rejection of
    small-denominator rational slopes for the 1-torus.  For G = R the basis
    must be nondegenerate with irrational-looking projections on both sides,
    otherwise the physical projection fails to be 1-1 or the internal image
    fails to be dense.
    """
    if physical == PHYSICAL_Z:
        if basis is not None:
            raise ValueError("integer-physical schemes take a star generator, not a basis")
        if internal.kind == CYCLIC:
            gen = internal.canonical(star_generator)
            if internal.element_order(gen) != internal.order:
                raise ValueError(
                    "star image is not dense: generator "
                    f"{gen} spans a proper subgroup of order {internal.element_order(gen)}"
                )
        elif internal.kind == TORUS and internal.dim == 1:
            gen = internal.canonical(star_generator)
            if _near_rational(gen[0]):
                raise ValueError(
                    f"star slope {gen[0]} is rational with small denominator; "
                    "the lattice image would not be dense in the torus"
                )
        else:
            raise ValueError("integer-physical schemes support cyclic-product or torus(1) internal groups")
        return Scheme(PHYSICAL_Z, internal, star_gen=gen, dens_l=Fraction(1))

    if physical == PHYSICAL_R:
        if internal.kind != EUCLIDEAN or internal.dim != 1:
            raise ValueError("real-physical schemes support euclidean(1) internal groups")
        if star_generator is not None:
            raise ValueError("real-physical schemes take a basis, not a star generator")
        (a1, b1), (a2, b2) = ((float(x), float(y)) for x, y in basis)
        det = a1 * b2 - a2 * b1
        if abs(det) <= 1e-9:
            raise ValueError("degenerate lattice basis: determinant is zero")
        if abs(a1) <= 1e-12 or abs(a2) <= 1e-12 or _near_rational(a1 / a2):
            raise ValueError("physical projection is not 1-1 on this basis")
        if abs(b1) <= 1e-12 or abs(b2) <= 1e-12 or _near_rational(b1 / b2):
            raise ValueError("internal projection of the lattice is not dense")
        return Scheme(
            PHYSICAL_R,
            internal,
            basis=((a1, b1), (a2, b2)),
            dens_l=1.0 / abs(det),
        )

    raise ValueError(f"unknown physical group {physical!r}; expected 'Z' or 'R'")


def _near_rational(x: float, max_den: int = 1000, tol: float = 1e-12) -> bool:
    # desk-scale density check: a slope indistinguishable from p/q with small q
    # produces a visibly non-dense orbit at every region size we enumerate
    approx = Fraction(x).limit_denominator(max_den)
    return abs(x - float(approx)) < tol


def lattice_points_in(
    scheme: Scheme,
    region: Region,
    h_slab: Optional[Tuple[float, float]] = None,
    max_points: int = DEFAULT_MAX_POINTS,
) -> List[LatticePoint]:
    """Lattice points with physical coordinate in `region`, sorted by it.

    For compact internal groups the set is finite as stated.  For a
    euclidean internal group the full preimage of `region` is an infinite
    strip, so points are clipped to the half-open internal slab `h_slab`,
    defaulting to the unit interval [0, 1); with that default the count per
    unit physical length converges to dens(L).
    """
    if scheme.physical == PHYSICAL_Z:
        if h_slab is not None:
            raise ValueError("internal slab applies to euclidean internal groups only")
        lo, hi = int(region.lo), int(region.hi)
        if (lo, hi) != (region.lo, region.hi):
            raise ValueError("integer-physical regions need integer endpoints")
        if hi - lo > max_points:
            raise BudgetError(
                f"region holds {hi - lo} lattice points, over the max_points budget {max_points}"
            )
        return [LatticePoint(n, scheme.star(n), n) for n in range(lo, hi)]

    slab = (0.0, 1.0) if h_slab is None else (float(h_slab[0]), float(h_slab[1]))
    return _euclidean_lattice_points(scheme, region, slab, max_points)


def _euclidean_lattice_points(scheme, region, slab, max_points):
    (a1, b1), (a2, b2) = scheme.basis
    glo, ghi = float(region.lo), float(region.hi)
    hlo, hhi = slab
    if hhi < hlo:
        raise ValueError("internal slab upper bound below lower bound")

    # invert (g, h) = (a1 m + a2 n, b1 m + b2 n) at the box corners to bound n
    det = a1 * b2 - a2 * b1
    corners = [(g, h) for g in (glo, ghi) for h in (hlo, hhi)]
    ns = [(-b1 * g + a1 * h) / det for g, h in corners]
    n_min, n_max = math.floor(min(ns)) - 2, math.ceil(max(ns)) + 2

    per_n = (hhi - hlo) / abs(b1) + 3
    if (n_max - n_min + 1) * per_n > max_points:
        raise BudgetError(
            "euclidean lattice enumeration would exceed the max_points budget "
            f"{max_points}; shrink the region or slab"
        )

    out = []
    for n in range(n_min, n_max + 1):
        # the slab pins m through b1 m + b2 n in [hlo, hhi); pad and filter
        lo_m = (hlo - b2 * n) / b1
        hi_m = (hhi - b2 * n) / b1
        if lo_m > hi_m:
            lo_m, hi_m = hi_m, lo_m
        for m in range(math.floor(lo_m) - 1, math.ceil(hi_m) + 2):
            g = m * a1 + n * a2
            h = m * b1 + n * b2
            if glo <= g < ghi and hlo <= h < hhi:
                out.append(LatticePoint(g, (h,), (m, n)))
    out.sort(key=lambda p: p.g)
    if len(out) > max_points:
        raise BudgetError(f"lattice enumeration produced more than max_points={max_points} points")
    return out


def lattice_density(scheme: Scheme, spans) -> List[Tuple[int, float]]:
    """Empirical lattice density |L cap ([-T, T) x slab)| / 2T for each span T."""
    rows = []
    for t in spans:
        region = Region(-t, t) if scheme.physical == PHYSICAL_R else Region(-int(t), int(t))
        slab = (0.0, 1.0) if scheme.physical == PHYSICAL_R else None
        count = len(lattice_points_in(scheme, region, h_slab=slab))
        value = Fraction(count, 2 * int(t)) if scheme.physical == PHYSICAL_Z else count / (2.0 * t)
        rows.append((t, value))
    return rows


def van_hove(scheme: Scheme, n: int) -> Region:
    """The fixed van Hove sequence: [0, n) for G = Z, [-n, n) for G = R."""
    if scheme.physical == PHYSICAL_Z:
        return Region(0, int(n))
    return Region(-float(n), float(n))
