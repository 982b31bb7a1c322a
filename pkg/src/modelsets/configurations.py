"""Point configurations cut from schemes by windows.

A configuration is the finite patch, over a bounded physical region, of the
point set {y_G : y in (x + L), y_H in W}: the lattice translated by a torus
parameter x, intersected with the strip carried by the window W, projected
to the physical group.  The "full" flavor keeps each point's internal
coordinate; the "projected" flavor is the bare physical support, which is
what any downstream consumer of the point set sees.
"""

from __future__ import annotations

import csv
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .errors import RefusalError
from .groups import CYCLIC, EUCLIDEAN, TORUS, GroupElement, InternalGroup, sample_haar
from .scheme import (
    DEFAULT_MAX_POINTS,
    PHYSICAL_R,
    PHYSICAL_Z,
    LatticePoint,
    Region,
    Scheme,
    lattice_points_in,
    van_hove,
)
from .window import (
    IntervalWindow,
    Window,
    as_finite,
    empty_window,
    finite_window,
    point_window,
)

FULL = "full"
PROJECTED = "projected"

_SLAB_PAD = 1e-6


@dataclass(frozen=True)
class TorusPoint:
    """A point of the torus (G x H)/L by a representative (g, h).

    For integer-physical schemes the canonical representative has g = 0,
    absorbing any integer part into the internal coordinate through the
    star map.
    """

    g: Union[int, float]
    h: GroupElement

    def describe(self) -> dict:
        return {"g": self.g, "h": list(self.h)}


def canonical_parameter(scheme: Scheme, x=None) -> TorusPoint:
    """Normalize a parameter (TorusPoint or (g, h) pair) for `scheme`."""
    if x is None:
        g0 = 0 if scheme.physical == PHYSICAL_Z else 0.0
        return TorusPoint(g0, scheme.internal.zero())
    if not isinstance(x, TorusPoint):
        x = TorusPoint(x[0], tuple(x[1]))
    h = scheme.internal.canonical(x.h)
    if scheme.physical == PHYSICAL_Z:
        g = int(x.g)
        if g != x.g:
            raise ValueError("integer-physical parameters need an integer g part")
        if g:
            h = scheme.internal.sub(h, scheme.star(g))
        return TorusPoint(0, h)
    return TorusPoint(float(x.g), h)


@dataclass(frozen=True)
class Configuration:
    scheme: Scheme
    region: Region
    flavor: str
    points: tuple  # full: ((g, h), ...) sorted by g; projected: (g, ...)

    @property
    def support(self) -> tuple:
        if self.flavor == FULL:
            return tuple(g for g, _ in self.points)
        return self.points

    @property
    def internal_coords(self) -> tuple:
        if self.flavor != FULL:
            raise RefusalError("projected configurations carry no internal coordinates")
        return tuple(h for _, h in self.points)

    def __len__(self) -> int:
        return len(self.points)

    def project(self) -> "Configuration":
        if self.flavor == PROJECTED:
            return self
        return Configuration(self.scheme, self.region, PROJECTED, self.support)


def generate(
    scheme: Scheme,
    window: Window,
    x=None,
    region: Region = None,
    flavor: str = PROJECTED,
    max_points: int = DEFAULT_MAX_POINTS,
) -> Configuration:
    """Materialize the patch of the configuration at parameter x over `region`."""
    if flavor not in (FULL, PROJECTED):
        raise ValueError(f"unknown flavor {flavor!r}")
    if region is None:
        raise ValueError("a region is required")
    x = canonical_parameter(scheme, x)

    pts = []
    if scheme.physical == PHYSICAL_Z:
        for lp in lattice_points_in(scheme, region, max_points=max_points):
            h = scheme.internal.add(x.h, lp.h)
            if window.contains(h):
                pts.append((lp.g, h))
    else:
        if window.is_empty():
            pts = []
        else:
            wlo, whi = window.bounds()
            slab = (wlo - x.h[0] - _SLAB_PAD, whi - x.h[0] + _SLAB_PAD)
            shifted = Region(region.lo - x.g, region.hi - x.g)
            for lp in lattice_points_in(scheme, shifted, h_slab=slab, max_points=max_points):
                h = (x.h[0] + lp.h[0],)
                if window.contains(h):
                    pts.append((x.g + lp.g, h))
            pts.sort(key=lambda p: p[0])

    if flavor == PROJECTED:
        return Configuration(scheme, region, PROJECTED, tuple(g for g, _ in pts))
    return Configuration(scheme, region, FULL, tuple(pts))


def translate_internal(cfg: Configuration, h: GroupElement) -> Configuration:
    """Shift every internal coordinate by h (full flavor only)."""
    if cfg.flavor != FULL:
        raise RefusalError("internal translation needs the full flavor")
    group = cfg.scheme.internal
    pts = tuple((g, group.add(hh, h)) for g, hh in cfg.points)
    return Configuration(cfg.scheme, cfg.region, FULL, pts)


def _check_covers(cfg: Configuration, region: Region) -> None:
    if cfg.region.lo > region.lo or cfg.region.hi < region.hi:
        raise RefusalError(
            f"configuration region [{cfg.region.lo}, {cfg.region.hi}) does not cover "
            f"[{region.lo}, {region.hi}); regenerate over a larger patch"
        )


def empirical_density(cfg: Configuration, scales: Sequence[int]) -> List[tuple]:
    """Point counts over the van Hove sequence, exact rationals for G = Z."""
    rows = []
    for n in scales:
        a_n = van_hove(cfg.scheme, n)
        _check_covers(cfg, a_n)
        count = sum(1 for g in cfg.support if a_n.contains(g))
        if cfg.scheme.physical == PHYSICAL_Z:
            rows.append((n, Fraction(count, n)))
        else:
            rows.append((n, count / (2.0 * n)))
    return rows


def density_bound(scheme: Scheme, window: Window) -> float:
    """dens(L) times the measure of the window closure: the ceiling that a
    configuration's density can reach along the van Hove sequence."""
    closure = window.topo_parts()[1]
    return float(scheme.dens_l) * float(closure.measure())


def is_maximal_density(
    scheme: Scheme,
    window: Window,
    x,
    n: int,
    tol: float,
    reference: Optional[Window] = None,
) -> dict:
    """Compare the empirical density at scale n with the density ceiling.

    `reference` names the window whose ceiling is tested (defaults to the
    generating window), so a configuration cut from a strictly smaller
    window can be measured against the larger window's bound.
    """
    a_n = van_hove(scheme, n)
    cfg = generate(scheme, window, x, region=a_n)
    (_, emp), = empirical_density(cfg, [n])
    bound = density_bound(scheme, reference if reference is not None else window)
    gap = bound - float(emp)
    return {
        "n": n,
        "empirical": float(emp),
        "bound": bound,
        "gap": gap,
        "attained": abs(gap) <= tol,
    }


def minimal_window(cfg: Configuration) -> Window:
    """Observed internal support: the smallest window containing the patch's
    internal coordinates.  Empty configurations give the empty window."""
    if cfg.flavor != FULL:
        raise RefusalError("minimal windows are read off full-flavor configurations")
    group = cfg.scheme.internal
    if not cfg.points:
        return empty_window(group)
    if group.kind == CYCLIC:
        return finite_window(group, set(cfg.internal_coords))
    values = sorted({h[0] for h in cfg.internal_coords})
    deduped = []
    for v in values:
        if not deduped or v - deduped[-1] > group.tolerance:
            deduped.append(v)
    return point_window(group, deduped)


@dataclass(frozen=True)
class TorusParamResult:
    points: Tuple[TorusPoint, ...]
    candidates_examined: int
    feasible_measure: Optional[float] = None
    feasible: Optional[Window] = None

    def describe(self) -> dict:
        d = {
            "points": [p.describe() for p in self.points],
            "candidates_examined": self.candidates_examined,
        }
        if self.feasible_measure is not None:
            d["feasible_measure"] = self.feasible_measure
        return d


def torus_parameters(scheme: Scheme, window: Window, cfg: Configuration) -> TorusParamResult:
    """All torus parameters whose configuration contains the given patch.

    Exhaustive over finite internal groups; on torus(1) the feasible set is
    the exact intersection of translated window closures and representative
    points of its components are returned.  Undefined on the empty patch.
    """
    if not cfg.points:
        raise RefusalError("torus parameters are undefined for the empty configuration")
    group = scheme.internal
    closure = window.topo_parts()[1]
    support = cfg.support

    if group.kind == CYCLIC:
        hits = []
        for c in group.elements():
            if all(closure.contains(group.add(c, scheme.star(g))) for g in support):
                hits.append(TorusPoint(0, c))
        return TorusParamResult(tuple(hits), group.order)

    if group.kind == TORUS and group.dim == 1:
        feasible = IntervalWindow(group, ((0.0, 1.0, True, False),))
        for g in support:
            shifted = closure.translate(group.neg(scheme.star(g)))
            feasible = feasible.intersection(shifted)
            if feasible.is_empty():
                break
        reps = []
        for lo, hi, _, _ in feasible.pieces:
            reps.append(TorusPoint(0, group.canonical((0.5 * (lo + hi),))))
        return TorusParamResult(
            tuple(reps), len(support), feasible.measure(), feasible
        )

    raise RefusalError("parameter reconstruction runs on compact internal groups only")


def is_continuity_point(scheme: Scheme, window: Window, x, radius: int, tol: float = 1e-9) -> dict:
    """Scan lattice translates within `radius` for hits on the window boundary.

    Returns verdict "yes" when no lattice point lands the parameter on the
    boundary within the search radius, else "boundary-hit" with the witness
    physical coordinate.
    """
    x = canonical_parameter(scheme, x)
    boundary = window.topo_parts()[2]
    if boundary.is_empty():
        return {"verdict": "yes", "witness": None, "radius": radius}

    group = scheme.internal
    if scheme.physical == PHYSICAL_Z:
        for n in sorted(range(-radius, radius + 1), key=lambda v: (abs(v), v)):
            if boundary.contains(group.add(x.h, scheme.star(n))):
                return {"verdict": "boundary-hit", "witness": n, "radius": radius}
        return {"verdict": "yes", "witness": None, "radius": radius}

    blo, bhi = boundary.bounds()
    slab = (blo - x.h[0] - _SLAB_PAD, bhi - x.h[0] + _SLAB_PAD)
    pts = lattice_points_in(scheme, Region(-float(radius), float(radius)), h_slab=slab)
    for lp in sorted(pts, key=lambda p: abs(p.g)):
        if boundary.contains((x.h[0] + lp.h[0],)):
            return {"verdict": "boundary-hit", "witness": lp.g, "radius": radius}
    return {"verdict": "yes", "witness": None, "radius": radius}


def _derived_seed(seed: int, i: int) -> int:
    return seed * 1_000_003 + i


def sample_mirsky(
    scheme: Scheme,
    window: Window,
    count: int,
    seed: int,
    region: Region,
    flavor: str = PROJECTED,
    threads: int = 1,
) -> List[Configuration]:
    """Configurations at Haar-uniform torus parameters, one derived seed per
    sample so the result is independent of evaluation order."""

    def draw(i: int) -> Configuration:
        child = _derived_seed(seed, i)
        if scheme.physical == PHYSICAL_Z:
            h = sample_haar(scheme.internal, 1, child)[0]
            x = TorusPoint(0, h)
        else:
            rng = random.Random(child)
            u1, u2 = rng.random(), rng.random()
            (a1, b1), (a2, b2) = scheme.basis
            x = TorusPoint(u1 * a1 + u2 * a2, (u1 * b1 + u2 * b2,))
        return generate(scheme, window, x, region=region, flavor=flavor)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(draw, range(count)))
    return [draw(i) for i in range(count)]


def pattern_frequency(samples: Sequence[Configuration], pattern: Sequence) -> float:
    """Fraction of sampled configurations whose support contains `pattern`."""
    if not samples:
        raise RefusalError("pattern frequency over zero samples is undefined")
    hits = 0
    for cfg in samples:
        support = set(cfg.support)
        if all(p in support for p in pattern):
            hits += 1
    return hits / len(samples)


def pattern_prediction(scheme: Scheme, window: Window, pattern: Sequence[int]):
    """Haar probability that every point of `pattern` lies in the configuration.

    A pattern sits inside the configuration at parameter x exactly when the
    internal coordinate of x lands in every translate W - star(p), so the
    probability under the Haar-uniform parameter is the measure of the
    intersection of those translates.  The empty pattern has probability 1.
    """
    if scheme.physical != PHYSICAL_Z:
        raise RefusalError("pattern predictions run on integer-physical schemes")
    group = scheme.internal
    shifts = [group.neg(scheme.star(p)) for p in pattern]
    if group.kind == CYCLIC:
        if not shifts:
            return Fraction(1)
        fin = as_finite(window)
        elems = None
        for t in shifts:
            translated = {group.add(e, t) for e in fin.elements}
            elems = translated if elems is None else elems & translated
        return Fraction(len(elems), group.order)
    if not shifts:
        return 1.0
    inter = window.translate(shifts[0])
    for t in shifts[1:]:
        inter = inter.intersection(window.translate(t))
    return float(inter.measure())


# ---------------------------------------------------------------------------
# export / import


def cfg_to_dict(cfg: Configuration) -> dict:
    if cfg.flavor == FULL:
        points = [[g, list(h)] for g, h in cfg.points]
    else:
        points = list(cfg.points)
    return {
        "scheme": cfg.scheme.describe(),
        "region": [cfg.region.lo, cfg.region.hi],
        "flavor": cfg.flavor,
        "points": points,
    }


def cfg_from_dict(scheme: Scheme, data: dict) -> Configuration:
    """Rebuild a configuration against a caller-supplied scheme; only the
    projected flavor is accepted from external data."""
    if data.get("flavor") != PROJECTED:
        raise RefusalError("only projected configurations are importable")
    region = Region(data["region"][0], data["region"][1])
    raw = data["points"]
    if scheme.physical == PHYSICAL_Z:
        points = tuple(int(g) for g in raw)
    else:
        points = tuple(float(g) for g in raw)
    return Configuration(scheme, region, PROJECTED, points)


def write_points_csv(cfg: Configuration, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if cfg.flavor == FULL:
            dim = cfg.scheme.internal.dim
            writer.writerow(["g"] + [f"h{i}" for i in range(dim)])
            for g, h in cfg.points:
                writer.writerow([repr(g) if isinstance(g, float) else g, *h])
        else:
            writer.writerow(["g"])
            for g in cfg.points:
                writer.writerow([repr(g) if isinstance(g, float) else g])
