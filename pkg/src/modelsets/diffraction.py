"""Autocorrelation coefficients of weak model sets.

The coefficient at a lattice shift is the density of point pairs at that
displacement.  Two routes compute it: the exact route multiplies the lattice
density by the Haar overlap of the window with its shifted copy, and the
empirical route counts pairs in a generated patch and divides by the scale.
For Mirsky-generic configurations the two agree in the limit; the spectrum
table puts both side by side with the deviation.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple, Union

from .configurations import Configuration
from .errors import RefusalError
from .groups import GroupElement
from .scheme import PHYSICAL_Z, Region, Scheme, lattice_points_in, van_hove
from .window import Window

_MATCH_TOL = 1e-6  # float support matching; well below any lattice gap used here

Shift = Union[int, Tuple[int, int]]


def _coerce_shift(scheme: Scheme, shift: Shift):
    """Resolve a shift to (physical coordinate, internal coordinate).

    Integer-physical schemes take any integer; planar schemes take lattice
    coefficients (m, n) so the shift is a lattice point by construction.
    """
    if scheme.physical == PHYSICAL_Z:
        if isinstance(shift, bool) or not isinstance(shift, int):
            raise ValueError(f"shift {shift!r} is not on the lattice Z")
        return shift, scheme.star(shift)
    if (
        not isinstance(shift, tuple)
        or len(shift) != 2
        or not all(isinstance(c, int) and not isinstance(c, bool) for c in shift)
    ):
        raise ValueError(
            f"shift {shift!r} must be integer lattice coefficients (m, n) for a planar scheme"
        )
    point = scheme.lattice_point(*shift)
    return point.g, point.h


def autocorr_exact(scheme: Scheme, window: Window, shift: Shift):
    """Exact autocorrelation coefficient at a lattice shift.

    Equals lattice density times the window-overlap measure at the shift's
    internal coordinate; an exact rational whenever the internal group is
    finite.  The coefficient at shift 0 is lattice density times window
    measure, and the value is symmetric under negating the shift.
    """
    _, lh = _coerce_shift(scheme, shift)
    return scheme.dens_l * window.overlap_measure(lh)


def autocorr_empirical(cfg: Configuration, shift: Shift, n):
    """Pair-counting autocorrelation estimate at averaging scale n.

    Counts support points x inside the scale-n averaging region with x+shift
    also in the support, normalized by the region size.  The configuration
    must cover both the averaging region and its shifted copy; otherwise the
    patch cannot decide every pair and the computation is refused.
    """
    scheme = cfg.scheme
    lg, _ = _coerce_shift(scheme, shift)
    region = van_hove(scheme, n)
    tol = 0 if scheme.physical == PHYSICAL_Z else 1e-9
    need_lo = min(region.lo, region.lo + lg)
    need_hi = max(region.hi, region.hi + lg)
    if cfg.region.lo > need_lo + tol or cfg.region.hi < need_hi - tol:
        raise RefusalError(
            f"patch [{cfg.region.lo}, {cfg.region.hi}) does not cover the averaging "
            f"region [{need_lo}, {need_hi}) for shift {lg}"
        )

    sup = cfg.support
    lo_i = bisect_left(sup, region.lo)
    hi_i = bisect_left(sup, region.hi)
    count = 0
    j = 0
    if scheme.physical == PHYSICAL_Z:
        for i in range(lo_i, hi_i):
            target = sup[i] + lg
            while j < len(sup) and sup[j] < target:
                j += 1
            if j < len(sup) and sup[j] == target:
                count += 1
        return Fraction(count, n)
    for i in range(lo_i, hi_i):
        target = sup[i] + lg
        while j < len(sup) and sup[j] < target - _MATCH_TOL:
            j += 1
        if j < len(sup) and abs(sup[j] - target) <= _MATCH_TOL:
            count += 1
    return count / (2.0 * n)


@dataclass(frozen=True)
class AutocorrRow:
    lg: Union[int, float]
    lh: GroupElement
    eta_exact: Union[Fraction, float]
    eta_empirical: Union[Fraction, float, None]
    abs_error: Union[Fraction, float, None]


@dataclass(frozen=True)
class AutocorrTable:
    """Exact and empirical autocorrelation coefficients over a shift range."""

    dens_l: Union[Fraction, float]
    scale: Union[int, float, None]
    rows: Tuple[AutocorrRow, ...]

    def max_abs_error(self):
        errors = [r.abs_error for r in self.rows if r.abs_error is not None]
        return max(errors) if errors else None

    def covered_rows(self) -> int:
        return sum(1 for r in self.rows if r.eta_empirical is not None)

    def describe(self) -> dict:
        return {
            "dens_l": float(self.dens_l),
            "scale": self.scale,
            "rows": [
                {
                    "l_G": r.lg,
                    "l_H": list(r.lh),
                    "eta_exact": _fmt(r.eta_exact),
                    "eta_empirical": _fmt(r.eta_empirical),
                    "abs_error": _fmt(r.abs_error),
                }
                for r in self.rows
            ],
            "covered_rows": self.covered_rows(),
            "max_abs_error": _fmt(self.max_abs_error()),
        }


def _fmt(value):
    if value is None:
        return None
    if isinstance(value, Fraction):
        return str(value)
    return value


def autocorr_spectrum(
    scheme: Scheme,
    window: Window,
    cfg: Configuration,
    max_range,
    scale=None,
    threads: int = 1,
) -> AutocorrTable:
    """Autocorrelation table over every lattice shift within max_range.

    For planar schemes only shifts whose internal coordinate lands in the
    difference body of the window can carry a nonzero coefficient, so the
    enumeration is restricted to that slab.  Rows whose empirical estimate
    the patch cannot cover are left blank rather than extrapolated.
    """
    if scheme.physical == PHYSICAL_Z:
        shifts: List[Shift] = list(range(-max_range, max_range + 1))
        if scale is None:
            scale = max(int(math.floor(cfg.region.hi)) - max_range, 1)
    else:
        if window.is_empty():
            half_width = 0.0
        else:
            bounds = window.bounds()
            half_width = bounds[1] - bounds[0]
        slab = (-half_width - 1e-6, half_width + 1e-6)
        pts = _lattice_shifts_in_range(scheme, max_range, slab)
        shifts = [p for p in pts]
        if scale is None:
            scale = max(min(-cfg.region.lo, cfg.region.hi) - max_range, 1e-9)

    def make_row(shift: Shift) -> AutocorrRow:
        lg, lh = _coerce_shift(scheme, shift)
        exact = autocorr_exact(scheme, window, shift)
        try:
            emp = autocorr_empirical(cfg, shift, scale)
            err = abs(emp - exact)
        except RefusalError:
            emp = None
            err = None
        return AutocorrRow(lg, lh, exact, emp, err)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(make_row, shifts))
    else:
        rows = [make_row(s) for s in shifts]
    rows.sort(key=lambda r: r.lg)
    return AutocorrTable(dens_l=scheme.dens_l, scale=scale, rows=tuple(rows))


def _lattice_shifts_in_range(scheme: Scheme, max_range, slab) -> List[Tuple[int, int]]:
    """Coefficient pairs of lattice points with |g| <= max_range, h in slab."""
    pts = lattice_points_in(
        scheme, Region(-max_range - 1e-9, max_range + 1e-9), h_slab=slab
    )
    out = []
    for p in pts:
        if abs(p.g) <= max_range + 1e-9:
            out.append(p.coeffs)
    return out


def write_autocorr_csv(table: AutocorrTable, path: str) -> None:
    """CSV export with columns l_G, eta_exact, eta_empirical, abs_error."""
    import csv

    def cell(value):
        if value is None:
            return ""
        if isinstance(value, Fraction):
            return str(value)
        if isinstance(value, float):
            return repr(value)
        return str(value)

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["l_G", "eta_exact", "eta_empirical", "abs_error"])
        for r in table.rows:
            writer.writerow(
                [cell(r.lg), cell(r.eta_exact), cell(r.eta_empirical), cell(r.abs_error)]
            )
