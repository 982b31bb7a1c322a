"""Window algebra over internal groups.

A window is a relatively compact, measurable subset of an internal group.
Three representations cover what the rest of the package needs:

* :class:`FiniteWindow`: an explicit subset of a cyclic-product group.
* :class:`CylinderWindow`: a product constraint on a cyclic-product group,
  one forbidden residue set per coordinate; the natural shape for
  forbidden-divisor constructions, exact in every coordinate count.
* :class:`IntervalWindow`: a finite union of intervals on the 1-torus or in
  R^1, with per-endpoint closedness so boundaries and isolated points are
  first-class.

The operations shared by all three: exact or tolerance-aware measure,
translation, overlap and symmetric-difference measures, the period group
{h : h + W = W}, the Haar period group {h : m((h + W) symdiff W) = 0},
Haar regularization (dropping null parts, closing the rest), and the
interior/closure/boundary split.  Period detection and Haar period
detection run along deliberately different routes (set equality versus
measure of the symmetric difference) so that the identity
haar_periods(W) == periods(regularize(W)) is a genuine cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .errors import RefusalError
from .groups import (
    CYCLIC,
    EUCLIDEAN,
    FLOAT_TOL,
    TORUS,
    GroupElement,
    InternalGroup,
    Subgroup,
    _circle_dist,
    _wrap_unit,
)

Piece = Tuple[float, float, bool, bool]  # (lo, hi, closed_left, closed_right)

_MATERIALIZE_BUDGET = 1_000_000


class Window:
    """Common interface; see the concrete classes for representation notes."""

    group: InternalGroup

    @property
    def kind(self) -> str:
        raise NotImplementedError

    def measure(self):
        raise NotImplementedError

    def contains(self, h) -> bool:
        raise NotImplementedError

    def translate(self, h) -> "Window":
        raise NotImplementedError

    def overlap_measure(self, h):
        """Measure of W intersected with (W + h); symmetric in h <-> -h."""
        raise NotImplementedError

    def symdiff_measure(self, h):
        """m((W + h) symdiff W) = 2 (measure(W) - overlap_measure(W, h))."""
        return 2 * (self.measure() - self.overlap_measure(h))

    def periods(self) -> Subgroup:
        raise NotImplementedError

    def haar_periods(self) -> Subgroup:
        raise NotImplementedError

    def regularize(self) -> "Window":
        raise NotImplementedError

    def topo_parts(self) -> Tuple["Window", "Window", "Window"]:
        """(interior, closure, boundary) as windows."""
        raise NotImplementedError

    def is_empty(self) -> bool:
        raise NotImplementedError

    def same_set(self, other: "Window") -> bool:
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# finite subsets of cyclic products


_ELEMENTS_CACHE: Dict[InternalGroup, Tuple[GroupElement, ...]] = {}
_INDEX_CACHE: Dict[InternalGroup, Dict[GroupElement, int]] = {}
_BITPERM_CACHE: Dict[Tuple[InternalGroup, GroupElement], Tuple[int, ...]] = {}


def _elements_list(group: InternalGroup) -> Tuple[GroupElement, ...]:
    cached = _ELEMENTS_CACHE.get(group)
    if cached is None:
        if group.order is None or group.order > _MATERIALIZE_BUDGET:
            raise RefusalError("group too large to enumerate for window operations")
        cached = tuple(group.elements())
        _ELEMENTS_CACHE[group] = cached
        _INDEX_CACHE[group] = {e: i for i, e in enumerate(cached)}
    return cached


def _bit_perm(group: InternalGroup, h: GroupElement) -> Tuple[int, ...]:
    key = (group, h)
    cached = _BITPERM_CACHE.get(key)
    if cached is None:
        elems = _elements_list(group)
        index = _INDEX_CACHE[group]
        cached = tuple(1 << index[group.add(e, h)] for e in elems)
        _BITPERM_CACHE[key] = cached
    return cached


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class FiniteWindow(Window):
    """An explicit subset of a cyclic-product group."""

    group: InternalGroup
    elements: frozenset

    def __post_init__(self):
        if self.group.kind != CYCLIC:
            raise ValueError("finite-subset windows live in cyclic-product groups")
        canon = frozenset(self.group.canonical(e) for e in self.elements)
        object.__setattr__(self, "elements", canon)

    @property
    def kind(self) -> str:
        return "finite-subset"

    def _mask(self) -> int:
        index = _INDEX_CACHE.get(self.group)
        if index is None:
            _elements_list(self.group)
            index = _INDEX_CACHE[self.group]
        w = 0
        for e in self.elements:
            w |= 1 << index[e]
        return w

    def measure(self) -> Fraction:
        return Fraction(len(self.elements), self.group.order)

    def contains(self, h) -> bool:
        self.group.validate(h)
        return h in self.elements

    def translate(self, h) -> "FiniteWindow":
        self.group.validate(h)
        return FiniteWindow(self.group, frozenset(self.group.add(e, h) for e in self.elements))

    def overlap_measure(self, h) -> Fraction:
        bp = _bit_perm(self.group, h)
        w = self._mask()
        t = 0
        for i in _bits(w):
            t |= bp[i]
        return Fraction((w & t).bit_count(), self.group.order)

    def periods(self) -> Subgroup:
        """{h : h + W = W}, by exact set comparison over all candidates."""
        if not self.elements:
            return Subgroup.full(self.group)
        elems = _elements_list(self.group)
        w = self._mask()
        low = (w & -w).bit_length() - 1
        members = []
        for h in elems:
            bp = _bit_perm(self.group, h)
            if not (bp[low] & w):
                continue
            t = 0
            ok = True
            for i in _bits(w):
                t |= bp[i]
                if t & ~w:
                    ok = False
                    break
            if ok and t == w:
                members.append(h)
        return Subgroup(self.group, frozenset(members))

    def haar_periods(self) -> Subgroup:
        """{h : m((h+W) symdiff W) = 0}, by exact measure arithmetic."""
        members = [h for h in _elements_list(self.group) if self.symdiff_measure(h) == 0]
        return Subgroup(self.group, frozenset(members))

    def regularize(self) -> "FiniteWindow":
        # counting measure has no null parts besides the empty set
        return self

    def topo_parts(self):
        empty = FiniteWindow(self.group, frozenset())
        return (self, self, empty)

    def is_empty(self) -> bool:
        return not self.elements

    def same_set(self, other: Window) -> bool:
        other = as_finite(other)
        return self.group == other.group and self.elements == other.elements

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "group": self.group.describe(),
            "elements": sorted(list(e) for e in self.elements),
        }


@dataclass(frozen=True)
class CylinderWindow(Window):
    """Per-coordinate forbidden residues on a cyclic-product group.

    The window is {h : h_i not in forbidden_i for every i}; measures stay
    exact products of per-coordinate counts, so the representation scales to
    many coordinates without enumerating the group.
    """

    group: InternalGroup
    forbidden: Tuple[frozenset, ...]

    def __post_init__(self):
        if self.group.kind != CYCLIC:
            raise ValueError("cylinder windows live in cyclic-product groups")
        if len(self.forbidden) != self.group.dim:
            raise ValueError("one forbidden residue set per coordinate is required")
        canon = []
        for f, b in zip(self.forbidden, self.group.moduli):
            fs = frozenset(int(x) % b for x in f)
            if len(fs) >= b:
                raise ValueError("forbidden set covers a whole coordinate; the window would be empty")
            canon.append(fs)
        object.__setattr__(self, "forbidden", tuple(canon))

    @property
    def kind(self) -> str:
        return "predicate-cylinder"

    def measure(self) -> Fraction:
        m = Fraction(1)
        for f, b in zip(self.forbidden, self.group.moduli):
            m *= Fraction(b - len(f), b)
        return m

    def contains(self, h) -> bool:
        self.group.validate(h)
        return all(x not in f for x, f in zip(h, self.forbidden))

    def translate(self, h) -> "CylinderWindow":
        self.group.validate(h)
        shifted = tuple(
            frozenset((x + d) % b for x in f)
            for f, d, b in zip(self.forbidden, h, self.group.moduli)
        )
        return CylinderWindow(self.group, shifted)

    def overlap_measure(self, h) -> Fraction:
        self.group.validate(h)
        m = Fraction(1)
        for f, d, b in zip(self.forbidden, h, self.group.moduli):
            joint = f | frozenset((x + d) % b for x in f)
            m *= Fraction(b - len(joint), b)
        return m

    def periods(self) -> Subgroup:
        """Product of per-coordinate stabilizers of the forbidden sets."""
        stabs = []
        size = 1
        for f, b in zip(self.forbidden, self.group.moduli):
            stab = [d for d in range(b) if frozenset((x + d) % b for x in f) == f]
            stabs.append(stab)
            size *= len(stab)
            if size > _MATERIALIZE_BUDGET:
                raise RefusalError("cylinder period group too large to materialize")
        import itertools

        return Subgroup(self.group, frozenset(itertools.product(*stabs)))

    def haar_periods(self) -> Subgroup:
        candidates = self.periods()
        members = [h for h in candidates.elements() if self.symdiff_measure(h) == 0]
        return Subgroup(self.group, frozenset(members))

    def regularize(self) -> "CylinderWindow":
        return self

    def topo_parts(self):
        empty = FiniteWindow(self.group, frozenset())
        return (self, self, empty)

    def is_empty(self) -> bool:
        return False  # proper forbidden sets leave at least one residue per coordinate

    def to_finite(self) -> FiniteWindow:
        import itertools

        count = 1
        allowed = []
        for f, b in zip(self.forbidden, self.group.moduli):
            keep = [x for x in range(b) if x not in f]
            allowed.append(keep)
            count *= len(keep)
            if count > _MATERIALIZE_BUDGET:
                raise RefusalError("cylinder window too large to materialize")
        return FiniteWindow(self.group, frozenset(itertools.product(*allowed)))

    def same_set(self, other: Window) -> bool:
        return as_finite(self).same_set(other)

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "group": self.group.describe(),
            "forbidden": [sorted(f) for f in self.forbidden],
        }


def as_finite(window: Window) -> FiniteWindow:
    """Materialize a finite-group window as an explicit subset."""
    if isinstance(window, FiniteWindow):
        return window
    if isinstance(window, CylinderWindow):
        return window.to_finite()
    raise RefusalError(f"{window.kind} windows cannot be materialized as finite subsets")


# ---------------------------------------------------------------------------
# interval unions on the 1-torus and the line


def _clean_pieces(raw: Iterable, tol: float) -> List[List]:
    cleaned = []
    for lo, hi, lc, rc in raw:
        lo, hi = float(lo), float(hi)
        if hi < lo:
            raise ValueError(f"interval ({lo}, {hi}) has negative length")
        if hi == lo:
            if lc and rc:
                cleaned.append([lo, lo, True, True])
            continue
        if hi - lo <= tol:
            # sub-tolerance sliver: collapses to a point, or vanishes if open
            if lc or rc:
                cleaned.append([lo if lc else hi] * 2 + [True, True])
            continue
        cleaned.append([lo, hi, bool(lc), bool(rc)])
    return cleaned


def _union_pieces(cleaned: List[List], tol: float) -> List[Piece]:
    cleaned.sort(key=lambda p: (p[0], p[1]))
    out: List[List] = []
    for p in cleaned:
        if not out:
            out.append(list(p))
            continue
        last = out[-1]
        if p[0] > last[1] + tol:
            out.append(list(p))
            continue
        if p[0] <= last[0] + tol:
            last[2] = last[2] or p[2]
        if p[0] < last[1] - tol:
            # genuine overlap
            if p[1] > last[1] + tol:
                last[1], last[3] = p[1], p[3]
            elif p[1] >= last[1] - tol:
                last[3] = last[3] or p[3]
            continue
        # touching at the seam t ~ last[1]
        covered = last[3] or p[2] or (p[1] - p[0] <= tol)
        if covered:
            if p[1] > last[1] + tol:
                last[1], last[3] = p[1], p[3]
            else:
                last[3] = last[3] or p[3]
        else:
            out.append([last[1], max(p[1], last[1]), p[2], p[3]])
    return [tuple(p) for p in out]


def _canon_euclidean(raw, tol) -> Tuple[Piece, ...]:
    return tuple(_union_pieces(_clean_pieces(raw, tol), tol))


def _canon_torus(raw, tol) -> Tuple[Piece, ...]:
    unrolled = []
    for lo, hi, lc, rc in raw:
        lo, hi = float(lo), float(hi)
        if hi < lo:
            raise ValueError(f"interval ({lo}, {hi}) has negative length")
        length = hi - lo
        if length >= 1.0 - tol:
            return ((0.0, 1.0, True, False),)  # the full circle
        start = _wrap_unit(lo)
        end = start + length
        if end < 1.0 - tol:
            unrolled.append((start, end, lc, rc))
        elif end <= 1.0 + tol:
            unrolled.append((start, 1.0, lc, False))
            if rc:
                unrolled.append((0.0, 0.0, True, True))
        else:
            unrolled.append((start, 1.0, lc, False))
            unrolled.append((0.0, end - 1.0, True, rc))
    pieces = _union_pieces(_clean_pieces(unrolled, tol), tol)
    if len(pieces) == 1 and pieces[0][0] <= tol and pieces[0][1] >= 1.0 - tol and pieces[0][2]:
        return ((0.0, 1.0, True, False),)
    return tuple(pieces)


@dataclass(frozen=True)
class IntervalWindow(Window):
    """A finite union of intervals on torus(1) or euclidean(1).

    Canonical form: pieces sorted, pairwise disjoint and non-adjacent except
    for uncovered single-point holes; torus pieces are cut at the 0/1 seam
    and re-glued on demand, so canonical equality is set equality.
    """

    group: InternalGroup
    pieces: Tuple[Piece, ...]

    def __post_init__(self):
        if not (self.group.kind in (TORUS, EUCLIDEAN) and self.group.dim == 1):
            raise ValueError("interval-union windows live on torus(1) or euclidean(1)")
        tol = FLOAT_TOL
        if self.group.kind == TORUS:
            canon = _canon_torus(self.pieces, tol)
        else:
            canon = _canon_euclidean(self.pieces, tol)
        object.__setattr__(self, "pieces", canon)

    @property
    def kind(self) -> str:
        return "interval-union"

    @property
    def _tol(self) -> float:
        return FLOAT_TOL

    def is_full_circle(self) -> bool:
        return (
            self.group.kind == TORUS
            and len(self.pieces) == 1
            and self.pieces[0][:2] == (0.0, 1.0)
        )

    def measure(self) -> float:
        return sum(hi - lo for lo, hi, _, _ in self.pieces)

    def is_empty(self) -> bool:
        return not self.pieces

    def bounds(self) -> Tuple[float, float]:
        if not self.pieces:
            raise RefusalError("empty window has no bounds")
        return (self.pieces[0][0], max(hi for _, hi, _, _ in self.pieces))

    def contains(self, h) -> bool:
        x = h[0] if isinstance(h, tuple) else float(h)
        tol = self._tol
        if self.group.kind == TORUS:
            x = x % 1.0
            shifts = (0.0, 1.0, -1.0)
        else:
            shifts = (0.0,)
        for s in shifts:
            y = x + s
            for lo, hi, lc, rc in self.pieces:
                if y < lo - tol or y > hi + tol:
                    continue
                if hi - lo <= tol:
                    return True  # point piece, y within tolerance of it
                near_lo = abs(y - lo) <= tol
                near_hi = abs(y - hi) <= tol
                if near_lo:
                    if lc:
                        return True
                elif near_hi:
                    if rc:
                        return True
                else:
                    return True
        return False

    def translate(self, h) -> "IntervalWindow":
        d = h[0] if isinstance(h, tuple) else float(h)
        moved = [(lo + d, hi + d, lc, rc) for lo, hi, lc, rc in self.pieces]
        return IntervalWindow(self.group, tuple(moved))

    def overlap_measure(self, h) -> float:
        other = self.translate(h)
        total = 0.0
        for lo1, hi1, _, _ in self.pieces:
            for lo2, hi2, _, _ in other.pieces:
                total += max(0.0, min(hi1, hi2) - max(lo1, lo2))
        return total

    def intersection(self, other: "IntervalWindow") -> "IntervalWindow":
        """Set intersection, with endpoint flags resolved by membership."""
        tol = self._tol
        pieces = []
        for lo1, hi1, _, _ in self.pieces:
            for lo2, hi2, _, _ in other.pieces:
                lo, hi = max(lo1, lo2), min(hi1, hi2)
                if hi < lo - tol:
                    continue
                if hi - lo <= tol:
                    x = 0.5 * (lo + hi)
                    if self.contains(x) and other.contains(x):
                        pieces.append((x, x, True, True))
                    continue
                lc = self.contains(lo) and other.contains(lo)
                rc = self.contains(hi) and other.contains(hi)
                pieces.append((lo, hi, lc, rc))
        return IntervalWindow(self.group, tuple(pieces))

    # -- circle-arc structure -------------------------------------------

    def _arcs(self) -> List[Piece]:
        """Maximal arcs; on the torus the pair wrapping the seam is glued,
        so an arc may extend past 1.0."""
        pieces = list(self.pieces)
        if self.group.kind == TORUS and len(pieces) >= 2:
            first, last = pieces[0], pieces[-1]
            if first[0] == 0.0 and first[2] and last[1] >= 1.0 - self._tol:
                glued = (last[0], 1.0 + first[1], last[2], first[3])
                pieces = pieces[1:-1] + [glued]
        return pieces

    def _from_arcs(self, arcs: Iterable[Piece]) -> "IntervalWindow":
        return IntervalWindow(self.group, tuple(arcs))

    def regularize(self) -> "IntervalWindow":
        """Closure of the positive-measure part: null components drop out,
        what remains is closed.  Idempotent."""
        tol = self._tol
        arcs = [(lo, hi, True, True) for lo, hi, _, _ in self._arcs() if hi - lo > tol]
        return self._from_arcs(arcs)

    def topo_parts(self):
        if self.is_full_circle():
            empty = IntervalWindow(self.group, ())
            return (self, self, empty)
        tol = self._tol
        arcs = self._arcs()
        interior = self._from_arcs(
            (lo, hi, False, False) for lo, hi, _, _ in arcs if hi - lo > tol
        )
        closure = self._from_arcs((lo, hi, True, True) for lo, hi, _, _ in arcs)
        candidates = []
        for lo, hi, _, _ in arcs:
            candidates.extend((lo, hi))
        boundary_pts = []
        for x in candidates:
            if self.group.kind == TORUS:
                x = x % 1.0
            if closure.contains(x) and not interior.contains(x):
                if not any(abs(x - y) <= tol or (self.group.kind == TORUS and _circle_dist(x, y) <= tol) for y in boundary_pts):
                    boundary_pts.append(x)
        boundary = IntervalWindow(self.group, tuple((x, x, True, True) for x in sorted(boundary_pts)))
        return (interior, closure, boundary)

    def same_set(self, other: Window) -> bool:
        if not isinstance(other, IntervalWindow) or self.group != other.group:
            return False
        if len(self.pieces) != len(other.pieces):
            return False
        tol = self._tol
        for (lo1, hi1, lc1, rc1), (lo2, hi2, lc2, rc2) in zip(self.pieces, other.pieces):
            if abs(lo1 - lo2) > tol or abs(hi1 - hi2) > tol:
                return False
            if hi1 - lo1 > tol and (lc1, rc1) != (lc2, rc2):
                return False
        return True

    def periods(self) -> Subgroup:
        """{h : h + W = W} via arc matching: a rotation preserving W maps the
        first arc onto some arc, which bounds the candidates."""
        if self.group.kind == EUCLIDEAN:
            if self.is_empty():
                return Subgroup.full(self.group)
            return Subgroup.trivial(self.group)
        if self.is_empty() or self.is_full_circle():
            return Subgroup.full(self.group)
        arcs = self._arcs()
        base = arcs[0][0]
        members = []
        for lo, _, _, _ in arcs:
            h = (_wrap_unit(lo - base),)
            if self.translate(h).same_set(self):
                members.append(h)
        return Subgroup(self.group, frozenset(members))

    def haar_periods(self) -> Subgroup:
        """{h : m((h+W) symdiff W) = 0} via measure arithmetic, with the
        candidate list read off the regularized arc structure."""
        if self.group.kind == EUCLIDEAN:
            if self.measure() <= self._tol:
                return Subgroup.full(self.group)
            return Subgroup.trivial(self.group)
        reg = self.regularize()
        if reg.is_empty() or reg.is_full_circle():
            return Subgroup.full(self.group)
        arcs = reg._arcs()
        base = arcs[0][0]
        members = []
        for lo, _, _, _ in arcs:
            h = (_wrap_unit(lo - base),)
            if abs(self.symdiff_measure(h)) <= self._tol:
                members.append(h)
        return Subgroup(self.group, frozenset(members))

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "group": self.group.describe(),
            "intervals": [
                {"lo": lo, "hi": hi, "closed_left": lc, "closed_right": rc}
                for lo, hi, lc, rc in self.pieces
            ],
        }


# ---------------------------------------------------------------------------
# convenience constructors


def finite_window(group: InternalGroup, elements) -> FiniteWindow:
    return FiniteWindow(group, frozenset(tuple(e) for e in elements))


def cylinder_window(group: InternalGroup, forbidden) -> CylinderWindow:
    return CylinderWindow(group, tuple(frozenset(f) for f in forbidden))


def interval_window(group: InternalGroup, pieces) -> IntervalWindow:
    """Pieces are (lo, hi, closed_left, closed_right) tuples."""
    return IntervalWindow(group, tuple(tuple(p) for p in pieces))


def half_open_window(group: InternalGroup, spans) -> IntervalWindow:
    """Union of half-open intervals [lo, hi)."""
    return IntervalWindow(group, tuple((lo, hi, True, False) for lo, hi in spans))


def point_window(group: InternalGroup, values) -> IntervalWindow:
    return IntervalWindow(group, tuple((v, v, True, True) for v in values))


def empty_window(group: InternalGroup) -> Window:
    if group.kind == CYCLIC:
        return FiniteWindow(group, frozenset())
    return IntervalWindow(group, ())
