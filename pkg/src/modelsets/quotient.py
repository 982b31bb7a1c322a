"""Quotient schemes: dividing the internal group by a compact subgroup.

Dividing H by a finite subgroup H0 contained in the period group of the
window leaves the projected point set untouched: the quotient lattice stays
discrete, the quotient of the window generates the same physical
configuration, and when H0 is the full period group the quotient window has
trivial periods.  This module materializes the quotient concretely: for
finite internal groups through an integer Smith normal form (so quotient
groups come out as canonical cyclic products with an explicit homomorphism),
and for the 1-torus through the q-fold covering map.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .configurations import Configuration, TorusPoint, canonical_parameter, generate
from .errors import RefusalError
from .groups import CYCLIC, TORUS, GroupElement, InternalGroup, Subgroup, cyclic_product, torus
from .scheme import PHYSICAL_Z, Region, Scheme, build_scheme
from .window import FiniteWindow, IntervalWindow, Window, as_finite


# ---------------------------------------------------------------------------
# Smith normal form with left transform


def _smith_with_left(rows: List[List[int]]) -> Tuple[List[int], List[List[int]]]:
    """Diagonalize an integer matrix by unimodular row and column operations.

    Returns (diagonal, U) with U A V = diag and the divisibility chain
    d_1 | d_2 | ...; only the row transform U is tracked since column
    operations do not affect the induced map on the ambient Z^k.
    """
    a = [row[:] for row in rows]
    k = len(a)
    m = len(a[0]) if a else 0
    u = [[1 if i == j else 0 for j in range(k)] for i in range(k)]

    def row_op(i, j, q):  # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for row in a:
            row[i] -= q * row[j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(k, m):
        # move a minimal-magnitude nonzero entry of the submatrix to (t, t)
        pivot = None
        for i in range(t, k):
            for j in range(t, m):
                if a[i][j] and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            # clear the pivot column, then the pivot row, by euclidean steps
            dirty = False
            for i in range(t + 1, k):
                if a[i][t]:
                    row_op(i, t, a[i][t] // a[t][t])
                    if a[i][t]:
                        swap_rows(i, t)
                        dirty = True
            for j in range(t + 1, m):
                if a[t][j]:
                    col_op(j, t, a[t][j] // a[t][t])
                    if a[t][j]:
                        swap_cols(j, t)
                        dirty = True
            if not dirty:
                break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1

    # enforce the divisibility chain d_i | d_{i+1}
    rank = t
    i = 0
    while i < rank - 1:
        if a[i + 1][i + 1] % a[i][i]:
            col_op(i, i + 1, -1)  # couple the two diagonal blocks
            # re-reduce the 2x2 block at (i, i)
            while True:
                dirty = False
                if a[i + 1][i]:
                    q = a[i + 1][i] // a[i][i]
                    row_op(i + 1, i, q)
                    if a[i + 1][i]:
                        swap_rows(i + 1, i)
                        dirty = True
                if a[i][i + 1]:
                    q = a[i][i + 1] // a[i][i]
                    col_op(i + 1, i, q)
                    if a[i][i + 1]:
                        swap_cols(i + 1, i)
                        dirty = True
                if not dirty:
                    break
            if a[i][i] < 0:
                a[i] = [-x for x in a[i]]
                u[i] = [-x for x in u[i]]
            if a[i + 1][i + 1] < 0:
                a[i + 1] = [-x for x in a[i + 1]]
                u[i + 1] = [-x for x in u[i + 1]]
            i = max(i - 1, 0)
        else:
            i += 1

    return [a[i][i] for i in range(min(k, m))], u


@dataclass(frozen=True)
class QuotientScheme:
    """A scheme together with its quotient by a compact kernel subgroup."""

    base: Scheme
    kernel: Subgroup
    quotient: Scheme
    _u: Optional[Tuple[Tuple[int, ...], ...]]  # finite case: left transform rows
    _keep: Optional[Tuple[Tuple[int, int], ...]]  # (row index, modulus) per kept factor
    _q: Optional[int]  # torus case: covering degree

    def phi(self, h: GroupElement) -> GroupElement:
        """The quotient homomorphism on internal coordinates."""
        group = self.base.internal
        group.validate(h)
        if group.kind == CYCLIC:
            return tuple(
                sum(self._u[i][j] * h[j] for j in range(len(h))) % d for i, d in self._keep
            )
        return self.quotient.internal.canonical((self._q * h[0],))

    def phi_parameter(self, x) -> TorusPoint:
        x = canonical_parameter(self.base, x)
        return TorusPoint(x.g, self.phi(x.h))

    def coset_representative(self, h: GroupElement) -> GroupElement:
        """Smallest canonical element of h + kernel (finite internal groups)."""
        group = self.base.internal
        if group.kind != CYCLIC:
            raise RefusalError("coset representatives are enumerated for finite groups only")
        return min(group.add(h, k) for k in self.kernel.elements())

    def describe(self) -> dict:
        return {
            "base": self.base.describe(),
            "kernel": self.kernel.describe(),
            "quotient": self.quotient.describe(),
        }


def quotient_scheme(scheme: Scheme, kernel: Subgroup) -> QuotientScheme:
    """Quotient a scheme's internal group by a finite subgroup.

    The quotient internal group is a canonical cyclic product (for finite H)
    or the torus again (kernel a finite rotation group), the star map is the
    composed homomorphism, and the lattice image stays discrete and dense in
    the quotient, which the construction re-validates.
    """
    if scheme.physical != PHYSICAL_Z:
        raise RefusalError("quotients are materialized for integer-physical schemes")
    if kernel.group != scheme.internal:
        raise ValueError("kernel subgroup lives in a different internal group")
    group = scheme.internal

    if group.kind == CYCLIC:
        gens = [list(e) for e in kernel.elements()]
        k = group.dim
        cols = [[group.moduli[i] if j == i else 0 for j in range(k)] for i in range(k)]
        matrix = [
            [cols[j][i] for j in range(k)] + [g[i] for g in gens] for i in range(k)
        ]
        diag, u = _smith_with_left(matrix)
        keep = tuple((i, d) for i, d in enumerate(diag) if d > 1)
        quotient_group = cyclic_product([d for _, d in keep])
        qs = QuotientScheme(
            base=scheme,
            kernel=kernel,
            quotient=Scheme(PHYSICAL_Z, quotient_group, star_gen=None),
            _u=tuple(tuple(row) for row in u),
            _keep=keep,
            _q=None,
        )
        star_gen = qs.phi(scheme.star_gen)
        quotient = build_scheme(PHYSICAL_Z, quotient_group, star_generator=star_gen)
        return QuotientScheme(scheme, kernel, quotient, qs._u, qs._keep, None)

    if group.kind == TORUS and group.dim == 1:
        members = kernel.elements()
        q = len(members)
        for m in members:
            scaled = q * m[0]
            if abs(scaled - round(scaled)) > 1e-6:
                raise ValueError("torus kernel must be a finite rotation subgroup")
        quotient = build_scheme(
            PHYSICAL_Z, torus(1), star_generator=((q * scheme.star_gen[0]) % 1.0,)
        )
        return QuotientScheme(scheme, kernel, quotient, None, None, q)

    raise RefusalError("quotients support cyclic-product and torus(1) internal groups")


def quotient_window(qs: QuotientScheme, window: Window) -> Window:
    """Image of the window under the quotient homomorphism.

    No saturation assumption: when the kernel is not a subgroup of the
    window's period group the image is strictly fatter in measure.
    """
    group = qs.base.internal
    if group.kind == CYCLIC:
        fin = as_finite(window)
        return FiniteWindow(qs.quotient.internal, frozenset(qs.phi(e) for e in fin.elements))
    if not isinstance(window, IntervalWindow):
        raise RefusalError("torus quotients act on interval-union windows")
    q = qs._q
    scaled = [(q * lo, q * lo + q * (hi - lo), lc, rc) for lo, hi, lc, rc in window._arcs()]
    return IntervalWindow(qs.quotient.internal, tuple(scaled))


def verify_projection_identity(
    qs: QuotientScheme, window: Window, x, region: Region
) -> dict:
    """Bit-exact comparison of the base and quotient projected configurations.

    Requires the kernel to consist of window periods; otherwise the identity
    has no reason to hold and the check is refused.
    """
    periods = window.periods()
    for k in qs.kernel.elements():
        if not periods.contains(k):
            raise RefusalError(
                f"kernel element {k} is not a window period; the projection identity does not apply"
            )
    x = canonical_parameter(qs.base, x)
    base_cfg = generate(qs.base, window, x, region=region)
    q_window = quotient_window(qs, window)
    q_cfg = generate(qs.quotient, q_window, qs.phi_parameter(x), region=region)
    if base_cfg.points == q_cfg.points:
        return {"match": True, "points": len(base_cfg.points), "first_mismatch": None}
    mismatch = None
    base_set, q_set = set(base_cfg.points), set(q_cfg.points)
    for g in sorted(base_set.symmetric_difference(q_set)):
        mismatch = g
        break
    return {"match": False, "points": len(base_cfg.points), "first_mismatch": mismatch}


@dataclass(frozen=True)
class MefDescriptor:
    """Description of the maximal equicontinuous factor torus.

    The factor is the scheme torus divided by the embedded period group of
    the window interior.  Both that kernel and the full window period group
    are reported; whether they must coincide in general is open, so the
    descriptor only records whether they do here.
    """

    trivial: bool
    kernel: Optional[Subgroup]
    window_periods: Optional[Subgroup]
    group: dict
    order: Optional[int]

    @property
    def interior_periods_equal_window_periods(self) -> Optional[bool]:
        if self.kernel is None or self.window_periods is None:
            return None
        return self.kernel.same(self.window_periods)

    def describe(self) -> dict:
        d = {"trivial": self.trivial, "group": self.group}
        if self.kernel is not None:
            d["kernel"] = self.kernel.describe()
            d["window_periods"] = self.window_periods.describe()
            d["interior_periods_equal_window_periods"] = (
                self.interior_periods_equal_window_periods
            )
        if self.order is not None:
            d["order"] = self.order
        return d


def mef_descriptor(scheme: Scheme, window: Window) -> MefDescriptor:
    """Compute the maximal-equicontinuous-factor descriptor for a scheme and
    window: trivial when the window interior is empty, else the scheme torus
    modulo the interior's period group."""
    interior = window.topo_parts()[0]
    if interior.is_empty():
        return MefDescriptor(True, None, None, {"kind": "point"}, 1)
    kernel = interior.periods()
    window_periods = window.periods()
    group = scheme.internal

    if group.kind == CYCLIC:
        gens = [list(e) for e in kernel.elements()]
        k = group.dim
        matrix = [
            [group.moduli[i] if j == i else 0 for j in range(k)] + [g[i] for g in gens]
            for i in range(k)
        ]
        diag, _ = _smith_with_left(matrix)
        moduli = [d for d in diag if d > 1]
        order = group.order // kernel.order
        desc = {"kind": "cyclic-product-torus", "moduli": moduli}
        return MefDescriptor(False, kernel, window_periods, desc, order)

    if group.kind == TORUS:
        if kernel.is_full_marker:
            return MefDescriptor(True, kernel, window_periods, {"kind": "point"}, 1)
        q = kernel.order
        return MefDescriptor(
            False, kernel, window_periods, {"kind": "torus", "covering_degree": q}, None
        )

    # euclidean internal group: the scheme torus itself, kernel is trivial
    return MefDescriptor(
        False, kernel, window_periods, {"kind": "plane-torus", "basis": [list(r) for r in scheme.basis]}, None
    )
