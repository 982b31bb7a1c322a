"""B-free integers as a cut-and-project specialization.

A set B of integers at least 2 defines the B-free integers: those divisible
by no element of B.  Truncating B to its first k elements gives a scheme
whose internal group collects residues modulo each element, with the window
forbidding residue 0 in every coordinate.  All quantities here are stated
for the truncated set; growing k gives monotone desk-scale sequences, never
the infinite limit itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .errors import BudgetError, DescriptorError
from .groups import InternalGroup, cyclic_product
from .scheme import PHYSICAL_Z, Scheme, build_scheme
from .window import CylinderWindow, FiniteWindow, Window, cylinder_window, finite_window

_ENTROPY_SET_BUDGET = 1 << 22  # total submasks enumerable explicitly
_ENTROPY_IE_WINDOWS = 20  # inclusion-exclusion subset cap
_ENTROPY_WORK_BUDGET = 10**8  # period * n cap
_IE_SUBSET_CAP = 20  # density inclusion-exclusion cap for non-coprime moduli


def check_primitive(b_set: Sequence[int]) -> Optional[Tuple[int, int]]:
    """Return a witness pair (a, b) with a | b, or None when primitive."""
    items = sorted(b_set)
    for i, a in enumerate(items):
        for b in items[i + 1 :]:
            if b % a == 0:
                return (a, b)
    return None


def _pairwise_coprime(items: Sequence[int]) -> bool:
    for i, a in enumerate(items):
        for b in items[i + 1 :]:
            if math.gcd(a, b) != 1:
                return False
    return True


@dataclass(frozen=True)
class BfreeSystem:
    """A truncated B-free system with its derived scheme and window."""

    b_full: Tuple[int, ...]
    truncation: int
    scheme: Scheme
    window: Window
    coprime: bool

    @property
    def truncated(self) -> Tuple[int, ...]:
        return self.b_full[: self.truncation]

    def describe(self) -> dict:
        return {
            "b": list(self.b_full),
            "truncation": self.truncation,
            "pairwise_coprime": self.coprime,
            "scheme": self.scheme.describe(),
            "window": self.window.describe(),
        }


def build_bfree(b_set: Sequence[int], truncation: Optional[int] = None) -> BfreeSystem:
    """Build the scheme and window for a truncated B-free system.

    B must be primitive (no element divides another) with elements at least
    2; it is kept sorted ascending and truncated to its first `truncation`
    elements.  Pairwise coprime truncations use the residue product group
    with one coordinate per element; otherwise the product group would not
    see a dense lattice image, so the construction falls back to the single
    cyclic group of order lcm(B), which carries the same divisibility data.
    """
    items = sorted(set(b_set))
    if len(items) != len(list(b_set)):
        dup = sorted(b for b in set(b_set) if list(b_set).count(b) > 1)[0]
        raise DescriptorError(f"B is not primitive: witness pair ({dup}, {dup})")
    if not items:
        raise DescriptorError("B must be nonempty")
    for b in items:
        if not isinstance(b, int) or isinstance(b, bool) or b < 2:
            raise DescriptorError(f"B elements must be integers >= 2, got {b!r}")
    witness = check_primitive(items)
    if witness is not None:
        raise DescriptorError(f"B is not primitive: witness pair {witness}")
    if truncation is None:
        truncation = len(items)
    if not 1 <= truncation <= len(items):
        raise DescriptorError(
            f"truncation {truncation} out of range 1..{len(items)}"
        )
    moduli = items[:truncation]
    coprime = _pairwise_coprime(moduli)
    if coprime:
        group = cyclic_product(moduli)
        scheme = build_scheme(
            PHYSICAL_Z, group, star_generator=tuple(1 % b for b in moduli)
        )
        window = cylinder_window(group, [frozenset({0})] * len(moduli))
    else:
        period = math.lcm(*moduli)
        if period > 1_000_000:
            raise BudgetError(
                f"non-coprime truncation needs the order-{period} residue group, "
                "over the 1000000 materialization budget"
            )
        group = cyclic_product([period])
        scheme = build_scheme(PHYSICAL_Z, group, star_generator=(1,))
        elements = frozenset(
            (r,) for r in range(period) if all(r % b for b in moduli)
        )
        window = finite_window(group, elements)
    return BfreeSystem(tuple(items), truncation, scheme, window, coprime)


def bfree_density_exact(sys: BfreeSystem) -> Fraction:
    """Exact density of the truncated B-free integers.

    Product form for pairwise coprime moduli; inclusion-exclusion over
    subset lcms otherwise (capped at 20 elements).
    """
    moduli = sys.truncated
    if sys.coprime:
        out = Fraction(1)
        for b in moduli:
            out *= Fraction(b - 1, b)
        return out
    if len(moduli) > _IE_SUBSET_CAP:
        raise BudgetError(
            f"inclusion-exclusion over {len(moduli)} non-coprime moduli exceeds "
            f"the 2^{_IE_SUBSET_CAP} subset budget"
        )
    total = Fraction(0)
    for mask in range(1 << len(moduli)):
        subset = [moduli[i] for i in range(len(moduli)) if mask >> i & 1]
        sign = -1 if len(subset) % 2 else 1
        total += Fraction(sign, math.lcm(*subset) if subset else 1)
    return total


def bfree_sieve(sys: BfreeSystem, limit: int) -> Tuple[int, Fraction]:
    """Count truncated-B-free integers in [1, limit] by direct sieving."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    free = bytearray(b"\x01") * (limit + 1)
    for b in sys.truncated:
        if b <= limit:
            free[b :: b] = bytearray(limit // b)
    count = int(sum(free[1:]))
    return count, Fraction(count, limit)


def scaled_coprime_pair(moduli: Sequence[int]) -> Optional[dict]:
    """Find c and a pair of elements whose quotients by c are coprime and >= 2.

    Such a pair is the length-2 shadow of a scaled copy of a pairwise
    coprime set.  Quotient 1 is excluded: an element equal to the scale
    itself divides the other, which is the degenerate case, not coprimality.
    Runs on any integer list, primitive or not.
    """
    scales = set()
    for b in moduli:
        d = 1
        while d * d <= b:
            if b % d == 0:
                scales.add(d)
                scales.add(b // d)
            d += 1
    for c in sorted(scales):
        quotients = [(b // c, b) for b in moduli if b % c == 0 and b // c >= 2]
        for i in range(len(quotients)):
            for j in range(i + 1, len(quotients)):
                if math.gcd(quotients[i][0], quotients[j][0]) == 1:
                    return {"scale": c, "pair": [quotients[i][1], quotients[j][1]]}
    return None


def haar_regularity_report(sys: BfreeSystem) -> dict:
    """Regularity structure of the truncated window.

    Any finite truncation is Haar regular outright: the internal group is
    discrete, so every point of the window carries positive mass and
    regularization changes nothing.  The report also flags whether the
    truncated set contains a scaled copy of a pairwise coprime pair (both
    quotients at least 2), the desk-scale shadow of the obstruction that
    matters for the full infinite system.
    """
    regularized = sys.window.regularize()
    return {
        "truncation": sys.truncation,
        "haar_regular": regularized.same_set(sys.window),
        "window_measure": str(sys.window.measure()),
        "scaled_coprime_pair": scaled_coprime_pair(sys.truncated),
    }


@dataclass(frozen=True)
class EntropyEstimate:
    count: int
    rate: float
    exact: bool
    method: str

    def describe(self) -> dict:
        return {
            "count": self.count,
            "rate": self.rate,
            "exact": self.exact,
            "method": self.method,
        }


def hereditary_entropy_estimate(sys: BfreeSystem, n: int) -> EntropyEstimate:
    """Count length-n words of the hereditary closure of the truncated
    B-free characteristic sequence, with the per-symbol log2 rate.

    The truncated sequence is periodic, so its length-n windows are the
    position sets of free integers in n consecutive slots, one per phase;
    hereditary words are exactly the subsets of those sets.  Counting is
    exact by explicit submask enumeration when the total fits the budget,
    exact by inclusion-exclusion when few distinct windows remain, and
    otherwise a clearly labeled upper bound (the per-phase sum, which counts
    overlaps multiply).
    """
    if n < 1:
        raise ValueError("word length must be >= 1")
    moduli = sys.truncated
    period = math.lcm(*moduli)
    if period * n > _ENTROPY_WORK_BUDGET:
        raise BudgetError(
            f"period {period} x length {n} exceeds the {_ENTROPY_WORK_BUDGET} work budget"
        )
    free = [all(r % b for b in moduli) for r in range(period)]
    windows = set()
    for t in range(period):
        mask = 0
        for i in range(n):
            if free[(t + i) % period]:
                mask |= 1 << i
        windows.add(mask)

    submask_total = sum(1 << bin(w).count("1") for w in windows)
    if submask_total <= _ENTROPY_SET_BUDGET:
        seen = set()
        for w in windows:
            sub = w
            while True:
                seen.add(sub)
                if sub == 0:
                    break
                sub = (sub - 1) & w
        count = len(seen)
        return EntropyEstimate(count, math.log2(count) / n, True, "submask-set")

    distinct = sorted(windows)
    if len(distinct) <= _ENTROPY_IE_WINDOWS:
        count = 0
        for mask in range(1, 1 << len(distinct)):
            inter = ~0
            bits = 0
            for i in range(len(distinct)):
                if mask >> i & 1:
                    inter &= distinct[i]
                    bits += 1
            sign = 1 if bits % 2 else -1
            count += sign * (1 << bin(inter & ((1 << n) - 1)).count("1"))
        return EntropyEstimate(count, math.log2(count) / n, True, "inclusion-exclusion")

    count = submask_total
    return EntropyEstimate(count, math.log2(count) / n, False, "upper-bound")
