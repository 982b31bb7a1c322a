"""Config-file descriptors for schemes, windows, regions, and parameters.

Experiment configs are TOML: a ``[scheme]`` table, a ``[window]`` table, and
one table per command holding its parameters.  Parsing is strict: unknown
keys are rejected so typos fail loudly instead of silently running a
different experiment.  Command-line ``--override key=value`` pairs patch the
parsed config before validation.
"""

from __future__ import annotations

import copy
from typing import Optional, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - 3.10 fallback
    import tomli as tomllib

from .configurations import TorusPoint, canonical_parameter
from .errors import DescriptorError
from .groups import InternalGroup, cyclic_product, euclidean, torus
from .scheme import PHYSICAL_R, PHYSICAL_Z, Region, Scheme, build_scheme
from .window import (
    Window,
    cylinder_window,
    finite_window,
    interval_window,
)


def load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise DescriptorError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise DescriptorError(f"config parse failure in {path}: {exc}")


def apply_overrides(config: dict, overrides: Sequence[str]) -> dict:
    """Patch a parsed config with dotted-key overrides.

    Each override is ``section.key=value`` with the value parsed as a TOML
    literal (bare words fall back to strings).  Intermediate tables are
    created as needed; strict key validation still applies afterwards.
    """
    out = copy.deepcopy(config)
    for item in overrides:
        if "=" not in item:
            raise DescriptorError(f"override {item!r} is not of the form key=value")
        dotted, _, raw = item.partition("=")
        dotted = dotted.strip()
        if not dotted:
            raise DescriptorError(f"override {item!r} has an empty key")
        try:
            value = tomllib.loads(f"v = {raw}")["v"]
        except tomllib.TOMLDecodeError:
            value = raw
        node = out
        parts = dotted.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise DescriptorError(f"override {item!r} descends into a non-table")
        node[parts[-1]] = value
    return out


def check_keys(table: dict, allowed: Sequence[str], context: str) -> None:
    unknown = sorted(set(table) - set(allowed))
    if unknown:
        raise DescriptorError(
            f"unknown key {unknown[0]!r} in {context} (allowed: {', '.join(sorted(allowed))})"
        )


def _require(table: dict, key: str, context: str):
    if key not in table:
        raise DescriptorError(f"missing key {key!r} in {context}")
    return table[key]


def _int_list(value, context: str) -> list:
    if not isinstance(value, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in value
    ):
        raise DescriptorError(f"{context} must be a list of integers")
    return list(value)


def parse_scheme(table: dict) -> Scheme:
    """Build a scheme from its ``[scheme]`` table."""
    if not isinstance(table, dict):
        raise DescriptorError("[scheme] must be a table")
    physical = _require(table, "physical", "[scheme]")
    internal = _require(table, "internal", "[scheme]")

    if physical not in (PHYSICAL_Z, PHYSICAL_R):
        raise DescriptorError(f"[scheme].physical must be 'Z' or 'R', got {physical!r}")

    if internal == "cyclic":
        check_keys(table, ["physical", "internal", "moduli", "star_generator"], "[scheme]")
        moduli = _int_list(_require(table, "moduli", "[scheme]"), "[scheme].moduli")
        gen = _int_list(
            _require(table, "star_generator", "[scheme]"), "[scheme].star_generator"
        )
        if physical != PHYSICAL_Z:
            raise DescriptorError("cyclic internal groups pair with physical 'Z'")
        try:
            return build_scheme(PHYSICAL_Z, cyclic_product(moduli), star_generator=tuple(gen))
        except ValueError as exc:
            raise DescriptorError(str(exc))

    if internal == "torus":
        check_keys(table, ["physical", "internal", "slope"], "[scheme]")
        slope = _require(table, "slope", "[scheme]")
        if not isinstance(slope, (int, float)) or isinstance(slope, bool):
            raise DescriptorError("[scheme].slope must be a number")
        if physical != PHYSICAL_Z:
            raise DescriptorError("torus internal groups pair with physical 'Z'")
        try:
            return build_scheme(PHYSICAL_Z, torus(1), star_generator=(float(slope),))
        except ValueError as exc:
            raise DescriptorError(str(exc))

    if internal == "line":
        check_keys(table, ["physical", "internal", "basis"], "[scheme]")
        basis = _require(table, "basis", "[scheme]")
        if (
            not isinstance(basis, list)
            or len(basis) != 2
            or not all(isinstance(row, list) and len(row) == 2 for row in basis)
        ):
            raise DescriptorError("[scheme].basis must be two rows [g_i, h_i]")
        if physical != PHYSICAL_R:
            raise DescriptorError("line internal groups pair with physical 'R'")
        rows = tuple((float(r[0]), float(r[1])) for r in basis)
        try:
            return build_scheme(PHYSICAL_R, euclidean(1), basis=rows)
        except ValueError as exc:
            raise DescriptorError(str(exc))

    raise DescriptorError(
        f"[scheme].internal must be 'cyclic', 'torus', or 'line', got {internal!r}"
    )


def parse_window(table: dict, scheme: Scheme) -> Window:
    """Build a window over the scheme's internal group from ``[window]``."""
    if not isinstance(table, dict):
        raise DescriptorError("[window] must be a table")
    kind = _require(table, "kind", "[window]")
    group = scheme.internal

    if kind == "finite":
        check_keys(table, ["kind", "elements"], "[window]")
        raw = _require(table, "elements", "[window]")
        if not isinstance(raw, list):
            raise DescriptorError("[window].elements must be a list of elements")
        elements = set()
        for e in raw:
            coords = _int_list(e, "[window].elements entry")
            if len(coords) != group.dim:
                raise DescriptorError(
                    f"window element {coords} has dimension {len(coords)}, group needs {group.dim}"
                )
            elements.add(tuple(coords))
        try:
            return finite_window(group, elements)
        except ValueError as exc:
            raise DescriptorError(str(exc))

    if kind == "cylinder":
        check_keys(table, ["kind", "forbidden"], "[window]")
        raw = _require(table, "forbidden", "[window]")
        if not isinstance(raw, list) or len(raw) != group.dim:
            raise DescriptorError(
                f"[window].forbidden needs one residue list per coordinate ({group.dim})"
            )
        forbidden = [frozenset(_int_list(f, "[window].forbidden entry")) for f in raw]
        try:
            return cylinder_window(group, forbidden)
        except ValueError as exc:
            raise DescriptorError(str(exc))

    if kind == "interval":
        check_keys(table, ["kind", "pieces"], "[window]")
        raw = _require(table, "pieces", "[window]")
        if not isinstance(raw, list):
            raise DescriptorError("[window].pieces must be a list")
        pieces = []
        for p in raw:
            if not isinstance(p, list) or len(p) not in (2, 4):
                raise DescriptorError(
                    "[window].pieces entries are [lo, hi] or [lo, hi, closed_left, closed_right]"
                )
            lo, hi = float(p[0]), float(p[1])
            if len(p) == 2:
                lc, rc = True, True
            else:
                lc, rc = p[2], p[3]
                if not isinstance(lc, bool) or not isinstance(rc, bool):
                    raise DescriptorError("[window].pieces closure flags must be booleans")
            pieces.append((lo, hi, lc, rc))
        try:
            return interval_window(group, pieces)
        except ValueError as exc:
            raise DescriptorError(str(exc))

    raise DescriptorError(
        f"[window].kind must be 'finite', 'cylinder', or 'interval', got {kind!r}"
    )


def parse_region(value, scheme: Scheme, context: str) -> Region:
    if not isinstance(value, list) or len(value) != 2:
        raise DescriptorError(f"{context} must be [lo, hi]")
    lo, hi = value
    if scheme.physical == PHYSICAL_Z:
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
            raise DescriptorError(f"{context} needs integer endpoints for physical 'Z'")
        region = Region(lo, hi)
    else:
        region = Region(float(lo), float(hi))
    if not region.hi > region.lo:
        raise DescriptorError(f"{context} is empty: [{lo}, {hi})")
    return region


def parse_parameter(value, scheme: Scheme, context: str) -> Optional[TorusPoint]:
    """Parse an optional torus parameter table {g = ..., h = [...]}."""
    if value is None:
        return None
    if not isinstance(value, dict):
        raise DescriptorError(f"{context} must be a table with keys g, h")
    check_keys(value, ["g", "h"], context)
    g = value.get("g", 0)
    h = value.get("h")
    if h is None:
        raise DescriptorError(f"missing key 'h' in {context}")
    if not isinstance(h, list) or len(h) != scheme.internal.dim:
        raise DescriptorError(
            f"{context}.h must be a list of {scheme.internal.dim} coordinates"
        )
    try:
        return canonical_parameter(scheme, (g, tuple(h)))
    except (TypeError, ValueError) as exc:
        raise DescriptorError(f"invalid {context}: {exc}")


def parse_elements(value, group: InternalGroup, context: str) -> list:
    """Parse a list of internal group elements (lists of integers)."""
    if not isinstance(value, list):
        raise DescriptorError(f"{context} must be a list of elements")
    out = []
    for e in value:
        coords = _int_list(e, f"{context} entry")
        if len(coords) != group.dim:
            raise DescriptorError(
                f"{context} element {coords} has dimension {len(coords)}, group needs {group.dim}"
            )
        out.append(tuple(coords))
    return out
