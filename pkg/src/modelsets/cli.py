"""Command-line front end.

Every subcommand is a thin wrapper around a library call: it parses a TOML
config (plus overrides), delegates, and writes a JSON summary next to any
CSV data files.  Outputs are byte-deterministic for a fixed config and seed.
Exit codes: 0 success, 2 config problem, 3 computation refused, 4 budget
exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

from .bfree import (
    bfree_density_exact,
    bfree_sieve,
    build_bfree,
    haar_regularity_report,
    hereditary_entropy_estimate,
)
from .configurations import (
    PROJECTED,
    canonical_parameter,
    density_bound,
    empirical_density,
    generate,
    is_continuity_point,
    pattern_frequency,
    pattern_prediction,
    sample_mirsky,
    torus_parameters,
    write_points_csv,
)
from .descriptors import (
    apply_overrides,
    check_keys,
    load_config,
    parse_elements,
    parse_parameter,
    parse_region,
    parse_scheme,
    parse_window,
)
from .diffraction import autocorr_spectrum, write_autocorr_csv
from .errors import BudgetError, DescriptorError, RefusalError
from .groups import CYCLIC, Subgroup, TORUS
from .quotient import (
    mef_descriptor,
    quotient_scheme,
    quotient_window,
    verify_projection_identity,
)
from .scheme import PHYSICAL_Z, Region

SCHEMA_VERSION = 1

_COMMANDS = (
    "generate",
    "density",
    "autocorr",
    "periods",
    "regularize",
    "quotient",
    "torusparam",
    "continuity",
    "mirsky",
    "bfree",
)


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _element_str(e) -> str:
    return ",".join(repr(c) if isinstance(c, float) else str(c) for c in e)


def _subgroup_json(sub: Subgroup):
    if sub.is_full_marker:
        return "full"
    return [_element_str(e) for e in sub.elements()]


def _write_summary(args, summary: dict) -> int:
    summary = {"schema_version": SCHEMA_VERSION, **summary}
    os.makedirs(args.output, exist_ok=True)
    path = os.path.join(args.output, f"{summary['command']}_summary.json")
    text = json.dumps(_jsonable(summary), sort_keys=True, indent=2) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    sys.stdout.write(text)
    return 0


def _load(args):
    config = load_config(args.config)
    config = apply_overrides(config, args.override)
    check_keys(config, ["scheme", "window", *_COMMANDS], "config top level")
    if "scheme" not in config:
        raise DescriptorError("config needs a [scheme] table")
    if "window" not in config:
        raise DescriptorError("config needs a [window] table")
    scheme = parse_scheme(config["scheme"])
    window = parse_window(config["window"], scheme)
    return config, scheme, window


def _table(config: dict, name: str, allowed) -> dict:
    table = config.get(name, {})
    if not isinstance(table, dict):
        raise DescriptorError(f"[{name}] must be a table")
    check_keys(table, allowed, f"[{name}]")
    return table


def _require(table: dict, key: str, context: str):
    if key not in table:
        raise DescriptorError(f"missing key {key!r} in {context}")
    return table[key]


def _csv_cell(value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args) -> int:
    config, scheme, window = _load(args)
    t = _table(config, "generate", ["region", "parameter", "flavor"])
    region = parse_region(_require(t, "region", "[generate]"), scheme, "[generate].region")
    param = parse_parameter(t.get("parameter"), scheme, "[generate].parameter")
    flavor = t.get("flavor", PROJECTED)
    if flavor not in ("projected", "full"):
        raise DescriptorError(f"[generate].flavor must be 'projected' or 'full', got {flavor!r}")
    cfg = generate(scheme, window, param, region=region, flavor=flavor)
    os.makedirs(args.output, exist_ok=True)
    csv_path = os.path.join(args.output, "points.csv")
    write_points_csv(cfg, csv_path)
    return _write_summary(
        args,
        {
            "command": "generate",
            "scheme": scheme.describe(),
            "window": window.describe(),
            "region": [region.lo, region.hi],
            "flavor": flavor,
            "point_count": len(cfg),
            "points_csv": "points.csv",
        },
    )


def cmd_density(args) -> int:
    config, scheme, window = _load(args)
    t = _table(config, "density", ["scales", "parameter"])
    scales = _require(t, "scales", "[density]")
    if (
        not isinstance(scales, list)
        or not scales
        or not all(isinstance(s, int) and not isinstance(s, bool) and s > 0 for s in scales)
    ):
        raise DescriptorError("[density].scales must be a nonempty list of positive integers")
    param = parse_parameter(t.get("parameter"), scheme, "[density].parameter")
    top = max(scales)
    if scheme.physical == PHYSICAL_Z:
        region = Region(0, top)
    else:
        region = Region(-float(top), float(top))
    cfg = generate(scheme, window, param, region=region)
    rows = empirical_density(cfg, sorted(scales))
    exact = scheme.dens_l * window.measure()
    os.makedirs(args.output, exist_ok=True)
    csv_path = os.path.join(args.output, "density.csv")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        fh.write("scale,empirical,exact,abs_error\n")
        for n, emp in rows:
            err = abs(emp - exact)
            fh.write(f"{n},{_csv_cell(emp)},{_csv_cell(exact)},{_csv_cell(err)}\n")
    return _write_summary(
        args,
        {
            "command": "density",
            "scheme": scheme.describe(),
            "window": window.describe(),
            "rows": [{"scale": n, "empirical": emp} for n, emp in rows],
            "exact": exact,
            "bound": density_bound(scheme, window),
            "density_csv": "density.csv",
        },
    )


def cmd_autocorr(args) -> int:
    config, scheme, window = _load(args)
    t = _table(config, "autocorr", ["region", "parameter", "max_range", "scale"])
    region = parse_region(_require(t, "region", "[autocorr]"), scheme, "[autocorr].region")
    param = parse_parameter(t.get("parameter"), scheme, "[autocorr].parameter")
    max_range = _require(t, "max_range", "[autocorr]")
    if not isinstance(max_range, int) or isinstance(max_range, bool) or max_range < 0:
        raise DescriptorError("[autocorr].max_range must be a nonnegative integer")
    scale = t.get("scale")
    cfg = generate(scheme, window, param, region=region)
    table = autocorr_spectrum(
        scheme, window, cfg, max_range, scale=scale, threads=args.threads
    )
    os.makedirs(args.output, exist_ok=True)
    write_autocorr_csv(table, os.path.join(args.output, "autocorr.csv"))
    return _write_summary(
        args,
        {
            "command": "autocorr",
            "scheme": scheme.describe(),
            "window": window.describe(),
            "table": table.describe(),
            "autocorr_csv": "autocorr.csv",
        },
    )


def cmd_periods(args) -> int:
    config, scheme, window = _load(args)
    _table(config, "periods", [])
    return _write_summary(
        args,
        {
            "command": "periods",
            "scheme": scheme.describe(),
            "window": window.describe(),
            "H_W": _subgroup_json(window.periods()),
            "H_W_haar": _subgroup_json(window.haar_periods()),
        },
    )


def cmd_regularize(args) -> int:
    config, scheme, window = _load(args)
    _table(config, "regularize", [])
    reg = window.regularize()
    interior, closure, boundary = window.topo_parts()
    return _write_summary(
        args,
        {
            "command": "regularize",
            "scheme": scheme.describe(),
            "window": window.describe(),
            "regularized": reg.describe(),
            "changed": not reg.same_set(window),
            "measure": window.measure(),
            "regularized_measure": reg.measure(),
            "interior_measure": interior.measure(),
            "closure_measure": closure.measure(),
            "boundary_measure": boundary.measure(),
        },
    )


def cmd_quotient(args) -> int:
    config, scheme, window = _load(args)
    t = _table(
        config,
        "quotient",
        ["kernel", "kernel_order", "region", "parameter", "verify", "mef"],
    )
    group = scheme.internal
    if "kernel" in t and "kernel_order" in t:
        raise DescriptorError("[quotient] takes kernel or kernel_order, not both")
    if "kernel" in t:
        elems = parse_elements(t["kernel"], group, "[quotient].kernel")
        try:
            sub = Subgroup.from_elements(group, elems)
        except ValueError as exc:
            raise DescriptorError(f"[quotient].kernel: {exc}")
    elif "kernel_order" in t:
        q = t["kernel_order"]
        if not isinstance(q, int) or isinstance(q, bool) or q < 1:
            raise DescriptorError("[quotient].kernel_order must be a positive integer")
        if group.kind != TORUS:
            raise DescriptorError("[quotient].kernel_order applies to torus internal groups")
        sub = Subgroup.from_elements(group, [(i / q,) for i in range(q)])
    else:
        raise DescriptorError("[quotient] needs a kernel (or kernel_order for torus groups)")

    qs = quotient_scheme(scheme, sub)
    qw = quotient_window(qs, window)
    summary = {
        "command": "quotient",
        "scheme": scheme.describe(),
        "window": window.describe(),
        "kernel": _subgroup_json(sub),
        "quotient_scheme": qs.quotient.describe(),
        "quotient_window": qw.describe(),
    }
    verify = t.get("verify", False)
    if not isinstance(verify, bool):
        raise DescriptorError("[quotient].verify must be a boolean")
    if verify:
        region = parse_region(_require(t, "region", "[quotient]"), scheme, "[quotient].region")
        param = parse_parameter(t.get("parameter"), scheme, "[quotient].parameter")
        summary["verification"] = verify_projection_identity(qs, window, param, region)
    mef = t.get("mef", False)
    if not isinstance(mef, bool):
        raise DescriptorError("[quotient].mef must be a boolean")
    if mef:
        descriptor = mef_descriptor(scheme, window)
        desc = descriptor.describe()
        if "kernel" in desc:
            desc["kernel"] = _subgroup_json(descriptor.kernel)
            desc["window_periods"] = _subgroup_json(descriptor.window_periods)
        summary["mef"] = desc
    return _write_summary(args, summary)


def cmd_torusparam(args) -> int:
    config, scheme, window = _load(args)
    t = _table(config, "torusparam", ["region", "parameter"])
    region = parse_region(_require(t, "region", "[torusparam]"), scheme, "[torusparam].region")
    param = parse_parameter(t.get("parameter"), scheme, "[torusparam].parameter")
    cfg = generate(scheme, window, param, region=region)
    result = torus_parameters(scheme, window, cfg)
    x = canonical_parameter(scheme, param)
    if scheme.internal.kind == CYCLIC:
        recovered = any(p.h == x.h for p in result.points)
    else:
        recovered = result.feasible is not None and result.feasible.contains(x.h)
    return _write_summary(
        args,
        {
            "command": "torusparam",
            "scheme": scheme.describe(),
            "window": window.describe(),
            "region": [region.lo, region.hi],
            "patch_size": len(cfg),
            "input_parameter": x.describe(),
            "result": result.describe(),
            "input_recovered": recovered,
        },
    )


def cmd_continuity(args) -> int:
    config, scheme, window = _load(args)
    t = _table(config, "continuity", ["parameter", "radius"])
    radius = _require(t, "radius", "[continuity]")
    if not isinstance(radius, int) or isinstance(radius, bool) or radius < 0:
        raise DescriptorError("[continuity].radius must be a nonnegative integer")
    param = parse_parameter(t.get("parameter"), scheme, "[continuity].parameter")
    report = is_continuity_point(scheme, window, param, radius)
    return _write_summary(
        args,
        {
            "command": "continuity",
            "scheme": scheme.describe(),
            "window": window.describe(),
            **report,
        },
    )


def cmd_mirsky(args) -> int:
    config, scheme, window = _load(args)
    t = _table(config, "mirsky", ["count", "seed", "region", "pattern"])
    count = _require(t, "count", "[mirsky]")
    if not isinstance(count, int) or isinstance(count, bool) or count < 1:
        raise DescriptorError("[mirsky].count must be a positive integer")
    seed = _require(t, "seed", "[mirsky]")
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise DescriptorError("[mirsky].seed must be an integer")
    region = parse_region(_require(t, "region", "[mirsky]"), scheme, "[mirsky].region")
    pattern = t.get("pattern")
    if pattern is not None:
        if scheme.physical != PHYSICAL_Z:
            raise DescriptorError("[mirsky].pattern applies to integer-physical schemes")
        if not isinstance(pattern, list) or not all(
            isinstance(p, int) and not isinstance(p, bool) for p in pattern
        ):
            raise DescriptorError("[mirsky].pattern must be a list of integers")
        for p in pattern:
            if not region.lo <= p < region.hi:
                raise DescriptorError(
                    f"[mirsky].pattern point {p} falls outside the region [{region.lo}, {region.hi})"
                )
    if not region.lo <= 0 < region.hi:
        raise DescriptorError("[mirsky].region must contain 0 for the point-at-zero tally")

    samples = sample_mirsky(
        scheme, window, count, seed, region, threads=args.threads
    )
    zero = 0 if scheme.physical == PHYSICAL_Z else 0.0

    def stats(pat):
        freq = pattern_frequency(samples, pat)
        pred = pattern_prediction(scheme, window, pat)
        p = float(pred)
        sigma = math.sqrt(p * (1.0 - p) / count)
        return {
            "frequency": freq,
            "prediction": pred,
            "sigma": sigma,
            "within_3_sigma": abs(freq - p) <= 3.0 * sigma + 1e-12,
        }

    summary = {
        "command": "mirsky",
        "scheme": scheme.describe(),
        "window": window.describe(),
        "count": count,
        "seed": seed,
        "region": [region.lo, region.hi],
        "point_at_zero": stats([zero]),
    }
    if pattern is not None:
        summary["pattern"] = pattern
        summary["pattern_stats"] = stats(pattern)

    os.makedirs(args.output, exist_ok=True)
    csv_path = os.path.join(args.output, "mirsky.csv")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        fh.write("sample,point_at_zero,pattern\n")
        for i, cfg in enumerate(samples):
            support = set(cfg.support)
            hit0 = 1 if zero in support else 0
            if pattern is None:
                fh.write(f"{i},{hit0},\n")
            else:
                hitp = 1 if all(p in support for p in pattern) else 0
                fh.write(f"{i},{hit0},{hitp}\n")
    summary["mirsky_csv"] = "mirsky.csv"
    return _write_summary(args, summary)


def cmd_bfree(args) -> int:
    try:
        b_set = [int(x) for x in args.set.replace(" ", "").split(",") if x]
    except ValueError:
        raise DescriptorError(f"--set {args.set!r} is not a comma-separated integer list")
    if not b_set:
        raise DescriptorError("--set must name at least one integer")
    system = build_bfree(b_set, args.truncate)
    summary = {"command": "bfree", "system": system.describe()}
    if args.density:
        summary["density"] = bfree_density_exact(system)
        summary["window_measure"] = system.window.measure()
    if args.sieve is not None:
        if args.sieve < 1:
            raise DescriptorError("--sieve limit must be >= 1")
        count, density = bfree_sieve(system, args.sieve)
        exact = bfree_density_exact(system)
        summary["sieve"] = {
            "limit": args.sieve,
            "count": count,
            "density": density,
            "abs_error_vs_exact": float(abs(density - exact)),
        }
    if args.entropy_n is not None:
        summary["entropy"] = hereditary_entropy_estimate(system, args.entropy_n).describe()
    if args.report:
        summary["report"] = haar_regularity_report(system)
    return _write_summary(args, summary)


# ---------------------------------------------------------------------------
# parser / entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modelsets",
        description="Cut-and-project schemes, weak model sets, and their desk-scale identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    specs = [
        ("generate", cmd_generate, "materialize a configuration patch as CSV"),
        ("density", cmd_density, "empirical densities against the exact value"),
        ("autocorr", cmd_autocorr, "autocorrelation table, exact and empirical"),
        ("periods", cmd_periods, "window period group and Haar period group"),
        ("regularize", cmd_regularize, "Haar regularization and topology of the window"),
        ("quotient", cmd_quotient, "quotient scheme by a kernel subgroup"),
        ("torusparam", cmd_torusparam, "reconstruct torus parameters from a patch"),
        ("continuity", cmd_continuity, "boundary-orbit scan at a parameter"),
        ("mirsky", cmd_mirsky, "pattern frequencies over Haar-sampled parameters"),
    ]
    for name, fn, help_text in specs:
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="TOML experiment config")
        sp.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="patch a config key (dotted path), e.g. generate.flavor=full",
        )
        sp.add_argument("--output", default=".", help="directory for JSON/CSV artifacts")
        sp.add_argument("--threads", type=int, default=1, help="worker threads where supported")
        sp.set_defaults(func=fn)

    bf = sub.add_parser("bfree", help="B-free system: density, sieve, entropy, regularity")
    bf.add_argument("--set", required=True, help="comma-separated B elements, e.g. 2,3,5")
    bf.add_argument("--truncate", type=int, default=None, help="keep the first k elements")
    bf.add_argument("--density", action="store_true", help="exact density by inclusion-exclusion")
    bf.add_argument("--sieve", type=int, default=None, metavar="LIMIT", help="sieve [1, LIMIT]")
    bf.add_argument("--entropy-n", type=int, default=None, help="hereditary word count at length n")
    bf.add_argument("--report", action="store_true", help="Haar-regularity structure report")
    bf.add_argument("--output", default=".", help="directory for the JSON summary")
    bf.set_defaults(func=cmd_bfree)

    return parser


def _fail(code: int, message: str) -> int:
    sys.stderr.write(
        json.dumps(
            {"schema_version": SCHEMA_VERSION, "error": message, "exit_code": code},
            sort_keys=True,
        )
        + "\n"
    )
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DescriptorError as exc:
        return _fail(2, str(exc))
    except RefusalError as exc:
        return _fail(3, str(exc))
    except BudgetError as exc:
        return _fail(4, str(exc))
    except (ValueError, TypeError) as exc:
        return _fail(2, f"invalid configuration: {exc}")


if __name__ == "__main__":
    sys.exit(main())
