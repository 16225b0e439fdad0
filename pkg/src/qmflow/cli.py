"""Command-line interface.

Commands:

* ``build-glauber``   build a chain model and write its structure maps
* ``check-structure`` run the structure-map axiom checks
* ``check-cp``        positivity and unit-profile table over the time grid
* ``evolve``          evolve an observable through the four semigroup entries
* ``flow-element``    matrix element between step-function exponential vectors
* ``suite``           the full verification suite

Verification commands exit 0 exactly when every check passes, 1 when any
check fails, and 2 on bad input. Reports are deterministic: the same
config and seed give byte-identical output.
"""

import argparse
import json
import sys

import numpy as np

from .extended import build_extended_generator
from .flows import flow_matrix_element
from .linalg import apply_superop, matrix_exponential
from .serialize import (
    glauber_config_from_obj,
    load_json,
    operator_from_obj,
    operator_to_obj,
    save_json,
    step_function_from_obj,
    structure_maps_to_obj,
)
from .suite import (
    DEFAULT_TOLERANCES,
    build_model,
    check_cp_rows,
    parse_config,
    report_to_csv,
    report_to_json_bytes,
    run_suite,
    serialize_config,
)

__all__ = ["main"]


def _add_common(p, t_flag=True):
    p.add_argument("--config", help="run config JSON file")
    if t_flag:
        p.add_argument("--t", help="comma-separated time grid override")
    p.add_argument("--mode", choices=["physical", "conservative"],
                   help="normalization mode override")
    p.add_argument("--seed", type=int, help="seed override")
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                   help="tolerance override, repeatable")
    p.add_argument("--out", help="output path (stdout when omitted)")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def _build_parser():
    ap = argparse.ArgumentParser(prog="qmflow",
                                 description="Markov-flow semigroup toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-glauber", help="write chain structure maps")
    p.add_argument("--config", required=True, help="chain config JSON file")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for missing covariance tables")
    p.add_argument("--out", help="structure-map JSON path (stdout when omitted)")

    p = sub.add_parser("check-structure", help="structure-map axiom checks")
    _add_common(p)

    p = sub.add_parser("check-cp", help="positivity/unit-profile table")
    _add_common(p)

    p = sub.add_parser("evolve", help="evolve an observable entrywise")
    _add_common(p)
    p.add_argument("--observable", required=True, help="operator JSON file")

    p = sub.add_parser("flow-element", help="step-function matrix element")
    _add_common(p, t_flag=False)
    p.add_argument("--f", dest="f_path", required=True, help="left step function JSON")
    p.add_argument("--g", dest="g_path", required=True, help="right step function JSON")
    p.add_argument("--window", required=True, metavar="S,T", help="time window")
    p.add_argument("--observable", required=True, help="operator JSON file")

    p = sub.add_parser("suite", help="full verification suite")
    _add_common(p)
    return ap


def _load_run_config(args):
    obj = load_json(args.config) if args.config else {}
    rc = parse_config(obj, seed_override=getattr(args, "seed", None))
    overrides = {}
    if getattr(args, "mode", None):
        overrides["mode"] = args.mode
    if getattr(args, "t", None):
        try:
            grid = tuple(float(v) for v in args.t.split(","))
        except ValueError:
            raise ValueError(f"--t must be comma-separated numbers, got {args.t!r}")
        if any(t < 0 or not np.isfinite(t) for t in grid):
            raise ValueError("config key 't_grid' must hold nonnegative times")
        overrides["t_grid"] = grid
    tols = dict(rc.tolerances)
    for item in getattr(args, "tol", []):
        name, sep, val = item.partition("=")
        if not sep:
            raise ValueError(f"--tol expects NAME=VALUE, got {item!r}")
        if name not in DEFAULT_TOLERANCES:
            raise ValueError(f"config key 'tolerances.{name}' is not a known check tolerance")
        try:
            tols[name] = float(val)
        except ValueError:
            raise ValueError(f"--tol {name} needs a numeric value, got {val!r}")
        if not tols[name] > 0:
            raise ValueError(f"config key 'tolerances.{name}' must be a positive number")
    overrides["tolerances"] = tols
    import dataclasses
    return dataclasses.replace(rc, **overrides)


def _write(text, path):
    if path:
        mode = "wb" if isinstance(text, bytes) else "w"
        with open(path, mode) as fh:
            fh.write(text)
    else:
        data = text.decode() if isinstance(text, bytes) else text
        sys.stdout.write(data)


def _emit_report(report, args):
    if args.format == "csv":
        _write(report_to_csv(report), args.out)
    else:
        _write(report_to_json_bytes(report), args.out)
    return 0 if report.passed else 1


def _cmd_build_glauber(args):
    cfg = glauber_config_from_obj(load_json(args.config), seed=args.seed)
    from .glauber import build_glauber_structure_maps
    sm = build_glauber_structure_maps(cfg)
    obj = structure_maps_to_obj(sm)
    if args.out:
        save_json(obj, args.out)
    else:
        sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")
    return 0


def _cmd_check_structure(args):
    rc = _load_run_config(args)
    return _emit_report(run_suite(rc, groups=("structure",)), args)


def _cmd_suite(args):
    rc = _load_run_config(args)
    return _emit_report(run_suite(rc), args)


def _cmd_check_cp(args):
    rc = _load_run_config(args)
    rows, passed = check_cp_rows(rc)
    if args.format == "csv":
        lines = ["t,choi_min_eig,conservativity_residual,normalization_residual,pass"]
        for r in rows:
            lines.append(f"{r['t']!r},{r['choi_min_eig']!r},"
                         f"{r['conservativity_residual']!r},"
                         f"{r['normalization_residual']!r},"
                         f"{str(r['passed']).lower()}")
        _write("\n".join(lines) + "\n", args.out)
    else:
        obj = {"config": serialize_config(rc), "rows": rows, "passed": passed}
        _write(json.dumps(obj, sort_keys=True, indent=2) + "\n", args.out)
    return 0 if passed else 1


def _cmd_evolve(args):
    rc = _load_run_config(args)
    x = operator_from_obj(load_json(args.observable))
    sm = build_model(rc)
    if x.shape != (sm.dim, sm.dim):
        raise ValueError(
            f"observable dimension {x.shape[0]} does not match model dimension {sm.dim}")
    gen = build_extended_generator(sm, rc.mode)
    results = []
    for t in rc.t_grid:
        entry = {"t": t}
        for i in (0, 1):
            for j in (0, 1):
                p = matrix_exponential(gen.block(i, j), t)
                entry[f"P{i}{j}"] = operator_to_obj(apply_superop(p, x))
        results.append(entry)
    if args.format == "csv":
        lines = ["t,block,row,col,re,im"]
        for entry in results:
            for i in (0, 1):
                for j in (0, 1):
                    m = operator_from_obj(entry[f"P{i}{j}"])
                    for r in range(m.shape[0]):
                        for c in range(m.shape[1]):
                            lines.append(f"{entry['t']!r},{i}{j},{r},{c},"
                                         f"{float(m[r, c].real)!r},{float(m[r, c].imag)!r}")
        _write("\n".join(lines) + "\n", args.out)
    else:
        obj = {"config": serialize_config(rc), "results": results}
        _write(json.dumps(obj, sort_keys=True, indent=2) + "\n", args.out)
    return 0


def _cmd_flow_element(args):
    rc = _load_run_config(args)
    try:
        s, t = (float(v) for v in args.window.split(","))
    except ValueError:
        raise ValueError(f"--window expects S,T with numbers, got {args.window!r}")
    f = step_function_from_obj(load_json(args.f_path))
    g = step_function_from_obj(load_json(args.g_path))
    x = operator_from_obj(load_json(args.observable))
    sm = build_model(rc)
    if x.shape != (sm.dim, sm.dim):
        raise ValueError(
            f"observable dimension {x.shape[0]} does not match model dimension {sm.dim}")
    out = flow_matrix_element(sm, f, g, s, t, x, mode=rc.mode)
    if args.format == "csv":
        lines = ["row,col,re,im"]
        for r in range(out.shape[0]):
            for c in range(out.shape[1]):
                lines.append(f"{r},{c},{float(out[r, c].real)!r},{float(out[r, c].imag)!r}")
        _write("\n".join(lines) + "\n", args.out)
    else:
        obj = {"window": [s, t], "element": operator_to_obj(out)}
        _write(json.dumps(obj, sort_keys=True, indent=2) + "\n", args.out)
    return 0


_COMMANDS = {
    "build-glauber": _cmd_build_glauber,
    "check-structure": _cmd_check_structure,
    "check-cp": _cmd_check_cp,
    "evolve": _cmd_evolve,
    "flow-element": _cmd_flow_element,
    "suite": _cmd_suite,
}


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
