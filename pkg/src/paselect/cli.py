"""Command-line interface.

Exit codes: 0 success, 2 invalid input or config, 3 I/O failure.
The default output directory can be set with the PASELECT_OUT_DIR
environment variable; flags override it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__, moments, oracles
from .harness import (
    emit_outputs,
    get_preset,
    list_presets,
    load_matrix_csv,
    run_sweep,
    sweep_spec_from_config,
)
from .selection import PAConfig, pa_select
from .simulate import factor_spec_from_config, simulate_factor_model, simulate_spiked, spiked_spec_from_config

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3


def _default_out() -> str:
    return os.environ.get("PASELECT_OUT_DIR", ".")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paselect", description=__doc__)
    parser.add_argument("--version", action="version", version=f"paselect {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sel = sub.add_parser("select", help="run parallel analysis on a CSV matrix")
    p_sel.add_argument("csv", help="path to a rectangular numeric CSV (rows = samples)")
    p_sel.add_argument("--permutations", type=int, default=19, metavar="K")
    p_sel.add_argument("--percentile", type=float, default=100.0, metavar="Q")
    p_sel.add_argument("--max-rank", type=int, default=None, metavar="R")
    p_sel.add_argument("--demean", action="store_true", help="demean columns first")
    p_sel.add_argument("--no-stepwise", action="store_true", help="count every rank above threshold")
    p_sel.add_argument("--has-header", action="store_true")
    p_sel.add_argument("--seed", type=int, default=0, metavar="S")
    p_sel.add_argument("--out", default=None, metavar="DIR", help="write CSV/JSON/SVG reports here")

    p_sim = sub.add_parser("simulate", help="draw one matrix from a model config")
    p_sim.add_argument("--spec", required=True, metavar="JSON", help="model config file")
    p_sim.add_argument("--out", required=True, metavar="CSV", help="output CSV path")
    p_sim.add_argument("--seed", type=int, default=0, metavar="S")

    p_sw = sub.add_parser("sweep", help="run a parameter sweep (preset or JSON spec)")
    p_sw.add_argument("preset", nargs="?", default=None, help="preset id (see --list)")
    p_sw.add_argument("--spec", default=None, metavar="JSON", help="custom sweep config file")
    p_sw.add_argument("--list", action="store_true", help="list available presets")
    p_sw.add_argument("--replicates", type=int, default=None, metavar="N")
    p_sw.add_argument("--seed", type=int, default=None, metavar="S")
    p_sw.add_argument("--threads", type=int, default=1, metavar="T")
    p_sw.add_argument("--out", default=None, metavar="DIR")

    p_vm = sub.add_parser("verify-moments", help="check trace-moment bounds; emits JSON records")
    p_vm.add_argument("--n", type=int, default=None)
    p_vm.add_argument("--p", type=int, default=None)
    p_vm.add_argument("--k", default="2", help="comma-separated orders from {2,3,4}")
    p_vm.add_argument("--reps", type=int, default=10_000, metavar="M")
    p_vm.add_argument("--exhaustive", action="store_true",
                      help="force enumeration of all (n!)^p arrays (default n=4, p=2)")
    p_vm.add_argument("--seed", type=int, default=0, metavar="S")

    p_or = sub.add_parser("oracle", help="print closed-form reference values")
    or_sub = p_or.add_subparsers(dest="oracle_name", required=True)
    o_sh = or_sub.add_parser("shadowing-ratio")
    o_sh.add_argument("n", type=int)
    o_sh.add_argument("p", type=int)
    o_bbp = or_sub.add_parser("bbp-threshold")
    o_bbp.add_argument("gamma", type=float)
    o_pn = or_sub.add_parser("permuted-norm")
    o_pn.add_argument("theta", type=float)
    o_pn.add_argument("n", type=int)
    o_pn.add_argument("p", type=int)
    for name in ("ck", "ank"):
        o = or_sub.add_parser(name)
        o.add_argument("--k", type=int, required=True)
        o.add_argument("--n", type=int, required=True)
        grp = o.add_mutually_exclusive_group(required=True)
        grp.add_argument("--flat", type=int, metavar="P", help="v = P^(-1/2) * ones")
        grp.add_argument("--basis", type=int, metavar="P", help="v = first basis vector in R^P")
        grp.add_argument("--v-csv", metavar="FILE", help="one-column CSV holding v")
        if name == "ank":
            o.add_argument("--thetas", required=True, help="comma-separated spike strengths")
    return parser


def _oracle_vector(args) -> np.ndarray:
    if args.flat is not None:
        return np.full(args.flat, args.flat**-0.5)
    if args.basis is not None:
        v = np.zeros(args.basis)
        v[0] = 1.0
        return v
    return load_matrix_csv(args.v_csv).ravel()


def _cmd_select(args) -> int:
    X = load_matrix_csv(args.csv, has_header=args.has_header)
    cfg = PAConfig(
        num_permutations=args.permutations,
        percentile=args.percentile,
        max_rank=args.max_rank,
        stepwise=not args.no_stepwise,
        demean_columns=args.demean,
        seed=args.seed,
    )
    result = pa_select(X, cfg)
    print(f"selected_rank: {result.selected_rank}")
    shown = min(len(result.thresholds), max(result.selected_rank + 3, 5))
    for k in range(shown):
        mark = "*" if k < len(result.selected_mask) and result.selected_mask[k] else " "
        print(f"  rank {k + 1:3d}: sigma={result.observed.values[k]:.6g} "
              f"threshold={result.thresholds[k]:.6g} {mark}")
    if args.out is not None or "PASELECT_OUT_DIR" in os.environ:
        paths = emit_outputs(result, args.out or _default_out())
        for path in paths:
            print(f"wrote {path}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    with open(args.spec) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict) or "model" not in cfg:
        raise ValueError("model config must be a JSON object with a 'model' field")
    rng = np.random.default_rng(args.seed)
    if cfg["model"] == "factor":
        X = simulate_factor_model(factor_spec_from_config(cfg), rng)
    elif cfg["model"] == "spiked":
        X = simulate_spiked(spiked_spec_from_config(cfg), rng)
    else:
        raise ValueError(f"unknown model kind {cfg['model']!r}; expected 'factor' or 'spiked'")
    np.savetxt(args.out, X, delimiter=",", fmt="%.17g")
    print(f"wrote {args.out} ({X.shape[0]} x {X.shape[1]})")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    if args.list:
        print(list_presets())
        return EXIT_OK
    if (args.preset is None) == (args.spec is None):
        raise ValueError("provide exactly one of a preset id or --spec JSON")
    if args.preset is not None:
        spec = get_preset(args.preset, replicates=args.replicates, seed=args.seed)
    else:
        with open(args.spec) as fh:
            spec = sweep_spec_from_config(json.load(fh))
        if args.replicates is not None:
            from dataclasses import replace
            spec = replace(spec, replicates=args.replicates)
        if args.seed is not None:
            from dataclasses import replace
            spec = replace(spec, seed=args.seed)
    result = run_sweep(spec, threads=args.threads)
    for pt in result.points:
        print(f"param={pt.param:.6g} mean_rank={pt.mean_rank:.4g} sd={pt.sd_rank:.4g}")
    paths = emit_outputs(result, args.out or _default_out())
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_verify_moments(args) -> int:
    try:
        ks = [int(s) for s in str(args.k).split(",") if s.strip()]
    except ValueError:
        raise ValueError(f"--k must be comma-separated integers, got {args.k!r}") from None
    if args.exhaustive:
        n = args.n if args.n is not None else 4
        p = args.p if args.p is not None else 2
        mode = "exhaustive"
    else:
        n = args.n if args.n is not None else 50
        p = args.p if args.p is not None else 50
        mode = "mc"
    rng = np.random.default_rng(args.seed)
    u = moments.random_centered_unit(n, rng)
    v = moments.random_unit(p, rng)
    reports = [
        moments.check_bound(u, v, k, reps=args.reps, rng=rng, mode=mode).to_json_dict()
        for k in ks
    ]
    print(json.dumps(reports, indent=2))
    return EXIT_OK if all(r["passed"] for r in reports) else EXIT_INVALID


def _cmd_oracle(args) -> int:
    if args.oracle_name == "shadowing-ratio":
        print(f"{oracles.shadowing_ratio(args.n, args.p):.12g}")
    elif args.oracle_name == "bbp-threshold":
        print(f"{oracles.bbp_threshold_identity_noise(args.gamma):.12g}")
    elif args.oracle_name == "permuted-norm":
        print(f"{oracles.permuted_norm_heuristic(args.theta, args.n, args.p):.12g}")
    elif args.oracle_name == "ck":
        print(f"{oracles.c_k(_oracle_vector(args), args.n, args.k):.12g}")
    elif args.oracle_name == "ank":
        thetas = [float(s) for s in args.thetas.split(",") if s.strip()]
        v = _oracle_vector(args)
        print(f"{oracles.a_nk(thetas, [v] * len(thetas), args.n, args.k):.12g}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    handlers = {
        "select": _cmd_select,
        "simulate": _cmd_simulate,
        "sweep": _cmd_sweep,
        "verify-moments": _cmd_verify_moments,
        "oracle": _cmd_oracle,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
