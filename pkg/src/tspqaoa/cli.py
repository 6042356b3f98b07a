"""Command line entry point: ``tspqaoa <subcommand> ...``.

Options can also come from a key-value file passed with ``--config``
(``key = value`` per line, ``#`` comments); flags given on the command
line win. ``TSPQAOA_OUTPUT_DIR`` sets the default output directory.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import kernels
from .formulation import (
    BinaryPolynomial,
    EncodingScheme,
    build_energy,
    energy_table,
    gate_count,
    load_polynomial,
    pauli_expand,
    save_polynomial,
)
from .formulation.encoding import ENCODINGS
from .instances import (
    GenConfig,
    generate_instance,
    load_instance,
    save_instance,
    solve_exact_enumeration,
    solve_exact_held_karp,
)
from .metrics import run_metrics
from .optimizer import OptConfig, TrainResult, layerwise_train
from .simulator import run_qaoa

OUTPUT_ENV = "TSPQAOA_OUTPUT_DIR"

# config-file key -> argparse dest
CONFIG_KEYS = {
    "layers": "layers",
    "hops": "hops",
    "step_size": "step_size",
    "temperature": "temperature",
    "seed": "seed",
    "encoding": "encoding",
    "penalty": "penalty",
    "samples": "samples",
    "n": "n",
    "out_dir": "out_dir",
    "jobs": "jobs",
}


def read_config_file(path) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":"
        if sep not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split(sep, 1))
        if key not in CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[CONFIG_KEYS[key]] = value
    return values


def _default_out_dir():
    return os.environ.get(OUTPUT_ENV, "results")


def _print_json(doc):
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _solve(inst, method="auto"):
    if method == "enumeration" or (method == "auto" and inst.n <= 9):
        return solve_exact_enumeration(inst)
    return solve_exact_held_karp(inst)


def _opt_config(args) -> OptConfig:
    return OptConfig(
        hops=args.hops,
        step_size=args.step_size,
        temperature=args.temperature,
        seed=args.seed,
    )


def cmd_gen(args):
    inst = generate_instance(
        args.n, GenConfig(plane_size=args.plane_size, sigma_squared=args.variance, seed=args.seed)
    )
    save_instance(inst, args.out)
    print(f"wrote {args.out} (n={inst.n}, seed={args.seed})")


def cmd_solve_exact(args):
    inst = load_instance(args.instance)
    sol = _solve(inst, args.method)
    _print_json({
        "tour": list(sol.tour),
        "length": sol.length,
        "optimal_tours": sorted(list(t) for t in sol.all_optimal_tours),
    })


def cmd_build(args):
    inst = load_instance(args.instance)
    poly = build_energy(inst, args.encoding, args.penalty)
    save_polynomial(pauli_expand(poly) if args.pauli else poly, args.out)
    print(f"wrote {args.out} ({len(poly)} terms over {poly.num_vars} variables)")


def cmd_gatecount(args):
    poly = load_polynomial(args.input)
    pp = pauli_expand(poly) if isinstance(poly, BinaryPolynomial) else poly
    doc = gate_count(pp).as_dict()
    doc["qubits"] = pp.num_qubits
    _print_json(doc)


def cmd_train(args):
    inst = load_instance(args.instance)
    table = energy_table(build_energy(inst, args.encoding, args.penalty))
    cfg = _opt_config(args)

    def progress(p, gamma, beta, value):
        logging.info("layer %d: gamma=%.6f beta=%.6f <H>=%.6f", p, gamma, beta, value)

    result = layerwise_train(table, args.layers, cfg, log=progress)
    doc = {
        "instance": str(args.instance),
        "encoding": args.encoding,
        "penalty": args.penalty,
        "layers": args.layers,
        "optimizer": {"hops": cfg.hops, "step_size": cfg.step_size,
                      "temperature": cfg.temperature, "seed": cfg.seed},
        **result.to_dict(),
    }
    Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {args.out} (final expectation {result.best_value:.6f})")


def cmd_metrics(args):
    inst = load_instance(args.instance)
    doc = json.loads(Path(args.result).read_text())
    encoding = doc["encoding"]
    result = TrainResult.from_dict(doc)
    table = energy_table(build_energy(inst, encoding, doc.get("penalty")))
    scheme = EncodingScheme(encoding, inst.n)
    sol = _solve(inst)
    rows = []
    for p in range(1, len(result.schedule) + 1):
        psi = run_qaoa(table, result.schedule.truncated(p))
        rows.append(run_metrics(psi, table, scheme, sol, layer=p).as_dict())
    _print_json(rows)


def cmd_experiment(args):
    from .experiment import ExperimentConfig, emit_plots, run_experiment

    cfg = ExperimentConfig(
        n=args.n,
        samples=args.samples,
        max_layers=args.layers,
        encodings=tuple(args.encodings),
        seed=args.seed,
        opt=_opt_config(args),
        out_dir=args.out_dir or _default_out_dir(),
        jobs=args.jobs,
    )
    res = run_experiment(cfg)
    print(f"wrote {res.csv_path} ({len(res.rows)} rows)")
    if res.rows and not args.no_plots:
        for path in emit_plots(res.csv_path, Path(cfg.out_dir) / "plots"):
            print(f"wrote {path}")
    if res.failures:
        for i, reason in sorted(res.failures.items()):
            print(f"sample {i} failed: {reason}", file=sys.stderr)
        return 1
    return 0


def cmd_plot(args):
    from .experiment import emit_plots

    for path in emit_plots(args.csv, args.out_dir or _default_out_dir()):
        print(f"wrote {path}")


def _add_opt_flags(p, layers=5):
    p.add_argument("--layers", type=int, default=layers)
    p.add_argument("--hops", type=int, default=OptConfig.hops)
    p.add_argument("--step-size", dest="step_size", type=float, default=OptConfig.step_size)
    p.add_argument("--temperature", type=float, default=OptConfig.temperature)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tspqaoa", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key-value file with default option values")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variance", type=float, default=10.0)
    p.add_argument("--plane-size", dest="plane_size", type=float, default=100.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve-exact", help="optimal tour by enumeration or Held-Karp")
    p.add_argument("--instance", required=True)
    p.add_argument("--method", choices=("auto", "enumeration", "held-karp"), default="auto")
    p.set_defaults(func=cmd_solve_exact)

    p = sub.add_parser("build", help="write the energy polynomial of an instance")
    p.add_argument("--encoding", choices=ENCODINGS, required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--penalty", type=float, default=None)
    p.add_argument("--pauli", action="store_true", help="write the Pauli-Z form instead")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("gatecount", help="gate counts of a polynomial file")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_gatecount)

    p = sub.add_parser("train", help="layerwise QAOA training")
    p.add_argument("--instance", required=True)
    p.add_argument("--encoding", choices=ENCODINGS, default="compact")
    p.add_argument("--penalty", type=float, default=None)
    p.add_argument("--out", required=True)
    _add_opt_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("metrics", help="per-layer metrics of a training result")
    p.add_argument("--instance", required=True)
    p.add_argument("--result", required=True)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("experiment", help="full benchmark sweep")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--encodings", nargs="+", choices=ENCODINGS, default=list(ENCODINGS))
    p.add_argument("--out-dir", dest="out_dir", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-plots", action="store_true")
    _add_opt_flags(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("plot", help="SVG charts from a metrics CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--out-dir", dest="out_dir", default=None)
    p.set_defaults(func=cmd_plot)
    return parser


def parse_args(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        # Re-parse with file values as defaults so explicit flags still win.
        values = read_config_file(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        defaults = {}
        for dest, raw in values.items():
            if dest in known:
                action = known[dest]
                defaults[dest] = action.type(raw) if action.type else raw
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    logging.debug("kernel backend: %s", kernels.BACKEND)
    try:
        return args.func(args) or 0
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
