"""Benchmark harness: random instances, both encodings, a layer sweep.

Output layout under ``out_dir``::

    instances/sample00.json        generated instance
    runs/sample00_compact.json     training result and per-layer metrics
    metrics.csv                    sample,encoding,layers,ar,true_pct,rank
"""
from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

from .formulation import EncodingScheme, build_energy, energy_table
from .formulation.encoding import ENCODINGS
from .instances import (
    GenConfig,
    generate_instance,
    instance_to_dict,
    solve_exact_enumeration,
    solve_exact_held_karp,
)
from .metrics import run_metrics
from .optimizer import OptConfig, layerwise_train
from .simulator import run_qaoa

log = logging.getLogger(__name__)

CSV_FIELDS = ("sample", "encoding", "layers", "ar", "true_pct", "rank")
METRIC_COLUMNS = {
    "ar": "Approximation ratio",
    "true_pct": "True percentage",
    "rank": "Rank",
}
PLOT_FILES = {"ar": "approximation_ratio.svg", "true_pct": "true_percentage.svg", "rank": "rank.svg"}


@dataclass(frozen=True)
class ExperimentConfig:
    n: int = 4
    samples: int = 10
    max_layers: int = 5
    encodings: tuple[str, ...] = ENCODINGS
    seed: int = 0
    opt: OptConfig = field(default_factory=OptConfig)
    out_dir: str = "results"
    gen: GenConfig = field(default_factory=GenConfig)
    jobs: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.max_layers < 1:
            raise ValueError("max_layers must be >= 1")
        bad = [e for e in self.encodings if e not in ENCODINGS]
        if bad or not self.encodings:
            raise ValueError(f"encodings must be a nonempty subset of {ENCODINGS}, got {bad}")


@dataclass
class ExperimentResult:
    rows: list[dict]
    csv_path: Path
    failures: dict[int, str]


def _solve(inst):
    return solve_exact_enumeration(inst) if inst.n <= 9 else solve_exact_held_karp(inst)


def run_sample(cfg: ExperimentConfig, index: int) -> tuple[list[dict], dict]:
    """Generate, solve, build, train and score one instance."""
    seed = cfg.seed + index
    inst = generate_instance(cfg.n, replace(cfg.gen, seed=seed))
    solution = _solve(inst)
    opt = replace(cfg.opt, seed=seed)
    rows, runs = [], {}
    for enc in cfg.encodings:
        scheme = EncodingScheme(enc, cfg.n)
        table = energy_table(build_energy(inst, enc))
        result = layerwise_train(table, cfg.max_layers, opt)
        per_layer = []
        for p in range(1, cfg.max_layers + 1):
            psi = run_qaoa(table, result.schedule.truncated(p))
            m = run_metrics(psi, table, scheme, solution, layer=p)
            per_layer.append(m.as_dict())
            rows.append({
                "sample": index,
                "encoding": enc,
                "layers": p,
                "ar": m.approximation_ratio,
                "true_pct": m.true_percentage,
                "rank": m.rank,
            })
        runs[enc] = {
            "sample": index,
            "seed": seed,
            "encoding": enc,
            "qubits": scheme.qubit_count,
            "optimal_length": solution.length,
            "optimal_tours": sorted(list(t) for t in solution.all_optimal_tours),
            "training": result.to_dict(),
            "metrics": per_layer,
        }
    return rows, {"instance": instance_to_dict(inst), "runs": runs}


def _run_sample_safe(cfg, index):
    try:
        return index, run_sample(cfg, index), None
    except Exception as exc:  # one bad sample must not sink the sweep
        return index, None, f"{type(exc).__name__}: {exc}"


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    out = Path(cfg.out_dir)
    (out / "instances").mkdir(parents=True, exist_ok=True)
    (out / "runs").mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(json.dumps(asdict(cfg), indent=2) + "\n")

    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            outcomes = list(pool.map(_run_sample_safe, [cfg] * cfg.samples, range(cfg.samples)))
    else:
        outcomes = [_run_sample_safe(cfg, i) for i in range(cfg.samples)]

    rows, failures = [], {}
    for index, payload, error in sorted(outcomes, key=lambda o: o[0]):
        if error is not None:
            log.error("sample %d aborted: %s", index, error)
            failures[index] = error
            continue
        sample_rows, doc = payload
        rows.extend(sample_rows)
        (out / "instances" / f"sample{index:02d}.json").write_text(
            json.dumps(doc["instance"], indent=2) + "\n"
        )
        for enc, run in doc["runs"].items():
            (out / "runs" / f"sample{index:02d}_{enc}.json").write_text(
                json.dumps(run, indent=2) + "\n"
            )

    csv_path = out / "metrics.csv"
    csv_path.write_text(rows_to_csv(rows))
    return ExperimentResult(rows, csv_path, failures)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def read_metrics_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(CSV_FIELDS) - set(reader.fieldnames):
            raise ValueError(f"{path}: expected columns {','.join(CSV_FIELDS)}")
        rows = []
        for lineno, r in enumerate(reader, start=2):
            try:
                rows.append({
                    "sample": int(r["sample"]),
                    "encoding": r["encoding"],
                    "layers": int(r["layers"]),
                    "ar": float(r["ar"]),
                    "true_pct": float(r["true_pct"]),
                    "rank": float(r["rank"]),
                })
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return rows


def mean_series(rows, column: str) -> dict[str, list[tuple[int, float]]]:
    """Mean of ``column`` over samples, per encoding and layer count."""
    acc: dict[tuple[str, int], list[float]] = {}
    for r in rows:
        acc.setdefault((r["encoding"], r["layers"]), []).append(r[column])
    series: dict[str, list[tuple[int, float]]] = {}
    for (enc, p), vals in sorted(acc.items()):
        series.setdefault(enc, []).append((p, sum(vals) / len(vals)))
    return series


# ---------------------------------------------------------------------------
# SVG line charts
# ---------------------------------------------------------------------------

_COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
_W, _H = 480, 320
_ML, _MR, _MT, _MB = 64, 120, 36, 48


def _ticks(lo, hi, count=5):
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    step = (hi - lo) / (count - 1)
    return lo, hi, [lo + i * step for i in range(count)]


def svg_line_chart(series: dict, title: str, xlabel: str, ylabel: str) -> str:
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    x0, x1 = min(xs), max(xs)
    if x0 == x1:
        x0, x1 = x0 - 1, x1 + 1
    y0, y1, yticks = _ticks(min(ys), max(ys))
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def sx(x):
        return _ML + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return _MT + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="11">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="20" text-anchor="middle" font-size="13">{title}</text>',
        f'<line x1="{_ML}" y1="{_MT + ph}" x2="{_ML + pw}" y2="{_MT + ph}" stroke="black"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_MT + ph}" stroke="black"/>',
    ]
    for x in sorted(set(xs)):
        out.append(
            f'<text x="{sx(x):.2f}" y="{_MT + ph + 16}" text-anchor="middle">{x}</text>'
        )
    for y in yticks:
        out.append(
            f'<line x1="{_ML - 4}" y1="{sy(y):.2f}" x2="{_ML}" y2="{sy(y):.2f}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_ML - 6}" y="{sy(y) + 4:.2f}" text-anchor="end">{y:.4g}</text>'
        )
    out.append(
        f'<text x="{_ML + pw / 2:.1f}" y="{_H - 10}" text-anchor="middle">{xlabel}</text>'
    )
    out.append(
        f'<text x="14" y="{_MT + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {_MT + ph / 2:.1f})">{ylabel}</text>'
    )
    for i, (name, pts) in enumerate(series.items()):
        colour = _COLOURS[i % len(_COLOURS)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(f'<g class="series" data-name="{name}">')
        out.append(f'<polyline points="{coords}" fill="none" stroke="{colour}" stroke-width="2"/>')
        for x, y in pts:
            out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="{colour}"/>')
        out.append("</g>")
        ly = _MT + 14 + 18 * i
        out.append(
            f'<line x1="{_W - _MR + 12}" y1="{ly}" x2="{_W - _MR + 32}" y2="{ly}" '
            f'stroke="{colour}" stroke-width="2"/>'
        )
        out.append(f'<text x="{_W - _MR + 38}" y="{ly + 4}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plots(csv_path, out_dir) -> list[Path]:
    """Write one SVG per metric (mean over samples vs layers)."""
    rows = read_metrics_csv(csv_path)
    if not rows:
        raise ValueError(f"{csv_path}: no data rows")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for column, label in METRIC_COLUMNS.items():
        svg = svg_line_chart(mean_series(rows, column), f"{label} vs layers", "Layers", label)
        path = out / PLOT_FILES[column]
        path.write_text(svg)
        paths.append(path)
    return paths
