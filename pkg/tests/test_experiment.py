import json
import re

import pytest

from tspqaoa import experiment
from tspqaoa.experiment import (
    CSV_FIELDS,
    ExperimentConfig,
    emit_plots,
    mean_series,
    read_metrics_csv,
    rows_to_csv,
    run_experiment,
)
from tspqaoa.optimizer import OptConfig


def small_config(tmp_path, **kw):
    base = dict(n=4, samples=2, max_layers=2, opt=OptConfig(hops=2), out_dir=str(tmp_path))
    base.update(kw)
    return ExperimentConfig(**base)


def test_rows_and_bundle(tmp_path):
    res = run_experiment(small_config(tmp_path))
    assert len(res.rows) == 2 * 2 * 2 and not res.failures
    assert (tmp_path / "config.json").exists()
    assert sorted(p.name for p in (tmp_path / "instances").iterdir()) == [
        "sample00.json", "sample01.json"]
    assert len(list((tmp_path / "runs").iterdir())) == 4
    run = json.loads((tmp_path / "runs" / "sample01_compact.json").read_text())
    assert run["qubits"] == 6 and len(run["metrics"]) == 2
    assert read_metrics_csv(res.csv_path) == [
        {k: (float(v) if k == "rank" else v) for k, v in r.items()} for r in res.rows]


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_experiment(small_config(a))
    run_experiment(small_config(b))
    for rel in ["metrics.csv", "runs/sample00_onehot.json", "instances/sample01.json"]:
        assert (a / rel).read_bytes() == (b / rel).read_bytes()


def test_parallel_matches_serial(tmp_path):
    a = run_experiment(small_config(tmp_path / "a", samples=3, max_layers=1))
    b = run_experiment(small_config(tmp_path / "b", samples=3, max_layers=1, jobs=2))
    assert a.csv_path.read_bytes() == b.csv_path.read_bytes()


def test_failing_sample_does_not_stop_others(tmp_path, monkeypatch):
    real = experiment.run_sample

    def flaky(cfg, index):
        if index == 1:
            raise RuntimeError("boom")
        return real(cfg, index)

    monkeypatch.setattr(experiment, "run_sample", flaky)
    res = run_experiment(small_config(tmp_path, samples=3, max_layers=1))
    assert set(res.failures) == {1} and "boom" in res.failures[1]
    assert sorted({r["sample"] for r in res.rows}) == [0, 2]
    assert not (tmp_path / "instances" / "sample01.json").exists()


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(samples=0)
    with pytest.raises(ValueError):
        ExperimentConfig(encodings=("gray",))


def test_mean_series():
    rows = [
        {"encoding": "compact", "layers": 1, "ar": 2.0},
        {"encoding": "compact", "layers": 1, "ar": 4.0},
        {"encoding": "onehot", "layers": 1, "ar": 5.0},
        {"encoding": "compact", "layers": 2, "ar": 1.0},
    ]
    assert mean_series(rows, "ar") == {"compact": [(1, 3.0), (2, 1.0)], "onehot": [(1, 5.0)]}


def make_csv(path, rows):
    path.write_text(rows_to_csv(rows))
    return path


def row(sample, enc, layers, ar=1.5, tp=0.1, rank=3):
    return dict(sample=sample, encoding=enc, layers=layers, ar=ar, true_pct=tp, rank=rank)


class TestPlots:
    def test_three_charts_two_series(self, tmp_path):
        rows = [row(s, e, p, ar=1 + p / 10 + s) for s in range(2)
                for e in ("compact", "onehot") for p in (1, 2, 3)]
        paths = emit_plots(make_csv(tmp_path / "m.csv", rows), tmp_path / "plots")
        assert sorted(p.name for p in paths) == [
            "approximation_ratio.svg", "rank.svg", "true_percentage.svg"]
        for p in paths:
            text = p.read_text()
            assert text.startswith("<svg")
            names = re.findall(r'<g class="series" data-name="([^"]+)"', text)
            assert names == ["compact", "onehot"]

    def test_single_row(self, tmp_path):
        paths = emit_plots(make_csv(tmp_path / "m.csv", [row(0, "compact", 1)]), tmp_path / "o")
        assert len(paths) == 3

    def test_empty_csv(self, tmp_path):
        csv = make_csv(tmp_path / "m.csv", [])
        with pytest.raises(ValueError, match="no data"):
            emit_plots(csv, tmp_path / "plots")
        assert not (tmp_path / "plots").exists()

    @pytest.mark.parametrize("text", [
        "a,b\n1,2\n",
        ",".join(CSV_FIELDS) + "\n0,compact,one,1.0,0.1,1\n",
    ])
    def test_malformed_csv(self, tmp_path, text):
        (tmp_path / "m.csv").write_text(text)
        with pytest.raises(ValueError):
            emit_plots(tmp_path / "m.csv", tmp_path / "plots")
