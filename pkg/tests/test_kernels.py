import numpy as np
import pytest

from tspqaoa import kernels
from tspqaoa.kernels import _fallback

BACKENDS = kernels.available_backends()


def subset_sum_reference(a):
    n = a.shape[0]
    return np.array([sum(a[s] for s in range(n) if s & z == s) for z in range(n)])


def walsh_reference(a):
    n = a.shape[0]
    return np.array(
        [sum(a[s] * (-1) ** bin(s & z).count("1") for s in range(n)) for z in range(n)]
    )


@pytest.mark.parametrize("name", BACKENDS)
@pytest.mark.parametrize("nbits", [0, 1, 3, 6])
def test_subset_transforms_match_reference(name, nbits, rng):
    mod = kernels.get_backend(name)
    a = rng.integers(-1000, 1000, size=1 << nbits).astype(np.int64)
    z = a.copy()
    mod.zeta_int64(z)
    np.testing.assert_array_equal(z, subset_sum_reference(a))
    mod.mobius_int64(z)
    np.testing.assert_array_equal(z, a)
    w = a.copy()
    mod.walsh_int64(w)
    np.testing.assert_array_equal(w, walsh_reference(a))


def test_fallback_transforms_accept_python_ints():
    big = 1 << 100
    a = np.array([big, -big, 3, big + 7], dtype=object)
    z = a.copy()
    _fallback.zeta_int64(z)
    assert list(z) == [big, 0, big + 3, big + 10]
    _fallback.mobius_int64(z)
    assert list(z) == list(a)


@pytest.mark.parametrize("name", BACKENDS)
def test_non_power_of_two_rejected(name):
    with pytest.raises(ValueError):
        kernels.get_backend(name).zeta_int64(np.zeros(6, dtype=np.int64))


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
class TestBackendParity:
    def test_statevector_ops(self, rng):
        core, py = kernels.get_backend("cython"), kernels.get_backend("numpy")
        for nq in (1, 4, 9):
            psi = rng.normal(size=1 << nq) + 1j * rng.normal(size=1 << nq)
            psi /= np.linalg.norm(psi)
            e = rng.uniform(-5, 5, size=1 << nq)
            a, b = psi.copy(), psi.copy()
            core.apply_phase(a, e, 0.37)
            py.apply_phase(b, e, 0.37)
            core.apply_mixer(a, -1.1)
            py.apply_mixer(b, -1.1)
            np.testing.assert_allclose(a, b, atol=1e-13)
            assert core.expectation(a, e) == pytest.approx(py.expectation(b, e), abs=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 5, 8, 11])
    def test_held_karp(self, n, rng):
        xy = rng.uniform(0, 100, size=(n, 2))
        W = np.hypot(*(xy[:, None, :] - xy[None, :, :]).transpose(2, 0, 1))
        la, ta = kernels.get_backend("cython").held_karp(W)
        lb, tb = kernels.get_backend("numpy").held_karp(W)
        assert la == lb
        assert list(ta) == list(tb)


def test_backend_selection_is_reported():
    assert kernels.BACKEND in ("cython", "numpy")
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
def test_benchmark_script_runs(capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    spec = importlib.util.spec_from_file_location("bench_kernels", path)
    bench = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(bench)
    bench.main(["--qubits", "4", "--cities", "5", "--repeat", "1"])
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split()[0] == "kernel" and len(lines) == 1 + 5 + 1


def test_env_var_forces_numpy_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, TSPQAOA_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from tspqaoa import kernels, simulator; "
         "print(kernels.BACKEND, simulator.uniform_state(2).size)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.split() == ["numpy", "4"]
