"""Hot loops with a compiled backend and a numpy fallback.

The compiled extension ``_core`` is used when it imports; setting the
environment variable ``TSPQAOA_PURE_PYTHON=1`` before import forces the
numpy fallback. Both backends expose the same functions, see
:data:`KERNEL_NAMES`. :func:`get_backend` returns either module by name so
tests and benchmarks can compare them side by side.
"""
import os
from types import ModuleType

from . import _fallback

KERNEL_NAMES = (
    "zeta_int64",
    "mobius_int64",
    "walsh_int64",
    "apply_phase",
    "apply_mixer",
    "expectation",
    "held_karp",
)

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

if _core is not None and os.environ.get("TSPQAOA_PURE_PYTHON", "") not in ("1", "true", "yes"):
    _active = _core
    BACKEND = "cython"
else:
    _active = _fallback
    BACKEND = "numpy"


def available_backends() -> list[str]:
    return ["numpy"] + (["cython"] if _core is not None else [])


def get_backend(name: str) -> ModuleType:
    if name == "numpy":
        return _fallback
    if name == "cython":
        if _core is None:
            raise RuntimeError("compiled kernels are not built")
        return _core
    raise ValueError(f"unknown backend {name!r}")


zeta_int64 = _active.zeta_int64
mobius_int64 = _active.mobius_int64
walsh_int64 = _active.walsh_int64
apply_phase = _active.apply_phase
apply_mixer = _active.apply_mixer
expectation = _active.expectation
held_karp = _active.held_karp
