"""Backend selection for the Monte Carlo kernels.

``SGF_SECRECY_BACKEND`` picks ``numba`` (default when importable) or
``numpy``; ``SGF_SECRECY_WORKERS`` caps the worker pool used to spread
trial chunks and sweep points.  Results never depend on either knob.
"""

from __future__ import annotations

import os

from . import _kernels

_VALID = ("numba", "numpy")


def available_backends() -> tuple[str, ...]:
    try:
        import numba  # noqa: F401

        return ("numba", "numpy")
    except ImportError:  # pragma: no cover - numba is a hard dep, but be graceful
        return ("numpy",)


def resolve_backend(name: str | None = None) -> str:
    """Backend name from the argument, the env flag, or availability."""
    name = name or os.environ.get("SGF_SECRECY_BACKEND", "").strip().lower() or None
    if name is None:
        return available_backends()[0]
    if name not in _VALID:
        raise ValueError(f"unknown backend {name!r}; expected one of {_VALID}")
    if name == "numba" and "numba" not in available_backends():
        raise RuntimeError("numba backend requested but numba is not importable")
    return name


def tally_fn(name: str | None = None):
    """The tally kernel for the resolved backend."""
    resolved = resolve_backend(name)
    return _kernels.tally_numba if resolved == "numba" else _kernels.tally_numpy


def worker_count(default: int = 1) -> int:
    raw = os.environ.get("SGF_SECRECY_WORKERS", "").strip()
    if not raw:
        return default
    n = int(raw)
    if n < 1:
        raise ValueError("SGF_SECRECY_WORKERS must be >= 1")
    return n
