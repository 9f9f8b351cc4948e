"""System parameters: node geometry, radio configuration, derived thresholds.

All SNRs here are linear (dB conversion happens at the CLI boundary only).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SCHEMES = ("BUS", "CUS", "RUS")


@dataclass(frozen=True)
class Geometry:
    """Node distances in meters and the path-loss exponent.

    ``r_f`` is the common GF-user distance used by all closed-form results.
    ``r_k`` optionally carries per-user distances for simulation of
    heterogeneous clusters (CUS is only distinct from BUS there); when
    omitted every user sits at ``r_f``.
    """

    r_b: float
    r_f: float
    r_e: float
    alpha: float
    r_k: tuple[float, ...] | None = None

    def __post_init__(self):
        for name in ("r_b", "r_f", "r_e", "alpha"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.r_k is not None and any(r <= 0 for r in self.r_k):
            raise ValueError("per-user distances must be positive")

    def user_distances(self, k_users: int) -> np.ndarray:
        if self.r_k is None:
            return np.full(k_users, self.r_f, dtype=np.float64)
        if len(self.r_k) != k_users:
            raise ValueError("len(r_k) must equal the user count")
        return np.asarray(self.r_k, dtype=np.float64)


@dataclass(frozen=True)
class RadioConfig:
    """Transmit SNRs (linear), target rates (bits/s/Hz), antenna/user counts."""

    rho_b: float
    rho_f: float
    rate_b: float
    rate_th: float
    n_eve: int
    k_users: int

    def __post_init__(self):
        if self.rho_b <= 0 or self.rho_f <= 0:
            raise ValueError("transmit SNRs must be positive")
        if self.rate_b <= 0 or self.rate_th <= 0:
            raise ValueError("target rates must be positive")
        if self.n_eve < 1:
            raise ValueError("eavesdropper antenna count must be >= 1")
        if self.k_users < 1:
            raise ValueError("user count must be >= 1")


@dataclass(frozen=True)
class Thresholds:
    """Quantities derived from the target rates and SNRs.

    theta_b = 2^rate_b, eps_b = theta_b - 1, alpha_b = eps_b / rho_b and the
    same chain for the secrecy target; alpha_b is the GB reliability
    threshold (GB outage when its power gain falls below it).
    """

    theta_b: float
    eps_b: float
    alpha_b: float
    theta_th: float
    eps_th: float
    alpha_th: float

    @classmethod
    def from_config(cls, config: RadioConfig) -> "Thresholds":
        theta_b = 2.0 ** config.rate_b
        eps_b = theta_b - 1.0
        theta_th = 2.0 ** config.rate_th
        eps_th = theta_th - 1.0
        return cls(
            theta_b=theta_b,
            eps_b=eps_b,
            alpha_b=eps_b / config.rho_b,
            theta_th=theta_th,
            eps_th=eps_th,
            alpha_th=eps_th / config.rho_f,
        )


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * np.log10(x)


def default_geometry(**overrides) -> Geometry:
    """Reference scenario: 10 m everywhere, path-loss exponent 2.2."""
    base = dict(r_b=10.0, r_f=10.0, r_e=10.0, alpha=2.2)
    base.update(overrides)
    return Geometry(**base)


def default_config(**overrides) -> RadioConfig:
    """Reference scenario: rate_b 0.9, rate_th 0.1, N 2, 10 dB SNRs."""
    base = dict(
        rho_b=db_to_linear(10.0),
        rho_f=db_to_linear(10.0),
        rate_b=0.9,
        rate_th=0.1,
        n_eve=2,
        k_users=1,
    )
    base.update(overrides)
    return RadioConfig(**base)
