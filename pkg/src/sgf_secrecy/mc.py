"""Monte Carlo estimators of the GF and GB secrecy outage probabilities.

Trials are indexed on a counter-based stream, partitioned into fixed-size
chunks, and reduced through integer tallies; estimates are therefore
identical for any worker count and for both kernel backends.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import backend as _backend
from . import channel
from ._kernels import SCHEME_IDS
from .params import Geometry, RadioConfig, Thresholds

_CHUNK = 1 << 18  # fixed so that chunking never affects the stream layout


@dataclass(frozen=True)
class SopEstimate:
    """Estimated outage probability with its binomial standard error.

    ``breakdown`` splits the outage probability over the group-size
    partition |S_II| = 0..K (for K = 1 the stage aliases are included);
    the pieces sum to ``p_hat`` exactly.
    """

    p_hat: float
    trials: int
    stderr: float
    seed: int
    breakdown: dict[str, float] = field(default_factory=dict)


def _accumulate_tallies(geometry, config, scheme, trials, seed, backend_name):
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if scheme not in SCHEME_IDS:
        raise ValueError(f"unknown scheduling scheme: {scheme!r}")
    th = Thresholds.from_config(config)
    stream = channel.stream_for(config, seed)
    rk_alpha = geometry.user_distances(config.k_users) ** geometry.alpha
    tally = _backend.tally_fn(backend_name)
    scheme_id = SCHEME_IDS[scheme]

    def run_chunk(start):
        count = min(_CHUNK, trials - start)
        hb2, gains, he2, u_sched = channel.sample_block(
            geometry, config, stream, start, count
        )
        return tally(
            hb2, gains, he2, u_sched,
            config.rho_b, config.rho_f, th.alpha_b, th.theta_th,
            rk_alpha, scheme_id,
        )

    starts = range(0, trials, _CHUNK)
    workers = _backend.worker_count()
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_chunk, starts))
    else:
        parts = [run_chunk(s) for s in starts]
    return np.sum(parts, axis=0)


def _binomial_stderr(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


def estimate_sop(
    geometry: Geometry,
    config: RadioConfig,
    scheme: str = "BUS",
    trials: int = 1_000_000,
    seed: int = 0,
    backend: str | None = None,
) -> SopEstimate:
    """GF-user secrecy outage probability over i.i.d. realizations."""
    t = _accumulate_tallies(geometry, config, scheme, trials, seed, backend)
    k = config.k_users
    p = t[0] / trials
    breakdown = {
        f"size_SII={j}": t[3 + k + j] / trials for j in range(k + 1)
    }
    if k == 1:
        breakdown["stage1_outage"] = breakdown["size_SII=0"]
        breakdown["stage2_outage"] = breakdown["size_SII=1"]
    return SopEstimate(
        p_hat=p,
        trials=trials,
        stderr=_binomial_stderr(p, trials),
        seed=seed,
        breakdown=breakdown,
    )


def estimate_gb_sop(
    geometry: Geometry,
    config: RadioConfig,
    scheme: str = "BUS",
    trials: int = 1_000_000,
    seed: int = 0,
    backend: str | None = None,
) -> SopEstimate:
    """GB-user secrecy outage probability (no closed form; MC only)."""
    t = _accumulate_tallies(geometry, config, scheme, trials, seed, backend)
    k = config.k_users
    p = t[1] / trials
    breakdown = {
        f"size_SII={j}": t[4 + 2 * k + j] / trials for j in range(k + 1)
    }
    if k == 1:
        breakdown["stage1_outage"] = breakdown["size_SII=0"]
        breakdown["stage2_outage"] = breakdown["size_SII=1"]
    return SopEstimate(
        p_hat=p,
        trials=trials,
        stderr=_binomial_stderr(p, trials),
        seed=seed,
        breakdown=breakdown,
    )


def estimate_group_distribution(
    geometry: Geometry,
    config: RadioConfig,
    trials: int = 1_000_000,
    seed: int = 0,
    backend: str | None = None,
) -> np.ndarray:
    """Empirical pmf of the S_II group size, entries 0..K."""
    t = _accumulate_tallies(geometry, config, "BUS", trials, seed, backend)
    k = config.k_users
    return t[2 : 3 + k] / trials
