"""Semi-grant-free decoding model evaluated on one channel realization.

One GB user owns the resource block; one of K GF users is admitted per
slot.  The base station broadcasts the interference tolerance tau derived
from the GB link, which splits GF users into S_I (must be decoded before
the GB signal) and S_II (may be decoded after it).  Scheduling picks the
admitted user (best rate, best CDF value, or uniformly at random), and the
achievable, eavesdropping, and secrecy rates follow.

This module is the scalar reference; the Monte Carlo hot path lives in
the backend kernels and is cross-checked against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .params import Geometry, RadioConfig, Thresholds

STAGE_FIRST = "FIRST"
STAGE_SECOND = "SECOND"


@dataclass(frozen=True)
class DecodingOutcome:
    """Rates and bookkeeping for one realization under one scheme."""

    tau: float
    size_s2: int
    scheduled: int          # index into the ascending-sorted gain list
    stage: str
    rate_gf: float
    rate_gb: float
    rate_e: float
    secrecy_gf: float
    secrecy_gb: float


def tolerance_tau(hb2: float, thresholds: Thresholds) -> float:
    """Max GF interference power the GB link tolerates, clamped at zero."""
    if hb2 < 0:
        raise ValueError("power gain must be nonnegative")
    return max(0.0, hb2 / thresholds.alpha_b - 1.0)


def group_users(realization: ChannelRealization, config: RadioConfig,
                thresholds: Thresholds) -> tuple[list[int], list[int]]:
    """Split sorted user indices into (S_I, S_II) against the tolerance.

    Ties land in S_I (decode-first), so S_II is the strict prefix of the
    sorted list below tau / rho_f.
    """
    tau = tolerance_tau(realization.hb2, thresholds)
    s2 = [k for k in range(config.k_users) if config.rho_f * realization.hk2[k] < tau]
    s1 = [k for k in range(config.k_users) if k not in s2]
    assert s2 == list(range(len(s2))), "S_II must be a prefix of the sorted list"
    return s1, s2


def rate_first_stage(gain: float, hb2: float, config: RadioConfig) -> float:
    """GF rate when decoded before the GB signal (GB acts as interference)."""
    return math.log2(1.0 + config.rho_f * gain / (1.0 + config.rho_b * hb2))


def rate_second_stage(gain: float, config: RadioConfig) -> float:
    """GF rate when decoded after the GB signal has been removed."""
    return math.log2(1.0 + config.rho_f * gain)


def candidate_rate(realization: ChannelRealization, config: RadioConfig,
                   thresholds: Thresholds) -> tuple[float, int, str]:
    """Best achievable (rate, sorted index, stage) over the admissible set.

    With S_II empty or full the top user is the only candidate; otherwise
    the top user at the first stage competes with the best S_II member at
    the second stage.
    """
    _, s2 = group_users(realization, config, thresholds)
    k_top = config.k_users - 1
    n2 = len(s2)
    if n2 == config.k_users:
        return rate_second_stage(realization.hk2[k_top], config), k_top, STAGE_SECOND
    r1 = rate_first_stage(realization.hk2[k_top], realization.hb2, config)
    if n2 == 0:
        return r1, k_top, STAGE_FIRST
    r2 = rate_second_stage(realization.hk2[n2 - 1], config)
    if r2 > r1:
        return r2, n2 - 1, STAGE_SECOND
    return r1, k_top, STAGE_FIRST


def eavesdropper_rate(realization: ChannelRealization, config: RadioConfig) -> float:
    return math.log2(1.0 + config.rho_f * realization.he2)


def schedule(realization: ChannelRealization, geometry: Geometry,
             config: RadioConfig, thresholds: Thresholds,
             scheme: str, sched_uniform: float = 0.0) -> DecodingOutcome:
    """Admit one GF user under the given scheme and score the slot.

    BUS admits the user with the best achievable rate; CUS the one whose
    own-channel CDF value is largest (fair under unequal path loss); RUS a
    uniform pick driven by ``sched_uniform``.  The admitted user's stage is
    dictated by its group, except that BUS evaluates both admissible
    candidates.  Secrecy rates are clamped at zero.
    """
    tau = tolerance_tau(realization.hb2, thresholds)
    _, s2 = group_users(realization, config, thresholds)
    n2 = len(s2)

    if scheme == "BUS":
        rate_gf, scheduled, stage = candidate_rate(realization, config, thresholds)
    elif scheme in ("CUS", "RUS"):
        if scheme == "CUS":
            # per-user CDF value 1 - exp(-r_k^alpha gain_k): rank by the exponent
            rk_alpha = geometry.user_distances(config.k_users) ** geometry.alpha
            user = int(np.argmax(realization.gains_unsorted * rk_alpha))
        else:
            user = min(int(sched_uniform * config.k_users), config.k_users - 1)
        gain = realization.gains_unsorted[user]
        scheduled = int(np.searchsorted(realization.hk2, gain))
        scheduled = min(scheduled, config.k_users - 1)
        if config.rho_f * gain < tau:
            rate_gf, stage = rate_second_stage(gain, config), STAGE_SECOND
        else:
            rate_gf, stage = rate_first_stage(gain, realization.hb2, config), STAGE_FIRST
    else:
        raise ValueError(f"unknown scheduling scheme: {scheme!r}")

    gain_sched = realization.hk2[scheduled]
    if stage == STAGE_FIRST:
        rate_gb = math.log2(1.0 + config.rho_b * realization.hb2)
    else:
        rate_gb = math.log2(
            1.0 + config.rho_b * realization.hb2 / (1.0 + config.rho_f * gain_sched)
        )
    rate_e = eavesdropper_rate(realization, config)
    return DecodingOutcome(
        tau=tau,
        size_s2=n2,
        scheduled=scheduled,
        stage=stage,
        rate_gf=rate_gf,
        rate_gb=rate_gb,
        rate_e=rate_e,
        secrecy_gf=max(0.0, rate_gf - rate_e),
        secrecy_gb=max(0.0, rate_gb - rate_e),
    )


def secrecy_outage_indicator(outcome: DecodingOutcome, rate_th: float) -> int:
    """1 iff the GF secrecy rate falls strictly below the target."""
    return 1 if outcome.secrecy_gf < rate_th else 0


def gb_outage_indicator(outcome: DecodingOutcome, rate_th: float) -> int:
    """1 iff the GB secrecy rate falls strictly below the target."""
    return 1 if outcome.secrecy_gb < rate_th else 0
