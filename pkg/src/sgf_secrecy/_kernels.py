"""Decision/tally kernels for the Monte Carlo hot loop.

Two interchangeable implementations of the same per-trial logic: a numba
``@njit`` trial loop and a vectorized numpy fallback.  Both consume
pre-sampled gain arrays and emit integer tallies, and both stick to plain
IEEE arithmetic (no transcendentals), so their tallies are bit-identical;
the backend flag trades wall time only.

Outage tests run in the linear SNR domain: the secrecy condition
[log2(1+s) - log2(1+e)]^+ < R_th is equivalent to 1+s < theta_th (1+e).

Tally layout (int64): [0] GF outages, [1] GB outages, [2 : 3+K] group-size
counts for |S_II| = 0..K, [3+K : 4+2K] GF outages split by |S_II|,
[4+2K : 5+3K] GB outages split by |S_II|.
"""

from __future__ import annotations

import numpy as np

SCHEME_IDS = {"BUS": 0, "CUS": 1, "RUS": 2}


def tally_size(k_users: int) -> int:
    return 2 + 3 * (k_users + 1)


def tally_numpy(hb2, gains, he2, u_sched, rho_b, rho_f, alpha_b, theta_th,
                rk_alpha, scheme_id):
    n, k = gains.shape
    gs = np.sort(gains, axis=1)
    tau = np.maximum(hb2 / alpha_b - 1.0, 0.0)
    n2 = np.sum(rho_f * gs < tau[:, None], axis=1)
    ar = np.arange(n)

    if scheme_id == 0:  # BUS
        sinr1 = rho_f * gs[:, k - 1] / (1.0 + rho_b * hb2)
        mid = (n2 > 0) & (n2 < k)
        idx2 = np.where(mid, n2 - 1, 0)
        sinr2 = rho_f * gs[ar, idx2]
        use_second = (n2 == k) | (mid & (sinr2 > sinr1))
        second_idx = np.where(n2 == k, k - 1, idx2)
        sched_gain = np.where(use_second, gs[ar, second_idx], gs[:, k - 1])
        sinr_gf = np.where(use_second, rho_f * sched_gain, sinr1)
        stage2 = use_second
    else:
        if scheme_id == 1:  # CUS: largest own-CDF value
            user = np.argmax(gains * rk_alpha[None, :], axis=1)
        else:  # RUS
            user = np.minimum((u_sched * k).astype(np.int64), k - 1)
        sched_gain = gains[ar, user]
        stage2 = rho_f * sched_gain < tau
        sinr_gf = np.where(
            stage2, rho_f * sched_gain, rho_f * sched_gain / (1.0 + rho_b * hb2)
        )

    rhs = theta_th * (1.0 + rho_f * he2)
    outage = (1.0 + sinr_gf) < rhs
    sinr_gb = np.where(
        stage2, rho_b * hb2 / (1.0 + rho_f * sched_gain), rho_b * hb2
    )
    gb_outage = (1.0 + sinr_gb) < rhs

    tallies = np.zeros(tally_size(k), dtype=np.int64)
    tallies[0] = np.count_nonzero(outage)
    tallies[1] = np.count_nonzero(gb_outage)
    tallies[2 : 3 + k] = np.bincount(n2, minlength=k + 1)
    tallies[3 + k : 4 + 2 * k] = np.bincount(n2[outage], minlength=k + 1)
    tallies[4 + 2 * k : 5 + 3 * k] = np.bincount(n2[gb_outage], minlength=k + 1)
    return tallies


def _tally_loop(hb2, gains, he2, u_sched, rho_b, rho_f, alpha_b, theta_th,
                rk_alpha, scheme_id):
    n, k = gains.shape
    tallies = np.zeros(2 + 3 * (k + 1), dtype=np.int64)
    work = np.empty(k, dtype=np.float64)
    for t in range(n):
        # ascending insertion sort of this trial's gains
        for i in range(k):
            v = gains[t, i]
            j = i
            while j > 0 and work[j - 1] > v:
                work[j] = work[j - 1]
                j -= 1
            work[j] = v
        tau = hb2[t] / alpha_b - 1.0
        if tau < 0.0:
            tau = 0.0
        n2 = 0
        for i in range(k):
            if rho_f * work[i] < tau:
                n2 += 1

        if scheme_id == 0:  # BUS
            sinr1 = rho_f * work[k - 1] / (1.0 + rho_b * hb2[t])
            if n2 == k:
                stage2 = True
                sched_gain = work[k - 1]
                sinr_gf = rho_f * sched_gain
            elif n2 == 0:
                stage2 = False
                sched_gain = work[k - 1]
                sinr_gf = sinr1
            else:
                sinr2 = rho_f * work[n2 - 1]
                if sinr2 > sinr1:
                    stage2 = True
                    sched_gain = work[n2 - 1]
                    sinr_gf = sinr2
                else:
                    stage2 = False
                    sched_gain = work[k - 1]
                    sinr_gf = sinr1
        else:
            if scheme_id == 1:  # CUS
                user = 0
                best = gains[t, 0] * rk_alpha[0]
                for i in range(1, k):
                    v = gains[t, i] * rk_alpha[i]
                    if v > best:
                        best = v
                        user = i
            else:  # RUS
                user = int(u_sched[t] * k)
                if user > k - 1:
                    user = k - 1
            sched_gain = gains[t, user]
            stage2 = rho_f * sched_gain < tau
            if stage2:
                sinr_gf = rho_f * sched_gain
            else:
                sinr_gf = rho_f * sched_gain / (1.0 + rho_b * hb2[t])

        rhs = theta_th * (1.0 + rho_f * he2[t])
        outage = (1.0 + sinr_gf) < rhs
        if stage2:
            sinr_gb = rho_b * hb2[t] / (1.0 + rho_f * sched_gain)
        else:
            sinr_gb = rho_b * hb2[t]
        gb_outage = (1.0 + sinr_gb) < rhs

        if outage:
            tallies[0] += 1
            tallies[3 + k + n2] += 1
        if gb_outage:
            tallies[1] += 1
            tallies[4 + 2 * k + n2] += 1
        tallies[2 + n2] += 1
    return tallies


_tally_numba = None


def tally_numba(*args):
    """JIT-compiled twin of :func:`tally_numpy` (compiles on first call)."""
    global _tally_numba
    if _tally_numba is None:
        from numba import njit

        _tally_numba = njit(cache=True, nogil=True)(_tally_loop)
    return _tally_numba(*args)
