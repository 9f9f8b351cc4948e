"""Rayleigh fading with path loss and the order statistics of the GF gains.

Power gains are unit-mean exponentials scaled by r^-alpha.  The sorted GF
gains follow classical order statistics of K iid exponentials; the joint
laws needed by the closed-form outage expressions come in an unusual
"band" convention, where the lower-indexed statistics carry lower bounds
and the top statistic an upper bound, e.g.

    minmax_band_prob(x, y)     = Pr{ h_(1) > x,  h_(K) <= y }
    triple_band_prob(x,y,z,w)  = Pr{ x < h_(k) <= y,  z < h_(k+1),  h_(K) <= w }

since those are exactly the events occurring in the outage decompositions.
All evaluators here expand into sums of exponentials with coefficient
tables exposed for the analytic layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import Geometry, RadioConfig
from .rng import CounterStream


# ---------------------------------------------------------------------------
# coefficient tables
# ---------------------------------------------------------------------------

def phi_coeffs(k_users: int) -> np.ndarray:
    """Binomial-expansion coefficients of the max-gain CDF: (-1)^i C(K, i)."""
    i = np.arange(k_users + 1)
    return np.array([math.comb(k_users, int(v)) for v in i], dtype=np.float64) * (-1.0) ** i


def pair_coeffs(i: int, j: int, k_users: int, lam: float):
    """Tables (phi1, phi2, phi3) for the joint law of h_(i), h_(j), i < j.

    Indexed [n, m] with n in 0..j-i-1, m in 0..i-1.
    """
    if not (1 <= i < j <= k_users):
        raise ValueError("need 1 <= i < j <= K")
    n = np.arange(j - i, dtype=np.float64)[:, None]
    m = np.arange(i, dtype=np.float64)[None, :]
    comb_n = np.array([math.comb(j - i - 1, int(v)) for v in range(j - i)], dtype=float)[:, None]
    comb_m = np.array([math.comb(i - 1, int(v)) for v in range(i)], dtype=float)[None, :]
    lead = math.factorial(k_users) / (
        math.factorial(i - 1) * math.factorial(k_users - j) * math.factorial(j - i - 1)
    )
    phi1 = lead * (-1.0) ** (m + n) * comb_n * comb_m * lam ** 2
    phi2 = np.broadcast_to(lam * (m + j - i - n), phi1.shape)
    phi3 = np.broadcast_to(lam * (k_users - j + n + 1) + 0.0 * m, phi1.shape)
    return phi1, phi2, phi3


def minmax_coeffs(k_users: int, lam: float):
    """Tables (mu0, mu1, mu2, mu3, c0) for the joint law of h_(1), h_(K).

    Indexed by n = 0..K-2; c0 = lam (n + 1) is the decay of the cross term.
    """
    if k_users < 2:
        raise ValueError("need K >= 2")
    n = np.arange(k_users - 1, dtype=np.float64)
    comb_n = np.array([math.comb(k_users - 2, int(v)) for v in range(k_users - 1)], dtype=float)
    mu0 = (
        math.factorial(k_users)
        / math.factorial(k_users - 2)
        * (-1.0) ** n
        * comb_n
        * lam ** 2
    )
    mu1 = mu0 / (lam ** 2 * k_users * (n + 1.0))
    mu2 = mu0 / (lam ** 2 * k_users * (k_users - n - 1.0))
    mu3 = mu0 / (lam ** 2 * (n + 1.0) * (k_users - n - 1.0))
    c0 = lam * (n + 1.0)
    return mu0, mu1, mu2, mu3, c0


def triple_coeffs(k: int, k_users: int, lam: float):
    """Tables for the joint law of h_(k), h_(k+1), h_(K), 1 <= k <= K-2.

    Returns (sigma, A, B, C, W) where sigma[n, m, i] weights the term
    exp(-(A[i] x + B[i] y + C[i] z + W[i] w)) of the four-argument band
    probability, with the base rates A0 = lam(m+1), B0 = lam(K-k-n-1),
    C0 = lam(n+1), W0 = B0 + C0 entering via the index tables
    A/B/C/W[n, m, i].  i = 0..5 maps the six exponential terms; the last
    two (W = 0) are the ones surviving high-SNR limits.
    """
    if not (1 <= k <= k_users - 2):
        raise ValueError("need 1 <= k <= K-2")
    nn = k_users - k - 1
    mm = k
    n = np.arange(nn, dtype=np.float64)[:, None]
    m = np.arange(mm, dtype=np.float64)[None, :]
    comb_n = np.array([math.comb(k_users - k - 2, int(v)) for v in range(nn)], dtype=float)[:, None]
    comb_m = np.array([math.comb(k - 1, int(v)) for v in range(mm)], dtype=float)[None, :]
    lead = math.factorial(k_users) / (math.factorial(k_users - k - 2) * math.factorial(k - 1))
    sig0 = lead * (-1.0) ** (m + n) * comb_n * comb_m * lam ** 3

    a0 = lam * (m + 1.0) + 0.0 * n
    b0 = lam * (k_users - k - n - 1.0) + 0.0 * m
    c0 = lam * (n + 1.0) + 0.0 * m
    w0 = b0 + c0

    sigma = np.empty((nn, mm, 6))
    A = np.empty((nn, mm, 6))
    B = np.empty((nn, mm, 6))
    C = np.empty((nn, mm, 6))
    W = np.empty((nn, mm, 6))
    sigma[..., 0] = sig0 / (a0 * b0 * c0)
    sigma[..., 1] = -sigma[..., 0]
    sigma[..., 2] = -sig0 / (a0 * b0 * w0)
    sigma[..., 3] = -sigma[..., 2]
    sigma[..., 4] = -sig0 / (a0 * c0 * w0)
    sigma[..., 5] = -sigma[..., 4]
    A[..., 0] = A[..., 2] = A[..., 4] = 0.0
    A[..., 1] = A[..., 3] = A[..., 5] = a0
    B[..., 0] = B[..., 2] = B[..., 4] = a0
    B[..., 1] = B[..., 3] = B[..., 5] = 0.0
    C[..., 0] = C[..., 1] = b0
    C[..., 2] = C[..., 3] = 0.0
    C[..., 4] = C[..., 5] = w0
    W[..., 0] = W[..., 1] = c0
    W[..., 2] = W[..., 3] = w0
    W[..., 4] = W[..., 5] = 0.0
    return sigma, A, B, C, W


def adjacent_top_coeffs(k_users: int, lam: float):
    """Tables for the joint law of h_(K-1), h_(K).

    Returns (coef, a, b, c, q) with coef[n, j] = mu0/(C0 lam) (-1)^(j+1),
    so that the band probability Pr{x < h_(K-1) <= y, z < h_(K) <= w}
    (valid for y <= z) is sum coef exp(-(a x + b y + c z + q w)).
    """
    if k_users < 2:
        raise ValueError("need K >= 2")
    mu0, _, _, _, c0 = minmax_coeffs(k_users, lam)
    nn = k_users - 1
    coef = np.empty((nn, 4))
    a = np.empty((nn, 4))
    b = np.empty((nn, 4))
    c = np.empty((nn, 4))
    q = np.empty((nn, 4))
    base = mu0 / (c0 * lam)
    for j in range(4):
        coef[:, j] = base * (-1.0) ** (j + 2)  # (-1)^(j+1) with 1-based j
    a[:, 0] = a[:, 3] = 0.0
    a[:, 1] = a[:, 2] = c0
    b[:, 0] = b[:, 3] = c0
    b[:, 1] = b[:, 2] = 0.0
    c[:, 0] = c[:, 1] = 0.0
    c[:, 2] = c[:, 3] = lam
    q[:, 0] = q[:, 1] = lam
    q[:, 2] = q[:, 3] = 0.0
    return coef, a, b, c, q


# ---------------------------------------------------------------------------
# distribution evaluators
# ---------------------------------------------------------------------------

def pdf_he(x, n_eve: int, r_e: float, alpha: float):
    """Density of the eavesdropper MRC gain: Gamma(N, rate r_e^alpha)."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise ValueError("gain must be nonnegative")
    rate = r_e ** alpha
    return rate ** n_eve * x ** (n_eve - 1) * np.exp(-rate * x) / math.factorial(n_eve - 1)


def cdf_max_gain(x, k_users: int, r_f: float, alpha: float):
    """CDF of the largest GF power gain, as the binomial exponential sum."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise ValueError("gain must be nonnegative")
    lam = r_f ** alpha
    phi = phi_coeffs(k_users)
    i = np.arange(k_users + 1)
    return np.sum(phi * np.exp(-np.multiply.outer(x, i * lam)), axis=-1)


def pair_pdf(x, y, i: int, j: int, k_users: int, lam: float):
    """Joint density of (h_(i), h_(j)) at x <= y."""
    phi1, phi2, phi3 = pair_coeffs(i, j, k_users, lam)
    return float(np.sum(phi1 * np.exp(-phi2 * x - phi3 * y)))


def pair_band_prob(x, y, i: int, j: int, k_users: int, lam: float) -> float:
    """Pr{ h_(i) > x, h_(j) <= y } for x <= y."""
    phi1, phi2, phi3 = pair_coeffs(i, j, k_users, lam)
    s = phi2 + phi3
    term = (
        np.exp(-s * x) / s
        + phi3 * np.exp(-s * y) / (phi2 * s)
        - np.exp(-phi2 * x - phi3 * y) / phi2
    )
    return float(np.sum(phi1 / phi3 * term))


def pair_cdf(x, y, i: int, j: int, k_users: int, lam: float) -> float:
    """Ordinary joint CDF Pr{ h_(i) <= x, h_(j) <= y } for x <= y."""
    return pair_band_prob(0.0, y, i, j, k_users, lam) - pair_band_prob(
        x, y, i, j, k_users, lam
    )


def minmax_pdf(x, y, k_users: int, lam: float) -> float:
    """Joint density of (h_(1), h_(K)) at x <= y."""
    mu0, _, _, _, c0 = minmax_coeffs(k_users, lam)
    n = np.arange(k_users - 1)
    return float(np.sum(mu0 * np.exp(-lam * (k_users - n - 1.0) * x - c0 * y)))


def minmax_band_prob(x, y, k_users: int, lam: float) -> float:
    """Pr{ h_(1) > x, h_(K) <= y } for x <= y."""
    mu0, mu1, mu2, mu3, c0 = minmax_coeffs(k_users, lam)
    n = np.arange(k_users - 1)
    klam = k_users * lam
    term = (
        mu1 * np.exp(-klam * x)
        + mu2 * np.exp(-klam * y)
        - mu3 * np.exp(-lam * (k_users - n - 1.0) * x - c0 * y)
    )
    return float(np.sum(term))


def triple_pdf(x, y, z, k: int, k_users: int, lam: float) -> float:
    """Joint density of (h_(k), h_(k+1), h_(K)) at x <= y <= z."""
    sigma, *_ = triple_coeffs(k, k_users, lam)
    nn, mm, _ = sigma.shape
    n = np.arange(nn, dtype=float)[:, None]
    m = np.arange(mm, dtype=float)[None, :]
    comb_n = np.array([math.comb(k_users - k - 2, int(v)) for v in range(nn)], dtype=float)[:, None]
    comb_m = np.array([math.comb(k - 1, int(v)) for v in range(mm)], dtype=float)[None, :]
    lead = math.factorial(k_users) / (math.factorial(k_users - k - 2) * math.factorial(k - 1))
    sig0 = lead * (-1.0) ** (m + n) * comb_n * comb_m * lam ** 3
    a0 = lam * (m + 1.0)
    b0 = lam * (k_users - k - n - 1.0)
    c0 = lam * (n + 1.0)
    return float(np.sum(sig0 * np.exp(-a0 * x - b0 * y - c0 * z)))


def triple_band_prob(x, y, z, w, k: int, k_users: int, lam: float) -> float:
    """Pr{ x < h_(k) <= y, z < h_(k+1), h_(K) <= w }, valid for y <= z <= w."""
    sigma, A, B, C, W = triple_coeffs(k, k_users, lam)
    return float(np.sum(sigma * np.exp(-(A * x + B * y + C * z + W * w))))


def adjacent_top_pdf(x, y, k_users: int, lam: float) -> float:
    """Joint density of (h_(K-1), h_(K)) at x <= y."""
    mu0, _, _, _, c0 = minmax_coeffs(k_users, lam)
    return float(np.sum(mu0 * np.exp(-c0 * x - lam * y)))


def adjacent_top_band_prob(x, y, z, w, k_users: int, lam: float) -> float:
    """Pr{ x < h_(K-1) <= y, z < h_(K) <= w }, valid for y <= z <= w."""
    coef, a, b, c, q = adjacent_top_coeffs(k_users, lam)
    return float(np.sum(coef * np.exp(-(a * x + b * y + c * z + q * w))))


def group_size_pmf(geometry: Geometry, config: RadioConfig, thresholds=None) -> np.ndarray:
    """Pr{|S_II| = k} for k = 0..K by one-dimensional quadrature.

    Conditional on the GB gain, the group size is Binomial(K, F(w)) with
    w the scaled interference tolerance; GB outage forces an empty S_II.
    """
    from scipy.integrate import quad

    from .params import Thresholds

    th = thresholds or Thresholds.from_config(config)
    k_users = config.k_users
    lam = geometry.r_f ** geometry.alpha
    rb = geometry.r_b ** geometry.alpha
    pmf = np.zeros(k_users + 1)
    pmf[0] = 1.0 - math.exp(-rb * th.alpha_b)

    def integrand(s, k):
        w = (s / th.alpha_b - 1.0) / config.rho_f
        p = -math.expm1(-lam * w)
        return (
            math.comb(k_users, k)
            * p ** k
            * (1.0 - p) ** (k_users - k)
            * rb
            * math.exp(-rb * s)
        )

    for k in range(k_users + 1):
        val, _ = quad(integrand, th.alpha_b, np.inf, args=(k,), limit=200)
        pmf[k] += val
    return pmf


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChannelRealization:
    """One fading draw: GB gain, sorted GF gains, eavesdropper MRC gain.

    ``unsorted_gk2`` carries the raw small-scale gains in user order (what
    CDF-based scheduling ranks under unequal distances); ``gains_unsorted``
    the corresponding power gains, whose sorted copy is ``hk2``.
    """

    hb2: float
    hk2: np.ndarray
    he2: float
    unsorted_gk2: np.ndarray
    gains_unsorted: np.ndarray


def stream_for(config: RadioConfig, seed: int) -> CounterStream:
    """Counter stream with the slot layout the samplers expect."""
    return CounterStream(seed, slots=config.k_users + config.n_eve + 2)


def sample_block(
    geometry: Geometry,
    config: RadioConfig,
    stream: CounterStream,
    start: int,
    count: int,
):
    """Vectorized draws for trials [start, start+count).

    Returns (hb2, gains, he2, u_sched): GB power gain, per-user power gains
    in user order (not sorted), eavesdropper MRC gain, and the scheduling
    uniform used by RUS.
    """
    k = config.k_users
    n = config.n_eve
    u = stream.uniform_block(start, count)
    e = -np.log1p(-u)
    hb2 = e[:, 0] / geometry.r_b ** geometry.alpha
    rk = geometry.user_distances(k) ** geometry.alpha
    gains = e[:, 1 : k + 1] / rk[None, :]
    he2 = e[:, k + 1 : k + 1 + n].sum(axis=1) / geometry.r_e ** geometry.alpha
    return hb2, gains, he2, u[:, k + n + 1]


def sample(
    geometry: Geometry,
    config: RadioConfig,
    stream: CounterStream,
    index: int = 0,
) -> ChannelRealization:
    """Single realization at the given trial index of the stream."""
    hb2, gains, he2, _ = sample_block(geometry, config, stream, index, 1)
    rk = geometry.user_distances(config.k_users) ** geometry.alpha
    return ChannelRealization(
        hb2=float(hb2[0]),
        hk2=np.sort(gains[0]),
        he2=float(he2[0]),
        unsorted_gk2=gains[0] * rk,
        gains_unsorted=gains[0],
    )
