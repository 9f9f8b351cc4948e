"""Closed-form exact and asymptotic secrecy outage probabilities.

The single-admitted-user result (which also covers random scheduling with
any number of GF users) decomposes the outage over the SIC stage of the
admitted user; the multi-user best-user-scheduling result decomposes it
over the size of the decode-last group S_II.  Both reduce to sums of
double Laplace-type integrals over the GB gain and the eavesdropper MRC
gain, evaluated through incomplete-gamma closed forms, Gauss-Chebyshev
rules on the finite eavesdropper band, and one adaptive quadrature for the
Gaussian-exponential tail integral.

Every helper takes a log-prefactor ``lp`` and returns exp(lp) * integral
with the prefactor folded into the inner exponentials, because the natural
factorization of the published expressions pairs overflowing exponentials
with underflowing integrals at extreme SNRs.

The selected branch follows the sign of 1 - eps_b * eps_th: it decides
whether the security constraint or the decoding-order constraint binds
first, and the two branches meet continuously at the boundary.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import channel, specfun
from .params import Geometry, RadioConfig, Thresholds

BRANCH_LT = "eps_product_lt_1"
BRANCH_GT = "eps_product_gt_1"
SINGULARITY_TOL = 1e-9
MAX_USERS_EXACT = 8
_DECAY_SPAN = 45.0  # exp(-45) ~ 3e-20, far below every tolerance in use


class BranchSingularityError(ValueError):
    """eps_b * eps_th is numerically 1; nudge a target rate and retry."""


@dataclass(frozen=True)
class SopBreakdown:
    """Total outage probability, named sub-terms, and the active branch."""

    total: float
    terms: dict[str, float]
    branch: str


@dataclass(frozen=True)
class Theorem1Coeffs:
    """Scenario constants of the single-admitted-user expression."""

    lambda1: float
    lambda2: float
    lambda3: float
    alpha1: float
    alpha3: float
    eps1: float
    eps2: float
    branch: str


@dataclass(frozen=True)
class _Ctx:
    """Derived geometry/threshold bundle shared by all terms."""

    n: int
    rho_b: float
    rho_f: float
    rba: float
    rfa: float
    rea: float
    rean: float
    gamma_n: float
    th: Thresholds
    alpha1: float
    alpha3: float
    eps1: float
    nodes: int


def _make_ctx(geometry: Geometry, config: RadioConfig, nodes: int) -> _Ctx:
    th = Thresholds.from_config(config)
    product = th.eps_b * th.eps_th
    if abs(product - 1.0) < SINGULARITY_TOL:
        raise BranchSingularityError(
            "eps_b * eps_th is within 1e-9 of the branch boundary; "
            "perturb rate_b or rate_th"
        )
    n = config.n_eve
    return _Ctx(
        n=n,
        rho_b=config.rho_b,
        rho_f=config.rho_f,
        rba=geometry.r_b ** geometry.alpha,
        rfa=geometry.r_f ** geometry.alpha,
        rea=geometry.r_e ** geometry.alpha,
        rean=(geometry.r_e ** geometry.alpha) ** n,
        gamma_n=math.factorial(n - 1),
        th=th,
        alpha1=(1.0 - product) / (config.rho_f * th.theta_th * th.eps_b),
        alpha3=th.theta_b / (config.rho_f * th.theta_th * config.rho_b * th.eps_b),
        eps1=th.alpha_b * th.theta_th,
        nodes=nodes,
    )


def theorem1_coeffs(geometry: Geometry, config: RadioConfig) -> Theorem1Coeffs:
    ctx = _make_ctx(geometry, config, nodes=1)
    th = ctx.th
    return Theorem1Coeffs(
        lambda1=ctx.rfa * ctx.rho_b * th.theta_th,
        lambda2=ctx.rfa * ctx.rho_b * th.alpha_th + ctx.rba,
        lambda3=ctx.rfa * th.theta_th + ctx.rea,
        alpha1=ctx.alpha1,
        alpha3=ctx.alpha3,
        eps1=ctx.eps1,
        eps2=ctx.rfa / (config.rho_f * th.alpha_b) + ctx.rba,
        branch=BRANCH_LT if th.eps_b * th.eps_th < 1.0 else BRANCH_GT,
    )


# ---------------------------------------------------------------------------
# the omega double integrals (GB gain x, eavesdropper gain y)
# ---------------------------------------------------------------------------
# omega1: x in (0, alpha_b),        y in (0, inf)
# omega2: x in (alpha_b, inf),      y in (alpha1, inf)
# omega3: x in (alpha_b, alpha2(y)),y in (0, alpha1)
# omega4: x in (alpha_b, inf),      y in (0, inf)
# each of integrand y^{N-1} exp(-(a x y + b x + c y)), times exp(lp).

def omega4(ctx: _Ctx, a: float, b: float, c: float, lp: float = 0.0) -> float:
    alpha_b = ctx.th.alpha_b
    if a == 0.0:
        return math.exp(lp - b * alpha_b) * ctx.gamma_n / (b * c ** ctx.n)
    x = b * alpha_b + b * c / a
    scaled = specfun.upper_incomplete_gamma(1 - ctx.n, x, scaled=True)
    return (
        b ** (ctx.n - 1)
        * ctx.gamma_n
        / a ** ctx.n
        * math.exp(lp - b * alpha_b)
        * scaled
    )


def omega1(ctx: _Ctx, a: float, b: float, c: float, lp: float = 0.0) -> float:
    alpha_b = ctx.th.alpha_b
    if a == 0.0:
        return -math.expm1(-b * alpha_b) * math.exp(lp) * ctx.gamma_n / (b * c ** ctx.n)
    t1 = specfun.upper_incomplete_gamma(1 - ctx.n, b * c / a, scaled=True)
    t2 = math.exp(-b * alpha_b) * specfun.upper_incomplete_gamma(
        1 - ctx.n, b * alpha_b + b * c / a, scaled=True
    )
    return b ** (ctx.n - 1) * ctx.gamma_n / a ** ctx.n * math.exp(lp) * (t1 - t2)


def _band_integral(ctx: _Ctx, a: float, b: float, c: float, lp: float) -> float:
    """exp(lp) * integral over y in (0, alpha1) of y^{N-1} e^{-(a alpha_b + c) y} / (a y + b).

    Gauss-Chebyshev on (0, min(alpha1, decay span)); the integrand is
    entire apart from a pole on the negative axis, so the rule converges
    spectrally.
    """
    decay = a * ctx.th.alpha_b + c
    upper = ctx.alpha1
    if decay > 0:
        upper = min(upper, (_DECAY_SPAN + 10.0 * ctx.n) / decay)
    rule = specfun.gauss_chebyshev_rule(ctx.nodes, upper)
    y = rule.nodes
    vals = y ** (ctx.n - 1) / (a * y + b) * np.exp(lp - decay * y)
    return float(np.sum(rule.weights * vals))


def omega2(ctx: _Ctx, a: float, b: float, c: float, lp: float = 0.0) -> float:
    return omega4(ctx, a, b, c, lp) - _band_integral(
        ctx, a, b, c, lp - b * ctx.th.alpha_b
    )


def omega3(ctx: _Ctx, a: float, b: float, c: float, lp: float = 0.0) -> float:
    piece1 = _band_integral(ctx, a, b, c, lp - b * ctx.th.alpha_b)

    # second piece: the x upper limit alpha2(y) = alpha3/(alpha1-y) - 1/rho_b
    decay = c - a / ctx.rho_b
    upper = ctx.alpha1
    if decay > 0:
        upper = min(upper, (_DECAY_SPAN + 10.0 * ctx.n) / decay)
    rule = specfun.gauss_chebyshev_rule(ctx.nodes, upper)
    y = rule.nodes
    expo = (
        lp
        + a * ctx.alpha3
        + b / ctx.rho_b
        - decay * y
        - ctx.alpha3 * (a * ctx.alpha1 + b) / (ctx.alpha1 - y)
    )
    vals = y ** (ctx.n - 1) / (a * y + b) * np.exp(expo)
    return piece1 - float(np.sum(rule.weights * vals))


# ---------------------------------------------------------------------------
# GB-gain segment integrals for the multi-user group terms
# ---------------------------------------------------------------------------
# inner integral over the GB gain s on a segment, outer over the
# eavesdropper gain t in (0, inf) with weight t^{N-1} e^{-qc t}; the
# segment boundary (rho_f t + 1) eps1 is where the decode-order and
# security constraints cross.

def _q_full(ctx: _Ctx, u: float, p: float, qc: float, lp: float) -> float:
    """exp(lp) * integral, s from alpha_b to infinity."""
    alpha_b = ctx.th.alpha_b
    if u == 0.0:
        return math.exp(lp - p * alpha_b) * ctx.gamma_n / (p * qc ** ctx.n)
    x = p * alpha_b + p * qc / u
    scaled = specfun.upper_incomplete_gamma(1 - ctx.n, x, scaled=True)
    return (
        p ** (ctx.n - 1) * ctx.gamma_n / u ** ctx.n * math.exp(lp - p * alpha_b) * scaled
    )


def _j_upper(ctx: _Ctx, u: float, p: float, qc: float, lp: float) -> float:
    """exp(lp) * integral, s from (rho_f t + 1) eps1 to infinity."""
    pref = math.exp(lp - p * ctx.eps1)
    if pref == 0.0:
        return 0.0
    c2 = u * ctx.rho_f * ctx.eps1
    f2 = u * ctx.eps1 + p * ctx.rho_f * ctx.eps1 + qc
    return pref * specfun.omega5_weighted(ctx.n, u, p, c2, f2)


def _j_lower(ctx: _Ctx, u: float, p: float, qc: float, lp: float) -> float:
    """exp(lp) * integral, s from alpha_b to (rho_f t + 1) eps1."""
    return _q_full(ctx, u, p, qc, lp) - _j_upper(ctx, u, p, qc, lp)


# ---------------------------------------------------------------------------
# single admitted user (K = 1, and random scheduling for any K)
# ---------------------------------------------------------------------------

def sop_single_exact(
    geometry: Geometry, config: RadioConfig, nodes: int = 128
) -> SopBreakdown:
    """Exact outage probability when a single GF user occupies the slot.

    Valid for K = 1 under every scheme and for random user scheduling at
    any K, where the admitted gain is a plain exponential.
    """
    ctx = _make_ctx(geometry, config, nodes)
    th = ctx.th
    lam1 = ctx.rfa * ctx.rho_b * th.theta_th
    lam2 = ctx.rfa * ctx.rho_b * th.alpha_th + ctx.rba
    lam3 = ctx.rfa * th.theta_th + ctx.rea
    eps2 = ctx.rfa / (ctx.rho_f * th.alpha_b) + ctx.rba
    pref = ctx.rba * ctx.rean / ctx.gamma_n

    terms: dict[str, float] = {}
    terms["P_I_1"] = (
        1.0
        - math.exp(-ctx.rba * th.alpha_b)
        - pref * omega1(ctx, lam1, lam2, lam3, lp=-ctx.rfa * th.alpha_th)
    )
    if th.eps_b * th.eps_th < 1.0:
        branch = BRANCH_LT
        terms["P_I_21"] = (
            math.exp(-ctx.rba * th.alpha_b)
            * ctx.rba
            * specfun.gamma_upper_int(ctx.n, ctx.rea * ctx.alpha1)
            / (eps2 * ctx.gamma_n)
            + pref * omega3(ctx, 0.0, eps2, ctx.rea, lp=ctx.rfa / ctx.rho_f)
            - pref
            * (
                omega2(ctx, lam1, lam2, lam3, lp=-ctx.rfa * th.alpha_th)
                + omega3(ctx, lam1, lam2, lam3, lp=-ctx.rfa * th.alpha_th)
            )
        )
    else:
        branch = BRANCH_GT
        terms["P_I_22"] = ctx.rba * math.exp(-ctx.rba * th.alpha_b) / eps2 - pref * omega4(
            ctx, lam1, lam2, lam3, lp=-ctx.rfa * th.alpha_th
        )
    denom = ctx.rfa + ctx.rba * ctx.rho_f * th.alpha_b
    terms["P_II"] = (
        ctx.rfa * math.exp(-ctx.rba * th.alpha_b) / denom
        - ctx.rfa
        * ctx.rean
        * math.exp(-(ctx.rfa * th.alpha_th + ctx.rba * ctx.eps1))
        / (denom * (ctx.rba * ctx.rho_f * ctx.eps1 + lam3) ** ctx.n)
    )
    return _finalize(terms, branch)


def sop_single_asym_rho_b(geometry: Geometry, config: RadioConfig) -> float:
    """High GB-SNR floor: the admitted signal always decodes second."""
    th = Thresholds.from_config(config)
    rfa = geometry.r_f ** geometry.alpha
    ratio = (geometry.r_f / geometry.r_e) ** geometry.alpha
    return 1.0 - math.exp(-rfa * th.alpha_th) * (1.0 + ratio * th.theta_th) ** (
        -config.n_eve
    )


def sop_single_asym_rho_f(geometry: Geometry, config: RadioConfig) -> float:
    """High GF-SNR floor: the admitted signal always decodes first."""
    th = Thresholds.from_config(config)
    n = config.n_eve
    rba = geometry.r_b ** geometry.alpha
    x = rba / (config.rho_b * th.theta_th) * (
        th.theta_th + (geometry.r_e / geometry.r_f) ** geometry.alpha
    )
    scaled = specfun.upper_incomplete_gamma(1 - n, x, scaled=True)
    return (
        1.0
        - (geometry.r_b / geometry.r_f) ** (n * geometry.alpha)
        * ((geometry.r_e ** geometry.alpha) / (config.rho_b * th.theta_th)) ** n
        * scaled
    )


def _asym_both_parts(geometry: Geometry, config: RadioConfig) -> tuple[float, float]:
    th = Thresholds.from_config(config)
    n = config.n_eve
    rb_rf = (geometry.r_b / geometry.r_f) ** geometry.alpha
    chi1 = th.theta_th * (geometry.r_f / geometry.r_e) ** geometry.alpha
    chi2 = th.eps_b * th.theta_th * (geometry.r_b / geometry.r_e) ** geometry.alpha + 1.0
    p1 = 1.0 - 1.0 / (1.0 + th.eps_b * rb_rf)
    p2 = (1.0 + th.eps_b * rb_rf) ** -1 * (1.0 - (chi1 + chi2) ** -n)
    return p1, p2


def sop_single_asym_both(geometry: Geometry, config: RadioConfig) -> float:
    """Joint high-SNR constant; depends on rates and distances only."""
    p1, p2 = _asym_both_parts(geometry, config)
    return p1 + p2


# ---------------------------------------------------------------------------
# multiple GF users, best-user scheduling
# ---------------------------------------------------------------------------

def sop_multi_exact(
    geometry: Geometry, config: RadioConfig, nodes: int = 128
) -> SopBreakdown:
    """Exact outage probability with best-user scheduling, K >= 2."""
    k_users = config.k_users
    if k_users < 2:
        raise ValueError("sop_multi_exact requires K >= 2; use sop_single_exact")
    if k_users > MAX_USERS_EXACT:
        warnings.warn(
            "alternating binomial sums lose digits beyond K = 8; "
            "treat results as indicative",
            stacklevel=2,
        )
    ctx = _make_ctx(geometry, config, nodes)
    th = ctx.th
    lt_branch = th.eps_b * th.eps_th < 1.0
    pref = ctx.rba * ctx.rean / ctx.gamma_n
    lam1 = ctx.rfa * ctx.rho_b * th.theta_th

    terms: dict[str, float] = {}

    # --- empty S_II, GB link itself in outage -----------------------------
    phi = channel.phi_coeffs(k_users)
    parts = []
    for i in range(k_users + 1):
        eps3 = i * ctx.rfa * ctx.rho_b * th.alpha_th + ctx.rba
        eps4 = i * ctx.rfa * th.theta_th + ctx.rea
        parts.append(
            phi[i] * pref * omega1(ctx, i * lam1, eps3, eps4, lp=-i * ctx.rfa * th.alpha_th)
        )
    terms["P_out_1_1"] = math.fsum(parts)

    # --- empty S_II, GB link fine ------------------------------------------
    mu0, mu1, mu2, mu3, c0 = channel.minmax_coeffs(k_users, ctx.rfa)
    alpha4 = k_users * ctx.rfa / (ctx.rho_f * th.alpha_b) + ctx.rba
    omega_pair = (
        (lambda *a, lp: omega2(ctx, *a, lp=lp) + omega3(ctx, *a, lp=lp))
        if lt_branch
        else (lambda *a, lp: omega4(ctx, *a, lp=lp))
    )
    parts = []
    for idx in range(k_users - 1):
        eta1 = k_users * ctx.rfa * ctx.rho_b * th.theta_th
        eta2 = k_users * ctx.rfa * ctx.rho_b * th.alpha_th + ctx.rba
        eta3 = k_users * ctx.rfa * th.theta_th + ctx.rea
        eta4 = c0[idx] * ctx.rho_b * th.theta_th
        eta5 = (
            c0[idx] * ctx.rho_b * th.alpha_th
            + (k_users * ctx.rfa - c0[idx]) / (ctx.rho_f * th.alpha_b)
            + ctx.rba
        )
        eta6 = c0[idx] * th.theta_th + ctx.rea
        parts.append(
            pref
            * (
                mu1[idx]
                * omega_pair(0.0, alpha4, ctx.rea, lp=k_users * ctx.rfa / ctx.rho_f)
                + mu2[idx]
                * omega_pair(eta1, eta2, eta3, lp=-k_users * ctx.rfa * th.alpha_th)
                - mu3[idx]
                * omega_pair(
                    eta4,
                    eta5,
                    eta6,
                    lp=(k_users * ctx.rfa - c0[idx]) / ctx.rho_f
                    - c0[idx] * th.alpha_th,
                )
            )
        )
    terms["P_out_1_21" if lt_branch else "P_out_1_22"] = math.fsum(parts)

    # --- full S_II ----------------------------------------------------------
    parts = []
    for i in range(k_users + 1):
        denom = i * ctx.rfa + ctx.rba * ctx.rho_f * th.alpha_b
        parts.append(
            phi[i]
            / denom
            * (
                i
                * ctx.rfa
                * ctx.rean
                * math.exp(-(i * ctx.rfa * th.alpha_th + ctx.rba * ctx.eps1))
                / (i * ctx.rfa * th.theta_th + ctx.rba * ctx.rho_f * ctx.eps1 + ctx.rea)
                ** ctx.n
                + ctx.rho_f * th.alpha_b * ctx.rba * math.exp(-ctx.rba * th.alpha_b)
            )
        )
    terms["P_out_2"] = math.fsum(parts)

    # --- partial S_II --------------------------------------------------------
    p3_parts = []
    for k in range(1, k_users - 1):
        sigma, A, B, C, W = channel.triple_coeffs(k, k_users, ctx.rfa)
        chunk = []
        for (ni, mi, ii), sig in np.ndenumerate(sigma):
            b_i, c_i, w_i = B[ni, mi, ii], C[ni, mi, ii], W[ni, mi, ii]
            xi1 = w_i * th.alpha_th - (b_i + c_i) / ctx.rho_f
            xi2 = w_i * th.theta_th + ctx.rea
            xi3 = w_i * ctx.rho_b * th.alpha_th + (b_i + c_i) / (ctx.rho_f * th.alpha_b) + ctx.rba
            u1 = w_i * ctx.rho_b * th.theta_th
            xi4 = (b_i + w_i) * th.alpha_th - c_i / ctx.rho_f
            xi5 = (b_i + w_i) * th.theta_th + ctx.rea
            xi6 = w_i * ctx.rho_b * th.alpha_th + c_i / (ctx.rho_f * th.alpha_b) + ctx.rba
            chunk.append(
                sig
                * (
                    _j_lower(ctx, u1, xi3, xi2, lp=-xi1)
                    + _j_upper(ctx, u1, xi6, xi5, lp=-xi4)
                )
            )
        term_k = pref * math.fsum(chunk)
        terms[f"P_out_3_k{k}"] = term_k
        p3_parts.append(term_k)

    coef, a_j, b_j, c_j, q_j = channel.adjacent_top_coeffs(k_users, ctx.rfa)
    chunk = []
    for (ni, ji), cf in np.ndenumerate(coef):
        bj, cj, qj = b_j[ni, ji], c_j[ni, ji], q_j[ni, ji]
        zeta1 = qj * th.alpha_th - (bj + cj) / ctx.rho_f
        zeta2 = qj * th.theta_th + ctx.rea
        zeta3 = qj * ctx.rho_b * th.alpha_th + (bj + cj) / (ctx.rho_f * th.alpha_b) + ctx.rba
        u2 = qj * ctx.rho_b * th.theta_th
        zeta4 = (bj + qj) * th.alpha_th - cj / ctx.rho_f
        zeta5 = (bj + qj) * th.theta_th + ctx.rea
        zeta6 = qj * ctx.rho_b * th.alpha_th + cj / (ctx.rho_f * th.alpha_b) + ctx.rba
        chunk.append(
            cf
            * (
                _j_lower(ctx, u2, zeta3, zeta2, lp=-zeta1)
                + _j_upper(ctx, u2, zeta6, zeta5, lp=-zeta4)
            )
        )
    term_top = pref * math.fsum(chunk)
    terms[f"P_out_3_k{k_users - 1}"] = term_top
    p3_parts.append(term_top)
    terms["P_out_3"] = math.fsum(p3_parts)

    total_terms = {
        name: val
        for name, val in terms.items()
        if name in ("P_out_1_1", "P_out_1_21", "P_out_1_22", "P_out_2", "P_out_3")
    }
    breakdown = _finalize(total_terms, BRANCH_LT if lt_branch else BRANCH_GT)
    merged = dict(terms)
    return SopBreakdown(total=breakdown.total, terms=merged, branch=breakdown.branch)


def sop_multi_asym(geometry: Geometry, config: RadioConfig) -> float:
    """Joint high-SNR constant with best-user scheduling, K >= 2."""
    k_users = config.k_users
    if k_users < 2:
        raise ValueError("sop_multi_asym requires K >= 2; use sop_single_asym_both")
    th = Thresholds.from_config(config)
    n = config.n_eve
    rfa = geometry.r_f ** geometry.alpha
    ratio = (geometry.r_f / geometry.r_b) ** geometry.alpha
    chi1 = th.theta_th * (geometry.r_f / geometry.r_e) ** geometry.alpha
    chi2 = th.eps_b * th.theta_th * (geometry.r_b / geometry.r_e) ** geometry.alpha + 1.0

    _, mu1, _, _, c0 = channel.minmax_coeffs(k_users, rfa)
    p12 = math.fsum(
        th.eps_b * mu1[idx] / (k_users * ratio + th.eps_b)
        for idx in range(k_users - 1)
    )

    phi = channel.phi_coeffs(k_users)
    p2 = math.fsum(
        phi[i] * th.eps_b / (i * ratio + th.eps_b) for i in range(k_users + 1)
    ) + math.fsum(
        i * phi[i] * (i * chi1 + chi2) ** -n / (i + th.eps_b / ratio)
        for i in range(1, k_users + 1)
    )

    p3_parts = []
    for k in range(1, k_users - 1):
        sigma, *_ = channel.triple_coeffs(k, k_users, rfa)
        nn, mm, _ = sigma.shape
        for ni in range(nn):
            for mi in range(mm):
                for ii, varpi in ((4, mi + 1 - k), (5, -k)):
                    chi3 = ((k_users + varpi) * chi1 + chi2) ** -n
                    p3_parts.append(
                        sigma[ni, mi, ii]
                        * th.eps_b
                        * (1.0 - chi3)
                        / ((k_users + varpi) * ratio + th.eps_b)
                    )
                    p3_parts.append(
                        sigma[ni, mi, ii]
                        * th.eps_b
                        * chi3
                        / ((k_users - k) * ratio + th.eps_b)
                    )

    # adjacent-top piece: only the decode-order exponentials survive the limit
    mu0, *_ = channel.minmax_coeffs(k_users, rfa)
    for idx in range(k_users - 1):
        mu4 = mu0[idx] / (c0[idx] * rfa)
        chi_t = ((idx + 2) * chi1 + chi2) ** -n
        p3_parts.append(
            mu4
            * (1.0 - chi_t)
            * th.eps_b
            * (1.0 / (th.eps_b + ratio) - 1.0 / (th.eps_b + (idx + 2) * ratio))
        )
    return p12 + p2 + math.fsum(p3_parts)


def sop_exact(
    geometry: Geometry, config: RadioConfig, scheme: str = "BUS", nodes: int = 128
) -> SopBreakdown:
    """Dispatch to the applicable exact expression, if one exists.

    K = 1 (any scheme) and random scheduling (any K) use the single-user
    result; best-user scheduling with K >= 2 uses the multi-user result.
    CDF-based scheduling has no closed form here.
    """
    if config.k_users == 1 or scheme == "RUS":
        return sop_single_exact(geometry, config, nodes=nodes)
    if scheme == "BUS":
        return sop_multi_exact(geometry, config, nodes=nodes)
    raise ValueError(f"no closed form for scheme {scheme!r} with K > 1")


def _finalize(terms: dict[str, float], branch: str) -> SopBreakdown:
    total = math.fsum(terms.values())
    if total < -1e-6 or total > 1.0 + 1e-6:
        warnings.warn(
            f"outage total {total:.3e} strays beyond [0, 1]; clamping", stacklevel=3
        )
    return SopBreakdown(total=min(max(total, 0.0), 1.0), terms=terms, branch=branch)
