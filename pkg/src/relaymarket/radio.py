"""Link SNRs, rates, utilities, and per-pair feasibility thresholds.

Index conventions: per-pair matrices are [l, q] with l the licensed (PU)
pair and q the relay (SU) pair, except LinkSnrs.gamma_sr which keeps the
[q, l] orientation of the underlying channel draw (relay q's own receiver,
one entry per licensed band l).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_LN2 = math.log(2.0)


def log2_1p(x):
    """log2(1 + x) through log1p, so tiny SNRs do not lose precision."""
    return np.log1p(x) / _LN2


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def af_relay_snr(gamma_first, gamma_second, formula):
    """Composite receive SNR of an amplify-and-forward two-hop link.

    `formula` selects the closed form: "paper" uses the product-saturation
    form x/(x+1) with x the product of the hop SNRs, "standard" the usual
    g1*g2/(g1+g2+1). Both are supported because they disagree noticeably
    at high SNR while leaving the negotiation mechanics untouched.
    """
    g1 = np.asarray(gamma_first, dtype=float)
    g2 = np.asarray(gamma_second, dtype=float)
    if formula == "paper":
        prod = g1 * g2
        return prod / (prod + 1.0)
    if formula == "standard":
        return g1 * g2 / (g1 + g2 + 1.0)
    raise ValueError(f"unknown af formula {formula!r}")


@dataclass(frozen=True)
class LinkSnrs:
    gamma_dir: np.ndarray     # [l] direct licensed link
    gamma_pt_st: np.ndarray   # [l, q] licensed transmitter to relay
    gamma_st_pr: np.ndarray   # [l, q] relay to licensed receiver
    gamma_relay: np.ndarray   # [l, q] composite relayed-copy SNR
    gamma_sr: np.ndarray      # [q, l] relay pair's own link, per band


def compute_snrs(params, realization):
    """Derive every link SNR from squared fading gains and distances.

    Rejects non-finite inputs outright; a realization with an infinity in
    it is a draw-stage bug, not something to propagate.
    """
    fields = (
        realization.h2_pt_pr, realization.h2_pt_st, realization.h2_st_pr,
        realization.h2_st_sr, realization.d_pt_pr, realization.d_pt_st,
        realization.d_st_pr, realization.d_st_sr,
    )
    for arr in fields:
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite channel realization rejected")
    g_pt = float(db_to_linear(params.gamma_pu_db))
    g_st = float(db_to_linear(params.gamma_su_db))
    a = params.alpha
    gamma_dir = g_pt * realization.h2_pt_pr / realization.d_pt_pr ** a
    gamma_pt_st = g_pt * realization.h2_pt_st / realization.d_pt_st ** a
    gamma_st_pr = g_st * realization.h2_st_pr / realization.d_st_pr ** a
    gamma_relay = af_relay_snr(gamma_pt_st, gamma_st_pr, params.af_formula)
    gamma_sr = g_st * realization.h2_st_sr / realization.d_st_sr[:, None] ** a
    return LinkSnrs(gamma_dir, gamma_pt_st, gamma_st_pr, gamma_relay, gamma_sr)


# ---------------------------------------------------------------------------
# rates and utilities

def rate_pu(l, q, beta, snrs, params):
    """Licensed-pair rate when relay q carries it for a beta share of the frame.

    The licensed transmission spends half its share broadcasting and half
    being relayed, and the receiver combines both copies, hence the half
    factor together with the summed SNRs.
    """
    log_term = log2_1p(snrs.gamma_dir[l] + snrs.gamma_relay[l, q])
    return 0.5 * beta * params.t_frame * float(log_term)


def rate_su(q, l, beta, snrs, params):
    """Relay pair q's own rate in licensed band l over its (1 - beta) share."""
    return (1.0 - beta) * params.t_frame * float(log2_1p(snrs.gamma_sr[q, l]))


def utility_pu(l, q, beta, xi, snrs, params):
    return rate_pu(l, q, beta, snrs, params) + params.c_bar * xi * params.capital_c


def utility_su(q, l, beta, xi, snrs, params):
    return rate_su(q, l, beta, snrs, params) - params.k_bar * xi * params.capital_c


def direct_rate(l, snrs, params):
    """Rate of the unassisted licensed link; the default per-pair rate floor."""
    return params.t_frame * float(log2_1p(snrs.gamma_dir[l]))


def mean_relay_log_term(gamma_dir, gamma_first_hop, mean_forward_gain, params, rng):
    """Average log2(1 + direct + relayed) over the unknown forward-hop fading.

    The forward hop's squared gain is exponential with unit mean and known
    average path gain. Stratified uniforms keep the estimator's error well
    under a plain Monte Carlo draw at the same sample count.
    """
    n = int(params.partial_expectation_samples)
    if n < 1:
        raise ValueError("partial_expectation_samples must be >= 1")
    u = (np.arange(n) + rng.random(n)) / n
    h2 = -np.log1p(-u)
    relayed = af_relay_snr(gamma_first_hop, mean_forward_gain * h2, params.af_formula)
    return float(np.mean(log2_1p(gamma_dir + relayed)))


def expected_rate_pu(l, q, beta, realization, params, rng):
    """Licensed rate the pair expects when the relay's forward hop is unknown.

    Holds the direct SNR and the transmitter-to-relay hop at their
    instantaneous values and averages over the forward hop, which is all a
    negotiating pair can do without the relay reporting its channel.
    """
    snrs = realization.snr
    gain = float(db_to_linear(params.gamma_su_db)) / realization.d_st_pr[l, q] ** params.alpha
    mean_log = mean_relay_log_term(
        snrs.gamma_dir[l], snrs.gamma_pt_st[l, q], gain, params, rng)
    return 0.5 * beta * params.t_frame * mean_log


# ---------------------------------------------------------------------------
# working view used by the engine, baselines, and checks

@dataclass(frozen=True)
class PairRates:
    """Per-pair slopes of rates and utilities in (xi, beta).

    pu_coef[l, q] is the licensed rate per unit beta (already including the
    two-phase half), su_coef[l, q] the relay rate per unit (1 - beta).
    Under partial knowledge pu_coef holds the expected slope the licensed
    side negotiates with; su_coef is always instantaneous.
    """
    pu_coef: np.ndarray
    su_coef: np.ndarray
    c_cost: float   # money slope of the licensed utility
    k_cost: float   # money slope of the relay utility

    def rate_pu(self, l, q, beta):
        return self.pu_coef[l, q] * beta

    def rate_su(self, l, q, beta):
        return self.su_coef[l, q] * (1.0 - beta)

    def u_pu(self, l, q, beta, xi):
        return self.pu_coef[l, q] * beta + self.c_cost * xi

    def u_su(self, l, q, beta, xi):
        return self.su_coef[l, q] * (1.0 - beta) - self.k_cost * xi


def make_pair_rates(params, realization, knowledge=None):
    mode = knowledge if knowledge is not None else params.snr_knowledge
    snrs = realization.snr
    if mode == "complete":
        log_term = log2_1p(snrs.gamma_dir[:, None] + snrs.gamma_relay)
    elif mode == "partial":
        if realization.partial_mean_log is None:
            raise ValueError("realization carries no partial-knowledge rate estimates")
        log_term = realization.partial_mean_log
    else:
        raise ValueError(f"unknown snr knowledge mode {mode!r}")
    pu_coef = 0.5 * params.t_frame * log_term
    su_coef = params.t_frame * log2_1p(snrs.gamma_sr.T)
    return PairRates(
        pu_coef=np.asarray(pu_coef, dtype=float),
        su_coef=np.asarray(su_coef, dtype=float),
        c_cost=params.c_bar * params.capital_c,
        k_cost=params.k_bar * params.capital_c,
    )


# ---------------------------------------------------------------------------
# requirements and thresholds

@dataclass(frozen=True)
class Requirements:
    r_pu_req: np.ndarray   # per licensed pair
    r_su_req: float


def requirements_for(params, snrs):
    """Rate floors for one realization. Licensed floors default to the rate
    the pair already gets over its direct link, so relaying must not hurt."""
    if params.pu_req_mode == "direct-rate":
        floors = params.t_frame * log2_1p(snrs.gamma_dir)
    elif params.pu_req_mode == "explicit":
        floors = np.asarray(params.r_pu_req, dtype=float)
        if floors.shape != (params.l_pu,):
            raise ValueError("explicit r_pu_req must list one floor per licensed pair")
    else:
        raise ValueError(f"unknown pu_req_mode {params.pu_req_mode!r}")
    return Requirements(r_pu_req=np.asarray(floors, dtype=float),
                        r_su_req=float(params.r_su_req))


@dataclass(frozen=True)
class PairThresholds:
    """Feasibility box of every pair: the smallest beta clearing the licensed
    floor, the largest beta keeping the relay above its own floor (clamped
    into [0, 1] for reporting), and whether the interval is nonempty."""
    beta_min: np.ndarray
    beta_max: np.ndarray
    feasible: np.ndarray
    _su_coef: np.ndarray
    _k_cost: float

    def xi_cap(self, l, q, beta):
        """Largest price the relay can pay at beta without going negative."""
        if self._k_cost <= 0.0:
            return 1.0
        return min(1.0, self._su_coef[l, q] * (1.0 - beta) / self._k_cost)


def build_thresholds(params, rates, requirements):
    with np.errstate(divide="ignore", invalid="ignore"):
        bmin = np.where(rates.pu_coef > 0.0,
                        requirements.r_pu_req[:, None] / rates.pu_coef,
                        np.where(requirements.r_pu_req[:, None] <= 0.0, 0.0, np.inf))
        bmax_raw = np.where(rates.su_coef > 0.0,
                            1.0 - requirements.r_su_req / rates.su_coef,
                            np.where(requirements.r_su_req <= 0.0, 1.0, -np.inf))
    feasible = bmin <= np.minimum(bmax_raw, 1.0)
    return PairThresholds(
        beta_min=bmin,
        beta_max=np.clip(bmax_raw, 0.0, 1.0),
        feasible=feasible,
        _su_coef=rates.su_coef,
        _k_cost=rates.k_cost,
    )


@dataclass(frozen=True)
class ThresholdEntry:
    beta_min: float
    beta_max: float
    feasible: bool
    xi_cap: object   # callable beta -> price cap


def pair_thresholds(l, q, snrs, requirements, params):
    """Single-pair view of the feasibility box, from instantaneous SNRs."""
    log_term = float(log2_1p(snrs.gamma_dir[l] + snrs.gamma_relay[l, q]))
    coef = 0.5 * params.t_frame * log_term
    su_coef = params.t_frame * float(log2_1p(snrs.gamma_sr[q, l]))
    req = float(requirements.r_pu_req[l])
    if coef > 0.0:
        bmin = req / coef
    else:
        bmin = 0.0 if req <= 0.0 else math.inf
    if su_coef > 0.0:
        bmax_raw = 1.0 - requirements.r_su_req / su_coef
    else:
        bmax_raw = 1.0 if requirements.r_su_req <= 0.0 else -math.inf
    k_cost = params.k_bar * params.capital_c

    def cap(beta):
        if k_cost <= 0.0:
            return 1.0
        return min(1.0, su_coef * (1.0 - beta) / k_cost)

    return ThresholdEntry(
        beta_min=bmin,
        beta_max=min(max(bmax_raw, 0.0), 1.0),
        feasible=bmin <= min(bmax_raw, 1.0),
        xi_cap=cap,
    )
