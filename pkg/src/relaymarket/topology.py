"""Scenario parameters, user placement, and block-fading channel draws.

Geometry: licensed transmitters sit on the left edge of the outer square
[-1, 1]^2 and their receivers directly opposite on the right edge, so every
licensed hop has length exactly 2. Relay pairs land i.i.d. uniformly in the
inner square [-0.5, 0.5]^2. Channels are Rayleigh, i.e. squared gains are
unit-mean exponentials, redrawn fresh per trial and constant within it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import radio

DEFAULTS = {
    "l_pu": 2,
    "l_su": 6,
    "gamma_pu_db": 5.0,
    "gamma_su_db": 25.0,
    "alpha": 4.0,
    "t_frame": 1.0,
    "capital_c": 1.0,
    "c_bar": 1.0,
    "k_bar": 1.0,
    "r_su_req": 0.1,
    "pu_req_mode": "direct-rate",
    "r_pu_req": None,
    "xi_init": 0.99,
    "beta_init": 0.99,
    "delta": 0.05,
    "epsilon": 0.05,
    "tau": 0.5,
    "snr_knowledge": "complete",
    "af_formula": "paper",
    "partial_expectation_samples": 256,
    "su_channel_per_band": True,
    "seed": 0,
}


@dataclass(frozen=True)
class ScenarioParams:
    l_pu: int = 2
    l_su: int = 6
    gamma_pu_db: float = 5.0        # licensed transmit SNR in dB
    gamma_su_db: float = 25.0       # relay transmit SNR in dB
    alpha: float = 4.0              # path-loss exponent
    t_frame: float = 1.0
    capital_c: float = 1.0          # relay-side budget per frame
    c_bar: float = 1.0              # licensed rate-per-money weight
    k_bar: float = 1.0              # relay rate-per-money weight
    r_su_req: float = 0.1
    pu_req_mode: str = "direct-rate"    # or "explicit" with r_pu_req set
    r_pu_req: tuple | None = None
    xi_init: float = 0.99
    beta_init: float = 0.99
    delta: float = 0.05             # price concession step
    epsilon: float = 0.05           # time-slot concession step
    tau: float = 0.5                # licensed broadcast fraction, equal split only
    snr_knowledge: str = "complete"     # or "partial"
    af_formula: str = "paper"           # or "standard"
    partial_expectation_samples: int = 256
    su_channel_per_band: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.l_pu < 1 or self.l_su < 1:
            raise ValueError("need at least one pair on each side")
        if not (0.0 < self.xi_init <= 1.0 and 0.0 < self.beta_init <= 1.0):
            raise ValueError("xi_init and beta_init must lie in (0, 1]")
        if not (0.0 < self.delta <= self.xi_init):
            raise ValueError("delta must lie in (0, xi_init]")
        if not (0.0 < self.epsilon <= self.beta_init):
            raise ValueError("epsilon must lie in (0, beta_init]")
        if self.alpha <= 0.0 or self.t_frame <= 0.0:
            raise ValueError("alpha and t_frame must be positive")
        if self.capital_c < 0.0 or self.c_bar < 0.0 or self.k_bar < 0.0:
            raise ValueError("monetary weights must be nonnegative")
        if self.r_su_req < 0.0:
            raise ValueError("r_su_req must be nonnegative")
        if not (0.0 < self.tau < 1.0):
            raise ValueError("tau must lie in (0, 1)")
        if self.tau != 0.5:
            raise ValueError("only the equal two-phase split tau=0.5 is supported")
        if self.snr_knowledge not in ("complete", "partial"):
            raise ValueError(f"unknown snr_knowledge {self.snr_knowledge!r}")
        if self.af_formula not in ("paper", "standard"):
            raise ValueError(f"unknown af_formula {self.af_formula!r}")
        if self.pu_req_mode not in ("direct-rate", "explicit"):
            raise ValueError(f"unknown pu_req_mode {self.pu_req_mode!r}")
        if self.pu_req_mode == "explicit" and self.r_pu_req is None:
            raise ValueError("explicit pu_req_mode needs r_pu_req")
        if self.partial_expectation_samples < 1:
            raise ValueError("partial_expectation_samples must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")


def params_from_dict(d):
    unknown = set(d) - set(DEFAULTS)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    merged = {**DEFAULTS, **d}
    if isinstance(merged["r_pu_req"], list):
        merged["r_pu_req"] = tuple(merged["r_pu_req"])
    return ScenarioParams(**merged)


def load_params(path):
    with open(path) as f:
        return params_from_dict(json.load(f))


@dataclass(frozen=True)
class Placement:
    pt_pos: np.ndarray   # [l, 2]
    pr_pos: np.ndarray   # [l, 2]
    st_pos: np.ndarray   # [q, 2]
    sr_pos: np.ndarray   # [q, 2]


def place_users(params, rng):
    """Drop all pairs for one trial; redraws if a relay pair lands on itself."""
    while True:
        y = rng.uniform(-1.0, 1.0, params.l_pu)
        pt = np.column_stack([np.full(params.l_pu, -1.0), y])
        pr = np.column_stack([np.full(params.l_pu, 1.0), y])
        st = rng.uniform(-0.5, 0.5, (params.l_su, 2))
        sr = rng.uniform(-0.5, 0.5, (params.l_su, 2))
        # only the relay pair's own hop can degenerate; every cross-square
        # distance is at least 0.5 by construction
        if np.min(np.linalg.norm(st - sr, axis=1)) >= 1e-6:
            return Placement(pt_pos=pt, pr_pos=pr, st_pos=st, sr_pos=sr)


@dataclass
class ChannelRealization:
    placement: Placement
    h2_pt_pr: np.ndarray    # [l]
    h2_pt_st: np.ndarray    # [l, q]
    h2_st_pr: np.ndarray    # [l, q]
    h2_st_sr: np.ndarray    # [q, l]
    d_pt_pr: np.ndarray     # [l]
    d_pt_st: np.ndarray     # [l, q]
    d_st_pr: np.ndarray     # [l, q]
    d_st_sr: np.ndarray     # [q]
    snr: radio.LinkSnrs | None = None
    # filled under partial knowledge: per-pair mean log term the licensed
    # side negotiates with when the relay's forward hop is unknown
    partial_mean_log: np.ndarray | None = None


def draw_channels(params, placement, rng):
    """Draw all squared fading gains and derive distances and SNRs.

    Squared gains are -ln(u) with u uniform on (0, 1], i.e. exponential
    with unit mean. Under partial knowledge the realization also gets the
    per-pair expected log terms, each from its own spawned substream so the
    estimate is reproducible pair by pair.
    """
    l_pu, l_su = params.l_pu, params.l_su

    def exp_draw(shape):
        return -np.log1p(-rng.random(shape))

    h2_pt_pr = exp_draw(l_pu)
    h2_pt_st = exp_draw((l_pu, l_su))
    h2_st_pr = exp_draw((l_pu, l_su))
    if params.su_channel_per_band:
        h2_st_sr = exp_draw((l_su, l_pu))
    else:
        h2_st_sr = np.repeat(exp_draw((l_su, 1)), l_pu, axis=1)

    d_pt_pr = np.linalg.norm(placement.pt_pos - placement.pr_pos, axis=1)
    d_pt_st = np.linalg.norm(
        placement.pt_pos[:, None, :] - placement.st_pos[None, :, :], axis=2)
    d_st_pr = np.linalg.norm(
        placement.pr_pos[:, None, :] - placement.st_pos[None, :, :], axis=2)
    d_st_sr = np.linalg.norm(placement.st_pos - placement.sr_pos, axis=1)

    real = ChannelRealization(
        placement=placement,
        h2_pt_pr=h2_pt_pr, h2_pt_st=h2_pt_st, h2_st_pr=h2_st_pr, h2_st_sr=h2_st_sr,
        d_pt_pr=d_pt_pr, d_pt_st=d_pt_st, d_st_pr=d_st_pr, d_st_sr=d_st_sr,
    )
    real.snr = radio.compute_snrs(params, real)

    if params.snr_knowledge == "partial":
        streams = rng.spawn(l_pu * l_su)
        g_st = float(radio.db_to_linear(params.gamma_su_db))
        mean_log = np.empty((l_pu, l_su))
        for l in range(l_pu):
            for q in range(l_su):
                gain = g_st / real.d_st_pr[l, q] ** params.alpha
                mean_log[l, q] = radio.mean_relay_log_term(
                    real.snr.gamma_dir[l], real.snr.gamma_pt_st[l, q],
                    gain, params, streams[l * l_su + q])
        real.partial_mean_log = mean_log
    return real


def make_realization(params, seed_seq):
    """Placement plus channels from one seed; accepts an int or SeedSequence."""
    if isinstance(seed_seq, (int, np.integer)):
        seed_seq = np.random.SeedSequence(seed_seq)
    place_ss, chan_ss = seed_seq.spawn(2)
    placement = place_users(params, np.random.default_rng(place_ss))
    return draw_channels(params, placement, np.random.default_rng(chan_ss))
