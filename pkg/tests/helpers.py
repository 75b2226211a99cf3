"""Shared builders for tests that need hand-picked channel conditions."""

from __future__ import annotations

import numpy as np

from relaymarket import radio, topology


def handmade_realization(params, gamma_dir, gamma_pt_st, gamma_st_pr, gamma_sr):
    """Build a realization whose SNRs equal the given arrays exactly.

    Works by setting every distance to 1 and treating the squared fading
    gains as the target SNRs; the caller's params must use 0 dB transmit
    SNRs on both sides so the scaling is the identity.

    gamma_sr is indexed [q, l] like the field it fills.
    """
    if params.gamma_pu_db != 0.0 or params.gamma_su_db != 0.0:
        raise ValueError("handmade realizations need 0 dB transmit SNRs")
    l_pu, l_su = params.l_pu, params.l_su
    zeros = lambda n: np.zeros((n, 2))
    placement = topology.Placement(
        pt_pos=zeros(l_pu), pr_pos=zeros(l_pu),
        st_pos=zeros(l_su), sr_pos=zeros(l_su))
    real = topology.ChannelRealization(
        placement=placement,
        h2_pt_pr=np.asarray(gamma_dir, dtype=float),
        h2_pt_st=np.asarray(gamma_pt_st, dtype=float),
        h2_st_pr=np.asarray(gamma_st_pr, dtype=float),
        h2_st_sr=np.asarray(gamma_sr, dtype=float),
        d_pt_pr=np.ones(l_pu),
        d_pt_st=np.ones((l_pu, l_su)),
        d_st_pr=np.ones((l_pu, l_su)),
        d_st_sr=np.ones(l_su),
    )
    real.snr = radio.compute_snrs(params, real)
    return real


def single_pair_scenario(gamma_dir, gamma_relay_hops, gamma_sr, **overrides):
    """One licensed pair, one relay pair, 0 dB gains, explicit floors."""
    base = {
        "l_pu": 1, "l_su": 1, "gamma_pu_db": 0.0, "gamma_su_db": 0.0,
        "pu_req_mode": "explicit",
    }
    base.update(overrides)
    params = topology.params_from_dict(base)
    g1, g2 = gamma_relay_hops
    real = handmade_realization(
        params,
        gamma_dir=[gamma_dir],
        gamma_pt_st=[[g1]],
        gamma_st_pr=[[g2]],
        gamma_sr=[[gamma_sr]],
    )
    return params, real
