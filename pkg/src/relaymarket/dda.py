"""Deferred-acceptance negotiation engine with price and time-slot concession.

Licensed pairs wait in a queue. The head pair offers its current (xi, beta)
terms to the best relay still on its list; the relay takes the offer if it
clears both relay-side conditions and beats whatever the relay currently
holds. A turned-down (or displaced) pair concedes exactly one grid step,
rebuilds its list at the new terms, and requeues at the tail. Pairs whose
list empties leave for good, and the run ends when the queue drains.

Terms live on the concession grids {init - m*step}. The engine tracks the
integer step counts and converts to real values only for rate and utility
evaluation, so grid membership is exact and runs replay bit for bit.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import radio
from .prefs import build_pulist


@dataclass(frozen=True)
class Grids:
    """Discrete offer domains, descending from the initial values."""
    xi_values: np.ndarray
    beta_values: np.ndarray
    last_positive_xi: int   # largest index whose price is still positive

    def beta_at(self, m):
        """Time-slot value at step m; steps past the grid floor at zero."""
        if m < len(self.beta_values):
            return float(self.beta_values[m])
        return 0.0


def _grid(init, step):
    count = int(math.floor(init / step + 1e-9))
    vals = init - step * np.arange(count + 1)
    vals[vals < 0.0] = 0.0   # the final point can round a hair below zero
    return vals


def concession_grids(params):
    xi = _grid(params.xi_init, params.delta)
    beta = _grid(params.beta_init, params.epsilon)
    positive = np.nonzero(xi > 1e-12)[0]
    last_pos = int(positive[-1]) if len(positive) else 0
    return Grids(xi_values=xi, beta_values=beta, last_positive_xi=last_pos)


@dataclass(frozen=True)
class Offer:
    l: int
    q: int
    xi: float
    beta: float


@dataclass
class MatchingOutcome:
    """Matching matrix plus the agreed terms, zero wherever unmatched.

    Engine outcomes also carry each licensed pair's terminal concession-grid
    steps; stability checks use them as the envelope of terms the pair had
    not yet conceded past. Hand-built and baseline outcomes leave them None.
    """
    m: np.ndarray
    g: np.ndarray
    b: np.ndarray
    final_xi_steps: np.ndarray | None = None
    final_beta_steps: np.ndarray | None = None

    def su_of(self, l):
        hits = np.nonzero(self.m[l])[0]
        return int(hits[0]) if len(hits) else -1

    def pu_of(self, q):
        hits = np.nonzero(self.m[:, q])[0]
        return int(hits[0]) if len(hits) else -1

    def matched_pairs(self):
        return [(int(l), int(q)) for l, q in zip(*np.nonzero(self.m))]


@dataclass
class EngineTrace:
    """Per-run instrumentation. Events are (kind, l, q, xi, beta, iteration)
    with kind one of offer/accept/reject/displace/puu/prune."""
    events: list
    offers: int
    responses: int
    packets: int
    iterations: int
    puu_counts: np.ndarray

    def to_jsonl(self, fp):
        for kind, l, q, xi, beta, it in self.events:
            fp.write(json.dumps({"kind": kind, "pu": l, "su": q,
                                 "xi": xi, "beta": beta, "iteration": it}) + "\n")


@dataclass
class EngineState:
    params: object
    rates: radio.PairRates
    requirements: radio.Requirements
    grids: Grids
    queue: deque
    match_of_pu: np.ndarray
    match_of_su: np.ndarray
    accepted: list            # per relay: (l, xi, beta) or None
    m_xi: np.ndarray
    m_beta: np.ndarray
    removed: np.ndarray
    pulists: list
    stored_offers: list       # per relay: {l: (xi, beta)}, the offer book
    offers: int = 0
    responses: int = 0
    iterations: int = 0
    puu_counts: np.ndarray = None
    events: list = field(default_factory=list)

    @property
    def terminal(self):
        return not self.queue


def _xi_of(state, l):
    return float(state.grids.xi_values[state.m_xi[l]])


def _beta_of(state, l):
    return state.grids.beta_at(state.m_beta[l])


def init_state(params, realization, requirements):
    rates = radio.make_pair_rates(params, realization)
    if np.any(requirements.r_pu_req <= 0.0):
        raise ValueError(
            "negotiation needs positive licensed rate floors; a zero floor "
            "makes the zero-time state acceptable forever and the run never ends")
    grids = concession_grids(params)
    l_pu, l_su = params.l_pu, params.l_su
    xi0, b0 = float(grids.xi_values[0]), float(grids.beta_values[0])
    pulists = [build_pulist(l, xi0, b0, rates, requirements).order
               for l in range(l_pu)]
    return EngineState(
        params=params, rates=rates, requirements=requirements, grids=grids,
        queue=deque(range(l_pu)),
        match_of_pu=np.full(l_pu, -1, dtype=int),
        match_of_su=np.full(l_su, -1, dtype=int),
        accepted=[None] * l_su,
        m_xi=np.zeros(l_pu, dtype=int),
        m_beta=np.zeros(l_pu, dtype=int),
        removed=np.zeros(l_pu, dtype=bool),
        pulists=pulists,
        stored_offers=[{l: (xi0, b0) for l in range(l_pu)} for _ in range(l_su)],
        puu_counts=np.zeros(l_pu, dtype=int),
    )


def concession_step(m_xi, m_beta, coef, rate_floor, c_cost, grids):
    """Pick the single grid step a turned-down pair concedes.

    Price is the default concession. Time is given instead when the price
    is already at its last positive point, or when cutting time both keeps
    the rate floor of the relay being argued with and costs less utility
    than the price cut would.
    """
    if m_xi >= grids.last_positive_xi:
        return m_xi, m_beta + 1
    if coef * grids.beta_at(m_beta + 1) <= rate_floor:
        return m_xi + 1, m_beta
    u_price_cut = coef * grids.beta_at(m_beta) + c_cost * float(grids.xi_values[m_xi + 1])
    u_time_cut = coef * grids.beta_at(m_beta + 1) + c_cost * float(grids.xi_values[m_xi])
    if u_price_cut < u_time_cut:
        return m_xi, m_beta + 1
    return m_xi + 1, m_beta


def puu(state, l, q):
    """Concede one step after relay q refused (or displaced) pair l, then
    rebuild the pair's list at the new terms. The caller requeues l."""
    rates, req, grids = state.rates, state.requirements, state.grids
    m_x, m_b = concession_step(
        int(state.m_xi[l]), int(state.m_beta[l]),
        rates.pu_coef[l, q], req.r_pu_req[l], rates.c_cost, grids)
    # cap the time step one past the grid; the value is pinned at zero there
    state.m_xi[l] = m_x
    state.m_beta[l] = min(m_b, len(grids.beta_values))
    xi, beta = _xi_of(state, l), _beta_of(state, l)
    state.puu_counts[l] += 1
    state.events.append(("puu", l, q, xi, beta, state.iterations))
    state.pulists[l] = build_pulist(l, xi, beta, rates, req).order


def step(state):
    """One engine iteration. The queue head either exits (empty list) or
    makes one offer and absorbs the response. No-op on a terminal state."""
    if state.terminal:
        return state
    l = state.queue.popleft()
    if not state.pulists[l]:
        state.removed[l] = True
        state.events.append(("prune", l, -1, _xi_of(state, l), _beta_of(state, l),
                             state.iterations))
        return state

    q = state.pulists[l][0]
    xi, beta = _xi_of(state, l), _beta_of(state, l)
    state.offers += 1
    state.iterations += 1
    state.events.append(("offer", l, q, xi, beta, state.iterations))
    state.stored_offers[q][l] = (xi, beta)

    rates, req = state.rates, state.requirements
    acceptable = (rates.rate_su(l, q, beta) >= req.r_su_req
                  and rates.u_su(l, q, beta, xi) >= 0.0)
    incumbent = int(state.match_of_su[q])
    if acceptable and incumbent >= 0:
        il, (ixi, ibeta) = incumbent, state.accepted[q][1:]
        acceptable = rates.u_su(l, q, beta, xi) > rates.u_su(il, q, ibeta, ixi)

    state.responses += 1
    if acceptable:
        state.match_of_su[q] = l
        state.match_of_pu[l] = q
        state.accepted[q] = (l, xi, beta)
        state.events.append(("accept", l, q, xi, beta, state.iterations))
        if incumbent >= 0:
            state.match_of_pu[incumbent] = -1
            state.events.append(("displace", incumbent, q, xi, beta, state.iterations))
            puu(state, incumbent, q)
            state.queue.append(incumbent)
    else:
        state.events.append(("reject", l, q, xi, beta, state.iterations))
        puu(state, l, q)
        state.queue.append(l)
    return state


def finish(state):
    l_pu, l_su = state.params.l_pu, state.params.l_su
    m = np.zeros((l_pu, l_su), dtype=int)
    g = np.zeros((l_pu, l_su))
    b = np.zeros((l_pu, l_su))
    for q in range(l_su):
        if state.accepted[q] is not None and state.match_of_su[q] >= 0:
            l, xi, beta = state.accepted[q]
            m[l, q] = 1
            g[l, q] = xi
            b[l, q] = beta
    outcome = MatchingOutcome(
        m=m, g=g, b=b,
        final_xi_steps=state.m_xi.copy(),
        final_beta_steps=state.m_beta.copy(),
    )
    trace = EngineTrace(
        events=list(state.events),
        offers=state.offers,
        responses=state.responses,
        packets=state.offers + state.responses,
        iterations=state.iterations,
        puu_counts=state.puu_counts.copy(),
    )
    return outcome, trace


def run(params, realization, requirements=None):
    """Run the negotiation to termination on one realization."""
    if requirements is None:
        requirements = radio.requirements_for(params, realization.snr)
    state = init_state(params, realization, requirements)
    while not state.terminal:
        step(state)
    return finish(state)
