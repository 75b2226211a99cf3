"""Preference lists both sides keep during the negotiation.

The licensed side ranks relays it could work with at its current terms; the
relay side ranks licensed pairs by the latest terms each of them offered.
Builders are pure; the engine owns the offer book they read from.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class PuPreferenceList:
    owner: int
    order: list       # relay indices, best first
    basis: tuple      # the (xi, beta) the list was evaluated at


@dataclass
class SuPreferenceList:
    owner: int
    order: list       # licensed indices, best first
    offers: dict      # licensed index -> (xi, beta) evaluation points


def build_pulist(l, xi, beta, rates, requirements):
    """Relays licensed pair l can work with at (xi, beta), best first.

    Membership requires the (possibly expected) licensed rate at beta to
    clear the pair's floor. The order is by licensed utility at the offer,
    falling back to the smaller relay index on exact ties.
    """
    req = requirements.r_pu_req[l]
    members = [q for q in range(rates.pu_coef.shape[1])
               if rates.rate_pu(l, q, beta) >= req]
    members.sort(key=lambda q: (-rates.u_pu(l, q, beta, xi), q))
    return PuPreferenceList(owner=l, order=members, basis=(xi, beta))


def build_sulist(q, offers, rates, requirements):
    """Licensed pairs acceptable to relay q under their latest stored offers.

    An entry needs the relay's rate floor met and a nonnegative relay
    utility at that pair's own offer; sorting is by relay utility with the
    smaller licensed index winning ties.
    """
    members = []
    for l, (xi, beta) in offers.items():
        if (rates.rate_su(l, q, beta) >= requirements.r_su_req
                and rates.u_su(l, q, beta, xi) >= 0.0):
            members.append(l)
    members.sort(key=lambda l: (-rates.u_su(l, q, offers[l][1], offers[l][0]), l))
    return SuPreferenceList(owner=q, order=members, offers=dict(offers))


def su_prefers(q, challenger, incumbent, rates, requirements):
    """Does relay q strictly prefer the challenger's offer to the incumbent's?

    challenger and incumbent are (licensed index, xi, beta) triples. The
    challenger must itself be acceptable; equal utilities keep the incumbent.
    """
    cl, cxi, cbeta = challenger
    il, ixi, ibeta = incumbent
    if rates.rate_su(cl, q, cbeta) < requirements.r_su_req:
        return False
    if rates.u_su(cl, q, cbeta, cxi) < 0.0:
        return False
    return rates.u_su(cl, q, cbeta, cxi) > rates.u_su(il, q, ibeta, ixi)
