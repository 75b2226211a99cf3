"""Monte Carlo harness: seeded trials, sweeps, and CSV emission.

Each trial owns a seed derived from (master seed, trial index), so any
subset of trials can be reproduced in isolation and the aggregate never
depends on execution order. All requested algorithms see the identical
channel realization within a trial. Reported rates and utilities are
always computed from the realized channels, whatever knowledge model
the negotiation itself ran under.
"""

from __future__ import annotations

import csv
import math
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import baselines, dda, radio, topology

ALGO_TAGS = ("dda-complete", "dda-partial", "centralized", "centralized-su", "rmbn")

CSV_COLUMNS = (
    "scenario_id", "algo", "axis_name", "axis_value", "n_trials",
    "mean_sum_utility_pu", "se_sum_utility_pu", "mean_sum_rate_pu",
    "mean_sum_rate_su", "match_pct", "mean_packets", "p90_packets",
    "mean_iterations",
)

SWEEP_AXES = ("epsilon", "c_bar", "gamma_su_db", "l_su")


@dataclass(frozen=True)
class TrialMetrics:
    algo: str
    trial: int
    sum_utility_pu: float
    sum_rate_pu: float
    sum_rate_su: float
    matched_pu_count: int
    packets: int
    iterations: int


@dataclass
class AggregateMetrics:
    algo: str
    n_trials: int
    mean_sum_utility_pu: float
    se_sum_utility_pu: float
    mean_sum_rate_pu: float
    se_sum_rate_pu: float
    mean_sum_rate_su: float
    se_sum_rate_su: float
    match_pct: float
    mean_packets: float
    p90_packets: float
    mean_iterations: float
    packets: np.ndarray

    def packet_cdf(self, y) -> float:
        """Empirical probability that a trial used at most y packets."""
        return float(np.mean(self.packets <= y))


def p90(values) -> float:
    """90th-percentile order statistic: smallest x with at least 90% mass ≤ x."""
    ordered = np.sort(np.asarray(values, dtype=float))
    if ordered.size == 0:
        raise ValueError("p90 of an empty sample")
    k = math.ceil(0.9 * ordered.size)
    return float(ordered[k - 1])


def _se(values) -> float:
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return 0.0
    return float(np.std(v, ddof=1) / math.sqrt(v.size))


def _realized_sums(outcome, rates):
    u = r_pu = r_su = 0.0
    pairs = outcome.matched_pairs()
    for l, q in pairs:
        beta = outcome.b[l, q]
        xi = outcome.g[l, q]
        u += rates.u_pu(l, q, beta, xi)
        r_pu += rates.rate_pu(l, q, beta)
        r_su += rates.rate_su(l, q, beta)
    return u, r_pu, r_su, len(pairs)


def run_trials(params, algos, n_trials, centralized_mode="continuous"):
    """Run every requested algorithm on n_trials shared realizations.

    Returns {algo tag: AggregateMetrics}. Centralized tags report zero
    packets and iterations (there is no message protocol to count).
    """
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    unknown = [a for a in algos if a not in ALGO_TAGS]
    if unknown:
        raise ValueError(f"unknown algorithm tags {unknown}; valid: {ALGO_TAGS}")
    need_partial = "dda-partial" in algos
    build_params = replace(params, snr_knowledge="partial" if need_partial else "complete")
    complete_params = replace(params, snr_knowledge="complete")

    per_algo = {a: [] for a in algos}
    for i in range(n_trials):
        ss = np.random.SeedSequence([params.seed, i])
        place_ss, chan_ss, rmbn_ss = ss.spawn(3)
        placement = topology.place_users(build_params, np.random.default_rng(place_ss))
        realization = topology.draw_channels(build_params, placement,
                                             np.random.default_rng(chan_ss))
        requirements = radio.requirements_for(params, realization.snr)
        rates_real = radio.make_pair_rates(complete_params, realization)
        for algo in algos:
            packets = iterations = 0
            if algo == "dda-complete":
                outcome, trace = dda.run(complete_params, realization, requirements)
                packets, iterations = trace.packets, trace.iterations
            elif algo == "dda-partial":
                outcome, trace = dda.run(replace(params, snr_knowledge="partial"),
                                         realization, requirements)
                packets, iterations = trace.packets, trace.iterations
            elif algo == "centralized":
                outcome = baselines.centralized_pu_optimal(
                    realization, requirements, complete_params, mode=centralized_mode)
            elif algo == "centralized-su":
                outcome = baselines.centralized_su_rate(
                    realization, requirements, complete_params)
            else:
                outcome, trace = baselines.rmbn(realization, requirements, params,
                                                np.random.default_rng(rmbn_ss))
                packets, iterations = trace.packets, trace.iterations
            u, r_pu, r_su, count = _realized_sums(outcome, rates_real)
            per_algo[algo].append(TrialMetrics(
                algo=algo, trial=i, sum_utility_pu=u, sum_rate_pu=r_pu,
                sum_rate_su=r_su, matched_pu_count=count,
                packets=packets, iterations=iterations))

    capacity = min(params.l_pu, params.l_su)
    out = {}
    for algo, rows in per_algo.items():
        util = [t.sum_utility_pu for t in rows]
        rpu = [t.sum_rate_pu for t in rows]
        rsu = [t.sum_rate_su for t in rows]
        pkts = np.array([t.packets for t in rows], dtype=float)
        out[algo] = AggregateMetrics(
            algo=algo,
            n_trials=n_trials,
            mean_sum_utility_pu=float(np.mean(util)),
            se_sum_utility_pu=_se(util),
            mean_sum_rate_pu=float(np.mean(rpu)),
            se_sum_rate_pu=_se(rpu),
            mean_sum_rate_su=float(np.mean(rsu)),
            se_sum_rate_su=_se(rsu),
            match_pct=100.0 * sum(t.matched_pu_count for t in rows)
                      / (n_trials * capacity),
            mean_packets=float(np.mean(pkts)),
            p90_packets=p90(pkts),
            mean_iterations=float(np.mean([t.iterations for t in rows])),
            packets=pkts,
        )
    return out


@dataclass(frozen=True)
class SweepRow:
    scenario_id: str
    algo: str
    axis_name: str
    axis_value: float
    agg: AggregateMetrics


def scenario_id(params) -> str:
    return f"lpu{params.l_pu}-lsu{params.l_su}-seed{params.seed}"


def _apply_axis(params, axis, value, tie_delta):
    if axis == "epsilon":
        if tie_delta:
            return replace(params, epsilon=value, delta=value)
        return replace(params, epsilon=value)
    if axis == "c_bar":
        return replace(params, c_bar=value)
    if axis == "gamma_su_db":
        return replace(params, gamma_su_db=value)
    if axis == "l_su":
        if int(value) != value:
            raise ValueError(f"l_su sweep value {value!r} is not an integer")
        return replace(params, l_su=int(value))
    raise ValueError(f"unknown sweep axis {axis!r}; valid: {SWEEP_AXES}")


def sweep(params, axis, values, algos, n_trials, centralized_mode="continuous",
          tie_delta=True):
    """One aggregate row per (axis value, algo); epsilon sweeps tie delta."""
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one axis value")
    rows = []
    for value in values:
        swept = _apply_axis(params, axis, value, tie_delta)
        aggs = run_trials(swept, algos, n_trials, centralized_mode=centralized_mode)
        for algo in algos:
            rows.append(SweepRow(scenario_id=scenario_id(swept), algo=algo,
                                 axis_name=axis, axis_value=float(value),
                                 agg=aggs[algo]))
    return rows


def _csv_record(row):
    a = row.agg
    return [
        row.scenario_id,
        row.algo,
        row.axis_name,
        "%.9g" % row.axis_value,
        str(a.n_trials),
        "%.9g" % a.mean_sum_utility_pu,
        "%.9g" % a.se_sum_utility_pu,
        "%.9g" % a.mean_sum_rate_pu,
        "%.9g" % a.mean_sum_rate_su,
        "%.9g" % a.match_pct,
        "%.9g" % a.mean_packets,
        "%.9g" % a.p90_packets,
        "%.9g" % a.mean_iterations,
    ]


def write_rows(table, fp):
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in table:
        writer.writerow(_csv_record(row))


def emit_csv(table, path):
    """Write sweep rows (header always included) to path; '-' for stdout."""
    if path == "-":
        write_rows(table, sys.stdout)
        return
    with open(path, "w", newline="") as fp:
        write_rows(table, fp)


def read_csv(path):
    """Round-trip reader for emit_csv output: list of per-row dicts."""
    out = []
    with open(path, newline="") as fp:
        for rec in csv.DictReader(fp):
            row = dict(rec)
            row["axis_value"] = float(rec["axis_value"])
            row["n_trials"] = int(rec["n_trials"])
            for key in CSV_COLUMNS[5:]:
                row[key] = float(rec[key])
            out.append(row)
    return out
