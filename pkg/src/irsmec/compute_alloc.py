"""Computing-side optimizer: offload split and edge CPU allocation.

Given fixed off-loading rates, the per-device optimal relaxed offload
volume equalizes local and edge latency; the edge CPU shares follow from
the KKT stationarity condition of the (convex) resource problem, with the
multiplier found by bisection.  Alternating the two yields the
computing-side block of the overall solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Allocation",
    "LatencyReport",
    "local_latency",
    "edge_latency",
    "device_latencies",
    "weighted_objective",
    "latency_report",
    "optimal_offload_relaxed",
    "integerize_offload",
    "mu_upper_bound",
    "resource_allocation_at_mu",
    "solve_mu_bisection",
    "joint_compute_opt",
]


@dataclass(frozen=True)
class Allocation:
    """Offload volumes (bits; real while relaxed) and edge CPU shares (cycles/s)."""

    ell: np.ndarray
    f_edge: np.ndarray


@dataclass(frozen=True)
class LatencyReport:
    """Per-device local/edge/total latency (s) and the weighted objective (s)."""

    local_s: np.ndarray
    edge_s: np.ndarray
    total_s: np.ndarray
    objective_s: float


def local_latency(ell, bits, cycles_per_bit, local_rate):
    """Seconds to process the (bits - ell) non-offloaded bits on the device."""
    out = (np.asarray(bits, dtype=float) - np.asarray(ell, dtype=float)) \
        * np.asarray(cycles_per_bit, dtype=float) / np.asarray(local_rate, dtype=float)
    return float(out) if out.ndim == 0 else out


def edge_latency(ell, rate, f_edge, cycles_per_bit):
    """Upload plus edge-compute seconds; 0 when nothing is offloaded.

    Offloading a positive volume over a zero rate (or onto a zero CPU
    share) is impossible and reported as infinite latency.
    """
    ell = np.asarray(ell, dtype=float)
    rate = np.asarray(rate, dtype=float)
    f_edge = np.asarray(f_edge, dtype=float)
    c = np.asarray(cycles_per_bit, dtype=float)
    upload = np.where(rate > 0, ell / np.where(rate > 0, rate, 1.0), np.inf)
    compute = np.where(f_edge > 0, ell * c / np.where(f_edge > 0, f_edge, 1.0), np.inf)
    out = np.where(ell > 0, upload + compute, 0.0)
    return float(out) if out.ndim == 0 else out


def device_latencies(ell, f_edge, rates, tasks):
    """(local, edge, total) latency arrays for one allocation."""
    d_l = local_latency(ell, tasks.bits, tasks.cycles_per_bit, tasks.local_rate)
    d_e = edge_latency(ell, rates, f_edge, tasks.cycles_per_bit)
    return d_l, d_e, np.maximum(d_l, d_e)


def weighted_objective(ell, f_edge, rates, tasks, weights):
    """Sum of weighted per-device latencies (s)."""
    _, _, total = device_latencies(ell, f_edge, rates, tasks)
    return float(np.sum(np.asarray(weights, dtype=float) * total))


def latency_report(ell, f_edge, rates, tasks, weights):
    d_l, d_e, total = device_latencies(ell, f_edge, rates, tasks)
    obj = float(np.sum(np.asarray(weights, dtype=float) * total))
    return LatencyReport(np.atleast_1d(d_l), np.atleast_1d(d_e), np.atleast_1d(total), obj)


def optimal_offload_relaxed(bits, cycles_per_bit, local_rate, rate, f_edge):
    """Relaxed offload volume that equalizes local and edge latency.

    Zero whenever offloading is useless (zero rate or zero edge share);
    always within [0, bits].
    """
    bits = np.asarray(bits, dtype=float)
    c = np.asarray(cycles_per_bit, dtype=float)
    f_l = np.asarray(local_rate, dtype=float)
    rate = np.asarray(rate, dtype=float)
    f_e = np.asarray(f_edge, dtype=float)
    den = f_e * f_l + c * rate * (f_e + f_l)
    num = bits * c * rate * f_e
    out = np.clip(np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0), 0.0, bits)
    return float(out) if out.ndim == 0 else out


def integerize_offload(ell_hat, bits, cycles_per_bit, local_rate, rate, f_edge):
    """Integer offload volume: the better of floor/ceil, ties to floor."""
    bits = int(bits)
    if not 0.0 <= ell_hat <= bits:
        raise ValueError("relaxed offload volume outside [0, bits]")
    lo = int(np.floor(ell_hat))
    hi = min(int(np.ceil(ell_hat)), bits)
    if lo == hi:
        return lo

    def total(ell):
        d_l = local_latency(ell, bits, cycles_per_bit, local_rate)
        d_e = edge_latency(float(ell), rate, f_edge, cycles_per_bit)
        return max(d_l, d_e)

    return lo if total(lo) <= total(hi) else hi


def _active_mask(tasks, rates):
    return (tasks.bits > 0) & (np.asarray(rates, dtype=float) > 0)


def mu_upper_bound(tasks, rates, weights):
    """Largest multiplier at which every active device still gets a share."""
    active = _active_mask(tasks, rates)
    if not active.any():
        raise ValueError("no device with positive load and rate")
    w = np.asarray(weights, dtype=float)
    bound = w * tasks.bits * tasks.cycles_per_bit / tasks.local_rate ** 2
    return float(np.min(bound[active]))


def resource_allocation_at_mu(mu, tasks, rates, weights):
    """Edge CPU shares from the stationarity condition at multiplier mu.

    Devices with zero load or zero rate get nothing; negative shares are
    clamped to zero (complementary slackness of f_e >= 0).
    """
    active = _active_mask(tasks, rates)
    bound = mu_upper_bound(tasks, rates, weights)
    if not 0.0 < mu <= bound * (1.0 + 1e-12):
        raise ValueError(f"mu {mu} outside the bracket (0, {bound}]")
    w = np.asarray(weights, dtype=float)
    rates = np.asarray(rates, dtype=float)
    c, f_l, bits = tasks.cycles_per_bit, tasks.local_rate, tasks.bits
    f_e = np.zeros(tasks.num_devices)
    a = active
    root = np.sqrt(w[a] * bits[a] * c[a] ** 3 * rates[a] ** 2 / mu)
    f_e[a] = np.maximum((root - c[a] * rates[a] * f_l[a]) / (f_l[a] + c[a] * rates[a]), 0.0)
    return f_e


def solve_mu_bisection(tasks, rates, weights, eps=1e-6, max_halvings=200):
    """Multiplier and CPU shares exhausting the edge budget.

    The share sum is strictly decreasing in mu over the bracket, so plain
    bisection converges; `eps` is relative on the resource-sum residual.
    """
    total = tasks.edge_total
    hi = mu_upper_bound(tasks, rates, weights)
    mu = hi
    f_e = resource_allocation_at_mu(mu, tasks, rates, weights)
    if float(np.sum(f_e)) > total * (1.0 + 1e-9):
        raise RuntimeError("internal error: share sum exceeds the budget at the bracket edge")
    lo = 0.0
    for _ in range(max_halvings):
        s = float(np.sum(f_e))
        if abs(s - total) <= eps * total:
            break
        if s > total:
            lo = mu
        else:
            hi = mu
        mu = 0.5 * (lo + hi)
        f_e = resource_allocation_at_mu(mu, tasks, rates, weights)
    return mu, f_e


def joint_compute_opt(tasks, rates, weights, eps=1e-3, max_rounds=50, f_edge_init=None):
    """Alternate the offload split and the CPU allocation until the
    weighted latency settles.

    The objective is recorded right after each offload update (pairing the
    optimal split with the shares it responded to), which makes the trace
    non-increasing.  Returns the relaxed allocation and that trace.
    """
    rates = np.asarray(rates, dtype=float)
    k = tasks.num_devices
    active = _active_mask(tasks, rates)
    if not active.any():
        ell = np.zeros(k)
        f_e = np.zeros(k)
        return Allocation(ell, f_e), [weighted_objective(ell, f_e, rates, tasks, weights)]

    def respond(f_e):
        ell = optimal_offload_relaxed(tasks.bits, tasks.cycles_per_bit,
                                      tasks.local_rate, rates, f_e)
        ell[~active] = 0.0
        return ell

    if f_edge_init is None:
        f_e = np.full(k, tasks.edge_total / k)
    else:
        f_e = np.asarray(f_edge_init, dtype=float).copy()
    ell = respond(f_e)
    obj = weighted_objective(ell, f_e, rates, tasks, weights)
    trace = [obj]
    for _ in range(max_rounds - 1):
        _, f_new = solve_mu_bisection(tasks, rates, weights)
        ell_new = respond(f_new)
        obj_new = weighted_objective(ell_new, f_new, rates, tasks, weights)
        # the bisection is inexact; never adopt a share vector that loses
        if obj_new <= obj:
            ell, f_e, obj = ell_new, f_new, obj_new
        trace.append(obj)
        if abs(trace[-1] - trace[-2]) <= eps * max(obj, np.finfo(float).tiny):
            break
    return Allocation(ell, f_e), trace
