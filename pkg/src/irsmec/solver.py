"""Top-level latency-minimization solvers and baselines.

The multi-device solver alternates the computing block (offload split and
edge CPU shares) with the communications block (detection filters and IRS
phases) until the weighted latency settles.  The single-device solver
uses the closed-form MRC / phase-alignment loop.  Baselines keep the same
machinery with the phase design skipped ("randphase") or the reflected
path nulled ("without-irs").
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from .compute_alloc import (
    Allocation,
    LatencyReport,
    integerize_offload,
    joint_compute_opt,
    latency_report,
    optimal_offload_relaxed,
    weighted_objective,
)
from .comms_opt import mmse_rate, mmse_rates, mse, outer_sum_of_ratios, rate
from .numerics import TWO_PI, principal_arg
from .scenario import composite_channel, stream

__all__ = [
    "SolverOptions",
    "Solution",
    "solve_multi_device",
    "solve_single_device",
    "solve_randphase",
    "solve_without_irs",
    "quantize_phases",
    "evaluate_solution",
    "grid_oracle",
    "QUANT_CODEBOOKS",
]

_TINY = np.finfo(float).tiny

QUANT_CODEBOOKS = {
    1: np.array([0.0, np.pi]),
    2: np.array([0.0, np.pi / 2, np.pi, 3 * np.pi / 2]),
}


@dataclass(frozen=True)
class SolverOptions:
    """Iteration caps and tolerances; only eps is prescribed by Table II."""

    eps: float = 1e-3        # relative convergence criterion, all loops
    t1_max: int = 50         # compute-side alternation cap
    t2_max: int = 50         # multiplier (Newton) rounds
    t3_max: int = 100        # weighted-MSE inner rounds
    t4_max: int = 30         # overall BCD cycles
    t5_max: int = 100        # single-device alignment rounds
    t_mm_max: int = 500      # MM steps per phase optimization
    zeta: float = 0.5        # Newton damping base
    shrink_eps: float = 0.01  # Newton residual-shrink factor
    rate_floor: float = 1e-3  # bits/s floor keeping the multipliers finite
    seed: int = 0            # phase-initialization stream
    multistart: int = 1      # random restarts (phase-designed scheme only)


@dataclass(frozen=True)
class Solution:
    """Optimized operating point plus its audit trail."""

    scheme: str                     # with-irs | randphase | without-irs
    quantization: str               # continuous | 1-bit | 2-bit
    theta: np.ndarray | None        # phases in [0, 2pi); None when the IRS is absent
    w_mat: np.ndarray               # receive filters, M x K
    ell: np.ndarray                 # integer offload volumes
    f_edge: np.ndarray              # edge CPU shares, cycles/s
    latency: LatencyReport
    objective_trace: tuple[float, ...]
    iterations: int
    converged: bool

    @property
    def alloc(self):
        return Allocation(self.ell, self.f_edge)


def _theta_init(config, seed, start):
    gen = stream(seed, "theta0", start)
    return TWO_PI * gen.random(config.num_elements)


def _sinr_from_composite(w, h, config, k):
    if not np.any(w):
        return 0.0
    s = w.conj() @ h
    desired = config.tx_power * abs(s[k]) ** 2
    interference = config.tx_power * (float(np.sum(np.abs(s) ** 2)) - abs(s[k]) ** 2)
    noise = config.effective_noise * float(np.real(w.conj() @ w))
    return desired / (interference + noise)


def _rates_from_filters(w_mat, h, config):
    return np.array([rate(_sinr_from_composite(w_mat[:, k], h, config, k), config.bandwidth)
                     for k in range(h.shape[1])])


def evaluate_solution(theta, w_mat, alloc, channels, tasks, config):
    """Recompute the latency report of an operating point from scratch."""
    h = channels.h_d if theta is None else composite_channel(channels, theta)
    rates = _rates_from_filters(np.asarray(w_mat, dtype=np.complex128), h, config)
    return latency_report(alloc.ell, alloc.f_edge, rates, tasks, config.weight_array)


def _integerize_all(ell, f_edge, rates, tasks):
    return np.array([integerize_offload(float(ell[k]), int(tasks.bits[k]),
                                        float(tasks.cycles_per_bit[k]),
                                        float(tasks.local_rate[k]),
                                        float(rates[k]), float(f_edge[k]))
                     for k in range(tasks.num_devices)], dtype=np.int64)


def _finalize(scheme, theta, w_mat, ell_relaxed, f_edge, rates, channels, tasks,
              config, trace, iterations, converged, quantization="continuous"):
    ell_int = _integerize_all(ell_relaxed, f_edge, rates, tasks)
    alloc = Allocation(ell_int, np.asarray(f_edge, dtype=float))
    report = evaluate_solution(theta, w_mat, alloc, channels, tasks, config)
    return Solution(scheme, quantization, theta, w_mat, ell_int, alloc.f_edge,
                    report, tuple(trace), iterations, converged)


# ---------------------------------------------------------------------------
# Multi-device solver

def _solve_bcd(channels, tasks, config, options, theta0, optimize_phase, scheme):
    weights = config.weight_array
    theta = principal_arg(np.exp(1j * np.asarray(theta0, dtype=float))) \
        if config.num_elements else np.zeros(0)
    w_mat, rates = mmse_rates(theta, channels, config)
    f_edge = np.full(config.num_devices, tasks.edge_total / config.num_devices)
    trace = []
    converged = False
    iterations = 0
    ell = np.zeros(config.num_devices)
    for t4 in range(options.t4_max):
        alloc, _ = joint_compute_opt(tasks, rates, weights, options.eps,
                                     options.t1_max, f_edge_init=f_edge)
        ell, f_edge = alloc.ell, alloc.f_edge
        obj = weighted_objective(ell, f_edge, rates, tasks, weights)
        if optimize_phase and config.num_elements and np.any(ell > 0):
            sr = outer_sum_of_ratios(ell, weights, theta, channels, config,
                                     eps=options.eps, max_rounds=options.t2_max,
                                     inner_max_rounds=options.t3_max,
                                     mm_max_steps=options.t_mm_max,
                                     zeta=options.zeta, shrink_eps=options.shrink_eps,
                                     rate_floor=options.rate_floor)
            rates_new = mmse_rate(np.clip(mse(sr.w_mat, sr.theta, channels, config),
                                          _TINY, 1.0), config.bandwidth)
            obj_new = weighted_objective(ell, f_edge, rates_new, tasks, weights)
            # Guard: never adopt a communications update that worsens the
            # latency objective (possible only in end-game rate trades).
            if obj_new <= obj * (1.0 + 1e-12):
                w_mat, theta, rates, obj = sr.w_mat, sr.theta, rates_new, obj_new
        trace.append(obj)
        iterations = t4 + 1
        if t4 >= 1 and abs(trace[-1] - trace[-2]) <= options.eps * max(trace[-1], _TINY):
            converged = True
            break
    return _finalize(scheme, theta, w_mat, ell, f_edge, rates, channels, tasks,
                     config, trace, iterations, converged)


def solve_multi_device(channels, tasks, config, options=None):
    """Jointly optimize offload volumes, CPU shares, filters, and phases."""
    options = options or SolverOptions()
    if config.num_devices == 1:
        return solve_single_device(channels, tasks, config, options)
    best = None
    for start in range(max(options.multistart, 1)):
        theta0 = _theta_init(config, options.seed, start)
        sol = _solve_bcd(channels, tasks, config, options, theta0,
                         optimize_phase=True, scheme="with-irs")
        if best is None or sol.latency.objective_s < best.latency.objective_s:
            best = sol
    return best


# ---------------------------------------------------------------------------
# Single-device solver

def _aligned_phases(w, channels):
    """Phases putting every reflected component in phase with the direct path."""
    ref = principal_arg(complex(w.conj() @ channels.h_d[:, 0]))
    z = (w.conj() @ channels.G) * channels.h_r[:, 0]
    return principal_arg(np.exp(1j * (ref - principal_arg(z))))


def _solve_single(channels, tasks, config, options, theta0, optimize_phase, scheme):
    weights = config.weight_array
    sigma_eff = np.sqrt(config.effective_noise)
    p_t = config.tx_power
    theta = principal_arg(np.exp(1j * np.asarray(theta0, dtype=float))) \
        if config.num_elements else np.zeros(0)

    def mrc(th):
        h = composite_channel(channels, th)[:, 0]
        w = np.sqrt(p_t) * h / sigma_eff
        return w, p_t * float(np.real(h.conj() @ h)) / config.effective_noise

    def relaxed_latency(snr):
        r = rate(snr, config.bandwidth)
        ell_hat = optimal_offload_relaxed(tasks.bits[0], tasks.cycles_per_bit[0],
                                          tasks.local_rate[0], r, tasks.edge_total)
        return float(weights[0] * (tasks.bits[0] - ell_hat)
                     * tasks.cycles_per_bit[0] / tasks.local_rate[0])

    w, snr = mrc(theta)
    trace = [relaxed_latency(snr)]
    iterations = 1
    converged = True
    reflected = config.num_elements > 0 and np.any(channels.G) and np.any(channels.h_r)
    if optimize_phase and reflected:
        converged = False
        for t5 in range(1, options.t5_max + 1):
            theta = _aligned_phases(w, channels)
            w, snr_new = mrc(theta)
            trace.append(relaxed_latency(snr_new))
            iterations = t5
            if abs(snr_new - snr) <= options.eps * max(snr_new, _TINY):
                converged = True
                snr = snr_new
                break
            snr = snr_new

    r = rate(snr, config.bandwidth)
    ell_hat = optimal_offload_relaxed(tasks.bits[0], tasks.cycles_per_bit[0],
                                      tasks.local_rate[0], r, tasks.edge_total)
    return _finalize(scheme, theta, w.reshape(-1, 1), np.array([ell_hat]),
                     np.array([tasks.edge_total]), np.array([r]), channels, tasks,
                     config, trace, iterations, converged)


def solve_single_device(channels, tasks, config, options=None):
    """Closed-form MRC / phase-alignment loop for a lone device."""
    options = options or SolverOptions()
    if config.num_devices != 1:
        raise ValueError("solve_single_device requires exactly one device")
    best = None
    for start in range(max(options.multistart, 1)):
        theta0 = _theta_init(config, options.seed, start)
        sol = _solve_single(channels, tasks, config, options, theta0,
                            optimize_phase=True, scheme="with-irs")
        if best is None or sol.latency.objective_s < best.latency.objective_s:
            best = sol
    return best


# ---------------------------------------------------------------------------
# Baselines

def solve_randphase(channels, tasks, config, seed=0, options=None):
    """Uniformly random fixed phases; everything else optimized as usual."""
    options = options or SolverOptions()
    theta = TWO_PI * stream(seed, "randphase").random(config.num_elements)
    if config.num_devices == 1:
        return _solve_single(channels, tasks, config, options, theta,
                             optimize_phase=False, scheme="randphase")
    return _solve_bcd(channels, tasks, config, options, theta,
                      optimize_phase=False, scheme="randphase")


def solve_without_irs(channels, tasks, config, options=None):
    """Reflected path nulled; same cell, same optimizer elsewhere."""
    options = options or SolverOptions()
    bare = channels.without_irs()
    theta = np.zeros(config.num_elements)
    if config.num_devices == 1:
        sol = _solve_single(bare, tasks, config, options, theta,
                            optimize_phase=False, scheme="without-irs")
    else:
        sol = _solve_bcd(bare, tasks, config, options, theta,
                         optimize_phase=False, scheme="without-irs")
    return replace(sol, theta=None)


# ---------------------------------------------------------------------------
# Quantization and auditing

def _round_to_codebook(theta, codebook):
    delta = np.abs(theta[:, None] - codebook[None, :])
    dist = np.minimum(delta, TWO_PI - delta)
    # argmin takes the first minimum; the codebook is ascending, so ties
    # land on the smaller angle
    return codebook[np.argmin(dist, axis=1)]


def quantize_phases(sol, bits, channels, tasks, config, options=None):
    """Round phases to a 1- or 2-bit codebook and re-optimize the rest."""
    options = options or SolverOptions()
    if bits not in QUANT_CODEBOOKS:
        raise ValueError("quantization supports 1 or 2 bits")
    if sol.quantization != "continuous":
        raise ValueError("expected a continuous-phase solution")
    if sol.theta is None:
        raise ValueError("solution carries no phases to quantize")
    theta_q = _round_to_codebook(sol.theta, QUANT_CODEBOOKS[bits])
    w_mat, rates = mmse_rates(theta_q, channels, config)
    alloc, _ = joint_compute_opt(tasks, rates, config.weight_array,
                                 options.eps, options.t1_max)
    final = _finalize(sol.scheme, theta_q, w_mat, alloc.ell, alloc.f_edge, rates,
                      channels, tasks, config, [], sol.iterations, sol.converged,
                      quantization=f"{bits}-bit")
    return replace(final, objective_trace=(final.latency.objective_s,))


def grid_oracle(channels, tasks, config, resolution_deg=5.0, options=None):
    """Exhaustive phase-grid search; small instances only (N <= 3, K <= 2).

    Per grid point the filters are the MMSE ones and the computing side is
    re-optimized; returns the best weighted latency found.
    """
    options = options or SolverOptions()
    n, k = config.num_elements, config.num_devices
    if n > 3 or k > 2:
        raise ValueError("instance too large for the grid oracle (needs N <= 3, K <= 2)")
    angles = np.deg2rad(np.arange(0.0, 360.0, resolution_deg))
    weights = config.weight_array
    best = np.inf
    for combo in itertools.product(angles, repeat=n):
        theta = np.asarray(combo)
        _, rates = mmse_rates(theta, channels, config)
        alloc, _ = joint_compute_opt(tasks, rates, weights, options.eps, options.t1_max)
        ell_int = _integerize_all(alloc.ell, alloc.f_edge, rates, tasks)
        best = min(best, weighted_objective(ell_int, alloc.f_edge, rates, tasks, weights))
    return float(best)
