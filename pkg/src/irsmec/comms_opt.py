"""Communications-side optimizer: detection, MSE weights, and phase shifts.

The weighted sum of offload ratios is handled in a parameterized
subtractive form with auxiliary multipliers (lam, beta) updated by a
damped Newton step.  For fixed multipliers, the weighted rate
maximization becomes an iterated weighted-MSE minimization: MMSE receive
filters in closed form, scalar MSE weights in closed form, and IRS phases
by majorization-minimization of a Hermitian quadratic over the unit
torus.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .numerics import hadamard, hermitian_solve, max_eigenvalue, principal_arg
from .scenario import composite_channel

__all__ = [
    "NewtonState",
    "PhaseQuadratic",
    "sinr",
    "rate",
    "mmse_mud",
    "mse",
    "auxiliary_weights",
    "mmse_rate",
    "mmse_rates",
    "build_phase_quadratic",
    "mm_phase_step",
    "mm_phase_optimize",
    "inner_bcd",
    "newton_update",
    "outer_sum_of_ratios",
    "SumOfRatiosResult",
]

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class NewtonState:
    """Sum-of-ratios multipliers and the last MSE weights.

    Entries for devices that offload nothing are pinned (beta = 0) and
    carry no meaning.
    """

    lam: np.ndarray
    beta: np.ndarray
    upsilon: np.ndarray


@dataclass(frozen=True)
class PhaseQuadratic:
    """Phase-shift objective phi^H Psi phi + 2 Re{phi^T v} (+ const)."""

    psi: np.ndarray
    v: np.ndarray
    const_term: float

    def value(self, phi):
        """Quadratic without the constant (what the MM loop tracks)."""
        return float(np.real(phi.conj() @ (self.psi @ phi)) + 2.0 * np.real(phi @ self.v))


def sinr(w, theta, channels, config, k):
    """Post-detection SINR of device k for receive filter w."""
    w = np.asarray(w, dtype=np.complex128)
    if not np.any(w):
        raise ValueError("zero receive filter: SINR undefined")
    h = composite_channel(channels, theta)
    s = w.conj() @ h
    desired = config.tx_power * abs(s[k]) ** 2
    interference = config.tx_power * (float(np.sum(np.abs(s) ** 2)) - abs(s[k]) ** 2)
    noise = config.effective_noise * float(np.real(w.conj() @ w))
    return desired / (interference + noise)


def rate(gamma, bandwidth):
    """Achievable offload rate B log2(1 + gamma), bits/s."""
    if gamma < 0:
        raise ValueError("SINR must be non-negative")
    return bandwidth * np.log2(1.0 + gamma)


def _mmse_from_composite(h, config):
    m = h.shape[0]
    j = config.tx_power * (h @ h.conj().T) + config.effective_noise * np.eye(m)
    j = 0.5 * (j + j.conj().T)
    cols = [np.sqrt(config.tx_power) * hermitian_solve(j, h[:, k])
            for k in range(h.shape[1])]
    return np.stack(cols, axis=1)


def mmse_mud(theta, channels, config):
    """MMSE receive filters, one column per device."""
    return _mmse_from_composite(composite_channel(channels, theta), config)


def _mse_from_composite(w_mat, h, config):
    s = w_mat.conj().T @ h  # K x K
    diag = np.diag(s)
    direct = np.abs(np.sqrt(config.tx_power) * diag - 1.0) ** 2
    cross = config.tx_power * (np.sum(np.abs(s) ** 2, axis=1) - np.abs(diag) ** 2)
    noise = config.effective_noise * np.sum(np.abs(w_mat) ** 2, axis=0)
    return direct + cross + noise


def mse(w_mat, theta, channels, config):
    """Per-device detection MSE for the given filters and phases."""
    return _mse_from_composite(np.asarray(w_mat, dtype=np.complex128),
                               composite_channel(channels, theta), config)


def auxiliary_weights(lam, beta, e):
    """Optimal scalar MSE weights lam_k beta_k / e_k."""
    e = np.asarray(e, dtype=float)
    if np.any(e <= 0):
        raise ValueError("MSE must be positive to form the auxiliary weights")
    return np.asarray(lam, dtype=float) * np.asarray(beta, dtype=float) / e


def mmse_rate(e_mmse, bandwidth):
    """Rate implied by an MMSE-detector MSE: -B log2(e)."""
    e_arr = np.asarray(e_mmse, dtype=float)
    if np.any(e_arr <= 0) or np.any(e_arr > 1):
        raise ValueError("MMSE MSE must lie in (0, 1]")
    out = -bandwidth * np.log2(e_arr)
    return float(out) if out.ndim == 0 else out


def mmse_rates(theta, channels, config):
    """(W, rates): MMSE filters and the per-device rates they achieve."""
    h = composite_channel(channels, theta)
    w_mat = _mmse_from_composite(h, config)
    e = np.clip(_mse_from_composite(w_mat, h, config), _TINY, 1.0)
    return w_mat, mmse_rate(e, config.bandwidth)


def build_phase_quadratic(upsilon, w_mat, channels, config):
    """Quadratic form of the phase-dependent weighted-MSE terms.

    The trace identity tr(Theta^H A Theta B) = phi^H (A o B^T) phi fixes
    the Hadamard orientation; with B Hermitian this is A o conj(B).  The
    returned form matches the direct trace objective for any unit-modulus
    phi (exercised by the tests).
    """
    ups = np.asarray(upsilon, dtype=float)
    p_t = config.tx_power
    h_d, h_r, big_g = channels.h_d, channels.h_r, channels.G
    m_mat = (w_mat * ups[None, :]) @ w_mat.conj().T          # sum_k ups_k w_k w_k^H
    a = p_t * big_g.conj().T @ m_mat @ big_g
    a = 0.5 * (a + a.conj().T)
    b = h_r @ h_r.conj().T
    b = 0.5 * (b + b.conj().T)
    psi = hadamard(a, b.conj())
    c_mat = p_t * (h_r @ h_d.conj().T) @ m_mat @ big_g
    d_mat = np.sqrt(p_t) * (h_r * ups[None, :]) @ (w_mat.conj().T @ big_g)
    v = np.diag(c_mat - d_mat).copy()
    s_d = w_mat.conj().T @ h_d
    const = p_t * float(np.sum(ups[:, None] * np.abs(s_d) ** 2)) \
        - 2.0 * np.sqrt(p_t) * float(np.sum(ups * np.real(np.diag(s_d))))
    return PhaseQuadratic(psi, v, const)


def _certified_shift(psi):
    """Shift no smaller than the dominant eigenvalue of PSD psi.

    The power-iteration estimate is inflated until a Cholesky of
    (shift I - psi) certifies it; falls back to the trace, which bounds
    the spectrum of any PSD matrix.
    """
    n = psi.shape[0]
    trace = float(np.real(np.trace(psi)))
    est = max(max_eigenvalue(psi).value, 0.0)
    scale = max(est, trace / max(n, 1), 0.0)
    if scale <= 0.0:
        return 0.0
    eye = np.eye(n)
    shift = est * (1.0 + 1e-9) + 1e-14 * scale
    gap = 1e-12 * scale
    for _ in range(60):
        try:
            np.linalg.cholesky(shift * eye - psi)
            return shift
        except np.linalg.LinAlgError:
            shift += gap
            gap *= 8.0
            if shift > trace * (1.0 + 1e-8):
                break
    return trace * (1.0 + 1e-8) + 1e-12 * scale


def mm_phase_step(phi, quad, lambda_max):
    """One majorize-minimize update of the unit-modulus phase vector."""
    u = lambda_max * phi - quad.psi @ phi - np.conj(quad.v)
    out = np.where(u == 0, phi, np.exp(1j * np.angle(u)))
    return out


def mm_phase_optimize(theta, upsilon, w_mat, channels, config, eps=1e-3, max_steps=500):
    """Monotone MM descent on the phase quadratic; returns angles in [0, 2pi)."""
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        return theta.copy()
    quad = build_phase_quadratic(upsilon, w_mat, channels, config)
    if not (np.any(quad.psi) or np.any(quad.v)):
        return principal_arg(np.exp(1j * theta))
    shift = _certified_shift(quad.psi)
    phi = np.exp(1j * theta)
    f = quad.value(phi)
    for _ in range(max_steps):
        phi = mm_phase_step(phi, quad, shift)
        f_new = quad.value(phi)
        if abs(f_new - f) <= eps * max(abs(f_new), _TINY):
            break
        f = f_new
    return principal_arg(phi)


class InnerResult(NamedTuple):
    w_mat: np.ndarray
    theta: np.ndarray
    weighted_rate: float
    e: np.ndarray
    upsilon: np.ndarray
    rounds: int


def inner_bcd(lam, beta, theta, channels, config, eps=1e-3, max_rounds=100,
              mm_max_steps=500):
    """Cycle MMSE filters, MSE weights, and MM phases for fixed multipliers.

    Tracks the weighted sum rate sum_k lam_k beta_k R_k, which is
    non-decreasing across cycles; the returned pair is MMSE-consistent
    (filters refreshed for the returned phases).
    """
    lam = np.asarray(lam, dtype=float)
    beta = np.asarray(beta, dtype=float)
    theta = np.asarray(theta, dtype=float)
    bandwidth = config.bandwidth
    ups = np.zeros_like(lam)
    prev = None
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        h = composite_channel(channels, theta)
        w_mat = _mmse_from_composite(h, config)
        e = np.clip(_mse_from_composite(w_mat, h, config), _TINY, 1.0)
        obj = float(np.sum(lam * beta * (-bandwidth * np.log2(e))))
        if prev is not None and abs(obj - prev) <= eps * max(abs(obj), _TINY):
            break
        prev = obj
        ups = auxiliary_weights(lam, beta, e)
        theta = mm_phase_optimize(theta, ups, w_mat, channels, config, eps, mm_max_steps)
    else:
        h = composite_channel(channels, theta)
        w_mat = _mmse_from_composite(h, config)
        e = np.clip(_mse_from_composite(w_mat, h, config), _TINY, 1.0)
        obj = float(np.sum(lam * beta * (-bandwidth * np.log2(e))))
    return InnerResult(w_mat, theta, obj, e, ups, rounds)


def newton_update(lam, beta, rates, weighted_loads, zeta=0.5, shrink_eps=0.01,
                  max_power=60):
    """Damped Newton step on the multiplier residuals.

    The damping exponent i is the smallest positive integer for which the
    residual norm shrinks by at least (1 - shrink_eps * zeta^i)^2; with the
    rates held fixed the residuals are linear in (lam, beta), so small i
    always suffices.
    """
    lam = np.asarray(lam, dtype=float)
    beta = np.asarray(beta, dtype=float)
    rates = np.asarray(rates, dtype=float)
    loads = np.asarray(weighted_loads, dtype=float)
    chi = lam * rates - 1.0
    kappa = beta * rates - loads
    base = float(np.sum(chi ** 2) + np.sum(kappa ** 2))
    if base == 0.0:
        return lam.copy(), beta.copy(), 0
    for power in range(1, max_power + 1):
        step = zeta ** power
        lam_new = lam - step * chi / rates
        beta_new = beta - step * kappa / rates
        resid = float(np.sum((lam_new * rates - 1.0) ** 2)
                      + np.sum((beta_new * rates - loads) ** 2))
        if resid <= (1.0 - shrink_eps * step) ** 2 * base:
            return lam_new, beta_new, power
    warnings.warn("Newton damping search hit its cap; accepting the smallest step")
    return lam_new, beta_new, max_power


class SumOfRatiosResult(NamedTuple):
    w_mat: np.ndarray
    theta: np.ndarray
    state: NewtonState
    objective: float
    converged: bool
    iterations: int


def outer_sum_of_ratios(ell, weights, theta, channels, config, eps=1e-3,
                        max_rounds=50, inner_max_rounds=100, mm_max_steps=500,
                        zeta=0.5, shrink_eps=0.01, rate_floor=1e-3):
    """Minimize sum_k w_k ell_k / R_k over filters and phases.

    Alternates the weighted-MSE inner descent with damped Newton updates
    of the multipliers until lam_k R_k = 1 and beta_k R_k = w_k ell_k hold
    within eps (relative for the beta residual).  Devices with ell_k = 0
    are pinned out of the multiplier system.  Returns the final iterate
    when converged, otherwise the best one seen.
    """
    ell = np.asarray(ell, dtype=float)
    w = np.asarray(weights, dtype=float)
    theta = np.asarray(theta, dtype=float)
    loads = w * ell
    active = loads > 0
    if not active.any():
        raise ValueError("at least one device must offload for the ratio objective")

    _, rates = mmse_rates(theta, channels, config)
    rates = np.maximum(rates, rate_floor)
    lam = 1.0 / rates
    beta = np.where(active, loads / rates, 0.0)
    ups = np.zeros_like(lam)

    def ratio_objective(r):
        return float(np.sum(loads[active] / r[active]))

    best = None
    converged = False
    rounds = 0
    w_mat = None
    for rounds in range(1, max_rounds + 1):
        res = inner_bcd(lam, beta, theta, channels, config, eps,
                        inner_max_rounds, mm_max_steps)
        w_mat, theta, ups = res.w_mat, res.theta, res.upsilon
        rates = np.maximum(mmse_rate(res.e, config.bandwidth), rate_floor)
        obj = ratio_objective(rates)
        if best is None or obj < best[0]:
            best = (obj, w_mat, theta.copy(), lam.copy(), beta.copy(), ups.copy())
        chi = lam[active] * rates[active] - 1.0
        kappa = beta[active] * rates[active] - loads[active]
        if (np.max(np.abs(chi)) <= eps
                and np.max(np.abs(kappa) / np.maximum(1.0, loads[active])) <= eps):
            converged = True
            break
        lam_a, beta_a, _ = newton_update(lam[active], beta[active], rates[active],
                                         loads[active], zeta, shrink_eps)
        lam[active] = lam_a
        beta[active] = beta_a
        lam[~active] = 1.0 / rates[~active]  # pinned, diagnostic only
        beta[~active] = 0.0

    if converged and obj <= best[0] * (1.0 + 1e-9):
        state = NewtonState(lam.copy(), beta.copy(), ups.copy())
        return SumOfRatiosResult(w_mat, theta, state, obj, True, rounds)
    obj, w_mat, theta, lam, beta, ups = best
    return SumOfRatiosResult(w_mat, theta, NewtonState(lam, beta, ups),
                             obj, converged, rounds)
