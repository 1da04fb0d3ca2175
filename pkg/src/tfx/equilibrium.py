"""Equilibrium soliton positions inside the trap.

A soliton at a_j feels the restoring force of the trap (proportional
to eps * a_j) and the exponential tail-to-tail repulsion of its
neighbors; the balance fixes the positions.  For two symmetric
solitons at -a, a the balance reduces to the scalar equation

    4 sqrt(2) eps a = 32 exp(-2 sqrt(2) a / eps),

whose root has the closed-form expansion
a = -(eps/sqrt(2)) (log eps + (1/2) log|log eps| - (3/2) log 2 + o(1)).
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "SolitonConfig",
    "predict_position_asymptotic",
    "solve_bifurcation_scalar",
    "refine_position",
    "solve_toda",
    "check_bounds",
]

SQRT2 = math.sqrt(2.0)
SOURCES = ("asymptotic", "scalar_root", "toda_root", "manual")


@dataclass(frozen=True)
class SolitonConfig:
    """Ordered soliton positions at a given eps, with provenance and bound flags.

    bound_amplitude is a_m / (sqrt(2) eps^(2/3)) (must stay below 1) and
    bound_interaction is max_j exp(-sqrt(2) gap_j / eps) / (eps^2 |log eps|)
    (kept at or below 1 by the computed roots).
    """

    eps: float
    positions: tuple
    source: str
    residual: float
    bound_amplitude: float
    bound_interaction: float
    bounds_ok: bool


def check_bounds(eps: float, positions) -> tuple:
    """A-priori bound ratios for a position set; returns (amplitude, interaction, ok)."""
    pos = tuple(float(a) for a in positions)
    amp = max(abs(a) for a in pos) / (SQRT2 * eps ** (2.0 / 3.0)) if pos else 0.0
    inter = 0.0
    for a, b in zip(pos, pos[1:]):
        inter = max(inter, math.exp(-SQRT2 * (b - a) / eps))
    denom = eps * eps * abs(math.log(eps))
    inter_ratio = inter / denom if denom > 0 else 0.0
    ok = amp < 1.0 and inter_ratio <= 1.0
    return amp, inter_ratio, ok


def _config(eps, positions, source, residual) -> SolitonConfig:
    pos = tuple(sorted(float(a) for a in positions))
    # computed sources carry exact antisymmetry
    if source in ("scalar_root", "toda_root"):
        pos = tuple(0.5 * (a - b) for a, b in zip(pos, reversed(pos)))
    amp, inter, ok = check_bounds(eps, pos)
    return SolitonConfig(eps=eps, positions=pos, source=source, residual=residual,
                         bound_amplitude=amp, bound_interaction=inter, bounds_ok=ok)


def _validate_eps(eps: float):
    if not 0.0 < eps:
        raise ValueError(f"eps must be positive, got {eps}")
    if eps >= 1.0 / math.e:
        raise ValueError(f"eps must be below 1/e for log|log eps| to make sense, got {eps}")
    if eps > 0.1:
        warnings.warn(f"eps={eps} is outside the asymptotic validity range (0, 0.1]")


def predict_position_asymptotic(eps: float) -> float:
    """Closed-form leading-order position of the two-soliton equilibrium."""
    _validate_eps(eps)
    log_eps = math.log(eps)
    return -(eps / SQRT2) * (log_eps + 0.5 * math.log(abs(log_eps))
                             - 1.5 * math.log(2.0))


def _scalar_log_residual(a: float, eps: float) -> float:
    # log of LHS/RHS of 4 sqrt(2) eps a = 32 exp(-2 sqrt(2) a / eps)
    return math.log(SQRT2 * eps * a / 8.0) + 2.0 * SQRT2 * a / eps


def solve_bifurcation_scalar(eps: float) -> SolitonConfig:
    """Exact root of the two-soliton balance equation, positions (-a, a).

    The left side increases and the right side decreases in a, so the
    root is unique; bracketing on [eps^2, 1] precedes the Newton polish
    because the exponential side is stiff far from the root.
    """
    _validate_eps(eps)
    a = brentq(_scalar_log_residual, eps * eps, 1.0, args=(eps,),
               xtol=1e-16, rtol=8.9e-16)
    for _ in range(4):
        phi = _scalar_log_residual(a, eps)
        if abs(phi) < 1e-15:
            break
        a -= phi / (1.0 / a + 2.0 * SQRT2 / eps)
    rel = -math.expm1(-_scalar_log_residual(a, eps))
    if abs(rel) > 1e-14:
        raise RuntimeError(f"scalar root polish left relative residual {rel:.2e}")
    return _config(eps, (-a, a), "scalar_root", abs(rel))


def refine_position(eps: float):
    """Logarithmic fixed-point refinement of the two-soliton position.

    Writes a = -(eps log eps / sqrt(2)) U and iterates the closed
    equation for U from U = 1 (contraction factor ~ 1/(2|log eps|));
    V is the second-level correction around U = 1, iterated from 0.
    Returns (U, V, a).
    """
    _validate_eps(eps)
    log_eps = math.log(eps)
    big_l = math.log(abs(log_eps))
    base = 1.0 + big_l / (2.0 * log_eps) - 3.0 * math.log(2.0) / (2.0 * log_eps)
    u = 1.0
    for _ in range(200):
        u_next = base + math.log(u) / (2.0 * log_eps)
        if abs(u_next - u) <= 1e-14:
            u = u_next
            break
        u = u_next
    v = 0.0
    for _ in range(200):
        inner = 1.0 + big_l / (2.0 * log_eps) * (1.0 + v)
        v_next = -3.0 * math.log(2.0) / big_l + math.log(inner) / big_l
        if abs(v_next - v) <= 1e-14:
            v = v_next
            break
        v = v_next
    a = -(eps * log_eps / SQRT2) * u
    return u, v, a


def _toda_residual(eps: float, a: np.ndarray) -> np.ndarray:
    gaps = np.diff(a)
    r = np.exp(-SQRT2 * gaps / eps)
    out = 4.0 * SQRT2 * eps * a
    out[:-1] += 32.0 * r
    out[1:] -= 32.0 * r
    return out


def _toda_jacobian(eps: float, a: np.ndarray) -> np.ndarray:
    m = a.size
    jac = np.zeros((m, m))
    np.fill_diagonal(jac, 4.0 * SQRT2 * eps)
    r = np.exp(-SQRT2 * np.diff(a) / eps) * (SQRT2 / eps) * 32.0
    for j in range(m - 1):
        jac[j, j] += r[j]
        jac[j, j + 1] -= r[j]
        jac[j + 1, j + 1] += r[j]
        jac[j + 1, j] -= r[j]
    return jac


def _equal_gap_guess(eps: float, m: int) -> np.ndarray:
    # Outermost balance with equal gaps d: 2 sqrt(2) eps (m-1) d = 32 exp(-sqrt(2) d / eps);
    # exact for m <= 3, a good Newton seed beyond.
    def logres(d):
        return math.log(SQRT2 * eps * (m - 1) * d / 16.0) + SQRT2 * d / eps

    d = brentq(logres, eps * eps, 2.0, xtol=1e-15, rtol=8.9e-16)
    j = np.arange(1, m + 1, dtype=float)
    return d * (j - 0.5 * (m + 1))


def solve_toda(eps: float, m: int) -> SolitonConfig:
    """Symmetric equilibrium of the m-soliton interaction system.

    4 sqrt(2) eps a_j + 32 (exp(-sqrt(2)(a_{j+1}-a_j)/eps)
                            - exp(-sqrt(2)(a_j-a_{j-1})/eps)) = 0,

    with missing-neighbor terms dropped at j = 1 and j = m.  Damped
    Newton from the equal-gap seed; the iterate is re-antisymmetrized
    each step and must keep strict ordering.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    _validate_eps(eps)
    if m >= 3 and eps > 0.05:
        raise ValueError(f"eps={eps} too large for m={m} (need eps <= 0.05)")
    if m == 1:
        return _config(eps, (0.0,), "toda_root", 0.0)

    a = _equal_gap_guess(eps, m)
    res = _toda_residual(eps, a)
    r_sup = float(np.max(np.abs(res)))
    for _ in range(60):
        if r_sup <= 1e-16:
            break
        delta = np.linalg.solve(_toda_jacobian(eps, a), -res)
        t = 1.0
        while True:
            cand = a + t * delta
            cand = 0.5 * (cand - cand[::-1])
            if np.all(np.diff(cand) > 0.0):
                cand_res = _toda_residual(eps, cand)
                cand_sup = float(np.max(np.abs(cand_res)))
                if cand_sup < r_sup:
                    break
            t *= 0.5
            if t < 2.0 ** -30:
                cand, cand_res, cand_sup = a, res, r_sup
                break
        if cand_sup >= r_sup:
            break
        a, res, r_sup = cand, cand_res, cand_sup
    # independent re-evaluation of the system residual outside the loop
    final = float(np.max(np.abs(_toda_residual(eps, a))))
    if final > 1e-12:
        raise RuntimeError(f"interaction system residual {final:.2e} exceeds 1e-12")
    cfg = _config(eps, a, "toda_root", final)
    if not cfg.bounds_ok:
        warnings.warn(f"equilibrium at eps={eps}, m={m} violates the a-priori bounds")
    return cfg
