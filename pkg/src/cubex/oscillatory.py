"""Oscillatory integrals with quadratic phase, and the double integral K.

Quadrature splits the range at the stationary point of the phase and then
into panels that each carry at most one cycle of phase change; every panel
gets a 15-point Gauss-Legendre rule and the error is estimated by comparing
against the same rule on the two half panels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import fresnel

GL_ORDER = 15
MAX_PANELS = 4_000_000
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    abs_error_estimate: float
    panels: int

    def __abs__(self) -> float:
        return abs(self.value)

    def __sub__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(self.value - other.value,
                                self.abs_error_estimate + other.abs_error_estimate,
                                self.panels + other.panels)


def _e(phase: np.ndarray) -> np.ndarray:
    frac = phase - np.floor(phase)
    return np.exp(2j * math.pi * frac)


def _gl(f, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Gauss-Legendre on each panel [lo_i, hi_i]; f maps an (n, 15) grid to values."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    u = mid[:, None] + half[:, None] * _NODES[None, :]
    return (f(u) @ _WEIGHTS) * half


def _panel_integrate(f, edges: np.ndarray) -> QuadratureResult:
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    coarse = _gl(f, lo, hi)
    fine = _gl(f, lo, mid) + _gl(f, mid, hi)
    re = math.fsum(fine.real.tolist())
    im = math.fsum(fine.imag.tolist())
    err = math.fsum(np.abs(coarse - fine).tolist())
    return QuadratureResult(complex(re, im), err, len(lo))


def quadratic_phase_edges(b1: float, b2: float, A: float, B: float,
                          cycles_per_panel: float = 1.0) -> np.ndarray:
    """Panel edges on [A, B] for the phase b1 u + b2 u^2.

    The stationary point -b1/(2 b2), when interior, is always an edge.  On
    each monotone piece the panels are uniform, sized so that the largest
    |phase'| times the width is at most ``cycles_per_panel``.
    """
    cuts = [A, B]
    if b2 != 0.0:
        u0 = -b1 / (2.0 * b2)
        if A < u0 < B:
            cuts = [A, u0, B]
    edges = [np.array([A])]
    for s, t in zip(cuts[:-1], cuts[1:]):
        slope = max(abs(b1 + 2 * b2 * s), abs(b1 + 2 * b2 * t))
        n = max(1, math.ceil(slope * (t - s) / cycles_per_panel))
        if n > MAX_PANELS:
            raise ValueError(f"oscillation too fast: {n} panels needed on [{s}, {t}]")
        edges.append(np.linspace(s, t, n + 1)[1:])
    return np.concatenate(edges)


def oscillatory_quad(b1: float, b2: float, A: float, B: float,
                     cycles_per_panel: float = 1.0) -> QuadratureResult:
    """Integral of e(b1 u + b2 u^2) over [A, B]."""
    if B <= A:
        return QuadratureResult(0j, 0.0, 0)
    edges = quadratic_phase_edges(b1, b2, A, B, cycles_per_panel)
    return _panel_integrate(lambda u: _e(b1 * u + b2 * u * u), edges)


def integral_I(beta1: float, beta2: float, X: float) -> QuadratureResult:
    """I(beta1, beta2) over [0, X]."""
    if X <= 0:
        raise ValueError("X must be positive")
    return oscillatory_quad(beta1, beta2, 0.0, float(X))


def integral_J(beta1: float, beta2: float, X: float) -> QuadratureResult:
    """J(beta1, beta2; X) over [X, 2X]."""
    if X <= 0:
        raise ValueError("X must be positive")
    return oscillatory_quad(beta1, beta2, float(X), 2.0 * float(X))


def fresnel_segment(c: np.ndarray, s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
    """Closed form of the integral of e(c s^2) over [s1, s2], vectorized in c.

    Uses the Fresnel integrals: with t = 2 sqrt(|c|) s the integrand becomes
    exp(i pi t^2 / 2).  c = 0 returns the length.
    """
    c = np.asarray(c, dtype=float)
    s1 = np.broadcast_to(np.asarray(s1, dtype=float), c.shape)
    s2 = np.broadcast_to(np.asarray(s2, dtype=float), c.shape)
    out = (s2 - s1).astype(complex)
    nz = c != 0
    if np.any(nz):
        ac = np.abs(c[nz])
        k = 2.0 * np.sqrt(ac)
        S2, C2 = fresnel(k * s2[nz])
        S1, C1 = fresnel(k * s1[nz])
        val = ((C2 - C1) + 1j * (S2 - S1)) / k
        out[nz] = np.where(c[nz] > 0, val, np.conj(val))
    return out


def _K_inner(beta: float, v: np.ndarray, P: float) -> np.ndarray:
    """int_P^{2P} e(beta(v^3 + 3 u v^2 + 3 u^2 v)) du, for an array of v.

    Completing the square in u: beta(...) = 3 beta v (u + v/2)^2 + beta v^3 / 4.
    """
    shape = v.shape
    v = v.ravel()
    out = fresnel_segment(3.0 * beta * v, P + 0.5 * v, 2.0 * P + 0.5 * v)
    out *= _e(0.25 * beta * v**3)
    return out.reshape(shape)


def integral_K(beta: float, H: float, P: float, inner: str = "fresnel") -> QuadratureResult:
    """K(beta) = int_0^H e(beta v^3) J(3 beta v^2, 3 beta v; P) dv.

    The outer integral runs over phase-bounded panels in v.  The inner
    u-integral is taken in closed form (``inner="fresnel"``) or by the panel
    quadrature for J (``inner="quadrature"``, slow; for cross-checks).
    """
    if H <= 0 or P <= 0:
        raise ValueError("H and P must be positive")
    beta, H, P = float(beta), float(H), float(P)
    if beta == 0.0:
        return QuadratureResult(complex(H * P), 0.0, 1)
    # d/dv of beta((u+v)^3 - u^3) is at most 3|beta|(2P + H)^2
    rate = 3.0 * abs(beta) * (2.0 * P + H) ** 2
    n = max(1, math.ceil(rate * H))
    if n > MAX_PANELS:
        raise ValueError(f"K outer integral needs {n} panels")
    edges = np.linspace(0.0, H, n + 1)
    if inner == "fresnel":
        f = lambda v: _K_inner(beta, v, P)  # noqa: E731
    elif inner == "quadrature":
        def f(v):
            flat = v.ravel()
            vals = np.array([integral_J(3 * beta * x * x, 3 * beta * x, P).value for x in flat])
            return (vals * _e(beta * flat**3)).reshape(v.shape)
    else:
        raise ValueError(f"unknown inner method {inner!r}")
    res = _panel_integrate(f, edges)
    # closed-form inner values carry ~1e-13 relative error per node
    return QuadratureResult(res.value, res.abs_error_estimate + 1e-13 * H * P, res.panels)
