"""Shared quadrature and special-function helpers.

All integrators here take *batched* integrands: callables mapping a float
ndarray of abscissae to a complex ndarray of values. That keeps the hot path
vectorised; the integrand itself is typically assembled from closed-form
piecewise solutions evaluated with numpy broadcasting.

Summation order is fixed (panels left to right, nodes in Gauss order), so
results are bit-reproducible across runs regardless of how callers schedule
work.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

import numpy as np
from scipy.special import wofz

from .errors import ExtrapolationError, ResidueError


@lru_cache(maxsize=32)
def gauss_nodes(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def panel_integrate(f, lo: float, hi: float, n: int = 16) -> complex:
    """Gauss-Legendre quadrature of a batched integrand on one panel."""
    x, w = gauss_nodes(n)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    vals = f(mid + half * x)
    return half * complex(np.sum(w * vals))


def adaptive_panels(f, lo: float, hi: float, *, abs_tol: float,
                    initial_edges=(), n: int = 16, max_depth: int = 24):
    """Adaptively integrate ``f`` on [lo, hi].

    Each panel is accepted when a Gauss rule of order ``n`` and one of order
    ``2n`` agree to the panel's share of ``abs_tol``; otherwise it is split in
    half. ``initial_edges`` seeds extra breakpoints (e.g. at narrow resonance
    features) so the subdivision does not have to discover them.

    Returns (value, error_estimate).
    """
    edges = sorted({lo, hi, *(e for e in initial_edges if lo < e < hi)})
    stack = [(edges[i], edges[i + 1], 0) for i in range(len(edges) - 1)]
    stack.reverse()
    total = 0.0 + 0.0j
    err_total = 0.0
    width = hi - lo
    while stack:
        a, b, depth = stack.pop()
        coarse = panel_integrate(f, a, b, n)
        fine = panel_integrate(f, a, b, 2 * n)
        err = abs(fine - coarse)
        if err <= abs_tol * max((b - a) / width, 1e-3) or depth >= max_depth:
            total += fine
            err_total += err
        else:
            m = 0.5 * (a + b)
            stack.append((m, b, depth + 1))
            stack.append((a, m, depth + 1))
    return total, err_total


def erfc_complex(z: complex) -> complex:
    """Complementary error function for complex argument, overflow-safe."""
    z = complex(z)
    if z.real >= 0:
        return np.exp(-z * z) * wofz(1j * z)
    return 2.0 - np.exp(-z * z) * wofz(-1j * z)


def gaussian_tail_moment(p: int, c: float, r0: float, q: complex, lower: float) -> complex:
    """Exact tail integral  ∫_lower^∞ r^p exp(-c (r - r0)^2) exp(i q r) dr.

    Valid for any complex q; the exponentially large pieces are combined
    analytically so the evaluation stays inside float range far longer than a
    naive erfc formula would. Supports p = 0..6.
    """
    if p < 0 or p > 6:
        raise ValueError("moment degree out of range")
    c = float(c)
    m = r0 + 1j * q / (2 * c)
    zeta = lower - m
    big_z = np.sqrt(c) * zeta
    # pref * exp(-c zeta^2) collapses to the integrand's boundary magnitude
    bnd = np.exp(1j * q * lower - c * (lower - r0) ** 2)
    if big_z.real >= 0:
        pref_i0 = 0.5 * np.sqrt(np.pi / c) * bnd * wofz(1j * big_z)
    else:
        pref = np.exp(1j * q * r0 - q * q / (4 * c))
        pref_i0 = 0.5 * np.sqrt(np.pi / c) * (2.0 * pref - bnd * wofz(-1j * big_z))
    # I_j = ∫_zeta^∞ v^j exp(-c v^2) dv, premultiplied by pref
    i_terms = [pref_i0, bnd / (2 * c)]
    for j in range(2, p + 1):
        i_terms.append(zeta ** (j - 1) * bnd / (2 * c) + (j - 1) / (2 * c) * i_terms[j - 2])
    return sum(comb(p, j) * m ** (p - j) * i_terms[j] for j in range(p + 1))


def algebraic_mode_tail(omega: float, power: int, k_from: float, t: float) -> complex:
    """∫_{k_from}^∞ e^{i omega k} e^{-i k^2 t} k^{-power} dk for t >= 0.

    The contour leaves the real axis in a direction where the integrand
    decays: vertically (sign of omega) when t = 0, along the fourth-quadrant
    diagonal when t > 0 (the quadratic phase then dominates any linear
    growth). No singularities are crossed.
    """
    if t == 0 and omega == 0:
        return 1.0 / ((power - 1) * k_from ** (power - 1))
    if t == 0:
        sgn = 1.0 if omega > 0 else -1.0
        direction = 1j * sgn

        def f(ss):
            k = k_from + direction * ss
            return np.exp(1j * omega * k) * k ** (-power) * direction

        s_max = 45.0 / abs(omega)
    else:
        direction = np.exp(-1j * np.pi / 4)

        def f(ss):
            k = k_from + direction * ss
            return np.exp(1j * omega * k - 1j * k * k * t) * k ** (-power) * direction

        # decay exponent t s^2 + (sqrt(2) k t - omega/sqrt(2)) s
        lin = np.sqrt(2.0) * k_from * t - omega / np.sqrt(2.0)
        s_max = (-lin + np.sqrt(lin * lin + 4.0 * t * 45.0)) / (2.0 * t)

    total = 0.0 + 0.0j
    edges = np.geomspace(s_max * 1e-5, s_max, 36)
    total += panel_integrate(f, 0.0, edges[0], 16)
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += panel_integrate(f, lo, hi, 16)
    return total


def neville_to_zero(xs, ys):
    """Polynomial extrapolation of (xs, ys) to x = 0 via Neville's scheme.

    Returns (value, stages) where ``stages`` are the successive column heads;
    callers inspect them for contraction.
    """
    x = np.asarray(xs, dtype=float)
    y = np.array(ys, dtype=complex)
    n = len(x)
    stages = [y[0]]
    for lev in range(1, n):
        y = (y[1:] * x[:n - lev] - y[:-1] * x[lev:]) / (x[:n - lev] - x[lev:])
        stages.append(y[0])
    return stages[-1], stages


def richardson_contract_check(stages, tol_ratio=1.0):
    corrections = [abs(stages[i + 1] - stages[i]) for i in range(len(stages) - 1)]
    for a, b in zip(corrections, corrections[1:]):
        if b > tol_ratio * max(a, 1e-300):
            raise ExtrapolationError(
                f"extrapolation stages do not contract: corrections {corrections}")


def circle_residue(f, center: complex, radius: float, *, rel_tol: float = 1e-10,
                   nodes: int = 64, retries: int = 1) -> complex:
    """Residue of ``f`` at ``center`` by trapezoidal contour quadrature.

    ``f`` is batched over complex points. Trapezoid on a circle converges
    spectrally for meromorphic integrands; agreement between ``nodes`` and
    ``2*nodes`` samples is the acceptance check. On failure the radius is
    shrunk once before giving up.
    """
    rho = radius
    for attempt in range(retries + 1):
        vals = []
        for m in (nodes, 2 * nodes):
            th = 2 * np.pi * (np.arange(m) + 0.5) / m
            z = center + rho * np.exp(1j * th)
            # (1/2πi) ∮ f dq with dq = iρe^{iθ}dθ
            vals.append(complex(np.mean(f(z) * rho * np.exp(1j * th))))
        coarse, fine = vals
        scale = max(abs(fine), 1e-300)
        if abs(fine - coarse) <= rel_tol * scale:
            return fine
        if abs(fine - coarse) <= 1e-8 * scale and attempt == retries:
            return fine
        rho *= 0.5
    raise ResidueError(
        f"contour residue at {center} failed consistency: "
        f"|Δ|={abs(fine - coarse):.3e} rel to {abs(fine):.3e}")
