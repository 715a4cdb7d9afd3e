"""Piecewise scattering solutions for the spherical shell potential.

Everything is s-wave in natural units hbar = 2m = 1, so E = k^2 and the
shell wave number is Q(k) = sqrt(k^2 - v0). The regular solution chi(r; k)
is fixed by chi(0) = 0, chi'(0) = k (chi = sin kr for a free particle) and
behaves for r > b as

    chi(r; k) = (i/2) [ Jplus(k) e^{-ikr} - Jminus(k) e^{+ikr} ].

With that convention S(k) = Jminus(k)/Jplus(k), the fourth-quadrant zeros of
Jplus are the resonance wave numbers, and Jminus(k) = Jplus(-k) identically.

Jplus is evaluated by continuing the outgoing solution f(r; k) = e^{ikr}
(r > b) inward to the origin, where Jplus(k) = f(0; k). Inward continuation
tracks the component that grows toward the origin, so it stays accurate deep
in the lower half-plane where reading the e^{-ikr} coefficient off chi loses
all digits to cancellation.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isfinite

import numpy as np

from .errors import DomainError, PoleError

# |Jplus(k)| below this (times 1 + |k|) counts as "sitting on a pole"
POLE_THRESHOLD_SCALE = 1e-13


def pole_threshold(k: complex) -> float:
    return POLE_THRESHOLD_SCALE * (1.0 + abs(k))


@dataclass(frozen=True)
class ShellPotential:
    """Spherical shell barrier/well: V = v0 for a < r < b, zero elsewhere.

    Parameters
    ----------
    a, b : float
        Inner and outer shell radii, 0 < a < b.
    v0 : float
        Shell height; negative values give a well that can bind states.
    """

    a: float
    b: float
    v0: float

    def __post_init__(self):
        if not (isfinite(self.a) and isfinite(self.b) and isfinite(self.v0)):
            raise DomainError("potential parameters must be finite")
        if not 0 < self.a:
            raise DomainError("inner radius a must be positive")
        if not self.a < self.b:
            raise DomainError("b must exceed a")

    def shell_wavenumber(self, k):
        """Q(k) = sqrt(k^2 - v0), principal branch (branch choice is gauge)."""
        return np.sqrt(np.asarray(k, dtype=complex) ** 2 - self.v0)

    def value(self, r):
        r = np.asarray(r, dtype=float)
        return np.where((r > self.a) & (r < self.b), self.v0, 0.0)


@dataclass(frozen=True)
class JostPair:
    k: complex
    j_plus: complex
    j_minus: complex


@dataclass(frozen=True)
class MatchingCoefficients:
    """Coefficients of the regular solution in the three regions.

    chi = sin(kr) inside, j1 e^{iqr} + j2 e^{-iqr} in the shell, and
    j3 e^{ikr} + j_in e^{-ikr} outside; j_in = (i/2) Jplus(k) vanishes at a
    pole, where the solution becomes purely outgoing.
    """

    k: complex
    q: complex
    j1: complex
    j2: complex
    j3: complex
    j_in: complex


def _check_k(pot: ShellPotential, k) -> np.ndarray:
    k = np.asarray(k, dtype=complex)
    if np.any(k == 0):
        raise DomainError("k = 0 is rejected; threshold behaviour is out of scope")
    q = pot.shell_wavenumber(k)
    if np.any(np.abs(q) < 1e-12 * (1.0 + np.abs(k))):
        raise DomainError("k sits on the shell threshold k^2 = v0")
    return k


def _forward_arrays(pot: ShellPotential, k: np.ndarray):
    """Vectorised matching sweep origin -> exterior. Returns (q, j1, j2, j3, j_in)."""
    a, b = pot.a, pot.b
    q = pot.shell_wavenumber(k)
    sa = np.sin(k * a)
    da = k * np.cos(k * a)
    j1 = 0.5 * (sa + da / (1j * q)) * np.exp(-1j * q * a)
    j2 = 0.5 * (sa - da / (1j * q)) * np.exp(1j * q * a)
    eb, ebm = np.exp(1j * q * b), np.exp(-1j * q * b)
    sb = j1 * eb + j2 * ebm
    db = 1j * q * (j1 * eb - j2 * ebm)
    j3 = 0.5 * (sb + db / (1j * k)) * np.exp(-1j * k * b)
    j_in = 0.5 * (sb - db / (1j * k)) * np.exp(1j * k * b)
    return q, j1, j2, j3, j_in


def _backward_arrays(pot: ShellPotential, k: np.ndarray):
    """Vectorised inward sweep of the outgoing solution f = e^{ikr} (r > b).

    Returns (d1, d2, p, m): shell coefficients of e^{±iqr} and free-region
    coefficients of e^{±ikr}; Jplus(k) = f(0) = p + m.
    """
    a, b = pot.a, pot.b
    q = pot.shell_wavenumber(k)
    fb = np.exp(1j * k * b)
    dfb = 1j * k * fb
    d1 = 0.5 * (fb + dfb / (1j * q)) * np.exp(-1j * q * b)
    d2 = 0.5 * (fb - dfb / (1j * q)) * np.exp(1j * q * b)
    ea, eam = np.exp(1j * q * a), np.exp(-1j * q * a)
    fa = d1 * ea + d2 * eam
    dfa = 1j * q * (d1 * ea - d2 * eam)
    p = 0.5 * (fa + dfa / (1j * k)) * np.exp(-1j * k * a)
    m = 0.5 * (fa - dfa / (1j * k)) * np.exp(1j * k * a)
    return d1, d2, p, m


def jost_plus_batch(pot: ShellPotential, k) -> np.ndarray:
    k = _check_k(pot, k)
    _, _, p, m = _backward_arrays(pot, k)
    return p + m


def jost(pot: ShellPotential, k: complex) -> JostPair:
    """Jost functions at wave number k.

    Free potential gives Jplus = Jminus = 1; both satisfy the Schwarz
    reflection J(-k*) = J(k)* for a real shell.
    """
    k = complex(k)
    jp = complex(jost_plus_batch(pot, k))
    jm = complex(jost_plus_batch(pot, -k))
    return JostPair(k=k, j_plus=jp, j_minus=jm)


def match_coefficients(pot: ShellPotential, k: complex) -> MatchingCoefficients:
    k_arr = _check_k(pot, complex(k))
    q, j1, j2, j3, j_in = _forward_arrays(pot, k_arr)
    return MatchingCoefficients(k=complex(k), q=complex(q), j1=complex(j1),
                                j2=complex(j2), j3=complex(j3), j_in=complex(j_in))


def s_matrix_batch(pot: ShellPotential, k) -> np.ndarray:
    k = np.asarray(k, dtype=complex)
    jp = jost_plus_batch(pot, k)
    bad = np.abs(jp) < POLE_THRESHOLD_SCALE * (1.0 + np.abs(k))
    if np.any(bad):
        raise PoleError(f"S-matrix evaluated at a zero of the Jost function near "
                        f"k = {k[np.argmax(bad)] if k.ndim else complex(k)}")
    return jost_plus_batch(pot, -k) / jp


def s_matrix(pot: ShellPotential, k: complex) -> complex:
    """S(k) = Jminus(k)/Jplus(k); unimodular for real k."""
    return complex(s_matrix_batch(pot, complex(k)))


def regular_solution_batch(pot: ShellPotential, r, k: complex) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("radius must be nonnegative")
    k_arr = _check_k(pot, complex(k))
    q, j1, j2, j3, j_in = _forward_arrays(pot, k_arr)
    out = np.empty(np.shape(r), dtype=complex)
    inner = r <= pot.a
    shell = (r > pot.a) & (r <= pot.b)
    outer = r > pot.b
    out[inner] = np.sin(k * r[inner])
    out[shell] = j1 * np.exp(1j * q * r[shell]) + j2 * np.exp(-1j * q * r[shell])
    out[outer] = j3 * np.exp(1j * k * r[outer]) + j_in * np.exp(-1j * k * r[outer])
    return out


def regular_solution(pot: ShellPotential, r, k: complex):
    """Regular solution chi(r; k); piecewise exact, chi(0) = 0, chi'(0) = k."""
    vals = regular_solution_batch(pot, r, k)
    return complex(vals) if np.ndim(r) == 0 else vals


def outgoing_solution_batch(pot: ShellPotential, r, k: complex) -> np.ndarray:
    """Outgoing (Jost) solution f(r; k), equal to e^{ikr} beyond the shell."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("radius must be nonnegative")
    k_arr = _check_k(pot, complex(k))
    q = pot.shell_wavenumber(k_arr)
    d1, d2, p, m = _backward_arrays(pot, k_arr)
    out = np.empty(np.shape(r), dtype=complex)
    inner = r <= pot.a
    shell = (r > pot.a) & (r <= pot.b)
    outer = r > pot.b
    out[inner] = p * np.exp(1j * k * r[inner]) + m * np.exp(-1j * k * r[inner])
    out[shell] = d1 * np.exp(1j * q * r[shell]) + d2 * np.exp(-1j * q * r[shell])
    out[outer] = np.exp(1j * k * r[outer])
    return out


def green_function(pot: ShellPotential, r: float, s: float, k: complex) -> complex:
    """Outgoing resolvent kernel G(r, s; k) of (z - H) at z = k^2.

    G = -chi(r_<) f(r_>) / (k Jplus(k)); for v0 = 0 this is
    -sin(k r_<) e^{i k r_>} / k. Symmetric in (r, s); its energy-plane residue
    at a pole factorises into normalised eigenfunctions.
    """
    if r < 0 or s < 0:
        raise DomainError("radii must be nonnegative")
    k = complex(k)
    jp = complex(jost_plus_batch(pot, k))
    if abs(jp) < pole_threshold(k):
        raise PoleError(f"Green function evaluated at a Jost zero near k = {k}")
    r_lo, r_hi = (r, s) if r <= s else (s, r)
    chi = complex(regular_solution_batch(pot, r_lo, k))
    f = complex(outgoing_solution_batch(pot, r_hi, k))
    return -chi * f / (k * jp)
