"""Normalised resonance (Gamow) eigenfunctions and their pairings.

A state is the regular solution at a Jost zero, rescaled so that it equals
n_factor * e^{i k_n r} beyond the shell, with

    n_sq = i * res[S(q)]_{q = k_n},   n_factor = sqrt(n_sq).

That normalisation makes the Gaussian-regulated self-overlap

    lim_{mu->0} ∫_0^∞ e^{-mu r^2} u(r)^2 dr = 1

(note the square, not |.|^2) and factorises the resolvent residue into
u(r) u(s). Regulated integrals split into a numeric part over [0, b] and an
exact closed-form Gaussian tail, so the mu -> 0 limit is reached by ordinary
polynomial extrapolation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (MatchingCoefficients, ShellPotential, green_function,
                   jost_plus_batch, match_coefficients, s_matrix_batch)
from .errors import DomainError, ResidueError, SemigroupDomainError
from .poles import Pole, PoleKind, RESIDUAL_SCALE
from .quadrature import (circle_residue, gauss_nodes, neville_to_zero,
                         richardson_contract_check)

DEFAULT_CONTOUR_RADIUS = 1e-3


def _interior_nodes(pot: ShellPotential, k: complex, per_unit: float = 3.0):
    n = max(64, int(per_unit * abs(k) * pot.b / np.pi) + 24)
    return min(n, 320)


@dataclass(frozen=True)
class GamowState:
    """Piecewise-exact eigenfunction u(r; z_n) with outgoing boundary."""

    potential: ShellPotential
    pole: Pole
    n_sq: complex
    n_factor: complex
    coeffs: MatchingCoefficients

    @property
    def q_n(self) -> complex:
        return self.coeffs.q

    @property
    def energy_norm_factor(self) -> complex:
        """sqrt(2 k_n) * n_factor; squares to 2 k_n n_sq, the energy-plane residue norm."""
        return np.sqrt(2.0 * self.pole.k) * self.n_factor

    def eval(self, r):
        """u(r); exactly n_factor * e^{i k_n r} for r > b."""
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr < 0):
            raise DomainError("radius must be nonnegative")
        k, q = self.pole.k, self.coeffs.q
        scale = self.n_factor / self.coeffs.j3
        out = np.empty(np.shape(r_arr), dtype=complex)
        inner = r_arr <= self.potential.a
        shell = (r_arr > self.potential.a) & (r_arr <= self.potential.b)
        outer = r_arr > self.potential.b
        out[inner] = scale * np.sin(k * r_arr[inner])
        out[shell] = scale * (self.coeffs.j1 * np.exp(1j * q * r_arr[shell])
                              + self.coeffs.j2 * np.exp(-1j * q * r_arr[shell]))
        out[outer] = self.n_factor * np.exp(1j * k * r_arr[outer])
        return complex(out) if np.ndim(r) == 0 else out

    def scaled(self, factor: complex) -> "GamowState":
        """Same eigenfunction with u -> factor * u (for scaling tests)."""
        return GamowState(self.potential, self.pole, self.n_sq * factor ** 2,
                          self.n_factor * factor, self.coeffs)


def residue_contour_radius(pole: Pole, others=()) -> float:
    rho = DEFAULT_CONTOUR_RADIUS
    for other in others:
        if other.k != pole.k:
            rho = min(rho, 0.5 * abs(other.k - pole.k))
    return rho


def build_state(pot: ShellPotential, pole: Pole, others=()) -> GamowState:
    """Assemble the normalised eigenfunction at ``pole``.

    The S-matrix residue is taken on a circle of radius min(1e-3, half the
    distance to the nearest other pole), with a node-doubling consistency
    check (64 vs 128 trapezoid points to 1e-10 relative, one shrink-and-retry).
    """
    if pole.jost_residual > RESIDUAL_SCALE * (1.0 + abs(pole.k)):
        raise DomainError(f"pole {pole.k} has residual {pole.jost_residual:.2e}, "
                          "not a polished Jost zero")
    rho = residue_contour_radius(pole, others)
    res = circle_residue(lambda z: s_matrix_batch(pot, z), pole.k, rho,
                         rel_tol=1e-10, nodes=64, retries=1)
    n_sq = 1j * res
    if abs(n_sq) < 1e-12:
        raise ResidueError(f"vanishing S-matrix residue at {pole.k}: no simple pole enclosed")
    n_factor = np.sqrt(n_sq)  # principal root, argument in (-pi/2, pi/2]
    coeffs = match_coefficients(pot, pole.k)
    return GamowState(potential=pot, pole=pole, n_sq=complex(n_sq),
                      n_factor=complex(n_factor), coeffs=coeffs)


def build_states(pot: ShellPotential, poles) -> list[GamowState]:
    return [build_state(pot, p, others=[o for o in poles if o is not p]) for p in poles]


def default_mu_sequence(pot: ShellPotential) -> list[float]:
    mu0 = 0.5 / pot.b ** 2
    return [mu0 * 4.0 ** (-j) for j in range(4)]


def _regulated_product_integral(state_a: GamowState, state_b: GamowState, mu: float) -> complex:
    """∫_0^∞ e^{-mu r^2} u_a(r) u_b(r) dr (plain product, no conjugation)."""
    pot = state_a.potential
    nodes = _interior_nodes(pot, max(abs(state_a.pole.k), abs(state_b.pole.k)))
    x, w = gauss_nodes(nodes)
    total = 0.0 + 0.0j
    for lo, hi in ((0.0, pot.a), (pot.a, pot.b)):
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        r = mid + half * x
        total += half * complex(np.sum(w * np.exp(-mu * r * r)
                                       * state_a.eval(r) * state_b.eval(r)))
    from .quadrature import gaussian_tail_moment
    tail = state_a.n_factor * state_b.n_factor * gaussian_tail_moment(
        0, mu, 0.0, state_a.pole.k + state_b.pole.k, pot.b)
    return total + tail


def regulated_overlap(state_a: GamowState, state_b: GamowState,
                      mu_sequence=None) -> complex:
    """Zeldovich-regulated overlap, extrapolated mu -> 0.

    Equals delta_{n,n'} for correctly normalised states.
    """
    mus = list(mu_sequence) if mu_sequence is not None else default_mu_sequence(state_a.potential)
    if any(m <= 0 for m in mus) or any(lo >= hi for hi, lo in zip(mus, mus[1:])):
        raise DomainError("mu sequence must be positive and strictly decreasing")
    vals = [_regulated_product_integral(state_a, state_b, mu) for mu in mus]
    value, stages = neville_to_zero(mus, vals)
    richardson_contract_check(stages[: max(3, len(stages))], tol_ratio=1.5)
    return value


def zeldovich_norm(state: GamowState, mu_sequence=None) -> complex:
    """Regulated self-overlap; 1 + O(1e-6) certifies the normalisation."""
    return regulated_overlap(state, state, mu_sequence)


def green_residue(pot: ShellPotential, r: float, s: float, pole: Pole,
                  others=()) -> complex:
    """Energy-plane residue of the resolvent kernel at the pole.

    Contour quadrature in the k-plane with the dE = 2k dk Jacobian folded in;
    equals u(r) u(s) for the normalised eigenfunction.
    """
    rho = residue_contour_radius(pole, others)

    def integrand(zs):
        return np.array([green_function(pot, r, s, z) * 2.0 * z for z in np.atleast_1d(zs)])

    return circle_residue(integrand, pole.k, rho, rel_tol=1e-9, nodes=64, retries=1)


def _pair_integral(packet, state: GamowState) -> complex:
    """∫_0^∞ packet(r) u(r) dr: numeric over [0, b], exact Gaussian tail beyond."""
    pot = state.potential
    if packet.c_min <= 0:
        from .errors import FalloffError
        raise FalloffError("packet falloff certificate cannot dominate eigenfunction growth")
    nodes = _interior_nodes(pot, state.pole.k)
    x, w = gauss_nodes(nodes)
    total = 0.0 + 0.0j
    for lo, hi in ((0.0, pot.a), (pot.a, pot.b)):
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        r = mid + half * x
        total += half * complex(np.sum(w * packet.value(r) * state.eval(r)))
    total += state.n_factor * packet.tail_integral(state.pole.k, pot.b)
    return total


def pair_ket(packet, state: GamowState) -> complex:
    """⟨phi|z_n⟩ = ∫_0^∞ [phi(r)]* u(r; z_n) dr."""
    return _pair_integral(packet.conjugate(), state)


def pair_bra(packet, state: GamowState) -> complex:
    """⟨z_n|phi⟩ = ∫_0^∞ phi(r) u(r; z_n) dr (no conjugation)."""
    return _pair_integral(packet, state)


@dataclass(frozen=True)
class EvolutionFactor:
    value: complex
    t: float
    validity: str


def evolution_factor(pole: Pole, t: float) -> EvolutionFactor:
    """Semigroup factor e^{-i z_n t}.

    Resonances evolve forward only (t >= 0), anti-resonances backward only
    (t <= 0); outside the half-line the factor blows up and the request is a
    SemigroupDomainError. Bound and virtual poles have real energy and are
    unrestricted.
    """
    if pole.kind is PoleKind.RESONANCE:
        if t < 0:
            raise SemigroupDomainError("resonance evolution is defined for t >= 0 only")
        validity = "t >= 0"
    elif pole.kind is PoleKind.ANTI_RESONANCE:
        if t > 0:
            raise SemigroupDomainError("anti-resonance evolution is defined for t <= 0 only")
        validity = "t <= 0"
    else:
        validity = "all t"
    return EvolutionFactor(value=complex(np.exp(-1j * pole.z * t)), t=t, validity=validity)
