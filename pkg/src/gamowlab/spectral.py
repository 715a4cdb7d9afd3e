"""Energy representations: transforms, complex-delta, residue and
Breit-Wigner functionals.

The scattering eigenfunctions used as kernels are delta-normalised in the
energy, kernel_pm(r; k) = (pi k)^{-1/2} chi(r; k) / Jpm(k), so for a packet
phi the two energy representations on the physical spectrum are

    transform(phi, sign, k) = ∫_0^∞ [kernel_sign(r; k)]* phi(r) dr .

For complex q the operation returns the analytic continuation of that
function of E = q^2 (conjugating the kernel on the real axis swaps
Jplus <-> Jminus, so the continued "minus" transform carries 1/Jplus and
inherits simple poles at the resonances). The conjugate-continuation rule is
honoured throughout: the continuation of [transform(E)]* is
[transform(z*)]*, which is what the complex-delta and residue functionals
consume.

All radial integrals split into a numeric piece over [0, b] and an exact
closed-form Gaussian tail, so evaluation stays stable far into the complex
plane; the packet's analyticity certificate |Im q| <= q_max is enforced on
the public transform surface.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ShellPotential, jost_plus_batch
from .errors import (CertificateError, DomainError, PoleError,
                     RegulatorSignError)
from .poles import PoleKind
from .quadrature import adaptive_panels, circle_residue, gauss_nodes
from .states import GamowState, residue_contour_radius

SQRT_2PI = np.sqrt(2.0 * np.pi)


def _chi_on_grid(pot: ShellPotential, qs: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Regular solution on the outer product grid (len(qs), len(r)), r <= b."""
    from .core import _forward_arrays, _check_k
    qs = _check_k(pot, qs)
    q, j1, j2, _, _ = _forward_arrays(pot, qs)
    k = qs[:, None]
    rr = r[None, :]
    inner = rr <= pot.a
    vals = np.where(inner, np.sin(k * rr), 0.0 + 0.0j)
    shell = ~inner
    vals = vals + np.where(shell, j1[:, None] * np.exp(1j * q[:, None] * rr)
                           + j2[:, None] * np.exp(-1j * q[:, None] * rr), 0.0 + 0.0j)
    return vals


def _chi_packet_integral(pot: ShellPotential, packet, qs: np.ndarray) -> np.ndarray:
    """T(q) = ∫_0^∞ chi(r; q) packet(r) dr for a batch of q."""
    qs = np.atleast_1d(np.asarray(qs, dtype=complex))
    qmax = float(np.max(np.abs(qs)))
    n = min(384, max(64, int(3.0 * qmax * pot.b / np.pi) + 24))
    x, w = gauss_nodes(n)
    total = np.zeros(len(qs), dtype=complex)
    for lo, hi in ((0.0, pot.a), (pot.a, pot.b)):
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        r = mid + half * x
        chi = _chi_on_grid(pot, qs, r)
        total += half * (chi * packet.value(r)[None, :]) @ w
    from .core import _forward_arrays
    _, _, _, j3, j_in = _forward_arrays(pot, qs)
    tails_out = np.array([packet.tail_integral(q, pot.b) for q in qs])
    tails_in = np.array([packet.tail_integral(-q, pot.b) for q in qs])
    return total + j3 * tails_out + j_in * tails_in


def _energy_norm(qs: np.ndarray, lower_branch: bool = False) -> np.ndarray:
    """(pi q)^{-1/2}; ``lower_branch`` continues arg q into (-2pi, 0].

    Only the energy norm is branched (chi and the Jost functions are entire
    in k), so contours that touch the negative real axis from below select
    the lower branch explicitly instead of numpy's arg = +pi convention.
    """
    if not lower_branch:
        return 1.0 / np.sqrt(np.pi * qs)
    ang = np.angle(qs)
    ang = np.where(ang > 0, ang - 2.0 * np.pi, ang)
    return np.exp(-0.5 * (np.log(np.pi * np.abs(qs)) + 1j * ang))


def _continued_transform_batch(pot, packet, denominator: str, qs,
                               lower_branch: bool = False) -> np.ndarray:
    """N(q) T(q) / Jden(q); ``denominator`` is 'plus' or 'minus'."""
    qs = np.atleast_1d(np.asarray(qs, dtype=complex))
    den = jost_plus_batch(pot, qs) if denominator == "plus" else jost_plus_batch(pot, -qs)
    bad = np.abs(den) < 1e-13 * (1.0 + np.abs(qs))
    if np.any(bad):
        raise PoleError(f"transform continuation hits a Jost zero at q = {qs[np.argmax(bad)]}")
    return (_energy_norm(qs, lower_branch) * _chi_packet_integral(pot, packet, qs) / den)


def transform(pot: ShellPotential, packet, sign: str, q: complex) -> complex:
    """Energy representation of ``packet`` (its analytic continuation) at q.

    ``sign`` selects the family: "minus" is the out representation, whose
    continuation carries 1/Jplus and poles at the resonance wave numbers;
    "plus" carries 1/Jminus. Raises CertificateError beyond the packet's
    analyticity certificate and PoleError at the family's Jost zeros.
    """
    if sign not in ("plus", "minus"):
        raise DomainError("sign must be 'plus' or 'minus'")
    q = complex(q)
    if abs(q.imag) > packet.q_max:
        raise CertificateError(f"|Im q| = {abs(q.imag):.3g} exceeds certificate "
                               f"q_max = {packet.q_max:.3g}")
    den = "plus" if sign == "minus" else "minus"
    return complex(_continued_transform_batch(pot, packet, den, q)[0])


@dataclass(frozen=True)
class EnergyTransform:
    """A packet bound to one representation family; evaluate with .at(q)."""

    potential: ShellPotential
    packet: object
    sign: str

    def at(self, q: complex) -> complex:
        return transform(self.potential, self.packet, self.sign, q)

    def curve(self, k_values):
        """Physical-spectrum samples [(E, value)] along real k > 0."""
        return [(float(k) ** 2, self.at(float(k))) for k in k_values]

    def curve_csv(self, k_values) -> str:
        """CSV rows (E, re, im) of the physical energy representation."""
        from ._serialize import render_csv
        rows = [(e, v.real, v.imag) for e, v in self.curve(k_values)]
        return render_csv(("E", "re", "im"), rows)


def _ct_minus_batch(pot, packet, qs, lower_branch: bool = False):
    """Continuation of [transform(packet, minus, E)]*: regular at resonances."""
    return _continued_transform_batch(pot, packet.conjugate(), "minus", qs,
                                      lower_branch=lower_branch)


def _ct_plus_batch(pot, packet, qs):
    """Continuation of [transform(packet, plus, E)]*: simple poles at resonances."""
    return _continued_transform_batch(pot, packet.conjugate(), "plus", qs)


def complex_delta_action(pot: ShellPotential, packet, state: GamowState) -> complex:
    """Action of the complex-delta functional: i sqrt(2 pi) N_n [phihat^-(z_n*)]*.

    Numerically equal to the position-space pairing ⟨phi|z_n⟩.
    """
    kn = state.pole.k
    if abs(kn.imag) > packet.q_max:
        raise CertificateError("packet certificate does not cover the pole")
    val = _ct_minus_batch(pot, packet, kn)[0]
    return complex(1j * SQRT_2PI * state.energy_norm_factor * val)


def residue_action(pot: ShellPotential, packet, state: GamowState, others=()) -> complex:
    """Action of the residue functional: -sqrt(2 pi)/N_n res[phihat^+(z*)]*_{z_n}.

    The continued conjugate plus-family transform has a simple pole at the
    resonance energy; its residue is taken by contour quadrature in the
    k-plane with the dE = 2k dk Jacobian. Numerically equal to ⟨phi|z_n⟩.
    """
    kn = state.pole.k
    if abs(kn.imag) > packet.q_max:
        raise CertificateError("packet certificate does not cover the pole")
    rho = residue_contour_radius(state.pole, [o for o in others if o.k != kn])

    def integrand(zs):
        zs = np.atleast_1d(zs)
        return _ct_plus_batch(pot, packet, zs) * 2.0 * zs

    res = circle_residue(integrand, kn, rho, rel_tol=1e-10, nodes=64, retries=1)
    return complex(-SQRT_2PI / state.energy_norm_factor * res)


def _packet_k_support(packet, eps: float) -> float:
    """Real-axis cutoff beyond which the packet's transform is below eps."""
    log_inv = np.log(1.0 / eps)
    if hasattr(packet, "terms"):
        return max(np.sqrt(4.0 * t.width * log_inv) for t in packet.terms) + 1.0
    # resonance packet: spectral content sits near the pole
    kn = packet.state.pole.k
    return abs(kn.real) + np.sqrt(4.0 * packet.mu0 * log_inv) + 2.0


def breit_wigner_action(pot: ShellPotential, packet, state: GamowState,
                        alpha: float, regulator_sign: str | None = None) -> complex:
    """Regulated Breit-Wigner (full-line Lorentzian) pairing with the packet.

    For a resonance the regulator is e^{-iE alpha} (alpha > 0) and the
    integral runs over the real energy line of the second sheet: E > 0 maps
    to real wave numbers, E < 0 to the negative imaginary axis. The E < 0 leg
    is evaluated on the equivalent fourth-quadrant diagonal ray, where the
    regulator decays as e^{-alpha s^2}; on the axis itself the partial sums
    of the oscillatory divergent-amplitude integrand do not converge for
    Gaussian-falloff packets. Anti-resonances take the opposite regulator
    sign and the mirrored (third-quadrant) contour.

    Satisfies the Cauchy identity: equals e^{-i alpha z_n} times the
    complex-delta action (opposite phase sign for anti-resonances).
    """
    if alpha <= 0:
        raise DomainError("regulator parameter alpha must be positive")
    kind = state.pole.kind
    if kind not in (PoleKind.RESONANCE, PoleKind.ANTI_RESONANCE):
        raise DomainError("Breit-Wigner pairing is defined for resonance pairs only")
    needed = "-" if kind is PoleKind.RESONANCE else "+"
    if regulator_sign is not None and regulator_sign != needed:
        raise RegulatorSignError(
            f"{kind.value} requires regulator sign '{needed}', got '{regulator_sign}'")

    zn = state.pole.z
    pref = -state.energy_norm_factor / SQRT_2PI
    if kind is PoleKind.ANTI_RESONANCE:
        pref = -pref
    reg = -1.0 if kind is PoleKind.RESONANCE else 1.0  # e^{reg * i E alpha} phase sign

    mirror = 1.0 if kind is PoleKind.RESONANCE else -1.0  # real-k rim: q = mirror * k
    ray = np.exp(-1j * np.pi / 4) if kind is PoleKind.RESONANCE else np.exp(-3j * np.pi / 4)

    def lorentz(qs):
        return 1.0 / (qs * qs - zn)

    # E > 0 leg along the physical rim
    k_cut = _packet_k_support(packet, 1e-17)

    lower_branch = kind is PoleKind.ANTI_RESONANCE

    def pos_leg(ks):
        ks = np.atleast_1d(ks)
        qs = mirror * ks
        e = qs * qs
        vals = _ct_minus_batch(pot, packet, qs, lower_branch=lower_branch)
        return np.exp(reg * 1j * e * alpha) * pref * lorentz(qs) * vals * 2.0 * ks

    edges = sorted({abs(state.pole.k.real), abs(zn) ** 0.5}) if zn != 0 else []
    pos, _ = adaptive_panels(pos_leg, 1e-9, k_cut, abs_tol=1e-12,
                             initial_edges=edges, n=16)

    # E < 0 leg on the rotated diagonal; E runs -inf -> 0, hence the minus sign
    c_min = packet.c_min
    decay = alpha - 1.0 / (8.0 * c_min)
    if decay <= 0:
        raise CertificateError(
            f"alpha = {alpha} cannot regulate a packet with falloff c = {c_min}")
    s_cut = np.sqrt(np.log(1e16) / decay)

    def neg_leg(ss):
        ss = np.atleast_1d(ss)
        qs = ss * ray
        e = qs * qs
        vals = _ct_minus_batch(pot, packet, qs, lower_branch=lower_branch)
        return np.exp(reg * 1j * e * alpha) * pref * lorentz(qs) * vals * 2.0 * qs * ray

    neg, _ = adaptive_panels(neg_leg, 1e-9, s_cut, abs_tol=1e-12, n=16)
    return complex(pos - neg)
