"""Test wave packets with certified super-Gaussian falloff.

A WavePacket is a finite sum of terms A r^p exp(-c (r - r0)^2) with p >= 1
(so phi(0) = 0) and c > 1, which certifies decay faster than exp(-r^2) and
hence finite pairings with exponentially growing eigenfunctions. Packets are
entire in r; every integral against exp(iqr) has an exact closed-form tail,
which the pairing and transform machinery uses beyond the shell.

ResonancePacket is the square-integrable truncation of a Gamow eigenfunction
by a soft Gaussian, used for survival-probability studies. Its falloff
certificate is genuine but weaker (c = mu0 < 1), so it is not a member of
the certified test-function class and is accepted only where real-axis
amplitudes and pole pairings are involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import DomainError, FalloffError
from .quadrature import gaussian_tail_moment

CERT_SAFETY = 6.0  # q_max = CERT_SAFETY * sqrt(min c)


@dataclass(frozen=True)
class PacketTerm:
    amplitude: complex
    degree: int
    width: float
    center: float

    def __post_init__(self):
        if self.degree not in (1, 2, 3):
            raise DomainError("term degree must be 1, 2 or 3")
        if not self.width > 1.0:
            raise DomainError("term width c must exceed 1 (falloff certificate)")
        if self.center < 0:
            raise DomainError("term center must be nonnegative")


@dataclass(frozen=True)
class WavePacket:
    terms: Tuple[PacketTerm, ...]

    def __post_init__(self):
        if not self.terms:
            raise DomainError("packet needs at least one term")

    @property
    def c_min(self) -> float:
        return min(t.width for t in self.terms)

    @property
    def q_max(self) -> float:
        """Analyticity certificate: transforms are evaluated for |Im q| <= q_max."""
        return CERT_SAFETY * np.sqrt(self.c_min)

    def value(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros(np.shape(r), dtype=complex)
        for t in self.terms:
            out = out + t.amplitude * r ** t.degree * np.exp(-t.width * (r - t.center) ** 2)
        return out

    def conjugate(self) -> "WavePacket":
        return WavePacket(tuple(PacketTerm(np.conj(t.amplitude), t.degree, t.width, t.center)
                                for t in self.terms))

    def scaled(self, factor: complex) -> "WavePacket":
        return WavePacket(tuple(PacketTerm(factor * t.amplitude, t.degree, t.width, t.center)
                                for t in self.terms))

    def tail_integral(self, q: complex, lower: float) -> complex:
        """Exact ∫_lower^∞ phi(r) e^{iqr} dr."""
        return sum(t.amplitude * gaussian_tail_moment(t.degree, t.width, t.center, q, lower)
                   for t in self.terms)

    def l2_norm(self) -> float:
        return float(np.sqrt(overlap(self, self).real))

    def normalized(self) -> "WavePacket":
        return self.scaled(1.0 / self.l2_norm())


def overlap(left: WavePacket, right: WavePacket) -> complex:
    """Exact ⟨left|right⟩ = ∫_0^∞ [left(r)]* right(r) dr.

    Products of Gaussian terms recombine into single Gaussians, so the
    integral reduces to closed-form moments.
    """
    total = 0.0 + 0.0j
    for ta in left.terms:
        for tb in right.terms:
            c = ta.width + tb.width
            center = (ta.width * ta.center + tb.width * tb.center) / c
            damp = np.exp(-ta.width * tb.width * (ta.center - tb.center) ** 2 / c)
            amp = np.conj(ta.amplitude) * tb.amplitude * damp
            total += amp * gaussian_tail_moment(ta.degree + tb.degree, c, center, 0.0, 0.0)
    return total


def standard_packets() -> dict[str, WavePacket]:
    """The three reference packets P1-P3, L2-normalised.

    Fixtures centred on or near the shell so the low resonance overlaps are
    O(1); the shapes themselves are arbitrary.
    """
    p1 = WavePacket((PacketTerm(1.0, 1, 2.0, 1.5),)).normalized()
    p2 = WavePacket((PacketTerm(1.0, 2, 3.0, 1.0),)).normalized()
    p3 = WavePacket((PacketTerm(1.0, 1, 2.0, 1.5),
                     PacketTerm(-0.5, 1, 4.0, 2.5))).normalized()
    return {"P1": p1, "P2": p2, "P3": p3}


class ResonancePacket:
    """Soft-Gaussian truncation of a Gamow eigenfunction, L2-normalised.

    phi(r) = A u(r) exp(-mu0 r^2) with mu0 = 1/(2 b^2) by default: close to
    the eigenfunction where the state lives, square integrable at infinity.
    """

    def __init__(self, state, mu0: float | None = None, _conjugated: bool = False,
                 _amplitude: complex | None = None):
        self.state = state
        pot = state.potential
        self.mu0 = 0.5 / pot.b ** 2 if mu0 is None else float(mu0)
        if not self.mu0 > 0:
            raise FalloffError("resonance packet needs a positive regulator")
        self._conjugated = _conjugated
        if _amplitude is None:
            self._amplitude = 1.0 + 0.0j
            self._amplitude = 1.0 / self._l2_norm()
        else:
            self._amplitude = _amplitude

    @property
    def c_min(self) -> float:
        return self.mu0

    @property
    def q_max(self) -> float:
        return CERT_SAFETY * np.sqrt(self.mu0)

    def _raw(self, r):
        return self._amplitude * self.state.eval(r) * np.exp(-self.mu0 * np.asarray(r) ** 2)

    def value(self, r):
        vals = self._raw(r)
        return np.conj(vals) if self._conjugated else vals

    def conjugate(self) -> "ResonancePacket":
        out = ResonancePacket.__new__(ResonancePacket)
        out.state = self.state
        out.mu0 = self.mu0
        out._conjugated = not self._conjugated
        out._amplitude = self._amplitude
        return out

    def tail_integral(self, q: complex, lower: float) -> complex:
        """Exact ∫_lower^∞ phi(r) e^{iqr} dr using the closed exterior form of u."""
        st = self.state
        if lower < st.potential.b:
            raise DomainError("tail integral only defined beyond the shell")
        if not self._conjugated:
            return self._amplitude * st.n_factor * gaussian_tail_moment(
                0, self.mu0, 0.0, q + st.pole.k, lower)
        # conj(phi)(r) e^{iqr}: conjugate the unconjugated tail at -conj(q)
        plain = np.conj(self._amplitude) * np.conj(st.n_factor) * gaussian_tail_moment(
            0, self.mu0, 0.0, q - np.conj(st.pole.k), lower)
        return plain

    def _l2_norm(self) -> float:
        from .quadrature import gauss_nodes
        pot = self.state.potential
        x, w = gauss_nodes(160)
        total = 0.0
        for lo, hi in ((0.0, pot.a), (pot.a, pot.b)):
            mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
            total += half * float(np.sum(w * np.abs(self._raw(mid + half * x)) ** 2))
        kn = self.state.pole.k
        amp2 = abs(self._amplitude * self.state.n_factor) ** 2
        tail = amp2 * gaussian_tail_moment(0, 2 * self.mu0, 0.0, kn - np.conj(kn), pot.b)
        return float(np.sqrt(total + tail.real))
