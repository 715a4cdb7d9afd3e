import numpy as np
import pytest

import gamowlab as gl
from gamowlab.states import _regulated_product_integral, default_mu_sequence

from conftest import as_complex, golden


class TestBuildState:
    def test_normalisation_matches_oracle(self, state1):
        ref = golden("pairings.json")
        assert abs(state1.n_sq - as_complex(ref["n_sq_1"])) <= 1e-10 * abs(state1.n_sq)

    def test_root_branch(self, g0_states):
        for s in g0_states:
            arg = np.angle(s.n_factor)
            assert -np.pi / 2 < arg <= np.pi / 2
            assert abs(s.n_factor ** 2 - s.n_sq) <= 1e-14 * abs(s.n_sq)

    def test_anti_resonance_conjugation(self, g0_states):
        by_n = {s.pole.n: s for s in g0_states}
        for n, s in by_n.items():
            if n > 0:
                assert abs(by_n[-n].n_sq - np.conj(s.n_sq)) <= 1e-10 * abs(s.n_sq)

    def test_fake_pole_raises_residue_error(self, free):
        fake = gl.Pole(n=1, k=2 - 0.5j, kind=gl.PoleKind.RESONANCE, jost_residual=0.0)
        with pytest.raises(gl.ResidueError):
            gl.build_state(free, fake)

    def test_unpolished_pole_rejected(self, g0):
        rough = gl.Pole(n=1, k=2.3 - 0.01j, kind=gl.PoleKind.RESONANCE,
                        jost_residual=0.5)
        with pytest.raises(gl.DomainError):
            gl.build_state(g0, rough)


class TestEval:
    def test_zero_at_origin(self, state1):
        assert state1.eval(0.0) == 0.0

    def test_continuity_at_interfaces(self, g0, state1):
        for r0 in (g0.a, g0.b):
            lo = state1.eval(r0 * (1 - 1e-13))
            hi = state1.eval(r0 * (1 + 1e-13))
            assert abs(hi - lo) <= 1e-11 * abs(lo)

    def test_exterior_closed_form(self, g0, state1):
        r = 2 * g0.b
        expect = state1.n_factor * np.exp(1j * state1.pole.k * r)
        assert state1.eval(r) == expect

    def test_exterior_growth_rate(self, g0, state1):
        ratio = abs(state1.eval(2 * g0.b)) / abs(state1.eval(g0.b))
        assert abs(ratio - np.exp(abs(state1.pole.k.imag) * g0.b)) <= 1e-12 * ratio

    def test_left_right_symmetry(self, g0_states):
        # [u(r; conj z)]* equals u(r; z) pointwise
        by_n = {s.pole.n: s for s in g0_states}
        r = np.linspace(0.0, 6.0, 200)
        for n in (1, 2, 3, 4):
            u = by_n[n].eval(r)
            mirror = np.conj(by_n[-n].eval(r))
            assert np.max(np.abs(mirror - u)) <= 1e-10 * np.max(np.abs(u))

    def test_eigenequation_residual(self, g0, g0_states):
        h = 1e-3
        for s in g0_states[:4]:
            z = s.pole.z
            for lo, hi, v in ((0.0, g0.a, 0.0), (g0.a, g0.b, g0.v0),
                              (g0.b, 2 * g0.b, 0.0)):
                r = np.linspace(lo + 5 * h, hi - 5 * h, 100)
                d2 = (-s.eval(r + 2 * h) + 16 * s.eval(r + h) - 30 * s.eval(r)
                      + 16 * s.eval(r - h) - s.eval(r - 2 * h)) / (12 * h * h)
                resid = -d2 + (v - z) * s.eval(r)
                assert np.max(np.abs(resid)) / np.max(np.abs(s.eval(r))) <= 1e-6

    def test_build_from_energy_agrees(self, g0, g0_poles, state1):
        # reconstructing k from z = k^2 (second-sheet root) gives the same state
        z = state1.pole.z
        k_back = np.sqrt(z + 0j)
        if k_back.imag > 0:
            k_back = -k_back
        assert abs(k_back - state1.pole.k) <= 1e-12 * abs(k_back)
        pole = gl.Pole(n=1, k=complex(k_back), kind=gl.PoleKind.RESONANCE,
                       jost_residual=state1.pole.jost_residual)
        rebuilt = gl.build_state(g0, pole, others=[p for p in g0_poles if p.n != 1])
        r = np.linspace(0.0, 5.0, 40)
        assert np.max(np.abs(rebuilt.eval(r) - state1.eval(r))) \
            <= 1e-10 * np.max(np.abs(state1.eval(r)))


class TestZeldovich:
    def test_self_overlap_is_one(self, g0_states):
        for s in g0_states:
            if s.pole.n in (1, 2, 3, 4):
                assert abs(gl.zeldovich_norm(s) - 1.0) <= 1e-6

    def test_quadratic_scaling(self, state1):
        assert abs(gl.zeldovich_norm(state1.scaled(2.0)) - 4.0) <= 4e-6

    def test_orthogonality(self, g0_states):
        lead = sorted((s for s in g0_states if s.pole.n > 0),
                      key=lambda s: s.pole.n)[:4]
        for i, sa in enumerate(lead):
            for sb in lead[i + 1:]:
                assert abs(gl.regulated_overlap(sa, sb)) <= 1e-6

    def test_bound_state_reduces_to_l2(self, well):
        region = gl.SearchRegion(-0.05, 0.05, 0.05, np.sqrt(5.0) - 1e-3, grid_step=0.2)
        poles = gl.find_poles(well, region)
        state = gl.build_state(well, poles[0])
        assert abs(state.n_sq.imag) <= 1e-10 * abs(state.n_sq)
        assert state.n_sq.real > 0
        # u is real up to a global phase
        r = np.linspace(0.01, 5.0, 120)
        u = state.eval(r)
        phase = u[np.argmax(np.abs(u))]
        phase /= abs(phase)
        assert np.max(np.abs(np.imag(u / phase))) <= 1e-10 * np.max(np.abs(u))
        # plain L2 norm (numeric + exact exponential tail) without regulator
        kappa = state.pole.k.imag
        x, w = np.polynomial.legendre.leggauss(400)
        total = 0.0
        for lo, hi in ((0.0, well.a), (well.a, well.b)):
            mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
            total += half * np.sum(w * state.eval(mid + half * x) ** 2)
        tail = state.n_factor ** 2 * np.exp(-2 * kappa * well.b) / (2 * kappa)
        plain = total + tail
        # deeper regulator ladder: the criterion tolerance outruns the
        # default four-stage extrapolation for a deeply bound state
        mus = [0.5 / well.b ** 2 * 4.0 ** (-j) for j in range(8)]
        assert abs(plain - gl.zeldovich_norm(state, mu_sequence=mus)) <= 1e-10

    def test_mu_sequence_validation(self, state1):
        with pytest.raises(gl.DomainError):
            gl.zeldovich_norm(state1, mu_sequence=[0.1, 0.2])
        with pytest.raises(gl.DomainError):
            gl.zeldovich_norm(state1, mu_sequence=[0.1, -0.05])


class TestGreenResidue:
    def test_factorisation(self, g0, g0_states, g0_poles):
        rng = np.random.default_rng(7)
        for s in g0_states[:2]:
            others = [p for p in g0_poles if p.n != s.pole.n]
            for _ in range(3):
                r, t = rng.uniform(0.05, 3.0, size=2)
                val = gl.green_residue(g0, float(r), float(t), s.pole, others=others)
                ref = s.eval(float(r)) * s.eval(float(t))
                assert abs(val - ref) <= 1e-8 * abs(ref)

    def test_symmetry(self, g0, g0_poles):
        others = g0_poles[1:]
        a = gl.green_residue(g0, 0.5, 1.5, g0_poles[0], others=others)
        b = gl.green_residue(g0, 1.5, 0.5, g0_poles[0], others=others)
        assert a == b

    def test_vanishes_at_origin(self, g0, g0_poles, state1):
        val = gl.green_residue(g0, 0.0, 1.5, g0_poles[0], others=g0_poles[1:])
        assert abs(val) <= 1e-12 * abs(state1.eval(1.5)) ** 2 + 1e-12


class TestPairings:
    def test_zero_packet(self, state1):
        zero = gl.WavePacket((gl.PacketTerm(0.0, 1, 2.0, 1.5),))
        assert gl.pair_ket(zero, state1) == 0.0
        assert gl.pair_bra(zero, state1) == 0.0

    def test_golden_pairing(self, state1, packets):
        ref = golden("pairings.json")
        val = gl.pair_ket(packets["P1"], state1)
        assert abs(val - as_complex(ref["pair_ket_P1_n1"])) <= 1e-10 * abs(val)

    def test_bra_ket_conjugation(self, g0_states, packets):
        # <phi|z_{-n}> = conj(<z_n|phi>)
        by_n = {s.pole.n: s for s in g0_states}
        for n in (1, 2):
            for packet in packets.values():
                lhs = gl.pair_ket(packet, by_n[-n])
                rhs = np.conj(gl.pair_bra(packet, by_n[n]))
                assert abs(lhs - rhs) <= 1e-12 * abs(lhs)

    def test_regulated_self_pairing_matches_zeldovich_path(self, state1):
        # phi = [u]† e^{-mu r^2}: the pairing reproduces the regulated square
        mu = 0.05
        packet = gl.ResonancePacket(state1, mu0=mu).conjugate()
        amp = packet._amplitude
        val = gl.pair_ket(packet, state1)
        ref = np.conj(amp) * _regulated_product_integral(state1, state1, mu)
        assert abs(val - ref) <= 1e-10 * abs(val)

    def test_default_mu_sequence_shape(self, g0):
        mus = default_mu_sequence(g0)
        assert len(mus) == 4 and mus[0] == 0.5 / g0.b ** 2
        assert all(a / b == 4.0 for a, b in zip(mus, mus[1:]))


class TestEvolutionFactor:
    def test_identity_at_zero(self, g0_poles):
        assert gl.evolution_factor(g0_poles[0], 0.0).value == 1.0

    def test_width_decay(self, g0_poles):
        pole = g0_poles[0]
        fac = gl.evolution_factor(pole, 2.0 / pole.gamma)
        assert abs(abs(fac.value) - np.exp(-1.0)) <= 1e-12

    def test_modulus_rule(self, g0_poles):
        for pole in g0_poles:
            t = 0.7 if pole.kind is gl.PoleKind.RESONANCE else -0.7
            fac = gl.evolution_factor(pole, t)
            assert abs(abs(fac.value) - np.exp(-pole.gamma * t / 2)) \
                <= 1e-12 * abs(fac.value)

    def test_semigroup_domains(self, g0_poles):
        res = next(p for p in g0_poles if p.kind is gl.PoleKind.RESONANCE)
        anti = next(p for p in g0_poles if p.kind is gl.PoleKind.ANTI_RESONANCE)
        with pytest.raises(gl.SemigroupDomainError):
            gl.evolution_factor(res, -1.0)
        with pytest.raises(gl.SemigroupDomainError):
            gl.evolution_factor(anti, 1.0)
        assert gl.evolution_factor(res, 1.0).validity == "t >= 0"
        assert gl.evolution_factor(anti, -1.0).validity == "t <= 0"

    def test_bound_unrestricted(self, well):
        region = gl.SearchRegion(-0.05, 0.05, 0.05, np.sqrt(5.0) - 1e-3, grid_step=0.2)
        pole = gl.find_poles(well, region)[0]
        for t in (-2.0, 2.0):
            assert abs(abs(gl.evolution_factor(pole, t).value) - 1.0) <= 1e-12
