import numpy as np
import pytest

import gamowlab as gl


class TestDirectAmplitude:
    def test_free_completeness(self, free, packets):
        # S = 1 and no bound states: <P1|P1> through the spectral integral
        val = gl.direct_amplitude(free, packets["P1"], packets["P1"], 0.0)
        assert abs(val - 1.0) <= 1e-10

    def test_shell_completeness(self, g0, g0_poles, packets):
        # no bound states for the barrier: t = 0 recovers the exact overlap
        val = gl.direct_amplitude(g0, packets["P1"], packets["P1"], 0.0,
                                  pole_hints=[p.k for p in g0_poles if p.n > 0])
        assert abs(val - 1.0) <= 1e-9

    def test_cross_overlap(self, g0, g0_poles, packets):
        val = gl.direct_amplitude(g0, packets["P1"], packets["P3"], 0.0,
                                  pole_hints=[p.k for p in g0_poles if p.n > 0])
        assert abs(val - gl.overlap(packets["P1"], packets["P3"])) <= 1e-9

    def test_unitarity_bound(self, g0, g0_poles, packets):
        hints = [p.k for p in g0_poles if p.n > 0]
        for t in (0.0, 0.4, 1.1, 3.0):
            val = gl.direct_amplitude(g0, packets["P1"], packets["P1"], t,
                                      pole_hints=hints)
            assert abs(val) <= 1.0 + 1e-9

    def test_negative_time_rejected(self, g0, packets):
        with pytest.raises(gl.DomainError):
            gl.direct_amplitude(g0, packets["P1"], packets["P1"], -0.5)


class TestExpansionAmplitude:
    def test_pole_free_case(self, free, packets):
        report = gl.expansion_amplitude(free, [], packets["P1"], packets["P1"],
                                        0.5, 6)
        assert report.n_used == 0 and report.pole_terms == ()
        assert report.residual <= 1e-8

    def test_reference_times(self, g0, g0_states, packets):
        for t in (0.3, 0.5, 1.0):
            report = gl.expansion_amplitude(g0, g0_states, packets["P1"],
                                            packets["P1"], t, 6)
            assert report.residual <= 1e-3

    def test_monotone_in_n_max(self, g0, g0_states, packets):
        residuals = [gl.expansion_amplitude(g0, g0_states, packets["P1"],
                                            packets["P1"], 0.5, n).residual
                     for n in range(2, 7)]
        for lo, hi in zip(residuals[1:], residuals[:-1]):
            assert lo <= hi + 1e-12

    def test_time_domain_contract(self, g0, g0_states, packets):
        with pytest.raises(gl.DomainError):
            gl.expansion_amplitude(g0, g0_states, packets["P1"], packets["P1"],
                                   -0.1, 4)
        with pytest.raises(gl.DomainError):
            gl.expansion_amplitude(g0, g0_states, packets["P1"], packets["P1"],
                                   0.0, 4)
        report = gl.expansion_amplitude(g0, g0_states, packets["P1"],
                                        packets["P1"], 0.0, 6,
                                        allow_unregulated=True)
        assert report.residual <= 1e-2

    def test_semigroup_phase_identity(self, g0_states, packets):
        # the pole term at t1 + t2 is the product of evolution factors times t = 0
        state = next(s for s in g0_states if s.pole.n == 1)
        pk = gl.pair_ket(packets["P1"], state)
        pb = gl.pair_bra(packets["P1"], state)
        t1, t2 = 0.4, 0.9
        term0 = pk * pb
        lhs = np.exp(-1j * state.pole.z * (t1 + t2)) * term0
        rhs = (gl.evolution_factor(state.pole, t1).value
               * gl.evolution_factor(state.pole, t2).value * term0)
        assert abs(lhs - rhs) <= 1e-12 * abs(lhs)

    def test_reality_pairing(self, g0_states, packets):
        # conjugating both packets maps resonance terms to conjugate mirror terms
        by_n = {s.pole.n: s for s in g0_states}
        phi = packets["P3"].scaled(np.exp(0.3j))
        for n in (1, 2):
            lhs = (gl.pair_ket(phi.conjugate(), by_n[n])
                   * gl.pair_bra(phi.conjugate(), by_n[n]))
            rhs = np.conj(gl.pair_ket(phi, by_n[-n]) * gl.pair_bra(phi, by_n[-n]))
            assert abs(lhs - rhs) <= 1e-12 * abs(lhs)

    def test_background_divergence_error(self, free, packets):
        # below the regulating time the ray contributions never decay
        with pytest.raises(gl.BackgroundDivergenceError):
            gl.expansion_amplitude(free, [], packets["P1"], packets["P1"],
                                   0.05, 4)

    def test_report_fields(self, g0, g0_states, packets):
        report = gl.expansion_amplitude(g0, g0_states, packets["P1"],
                                        packets["P1"], 0.5, 3)
        assert report.n_used == 3
        assert [n for n, _ in report.pole_terms] == [1, 2, 3]
        total = sum(v for _, v in report.pole_terms) + report.background
        assert abs(report.direct - total) \
            == pytest.approx(report.residual * abs(report.direct), rel=1e-12)


class TestDominantPoleSplit:
    def test_split_is_exact(self, g0, g0_states, packets):
        term, rest = gl.dominant_pole_split(g0, g0_states, packets["P1"], 0.5)
        direct = gl.direct_amplitude(g0, packets["P1"], packets["P1"], 0.5,
                                     pole_hints=[s.pole.k for s in g0_states
                                                 if s.pole.n > 0])
        assert abs(term + rest - direct) <= 1e-13 * abs(direct)

    def test_tuned_packet_dominance(self, g0, g0_states, state1):
        packet = gl.ResonancePacket(state1)
        term, rest = gl.dominant_pole_split(g0, g0_states, packet, 5.0)
        assert abs(rest) / abs(term) <= 0.01

    def test_no_poles_error(self, free, packets):
        with pytest.raises(gl.NoPolesError):
            gl.dominant_pole_split(free, [], packets["P1"], 0.5)


class TestSurvival:
    def test_normalised_start(self, g0, g0_states, packets):
        curve = gl.survival(g0, g0_states, packets["P1"], [0.0])
        assert abs(curve.probability[0] - 1.0) <= 1e-10

    def test_probability_range(self, g0, g0_states, packets):
        times = np.linspace(0.0, 3.0, 7)
        curve = gl.survival(g0, g0_states, packets["P1"], times)
        assert all(0.0 <= p <= 1.0 + 1e-9 for p in curve.probability)

    def test_dominant_fit_matches_width(self, g0, g0_states, state1):
        packet = gl.ResonancePacket(state1)
        times = list(np.linspace(0.0, 120.0, 25))
        curve = gl.survival(g0, g0_states, packet, times, fit_dominant=True)
        assert curve.gamma_fit is not None
        assert abs(curve.gamma_fit - state1.pole.gamma) <= 0.05 * state1.pole.gamma
        assert curve.r_squared_window >= 0.999

    def test_window_not_found(self, g0, g0_states, packets):
        # an untuned packet never reaches 100x dominance at early times
        with pytest.raises(gl.WindowNotFoundError):
            gl.survival(g0, g0_states, packets["P2"], [0.0, 0.1, 0.2],
                        fit_dominant=True)

    def test_negative_times_rejected(self, g0, g0_states, packets):
        with pytest.raises(gl.DomainError):
            gl.survival(g0, g0_states, packets["P1"], [-1.0])
