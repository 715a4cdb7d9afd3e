import numpy as np
import pytest

import gamowlab as gl

from conftest import golden


class TestCountZeros:
    def test_free_has_none(self, free):
        region = gl.SearchRegion(0.5, 6.0, -2.0, -0.01)
        assert gl.count_zeros(free, region) == 0

    def test_acceptance_region_count(self, g0, g0_region):
        ref = golden("poles_g0.json")
        assert gl.count_zeros(g0, g0_region) == ref["count"]

    def test_additivity(self, g0):
        whole = gl.SearchRegion(0.1, 8.0, -3.0, -0.001)
        left = gl.SearchRegion(0.1, 4.3, -3.0, -0.001)
        right = gl.SearchRegion(4.3, 8.0, -3.0, -0.001)
        assert (gl.count_zeros(g0, left) + gl.count_zeros(g0, right)
                == gl.count_zeros(g0, whole))

    def test_region_validation(self):
        with pytest.raises(gl.DomainError):
            gl.SearchRegion(2.0, 1.0, -1.0, -0.1)
        with pytest.raises(gl.DomainError):
            gl.SearchRegion(1.0, 2.0, -1.0, -0.1, grid_step=0.0)


class TestFindPoles:
    def test_free_empty(self, free):
        assert gl.find_poles(free, gl.SearchRegion(0.5, 6.0, -2.0, -0.01)) == []

    def test_matches_muller_oracle(self, g0_poles):
        ref = golden("poles_g0.json")
        resonances = [p for p in g0_poles if p.n > 0]
        assert len(resonances) == ref["count"]
        for pole, expect in zip(resonances, ref["poles"]):
            assert abs(pole.k - complex(expect["k_re"], expect["k_im"])) <= 1e-9

    def test_residuals_and_pairing(self, g0_poles):
        by_n = {p.n: p for p in g0_poles}
        for pole in g0_poles:
            assert pole.jost_residual <= 1e-11 * (1 + abs(pole.k))
            if pole.n > 0:
                mirror = by_n[-pole.n]
                assert abs(mirror.k + np.conj(pole.k)) <= 1e-10
                assert abs(mirror.z - np.conj(pole.z)) <= 1e-10 * abs(pole.z)
                assert mirror.kind is gl.PoleKind.ANTI_RESONANCE

    def test_resonance_quadrant_invariants(self, g0_poles):
        for pole in g0_poles:
            if pole.kind is gl.PoleKind.RESONANCE:
                assert pole.k.real > 0 and pole.k.imag < 0
                assert pole.gamma > 0

    def test_simple_zeros(self, g0, g0_poles):
        # unit winding number on a small circle (via a tight square) around each zero
        for pole in g0_poles:
            if pole.n < 0:
                continue
            d = 1e-4
            region = gl.SearchRegion(pole.k.real - d, pole.k.real + d,
                                     pole.k.imag - d, pole.k.imag + d)
            assert gl.count_zeros(g0, region) == 1

    def test_grid_step_stability(self, g0, g0_region, g0_poles):
        finer = gl.SearchRegion(g0_region.re_min, g0_region.re_max,
                                g0_region.im_min, g0_region.im_max,
                                grid_step=g0_region.grid_step / 2)
        poles2 = gl.find_poles(g0, finer)
        assert len(poles2) == len(g0_poles)
        for a, b in zip(g0_poles, poles2):
            assert a.n == b.n and abs(a.k - b.k) <= 1e-11 * (1 + abs(a.k))

    def test_sorted_by_real_part(self, g0_poles):
        res = [p for p in g0_poles if p.n > 0]
        assert all(a.k.real < b.k.real for a, b in zip(res, res[1:]))
        assert [p.n for p in res] == list(range(1, len(res) + 1))


class TestBoundStates:
    def test_bound_states_match_bisection(self, well):
        ref = golden("bound_vm5.json")
        region = gl.SearchRegion(-0.05, 0.05, 0.05, np.sqrt(5.0) - 1e-3, grid_step=0.2)
        poles = gl.find_poles(well, region)
        assert len(poles) == len(ref["bound"])
        for pole, expect in zip(poles, ref["bound"]):
            assert pole.kind is gl.PoleKind.BOUND
            assert abs(pole.k - 1j * expect["kappa"]) <= 1e-10
            assert abs(pole.z.imag) <= 1e-10
            assert pole.z.real < 0
            assert abs(pole.z.real - expect["energy"]) <= 1e-9


class TestClassify:
    def test_quadrants(self):
        assert gl.classify(2 - 0.5j) is gl.PoleKind.RESONANCE
        assert gl.classify(-2 - 0.5j) is gl.PoleKind.ANTI_RESONANCE
        assert gl.classify(1.3j) is gl.PoleKind.BOUND
        assert gl.classify(-0.7j) is gl.PoleKind.VIRTUAL

    def test_axis_tolerance(self):
        assert gl.classify(complex(5e-10, 1.0)) is gl.PoleKind.BOUND
        assert gl.classify(complex(-5e-10, -1.0)) is gl.PoleKind.VIRTUAL

    def test_mirror_of_resonance(self, g0_poles):
        for pole in g0_poles:
            if pole.kind is gl.PoleKind.RESONANCE:
                assert gl.classify(-np.conj(pole.k)) is gl.PoleKind.ANTI_RESONANCE

    def test_non_pole_locations_rejected(self):
        with pytest.raises(gl.DomainError):
            gl.classify(0.0)
        with pytest.raises(gl.DomainError):
            gl.classify(1 + 1j)
