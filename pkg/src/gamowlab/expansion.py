"""Resonance expansions of transition amplitudes and survival probabilities.

The direct amplitude is the spectral integral over the physical energies,

    A(t) = ∫_0^∞ dE e^{-iEt} ⟨phi_out|E-⟩ S(E) ⟨+E|phi_in⟩ ,

evaluated in the k-plane (E = k^2, dE = 2k dk) on an adaptive grid that is
reused across times. Closing the contour through the lower half-plane turns
A(t) into the sum of pole terms e^{-i z_n t} ⟨phi_out|z_n⟩⟨z_n|phi_in⟩ plus
a non-resonant background integral over the negative energies of the second
sheet.

The background is a regularised object: along the negative imaginary k-axis
its partial integrals oscillate with exponentially growing amplitude for
Gaussian-falloff packets, so the quadrature follows the equivalent
fourth-quadrant diagonal ray (no poles are crossed; any broad pole that
would sit between the axis and the ray gets its residue folded back in).
There the time regulator decays like e^{-t s^2} and the integral converges
absolutely for the times of interest.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .core import ShellPotential, s_matrix_batch
from .errors import BackgroundDivergenceError, DomainError, NoPolesError, WindowNotFoundError
from .packets import overlap
from .poles import PoleKind
from .quadrature import gauss_nodes, panel_integrate
from .spectral import (_continued_transform_batch, _ct_minus_batch,
                       _packet_k_support)
from .states import GamowState, pair_bra, pair_ket

BACKGROUND_HARD_CAP_SCALE = 50.0  # s <= 50 sqrt(1/min c)
TAIL_RATIO = 1e-12


@dataclass(frozen=True)
class ExpansionReport:
    t: float
    pole_terms: Tuple[Tuple[int, complex], ...]
    background: complex
    direct: complex
    n_used: int
    residual: float


@dataclass(frozen=True)
class SurvivalCurve:
    times: Tuple[float, ...]
    probability: Tuple[float, ...]
    gamma_fit: float | None = None
    window: Tuple[float, float] | None = None
    r_squared_window: float | None = None
    r_squared_outside: float | None = None
    deviation_detected: bool | None = None


class _SpectralDensity:
    """Adaptive real-axis samples of F(k) = 2k ⟨out|E-⟩ S ⟨+E|in⟩.

    Time enters only through the phase e^{-i k^2 t}, so one grid (refined for
    the largest requested time) serves every amplitude evaluation.
    """

    def __init__(self, pot: ShellPotential, phi_out, phi_in, t_max: float,
                 pole_hints=(), rel_tol: float = 1e-12, t_ref: float | None = None):
        self.pot = pot
        k_cut = max(_packet_k_support(phi_out, 1e-17),
                    _packet_k_support(phi_in, 1e-17)) + 6.0
        self.k_cut = k_cut

        def density(ks):
            ks = np.atleast_1d(np.asarray(ks, dtype=complex))
            g = _ct_minus_batch(pot, phi_out, ks)
            f = _continued_transform_batch(pot, phi_in, "minus", ks)
            return 2.0 * ks * g * s_matrix_batch(pot, ks) * f

        edges = {1e-9, k_cut}
        for k in pole_hints:
            x, y = abs(k.real), abs(k.imag)
            if 0 < x < k_cut:
                for d in (0.0, 2 * y, 10 * y, 50 * y):
                    for s in (-1, 1):
                        e = x + s * d
                        if 1e-9 < e < k_cut:
                            edges.add(e)
        edges = sorted(edges)

        nodes, weights, values = [], [], []
        # panels resolved to ~19 rad of phase at t_ref stay within the
        # 32-node rule's headroom up to about twice that time
        if t_ref is None:
            t_ref = t_max
        t_ref = max(t_ref, 1e-3)
        self.t_safe = 2.0 * t_ref
        scale_guess = max(abs(overlap(phi_out, phi_out)) ** 0.5
                          * abs(overlap(phi_in, phi_in)) ** 0.5, 1e-6) \
            if hasattr(phi_out, "terms") and hasattr(phi_in, "terms") else 1.0
        abs_tol = rel_tol * scale_guess
        stack = [(edges[i], edges[i + 1], 0) for i in range(len(edges) - 1)]
        stack.reverse()
        x16, w16 = gauss_nodes(16)
        x32, w32 = gauss_nodes(32)
        while stack:
            a, b, depth = stack.pop()
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            k16 = mid + half * x16
            k32 = mid + half * x32
            f16 = density(k16)
            f32 = density(k32)
            phase16 = np.exp(-1j * k16 ** 2 * t_ref)
            phase32 = np.exp(-1j * k32 ** 2 * t_ref)
            coarse = half * np.sum(w16 * f16 * phase16)
            fine = half * np.sum(w32 * f32 * phase32)
            if abs(fine - coarse) <= abs_tol * max((b - a) / k_cut, 1e-4) or depth >= 30:
                nodes.append(k32)
                weights.append(half * w32)
                values.append(f32)
            else:
                stack.append((mid, b, depth + 1))
                stack.append((a, mid, depth + 1))
        self.k = np.concatenate(nodes)
        self.w = np.concatenate(weights)
        self.f = np.concatenate(values)
        self._build_far_region(density)

    def _build_far_region(self, density):
        """Algebraic-tail completion of the truncated spectral integral.

        Beyond the cutoff the transforms' Gaussian parts are dead, but the
        boundary terms of the radial integrals (the origin and the potential
        jumps at a, b) leave a slowly decaying tail: a trigonometric
        polynomial in the boundary frequencies over 1/k^6. It is integrated
        here on a coarse fixed grid out to k2 = k_cut + 85 (exact at t = 0),
        and the remainder beyond the grid comes from a least-squares mode fit
        whose tails integrate in closed form. amplitude() drops far panels
        whose evolution phase would exceed the panel rule's resolution; the
        analytic mode tails then take over from that point, where their own
        oscillation suppression makes the model error irrelevant.
        """
        a, b = self.pot.a, self.pot.b
        x32, w32 = gauss_nodes(32)
        width = 0.5
        self.k2 = self.k_cut + 85.0
        lows = np.arange(self.k_cut, self.k2 - 1e-9, width)
        self._far_hi = lows + width
        mids = lows + 0.5 * width
        k_far = mids[:, None] + 0.5 * width * x32[None, :]
        f_far = density(k_far.ravel()).reshape(k_far.shape)
        self._far_k = k_far
        self._far_wf = 0.5 * width * w32[None, :] * f_far

        freqs = sorted({round(w, 12) for base in (0.0, 2 * a, 2 * b,
                                                  2 * (b - a), 2 * (a + b))
                        for w in (base, -base)})
        ks = np.linspace(self.k2 - 12.0, self.k2, 480)
        y = density(ks) * ks ** 6
        scale = float(np.max(np.abs(y)))
        if scale < 1e-280:
            self._tail_modes = []
            return
        cols = []
        for w in freqs:
            phase = np.exp(1j * w * ks)
            cols.append(phase)
            cols.append(phase / ks)
        design = np.array(cols).T
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        misfit = float(np.max(np.abs(y - design @ coef))) / scale
        if misfit > 0.2:
            coef = np.zeros(2 * len(freqs), dtype=complex)
            coef[2 * freqs.index(0.0)] = np.mean(y)
        self._tail_modes = [(w, p, coef[2 * i + (p - 6)])
                            for i, w in enumerate(freqs) for p in (6, 7)]

    def amplitude(self, t: float) -> complex:
        if t < 0:
            raise DomainError("amplitudes are defined for t >= 0")
        from .quadrature import algebraic_mode_tail
        total = complex(np.sum(self.w * self.f * np.exp(-1j * self.k ** 2 * t)))
        # keep far panels only while a 32-node rule resolves their phase
        if t == 0:
            keep = len(self._far_hi)
        else:
            # panel phase ~ 2 k t * width with width = 0.5
            ok = self._far_hi * t <= 60.0
            keep = int(np.argmin(ok)) if not ok.all() else len(ok)
        if keep:
            kk = self._far_k[:keep]
            total += complex(np.sum(self._far_wf[:keep] * np.exp(-1j * kk * kk * t)))
        anchor = float(self._far_hi[keep - 1]) if keep else self.k_cut
        total += complex(sum(c * algebraic_mode_tail(w, p, anchor, t)
                             for w, p, c in self._tail_modes if c != 0))
        return total


def direct_amplitude(pot: ShellPotential, phi_out, phi_in, t: float,
                     pole_hints=()) -> complex:
    """Transition amplitude from the spectral integral; t = 0 gives ⟨out|in⟩."""
    dens = _SpectralDensity(pot, phi_out, phi_in, t_max=t, pole_hints=pole_hints)
    return dens.amplitude(t)


def _resonance_states(states) -> list[GamowState]:
    res = [s for s in states if s.pole.kind is PoleKind.RESONANCE]
    return sorted(res, key=lambda s: s.pole.n)


def _background_ray(pot, phi_out, phi_in, t, ray_angle, s_cap, hard_cap,
                    tail_tol=1e-7):
    """March the rotated background ray with tail detection.

    Segment contributions normally decay below 1e-12 of the running total
    (converged). If they instead pass through a minimum and grow (the
    divergent-tail regime of an asymptotic evaluation), the sum is truncated
    at the minimum and accepted only if the smallest segment is below
    ``tail_tol`` of the total; otherwise BackgroundDivergenceError carries
    the segment profile as diagnostics.
    """
    w = np.exp(1j * ray_angle)

    def integrand(ss):
        ss = np.atleast_1d(np.asarray(ss, dtype=float))
        qs = ss * w
        g = _ct_minus_batch(pot, phi_out, qs)
        f = _continued_transform_batch(pot, phi_in, "minus", qs)
        s_vals = s_matrix_batch(pot, qs)
        return 2.0 * qs * np.exp(-1j * qs ** 2 * t) * g * s_vals * f * w

    segs: list[complex] = []
    s = 1e-9
    seg_len = 0.5
    quiet = 0
    cap = min(s_cap, hard_cap)
    # the regulator's Gaussian support shrinks like 1/sqrt(t)
    decay = abs(t) * abs(np.sin(2.0 * ray_angle))
    if decay > 0:
        cap = min(cap, np.sqrt(120.0 / decay) + 1.0)
    converged = False
    while s < cap:
        hi = min(s + seg_len, cap)
        seg = 0.0 + 0.0j
        # sub-panels sized to keep the oscillation phase per panel modest
        sub = max(1, int(np.ceil((hi - s) * (2 * abs(t) * hi + 2.0) / 2.5)))
        for j in range(sub):
            a = s + (hi - s) * j / sub
            b = s + (hi - s) * (j + 1) / sub
            seg += panel_integrate(integrand, a, b, 24)
        segs.append(seg)
        running = abs(sum(segs))
        if abs(seg) < TAIL_RATIO * max(running, 1e-300):
            quiet += 1
            if quiet >= 3:
                converged = True
                break
        else:
            quiet = 0
        mags = [abs(v) for v in segs]
        i_max = int(np.argmax(mags))
        i_min = i_max + int(np.argmin(mags[i_max:]))
        if (len(mags) - 1 - i_min >= 3
                and all(mags[j] < mags[j + 1] for j in range(i_min, len(mags) - 1))
                and mags[-1] > 10.0 * mags[i_min]):
            break  # divergent tail regime: truncate at the minimum
        s = hi
    mags = [abs(v) for v in segs]
    diag = {"segments": mags, "s_stop": s, "t": t}
    if converged:
        return sum(segs), diag
    i_max = int(np.argmax(mags))
    i_min = i_max + int(np.argmin(mags[i_max:]))
    total = sum(segs[:i_min + 1])
    tail_estimate = mags[i_min]
    if tail_estimate > tail_tol * max(abs(total), 1e-12):
        raise BackgroundDivergenceError(
            f"background contributions stop decaying at s = {s:.3g} with "
            f"unresolved tail {tail_estimate:.3e}", diagnostics=diag)
    return total, diag


def expansion_amplitude(pot: ShellPotential, states, phi_out, phi_in, t: float,
                        n_max: int, allow_unregulated: bool = False) -> ExpansionReport:
    """Pole sum plus background reconstruction of the direct amplitude.

    Requires t > 0, where the evolution phase regulates the contour closure;
    t = 0 is admitted only with ``allow_unregulated`` (understood as the
    t -> 0+ limit, computed on a shallower ray and good to a wider
    tolerance). ``n_max`` caps the number of resonance terms; the residual
    against the direct amplitude is reported.
    """
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    if t < 0:
        raise DomainError("expansion times must be nonnegative")
    if t == 0 and not allow_unregulated:
        raise DomainError("t = 0 expansion needs allow_unregulated=True")

    resonances = _resonance_states(states)
    n_used = min(n_max, len(resonances))
    terms = []
    for st in resonances[:n_used]:
        val = (np.exp(-1j * st.pole.z * t) * pair_ket(phi_out, st)
               * pair_bra(phi_in, st))
        terms.append((st.pole.n, complex(val)))

    ray_angle = -np.pi / 4 if t > 0 else -np.pi / 6
    c_min = min(phi_out.c_min, phi_in.c_min)
    s_cap = np.sqrt(2.0) * min(phi_out.q_max, phi_in.q_max)
    hard_cap = BACKGROUND_HARD_CAP_SCALE / np.sqrt(c_min)
    tail_tol = 1e-7 if t > 0 else 1e-3
    background, _ = _background_ray(pot, phi_out, phi_in, t, ray_angle, s_cap,
                                    hard_cap, tail_tol=tail_tol)

    # fold back any resonance the ray rotation skipped (arg k below the ray)
    for st in resonances:
        if np.angle(st.pole.k) < ray_angle:
            background -= (np.exp(-1j * st.pole.z * t) * pair_ket(phi_out, st)
                           * pair_bra(phi_in, st))

    pole_hints = [st.pole.k for st in resonances]
    direct = direct_amplitude(pot, phi_out, phi_in, t, pole_hints=pole_hints)
    total = sum(v for _, v in terms) + background
    residual = abs(direct - total) / max(abs(direct), 1e-300)
    return ExpansionReport(t=t, pole_terms=tuple(terms), background=complex(background),
                           direct=complex(direct), n_used=n_used, residual=float(residual))


def dominant_pole_split(pot: ShellPotential, states, phi, t: float):
    """Split the amplitude into the leading-resonance term and everything else.

    Returns (pole1_term, background1) with pole1_term + background1 equal to
    the direct amplitude by construction.
    """
    resonances = _resonance_states(states)
    if not resonances:
        raise NoPolesError("no resonance poles available")
    st = resonances[0]
    term = (np.exp(-1j * st.pole.z * t) * pair_ket(phi, st) * pair_bra(phi, st))
    direct = direct_amplitude(pot, phi, phi, t, pole_hints=[s.pole.k for s in resonances])
    return complex(term), complex(direct - term)


def _linear_fit(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), float(coef[1]), r2


def survival(pot: ShellPotential, states, phi, times,
             fit_dominant: bool = False) -> SurvivalCurve:
    """Survival probability |⟨phi|e^{-iHt}|phi⟩|^2 on a time grid.

    Amplitudes come from the spectral integral while its grid resolves the
    evolution phase; at later times the equivalent pole-sum-plus-background
    representation takes over (it gains accuracy as the contour regulator
    strengthens, exactly where fixed grids lose it).

    With ``fit_dominant`` the log-probability slope is fitted on the window
    where the leading resonance term dominates the remainder by at least a
    factor 100 (window found by subtracting the term from the direct
    amplitude); the fitted rate estimates the resonance width. Times beyond
    the window probe the never-vanishing background, so the fit quality
    there degrades and a deviation flag is reported.
    """
    times = [float(t) for t in times]
    if any(t < 0 for t in times):
        raise DomainError("survival times must be nonnegative")
    resonances = _resonance_states(states)
    t_max = max(times) if times else 1.0
    dens = _SpectralDensity(pot, phi, phi, t_max=t_max,
                            pole_hints=[s.pole.k for s in resonances],
                            t_ref=min(t_max, 60.0))
    pairings = [(s, pair_ket(phi, s) * pair_bra(phi, s)) for s in resonances]
    c_min = phi.c_min
    s_cap = np.sqrt(2.0) * phi.q_max
    hard_cap = BACKGROUND_HARD_CAP_SCALE / np.sqrt(c_min)

    def amplitude(t):
        if t <= dens.t_safe:
            return dens.amplitude(t)
        total, _ = _background_ray(pot, phi, phi, t, -np.pi / 4, s_cap, hard_cap)
        for s, pp in pairings:
            if np.angle(s.pole.k) >= -np.pi / 4:
                total += np.exp(-1j * s.pole.z * t) * pp
        return total

    amps = [amplitude(t) for t in times]
    probs = [abs(a) ** 2 for a in amps]
    if not fit_dominant:
        return SurvivalCurve(times=tuple(times), probability=tuple(probs))

    if not resonances:
        raise NoPolesError("no resonance poles available for the dominant fit")
    st = resonances[0]
    pk, pb = pair_ket(phi, st), pair_bra(phi, st)
    in_window = []
    for t, a in zip(times, amps):
        term = np.exp(-1j * st.pole.z * t) * pk * pb
        rest = a - term
        in_window.append(abs(rest) * 100.0 <= abs(term))
    window_ts = [t for t, ok in zip(times, in_window) if ok]
    if len(window_ts) < 3:
        raise WindowNotFoundError("no 100x dominance window on the requested grid")
    w_lo, w_hi = min(window_ts), max(window_ts)
    xs = [t for t, ok in zip(times, in_window) if ok]
    ys = [np.log(p) for t, p, ok in zip(times, probs, in_window) if ok]
    slope, _, r2_in = _linear_fit(xs, ys)
    gamma_fit = -slope

    out_ts = [t for t in times if t > w_hi]
    r2_out = None
    deviation = None
    if len(out_ts) >= 3:
        ys_out = [np.log(p) for t, p in zip(times, probs) if t > w_hi]
        slope_out, _, r2_out = _linear_fit(out_ts, ys_out)
        deviation = bool(r2_out < 0.99
                         or abs(-slope_out - st.pole.gamma) > 0.05 * st.pole.gamma)
    return SurvivalCurve(times=tuple(times), probability=tuple(probs),
                         gamma_fit=float(gamma_fit), window=(w_lo, w_hi),
                         r_squared_window=r2_in, r_squared_outside=r2_out,
                         deviation_detected=deviation)
