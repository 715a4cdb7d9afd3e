"""Command-line interface.

Subcommands: poles, eigenfunction, check, expand, survival, print-config.
Output is machine-readable (JSON or CSV) and byte-reproducible: identical
configuration gives identical bytes. Exit codes: 0 success, 1 configuration
error, 2 partial pole results after a convergence failure, 3 failed identity
checks, 4 background divergence.

The library is sequential and deterministic; the environment variable
GAMOW_LAB_THREADS is honoured as an upper bound on worker parallelism
(never exceeded, since no workers are spawned).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from ._serialize import render_csv, render_json
from .config import DEFAULT_TOLERANCES, RunConfig, load_config
from .errors import (BackgroundDivergenceError, ConfigError, ConvergenceError,
                     GamowLabError, NoPolesError, WindowNotFoundError)
from .expansion import expansion_amplitude, survival
from .packets import ResonancePacket
from .poles import PoleKind, find_poles
from .spectral import breit_wigner_action, complex_delta_action, residue_action
from .states import (build_states, green_residue, pair_ket, regulated_overlap,
                     zeldovich_norm)


def _pole_row(pole):
    return {
        "n": pole.n,
        "k_re": pole.k.real,
        "k_im": pole.k.imag,
        "z_re": pole.z.real,
        "z_im": pole.z.imag,
        "gamma": pole.gamma,
        "kind": str(pole.kind),
        "jost_residual": pole.jost_residual,
    }


def _emit(text: str, cfg: RunConfig):
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _find_all(cfg: RunConfig):
    return find_poles(cfg.potential, cfg.effective_region())


def cmd_poles(cfg: RunConfig) -> int:
    exit_code = 0
    try:
        poles = _find_all(cfg)
        payload = {"poles": [_pole_row(p) for p in poles], "partial": False}
    except ConvergenceError as exc:
        poles = exc.partial or []
        payload = {"poles": [_pole_row(p) for p in poles], "partial": True,
                   "error": str(exc)}
        exit_code = 2
    _emit(render_json(payload), cfg)
    return exit_code


def cmd_eigenfunction(cfg: RunConfig, n: int, r_max: float, dr: float) -> int:
    poles = _find_all(cfg)
    match = [p for p in poles if p.n == n]
    if not match:
        raise ConfigError(f"no pole with index {n}")
    pole = match[0]
    state = build_states(cfg.potential, poles)[poles.index(pole)]
    rs = np.arange(0.0, r_max + 0.5 * dr, dr)
    u = state.eval(rs)
    # samples default to CSV; JSON carries the full state payload
    if cfg.format_explicit and cfg.output_format == "json":
        payload = {
            "pole": _pole_row(pole),
            "n_sq": {"re": state.n_sq.real, "im": state.n_sq.imag},
            "coefficients": {
                "q": {"re": state.coeffs.q.real, "im": state.coeffs.q.imag},
                "j1": {"re": state.coeffs.j1.real, "im": state.coeffs.j1.imag},
                "j2": {"re": state.coeffs.j2.real, "im": state.coeffs.j2.imag},
                "j3": {"re": state.coeffs.j3.real, "im": state.coeffs.j3.imag},
            },
            "samples": [{"r": float(r), "re": float(v.real), "im": float(v.imag)}
                        for r, v in zip(rs, u)],
        }
        _emit(render_json(payload), cfg)
        return 0
    pre = [f"# k = {pole.k.real!r},{pole.k.imag!r} "
           f"n_sq = {state.n_sq.real!r},{state.n_sq.imag!r}"]
    rows = [(float(r), float(v.real), float(v.imag), float(abs(v)))
            for r, v in zip(rs, u)]
    _emit(render_csv(("r", "re_u", "im_u", "abs_u"), rows, preamble=pre), cfg)
    return 0


def _check_identities(cfg: RunConfig):
    """Run the identity suite; yields (name, residual-or-None, tolerance, status)."""
    tol = cfg.tolerances
    pot = cfg.potential
    poles = _find_all(cfg)
    resonances = [p for p in poles if p.kind is PoleKind.RESONANCE]
    packets = cfg.all_packets()
    results = []

    if not resonances:
        for name in ("zeldovich", "orthonormality", "left_right", "green_residue",
                     "triple_equality", "breit_wigner"):
            results.append({"name": name, "residual": None,
                            "tolerance": tol.get(name), "status": "skipped: no poles"})
        return results

    states = build_states(pot, poles)
    res_states = sorted((s for s in states if s.pole.kind is PoleKind.RESONANCE),
                        key=lambda s: s.pole.n)
    anti = {s.pole.n: s for s in states if s.pole.kind is PoleKind.ANTI_RESONANCE}
    lead = res_states[: min(4, len(res_states))]

    worst = max(abs(zeldovich_norm(s) - 1.0) for s in lead)
    results.append({"name": "zeldovich", "residual": float(worst),
                    "tolerance": tol["zeldovich"],
                    "status": "pass" if worst <= tol["zeldovich"] else "fail"})

    worst = 0.0
    for i, sa in enumerate(lead):
        for sb in lead[i + 1:]:
            worst = max(worst, abs(regulated_overlap(sa, sb)))
    status = "pass" if worst <= tol["orthonormality"] else "fail"
    if len(lead) < 2:
        status, worst = "skipped: single pole", None
    results.append({"name": "orthonormality",
                    "residual": None if worst is None else float(worst),
                    "tolerance": tol["orthonormality"], "status": status})

    rs = np.linspace(0.0, 3.0 * pot.b, 200)
    worst = 0.0
    for s in lead:
        partner = anti.get(-s.pole.n)
        if partner is None:
            continue
        u = s.eval(rs)
        worst = max(worst, float(np.max(np.abs(np.conj(partner.eval(rs)) - u))
                                 / np.max(np.abs(u))))
    results.append({"name": "left_right", "residual": float(worst),
                    "tolerance": tol["left_right"],
                    "status": "pass" if worst <= tol["left_right"] else "fail"})

    rng = np.random.default_rng(20260809)
    worst = 0.0
    for s in res_states[:2]:
        for _ in range(5):
            r, t = rng.uniform(0.05, 3.0, size=2)
            val = green_residue(pot, float(r), float(t), s.pole,
                                others=[p for p in poles if p.n != s.pole.n])
            ref = s.eval(float(r)) * s.eval(float(t))
            worst = max(worst, abs(val - ref) / abs(ref))
    results.append({"name": "green_residue", "residual": float(worst),
                    "tolerance": tol["green_residue"],
                    "status": "pass" if worst <= tol["green_residue"] else "fail"})

    worst = 0.0
    for s in res_states[: min(3, len(res_states))]:
        others = [p for p in poles if p.n != s.pole.n]
        for packet in (packets["P1"], packets["P2"], packets["P3"]):
            pk = pair_ket(packet, s)
            cda = complex_delta_action(pot, packet, s)
            ra = residue_action(pot, packet, s, others=others)
            scale = abs(pk)
            worst = max(worst, abs(cda - pk) / scale, abs(ra - pk) / scale,
                        abs(cda - ra) / scale)
    results.append({"name": "triple_equality", "residual": float(worst),
                    "tolerance": tol["triple_equality"],
                    "status": "pass" if worst <= tol["triple_equality"] else "fail"})

    s1 = res_states[0]
    worst = 0.0
    for alpha in (0.1, 0.5, 1.0):
        bw = breit_wigner_action(pot, packets["P1"], s1, alpha)
        rhs = np.exp(-1j * alpha * s1.pole.z) * complex_delta_action(pot, packets["P1"], s1)
        worst = max(worst, abs(bw - rhs) / abs(rhs))
    results.append({"name": "breit_wigner", "residual": float(worst),
                    "tolerance": tol["breit_wigner"],
                    "status": "pass" if worst <= tol["breit_wigner"] else "fail"})
    return results


def cmd_check(cfg: RunConfig) -> int:
    results = _check_identities(cfg)
    ok = all(r["status"] != "fail" for r in results)
    payload = {"identities": results, "all_pass": ok}
    _emit(render_json(payload), cfg)
    return 0 if ok else 3


def cmd_expand(cfg: RunConfig, packet_out: str, packet_in: str, t: float,
               n_max: int, allow_unregulated: bool) -> int:
    packets = cfg.all_packets()
    for name in (packet_out, packet_in):
        if name not in packets:
            raise ConfigError(f"unknown packet {name!r}")
    poles = _find_all(cfg)
    states = build_states(cfg.potential, poles)
    report = expansion_amplitude(cfg.potential, states, packets[packet_out],
                                 packets[packet_in], t, n_max,
                                 allow_unregulated=allow_unregulated)
    payload = {
        "t": report.t,
        "n_used": report.n_used,
        "pole_terms": [{"n": n, "re": v.real, "im": v.imag, "abs": abs(v)}
                       for n, v in report.pole_terms],
        "background": {"re": report.background.real, "im": report.background.imag},
        "direct": {"re": report.direct.real, "im": report.direct.imag},
        "residual": report.residual,
    }
    _emit(render_json(payload), cfg)
    return 0


def cmd_survival(cfg: RunConfig, packet_name: str, t_max: float, nt: int,
                 fit_dominant: bool) -> int:
    poles = _find_all(cfg)
    states = build_states(cfg.potential, poles)
    if packet_name == "P_res":
        resonances = [s for s in states if s.pole.kind is PoleKind.RESONANCE]
        if not resonances:
            raise NoPolesError("P_res needs at least one resonance")
        packet = ResonancePacket(min(resonances, key=lambda s: s.pole.n))
    else:
        packets = cfg.all_packets()
        if packet_name not in packets:
            raise ConfigError(f"unknown packet {packet_name!r}")
        packet = packets[packet_name]
    times = list(np.linspace(0.0, t_max, nt))
    try:
        curve = survival(cfg.potential, states, packet, times, fit_dominant=fit_dominant)
    except WindowNotFoundError:
        curve = survival(cfg.potential, states, packet, times, fit_dominant=False)
    anchor = None
    if curve.gamma_fit is not None and curve.window is not None:
        i0 = next(i for i, tt in enumerate(curve.times) if tt >= curve.window[0])
        anchor = (curve.times[i0], curve.probability[i0])
    rows = []
    for t, p in zip(curve.times, curve.probability):
        fitted = None
        if anchor is not None:
            fitted = anchor[1] * float(np.exp(-curve.gamma_fit * (t - anchor[0])))
        rows.append((float(t), float(p), fitted))
    pre = []
    if curve.gamma_fit is not None:
        pre.append(f"# gamma_fit = {curve.gamma_fit!r} window = "
                   f"{curve.window[0]!r},{curve.window[1]!r}")
    _emit(render_csv(("t", "probability", "fitted"), rows, preamble=pre), cfg)
    return 0


def cmd_print_config(cfg: RunConfig) -> int:
    _emit(render_json(cfg.to_dict()), cfg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gamowlab",
        description="Resonance poles, eigenfunctions, identity checks, and "
                    "resonance expansions of the spherical shell potential.")
    parser.add_argument("--version", action="version", version=f"gamowlab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", type=float, default=None, help="inner radius")
    common.add_argument("--b", type=float, default=None, help="outer radius")
    common.add_argument("--v0", type=float, default=None, help="shell height")
    common.add_argument("--config", default=None, help="JSON config file")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    for name in DEFAULT_TOLERANCES:
        common.add_argument(f"--tol-{name.replace('_', '-')}", type=float,
                            default=None, dest=f"tol_{name}")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("poles", parents=[common], help="pole table")
    eig = sub.add_parser("eigenfunction", parents=[common], help="eigenfunction samples")
    eig.add_argument("--n", type=int, required=True, help="pole index")
    eig.add_argument("--r-max", type=float, default=6.0)
    eig.add_argument("--dr", type=float, default=0.05)
    sub.add_parser("check", parents=[common], help="identity report")
    exp = sub.add_parser("expand", parents=[common], help="resonance expansion report")
    exp.add_argument("--packet-out", default="P1")
    exp.add_argument("--packet-in", default="P1")
    exp.add_argument("--t", type=float, default=0.5)
    exp.add_argument("--n-max", type=int, default=6)
    exp.add_argument("--allow-unregulated", action="store_true")
    srv = sub.add_parser("survival", parents=[common], help="survival-probability curve")
    srv.add_argument("--packet", default="P_res")
    srv.add_argument("--t-max", type=float, default=60.0)
    srv.add_argument("--nt", type=int, default=61)
    srv.add_argument("--fit-dominant", action="store_true")
    sub.add_parser("print-config", parents=[common], help="dump effective configuration")
    return parser


def main(argv=None) -> int:
    _ = os.environ.get("GAMOW_LAB_THREADS")  # upper bound on parallelism; library is serial
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {
        "a": args.a, "b": args.b, "v0": args.v0,
        "format": args.format, "out": args.out,
        "tolerances": {name: getattr(args, f"tol_{name}")
                       for name in DEFAULT_TOLERANCES
                       if getattr(args, f"tol_{name}") is not None},
    }
    try:
        cfg = load_config(args.config, overrides)
        if args.command == "poles":
            return cmd_poles(cfg)
        if args.command == "eigenfunction":
            return cmd_eigenfunction(cfg, args.n, args.r_max, args.dr)
        if args.command == "check":
            return cmd_check(cfg)
        if args.command == "expand":
            return cmd_expand(cfg, args.packet_out, args.packet_in, args.t,
                              args.n_max, args.allow_unregulated)
        if args.command == "survival":
            return cmd_survival(cfg, args.packet, args.t_max, args.nt,
                                args.fit_dominant)
        if args.command == "print-config":
            return cmd_print_config(cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BackgroundDivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for key, value in (exc.diagnostics or {}).items():
            if key != "segments":
                print(f"  {key}: {value}", file=sys.stderr)
        return 4
    except GamowLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
