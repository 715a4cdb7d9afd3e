"""Run configuration: one JSON file, flag overrides win, defaults explicit."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .core import ShellPotential
from .errors import ConfigError, DomainError
from .packets import PacketTerm, WavePacket, standard_packets
from .poles import SearchRegion, default_region

DEFAULT_TOLERANCES = {
    "zeldovich": 1e-6,
    "orthonormality": 1e-6,
    "triple_equality": 1e-6,
    "green_residue": 1e-8,
    "left_right": 1e-10,
    "breit_wigner": 1e-5,
    "expansion": 1e-3,
}

_POTENTIAL_KEYS = {"a", "b", "v0"}
_REGION_KEYS = {"re_min", "re_max", "im_min", "im_max", "grid_step"}
_TERM_KEYS = {"amplitude", "degree", "width", "center"}
_OUTPUT_KEYS = {"format", "path"}
_TOP_KEYS = {"potential", "region", "packets", "tolerances", "output"}


@dataclass
class RunConfig:
    potential: ShellPotential = field(default_factory=lambda: ShellPotential(1.0, 2.0, 10.0))
    region: SearchRegion | None = None
    packets: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output_format: str = "json"
    output_path: str | None = None
    format_explicit: bool = False

    def effective_region(self) -> SearchRegion:
        return self.region if self.region is not None else default_region(self.potential)

    def all_packets(self) -> dict:
        out = standard_packets()
        out.update(self.packets)
        return out

    def to_dict(self) -> dict:
        region = self.effective_region()
        packets = {}
        for name, packet in self.packets.items():
            packets[name] = [{"amplitude": [t.amplitude.real, t.amplitude.imag],
                              "degree": t.degree, "width": t.width, "center": t.center}
                             for t in packet.terms]
        return {
            "potential": {"a": self.potential.a, "b": self.potential.b,
                          "v0": self.potential.v0},
            "region": {"re_min": region.re_min, "re_max": region.re_max,
                       "im_min": region.im_min, "im_max": region.im_max,
                       "grid_step": region.grid_step},
            "packets": packets,
            "tolerances": dict(self.tolerances),
            "output": {"format": self.output_format, "path": self.output_path},
        }


def _reject_unknown(mapping: dict, allowed: set, where: str):
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def _parse_amplitude(value):
    if isinstance(value, (int, float)):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) for v in value)):
        return complex(value[0], value[1])
    raise ConfigError("packet amplitude must be a number or [re, im]")


def parse_packet(terms, where="packet"):
    if not isinstance(terms, list) or not terms:
        raise ConfigError(f"{where} must be a non-empty list of terms")
    parsed = []
    for term in terms:
        if not isinstance(term, dict):
            raise ConfigError(f"{where}: each term must be an object")
        _reject_unknown(term, _TERM_KEYS, where)
        try:
            parsed.append(PacketTerm(amplitude=_parse_amplitude(term.get("amplitude", 1.0)),
                                     degree=int(term.get("degree", 1)),
                                     width=float(term["width"]),
                                     center=float(term.get("center", 0.0))))
        except KeyError as exc:
            raise ConfigError(f"{where}: missing term key {exc}") from exc
        except DomainError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    return WavePacket(tuple(parsed)).normalized()


def load_config(path: str | None, overrides: dict) -> RunConfig:
    """Build the effective configuration from an optional file plus flags."""
    cfg = RunConfig()
    data = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    _reject_unknown(data, _TOP_KEYS, "config")

    pot_data = dict(data.get("potential", {}))
    _reject_unknown(pot_data, _POTENTIAL_KEYS, "potential")
    for key in ("a", "b", "v0"):
        if overrides.get(key) is not None:
            pot_data[key] = overrides[key]
    pot_args = {"a": 1.0, "b": 2.0, "v0": 10.0}
    pot_args.update({k: float(v) for k, v in pot_data.items()})
    try:
        cfg.potential = ShellPotential(**pot_args)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc

    if "region" in data:
        reg = data["region"]
        _reject_unknown(reg, _REGION_KEYS, "region")
        try:
            cfg.region = SearchRegion(**{k: float(v) for k, v in reg.items()})
        except (TypeError, DomainError) as exc:
            raise ConfigError(f"region: {exc}") from exc

    for name, terms in data.get("packets", {}).items():
        cfg.packets[name] = parse_packet(terms, where=f"packet {name!r}")

    tol = data.get("tolerances", {})
    _reject_unknown(tol, set(DEFAULT_TOLERANCES), "tolerances")
    cfg.tolerances.update({k: float(v) for k, v in tol.items()})
    for key, value in overrides.get("tolerances", {}).items():
        if key not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance {key!r}")
        cfg.tolerances[key] = float(value)

    out = data.get("output", {})
    _reject_unknown(out, _OUTPUT_KEYS, "output")
    cfg.output_format = out.get("format", "json")
    cfg.format_explicit = "format" in out
    cfg.output_path = out.get("path")
    if overrides.get("format") is not None:
        cfg.output_format = overrides["format"]
        cfg.format_explicit = True
    if overrides.get("out") is not None:
        cfg.output_path = overrides["out"]
    if cfg.output_format not in ("json", "csv"):
        raise ConfigError(f"unsupported output format {cfg.output_format!r}")
    return cfg
