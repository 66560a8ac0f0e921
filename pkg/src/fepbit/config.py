"""YAML experiment configuration, presets and conversion to model objects."""
from __future__ import annotations

import copy
from dataclasses import asdict, fields

import yaml

from .device.transport import TransportParams
from .phasefield.landau import FE1, FE2, LandauSet
from .phasefield.system import (DomainParams, FeSystemConfig, NoiseConfig, StackGeometry,
                                sample_domain_params)


class ConfigError(ValueError):
    pass


def _section(dc) -> dict:
    return {f.name: getattr(dc, f.name) for f in fields(dc)}


DEFAULTS = {
    "landau": {"fe1": asdict(FE1), "fe2": asdict(FE2)},
    "stack": _section(StackGeometry()),
    "noise": _section(NoiseConfig()),
    "grid": {
        "n_domains": 1,
        "landau": "fe1",            # which landau set the domains use
        "viscosity_mu": 10.0,
        "sigma_fraction": 0.0,
        "param_seed": 0,
        "coupling_g0": 0.0,
        "grid_spacing_dx": None,
        "p_clamp": None,
    },
    "transport": _section(TransportParams()),
    "run": {
        "field": 0.0,               # V/m, simulate-fe drive
        "duration": 2e-5,           # s
        "sampling_stride": 1,
        "n_bins": 50,
        "burn_in": 0.1,
        "v_init": -3.0,
        "init_duration": 1e-7,
        "hold_duration": 1e-5,
        "current_threshold": 1e-10,  # A/um
    },
}


def _multidomain(n):
    return {"grid": {"n_domains": n, "sigma_fraction": 0.2, "param_seed": 1, "coupling_g0": 1e-7}}


PRESETS = {
    "fe1": {"grid": {"landau": "fe1"}},
    "fe2": {"grid": {"landau": "fe2"}},
    "boltzmann": {"grid": {"landau": "fe1"}, "run": {"duration": 2.2e-5}},
    "multidomain-1": _multidomain(1),
    "multidomain-4": _multidomain(4),
    "multidomain-8": _multidomain(8),
    "multidomain-12": _multidomain(12),
}


def deep_merge(base: dict, over: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for k, v in (over or {}).items():
        where = f"{path}.{k}" if path else k
        if k not in out:
            if path == "landau":
                out[k] = copy.deepcopy(v)
                continue
            raise ConfigError(f"unknown config key '{where}'")
        if isinstance(out[k], dict):
            if not isinstance(v, dict):
                raise ConfigError(f"'{where}' must be a mapping")
            out[k] = deep_merge(out[k], v, where)
        else:
            out[k] = v
    return out


def parse_override(text: str) -> dict:
    """'a.b.c=value' into {'a': {'b': {'c': value}}}; the value is read as YAML."""
    if "=" not in text:
        raise ConfigError(f"override '{text}' is not key=value")
    key, raw = text.split("=", 1)
    value = yaml.safe_load(raw)
    out: dict = {}
    node = out
    parts = key.strip().split(".")
    for p in parts[:-1]:
        node = node.setdefault(p, {})
    node[parts[-1]] = value
    return out


def load_config(path: str | None = None, preset: str | None = None, overrides=()) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset '{preset}'; choose from {sorted(PRESETS)}")
        cfg = deep_merge(cfg, PRESETS[preset])
    if path:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        cfg = deep_merge(cfg, data)
    for o in overrides:
        cfg = deep_merge(cfg, parse_override(o) if isinstance(o, str) else o)
    validate(cfg)
    return cfg


def _num(cfg, section, key):
    v = cfg[section][key]
    try:
        return float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"'{section}.{key}' must be a number, got {v!r}") from None


def validate(cfg: dict):
    """Build every model object once so schema errors surface with their key path."""
    for name, lan in cfg["landau"].items():
        try:
            LandauSet(**{k: float(v) for k, v in lan.items()})
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"landau.{name}: {exc}") from None
    for section, cls in (("stack", StackGeometry), ("noise", NoiseConfig),
                         ("transport", TransportParams)):
        try:
            cls(**cfg[section])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{section}: {exc}") from None
    if cfg["grid"]["landau"] not in cfg["landau"]:
        raise ConfigError(f"grid.landau '{cfg['grid']['landau']}' is not a landau section")
    if int(cfg["grid"]["n_domains"]) < 1:
        raise ConfigError("grid.n_domains must be >= 1")
    for key in ("duration", "hold_duration", "init_duration"):
        if not _num(cfg, "run", key) > 0:
            raise ConfigError(f"run.{key} must be positive")


def landau_set(cfg: dict, name: str) -> LandauSet:
    return LandauSet(**{k: float(v) for k, v in cfg["landau"][name].items()})


def build_system(cfg: dict) -> FeSystemConfig:
    g = cfg["grid"]
    base = DomainParams(landau_set(cfg, g["landau"]), float(g["viscosity_mu"]))
    n = int(g["n_domains"])
    doms = sample_domain_params(base, float(g["sigma_fraction"]), n, int(g["param_seed"]))
    return FeSystemConfig(
        domains=tuple(doms),
        coupling_g0=float(g["coupling_g0"]),
        grid_spacing_dx=None if g["grid_spacing_dx"] is None else float(g["grid_spacing_dx"]),
        stack=StackGeometry(**cfg["stack"]),
        noise=NoiseConfig(**cfg["noise"]),
        p_clamp=None if g["p_clamp"] is None else float(g["p_clamp"]),
    )


def build_transport(cfg: dict) -> TransportParams:
    return TransportParams(**cfg["transport"])


def dump(cfg: dict) -> str:
    return yaml.safe_dump(cfg, sort_keys=True)
