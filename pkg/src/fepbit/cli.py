"""Command-line entry point: fepbit <command> [options].

Every command writes its artifacts plus a manifest.json (config snapshot,
seed, artifact hashes, wall-clock, version) into one output directory.
``fepbit replay <manifest>`` reruns a command from its manifest and checks
the new artifacts are byte-identical.
"""
from __future__ import annotations

import argparse
import itertools
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, build_system, build_transport, deep_merge, load_config
from .io import sha256, trajectory_header, trajectory_rows, write_csv, write_json

log = logging.getLogger("fepbit")

OUTPUT_ROOT_ENV = "FEPBIT_OUTPUT_ROOT"
MANIFEST = "manifest.json"


@dataclass
class RunManifest:
    command: str
    params: dict
    config: dict
    seed: int
    artifacts: dict = field(default_factory=dict)      # relative path -> sha256
    wall_clock_s: float = 0.0
    version: str = __version__

    def to_dict(self) -> dict:
        return {"command": self.command, "version": self.version, "seed": self.seed,
                "params": self.params, "config": self.config, "artifacts": self.artifacts,
                "wall_clock_s": self.wall_clock_s}

    @classmethod
    def load(cls, path) -> "RunManifest":
        with open(path) as fh:
            d = json.load(fh)
        return cls(d["command"], d["params"], d["config"], d["seed"], d.get("artifacts", {}),
                   d.get("wall_clock_s", 0.0), d.get("version", ""))


def parse_list(text: str, conv=float) -> list:
    return [conv(x) for x in str(text).split(",") if x.strip()]


def parse_range(text: str) -> list:
    """'start:stop:step' (inclusive of stop) or a comma list."""
    if ":" not in text:
        return parse_list(text)
    lo, hi, st = (float(x) for x in text.split(":"))
    if not st > 0 or hi < lo:
        raise ValueError(f"bad range {text!r}")
    n = int(round((hi - lo) / st))
    return [float(x) for x in np.round(lo + st * np.arange(n + 1), 12)]


# commands: each takes (params, cfg, out) and returns the artifact paths

def cmd_simulate_fe(params: dict, cfg: dict, out: Path) -> list:
    from .phasefield import Waveform, polarization_histogram, run_trajectory

    combos = list(itertools.product(params["field"], params["landau"], params["g0"]))
    paths = []
    runs = []
    for idx, (e_field, landau, g0) in enumerate(combos):
        run_cfg = deep_merge(cfg, {"grid": {"landau": landau, "coupling_g0": g0}})
        system = build_system(run_cfg)
        r = run_cfg["run"]
        traj = run_trajectory(system, Waveform.constant(e_field, float(r["duration"])),
                              sampling_stride=int(r["sampling_stride"]), traj_index=idx)
        name = f"run_{idx:03d}"
        paths.append(write_csv(out / name / "trajectory.csv", trajectory_header(traj.n_domains),
                               trajectory_rows(traj)))
        hist = polarization_histogram(traj, "all", int(r["n_bins"]), float(r["burn_in"]))
        paths.append(write_json(out / name / "histogram.json",
                                {"field": e_field, "landau": landau, "coupling_g0": g0,
                                 "traj_index": idx, **hist.to_dict()}))
        runs.append({"dir": name, "field": e_field, "landau": landau, "coupling_g0": g0})
        log.info("%s: E=%g landau=%s g0=%g, %d samples", name, e_field, landau, g0, len(traj))
    paths.append(write_json(out / "runs.json", runs))
    return paths


def cmd_iv(params: dict, cfg: dict, out: Path) -> list:
    from .device import BiasProtocol, hysteresis_window, iv_noiseless, iv_stochastic

    system = build_system(cfg)
    transport = build_transport(cfg)
    sweep = params["sweep"]
    r = cfg["run"]
    if params["noise"] == "off":
        fwd = iv_noiseless(system, transport, sweep, "forward", dwell=params.get("dwell"))
        rev = iv_noiseless(system, transport, sweep, "reverse", dwell=params.get("dwell"))
        # one loop: forward branch then the reverse branch
        rows = fwd.rows() + rev.rows()
        p1 = write_csv(out / "iv_noiseless.csv", ["v_gate_V", "i_drain_A_per_um"], rows)
        try:
            window = hysteresis_window(fwd, rev)
        except ValueError:
            window = None
        p2 = write_json(out / "iv_summary.json",
                        {"mode": "settle" if params.get("dwell") is None else "dwell",
                         "dwell": params.get("dwell"), "hysteresis_window_V": window,
                         "converged": bool(fwd.converged.all() and rev.converged.all())})
        return [p1, p2]
    protocol = BiasProtocol(float(r["v_init"]), float(r["init_duration"]), tuple(sweep),
                            float(r["hold_duration"]))
    iv = iv_stochastic(system, transport, protocol, int(r["sampling_stride"]))
    p1 = write_csv(out / "iv_stochastic.csv", ["time_s", "v_gate_V", "i_drain_A_per_um"], iv.rows())
    p2 = write_json(out / "iv_summary.json",
                    {"levels": [{"v_gate_V": tr.v_gate, "decades": tr.decades(),
                                 "i_min": float(tr.current.min()), "i_max": float(tr.current.max())}
                                for tr in iv.traces]})
    return [p1, p2]


def cmd_pcurve(params: dict, cfg: dict, out: Path) -> list:
    from .pbit import ThresholdChain, extract_pcurve

    system = build_system(cfg)
    transport = build_transport(cfg)
    r = cfg["run"]
    v = parse_range(f"{params['vmin']}:{params['vmax']}:{params['step']}")
    chain = ThresholdChain.for_current_threshold(float(r["current_threshold"]))
    curve = extract_pcurve(system, transport, chain, v, hold_duration=params["hold"],
                           seed=params["seed"], noise=params["noise"] == "on",
                           v_init=float(r["v_init"]), init_duration=float(r["init_duration"]),
                           burn_in=float(r["burn_in"]), sampling_stride=int(r["sampling_stride"]))
    if curve.fit is not None:
        log.info("fit: v0=%.4g V, k=%.4g /V, R^2=%.5f", curve.fit.v0, curve.fit.k, curve.r2)
    else:
        log.warning("sigmoid fit failed: %s", curve.fit_error)
    return [write_json(out / "pcurve.json", curve.to_dict()),
            write_csv(out / "pcurve.csv", ["v_gate_V", "probability", "n_samples"], curve.csv_rows())]


def load_response(choice: str, volts_per_unit: float, use_fit: bool):
    from .ilnetwork import PBitResponse
    from .pbit import PCurve

    if choice == "ideal":
        return PBitResponse.ideal()
    if choice == "step":
        return PBitResponse.step()
    with open(choice) as fh:
        curve = PCurve.from_json(fh.read())
    return PBitResponse.from_pcurve(curve, volts_per_unit, use_fit=use_fit)


def cmd_factorize(params: dict, cfg: dict, out: Path) -> list:
    from .ilnetwork import factorize

    response = load_response(params["response"], params["volts_per_unit"], not params["table"])
    hist = factorize(params["f"], params["bits_x"], params["bits_y"], response,
                     n_sweeps=params["sweeps"], seed=params["seed"], i0=params["i0"],
                     burn_in=params["burn_in"])
    ranked = hist.ranked()
    log.info("f=%d: top %s, accuracy %.4f", params["f"], ranked[:4], hist.accuracy)
    d = hist.to_dict()
    d["f"] = params["f"]
    d["accuracy"] = hist.accuracy
    d["response"] = response.kind
    return [write_json(out / "solutions.json", d)]


def cmd_gate_verify(params: dict, cfg: dict, out: Path) -> list:
    from .ilnetwork import (TRUTH_TABLES, enumerate_ground_states, library_gate,
                            single_gate_circuit, verify_gate)

    gate = library_gate(params["gate"], params["margin"])
    table_fn, _ = TRUTH_TABLES[params["gate"]]
    report = verify_gate(gate, table_fn(), margin=params["margin"])
    circ = single_gate_circuit(gate)
    clamps = {}
    for c in params["clamp"]:
        label, val = c.split("=")
        if label not in gate.labels:
            raise ValueError(f"no terminal {label!r}; gate has {list(gate.labels)}")
        clamps[gate.labels.index(label)] = 1 if int(val) else -1
    states, emin = enumerate_ground_states(circ.with_clamps(clamps))
    n_vis = gate.n - gate.n_ancilla
    visible = sorted({tuple(int(x) for x in s[:n_vis]) for s in states})
    d = {"gate": gate.name, "ok": report.ok, "gap": report.gap,
         "labels": list(gate.labels), "n_ancilla": gate.n_ancilla,
         "j": gate.j.tolist(), "h": gate.h.tolist(),
         "clamps": params["clamp"],
         "clamped_ground_states": [[(x + 1) // 2 for x in s] for s in visible],
         "clamped_ground_energy": emin}
    print(f"{gate.name}: {'OK' if report.ok else 'FAILED'} (gap {report.gap:.4g})")
    for s in d["clamped_ground_states"]:
        print("  " + " ".join(f"{l}={b}" for l, b in zip(gate.labels, s)))
    params["_ok"] = report.ok
    return [write_json(out / "gate.json", d)]


COMMANDS = {
    "simulate-fe": cmd_simulate_fe,
    "iv": cmd_iv,
    "pcurve": cmd_pcurve,
    "factorize": cmd_factorize,
    "gate-verify": cmd_gate_verify,
}


def execute(command: str, params: dict, cfg: dict, out: Path) -> RunManifest:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    paths = COMMANDS[command](params, cfg, out)
    manifest = RunManifest(command, {k: v for k, v in params.items() if not k.startswith("_")},
                           cfg, int(params["seed"]))
    manifest.artifacts = {str(Path(p).relative_to(out)): sha256(p) for p in paths}
    manifest.wall_clock_s = time.perf_counter() - t0
    write_json(out / MANIFEST, manifest.to_dict())
    return manifest


def replay(manifest_path, out=None) -> tuple[bool, list]:
    """Rerun from a manifest; returns (identical, differing artifact names)."""
    m = RunManifest.load(manifest_path)
    out = Path(out) if out else Path(manifest_path).parent / "replay"
    new = execute(m.command, dict(m.params), m.config, out)
    diff = sorted(k for k in set(m.artifacts) | set(new.artifacts)
                  if m.artifacts.get(k) != new.artifacts.get(k))
    return not diff, diff


def output_dir(args, command: str) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUTPUT_ROOT_ENV, "runs")) / command


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fepbit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        sp.add_argument("-v", "--verbose", action="store_true")
        sp.add_argument("--out", help=f"output directory (default ${OUTPUT_ROOT_ENV}/<command>)")
        sp.add_argument("--seed", type=int, default=0)
        if config:
            sp.add_argument("--config", help="YAML config file")
            sp.add_argument("--preset", help="named preset (fe1, fe2, multidomain-N, ...)")
            sp.add_argument("--set", dest="overrides", action="append", default=[],
                            metavar="KEY=VALUE", help="override a config key, e.g. noise.dt=1e-11")

    sp = sub.add_parser("simulate-fe", help="stochastic polarization trajectories")
    common(sp)
    sp.add_argument("--field", default="0", help="applied field(s) in V/m, comma separated")
    sp.add_argument("--landau", default=None, help="landau set(s), e.g. fe1,fe2")
    sp.add_argument("--g0", default=None, help="coupling constant(s) in m^3/F")
    sp.add_argument("--duration", type=float, help="simulated time in s")

    sp = sub.add_parser("iv", help="drain current versus gate bias")
    common(sp)
    sp.add_argument("--noise", choices=("on", "off"), default="off")
    sp.add_argument("--sweep", default="-3:3:0.1", help="start:stop:step in V, or a comma list")
    sp.add_argument("--dwell", type=float, help="noise-free dwell per bias (s); default relaxes")
    sp.add_argument("--hold", type=float, help="hold duration per bias with noise on (s)")

    sp = sub.add_parser("pcurve", help="probability of the thresholded output versus gate bias")
    common(sp)
    sp.add_argument("--vmin", type=float, default=-30.0)
    sp.add_argument("--vmax", type=float, default=30.0)
    sp.add_argument("--step", type=float, default=5.0)
    sp.add_argument("--hold", type=float, default=2e-6)
    sp.add_argument("--noise", choices=("on", "off"), default="on")

    sp = sub.add_parser("factorize", help="invertible multiplier with the product clamped")
    common(sp, config=False)
    sp.add_argument("--f", type=int, required=True)
    sp.add_argument("--bits-x", type=int, default=2)
    sp.add_argument("--bits-y", type=int, default=2)
    sp.add_argument("--response", default="ideal", help="ideal, step, or a pcurve.json path")
    sp.add_argument("--volts-per-unit", type=float, default=1.0,
                    help="gate volts per unit of network input for a p-curve response")
    sp.add_argument("--table", action="store_true", help="interpolate p-curve points, not the fit")
    sp.add_argument("--sweeps", type=int, default=100_000)
    sp.add_argument("--burn-in", type=int, default=0)
    sp.add_argument("--i0", type=float, default=1.0)

    sp = sub.add_parser("gate-verify", help="synthesize a gate and check its ground states")
    common(sp, config=False)
    sp.add_argument("--gate", required=True, help="copy, and, iand, ha, fa, xor")
    sp.add_argument("--clamp", action="append", default=[], metavar="LABEL=0|1")
    sp.add_argument("--margin", type=float, default=1.0)

    sp = sub.add_parser("replay", help="rerun from a manifest and compare artifacts")
    sp.add_argument("manifest")
    sp.add_argument("--out")
    sp.add_argument("-v", "--verbose", action="store_true")
    return p


def params_from_args(args) -> tuple[dict, dict]:
    cfg = {}
    if hasattr(args, "overrides"):
        cfg = load_config(args.config, args.preset, args.overrides)
        cfg = deep_merge(cfg, {"noise": {"seed": args.seed}})
    c = args.command
    if c == "simulate-fe":
        if args.duration is not None:
            cfg = deep_merge(cfg, {"run": {"duration": args.duration}})
        params = {"field": parse_list(args.field),
                  "landau": parse_list(args.landau, str) if args.landau else [cfg["grid"]["landau"]],
                  "g0": parse_list(args.g0) if args.g0 else [float(cfg["grid"]["coupling_g0"])]}
        for name in params["landau"]:
            if name not in cfg["landau"]:
                raise ConfigError(f"--landau: no landau section '{name}'")
    elif c == "iv":
        if args.hold is not None:
            cfg = deep_merge(cfg, {"run": {"hold_duration": args.hold}})
        params = {"noise": args.noise, "sweep": parse_range(args.sweep), "dwell": args.dwell}
    elif c == "pcurve":
        params = {"vmin": args.vmin, "vmax": args.vmax, "step": args.step, "hold": args.hold,
                  "noise": args.noise}
    elif c == "factorize":
        params = {"f": args.f, "bits_x": args.bits_x, "bits_y": args.bits_y,
                  "response": args.response if args.response in ("ideal", "step")
                  else str(Path(args.response).resolve()),
                  "volts_per_unit": args.volts_per_unit,
                  "table": args.table, "sweeps": args.sweeps, "burn_in": args.burn_in,
                  "i0": args.i0}
    else:
        params = {"gate": args.gate, "clamp": list(args.clamp), "margin": args.margin}
    params["seed"] = args.seed
    return params, cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "replay":
            same, diff = replay(args.manifest, args.out)
            if same:
                print("replay: all artifacts identical")
                return 0
            print("replay: artifacts differ: " + ", ".join(diff))
            return 1
        params, cfg = params_from_args(args)
        out = output_dir(args, args.command)
        execute(args.command, params, cfg, out)
        print(f"wrote {out / MANIFEST}")
        if params.get("_ok") is False:
            return 1
        return 0
    except (ConfigError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
