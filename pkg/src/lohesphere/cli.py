"""Command-line front end: config parsing, orchestration, result emission.

Subcommands: simulate, linearize, sweep, fixtures. Configs are strict
JSON; unknown keys at any level are rejected so typos cannot silently
change an experiment. All randomness flows from one 64-bit seed through
a counter-based split per sweep point and trial, so runs are
reproducible at any worker count.

Exit codes: 0 ok, 2 config error, 3 divergence, 4 equilibrium not found.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import LoheSystem, random_configuration, random_frequencies, zero_frequencies
from .network import CouplingGraph, complete_graph, cycle_graph, from_edge_list, min_gain, path_graph
from .simulate import IntegrationDiverged, find_equilibrium, integrate
from .stability import theorem_rhs, twisted_state, verify_theorem


class ConfigError(ValueError):
    pass


_GRAPH_TYPES = ("path", "cycle", "complete", "edges")
_TOP_KEYS = {"graph", "n", "frequencies", "init", "integrate", "analysis", "seed", "out", "sweep"}


def _require_keys(section: dict, allowed: set, where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


def _as_positive_number(val, name: str) -> float:
    if not isinstance(val, (int, float)) or isinstance(val, bool) or not val > 0:
        raise ConfigError(f"{name} must be a number > 0, got {val!r}")
    return float(val)


def _as_int(val, name: str, minimum: int) -> int:
    if not isinstance(val, int) or isinstance(val, bool) or val < minimum:
        raise ConfigError(f"{name} must be an integer >= {minimum}, got {val!r}")
    return val


@dataclass
class ExperimentConfig:
    """Validated experiment description with all defaults resolved."""

    graph: dict
    n: int
    frequencies: dict
    init: dict
    integrate: dict
    analysis: dict
    seed: int
    out: str
    sweep: dict | None = None
    theorem_factor: int = 1
    workers: int = 1


def _validate_graph(section) -> dict:
    if not isinstance(section, dict):
        raise ConfigError("graph must be an object")
    if "type" not in section:
        raise ConfigError("graph needs a type")
    gtype = section["type"]
    if gtype not in _GRAPH_TYPES:
        raise ConfigError(f"graph type must be one of {_GRAPH_TYPES}, got {gtype!r}")
    if gtype == "edges":
        _require_keys(section, {"type", "N", "edges"}, "graph")
        out = {
            "type": gtype,
            "N": _as_int(section.get("N"), "graph.N", 1),
            "edges": section.get("edges"),
        }
        if not isinstance(out["edges"], list) or not out["edges"]:
            raise ConfigError("graph.edges must be a nonempty list of [i, j, k] triples")
        for e in out["edges"]:
            if not (isinstance(e, list) and len(e) == 3):
                raise ConfigError(f"bad edge entry {e!r}, expected [i, j, k]")
        return out
    _require_keys(section, {"type", "N", "k"}, "graph")
    return {
        "type": gtype,
        "N": _as_int(section.get("N"), "graph.N", 1),
        "k": _as_positive_number(section.get("k", 1.0), "graph.k"),
    }


def _validate_frequencies(section) -> dict:
    if not isinstance(section, dict):
        raise ConfigError("frequencies must be an object")
    mode = section.get("mode", "zero")
    if mode == "zero":
        _require_keys(section, {"mode"}, "frequencies")
        return {"mode": "zero"}
    if mode == "random":
        _require_keys(section, {"mode", "total_norm", "units"}, "frequencies")
        if "total_norm" not in section:
            raise ConfigError("random frequencies need total_norm")
        total = section["total_norm"]
        if not isinstance(total, (int, float)) or isinstance(total, bool) or total < 0:
            raise ConfigError(f"frequencies.total_norm must be a number >= 0, got {total!r}")
        units = section.get("units", "absolute")
        if units not in ("absolute", "theorem_rhs"):
            raise ConfigError(f"frequencies.units must be absolute or theorem_rhs, got {units!r}")
        return {"mode": "random", "total_norm": float(total), "units": units}
    if mode == "explicit":
        _require_keys(section, {"mode", "matrices"}, "frequencies")
        if "matrices" not in section:
            raise ConfigError("explicit frequencies need matrices")
        return {"mode": "explicit", "matrices": section["matrices"]}
    raise ConfigError(f"frequencies.mode must be zero, random, or explicit, got {mode!r}")


def _validate_init(section) -> dict:
    if not isinstance(section, dict):
        raise ConfigError("init must be an object")
    mode = section.get("mode", "random")
    if mode == "random":
        _require_keys(section, {"mode"}, "init")
        return {"mode": "random"}
    if mode == "twisted":
        _require_keys(section, {"mode", "q"}, "init")
        return {"mode": "twisted", "q": _as_int(section.get("q", 1), "init.q", 1)}
    if mode == "explicit":
        _require_keys(section, {"mode", "points"}, "init")
        if "points" not in section:
            raise ConfigError("explicit init needs points")
        return {"mode": "explicit", "points": section["points"]}
    raise ConfigError(f"init.mode must be random, twisted, or explicit, got {mode!r}")


def _validate_sweep(section) -> dict:
    if not isinstance(section, dict):
        raise ConfigError("sweep must be an object")
    _require_keys(section, {"var", "values", "trials", "units", "equilibrate"}, "sweep")
    var = section.get("var")
    if var not in ("omega_total", "K", "N", "n"):
        raise ConfigError(f"sweep.var must be omega_total, K, N, or n, got {var!r}")
    values = section.get("values")
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep.values must be a nonempty list")
    clean = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"sweep value {v!r} is not a number")
        if var in ("N", "n"):
            if int(v) != v:
                raise ConfigError(f"sweep over {var} needs integer values, got {v!r}")
            clean.append(int(v))
        else:
            if not v > 0:
                raise ConfigError(f"sweep value for {var} must be > 0, got {v!r}")
            clean.append(float(v))
    units = section.get("units", "absolute")
    if units not in ("absolute", "theorem_rhs"):
        raise ConfigError(f"sweep.units must be absolute or theorem_rhs, got {units!r}")
    if units == "theorem_rhs" and var != "omega_total":
        raise ConfigError("sweep.units theorem_rhs only applies to var omega_total")
    equilibrate = section.get("equilibrate", False)
    if not isinstance(equilibrate, bool):
        raise ConfigError("sweep.equilibrate must be a boolean")
    return {
        "var": var,
        "values": clean,
        "trials": _as_int(section.get("trials", 1), "sweep.trials", 1),
        "units": units,
        "equilibrate": equilibrate,
    }


def validate_config(raw: dict) -> ExperimentConfig:
    """Validate a parsed JSON config and fill in every default."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _require_keys(raw, _TOP_KEYS, "config")
    if "graph" not in raw:
        raise ConfigError("config missing graph")
    graph = _validate_graph(raw["graph"])
    n = _as_int(raw.get("n", 2), "n", 1)
    freqs = _validate_frequencies(raw.get("frequencies", {"mode": "zero"}))
    init = _validate_init(raw.get("init", {"mode": "random"}))

    integ = raw.get("integrate", {})
    if not isinstance(integ, dict):
        raise ConfigError("integrate must be an object")
    _require_keys(integ, {"dt", "t_end", "sample_every"}, "integrate")
    integ = {
        "dt": _as_positive_number(integ.get("dt", 1e-3), "integrate.dt"),
        "t_end": _as_positive_number(integ.get("t_end", 100.0), "integrate.t_end"),
        "sample_every": _as_int(integ.get("sample_every", 100), "integrate.sample_every", 1),
    }

    analysis = raw.get("analysis", {})
    if not isinstance(analysis, dict):
        raise ConfigError("analysis must be an object")
    _require_keys(analysis, {"linearize", "verify_theorem", "dispersed"}, "analysis")
    analysis = {
        "linearize": bool(analysis.get("linearize", False)),
        "verify_theorem": bool(analysis.get("verify_theorem", False)),
        "dispersed": bool(analysis.get("dispersed", False)),
    }
    for key in ("linearize", "verify_theorem", "dispersed"):
        got = raw.get("analysis", {}).get(key, False)
        if not isinstance(got, bool):
            raise ConfigError(f"analysis.{key} must be a boolean")

    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not (0 <= seed < 2**64):
        raise ConfigError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    out = raw.get("out", "run")
    if not isinstance(out, str) or not out:
        raise ConfigError("out must be a nonempty string")
    sweep = _validate_sweep(raw["sweep"]) if "sweep" in raw else None

    return ExperimentConfig(
        graph=graph, n=n, frequencies=freqs, init=init, integrate=integ,
        analysis=analysis, seed=seed, out=out, sweep=sweep,
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}")
    return validate_config(raw)


def build_graph(spec: dict) -> CouplingGraph:
    try:
        if spec["type"] == "path":
            return path_graph(spec["N"], spec["k"])
        if spec["type"] == "cycle":
            return cycle_graph(spec["N"], spec["k"])
        if spec["type"] == "complete":
            return complete_graph(spec["N"], spec["k"])
        return from_edge_list(spec["N"], spec["edges"])
    except ValueError as e:
        raise ConfigError(str(e))


def _resolve_total_norm(cfg: ExperimentConfig, graph: CouplingGraph) -> float:
    total = cfg.frequencies["total_norm"]
    if cfg.frequencies["units"] == "theorem_rhs":
        total = total * theorem_rhs(
            min_gain(graph), cfg.n, graph.n_nodes, factor=cfg.theorem_factor
        )
    return total


def build_frequencies(cfg: ExperimentConfig, graph: CouplingGraph, rng) -> np.ndarray:
    mode = cfg.frequencies["mode"]
    if mode == "zero":
        return zero_frequencies(graph.n_nodes, cfg.n)
    if mode == "random":
        try:
            total = _resolve_total_norm(cfg, graph)
        except ValueError as e:
            raise ConfigError(str(e))
        return random_frequencies(rng, graph.n_nodes, cfg.n, total)
    mats = np.asarray(cfg.frequencies["matrices"], dtype=float)
    if mats.shape != (graph.n_nodes, cfg.n + 1, cfg.n + 1):
        raise ConfigError(
            f"frequencies.matrices must have shape ({graph.n_nodes}, {cfg.n + 1}, "
            f"{cfg.n + 1}), got {mats.shape}"
        )
    return mats


def build_init(cfg: ExperimentConfig, graph: CouplingGraph, rng) -> np.ndarray:
    mode = cfg.init["mode"]
    if mode == "random":
        return random_configuration(rng, graph.n_nodes, cfg.n)
    if mode == "twisted":
        try:
            return twisted_state(graph.n_nodes, cfg.init["q"], cfg.n)
        except ValueError as e:
            raise ConfigError(str(e))
    pts = np.asarray(cfg.init["points"], dtype=float)
    if pts.shape != (graph.n_nodes, cfg.n + 1):
        raise ConfigError(
            f"init.points must have shape ({graph.n_nodes}, {cfg.n + 1}), got {pts.shape}"
        )
    norms = np.linalg.norm(pts, axis=1)
    if np.max(np.abs(norms - 1.0)) > 1e-9:
        raise ConfigError("init.points rows must be unit vectors (within 1e-9)")
    return pts / norms[:, None]


def _build_all(cfg: ExperimentConfig, rng):
    graph = build_graph(cfg.graph)
    omegas = build_frequencies(cfg, graph, rng)
    try:
        system = LoheSystem(graph=graph, omegas=omegas)
    except ValueError as e:
        raise ConfigError(str(e))
    x0 = build_init(cfg, graph, rng)
    return system, x0


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _fmt_bool(b: bool) -> str:
    return "true" if b else "false"


def cmd_simulate(cfg: ExperimentConfig) -> int:
    """Integrate one trajectory, write CSV + final JSON, print a summary."""
    rng = np.random.default_rng(cfg.seed)
    system, x0 = _build_all(cfg, rng)
    traj = integrate(
        system,
        x0,
        dt=cfg.integrate["dt"],
        t_end=cfg.integrate["t_end"],
        sample_every=cfg.integrate["sample_every"],
    )
    traj.write_csv(f"{cfg.out}_trajectory.csv")
    final = traj.final_json_dict()
    if any(cfg.analysis.values()):
        report = verify_theorem(system, traj.final_state, factor=cfg.theorem_factor)
        if cfg.analysis["linearize"]:
            final["linearization"] = report.linearization.to_json_dict()
        if cfg.analysis["verify_theorem"]:
            final["theorem"] = {
                "theorem_rhs": report.theorem_rhs,
                "omega_norm": report.linearization.omega_norm,
                "premise_holds": report.premise_holds,
                "conclusion_holds": report.conclusion_holds,
            }
        if cfg.analysis["dispersed"]:
            final["dispersed"] = report.dispersed.dispersed
            final["hull_min_norm"] = report.dispersed.hull_min_norm
    with open(f"{cfg.out}_final.json", "w") as fh:
        json.dump(final, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(
        f"final V={final['disagreement']:.6g} "
        f"sync_radius={final['sync_radius']:.6g} "
        f"practically_synced={_fmt_bool(final['practically_synced'])}"
    )
    return 0


def cmd_linearize(cfg: ExperimentConfig) -> int:
    """Refine an equilibrium, evaluate the certificate, write the report.

    Fixture-like starts (twisted or explicit init) are treated as
    candidate equilibria and refined locally by Newton polish alone;
    random starts get the full integrate-then-polish budget.
    """
    rng = np.random.default_rng(cfg.seed)
    system, x0 = _build_all(cfg, rng)
    local_start = cfg.init["mode"] in ("twisted", "explicit")
    eq = find_equilibrium(system, x0, tol=1e-10, max_time=0.0 if local_start else 200.0)
    report = verify_theorem(system, eq.config, factor=cfg.theorem_factor)
    payload = report.to_json_dict()
    payload["converged"] = eq.converged
    payload["residual"] = eq.residual
    payload["newton_iterations"] = eq.iterations
    with open(f"{cfg.out}_report.json", "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    lin = report.linearization
    print(f"beta={lin.beta:.10g} alpha_re={lin.alpha_re:.10g} omega_norm={lin.omega_norm:.10g}")
    print(
        f"theorem_rhs={report.theorem_rhs:.10g} "
        f"premise_holds={_fmt_bool(report.premise_holds)} "
        f"conclusion_holds={_fmt_bool(report.conclusion_holds)} "
        f"dispersed={_fmt_bool(report.dispersed.dispersed)} "
        f"converged={_fmt_bool(eq.converged)}"
    )
    return 0 if eq.converged else 4


def _trial_seed(master: int, value_index: int, trial: int) -> int:
    ss = np.random.SeedSequence(entropy=master, spawn_key=(value_index, trial))
    return int(ss.generate_state(1, np.uint64)[0])


def _sweep_point(payload: dict):
    """Evaluate one (value, trial) sweep cell. Runs in worker processes."""
    cfg = ExperimentConfig(**payload["config"])
    var, value = payload["var"], payload["value"]
    if var == "K":
        if cfg.graph["type"] == "edges":
            scale = value / min(e[2] for e in cfg.graph["edges"])
            edges = [[e[0], e[1], e[2] * scale] for e in cfg.graph["edges"]]
            cfg.graph = {**cfg.graph, "edges": edges}
        else:
            cfg.graph = {**cfg.graph, "k": float(value)}
    elif var == "N":
        if cfg.graph["type"] == "edges":
            raise ConfigError("sweep over N requires a generated graph type")
        cfg.graph = {**cfg.graph, "N": int(value)}
    elif var == "n":
        cfg.n = int(value)
    elif var == "omega_total":
        units = payload["units"]
        cfg.frequencies = {"mode": "random", "total_norm": float(value), "units": units}

    seed = _trial_seed(cfg.seed, payload["value_index"], payload["trial"])
    rng = np.random.default_rng(seed)
    system, x0 = _build_all(cfg, rng)
    x = x0
    if payload["equilibrate"]:
        x = find_equilibrium(system, x0).config
    report = verify_theorem(system, x, factor=cfg.theorem_factor)
    return (
        float(value),
        seed,
        report.linearization.beta,
        report.linearization.alpha_re,
        report.premise_holds,
        report.conclusion_holds,
        report.dispersed.dispersed,
    )


def cmd_sweep(cfg: ExperimentConfig, sweep: dict) -> int:
    """Evaluate the certificate across a parameter grid, one CSV row per trial."""
    if sweep is None:
        raise ConfigError("sweep command needs a sweep section in the config")
    if sweep["var"] == "omega_total" and cfg.frequencies["mode"] == "explicit":
        raise ConfigError("sweep over omega_total requires non-explicit frequencies")
    base = {
        "graph": cfg.graph, "n": cfg.n, "frequencies": cfg.frequencies,
        "init": cfg.init, "integrate": cfg.integrate, "analysis": cfg.analysis,
        "seed": cfg.seed, "out": cfg.out, "sweep": None,
        "theorem_factor": cfg.theorem_factor, "workers": 1,
    }
    payloads = [
        {
            "config": base,
            "var": sweep["var"],
            "value": value,
            "value_index": vi,
            "trial": trial,
            "units": sweep["units"],
            "equilibrate": sweep["equilibrate"],
        }
        for vi, value in enumerate(sweep["values"])
        for trial in range(sweep["trials"])
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_sweep_point, payloads))
    else:
        rows = [_sweep_point(p) for p in payloads]

    path = f"{cfg.out}_sweep.csv"
    with open(path, "w") as fh:
        fh.write("value,seed,beta,alpha_re,premise_holds,conclusion_holds,dispersed\n")
        for value, seed, beta, alpha, prem, concl, disp in rows:
            fh.write(
                f"{_fmt(value)},{seed},{_fmt(beta)},{_fmt(alpha)},"
                f"{_fmt_bool(prem)},{_fmt_bool(concl)},{_fmt_bool(disp)}\n"
            )
    n_prem = sum(1 for r in rows if r[4])
    n_concl = sum(1 for r in rows if r[5])
    print(f"wrote {len(rows)} rows to {path} "
          f"(premise_holds: {n_prem}, conclusion_holds: {n_concl})")
    return 0


def cmd_fixtures() -> int:
    """List the named configurations init.mode and fixture_by_name accept."""
    print("built-in fixtures (usable via init.mode or by name):")
    print("  twisted:N=<int>,q=<int>[,n=<int>]")
    print("      N agents at phases 2*pi*q*i/N on a great circle;")
    print("      equilibrium of the homogeneous field on the cycle graph,")
    print("      dispersed for every winding 1 <= q < N")
    print("  examples: twisted:N=6,q=1  twisted:N=12,q=2,n=3")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lohesphere",
        description="Simulate and analyze sphere-valued oscillator networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "integrate one trajectory and write CSV + JSON"),
        ("linearize", "refine an equilibrium and write the certificate report"),
        ("sweep", "evaluate the certificate across a parameter grid"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="path to JSON config")
        sp.add_argument("--seed", type=int, default=None, help="override config seed")
        sp.add_argument("--out", default=None, help="override output path prefix")
        sp.add_argument("--workers", type=int, default=1, help="sweep worker processes")
        sp.add_argument(
            "--theorem-factor", type=int, choices=(1, 2), default=1, dest="theorem_factor",
            help="1 for the stated bound, 2 for the sharper optimized constant",
        )
    sub.add_parser("fixtures", help="list built-in equilibrium fixtures")
    args = parser.parse_args(argv)

    if args.command == "fixtures":
        return cmd_fixtures()

    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if not (0 <= args.seed < 2**64):
                raise ConfigError(f"--seed must be in [0, 2^64), got {args.seed}")
            cfg.seed = args.seed
        if args.out is not None:
            cfg.out = args.out
        if args.workers < 1:
            raise ConfigError(f"--workers must be >= 1, got {args.workers}")
        cfg.workers = args.workers
        cfg.theorem_factor = args.theorem_factor

        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "linearize":
            return cmd_linearize(cfg)
        return cmd_sweep(cfg, cfg.sweep)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except IntegrationDiverged as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
