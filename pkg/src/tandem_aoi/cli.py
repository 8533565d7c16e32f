"""Batch experiment runner.

A run is described by a YAML tree.  Top-level keys give defaults; an
optional ``experiments:`` list holds overrides that are deep-merged over
them, one output file per entry.  Command-line flags beat file values, which
beat the ``TANDEM_AOI_SEED`` environment variable, which beats built-in
defaults.

Exit status: 0 on success, 1 when a validate run has failing rows or an
optimisation region is infeasible, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .analysis import DomainError, evaluate
from .model import (
    CouplingModel,
    GammaCompute,
    GammaFamily,
    ParameterError,
    SystemParams,
    random_feasible_point,
    validate,
)
from .optimize import SearchSpec, minimize, pareto_front, strict_vs_best_threshold
from .simulate import SimConfig, cross_validate, run, trace

log = logging.getLogger("tandem_aoi")

MODES = ("evaluate", "simulate", "validate", "sweep", "optimize", "pareto")
PRESETS = ("fig2", "fig3", "fig4", "fig5", "validate")
SEED_ENV = "TANDEM_AOI_SEED"

SWEEP_COLUMNS = ["swept_value", "avg_aoi_strict", "avg_aoi_best", "avg_peak_aoi_strict",
                 "avg_peak_aoi_best", "best_tau", "best_meanP"]
VALIDATE_COLUMNS = ["param_set_id", "closed_form", "simulated", "half_width", "pass"]
PARETO_COLUMNS = ["omega1", "omega2", "avg_aoi", "avg_peak_aoi"]
OPTIMIZE_COLUMNS = ["best_tau", "best_meanP", "best_To", "objective_value", "avg_aoi",
                    "avg_peak_aoi", "power_slack", "n_evaluated", "n_infeasible_pruned"]

DEFAULTS: dict = {
    "name": "experiment",
    "mode": "evaluate",
    "seed": None,
    "system": {"lam": 1.0, "T_o": 1.0, "tau": 0.0, "p_c": 10.0, "C_avg": 1.0,
               "omega1": 1.0, "omega2": 0.0},
    "compute": {"family": "gamma", "mean_P": 0.1, "k": 0.1},
    "coupling": {"B0": 10.0, "alpha": 1.0},
    "analysis": {"exact": False},
    "simulation": {"horizon": 1e5, "horizon_kind": "deliveries", "warmup": 0.1, "replications": 10,
                   "model_variant": "original", "tolerance": None, "workers": 1},
    "search": {"n_tau": 21, "n_meanP": 41, "n_To": 41, "T_o_range": [0.0, 20.0],
               "refinement_rounds": 3, "fixed": ["T_o"], "mean_P": None,
               "mean_P_min": 1e-3, "mean_P_cap": 20.0},
    "sweep": {"parameter": None, "start": None, "stop": None, "count": None, "values": None},
    "validate": {"points": 20, "rel": 0.01, "n_sigma": 3.0},
    "pareto": {"weights": [[1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]},
    "output": {"path": None, "format": "csv"},
}

# sweepable parameter -> config block; tau and mean_P are decision variables
SWEEPABLE = {
    "lam": "system", "T_o": "system", "p_c": "system", "C_avg": "system",
    "omega1": "system", "omega2": "system", "k": "compute", "alpha": "coupling", "B0": "coupling",
}


class ConfigError(ValueError):
    """Configuration problem tied to a dotted field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


def deep_merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in over.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _check_keys(tree: dict, schema: dict, prefix: str = "") -> None:
    for key, value in tree.items():
        path = f"{prefix}{key}"
        if key not in schema:
            raise ConfigError(path, "unknown field")
        if isinstance(schema[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(path, "expected a mapping")
            _check_keys(value, schema[key], path + ".")


def _num(tree: dict, path: str, *, integer: bool = False, optional: bool = False):
    block, _, key = path.rpartition(".")
    node = tree
    for part in block.split(".") if block else []:
        node = node[part]
    v = node[key]
    if v is None and optional:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"expected a number, got {v!r}")
    if integer:
        if float(v) != int(v):
            raise ConfigError(path, f"expected an integer, got {v!r}")
        return int(v)
    return float(v)


@dataclass(frozen=True)
class ExperimentConfig:
    """One fully merged experiment description.

    ``tree`` mirrors the YAML layout of :data:`DEFAULTS`; accessors turn its
    blocks into library objects.
    """

    tree: dict = field(default_factory=lambda: copy.deepcopy(DEFAULTS))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "expected a mapping")
        data = dict(data)
        data.pop("experiments", None)
        _check_keys(data, DEFAULTS)
        cfg = cls(deep_merge(DEFAULTS, data))
        cfg.check()
        return cfg

    def to_dict(self) -> dict:
        return copy.deepcopy(self.tree)

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.tree, sort_keys=True)

    def with_(self, **overrides) -> "ExperimentConfig":
        return ExperimentConfig.from_dict(deep_merge(self.tree, overrides))

    @property
    def name(self) -> str:
        return str(self.tree["name"])

    @property
    def mode(self) -> str:
        return self.tree["mode"]

    @property
    def seed(self) -> int:
        return int(self.tree["seed"] or 0)

    # -- validation ---------------------------------------------------------

    def check(self) -> None:
        t = self.tree
        if t["mode"] not in MODES:
            raise ConfigError("mode", f"must be one of {', '.join(MODES)}")
        if t["seed"] is not None:
            seed = _num(t, "seed", integer=True)
            if not 0 <= seed < 2**64:
                raise ConfigError("seed", "must be an unsigned 64-bit integer")
        for key in DEFAULTS["system"]:
            _num(t, f"system.{key}")
        if t["compute"]["family"] != "gamma":
            raise ConfigError("compute.family", "only 'gamma' is available")
        _num(t, "compute.k")
        _num(t, "compute.mean_P", optional=True)
        for key in DEFAULTS["coupling"]:
            _num(t, f"coupling.{key}")
        if not isinstance(t["analysis"]["exact"], bool):
            raise ConfigError("analysis.exact", "expected true or false")
        if t["output"]["format"] != "csv":
            raise ConfigError("output.format", "only 'csv' is supported")
        self._check_library_objects()
        if t["mode"] == "sweep":
            self.sweep_values()
        if t["mode"] == "pareto":
            self.weights()
        if t["mode"] == "validate":
            n = _num(t, "validate.points", integer=True)
            if n < 1:
                raise ConfigError("validate.points", "need at least one parameter set")
            if _num(t, "validate.rel") < 0 or _num(t, "validate.n_sigma") < 0:
                raise ConfigError("validate", "tolerances must be non-negative")

    def _check_library_objects(self) -> None:
        # surface constructor errors under the block that caused them
        for block, build in (("system", self.params), ("coupling", self.coupling),
                             ("simulation", self.sim_config), ("search", self.search_spec)):
            try:
                build()
            except (ParameterError, TypeError) as exc:
                raise ConfigError(block, str(exc)) from None
        try:
            GammaFamily(self.tree["compute"]["k"])
        except ParameterError as exc:
            raise ConfigError("compute.k", str(exc)) from None
        if self.mode in ("evaluate", "simulate"):
            if self.tree["compute"]["mean_P"] is None:
                raise ConfigError("compute.mean_P", f"required in {self.mode} mode")
            problems = validate(self.params(), self.compute(), self.coupling())
            if problems:
                raise ConfigError("system", "; ".join(problems))

    # -- builders -----------------------------------------------------------

    def params(self, **changes) -> SystemParams:
        values = dict(self.tree["system"])
        values.update(changes)
        return SystemParams(**{k: float(v) for k, v in values.items()})

    def compute(self, mean_P: float | None = None) -> GammaCompute:
        c = self.tree["compute"]
        return GammaCompute(float(c["mean_P"] if mean_P is None else mean_P), float(c["k"]))

    def family(self) -> GammaFamily:
        return GammaFamily(float(self.tree["compute"]["k"]))

    def coupling(self) -> CouplingModel:
        c = self.tree["coupling"]
        return CouplingModel(float(c["B0"]), float(c["alpha"]))

    def sim_config(self) -> SimConfig:
        s = dict(self.tree["simulation"])
        s["replications"] = int(s["replications"])
        s["workers"] = int(s["workers"])
        return SimConfig(seed=self.seed, **s)

    def search_spec(self) -> SearchSpec:
        s = dict(self.tree["search"])
        fixed = s.pop("fixed") or []
        if isinstance(fixed, str):
            fixed = [fixed]
        lo, hi = (float(x) for x in s.pop("T_o_range"))
        for key in ("n_tau", "n_meanP", "n_To", "refinement_rounds"):
            s[key] = int(s[key])
        return SearchSpec(fixed=frozenset(fixed), T_o_range=(lo, hi), **s)

    def sweep_values(self) -> np.ndarray:
        s = self.tree["sweep"]
        name = s["parameter"]
        if name not in SWEEPABLE:
            raise ConfigError("sweep.parameter", f"must be one of {', '.join(SWEEPABLE)}, got {name!r}")
        if s["values"] is not None:
            if not isinstance(s["values"], list) or not s["values"]:
                raise ConfigError("sweep.values", "empty sweep range")
            try:
                return np.asarray([float(v) for v in s["values"]])
            except (TypeError, ValueError):
                raise ConfigError("sweep.values", "expected a list of numbers") from None
        for key in ("start", "stop", "count"):
            if s[key] is None:
                raise ConfigError(f"sweep.{key}", "required unless sweep.values is given")
        count = _num(self.tree, "sweep.count", integer=True)
        start, stop = _num(self.tree, "sweep.start"), _num(self.tree, "sweep.stop")
        if count < 1:
            raise ConfigError("sweep.count", "empty sweep range")
        if count > 1 and not stop > start:
            raise ConfigError("sweep.stop", "empty sweep range (stop must exceed start)")
        return np.linspace(start, stop, count)

    def weights(self) -> list[tuple[float, float]]:
        ws = self.tree["pareto"]["weights"]
        if not isinstance(ws, list) or not ws:
            raise ConfigError("pareto.weights", "need at least one weight pair")
        out = []
        for i, w in enumerate(ws):
            if not (isinstance(w, (list, tuple)) and len(w) == 2):
                raise ConfigError(f"pareto.weights[{i}]", "expected [omega1, omega2]")
            w1, w2 = (float(x) for x in w)
            if w1 < 0 or w2 < 0 or w1 + w2 <= 0:
                raise ConfigError(f"pareto.weights[{i}]", "degenerate objective")
            out.append((w1, w2))
        return out

    def with_swept(self, value: float) -> "ExperimentConfig":
        name = self.tree["sweep"]["parameter"]
        over = {SWEEPABLE[name]: {name: float(value)}}
        if name == "T_o":
            over["system"]["tau"] = min(float(self.tree["system"]["tau"]), float(value))
        return ExperimentConfig(deep_merge(self.tree, over))


# -- loading ----------------------------------------------------------------


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError("--preset", f"unknown preset {name!r}")
    return resources.files("tandem_aoi").joinpath("presets", f"{name}.yaml").read_text()


def load_tree(path: str | os.PathLike | None = None, text: str | None = None) -> dict:
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError("--config", str(exc)) from None
    try:
        tree = yaml.safe_load(text or "") or {}
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"not valid YAML ({exc})") from None
    if not isinstance(tree, dict):
        raise ConfigError("<root>", "expected a mapping")
    return tree


def expand(tree: dict, overrides: dict | None = None, env: dict | None = None) -> list[ExperimentConfig]:
    """Merge the ``experiments`` list over the base tree and apply overrides.

    ``overrides`` come from the command line and win over everything; the
    environment seed applies only where neither flag nor file sets one.
    """
    env = os.environ if env is None else env
    base = {k: v for k, v in tree.items() if k != "experiments"}
    entries = tree.get("experiments") or [{}]
    if not isinstance(entries, list):
        raise ConfigError("experiments", "expected a list")
    configs = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise ConfigError(f"experiments[{i}]", "expected a mapping")
        merged = deep_merge(base, entry)
        if merged.get("seed") is None and env.get(SEED_ENV):
            try:
                merged["seed"] = int(env[SEED_ENV])
            except ValueError:
                raise ConfigError(SEED_ENV, f"not an integer: {env[SEED_ENV]!r}") from None
        merged = deep_merge(merged, overrides or {})
        try:
            configs.append(ExperimentConfig.from_dict(merged))
        except ConfigError as exc:
            where = f"experiments[{i}]." if "experiments" in tree else ""
            raise ConfigError(where + exc.path, exc.message) from None
    names = [c.name for c in configs]
    if len(set(names)) != len(names):
        raise ConfigError("experiments", "experiment names must be unique")
    return configs


# -- execution --------------------------------------------------------------


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    columns: list[str]
    rows: list[list]
    summary: dict
    path: Path | None = None
    runtime: float = 0.0
    ok: bool = True


def _evaluate_rows(cfg: ExperimentConfig):
    rep = evaluate(cfg.params(), cfg.compute(), cfg.coupling(), exact=cfg.tree["analysis"]["exact"])
    d = rep.as_dict()
    cols = list(d)
    return cols, [[d[c] for c in cols]], {"avg_aoi": rep.avg_aoi, "avg_peak_aoi": rep.avg_peak_aoi}, True


def _simulate_rows(cfg: ExperimentConfig, trace_path: str | None):
    params, compute, coupling = cfg.params(), cfg.compute(), cfg.coupling()
    est = run(params, compute, coupling, cfg.sim_config())
    rep = evaluate(params, compute, coupling, exact=cfg.tree["analysis"]["exact"])
    d = est.summary()
    d["closed_form_avg_aoi"] = rep.avg_aoi
    d["closed_form_avg_peak_aoi"] = rep.avg_peak_aoi
    if trace_path:
        trace(params, compute, coupling, cfg.sim_config()).write_tsv(trace_path)
    cols = list(d)
    return cols, [[d[c] for c in cols]], d, True


def _validate_points(cfg: ExperimentConfig):
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(7,)))
    return [random_feasible_point(rng) for _ in range(int(cfg.tree["validate"]["points"]))]


def _validate_rows(cfg: ExperimentConfig):
    v = cfg.tree["validate"]
    points = _validate_points(cfg)
    res = cross_validate(points, cfg.sim_config(), rel=float(v["rel"]), n_sigma=float(v["n_sigma"]),
                         exact=cfg.tree["analysis"]["exact"])
    rows = [[f"{r['point']}/{r['metric']}", r["closed_form"], r["simulated"], r["half_width"],
             "true" if r["passed"] else "false"] for r in res]
    sets_ok = sum(all(r["passed"] for r in res if r["point"] == i) for i in range(len(points)))
    summary = {"sets_passed": sets_ok, "sets": len(points),
               "metrics_passed": sum(r["passed"] for r in res), "metrics": len(res)}
    return VALIDATE_COLUMNS, rows, summary, sets_ok == len(points)


def _sweep_rows(cfg: ExperimentConfig):
    values = cfg.sweep_values()
    spec = cfg.search_spec()
    if cfg.tree["sweep"]["parameter"] == "T_o":
        spec = spec.pinned("T_o")
    rows = []
    for value in values:
        c = cfg.with_swept(value)
        comp = strict_vs_best_threshold(c.params(), c.family(), c.coupling(), spec)
        s, b = comp.strict, comp.best
        rows.append([float(value), s.avg_aoi, b.avg_aoi, s.avg_peak_aoi, b.avg_peak_aoi,
                     b.best_tau, b.best_meanP])
    arr = np.asarray(rows, dtype=float)
    summary: dict = {"points": len(rows)}
    if np.isfinite(arr[:, 1]).any() and np.isfinite(arr[:, 2]).any():
        i, j = int(np.nanargmin(arr[:, 1])), int(np.nanargmin(arr[:, 2]))
        summary.update(
            strict_min=arr[i, 1], strict_argmin=arr[i, 0], best_min=arr[j, 2], best_argmin=arr[j, 0],
            improvement=(arr[i, 1] - arr[j, 2]) / arr[i, 1],
        )
    return SWEEP_COLUMNS, rows, summary, bool(np.isfinite(arr[:, 2]).any())


def _optimize_rows(cfg: ExperimentConfig):
    spec = cfg.search_spec()
    res = minimize(cfg.params(), cfg.family(), cfg.coupling(), spec)
    if not res.feasible:
        return OPTIMIZE_COLUMNS, [], {"feasible": False, "violated": res.violated}, False
    row = [getattr(res, c) for c in OPTIMIZE_COLUMNS]
    return OPTIMIZE_COLUMNS, [row], dict(zip(OPTIMIZE_COLUMNS, row), feasible=True), True


def _pareto_rows(cfg: ExperimentConfig):
    results = pareto_front(cfg.params(), cfg.family(), cfg.coupling(), cfg.search_spec(), cfg.weights())
    rows = [[r.omega1, r.omega2, r.avg_aoi, r.avg_peak_aoi] for r in results if r.feasible]
    front = results[0].pareto if results else ()
    summary = {"weights": len(results), "front_size": len(front)}
    if front:
        summary["min_avg_aoi"] = min(p[1] for p in front)
        summary["min_avg_peak_aoi"] = min(p[2] for p in front)
    return PARETO_COLUMNS, rows, summary, bool(rows)


def _format(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(result: ExperimentResult, path: Path) -> None:
    buf = io.StringIO()
    buf.write(f"# tandem-aoi {__version__}\n")
    buf.write(f"# experiment: {result.config.name}\n")
    buf.write(f"# mode: {result.config.mode}\n")
    buf.write(f"# seed: {result.config.seed}\n")
    buf.write("# config:\n")
    for line in result.config.to_yaml().splitlines():
        buf.write(f"#   {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(result.columns)
    for row in result.rows:
        w.writerow([_format(v) for v in row])
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue())


def output_path(cfg: ExperimentConfig, out: str | None, n_experiments: int) -> Path | None:
    target = out or cfg.tree["output"]["path"]
    if target is None:
        return None
    p = Path(target)
    if p.suffix == ".csv" and n_experiments == 1:
        return p
    return p / f"{cfg.name}.csv"


def run_experiment(cfg: ExperimentConfig, path: Path | None = None, trace_path: str | None = None) -> ExperimentResult:
    """Execute one experiment and write its CSV when ``path`` is given."""
    t0 = time.perf_counter()
    log.info("running %s (%s)", cfg.name, cfg.mode)
    try:
        if cfg.mode == "evaluate":
            cols, rows, summary, ok = _evaluate_rows(cfg)
        elif cfg.mode == "simulate":
            cols, rows, summary, ok = _simulate_rows(cfg, trace_path)
        elif cfg.mode == "validate":
            cols, rows, summary, ok = _validate_rows(cfg)
        elif cfg.mode == "sweep":
            cols, rows, summary, ok = _sweep_rows(cfg)
        elif cfg.mode == "optimize":
            cols, rows, summary, ok = _optimize_rows(cfg)
        else:
            cols, rows, summary, ok = _pareto_rows(cfg)
    except DomainError as exc:
        raise ConfigError("system.tau", str(exc)) from None
    result = ExperimentResult(cfg, cols, rows, summary, path, time.perf_counter() - t0, ok)
    if path is not None:
        write_csv(result, path)
    return result


def _fmt(x) -> str:
    return f"{x:.6g}" if isinstance(x, (float, np.floating)) else str(x)


def emit_report(results: list[ExperimentResult]) -> str:
    """Plain-text summary of finished experiments."""
    lines = []
    for r in results:
        s = r.summary
        head = f"[{r.config.name}] {r.config.mode}"
        if r.config.mode == "validate":
            lines.append(f"{head}: {s['sets_passed']}/{s['sets']} within tolerance "
                         f"({s['metrics_passed']}/{s['metrics']} metrics)")
        elif r.config.mode == "optimize":
            if s.get("feasible"):
                lines.append(f"{head}: best tau={_fmt(s['best_tau'])} E[P]={_fmt(s['best_meanP'])} "
                             f"T_o={_fmt(s['best_To'])} objective={_fmt(s['objective_value'])} "
                             f"power slack={_fmt(s['power_slack'])}")
            else:
                lines.append(f"{head}: infeasible ({s['violated']})")
        elif r.config.mode == "pareto":
            text = f"{head}: front size {s['front_size']} of {s['weights']} weights"
            if "min_avg_aoi" in s:
                text += f", min avg AoI {_fmt(s['min_avg_aoi'])}, min avg peak AoI {_fmt(s['min_avg_peak_aoi'])}"
            lines.append(text)
        elif r.config.mode == "sweep":
            text = f"{head}: {s['points']} points"
            if "improvement" in s:
                text += (f", strict min {_fmt(s['strict_min'])} at {_fmt(s['strict_argmin'])}, "
                         f"best min {_fmt(s['best_min'])} at {_fmt(s['best_argmin'])}, "
                         f"improvement {100 * s['improvement']:.2f}%")
            lines.append(text)
        else:
            lines.append(f"{head}: avg AoI {_fmt(s['avg_aoi'])}, avg peak AoI {_fmt(s['avg_peak_aoi'])}")
        if r.path is not None:
            lines.append(f"  wrote {r.path}")
        lines.append(f"  runtime {r.runtime:.2f}s")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tandem-aoi", description="AoI analysis, simulation and design search.")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", help="YAML experiment file")
    src.add_argument("--preset", choices=PRESETS, help="bundled experiment")
    p.add_argument("--mode", choices=MODES, help="override the mode of every experiment")
    p.add_argument("--seed", type=int, help=f"master seed (default: file, then ${SEED_ENV}, then 0)")
    p.add_argument("--out", help="output CSV (single experiment) or directory")
    p.add_argument("--tolerance", type=float, help="relative tolerance for validate mode")
    p.add_argument("--trace", metavar="PATH", help="simulate mode: write the event trace of replication 0 as TSV")
    p.add_argument("--dump-config", action="store_true", help="print the merged configuration and exit")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def _overrides(args: argparse.Namespace) -> dict:
    over: dict = {}
    if args.mode:
        over["mode"] = args.mode
    if args.seed is not None:
        over["seed"] = args.seed
    if args.tolerance is not None:
        over["validate"] = {"rel": args.tolerance}
    return over


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        if args.preset:
            tree = load_tree(text=preset_text(args.preset))
        elif args.config:
            tree = load_tree(args.config)
        else:
            tree = {}
        configs = expand(tree, _overrides(args))
        if args.dump_config:
            docs = [c.to_dict() for c in configs]
            print(yaml.safe_dump(docs[0] if len(docs) == 1 else {"experiments": docs}, sort_keys=True), end="")
            return 0
        results = []
        for cfg in configs:
            path = output_path(cfg, args.out, len(configs))
            results.append(run_experiment(cfg, path, args.trace))
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    print(emit_report(results))
    return 0 if all(r.ok for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
