"""
Experiment configs and job runners.

A config is a JSON object:

    {
      "job": "construct" | "train" | "bound" | "quantize" | "oscillation",
      "output_dir": "results/copy32",
      "seeds": [0, 1, 2],
      "format": "csv" | "json",
      "params": { ... job specific, see the *Job classes ... }
    }

Each seed runs in isolation and writes ``seed_<s>.<format>``; after all seeds
finish the runner writes ``summary.json`` / ``summary.csv`` with min, max and
mean of every numeric metric, and ``resolved_config.json``, which parses back
to the same job.
"""

from __future__ import annotations

import enum
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from . import io
from .bounds import (
    BoundQuery,
    lower_bound_copy,
    lower_bound_general,
    lower_bound_oscillatory,
    lower_bound_random,
    oscillation_separation,
)
from .config import logger
from .constructors import construct_complex_dft, construct_real_vandermonde
from .errors import ConfigError
from .params import Init
from .quantization import QuantizationSpec, q_from_bits, q_sweep
from .ssm import DiagonalSSM
from .targets import TargetKind, TargetSpec, copy_delay, generate
from .training import TrainConfig, growth_check, train

Row = Dict[str, Any]


class JobKind(str, enum.Enum):
    CONSTRUCT = "construct"
    TRAIN = "train"
    BOUND = "bound"
    QUANTIZE = "quantize"
    OSCILLATION = "oscillation"


class Format(str, enum.Enum):
    CSV = "csv"
    JSON = "json"


def _target(raw: Dict[str, Any]) -> TargetSpec:
    if "target" not in raw:
        raise ConfigError("params.target is required")
    return TargetSpec.from_dict(raw["target"])


def _check_keys(raw: Dict[str, Any], allowed: Iterable[str], job: str) -> None:
    unknown = set(raw) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown params for {job} job: {sorted(unknown)}")


def _seeded(target: TargetSpec, seed: int) -> TargetSpec:
    """Random targets follow the run seed; fixed targets ignore it."""
    return target.with_seed(seed)


def column_label(target: TargetSpec) -> str:
    if target.kind is TargetKind.DELAY:
        return "copy" if target.k == copy_delay(target.horizon) else f"delay{target.k}"
    if target.kind is TargetKind.RANDOM_UNIFORM:
        return "random"
    return target.kind.value


@dataclass(frozen=True)
class ConstructJob:
    """Real Vandermonde and complex DFT constructions for one target."""

    target: TargetSpec
    nodes: Optional[Tuple[float, ...]] = None

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "ConstructJob":
        _check_keys(raw, ("target", "nodes"), "construct")
        nodes = raw.get("nodes")
        return cls(_target(raw), None if nodes is None else tuple(float(x) for x in nodes))

    def to_dict(self) -> Dict[str, Any]:
        return {"target": self.target.to_dict(), "nodes": None if self.nodes is None else list(self.nodes)}

    def run_seed(self, seed: int, out_dir: str) -> List[Row]:
        target_spec = _seeded(self.target, seed)
        target = generate(target_spec)
        rows = []
        real = construct_real_vandermonde(target, self.nodes)
        rows.append({"label": "real_vandermonde", **real.to_dict()})
        cplx = construct_complex_dft(target)
        rows.append({"label": "complex_dft", **cplx.to_dict(), "target_norm2": target.l2()})
        return rows

    def meta(self) -> Dict[str, Any]:
        return {"horizon": self.target.horizon, "target": column_label(self.target)}


@dataclass(frozen=True)
class TrainJob:
    """
    One training configuration, optionally with a grid over learning rates and
    initializations; each seed keeps its best grid cell (lowest final error).
    """

    config: TrainConfig
    grid_learning_rates: Tuple[float, ...] = ()
    grid_inits: Tuple[Init, ...] = ()
    growth_c1: Optional[float] = None

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "TrainJob":
        # the run seed replaces any per-config seed
        allowed = {f.name for f in fields(TrainConfig)} - {"seed"}
        _check_keys(raw, allowed | {"grid", "growth_c1"}, "train")
        body = {k: v for k, v in raw.items() if k not in ("grid", "growth_c1")}
        config = TrainConfig.from_dict({**body, "seed": 0})
        grid = raw.get("grid") or {}
        unknown = set(grid) - {"learning_rate", "init"}
        if unknown:
            raise ConfigError(f"unknown grid axes: {sorted(unknown)}")
        c1 = raw.get("growth_c1")
        return cls(
            config,
            tuple(float(x) for x in grid.get("learning_rate", ())),
            tuple(Init(x) for x in grid.get("init", ())),
            None if c1 is None else float(c1),
        )

    def to_dict(self) -> Dict[str, Any]:
        out = self.config.to_dict()
        out.pop("seed")
        grid = {}
        if self.grid_learning_rates:
            grid["learning_rate"] = list(self.grid_learning_rates)
        if self.grid_inits:
            grid["init"] = [i.value for i in self.grid_inits]
        if grid:
            out["grid"] = grid
        if self.growth_c1 is not None:
            out["growth_c1"] = self.growth_c1
        return out

    def cells(self, seed: int) -> List[TrainConfig]:
        lrs = self.grid_learning_rates or (self.config.learning_rate,)
        inits = self.grid_inits or (self.config.init,)
        return [replace(self.config, learning_rate=lr, init=init, seed=seed) for lr in lrs for init in inits]

    def run_seed(self, seed: int, out_dir: str) -> List[Row]:
        rows: List[Row] = []
        cells = self.cells(seed)
        best: Optional[Row] = None
        for idx, cell in enumerate(cells):
            _, trace = train(cell)
            name = f"trace_seed_{seed}.csv" if len(cells) == 1 else f"trace_seed_{seed}_cell{idx}.csv"
            trace.to_csv(os.path.join(out_dir, name))
            final = trace.final
            row = {
                "label": f"{cell.optimizer.value}/lr={cell.learning_rate!r}/{cell.init.value}",
                "learning_rate": cell.learning_rate,
                "init": cell.init.value,
                "loss": final.loss,
                "norm_err_l1": final.norm_err_l1,
                "max_abs_b": final.max_abs_b,
                "max_abs_c": final.max_abs_c,
                "max_abs_a": final.max_abs_a,
            }
            if self.growth_c1 is not None:
                growth = growth_check(trace, self.growth_c1, cell.horizon)
                row["growth_within"] = int(growth.all_within)
                row["growth_hypotheses_met"] = int(growth.hypotheses_met)
            rows.append(row)
            if best is None or row["norm_err_l1"] < best["norm_err_l1"]:
                best = row
        rows.append({**best, "label": "final", "best_cell": best["label"]})
        return rows

    def meta(self) -> Dict[str, Any]:
        return {
            "mode": self.config.mode.value,
            "dim": self.config.dim,
            "horizon": self.config.horizon,
            "target": column_label(self.config.target),
            "optimizer": self.config.optimizer.value,
        }


@dataclass(frozen=True)
class BoundJob:
    """General lower-bound search plus whichever closed form applies."""

    target: TargetSpec
    epsilon: float
    p: float = 0.25

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "BoundJob":
        _check_keys(raw, ("target", "epsilon", "p"), "bound")
        if "epsilon" not in raw:
            raise ConfigError("params.epsilon is required")
        return cls(_target(raw), float(raw["epsilon"]), float(raw.get("p", 0.25)))

    def to_dict(self) -> Dict[str, Any]:
        return {"target": self.target.to_dict(), "epsilon": self.epsilon, "p": self.p}

    def run_seed(self, seed: int, out_dir: str) -> List[Row]:
        spec = _seeded(self.target, seed)
        target = generate(spec)
        t = target.length
        report = lower_bound_general(BoundQuery(target, self.epsilon))
        rows: List[Row] = [{"label": "general", **report.to_dict()}]
        if spec.kind is TargetKind.DELAY and spec.k == copy_delay(t) and t >= 9:
            rows.append({"label": "copy", "bound": lower_bound_copy(t, self.epsilon)})
        elif spec.kind is TargetKind.RANDOM_UNIFORM and t >= 8:
            rows.append({"label": "random", "bound": lower_bound_random(t, spec.alpha, self.p), "p": self.p})
        elif spec.kind is TargetKind.OSCILLATORY and self.epsilon <= 0.5:
            rows.append({"label": "oscillatory", "bound": lower_bound_oscillatory(t)})
        return rows

    def meta(self) -> Dict[str, Any]:
        return {"horizon": self.target.horizon, "target": column_label(self.target), "epsilon": self.epsilon}


@dataclass(frozen=True)
class QuantizeJob:
    """
    q-sweep on the real Vandermonde construction of the target. Without an
    explicit epsilon the tolerance is residual_l1 + margin * ||target||_1.
    """

    target: TargetSpec
    qs: Tuple[float, ...] = (0.1, 0.5, 1.0)
    epsilon: Optional[float] = None
    margin: float = 0.05
    samples: int = 100_000
    nodes: Optional[Tuple[float, ...]] = None
    workers: int = 1

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "QuantizeJob":
        allowed = ("target", "qs", "bits", "epsilon", "margin", "samples", "nodes", "workers")
        _check_keys(raw, allowed, "quantize")
        if "qs" in raw and "bits" in raw:
            raise ConfigError("give either params.qs or params.bits, not both")
        if "bits" in raw:
            qs = tuple(q_from_bits(int(b)) for b in raw["bits"])
        else:
            qs = tuple(float(q) for q in raw.get("qs", (0.1, 0.5, 1.0)))
        eps = raw.get("epsilon")
        nodes = raw.get("nodes")
        return cls(
            _target(raw),
            qs,
            None if eps is None else float(eps),
            float(raw.get("margin", 0.05)),
            int(raw.get("samples", 100_000)),
            None if nodes is None else tuple(float(x) for x in nodes),
            int(raw.get("workers", 1)),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "target": self.target.to_dict(),
            "qs": list(self.qs),
            "epsilon": self.epsilon,
            "margin": self.margin,
            "samples": self.samples,
            "nodes": None if self.nodes is None else list(self.nodes),
            "workers": self.workers,
        }

    def run_seed(self, seed: int, out_dir: str) -> List[Row]:
        target = generate(_seeded(self.target, seed))
        built = construct_real_vandermonde(target, self.nodes)
        eps = self.epsilon if self.epsilon is not None else built.residual_l1 + self.margin * target.l1()
        spec = QuantizationSpec(q=self.qs[0], epsilon=eps, target=target, samples=self.samples, seed=seed)
        reports = q_sweep(built.ssm, spec, self.qs, self.workers)
        return [
            {"label": f"q={r.q!r}", "cb_inf": built.cb_inf, **r.to_dict()}
            for r in reports
        ]

    def meta(self) -> Dict[str, Any]:
        return {"horizon": self.target.horizon, "target": column_label(self.target)}


@dataclass(frozen=True)
class OscillationJob:
    """Alternations of a complex n = 1 system vs sign changes of real systems."""

    t: int = 100
    magnitude: float = 0.999
    angle: float = math.pi / 2
    threshold: float = 0.25
    real_dim: int = 4
    corpus: int = 200

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "OscillationJob":
        _check_keys(raw, [f.name for f in fields(cls)], "oscillation")
        return cls(
            int(raw.get("t", 100)),
            float(raw.get("magnitude", 0.999)),
            float(raw.get("angle", math.pi / 2)),
            float(raw.get("threshold", 0.25)),
            int(raw.get("real_dim", 4)),
            int(raw.get("corpus", 200)),
        )

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)

    def run_seed(self, seed: int, out_dir: str) -> List[Row]:
        a = self.magnitude * np.exp(1j * self.angle)
        ssm = DiagonalSSM.complex([a], [1.0], [1.0])
        corpus = range(seed * self.corpus, (seed + 1) * self.corpus)
        result = oscillation_separation(ssm, self.t, self.threshold, self.real_dim, list(corpus))
        return [{"label": "separation", **result}]

    def meta(self) -> Dict[str, Any]:
        return {"horizon": self.t}


JOB_TYPES = {
    JobKind.CONSTRUCT: ConstructJob,
    JobKind.TRAIN: TrainJob,
    JobKind.BOUND: BoundJob,
    JobKind.QUANTIZE: QuantizeJob,
    JobKind.OSCILLATION: OscillationJob,
}

Job = Union[ConstructJob, TrainJob, BoundJob, QuantizeJob, OscillationJob]


@dataclass(frozen=True)
class ExperimentConfig:
    job: JobKind
    params: Job
    output_dir: str
    seeds: Tuple[int, ...]
    format: Format = Format.JSON

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(raw) - {"job", "params", "output_dir", "seeds", "format"}
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        try:
            kind = JobKind(raw["job"])
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"'job' must be one of {[k.value for k in JobKind]}, got {raw.get('job')!r}") from exc
        if "output_dir" not in raw or not isinstance(raw["output_dir"], str):
            raise ConfigError("'output_dir' must be a path string")
        seeds = raw.get("seeds")
        if not isinstance(seeds, list) or not seeds:
            raise ConfigError("'seeds' must be a non-empty list of integers")
        if not all(isinstance(s, int) and not isinstance(s, bool) for s in seeds):
            raise ConfigError(f"'seeds' must hold integers, got {seeds!r}")
        try:
            fmt = Format(raw.get("format", Format.JSON.value))
        except ValueError as exc:
            raise ConfigError(f"'format' must be csv or json, got {raw.get('format')!r}") from exc
        params = raw.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("'params' must be an object")
        try:
            job = JOB_TYPES[kind].from_dict(params)
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid params for {kind.value} job: {exc}") from exc
        return cls(kind, job, raw["output_dir"], tuple(seeds), fmt)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "job": self.job.value,
            "output_dir": self.output_dir,
            "seeds": list(self.seeds),
            "format": self.format.value,
            "params": self.params.to_dict(),
        }

    def convention(self) -> str:
        """'min' (best seed) for real training, 'max' (worst seed) otherwise."""
        if self.job is JobKind.TRAIN and self.params.config.mode.value == "real":
            return "min"
        return "max"


def load_config(path: str) -> ExperimentConfig:
    try:
        raw = io.read_json(path)
    except ValueError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(raw)


def _run_one(args: Tuple[ExperimentConfig, int]) -> Tuple[int, List[Row]]:
    config, seed = args
    logger.info("%s job seed %s started", config.job.value, seed)
    rows = config.params.run_seed(seed, config.output_dir)
    logger.info("%s job seed %s finished", config.job.value, seed)
    return seed, rows


def _numeric(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def aggregate(per_seed: List[Tuple[int, List[Row]]]) -> List[Row]:
    """min / max / mean of every numeric metric, grouped by row label."""
    values: Dict[Tuple[str, str], List[float]] = {}
    for _, rows in per_seed:
        for row in rows:
            for key, value in row.items():
                if key == "label" or not _numeric(value):
                    continue
                values.setdefault((row["label"], key), []).append(float(value))
    summary = []
    for (label, metric), vals in values.items():
        summary.append({
            "label": label,
            "metric": metric,
            "n": len(vals),
            "min": min(vals),
            "max": max(vals),
            "mean": statistics.fmean(vals),
        })
    return summary


def execute(config: ExperimentConfig, jobs: int = 1) -> Dict[str, Any]:
    """Run every seed, write per-seed files, the summary and the resolved config."""
    out = config.output_dir
    io.ensure_dir(out)
    io.write_json(os.path.join(out, "resolved_config.json"), config.to_dict())

    work = [(config, seed) for seed in config.seeds]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_seed = list(pool.map(_run_one, work))
    else:
        per_seed = [_run_one(item) for item in work]

    for seed, rows in per_seed:
        if config.format is Format.JSON:
            io.write_json(os.path.join(out, f"seed_{seed}.json"), {"seed": seed, "rows": rows})
        else:
            io.write_records(os.path.join(out, f"seed_{seed}.csv"), [{"seed": seed, **r} for r in rows])

    summary = {
        "job": config.job.value,
        "convention": config.convention(),
        "seeds": list(config.seeds),
        "meta": config.params.meta(),
        "metrics": aggregate(per_seed),
    }
    io.write_json(os.path.join(out, "summary.json"), summary)
    io.write_records(os.path.join(out, "summary.csv"), summary["metrics"])
    return summary


def apply_overrides(
    config: ExperimentConfig,
    seeds: Optional[List[int]] = None,
    output_dir: Optional[str] = None,
    fmt: Optional[str] = None,
) -> ExperimentConfig:
    raw = config.to_dict()
    if seeds is not None:
        raw["seeds"] = list(seeds)
    if output_dir is not None:
        raw["output_dir"] = output_dir
    if fmt is not None:
        raw["format"] = fmt
    return ExperimentConfig.from_dict(raw)
