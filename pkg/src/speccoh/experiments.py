"""Monte Carlo experiment runner.

Four experiment families: null rejection rates with the closed-form threshold
(type1), power under a correlated alternative with Monte-Carlo-calibrated
thresholds for every statistic (power), full ROC curves (roc), and the
goodness of fit of the rescaled maximum coherence to its Gumbel limit
(gumbel_fit), plus the whitening-gap diagnostic (bartlett_gap).

Reproducibility contract: every replication draws from its own counter-based
stream derived from (seed, purpose, ladder index, replication index), the
stream ids are issued exactly once per run, and aggregation is done in
replication order.  A report is therefore a pure function of (config, seed),
independent of the parallelism setting; the wall-clock timing field is the
one exception and is excluded from the canonical byte serialization.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidInput
from .lss import (
    STAT_MSSC,
    STATISTIC_KINDS,
    compute_statistics,
    empirical_quantile,
    h0_statistic_samples,
)
from .mssc import gumbel_cdf, mssc_statistic, mssc_threshold
from .oracles import bartlett_gap_report, ks_statistic
from .simulate import H0, H1_GLOBAL, H1_LOCAL, Ar1Spec, RngStream, calibrate_beta, simulate_panel

REPORT_VERSION = 1

TYPE1 = "type1"
POWER = "power"
ROC = "roc"
GUMBEL_FIT = "gumbel_fit"
BARTLETT_GAP = "bartlett_gap"
EXPERIMENTS = (TYPE1, POWER, ROC, GUMBEL_FIT, BARTLETT_GAP)

ALT_NONE = "none"

# Stream purposes; the registry guarantees calibration and evaluation draws
# can never share a stream id.
_PURPOSE_EVAL = 0
_PURPOSE_CALIBRATION = 1
_PURPOSE_ALTERNATIVE = 2


@dataclass(frozen=True)
class SizeTriple:
    """One (sample count, smoothing span, series count) configuration."""

    num_samples: int
    span: int
    num_series: int

    def __post_init__(self) -> None:
        label = f"(N={self.num_samples}, B={self.span}, M={self.num_series})"
        if self.span <= 0 or self.span % 2 != 0:
            raise InvalidInput(f"{label}: span must be a positive even integer")
        if self.span + 1 > self.num_samples:
            raise InvalidInput(f"{label}: span + 1 exceeds the sample count")
        if self.num_series < 2:
            raise InvalidInput(f"{label}: need at least two series")

    def row_fields(self) -> dict:
        return {"N": self.num_samples, "B": self.span, "M": self.num_series}


@dataclass(frozen=True)
class Alternative:
    """Which correlated model the power/ROC experiments simulate.

    The local alternative takes the coupling directly; the global one fixes
    the total-dependence ratio and calibrates the coupling per series count.
    """

    kind: str = ALT_NONE
    coupling: float | None = None
    dependence_target: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in (ALT_NONE, H1_LOCAL, H1_GLOBAL):
            raise InvalidInput(f"unknown alternative {self.kind!r}")
        if self.kind == H1_LOCAL and self.coupling is None:
            raise InvalidInput("local alternative needs a coupling value")
        if self.kind == H1_GLOBAL and self.dependence_target is None:
            raise InvalidInput("global alternative needs a dependence target")

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.coupling is not None:
            out["coupling"] = self.coupling
        if self.dependence_target is not None:
            out["dependence_target"] = self.dependence_target
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "Alternative":
        return cls(
            kind=raw.get("kind", ALT_NONE),
            coupling=raw.get("coupling"),
            dependence_target=raw.get("dependence_target"),
        )


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one experiment run."""

    experiment: str
    ladder: tuple[SizeTriple, ...]
    alpha: float = 0.05
    theta: float = 0.5
    alternative: Alternative = field(default_factory=Alternative)
    n_reps: int = 2000
    calibration_reps: int | None = None
    seed: int = 0
    parallelism: int = 1
    statistics: tuple[str, ...] = (STAT_MSSC,)
    lss_epsilon: float = 0.1

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise InvalidInput(f"unknown experiment {self.experiment!r}")
        if not self.ladder:
            raise InvalidInput("ladder must hold at least one size triple")
        object.__setattr__(self, "ladder", tuple(self.ladder))
        object.__setattr__(self, "statistics", tuple(self.statistics))
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInput(f"alpha must lie in (0, 1), got {self.alpha}")
        if not abs(self.theta) < 1.0:
            raise InvalidInput(f"|theta| must be < 1, got {self.theta}")
        if self.n_reps < 1:
            raise InvalidInput("n_reps must be positive")
        if self.calibration_reps is not None and self.calibration_reps < 100:
            raise InvalidInput("calibration needs at least 100 replications")
        if self.parallelism < 1:
            raise InvalidInput("parallelism must be at least 1")
        if not self.statistics:
            raise InvalidInput("need at least one statistic")
        for kind in self.statistics:
            if kind not in STATISTIC_KINDS:
                raise InvalidInput(f"unknown statistic kind {kind!r}")
        if self.seed < 0:
            raise InvalidInput("seed must be non-negative")

    @property
    def effective_calibration_reps(self) -> int:
        return self.calibration_reps if self.calibration_reps is not None else self.n_reps

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "ladder": [t.row_fields() for t in self.ladder],
            "alpha": self.alpha,
            "theta": self.theta,
            "alternative": self.alternative.to_dict(),
            "n_reps": self.n_reps,
            "calibration_reps": self.calibration_reps,
            "seed": self.seed,
            "parallelism": self.parallelism,
            "statistics": list(self.statistics),
            "lss_epsilon": self.lss_epsilon,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        try:
            ladder = tuple(
                SizeTriple(int(t["N"]), int(t["B"]), int(t["M"])) for t in raw["ladder"]
            )
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed ladder entry: {exc}") from exc
        return cls(
            experiment=raw.get("experiment", TYPE1),
            ladder=ladder,
            alpha=float(raw.get("alpha", 0.05)),
            theta=float(raw.get("theta", 0.5)),
            alternative=Alternative.from_dict(raw.get("alternative", {})),
            n_reps=int(raw.get("n_reps", 2000)),
            calibration_reps=(
                int(raw["calibration_reps"]) if raw.get("calibration_reps") is not None else None
            ),
            seed=int(raw.get("seed", 0)),
            parallelism=int(raw.get("parallelism", 1)),
            statistics=tuple(raw.get("statistics", [STAT_MSSC])),
            lss_epsilon=float(raw.get("lss_epsilon", 0.1)),
        )


def _jsonable(value):
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


@dataclass(frozen=True)
class ExperimentReport:
    """Results of one experiment run.

    ``canonical_bytes`` serializes everything except the timing block and is
    byte-identical across reruns with the same config and seed at any
    parallelism; timings are wall-clock and inherently non-reproducible, so
    they live outside the canonical payload.
    """

    version: int
    config: dict
    results: tuple[dict, ...]
    timing: dict | None = None

    def canonical_dict(self) -> dict:
        # Parallelism is an execution detail: it cannot change any result, so
        # it lives outside the canonical payload next to the timing block.
        config = {k: v for k, v in self.config.items() if k != "parallelism"}
        return _jsonable(
            {"version": self.version, "config": config, "results": list(self.results)}
        )

    def canonical_bytes(self) -> bytes:
        return json.dumps(self.canonical_dict(), sort_keys=True, separators=(",", ":")).encode()

    def to_json(self, indent: int | None = 2) -> str:
        payload = self.canonical_dict()
        payload["timing"] = _jsonable(self.timing)
        payload["parallelism"] = self.config.get("parallelism")
        return json.dumps(payload, sort_keys=True, indent=indent)


class StreamRegistry:
    """Issues replication streams and refuses to hand out any id twice."""

    def __init__(self, seed: int):
        self.seed = seed
        self._issued: set[tuple[int, ...]] = set()

    def stream(self, *ids: int) -> RngStream:
        if ids in self._issued:
            raise RuntimeError(f"stream id {ids} issued twice")
        self._issued.add(ids)
        return RngStream(self.seed, ids)

    def batch(self, purpose: int, ladder_index: int, count: int) -> list[RngStream]:
        return [self.stream(purpose, ladder_index, rep) for rep in range(count)]

    @property
    def issued_count(self) -> int:
        return len(self._issued)


def _run_indexed(count: int, parallelism: int, fn: Callable[[int], dict]) -> list:
    if parallelism <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(fn, range(count)))


def _null_model(config: ExperimentConfig, triple: SizeTriple) -> Ar1Spec:
    return Ar1Spec(triple.num_series, config.theta, 0.0, H0)


def _alternative_model(config: ExperimentConfig, triple: SizeTriple) -> tuple[Ar1Spec, float]:
    alt = config.alternative
    if alt.kind == H1_LOCAL:
        beta = float(alt.coupling)
    elif alt.kind == H1_GLOBAL:
        beta = calibrate_beta(
            triple.num_series, config.theta, H1_GLOBAL, float(alt.dependence_target)
        )
    else:
        raise InvalidInput("this experiment requires a correlated alternative")
    return Ar1Spec(triple.num_series, config.theta, beta, alt.kind), beta


def _statistic_samples(
    config: ExperimentConfig,
    model: Ar1Spec,
    triple: SizeTriple,
    streams: Sequence[RngStream],
) -> dict[str, np.ndarray]:
    def one(rep: int) -> dict[str, float]:
        panel = simulate_panel(model, triple.num_samples, streams[rep])
        return compute_statistics(
            panel, triple.span, config.statistics, lss_epsilon=config.lss_epsilon
        )

    rows = _run_indexed(len(streams), config.parallelism, one)
    return {kind: np.array([row[kind] for row in rows]) for kind in config.statistics}


def _calibrated_thresholds(
    config: ExperimentConfig,
    triple: SizeTriple,
    index: int,
    registry: StreamRegistry,
    kinds: Sequence[str],
) -> dict[str, float]:
    model = _null_model(config, triple)
    streams = registry.batch(_PURPOSE_CALIBRATION, index, config.effective_calibration_reps)
    samples = h0_statistic_samples(
        model,
        triple.num_samples,
        triple.span,
        kinds,
        streams,
        config.parallelism,
        config.lss_epsilon,
    )
    return {kind: empirical_quantile(samples[kind], 1.0 - config.alpha) for kind in kinds}


def run_type1(config: ExperimentConfig) -> ExperimentReport:
    """Null rejection rates: closed-form threshold for the maximum-coherence
    statistic, Monte Carlo thresholds for the eigenvalue statistics."""
    if config.experiment != TYPE1:
        raise InvalidInput(f"config describes {config.experiment!r}, not {TYPE1!r}")
    if config.alternative.kind != ALT_NONE:
        raise InvalidInput("type1 runs under the null; drop the alternative")
    started = time.perf_counter()
    registry = StreamRegistry(config.seed)
    rows: list[dict] = []
    for index, triple in enumerate(config.ladder):
        lss_kinds = [k for k in config.statistics if k != STAT_MSSC]
        kappas = (
            _calibrated_thresholds(config, triple, index, registry, lss_kinds)
            if lss_kinds
            else {}
        )
        if STAT_MSSC in config.statistics:
            kappas[STAT_MSSC] = mssc_threshold(
                triple.num_samples, triple.span, triple.num_series, config.alpha
            )
        model = _null_model(config, triple)
        streams = registry.batch(_PURPOSE_EVAL, index, config.n_reps)
        samples = _statistic_samples(config, model, triple, streams)
        for kind in config.statistics:
            rate = float(np.count_nonzero(samples[kind] > kappas[kind]) / config.n_reps)
            rows.append(
                {
                    **triple.row_fields(),
                    "statistic": kind,
                    "threshold": kappas[kind],
                    "rejection_rate": rate,
                    "n_reps": config.n_reps,
                }
            )
    return _finish(config, rows, started)


def run_power(config: ExperimentConfig) -> ExperimentReport:
    """Rejection rates under the alternative at an empirically fixed level.

    Every statistic, including the maximum coherence, gets its threshold from
    null Monte Carlo at the matched sizes so the comparison is on equal
    footing; calibration and evaluation draws use disjoint stream ids.
    """
    if config.experiment != POWER:
        raise InvalidInput(f"config describes {config.experiment!r}, not {POWER!r}")
    started = time.perf_counter()
    registry = StreamRegistry(config.seed)
    rows: list[dict] = []
    for index, triple in enumerate(config.ladder):
        kappas = _calibrated_thresholds(config, triple, index, registry, config.statistics)
        alt_model, beta = _alternative_model(config, triple)
        streams = registry.batch(_PURPOSE_ALTERNATIVE, index, config.n_reps)
        samples = _statistic_samples(config, alt_model, triple, streams)
        for kind in config.statistics:
            rate = float(np.count_nonzero(samples[kind] > kappas[kind]) / config.n_reps)
            rows.append(
                {
                    **triple.row_fields(),
                    "statistic": kind,
                    "threshold": kappas[kind],
                    "coupling": beta,
                    "rejection_rate": rate,
                    "n_reps": config.n_reps,
                }
            )
    return _finish(config, rows, started)


def _roc_points(null_values: np.ndarray, alt_values: np.ndarray) -> list[list[float]]:
    thresholds = np.unique(np.concatenate([null_values, alt_values]))[::-1]
    n0 = len(null_values)
    n1 = len(alt_values)
    points = [[0.0, 0.0]]
    for t in thresholds:
        fpr = float(np.count_nonzero(null_values >= t) / n0)
        tpr = float(np.count_nonzero(alt_values >= t) / n1)
        points.append([fpr, tpr])
    return points


def run_roc(config: ExperimentConfig) -> ExperimentReport:
    """Empirical ROC per statistic from paired null/alternative samples."""
    if config.experiment != ROC:
        raise InvalidInput(f"config describes {config.experiment!r}, not {ROC!r}")
    started = time.perf_counter()
    registry = StreamRegistry(config.seed)
    rows: list[dict] = []
    for index, triple in enumerate(config.ladder):
        null_model = _null_model(config, triple)
        alt_model, beta = _alternative_model(config, triple)
        null_streams = registry.batch(_PURPOSE_EVAL, index, config.n_reps)
        alt_streams = registry.batch(_PURPOSE_ALTERNATIVE, index, config.n_reps)
        null_samples = _statistic_samples(config, null_model, triple, null_streams)
        alt_samples = _statistic_samples(config, alt_model, triple, alt_streams)
        for kind in config.statistics:
            rows.append(
                {
                    **triple.row_fields(),
                    "statistic": kind,
                    "coupling": beta,
                    "points": _roc_points(null_samples[kind], alt_samples[kind]),
                    "n_reps": config.n_reps,
                }
            )
    return _finish(config, rows, started)


def run_gumbel_fit(config: ExperimentConfig) -> ExperimentReport:
    """Empirical CDF of the rescaled maximum coherence and its Gumbel distance."""
    if config.experiment != GUMBEL_FIT:
        raise InvalidInput(f"config describes {config.experiment!r}, not {GUMBEL_FIT!r}")
    if config.alternative.kind != ALT_NONE:
        raise InvalidInput("gumbel_fit runs under the null; drop the alternative")
    started = time.perf_counter()
    registry = StreamRegistry(config.seed)
    rows: list[dict] = []
    for index, triple in enumerate(config.ladder):
        model = _null_model(config, triple)
        streams = registry.batch(_PURPOSE_EVAL, index, config.n_reps)

        def one(rep: int) -> dict:
            panel = simulate_panel(model, triple.num_samples, streams[rep])
            return {"rescaled": mssc_statistic(panel, triple.span).rescaled}

        values = np.sort(
            np.array(
                [row["rescaled"] for row in _run_indexed(config.n_reps, config.parallelism, one)]
            )
        )
        n = len(values)
        ks = ks_statistic(values, gumbel_cdf) if n >= 2 else None
        rows.append(
            {
                **triple.row_fields(),
                "statistic": STAT_MSSC,
                "ks_distance": ks,
                "cdf": [[float(v), (i + 1) / n] for i, v in enumerate(values)],
                "n_reps": config.n_reps,
            }
        )
    return _finish(config, rows, started)


def run_bartlett_gap(config: ExperimentConfig) -> ExperimentReport:
    """Median whitening gaps per ladder point (diagnostic for the null theory)."""
    if config.experiment != BARTLETT_GAP:
        raise InvalidInput(f"config describes {config.experiment!r}, not {BARTLETT_GAP!r}")
    started = time.perf_counter()
    registry = StreamRegistry(config.seed)
    rows: list[dict] = []
    for index, triple in enumerate(config.ladder):
        model = _null_model(config, triple)
        streams = registry.batch(_PURPOSE_EVAL, index, config.n_reps)

        def one(rep: int) -> dict:
            report = bartlett_gap_report(model, triple.num_samples, triple.span, streams[rep])
            return {"num": report.numerator_gap, "den": report.denominator_gap}

        gaps = _run_indexed(config.n_reps, config.parallelism, one)
        numerator = [g["num"] for g in gaps]
        denominator = [g["den"] for g in gaps]
        rows.append(
            {
                **triple.row_fields(),
                "statistic": STAT_MSSC,
                "numerator_gap_median": float(np.median(numerator)),
                "denominator_gap_median": float(np.median(denominator)),
                "numerator_gaps": [float(v) for v in numerator],
                "denominator_gaps": [float(v) for v in denominator],
                "n_reps": config.n_reps,
            }
        )
    return _finish(config, rows, started)


def _finish(config: ExperimentConfig, rows: list[dict], started: float) -> ExperimentReport:
    return ExperimentReport(
        version=REPORT_VERSION,
        config=config.to_dict(),
        results=tuple(_jsonable(rows)),
        timing={"wall_seconds": time.perf_counter() - started},
    )


_RUNNERS = {
    TYPE1: run_type1,
    POWER: run_power,
    ROC: run_roc,
    GUMBEL_FIT: run_gumbel_fit,
    BARTLETT_GAP: run_bartlett_gap,
}


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Dispatch on ``config.experiment``."""
    return _RUNNERS[config.experiment](config)
