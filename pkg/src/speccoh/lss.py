"""Eigenvalue-based competitor tests and shared Monte Carlo calibration.

For each grid frequency the coherence matrix's eigenvalue average of a test
function is compared with its limit under independence, the corresponding
Marchenko-Pastur integral; the statistic is the normalized worst deviation
over the grid.  Two test functions are supported: the squared distance from 1
(Frobenius) and the logarithm (logdet).  Neither statistic has a usable
closed-form null law, so thresholds come from Monte Carlo sample quantiles
under the independent model; for a fair power comparison the same calibration
machinery also covers the maximum-coherence statistic.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateSpectrum, InvalidInput, Unsupported
from .mssc import _scan_maximum, mssc_statistic
from .simulate import H0, Ar1Spec, RngStream, simulate_panel
from .spectral import (
    CoherenceMatrix,
    FrequencyGrid,
    TimeSeriesPanel,
    build_test_grid,
    coherence_sweep,
    normalized_dft,
)

FROBENIUS = "frobenius"
LOGDET = "logdet"
TEST_FUNCTIONS = (FROBENIUS, LOGDET)

# Statistic identifiers shared with the experiment harness.
STAT_MSSC = "mssc"
STAT_LSS_FROBENIUS = "lss-frobenius"
STAT_LSS_LOGDET = "lss-logdet"
STATISTIC_KINDS = (STAT_MSSC, STAT_LSS_FROBENIUS, STAT_LSS_LOGDET)

_KIND_TO_FUNCTION = {STAT_LSS_FROBENIUS: FROBENIUS, STAT_LSS_LOGDET: LOGDET}


@dataclass(frozen=True)
class MpLaw:
    """Marchenko-Pastur law with ratio parameter in (0, 1].

    Supported on [(1-sqrt(c))^2, (1+sqrt(c))^2]; for ratios at most 1 there is
    no point mass and the density integrates to 1.
    """

    ratio: float

    def __post_init__(self) -> None:
        if not 0.0 < self.ratio <= 1.0:
            raise InvalidInput(f"ratio must lie in (0, 1], got {self.ratio}")

    @property
    def lambda_minus(self) -> float:
        return (1.0 - math.sqrt(self.ratio)) ** 2

    @property
    def lambda_plus(self) -> float:
        return (1.0 + math.sqrt(self.ratio)) ** 2

    def density(self, x):
        x = np.asarray(x, dtype=np.float64)
        inside = (x >= self.lambda_minus) & (x <= self.lambda_plus) & (x > 0)
        out = np.zeros_like(x)
        xs = x[inside]
        out[inside] = np.sqrt((self.lambda_plus - xs) * (xs - self.lambda_minus)) / (
            2.0 * np.pi * self.ratio * xs
        )
        return out


def mp_integral(f: str, ratio: float) -> float:
    """Closed-form integral of a test function against the Marchenko-Pastur law.

    Frobenius: integral of (x-1)^2 equals the ratio itself.  Logdet: integral
    of log x equals (c-1)/c log(1-c) - 1.  Ratios of 1 and above are refused:
    the logdet integrand blows up on the point mass at the origin.
    """
    if ratio <= 0.0:
        raise InvalidInput(f"ratio must be positive, got {ratio}")
    if ratio >= 1.0:
        raise Unsupported(f"ratio must stay below 1, got {ratio}")
    if f == FROBENIUS:
        return ratio
    if f == LOGDET:
        return (ratio - 1.0) / ratio * math.log1p(-ratio) - 1.0
    raise InvalidInput(f"unknown test function {f!r}")


def hermitian_eigenvalues(coherence: CoherenceMatrix) -> np.ndarray:
    """Ascending real eigenvalues after explicit Hermitian symmetrization."""
    values = coherence.values
    if not np.isfinite(values).all():
        raise InvalidInput("coherence matrix contains non-finite entries")
    return np.linalg.eigvalsh((values + values.conj().T) / 2.0)


def _eigen_average(eigenvalues: np.ndarray, f: str, nu: float) -> float:
    if f == FROBENIUS:
        return float(np.mean((eigenvalues - 1.0) ** 2))
    if f == LOGDET:
        # rank deficiency (window narrower than the panel) leaves structural
        # zeros that rounding scatters around 0, of either sign
        floor = len(eigenvalues) * np.finfo(np.float64).eps * max(1.0, float(eigenvalues[-1]))
        if eigenvalues[0] <= floor:
            raise DegenerateSpectrum(
                f"eigenvalue {eigenvalues[0]:.3e} at frequency {nu} is not positive; "
                "the logdet statistic needs a window at least as wide as the panel"
            )
        return float(np.mean(np.log(eigenvalues)))
    raise InvalidInput(f"unknown test function {f!r}")


@dataclass(frozen=True)
class LssConfig:
    """Choice of test function, normalization exponent and frequency grid."""

    f: str = FROBENIUS
    epsilon: float = 0.1
    grid: FrequencyGrid | None = None

    def __post_init__(self) -> None:
        if self.f not in TEST_FUNCTIONS:
            raise InvalidInput(f"unknown test function {self.f!r}")
        if not 0.0 < self.epsilon < 0.5:
            raise InvalidInput(f"epsilon must lie in (0, 0.5), got {self.epsilon}")


def _lss_supremum(
    eigen_seq: Sequence[tuple[float, np.ndarray]],
    f: str,
    num_series: int,
    num_samples: int,
    span: int,
    epsilon: float,
) -> float:
    target = mp_integral(f, num_series / (span + 1))
    worst = -1.0
    for nu, eigenvalues in eigen_seq:
        worst = max(worst, abs(_eigen_average(eigenvalues, f, nu) - target))
    return worst / (num_samples**epsilon * (span / num_samples))


def lss_statistic(panel: TimeSeriesPanel, span: int, config: LssConfig | None = None) -> float:
    """Normalized worst deviation of the eigenvalue average from its limit.

    The supremum runs over the coarse test grid unless the config carries an
    explicit grid (the full Fourier grid is allowed but costly).
    """
    config = config or LssConfig()
    grid = config.grid or build_test_grid(panel.num_samples, span)
    dft = normalized_dft(panel)
    eigen_seq = [
        (coh.nu, hermitian_eigenvalues(coh)) for _k, coh in coherence_sweep(dft, span, grid)
    ]
    return _lss_supremum(
        eigen_seq, config.f, panel.num_series, panel.num_samples, span, config.epsilon
    )


def compute_statistics(
    panel: TimeSeriesPanel,
    span: int,
    kinds: Sequence[str],
    lss_epsilon: float = 0.1,
    grid: FrequencyGrid | None = None,
) -> dict[str, float]:
    """Evaluate several statistics on one panel, sharing the spectral sweep.

    Values agree bit for bit with :func:`mssc_statistic` and
    :func:`lss_statistic` called separately; the coherence matrices and their
    eigenvalues are just computed once instead of once per statistic.
    """
    for kind in kinds:
        if kind not in STATISTIC_KINDS:
            raise InvalidInput(f"unknown statistic kind {kind!r}")
    grid = grid or build_test_grid(panel.num_samples, span)
    dft = normalized_dft(panel)
    coherences = list(coherence_sweep(dft, span, grid))
    out: dict[str, float] = {}
    if STAT_MSSC in kinds:
        value, _key, _nu = _scan_maximum(iter(coherences), panel.num_series)
        out[STAT_MSSC] = value
    lss_kinds = [k for k in kinds if k != STAT_MSSC]
    if lss_kinds:
        eigen_seq = [(coh.nu, hermitian_eigenvalues(coh)) for _k, coh in coherences]
        for kind in lss_kinds:
            out[kind] = _lss_supremum(
                eigen_seq,
                _KIND_TO_FUNCTION[kind],
                panel.num_series,
                panel.num_samples,
                span,
                lss_epsilon,
            )
    return out


def statistic_value(
    panel: TimeSeriesPanel,
    span: int,
    kind: str,
    lss_epsilon: float = 0.1,
    grid: FrequencyGrid | None = None,
) -> float:
    """Single-statistic convenience wrapper around the individual estimators."""
    if kind == STAT_MSSC:
        return mssc_statistic(panel, span, grid=grid).value
    if kind in _KIND_TO_FUNCTION:
        return lss_statistic(panel, span, LssConfig(_KIND_TO_FUNCTION[kind], lss_epsilon, grid))
    raise InvalidInput(f"unknown statistic kind {kind!r}")


def empirical_quantile(values: Sequence[float], level: float) -> float:
    """Sample quantile with linear interpolation between order statistics."""
    if not 0.0 < level < 1.0:
        raise InvalidInput(f"quantile level must lie in (0, 1), got {level}")
    return float(np.quantile(np.asarray(values, dtype=np.float64), level, method="linear"))


def h0_statistic_samples(
    model: Ar1Spec,
    num_samples: int,
    span: int,
    kinds: Sequence[str],
    streams: Sequence[RngStream],
    parallelism: int = 1,
    lss_epsilon: float = 0.1,
) -> dict[str, np.ndarray]:
    """Draw independent panels under the model and evaluate all statistics.

    Replication r uses ``streams[r]`` only, so results are independent of the
    scheduling order; samples are returned in replication order.
    """
    if model.variant != H0:
        raise InvalidInput("null calibration requires the independent variant")

    def one(rep: int) -> dict[str, float]:
        panel = simulate_panel(model, num_samples, streams[rep])
        return compute_statistics(panel, span, kinds, lss_epsilon=lss_epsilon)

    if parallelism <= 1:
        rows = [one(r) for r in range(len(streams))]
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            rows = list(pool.map(one, range(len(streams))))
    return {kind: np.array([row[kind] for row in rows]) for kind in kinds}


@dataclass(frozen=True)
class CalibratedThreshold:
    """A Monte Carlo critical value for one statistic under the null model."""

    kappa: float
    n_reps: int
    seed: int
    statistic_kind: str

    def __post_init__(self) -> None:
        if not math.isfinite(self.kappa):
            raise InvalidInput("calibrated threshold must be finite")
        if self.n_reps < 100:
            raise InvalidInput("threshold calibration needs at least 100 replications")


def calibrate_threshold_mc(
    model: Ar1Spec,
    num_samples: int,
    span: int,
    kind: str,
    alpha: float,
    n_reps: int,
    seed: int,
    parallelism: int = 1,
    lss_epsilon: float = 0.1,
) -> CalibratedThreshold:
    """Empirical (1-alpha)-quantile of a statistic under the independent model.

    Replication r draws from the stream (seed, (r,)); rerunning with the same
    seed reproduces the threshold exactly, regardless of ``parallelism``.
    """
    if kind not in STATISTIC_KINDS:
        raise InvalidInput(f"unknown statistic kind {kind!r}")
    if not 0.0 < alpha < 1.0:
        raise InvalidInput(f"alpha must lie in (0, 1), got {alpha}")
    if n_reps < 100:
        raise InvalidInput("threshold calibration needs at least 100 replications")
    streams = [RngStream(seed, (rep,)) for rep in range(n_reps)]
    samples = h0_statistic_samples(
        model, num_samples, span, [kind], streams, parallelism, lss_epsilon
    )[kind]
    kappa = empirical_quantile(samples, 1.0 - alpha)
    return CalibratedThreshold(kappa=kappa, n_reps=n_reps, seed=seed, statistic_kind=kind)
