"""Independent reference implementations used to validate the fast pipeline.

Everything here trades speed for transparency: direct evaluation of the
defining sums with no FFT, closed-form one-pole filter spectra, and the
whitening (Bartlett) approximation of the smoothed cross-spectrum that the
diagonal AR(1) model admits in closed form.  The test suite checks the fast
estimators against these, and the gap reports quantify how far the smoothed
estimates sit from their whitened counterparts as the sample grows.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidInput
from .simulate import H0, Ar1Spec, RngStream, burn_in_length, complex_normals, filter_innovations
from .spectral import (
    TimeSeriesPanel,
    build_test_grid,
    normalized_dft,
    smoothed_spectral_matrix,
    window_bins,
)


def naive_normalized_dft(panel: TimeSeriesPanel) -> np.ndarray:
    """Length-normalized DFT evaluated as the defining O(N^2) sum (no FFT)."""
    n = panel.num_samples
    grid = np.arange(n)
    kernel = np.exp(-2j * np.pi * np.outer(grid, grid) / n)
    return panel.data @ kernel / np.sqrt(n)


def _transform_at(row: np.ndarray, freq: float) -> complex:
    # Literal definitional sum at an arbitrary real frequency.
    n = len(row)
    acc = 0j
    for t in range(n):
        acc += complex(row[t]) * cmath.exp(-2j * cmath.pi * t * freq)
    return acc / math.sqrt(n)


def brute_force_smoothed_estimate(
    panel: TimeSeriesPanel, i: int, j: int, nu: float, span: int
) -> complex:
    """Smoothed cross-spectrum entry (i, j) at frequency nu, term by term.

    Loops over the window offsets and, inside, over the time samples.  No
    transforms, no window-bin bookkeeping: the transform is 1-periodic in
    frequency, so offsets falling outside [0, 1) need no special casing.
    """
    n = panel.num_samples
    half = span // 2
    acc = 0j
    for b in range(-half, half + 1):
        freq = nu + b / n
        acc += _transform_at(panel.data[i], freq) * _transform_at(panel.data[j], freq).conjugate()
    return acc / (span + 1)


@dataclass(frozen=True)
class TransferFunction:
    """One-pole causal filter 1 / (1 - a e^{-2 i pi nu}) on the unit circle.

    Its squared modulus is the spectral density of the AR(1) process with
    coefficient ``ar_coeff``, bounded between 1/(1+|a|)^2 and 1/(1-|a|)^2.
    """

    ar_coeff: float

    def __post_init__(self) -> None:
        if not abs(self.ar_coeff) < 1.0:
            raise InvalidInput("filter coefficient must satisfy |a| < 1")

    def value(self, nu):
        return 1.0 / (1.0 - self.ar_coeff * np.exp(-2j * np.pi * np.asarray(nu, dtype=np.float64)))

    def spectral_density(self, nu):
        v = self.value(nu)
        return (v * np.conj(v)).real


def sigma_sq(theta_i: float, theta_j: float, nu: float, num_samples: int, span: int) -> float:
    """Window average of the product of the two AR(1) spectral densities."""
    half = span // 2
    freqs = nu + np.arange(-half, half + 1) / num_samples
    s_i = TransferFunction(theta_i).spectral_density(freqs)
    s_j = TransferFunction(theta_j).spectral_density(freqs)
    return float(np.mean(s_i * s_j))


def _lattice_bin(nu: float, num_samples: int) -> int:
    k = nu * num_samples
    rounded = round(k)
    if abs(k - rounded) > 1e-9:
        raise InvalidInput(f"frequency {nu} is not on the Fourier lattice of size {num_samples}")
    return int(rounded) % num_samples


def bartlett_approx(
    innovations: TimeSeriesPanel,
    ar_coeffs: Sequence[float],
    i: int,
    j: int,
    nu: float,
    span: int,
) -> complex:
    """Whitened approximation of the smoothed cross-spectrum entry (i, j).

    Replaces each observed-series transform by the closed-form filter value
    times the transform of the driving noise, averaged over the same window.
    Only available when the innovations that generated the data are known,
    i.e. in simulation.
    """
    n = innovations.num_samples
    center = _lattice_bin(nu, n)
    bins = window_bins(n, center, span)
    freqs = bins / n
    dft = normalized_dft(innovations)
    h_i = TransferFunction(float(ar_coeffs[i])).value(freqs)
    h_j = TransferFunction(float(ar_coeffs[j])).value(freqs)
    terms = h_i * np.conj(h_j) * dft.values[i, bins] * np.conj(dft.values[j, bins])
    return complex(np.sum(terms) / (span + 1))


@dataclass(frozen=True)
class BartlettGapReport:
    """Worst-case distances between the smoothed estimates and their whitened
    counterparts over every pair and grid frequency.

    ``numerator_gap`` carries the sqrt(span+1) scaling under which the
    cross-spectrum replacement error is expected to vanish as the sample
    grows; ``denominator_gap`` is the unscaled gap between the product of
    diagonal estimates and the window-averaged density product.
    """

    numerator_gap: float
    denominator_gap: float
    sizes: tuple[int, int, int]  # (num_samples, span, num_series)


def bartlett_gap_report(
    spec: Ar1Spec, num_samples: int, span: int, stream: RngStream
) -> BartlettGapReport:
    """Simulate driving noise, build the panel by the AR recursion, measure gaps.

    Requires the independent diagonal variant: only there is the whitening
    filter known in closed form.  The recursion is warmed up from zero far
    enough back that the panel matches the two-sided stationary filter to
    machine precision; with a zero coefficient the panel equals the noise and
    both gaps vanish to rounding.
    """
    if spec.variant != H0:
        raise InvalidInput("gap report requires the independent diagonal variant")
    rng = stream.generator()
    warm = burn_in_length(spec.theta)
    eps_full = complex_normals(rng, (spec.num_series, warm + num_samples))
    zero_start = np.zeros(spec.num_series, dtype=np.complex128)
    path = filter_innovations(spec, eps_full, zero_start)
    panel = TimeSeriesPanel(path[:, warm:])
    observed_noise = eps_full[:, warm:]

    dft_y = normalized_dft(panel)
    dft_e = normalized_dft(TimeSeriesPanel(observed_noise))
    transfer = TransferFunction(spec.theta)
    grid = build_test_grid(num_samples, span)
    upper = np.triu_indices(spec.num_series, k=1)

    numerator_gap = 0.0
    denominator_gap = 0.0
    for k in grid.indices:
        center = int(k) * (span + 1)
        s_hat = smoothed_spectral_matrix(dft_y, center, span).values
        bins = window_bins(num_samples, center, span)
        weighted = transfer.value(bins / num_samples)[None, :] * dft_e.values[:, bins]
        s_tilde = weighted @ weighted.conj().T
        s_tilde /= span + 1
        numerator_gap = max(numerator_gap, float(np.abs((s_hat - s_tilde)[upper]).max()))
        diag = s_hat.diagonal().real
        window_avg = sigma_sq(spec.theta, spec.theta, center / num_samples, num_samples, span)
        denominator_gap = max(
            denominator_gap, float(np.abs(np.outer(diag, diag)[upper] - window_avg).max())
        )
    return BartlettGapReport(
        numerator_gap=math.sqrt(span + 1) * numerator_gap,
        denominator_gap=denominator_gap,
        sizes=(num_samples, span, spec.num_series),
    )


def ks_statistic(samples: Sequence[float], cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Sup-norm distance between the empirical CDF of ``samples`` and ``cdf``."""
    values = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(values)
    if n < 2:
        raise InvalidInput("need at least two samples")
    probs = np.asarray(cdf(values), dtype=np.float64)
    upper = np.max(np.arange(1, n + 1) / n - probs)
    lower = np.max(probs - np.arange(0, n) / n)
    return float(max(upper, lower))
