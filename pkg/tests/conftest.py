import numpy as np
import pytest

from speccoh.spectral import TimeSeriesPanel


def complex_panel(rng: np.random.Generator, num_series: int, num_samples: int) -> TimeSeriesPanel:
    data = rng.standard_normal((num_series, num_samples)) + 1j * rng.standard_normal(
        (num_series, num_samples)
    )
    return TimeSeriesPanel(data / np.sqrt(2))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260808)
