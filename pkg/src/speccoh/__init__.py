"""Independence testing for many stationary complex Gaussian time series.

The test statistic is the largest squared sample spectral coherence over all
series pairs and a coarse frequency grid; its null calibration is the closed
Gumbel form valid in the many-series, wide-window regime.  Eigenvalue-based
competitor statistics, an exact-stationary vector AR(1) simulator, brute-force
oracles and a reproducible Monte Carlo experiment harness round out the
package.
"""

from .errors import (
    CalibrationFailure,
    DegenerateSpectrum,
    InvalidInput,
    NumericalFailure,
    SpeccohError,
    Unsupported,
)
from .experiments import (
    Alternative,
    ExperimentConfig,
    ExperimentReport,
    SizeTriple,
    run_bartlett_gap,
    run_experiment,
    run_gumbel_fit,
    run_power,
    run_roc,
    run_type1,
)
from .io import read_panel, write_panel
from .lss import (
    CalibratedThreshold,
    LssConfig,
    MpLaw,
    calibrate_threshold_mc,
    compute_statistics,
    hermitian_eigenvalues,
    lss_statistic,
    mp_integral,
)
from .mssc import (
    MsscResult,
    TestReport,
    gumbel_cdf,
    gumbel_quantile,
    mssc_statistic,
    mssc_test,
    mssc_threshold,
)
from .oracles import (
    BartlettGapReport,
    TransferFunction,
    bartlett_approx,
    bartlett_gap_report,
    brute_force_smoothed_estimate,
    ks_statistic,
    naive_normalized_dft,
    sigma_sq,
)
from .simulate import (
    Ar1Spec,
    CovarianceSequence,
    RngStream,
    build_transition,
    calibrate_beta,
    dependence_measure,
    simulate_panel,
    simulate_panel_with_innovations,
    stationary_covariance,
)
from .spectral import (
    CoherenceMatrix,
    DftTable,
    FrequencyGrid,
    SpectralMatrix,
    TimeSeriesPanel,
    build_fourier_grid,
    build_test_grid,
    coherence_matrix,
    normalized_dft,
    smoothed_spectral_matrix,
)

__version__ = "0.1.0"
