"""PT-symmetric kicked rotor: non-unitary Floquet dynamics and OTOC echoes."""
from .analysis import PowerLawFit, double_factorial, fit_power_law_tail, norm_growth_scan, predict
from .observables import DistributionSnapshot, expectation, snapshot
from .otoc import (
    OtocPoint,
    OtocRequest,
    OtocSeries,
    apply_p_power,
    apply_theta,
    compute_C1,
    compute_C2,
    compute_C3,
    compute_otoc_series,
    otoc_point,
    prepare,
)
from .propagator import NormPolicy, PhaseFactors, TrajectoryRecord, build_phase_factors, evolve, step_backward, step_forward
from .state import (
    Grid,
    Rep,
    SimParams,
    WaveState,
    gaussian_initial,
    inner,
    log_norm_squared,
    make_grid,
    norm_squared,
    set_norm,
    to_momentum,
    to_position,
)

__version__ = "0.1.0"
