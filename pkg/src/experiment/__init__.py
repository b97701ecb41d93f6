from .config import (
    ExperimentConfig,
    ObservableSpec,
    GradSpec,
    SampleSpec,
    TargetSpec,
    config_from_dict,
    load_config,
)
from .analysis import (
    DecayFit,
    fit_exponential,
    generator_traces,
    theorem1_site_factor,
    theorem1_bound,
    theorem2_bound,
    calibrate_theorem2,
    periodic_distance,
    chebyshev_bound,
    chebyshev_consistent,
)
from .montecarlo import (
    VarianceReport,
    build_problem,
    sample_gradients,
    mc_variance,
    sweep_system_size,
    sweep_distance,
    site_at_distance,
)
