"""Lattice walks, their bridge couplings, and a verification harness.

Core objects: the uniform empirical process, the centered unit-rate
Poisson walk and its zero-conditioned version, the ball-throwing /
ball-removal correction that couples the two, Duchon's flip sampler for
uniform +-1 bridges, and Gaussian reference processes — plus statistical
checks that every claimed identity holds at desk scale.
"""

from .bernoulli import SignPath, duchon_flip, fast_flip, sample_simple_walk, sample_uniform_bridge
from .coupling import (
    CorrectionPath,
    CoupledTriple,
    correct_deficit,
    correct_surplus,
    decay_study,
    sample_coupled,
)
from .empirical import (
    EmpiricalSample,
    GridFunction,
    cell_counts,
    empirical_cdf,
    empirical_process,
    glivenko_cantelli_stat,
    grid_process_from_counts,
    interpolation_gap,
    max_cell_tail_bound,
    sample_empirical,
)
from .gaussian import sample_brownian_bridge, sample_brownian_motion
from .rng import (
    CountVector,
    RngStream,
    sample_binomial,
    sample_multinomial_uniform,
    sample_multivariate_hypergeometric,
    sample_poisson1,
    sample_uniform01,
)
from .stats import (
    DiscreteLaw,
    StatReport,
    chi_square_gof,
    enumerate_multinomial_law,
    ks_two_sample,
    modulus_of_continuity,
    tv_distance,
)
from .walks import (
    LatticePath,
    OracleExhaustedError,
    rejection_oracle_conditioned_walk,
    sample_conditioned_walk,
    sample_walk,
)

__version__ = "0.1.0"
