"""spdekit: spectral Galerkin SPDE simulation and verification on the 1-d torus.

Subpackages follow the pipeline: :mod:`spdekit.spectral` (fields, norms,
Fourier-multiplier operators), :mod:`spdekit.noise` (Q-Wiener increments and
diagonal covariance arithmetic), :mod:`spdekit.models` (the SPDE drift and
diffusion pairs and the coercivity/monotonicity/growth checkers),
:mod:`spdekit.integrators` (time-stepping schemes), :mod:`spdekit.burgers`
(the linear/remainder splitting for stochastic Burgers) and
:mod:`spdekit.verify` (the statistical verification harness behind the
``spdekit`` command line, :mod:`spdekit.cli`).
"""

from ._jit import NUMBA_ENABLED
from .spectral import (
    SobolevIndex,
    SpectralField,
    TorusGrid,
    dealias,
    derivative,
    field_from_modes,
    from_physical,
    h_inner,
    heat_semigroup,
    laplacian,
    lp_norm,
    sobolev_norm,
    to_physical,
    zero_field,
)
from .noise import (
    CovarianceSpec,
    NoiseIncrement,
    NoiseSampler,
    covariance_pairing,
    hs_norm_sq,
    sample_increment,
    trace,
)
from .models import (
    AdditiveHeat,
    Burgers,
    HypothesisReport,
    PorousMedium,
    ReactionDiffusion,
    TransportHeat,
    coercivity_check,
    diffusion_apply,
    diffusion_hs_norm_sq,
    drift,
    growth_check,
    monotonicity_check,
)
from .integrators import (
    BlowUpError,
    SamplePath,
    SchemeSpec,
    em_step,
    exact_ou_step,
    exp_euler_step,
    heun_strat_step,
    simulate,
)
from .burgers import (
    BurgersProblem,
    PicardError,
    SplitSolution,
    apriori_report,
    compose,
    sample_linear_part,
    solve_remainder,
    solve_split,
)
from .verify import McConfig, StatReport

__version__ = "0.1.0"
