"""Ground states and nonclassical-state diagnostics of the quantum Rabi model."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigurationError,
    ConvergenceWarning,
    DomainError,
    NumericalError,
    ResourceError,
    TruncationWarning,
    WidenGridError,
)
from .exact_diag import EDResult, solve_exact  # noqa: E402
from .model import ModelParams, critical_couplings, derive_scales, from_ratio  # noqa: E402
from .observables import (  # noqa: E402
    analyze_point,
    classify,
    entanglement_entropy,
    mean_photon_m,
    photon_statistics,
    spin_probabilities,
)
from .variational import GroundStateSolution, VariationalParams, minimize_ground, sweep  # noqa: E402
from .wigner import analytic_field, default_grid, field_negativities  # noqa: E402

__all__ = [
    "__version__",
    "ConfigurationError",
    "ConvergenceWarning",
    "DomainError",
    "NumericalError",
    "ResourceError",
    "TruncationWarning",
    "WidenGridError",
    "EDResult",
    "solve_exact",
    "ModelParams",
    "critical_couplings",
    "derive_scales",
    "from_ratio",
    "analyze_point",
    "classify",
    "entanglement_entropy",
    "mean_photon_m",
    "photon_statistics",
    "spin_probabilities",
    "GroundStateSolution",
    "VariationalParams",
    "minimize_ground",
    "sweep",
    "analytic_field",
    "default_grid",
    "field_negativities",
]
