"""Variable exponent Lebesgue norms and fractional maximal operators on grids."""

__version__ = "0.1.0"

from .domain_grid import Domain, GridFunction, build_domain, integrate
from .errors import (
    ConfigError,
    ConvergenceError,
    DomainEmptyError,
    DomainMismatchError,
    ExponentRangeError,
    FamilyMismatchError,
    HypothesisViolation,
    SpacingError,
    VarlexError,
)
from .exponent_field import (
    ExponentField,
    ExponentPair,
    decay_log_holder_constant,
    derive_q,
    local_log_holder_constant,
    tail_sup,
)
from .inequality_lab import (
    VerificationReport,
    bound_sweep,
    composite_modular_identity,
    composite_power,
    verify_lemma,
    verify_prop1,
    verify_prop2,
)
from .maximal_ops import CubeFamily, fractional_maximal, hl_maximal, naive_maximal
from .variable_norm import LuxemburgResult, luxemburg_norm, modular, normalize
