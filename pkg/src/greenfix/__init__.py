"""Green's-function fixed-point solver for truncated infinite BVP systems in lp."""

from .errors import (BadCutoff, ComponentOutOfRange, EmptyFamily, EnvelopeViolation,
                     GreenfixError, InvalidInterval, MalformedConfig, MeshMismatch,
                     NoConvergence, OutOfDomain, UnknownSystem)
from .hypothesis import HypothesisReport, assess, check_conditions, compute_constants
from .kernel import GreenKernel, make_kernel
from .seqspace import (LpParams, TailProfile, TruncatedState, family_mnc, mnc_estimate,
                       p_norm, sup_norm, tail_profile)
from .solver import SolveResult, SolverConfig, apply_operator, solve
from .systems import (SystemSpec, constant_forcing, envelope_check, eval_f, load_system,
                      paper_example, zero_system)
from .verifier import verify

__version__ = "0.1.0"
