"""Band operators on l^p(Z, C^d): norms, essential spectra data, pseudospectra
grids, limit operators and finite-section stability analysis."""

from .errors import (BandopsError, KernelError, NonConvergenceError,
                     NotStableError, PreconditionError, SingularMatrixError,
                     SpecFormatError, UnsupportedExponentError,
                     UnsupportedSymbolClassError)
from .laws import EventuallyPeriodic, Periodic, SeededRandom, constant
from .operator import (BandOperator, WindowVector, add, adjoint, apply,
                       band_operator, column_truncate, compose, direct_sum,
                       identity_operator, scale, shift_conjugate,
                       shift_operator, subtract_lambda, truncate,
                       window_compression, zero_operator)
from .limitops import (LimitOperator, Symbol, fold_symbol, laurent_lower_norm,
                       laurent_norm, laurent_resolvent_recip, operator_spectrum)
from .norms import (ConvergedValue, essential_norm_q, essential_norm_via_limops,
                    essential_resolvent_recip, inverse_norm_recip, lower_norm,
                    mu, mu_tilde, norm_localized, op_norm)
from .pseudospec import (PerturbationWitness, PseudospectrumGrid,
                         essential_pseudospectrum_grid, hausdorff_gap,
                         level_set, pseudospectrum_grid, verify_witness,
                         witness_perturbation)
from .finsec import (FinSecReport, StabilitySpectrum, finite_sections,
                     q1_check, q3_check, stability_spectrum, stacked_norm)
from .specio import canonical_json, load_operator, save_operator

__version__ = "0.1.0"
