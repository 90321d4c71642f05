"""lfhunt: hunt simultaneous extreme values of L-functions on a vertical line.

The library builds resonating Dirichlet polynomials over a smoothed prime
window, solves for unit-disk phase targets and rounds them to pure phases,
aligns a height t0 by simultaneous Diophantine approximation of prime
logarithms, and evaluates branch-tracked log L in the surrounding short
window, comparing the achieved extreme values against random-height
baselines.  Every analytic ingredient ships with an independently checkable
certificate suite (``lfhunt.verify`` / ``hunt verify``).
"""

from .catalog import (DirichletCharacter, LFunctionSpec, builtin_dirichlet,
                      builtin_zeta, chi3, chi4, ingest_coefficients,
                      ssoc_diagnostic, write_coefficients)
from .diophantine import (ChenCertificate, DiophantineInstance, chen_bound,
                          lambda_exact, lambda_lower_bound, nearest_int_dist,
                          objective, search_t)
from .errors import (CoverageError, DegenerateSystemError,
                     InfeasibleTargetsError, ZeroCrossingError)
from .evaluators import (EvalPoint, dirichlet_l, euler_product_log,
                         hurwitz_zeta, log_l_branch, log_l_point, value_at,
                         zeta)
from .pipeline import (HuntConfig, HuntReport, emit_report, parse_config,
                       parse_report, plan, report_to_csv, report_to_json,
                       run_hunt, verify_smoothing_bound)
from .primes import PrimeWindow, build_window, log_integral, sieve_primes
from .resonator import (PhaseAssignment, ResonanceSystem, build_system,
                        capacity_asymptotics_check, capacity_constant,
                        fejer_smoothing_check, good_rounding,
                        prime_power_tail, resonator_sum, solve_denseness,
                        window_capacity)

__version__ = "0.1.0"
