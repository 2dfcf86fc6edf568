"""Sharp constants, iterated logarithms and numerical probes for improved Rellich inequalities."""

from .errors import ConvergenceError, DegenerateParameterError, ParameterDomainError
from .jets import Jet
from .sharp_constants import (IdentityReport, InequalityParams, SharpConstants, StarVerdict, alpha_jet,
                              alpha_poly_jet, cancellation_report, constant_A, constant_A_double_prime,
                              constant_A_prime, constant_B, expansion_a_ij, proof_r_coefficients, q_factor,
                              sharp_constants, star_condition, verify_radio, verify_recursions)
from .iterlog import eta_zeta_theta, series_tail, x_derivative, x_values
from .radial_calculus import (CutoffSpec, LogPowerProfile, RadialPoint, TestFunction, iterated_operator,
                              radial_derivative, radial_laplacian, test_family)
from .quadrature import IntegralResult, RadialIntegrand, finiteness_check, gamma_ij, integrate_radial
from .prober import (RemainderReport, d_scale_sweep, inequality_sides, sharpness_A_sweep, sharpness_B_schedule)

__all__ = [name for name in dir() if not name.startswith("_")]
