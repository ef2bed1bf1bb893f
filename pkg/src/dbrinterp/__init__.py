"""Tangential interpolation in de Branges-Rovnyak spaces H(K_s).

Typical use::

    from dbrinterp import NodeSpec, ProblemData, compute_P, minimal_interpolant
    data = ProblemData.from_nodes([NodeSpec(0.5, 1, [1.0])], s)
    f = minimal_interpolant(data, compute_P(data)).f
"""

from .errors import *  # noqa: F401,F403
from .kernel import kernel_eval, kernel_gram
from .numerics import SpectralCertificate, certify_psd, range_membership, solve_stein
from .pick import PickSystem, compute_N, compute_P, schwarz_pick_matrix, solvability_verdict
from .rational import (ComplexPolynomial, ComplexRational, blaschke, coefficient_distance, evaluate,
                       is_inner, normalize, schur_check, taylor_coefficients)
from .realization import NodeSpec, ProblemData, RealizationPair, build_jordan_realization, tangential_eval
from .rkhs import (KernelElement, RKHSContext, SpanVector, certify_positivity, h2_norm, h2_norm_report,
                   inner_product, positivity_certificate, verify_isometry, verify_orthogonality)
from .solver import (FsFunction, Interpolant, ParameterH, compute_F_s, degenerate_solve, minimal_interpolant,
                     norm_decomposition, parametrize)
from .theta import ThetaFunction, build_theta, extract_sigma, lft_apply, u_function

__version__ = "0.1.0"
