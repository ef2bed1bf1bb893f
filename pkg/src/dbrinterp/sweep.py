"""Per-instance certification residuals over seeded random problems.

``instance_residuals`` runs the whole pipeline (Pick system, Theta, sigma,
parametrization, RKHS checks) on one instance and returns a flat dict, so
the acceptance suite and ``scripts/random_sweep.py`` read the same numbers.
"""

from dataclasses import dataclass, replace

import numpy as np

from .instances import InstanceConfig, random_instance, random_parameter_terms
from .errors import PointOnZeroOfU
from .kernel import kernel_eval
from .pick import compute_P
from .rational import coefficient_distance, schur_check
from .rkhs import RKHSContext, h2_norm, isometry_condition, verify_isometry, verify_orthogonality
from .solver import ParameterH, additivity_residual, minimal_interpolant, parametrize
from .theta import auto_mu, build_theta, extract_sigma, lft_apply, random_disk_pairs, u_function, \
    verify_kernel_identity


@dataclass(frozen=True)
class SweepConfig:
    per_kind: int = 40
    kinds: tuple = ("blaschke", "scaled")
    instance: InstanceConfig = InstanceConfig(max_multiplicity=2)
    identity_pairs: int = 50
    isometry_combos: int = 10
    parameter_terms: int = 3
    mu_pairs: int = 100
    # isometry combos whose norm is this many times smaller than the kernel
    # terms it is built from are redrawn (see rkhs.isometry_condition)
    isometry_max_kappa: float = 1e2


def weighted_kernel_values(data, system, mu, pairs):
    """u(z) K_sigma(z, w) conj u(w) at each pair, with u and sigma from Theta built at ``mu``."""
    theta = build_theta(data, system, mu)
    sigma, u = extract_sigma(theta, data.s), u_function(theta, data.s)
    return np.array([u(z) * kernel_eval(sigma, z, w) * np.conj(u(w)) for z, w in pairs])


def isometry_sample(ctx, theta, rng, max_kappa=np.inf, max_tries=1000):
    """(residual, kappa) of one random kernel combination with kappa at most ``max_kappa``."""
    for _ in range(max_tries):
        terms = random_parameter_terms(rng, int(rng.integers(1, 4)))
        try:
            lhs, rhs = verify_isometry(ctx, theta, terms)
        except PointOnZeroOfU:
            continue
        kappa = isometry_condition(ctx, terms, max(lhs, rhs))
        if kappa <= max_kappa:
            return abs(lhs - rhs) / max(lhs, rhs), kappa
    raise RuntimeError("no well-conditioned isometry combination found")


def isometry_residual(ctx, theta, terms):
    lhs, rhs = verify_isometry(ctx, theta, terms)
    return abs(lhs - rhs) / max(lhs, rhs)


def instance_residuals(inst, cfg=SweepConfig()):
    data = inst.data
    rng = np.random.default_rng(10_000 + inst.seed)
    system = compute_P(data)
    theta = build_theta(data, system)
    out = {"seed": inst.seed, "dim": data.dim, "cond_P": float(np.linalg.cond(system.P))}

    out["theta_identity"] = verify_kernel_identity(theta, data, system,
                                                   random_disk_pairs(rng, cfg.identity_pairs))
    out["boundary_j"] = theta.boundary_j_residual
    out["det"] = theta.det_residual

    sigma = extract_sigma(theta, data.s, check=False)
    out["sigma_sup"] = schur_check(sigma).boundary_sup
    out["round_trip"] = coefficient_distance(lft_apply(theta, sigma), data.s)

    ctx = RKHSContext(data, system)
    fmin = minimal_interpolant(data, system)
    h = ParameterH(sigma, random_parameter_terms(rng, cfg.parameter_terms))
    f = parametrize(data, system, theta, h)
    out["interpolation"] = max(fmin.interpolation_residual, f.interpolation_residual)
    orth = verify_orthogonality(ctx, theta, h)
    out["orthogonality"] = orth.residual
    out["orthogonality_bound"] = orth.bound
    samples = [isometry_sample(ctx, theta, rng, cfg.isometry_max_kappa) for _ in range(cfg.isometry_combos)]
    out["isometry"] = max(r for r, _ in samples)
    # unfiltered combos, for reporting: the error over kappa stays near rounding
    free = [isometry_sample(ctx, theta, rng) for _ in range(cfg.isometry_combos)]
    out["isometry_unrestricted"] = max(r for r, _ in free)
    out["isometry_per_kappa"] = max(r / k for r, k in samples + free)
    out["additivity"] = additivity_residual(f)

    out["h2_excess"] = max(h2_norm(g.f) - np.sqrt(max(g.norm_squared, 0.0)) for g in (fmin, f))
    return out


def mu_invariance(inst, cfg=SweepConfig()):
    """Largest relative gap of u K_sigma conj(u) between two well separated mu."""
    data = inst.data
    system = compute_P(data)
    mu1 = auto_mu(data.realization)
    mu2 = auto_mu(data.realization, exclude=[mu1])
    pairs = random_disk_pairs(np.random.default_rng(20_000 + inst.seed), cfg.mu_pairs, 0.9)
    a = weighted_kernel_values(data, system, mu1, pairs)
    b = weighted_kernel_values(data, system, mu2, pairs)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(a))))


def sweep_instances(cfg=SweepConfig()):
    for kind in cfg.kinds:
        icfg = replace(cfg.instance, schur_kind=kind)
        for seed in range(cfg.per_kind):
            yield kind, random_instance(seed, icfg)


def run_sweep(cfg=SweepConfig()):
    rows = []
    for kind, inst in sweep_instances(cfg):
        row = instance_residuals(inst, cfg)
        row["kind"] = kind
        rows.append(row)
    return rows
