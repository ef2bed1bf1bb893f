"""Seeded random problem generators used by the tests and scripts."""

from dataclasses import dataclass

import numpy as np

from .pick import compute_P
from .rational import blaschke
from .realization import NodeSpec, ProblemData


@dataclass(frozen=True)
class InstanceConfig:
    min_nodes: int = 1
    max_nodes: int = 6
    max_multiplicity: int = 1
    max_dim: int = 6
    node_radius: float = 0.8
    separation: float = 0.1
    zero_radius: float = 0.9
    # degree of s is dim + an extra drawn from this inclusive range
    extra_degree: tuple = (1, 3)
    # "blaschke" or "scaled": a Blaschke product times a constant of modulus < 1
    schur_kind: str = "blaschke"
    scale_range: tuple = (0.3, 0.95)
    target_scale: float = 1.0
    # redraw until cond(P) is at most this; Theta-side residuals scale like cond(P) * eps
    max_condition: float = 1e6
    max_draws: int = 100


@dataclass(frozen=True)
class Instance:
    data: ProblemData
    nodes: tuple
    seed: int

    @property
    def s(self):
        return self.data.s


def disk_points(rng, count, radius, separation=0.0, max_tries=10000):
    """Area-uniform points in |z| <= radius, pairwise at least ``separation`` apart."""
    pts = []
    tries = 0
    while len(pts) < count:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("could not place separated points; lower the separation")
        z = radius * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        if all(abs(z - p) >= separation for p in pts):
            pts.append(complex(z))
    return pts


def random_complex(rng, size=None, scale=1.0):
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)


def random_blaschke(rng, degree, radius=0.9):
    zeros = disk_points(rng, degree, radius)
    return blaschke(zeros, np.exp(2j * np.pi * rng.random()))


def random_multiplicities(rng, count, cfg):
    mults = [1] * count
    budget = cfg.max_dim - count
    for i in rng.permutation(count):
        extra = int(rng.integers(0, min(cfg.max_multiplicity - 1, budget) + 1)) if budget > 0 else 0
        mults[i] += extra
        budget -= extra
    return mults


def _draw(rng, cfg):
    count = int(rng.integers(cfg.min_nodes, cfg.max_nodes + 1))
    count = min(count, cfg.max_dim)
    points = disk_points(rng, count, cfg.node_radius, cfg.separation)
    mults = random_multiplicities(rng, count, cfg)
    nodes = tuple(NodeSpec(p, m, random_complex(rng, m, cfg.target_scale)) for p, m in zip(points, mults))
    degree = sum(mults) + int(rng.integers(cfg.extra_degree[0], cfg.extra_degree[1] + 1))
    s = random_blaschke(rng, degree, cfg.zero_radius)
    if cfg.schur_kind == "scaled":
        s = s * float(rng.uniform(*cfg.scale_range))
    elif cfg.schur_kind != "blaschke":
        raise ValueError(f"unknown schur_kind {cfg.schur_kind!r}")
    return ProblemData.from_nodes(nodes, s), nodes


def random_instance(seed, cfg=InstanceConfig()):
    """A seeded instance whose Pick matrix has condition number at most ``cfg.max_condition``."""
    rng = np.random.default_rng(seed)
    for _ in range(cfg.max_draws):
        data, nodes = _draw(rng, cfg)
        if np.linalg.cond(compute_P(data).P) <= cfg.max_condition:
            return Instance(data, nodes, seed)
    raise RuntimeError(f"no instance with cond(P) <= {cfg.max_condition:g} in {cfg.max_draws} draws")


def random_parameter_terms(rng, count, radius=0.8):
    return [(w, complex(random_complex(rng))) for w in disk_points(rng, count, radius, 0.05)]
