import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from dbrinterp import ComplexRational, NodeSpec, ProblemData, blaschke, compute_P

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

ZERO = ComplexRational.constant(0)
Z = ComplexRational.identity()


def problem(nodes, s):
    """ProblemData and its Pick system from (point, targets) pairs."""
    specs = [NodeSpec(p, len(t), t) for p, t in nodes]
    data = ProblemData.from_nodes(specs, s)
    return data, compute_P(data)


def disk(max_radius=0.9):
    """Strategy for complex points with modulus at most ``max_radius``."""
    return st.builds(
        lambda r, t: complex(r * np.cos(t), r * np.sin(t)),
        st.floats(0, max_radius, allow_subnormal=False), st.floats(0, 2 * np.pi),
    )


def bounded_complex(scale=3.0):
    return st.builds(complex, st.floats(-scale, scale), st.floats(-scale, scale))


@st.composite
def blaschke_products(draw, min_degree=0, max_degree=4, radius=0.85):
    zeros = draw(st.lists(disk(radius), min_size=min_degree, max_size=max_degree))
    angle = draw(st.floats(0, 2 * np.pi))
    return blaschke(zeros, np.exp(1j * angle))


@st.composite
def schur_functions(draw):
    """Blaschke products, possibly scaled into the open Schur ball."""
    b = draw(blaschke_products())
    scale = draw(st.sampled_from([1.0, 0.9, 0.5]))
    return b * scale


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
