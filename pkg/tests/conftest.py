import hypothesis
import numpy as np
import pytest

from kahler_entropy import MetricSpec, hyperbolic_spec, polarize_radial
from kahler_entropy import entropy as ent

hypothesis.settings.register_profile(
    "ci", max_examples=25, deadline=None, derandomize=True
)
hypothesis.settings.load_profile("ci")


@pytest.fixture(scope="session")
def hyp1():
    return hyperbolic_spec(1)


@pytest.fixture(scope="session")
def hyp2():
    return hyperbolic_spec(2)


@pytest.fixture(scope="session")
def hyp3():
    return hyperbolic_spec(3)


@pytest.fixture(scope="session")
def kernel1(hyp1):
    return polarize_radial(hyp1)


@pytest.fixture(scope="session")
def kernel2(hyp2):
    return polarize_radial(hyp2)


@pytest.fixture(scope="session")
def perturbed_03():
    return MetricSpec(name="perturbed-0.3", dim=1, alpha=1.0, poly=(0.3,))


@pytest.fixture(scope="session")
def perturbed_neg01():
    return MetricSpec(name="perturbed+-0.1", dim=1, alpha=1.0, poly=(-0.1,))


@pytest.fixture(scope="session")
def alpha2():
    return MetricSpec(name="alpha-2", dim=1, alpha=2.0)


@pytest.fixture(scope="session")
def flat_spec():
    return MetricSpec(name="flat", dim=1, alpha=0.0, poly=(1.0,))


def ball_points(rng, dim, radius, count):
    v = rng.normal(size=(count, dim)) + 1j * rng.normal(size=(count, dim))
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    radii = radius * rng.uniform(0.05, 1.0, size=(count, 1)) ** (1.0 / (2 * dim))
    return v / norms * radii


@pytest.fixture(autouse=True, scope="session")
def _warm_caches():
    # pipelines are cached per spec; tests share the session caches
    yield
    ent.clear_caches()
