import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from coarsesigma.examples import random_tree_model, random_truncation

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return random.Random(20240517)


def two_ray_cloud(length: int = 3):
    """Two integer rays of the given length glued at point 0."""
    labels = [(0, 0)] + [(r, t) for r in (1, 2) for t in range(1, length + 1)]

    def d(a, b):
        if a == b:
            return 0
        if a[0] == b[0]:
            return abs(a[1] - b[1])
        return a[1] + b[1]
    from coarsesigma.space import PointCloud
    return PointCloud([[d(a, b) for b in labels] for a in labels]), labels


def random_model(seed: int, max_points: int = 12):
    rng = random.Random(seed)
    space = random_tree_model(rng, rng.randint(2, max_points))
    return space, random_truncation(rng, space)


F = Fraction
