import math

import numpy as np
import pytest

# 3x4 dictionary with columns normalized to two decimal places; its eta and
# gamma sequences are non-monotonic, which several regression tests pin.
EXAMPLE_3X4 = np.array(
    [
        [0.79, 0.82, -0.84, -0.82],
        [-0.57, 0.55, 0.33, -0.38],
        [0.23, -0.19, -0.43, 0.42],
    ]
)


def rotation_dictionary(theta_degrees: float) -> np.ndarray:
    """Three unit columns of the worst-case tightness construction."""
    th = math.radians(theta_degrees)
    return np.array(
        [
            [1.0, math.cos(th), math.sin(th / 2.0)],
            [0.0, math.sin(th), -math.cos(th / 2.0)],
        ]
    )


@pytest.fixture
def example_3x4():
    return EXAMPLE_3X4.copy()


@pytest.fixture
def dict_5deg():
    return rotation_dictionary(5.0)
