"""hypothesis 生成器：球内向量与小范数的线性分式映射"""

import numpy as np
from hypothesis import strategies as st

from wcosym.maps.lfmap import LinearFractionalMap

coordinates = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)


def complex_arrays(shape):
    size = int(np.prod(shape))
    return st.lists(coordinates, min_size=2 * size, max_size=2 * size).map(
        lambda xs: (np.array(xs[:size]) + 1j * np.array(xs[size:])).reshape(shape))


def ball_vectors(dim, radius):
    """范数不超过 radius 的复向量"""
    return complex_arrays((dim,)).map(lambda v: v * radius / max(1.0, np.linalg.norm(v)))


def small_maps(dim=2):
    """‖A‖ ≤ 0.4，‖b‖ ≤ 0.3，‖c‖ ≤ 0.3，d = 1 的自映射"""
    return st.builds(
        lambda a, b, c: LinearFractionalMap(0.4 * a / max(1.0, np.linalg.norm(a, 2)), b, c, 1.0),
        complex_arrays((dim, dim)), ball_vectors(dim, 0.3), ball_vectors(dim, 0.3),
    )
