"""Shared fixtures and helpers: cut eigenfunctionals for the worked curves,
the --slow gate, and an independent two-cusp path decomposition used as an
oracle against eval_path."""

import numpy as np
import pytest

from kurihara.eigen import cut_eigenfunctional
from kurihara.formdata import CurveSpec, data_from_curve
from kurihara.fp_linalg import xgcd
from kurihara.manin import build_space

CURVE_760 = CurveSpec("760.e1", 760, (0, 0, 0, -67, 926))
CURVE_3456 = CurveSpec("3456.a1", 3456, (0, 0, 0, -84, 304))
CURVE_3364 = CurveSpec("3364.c1", 3364, (0, 0, 0, -4062871, -3152083138))
CURVE_10800 = CurveSpec("10800.dl1", 10800, (0, 0, 0, -1795500, -926032500))
CURVE_38088 = CurveSpec("38088.x1", 38088, (0, 0, 0, -937309179, -11045170357450))


def pytest_addoption(parser):
    parser.addoption("--slow", action="store_true", default=False,
                     help="run the long verifications marked slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip = pytest.mark.skip(reason="needs --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def fn760():
    data = data_from_curve(CURVE_760, 3)
    return cut_eigenfunctional(build_space(760, 3), data)


@pytest.fixture(scope="session")
def fn3456():
    data = data_from_curve(CURVE_3456, 5)
    return cut_eigenfunctional(build_space(3456, 5), data)


@pytest.fixture(scope="session")
def fn3364():
    data = data_from_curve(CURVE_3364, 7)
    return cut_eigenfunctional(build_space(3364, 7), data)


@pytest.fixture(scope="session")
def fn10800():
    data = data_from_curve(CURVE_10800, 7)
    return cut_eigenfunctional(build_space(10800, 7), data)


def decompose_between(sp, b, m, a, n):
    """Class of the path {b/m, a/n} by an independent decomposition.

    Conjugate by gamma in SL_2(Z) with gamma(oo) = b/m, expand
    {oo, gamma^{-1}(a/n)} through its own convergents, and push each
    unimodular symbol back through gamma. Shares only the generator
    map with eval_path, not the continued-fraction route.
    """
    g, y, x = xgcd(b, -m)
    assert g == 1  # gamma = [[b, x], [m, y]]
    num = y * a - x * n
    den = -m * a + b * n
    if den < 0:
        num, den = -num, -den
    assert den > 0
    vec = np.zeros(sp.dim, dtype=np.int64)
    pm2, pm1 = 0, 1  # p_{-2}, p_{-1}
    qm2, qm1 = 1, 0
    k = 0
    while den > 0:
        c = num // den
        num, den = den, num - c * den
        pk = c * pm1 + pm2
        qk = c * qm1 + qm2
        s = 1 if k % 2 == 1 else -1
        u = m * pk + y * qk
        v = s * (m * pm1 + y * qm1)
        vec += np.asarray(sp.gen_image[sp.p1.index(u, v)].todense()).ravel()
        pm2, pm1 = pm1, pk
        qm2, qm1 = qm1, qk
        k += 1
    return vec % sp.p
