"""Mazur-Tate elements, stabilization, layer projections, and mu-scans.

The strongest check here is the projective-system identity
pi(theta_stab_r) = theta_stab_{r-1}: both sides are computed through
completely different paths (stabilize-then-project vs stabilize below),
so agreement exercises theta_plus, nu_lift, and project_down jointly.
"""

import numpy as np
import pytest

from kurihara.eigen import EigenFunctional, modsym_value
from kurihara.errors import LayerMismatch, NotOrdinary
from kurihara.mazur_tate import (
    FOUND,
    NOT_FOUND_WITHIN_BOUND,
    LayerElement,
    MTElement,
    _plus_reps,
    convolve,
    mu_scan,
    nu_lift,
    project_down,
    project_to_layer,
    stabilize_theta,
    theta_plus,
)


def test_plus_reps_structure():
    assert _plus_reps(1).tolist() == [0]
    assert _plus_reps(3).tolist() == [1]  # phi(3)/2 = 1 class
    assert _plus_reps(9).tolist() == [1, 2, 4]
    assert _plus_reps(25).tolist() == [1, 2, 3, 4, 6, 7, 8, 9, 11, 12]


def test_theta_modulus_one_is_delta_1(fn760, fn3456):
    assert theta_plus(fn760, 1).coeffs.tolist() == [modsym_value(fn760, 0, 1)] == [2]
    assert theta_plus(fn3456, 1).coeffs.tolist() == [0]


def test_theta_respects_plus_symmetry(fn760):
    # raw values at a and m - a agree, so the class coefficient is honest
    m = 27
    th = theta_plus(fn760, m)
    for i, a in enumerate(th.reps):
        assert th.coeffs[i] == fn760.path_value(int(a), m)
        assert th.coeffs[i] == fn760.path_value(m - int(a), m)


def test_theta_deterministic(fn760):
    a = theta_plus(fn760, 81)
    b = theta_plus(fn760, 81)
    assert np.array_equal(a.coeffs, b.coeffs)


def test_theta_760_frozen(fn760):
    assert theta_plus(fn760, 3).coeffs.tolist() == [1]
    layer1 = project_to_layer(theta_plus(fn760, 9), 1)
    assert layer1.coeffs.tolist() == [2, 0, 2]
    assert layer1.machine_line() == "THETAv1 layer=1 coeffs=2,0,2"


def test_coprimality_precondition(fn760):
    with pytest.raises(AssertionError):
        theta_plus(fn760, 5)  # 5 divides the level


def test_projection_conserves_mass(fn760):
    th = theta_plus(fn760, 27)
    assert project_down(th, 9).coeffs.sum() % 3 == th.coeffs.sum() % 3
    assert project_to_layer(th, 2).coeffs.sum() % 3 == th.coeffs.sum() % 3
    # r = 0 projection collapses to the single total
    total = project_to_layer(theta_plus(fn760, 3), 0)
    assert total.coeffs.shape == (1,)
    assert total.coeffs[0] == theta_plus(fn760, 3).coeffs.sum() % 3


def test_pi_nu_is_zero_mod_p(fn3456):
    th = theta_plus(fn3456, 5)
    assert not th.is_zero()
    assert project_down(nu_lift(th, 25), 5).is_zero()


def test_layer_mismatch():
    x = MTElement(9, 3, _plus_reps(9), np.array([1, 2, 0]))
    with pytest.raises(LayerMismatch):
        project_to_layer(x, 2)


def test_stabilized_projective_system(fn3456):
    for r in (2, 3):
        lhs = project_down(stabilize_theta(fn3456, r), 5 ** (r - 1))
        rhs = stabilize_theta(fn3456, r - 1)
        assert np.array_equal(lhs.coeffs, rhs.coeffs)


def test_stabilize_requires_ordinary(fn760):
    assert fn760.data.ap % 3 == 0
    with pytest.raises(NotOrdinary):
        stabilize_theta(fn760, 1)


def test_vanishing_verdict_unit_invariant(fn3456):
    fn2 = EigenFunctional(fn3456.space, fn3456.data, 2 * fn3456.phi % 5)
    base = project_to_layer(stabilize_theta(fn3456, 2), 1)
    scaled = project_to_layer(stabilize_theta(fn2, 2), 1)
    assert np.array_equal(scaled.coeffs, 2 * base.coeffs % 5)
    assert (base.coeffs == 0).tolist() == (scaled.coeffs == 0).tolist()


def test_mu_scan_ordinary_3456(fn3456):
    rep = mu_scan(fn3456, r_max=4)
    assert rep.ordinary and rep.status == FOUND and rep.first_r == 1
    layer = project_to_layer(stabilize_theta(fn3456, 2), 1)
    assert layer.coeffs.tolist() == [1, 4, 0, 4, 1]
    assert any("r = 1" in line for line in rep.lines())


def test_mu_scan_nonordinary_760(fn760):
    rep = mu_scan(fn760, r_max=4)
    assert not rep.ordinary
    assert rep.status == FOUND
    assert rep.first_odd == 1 and rep.first_even == 2
    # an even layer needs r = 2, so a bound of 1 is inconclusive
    short = mu_scan(fn760, r_max=1)
    assert short.status == NOT_FOUND_WITHIN_BOUND
    assert short.first_odd == 1 and short.first_even is None


def test_mu_scan_bound_precondition(fn760):
    with pytest.raises(AssertionError):
        mu_scan(fn760, r_max=0)


def test_convolution_identity_and_hom():
    rng = np.random.default_rng(11)
    reps = _plus_reps(25)
    x = MTElement(25, 5, reps, rng.integers(0, 5, reps.shape[0]))
    y = MTElement(25, 5, reps, rng.integers(0, 5, reps.shape[0]))
    one = np.zeros(reps.shape[0], dtype=np.int64)
    one[x.class_index(1)] = 1
    assert np.array_equal(convolve(x, MTElement(25, 5, reps, one)).coeffs, x.coeffs)
    # projection to the layer is a ring homomorphism
    lhs = project_to_layer(convolve(x, y), 1)
    rhs = project_to_layer(x, 1).convolve(project_to_layer(y, 1))
    assert np.array_equal(lhs.coeffs, rhs.coeffs)


def test_layer_convolution_is_cyclic():
    a = LayerElement(1, 5, np.array([1, 2, 0, 0, 3]))
    b = LayerElement(1, 5, np.array([0, 1, 0, 0, 0]))
    assert a.convolve(b).coeffs.tolist() == [3, 1, 2, 0, 0]
