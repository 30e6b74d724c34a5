"""Eigensystem enumeration tests on small levels with known answers.

Level 11 has one cusp form (a_2 = -2, a_3 = -1, a_5 = 1, U_11 = 1) plus
the boundary eigensystem a_ell = ell + 1; level 37 adds a second cusp
form, giving three lines.  Mod 5 at level 11 the cusp form and the
boundary system coincide at every operator (the classical index-5
congruence); the glued block contains a unique eigenline.
"""

import pytest

from kurihara.eigen import cut_eigenfunctional, eigenvalue_readback
from kurihara.errors import ScanBudgetExceeded
from kurihara.hunt import enumerate_eigensystems, harvest_eigendata, looks_eisenstein
from kurihara.manin import build_space


@pytest.fixture(scope="module")
def sp11_3():
    return build_space(11, 3)


def test_level_11_two_lines(sp11_3):
    branches = enumerate_eigensystems(sp11_3, fork=[("T", 2)])
    assert len(branches) == 2
    assert all(br.dim == 1 for br in branches)
    by_a2 = {br.assignments[("T", 2)]: br for br in branches}
    assert set(by_a2) == {0, 1}  # boundary has a_2 = 3 = 0, cusp form -2 = 1

    cusp = harvest_eigendata(sp11_3, by_a2[1], label="11.a")
    assert cusp.eigs[3] == 2  # a_3 = -1
    assert cusp.eigs[5] == 1
    assert cusp.eigs[7] == 1  # a_7 = -2
    assert cusp.bad[11] == 1
    assert cusp.ap == cusp.eigs[3]
    assert not looks_eisenstein(cusp)

    eis = harvest_eigendata(sp11_3, by_a2[0], label="11.eis")
    assert looks_eisenstein(eis)


def test_harvest_matches_direct_cut(sp11_3):
    branches = enumerate_eigensystems(sp11_3, fork=[("T", 2)])
    cusp_branch = next(br for br in branches if br.assignments[("T", 2)] == 1)
    data = harvest_eigendata(sp11_3, cusp_branch, label="11.a")
    fn = cut_eigenfunctional(sp11_3, data)
    assert (fn.phi == cusp_branch.phi(3)).all()
    assert eigenvalue_readback(fn, 13) == data.eigs[13]


def test_imposed_value_can_empty_the_space(sp11_3):
    # no eigensystem at level 11 has a_2 = 2 mod 3
    assert enumerate_eigensystems(sp11_3, imposed=[("T", 2, 2)]) == []


def test_branch_cap(sp11_3):
    with pytest.raises(ScanBudgetExceeded):
        enumerate_eigensystems(sp11_3, fork=[("T", 2)], max_branches=1)


def test_level_37_three_lines():
    space = build_space(37, 7)
    branches = enumerate_eigensystems(space, fork=[("T", 2)])
    assert sorted(br.assignments[("T", 2)] for br in branches) == [0, 3, 5]
    assert all(br.dim == 1 for br in branches)
    datas = {br.assignments[("T", 2)]: harvest_eigendata(space, br) for br in branches}
    assert looks_eisenstein(datas[3])
    assert not looks_eisenstein(datas[0]) and not looks_eisenstein(datas[5])
    # the a_2 = -2 form has a_3 = -3 and a_5 = -2; both cusp lines have
    # a multiplicative U_37 eigenvalue +-1
    assert datas[5].eigs[3] == 4
    assert datas[5].eigs[5] == 5
    assert datas[0].bad[37] % 7 in (1, 6)
    assert datas[5].bad[37] % 7 in (1, 6)


def test_congruent_systems_glue_to_one_line_at_11_mod_5():
    # the cusp form and boundary eigensystems coincide mod 5 (a_2 = -2 = 3
    # = 2 + 1, and so on), and the star+ space is a nonsplit extension of
    # one by the other: the search finds a single eigenline, already cut
    # out by T_2 alone, and its harvested system matches the boundary one
    space = build_space(11, 5)
    branches = enumerate_eigensystems(
        space, fork=[("T", 2), ("T", 3), ("U", 11)]
    )
    assert len(branches) == 1
    assert branches[0].dim == 1
    assert branches[0].assignments == {("T", 2): 3}
    data = harvest_eigendata(space, branches[0])
    assert looks_eisenstein(data)
    assert data.bad[11] == 1
