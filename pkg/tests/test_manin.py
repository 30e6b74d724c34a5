import math
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import decompose_between

import kurihara._fast as _fast
from kurihara.errors import (
    BadResidueCharacteristic,
    InvalidPrime,
    NotProjectivePoint,
    NotReducedFraction,
    UseAtkinLehnerPath,
)
from kurihara.fp_linalg import SparseMatFp, factorize, rank_fp
from kurihara.manin import (
    ManinSpace,
    P1Index,
    build_space,
    hecke_matrix,
    heilbronn_set,
    p1_normalize,
)


def p1_size(N):
    out = N
    for q in factorize(N):
        out = out * (q + 1) // q
    return out


def homology_dim(N):
    """2*genus + #cusps - 1 for X_0(N), from the standard index formulas."""
    if N == 1:
        return 0
    fac = factorize(N)
    mu = p1_size(N)
    nu2 = 0 if N % 4 == 0 else math.prod(
        1 + {1: 1, 3: -1}[q % 4] if q != 2 else 1 for q in fac
    )
    nu3 = 0 if N % 9 == 0 else math.prod(
        1 + {1: 1, 2: -1}[q % 3] if q != 3 else 1 for q in fac
    )
    divs = [d for d in range(1, N + 1) if N % d == 0]
    nuinf = sum(_totient(math.gcd(d, N // d)) for d in divs)
    g12 = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * nuinf
    assert g12 % 12 == 0
    return 2 * (g12 // 12) + nuinf - 1


def _totient(n):
    out = n
    for q in factorize(n):
        out = out * (q - 1) // q
    return out


def test_p1_sizes():
    for N in [1, 2, 6, 11, 12, 760, 3364]:
        assert len(P1Index(N)) == p1_size(N)


def test_p1_normalize_frozen():
    p5 = P1Index(5)
    assert p1_normalize(0, 1, p5) == p5.reps.index((0, 1))
    assert p5.normalize(2, 4) == (1, 2)  # scale by 3 = 2^{-1} mod 5
    assert p1_normalize(2, 4, 5) == p5.index(1, 2)
    p11 = P1Index(11)
    assert p11.normalize(1, 0) == (1, 0)


def test_p1_rejects_non_point():
    p = P1Index(10)
    with pytest.raises(NotProjectivePoint):
        p.index(2, 4)
    with pytest.raises(NotProjectivePoint):
        p.index(0, 5)


@given(st.sampled_from([5, 11, 12, 60]), st.data())
@settings(max_examples=50, deadline=None)
def test_p1_scale_invariance(N, data):
    p1 = P1Index(N)
    c = data.draw(st.integers(0, N - 1))
    d = data.draw(st.integers(0, N - 1))
    if math.gcd(math.gcd(c, d), N) != 1:
        return
    units = [u for u in range(1, N) if math.gcd(u, N) == 1]
    u = data.draw(st.sampled_from(units))
    assert p1.index(c, d) == p1.index(u * c % N, u * d % N)


def test_p1_reps_are_fixed_points():
    for N in [12, 45]:
        p1 = P1Index(N)
        for i, (c, d) in enumerate(p1.reps):
            assert p1.index(c, d) == i


def test_heilbronn_frozen():
    X2 = {tuple(r) for r in heilbronn_set(2)}
    assert X2 == {(1, 0, 0, 2), (1, 0, 1, 2), (2, 0, 0, 1), (2, 1, 0, 1)}
    for n in [2, 3, 5, 7]:
        X = heilbronn_set(n)
        dets = X[:, 0] * X[:, 3] - X[:, 1] * X[:, 2]
        assert np.all(dets == n)


def test_build_space_frozen_dims():
    assert build_space(11, 5).dim == 3
    # the lone level-1 generator is sigma-fixed, hence 0 in odd characteristic
    assert build_space(1, 5).dim == 0
    assert build_space(3364, 7).dim == 871  # regression constant, = homology_dim


def test_build_space_matches_homology_dim():
    for N, p in [(11, 5), (14, 3), (15, 7), (37, 5), (760, 3), (389, 7)]:
        assert build_space(N, p).dim == homology_dim(N)


def test_build_space_errors():
    with pytest.raises(BadResidueCharacteristic):
        build_space(10, 5)
    with pytest.raises(InvalidPrime):
        build_space(11, 2)
    with pytest.raises(InvalidPrime):
        build_space(11, 9)


def _perms(sp):
    p1 = sp.p1
    cs = np.array([c for c, _ in p1.reps], dtype=np.int64)
    ds = np.array([d for _, d in p1.reps], dtype=np.int64)
    args = (sp.N, p1.divisors, p1.orb, p1.keys)
    sig = _fast.batch_index(ds, -cs, *args)
    tau = _fast.batch_index(ds, -cs - ds, *args)
    sta = _fast.batch_index(-cs, ds, *args)
    return sig, tau, sta


@pytest.mark.parametrize("N,p", [(11, 5), (14, 3), (15, 7), (30, 7), (37, 5)])
def test_relation_closure_exhaustive(N, p):
    sp = build_space(N, p)
    sig, tau, _ = _perms(sp)
    A = sp.gen_image.toarray()
    assert not ((A + A[sig]) % p).any()
    assert not ((A + A[tau] + A[tau[tau]]) % p).any()


@pytest.mark.parametrize("N,p", [(11, 5), (14, 3), (37, 5), (760, 3)])
def test_star_involution(N, p):
    sp = build_space(N, p)
    S = sp.star.toarray()
    assert np.array_equal(S @ S % p, np.eye(sp.dim, dtype=np.int64))


def test_star_matches_generator_action():
    sp = build_space(37, 5)
    _, _, sta = _perms(sp)
    A = sp.gen_image.toarray()
    # image(star(x)) = image(x) @ star for every generator x
    assert np.array_equal(A[sta] % 5, A @ sp.star.toarray() % 5)


def test_hecke_eigenvalues_level11():
    sp = build_space(11, 5)
    eye = np.eye(3, dtype=np.int64)
    T2 = hecke_matrix(sp, 2).mat.toarray()
    T3 = hecke_matrix(sp, 3).mat.toarray()
    # char poly roots include a_2 = -2 and a_3 = -1 of the level-11 newform
    assert rank_fp(SparseMatFp.from_dense((T2 - (-2) * eye) % 5, 5)) < 3
    assert rank_fp(SparseMatFp.from_dense((T3 - (-1) * eye) % 5, 5)) < 3
    assert not (T2 @ T3 - T3 @ T2).any()


def test_hecke_commutes_with_star():
    for N, p, ells in [(11, 5, (2, 3, 7)), (37, 5, (2, 3)), (760, 3, (3, 7))]:
        sp = build_space(N, p)
        S = sp.star
        for ell in ells:
            T = hecke_matrix(sp, ell).mat
            C = S @ T - T @ S
            C.data %= p
            assert not C.data.any()


def test_hecke_commutativity_pairs():
    sp = build_space(37, 5)
    ops = {ell: hecke_matrix(sp, ell).mat.toarray() for ell in (2, 3, 5, 11)}
    for l1 in ops:
        for l2 in ops:
            assert not ((ops[l1] @ ops[l2] - ops[l2] @ ops[l1]) % 5).any()


def test_hecke_errors():
    sp = build_space(11, 5)
    with pytest.raises(UseAtkinLehnerPath):
        hecke_matrix(sp, 11)
    with pytest.raises(InvalidPrime):
        hecke_matrix(sp, 4)


def test_eval_path_basics():
    sp = build_space(11, 5)
    v = sp.eval_path(0, 1)
    assert np.array_equal(v, np.asarray(sp.gen_image[sp.p1.index(1, 0)].todense()).ravel())
    assert np.array_equal(sp.eval_path(3, 7), sp.eval_path(3 + 7, 7))
    assert np.array_equal(sp.eval_path(-4, 7), sp.eval_path(3, 7))
    with pytest.raises(NotReducedFraction):
        sp.eval_path(2, 4)
    with pytest.raises(NotReducedFraction):
        sp.eval_path(1, 0)


@given(st.sampled_from([(11, 5), (14, 3), (37, 5)]), st.data())
@settings(max_examples=40, deadline=None)
def test_star_path_relation(Np, data):
    N, p = Np
    sp = _space_cached(N, p)
    n = data.draw(st.integers(2, 400))
    a = data.draw(st.integers(1, n - 1))
    if math.gcd(a, n) != 1:
        return
    assert np.array_equal(sp.apply_star_path(sp.eval_path(a, n)), sp.eval_path(-a % n, n))


_SPACES = {}


def _space_cached(N, p):
    if (N, p) not in _SPACES:
        _SPACES[(N, p)] = build_space(N, p)
    return _SPACES[(N, p)]


@given(st.sampled_from([(11, 5), (14, 3), (37, 5)]), st.data())
@settings(max_examples=30, deadline=None)
def test_path_additivity_oracle(Np, data):
    N, p = Np
    sp = _space_cached(N, p)
    n = data.draw(st.integers(1, 150))
    a = data.draw(st.integers(0, 2 * n))
    m = data.draw(st.integers(1, 150))
    b = data.draw(st.integers(0, 2 * m))
    if math.gcd(a, n) != 1 or math.gcd(b, m) != 1:
        return
    if a * m == b * n:
        return
    lhs = (sp.eval_path(a, n) - sp.eval_path(b, m)) % p
    assert np.array_equal(lhs, decompose_between(sp, b, m, a, n))


def test_eval_throughput():
    # soft engineering target: >= 1e5 functional evaluations per second for
    # scan-style access (precomputed values on P^1, numba path walk)
    sp = _space_cached(3364, 7)
    phi = (np.arange(sp.dim, dtype=np.int64) * 17 + 1) % 7
    y = sp.y_p1(phi)
    args = (sp.p1.divisors, sp.p1.orb, sp.p1.keys)
    _fast.path_value(sp.N, 1, 9973, *args, y, 7)  # warm the JIT
    t0 = time.perf_counter()
    cnt = 0
    for n in range(9973, 10273):
        for a in range(1, 60):
            if math.gcd(a, n) == 1:
                _fast.path_value(sp.N, a, n, *args, y, 7)
                cnt += 1
    rate = cnt / (time.perf_counter() - t0)
    assert rate >= 1e5, f"only {rate:.0f} evaluations/s"


def test_space_roundtrip(tmp_path):
    sp = build_space(37, 5)
    f1 = tmp_path / "m37.txt"
    sp.save(f1)
    sp2 = ManinSpace.load(f1)
    f2 = tmp_path / "m37_again.txt"
    sp2.save(f2)
    assert f1.read_bytes() == f2.read_bytes()
    assert sp2.dim == sp.dim
    for a, n in [(0, 1), (3, 7), (5, 13)]:
        assert np.array_equal(sp2.eval_path(a, n), sp.eval_path(a, n))
    T1 = hecke_matrix(sp, 2).mat
    T2 = hecke_matrix(sp2, 2).mat
    assert (T1 != T2).nnz == 0
