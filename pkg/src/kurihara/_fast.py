"""Numba kernels for the hot paths: P^1(Z/NZ) lookup, continued-fraction
path evaluation, and determinant-ell matrix accumulation.

The P^1 tables (divisor list, per-divisor orbit minima, sorted keys) are
built in pure Python by manin.P1Index; kernels here only consume them.
A point (u:v) is encoded as key = u*N + v with u the canonical first
coordinate (a divisor of N, or 0 for the point (0:1)).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def p1_key(N, u, v, divisors, orb):
    """Canonical key of (u:v), or -1 if gcd(u, v, N) > 1."""
    u %= N
    v %= N
    if u == 0:
        if _gcd(v, N) == 1:
            return 1  # key of (0:1)
        return -1
    # extended euclid: s*u = g mod N
    old_r, r = u, N
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    g = old_r
    s0 = old_s % N
    h = N // g
    while _gcd(s0, N) != 1:
        s0 = (s0 + h) % N
    j = np.searchsorted(divisors, g)
    vmin = orb[j, (s0 * v) % N]
    if vmin < 0:
        return -1
    return g * N + vmin


@njit(cache=True)
def key_index(keys, key):
    i = np.searchsorted(keys, key)
    if i < keys.shape[0] and keys[i] == key:
        return i
    return -1


@njit(cache=True)
def batch_index(us, vs, N, divisors, orb, keys):
    """Indices of points (us[i]:vs[i]); -1 where not a projective point."""
    out = np.empty(us.shape[0], np.int64)
    for i in range(us.shape[0]):
        key = p1_key(N, us[i], vs[i], divisors, orb)
        out[i] = key_index(keys, key) if key >= 0 else -1
    return out


@njit(cache=True)
def path_symbol_indices(N, a, n, divisors, orb, keys, out):
    """Generator indices of the unimodular decomposition of {oo, a/n}.

    Symbols are (q_k : (-1)^{k-1} q_{k-1}) over the convergents of a/n.
    Fills out, returns the count (at most ~2 log n + 2 entries).
    """
    a %= n
    x, y = a, n
    qm2, qm1 = 1, 0  # q_{-2}, q_{-1}
    k = 0
    cnt = 0
    while y > 0:
        c = x // y
        x, y = y, x - c * y
        qk = c * qm1 + qm2
        v = qm1 if (k & 1) == 1 else -qm1
        key = p1_key(N, qk % N, v % N, divisors, orb)
        out[cnt] = key_index(keys, key)
        cnt += 1
        qm2, qm1 = qm1, qk
        k += 1
    return cnt


@njit(cache=True)
def path_value(N, a, n, divisors, orb, keys, y_p1, p):
    """Value at {oo, a/n} of the functional with values y_p1 on P^1 points."""
    a %= n
    x, y = a, n
    qm2, qm1 = 1, 0
    k = 0
    acc = 0
    while y > 0:
        c = x // y
        x, y = y, x - c * y
        qk = c * qm1 + qm2
        v = qm1 if (k & 1) == 1 else -qm1
        key = p1_key(N, qk % N, v % N, divisors, orb)
        acc += y_p1[key_index(keys, key)]
        qm2, qm1 = qm1, qk
        k += 1
    return acc % p


@njit(cache=True)
def hecke_coo(cs, ds, X, N, divisors, orb, keys):
    """COO pairs (row j, P^1 index) for sum_h [ (cs[j], ds[j]) · h ], h in X.

    X rows are (a, b, c, d) integer matrices; the bottom-row action is
    (c,d)·h = (a*c + c_h*d, b*c + d_h*d). Translates that leave P^1 are
    dropped (they contribute 0).
    """
    m = cs.shape[0]
    L = X.shape[0]
    rows = np.empty(m * L, np.int64)
    cols = np.empty(m * L, np.int64)
    cnt = 0
    for j in range(m):
        c = cs[j]
        d = ds[j]
        for r in range(L):
            u = (X[r, 0] * c + X[r, 2] * d) % N
            v = (X[r, 1] * c + X[r, 3] * d) % N
            key = p1_key(N, u, v, divisors, orb)
            if key >= 0:
                idx = key_index(keys, key)
                rows[cnt] = j
                cols[cnt] = idx
                cnt += 1
    return rows[:cnt], cols[:cnt]


@njit(cache=True)
def hecke_apply_point(c, d, X, N, divisors, orb, keys, y_p1, p):
    """Value of the functional at T(x_(c:d)) = sum_h [ (c,d)·h ]."""
    acc = 0
    for r in range(X.shape[0]):
        u = (X[r, 0] * c + X[r, 2] * d) % N
        v = (X[r, 1] * c + X[r, 3] * d) % N
        key = p1_key(N, u, v, divisors, orb)
        if key >= 0:
            acc += y_p1[key_index(keys, key)]
    return acc % p


@njit(cache=True)
def delta_sum(N, n, ells, logtab, divisors, orb, keys, y_p1, p, full):
    """Sum of path_value(a, n) * prod_i logtab[i, a mod ells[i]] over units a.

    logtab row i carries log_eta mod p for the prime ells[i] (0 at index 0).
    With full=False the loop runs over a <= n//2 and doubles the result,
    which is valid when every log table satisfies log(-1) = 0 mod p.
    """
    acc = 0
    top = n - 1 if full else n // 2
    for a in range(1, top + 1):
        pr = 1
        for i in range(ells.shape[0]):
            pr = pr * logtab[i, a % ells[i]] % p
            if pr == 0:
                break
        if pr == 0:
            continue
        acc = (acc + path_value(N, a, n, divisors, orb, keys, y_p1, p) * pr) % p
    if not full:
        acc = acc * 2 % p
    return acc
