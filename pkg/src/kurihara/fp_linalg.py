"""Arithmetic over F_p and small extensions: primes, discrete log tables,
sparse kernels, and F_{p^k} with a distinguished root of unity.

Everything here is deterministic: pivot choices, primitive roots and field
moduli are canonical so repeated runs produce identical bytes.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ExtensionTooLarge,
    InvalidPrime,
    NotAUnit,
    RamifiedModulus,
)

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3.3e24 (covers 64-bit)."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """Brent's cycle variant; n odd composite, not a prime power issue-free."""
    if n % 2 == 0:
        return 2
    for c in range(1, 50):
        y, m = 2, 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed on {n}")


def factorize(n: int) -> dict[int, int]:
    """Prime factorization as {prime: exponent}. Trial division then Pollard rho."""
    if n <= 0:
        raise ValueError("factorize wants a positive integer")
    out: dict[int, int] = {}
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47):
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.extend((d, m // d))
    return dict(sorted(out.items()))


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def inv_mod(a: int, m: int) -> int:
    g, x, _ = xgcd(a % m, m)
    if g != 1:
        raise NotAUnit(f"{a} is not invertible mod {m}")
    return x % m


@dataclass(frozen=True)
class PrimeFieldCtx:
    """The prime field F_p for an odd prime p."""

    p: int

    def __post_init__(self):
        if self.p == 2 or not is_prime(self.p):
            raise InvalidPrime(f"{self.p} is not an odd prime")

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise NotAUnit(f"{a} is 0 mod {self.p}")
        return pow(a, self.p - 2, self.p)

    def neg(self, a: int) -> int:
        return -a % self.p


def find_primitive_root(ell: int) -> int:
    """Smallest generator of (Z/ell)^* for prime ell."""
    if not is_prime(ell):
        raise InvalidPrime(f"{ell} is not prime")
    if ell == 2:
        return 1
    qs = list(factorize(ell - 1))
    for eta in range(2, ell):
        if all(pow(eta, (ell - 1) // q, ell) != 1 for q in qs):
            return eta
    raise InvalidPrime(f"no primitive root mod {ell}")  # unreachable for prime ell


_FULL_TABLE_BOUND = 1 << 20


class DlogTable:
    """Discrete logs base eta in (Z/ell)^*: eta^logs(a) = a, logs(eta) = 1.

    Full table below 2^20, baby-step giant-step above.
    """

    def __init__(self, ell: int, eta: int | None = None):
        if not is_prime(ell):
            raise InvalidPrime(f"{ell} is not prime")
        self.ell = ell
        self.eta = find_primitive_root(ell) if eta is None else eta % ell
        ok = self.eta != 0 and (ell == 2 or self.eta != 1)
        if ok and ell > 2:
            ok = all(
                pow(self.eta, (ell - 1) // q, ell) != 1 for q in factorize(ell - 1)
            )
        if not ok:
            raise NotAUnit(f"{self.eta} is not a primitive root mod {ell}")
        self._table: np.ndarray | None = None
        self._baby: dict[int, int] | None = None
        if ell < _FULL_TABLE_BOUND:
            t = np.full(ell, -1, dtype=np.int64)
            x = 1
            for i in range(ell - 1):
                t[x] = i
                x = x * self.eta % ell
            self._table = t
        else:
            m = math.isqrt(ell - 2) + 1
            baby = {}
            x = 1
            for j in range(m):
                baby.setdefault(x, j)
                x = x * self.eta % ell
            self._baby = baby
            self._giant_step = pow(self.eta, -m, ell)
            self._m = m

    def logs(self, a: int) -> int:
        """log_eta(a) in Z/(ell-1)."""
        a %= self.ell
        if a == 0:
            raise NotAUnit(f"0 is not a unit mod {self.ell}")
        if self._table is not None:
            return int(self._table[a])
        y, m = a, self._m
        for i in range(m + 1):
            j = self._baby.get(y)
            if j is not None:
                return (i * m + j) % (self.ell - 1)
            y = y * self._giant_step % self.ell
        raise NotAUnit(f"dlog of {a} mod {self.ell} not found")  # unreachable

    def table_mod_p(self, p: int) -> np.ndarray:
        """Array t with t[a] = logs(a) mod p (t[0] = 0); hot-loop carrier."""
        if self._table is not None:
            t = self._table % p
        else:
            t = np.fromiter(
                (0 if a == 0 else self.logs(a) % p for a in range(self.ell)),
                dtype=np.int64,
                count=self.ell,
            )
        t[0] = 0
        return t.astype(np.int64)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(f"DLOGv1 {self.ell} {self.eta}\n")
            for a in range(1, self.ell):
                fh.write(f"{self.ell} {self.eta} {a} {self.logs(a)}\n")

    @classmethod
    def load(cls, path) -> "DlogTable":
        with open(path) as fh:
            head = fh.readline().split()
            if len(head) != 3 or head[0] != "DLOGv1":
                raise ValueError(f"{path} is not a DLOGv1 file")
            ell, eta = int(head[1]), int(head[2])
            obj = cls(ell, eta)
            for line in fh:
                e2, h2, a, lg = map(int, line.split())
                if (e2, h2) != (ell, eta) or obj.logs(a) != lg:
                    raise ValueError(f"corrupt dlog record in {path}: {line!r}")
        return obj


def dlog_mod_p(table: DlogTable, a: int, p: int) -> int:
    """logs(a) reduced into F_p."""
    return table.logs(a) % p


class SparseMatFp:
    """Sparse matrix over F_p in COO form; no zero entries, one per cell."""

    def __init__(self, nrows: int, ncols: int, p: int, entries=None):
        self.nrows = nrows
        self.ncols = ncols
        self.p = p
        self.entries: dict[tuple[int, int], int] = {}
        if entries:
            items = entries.items() if isinstance(entries, dict) else entries
            for (r, c), v in items:
                v %= p
                if v:
                    self.entries[(r, c)] = v

    @classmethod
    def from_dense(cls, arr, p: int) -> "SparseMatFp":
        arr = np.asarray(arr) % p
        ent = {(int(r), int(c)): int(arr[r, c]) for r, c in zip(*np.nonzero(arr))}
        return cls(arr.shape[0], arr.shape[1], p, ent)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.int64)
        for (r, c), v in self.entries.items():
            out[r, c] = v
        return out

    def to_csr(self):
        from scipy.sparse import csr_matrix

        if not self.entries:
            return csr_matrix((self.nrows, self.ncols), dtype=np.int64)
        rc = np.array(list(self.entries), dtype=np.int64)
        vals = np.fromiter(self.entries.values(), dtype=np.int64, count=len(self.entries))
        return csr_matrix((vals, (rc[:, 0], rc[:, 1])), shape=(self.nrows, self.ncols))

    def rows(self) -> list[dict[int, int]]:
        out: list[dict[int, int]] = [dict() for _ in range(self.nrows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def transpose(self) -> "SparseMatFp":
        return SparseMatFp(
            self.ncols, self.nrows, self.p,
            {(c, r): v for (r, c), v in self.entries.items()},
        )

    def __matmul__(self, other: "SparseMatFp") -> "SparseMatFp":
        if self.ncols != other.nrows or self.p != other.p:
            raise ValueError("shape or modulus mismatch")
        prod = (self.to_csr() @ other.to_csr()).tocoo()
        ent = {(int(r), int(c)): int(v) for r, c, v in zip(prod.row, prod.col, prod.data)}
        return SparseMatFp(self.nrows, other.ncols, self.p, ent)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """Matrix times column vector, reduced mod p."""
        out = np.zeros(self.nrows, dtype=np.int64)
        for (r, c), v in self.entries.items():
            out[r] += v * int(vec[c])
        return out % self.p

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseMatFp)
            and (self.nrows, self.ncols, self.p) == (other.nrows, other.ncols, other.p)
            and self.entries == other.entries
        )


def sparse_rref(rows: list[dict[int, int]], ncols: int, p: int):
    """Reduced row echelon form of a sparse system over F_p.

    rows is a list of {col: val} dicts (consumed). Returns (pivots, pivrows)
    where pivots is the sorted list of pivot columns and pivrows[c] is the
    fully reduced row with leading 1 at column c. Pivot choice is
    Markowitz-style with deterministic ties: smallest row nonzero count
    first, then lowest row index, then the row's column with fewest active
    occupants, then lowest column index.
    """
    rows = [
        {c: v % p for c, v in r.items() if v % p}
        for r in rows
    ]
    col_rows: dict[int, set[int]] = {}
    for i, r in enumerate(rows):
        for c in r:
            col_rows.setdefault(c, set()).add(i)

    heap = [(len(r), i) for i, r in enumerate(rows) if r]
    heapq.heapify(heap)
    active = {i for i, r in enumerate(rows) if r}
    piv_of_row: dict[int, int] = {}
    order: list[int] = []

    while heap:
        nnz, i = heapq.heappop(heap)
        if i not in active or len(rows[i]) != nnz:
            if i in active and rows[i]:
                heapq.heappush(heap, (len(rows[i]), i))
            continue
        row = rows[i]
        c = min(row, key=lambda cc: (len(col_rows[cc]), cc))
        inv = pow(row[c], p - 2, p)
        if inv != 1:
            for cc in row:
                row[cc] = row[cc] * inv % p
        active.discard(i)
        piv_of_row[i] = c
        order.append(i)
        for j in list(col_rows[c]):
            if j == i or j not in active:
                continue
            other = rows[j]
            m = other.pop(c)
            col_rows[c].discard(j)
            for cc, v in row.items():
                if cc == c:
                    continue
                w = (other.get(cc, 0) - m * v) % p
                if w:
                    if cc not in other:
                        col_rows.setdefault(cc, set()).add(j)
                    other[cc] = w
                elif cc in other:
                    del other[cc]
                    col_rows[cc].discard(j)
            if other:
                heapq.heappush(heap, (len(other), j))
            else:
                active.discard(j)
        col_rows[c] = {i}

    # back-substitute so pivot rows are reduced against later pivots too
    pivcols = {piv_of_row[i]: i for i in order}
    for i in reversed(order):
        row = rows[i]
        mine = piv_of_row[i]
        hits = [c for c in row if c != mine and c in pivcols]
        for c in hits:
            m = row.pop(c)
            for cc, v in rows[pivcols[c]].items():
                if cc == c:
                    continue
                w = (row.get(cc, 0) - m * v) % p
                if w:
                    row[cc] = w
                elif cc in row:
                    del row[cc]
    pivots = sorted(pivcols)
    pivrows = {c: rows[pivcols[c]] for c in pivots}
    return pivots, pivrows


def kernel_basis(M: SparseMatFp) -> list[np.ndarray]:
    """Basis of {v : M v = 0} over F_p, rows in reduced echelon order."""
    pivots, pivrows = sparse_rref(M.rows(), M.ncols, M.p)
    pivset = set(pivots)
    free = [c for c in range(M.ncols) if c not in pivset]
    basis = []
    for f in free:
        v = np.zeros(M.ncols, dtype=np.int64)
        v[f] = 1
        for c in pivots:
            w = pivrows[c].get(f)
            if w:
                v[c] = (-w) % M.p
        basis.append(v)
    return basis


def kernel_basis_csr(rows: list[dict[int, int]], ncols: int, p: int):
    """Sparse right-kernel basis of the system given by rows.

    Returns (B, free) where B is a scipy CSR matrix of shape
    (ncols, nullity) whose columns are the reduced echelon kernel basis,
    and free the array of free columns; B[free, :] is the identity.
    """
    from scipy.sparse import csr_matrix

    pivots, pivrows = sparse_rref(rows, ncols, p)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    pos = {f: j for j, f in enumerate(free)}
    r: list[int] = []
    c: list[int] = []
    v: list[int] = []
    for j, f in enumerate(free):
        r.append(f)
        c.append(j)
        v.append(1)
    for pc in pivots:
        for f, w in pivrows[pc].items():
            if f != pc:
                r.append(pc)
                c.append(pos[f])
                v.append(-w % p)
    B = csr_matrix((v, (r, c)), shape=(ncols, len(free)), dtype=np.int64)
    return B, np.array(free, dtype=np.int64)


def rank_fp(M: SparseMatFp) -> int:
    pivots, _ = sparse_rref(M.rows(), M.ncols, M.p)
    return len(pivots)


# dense engine: delayed-update Gauss-Jordan in float64, BLAS-backed


def dense_rref(A: np.ndarray, p: int, block: int = 128):
    """In-float RREF of an integer matrix mod p.

    Returns (R, pivots): R is the reduced matrix (int64, entries in [0,p)),
    pivots the list of pivot columns. Pivot rule: leftmost column, then
    smallest row. Updates are delayed into rank-128 BLAS products; entries
    stay below 2^53 for p < 2^21 without intermediate reductions.
    """
    if p >= (1 << 21):
        raise ValueError("dense_rref float path needs p < 2^21")
    A = np.asarray(A)
    m, n = A.shape
    W = (A % p).astype(np.float64)
    U = np.empty((m, block))
    V = np.empty((block, n))
    nbuf = 0
    r = 0
    pivots: list[int] = []

    def flush():
        nonlocal nbuf
        if nbuf:
            W[:, :] -= U[:, :nbuf] @ V[:nbuf, :]
            np.mod(W, p, out=W)
            nbuf = 0

    for c in range(n):
        if r == m:
            break
        col = W[:, c].copy()
        if nbuf:
            col -= U[:, :nbuf] @ V[:nbuf, c]
        col %= p
        nz = np.nonzero(np.rint(col[r:]).astype(np.int64))[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            W[[r, pr], :] = W[[pr, r], :]
            if nbuf:
                U[[r, pr], :nbuf] = U[[pr, r], :nbuf]
            col[[r, pr]] = col[[pr, r]]
        row = W[r, :].copy()
        if nbuf:
            row -= U[r, :nbuf] @ V[:nbuf, :]
        row %= p
        inv = pow(int(round(float(row[c]))), p - 2, p)
        row = (row * inv) % p
        W[r, :] = row
        U[r, :nbuf] = 0.0
        col[r] = 0.0
        U[:, nbuf] = col
        V[nbuf, :] = row
        nbuf += 1
        pivots.append(c)
        r += 1
        if nbuf == block:
            flush()
    flush()
    R = np.rint(W).astype(np.int64) % p
    return R, pivots


def dense_kernel(A: np.ndarray, p: int) -> np.ndarray:
    """Columns span {v : A v = 0 mod p}; reduced echelon, deterministic."""
    A = np.asarray(A)
    n = A.shape[1]
    R, pivots = dense_rref(A, p)
    pivset = set(pivots)
    free = [c for c in range(n) if c not in pivset]
    K = np.zeros((n, len(free)), dtype=np.int64)
    for j, f in enumerate(free):
        K[f, j] = 1
        for i, c in enumerate(pivots):
            K[c, j] = (-R[i, f]) % p
    return K


# F_{p^k} with distinguished root of unity


def _poly_mul(a: np.ndarray, b: np.ndarray, red: np.ndarray, p: int) -> np.ndarray:
    # float64 keeps this exact: entries stay below k^2 p^3 < 2^53 (guarded at
    # field construction), and the reduction row product hits BLAS
    k = red.shape[1]
    prod = np.convolve(a.astype(np.float64), b.astype(np.float64))
    if prod.shape[0] <= k:
        out = np.zeros(k)
        out[: prod.shape[0]] = prod
    else:
        out = prod[:k] + prod[k:] @ red[: prod.shape[0] - k]
    return (out % p).astype(np.int64)


def _poly_pow(a: np.ndarray, e: int, red: np.ndarray, p: int) -> np.ndarray:
    k = red.shape[1]
    out = np.zeros(k, dtype=np.int64)
    out[0] = 1
    base = a % p
    while e:
        if e & 1:
            out = _poly_mul(out, base, red, p)
        base = _poly_mul(base, base, red, p)
        e >>= 1
    return out


def _reduction_rows(modulus: np.ndarray, p: int) -> np.ndarray:
    """Rows j = x^(k+j) mod modulus, for j = 0..k-2; modulus monic length k+1.

    Returned as float64 (exact: entries below p) for BLAS-backed reduction.
    """
    k = modulus.shape[0] - 1
    if k * k * p**3 >= (1 << 53):
        raise ExtensionTooLarge(f"degree {k} over F_{p} exceeds the float64 budget")
    red = np.zeros((max(k - 1, 1), k), dtype=np.int64)
    cur = (-modulus[:k]) % p  # x^k
    for j in range(max(k - 1, 1)):
        red[j] = cur
        nxt = np.zeros(k, dtype=np.int64)
        nxt[1:] = cur[: k - 1]
        nxt += cur[k - 1] * ((-modulus[:k]) % p)
        cur = nxt % p
        if k == 1:
            break
    return red.astype(np.float64)


def _is_irreducible(f: np.ndarray, p: int) -> bool:
    """Rabin test for monic f over F_p, with a small-degree-factor prefilter."""
    k = f.shape[0] - 1
    if k == 1:
        return True
    red = _reduction_rows(f, p)
    x = np.zeros(k, dtype=np.int64)
    x[1] = 1
    # gcd(x^{p^j} - x, f) = 1 rules out factors of degree dividing j; degrees
    # 1..3 reject most candidates before the expensive full powmod
    y = x
    for j in (1, 2, 3):
        if j > k // 2:
            break
        y = _poly_pow(y, p, red, p)
        if not _poly_gcd_is_one(f, (y - x) % p, p):
            return False
    xp = _poly_pow(x, p**k, red, p)
    if not np.array_equal(xp, x):
        return False
    for q in factorize(k):
        xq = _poly_pow(x, p ** (k // q), red, p)
        if not _poly_gcd_is_one(f, (xq - x) % p, p):
            return False
    return True


def _poly_gcd_is_one(f: np.ndarray, g: np.ndarray, p: int) -> bool:
    """gcd(f, g) == 1 over F_p, with f monic of full degree."""
    a = np.asarray(f, dtype=np.int64) % p
    b = np.asarray(g, dtype=np.int64) % p
    nz = np.nonzero(b)[0]
    b = b[: nz[-1] + 1] if nz.size else b[:0]
    while b.size:
        inv = pow(int(b[-1]), p - 2, p)
        while a.size >= b.size:
            coef = int(a[-1]) * inv % p
            shift = a.size - b.size
            a[shift:] = (a[shift:] - coef * b) % p
            nz = np.nonzero(a)[0]
            a = a[: nz[-1] + 1] if nz.size else a[:0]
        a, b = b, a
    return a.size == 1


class ExtFieldCtx:
    """F_{p^k} = F_p[x]/(modulus) carrying zeta_n of exact order n.

    Elements are int64 coefficient arrays of length k, little-endian.
    """

    def __init__(self, p: int, k: int, modulus: np.ndarray, n: int, zeta: np.ndarray):
        self.p = p
        self.k = k
        self.modulus = modulus
        self.n = n
        self.zeta_n = zeta
        self._red = _reduction_rows(modulus, p)

    def one(self) -> np.ndarray:
        e = np.zeros(self.k, dtype=np.int64)
        e[0] = 1
        return e

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return _poly_mul(a, b, self._red, self.p)

    def pow(self, a: np.ndarray, e: int) -> np.ndarray:
        """a^e for a unit a; e may be negative."""
        if e < 0:
            e %= self.p**self.k - 1
        return _poly_pow(a, e, self._red, self.p)

    def in_prime_field(self, a: np.ndarray) -> bool:
        return not np.any(a[1:] % self.p)

    def zeta_weighted_sum(self, coeffs: np.ndarray) -> np.ndarray:
        """Sum of coeffs[a] * zeta_n^a over a = 0..len-1."""
        acc = np.zeros(self.k, dtype=np.int64)
        cur = self.one()
        for a in range(coeffs.shape[0]):
            c = int(coeffs[a]) % self.p
            if c:
                acc = (acc + c * cur) % self.p
            cur = self.mul(cur, self.zeta_n)
        return acc


def multiplicative_order(a: int, n: int) -> int:
    """Order of a in (Z/n)^*."""
    if n == 1:
        return 1
    if math.gcd(a, n) != 1:
        raise NotAUnit(f"{a} is not a unit mod {n}")
    phi = 1
    for q, e in factorize(n).items():
        phi *= (q - 1) * q ** (e - 1)
    order = phi
    for q in factorize(phi):
        while order % q == 0 and pow(a, order // q, n) == 1:
            order //= q
    return order


_GENERATOR_FACTOR_BOUND = 1 << 50


def build_ext_field(p: int, n: int, k_bound: int = 64) -> ExtFieldCtx:
    """F_{p^k} with k = ord_n(p) and a verified zeta_n of exact order n."""
    if not is_prime(p):
        raise InvalidPrime(f"{p} is not prime")
    if n < 1:
        raise ValueError("n must be positive")
    if n > 1 and n % p == 0:
        raise RamifiedModulus(f"p = {p} divides n = {n}")
    k = multiplicative_order(p % n, n) if n > 1 else 1
    if k > k_bound:
        raise ExtensionTooLarge(f"ord_{n}({p}) = {k} exceeds bound {k_bound}")

    # first irreducible monic polynomial in base-p encoding order
    modulus = None
    if k == 1:
        modulus = np.array([p - 1, 1], dtype=np.int64)  # x - 1; any linear works
    else:
        enc = 1
        while modulus is None:
            f = np.zeros(k + 1, dtype=np.int64)
            f[k] = 1
            e, i = enc, 0
            while e:
                f[i] = e % p
                e //= p
                i += 1
            if _is_irreducible(f, p):
                modulus = f
            enc += 1

    red = _reduction_rows(modulus, p)
    order = p**k - 1
    assert order % n == 0
    n_primes = list(factorize(n)) if n > 1 else []

    def elt(m: int) -> np.ndarray:
        v = np.zeros(k, dtype=np.int64)
        i = 0
        while m:
            v[i] = m % p
            m //= p
            i += 1
        return v

    zeta = None
    if order <= _GENERATOR_FACTOR_BOUND:
        ord_primes = list(factorize(order))
        g = None
        m = 2
        while g is None:
            cand = elt(m)
            if all(
                not _is_one(_poly_pow(cand, order // q, red, p), p)
                for q in ord_primes
            ):
                g = cand
            m += 1
        zeta = _poly_pow(g, order // n, red, p)
    else:
        # p^k - 1 too large to factor; try candidates and verify the order of
        # cand^((p^k-1)/n) directly against the known factorization of n
        m = 2
        while zeta is None:
            cand = _poly_pow(elt(m), order // n, red, p)
            if not _is_one(cand, p) or n == 1:
                if all(not _is_one(_poly_pow(cand, n // q, red, p), p) for q in n_primes):
                    zeta = cand
            m += 1
    ctx = ExtFieldCtx(p, k, modulus, n, zeta)
    assert _is_one(ctx.pow(zeta, n), p)
    for q in n_primes:
        assert not _is_one(ctx.pow(zeta, n // q), p)
    return ctx


def _is_one(a: np.ndarray, p: int) -> bool:
    return a[0] % p == 1 and not np.any(a[1:] % p)
