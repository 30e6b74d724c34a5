"""Weight-2 Manin symbols for Gamma_0(N) over F_p.

The space is presented by P^1(Z/NZ) generators modulo the two- and
three-term relations x + x·sigma = 0, x + x·tau + x·tau^2 = 0 (sigma =
[[0,-1],[1,0]], tau = [[0,-1],[1,-1]], acting on bottom rows). Paths
{oo, a/n} are evaluated through the continued-fraction decomposition into
unimodular symbols (Manin's trick; see Stein, "Modular Forms: A
Computational Approach", ch. 8). Hecke operators T_ell act through
determinant-ell integer matrices (Merel's set X_ell).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix

from . import _fast
from .errors import (
    BadResidueCharacteristic,
    InvalidPrime,
    NotProjectivePoint,
    NotReducedFraction,
    UseAtkinLehnerPath,
)
from .fp_linalg import is_prime, sparse_rref, xgcd


def _divisors(N: int) -> list[int]:
    out = [d for d in range(1, math.isqrt(N) + 1) if N % d == 0]
    out += [N // d for d in reversed(out) if d * d != N]
    return out


class P1Index:
    """P^1(Z/NZ) with canonical representatives and O(log) lookup.

    Representatives follow Stein, Algorithm 8.29: first coordinate is
    g = gcd(u, N); the second is minimized over the stabilizer of g.
    Points are ordered by the key u*N + v.
    """

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("level must be >= 1")
        self.N = N
        if N == 1:
            self.reps = [(0, 0)]
            self.keys = np.array([0], dtype=np.int64)
            self.divisors = np.zeros(0, dtype=np.int64)
            self.orb = np.zeros((0, 1), dtype=np.int32)
            return
        divs = [g for g in _divisors(N) if g < N]
        orb = np.full((len(divs), N), -1, dtype=np.int32)
        reps: list[tuple[int, int]] = [(0, 1)]
        ar = np.arange(N, dtype=np.int64)
        for j, g in enumerate(divs):
            if g == 1:
                orb[0] = ar
                reps.extend((1, v) for v in range(N))
                continue
            h = N // g
            valid = np.gcd(ar, g) == 1
            stab = [t for t in range(1, N, h) if math.gcd(t, N) == 1]
            row = orb[j]
            for v in range(N):
                if valid[v] and row[v] < 0:
                    reps.append((g, v))
                    for t in stab:
                        row[v * t % N] = v
        self.reps = reps
        self.keys = np.array([u * N + v for u, v in reps], dtype=np.int64)
        self.divisors = np.array(divs, dtype=np.int64)
        self.orb = orb

    def __len__(self) -> int:
        return len(self.reps)

    def normalize(self, c: int, d: int) -> tuple[int, int]:
        """Canonical representative of (c:d)."""
        i = self.index(c, d)
        return self.reps[i]

    def index(self, c: int, d: int) -> int:
        if self.N == 1:
            return 0
        key = _fast.p1_key(self.N, c % self.N, d % self.N, self.divisors, self.orb)
        if key < 0:
            raise NotProjectivePoint(f"({c}:{d}) is not a point of P^1(Z/{self.N})")
        return int(_fast.key_index(self.keys, key))


def p1_normalize(c: int, d: int, p1: P1Index | int) -> int:
    """Index of the canonical representative of (c:d)."""
    if isinstance(p1, int):
        p1 = P1Index(p1)
    return p1.index(c, d)


_X_CACHE: dict[int, np.ndarray] = {}


def heilbronn_set(n: int) -> np.ndarray:
    """Merel's set X_n of integer matrices of determinant n, as rows
    (a, b, c, d); T_n acts on Manin symbols by summing right translates.
    """
    if n not in _X_CACHE:
        rows = []
        for a in range(1, n + 1):
            for d in range((n + a - 1) // a, n + 2 - a):
                bc = a * d - n
                if bc == 0:
                    rows.extend((a, b, 0, d) for b in range(a))
                    rows.extend((a, 0, c, d) for c in range(1, d))
                else:
                    for b in range((bc - 1) // (d - 1) + 1, a):
                        if bc % b == 0:
                            rows.append((a, b, bc // b, d))
        _X_CACHE[n] = np.array(rows, dtype=np.int64)
    return _X_CACHE[n]


class ManinSpace:
    """The quotient of F_p[P^1(Z/NZ)] by the Manin relations.

    gen_image maps each P^1 generator to its coordinate row in F_p^dim;
    star is the involution induced by (c:d) -> (-c:d), with rows giving
    the coordinates of star applied to each free generator.
    """

    def __init__(self, N: int, p: int, p1: P1Index, gen_image: csr_matrix, star: csr_matrix):
        self.N = N
        self.p = p
        self.p1 = p1
        self.gen_image = gen_image
        self.star = star
        self.dim = gen_image.shape[1]
        self._free_points: np.ndarray | None = None
        self._hecke: dict[int, HeckeOp] = {}

    def free_points(self) -> np.ndarray:
        """(dim, 2) array: for each basis index j, a P^1 point mapping to e_j."""
        if self._free_points is None:
            pts = np.full((self.dim, 2), -1, dtype=np.int64)
            need = self.dim
            G = self.gen_image
            for i in range(G.shape[0]):
                lo, hi = G.indptr[i], G.indptr[i + 1]
                if hi - lo == 1 and G.data[lo] == 1:
                    j = G.indices[lo]
                    if pts[j, 0] < 0:
                        pts[j] = self.p1.reps[i]
                        need -= 1
                        if need == 0:
                            break
            assert need == 0, "basis reconstruction failed"
            self._free_points = pts
        return self._free_points

    def eval_path(self, a: int, n: int) -> np.ndarray:
        """Coordinates of the class of {oo, a/n}; depends only on a mod n."""
        if n < 1:
            raise NotReducedFraction("denominator must be positive")
        if math.gcd(a, n) != 1:
            raise NotReducedFraction(f"{a}/{n} is not in lowest terms")
        if self.N == 1 or self.dim == 0:
            return np.zeros(self.dim, dtype=np.int64)
        out = np.empty(2 * int(n).bit_length() + 4, dtype=np.int64)
        cnt = _fast.path_symbol_indices(
            self.N, a % n, n, self.p1.divisors, self.p1.orb, self.p1.keys, out
        )
        vec = np.asarray(self.gen_image[out[:cnt]].sum(axis=0)).ravel()
        return vec % self.p

    def apply_star_path(self, vec: np.ndarray) -> np.ndarray:
        """Star action on row coordinates of a path class (v -> v @ star)."""
        return np.asarray(self.star.T @ vec).ravel() % self.p

    def y_p1(self, phi: np.ndarray) -> np.ndarray:
        """Values of the functional phi at every P^1 generator."""
        return np.asarray(self.gen_image @ phi).ravel() % self.p

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(f"MSPACEv1 {self.N} {self.p} {self.dim}\n")
            for mat in (self.gen_image, self.star):
                for i in range(mat.shape[0]):
                    lo, hi = mat.indptr[i], mat.indptr[i + 1]
                    fh.write(
                        " ".join(
                            f"({int(c)}: {int(v)})"
                            for c, v in zip(mat.indices[lo:hi], mat.data[lo:hi])
                        )
                        + "\n"
                    )

    @classmethod
    def load(cls, path) -> "ManinSpace":
        with open(path) as fh:
            head = fh.readline().split()
            if len(head) != 4 or head[0] != "MSPACEv1":
                raise ValueError(f"{path} is not an MSPACEv1 file")
            N, p, dim = int(head[1]), int(head[2]), int(head[3])
            p1 = P1Index(N)
            mats = []
            for nrows in (len(p1), dim):
                rows, cols, vals = [], [], []
                for i in range(nrows):
                    line = fh.readline().strip()
                    if not line:
                        continue
                    for chunk in line.split(")"):
                        chunk = chunk.strip().lstrip("(")
                        if not chunk:
                            continue
                        cstr, vstr = chunk.split(":")
                        rows.append(i)
                        cols.append(int(cstr))
                        vals.append(int(vstr))
                mats.append(
                    coo_matrix(
                        (vals, (rows, cols)), shape=(nrows, dim), dtype=np.int64
                    ).tocsr()
                )
        return cls(N, p, p1, mats[0], mats[1])


def build_space(N: int, p: int) -> ManinSpace:
    """Manin symbol space for Gamma_0(N) over F_p."""
    if p == 2 or not is_prime(p):
        raise InvalidPrime(f"{p} is not an odd prime")
    if N % p == 0:
        raise BadResidueCharacteristic(f"p = {p} divides the level {N}")
    p1 = P1Index(N)
    M = len(p1)
    if N == 1:
        # the lone generator is sigma-fixed, so it dies in odd characteristic
        G = csr_matrix((1, 0), dtype=np.int64)
        return ManinSpace(N, p, p1, G, csr_matrix((0, 0), dtype=np.int64))

    cs = np.array([c for c, _ in p1.reps], dtype=np.int64)
    ds = np.array([d for _, d in p1.reps], dtype=np.int64)
    args = (N, p1.divisors, p1.orb, p1.keys)
    sig = _fast.batch_index(ds, -cs, *args)
    tau = _fast.batch_index(ds, -cs - ds, *args)
    sta = _fast.batch_index(-cs, ds, *args)

    idx = np.arange(M)
    dead = sig == idx
    rep = np.minimum(idx, sig)
    sgn = np.where(idx <= sig, 1, -1)

    rows: list[dict[int, int]] = []
    visited = np.zeros(M, dtype=bool)
    for i in range(M):
        if visited[i]:
            continue
        t1 = int(tau[i])
        t2 = int(tau[t1])
        orbit = (i, t1, t2)
        visited[i] = visited[t1] = visited[t2] = True
        row: dict[int, int] = {}
        for m in orbit:
            if not dead[m]:
                r = int(rep[m])
                row[r] = (row.get(r, 0) + int(sgn[m])) % p
        row = {c: v for c, v in row.items() if v}
        if row:
            rows.append(row)

    pivots, pivrows = sparse_rref(rows, M, p)
    pivset = set(pivots)
    repcols = sorted(set(int(rep[i]) for i in range(M) if not dead[i]))
    free = [c for c in repcols if c not in pivset]
    pos = {c: j for j, c in enumerate(free)}
    dim = len(free)

    gr, gc, gv = [], [], []
    for i in range(M):
        if dead[i]:
            continue
        r, s = int(rep[i]), int(sgn[i])
        if r in pos:
            gr.append(i)
            gc.append(pos[r])
            gv.append(s % p)
        else:
            for f, w in pivrows[r].items():
                if f == r:
                    continue
                gr.append(i)
                gc.append(pos[f])
                gv.append(-s * w % p)
    G = coo_matrix((gv, (gr, gc)), shape=(M, dim), dtype=np.int64).tocsr()
    star = G[sta[np.array(free, dtype=np.int64)]].copy()
    return ManinSpace(N, p, p1, G, star)


@dataclass
class HeckeOp:
    """T_ell on the quotient; row j holds the coordinates of T(basis_j)."""

    ell: int
    mat: csr_matrix


def hecke_matrix(space: ManinSpace, ell: int) -> HeckeOp:
    """T_ell as a dim x dim matrix over F_p; requires ell prime, ell ∤ N."""
    if ell in space._hecke:
        return space._hecke[ell]
    if not is_prime(ell):
        raise InvalidPrime(f"{ell} is not prime")
    if space.N % ell == 0:
        raise UseAtkinLehnerPath(f"{ell} divides the level; use u_matrix for U_q")
    X = heilbronn_set(ell)
    pts = space.free_points()
    rows, cols = _fast.hecke_coo(
        np.ascontiguousarray(pts[:, 0]),
        np.ascontiguousarray(pts[:, 1]),
        X,
        space.N,
        space.p1.divisors,
        space.p1.orb,
        space.p1.keys,
    )
    A = coo_matrix(
        (np.ones(len(rows), dtype=np.int64), (rows, cols)),
        shape=(space.dim, len(space.p1)),
    ).tocsr()
    mat = A @ space.gen_image
    mat.data %= space.p
    mat.eliminate_zeros()
    op = HeckeOp(ell, mat)
    space._hecke[ell] = op
    return op


def _lift_to_coprime(c: int, d: int, N: int) -> tuple[int, int]:
    """Lift (c:d) in P^1(Z/NZ) to coprime integers congruent mod N."""
    c %= N
    d %= N
    if c == 0:
        return 0, 1
    while math.gcd(c, d) != 1:
        d += N
    return c, d


def _u_coo(space: ManinSpace, q: int, pts: np.ndarray) -> csr_matrix:
    """Coefficient matrix of U_q applied to the Manin symbols in pts.

    Row j holds the signed counts, over P^1 generators, of the path sum
    sum_{t mod q} { (g0 + t)/q, (goo + t)/q } where {g0, goo} is the path
    of the symbol pts[j].  Valid for any prime q dividing the level: the
    single-coset decomposition of U_q has representatives [[1, t], [0, q]].
    """
    rows: list[int] = []
    cols: list[int] = []
    vals: list[int] = []
    buf = np.empty(256, dtype=np.int64)
    p1 = space.p1
    for j in range(pts.shape[0]):
        c, d = _lift_to_coprime(int(pts[j, 0]), int(pts[j, 1]), space.N)
        g, a, mb = xgcd(d, c)
        assert g == 1
        b = -mb  # a*d - b*c = 1, so the symbol is the path {b/d, a/c}
        for t in range(q):
            for num, den, sgn in ((a + t * c, q * c, 1), (b + t * d, q * d, -1)):
                if den == 0:
                    continue  # the cusp oo is fixed by z -> (z + t)/q
                gg = math.gcd(abs(num), abs(den))
                num //= gg
                den //= gg
                if den < 0:
                    num, den = -num, -den
                cnt = _fast.path_symbol_indices(
                    space.N, num % den, den, p1.divisors, p1.orb, p1.keys, buf
                )
                for idx in buf[:cnt]:
                    rows.append(j)
                    cols.append(int(idx))
                    vals.append(sgn)
    return coo_matrix(
        (vals, (rows, cols)), shape=(pts.shape[0], len(p1)), dtype=np.int64
    ).tocsr()


def u_matrix(space: ManinSpace, q: int) -> HeckeOp:
    """U_q as a dim x dim matrix over F_p; requires q prime, q | N."""
    if -q in space._hecke:
        return space._hecke[-q]
    if not is_prime(q):
        raise InvalidPrime(f"{q} is not prime")
    assert space.N % q == 0, f"{q} does not divide the level; use hecke_matrix"
    A = _u_coo(space, q, space.free_points())
    mat = A @ space.gen_image
    mat.data %= space.p
    mat.eliminate_zeros()
    op = HeckeOp(q, mat)
    space._hecke[-q] = op
    return op
