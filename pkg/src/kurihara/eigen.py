"""Mod-p eigensystem data and cut-out eigenfunctionals.

An eigenfunctional is a linear functional phi on the weight-2 Manin
symbol space over F_p that is a simultaneous eigenvector for the Hecke
operators (phi(T_ell x) = a_ell phi(x)) and fixed by the star involution.
It is determined up to a unit in F_p^x by finitely many eigenvalues once
the joint eigenspace is one-dimensional.
"""

import math

from dataclasses import dataclass, field

import numpy as np

from . import _fast
from .errors import (
    EigensystemNotFound,
    InvalidPrime,
    MultiplicityFailure,
    NotAnEigenfunctional,
    NotReducedFraction,
    UseAtkinLehnerPath,
)
from .fp_linalg import dense_kernel, inv_mod, is_prime, kernel_basis_csr
from .manin import ManinSpace, _u_coo, heilbronn_set


@dataclass
class EigenData:
    """Hecke eigenvalue data mod p for one newform of level N.

    eigs maps good primes ell (coprime to N) to a_ell mod p.  ap is the
    T_p eigenvalue mod p (also listed in eigs when p does not divide N),
    psi_p the nebentypus value at p (1 for trivial character).  bad maps
    primes q exactly dividing N to the U_q eigenvalue, which is +1 or -1
    for multiplicative reduction; it is optional and only consulted by
    the Tamagawa-factor check.
    """

    N: int
    p: int
    eigs: dict[int, int]
    ap: int
    psi_p: int = 1
    label: str = ""
    bad: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        assert is_prime(self.p) and self.p > 2, "p must be an odd prime"
        for ell in self.eigs:
            assert is_prime(ell), f"eigenvalue index {ell} is not prime"
            assert self.N % ell != 0, f"{ell} divides the level"
        for q in self.bad:
            assert is_prime(q), f"bad prime {q} is not prime"
            assert self.N % q == 0, f"{q} does not divide the level"

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("EIGSv1\n")
            fh.write(f"N={self.N}\n")
            fh.write(f"p={self.p}\n")
            fh.write(f"ap={self.ap}\n")
            fh.write(f"psi_p={self.psi_p}\n")
            fh.write(f"label={self.label}\n")
            for ell in sorted(self.eigs):
                fh.write(f"{ell} {self.eigs[ell]}\n")
            for q in sorted(self.bad):
                fh.write(f"bad {q} {self.bad[q]}\n")

    @classmethod
    def load(cls, path) -> "EigenData":
        with open(path) as fh:
            if fh.readline().strip() != "EIGSv1":
                raise ValueError(f"{path} is not an EIGSv1 file")
            head = {}
            for key in ("N", "p", "ap", "psi_p", "label"):
                name, _, val = fh.readline().strip().partition("=")
                if name != key:
                    raise ValueError(f"expected {key}= line in {path}")
                head[key] = val
            eigs: dict[int, int] = {}
            bad: dict[int, int] = {}
            for line in fh:
                parts = line.split()
                if not parts:
                    continue
                if parts[0] == "bad":
                    bad[int(parts[1])] = int(parts[2])
                else:
                    eigs[int(parts[0])] = int(parts[1])
        return cls(
            N=int(head["N"]),
            p=int(head["p"]),
            eigs=eigs,
            ap=int(head["ap"]),
            psi_p=int(head["psi_p"]),
            label=head["label"],
            bad=bad,
        )


class EigenFunctional:
    """A star-fixed Hecke eigenfunctional phi on a Manin symbol space."""

    def __init__(self, space: ManinSpace, data: EigenData, phi: np.ndarray, sign: int = 1):
        assert space.N == data.N and space.p == data.p
        self.space = space
        self.data = data
        self.phi = np.asarray(phi, dtype=np.int64) % space.p
        self.sign = sign
        self._y: np.ndarray | None = None
        self._eig_cache: dict[int, int] = {}

    @property
    def y(self) -> np.ndarray:
        """Values of phi at every P^1 generator, indexed like p1.keys."""
        if self._y is None:
            self._y = self.space.y_p1(self.phi)
        return self._y

    def path_value(self, a: int, n: int) -> int:
        """phi applied to the class of the path {oo, a/n}.

        Requires gcd(a, n) = 1; no coprimality with N or p is imposed,
        so this is also usable for theta coefficients at powers of p.
        """
        if n < 1:
            raise NotReducedFraction("denominator must be positive")
        if math.gcd(a, n) != 1:
            raise NotReducedFraction(f"{a}/{n} is not in lowest terms")
        sp = self.space
        if sp.N == 1 or sp.dim == 0:
            return 0
        return int(
            _fast.path_value(
                sp.N, a % n, n, sp.p1.divisors, sp.p1.orb, sp.p1.keys, self.y, sp.p
            )
        )


def modsym_value(fn: EigenFunctional, a: int, n: int) -> int:
    """The modular symbol value [a/n] mod p for n coprime to N*p."""
    assert n >= 1 and math.gcd(n, fn.space.N * fn.space.p) == 1, (
        "modulus must be coprime to the level and to p"
    )
    return fn.path_value(a, n)


def _star_rows(space: ManinSpace, sign: int) -> list[dict[int, int]]:
    S = space.star
    p = space.p
    rows = []
    for j in range(space.dim):
        lo, hi = S.indptr[j], S.indptr[j + 1]
        row = {int(c): int(v) % p for c, v in zip(S.indices[lo:hi], S.data[lo:hi])}
        row[j] = (row.get(j, 0) - sign) % p
        rows.append({c: v for c, v in row.items() if v})
    return rows


def _hecke_rows_csr(space: ManinSpace, ell: int, pts: np.ndarray):
    """Sparse matrix of Heilbronn translate counts for the given points."""
    from scipy.sparse import coo_matrix

    X = heilbronn_set(ell)
    rows, cols = _fast.hecke_coo(
        np.ascontiguousarray(pts[:, 0]),
        np.ascontiguousarray(pts[:, 1]),
        X,
        space.N,
        space.p1.divisors,
        space.p1.orb,
        space.p1.keys,
    )
    return coo_matrix(
        (np.ones(len(rows), dtype=np.int64), (rows, cols)),
        shape=(pts.shape[0], len(space.p1)),
    ).tocsr()


def cut_eigenfunctional(
    space: ManinSpace,
    data: EigenData,
    cut_primes: list[int] | None = None,
    sign: int = 1,
) -> EigenFunctional:
    """Cut the joint eigenspace down to a line and return a functional.

    Intersects the sign-eigenspace of star with the a_ell eigenspaces of
    T_ell for ell in cut_primes (default: all primes in data.eigs, in
    increasing order), stopping as soon as the dimension reaches one.
    If the good primes run out at dimension >= 2 (an old congruent
    eigensystem at lower level shadows the form at every good prime),
    U_q eigenvalues from data.bad are used to finish the cut.  Raises
    EigensystemNotFound if some cut empties the space and
    MultiplicityFailure if all supplied data leaves dimension >= 2.
    """
    assert space.N == data.N and space.p == data.p, "space/data mismatch"
    p = space.p
    if space.dim == 0:
        raise EigensystemNotFound(f"the symbol space at level {space.N} is zero")

    if cut_primes is None:
        cut_primes = sorted(data.eigs)
    for ell in cut_primes:
        assert ell in data.eigs, f"no eigenvalue supplied for {ell}"
    schedule = [("T", ell, data.eigs[ell] % p) for ell in cut_primes]
    schedule += [("U", q, data.bad[q] % p) for q in sorted(data.bad)]

    # Star eigenspace first: its reduced echelon kernel basis B satisfies
    # B[free, :] = identity, and every later cut stays inside its column
    # span, so constraint rows only ever need to be evaluated at `free`.
    B, free = kernel_basis_csr(_star_rows(space, sign), space.dim, p)
    k = B.shape[1]
    if k == 0:
        raise EigensystemNotFound("star eigenspace is zero")
    pts_free = space.free_points()[free]
    R = None  # B[free, :]; None stands for the identity at the first cut
    used = []
    applied = 0

    for kind, ell, a in schedule:
        if k == 1:
            break
        applied += 1
        if kind == "T":
            A = _hecke_rows_csr(space, ell, pts_free)
        else:
            A = _u_coo(space, ell, pts_free)
        GB = space.gen_image @ B
        M = np.asarray((A @ GB).todense(), dtype=np.int64)
        if R is None:
            M[np.arange(k), np.arange(k)] -= a
        else:
            M -= a * R
        K = dense_kernel(M % p, p)
        used.append(f"{kind}_{ell}")
        if K.shape[1] == 0:
            raise EigensystemNotFound(
                f"no vector with {kind}_{ell} eigenvalue {a} mod {p} "
                "in the joint eigenspace"
            )
        from scipy.sparse import csr_matrix

        B = B @ csr_matrix(K)
        B.data %= p
        B.eliminate_zeros()
        R = K % p if R is None else (R @ K) % p
        k = B.shape[1]

    if k > 1:
        raise MultiplicityFailure(
            f"joint eigenspace still has dimension {k} after cutting at {used}; "
            "more eigenvalue data (further a_ell or bad-prime a_q) is needed"
        )
    phi = np.asarray(B.todense(), dtype=np.int64).ravel() % p
    j0 = int(np.nonzero(phi)[0][0])
    phi = (phi * inv_mod(int(phi[j0]), p)) % p
    fn = EigenFunctional(space, data, phi, sign)

    # A line that survived the applied cuts is invariant under every
    # remaining commuting operator, hence automatically an eigenvector;
    # what must still be checked is that its eigenvalues match the data.
    for kind, ell, a in schedule[applied:]:
        got = eigenvalue_readback(fn, ell) if kind == "T" else _u_readback(fn, ell)
        if got != a:
            raise EigensystemNotFound(
                f"the surviving line has {kind}_{ell} = {got}, expected {a}; "
                "wrong eigenvalues or wrong level"
            )
    return fn


def _u_readback(fn: EigenFunctional, q: int) -> int:
    """U_q eigenvalue of the functional, checked at every phi(x) != 0."""
    sp = fn.space
    p = sp.p
    nz = np.nonzero(fn.phi % p)[0]
    if len(nz) == 0:
        raise NotAnEigenfunctional("the zero functional has no eigenvalues")
    A = _u_coo(sp, q, sp.free_points()[nz])
    vals = np.asarray(A @ fn.y).ravel() % p
    ratios = {int(v * inv_mod(int(fn.phi[j]), p) % p) for v, j in zip(vals, nz)}
    if len(ratios) != 1:
        raise NotAnEigenfunctional(
            f"U_{q} ratios disagree ({sorted(ratios)}); phi is not an eigenvector"
        )
    return ratios.pop()


def eigenvalue_readback(fn: EigenFunctional, ell: int) -> int:
    """Recover a_ell mod p from the functional itself.

    Evaluates phi(T_ell x) / phi(x) at every basis point x with
    phi(x) != 0 and checks the ratios agree; raises NotAnEigenfunctional
    on any inconsistency.
    """
    sp = fn.space
    if not is_prime(ell):
        raise InvalidPrime(f"{ell} is not prime")
    if sp.N % ell == 0:
        raise UseAtkinLehnerPath(f"{ell} divides the level; use the U_{ell} operator")
    X = heilbronn_set(ell)
    pts = sp.free_points()
    p = sp.p
    y = fn.y
    ratio = -1
    for j in np.nonzero(fn.phi % p)[0]:
        val = _fast.hecke_apply_point(
            int(pts[j, 0]), int(pts[j, 1]), X, sp.N,
            sp.p1.divisors, sp.p1.orb, sp.p1.keys, y, p,
        )
        cand = val * inv_mod(int(fn.phi[j]), p) % p
        if ratio < 0:
            ratio = cand
        elif cand != ratio:
            raise NotAnEigenfunctional(
                f"T_{ell} ratios disagree ({ratio} vs {cand}); phi is not an eigenvector"
            )
    if ratio < 0:
        raise NotAnEigenfunctional("the zero functional has no eigenvalues")
    return int(ratio)
