"""Enumerate star-fixed Hecke eigenlines of a Manin symbol space.

When only a level, a residue characteristic, and a few eigenvalues of a
form are known, the rest of its mod-p eigensystem can be recovered from
the symbol space itself: impose the known (operator, eigenvalue) pairs as
kernel cuts, then branch over every residue for a list of fork operators.
Each surviving branch is a joint eigenspace; one-dimensional branches are
candidate eigensystems whose remaining eigenvalues follow by readback.
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix

from .eigen import (
    EigenData,
    EigenFunctional,
    _hecke_rows_csr,
    _star_rows,
    _u_readback,
    eigenvalue_readback,
)
from .errors import ScanBudgetExceeded
from .fp_linalg import dense_kernel, factorize, inv_mod, is_prime, kernel_basis_csr
from .manin import ManinSpace, _u_coo


@dataclass
class Branch:
    """One branch of the search: the cuts applied so far and the basis.

    assignments maps ("T", ell) or ("U", q) to the eigenvalue imposed on
    this branch; basis columns span the corresponding joint eigenspace.
    A branch stops splitting once it reaches dimension one, so its
    assignment set is by itself enough to cut the line back out.
    """

    assignments: dict[tuple[str, int], int]
    basis: csr_matrix

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def phi(self, p: int) -> np.ndarray:
        """The normalized functional of a one-dimensional branch."""
        assert self.dim == 1, "branch is not a line"
        v = np.asarray(self.basis.todense(), dtype=np.int64).ravel() % p
        j0 = int(np.nonzero(v)[0][0])
        return (v * inv_mod(int(v[j0]), p)) % p


def enumerate_eigensystems(
    space: ManinSpace,
    imposed=(),
    fork=(),
    sign: int = 1,
    max_branches: int = 512,
) -> list[Branch]:
    """All joint eigenspaces compatible with the imposed eigenvalues.

    imposed is a sequence of (kind, ell, a) triples, kind "T" for a good
    prime or "U" for a prime dividing the level; each is applied as a
    single cut, and a branch that is emptied by it is dropped.  fork is a
    sequence of (kind, ell) pairs; each splits every branch of dimension
    at least two over all p candidate eigenvalues.  Branches stop
    refining at dimension one; stalled branches (still of dimension two
    or more after the whole schedule) are returned as-is, since they may
    be old or congruent eigensystems that the given operators never
    separate.
    """
    p = space.p
    B0, free = kernel_basis_csr(_star_rows(space, sign), space.dim, p)
    if B0.shape[1] == 0:
        return []
    pts_free = space.free_points()[free]

    schedule = [(kind, ell, (a % p,)) for kind, ell, a in imposed]
    schedule += [(kind, ell, tuple(range(p))) for kind, ell in fork]
    for kind, ell, _ in schedule:
        assert kind in ("T", "U"), f"unknown operator kind {kind!r}"
        assert (space.N % ell == 0) == (kind == "U"), (
            f"{kind}_{ell} does not match the level {space.N}"
        )

    # frontier entries are (branch, R) with R = branch.basis[free, :];
    # constraint rows only ever need evaluating at the original free rows
    frontier: list[tuple[Branch, np.ndarray | None]] = [(Branch({}, B0), None)]
    for kind, ell, candidates in schedule:
        if all(br.dim == 1 for br, _ in frontier):
            break
        if kind == "T":
            A = _hecke_rows_csr(space, ell, pts_free)
        else:
            A = _u_coo(space, ell, pts_free)
        nxt: list[tuple[Branch, np.ndarray | None]] = []
        for br, R in frontier:
            if br.dim == 1:
                nxt.append((br, R))
                continue
            GB = space.gen_image @ br.basis
            M0 = np.asarray((A @ GB).todense(), dtype=np.int64) % p
            for a in candidates:
                if R is None:
                    M = M0.copy()
                    M[np.arange(M.shape[0]), np.arange(M.shape[1])] -= a
                else:
                    M = M0 - a * R
                K = dense_kernel(M % p, p)
                if K.shape[1] == 0:
                    continue
                B = br.basis @ csr_matrix(K)
                B.data %= p
                B.eliminate_zeros()
                R2 = K % p if R is None else (R @ K) % p
                nxt.append((Branch({**br.assignments, (kind, ell): a}, B), R2))
        frontier = nxt
        if len(frontier) > max_branches:
            raise ScanBudgetExceeded(
                f"eigensystem search split into {len(frontier)} branches "
                f"(cap {max_branches}); impose more eigenvalues first"
            )
        del A
    return [br for br, _ in frontier]


def harvest_eigendata(
    space: ManinSpace,
    branch: Branch,
    label: str = "",
    good_bound: int = 100,
    sign: int = 1,
) -> EigenData:
    """Full eigenvalue data for a one-dimensional branch, by readback.

    Collects a_ell for every good prime ell < good_bound and the U_q
    eigenvalue for every prime q dividing the level, and merges in the
    branch's own assignments (so imposed large primes are kept without
    recomputation).  Raises NotAnEigenfunctional if the line is not a
    simultaneous eigenvector for some U_q, which is the typical signature
    of an oldform line.
    """
    p = space.p
    phi = branch.phi(p)
    stub = EigenData(N=space.N, p=p, eigs={}, ap=0, label=label)
    fn = EigenFunctional(space, stub, phi, sign)

    eigs = {ell: a for (kind, ell), a in branch.assignments.items() if kind == "T"}
    bad = {q: a for (kind, q), a in branch.assignments.items() if kind == "U"}
    for ell in range(2, good_bound):
        if is_prime(ell) and space.N % ell and ell not in eigs:
            eigs[ell] = eigenvalue_readback(fn, ell)
    for q in factorize(space.N):
        if q not in bad:
            bad[q] = _u_readback(fn, q)
    # a multiplicative U_q eigenvalue is the integer +1 or -1; store the
    # signed form so Tamagawa-type products use the true integer value
    for q, val in bad.items():
        if space.N % (q * q) != 0 and val % p == p - 1:
            bad[q] = -1
    assert space.N % p != 0, "p divides the level"
    if p not in eigs:
        eigs[p] = eigenvalue_readback(fn, p)
    return EigenData(
        N=space.N, p=p, eigs=eigs, ap=eigs[p], psi_p=1, label=label, bad=bad
    )


def looks_eisenstein(data: EigenData, count: int = 6) -> bool:
    """True when a_ell = ell + 1 mod p at the first `count` good primes.

    The boundary (Eisenstein) eigensystem has exactly these eigenvalues,
    so a line matching them is not usable as a newform fingerprint.
    """
    checked = 0
    for ell in sorted(data.eigs):
        if (data.eigs[ell] - ell - 1) % data.p != 0:
            return False
        checked += 1
        if checked >= count:
            break
    return checked > 0
