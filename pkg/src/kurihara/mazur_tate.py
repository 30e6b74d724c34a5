"""Mazur-Tate elements mod p, p-stabilization, and layer nonvanishing scans.

theta_plus(fn, m) is the group-ring element sum_a [a/m]^+ sigma_a over the
plus quotient (Z/mZ)^*/{+-1}.  For m = p^r these form a tower linked by the
projection pi (restriction of automorphisms) and the norm nu (transfer to
the full fiber); pi o nu multiplies by the fiber degree, so over F_p it is
zero once the fiber degree is p.

For an ordinary form the unit root alpha of X^2 - a_p X + p reduces to a_p
mod p, so the stabilized element

    theta_stab_r = a_p^{-r} (theta_{p^r} - a_p^{-1} nu(theta_{p^{r-1}}))

makes sense over F_p and is projection-compatible along the tower.  Its
image in the layer Q_r (degree p^r, cut out of Q(mu_{p^{r+1}}) by killing
the Teichmueller part) is the quantity whose nonvanishing the mu-scan
hunts; non-ordinary forms scan the unstabilized images instead, at odd and
even layers separately.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _fast
from .errors import LayerMismatch, NotOrdinary
from .eigen import EigenFunctional
from .fp_linalg import inv_mod

NOT_FOUND_WITHIN_BOUND = "NotFoundWithinBound"
FOUND = "Found"


def _plus_reps(m: int) -> np.ndarray:
    """Canonical representatives a <= m/2 of (Z/mZ)^*/{+-1}, ascending."""
    if m == 1:
        return np.array([0], dtype=np.int64)
    return np.array(
        [a for a in range(1, m // 2 + 1) if math.gcd(a, m) == 1], dtype=np.int64
    )


@dataclass
class MTElement:
    """F_p-valued function on (Z/mZ)^*/{+-1}, the mod-p Mazur-Tate carrier."""

    m: int
    p: int
    reps: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.int64) % self.p
        assert self.reps.shape == self.coeffs.shape
        assert np.array_equal(self.reps, _plus_reps(self.m))

    def class_index(self, a: int) -> int:
        """Index of the class of a in the reps order; a must be a unit."""
        b = a % self.m
        b = min(b, self.m - b) if self.m > 1 else 0
        i = int(np.searchsorted(self.reps, b))
        assert i < self.reps.shape[0] and self.reps[i] == b, f"{a} is not a unit"
        return i

    def is_zero(self) -> bool:
        return not self.coeffs.any()


def theta_plus(fn: EigenFunctional, m: int) -> MTElement:
    """theta^+ at modulus m: coefficient [a/m]^+ on the class of a.

    Requires gcd(m, N) = 1; m may share factors with p (the layer towers
    use m = p^r).
    """
    assert m >= 1 and math.gcd(m, fn.space.N) == 1, (
        "modulus must be coprime to the level"
    )
    sp = fn.space
    reps = _plus_reps(m)
    coeffs = np.zeros(reps.shape[0], dtype=np.int64)
    y = fn.y
    for i, a in enumerate(reps):
        if m == 1:
            coeffs[i] = fn.path_value(0, 1)
        else:
            coeffs[i] = _fast.path_value(
                sp.N, int(a), m, sp.p1.divisors, sp.p1.orb, sp.p1.keys, y, sp.p
            )
    return MTElement(m, sp.p, reps, coeffs)


def project_down(x: MTElement, m_to: int) -> MTElement:
    """pi: restriction along (Z/mZ)^*/+-1 -> (Z/m_to Z)^*/+-1, summing fibers."""
    assert m_to >= 1 and x.m % m_to == 0
    reps = _plus_reps(m_to)
    coeffs = np.zeros(reps.shape[0], dtype=np.int64)
    for i, b in enumerate(x.reps):
        c = int(b) % m_to
        c = min(c, m_to - c) if m_to > 1 else 0
        coeffs[int(np.searchsorted(reps, c))] += x.coeffs[i]
    return MTElement(m_to, x.p, reps, coeffs % x.p)


def nu_lift(x: MTElement, m_to: int) -> MTElement:
    """nu: the norm (transfer), sending sigma_a to the sum of its lifts."""
    assert m_to % x.m == 0
    reps = _plus_reps(m_to)
    coeffs = np.array(
        [x.coeffs[x.class_index(int(b) % x.m)] for b in reps], dtype=np.int64
    )
    return MTElement(m_to, x.p, reps, coeffs)


def convolve(x: MTElement, y: MTElement) -> MTElement:
    """Group-ring product in F_p[(Z/mZ)^*/{+-1}]."""
    assert x.m == y.m and x.p == y.p
    out = np.zeros(x.reps.shape[0], dtype=np.int64)
    for i, a in enumerate(x.reps):
        if not x.coeffs[i]:
            continue
        for j, b in enumerate(y.reps):
            out[x.class_index(int(a) * int(b))] += x.coeffs[i] * y.coeffs[j]
    return MTElement(x.m, x.p, x.reps, out % x.p)


@dataclass
class LayerElement:
    """F_p-valued function on Gal(Q_r/Q) = Z/p^r (exponents of 1 + p)."""

    r: int
    p: int
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.int64) % self.p
        assert self.coeffs.shape == (self.p**self.r,)

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def machine_line(self) -> str:
        return "THETAv1 layer={} coeffs={}".format(
            self.r, ",".join(str(int(c)) for c in self.coeffs)
        )

    def convolve(self, other: "LayerElement") -> "LayerElement":
        assert self.r == other.r and self.p == other.p
        size = self.p**self.r
        out = np.zeros(size, dtype=np.int64)
        for i in range(size):
            if self.coeffs[i]:
                idx = (np.arange(size) + i) % size
                out[idx] += self.coeffs[i] * other.coeffs
        return LayerElement(self.r, self.p, out % self.p)


def project_to_layer(x: MTElement, r: int) -> LayerElement:
    """Image in the layer Q_r: kill the Teichmueller part of (Z/p^{r+1})^*.

    Every unit factors as omega(a) * (1+p)^e with omega(a) = a^{p^r} the
    Teichmueller lift; the class of a goes to the exponent e and fibers sum.
    """
    p = x.p
    if x.m != p ** (r + 1):
        raise LayerMismatch(f"element lives at {x.m}, expected p^{r + 1} = {p ** (r + 1)}")
    pr1 = p ** (r + 1)
    size = p**r
    exp_of = {pow(1 + p, e, pr1): e for e in range(size)}
    out = np.zeros(size, dtype=np.int64)
    for i, a in enumerate(x.reps):
        omega = pow(int(a), size, pr1)
        out[exp_of[int(a) * inv_mod(omega, pr1) % pr1]] += x.coeffs[i]
    return LayerElement(r, p, out % p)


def stabilize_theta(fn: EigenFunctional, r: int, ap: int | None = None) -> MTElement:
    """The p-stabilized element at p^r for an ordinary form.

    ap defaults to the stored Fourier coefficient; it must be a unit mod p
    (the unit root alpha is congruent to a_p, which justifies computing the
    alpha-scaled element entirely over F_p).
    """
    assert r >= 1
    p = fn.space.p
    ap = fn.data.ap if ap is None else ap
    if ap % p == 0:
        raise NotOrdinary(f"a_p = {ap} is not a unit mod {p}")
    apinv = inv_mod(ap, p)
    top = theta_plus(fn, p**r)
    below = nu_lift(theta_plus(fn, p ** (r - 1)), p**r)
    coeffs = pow(apinv, r, p) * (top.coeffs - apinv * below.coeffs) % p
    return MTElement(top.m, p, top.reps, coeffs)


@dataclass
class MuScanReport:
    """Outcome of the layer nonvanishing scan."""

    ordinary: bool
    r_max: int
    first_r: int | None = None
    first_odd: int | None = None
    first_even: int | None = None

    @property
    def status(self) -> str:
        if self.ordinary:
            return FOUND if self.first_r is not None else NOT_FOUND_WITHIN_BOUND
        ok = self.first_odd is not None and self.first_even is not None
        return FOUND if ok else NOT_FOUND_WITHIN_BOUND

    def lines(self) -> list[str]:
        kind = "stabilized" if self.ordinary else "direct"
        out = [f"theta scan ({kind} elements), layers 1..{self.r_max}: {self.status}"]
        if self.ordinary:
            if self.first_r is not None:
                out.append(f"  first nonvanishing layer: r = {self.first_r}")
        else:
            out.append(f"  first nonvanishing odd layer:  r = {self.first_odd}")
            out.append(f"  first nonvanishing even layer: r = {self.first_even}")
        return out


def mu_scan(
    fn: EigenFunctional,
    ap: int | None = None,
    ordinary: bool | None = None,
    r_max: int = 4,
) -> MuScanReport:
    """Scan layers r = 1..r_max for nonvanishing theta images.

    Ordinary: first r with the layer image of the stabilized element at
    p^{r+1} nonzero.  Non-ordinary: the unstabilized layer images, tracked
    at odd and even r separately.  The search is bounded; a miss is an
    explicit inconclusive status, never an exception.
    """
    assert r_max >= 1
    p = fn.space.p
    ap = fn.data.ap if ap is None else ap
    if ordinary is None:
        ordinary = ap % p != 0
    rep = MuScanReport(ordinary=ordinary, r_max=r_max)
    for r in range(1, r_max + 1):
        if ordinary:
            layer = project_to_layer(stabilize_theta(fn, r + 1, ap), r)
            if not layer.is_zero():
                rep.first_r = r
                return rep
        else:
            layer = project_to_layer(theta_plus(fn, p ** (r + 1)), r)
            if not layer.is_zero():
                if r % 2 and rep.first_odd is None:
                    rep.first_odd = r
                if r % 2 == 0 and rep.first_even is None:
                    rep.first_even = r
                if rep.first_odd is not None and rep.first_even is not None:
                    return rep
    return rep
