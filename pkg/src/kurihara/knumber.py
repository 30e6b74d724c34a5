"""Kurihara numbers delta_n and the Kolyvagin-derivative cross-check.

For a squarefree product n of Kolyvagin primes, the Kurihara number of an
eigenfunctional phi is

    delta_n = sum over a in (Z/nZ)^*  of  [a/n]^+ * prod_{ell | n} log_ell(a)

computed in F_p, with log_ell the discrete logarithm base a chosen
primitive root eta_ell, reduced mod p (well defined since ell = 1 mod p).
Changing eta_ell or rescaling phi multiplies delta_n by a unit, so only the
nonvanishing verdict is intrinsic.

The derivative oracle recomputes delta_n a second way: it forms the formal
sum x = sum_a [zeta^a] * [a/n]^+ over F_p, applies the Kolyvagin derivative
operators D_ell = sum_i i * sigma_eta^i, and evaluates at a root of unity
zeta_n in F_{p^k}.  For genuine Kolyvagin primes the trace terms
(a_ell - 2) * [0/1] vanish mod p, the value collapses into the prime field,
and it equals delta_n on the nose.  A value outside the prime field means a
convention or implementation bug, never rounding.
"""

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from . import _fast
from .errors import (
    FactorNotInModulus,
    ModulusTooLarge,
    NotKolyvagin,
    OracleViolation,
)
from .eigen import EigenFunctional, eigenvalue_readback, modsym_value
from .formdata import KolyvaginPrime, is_kolyvagin_prime
from .fp_linalg import DlogTable, build_ext_field, factorize, xgcd

_INT64_LIMIT = 1 << 63


@dataclass(frozen=True)
class KuriharaReport:
    """One computed delta_n with its provenance and verdict."""

    n: int
    factors: tuple[KolyvaginPrime, ...]
    value: int
    nonzero: bool
    seconds: float

    def __post_init__(self):
        prod = 1
        for kp in self.factors:
            prod *= kp.ell
        assert prod == self.n and self.nonzero == (self.value != 0)

    def machine_line(self) -> str:
        return f"DELTAv1 n={self.n} value={self.value} nonzero={int(self.nonzero)}"

    def table_row(self) -> str:
        ells = "*".join(str(kp.ell) for kp in self.factors) or "1"
        etas = ",".join(str(kp.eta) for kp in self.factors) or "-"
        return (
            f"{self.n:>12}  {ells:>14}  {etas:>10}  {self.value:>6}  "
            f"{'nonzero' if self.nonzero else 'zero':>7}  {self.seconds:8.3f}s"
        )


def _a_ell(fn: EigenFunctional, ell: int) -> int:
    """a_ell mod p from stored eigendata, else by operator readback."""
    a = fn.data.eigs.get(ell)
    if a is None:
        a = fn._eig_cache.get(ell)
    if a is None:
        a = eigenvalue_readback(fn, ell)
        fn._eig_cache[ell] = a
    return a % fn.space.p


def kurihara_number(
    fn: EigenFunctional, factors: list[KolyvaginPrime], tables: dict | None = None
) -> KuriharaReport:
    """delta_n for n the product of the given Kolyvagin primes.

    The empty factor list gives n = 1, where the empty log product makes
    delta_1 = [0/1]^+.  tables may map ell to a DlogTable overriding the
    base eta recorded on the factor (the eta-invariance tests use this);
    by default each factor's own eta is used.
    """
    t0 = time.perf_counter()
    ells = [kp.ell for kp in factors]
    assert len(set(ells)) == len(ells), "factors must be pairwise distinct"
    n = 1
    for ell in ells:
        n *= ell
        if n >= _INT64_LIMIT:
            raise ModulusTooLarge(f"modulus {n} exceeds the 2^63 loop budget")
    for kp in factors:
        # structural conditions first (a_ell = ell + 1 satisfies the
        # congruence vacuously): readback for a_ell only makes sense once
        # ell is known to be a good prime congruent to 1 mod p
        ok = is_kolyvagin_prime(kp.ell, fn.data, a_ell=kp.ell + 1) and (
            is_kolyvagin_prime(kp.ell, fn.data, a_ell=_a_ell(fn, kp.ell))
        )
        if not ok:
            raise NotKolyvagin(
                f"{kp.ell} fails the Kolyvagin conditions for p = {fn.space.p}"
            )
    sp = fn.space
    if n == 1:
        val = modsym_value(fn, 0, 1)
    else:
        logtab = np.zeros((len(factors), max(ells)), dtype=np.int64)
        for i, kp in enumerate(factors):
            tab = tables.get(kp.ell) if tables else None
            if tab is None:
                tab = DlogTable(kp.ell, kp.eta)
            assert tab.ell == kp.ell
            logtab[i, : kp.ell] = tab.table_mod_p(sp.p)
        val = int(
            _fast.delta_sum(
                sp.N,
                n,
                np.array(ells, dtype=np.int64),
                logtab,
                sp.p1.divisors,
                sp.p1.orb,
                sp.p1.keys,
                fn.y,
                sp.p,
                False,
            )
        )
    return KuriharaReport(
        n=n,
        factors=tuple(factors),
        value=val,
        nonzero=val != 0,
        seconds=time.perf_counter() - t0,
    )


def scan_delta(
    fn: EigenFunctional,
    primes: list[KolyvaginPrime],
    max_factors: int,
    first_hit: bool = False,
) -> list[KuriharaReport]:
    """delta_n for every squarefree product of at most max_factors primes.

    Order: n = 1 first, then singletons in the given prime order, then
    pairs lexicographically, and so on.  With first_hit the scan stops at
    the first nonzero value.
    """
    assert max_factors >= 1
    reports = []
    for k in range(0, max_factors + 1):
        for combo in itertools.combinations(primes, k):
            rep = kurihara_number(fn, list(combo))
            reports.append(rep)
            if first_hit and rep.nonzero:
                return reports
    return reports


@dataclass
class CyclotomicElem:
    """Formal F_p-combination sum_a coeffs[a] * [zeta^a] of n-th roots of unity.

    coeffs has length n, indexed by the exponent a mod n, and is supported
    on the units; the Galois group acts by permuting exponents.
    """

    n: int
    p: int
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.int64) % self.p
        assert self.coeffs.shape == (self.n,)
        for q in factorize(self.n):
            assert not self.coeffs[::q].any(), "coefficients must sit on units"


def galois_apply(x: CyclotomicElem, w: int) -> CyclotomicElem:
    """sigma_w: [zeta^a] -> [zeta^{a*w}] for a unit w mod n."""
    w %= x.n
    assert math.gcd(w, x.n) == 1
    out = np.zeros(x.n, dtype=np.int64)
    out[np.arange(x.n, dtype=np.int64) * w % x.n] = x.coeffs
    return CyclotomicElem(x.n, x.p, out)


def _artin_unit(n: int, ell: int, eta: int) -> int:
    """The unit w mod n acting as eta on the mu_ell part and trivially off it."""
    m = n // ell
    if m == 1:
        return eta % ell
    g, u, v = xgcd(ell, m)
    assert g == 1
    return (eta * v * m + u * ell) % n


def kolyvagin_derivative_apply(x: CyclotomicElem, factor: KolyvaginPrime) -> CyclotomicElem:
    """Apply D_ell = sum_{i=0}^{ell-2} i * sigma_eta^i at one prime factor.

    sigma_eta moves [zeta^a] to [zeta^{a*w}] with w = eta on the mu_ell
    component and w = 1 on the rest.
    """
    if x.n % factor.ell:
        raise FactorNotInModulus(f"{factor.ell} does not divide {x.n}")
    w = _artin_unit(x.n, factor.ell, factor.eta)
    out = np.zeros(x.n, dtype=np.int64)
    pos = np.arange(x.n, dtype=np.int64)
    for i in range(1, factor.ell - 1):
        pos = pos * w % x.n
        out[pos] += (i % x.p) * x.coeffs
    return CyclotomicElem(x.n, x.p, out % x.p)


def symbol_elem(fn: EigenFunctional, n: int) -> CyclotomicElem:
    """x = sum over units a of [a/n]^+ * [zeta^a], the derivative's input."""
    p = fn.space.p
    if n == 1:
        return CyclotomicElem(1, p, np.array([modsym_value(fn, 0, 1)]))
    coeffs = np.zeros(n, dtype=np.int64)
    for a in range(1, n):
        if math.gcd(a, n) == 1:
            coeffs[a] = fn.path_value(a, n)
    return CyclotomicElem(n, p, coeffs)


def derivative_oracle(
    fn: EigenFunctional,
    factors: list[KolyvaginPrime],
    tables: dict | None = None,
    k_bound: int = 64,
) -> tuple[int, int]:
    """Evaluate D_n(sum_a [zeta^a][a/n]) at zeta_n in F_{p^k} and pair it
    with delta_n; the two are equal when both computations are right.

    Brute force in the extension field, so only for small n (the degree
    k = ord_n(p) must stay within k_bound).  Raises OracleViolation if the
    evaluated derivative fails to land in the prime field, which for
    genuine Kolyvagin primes can only mean an implementation error.
    """
    rep = kurihara_number(fn, factors, tables)
    x = symbol_elem(fn, rep.n)
    for kp in factors:
        eta = tables[kp.ell].eta if tables and kp.ell in tables else kp.eta
        x = kolyvagin_derivative_apply(x, KolyvaginPrime(kp.ell, eta))
    ctx = build_ext_field(fn.space.p, rep.n, k_bound=k_bound)
    val = ctx.zeta_weighted_sum(x.coeffs)
    if not ctx.in_prime_field(val):
        raise OracleViolation(
            f"derivative value at n = {rep.n} left the prime field"
        )
    return int(val[0]) % fn.space.p, rep.value
