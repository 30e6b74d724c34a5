"""Elliptic curve input data, Frobenius sampling, and criterion conditions.

A curve is given by its a-invariants and conductor (the conductor is an
input, not computed; a reduction-type spot check guards against typos).
Point counts provide the Hecke eigenvalues a_ell; the three hypothesis
checks (non-anomalous a_p, trivial-Tamagawa product, big residual image)
consume them.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    BadReductionPrime,
    InsufficientLocalData,
    InvalidPrime,
    ScanBudgetExceeded,
)
from .eigen import EigenData, EigenFunctional, eigenvalue_readback
from .fp_linalg import factorize, find_primitive_root, is_prime

PROVED_SURJECTIVE = "ProvedSurjective"
ASSERTED_BY_USER = "AssertedByUser"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class CurveSpec:
    """An elliptic curve y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""

    label: str
    N: int
    a_invariants: tuple[int, int, int, int, int]

    def __post_init__(self):
        assert self.N >= 1
        assert len(self.a_invariants) == 5
        assert self.discriminant() != 0, "the Weierstrass equation is singular"
        for q in factorize(self.N):
            assert self.discriminant() % q == 0, (
                f"{q} divides the stated conductor but not the discriminant"
            )

    def b_invariants(self) -> tuple[int, int, int, int]:
        a1, a2, a3, a4, a6 = self.a_invariants
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b_invariants()
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("CURVEv1\n")
            fh.write(f"label={self.label}\n")
            fh.write(f"N={self.N}\n")
            fh.write("a_invariants=" + ",".join(str(a) for a in self.a_invariants) + "\n")

    @classmethod
    def load(cls, path) -> "CurveSpec":
        with open(path) as fh:
            if fh.readline().strip() != "CURVEv1":
                raise ValueError(f"{path} is not a CURVEv1 file")
            head = {}
            for line in fh:
                name, _, val = line.strip().partition("=")
                if name:
                    head[name] = val
        return cls(
            label=head["label"],
            N=int(head["N"]),
            a_invariants=tuple(int(a) for a in head["a_invariants"].split(",")),
        )


def ap_pointcount(curve: CurveSpec, ell: int) -> int:
    """a_ell = ell + 1 - #E(F_ell) for a prime ell of good reduction.

    For odd ell the count sums Legendre symbols of the completed cubic
    4x^3 + b2 x^2 + 2 b4 x + b6 (see Silverman III.2); ell = 2 is done by
    exhaustive enumeration. The Hasse bound is asserted on the result.
    """
    assert is_prime(ell), f"{ell} is not prime"
    assert curve.N % ell != 0, f"{ell} divides the conductor; use bad_ap"
    if curve.discriminant() % ell == 0:
        raise BadReductionPrime(
            f"the given model of {curve.label or 'the curve'} is singular mod {ell}"
        )
    a1, a2, a3, a4, a6 = curve.a_invariants
    if ell == 2:
        cnt = sum(
            (y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)) % 2 == 0
            for x in range(2)
            for y in range(2)
        )
        a = 2 + 1 - (cnt + 1)
    else:
        b2, b4, b6, _ = curve.b_invariants()
        xs = np.arange(ell, dtype=np.int64)
        x2 = xs * xs % ell
        x3 = x2 * xs % ell
        rhs = (4 * x3 + (b2 % ell) * x2 + (2 * b4 % ell) * xs + b6 % ell) % ell
        sq = np.zeros(ell, dtype=bool)
        sq[x2] = True
        chi = np.where(rhs == 0, 0, np.where(sq[rhs], 1, -1))
        a = -int(chi.sum())
    assert a * a <= 4 * ell, f"Hasse bound violated at {ell}: a = {a}"
    return a


def bad_ap(curve: CurveSpec, q: int) -> int:
    """a_q = q - #E^sm(F_q) for a prime q dividing the conductor.

    Counts the smooth points of the reduced Weierstrass model (including
    the point at infinity): +1/-1 for split/nonsplit multiplicative
    reduction, 0 for additive. Exhaustive in q, so a bound is enforced.
    """
    assert is_prime(q), f"{q} is not prime"
    assert curve.N % q == 0, f"{q} does not divide the conductor; use ap_pointcount"
    if q > 2000:
        raise InsufficientLocalData(
            f"bad-prime count at {q} exceeds the enumeration bound"
        )
    a1, a2, a3, a4, a6 = curve.a_invariants
    smooth = 1  # the point at infinity
    for x in range(q):
        for y in range(q):
            if (y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)) % q:
                continue
            dy = (2 * y + a1 * x + a3) % q
            dx = (3 * x * x + 2 * a2 * x + a4 - a1 * y) % q
            if dy or dx:
                smooth += 1
    return q - smooth


def data_from_curve(curve: CurveSpec, p: int, ell_max: int = 100) -> EigenData:
    """Assemble EigenData for the curve mod p from point counts."""
    if not is_prime(p) or p == 2:
        raise InvalidPrime(f"{p} is not an odd prime")
    eigs = {}
    ell = 2
    while ell <= ell_max:
        if curve.N % ell != 0:
            eigs[ell] = ap_pointcount(curve, ell) % p
        ell = _next_prime(ell)
    if curve.N % p != 0 and p not in eigs:
        eigs[p] = ap_pointcount(curve, p) % p
    bad = {q: bad_ap(curve, q) for q in factorize(curve.N)}
    ap = eigs[p] if curve.N % p != 0 else bad[p]
    return EigenData(
        N=curve.N, p=p, eigs=eigs, ap=ap, psi_p=1, label=curve.label, bad=bad
    )


def _next_prime(n: int) -> int:
    n += 1
    while not is_prime(n):
        n += 1
    return n


def check_NA(data: EigenData) -> bool:
    """Condition (NA): a_p is neither 1 nor psi(p) mod p."""
    p = data.p
    return data.ap % p != 1 % p and data.ap % p != data.psi_p % p


def check_Tam1(data: EigenData, bad_aq: dict[int, int] | None = None) -> tuple[bool, int]:
    """First Tamagawa-type condition: p does not divide the product
    of (q - 1) over q || N with a_q = 1 and (q + 1) over those with
    a_q = -1. Returns (verdict, product).
    """
    aq = dict(data.bad)
    if bad_aq:
        aq.update(bad_aq)
    product = 1
    for q, e in factorize(data.N).items():
        if e != 1:
            continue
        if q not in aq:
            raise InsufficientLocalData(
                f"a_{q} is needed for the Tamagawa product but was not supplied"
            )
        assert aq[q] in (1, -1), (
            f"a_{q} = {aq[q]}: a prime exactly dividing N is multiplicative"
        )
        product *= q - aq[q]
    return product % data.p != 0, product


@dataclass(frozen=True)
class KolyvaginPrime:
    """A prime ell with ell ≡ 1, a_ell ≡ ell + 1 ≡ 2 mod p, and a chosen
    primitive root eta used as the discrete-logarithm base mod ell."""

    ell: int
    eta: int


def is_kolyvagin_prime(ell: int, data: EigenData, a_ell: int | None = None) -> bool:
    """The four defining conditions against the given eigensystem."""
    p = data.p
    if not is_prime(ell) or ell == 2:
        return False
    if data.N % ell == 0 or ell == p:
        return False
    if ell % p != 1:
        return False
    if a_ell is None:
        if ell not in data.eigs:
            raise InsufficientLocalData(f"a_{ell} is not available")
        a_ell = data.eigs[ell]
    # psi(ell) = 1 automatically: only the trivial character is supported
    return (a_ell - ell - 1) % p == 0


def scan_kolyvagin_primes(
    data: EigenData,
    source: CurveSpec | EigenFunctional,
    count: int,
    start: int = 3,
    max_ell: int = 100000,
) -> list[KolyvaginPrime]:
    """The first `count` Kolyvagin primes >= start, in increasing order.

    a_ell comes from point counting when source is a curve and from
    eigenvalue readback when source is a cut functional. Raises
    ScanBudgetExceeded when the search cap is hit first.
    """
    assert count >= 1
    p = data.p
    found: list[KolyvaginPrime] = []
    # candidates must be 1 mod p, so step through that progression
    ell = start + (1 - start) % p
    if ell < 2 * p + 1:
        ell = 2 * p + 1
    for ell in range(ell, max_ell + 1, p):
        if not is_prime(ell) or data.N % ell == 0:
            continue
        if ell in data.eigs:
            a = data.eigs[ell]
        elif isinstance(source, CurveSpec):
            a = ap_pointcount(source, ell)
        else:
            a = eigenvalue_readback(source, ell)
        if is_kolyvagin_prime(ell, data, a):
            found.append(KolyvaginPrime(ell, find_primitive_root(ell)))
            if len(found) == count:
                return found
    raise ScanBudgetExceeded(
        f"found {len(found)} of {count} Kolyvagin primes below {max_ell}"
    )


def check_Im_heuristic(
    curve: CurveSpec,
    p: int,
    sample_bound: int = 1000,
    assert_surjective: bool = False,
) -> str:
    """One-sided residual-image check by Frobenius sampling.

    For p >= 5, eliminates every proper-subgroup family of GL_2(F_p)
    (Borel, normalizers of split/nonsplit Cartan, exceptional projective
    image) from traces a_ell and determinants ell mod p; if all are
    eliminated the image contains SL_2(F_p) and ProvedSurjective is
    returned. Never claims non-surjectivity: anything short of full
    elimination is Inconclusive. For p = 3 the classification shortcut
    is unavailable and the user assertion path is the only positive one.
    """
    if not is_prime(p) or p == 2:
        raise InvalidPrime(f"{p} is not an odd prime")
    if assert_surjective:
        return ASSERTED_BY_USER
    if p == 3:
        return INCONCLUSIVE

    sq = {(x * x) % p for x in range(1, p)}
    borel_killed = False
    split_seen = False  # nonzero trace, nonzero square discriminant
    nonsplit_seen = False  # nonzero trace, nonsquare discriminant
    exceptional_killed = False
    dets: set[int] = set()
    ell = 2
    while ell <= sample_bound:
        if curve.N % ell != 0 and ell != p:
            a = ap_pointcount(curve, ell) % p
            d = (a * a - 4 * ell) % p
            dets.add(ell % p)
            if d != 0 and d not in sq:
                borel_killed = True
                if a != 0:
                    nonsplit_seen = True
            if d != 0 and d in sq and a != 0:
                split_seen = True
            u = a * a * pow(ell, p - 2, p) % p
            if d != 0 and u not in (0, 1, 2, 4) and (u * u - 3 * u + 1) % p != 0:
                exceptional_killed = True
        ell = _next_prime(ell)
    # det(rho) is the cyclotomic character; its image must be all of F_p^x
    det_full = _generates_units(dets, p)
    if borel_killed and split_seen and nonsplit_seen and exceptional_killed and det_full:
        return PROVED_SURJECTIVE
    return INCONCLUSIVE


def _generates_units(vals: set[int], p: int) -> bool:
    got = {1}
    frontier = [1]
    while frontier:
        x = frontier.pop()
        for v in vals:
            y = x * v % p
            if y not in got:
                got.add(y)
                frontier.append(y)
    return len(got) == p - 1


@dataclass
class ConditionsReport:
    """Hypothesis checks feeding the final verdict."""

    p: int
    label: str
    na_ok: bool
    tam1_ok: bool
    tam_product: int
    im_status: str
    ap: int

    def lines(self) -> list[str]:
        return [
            f"CONDITION NA {'ok' if self.na_ok else 'FAIL'} ap={self.ap % self.p}",
            f"CONDITION Tam1 {'ok' if self.tam1_ok else 'FAIL'} product={self.tam_product}",
            f"CONDITION Im {self.im_status}",
        ]


def conditions_report(
    data: EigenData,
    curve: CurveSpec | None = None,
    assert_im: bool = False,
    sample_bound: int = 1000,
) -> ConditionsReport:
    """Run (NA), the Tamagawa product, and the image check together."""
    bad_aq = None
    if curve is not None and not data.bad:
        bad_aq = {q: bad_ap(curve, q) for q, e in factorize(curve.N).items() if e == 1}
    tam_ok, product = check_Tam1(data, bad_aq)
    if curve is not None:
        im = check_Im_heuristic(curve, data.p, sample_bound, assert_im)
    else:
        im = ASSERTED_BY_USER if assert_im else INCONCLUSIVE
    return ConditionsReport(
        p=data.p,
        label=data.label,
        na_ok=check_NA(data),
        tam1_ok=tam_ok,
        tam_product=product,
        im_status=im,
        ap=data.ap,
    )
