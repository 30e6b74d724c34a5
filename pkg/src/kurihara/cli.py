"""Command-line driver: the full verification pipeline and its pieces.

Subcommands mirror the library layers: `verify` runs conditions, the
eigenspace cut, prime and delta scans, and the theta-layer scan, then
prints a verdict; the rest expose the individual stages.  All reports are
deterministic byte-for-byte for a fixed configuration and cache state;
timing chatter goes to stderr only.

Exit codes: 0 = criterion met, 2 = scans exhausted their budget without a
conclusion, 1 = an error or a failed hypothesis.
"""

import argparse
import os
import sys
import time
from dataclasses import dataclass

from .eigen import EigenData, cut_eigenfunctional
from .errors import KuriharaError
from .formdata import (
    INCONCLUSIVE,
    ConditionsReport,
    CurveSpec,
    KolyvaginPrime,
    conditions_report,
    data_from_curve,
    scan_kolyvagin_primes,
)
from .fp_linalg import factorize, find_primitive_root, is_prime
from .knumber import KuriharaReport, derivative_oracle, kurihara_number, scan_delta
from .manin import ManinSpace, build_space
from .mazur_tate import FOUND, MuScanReport, mu_scan, project_to_layer, stabilize_theta, theta_plus

# the oracle-pinned conventions, recorded in every report: coefficients sit
# at exponent +a, and sigma_eta raises zeta to the eta-th power
CONVENTION_LINE = "CONVENTION exponent=+a artin=eta star=+1"

REMEDIATION = {
    "MultiplicityFailure": "supply more eigenvalue data (additional good-prime a_ell or bad-prime a_q entries)",
    "EigensystemNotFound": "an imposed eigenvalue is inconsistent; re-check the supplied a_ell",
    "InsufficientLocalData": "add the missing local data (bad-prime a_q or more a_ell) to the input",
    "ModulusTooLarge": "use fewer or smaller Kolyvagin primes per modulus",
    "ExtensionTooLarge": "pick n with a smaller multiplicative order of p (oracle use only)",
    "ScanBudgetExceeded": "raise --start/--count limits or extend the search cap",
    "NotOrdinary": "a_p = 0 mod p: the direct (non-stabilized) theta scan applies",
}


def _add_source(sp):
    sp.add_argument("--curve", help="CURVEv1 file")
    sp.add_argument("--eigdata", help="EIGSv1 file")
    sp.add_argument("--curve-ainv", help="inline a1,a2,a3,a4,a6")
    sp.add_argument("--conductor", type=int, help="level N for --curve-ainv")
    sp.add_argument("--p", type=int, help="odd residue characteristic")


def _add_output(sp):
    sp.add_argument("--cache-dir", default=os.environ.get("KURIHARA_CACHE"))
    sp.add_argument("--out", help="also write the report to this file")
    sp.add_argument("--format", choices=("table", "lines"), default="table")


def resolve_source(args) -> tuple[EigenData, CurveSpec | None]:
    """Exactly one input source; returns eigendata plus the curve if given."""
    picked = [s for s in (args.curve, args.eigdata, args.curve_ainv) if s]
    if len(picked) != 1:
        raise SystemExit("exactly one of --curve, --eigdata, --curve-ainv is required")
    if args.eigdata:
        data = EigenData.load(args.eigdata)
        if args.p is not None and args.p != data.p:
            raise SystemExit(f"--p {args.p} conflicts with the file's p = {data.p}")
        return data, None
    if args.p is None or not is_prime(args.p) or args.p == 2:
        raise SystemExit("--p must be an odd prime for curve input")
    if args.curve:
        curve = CurveSpec.load(args.curve)
    else:
        if args.conductor is None:
            raise SystemExit("--curve-ainv requires --conductor")
        ainv = tuple(int(t) for t in args.curve_ainv.split(","))
        if len(ainv) != 5:
            raise SystemExit("--curve-ainv needs five integers a1,a2,a3,a4,a6")
        curve = CurveSpec(f"custom-{args.conductor}", args.conductor, ainv)
    return data_from_curve(curve, args.p), curve


def cached_space(N: int, p: int, cache_dir: str | None) -> ManinSpace:
    """Build the Manin symbol space, reusing a cache file when possible."""
    path = None
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        path = os.path.join(cache_dir, f"space_N{N}_p{p}.txt")
        if os.path.exists(path):
            return ManinSpace.load(path)
    t0 = time.perf_counter()
    space = build_space(N, p)
    print(f"built space N={N} p={p} in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    if path:
        space.save(path)
    return space


def emit(lines: list[str], out_path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)


def _canonical_factors(n: int) -> list[KolyvaginPrime]:
    """Kolyvagin-prime carriers for the prime factors of a squarefree n."""
    if n == 1:
        return []
    fac = factorize(n)
    assert all(e == 1 for e in fac.values()), "modulus must be squarefree"
    return [KolyvaginPrime(ell, find_primitive_root(ell)) for ell in sorted(fac)]


def _delta_rows(reports: list[KuriharaReport], fmt: str) -> list[str]:
    if fmt == "lines":
        return [rep.machine_line() for rep in reports]
    rows = [f"{'n':>12}  {'factors':>14}  {'etas':>10}  {'value':>6}  verdict"]
    for rep in reports:
        ells = "*".join(str(kp.ell) for kp in rep.factors) or "1"
        etas = ",".join(str(kp.eta) for kp in rep.factors) or "-"
        verdict = "nonzero" if rep.nonzero else "zero"
        rows.append(f"{rep.n:>12}  {ells:>14}  {etas:>10}  {rep.value:>6}  {verdict}")
    return rows


@dataclass
class VerdictReport:
    """Everything cmd_verify concluded, with the conventions that produced it."""

    conditions: ConditionsReport
    conditions_N: int
    primes: list[KolyvaginPrime]
    deltas: list[KuriharaReport]
    theta: MuScanReport | None
    verdict: str
    cut_primes: list[int]
    bad_primes: list[int]

    def first_nonzero(self) -> KuriharaReport | None:
        for rep in self.deltas:
            if rep.nonzero:
                return rep
        return None

    def render(self, fmt: str) -> list[str]:
        c = self.conditions
        out = [f"VERIFYv1 label={c.label} N={self.conditions_N} p={c.p}"]
        out += c.lines()
        out.append(CONVENTION_LINE)
        out.append(
            "CUT good={} bad={}".format(
                ",".join(map(str, self.cut_primes)) or "-",
                ",".join(map(str, self.bad_primes)) or "-",
            )
        )
        for kp in self.primes:
            out.append(f"KPRIMEv1 ell={kp.ell} eta={kp.eta}")
        out += _delta_rows(self.deltas, fmt)
        hit = self.first_nonzero()
        if hit is not None:
            out.append(f"CONDITION Tam2 discharged by delta_{hit.n} != 0")
        else:
            out.append("CONDITION Tam2 not discharged (no nonzero delta)")
        if self.theta is not None:
            t = self.theta
            if t.ordinary:
                out.append(f"THETAS kind=stabilized status={t.status} first_r={t.first_r}")
            else:
                out.append(
                    f"THETAS kind=direct status={t.status} "
                    f"first_odd={t.first_odd} first_even={t.first_even}"
                )
        out.append(f"VERDICT {self.verdict}")
        return out


def cmd_verify(args) -> int:
    data, curve = resolve_source(args)
    cond = conditions_report(data, curve=curve, assert_im=args.assert_im)
    report = VerdictReport(
        conditions=cond,
        conditions_N=data.N,
        primes=[],
        deltas=[],
        theta=None,
        verdict="CriterionNotMetWithinBudget",
        cut_primes=sorted(data.eigs),
        bad_primes=sorted(data.bad),
    )
    if not (cond.na_ok and cond.tam1_ok):
        report.verdict = "HypothesisFailure"
        emit(report.render(args.format), args.out)
        return 1
    space = cached_space(data.N, data.p, args.cache_dir)
    t0 = time.perf_counter()
    fn = cut_eigenfunctional(space, data)
    print(f"cut eigenfunctional in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    report.primes = scan_kolyvagin_primes(
        data, curve if curve is not None else fn, count=args.count, start=args.start
    )
    t0 = time.perf_counter()
    report.deltas = scan_delta(
        fn, report.primes, max_factors=args.max_factors, first_hit=args.first_hit
    )
    print(f"delta scan in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    report.theta = mu_scan(fn, r_max=args.rmax)
    met = (
        report.first_nonzero() is not None
        and cond.im_status != INCONCLUSIVE
        and report.theta.status == FOUND
    )
    report.verdict = "CriterionMet" if met else "CriterionNotMetWithinBudget"
    emit(report.render(args.format), args.out)
    return 0 if met else 2


def cmd_delta(args) -> int:
    data, curve = resolve_source(args)
    space = cached_space(data.N, data.p, args.cache_dir)
    fn = cut_eigenfunctional(space, data)
    rep = kurihara_number(fn, _canonical_factors(args.n))
    emit(_delta_rows([rep], args.format), args.out)
    return 0


def cmd_theta(args) -> int:
    data, curve = resolve_source(args)
    space = cached_space(data.N, data.p, args.cache_dir)
    fn = cut_eigenfunctional(space, data)
    scan = mu_scan(fn, r_max=args.rmax)
    p = data.p
    lines = []
    for r in range(1, args.rmax + 1):
        if scan.ordinary:
            layer = project_to_layer(stabilize_theta(fn, r + 1), r)
        else:
            layer = project_to_layer(theta_plus(fn, p ** (r + 1)), r)
        lines.append(layer.machine_line())
    lines += scan.lines()
    emit(lines, args.out)
    return 0 if scan.status == FOUND else 2


def cmd_scan_primes(args) -> int:
    data, curve = resolve_source(args)
    if curve is None:
        space = cached_space(data.N, data.p, args.cache_dir)
        source = cut_eigenfunctional(space, data)
    else:
        source = curve
    kps = scan_kolyvagin_primes(data, source, count=args.count, start=args.start)
    if args.format == "lines":
        emit([f"KPRIMEv1 ell={kp.ell} eta={kp.eta}" for kp in kps], args.out)
    else:
        emit(["kolyvagin primes: " + ", ".join(str(kp.ell) for kp in kps)], args.out)
    return 0


def cmd_build_space(args) -> int:
    if not args.cache_dir:
        raise SystemExit("build-space requires --cache-dir (or KURIHARA_CACHE)")
    space = cached_space(args.conductor, args.p, args.cache_dir)
    path = os.path.join(args.cache_dir, f"space_N{args.conductor}_p{args.p}.txt")
    emit([f"MSPACEv1 N={space.N} p={space.p} dim={space.dim} path={path}"], args.out)
    return 0


def cmd_oracle(args) -> int:
    data, curve = resolve_source(args)
    space = cached_space(data.N, data.p, args.cache_dir)
    fn = cut_eigenfunctional(space, data)
    oracle, delta = derivative_oracle(fn, _canonical_factors(args.n))
    equal = int(oracle == delta)
    emit([f"ORACLEv1 n={args.n} oracle={oracle} delta={delta} equal={equal}"], args.out)
    return 0 if equal else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kurihara",
        description="verify the Kurihara-number nonvanishing criterion for weight-2 newforms",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify", help="full pipeline: conditions, cut, scans, verdict")
    _add_source(sp)
    _add_output(sp)
    sp.add_argument("--count", type=int, default=5, help="Kolyvagin primes to scan")
    sp.add_argument("--start", type=int, default=3)
    sp.add_argument("--max-factors", type=int, default=2)
    sp.add_argument("--first-hit", action="store_true")
    sp.add_argument("--rmax", type=int, default=4)
    sp.add_argument("--assert-im", action="store_true",
                    help="accept an externally verified large-image condition")
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("delta", help="one Kurihara number at modulus --n")
    _add_source(sp)
    _add_output(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(fn=cmd_delta)

    sp = sub.add_parser("theta", help="theta layers and the mu-scan verdict")
    _add_source(sp)
    _add_output(sp)
    sp.add_argument("--rmax", type=int, default=4)
    sp.set_defaults(fn=cmd_theta)

    sp = sub.add_parser("scan-primes", help="list Kolyvagin primes")
    _add_source(sp)
    _add_output(sp)
    sp.add_argument("--count", type=int, default=5)
    sp.add_argument("--start", type=int, default=3)
    sp.set_defaults(fn=cmd_scan_primes)

    sp = sub.add_parser("build-space", help="build and cache a Manin symbol space")
    sp.add_argument("--conductor", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    _add_output(sp)
    sp.set_defaults(fn=cmd_build_space)

    sp = sub.add_parser("oracle", help="derivative-oracle cross-check at modulus --n")
    _add_source(sp)
    _add_output(sp)
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(fn=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except KuriharaError as exc:
        code = type(exc).__name__
        print(f"error {code}: {exc}", file=sys.stderr)
        hint = REMEDIATION.get(code)
        if hint:
            print(f"hint: {hint}", file=sys.stderr)
        return 1
    except AssertionError as exc:
        print(f"error PreconditionFailed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
