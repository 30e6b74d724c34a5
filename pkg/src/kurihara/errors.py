"""Stable error types raised across the package.

Each class name doubles as a machine-readable error code; the CLI prints
them verbatim with a remediation hint where one exists.
"""


class KuriharaError(Exception):
    """Base class for all package errors."""


# finite field / tables

class InvalidPrime(KuriharaError):
    pass


class NotAUnit(KuriharaError):
    pass


class RamifiedModulus(KuriharaError):
    pass


class ExtensionTooLarge(KuriharaError):
    pass


# modular symbol space

class NotProjectivePoint(KuriharaError):
    pass


class BadResidueCharacteristic(KuriharaError):
    pass


class UseAtkinLehnerPath(KuriharaError):
    """Raised for a good-prime Hecke operator invoked at ell | N; the
    single-coset operator u_matrix handles those primes."""


class NotReducedFraction(KuriharaError):
    pass


# eigenspace cutting

class EigensystemNotFound(KuriharaError):
    pass


class MultiplicityFailure(KuriharaError):
    pass


class NotAnEigenfunctional(KuriharaError):
    pass


# form / curve data

class BadReductionPrime(KuriharaError):
    pass


class InsufficientLocalData(KuriharaError):
    pass


class ScanBudgetExceeded(KuriharaError):
    pass


# Kurihara numbers and derivatives

class NotKolyvagin(KuriharaError):
    pass


class ModulusTooLarge(KuriharaError):
    pass


class FactorNotInModulus(KuriharaError):
    pass


class OracleViolation(KuriharaError):
    pass


# Mazur-Tate elements

class NotOrdinary(KuriharaError):
    pass


class LayerMismatch(KuriharaError):
    pass


class NotFoundWithinBound(KuriharaError):
    pass
