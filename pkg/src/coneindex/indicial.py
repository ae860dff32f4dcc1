"""Indicial roots of the cone Jacobi operator and the asymptotic spectrum.

Homogeneous Jacobi fields ``r^gamma * phi_j`` on an ``n``-cone exist exactly
when ``gamma^2 + (n-2) gamma - mu_j = 0`` with ``mu_j = lambda_j + (n-1)``.
Exact (``Fraction``) eigenvalues give exact real parts whenever the
discriminant is a rational square.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Real
from typing import Sequence

from .constants import TOLERANCES
from .errors import TruncationError
from .spectra import LinkSpectrum

MERGE_CONVENTION = (
    "real parts within root_merge are merged; multiplicity counts characteristic "
    "roots algebraically (complex pairs and repeated roots contribute 2 per eigenfunction)"
)


class RootCase(str, Enum):
    REAL_DISTINCT = "real_distinct"
    LOG_DOUBLE = "log_double"
    COMPLEX_PAIR = "complex_pair"


def _exact_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    a, b = q.numerator, q.denominator
    ra, rb = math.isqrt(a), math.isqrt(b)
    if ra * ra == a and rb * rb == b:
        return Fraction(ra, rb)
    return None


def _sqrt(x: Real) -> Real:
    if isinstance(x, Fraction):
        r = _exact_sqrt(x)
        if r is not None:
            return r
    return math.sqrt(float(x))


@dataclass(frozen=True)
class IndicialRoot:
    """The pair ``gamma^±`` attached to one eigenvalue ``lam`` of the link.

    ``re_plus``/``re_minus`` are exact when possible; ``imag`` is the
    (non-negative) imaginary part of ``gamma_plus``.
    """

    lam: Real
    mu: Real
    n: int
    re_plus: Real
    re_minus: Real
    imag: float
    case_tag: RootCase
    eigen_multiplicity: int = 1
    near_log: bool = False  # float input within tolerance of the repeated-root case

    @property
    def gamma_plus(self) -> complex:
        return complex(float(self.re_plus), self.imag)

    @property
    def gamma_minus(self) -> complex:
        return complex(float(self.re_minus), -self.imag)

    def real_parts(self) -> list[tuple[Real, int]]:
        """Real parts with algebraic multiplicity per eigenfunction."""
        if self.case_tag is RootCase.REAL_DISTINCT:
            return [(self.re_minus, 1), (self.re_plus, 1)]
        return [(self.re_plus, 2)]


def solve_indicial(mu: Real, n: int, eigen_multiplicity: int = 1, *,
                   lam: Real | None = None,
                   log_tol: float = TOLERANCES["log_case"]) -> IndicialRoot:
    """Roots of ``gamma^2 + (n-2) gamma - mu = 0``."""
    if lam is None:
        lam = mu - (n - 1)
    centre = Fraction(-(n - 2), 2)
    disc = centre * centre + mu
    exact = isinstance(disc, Fraction)
    if exact and disc == 0:
        return IndicialRoot(lam, mu, n, centre, centre, 0.0, RootCase.LOG_DOUBLE,
                            eigen_multiplicity)
    if abs(float(disc)) <= log_tol * (1 + abs(float(mu))):
        return IndicialRoot(lam, mu, n, centre, centre, 0.0, RootCase.LOG_DOUBLE,
                            eigen_multiplicity, near_log=not exact)
    if disc > 0:
        s = _sqrt(disc)
        return IndicialRoot(lam, mu, n, centre + s, centre - s, 0.0,
                            RootCase.REAL_DISTINCT, eigen_multiplicity)
    return IndicialRoot(lam, mu, n, centre, centre, math.sqrt(-float(disc)),
                        RootCase.COMPLEX_PAIR, eigen_multiplicity)


def indicial_roots(spec: LinkSpectrum, *,
                   log_tol: float = TOLERANCES["log_case"]) -> list[IndicialRoot]:
    """One :class:`IndicialRoot` per listed eigenvalue, in eigenvalue order."""
    return [solve_indicial(e.value + (spec.n - 1), spec.n, e.multiplicity,
                           lam=e.value, log_tol=log_tol)
            for e in spec.eigenvalues]


def completeness_window(cutoff: Real, n: int) -> tuple[Real, Real]:
    """Open interval of real parts guaranteed complete given an eigenvalue cutoff.

    Unlisted eigenvalues satisfy ``lambda >= cutoff``; their ``gamma^+`` is at
    least ``gamma^+(cutoff)`` and ``gamma^-`` at most ``gamma^-(cutoff)``, as
    long as ``cutoff`` lies in the real-root range.  Otherwise the window is
    empty (both ends at ``-(n-2)/2``).
    """
    r = solve_indicial(cutoff + (n - 1), n, log_tol=0.0)
    if r.case_tag is not RootCase.REAL_DISTINCT:
        return r.re_plus, r.re_plus
    return r.re_minus, r.re_plus


@dataclass(frozen=True)
class AsymptoticSpectrum:
    """Merged real parts of indicial roots with crossing multiplicities."""

    n: int
    entries: tuple[tuple[Real, int], ...]
    gamma_minus_of_cone: Real
    complete_below: Real
    complete_above: Real
    merge_convention: str = MERGE_CONVENTION

    @property
    def gamma_star_low(self) -> int:
        return -(self.n - 1)

    @property
    def gamma_star_high(self) -> int:
        return 1

    @property
    def window(self) -> tuple[Real, Real]:
        return self.complete_below, self.complete_above

    def in_window(self, x: float) -> bool:
        return self.complete_below < x < self.complete_above

    def multiplicity_at(self, rho: float, tol: float = TOLERANCES["root_merge"]) -> int:
        return sum(m for v, m in self.entries if abs(float(v) - rho) <= tol)

    def crossing(self, a: float, b: float) -> int:
        """Total multiplicity of entries strictly between ``a`` and ``b``."""
        lo, hi = min(a, b), max(a, b)
        return sum(m for v, m in self.entries if lo < v < hi)

    def distance(self, x: float) -> float:
        return min((abs(float(v) - x) for v, _ in self.entries), default=math.inf)


def merge_real_parts(parts: Sequence[tuple[Real, int]],
                     tol: float = TOLERANCES["root_merge"]) -> list[tuple[Real, int]]:
    merged: list[list] = []
    for value, mult in sorted(parts, key=lambda vm: float(vm[0])):
        if merged and abs(float(value) - float(merged[-1][0])) <= tol:
            merged[-1][1] += mult
        else:
            merged.append([value, mult])
    return [(v, m) for v, m in merged]


def asymptotic_spectrum(roots: Sequence[IndicialRoot], n: int, cutoff: Real, *,
                        merge_tol: float = TOLERANCES["root_merge"]) -> AsymptoticSpectrum:
    """Aggregate roots into ``Gamma(C)`` and certify ``gamma_-(C)``.

    ``gamma_-`` is the largest entry below 1; it is certified only when every
    real part in ``(gamma_-, 1]`` is known, i.e. the completeness window
    reaches 1 and ``gamma_-`` itself lies inside it.
    """
    parts = []
    for r in roots:
        if r.n != n:
            raise ValueError(f"root computed for n={r.n}, expected n={n}")
        parts.extend((v, m * r.eigen_multiplicity) for v, m in r.real_parts())
    entries = merge_real_parts(parts, merge_tol)
    lo, hi = completeness_window(cutoff, n)
    if not hi >= 1:
        raise TruncationError(
            f"cannot certify gamma_-: completeness window ({float(lo):.6g}, {float(hi):.6g}) "
            "does not reach 1 (need cutoff >= 0)")
    below = [v for v, _ in entries if v < 1 - merge_tol and v > lo]
    if not below:
        raise TruncationError(
            "cannot certify gamma_-: no indicial real part below 1 inside the completeness window")
    return AsymptoticSpectrum(n=n, entries=tuple(entries), gamma_minus_of_cone=max(below),
                              complete_below=lo, complete_above=hi)


def cone_asymptotics(spec: LinkSpectrum, *, log_tol: float = TOLERANCES["log_case"],
                     merge_tol: float = TOLERANCES["root_merge"]) -> AsymptoticSpectrum:
    return asymptotic_spectrum(indicial_roots(spec, log_tol=log_tol), spec.n, spec.cutoff,
                               merge_tol=merge_tol)


def index_contribution_test(root: IndicialRoot) -> bool:
    """Whether the eigenvalue contributes to the Morse index.

    Evaluates ``lambda < 0`` and ``Re gamma^+ < 1`` separately (the latter
    from a fresh complex square root) and insists that they agree.
    """
    negative = root.lam < 0
    half = (root.n - 2) / 2
    g_plus = -half + cmath.sqrt(half * half + float(root.mu))
    if root.case_tag is RootCase.REAL_DISTINCT and isinstance(root.re_plus, Fraction):
        below = root.re_plus < 1
    else:
        below = g_plus.real < 1
    if negative != below:
        raise ArithmeticError(
            f"index-contribution mismatch at lambda={root.lam}: Re gamma+={g_plus.real!r}")
    return negative
