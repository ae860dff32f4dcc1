"""Annular growth functionals of Jacobi fields on a cone, the three-circle
inequality, the oscillatory integral behind it, the radial Euler ODE and an
asymptotic-rate estimator.

A Jacobi field is a finite sum of homogeneous modes; for the link eigenvalue
shifted to ``mu`` the radial profile is ``c_plus r^{g+} + c_minus r^{g-}``
(with ``r^{g} log r`` in the repeated-root case).  Link eigenfunctions are
taken orthonormal in ``L^2``, so the functional is a sum over modes.
"""
from __future__ import annotations

import cmath
import csv
import io
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from numbers import Real
from typing import Sequence

import numpy as np

from .constants import TOLERANCES
from .indicial import RootCase, solve_indicial

EXP_LIMIT = 700.0


class HypothesisWarning(UserWarning):
    """Evaluated outside the range where positivity is guaranteed."""


def _guard(exponent: float, what: str) -> None:
    if not exponent < EXP_LIMIT:
        raise OverflowError(f"{what}: exponent {exponent:.4g} exceeds {EXP_LIMIT}")


def _cexpm1(z: complex) -> complex:
    """``exp(z) - 1`` without cancellation for small ``|z|``."""
    x, y = z.real, z.imag
    em = math.expm1(x)
    return complex(em * math.cos(y) - 2.0 * math.sin(y / 2) ** 2, math.exp(x) * math.sin(y))


def _exp_window(z: complex, t0: float, L: float) -> complex:
    """``int_{t0}^{t0+L} exp(z t) dt``."""
    if z == 0:
        return complex(L)
    _guard(max(z.real * t0, z.real * (t0 + L)), "window integral")
    if abs(z * L) < 1e-8:
        return cmath.exp(z * t0) * L * (1 + z * L / 2)
    return cmath.exp(z * t0) * _cexpm1(z * L) / z


def _exp_second_difference(z: complex, t0: float, L: float) -> complex:
    """Second difference of ``s -> int_s^{s+L} exp(z t) dt`` at ``t0, t0+L, t0+2L``."""
    if z == 0:
        return 0j
    _guard(max(z.real * t0, z.real * (t0 + 3 * L)), "second difference")
    e = _cexpm1(z * L)
    return cmath.exp(z * t0) * e * e * e / z


# --------------------------------------------------------------------------
# oscillatory integral


@dataclass(frozen=True)
class OscParams:
    """Parameters of ``int_r^{Kr} cos^2(alpha log s + theta) s^{2 beta - 1} ds``."""

    alpha: float
    beta: float
    theta: float
    K: float
    r: float = 1.0
    sigma: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.K > 2:
            raise ValueError(f"K must exceed 2, got {self.K}")
        if not self.r > 0:
            raise ValueError(f"r must be positive, got {self.r}")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if self.beta == 0 or abs(self.beta) < self.sigma:
            raise ValueError(f"need |beta| >= sigma > 0 and beta != 0, got beta={self.beta}")


def _osc_window(alpha: float, beta: float, theta: float, L: float, t0: float) -> float:
    # cos^2 = (1 + cos 2x) / 2 in the log variable t = log s
    z = complex(2 * beta, 2 * alpha)
    return 0.5 * (_exp_window(complex(2 * beta), t0, L).real
                  + (cmath.exp(2j * theta) * _exp_window(z, t0, L)).real)


def _osc_second(alpha: float, beta: float, theta: float, L: float, t0: float) -> float:
    z = complex(2 * beta, 2 * alpha)
    return 0.5 * (_exp_second_difference(complex(2 * beta), t0, L).real
                  + (cmath.exp(2j * theta) * _exp_second_difference(z, t0, L)).real)


def osc_integral(p: OscParams) -> float:
    return _osc_window(p.alpha, p.beta, p.theta, math.log(p.K), math.log(p.r))


def osc_second_difference(p: OscParams) -> float:
    """``I(K^2 r) - 2 I(K r) + I(r)`` in closed form.

    Warns with :class:`HypothesisWarning` when ``K`` is below ``find_K0(sigma)``
    (or ``sigma`` is 0); the value is returned regardless.
    """
    if p.sigma <= 0 or p.sigma >= 1 or p.K < find_K0(p.sigma):
        warnings.warn(f"K={p.K} not certified for sigma={p.sigma}", HypothesisWarning,
                      stacklevel=2)
    return _osc_second(p.alpha, p.beta, p.theta, math.log(p.K), math.log(p.r))


# --------------------------------------------------------------------------
# K0 search

ALPHA_GRID = np.logspace(-3, 3, 61)
BETA_GRID = np.linspace(0.05, 10.0, 200)
THETA_GRID = np.linspace(0.0, math.pi, 16, endpoint=False)
K_RATIO = 1.05
K_START = 2.0
K_STEPS = 1000


def _beta_grid(sigma: float) -> np.ndarray:
    b = np.concatenate([[sigma], BETA_GRID[BETA_GRID > sigma]])
    return np.concatenate([b, -b])


def _worst_margin(K: np.ndarray, sigma: float) -> np.ndarray:
    """Minimum over the (alpha, beta) grid and over all phases of the
    normalised second difference, for each ``K``.

    With ``r = 1`` the second difference equals a positive factor times
    ``1 + Re(e^{i phi} (b'/b'') q^3)`` where ``b' = 2 beta``,
    ``b'' = b' + 2 i alpha``, ``q = 1 + (1 - e^{-2 i alpha L}) / (e^{b' L} - 1)``
    and ``phi`` absorbs ``theta``; its minimum over ``phi`` is
    ``1 - |b'/b''| |q|^3``, which bounds every finite ``theta`` grid from below.
    """
    L = np.log(np.asarray(K, float))[:, None, None]
    a2 = 2 * ALPHA_GRID[None, :, None]
    b2 = 2 * _beta_grid(sigma)[None, None, :]
    ratio = np.abs(b2 / (b2 + 1j * a2))
    with np.errstate(over="ignore", invalid="ignore"):
        q = 1 + (1 - np.exp(-1j * a2 * L)) / np.expm1(b2 * L)
        margin = 1 - ratio * np.abs(q) ** 3
    return np.nanmin(margin.reshape(margin.shape[0], -1), axis=1)


@lru_cache(maxsize=64)
def find_K0(sigma: float) -> float:
    """Smallest ``K = 2 * 1.05^m`` from which the oscillatory second difference
    is positive on the whole adversarial sample at every larger grid ``K``.

    The sample is ``alpha`` on a log grid in ``[1e-3, 1e3]``, ``|beta|`` in
    ``[sigma, 10]`` with both signs, every phase ``theta``, and ``r = 1``
    (the second difference at ``r`` is ``r^{2 beta}`` times the value at
    ``r = 1`` with ``theta`` shifted, so ``r = 1`` loses nothing).
    """
    sigma = float(sigma)
    if not 0 < sigma < 1:
        raise ValueError(f"sigma must lie in (0, 1), got {sigma}")
    Ks = K_START * K_RATIO ** np.arange(1, K_STEPS + 1)
    ok = _worst_margin(Ks, sigma) > 0
    if not ok[-1]:
        raise ArithmeticError(f"K grid exhausted at K={Ks[-1]:.4g} for sigma={sigma}")
    bad = np.flatnonzero(~ok)
    return float(Ks[bad[-1] + 1] if bad.size else Ks[0])


def k0_certificate(sigma: float) -> float:
    """Smallest grid ``K`` meeting the sufficient condition from the existence proof.

    With ``x = 2 beta log K`` (``beta > 0``) the condition chain is
    ``(|e^x - e^{-i a'K'}| / (e^x - 1))^6 <= 1 + 20 min(a'K', 1)^2 / (e^x - 1)``
    and ``20 min(a'K', 1)^2 / (e^x - 1) < (a'K')^2 / x^2``.
    """
    sigma = float(sigma)
    if not 0 < sigma < 1:
        raise ValueError(f"sigma must lie in (0, 1), got {sigma}")
    beta = _beta_grid(sigma)
    beta = beta[beta > 0]
    a2 = 2 * ALPHA_GRID[:, None]
    b2 = 2 * beta[None, :]
    for m in range(1, K_STEPS + 1):
        L = math.log(K_START * K_RATIO**m)
        x = b2 * L
        with np.errstate(over="ignore"):
            den = np.expm1(x)
            lhs6 = (np.abs(np.exp(x) - np.exp(-1j * a2 * L)) / den) ** 6
            mid = 20 * np.minimum(a2 * L, 1.0) ** 2 / den
        rhs = (a2 * L) ** 2 / x**2
        if np.all(lhs6 <= 1 + mid) and np.all(mid < rhs):
            return float(K_START * K_RATIO**m)
    raise ArithmeticError(f"certificate not reached on the K grid for sigma={sigma}")


# --------------------------------------------------------------------------
# Jacobi fields on a cone


@dataclass(frozen=True)
class Mode:
    mu: Real
    c_plus: complex
    c_minus: complex


@dataclass(frozen=True)
class GrowthField:
    n: int
    modes: tuple[Mode, ...]

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(
            m if isinstance(m, Mode) else Mode(*m) for m in self.modes))
        for m in self.modes:
            root = self.root(m)
            if root.case_tag is RootCase.COMPLEX_PAIR:
                if complex(m.c_minus) != complex(m.c_plus).conjugate():
                    raise ValueError(f"oscillatory mode mu={m.mu} needs c_minus = conj(c_plus)")
            elif complex(m.c_plus).imag or complex(m.c_minus).imag:
                raise ValueError(f"mode mu={m.mu} with real roots needs real coefficients")

    def root(self, mode: Mode):
        return solve_indicial(mode.mu, self.n, log_tol=TOLERANCES["log_case"])

    def exponents(self) -> list[float]:
        """Real parts of all root exponents of the modes, plus ``-(n-2)/2``."""
        out = [-(self.n - 2) / 2]
        for m in self.modes:
            r = self.root(m)
            out += [float(r.re_plus), float(r.re_minus)]
        return out

    def radial(self, r: float) -> np.ndarray:
        """Complex radial amplitude ``v_j^+(r) + v_j^-(r)`` of each mode."""
        vals = []
        for m in self.modes:
            root = self.root(m)
            gp, gm = root.gamma_plus, root.gamma_minus
            if root.case_tag is RootCase.LOG_DOUBLE:
                v = complex(m.c_plus) * r**gp + complex(m.c_minus) * r**gm * math.log(r)
            else:
                v = complex(m.c_plus) * r**gp + complex(m.c_minus) * r**gm
            vals.append(v)
        return np.array(vals, dtype=complex)


@dataclass(frozen=True)
class GrowthParams:
    gamma: float
    K: float
    sigma: float

    def __post_init__(self):
        if not self.K > 2:
            raise ValueError(f"K must exceed 2, got {self.K}")
        if not 0 < self.sigma < 1:
            raise ValueError(f"sigma must lie in (0, 1), got {self.sigma}")


def _power_window(p: float, r: float, L: float) -> float:
    """``int_{r e^{-L}}^{r} t^{p-1} dt``."""
    if p == 0:
        return L
    lr = math.log(r)
    _guard(max(p * lr, p * (lr - L)), "power window")
    return math.exp(p * lr) * -math.expm1(-p * L) / p


def _log_antiderivative(q: float, A: float, B: float, s: float) -> float:
    """Antiderivative of ``e^{q s} (A + B s)^2``."""
    P = A * A + 2 * A * B * s + B * B * s * s
    if q == 0:
        return A * A * s + A * B * s * s + B * B * s**3 / 3
    _guard(q * s, "log-mode antiderivative")
    dP = 2 * A * B + 2 * B * B * s
    ddP = 2 * B * B
    return math.exp(q * s) * (P / q - dP / q**2 + ddP / q**3)


def _mode_window(root, mode: Mode, gamma: float, r: float, L: float) -> float:
    """``int_{r/K}^{r} t^{-1-2 gamma} (v^+ + v^-)^2 dt`` for one mode."""
    if root.case_tag is RootCase.REAL_DISTINCT:
        A, B = float(complex(mode.c_plus).real), float(complex(mode.c_minus).real)
        a = float(root.re_plus) - gamma
        b = float(root.re_minus) - gamma
        out = 0.0
        if A:
            out += A * A * _power_window(2 * a, r, L)
        if A and B:
            out += 2 * A * B * _power_window(a + b, r, L)
        if B:
            out += B * B * _power_window(2 * b, r, L)
        return out
    if root.case_tag is RootCase.LOG_DOUBLE:
        A, B = float(complex(mode.c_plus).real), float(complex(mode.c_minus).real)
        q = 2 * (float(root.re_plus) - gamma)
        s1 = math.log(r)
        return _log_antiderivative(q, A, B, s1) - _log_antiderivative(q, A, B, s1 - L)
    c = complex(mode.c_plus)
    amp2 = 4 * abs(c) ** 2
    if amp2 == 0:
        return 0.0
    beta = float(root.re_plus) - gamma
    return amp2 * _osc_window(root.imag, beta, cmath.phase(c), L, math.log(r) - L)


def _mode_second(root, mode: Mode, gamma: float, L: float) -> float:
    """``J(K^-2) - 2 J(K^-1) + J(1)`` for one mode, in closed form."""
    if root.case_tag is RootCase.REAL_DISTINCT:
        A, B = float(complex(mode.c_plus).real), float(complex(mode.c_minus).real)
        a = float(root.re_plus) - gamma
        b = float(root.re_minus) - gamma

        def cube(p):
            if p == 0:
                return 0.0
            _guard(3 * max(-p * L, 0.0), "three-circle residual")
            return -math.expm1(-p * L) ** 3 / p

        return A * A * cube(2 * a) + 2 * A * B * cube(a + b) + B * B * cube(2 * b)
    if root.case_tag is RootCase.LOG_DOUBLE:
        A, B = float(complex(mode.c_plus).real), float(complex(mode.c_minus).real)
        q = 2 * (float(root.re_plus) - gamma)
        F = [_log_antiderivative(q, A, B, -k * L) for k in range(4)]
        return F[0] - 3 * F[1] + 3 * F[2] - F[3]
    c = complex(mode.c_plus)
    beta = float(root.re_plus) - gamma
    return 4 * abs(c) ** 2 * _osc_second(root.imag, beta, cmath.phase(c), L, -3 * L)


def growth_functional(field: GrowthField, params: GrowthParams, r: float) -> float:
    """``J_K^gamma(u; r)``: weighted L^2 mass of the field on the annulus ``(r/K, r)``."""
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    L = math.log(params.K)
    return sum(_mode_window(field.root(m), m, params.gamma, r, L) for m in field.modes)


def check_gap(field: GrowthField, params: GrowthParams) -> float:
    """Distance from ``gamma`` to the field's exponents and ``-(n-2)/2``; raises if below sigma."""
    d = min(abs(params.gamma - g) for g in field.exponents())
    if d < params.sigma:
        raise ValueError(
            f"gamma={params.gamma} is {d:.4g} from the asymptotic spectrum, need >= sigma={params.sigma}")
    return d


def three_circle_terms(field: GrowthField, params: GrowthParams) -> tuple[float, float, float]:
    K = params.K
    return tuple(growth_functional(field, params, r) for r in (K**-2, K**-1, 1.0))


def three_circle_residual(field: GrowthField, params: GrowthParams, *,
                          enforce_k0: bool = True) -> float:
    """``J(K^-2) - 2 J(K^-1) + J(1)``, assembled mode by mode in closed form.

    Requires the weight gap and, unless ``enforce_k0`` is false, ``K >= find_K0(sigma)``.
    """
    check_gap(field, params)
    if enforce_k0 and params.K < find_K0(params.sigma):
        raise ValueError(f"K={params.K} below K0({params.sigma})={find_K0(params.sigma):.6g}")
    L = math.log(params.K)
    return sum(_mode_second(field.root(m), m, params.gamma, L) for m in field.modes)


# --------------------------------------------------------------------------
# radial ODE


@dataclass(frozen=True)
class Trajectory:
    r: np.ndarray
    f: np.ndarray
    df: np.ndarray  # derivative with respect to r

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "f", "df_dr"])
        for row in zip(self.r, self.f, self.df):
            w.writerow([format(float(x), ".17g") for x in row])
        return buf.getvalue()


def radial_ode_solve(mu: float, n: int, r_span: tuple[float, float],
                     initial: tuple[float, float], *, start: float | None = None,
                     steps: int | None = None) -> Trajectory:
    """Integrate ``r^2 f'' + (n-1) r f' - mu f = 0`` with classical RK4 in ``s = log r``.

    ``initial = (f, df/dr)`` is imposed at ``start`` (default ``r_span[0]``),
    which must be one of the endpoints.  The returned samples are ordered by
    increasing ``r``.
    """
    r_lo, r_hi = (float(x) for x in r_span)
    if not (r_lo > 0 and r_hi > 0):
        raise ValueError("the radial span must not reach r = 0")
    if not r_lo < r_hi:
        raise ValueError(f"need r_lo < r_hi, got {r_span}")
    start = r_lo if start is None else float(start)
    if start not in (r_lo, r_hi):
        raise ValueError("start must be an endpoint of r_span")
    end = r_hi if start == r_lo else r_lo
    span = math.log(end) - math.log(start)
    # y = (f, f_s); y_s = A y
    A = np.array([[0.0, 1.0], [float(mu), -(n - 2.0)]])
    if steps is None:
        rate = max(1.0, float(np.max(np.abs(np.linalg.eigvals(A)))))
        steps = max(200, math.ceil(abs(span) * rate / 2e-3))
    hA = A * (span / steps)
    hA2 = hA @ hA
    M = np.eye(2) + hA + hA2 / 2 + hA2 @ hA / 6 + hA2 @ hA2 / 24
    y = np.array([float(initial[0]), float(initial[1]) * start])
    ys = np.empty((steps + 1, 2))
    ys[0] = y
    for i in range(steps):
        y = M @ y
        ys[i + 1] = y
    s = math.log(start) + span * np.arange(steps + 1) / steps
    r = np.exp(s)
    r[0], r[-1] = start, end
    f, df = ys[:, 0], ys[:, 1] / r
    if span < 0:
        r, f, df = r[::-1], f[::-1], df[::-1]
    return Trajectory(r, f, df)


# --------------------------------------------------------------------------
# asymptotic rate


def estimate_asymptotic_rate(samples: Sequence[tuple[float, float]], n: int, *,
                             density_weighted: bool = True) -> float:
    """Least-squares growth exponent of annular L^2 data.

    ``samples`` holds ``(s, m(s))`` with ``m(s)`` the integral of ``|v|^2``
    over the annulus ``A(s, 2s)``, measured against ``rho^{-n} d||Sigma||``
    (``density_weighted``) or plain ``d||Sigma||``.  For ``v ~ rho^g`` the
    first is ``~ s^{2g}``, the second ``~ s^{2g + n}``; the estimate is half
    the log-log slope, less ``n/2`` in the unweighted case.  Identically zero
    data returns ``+inf``.
    """
    if len(samples) < 4:
        raise ValueError(f"need at least 4 samples, got {len(samples)}")
    s = np.array([float(a) for a, _ in samples])
    m = np.array([float(b) for _, b in samples])
    if np.any(s <= 0):
        raise ValueError("radii must be positive")
    d = np.diff(s)
    if not (np.all(d < 0) or np.all(d > 0)):
        raise ValueError("radii must be strictly monotone")
    if np.any(m < 0):
        raise ValueError("annular integrals must be non-negative")
    if np.all(m == 0):
        return math.inf
    if np.any(m == 0):
        raise ValueError("annular integrals vanish on some but not all annuli")
    slope = np.polyfit(np.log(s), np.log(m), 1)[0]
    rate = slope / 2
    return float(rate if density_weighted else rate - n / 2)


def annular_mass(field: GrowthField, s: float, ratio: float = 2.0) -> float:
    """Integral of ``|v|^2 rho^{-n}`` over the annulus ``A(s, ratio*s)``."""
    if not (s > 0 and ratio > 1):
        raise ValueError("need s > 0 and ratio > 1")
    L = math.log(ratio)
    return sum(_mode_window(field.root(m), m, 0.0, ratio * s, L) for m in field.modes)
