"""Fredholm-index bookkeeping for minimal submanifolds with strongly isolated
singularities (MSI).

On the anchored weight interval ``(max_p gamma_-(C_p), 1)`` the index of the
Jacobi operator is ``-N Q - sum_p I(C_p)``.  Elsewhere it is obtained by
transport: each indicial real part crossed while the weight increases lowers
the index by its crossing multiplicity, and raises it when the weight
decreases.  All index arithmetic is on Python integers.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from numbers import Real

from .constants import TOLERANCES
from .errors import CompletenessError, WeightOnSpectrumError
from .geometry import sphere_area
from .indicial import AsymptoticSpectrum, cone_asymptotics
from .spectra import LinkSpectrum, morse_index


@dataclass(frozen=True)
class ConeModel:
    link: LinkSpectrum
    indicial: AsymptoticSpectrum
    link_area: float | None = None
    label: str = ""

    @property
    def N(self) -> int:
        return self.link.N

    @property
    def n(self) -> int:
        return self.link.n

    @property
    def density(self) -> float | None:
        if self.link_area is None:
            return None
        return self.link_area / sphere_area(self.n - 1)


def cone_model(link: LinkSpectrum, link_area: float | None = None, label: str = "", *,
               log_tol: float = TOLERANCES["log_case"],
               merge_tol: float = TOLERANCES["root_merge"]) -> ConeModel:
    asym = cone_asymptotics(link, log_tol=log_tol, merge_tol=merge_tol)
    if link_area is not None and not link_area > 0:
        raise ValueError(f"link_area must be positive, got {link_area}")
    return ConeModel(link, asym, link_area, label)


@dataclass(frozen=True)
class MSIModel:
    N: int
    n: int
    cones: tuple[ConeModel, ...] = ()
    tau: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "cones", tuple(self.cones))
        if not 2 <= self.n < self.N:
            raise ValueError(f"need 2 <= n < N, got n={self.n}, N={self.N}")
        for i, c in enumerate(self.cones):
            if (c.N, c.n) != (self.N, self.n):
                raise ValueError(
                    f"cone {i} has (N, n) = ({c.N}, {c.n}), model has ({self.N}, {self.n})")

    @property
    def Q(self) -> int:
        return len(self.cones)

    @property
    def augmentation_dim(self) -> int:
        return self.N * self.Q


def effective_morse_index(cone: ConeModel) -> int:
    return morse_index(cone.link) - cone.N


@dataclass(frozen=True)
class TauRange:
    lo: Real
    hi: Real
    smooth: bool = False

    def __iter__(self):
        return iter((self.lo, self.hi))

    def __contains__(self, tau: float) -> bool:
        return self.lo < tau < self.hi


def admissible_tau_range(msi: MSIModel) -> TauRange:
    if not msi.cones:
        return TauRange(0, 1, smooth=True)
    return TauRange(max(c.indicial.gamma_minus_of_cone for c in msi.cones), 1)


@dataclass(frozen=True)
class IndexReport:
    tau: float
    tau_interval: tuple[float, float]
    index: int
    hat_index: int
    per_cone_I: tuple[int, ...]
    admissible_tau: bool
    provenance: str  # "anchored" or "transported"
    crossings: tuple[tuple[float, int], ...] = field(default=())


def _check_weight(msi: MSIModel, tau: float, tol: float) -> None:
    for i, c in enumerate(msi.cones):
        asym = c.indicial
        if not asym.in_window(tau):
            lo, hi = asym.window
            raise CompletenessError(
                f"tau={tau!r} outside completeness window ({float(lo):.6g}, {float(hi):.6g}) "
                f"of cone {i}")
        d = asym.distance(tau)
        if d <= tol:
            raise WeightOnSpectrumError(
                f"weight on asymptotic spectrum: tau={tau!r} is {d:.3g} from a root of cone {i}")


def _component(msi: MSIModel, tau: float) -> tuple[float, float]:
    lo = max(float(c.indicial.complete_below) for c in msi.cones)
    hi = min(float(c.indicial.complete_above) for c in msi.cones)
    for c in msi.cones:
        for v, _ in c.indicial.entries:
            v = float(v)
            if lo < v < tau:
                lo = v
            elif tau < v < hi:
                hi = v
    return lo, hi


def fredholm_index(msi: MSIModel, tau: float, *,
                   root_tol: float = TOLERANCES["tau_on_root"]) -> IndexReport:
    """Index of the Jacobi operator on weight-``tau`` spaces, plus the augmented index.

    Raises when ``tau`` is within ``root_tol`` of an indicial real part or
    outside some cone's completeness window.  The returned ``tau_interval``
    is clipped to the intersection of the completeness windows.
    """
    tau = float(tau)
    if not math.isfinite(tau):
        raise ValueError(f"tau must be finite, got {tau}")
    if not msi.cones:
        return IndexReport(tau, (-math.inf, math.inf), 0, 0, (), 0 < tau < 1, "anchored")

    _check_weight(msi, tau, root_tol)
    rng = admissible_tau_range(msi)
    if rng.lo < 0:
        raise ValueError(
            f"gamma_-={float(rng.lo):.6g} < 0: the indicial root 0 coming from translations "
            "is missing, so the link spectrum is not that of a regular minimal cone")
    per_cone = tuple(effective_morse_index(c) for c in msi.cones)
    anchored = -msi.augmentation_dim - sum(per_cone)
    admissible = tau in rng

    crossed: dict[float, int] = {}
    index = anchored
    if not admissible:
        anchor = (float(rng.lo) + 1.0) / 2.0
        sign = -1 if tau > anchor else 1
        for c in msi.cones:
            for v, m in c.indicial.entries:
                if min(anchor, tau) < v < max(anchor, tau):
                    crossed[float(v)] = crossed.get(float(v), 0) + m
                    index += sign * m
    return IndexReport(
        tau=tau,
        tau_interval=_component(msi, tau),
        index=index,
        hat_index=index + msi.augmentation_dim,
        per_cone_I=per_cone,
        admissible_tau=admissible,
        provenance="anchored" if admissible else "transported",
        crossings=tuple(sorted(crossed.items())),
    )


def dual_weight(tau: float, n: int) -> float:
    return 2.0 - tau - n


def duality_check(msi: MSIModel, tau: float, *,
                  root_tol: float = TOLERANCES["tau_on_root"]) -> bool:
    a = fredholm_index(msi, tau, root_tol=root_tol).index
    b = fredholm_index(msi, dual_weight(tau, msi.n), root_tol=root_tol).index
    return a == -b


class Classification(str, Enum):
    SMOOTH = "smooth"
    GENERICALLY_EXCLUDED = "generically_excluded"
    BORDERLINE_INDEX_N = "borderline_index_N"


def classify_generic(msi: MSIModel) -> Classification:
    """Where the model falls in the generic-regularity trichotomy.

    A positive effective index at any singular point makes the augmented
    index negative, which generic metrics rule out; if every link has Morse
    index exactly ``N`` the singularities are of the possibly persistent kind.
    """
    if not msi.cones:
        return Classification.SMOOTH
    effective = [effective_morse_index(c) for c in msi.cones]
    bad = [i for i, e in enumerate(effective) if e < 0]
    if bad:
        raise ValueError(
            f"cones {bad} have negative effective Morse index, which violates the Simons "
            "lower bound: invalid spectrum")
    if any(e > 0 for e in effective):
        return Classification.GENERICALLY_EXCLUDED
    return Classification.BORDERLINE_INDEX_N


def simons_validators(cone: ConeModel) -> list[tuple[str, bool]]:
    """Lower bounds every genuine non-equatorial link must satisfy."""
    index = morse_index(cone.link)
    effective = index - cone.N
    checks = [("nonnegative_effective_index", effective >= 0)]
    if cone.N == cone.n + 1:
        checks.append(("codimension_one_bound", effective >= 1))
    if cone.link.connected:
        checks.append(("connected_bound", index >= cone.N))
    return checks


def football_model(cutoff: Real = 10) -> MSIModel:
    """The Clifford football: two Clifford cones in ``R^4``."""
    from .spectra import clifford_torus_spectrum

    link = clifford_torus_spectrum(cutoff)
    cone = cone_model(link, link_area=2 * math.pi**2, label="clifford")
    return MSIModel(N=4, n=3, cones=(cone, cone))


def sweep(msi: MSIModel, tau_lo: float, tau_hi: float, steps: int, *,
          root_tol: float = TOLERANCES["tau_on_root"],
          nudge: float = TOLERANCES["sweep_nudge"]) -> list[dict]:
    """Index on ``steps + 1`` equally spaced weights in ``[tau_lo, tau_hi]``.

    Weights landing on an indicial real part are moved by ``nudge`` towards
    the interior of the sweep range; weights outside a completeness window
    produce flagged rows with no index.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    roots = sorted({float(v) for c in msi.cones for v, _ in c.indicial.entries})
    rows = []
    for i in range(steps + 1):
        tau = tau_lo + (tau_hi - tau_lo) * i / steps
        flag = ""
        if msi.cones and any(abs(tau - r) <= root_tol for r in roots):
            step = nudge if tau + nudge <= max(tau_lo, tau_hi) else -nudge
            warnings.warn(f"sweep weight {tau!r} lies on an indicial real part; moved by {step:+g}",
                          stacklevel=2)
            tau += step
            flag = "nudged"
        try:
            rep = fredholm_index(msi, tau, root_tol=root_tol)
        except CompletenessError:
            rows.append(dict(tau=tau, index=None, hat_index=None,
                             interval_id=None, flag="outside_window"))
            continue
        rows.append(dict(tau=tau, index=rep.index, hat_index=rep.hat_index,
                         interval_id=sum(1 for r in roots if r < tau), flag=flag))
    return rows
