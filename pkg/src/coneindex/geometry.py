"""Sphere constants, density/area thresholds and the Veronese embeddings."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy.stats import qmc

# --------------------------------------------------------------------------
# sphere areas and ball volumes


def _gamma_half(k2: int) -> float:
    """Gamma(k2 / 2) for a positive integer ``k2``, via factorials."""
    if k2 < 1:
        raise ValueError("argument must be positive")
    if k2 % 2 == 0:
        return float(math.factorial(k2 // 2 - 1))
    k = (k2 - 1) // 2
    # Gamma(k + 1/2) = (2k)! sqrt(pi) / (4^k k!)
    return math.factorial(2 * k) * math.sqrt(math.pi) / (4**k * math.factorial(k))


def sphere_area(d: int) -> float:
    """d-dimensional measure of the unit sphere ``S^d`` in ``R^{d+1}``."""
    if d < 0:
        raise ValueError(f"dimension must be >= 0, got {d}")
    return 2.0 * math.pi ** ((d + 1) / 2) / _gamma_half(d + 1)


def ball_volume(d: int) -> float:
    """Volume of the unit ball in ``R^d``; equals ``A_{d-1} / d``."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return math.pi ** (d / 2) / _gamma_half(d + 2)


@dataclass(frozen=True)
class SphereConstants:
    d: int
    A_d: float
    omega_d: float


def sphere_constants(d: int) -> SphereConstants:
    return SphereConstants(d, sphere_area(d), ball_volume(d))


# --------------------------------------------------------------------------
# densities and area thresholds

IRREGULAR_DENSITY_FLOOR = 2.0
PRINTED_FOOTBALL_AREA = 31.00063
PRINTED_THRESHOLD = 39.47842


def density_bound(link_area: float, n: int) -> float:
    """Vertex density of the ``n``-cone over a link of the given area."""
    if not link_area > 0:
        raise ValueError(f"link_area must be positive, got {link_area}")
    return link_area / sphere_area(n - 1)


def irregular_density_floor() -> float:
    return IRREGULAR_DENSITY_FLOOR


def is_strongly_isolated_compatible(density: float) -> bool:
    return density < IRREGULAR_DENSITY_FLOOR


@dataclass(frozen=True)
class AreaThresholds:
    football_area: float
    threshold: float
    two_A3: float
    printed_football_area: float = PRINTED_FOOTBALL_AREA
    printed_threshold: float = PRINTED_THRESHOLD

    @property
    def football_print_discrepancy(self) -> float:
        return self.football_area - self.printed_football_area

    @property
    def football_print_mismatch(self) -> bool:
        return abs(self.football_print_discrepancy) > 5e-6

    @property
    def threshold_print_mismatch(self) -> bool:
        return abs(self.threshold - self.printed_threshold) > 5e-6


def area_thresholds() -> AreaThresholds:
    A3 = sphere_area(3)
    out = AreaThresholds(football_area=math.pi**3, threshold=4 * math.pi**2, two_A3=2 * A3)
    if not out.football_area < out.threshold:
        raise ArithmeticError("football area must lie below the threshold")
    if not math.isclose(out.threshold, out.two_A3, rel_tol=1e-15):
        raise ArithmeticError("threshold must equal 2 A_3")
    return out


# --------------------------------------------------------------------------
# R, C, H arithmetic on arrays whose last axis holds the real components


class Field(str, Enum):
    R = "R"
    C = "C"
    H = "H"

    @property
    def m(self) -> int:
        return {"R": 1, "C": 2, "H": 4}[self.value]


@dataclass(frozen=True)
class VeroneseField:
    field_tag: Field

    @property
    def m(self) -> int:
        return self.field_tag.m

    @property
    def domain_dim(self) -> int:
        return 2 * self.m

    @property
    def ambient_dim(self) -> int:
        return 3 * self.m + 2


def conj(x: np.ndarray) -> np.ndarray:
    out = -x
    out[..., 0] = x[..., 0]
    return out


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product in R, C or H, chosen from the size of the last axis."""
    m = a.shape[-1]
    if m == 1:
        return a * b
    if m == 2:
        ar, ai = a[..., 0], a[..., 1]
        br, bi = b[..., 0], b[..., 1]
        return np.stack([ar * br - ai * bi, ar * bi + ai * br], axis=-1)
    if m == 4:
        a0, a1, a2, a3 = (a[..., i] for i in range(4))
        b0, b1, b2, b3 = (b[..., i] for i in range(4))
        return np.stack([
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ], axis=-1)
    raise ValueError(f"unsupported field dimension {m}")


def _as_field(f) -> VeroneseField:
    if isinstance(f, VeroneseField):
        return f
    return VeroneseField(Field(f))


def veronese_embed(f, u, v, w) -> np.ndarray:
    """Image of ``[u : v : w]`` in ``S^{3m+1}``.

    ``u, v, w`` are arrays of shape ``(..., m)``.  The fourth block uses the
    factor ``sqrt(3)/2``, which is what puts the image on the unit sphere.
    """
    f = _as_field(f)
    u, v, w = (np.asarray(x, dtype=float) for x in (u, v, w))
    for x in (u, v, w):
        if x.shape[-1] != f.m:
            raise ValueError(f"field {f.field_tag.value} needs last axis {f.m}, got {x.shape}")
    nu, nv, nw = ((x * x).sum(axis=-1) for x in (u, v, w))
    s = nu + nv + nw
    if np.any(s == 0):
        raise ValueError("the zero triple is not a point of the projective plane")
    r3 = math.sqrt(3.0)
    out = np.concatenate([
        r3 * mul(v, conj(w)),
        r3 * mul(w, conj(u)),
        r3 * mul(u, conj(v)),
        (r3 / 2 * (nu - nv))[..., None],
        (0.5 * (2 * nw - nu - nv))[..., None],
    ], axis=-1)
    return out / s[..., None]


# --------------------------------------------------------------------------
# mean curvature by finite differences


def mean_curvature_residual(embed: Callable[[np.ndarray], np.ndarray],
                            points: np.ndarray, h: float) -> np.ndarray:
    """Spherical mean-curvature vectors of ``embed`` at chart ``points``.

    ``embed`` maps ``(P, d)`` chart coordinates to ``(P, D)`` points of the
    unit sphere.  The trace ``g^{ij} d_ij F`` is formed from central
    differences with step ``h`` and projected off the tangent plane and off
    the position vector.  Returns an array of shape ``(P, D)``.
    """
    points = np.asarray(points, float)
    P, d = points.shape
    F = embed(points)
    eye = np.eye(d) * h
    dF = np.empty((d, P, F.shape[1]))
    ddF = np.empty((d, d, P, F.shape[1]))
    plus = [embed(points + eye[i]) for i in range(d)]
    minus = [embed(points - eye[i]) for i in range(d)]
    for i in range(d):
        dF[i] = (plus[i] - minus[i]) / (2 * h)
        ddF[i, i] = (plus[i] - 2 * F + minus[i]) / h**2
        for j in range(i + 1, d):
            pp = embed(points + eye[i] + eye[j])
            pm = embed(points + eye[i] - eye[j])
            mp = embed(points - eye[i] + eye[j])
            mm = embed(points - eye[i] - eye[j])
            ddF[i, j] = ddF[j, i] = (pp - pm - mp + mm) / (4 * h * h)
    g = np.einsum("ipk,jpk->pij", dF, dF)
    ginv = np.linalg.inv(g)
    trace = np.einsum("pij,ijpk->pk", ginv, ddF)
    # orthonormal frame of span{dF_1..dF_d, F}
    frame = np.concatenate([np.transpose(dF, (1, 2, 0)), F[:, :, None]], axis=2)
    q, _ = np.linalg.qr(frame)
    return trace - np.einsum("pkr,pr->pk", q, np.einsum("pkr,pk->pr", q, trace))


def _chart_points(dim: int, grid: int) -> np.ndarray:
    if dim == 2:
        c = (np.arange(grid) + 0.5) / grid * 2 - 1
        X, Y = np.meshgrid(c, c, indexing="ij")
        return np.stack([X.ravel(), Y.ravel()], axis=1)
    sample = qmc.Halton(d=dim, scramble=False).random(grid * grid + 1)[1:]
    return sample * 2 - 1


def veronese_chart(f, perturbation: float = 0.0) -> Callable[[np.ndarray], np.ndarray]:
    """Affine chart ``(x, y) -> [x : y : 1]`` composed with the Veronese map.

    ``perturbation`` adds a smooth bump of that amplitude before renormalising
    onto the sphere, producing a non-minimal comparison surface.
    """
    f = _as_field(f)
    m = f.m
    e = np.zeros(f.ambient_dim)
    e[0] = e[-1] = 1.0 / math.sqrt(2.0)

    def embed(x: np.ndarray) -> np.ndarray:
        u = x[:, :m]
        v = x[:, m:2 * m]
        w = np.zeros_like(u)
        w[:, 0] = 1.0
        F = veronese_embed(f, u, v, w)
        if perturbation:
            bump = np.sin(3 * x[:, 0]) * np.cos(2 * x[:, -1])
            F = F + perturbation * bump[:, None] * e
            F = F / np.linalg.norm(F, axis=1, keepdims=True)
        return F

    return embed


@dataclass(frozen=True)
class MinimalityStudy:
    residual: float       # sup norm after step-halving extrapolation
    residual_coarse: float
    residual_fine: float
    order: float          # observed order of the raw residual under step halving
    norm_max_dev: float   # max | |F| - 1 | over the chart points


def minimality_study(f, grid: int, *, perturbation: float = 0.0) -> MinimalityStudy:
    """Mean-curvature residual of the Veronese image over a chart sample.

    For ``F = R`` the sample is a ``grid x grid`` lattice of the chart square
    ``[-1, 1]^2``; for ``C`` and ``H`` it is ``grid^2`` Halton points of
    ``[-1, 1]^{2m}``.  The finite-difference step is ``2 / grid`` and is
    halved once for the extrapolation.
    """
    if grid < 8:
        raise ValueError(f"grid must be >= 8, got {grid}")
    f = _as_field(f)
    embed = veronese_chart(f, perturbation)
    pts = _chart_points(f.domain_dim, grid)
    h = 2.0 / grid
    coarse = mean_curvature_residual(embed, pts, h)
    fine = mean_curvature_residual(embed, pts, h / 2)
    ext = (4 * fine - coarse) / 3
    rc = float(np.max(np.linalg.norm(coarse, axis=1)))
    rf = float(np.max(np.linalg.norm(fine, axis=1)))
    norm_dev = float(np.max(np.abs(np.linalg.norm(embed(pts), axis=1) - 1)))
    order = math.log2(rc / rf) if rf > 0 and rc > 0 else math.inf
    return MinimalityStudy(float(np.max(np.linalg.norm(ext, axis=1))), rc, rf, order, norm_dev)


def veronese_minimality_residual(f, grid: int, *, perturbation: float = 0.0) -> float:
    return minimality_study(f, grid, perturbation=perturbation).residual
