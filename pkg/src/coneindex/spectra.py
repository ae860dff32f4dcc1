"""Link spectra: the Clifford-torus catalog, user spectra, and a flat-torus
finite-difference eigensolver used as an independent numerical check.

Eigenvalues follow the sign convention ``L u = -lambda u`` so that negative
eigenvalues count towards the Morse index.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Real
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .constants import TOLERANCES
from .errors import ConvergenceError, TruncationError

CLIFFORD_SIDE = math.pi * math.sqrt(2.0)


@dataclass(frozen=True)
class Eigenvalue:
    value: Real
    multiplicity: int

    def __post_init__(self):
        if isinstance(self.multiplicity, bool) or not isinstance(self.multiplicity, Integral):
            raise TypeError(f"multiplicity must be an integer, got {self.multiplicity!r}")
        if self.multiplicity < 1:
            raise ValueError(f"multiplicity must be >= 1, got {self.multiplicity}")


@dataclass(frozen=True)
class LinkSpectrum:
    """Truncated Jacobi spectrum of the link of an ``n``-cone in ``R^N``.

    Every eigenvalue strictly below ``cutoff`` is listed with its full
    multiplicity; entries at or above ``cutoff`` may be present but carry no
    completeness guarantee.
    """

    N: int
    n: int
    eigenvalues: tuple[Eigenvalue, ...]
    cutoff: Real
    connected: bool = True

    def __post_init__(self):
        if not 2 <= self.n < self.N:
            raise ValueError(f"need 2 <= n < N, got n={self.n}, N={self.N}")
        if not math.isfinite(float(self.cutoff)):
            raise ValueError("cutoff must be finite")
        values = [e.value for e in self.eigenvalues]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("eigenvalues must be strictly ascending")

    @property
    def link_dim(self) -> int:
        return self.n - 1

    @property
    def ambient_sphere_dim(self) -> int:
        return self.N - 1

    def expanded(self) -> list[Real]:
        """Eigenvalues repeated according to multiplicity."""
        return [e.value for e in self.eigenvalues for _ in range(e.multiplicity)]

    def union(self, other: "LinkSpectrum") -> "LinkSpectrum":
        """Spectrum of the disjoint union of two links in the same sphere."""
        if (self.N, self.n) != (other.N, other.n):
            raise ValueError("spectra live in different dimensions")
        counts: Counter = Counter()
        for e in (*self.eigenvalues, *other.eigenvalues):
            counts[e.value] += e.multiplicity
        return user_spectrum(sorted(counts.items()), self.n, self.N,
                             connected=False, cutoff=min(self.cutoff, other.cutoff))


def _exact(value) -> Real:
    if isinstance(value, bool):
        raise TypeError("booleans are not eigenvalues")
    if isinstance(value, (Integral, Fraction)):
        return Fraction(value)
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"eigenvalue must be finite, got {value}")
    return value


def user_spectrum(entries: Iterable[tuple[Real, int]], n: int, N: int, *,
                  connected: bool = True, cutoff: Real) -> LinkSpectrum:
    """Validate user data into a :class:`LinkSpectrum`.

    Entries are sorted and equal values merged.  Integers and fractions are
    kept exact; floats stay floats.
    """
    counts: dict[Real, int] = {}
    for value, mult in entries:
        value = _exact(value)
        if isinstance(mult, bool) or int(mult) != mult:
            raise TypeError(f"multiplicity must be an integer, got {mult!r}")
        if mult < 1:
            raise ValueError(f"multiplicity must be >= 1, got {mult}")
        counts[value] = counts.get(value, 0) + int(mult)
    cutoff = _exact(cutoff)
    eigs = tuple(Eigenvalue(v, m) for v, m in sorted(counts.items()))
    return LinkSpectrum(N=N, n=n, eigenvalues=eigs, cutoff=cutoff, connected=connected)


def clifford_torus_spectrum(cutoff: Real) -> LinkSpectrum:
    """Jacobi spectrum of the Clifford torus in ``S^3`` below ``cutoff``.

    On the flat torus of side ``pi*sqrt(2)`` the Fourier mode ``(p, q)`` has
    Laplace eigenvalue ``2(p^2+q^2)``; with ``|II|^2 = 2`` and ``n-1 = 2`` the
    Jacobi eigenvalue is ``2(p^2+q^2) - 4``, with multiplicity the number of
    lattice points on the circle ``p^2+q^2 = k``.
    """
    cutoff = _exact(cutoff)
    if not cutoff > -4:
        raise ValueError(f"cutoff must exceed -4, got {cutoff}")
    # 2k - 4 < cutoff  <=>  k < (cutoff + 4) / 2
    kmax = math.floor((float(cutoff) + 4) / 2) + 1
    rmax = math.isqrt(kmax) + 1
    shells: Counter = Counter()
    for p in range(-rmax, rmax + 1):
        for q in range(-rmax, rmax + 1):
            k = p * p + q * q
            if 2 * k - 4 < cutoff:
                shells[k] += 1
    entries = [(Fraction(2 * k - 4), m) for k, m in sorted(shells.items())]
    return user_spectrum(entries, n=3, N=4, connected=True, cutoff=cutoff)


def morse_index(spec: LinkSpectrum) -> int:
    """Number of negative eigenvalues counted with multiplicity."""
    if spec.cutoff < 0:
        raise TruncationError(
            f"index undeterminable from truncation: cutoff {spec.cutoff} < 0")
    return sum(e.multiplicity for e in spec.eigenvalues if e.value < 0)


# --------------------------------------------------------------------------
# finite-difference oracle on the flat torus


@dataclass(frozen=True)
class DiscreteOperator:
    """``-(Delta_h + shift)`` on a periodic ``g x g`` grid (5-point stencil)."""

    grid_size: int
    side_lengths: tuple[float, float]
    potential_shift: float
    laplacian: sp.csr_matrix = field(repr=False, compare=False)

    @property
    def matrix(self) -> sp.csr_matrix:
        g2 = self.grid_size ** 2
        return (-self.laplacian - self.potential_shift * sp.identity(g2, format="csr")).tocsr()

    def fourier_eigenvalues(self) -> np.ndarray:
        """Exact eigenvalues of the discrete operator, ascending."""
        g = self.grid_size
        k = np.arange(g)
        hx, hy = (L / g for L in self.side_lengths)
        sx = 4.0 / hx**2 * np.sin(np.pi * k / g) ** 2
        sy = 4.0 / hy**2 * np.sin(np.pi * k / g) ** 2
        return np.sort((sx[:, None] + sy[None, :]).ravel()) - self.potential_shift


def _periodic_second_difference(g: int, h: float) -> sp.csr_matrix:
    main = -2.0 * np.ones(g)
    off = np.ones(g - 1)
    d = sp.diags([off, main, off], [-1, 0, 1], format="lil")
    d[0, g - 1] = 1.0
    d[g - 1, 0] = 1.0
    return (d / h**2).tocsr()


def flat_torus_operator(grid_size: int, side_lengths: Sequence[float] | None = None,
                        shift: float = 4.0) -> DiscreteOperator:
    if grid_size < 16:
        raise ValueError(f"grid_size must be >= 16, got {grid_size}")
    if side_lengths is None:
        side_lengths = (CLIFFORD_SIDE, CLIFFORD_SIDE)
    lx, ly = (float(s) for s in side_lengths)
    g = grid_size
    eye = sp.identity(g, format="csr")
    lap = sp.kron(_periodic_second_difference(g, lx / g), eye) \
        + sp.kron(eye, _periodic_second_difference(g, ly / g))
    return DiscreteOperator(g, (lx, ly), float(shift), lap.tocsr())


DENSE_LIMIT = 48 * 48


def discrete_link_eigenvalues(op: DiscreteOperator, count: int) -> list[float]:
    """The ``count`` smallest eigenvalues of ``op``, ascending.

    Small grids use a dense symmetric solver; larger grids use shift-invert
    Lanczos (ARPACK) from a fixed deterministic start vector.
    """
    size = op.grid_size ** 2
    if not 1 <= count <= size:
        raise ValueError(f"count must be in [1, {size}], got {count}")
    A = op.matrix
    if size <= DENSE_LIMIT:
        vals = scipy.linalg.eigh(A.toarray(), eigvals_only=True,
                                 subset_by_index=[0, count - 1])
        return [float(v) for v in vals]

    k = min(count + 8, size - 2)
    sigma = -op.potential_shift - 1.0  # strictly below the spectrum
    v0 = 1.0 + np.cos(np.arange(size) * (math.sqrt(2.0) - 1.0))
    try:
        vals = spla.eigsh(A, k=k, sigma=sigma, which="LM", v0=v0,
                          tol=1e-12, maxiter=50 * size, return_eigenvectors=False)
    except spla.ArpackNoConvergence as exc:
        residual = math.inf
        if exc.eigenvectors is not None and exc.eigenvectors.size:
            r = A @ exc.eigenvectors - exc.eigenvectors * exc.eigenvalues
            residual = float(np.max(np.linalg.norm(r, axis=0)))
        raise ConvergenceError("shift-invert Lanczos did not converge", residual) from exc
    return [float(v) for v in np.sort(vals)[:count]]


def cluster_eigenvalues(values: Iterable[float],
                        rel_tol: float = TOLERANCES["eigen_cluster"]) -> list[tuple[float, int]]:
    """Group sorted values whose gaps are within ``rel_tol * (1 + |lambda|)``."""
    out: list[list] = []
    for v in sorted(values):
        if out and abs(v - out[-1][0]) <= rel_tol * (1 + abs(v)):
            out[-1][1] += 1
        else:
            out.append([v, 1])
    return [(v, m) for v, m in out]


def richardson(coarse: np.ndarray, fine: np.ndarray, order: float = 2.0) -> np.ndarray:
    """Extrapolate results at step ``h`` and ``h/2`` for an ``O(h^order)`` method."""
    coarse = np.asarray(coarse, float)
    fine = np.asarray(fine, float)
    w = 2.0 ** order
    return (w * fine - coarse) / (w - 1.0)


def observed_order(coarse_err: np.ndarray, fine_err: np.ndarray, floor: float = 1e-12) -> float:
    """Smallest ``log2(|e_h| / |e_{h/2}|)`` over entries with non-negligible error."""
    ce = np.abs(np.asarray(coarse_err, float))
    fe = np.abs(np.asarray(fine_err, float))
    mask = ce > floor
    if not mask.any():
        return math.inf
    return float(np.min(np.log2(ce[mask] / np.maximum(fe[mask], 1e-300))))
