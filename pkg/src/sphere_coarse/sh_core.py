"""Quadrature grids, associated Legendre tables and the scalar spherical transform.

Conventions
-----------
Positions are ``(t, lam)`` with ``t = sin(latitude)`` and ``lam`` the longitude in
``[-pi, pi)``.  Real harmonics are normalized against the *mean* over the sphere,
so ``Y_{0,0} == 1`` and ``<Y_{n,j} Y_{m,k}> = delta_nm delta_jk``.  The
Condon-Shortley phase is omitted.  Order ``j >= 0`` carries ``cos(j lam)`` and
``j < 0`` carries ``sin(|j| lam)``.

Spectral coefficients are stored densely as ``(N + 1, 2N + 1)`` arrays indexed
``[n, j + N]``; slots with ``|j| > n`` are structural zeros.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


class GridTooCoarseError(ValueError):
    """The grid cannot resolve the requested band limit exactly."""


class BandMismatchError(ValueError):
    """Two spectral objects (or a kernel and a field) disagree on band limit."""


class InvalidIndexError(ValueError):
    """A (degree, order) pair outside the valid triangle."""


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Tensor-product grid of latitudes ``nodes`` (in ``t``) and longitudes.

    Quadrature grids carry Gauss-Legendre ``weights`` summing to 2.  Grids built
    with :func:`point_grid` have ``weights=None`` and only support synthesis.
    """

    nodes: np.ndarray
    lons: np.ndarray
    radius: float = 1.0
    weights: np.ndarray | None = None

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    @property
    def nlat(self) -> int:
        return len(self.nodes)

    @property
    def nlon(self) -> int:
        return len(self.lons)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nlat, self.nlon)

    @property
    def is_quadrature(self) -> bool:
        return self.weights is not None

    @property
    def band(self) -> int:
        """Largest band limit the grid analyses exactly."""
        if not self.is_quadrature:
            return -1
        return min(self.nlat - 1, (self.nlon - 1) // 2)

    def supports(self, band: int) -> bool:
        return self.is_quadrature and self.nlat >= band + 1 and self.nlon >= 2 * band + 1

    def require(self, band: int) -> None:
        if not self.is_quadrature:
            raise GridTooCoarseError("grid has no quadrature weights; analysis is impossible")
        if not self.supports(band):
            raise GridTooCoarseError(
                f"grid nlat={self.nlat}, nlon={self.nlon} cannot resolve band {band} "
                f"(needs nlat >= {band + 1}, nlon >= {2 * band + 1})"
            )

    @cached_property
    def coslat(self) -> np.ndarray:
        return np.sqrt((1.0 - self.nodes) * (1.0 + self.nodes))

    @cached_property
    def frame(self) -> np.ndarray:
        """Rows ``e_r, e_lam, e_phi`` in Cartesian components, shape ``(nlat, nlon, 3, 3)``."""
        t = self.nodes[:, None]
        c = self.coslat[:, None]
        cl = np.cos(self.lons)[None, :]
        sl = np.sin(self.lons)[None, :]
        zero = np.zeros(self.shape)
        e_r = np.stack(np.broadcast_arrays(c * cl, c * sl, t + zero), axis=-1)
        e_lam = np.stack(np.broadcast_arrays(-sl + zero, cl + zero, zero), axis=-1)
        e_phi = np.stack(np.broadcast_arrays(-t * cl, -t * sl, c + zero), axis=-1)
        return np.stack([e_r, e_lam, e_phi], axis=-2)

    @property
    def e_r(self) -> np.ndarray:
        return self.frame[..., 0, :]

    def mean(self, values: np.ndarray) -> np.ndarray:
        """Quadrature mean over the sphere of the leading ``(nlat, nlon)`` axes."""
        if not self.is_quadrature:
            raise GridTooCoarseError("grid has no quadrature weights")
        return np.einsum("i,ik...->...", self.weights, values) / (2.0 * self.nlon)

    def area(self) -> float:
        """Discrete surface area, ``r^2`` times the quadrature of ``dS``."""
        return float(self.radius**2 * np.sum(self.weights) * 2.0 * np.pi)


def gauss_grid(nlat: int, nlon: int, radius: float = 1.0) -> SphereGrid:
    if nlat < 1 or nlon < 1:
        raise ValueError("grid needs at least one latitude and one longitude")
    nodes, weights = np.polynomial.legendre.leggauss(nlat)
    lons = -np.pi + 2.0 * np.pi * np.arange(nlon) / nlon
    return SphereGrid(nodes=nodes, lons=lons, radius=float(radius), weights=weights)


def build_gauss_grid(N: int, r: float = 1.0) -> SphereGrid:
    """Smallest grid analysing band ``N`` exactly: ``N + 1`` Gauss nodes, ``2N + 2`` longitudes."""
    if N < 0:
        raise ValueError(f"band limit must be non-negative, got {N}")
    return gauss_grid(N + 1, 2 * N + 2, r)


def point_grid(lat: np.ndarray, lon: np.ndarray, radius: float = 1.0) -> SphereGrid:
    """Synthesis-only grid at arbitrary latitudes (radians) and longitudes."""
    lat = np.atleast_1d(np.asarray(lat, dtype=float))
    lon = np.atleast_1d(np.asarray(lon, dtype=float))
    return SphereGrid(nodes=np.sin(lat), lons=lon, radius=float(radius))


def order_index(N: int) -> np.ndarray:
    return np.arange(-N, N + 1)


def triangle_mask(N: int) -> np.ndarray:
    """Boolean ``(N + 1, 2N + 1)`` mask of the valid ``|j| <= n`` slots."""
    n = np.arange(N + 1)[:, None]
    return np.abs(order_index(N))[None, :] <= n


def legendre_table(N: int, t: np.ndarray) -> np.ndarray:
    """Mean-normalized associated Legendre functions, shape ``(len(t), N + 1, N + 1)``.

    Entry ``[i, n, m]`` is ``sqrt((2 - delta_m0)(2n + 1)(n - m)!/(n + m)!) P_n^m(t_i)``
    without the Condon-Shortley phase; ``m > n`` entries are zero.  Uses the
    standard recurrence on normalized functions, so nothing overflows.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    c = np.sqrt((1.0 - t) * (1.0 + t))
    out = np.zeros((t.size, N + 1, N + 1))
    out[:, 0, 0] = 1.0
    for m in range(N + 1):
        if m == 1:
            out[:, 1, 1] = np.sqrt(3.0) * c
        elif m > 1:
            out[:, m, m] = np.sqrt((2 * m + 1) / (2 * m)) * c * out[:, m - 1, m - 1]
        if m + 1 <= N:
            out[:, m + 1, m] = np.sqrt(2 * m + 3) * t * out[:, m, m]
        for n in range(m + 2, N + 1):
            a = np.sqrt((2 * n - 1) * (2 * n + 1) / ((n - m) * (n + m)))
            b = np.sqrt((2 * n + 1) * (n + m - 1) * (n - m - 1) / ((n - m) * (n + m) * (2 * n - 3)))
            out[:, n, m] = a * t * out[:, n - 1, m] - b * out[:, n - 2, m]
    return out


def legendre_polynomials(N: int, t: np.ndarray) -> np.ndarray:
    """Plain Legendre polynomials ``P_0..P_N`` at ``t``, shape ``(N + 1,) + t.shape``."""
    t = np.asarray(t, dtype=float)
    out = np.empty((N + 1,) + t.shape)
    out[0] = 1.0
    if N >= 1:
        out[1] = t
    for n in range(2, N + 1):
        out[n] = ((2 * n - 1) * t * out[n - 1] - (n - 1) * out[n - 2]) / n
    return out


class HarmonicFactors:
    """Latitude and longitude factor tables for every harmonic up to band ``N``.

    Each basis field component is a sum of ``lat[i, n, |j|] * lon[j, k]`` terms.
    Latitude tables (shape ``(nlat, N + 1, N + 1)``):

    ``P``    the normalized Legendre function
    ``dP``   its latitude derivative
    ``Pc``   ``P / cos(lat)``; with ``D`` gives ``(1/cos) d/dlam``
    ``Hll``, ``Hlp``, ``Hpp``  orthonormal-frame Hessian pieces (lam-lam, lam-phi, phi-phi)

    Longitude tables (shape ``(2N + 1, nlon)``): ``T`` the order factor and ``D`` its
    longitude derivative.
    """

    def __init__(self, N: int, grid: SphereGrid):
        self.N = N
        self.grid = grid
        self.mabs = np.abs(order_index(N))

    @cached_property
    def P(self) -> np.ndarray:
        return legendre_table(self.N, self.grid.nodes)

    @cached_property
    def _up(self) -> np.ndarray:
        # ratio(n, m) * Pbar_n^{m+1}, which is exactly d/dphi P_n^m + m t P_n^m / cos
        N = self.N
        up = np.zeros_like(self.P)
        n = np.arange(N + 1)[:, None]
        m = np.arange(N)[None, :]
        delta = (m == 0).astype(float)
        ratio = np.sqrt(np.clip((2 - delta) / 2 * (n + m + 1) * (n - m), 0, None))
        up[:, :, :N] = ratio[None] * self.P[:, :, 1:]
        return up

    @cached_property
    def _m(self) -> np.ndarray:
        return np.arange(self.N + 1)[None, None, :].astype(float)

    @cached_property
    def _t(self) -> np.ndarray:
        return self.grid.nodes[:, None, None]

    @cached_property
    def _c(self) -> np.ndarray:
        return self.grid.coslat[:, None, None]

    @cached_property
    def dP(self) -> np.ndarray:
        return self._up - self._m * self._t * self.P / self._c

    @cached_property
    def Pc(self) -> np.ndarray:
        return self.P / self._c

    @cached_property
    def Hlp(self) -> np.ndarray:
        m, t, c = self._m, self._t, self._c
        return self._up / c - (m - 1) * t * self.P / c**2

    @cached_property
    def Hll(self) -> np.ndarray:
        m, t, c = self._m, self._t, self._c
        return -m * (m - 1) * self.P / c**2 - m * self.P - t * self._up / c

    @cached_property
    def Hpp(self) -> np.ndarray:
        return -self.nn1[None, :, None] * self.P - self.Hll

    @cached_property
    def nn1(self) -> np.ndarray:
        n = np.arange(self.N + 1, dtype=float)
        return n * (n + 1)

    @cached_property
    def T(self) -> np.ndarray:
        j = order_index(self.N)[:, None]
        lam = self.grid.lons[None, :]
        return np.where(j >= 0, np.cos(j * lam), np.sin(-j * lam))

    @cached_property
    def D(self) -> np.ndarray:
        j = order_index(self.N)[:, None]
        lam = self.grid.lons[None, :]
        return np.where(j >= 0, -j * np.sin(j * lam), -j * np.cos(-j * lam))

    def lat(self, name: str) -> np.ndarray:
        """Latitude table ``name`` spread over orders, shape ``(nlat, N+1, 2N+1)``."""
        cache = self.__dict__.setdefault("_expanded", {})
        if name not in cache:
            cache[name] = getattr(self, name)[:, :, self.mabs]
        return cache[name]

    def synthesize(self, coeffs: np.ndarray, lat: str, lon: str) -> np.ndarray:
        g = np.einsum("nj,inj->ij", coeffs, self.lat(lat))
        return g @ getattr(self, lon)

    def analyze(self, values: np.ndarray, lat: str, lon: str) -> np.ndarray:
        h = values @ getattr(self, lon).T
        w = self.grid.weights
        return np.einsum("i,ij,inj->nj", w, h, self.lat(lat)) / (2.0 * self.grid.nlon)


_FACTOR_CACHE: dict = {}


def harmonic_factors(N: int, grid: SphereGrid) -> HarmonicFactors:
    """Cached :class:`HarmonicFactors` keyed on the grid object identity."""
    key = (N, id(grid))
    hit = _FACTOR_CACHE.get(key)
    if hit is not None and hit.grid is grid:
        return hit
    if len(_FACTOR_CACHE) > 64:
        _FACTOR_CACHE.clear()
    fac = HarmonicFactors(N, grid)
    _FACTOR_CACHE[key] = fac
    return fac


@dataclass(frozen=True, eq=False)
class GridScalar:
    grid: SphereGrid
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} does not match grid {self.grid.shape}")

    def mean(self) -> float:
        return float(self.grid.mean(self.values))


@dataclass(frozen=True, eq=False)
class SpectralScalar:
    band: int
    coeffs: np.ndarray
    radius: float = 1.0

    def __post_init__(self):
        expected = (self.band + 1, 2 * self.band + 1)
        if self.coeffs.shape != expected:
            raise ValueError(f"coefficient array shape {self.coeffs.shape}, expected {expected}")

    def __getitem__(self, nj: tuple[int, int]) -> float:
        n, j = nj
        return float(self.coeffs[n, j + self.band])

    @classmethod
    def zeros(cls, N: int, radius: float = 1.0) -> SpectralScalar:
        return cls(N, np.zeros((N + 1, 2 * N + 1)), radius)

    def with_coeffs(self, coeffs: np.ndarray) -> SpectralScalar:
        return SpectralScalar(self.band, coeffs, self.radius)

    def truncate(self, N: int) -> SpectralScalar:
        """Return the coefficients re-banded to ``N`` (zero padded or cut)."""
        return SpectralScalar(N, reband(self.coeffs, N), self.radius)


def reband(coeffs: np.ndarray, N: int) -> np.ndarray:
    """Re-band a ``(..., M+1, 2M+1)`` coefficient array to ``(..., N+1, 2N+1)``."""
    M = coeffs.shape[-2] - 1
    out = np.zeros(coeffs.shape[:-2] + (N + 1, 2 * N + 1))
    K = min(M, N)
    out[..., : K + 1, N - K : N + K + 1] = coeffs[..., : K + 1, M - K : M + K + 1]
    return out


def check_index(n: int, j: int) -> None:
    if n < 0 or abs(j) > n:
        raise InvalidIndexError(f"invalid harmonic index (n={n}, j={j})")


def eval_Y(grid: SphereGrid, n: int, j: int) -> GridScalar:
    """Samples of the real harmonic ``Y_{n,j}`` on ``grid``."""
    check_index(n, j)
    P = legendre_table(n, grid.nodes)[:, n, abs(j)]
    lam = grid.lons
    trig = np.cos(j * lam) if j >= 0 else np.sin(-j * lam)
    return GridScalar(grid, P[:, None] * trig[None, :])


def sft_forward(field: GridScalar, N: int) -> SpectralScalar:
    """Quadrature analysis ``f_{n,j} = <f Y_{n,j}>`` up to band ``N``."""
    grid = field.grid
    grid.require(N)
    fac = harmonic_factors(N, grid)
    coeffs = fac.analyze(field.values, "P", "T")
    return SpectralScalar(N, coeffs * triangle_mask(N), grid.radius)


def sft_inverse(coeffs: SpectralScalar, grid: SphereGrid) -> GridScalar:
    """Synthesis ``sum f_{n,j} Y_{n,j}`` on ``grid`` (any grid, quadrature or not)."""
    fac = harmonic_factors(coeffs.band, grid)
    return GridScalar(grid, fac.synthesize(coeffs.coeffs, "P", "T"))


def power_spectrum(coeffs: SpectralScalar) -> np.ndarray:
    """Per-degree power ``sum_j f_{n,j}^2``."""
    return np.sum(coeffs.coeffs**2, axis=1)


def random_coeffs(N: int, rng: np.random.Generator, families: int | None = None) -> np.ndarray:
    """Standard-normal coefficients on the valid triangle, for tests and demos."""
    shape = (N + 1, 2 * N + 1) if families is None else (families, N + 1, 2 * N + 1)
    return rng.standard_normal(shape) * triangle_mask(N)
