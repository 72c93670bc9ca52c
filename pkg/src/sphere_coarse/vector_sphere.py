"""Vector spherical harmonics, the vector transform and generalized vector convolution.

Frame components are ordered ``(r, lam, phi)`` with ``e_r x e_lam = e_phi``.  The
canonical basis is

``Y   = e_r Y_{n,j}``
``Psi = grad* Y_{n,j} / sqrt(n(n+1))``
``Phi = e_r x Psi``

and coefficient arrays have shape ``(3, N + 1, 2N + 1)`` in that family order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import ZonalKernelSpectrum, shifted
from .sh_core import (
    BandMismatchError,
    InvalidIndexError,
    SphereGrid,
    build_gauss_grid,
    check_index,
    harmonic_factors,
    reband,
    sft_forward,
    sft_inverse,
    GridScalar,
    SpectralScalar,
    triangle_mask,
)

FAMILIES = ("Y", "Psi", "Phi")
FRAME, CARTESIAN = "frame", "cartesian"


def _frame_to_cart(frame: np.ndarray, values: np.ndarray) -> np.ndarray:
    return np.einsum("ijab,ija->ijb", frame, values)


def _cart_to_frame(frame: np.ndarray, values: np.ndarray) -> np.ndarray:
    return np.einsum("ijab,ijb->ija", frame, values)


@dataclass(frozen=True, eq=False)
class GridVector:
    """Samples of a vector field; ``values`` has shape ``(nlat, nlon, 3)``.

    ``basis`` says whether the last axis holds frame ``(r, lam, phi)`` or
    Cartesian ``(x, y, z)`` components.
    """

    grid: SphereGrid
    values: np.ndarray
    basis: str = FRAME

    def __post_init__(self):
        if self.values.shape != self.grid.shape + (3,):
            raise ValueError(f"vector values shape {self.values.shape} does not match grid {self.grid.shape}")
        if self.basis not in (FRAME, CARTESIAN):
            raise ValueError(f"unknown component basis {self.basis!r}")

    def to_cartesian(self) -> GridVector:
        if self.basis == CARTESIAN:
            return self
        return GridVector(self.grid, _frame_to_cart(self.grid.frame, self.values), CARTESIAN)

    def to_frame(self) -> GridVector:
        if self.basis == FRAME:
            return self
        return GridVector(self.grid, _cart_to_frame(self.grid.frame, self.values), FRAME)

    def component(self, k: int) -> GridScalar:
        return GridScalar(self.grid, self.values[..., k])

    def __add__(self, other: GridVector) -> GridVector:
        a, b = self.to_cartesian(), other.to_cartesian()
        return GridVector(self.grid, a.values + b.values, CARTESIAN)

    def scaled(self, alpha: float) -> GridVector:
        return GridVector(self.grid, alpha * self.values, self.basis)

    def mean(self) -> np.ndarray:
        """Mean of the Cartesian components."""
        return self.grid.mean(self.to_cartesian().values)


@dataclass(frozen=True, eq=False)
class SpectralVector:
    """Coefficients ``(u^Y, u^Psi, u^Phi)`` stacked into shape ``(3, N + 1, 2N + 1)``."""

    band: int
    coeffs: np.ndarray
    radius: float = 1.0

    def __post_init__(self):
        expected = (3, self.band + 1, 2 * self.band + 1)
        if self.coeffs.shape != expected:
            raise ValueError(f"vector coefficient shape {self.coeffs.shape}, expected {expected}")

    @classmethod
    def zeros(cls, N: int, radius: float = 1.0) -> SpectralVector:
        return cls(N, np.zeros((3, N + 1, 2 * N + 1)), radius)

    @classmethod
    def from_scalars(cls, uY, upsi, uphi) -> SpectralVector:
        return cls(uY.band, np.stack([uY.coeffs, upsi.coeffs, uphi.coeffs]), uY.radius)

    def family(self, name: str) -> SpectralScalar:
        return SpectralScalar(self.band, self.coeffs[FAMILIES.index(name)], self.radius)

    def with_coeffs(self, coeffs: np.ndarray) -> SpectralVector:
        return SpectralVector(self.band, coeffs, self.radius)

    def truncate(self, N: int) -> SpectralVector:
        return SpectralVector(N, reband(self.coeffs, N), self.radius)


@dataclass(frozen=True, eq=False)
class EdmondsVectorCoeffs:
    """Coefficients against ``K^(1), K^(2), K^(3)``, shape ``(3, N + 1, 2N + 1)``."""

    band: int
    coeffs: np.ndarray
    radius: float = 1.0


def vector_mask(N: int) -> np.ndarray:
    """Valid slots per family: ``Y`` from degree 0, ``Psi`` and ``Phi`` from degree 1."""
    mask = np.repeat(triangle_mask(N)[None], 3, axis=0)
    mask[1:, 0] = False
    return mask


def inv_sqrt_nn1(N: int) -> np.ndarray:
    """``1 / sqrt(n(n+1))`` with the ``n = 0`` entry set to zero."""
    n = np.arange(N + 1, dtype=float)
    out = np.zeros(N + 1)
    out[1:] = 1.0 / np.sqrt(n[1:] * (n[1:] + 1))
    return out


# Each term: (component, latitude table, longitude table, family, degree scale).
# A family's contribution to a component is sum_nj c_nj * scale_n * lat_n^|j| * lon_j.
def _vector_terms(N: int):
    s = inv_sqrt_nn1(N)
    one = np.ones(N + 1)
    return [
        ((0,), "P", "T", 0, one),
        ((1,), "Pc", "D", 1, s),
        ((2,), "dP", "T", 1, s),
        ((1,), "dP", "T", 2, -s),
        ((2,), "Pc", "D", 2, s),
    ]


def synthesize_terms(fac, coeffs: np.ndarray, terms, out: np.ndarray) -> np.ndarray:
    for comp, lat, lon, fam, scale in terms:
        c = coeffs[fam] * scale[:, None]
        if np.any(c):
            out[(...,) + comp] += fac.synthesize(c, lat, lon)
    return out


def analyze_terms(fac, values: np.ndarray, terms, out: np.ndarray) -> np.ndarray:
    for comp, lat, lon, fam, scale in terms:
        out[fam] += scale[:, None] * fac.analyze(values[(...,) + comp], lat, lon)
    return out


def vsft_inverse(coeffs: SpectralVector, grid: SphereGrid) -> GridVector:
    """Synthesis of ``sum u^Y Y + u^Psi Psi + u^Phi Phi`` in frame components."""
    N = coeffs.band
    fac = harmonic_factors(N, grid)
    values = synthesize_terms(fac, coeffs.coeffs, _vector_terms(N), np.zeros(grid.shape + (3,)))
    return GridVector(grid, values, FRAME)


def vsft_forward(field: GridVector, N: int) -> SpectralVector:
    """Quadrature projections ``<u . Y>``, ``<u . Psi>``, ``<u . Phi>`` up to band ``N``.

    Frame-component integrands are polynomials in ``t`` of degree at most ``2N``,
    so a grid supporting band ``N`` is exact.
    """
    grid = field.grid
    grid.require(N)
    fac = harmonic_factors(N, grid)
    values = field.to_frame().values
    coeffs = analyze_terms(fac, values, _vector_terms(N), np.zeros((3, N + 1, 2 * N + 1)))
    return SpectralVector(N, coeffs * vector_mask(N), grid.radius)


def eval_vector_basis(kind: str, n: int, j: int, grid: SphereGrid) -> GridVector:
    """Samples of ``Y``, ``Psi`` or ``Phi`` for degree ``n`` and order ``j``."""
    check_index(n, j)
    if kind not in FAMILIES:
        raise ValueError(f"unknown vector family {kind!r}; expected one of {FAMILIES}")
    if kind != "Y" and n == 0:
        raise InvalidIndexError(f"{kind} vanishes identically at degree 0")
    c = SpectralVector.zeros(n, grid.radius)
    c.coeffs[FAMILIES.index(kind), n, j + n] = 1.0
    return vsft_inverse(c, grid)


def edmonds_matrix(n: int) -> np.ndarray:
    """Orthogonal map from ``(Y, Psi, Phi)`` coefficients to ``(K1, K2, K3)`` at degree ``n``.

    ``K1`` has Cartesian components of degree ``n + 1``, ``K2`` of degree ``n - 1``
    and ``K3`` of degree ``n``.  At ``n = 0`` it reduces to the identity.
    """
    if n < 0:
        raise InvalidIndexError(f"degree must be non-negative, got {n}")
    a, b = np.sqrt(n + 1.0), np.sqrt(float(n))
    d = np.sqrt(2.0 * n + 1.0)
    return np.array([[a / d, -b / d, 0.0], [b / d, a / d, 0.0], [0.0, 0.0, 1.0]])


def edmonds_stack(N: int) -> np.ndarray:
    return np.stack([edmonds_matrix(n) for n in range(N + 1)])


def to_edmonds(coeffs: SpectralVector) -> EdmondsVectorCoeffs:
    S = edmonds_stack(coeffs.band)
    return EdmondsVectorCoeffs(coeffs.band, np.einsum("nab,bnj->anj", S, coeffs.coeffs), coeffs.radius)


def from_edmonds(coeffs: EdmondsVectorCoeffs) -> SpectralVector:
    S = edmonds_stack(coeffs.band)
    return SpectralVector(coeffs.band, np.einsum("nba,bnj->anj", S, coeffs.coeffs), coeffs.radius)


# Degree carried by the Cartesian components of K^(i), as an offset from n, and the
# kernel shift that compensates it.
EDMONDS_DEGREE_OFFSET = (1, -1, 0)
EDMONDS_MIN_DEGREE = (0, 1, 1)


def check_kernel_band(kernel: ZonalKernelSpectrum, N: int) -> None:
    if kernel.nmax < N:
        raise BandMismatchError(f"kernel covers degrees up to {kernel.nmax}, field has band {N}")


def convolve_vector(coeffs: SpectralVector, kernel: ZonalKernelSpectrum) -> SpectralVector:
    """Generalized vector convolution in the canonical basis: every coefficient scales by ``G_hat(n)``."""
    g = kernel.multipliers(coeffs.band)
    return coeffs.with_coeffs(coeffs.coeffs * g[None, :, None])


def extend_kernel(kernel: ZonalKernelSpectrum, M: int) -> ZonalKernelSpectrum:
    """Pad the spectrum with zeros up to degree ``M`` (no-op if already long enough)."""
    if kernel.nmax >= M:
        return kernel
    ghat = np.zeros(M + 1)
    ghat[: kernel.nmax + 1] = kernel.ghat
    return ZonalKernelSpectrum(ghat, kernel.radius, kernel.below_range, kernel.shift)


def convolve_cartesian_components(
    values: np.ndarray,
    grid: SphereGrid,
    multipliers: np.ndarray,
    min_degree: int,
    out_grid: SphereGrid,
) -> np.ndarray:
    """Plain scalar convolution of every trailing-axis component of ``values``.

    Each component is analysed to the band of ``multipliers``, scaled degreewise and
    synthesized on ``out_grid``.  Degrees below ``min_degree`` are structurally empty
    for the caller's family and are zeroed rather than scaled.
    """
    M = multipliers.size - 1
    g = multipliers.copy()
    g[:min_degree] = 0.0
    comps = values.reshape(grid.shape + (-1,))
    out = np.empty(out_grid.shape + (comps.shape[-1],))
    for k in range(comps.shape[-1]):
        c = sft_forward(GridScalar(grid, comps[..., k]), M)
        out[..., k] = sft_inverse(c.with_coeffs(c.coeffs * g[:, None]), out_grid).values
    return out.reshape(out_grid.shape + values.shape[2:])


def convolve_vector_edmonds_oracle(
    field: GridVector, kernel: ZonalKernelSpectrum, N: int | None = None
) -> GridVector:
    """Generalized vector convolution evaluated the long way round.

    The field is split into its three Edmonds parts, each part is sampled in
    Cartesian components on a band ``N + 1`` grid, every component is convolved as
    a scalar with the matching shifted kernel, and the parts are summed.

    Parameters
    ----------
    field : GridVector
        Band-limited input on a quadrature grid.
    kernel : ZonalKernelSpectrum
        Must cover degrees up to ``N``.
    N : int, optional
        Band limit of the field; defaults to the band the grid resolves.

    Returns
    -------
    GridVector
        Cartesian components on the input grid.
    """
    grid = field.grid
    N = grid.band if N is None else N
    check_kernel_band(kernel, N)
    M = N + 1
    work = build_gauss_grid(M, grid.radius)
    parts = to_edmonds(vsft_forward(field, N))
    kernel = extend_kernel(kernel, M + 1)
    total = np.zeros(grid.shape + (3,))
    for i, offset in enumerate(EDMONDS_DEGREE_OFFSET):
        only = np.zeros_like(parts.coeffs)
        only[i] = parts.coeffs[i]
        if not np.any(only):
            continue
        u_i = vsft_inverse(from_edmonds(EdmondsVectorCoeffs(N, only, parts.radius)), work).to_cartesian()
        g = shifted(kernel, -offset).ghat[: M + 1]
        total += convolve_cartesian_components(u_i.values, work, g, EDMONDS_MIN_DEGREE[i] + offset, grid)
    return GridVector(grid, total, CARTESIAN)
