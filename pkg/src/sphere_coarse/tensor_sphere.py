"""Rank-2 tensor spherical harmonics and the generalized tensor convolution.

Tensor coefficients are stored as ``(3, 3, N + 1, 2N + 1)`` arrays; slot
``[i - 1, k - 1]`` holds the coefficients of family ``Y^(i,k)``.  Grid tensors
carry a ``(3, 3)`` block per point, in frame ``(r, lam, phi)`` or Cartesian
components.

Families in frame terms, with ``s = sqrt(n(n+1))``:

* ``(1,1)`` ``e_r (x) e_r Y``;  ``(1,2)``, ``(1,3)`` ``e_r (x) Psi``, ``e_r (x) Phi``
* ``(2,1)``, ``(3,1)`` ``Psi (x) e_r``, ``Phi (x) e_r``
* ``(2,2)`` ``Y`` times the tangential identity over ``sqrt(2)``
* ``(3,3)`` ``Y`` times the tangential rotation ``e_r x`` over ``sqrt(2)``
* ``(2,3)`` the traceless symmetric part of the tangential Hessian of ``Y``, normalized
* ``(3,2)`` its rotation by ``e_r x`` on the first index
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .kernels import ZonalKernelSpectrum, shifted
from .sh_core import (
    InvalidIndexError,
    SphereGrid,
    build_gauss_grid,
    check_index,
    harmonic_factors,
    reband,
    triangle_mask,
)
from .vector_sphere import (
    CARTESIAN,
    FRAME,
    analyze_terms,
    check_kernel_band,
    convolve_cartesian_components,
    extend_kernel,
    synthesize_terms,
)

FAMILY_PAIRS = tuple((i, k) for i in (1, 2, 3) for k in (1, 2, 3))

# smallest degree at which each family exists
MIN_DEGREE = np.array([[0, 1, 1], [1, 0, 2], [1, 2, 0]])


@dataclass(frozen=True, eq=False)
class GridTensor:
    """Samples of a rank-2 tensor field; ``values`` has shape ``(nlat, nlon, 3, 3)``."""

    grid: SphereGrid
    values: np.ndarray
    basis: str = FRAME

    def __post_init__(self):
        if self.values.shape != self.grid.shape + (3, 3):
            raise ValueError(f"tensor values shape {self.values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("tensor samples must be finite")
        if self.basis not in (FRAME, CARTESIAN):
            raise ValueError(f"unknown component basis {self.basis!r}")

    def to_cartesian(self) -> GridTensor:
        if self.basis == CARTESIAN:
            return self
        F = self.grid.frame
        return GridTensor(self.grid, np.einsum("ijac,ijbd,ijab->ijcd", F, F, self.values), CARTESIAN)

    def to_frame(self) -> GridTensor:
        if self.basis == FRAME:
            return self
        F = self.grid.frame
        return GridTensor(self.grid, np.einsum("ijac,ijbd,ijcd->ijab", F, F, self.values), FRAME)

    def __add__(self, other: GridTensor) -> GridTensor:
        return GridTensor(self.grid, self.to_cartesian().values + other.to_cartesian().values, CARTESIAN)

    def scaled(self, alpha: float) -> GridTensor:
        return GridTensor(self.grid, alpha * self.values, self.basis)

    def mean(self) -> np.ndarray:
        """Mean of the Cartesian components."""
        return self.grid.mean(self.to_cartesian().values)


@dataclass(frozen=True, eq=False)
class SpectralTensor:
    """Coefficients of the nine ``Y^(i,k)`` families, shape ``(3, 3, N + 1, 2N + 1)``."""

    band: int
    coeffs: np.ndarray
    radius: float = 1.0

    def __post_init__(self):
        expected = (3, 3, self.band + 1, 2 * self.band + 1)
        if self.coeffs.shape != expected:
            raise ValueError(f"tensor coefficient shape {self.coeffs.shape}, expected {expected}")

    @classmethod
    def zeros(cls, N: int, radius: float = 1.0) -> SpectralTensor:
        return cls(N, np.zeros((3, 3, N + 1, 2 * N + 1)), radius)

    def family(self, i: int, k: int) -> np.ndarray:
        return self.coeffs[i - 1, k - 1]

    def with_coeffs(self, coeffs: np.ndarray) -> SpectralTensor:
        return SpectralTensor(self.band, coeffs, self.radius)

    def truncate(self, N: int) -> SpectralTensor:
        return SpectralTensor(N, reband(self.coeffs, N), self.radius)


def tensor_mask(N: int) -> np.ndarray:
    """Valid ``(family, n, j)`` slots, shape ``(3, 3, N + 1, 2N + 1)``."""
    tri = triangle_mask(N)
    n = np.arange(N + 1)[None, None, :, None]
    return tri[None, None] & (n >= MIN_DEGREE[:, :, None, None])


def _degree_scales(N: int):
    n = np.arange(N + 1, dtype=float)
    nn1 = n * (n + 1)
    s = np.zeros(N + 1)
    s[1:] = 1.0 / np.sqrt(nn1[1:])
    k = np.zeros(N + 1)
    k[2:] = s[2:] / np.sqrt(2.0 * (nn1[2:] - 2.0))
    return nn1, s, k


def _tensor_terms(N: int):
    nn1, s, k = _degree_scales(N)
    one = np.ones(N + 1)
    h = one / np.sqrt(2.0)
    R, L, P = 0, 1, 2
    return [
        ((R, R), "P", "T", (0, 0), one),
        # e_r (x) Psi, e_r (x) Phi
        ((R, L), "Pc", "D", (0, 1), s),
        ((R, P), "dP", "T", (0, 1), s),
        ((R, L), "dP", "T", (0, 2), -s),
        ((R, P), "Pc", "D", (0, 2), s),
        # Psi (x) e_r, Phi (x) e_r
        ((L, R), "Pc", "D", (1, 0), s),
        ((P, R), "dP", "T", (1, 0), s),
        ((L, R), "dP", "T", (2, 0), -s),
        ((P, R), "Pc", "D", (2, 0), s),
        # tangential identity and rotation
        ((L, L), "P", "T", (1, 1), h),
        ((P, P), "P", "T", (1, 1), h),
        ((L, P), "P", "T", (2, 2), -h),
        ((P, L), "P", "T", (2, 2), h),
        # traceless Hessian: diagonal (2 Hll + n(n+1) P) T, off-diagonal 2 Hlp D
        ((L, L), "Hll", "T", (1, 2), 2 * k),
        ((L, L), "P", "T", (1, 2), k * nn1),
        ((P, P), "Hll", "T", (1, 2), -2 * k),
        ((P, P), "P", "T", (1, 2), -k * nn1),
        ((L, P), "Hlp", "D", (1, 2), 2 * k),
        ((P, L), "Hlp", "D", (1, 2), 2 * k),
        # and its rotation
        ((L, L), "Hlp", "D", (2, 1), -2 * k),
        ((P, P), "Hlp", "D", (2, 1), 2 * k),
        ((L, P), "Hll", "T", (2, 1), 2 * k),
        ((L, P), "P", "T", (2, 1), k * nn1),
        ((P, L), "Hll", "T", (2, 1), 2 * k),
        ((P, L), "P", "T", (2, 1), k * nn1),
    ]


def tsft_inverse(coeffs: SpectralTensor, grid: SphereGrid) -> GridTensor:
    """Synthesis of ``sum T^(i,k)_{n,j} Y^(i,k)_{n,j}`` in frame components."""
    N = coeffs.band
    fac = harmonic_factors(N, grid)
    values = synthesize_terms(fac, coeffs.coeffs, _tensor_terms(N), np.zeros(grid.shape + (3, 3)))
    return GridTensor(grid, values, FRAME)


def tsft_forward(field: GridTensor, N: int) -> SpectralTensor:
    """Quadrature projections ``<T . Y^(i,k)_{n,j}>`` up to band ``N``."""
    grid = field.grid
    grid.require(N)
    fac = harmonic_factors(N, grid)
    out = analyze_terms(fac, field.to_frame().values, _tensor_terms(N), np.zeros((3, 3, N + 1, 2 * N + 1)))
    return SpectralTensor(N, out * tensor_mask(N), grid.radius)


def eval_tensor_basis(i: int, k: int, n: int, j: int, grid: SphereGrid) -> GridTensor:
    """Samples of ``Y^(i,k)_{n,j}`` in frame components."""
    check_index(n, j)
    if (i, k) not in FAMILY_PAIRS:
        raise ValueError(f"tensor family indices must lie in 1..3, got ({i}, {k})")
    if n < MIN_DEGREE[i - 1, k - 1]:
        raise InvalidIndexError(f"family ({i},{k}) needs degree >= {MIN_DEGREE[i - 1, k - 1]}, got {n}")
    c = SpectralTensor.zeros(n, grid.radius)
    c.coeffs[i - 1, k - 1, n, j + n] = 1.0
    return tsft_inverse(c, grid)


# Row and column families of the two blocks, as zero-based (i, k) slots.
A_ROWS = ((0, 0), (0, 1), (1, 0), (1, 1), (2, 2))
A_COLS = ((0, 0), (0, 1), (1, 0), (1, 1), (1, 2))
B_ROWS = ((0, 2), (1, 2), (2, 0), (2, 1))
B_COLS = ((0, 2), (2, 0), (2, 1), (2, 2))

# Cartesian degree of K^(i,k) relative to n
K_DEGREE_OFFSET = np.array([[2, 0, 1], [0, -2, -1], [1, -1, 0]])


def _core_a(n: float) -> np.ndarray:
    return np.array(
        [
            [(n + 1) * (n + 2), -(n + 2), -(n + 2), -0.5 * (n + 2) * (n + 1), 0.5],
            [n * n, n, 1 - n, 0.5 * (n - 1) * n, -0.5],
            [(n + 1) ** 2, -(n + 1), n + 2, 0.5 * (n + 1) * (n + 2), -0.5],
            [(n - 1) * n, n - 1, n - 1, -0.5 * (n - 1) * n, 0.5],
            [0, 0, 1, -0.5 * n * (n + 1), -0.5],
        ]
    )


def _core_b(n: float) -> np.ndarray:
    return np.array(
        [
            [n + 1, 1, -0.5, -0.5 * n * (n + 1)],
            [n, -1, 0.5, 0.5 * n * (n + 1)],
            [0, n + 2, -0.5, 0.5 * (n + 1) * (n + 2)],
            [0, n - 1, 0.5, -0.5 * (n - 1) * n],
        ]
    )


def helmholtz_scales(n: int) -> np.ndarray:
    """``(3, 3)`` array of the scale constants ``c^(i,k)(n)``.

    These are the diagonal entries of the column scalings of both blocks and
    relate each unit basis field to the bracket built from a plain scalar.
    """
    nn1 = n * (n + 1.0)
    s = np.sqrt(nn1)
    q = np.sqrt(max(2.0 * nn1 * (nn1 - 2.0), 0.0))
    r2 = np.sqrt(2.0)
    return np.array([[1.0, s, s], [s, r2, q], [s, q, r2]])


def _row_norms_a(n: float) -> np.ndarray:
    return np.sqrt(
        np.clip(
            [
                (n + 1) * (n + 2) * (2 * n + 1) * (2 * n + 3),
                n * n * (2 * n - 1) * (2 * n + 1),
                (n + 1) ** 2 * (2 * n + 1) * (2 * n + 3),
                (2 * n - 1) * (n - 1) * n * (2 * n + 1),
                (n * (n + 1)) ** 2,
            ],
            0.0,
            None,
        )
    )


def _row_norms_b(n: float) -> np.ndarray:
    return np.sqrt(
        np.clip(
            [
                (2 * n + 1) * n * (n + 1) ** 2,
                (2 * n + 1) * n * n * (n + 1),
                (2 * n + 1) * (n + 1) ** 2 * (n + 2),
                (2 * n + 1) * (n - 1) * n * n,
            ],
            0.0,
            None,
        )
    )


@dataclass(frozen=True)
class TensorBasisMatrices:
    """Orthogonal maps from ``Y^(i,k)`` to ``K^(i,k)`` at one degree.

    ``A`` acts on ``(Y11, Y12, Y21, Y22, Y23)`` producing ``(K11, K12, K21, K22, K33)``
    and ``B`` on ``(Y13, Y31, Y32, Y33)`` producing ``(K13, K23, K31, K32)``.  At
    degrees 0 and 1 some rows and columns vanish; ``a_rows``/``a_cols`` (and the
    ``b`` pair) list the surviving slots and ``A``/``B`` are the square blocks over
    them.  ``Ea``/``Eb`` hold the full row normalizations and ``Ca``/``Cb`` the
    column scalings.
    """

    n: int
    A: np.ndarray
    B: np.ndarray
    Ca: np.ndarray
    Cb: np.ndarray
    Ea: np.ndarray
    Eb: np.ndarray
    a_rows: tuple
    a_cols: tuple
    b_rows: tuple
    b_cols: tuple


@lru_cache(maxsize=256)
def tensor_matrices(n: int) -> TensorBasisMatrices:
    """Assemble ``E^-1 (core) C`` for both blocks, reduced to the surviving slots."""
    if n < 0:
        raise InvalidIndexError(f"degree must be non-negative, got {n}")
    c = helmholtz_scales(n)
    Ca = np.diag([c[s] for s in A_COLS])
    Cb = np.diag([c[s] for s in B_COLS])
    Ea = np.diag(_row_norms_a(float(n)))
    Eb = np.diag(_row_norms_b(float(n)))
    blocks = []
    for core, C, E, rows, cols in (
        (_core_a(float(n)), Ca, Ea, A_ROWS, A_COLS),
        (_core_b(float(n)), Cb, Eb, B_ROWS, B_COLS),
    ):
        r = [a for a, slot in enumerate(rows) if E[a, a] > 0]
        q = [b for b, slot in enumerate(cols) if n >= MIN_DEGREE[slot]]
        M = (core @ C)[np.ix_(r, q)] / np.diag(E)[r][:, None]
        blocks.append((M, tuple(rows[a] for a in r), tuple(cols[b] for b in q)))
    (A, ar, ac), (B, br, bc) = blocks
    A.setflags(write=False)
    B.setflags(write=False)
    return TensorBasisMatrices(n, A, B, Ca, Cb, Ea, Eb, ar, ac, br, bc)


def k_mask(N: int) -> np.ndarray:
    """Valid ``K^(i,k)`` slots, shape ``(3, 3, N + 1, 2N + 1)``."""
    mask = np.zeros((3, 3, N + 1, 2 * N + 1), dtype=bool)
    tri = triangle_mask(N)
    for n in range(N + 1):
        m = tensor_matrices(n)
        for slot in m.a_rows + m.b_rows:
            mask[slot + (n,)] = tri[n]
    return mask


def to_k_basis(coeffs: SpectralTensor) -> np.ndarray:
    """Coefficients against ``K^(i,k)``, same layout as the input array."""
    out = np.zeros_like(coeffs.coeffs)
    for n in range(coeffs.band + 1):
        m = tensor_matrices(n)
        for M, rows, cols in ((m.A, m.a_rows, m.a_cols), (m.B, m.b_rows, m.b_cols)):
            y = np.stack([coeffs.coeffs[c + (n,)] for c in cols])
            kk = M @ y
            for a, r in enumerate(rows):
                out[r + (n,)] = kk[a]
    return out


def from_k_basis(kcoeffs: np.ndarray, band: int, radius: float = 1.0) -> SpectralTensor:
    out = np.zeros_like(kcoeffs)
    for n in range(band + 1):
        m = tensor_matrices(n)
        for M, rows, cols in ((m.A, m.a_rows, m.a_cols), (m.B, m.b_rows, m.b_cols)):
            kk = np.stack([kcoeffs[r + (n,)] for r in rows])
            y = M.T @ kk
            for b, c in enumerate(cols):
                out[c + (n,)] = y[b]
    return SpectralTensor(band, out, radius)


def convolve_tensor(coeffs: SpectralTensor, kernel: ZonalKernelSpectrum) -> SpectralTensor:
    """Generalized tensor convolution in the canonical basis: diagonal by ``G_hat(n)``."""
    g = kernel.multipliers(coeffs.band)
    return coeffs.with_coeffs(coeffs.coeffs * g[None, None, :, None])


def convolve_tensor_edmonds_oracle(
    field: GridTensor, kernel: ZonalKernelSpectrum, N: int | None = None
) -> GridTensor:
    """Generalized tensor convolution through the nine ``K`` parts.

    Each part ``T^(i,k)`` is sampled in Cartesian components on a band ``N + 2``
    grid and every component is convolved as a scalar with the kernel shifted by
    minus the family's degree offset (``-2`` for ``(1,1)`` up to ``+2`` for ``(2,2)``).

    Returns
    -------
    GridTensor
        Cartesian components on the input grid.
    """
    grid = field.grid
    N = grid.band if N is None else N
    check_kernel_band(kernel, N)
    M = N + 2
    work = build_gauss_grid(M, grid.radius)
    kc = to_k_basis(tsft_forward(field, N))
    kernel = extend_kernel(kernel, M + 2)
    total = np.zeros(grid.shape + (3, 3))
    for i in range(3):
        for k in range(3):
            if not np.any(kc[i, k]):
                continue
            only = np.zeros_like(kc)
            only[i, k] = kc[i, k]
            part = tsft_inverse(from_k_basis(only, N, grid.radius), work).to_cartesian()
            offset = int(K_DEGREE_OFFSET[i, k])
            g = shifted(kernel, -offset).ghat[: M + 1]
            min_n = min(n for n in range(4) if (i, k) in _k_rows(n))
            total += convolve_cartesian_components(part.values, work, g, min_n + offset, grid)
    return GridTensor(grid, total, CARTESIAN)


def _k_rows(n: int) -> tuple:
    m = tensor_matrices(n)
    return m.a_rows + m.b_rows
