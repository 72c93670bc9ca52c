"""Helmholtz potentials of vector and tensor fields, and filtering through them.

A vector field splits as ``u = u_r e_r + grad* f + L* eta`` and a rank-2 tensor
into nine brackets built from scalars ``F^(i,k)``.  Each bracket, evaluated at a
single harmonic ``Y_{n,j}``, equals ``c^(i,k)(n) Y^(i,k)_{n,j}``, so the potentials
are recovered by dividing coefficients by those constants.  Filtering the
potentials as plain scalars and rebuilding gives the generalized filter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import ZonalKernelSpectrum
from .sh_core import SpectralScalar
from .tensor_sphere import SpectralTensor, helmholtz_scales, tensor_mask
from .vector_sphere import SpectralVector, inv_sqrt_nn1


@dataclass(frozen=True)
class VectorPotentials:
    """``u_r`` (radial part), ``f`` (irrotational potential) and ``eta`` (toroidal potential)."""

    u_r: SpectralScalar
    f: SpectralScalar
    eta: SpectralScalar


@dataclass(frozen=True, eq=False)
class TensorPotentials:
    """Nine scalar potentials stacked as ``(3, 3, N + 1, 2N + 1)``."""

    band: int
    coeffs: np.ndarray
    radius: float = 1.0

    def potential(self, i: int, k: int) -> SpectralScalar:
        return SpectralScalar(self.band, self.coeffs[i - 1, k - 1], self.radius)


def helmholtz_vector(u: SpectralVector) -> VectorPotentials:
    s = inv_sqrt_nn1(u.band)[:, None]
    return VectorPotentials(
        SpectralScalar(u.band, u.coeffs[0].copy(), u.radius),
        SpectralScalar(u.band, s * u.coeffs[1], u.radius),
        SpectralScalar(u.band, s * u.coeffs[2], u.radius),
    )


def reconstruct_vector(p: VectorPotentials) -> SpectralVector:
    N = p.u_r.band
    n = np.arange(N + 1, dtype=float)
    s = np.sqrt(n * (n + 1))[:, None]
    return SpectralVector(N, np.stack([p.u_r.coeffs, s * p.f.coeffs, s * p.eta.coeffs]), p.u_r.radius)


def filter_vector_via_scalars(u: SpectralVector, kernel: ZonalKernelSpectrum) -> SpectralVector:
    """Filter ``u_r``, ``f`` and ``eta`` as scalars and rebuild the vector."""
    p = helmholtz_vector(u)
    g = kernel.multipliers(u.band)[:, None]
    filtered = VectorPotentials(*(q.with_coeffs(g * q.coeffs) for q in (p.u_r, p.f, p.eta)))
    return reconstruct_vector(filtered)


def _scale_table(N: int) -> np.ndarray:
    """``c^(i,k)(n)`` as a ``(3, 3, N + 1)`` array."""
    return np.stack([helmholtz_scales(n) for n in range(N + 1)], axis=-1)


def helmholtz_tensor(T: SpectralTensor) -> TensorPotentials:
    """Potentials ``F^(i,k)``; slots outside a family's range stay zero."""
    c = _scale_table(T.band)[..., None]
    mask = tensor_mask(T.band)
    safe = np.where(mask, c, 1.0)
    return TensorPotentials(T.band, np.where(mask, T.coeffs / safe, 0.0), T.radius)


def reconstruct_tensor(p: TensorPotentials) -> SpectralTensor:
    c = _scale_table(p.band)[..., None]
    return SpectralTensor(p.band, p.coeffs * c * tensor_mask(p.band), p.radius)


def filter_tensor_via_scalars(T: SpectralTensor, kernel: ZonalKernelSpectrum) -> SpectralTensor:
    """Filter each ``F^(i,k)`` as a scalar and rebuild the tensor."""
    p = helmholtz_tensor(T)
    g = kernel.multipliers(T.band)[None, None, :, None]
    return reconstruct_tensor(TensorPotentials(p.band, p.coeffs * g, p.radius))
