"""Filtering of scalar, vector and rank-2 tensor fields on the sphere.

Fields are band-limited and represented either by samples on a Gauss-Legendre
grid or by coefficients in a real, mean-normalized spherical harmonic basis.
The generalized vector and tensor convolutions are diagonal in the canonical
bases, commute with the tangential differential operators and agree with plain
scalar filtering of Helmholtz potentials; the test suite checks each claim
numerically.
"""

from .filtering import (
    CommutationReport,
    filter_scalar,
    filter_tensor,
    filter_vector,
    verify_commutation,
)
from .kernels import (
    ZonalKernelSpectrum,
    builtin_kernel,
    inverse_legendre,
    legendre_transform,
    parse_kernel_spec,
    shifted,
)
from .sh_core import (
    GridScalar,
    SpectralScalar,
    SphereGrid,
    build_gauss_grid,
    eval_Y,
    power_spectrum,
    sft_forward,
    sft_inverse,
)
from .tensor_sphere import GridTensor, SpectralTensor, tsft_forward, tsft_inverse
from .vector_sphere import GridVector, SpectralVector, vsft_forward, vsft_inverse

__version__ = "0.1.0"

__all__ = [
    "CommutationReport",
    "GridScalar",
    "GridTensor",
    "GridVector",
    "SpectralScalar",
    "SpectralTensor",
    "SpectralVector",
    "SphereGrid",
    "ZonalKernelSpectrum",
    "build_gauss_grid",
    "builtin_kernel",
    "eval_Y",
    "filter_scalar",
    "filter_tensor",
    "filter_vector",
    "inverse_legendre",
    "legendre_transform",
    "parse_kernel_spec",
    "power_spectrum",
    "sft_forward",
    "sft_inverse",
    "shifted",
    "tsft_forward",
    "tsft_inverse",
    "verify_commutation",
    "vsft_forward",
    "vsft_inverse",
]
