"""Filtering of scalar, vector and tensor fields, and the commutation check.

:func:`verify_commutation` evaluates fifteen relations of the form
``filter(op(x)) == op(filter(x))``.  The left side applies the operator to grid
samples (through Cartesian components where possible) and then filters with the
Edmonds-split oracles.  The right side filters spectrally with a diagonal
multiplier and applies the operator through its closed-form coefficient table.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import diffops as ops
from .kernels import ZonalKernelSpectrum
from .sh_core import (
    GridScalar,
    SpectralScalar,
    build_gauss_grid,
    random_coeffs,
    sft_forward,
    sft_inverse,
)
from .tensor_sphere import (
    GridTensor,
    SpectralTensor,
    convolve_tensor,
    convolve_tensor_edmonds_oracle,
    tensor_mask,
    tsft_forward,
    tsft_inverse,
)
from .vector_sphere import (
    CARTESIAN,
    GridVector,
    SpectralVector,
    convolve_vector,
    convolve_vector_edmonds_oracle,
    vector_mask,
    vsft_forward,
    vsft_inverse,
)


def filter_scalar(f, kernel: ZonalKernelSpectrum, N: int | None = None):
    """``G * f``; accepts coefficients or grid samples and returns the same kind."""
    if isinstance(f, GridScalar):
        N = f.grid.band if N is None else N
        return sft_inverse(filter_scalar(sft_forward(f, N), kernel), f.grid)
    g = kernel.multipliers(f.band)
    return f.with_coeffs(f.coeffs * g[:, None])


def filter_vector(u, kernel: ZonalKernelSpectrum, N: int | None = None):
    """Generalized vector convolution of coefficients or grid samples."""
    if isinstance(u, GridVector):
        N = u.grid.band if N is None else N
        out = vsft_inverse(convolve_vector(vsft_forward(u, N), kernel), u.grid)
        return out.to_cartesian() if u.basis == CARTESIAN else out
    return convolve_vector(u, kernel)


def filter_tensor(T, kernel: ZonalKernelSpectrum, N: int | None = None):
    """Generalized tensor convolution of coefficients or grid samples."""
    if isinstance(T, GridTensor):
        N = T.grid.band if N is None else N
        out = tsft_inverse(convolve_tensor(tsft_forward(T, N), kernel), T.grid)
        return out.to_cartesian() if T.basis == CARTESIAN else out
    return convolve_tensor(T, kernel)


# ---------------------------------------------------------------- grid operators for the left side


def div_star_grid(u: GridVector, N: int) -> SpectralScalar:
    """Tangential divergence from Cartesian component gradients.

    ``sum_i grad*(u_i) . e_i`` is the full surface divergence, which adds
    ``2 u_r`` to the tangential one.
    """
    work = build_gauss_grid(N + 1, u.grid.radius)
    cart = vsft_inverse(vsft_forward(u, N), work).to_cartesian()
    total = np.zeros(work.shape)
    for i in range(3):
        gi = vsft_inverse(ops.grad_star(sft_forward(cart.component(i), N + 1)), work).to_cartesian()
        total += gi.values[..., i]
    total -= 2.0 * np.einsum("ijk,ijk->ij", cart.values, work.e_r)
    return sft_forward(GridScalar(work, total), N)


def lstar_dot_grid(u: GridVector, N: int) -> SpectralScalar:
    """``L* . u = -div*(e_r x u) = div*(u x e_r)`` on samples."""
    return div_star_grid(ops.cross_e_r_grid(u), N)


def _curl_grid(u: GridVector, N: int) -> GridVector:
    c = lstar_dot_grid(u, N)
    return ops.times_e_r_grid(sft_inverse(c, u.grid))


# ---------------------------------------------------------------- report


@dataclass(frozen=True)
class CommutationRecord:
    name: str
    left_norm: float
    right_norm: float
    residual: float
    passed: bool


@dataclass
class CommutationReport:
    band: int
    tolerance: float
    records: list[CommutationRecord] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.records)

    def __getitem__(self, name: str) -> CommutationRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_text(self) -> str:
        lines = [f"{'relation':<18} {'|left|':>12} {'|right|':>12} {'residual':>12}  status"]
        for r in self.records:
            status = "PASS" if r.passed else "FAIL"
            lines.append(
                f"{r.name:<18} {r.left_norm:12.5e} {r.right_norm:12.5e} {r.residual:12.5e}  {status}"
            )
        verdict = "all passed" if self.all_passed else "FAILURES"
        lines.append(f"band={self.band} tol={self.tolerance:.1e}: {verdict}")
        return "\n".join(lines)

    def to_keyvalue(self) -> str:
        lines = [f"band={self.band}", f"tolerance={self.tolerance!r}"]
        for r in self.records:
            lines.append(f"{r.name}.left_norm={r.left_norm!r}")
            lines.append(f"{r.name}.right_norm={r.right_norm!r}")
            lines.append(f"{r.name}.residual={r.residual!r}")
            lines.append(f"{r.name}.passed={'true' if r.passed else 'false'}")
        lines.append(f"all_passed={'true' if self.all_passed else 'false'}")
        return "\n".join(lines)


RELATIONS = (
    "grad",
    "lstar",
    "f_e_r",
    "u_dot_e_r",
    "u_cross_e_r",
    "div",
    "lstar_dot",
    "curl",
    "beltrami",
    "e_r_outer_u",
    "u_outer_e_r",
    "grad_tensor",
    "lstar_tensor",
    "div_tensor",
    "lstar_dot_tensor",
)


def _cart(x) -> np.ndarray:
    if isinstance(x, (GridVector, GridTensor)):
        return x.to_cartesian().values
    return x.values


def random_fields(N: int, seed: int, radius: float = 1.0, amplitude: float = 1.0):
    """Reproducible random scalar, vector and tensor coefficients at band ``N``."""
    rng = np.random.default_rng(seed)
    f = SpectralScalar(N, amplitude * random_coeffs(N, rng), radius)
    u = SpectralVector(N, amplitude * rng.standard_normal((3, N + 1, 2 * N + 1)) * vector_mask(N), radius)
    T = SpectralTensor(N, amplitude * rng.standard_normal((3, 3, N + 1, 2 * N + 1)) * tensor_mask(N), radius)
    return f, u, T


def _sides(name: str, f, u, T, kernel, grid):
    """Return ``(left, right)`` grid objects for one relation."""
    N = f.band
    fg = sft_inverse(f, grid)
    ug = vsft_inverse(u, grid)
    vec_oracle = lambda v: convolve_vector_edmonds_oracle(v, kernel, N)
    ten_oracle = lambda t: convolve_tensor_edmonds_oracle(t, kernel, N)
    sca_filter = lambda s: filter_scalar(s, kernel, N)
    fbar = filter_scalar(f, kernel)
    ubar = convolve_vector(u, kernel)

    if name == "grad":
        return vec_oracle(ops.grad_star_grid(fg, N)), vsft_inverse(ops.grad_star(fbar), grid)
    if name == "lstar":
        return vec_oracle(ops.lstar_grid(fg, N)), vsft_inverse(ops.lstar(fbar), grid)
    if name == "f_e_r":
        return vec_oracle(ops.times_e_r_grid(fg)), vsft_inverse(ops.times_e_r(fbar), grid)
    if name == "u_dot_e_r":
        return sca_filter(ops.dot_e_r_grid(ug)), sft_inverse(ops.radial_part(ubar), grid)
    if name == "u_cross_e_r":
        return vec_oracle(ops.cross_e_r_grid(ug)), vsft_inverse(ops.cross_e_r(ubar), grid)
    if name == "div":
        left = sft_inverse(div_star_grid(ug, N), grid)
        return sca_filter(left), sft_inverse(ops.div_star(ubar), grid)
    if name == "lstar_dot":
        left = sft_inverse(lstar_dot_grid(ug, N), grid)
        return sca_filter(left), sft_inverse(ops.lstar_dot(ubar), grid)
    if name == "curl":
        return vec_oracle(_curl_grid(ug, N)), ops.curl_star(ubar, grid)
    if name == "beltrami":
        left = sft_inverse(div_star_grid(ops.grad_star_grid(fg, N), N), grid)
        return sca_filter(left), sft_inverse(ops.beltrami(fbar), grid)
    if name == "e_r_outer_u":
        return ten_oracle(ops.e_r_outer_grid(ug)), tsft_inverse(ops.e_r_outer(ubar), grid)
    if name == "u_outer_e_r":
        return ten_oracle(ops.outer_e_r_grid(ug)), tsft_inverse(ops.outer_e_r(ubar), grid)
    if name == "grad_tensor":
        left = tsft_inverse(ops.grad_tensor(ug, N), grid)
        return ten_oracle(left), tsft_inverse(ops.grad_tensor_spectral(ubar), grid)
    if name == "lstar_tensor":
        left = tsft_inverse(ops.lstar_tensor(ug, N), grid)
        return ten_oracle(left), tsft_inverse(ops.lstar_tensor_spectral(ubar), grid)
    if name == "div_tensor":
        left = vsft_inverse(ops.div_star_tensor_grid(T), grid)
        return vec_oracle(left), vsft_inverse(ops.div_star_tensor(convolve_tensor(T, kernel)), grid)
    if name == "lstar_dot_tensor":
        left = vsft_inverse(ops.lstar_dot_tensor_grid(T), grid)
        return vec_oracle(left), vsft_inverse(ops.lstar_dot_tensor(convolve_tensor(T, kernel)), grid)
    raise ValueError(f"unknown relation {name!r}")


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("SPHERE_COARSE_THREADS", "1")))
    except ValueError:
        return 1


def verify_commutation(
    band: int,
    kernel: ZonalKernelSpectrum,
    seed: int = 0,
    tolerance: float = 1e-9,
    radius: float = 1.0,
    amplitude: float = 1.0,
    relations: tuple[str, ...] = RELATIONS,
) -> CommutationReport:
    """Check that filtering commutes with every tangential operator.

    Parameters
    ----------
    band : int
        Band limit of the random inputs.
    kernel : ZonalKernelSpectrum
        Filter; must cover degrees up to ``band``.
    seed : int
        Seed for the random scalar, vector and tensor coefficients.
    tolerance : float
        Relative residual below which a relation passes.
    radius : float
        Sphere radius carried by fields and grid.
    amplitude : float
        Scale of the random inputs; ``0`` gives zero fields.

    Returns
    -------
    CommutationReport
        One record per relation, in a fixed order.  Relation failures are
        reported, not raised.
    """
    f, u, T = random_fields(band, seed, radius, amplitude)
    grid = build_gauss_grid(band, radius)

    def run(name: str) -> CommutationRecord:
        left, right = _sides(name, f, u, T, kernel, grid)
        a, b = _cart(left), _cart(right)
        ln, rn = float(np.max(np.abs(a))), float(np.max(np.abs(b)))
        res = float(np.max(np.abs(a - b))) / max(ln, rn, 1e-300)
        return CommutationRecord(name, ln, rn, res, bool(res < tolerance))

    threads = min(_thread_count(), len(relations))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            records = list(pool.map(run, relations))
    else:
        records = [run(name) for name in relations]
    return CommutationReport(band, tolerance, records)
