"""Tangential differential operators on the unit-normalized sphere.

Operators are the dimensionless surface operators: ``grad*`` (tangential
gradient), ``L* = e_r x grad*``, their divergence-type adjoints ``div*`` and
``L*.`` (which see only tangential components), the radial curl ``curl*``, the
Beltrami operator and the tensor-valued ``grad* (x) u`` and ``L* (x) u`` built from
Cartesian components.  Tensor divergences contract the first (derivative) slot.

Spectral versions act on coefficients through closed-form tables.  The grid
versions apply the same operators to sampled fields, going through Cartesian
components; the two are kept separate so each can check the other.
"""

from __future__ import annotations

import numpy as np

from .sh_core import (
    GridScalar,
    SpectralScalar,
    SphereGrid,
    build_gauss_grid,
    sft_forward,
    sft_inverse,
)
from .tensor_sphere import GridTensor, SpectralTensor, tensor_mask, tsft_forward, tsft_inverse
from .vector_sphere import (
    CARTESIAN,
    FRAME,
    GridVector,
    SpectralVector,
    vector_mask,
    vsft_forward,
    vsft_inverse,
)


def _sqrt_nn1(N: int) -> np.ndarray:
    n = np.arange(N + 1, dtype=float)
    return np.sqrt(n * (n + 1))


# ---------------------------------------------------------------- spectral, scalar and vector


def grad_star(f: SpectralScalar) -> SpectralVector:
    """``grad* f``: the ``Psi`` coefficients are ``sqrt(n(n+1)) f_{n,j}``."""
    out = SpectralVector.zeros(f.band, f.radius)
    out.coeffs[1] = _sqrt_nn1(f.band)[:, None] * f.coeffs
    return out


def lstar(f: SpectralScalar) -> SpectralVector:
    """``L* f = e_r x grad* f``: the ``Phi`` coefficients are ``sqrt(n(n+1)) f_{n,j}``."""
    out = SpectralVector.zeros(f.band, f.radius)
    out.coeffs[2] = _sqrt_nn1(f.band)[:, None] * f.coeffs
    return out


def div_star(u: SpectralVector) -> SpectralScalar:
    """Tangential divergence; ignores the radial family."""
    return SpectralScalar(u.band, -_sqrt_nn1(u.band)[:, None] * u.coeffs[1], u.radius)


def lstar_dot(u: SpectralVector) -> SpectralScalar:
    """``L* . u = -div*(e_r x u)``; ignores the radial family."""
    return SpectralScalar(u.band, -_sqrt_nn1(u.band)[:, None] * u.coeffs[2], u.radius)


def beltrami(f: SpectralScalar) -> SpectralScalar:
    n = np.arange(f.band + 1, dtype=float)
    return f.with_coeffs(-(n * (n + 1))[:, None] * f.coeffs)


def curl_star_spectral(u: SpectralVector) -> SpectralVector:
    """``curl* u = (L* . u) e_r`` as vector coefficients (radial family only)."""
    out = SpectralVector.zeros(u.band, u.radius)
    out.coeffs[0] = lstar_dot(u).coeffs
    return out


def curl_star(u: SpectralVector, grid: SphereGrid) -> GridVector:
    """``curl* u`` sampled on ``grid``; tangential components are exactly zero."""
    values = np.zeros(grid.shape + (3,))
    values[..., 0] = sft_inverse(lstar_dot(u), grid).values
    return GridVector(grid, values, FRAME)


def radial_part(u: SpectralVector) -> SpectralScalar:
    """``u . e_r`` as a scalar."""
    return SpectralScalar(u.band, u.coeffs[0].copy(), u.radius)


def times_e_r(f: SpectralScalar) -> SpectralVector:
    """``f e_r``."""
    out = SpectralVector.zeros(f.band, f.radius)
    out.coeffs[0] = f.coeffs
    return out


def cross_e_r(u: SpectralVector) -> SpectralVector:
    """``u x e_r``: ``Psi -> -Phi``, ``Phi -> Psi``, radial part dropped."""
    out = SpectralVector.zeros(u.band, u.radius)
    out.coeffs[1] = u.coeffs[2]
    out.coeffs[2] = -u.coeffs[1]
    return out


def e_r_outer(u: SpectralVector) -> SpectralTensor:
    """``e_r (x) u``: families ``(1,1)``, ``(1,2)``, ``(1,3)``."""
    out = SpectralTensor.zeros(u.band, u.radius)
    out.coeffs[0, :] = u.coeffs
    return out


def outer_e_r(u: SpectralVector) -> SpectralTensor:
    """``u (x) e_r``: families ``(1,1)``, ``(2,1)``, ``(3,1)``."""
    out = SpectralTensor.zeros(u.band, u.radius)
    out.coeffs[:, 0] = u.coeffs
    return out


# ---------------------------------------------------------------- spectral, tensor


def _tensor_tables(N: int):
    """Per-degree coefficient tables for ``grad* (x)`` and ``L* (x)`` on the vector basis.

    Returns arrays ``G, L`` of shape ``(N + 1, 3, 3, 3)``: ``G[n, v, i, k]`` is the
    ``Y^(i,k)`` coefficient of ``grad* (x) V_{n,j}`` for vector family ``v``.
    """
    n = np.arange(N + 1, dtype=float)
    nn1 = n * (n + 1)
    s = np.sqrt(nn1)
    q = np.sqrt(np.clip(2.0 * (nn1 - 2.0), 0.0, None)) / 2.0
    r2 = np.sqrt(2.0)
    G = np.zeros((N + 1, 3, 3, 3))
    L = np.zeros((N + 1, 3, 3, 3))
    # radial family: grad* (x) (Y e_r) = sqrt2 Y22 + s Y21
    G[:, 0, 1, 1] = r2
    G[:, 0, 1, 0] = s
    L[:, 0, 2, 2] = r2
    L[:, 0, 2, 0] = s
    # Psi = grad* Y / s and Phi = L* Y / s
    G[:, 1, 1, 2] = q
    G[:, 1, 1, 0] = -1.0
    G[:, 1, 1, 1] = -s / r2
    L[:, 2, 1, 2] = -q
    L[:, 2, 1, 0] = 1.0
    L[:, 2, 1, 1] = -s / r2
    G[:, 2, 2, 1] = q
    G[:, 2, 2, 0] = -1.0
    G[:, 2, 2, 2] = s / r2
    L[:, 1, 2, 1] = q
    L[:, 1, 2, 0] = -1.0
    L[:, 1, 2, 2] = -s / r2
    return G, L


def _apply_tensor_table(u: SpectralVector, table: np.ndarray) -> SpectralTensor:
    coeffs = np.einsum("nvik,vnj->iknj", table, u.coeffs)
    return SpectralTensor(u.band, coeffs * tensor_mask(u.band), u.radius)


def grad_tensor_spectral(u: SpectralVector) -> SpectralTensor:
    """``grad* (x) u`` from vector coefficients via the closed-form table."""
    return _apply_tensor_table(u, _tensor_tables(u.band)[0])


def lstar_tensor_spectral(u: SpectralVector) -> SpectralTensor:
    """``L* (x) u`` from vector coefficients via the closed-form table."""
    return _apply_tensor_table(u, _tensor_tables(u.band)[1])


def _divergence_tables(N: int):
    """``D[n, i, k, v]``: family-``v`` coefficient of ``div* Y^(i,k)_{n,j}``; likewise ``R`` for ``L* .``."""
    n = np.arange(N + 1, dtype=float)
    nn1 = n * (n + 1)
    s = np.sqrt(nn1)
    p = np.sqrt(np.clip(nn1 - 2.0, 0.0, None)) / np.sqrt(2.0)
    r2 = np.sqrt(2.0)
    D = np.zeros((N + 1, 3, 3, 3))
    R = np.zeros((N + 1, 3, 3, 3))
    D[:, 1, 0, 0] = -s
    D[:, 1, 0, 1] = 1.0
    D[:, 1, 1, 0] = -r2
    D[:, 1, 1, 1] = s / r2
    D[:, 1, 2, 1] = -p
    D[:, 2, 0, 2] = 1.0
    D[:, 2, 1, 2] = -p
    D[:, 2, 2, 2] = -s / r2
    R[:, 1, 0, 2] = -1.0
    R[:, 2, 0, 0] = -s
    R[:, 2, 0, 1] = 1.0
    R[:, 1, 1, 2] = s / r2
    R[:, 2, 2, 0] = -r2
    R[:, 2, 2, 1] = s / r2
    R[:, 1, 2, 2] = p
    R[:, 2, 1, 1] = -p
    return D, R


def _apply_div_table(T: SpectralTensor, table: np.ndarray) -> SpectralVector:
    coeffs = np.einsum("nikv,iknj->vnj", table, T.coeffs)
    return SpectralVector(T.band, coeffs * vector_mask(T.band), T.radius)


def div_star_tensor(T: SpectralTensor) -> SpectralVector:
    """``div* . T`` (derivative contracted with the first slot) by the identity table."""
    return _apply_div_table(T, _divergence_tables(T.band)[0])


def lstar_dot_tensor(T: SpectralTensor) -> SpectralVector:
    """``L* . T`` (first slot) by the identity table."""
    return _apply_div_table(T, _divergence_tables(T.band)[1])


# ---------------------------------------------------------------- grid routes


def _cartesian_basis(grid: SphereGrid) -> np.ndarray:
    return np.broadcast_to(np.eye(3), grid.shape + (3, 3))


def _tensor_from_component_gradients(u: GridVector, N: int, op) -> SpectralTensor:
    """Apply ``op`` (scalar -> vector, spectral) to every Cartesian component of ``u``.

    Components of a band ``N`` vector carry degree ``N + 1``, so the work is done
    on a band ``N + 1`` grid and the assembled tensor is analysed back to band ``N``.
    """
    work = build_gauss_grid(N + 1, u.grid.radius)
    if u.grid.supports(N + 1):
        cart = u.to_cartesian()
        work = u.grid
    else:
        cart = vsft_inverse(vsft_forward(u, N), work).to_cartesian()
    values = np.empty(work.shape + (3, 3))
    for i in range(3):
        ci = sft_forward(cart.component(i), N + 1)
        values[..., :, i] = vsft_inverse(op(ci), work).to_cartesian().values
    return tsft_forward(GridTensor(work, values, CARTESIAN), N)


def grad_tensor(u: GridVector, N: int | None = None) -> SpectralTensor:
    """``grad* (x) u = sum_i (grad* u_i) (x) e_i`` through Cartesian components."""
    N = u.grid.band if N is None else N
    return _tensor_from_component_gradients(u, N, grad_star)


def lstar_tensor(u: GridVector, N: int | None = None) -> SpectralTensor:
    """``L* (x) u = sum_i (L* u_i) (x) e_i`` through Cartesian components."""
    N = u.grid.band if N is None else N
    return _tensor_from_component_gradients(u, N, lstar)


def _column_divergence(T: SpectralTensor, op) -> SpectralVector:
    """``sum_m op(T e_m) e_m`` evaluated column by column on a padded grid.

    A band ``N`` tensor has Cartesian columns of vector band ``N + 3`` at most;
    the result is analysed back to band ``N``.
    """
    N = T.band
    M = N + 3
    work = build_gauss_grid(M, T.radius)
    cart = tsft_inverse(T, work).to_cartesian().values
    out = np.empty(work.shape + (3,))
    for m in range(3):
        column = GridVector(work, np.ascontiguousarray(cart[..., :, m]), CARTESIAN)
        out[..., m] = sft_inverse(op(vsft_forward(column, M)), work).values
    return vsft_forward(GridVector(work, out, CARTESIAN), N)


def div_star_tensor_grid(T: SpectralTensor) -> SpectralVector:
    """``div* . T`` by columns: each column is a vector field, only its tangential part counts."""
    return _column_divergence(T, div_star)


def lstar_dot_tensor_grid(T: SpectralTensor) -> SpectralVector:
    """``L* . T`` by columns."""
    return _column_divergence(T, lstar_dot)


def grad_star_grid(f: GridScalar, N: int | None = None) -> GridVector:
    """``grad* f`` sampled on the grid of ``f``."""
    N = f.grid.band if N is None else N
    return vsft_inverse(grad_star(sft_forward(f, N)), f.grid)


def lstar_grid(f: GridScalar, N: int | None = None) -> GridVector:
    N = f.grid.band if N is None else N
    return vsft_inverse(lstar(sft_forward(f, N)), f.grid)


def cross_e_r_grid(u: GridVector) -> GridVector:
    """Pointwise ``u x e_r``."""
    cart = u.to_cartesian().values
    return GridVector(u.grid, np.cross(cart, u.grid.e_r), CARTESIAN)


def dot_e_r_grid(u: GridVector) -> GridScalar:
    return GridScalar(u.grid, np.einsum("ijk,ijk->ij", u.to_cartesian().values, u.grid.e_r))


def times_e_r_grid(f: GridScalar) -> GridVector:
    return GridVector(f.grid, f.values[..., None] * f.grid.e_r, CARTESIAN)


def e_r_outer_grid(u: GridVector) -> GridTensor:
    cart = u.to_cartesian().values
    return GridTensor(u.grid, np.einsum("ija,ijb->ijab", u.grid.e_r, cart), CARTESIAN)


def outer_e_r_grid(u: GridVector) -> GridTensor:
    cart = u.to_cartesian().values
    return GridTensor(u.grid, np.einsum("ija,ijb->ijab", cart, u.grid.e_r), CARTESIAN)
