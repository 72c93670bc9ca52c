import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from oracles import fd_latlon, sample_latitudes, sample_longitudes
from sphere_coarse.kernels import builtin_kernel
from sphere_coarse.sh_core import (
    GridScalar,
    InvalidIndexError,
    build_gauss_grid,
    eval_Y,
    point_grid,
    power_spectrum,
    sft_forward,
)
from sphere_coarse.tensor_sphere import (
    FAMILY_PAIRS,
    K_DEGREE_OFFSET,
    MIN_DEGREE,
    GridTensor,
    SpectralTensor,
    convolve_tensor,
    convolve_tensor_edmonds_oracle,
    eval_tensor_basis,
    from_k_basis,
    k_mask,
    tensor_mask,
    tensor_matrices,
    to_k_basis,
    tsft_forward,
    tsft_inverse,
)


def random_tensor(N, rng, radius=1.0):
    return SpectralTensor(N, rng.standard_normal((3, 3, N + 1, 2 * N + 1)) * tensor_mask(N), radius)


@given(st.integers(0, 8), st.integers(0, 2**31 - 1))
@settings(max_examples=15, deadline=None)
def test_round_trip(N, seed):
    T = random_tensor(N, np.random.default_rng(seed))
    back = tsft_forward(tsft_inverse(T, build_gauss_grid(N)), N)
    assert_allclose(back.coeffs, T.coeffs, atol=1e-12)


def test_gram_matrix():
    N = 4
    g = build_gauss_grid(N)
    fields = [
        eval_tensor_basis(i, k, n, j, g).values
        for i, k in FAMILY_PAIRS
        for n in range(MIN_DEGREE[i - 1, k - 1], N + 1)
        for j in range(-n, n + 1)
    ]
    F = np.stack([f.reshape(g.nlat, g.nlon * 9) for f in fields])
    gram = np.einsum("aik,bik,i->ab", F, F, g.weights / (2 * g.nlon))
    assert_allclose(gram, np.eye(len(fields)), atol=1e-13)


@pytest.mark.parametrize("n,j", [(2, 0), (3, -2), (5, 4)])
def test_traceless_hessian_families_against_finite_differences(n, j):
    """``Y^(2,3)`` is the normalized traceless tangential Hessian; ``Y^(3,2)`` its rotation."""
    lat, lon = sample_latitudes(), sample_longitudes()
    c = np.cos(lat)[:, None]
    t = np.sin(lat)[:, None]

    def Y(la, lo):
        return eval_Y(point_grid(la, lo), n, j).values

    def dY_dlat(la, lo):
        return fd_latlon(Y, la, lo)[1]

    def dY_dlon_over_c(la, lo):
        return fd_latlon(Y, la, lo)[2] / np.cos(la)[:, None]

    _, dlat, dlon = fd_latlon(Y, lat, lon)
    h_pp = fd_latlon(dY_dlat, lat, lon)[1]
    h_ll = fd_latlon(lambda la, lo: fd_latlon(Y, la, lo)[2], lat, lon)[2] / c**2 - t / c * dlat
    h_lp = fd_latlon(dY_dlon_over_c, lat, lon)[1]
    nn1 = n * (n + 1)
    assert_allclose(h_ll + h_pp, -nn1 * Y(lat, lon), atol=1e-5 * nn1)

    k = 1.0 / np.sqrt(nn1 * 2 * (nn1 - 2))
    g = point_grid(lat, lon)
    y23 = eval_tensor_basis(2, 3, n, j, g).values
    y32 = eval_tensor_basis(3, 2, n, j, g).values
    tol = 1e-6
    assert_allclose(y23[..., 1, 1], k * (h_ll - h_pp), atol=tol)
    assert_allclose(y23[..., 2, 2], k * (h_pp - h_ll), atol=tol)
    assert_allclose(y23[..., 1, 2], 2 * k * h_lp, atol=tol)
    assert_allclose(y23[..., 2, 1], 2 * k * h_lp, atol=tol)
    # e_r x acting on the first index: row lam <- -row phi, row phi <- row lam
    assert_allclose(y32[..., 1, :], -y23[..., 2, :], atol=1e-13)
    assert_allclose(y32[..., 2, :], y23[..., 1, :], atol=1e-13)
    assert_allclose(y23[..., 0, :], 0, atol=1e-14)
    assert_allclose(y23[..., :, 0], 0, atol=1e-14)


def test_isotropic_and_rotation_families():
    g = build_gauss_grid(3)
    y = eval_Y(g, 2, 1).values
    y22 = eval_tensor_basis(2, 2, 2, 1, g).values
    y33 = eval_tensor_basis(3, 3, 2, 1, g).values
    assert_allclose(y22[..., 1:, 1:], y[..., None, None] * np.eye(2) / np.sqrt(2), atol=1e-14)
    assert_allclose(y33[..., 1:, 1:], y[..., None, None] * np.array([[0, -1], [1, 0]]) / np.sqrt(2), atol=1e-14)


@pytest.mark.parametrize("ik,n", [((1, 2), 0), ((2, 3), 1), ((3, 2), 0)])
def test_below_family_range_rejected(ik, n):
    with pytest.raises(InvalidIndexError):
        eval_tensor_basis(*ik, n, 0, build_gauss_grid(3))


def test_unknown_family_rejected():
    with pytest.raises(ValueError):
        eval_tensor_basis(4, 1, 2, 0, build_gauss_grid(3))


@pytest.mark.parametrize("n", [0, 1, 2, 3, 10, 63])
def test_block_matrices_orthogonal(n):
    m = tensor_matrices(n)
    for M in (m.A, m.B):
        assert M.shape[0] == M.shape[1]
        assert_allclose(M @ M.T, np.eye(len(M)), atol=1e-13)


def test_k_round_trip(rng):
    T = random_tensor(7, rng)
    kc = to_k_basis(T)
    assert np.all(kc[~k_mask(7)] == 0)
    assert_allclose(from_k_basis(kc, 7).coeffs, T.coeffs, atol=1e-13)


@pytest.mark.parametrize("ik", FAMILY_PAIRS)
def test_k_cartesian_degree(ik):
    n, N = 3, 5
    i, k = ik
    g = build_gauss_grid(N)
    kc = np.zeros((3, 3, N + 1, 2 * N + 1))
    kc[i - 1, k - 1, n, N - 1] = 1.0
    cart = tsft_inverse(from_k_basis(kc, N), g).to_cartesian().values
    expected = n + K_DEGREE_OFFSET[i - 1, k - 1]
    for a in range(3):
        for b in range(3):
            p = power_spectrum(sft_forward(GridScalar(g, cart[..., a, b]), N))
            assert np.all(np.delete(p, expected) < 1e-26)


@pytest.mark.parametrize("ik", FAMILY_PAIRS)
def test_lemma_basis_eigenfunctions(ik, kernel_factory):
    N = 5
    kernel = kernel_factory(N)
    g = build_gauss_grid(N)
    i, k = ik
    for n in range(MIN_DEGREE[i - 1, k - 1], N + 1):
        b = eval_tensor_basis(i, k, n, -min(n, 1), g)
        out = convolve_tensor_edmonds_oracle(b, kernel, N)
        assert_allclose(out.values, kernel.ghat[n] * b.to_cartesian().values, atol=1e-11)


def test_oracle_matches_spectral(rng, kernel_factory):
    N = 7
    kernel = kernel_factory(N)
    g = build_gauss_grid(N)
    T = random_tensor(N, rng)
    oracle = convolve_tensor_edmonds_oracle(tsft_inverse(T, g), kernel, N)
    spectral = tsft_inverse(convolve_tensor(T, kernel), g).to_cartesian()
    assert_allclose(oracle.values, spectral.values, atol=1e-11)


def test_uniform_tensor_splits_by_symmetry():
    """Isotropic part keeps ``G_hat(0)``, antisymmetric part ``G_hat(1)``, symmetric traceless ``G_hat(2)``."""
    N = 5
    g = build_gauss_grid(N)
    kernel = builtin_kernel("abelpoisson", 0.8, N)
    T0 = np.arange(9.0).reshape(3, 3) - 2.5 * np.eye(3)
    iso = np.trace(T0) / 3 * np.eye(3)
    anti = 0.5 * (T0 - T0.T)
    sym = T0 - iso - anti
    expected = iso + kernel.ghat[1] * anti + kernel.ghat[2] * sym
    T = GridTensor(g, np.broadcast_to(T0, g.shape + (3, 3)).copy(), "cartesian")
    out = convolve_tensor_edmonds_oracle(T, kernel, N)
    assert_allclose(out.values, np.broadcast_to(expected, out.values.shape), atol=1e-13)


def test_frame_cartesian_round_trip(rng):
    g = build_gauss_grid(4)
    T = GridTensor(g, rng.standard_normal(g.shape + (3, 3)))
    assert_allclose(T.to_cartesian().to_frame().values, T.values, atol=1e-14)
    # e_r (x) e_r in frame components is the (0, 0) unit entry
    E = np.zeros(g.shape + (3, 3))
    E[..., 0, 0] = 1.0
    cart = GridTensor(g, E).to_cartesian().values
    assert_allclose(cart, np.einsum("ija,ijb->ijab", g.e_r, g.e_r), atol=1e-15)


def test_validation():
    g = build_gauss_grid(2)
    with pytest.raises(ValueError):
        GridTensor(g, np.full(g.shape + (3, 3), np.nan))
    with pytest.raises(ValueError):
        GridTensor(g, np.zeros(g.shape + (3,)))
    with pytest.raises(ValueError):
        SpectralTensor(2, np.zeros((3, 3, 2, 5)))
