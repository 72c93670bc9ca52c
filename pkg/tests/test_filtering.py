import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

import sphere_coarse.filtering as filtering
from sphere_coarse import diffops as ops
from sphere_coarse.filtering import (
    RELATIONS,
    filter_scalar,
    filter_tensor,
    filter_vector,
    random_fields,
    verify_commutation,
)
from sphere_coarse.kernels import ZonalKernelSpectrum, builtin_kernel
from sphere_coarse.sh_core import BandMismatchError, GridScalar, build_gauss_grid, sft_inverse
from sphere_coarse.tensor_sphere import GridTensor, tsft_inverse
from sphere_coarse.vector_sphere import GridVector, vsft_inverse


def test_facade_accepts_grid_and_spectral():
    N = 6
    kernel = builtin_kernel("abelpoisson", 0.7, N)
    f, u, T = random_fields(N, 3)
    g = build_gauss_grid(N)
    assert_allclose(filter_scalar(sft_inverse(f, g), kernel).values, sft_inverse(filter_scalar(f, kernel), g).values,
                    atol=1e-13)
    ug = vsft_inverse(u, g)
    assert_allclose(filter_vector(ug, kernel).values, vsft_inverse(filter_vector(u, kernel), g).values, atol=1e-13)
    cart = filter_vector(ug.to_cartesian(), kernel)
    assert cart.basis == "cartesian"
    assert_allclose(cart.to_frame().values, filter_vector(ug, kernel).values, atol=1e-13)
    Tg = tsft_inverse(T, g)
    assert_allclose(filter_tensor(Tg, kernel).values, tsft_inverse(filter_tensor(T, kernel), g).values, atol=1e-13)


def test_kernel_band_too_small():
    f, _, _ = random_fields(6, 0)
    with pytest.raises(BandMismatchError):
        filter_scalar(f, builtin_kernel("gaussian", 3.0, 4))


@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 1000))
@settings(max_examples=20, deadline=None)
def test_linearity(a, b, seed):
    N = 5
    kernel = builtin_kernel("gaussian", 4.0, N)
    f1, u1, T1 = random_fields(N, seed)
    f2, u2, T2 = random_fields(N, seed + 1)
    for filt, x, y in ((filter_scalar, f1, f2), (filter_vector, u1, u2), (filter_tensor, T1, T2)):
        lhs = filt(x.with_coeffs(a * x.coeffs + b * y.coeffs), kernel).coeffs
        rhs = a * filt(x, kernel).coeffs + b * filt(y, kernel).coeffs
        assert_allclose(lhs, rhs, atol=1e-12 * (1 + abs(a) + abs(b)))


@pytest.mark.parametrize("Nc", [0, 3, 6])
def test_truncation_is_idempotent(Nc):
    N = 8
    kernel = builtin_kernel("truncation", Nc, N)
    _, u, T = random_fields(N, 4)
    once = filter_vector(u, kernel)
    assert np.array_equal(filter_vector(once, kernel).coeffs, once.coeffs)
    once_t = filter_tensor(T, kernel)
    assert np.array_equal(filter_tensor(once_t, kernel).coeffs, once_t.coeffs)


def test_truncation_zero_gives_mean():
    N = 6
    g = build_gauss_grid(N)
    f, _, _ = random_fields(N, 9)
    fg = sft_inverse(f, g)
    out = filter_scalar(fg, builtin_kernel("truncation", 0, N))
    assert_allclose(out.values, fg.mean(), atol=1e-13)


def test_scalar_mean_preserved(kernel_factory):
    N = 9
    g = build_gauss_grid(N)
    f, _, _ = random_fields(N, 2)
    fg = sft_inverse(f, g)
    assert_allclose(filter_scalar(fg, kernel_factory(N)).mean(), fg.mean(), atol=1e-13)


def test_vector_mean_scales_by_degree_one_multiplier(kernel_factory):
    """Means of vector fields live at degree 1 and scale by ``G_hat(1)``."""
    N = 9
    kernel = kernel_factory(N)
    g = build_gauss_grid(N)
    _, u, _ = random_fields(N, 2)
    ug = vsft_inverse(u, g)
    assert_allclose(filter_vector(ug, kernel).mean(), kernel.ghat[1] * ug.mean(), atol=1e-13)


def test_report_structure():
    rep = verify_commutation(6, builtin_kernel("abelpoisson", 0.8, 6), seed=1)
    assert [r.name for r in rep.records] == list(RELATIONS)
    assert rep.all_passed
    text = rep.to_text().splitlines()
    assert len(text) == len(RELATIONS) + 2
    assert text[-1].endswith("all passed")
    kv = dict(line.split("=", 1) for line in rep.to_keyvalue().splitlines())
    assert kv["all_passed"] == "true"
    assert float(kv["grad.residual"]) == rep["grad"].residual
    with pytest.raises(KeyError):
        rep["nothing"]


def test_zero_fields_give_zero_residuals():
    rep = verify_commutation(5, builtin_kernel("gaussian", 3.0, 5), amplitude=0.0)
    assert all(r.residual == 0.0 and r.passed for r in rep.records)


def test_truncation_above_band_is_roundoff():
    N = 6
    rep = verify_commutation(N, ZonalKernelSpectrum(np.ones(N + 1)))
    assert max(r.residual for r in rep.records) < 1e-13


def test_sabotaged_table_is_caught(monkeypatch):
    """A wrong spectral table on the right side shows up as a failure, so the sides are independent."""
    real = ops.grad_tensor_spectral
    monkeypatch.setattr(ops, "grad_tensor_spectral", lambda u: real(u).with_coeffs(1.001 * real(u).coeffs))
    rep = verify_commutation(6, builtin_kernel("abelpoisson", 0.8, 6))
    assert not rep["grad_tensor"].passed
    assert rep["lstar_tensor"].passed


def test_sabotaged_filter_is_caught(monkeypatch):
    """Skipping the vector filter on the right side breaks exactly the relations that filter ``u``."""
    monkeypatch.setattr(filtering, "convolve_vector", lambda u, kernel: u)
    rep = verify_commutation(6, builtin_kernel("abelpoisson", 0.8, 6))
    broken = {"u_dot_e_r", "u_cross_e_r", "div", "lstar_dot", "curl",
              "e_r_outer_u", "u_outer_e_r", "grad_tensor", "lstar_tensor"}
    assert {r.name for r in rep.records if not r.passed} == broken


def test_threads_do_not_change_the_report(monkeypatch):
    kernel = builtin_kernel("gaussian", 5.0, 7)
    serial = verify_commutation(7, kernel, seed=3).to_keyvalue()
    monkeypatch.setenv("SPHERE_COARSE_THREADS", "4")
    assert verify_commutation(7, kernel, seed=3).to_keyvalue() == serial


def test_relation_subset_and_unknown():
    rep = verify_commutation(4, builtin_kernel("abelpoisson", 0.5, 4), relations=("div", "curl"))
    assert [r.name for r in rep.records] == ["div", "curl"]
    with pytest.raises(ValueError):
        verify_commutation(4, builtin_kernel("abelpoisson", 0.5, 4), relations=("bogus",))


def test_grid_inputs_keep_their_type():
    N = 4
    g = build_gauss_grid(N)
    kernel = builtin_kernel("abelpoisson", 0.5, N)
    assert isinstance(filter_scalar(GridScalar(g, np.ones(g.shape)), kernel), GridScalar)
    assert isinstance(filter_vector(GridVector(g, np.ones(g.shape + (3,))), kernel), GridVector)
    assert isinstance(filter_tensor(GridTensor(g, np.ones(g.shape + (3, 3))), kernel), GridTensor)
