"""What a mean-preserving kernel does to constant scalar, vector and tensor fields.

A constant scalar is pure degree 0, so any kernel with ``G_hat(0) = 1`` keeps it.
A constant vector lives at degree 1 in each family and a constant tensor splits
into degrees 0, 1 and 2, so those are scaled by ``G_hat(1)`` and ``G_hat(2)``.

Run with ``python3 demos/uniform_fields.py``.
"""

import numpy as np

from sphere_coarse.filtering import filter_scalar, filter_tensor, filter_vector
from sphere_coarse.kernels import builtin_kernel
from sphere_coarse.sh_core import GridScalar, build_gauss_grid
from sphere_coarse.tensor_sphere import GridTensor
from sphere_coarse.vector_sphere import GridVector

N = 12
grid = build_gauss_grid(N)
u0 = np.array([1.0, 2.0, 3.0])
T0 = np.array([[1.0, 2.0, -0.5], [0.0, -1.0, 3.0], [0.7, 0.2, 0.4]])

f = GridScalar(grid, np.full(grid.shape, 2.0))
u = GridVector(grid, np.broadcast_to(u0, grid.shape + (3,)).copy(), "cartesian")
T = GridTensor(grid, np.broadcast_to(T0, grid.shape + (3, 3)).copy(), "cartesian")

sym = 0.5 * (T0 + T0.T)
iso = np.trace(T0) / 3 * np.eye(3)
anti = 0.5 * (T0 - T0.T)

for kind, param in (("truncation", 6), ("abelpoisson", 0.8), ("gaussian", 10.0)):
    k = builtin_kernel(kind, param, N)
    g1, g2 = k.ghat[1], k.ghat[2]
    print(f"{kind}:{param}  G_hat(1) = {g1:.4f}  G_hat(2) = {g2:.4f}")
    print(f"  scalar mean  {filter_scalar(f, k).mean():.6f}  (input 2.0)")
    print(f"  vector mean  {np.round(filter_vector(u, k).mean(), 6)}  (input {u0})")
    predicted = iso + g1 * anti + g2 * (sym - iso)
    got = filter_tensor(T, k).values
    print(f"  tensor: max |filtered - iso - G1 anti - G2 symtraceless| = {np.max(np.abs(got - predicted)):.1e}")
