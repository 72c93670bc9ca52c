"""Check that filtering commutes with the surface operators, then break it on purpose.

Run with ``python3 demos/commutation_check.py``.
"""

import sphere_coarse.filtering as filtering
from sphere_coarse.filtering import verify_commutation
from sphere_coarse.kernels import builtin_kernel

N = 15
kernel = builtin_kernel("abelpoisson", 0.8, N)

report = verify_commutation(N, kernel, seed=7)
print(report.to_text())

# The two sides of each relation are computed by different routes, so a bug in
# the vector filter only shows up on the relations that filter a vector.
real = filtering.convolve_vector
filtering.convolve_vector = lambda u, kernel: u
try:
    broken = verify_commutation(N, kernel, seed=7)
finally:
    filtering.convolve_vector = real
print("\nwith the vector filter replaced by the identity:")
print(", ".join(r.name for r in broken.records if not r.passed))
