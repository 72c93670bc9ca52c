"""Zonal kernels through their Legendre spectra.

A zonal kernel ``G(t)``, ``t = x . y / r^2``, acts on band-limited fields as the
diagonal multiplier ``G_hat(n) = 2 pi r^2 int_{-1}^{1} G(t) P_n(t) dt``.  The
generalized vector and tensor convolutions evaluate the spectrum at shifted
degrees ``n + s``; entries with ``n + s < 0`` come from ``below_range`` and are
never reached by a band-limited field (the tests check that claim bitwise).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy.special import spherical_in

from .sh_core import BandMismatchError, legendre_polynomials


@dataclass(frozen=True, eq=False)
class ZonalKernelSpectrum:
    """Legendre coefficients ``ghat[n]`` for ``0 <= n <= Nmax``.

    Parameters
    ----------
    ghat : ndarray
        Spectral multipliers.
    radius : float
        Sphere radius the spectrum was computed for.
    below_range : tuple of float
        Values reported for degrees ``-1`` and ``-2``.
    shift : int
        Accumulated shift; ``ghat`` already holds ``G_hat(n + shift)``.
    """

    ghat: np.ndarray
    radius: float = 1.0
    below_range: tuple[float, float] = (0.0, 0.0)
    shift: int = 0

    def __post_init__(self):
        g = np.asarray(self.ghat, dtype=float)
        if g.ndim != 1 or g.size == 0:
            raise ValueError("kernel spectrum must be a non-empty 1-d array")
        if not np.all(np.isfinite(g)):
            raise ValueError("kernel spectrum has non-finite entries")
        object.__setattr__(self, "ghat", g)

    @property
    def nmax(self) -> int:
        return self.ghat.size - 1

    @property
    def normalized(self) -> bool:
        return self.shift == 0 and self.ghat[0] == 1.0

    def at(self, n: int) -> float:
        """``G_hat(n)``, honouring the below-range policy and zero above ``Nmax``."""
        if n < 0:
            return float(self.below_range[-n - 1]) if n >= -2 else 0.0
        return float(self.ghat[n]) if n <= self.nmax else 0.0

    def multipliers(self, N: int) -> np.ndarray:
        """Degree multipliers ``0..N`` as an array; raises if the spectrum is too short."""
        if self.nmax < N:
            raise BandMismatchError(f"kernel covers degrees up to {self.nmax}, field needs {N}")
        return self.ghat[: N + 1].copy()

    def with_policy(self, below_range: tuple[float, float]) -> ZonalKernelSpectrum:
        return replace(self, below_range=tuple(float(v) for v in below_range))

    def normalize(self) -> ZonalKernelSpectrum:
        if self.ghat[0] == 0.0:
            raise ValueError("cannot normalize a kernel with zero mean")
        return replace(self, ghat=self.ghat / self.ghat[0])


def shifted(spec: ZonalKernelSpectrum, s: int) -> ZonalKernelSpectrum:
    """Spectrum with ``G'(n) = G(n + s)`` for ``n = 0..Nmax``."""
    if s not in (-2, -1, 0, 1, 2):
        raise ValueError(f"shift must lie in -2..2, got {s}")
    ghat = np.array([spec.at(n + s) for n in range(spec.nmax + 1)])
    return replace(spec, ghat=ghat, shift=spec.shift + s)


def legendre_transform(
    G: Callable[[np.ndarray], np.ndarray],
    Nmax: int,
    r: float = 1.0,
    quad_points: int | None = None,
) -> ZonalKernelSpectrum:
    """Gauss-Legendre evaluation of ``2 pi r^2 int G(t) P_n(t) dt`` for ``n <= Nmax``.

    ``quad_points`` defaults to ``max(4 (Nmax + 1), 256)``; sharply peaked kernels need more.
    """
    if quad_points is None:
        quad_points = max(4 * (Nmax + 1), 256)
    if quad_points < Nmax + 1:
        raise ValueError(f"need at least {Nmax + 1} quadrature points, got {quad_points}")
    t, w = npleg.leggauss(quad_points)
    values = np.asarray(G(t), dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError("kernel produced non-finite samples")
    P = legendre_polynomials(Nmax, t)
    ghat = 2.0 * np.pi * r**2 * (P @ (w * values))
    return ZonalKernelSpectrum(ghat, radius=float(r))


def inverse_legendre(spec: ZonalKernelSpectrum, t) -> np.ndarray:
    """Truncated synthesis ``sum G_hat(n) (2n + 1) / (4 pi r^2) P_n(t)``."""
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0):
        raise ValueError("t must lie in [-1, 1]")
    n = np.arange(spec.nmax + 1)
    c = spec.ghat * (2 * n + 1) / (4.0 * np.pi * spec.radius**2)
    return npleg.legval(t, c)


def abel_poisson_kernel(h: float, r: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """Closed-form Abel-Poisson kernel with ``G_hat(n) = h**n``."""

    def G(t):
        return (1.0 - h * h) / (1.0 + h * h - 2.0 * h * t) ** 1.5 / (4.0 * np.pi * r**2)

    return G


def gaussian_spectrum_exact(eps: float, Nmax: int) -> np.ndarray:
    """Normalized spectrum of ``exp(-eps (1 - t))`` via modified spherical Bessel functions."""
    n = np.arange(Nmax + 1)
    # i_n(eps) / i_0(eps); scaling by exp(-eps) cancels in the ratio
    return spherical_in(n, eps) / spherical_in(0, eps)


def builtin_kernel(kind: str, param: float, Nmax: int, r: float = 1.0) -> ZonalKernelSpectrum:
    """One of the stock kernels.

    Parameters
    ----------
    kind : {"truncation", "abelpoisson", "gaussian"}
        ``truncation`` keeps degrees ``<= param``; ``abelpoisson`` gives ``param**n``;
        ``gaussian`` is ``exp(-param (1 - t))`` normalized to unit mean.
    param : float
        Cutoff degree, ``h`` in (0, 1) or ``eps > 0``.
    Nmax : int
        Largest degree stored.
    """
    kind = kind.lower().replace("_", "").replace("-", "")
    if Nmax < 0:
        raise ValueError("Nmax must be non-negative")
    if kind == "truncation":
        Nc = int(param)
        if Nc != param or not 0 <= Nc <= Nmax:
            raise ValueError(f"truncation degree must be an integer in [0, {Nmax}], got {param}")
        ghat = (np.arange(Nmax + 1) <= Nc).astype(float)
    elif kind == "abelpoisson":
        if not 0.0 < param < 1.0:
            raise ValueError(f"Abel-Poisson parameter must lie in (0, 1), got {param}")
        ghat = float(param) ** np.arange(Nmax + 1)
    elif kind == "gaussian":
        if not param > 0.0:
            raise ValueError(f"Gaussian width parameter must be positive, got {param}")
        eps = float(param)
        spec = legendre_transform(lambda t: np.exp(-eps * (1.0 - t)), Nmax, r, max(4 * (Nmax + 1), 64))
        return spec.normalize()
    else:
        raise ValueError(f"unknown kernel kind {kind!r}")
    return ZonalKernelSpectrum(ghat, radius=float(r))


def parse_kernel_spec(text: str, Nmax: int, r: float = 1.0) -> ZonalKernelSpectrum:
    """Parse ``truncation:Nc``, ``abelpoisson:h``, ``gaussian:eps`` or ``file:PATH``."""
    kind, sep, arg = text.partition(":")
    if not sep or not arg:
        raise ValueError(f"kernel spec must look like KIND:VALUE, got {text!r}")
    if kind == "file":
        from .io import read_kernel_file

        spec = read_kernel_file(arg, Nmax, r)
        if spec.nmax < Nmax:
            raise BandMismatchError(f"kernel file covers degrees up to {spec.nmax}, need {Nmax}")
        return spec
    try:
        value = float(arg)
    except ValueError:
        raise ValueError(f"kernel parameter {arg!r} is not a number") from None
    return builtin_kernel(kind, value, Nmax, r)
