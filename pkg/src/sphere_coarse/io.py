"""Binary field and coefficient files, and JSON kernel descriptions.

Field files::

    SPHGRID1 kind=vector nlat=16 nlon=32 radius=1.0 frame=cartesian\\n
    <nlat * nlon * ncomp little-endian float64>

Samples are latitude-major, then longitude, with the components of each point
adjacent (3 for vectors, 9 row-major for tensors).  The grid is the Gauss-Legendre
grid with the stated sizes.

Coefficient files::

    SPHCOEF1 kind=tensor band=9 radius=1.0\\n
    <families * (band + 1)**2 little-endian float64>

Each family is written in full, degree ascending and order ascending inside a
degree.  Family order is ``Y, Psi, Phi`` for vectors and ``(i, k)`` row-major for
tensors.
"""

from __future__ import annotations

import json

import numpy as np

from .sh_core import GridScalar, SpectralScalar, gauss_grid, triangle_mask
from .tensor_sphere import GridTensor, SpectralTensor
from .vector_sphere import GridVector, SpectralVector

FIELD_MAGIC = b"SPHGRID1"
COEFF_MAGIC = b"SPHCOEF1"
KIND_COMPONENTS = {"scalar": 1, "vector": 3, "tensor": 9}
MAX_HEADER = 4096


class FileFormatError(ValueError):
    """Base class for malformed files."""


class MagicMismatchError(FileFormatError):
    pass


class TruncatedPayloadError(FileFormatError):
    def __init__(self, path, expected: int, actual: int):
        super().__init__(f"{path}: truncated payload, expected {expected} bytes, found {actual}")
        self.expected = expected
        self.actual = actual


class DimensionError(FileFormatError):
    pass


class HeaderError(FileFormatError):
    pass


def _split(path) -> tuple[bytes, dict[str, str], bytes]:
    with open(path, "rb") as fh:
        data = fh.read()
    end = data.find(b"\n", 0, MAX_HEADER)
    if end < 0:
        magic = data[:8]
        if magic not in (FIELD_MAGIC, COEFF_MAGIC):
            raise MagicMismatchError(f"{path}: not a sphere_coarse file (magic {magic!r})")
        raise HeaderError(f"{path}: header line is not terminated")
    words = data[:end].decode("ascii", errors="replace").split()
    if not words:
        raise MagicMismatchError(f"{path}: empty header")
    fields = {}
    for w in words[1:]:
        key, sep, val = w.partition("=")
        if not sep or key in fields:
            raise HeaderError(f"{path}: malformed header entry {w!r}")
        fields[key] = val
    return words[0].encode(), fields, data[end + 1 :]


def _int_field(fields, key, path) -> int:
    try:
        return int(fields[key])
    except KeyError:
        raise HeaderError(f"{path}: header lacks {key!r}") from None
    except ValueError:
        raise HeaderError(f"{path}: {key}={fields[key]!r} is not an integer") from None


def _radius(fields, path) -> float:
    try:
        r = float(fields.get("radius", "1.0"))
    except ValueError:
        raise HeaderError(f"{path}: radius={fields['radius']!r} is not a number") from None
    if not r > 0 or not np.isfinite(r):
        raise DimensionError(f"{path}: radius must be positive, got {r}")
    return r


def _kind(fields, path) -> str:
    kind = fields.get("kind")
    if kind not in KIND_COMPONENTS:
        raise HeaderError(f"{path}: kind must be one of {sorted(KIND_COMPONENTS)}, got {kind!r}")
    return kind


def _payload(payload: bytes, count: int, path) -> np.ndarray:
    expected = 8 * count
    if len(payload) < expected:
        raise TruncatedPayloadError(path, expected, len(payload))
    if len(payload) > expected:
        raise DimensionError(f"{path}: payload has {len(payload)} bytes, header implies {expected}")
    return np.frombuffer(payload, dtype="<f8").astype(float)


def field_kind(obj) -> str:
    if isinstance(obj, GridScalar):
        return "scalar"
    if isinstance(obj, GridVector):
        return "vector"
    if isinstance(obj, GridTensor):
        return "tensor"
    raise TypeError(f"cannot store {type(obj).__name__} as a field")


def write_field(path, field) -> None:
    """Write a grid scalar, vector or tensor, keeping its component basis."""
    kind = field_kind(field)
    grid = field.grid
    basis = getattr(field, "basis", "frame")
    header = (
        f"{FIELD_MAGIC.decode()} kind={kind} nlat={grid.nlat} nlon={grid.nlon} "
        f"radius={grid.radius!r} frame={basis}\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())


def read_field(path):
    """Read a field file back into a grid object on the matching Gauss grid."""
    magic, fields, payload = _split(path)
    if magic != FIELD_MAGIC:
        raise MagicMismatchError(f"{path}: expected magic {FIELD_MAGIC!r}, found {magic!r}")
    kind = _kind(fields, path)
    nlat, nlon = _int_field(fields, "nlat", path), _int_field(fields, "nlon", path)
    if nlat < 1 or nlon < 1:
        raise DimensionError(f"{path}: grid sizes must be positive, got nlat={nlat} nlon={nlon}")
    basis = fields.get("frame", "frame")
    if basis not in ("frame", "cartesian"):
        raise HeaderError(f"{path}: frame must be 'frame' or 'cartesian', got {basis!r}")
    ncomp = KIND_COMPONENTS[kind]
    values = _payload(payload, nlat * nlon * ncomp, path)
    grid = gauss_grid(nlat, nlon, _radius(fields, path))
    if kind == "scalar":
        return GridScalar(grid, values.reshape(nlat, nlon))
    if kind == "vector":
        return GridVector(grid, values.reshape(nlat, nlon, 3), basis)
    return GridTensor(grid, values.reshape(nlat, nlon, 3, 3), basis)


def coeff_kind(obj) -> str:
    if isinstance(obj, SpectralScalar):
        return "scalar"
    if isinstance(obj, SpectralVector):
        return "vector"
    if isinstance(obj, SpectralTensor):
        return "tensor"
    raise TypeError(f"cannot store {type(obj).__name__} as coefficients")


def _pack(coeffs: np.ndarray, N: int) -> np.ndarray:
    tri = triangle_mask(N)
    flat = coeffs.reshape((-1, N + 1, 2 * N + 1))
    return np.concatenate([c[tri] for c in flat])


def _unpack(values: np.ndarray, N: int, families: int) -> np.ndarray:
    tri = triangle_mask(N)
    out = np.zeros((families, N + 1, 2 * N + 1))
    per = (N + 1) ** 2
    for k in range(families):
        out[k][tri] = values[k * per : (k + 1) * per]
    return out


def write_coeffs(path, coeffs) -> None:
    kind = coeff_kind(coeffs)
    header = f"{COEFF_MAGIC.decode()} kind={kind} band={coeffs.band} radius={coeffs.radius!r}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(_pack(coeffs.coeffs, coeffs.band).astype("<f8").tobytes())


def read_coeffs(path):
    magic, fields, payload = _split(path)
    if magic != COEFF_MAGIC:
        raise MagicMismatchError(f"{path}: expected magic {COEFF_MAGIC!r}, found {magic!r}")
    kind = _kind(fields, path)
    N = _int_field(fields, "band", path)
    if N < 0:
        raise DimensionError(f"{path}: band must be non-negative, got {N}")
    fam = KIND_COMPONENTS[kind]
    values = _payload(payload, fam * (N + 1) ** 2, path)
    arr = _unpack(values, N, fam)
    r = _radius(fields, path)
    if kind == "scalar":
        return SpectralScalar(N, arr[0], r)
    if kind == "vector":
        return SpectralVector(N, arr, r)
    return SpectralTensor(N, arr.reshape(3, 3, N + 1, 2 * N + 1), r)


def sniff(path) -> str:
    """``"field"`` or ``"coeffs"`` depending on the file's magic."""
    with open(path, "rb") as fh:
        magic = fh.read(8)
    if magic == FIELD_MAGIC:
        return "field"
    if magic == COEFF_MAGIC:
        return "coeffs"
    raise MagicMismatchError(f"{path}: unrecognised magic {magic!r}")


def read_kernel_file(path, Nmax: int, r: float = 1.0):
    """Kernel from JSON: ``{"kind": ..., "param": ...}`` or ``{"ghat": [...]}``."""
    from .kernels import ZonalKernelSpectrum, builtin_kernel

    with open(path) as fh:
        spec = json.load(fh)
    if not isinstance(spec, dict):
        raise FileFormatError(f"{path}: kernel file must hold a JSON object")
    if "ghat" in spec:
        below = tuple(spec.get("below_range", (0.0, 0.0)))
        return ZonalKernelSpectrum(np.asarray(spec["ghat"], dtype=float), float(spec.get("radius", r)), below)
    try:
        return builtin_kernel(spec["kind"], float(spec["param"]), int(spec.get("nmax", Nmax)), r)
    except KeyError as exc:
        raise FileFormatError(f"{path}: kernel file lacks {exc.args[0]!r}") from None


def write_kernel_file(path, spec) -> None:
    data = {"ghat": spec.ghat.tolist(), "radius": spec.radius, "below_range": list(spec.below_range)}
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)
        fh.write("\n")
