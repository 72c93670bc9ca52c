"""Command line front end: ``sphere-coarse <command> ...``.

Exit status is 0 on success, 1 on a failed verification or an I/O or format
error, and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .filtering import filter_scalar, filter_tensor, filter_vector, verify_commutation
from .helmholtz import helmholtz_tensor, helmholtz_vector
from .kernels import parse_kernel_spec
from .sh_core import (
    BandMismatchError,
    GridScalar,
    GridTooCoarseError,
    SpectralScalar,
    build_gauss_grid,
    power_spectrum,
    sft_forward,
    sft_inverse,
)
from .tensor_sphere import SpectralTensor, tsft_forward, tsft_inverse
from .vector_sphere import FAMILIES, GridVector, SpectralVector, vsft_forward, vsft_inverse


class UsageError(Exception):
    pass


def _band(field, requested):
    band = field.grid.band if requested is None else requested
    if band < 0:
        raise UsageError("grid is too small for any band limit")
    return band


def _analyze(field, N):
    if isinstance(field, GridScalar):
        return sft_forward(field, N)
    if isinstance(field, GridVector):
        return vsft_forward(field, N)
    return tsft_forward(field, N)


def _load_coeffs(path, band):
    if io.sniff(path) == "coeffs":
        return io.read_coeffs(path)
    field = io.read_field(path)
    return _analyze(field, _band(field, band))


def cmd_filter(args) -> int:
    field = io.read_field(args.inp)
    N = _band(field, args.band)
    kernel = parse_kernel_spec(args.kernel, N, field.grid.radius)
    if isinstance(field, GridScalar):
        out = filter_scalar(field, kernel, N)
    elif isinstance(field, GridVector):
        out = filter_vector(field, kernel, N)
    else:
        out = filter_tensor(field, kernel, N)
    io.write_field(args.out, out)
    return 0


def _spectrum_rows(coeffs):
    if isinstance(coeffs, SpectralScalar):
        return ["power"], power_spectrum(coeffs)[:, None]
    if isinstance(coeffs, SpectralVector):
        cols = np.sum(coeffs.coeffs**2, axis=2).T
        return list(FAMILIES), cols
    cols = np.sum(coeffs.coeffs**2, axis=3).reshape(9, -1).T
    return [f"Y{i}{k}" for i in (1, 2, 3) for k in (1, 2, 3)], cols


def cmd_spectrum(args) -> int:
    coeffs = _load_coeffs(args.inp, args.band)
    names, cols = _spectrum_rows(coeffs)
    if len(names) > 1:
        names = names + ["total"]
        cols = np.column_stack([cols, cols.sum(axis=1)])
    print("degree " + " ".join(f"{n:>22}" for n in names))
    for n, row in enumerate(cols):
        print(f"{n:6d} " + " ".join(f"{v:22.15e}" for v in row))
    return 0


def cmd_decompose(args) -> int:
    coeffs = _load_coeffs(args.inp, args.band)
    written = []
    if isinstance(coeffs, SpectralVector):
        p = helmholtz_vector(coeffs)
        parts = {"u_r": p.u_r, "f": p.f, "eta": p.eta}
    elif isinstance(coeffs, SpectralTensor):
        p = helmholtz_tensor(coeffs)
        parts = {f"F{i}{k}": p.potential(i, k) for i in (1, 2, 3) for k in (1, 2, 3)}
    else:
        raise UsageError("decompose needs a vector or tensor field")
    for name, scalar in parts.items():
        path = f"{args.out_prefix}_{name}.sphcoef"
        io.write_coeffs(path, scalar)
        written.append(path)
    for path in written:
        print(path)
    return 0


def cmd_synth(args) -> int:
    coeffs = io.read_coeffs(args.coeffs)
    if args.grid < coeffs.band:
        raise UsageError(f"grid band {args.grid} is below the coefficient band {coeffs.band}")
    grid = build_gauss_grid(args.grid, coeffs.radius)
    if isinstance(coeffs, SpectralScalar):
        out = sft_inverse(coeffs, grid)
    elif isinstance(coeffs, SpectralVector):
        out = vsft_inverse(coeffs, grid)
    else:
        out = tsft_inverse(coeffs, grid)
    if args.basis == "cartesian" and not isinstance(out, GridScalar):
        out = out.to_cartesian()
    io.write_field(args.out, out)
    return 0


def cmd_verify(args) -> int:
    if args.band < 0:
        raise UsageError("--band must be non-negative")
    kernel = parse_kernel_spec(args.kernel, args.band, args.radius)
    report = verify_commutation(args.band, kernel, args.seed, args.tol, args.radius)
    print(report.to_keyvalue() if args.format == "kv" else report.to_text())
    return 0 if report.all_passed else 1


def cmd_check_file(args) -> int:
    kind = io.sniff(args.inp)
    if kind == "field":
        field = io.read_field(args.inp)
        g = field.grid
        basis = getattr(field, "basis", "frame")
        print(f"field kind={io.field_kind(field)} nlat={g.nlat} nlon={g.nlon} radius={g.radius!r} frame={basis}")
        if args.dump_text:
            vals = field.values.reshape(g.nlat, g.nlon, -1)
            lat = np.degrees(np.arcsin(g.nodes))
            lon = np.degrees(g.lons)
            for i in range(g.nlat):
                for k in range(g.nlon):
                    comps = " ".join(f"{v: .15e}" for v in vals[i, k])
                    print(f"{lat[i]: .10f} {lon[k]: .10f} {comps}")
    else:
        c = io.read_coeffs(args.inp)
        print(f"coeffs kind={io.coeff_kind(c)} band={c.band} radius={c.radius!r}")
        if args.dump_text:
            flat = c.coeffs.reshape(-1, c.band + 1, 2 * c.band + 1)
            for fam, arr in enumerate(flat):
                for n in range(c.band + 1):
                    for j in range(-n, n + 1):
                        print(f"{fam} {n} {j} {arr[n, j + c.band]: .17e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sphere-coarse", description="Filtering of fields on the sphere.")
    sub = p.add_subparsers(dest="command", required=True)

    kernel_help = "truncation:Nc | abelpoisson:h | gaussian:eps | file:PATH"

    s = sub.add_parser("filter", help="filter a field file")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--kernel", required=True, help=kernel_help)
    s.add_argument("--out", required=True)
    s.add_argument("--band", type=int, help="band limit (default: largest the grid resolves)")
    s.set_defaults(func=cmd_filter)

    s = sub.add_parser("spectrum", help="per-degree power of a field or coefficient file")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--band", type=int)
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("decompose", help="write Helmholtz potentials as coefficient files")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out-prefix", required=True)
    s.add_argument("--band", type=int)
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("synth", help="synthesize coefficients on a Gauss grid")
    s.add_argument("--coeffs", required=True)
    s.add_argument("--grid", type=int, required=True, help="band limit of the output grid")
    s.add_argument("--out", required=True)
    s.add_argument("--basis", choices=("frame", "cartesian"), default="frame")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("verify", help="check that filtering commutes with the tangential operators")
    s.add_argument("--band", type=int, required=True)
    s.add_argument("--kernel", required=True, help=kernel_help)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--radius", type=float, default=1.0)
    s.add_argument("--format", choices=("text", "kv"), default="text")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("check-file", help="validate a field or coefficient file")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--dump-text", action="store_true", help="print the contents as text")
    s.set_defaults(func=cmd_check_file)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"sphere-coarse: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, GridTooCoarseError, BandMismatchError) as exc:
        print(f"sphere-coarse: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
