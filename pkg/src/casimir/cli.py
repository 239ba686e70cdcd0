"""Command-line front end: ``casimir {ideal,lifshitz,film,kk,correct,spectral}``.

All CSV columns are SI; forces and pressures are magnitudes of attraction.
Each run writes a JSON manifest next to its CSV (``<output>.manifest.json``),
to ``--manifest``, or to stderr when writing CSV to stdout.

Exit codes: 0 success, 2 usage or validation error, 3 convergence failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import hashlib
import io
import json
import math
import platform
import shlex
import sys
from pathlib import Path

import numpy as np

from casimir import __version__
from casimir import constants
from casimir.corrections import apply_corrections
from casimir.errors import CasimirError, ConvergenceError
from casimir.lifshitz import (
    ForceCurveError,
    ParallelPlates,
    SpherePlate,
    force_curve,
    ideal_pressure,
    ideal_sphere_force,
)
from casimir.optics import (
    Constant,
    Drude,
    MemoizedPermittivity,
    PerfectConductor,
    Plasma,
    PowerTail,
    Tabulated,
    Vacuum,
    eps_imag_axis,
    load_bundled_table,
    load_table,
)
from casimir.quadrature import QuadratureSpec
from casimir.spectral import AnalyticFn, Circle, count_zeros_poles, sum_zeros_poles
from casimir.thinfilm import LayeredCavity, fig2_point, film_pressure

EXIT_OK, EXIT_USAGE, EXIT_CONVERGENCE, EXIT_IO = 0, 2, 3, 4


class UsageError(Exception):
    pass


# -- argument plumbing ---------------------------------------------------------


def _add_grid(p, name="d", unit="m"):
    g = p.add_argument_group("grid")
    g.add_argument(f"--{name}", type=float, nargs="+", metavar=unit.upper(),
                   help=f"explicit {name} values ({unit})")
    g.add_argument(f"--{name}-min", type=float, help=f"grid start ({unit})")
    g.add_argument(f"--{name}-max", type=float, help=f"grid end ({unit})")
    g.add_argument("--points", type=int, default=10, help="grid points (default 10)")
    g.add_argument("--spacing", choices=("log", "linear"), default="log",
                   help="grid spacing (default log)")


def _add_quad(p):
    q = p.add_argument_group("quadrature")
    d = QuadratureSpec()
    q.add_argument("--rel-tol", type=float, default=d.rel_tol)
    q.add_argument("--abs-tol", type=float, default=d.abs_tol)
    q.add_argument("--max-subdivisions", type=int, default=d.max_subdivisions)
    q.add_argument("--xi-cutoff-factor", type=float, default=d.xi_cutoff_factor)
    q.add_argument("--p-cutoff", type=float, default=d.p_cutoff)


def _add_material(p, default_model=None):
    m = p.add_argument_group("material")
    m.add_argument("--model", choices=("plasma", "drude", "constant", "vacuum", "perfect"),
                   default=default_model)
    m.add_argument("--omega-p", type=float, help="plasma frequency (rad/s)")
    m.add_argument("--gamma", type=float, help="Drude damping (rad/s)")
    m.add_argument("--eps", type=float, help="constant permittivity")
    _add_table(m)


def _add_table(group):
    group.add_argument("--table", help="optical table file (see README for formats)")
    group.add_argument("--material", choices=("au", "al"), help="bundled optical table")
    group.add_argument("--low-tail-omega-p", type=float,
                       help="Drude plasma frequency below the table (rad/s); fitted if omitted")
    group.add_argument("--low-tail-gamma", type=float, help="Drude damping below the table (rad/s)")
    group.add_argument("--high-exponent", type=float, default=3.0,
                       help="power-law exponent of eps'' above the table (default 3)")


def _add_output(p):
    o = p.add_argument_group("output")
    o.add_argument("-o", "--output", help="CSV path (default: stdout)")
    o.add_argument("--manifest", help="manifest path (default: <output>.manifest.json)")
    o.add_argument("--workers", type=int, default=1, help="parallel worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="casimir",
        description="Casimir forces between real-material bodies. Values are magnitudes "
                    "of attraction in SI units (m, Pa, N); --cgs adds dyn/cm^2 columns.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ideal", help="perfect-conductor pressure or sphere-plate force")
    _add_grid(p)
    p.add_argument("--geometry", choices=("plates", "sphere"), default="plates")
    p.add_argument("--radius", type=float, help="sphere radius (m)")
    p.add_argument("--cgs", action="store_true", help="add cgs columns")
    _add_output(p)

    p = sub.add_parser("lifshitz", help="Lifshitz pressure or force for a material")
    _add_grid(p)
    _add_material(p)
    p.add_argument("--geometry", choices=("plates", "sphere"), default="plates")
    p.add_argument("--radius", type=float, help="sphere radius (m)")
    p.add_argument("--cgs", action="store_true", help="add cgs columns")
    _add_quad(p)
    _add_output(p)

    p = sub.add_parser("film", help="conductor coated with a film facing a conductor")
    _add_grid(p)
    _add_material(p)
    p.add_argument("--thickness", type=float, required=True, help="film thickness a (m)")
    p.add_argument("--gap", action="store_true",
                   help="grid values are vacuum gaps d - a instead of conductor separations d")
    p.add_argument("--fig2", action="store_true",
                   help="emit uncoated, coated and perfectly coated curves and their ratio")
    _add_quad(p)
    _add_output(p)

    p = sub.add_parser("kk", help="Kramers-Kronig eps(i xi) from an optical table")
    t = p.add_argument_group("table")
    _add_table(t)
    _add_grid(p, name="xi", unit="rad/s")
    _add_quad(p)
    _add_output(p)

    p = sub.add_parser("correct", help="closed-form conductivity and roughness factors")
    _add_grid(p)
    p.add_argument("--base", type=float,
                   help="base pressure (Pa) for every grid point (default: ideal pressure)")
    p.add_argument("--lambda-p", type=float, default=0.0, help="plasma wavelength (m); 0 = none")
    p.add_argument("--roughness", type=float, default=0.0, help="RMS roughness amplitude (m)")
    p.add_argument("--order", type=int, choices=(1, 2), default=2)
    _add_output(p)

    p = sub.add_parser("spectral", help="debug: count and sum zeros of a polynomial")
    p.add_argument("--poly", type=complex, nargs="+", required=True,
                   help="coefficients, highest degree first (Python complex syntax)")
    p.add_argument("--center", type=complex, default=0j)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--samples", type=int, default=256)
    _add_output(p)
    return parser


def _config_tokens(path):
    tokens = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        low = value.lower()
        if low in ("true", "yes", "on"):
            tokens.append(flag)
        elif low in ("false", "no", "off", ""):
            continue
        else:
            tokens.append(flag)
            tokens.extend(shlex.split(value))
    return tokens


def expand_config(argv, commands):
    """Splice ``--config FILE`` entries in after the subcommand; explicit flags win."""
    argv = list(argv)
    config_path = None
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--config":
            if i + 1 >= len(argv):
                raise UsageError("--config needs a path")
            config_path = argv[i + 1]
            i += 2
            continue
        if tok.startswith("--config="):
            config_path = tok.split("=", 1)[1]
            i += 1
            continue
        out.append(tok)
        i += 1
    if config_path is None:
        return out, None
    extra = _config_tokens(config_path)
    for j, tok in enumerate(out):
        if tok in commands:
            return out[: j + 1] + extra + out[j + 1:], config_path
    raise UsageError("--config requires a subcommand on the command line")


def _grid(args, name="d"):
    explicit = getattr(args, name)
    lo, hi = getattr(args, f"{name}_min"), getattr(args, f"{name}_max")
    if explicit:
        values = sorted(float(v) for v in explicit)
    elif lo is not None and hi is not None:
        if not lo < hi:
            raise UsageError(f"--{name}-min must be smaller than --{name}-max")
        if args.points < 1:
            raise UsageError("--points must be >= 1")
        if args.points == 1:
            values = [lo]
        elif args.spacing == "log":
            if lo <= 0:
                raise UsageError("log spacing needs a positive grid start")
            values = np.geomspace(lo, hi, args.points).tolist()
        else:
            values = np.linspace(lo, hi, args.points).tolist()
    else:
        raise UsageError(f"give --{name} or both --{name}-min and --{name}-max")
    if any(v <= 0 for v in values):
        raise UsageError(f"all {name} values must be > 0")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise UsageError(f"{name} values must be distinct")
    return values


def _quad(args):
    return QuadratureSpec(
        rel_tol=args.rel_tol,
        abs_tol=args.abs_tol,
        max_subdivisions=args.max_subdivisions,
        xi_cutoff_factor=args.xi_cutoff_factor,
        p_cutoff=args.p_cutoff,
    )


def _table_model(args, inputs):
    if args.table and args.material:
        raise UsageError("give either --table or --material, not both")
    if args.table:
        path = Path(args.table)
        raw = path.read_bytes()
        inputs["table"] = {"path": str(path), "sha256": hashlib.sha256(raw).hexdigest()}
        table = load_table(raw)
    elif args.material:
        inputs["table"] = {"bundled": args.material}
        table = load_bundled_table(args.material)
    else:
        return None
    low = None
    if args.low_tail_omega_p is not None or args.low_tail_gamma is not None:
        if args.low_tail_omega_p is None or args.low_tail_gamma is None:
            raise UsageError("--low-tail-omega-p and --low-tail-gamma go together")
        low = Drude(args.low_tail_omega_p, args.low_tail_gamma)
    return Tabulated(table, low, PowerTail(args.high_exponent))


def _model(args, inputs, allow_perfect=False):
    tab = _table_model(args, inputs)
    if tab is not None:
        if args.model:
            raise UsageError("--model cannot be combined with --table/--material")
        return tab
    if args.model is None:
        raise UsageError("give --model, --table or --material")
    if args.model == "perfect":
        if allow_perfect:
            return PerfectConductor()
        raise UsageError("--model perfect has a closed form; use `casimir ideal` instead")
    if args.model == "vacuum":
        return Vacuum()
    if args.model == "constant":
        if args.eps is None:
            raise UsageError("--model constant needs --eps")
        return Constant(args.eps)
    if args.omega_p is None:
        raise UsageError(f"--model {args.model} needs --omega-p")
    if args.model == "plasma":
        return Plasma(args.omega_p)
    if args.gamma is None:
        raise UsageError("--model drude needs --gamma")
    return Drude(args.omega_p, args.gamma)


def _geometry(args):
    if args.geometry == "sphere":
        if args.radius is None:
            raise UsageError("--geometry sphere needs --radius")
        return SpherePlate(args.radius)
    return ParallelPlates()


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


# -- commands ----------------------------------------------------------------


def cmd_ideal(args, inputs):
    grid = _grid(args)
    geometry = _geometry(args)
    if isinstance(geometry, SpherePlate):
        header = ["d_m", "force_n"] + (["force_dyn"] if args.cgs else [])
        rows = []
        for d in grid:
            f = ideal_sphere_force(d, geometry.radius)
            rows.append([d, f] + ([f * 1e5] if args.cgs else []))
        return header, rows
    header = ["d_m", "pressure_pa"] + (["pressure_dyn_cm2"] if args.cgs else [])
    rows = []
    for d in grid:
        p = ideal_pressure(d)
        rows.append([d, p] + ([p * constants.PA_TO_DYN_CM2] if args.cgs else []))
    return header, rows


def cmd_lifshitz(args, inputs):
    grid = _grid(args)
    geometry = _geometry(args)
    model = _model(args, inputs)
    if isinstance(model, Tabulated) and args.workers <= 1:
        model = MemoizedPermittivity(model)
    curve = force_curve(grid, geometry, model, _quad(args), workers=args.workers)
    if isinstance(geometry, SpherePlate):
        header = ["d_m", "force_n", "err_n", "evals"]
        scale, extra = 1e5, "force_dyn"
    else:
        header = ["d_m", "pressure_pa", "err_pa", "evals"]
        scale, extra = constants.PA_TO_DYN_CM2, "pressure_dyn_cm2"
    if args.cgs:
        header.append(extra)
    rows = []
    for pt in curve.points:
        row = [pt.d, pt.value, pt.err_estimate, pt.integrand_evals]
        if args.cgs:
            row.append(pt.value * scale)
        rows.append(row)
    return header, rows


def cmd_film(args, inputs):
    grid = _grid(args)
    film = _model(args, inputs, allow_perfect=True)
    if isinstance(film, Tabulated):
        film = MemoizedPermittivity(film)
    a = args.thickness
    if a < 0:
        raise UsageError("--thickness must be >= 0")
    quad = _quad(args)
    rows = []
    for value in grid:
        d = value + a if args.gap else value
        if not a < d:
            raise UsageError(f"film thickness {a} must be smaller than the separation {d}")
        if args.fig2:
            pt = fig2_point(d - a, a, film, quad)
            rows.append([value, pt["f_nofilm"], pt["f_film"], pt["f_perfect"], pt["ratio"]])
        else:
            p, err, evals = film_pressure(LayeredCavity(d, a, film), quad)
            rows.append([value, p, err, evals])
    if args.fig2:
        return ["d_m", "f_nofilm_pa", "f_film_pa", "f_perfect_pa", "ratio"], rows
    return ["d_m", "pressure_pa", "err_pa", "evals"], rows


def cmd_kk(args, inputs):
    model = _table_model(args, inputs)
    if model is None:
        raise UsageError("give --table or --material")
    grid = _grid(args, name="xi")
    quad = _quad(args)
    rows = []
    for xi in grid:
        r = eps_imag_axis(model, xi, quad)
        rows.append([xi, r.eps, r.err_estimate])
    return ["xi_rad_s", "eps", "err"], rows


def cmd_correct(args, inputs):
    grid = _grid(args)
    rows = []
    for d in grid:
        base = args.base if args.base is not None else ideal_pressure(d)
        rep = apply_corrections(base, args.lambda_p or None, args.roughness or None, d, args.order)
        rows.append([d, rep.base_pressure, rep.conductivity_factor, rep.roughness_factor,
                     rep.corrected_pressure, ";".join(sorted(rep.validity_flags))])
    return ["d_m", "base_pa", "conductivity_factor", "roughness_factor", "corrected_pa",
            "flags"], rows


def cmd_spectral(args, inputs):
    fn = AnalyticFn.polynomial(args.poly)
    contour = Circle(args.center, args.radius, samples=args.samples)
    n = count_zeros_poles(fn, contour)
    s = sum_zeros_poles(fn, contour)
    return ["count", "sum_real", "sum_imag"], [[n, s.real, s.imag]]


COMMANDS = {
    "ideal": cmd_ideal,
    "lifshitz": cmd_lifshitz,
    "film": cmd_film,
    "kk": cmd_kk,
    "correct": cmd_correct,
    "spectral": cmd_spectral,
}


def write_csv(stream, header, rows):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])


def _manifest(args, argv, config_path, inputs, csv_text):
    settings = {k: v for k, v in vars(args).items() if k != "func"}
    return {
        "tool": "casimir",
        "version": __version__,
        "command": args.command,
        "argv": list(argv),
        "config": config_path,
        "settings": {k: (str(v) if isinstance(v, complex) else v) for k, v in settings.items()},
        "inputs": inputs,
        "constants": {"hbar_J_s": constants.HBAR, "c_m_s": constants.C,
                      "e_C": constants.E_CHARGE},
        "environment": {"python": platform.python_version(), "numpy": np.__version__},
        "output_sha256": hashlib.sha256(csv_text.encode("utf-8")).hexdigest(),
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        expanded, config_path = expand_config(argv, COMMANDS)
    except UsageError as exc:
        print(f"casimir: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"casimir: error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        args = parser.parse_args(expanded)
    except SystemExit as exc:
        return int(exc.code or 0)

    inputs = {}
    try:
        header, rows = COMMANDS[args.command](args, inputs)
    except UsageError as exc:
        print(f"casimir {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"casimir {args.command}: convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ForceCurveError as exc:
        print(f"casimir {args.command}: {exc}", file=sys.stderr)
        if any(isinstance(e, ConvergenceError) for e in exc.failures.values()):
            return EXIT_CONVERGENCE
        return EXIT_USAGE
    except CasimirError as exc:
        print(f"casimir {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"casimir {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    buf = io.StringIO()
    write_csv(buf, header, rows)
    text = buf.getvalue()
    manifest = _manifest(args, argv, config_path, inputs, text)
    try:
        if args.output:
            Path(args.output).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        manifest_path = args.manifest or (args.output + ".manifest.json" if args.output else None)
        if manifest_path:
            Path(manifest_path).write_text(json.dumps(manifest, indent=2, default=str) + "\n",
                                           encoding="utf-8")
        else:
            print(json.dumps(manifest, default=str), file=sys.stderr)
    except OSError as exc:
        print(f"casimir {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
