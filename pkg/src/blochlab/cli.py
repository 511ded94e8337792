"""Command-line entry point.

One binary, subcommand style; every tolerance is a flag with the module
default, and every emission embeds the tool version, the full resolved
configuration and the seed, so identical invocations are byte-identical.

Exit codes: 0 success, 1 validation error, 2 computation failure,
64 usage error, 74 file I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .exact import GaussianRational
from .fermi import (
    CertificateError,
    composite_factorize,
    fermi_section,
    multilayer_factorize,
    symmetry_factorize,
)
from .floquet import RealSpaceWindow, apply_operator, dispersion, floquet_mode
from .graphs import (
    OperatorSpec,
    SpecError,
    ab_composite_variable,
    builtin,
    parse_spec,
)
from .critical import (
    cpe_system,
    find_critical_points,
    newton_polytope,
    spectral_edge_report,
    vertical_faces,
)
from .laurent import LaurentPoly
from .spectrum import (
    ResolventMarginError,
    band_grid,
    density_of_states,
    resolvent_apply,
    resolvent_residual,
    spectral_report,
)

EX_OK = 0
EX_VALIDATION = 1
EX_COMPUTE = 2
EX_USAGE = 64
EX_IOERR = 74

SUBCOMMANDS = (
    "validate",
    "dispersion",
    "bands",
    "dos",
    "fermi",
    "certify",
    "critical",
    "polytope",
    "apply",
    "mode",
    "resolvent",
)

TOL_NAMES = {
    "refine": 1e-10,
    "cluster": 1e-6,
    "gap": 1e-6,
    "match": 1e-8,
    "hess": 1e-7,
    "mode": None,  # default scales with the matrix norm
    "cert": 1e-8,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _extract_tolerances(argv):
    """Pull --tol.NAME VALUE pairs out of argv before argparse sees them."""
    tols = dict(TOL_NAMES)
    rest = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a.startswith("--tol."):
            name = a[len("--tol.") :]
            if name not in TOL_NAMES:
                raise UsageError(f"unknown tolerance {name!r}; known: {sorted(TOL_NAMES)}")
            if "=" in name:
                raise UsageError("use --tol.NAME VALUE")
            if i + 1 >= len(argv):
                raise UsageError(f"--tol.{name} needs a value")
            try:
                tols[name] = float(argv[i + 1])
            except ValueError:
                raise UsageError(f"--tol.{name} value must be a float")
            if tols[name] <= 0:
                raise UsageError("tolerances must be positive")
            i += 2
            continue
        rest.append(a)
        i += 1
    return tols, rest


def _build_parser() -> _Parser:
    p = _Parser(prog="blochlab", description=__doc__)
    p.add_argument("--version", action="version", version=f"blochlab {__version__}")
    sub = p.add_subparsers(dest="command")
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("input_pos", nargs="?", help="spec file (same as --input)")
        sp.add_argument("--builtin", help="builtin lattice name")
        sp.add_argument("-p", "--params", action="append", default=[],
                        help="builtin parameters key=val,key=val (rational strings)")
        sp.add_argument("--input", help="operator spec JSON file")
        sp.add_argument("--resolution", default="64", help="grid size N or N,N")
        sp.add_argument("--lambda0", help="energy (rational string)")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--seed", type=int, default=20240901)
        sp.add_argument("--bins", type=int, default=64)
        sp.add_argument("--dos-method", default="linear", choices=["linear", "histogram"])
        sp.add_argument("--window", help="real-space window JSON file")
        sp.add_argument("--zeta", help="comma-separated complex weight, e.g. '1+0j,0.5j'")
        sp.add_argument("--energy", help="complex energy, e.g. '5' or '3j'")
        sp.add_argument("--pad", type=int, default=16, help="resolvent output dilation")
        sp.add_argument("--mechanism", choices=["multilayer", "symmetry", "composite"])
        sp.add_argument("--coupling", help="Hermitian coupling matrix as JSON, rational strings")
        sp.add_argument("--unitary", help="unitary matrix as JSON [[re,im],...] pairs or numbers")
        sp.add_argument("--g", help="composite variable: 'zeta-zeta-prime' or a term-list JSON file")
    return p


def _load_spec(args) -> OperatorSpec:
    path = args.input or args.input_pos
    if args.builtin and path:
        raise UsageError("give either --builtin or an input file, not both")
    if args.builtin:
        params = {}
        for chunk in args.params:
            for pair in chunk.split(","):
                if not pair:
                    continue
                if "=" not in pair:
                    raise UsageError(f"bad parameter {pair!r}, expected key=val")
                k, v = pair.split("=", 1)
                params[k.strip()] = v.strip()
        return builtin(args.builtin, params)
    if not path:
        raise UsageError("an operator is required: --builtin NAME or --input FILE")
    return parse_spec(Path(path).read_text())


def _resolution(args, spec) -> tuple[int, ...]:
    parts = [int(v) for v in str(args.resolution).split(",")]
    if len(parts) == 1:
        return (parts[0],) * spec.dimension
    return tuple(parts)


def _meta(args, tols) -> dict:
    cfg = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("command",) and v not in (None, [])
    }
    return {
        "version": __version__,
        "config": cfg,
        "tolerances": {k: v for k, v in sorted(tols.items()) if v is not None},
        "seed": args.seed,
    }


def _write_json(args, name: str, payload: dict, meta: dict) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    doc = {"meta": meta, **payload}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def _csv_header(meta: dict) -> str:
    return (
        f"# blochlab {meta['version']}\n"
        f"# config {json.dumps(meta['config'], sort_keys=True)}\n"
        f"# seed {meta['seed']}\n"
    )


# ---------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------

def _cmd_validate(args, tols):
    spec = _load_spec(args)
    kind = "graph" if spec.is_graph else "direct-matrix"
    print(
        f"OK: {kind} spec, dimension {spec.dimension}, {spec.size} vertices, "
        f"self-adjoint={spec.self_adjoint}"
    )
    return EX_OK


def _cmd_dispersion(args, tols):
    spec = _load_spec(args)
    d = dispersion(spec)
    print(d)
    meta = _meta(args, tols)
    _write_json(args, "dispersion.json", {"dimension": d.dim, "polynomial": d.to_json_obj()}, meta)
    return EX_OK


def _cmd_bands(args, tols):
    spec = _load_spec(args)
    res = _resolution(args, spec)
    grid = band_grid(spec, res)
    meta = _meta(args, tols)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cols = [f"k{i+1}" for i in range(spec.dimension)] + [
        f"lambda{j+1}" for j in range(spec.size)
    ]
    lines = [_csv_header(meta) + ",".join(cols)]
    ks = grid.k_points()
    energies = grid.energies.reshape(-1, spec.size)
    for k, e in zip(ks, energies):
        lines.append(",".join(f"{float(v)!r}" for v in [*k, *e]))
    (out / "bands.csv").write_text("\n".join(lines) + "\n")
    report = spectral_report(grid, spec)
    _write_json(args, "report.json", {"report": report.to_json_obj()}, meta)
    print(f"bands.csv + report.json written to {out} (union: {report.union})")
    return EX_OK


def _cmd_dos(args, tols):
    spec = _load_spec(args)
    res = _resolution(args, spec)
    grid = band_grid(spec, res)
    dos = density_of_states(grid, bins=args.bins, method=args.dos_method)
    meta = _meta(args, tols)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = [_csv_header(meta) + "center,density"]
    for c, dens in zip(dos.centers, dos.densities):
        lines.append(f"{float(c)!r},{float(dens)!r}")
    (out / "dos.csv").write_text("\n".join(lines) + "\n")
    print(f"dos.csv written to {out} (total mass {dos.total_mass():.12f})")
    return EX_OK


def _cmd_fermi(args, tols):
    spec = _load_spec(args)
    if args.lambda0 is None:
        raise UsageError("fermi needs --lambda0")
    res = _resolution(args, spec)
    sec = fermi_section(spec, args.lambda0, resolution=max(res))
    meta = _meta(args, tols)
    path = _write_json(args, "fermi.json", sec.to_json_obj(), meta)
    print(
        f"fermi.json written ({len(sec.curves)} curves, {len(sec.points)} isolated points)"
    )
    return EX_OK


def _parse_complex_matrix(text):
    data = json.loads(text)
    out = []
    for row in data:
        r = []
        for v in row:
            if isinstance(v, (list, tuple)):
                r.append(complex(v[0], v[1]))
            else:
                r.append(complex(v))
        out.append(r)
    return np.array(out, dtype=complex)


def _cmd_certify(args, tols):
    spec = _load_spec(args)
    if args.mechanism is None:
        raise UsageError("certify needs --mechanism")
    if args.mechanism == "multilayer":
        if not args.coupling:
            raise UsageError("multilayer certify needs --coupling")
        coupling = json.loads(args.coupling)
        cert = multilayer_factorize(spec, coupling, seed=args.seed)
    elif args.mechanism == "symmetry":
        if not args.unitary:
            raise UsageError("symmetry certify needs --unitary")
        cert = symmetry_factorize(spec, _parse_complex_matrix(args.unitary), seed=args.seed)
    else:
        if args.lambda0 is None or not args.g:
            raise UsageError("composite certify needs --lambda0 and --g")
        if args.g == "zeta-zeta-prime":
            g = ab_composite_variable()
        else:
            obj = json.loads(Path(args.g).read_text())
            g = LaurentPoly.from_json_obj(spec.dimension, obj)
        cert = composite_factorize(spec, args.lambda0, g, seed=args.seed)
        if cert is None:
            print("no composite rewrite exists within the degree bound", file=sys.stderr)
            return EX_COMPUTE
    meta = _meta(args, tols)
    _write_json(args, "certificate.json", cert.to_json_obj(), meta)
    print(
        f"certificate.json written: {cert.kind} via {cert.provenance}, "
        f"{len(cert.factors)} factor(s)"
        + (f", residual {cert.residual:.3e}" if cert.residual is not None else "")
    )
    return EX_OK


def _cmd_critical(args, tols):
    spec = _load_spec(args)
    res = _resolution(args, spec)
    grid = band_grid(spec, res)
    pts = find_critical_points(
        spec,
        grid,
        refine_tol=tols["refine"],
        cluster_tol=tols["cluster"],
        gap_tol_rel=tols["gap"],
    )
    report = spectral_report(grid, spec)
    audit = spectral_edge_report(
        pts, report, match_tol_rel=tols["match"], hess_tol=tols["hess"]
    )
    meta = _meta(args, tols)
    _write_json(
        args,
        "critical.json",
        {
            "points": [p.to_json_obj() for p in pts],
            "edge_audit": [a.to_json_obj() for a in audit],
        },
        meta,
    )
    iso = sum(1 for p in pts if p.isolated and p.classification != "band-crossing")
    cross = sum(1 for p in pts if p.classification == "band-crossing")
    print(
        f"critical.json written: {len(pts)} points "
        f"({iso} isolated, {cross} band-crossing)"
    )
    return EX_OK


def _cmd_polytope(args, tols):
    spec = _load_spec(args)
    d = dispersion(spec)
    poly = newton_polytope(d)
    meta = _meta(args, tols)
    _write_json(args, "polytope.json", poly.to_json_obj(), meta)
    out = Path(args.out)
    sys_eqs = cpe_system(d)
    vars_ = d.var_names()
    names = ["D"] + [f"{v}*dD/d{v}" for v in vars_]
    text = "".join(f"{n} = {p}\n" for n, p in zip(names, sys_eqs))
    (out / "cpe.txt").write_text(text)
    nv = len(vertical_faces(poly))
    print(
        f"polytope.json + cpe.txt written: normalized volume {poly.normalized_volume}, "
        f"{len(poly.faces)} facets ({nv} vertical)"
    )
    return EX_OK


def _cmd_apply(args, tols):
    spec = _load_spec(args)
    if not args.window:
        raise UsageError("apply needs --window FILE")
    w = RealSpaceWindow.from_json_obj(
        json.loads(Path(args.window).read_text()), spec.size
    )
    out = apply_operator(spec, w)
    meta = _meta(args, tols)
    _write_json(args, "applied.json", out.to_json_obj(), meta)
    print(f"applied.json written (box {out.box})")
    return EX_OK


def _cmd_mode(args, tols):
    spec = _load_spec(args)
    if not args.zeta or args.energy is None:
        raise UsageError("mode needs --zeta and --energy")
    zeta = tuple(complex(v) for v in args.zeta.split(","))
    lam = complex(args.energy)
    res = floquet_mode(spec, zeta, lam, tol=tols["mode"])
    meta = _meta(args, tols)
    payload = {
        "found": res.found,
        "kernel_dimension": res.kernel_dimension,
        "sigma_min": res.sigma_min,
        "dispersion_abs": res.dispersion_abs,
        "tol": res.tol,
        "mode": res.mode.to_json_obj() if res.mode else None,
    }
    if res.mode and args.window:
        box = json.loads(Path(args.window).read_text())["box"]
        payload["sample"] = res.mode.sample([tuple(b) for b in box]).to_json_obj()
    _write_json(args, "mode.json", payload, meta)
    print(
        f"mode.json written: found={res.found} kernel={res.kernel_dimension} "
        f"|D|={res.dispersion_abs:.3e}"
    )
    return EX_OK


def _cmd_resolvent(args, tols):
    spec = _load_spec(args)
    if not args.window or args.energy is None:
        raise UsageError("resolvent needs --window and --energy")
    f = RealSpaceWindow.from_json_obj(
        json.loads(Path(args.window).read_text()), spec.size
    )
    lam = complex(args.energy)
    res = _resolution(args, spec)
    result = resolvent_apply(spec, f, lam, res, pad=args.pad)
    residual = resolvent_residual(spec, result, f, lam) if spec.is_graph else None
    meta = _meta(args, tols)
    payload = result.window.to_json_obj()
    payload.update(
        {
            "resolution": list(result.resolution),
            "min_abs_dispersion": result.min_abs_dispersion,
            "quadrature_error_estimate": result.quadrature_error_estimate,
            "residual_sup": residual,
        }
    )
    _write_json(args, "resolvent.json", payload, meta)
    print(
        f"resolvent.json written (margin {result.min_abs_dispersion:.3e}"
        + (f", residual {residual:.3e})" if residual is not None else ")")
    )
    return EX_OK


_HANDLERS = {
    "validate": _cmd_validate,
    "dispersion": _cmd_dispersion,
    "bands": _cmd_bands,
    "dos": _cmd_dos,
    "fermi": _cmd_fermi,
    "certify": _cmd_certify,
    "critical": _cmd_critical,
    "polytope": _cmd_polytope,
    "apply": _cmd_apply,
    "mode": _cmd_mode,
    "resolvent": _cmd_resolvent,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        tols, rest = _extract_tolerances(argv)
        parser = _build_parser()
        args = parser.parse_args(rest)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EX_USAGE
        return _HANDLERS[args.command](args, tols)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EX_USAGE
    except SpecError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EX_VALIDATION
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EX_IOERR
    except (CertificateError, ResolventMarginError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return EX_COMPUTE
    except (ValueError, np.linalg.LinAlgError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return EX_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
