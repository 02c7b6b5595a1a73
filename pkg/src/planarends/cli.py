"""Command-line entry point.

Subcommands: ``construct`` builds a surface from a spec file and writes its
certificate report, ``verify`` does the same with optional numeric checks,
``mesh`` samples an immersion and writes OBJ and PLY files, and ``search``
hunts for branch values realizing a two-subset family and emits the spec it
found.

Exit codes are a stable contract: 0 all certificates pass, 2 the spec or
arguments are invalid, 3 a certificate fails, 4 a search ran out of trials.
Exact parameters travel as strings in the JSON spec so no float ever touches
a certificate.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .algebra import AlgebraError, as_gaussian
from .constructions import (
    GFormCoefficients,
    IJSelection,
    SearchError,
    bracket_resultant,
    catenoid,
    gform_assemble,
    hoffman_osserman,
    lambda_search,
    phi_ij,
    three_end_genus0,
)
from .curve import HyperellipticCurve
from .meshio import (
    MeshError,
    SCHEMA_VERSION,
    build_verification_report,
    export_obj,
    export_ply,
    sample_mesh,
    write_report,
)
from .numerics import NumericsError
from .torus import PoleError, TorusLattice, torus_eta


class SpecError(ValueError):
    """The spec file or command arguments cannot be used."""


# ---------------------------------------------------------------------------
# spec loading
# ---------------------------------------------------------------------------


def load_schema() -> dict:
    text = resources.files("planarends").joinpath(
        "schema/surface_spec.schema.json"
    ).read_text(encoding="utf-8")
    return json.loads(text)


def load_spec(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read spec file: {exc}") from exc
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec file is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(spec, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "(top level)"
        raise SpecError(f"spec fails schema validation at {where}: {exc.message}") from exc
    return spec


def _exact(value):
    return as_gaussian(value if isinstance(value, str) else int(value))


def _curve_point(curve, node):
    if "branch_index" in node:
        return curve.branch_point(int(node["branch_index"]))
    return curve.affine(_exact(node["x"]), _exact(node["y"]))


def build_data(spec):
    """Immersion data for every spec kind except torus_eta."""
    kind = spec["kind"]
    if kind == "catenoid":
        return catenoid()
    if kind == "hoffman_osserman":
        return hoffman_osserman(_exact(spec["a"]), _exact(spec["b"]))
    if kind == "three_end_genus0":
        keys = ("a1", "a2", "a3", "b1", "b2", "b3", "z1", "z2")
        return three_end_genus0(*(_exact(spec[k]) for k in keys))
    if kind == "phi_ij":
        curve = HyperellipticCurve([_exact(v) for v in spec["lambdas"]])
        sel = IJSelection(spec["I"], spec["J"], curve.genus)
        return phi_ij(curve, sel)
    if kind == "gform":
        curve = HyperellipticCurve([_exact(v) for v in spec["lambdas"]])
        p1 = _curve_point(curve, spec["p1"])
        p2 = _curve_point(curve, spec["p2"])
        coeffs = GFormCoefficients(
            _exact(spec["alpha"]),
            [_exact(v) for v in spec["null_vector"]],
            [[_exact(v) for v in row] for row in spec["holomorphic_matrix"]],
        )
        return gform_assemble(curve, p1, p2, coeffs)
    raise SpecError(f"kind {kind!r} does not describe an immersion")


def _tolerance_kwargs(spec) -> dict:
    tol = spec.get("tolerances") or {}
    out = {}
    if "periods" in tol:
        out["period_tolerance"] = float(tol["periods"])
    if "curvature" in tol:
        out["curvature_tolerance"] = float(tol["curvature"])
    if "asymptotics" in tol:
        out["asymptotics_tolerance"] = float(tol["asymptotics"])
    return out


def _outdir(args, spec=None) -> Path:
    if args.out is not None:
        d = Path(args.out)
    elif spec and spec.get("output", {}).get("directory"):
        d = Path(spec["output"]["directory"])
    else:
        d = Path(".")
    d.mkdir(parents=True, exist_ok=True)
    return d


# ---------------------------------------------------------------------------
# torus certificate report
# ---------------------------------------------------------------------------


def torus_report(spec) -> dict:
    """Residue and double-pole certificates for the pair of torus forms."""
    tau = complex(_exact(spec["tau"]))
    p2 = complex(_exact(spec["p2"]))
    try:
        lattice = TorusLattice(tau)
    except (PoleError, ValueError) as exc:
        raise SpecError(f"invalid tau: {exc}") from exc
    if lattice.distance_to_lattice(p2) < 1e-9:
        raise SpecError("p2 is too close to a lattice point")

    report = {}
    report["schema_version"] = SCHEMA_VERSION
    report["spec"] = spec
    report["kind"] = "torus_eta"
    report["tau"] = [tau.real, tau.imag]
    try:
        forms = torus_eta(lattice, p2)
    except PoleError as exc:
        report["forms"] = []
        report["error"] = str(exc)
        report["pass"] = False
        return report
    rows = []
    for form in forms:
        cert = form.certificate
        loops = [v for k, v in cert.items() if k.startswith("loop_r=")]
        lead = cert["lead"]
        want = cert["expected_lead"]
        rows.append(
            {
                "pole": [form.pole.real, form.pole.imag],
                "case": form.case,
                "max_abs_residue": max(abs(v) for v in loops),
                "double_pole_coefficient": [lead.real, lead.imag],
                "expected_coefficient": [want.real, want.imag],
                "radii": [float(r) for r in cert["radii"]],
                "ok": True,
                "method": "numeric",
                "tolerance": 1e-8,
            }
        )
    report["forms"] = rows
    report["pass"] = True
    return report


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _fail(category: str, message: str) -> None:
    print(json.dumps({"error": category, "message": message}), file=sys.stderr)


def _print_summary(report, path) -> None:
    conf = report.get("conformal")
    if conf is not None:
        if conf["ok"]:
            print("conformal: ok")
        else:
            print(f"conformal: FAIL witness = {conf['witness']}")
    ends = report.get("ends")
    if ends is not None:
        good = sum(1 for e in ends if e["embedded_planar"])
        print(f"ends: {good}/{len(ends)} embedded planar")
        for e in ends:
            print(f"  {e['puncture']}: gauss image {e['gauss_image']}")
    sym = report.get("symmetry")
    if sym is not None and sym["ok"] is not None:
        print("symmetry: ok" if sym["ok"] else "symmetry: FAIL")
    per = report.get("periods")
    if per is not None:
        state = "ok" if per["ok"] else "FAIL"
        print(f"periods: {state} (max |Re| = {per['max_abs_real']:.3e}, {per['method']})")
    curv = report.get("curvature")
    if curv is not None:
        if "error" in curv:
            print(f"curvature: FAIL ({curv['error']})")
        else:
            state = "ok" if curv["ok"] else "FAIL"
            print(
                f"curvature: {state} (estimate {curv['estimate']:.6f}, "
                f"exact {curv['exact']:.6f}, rel error {curv['rel_error']:.2e})"
            )
    asy = report.get("asymptotics")
    if asy is not None:
        for row in asy:
            if "skipped" in row:
                print(f"asymptotics ({row['puncture']}): skipped, {row['skipped']}")
            elif "error" in row:
                print(f"asymptotics ({row['puncture']}): FAIL ({row['error']})")
            else:
                state = "ok" if row["passes"] else "FAIL"
                print(f"asymptotics ({row['puncture']}): {state}")
    scan = report.get("scan")
    if scan is not None:
        if "error" in scan:
            print(f"scan: FAIL ({scan['error']})")
        elif scan["ok"]:
            print(f"scan: no candidates in {scan['sample_count']} samples")
        else:
            print(f"scan: {scan['candidate_count']} candidate pairs flagged")
    for row in report.get("forms", ()):
        print(
            f"form ({row['case']}): max residue loop {row['max_abs_residue']:.3e}, "
            f"double-pole coefficient ok"
        )
    print(f"report: {path}")
    print("PASS" if report["pass"] else "FAIL")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_construct(args) -> int:
    spec = load_spec(args.spec)
    outdir = _outdir(args, spec)
    if spec["kind"] == "torus_eta":
        report = torus_report(spec)
    else:
        data = build_data(spec)
        report = build_verification_report(data, spec=spec, **_tolerance_kwargs(spec))
    path = outdir / "report.json"
    write_report(report, path)
    _print_summary(report, path)
    return 0 if report["pass"] else 3


def cmd_verify(args) -> int:
    spec = load_spec(args.spec)
    outdir = _outdir(args, spec)
    if spec["kind"] == "torus_eta":
        report = torus_report(spec)
    else:
        data = build_data(spec)
        report = build_verification_report(
            data, spec=spec, numeric=args.numeric, **_tolerance_kwargs(spec)
        )
    path = outdir / "report.json"
    write_report(report, path)
    _print_summary(report, path)
    return 0 if report["pass"] else 3


def cmd_mesh(args) -> int:
    spec = load_spec(args.spec)
    if spec["kind"] == "torus_eta":
        raise SpecError("mesh needs an immersion kind, not torus_eta")
    outdir = _outdir(args, spec)
    data = build_data(spec)
    projection = None
    if args.projection is not None:
        projection = np.asarray(args.projection, dtype=float).reshape(3, 4)
    mesh = sample_mesh(data, grid=args.grid, projection=projection)
    obj_path = outdir / "mesh.obj"
    ply_path = outdir / "mesh.ply"
    export_obj(mesh, obj_path)
    export_ply(mesh, ply_path)
    print(f"mesh: {len(mesh.vertices)} vertices, {len(mesh.faces)} faces")
    print(f"wrote {obj_path}")
    print(f"wrote {ply_path}")
    return 0


def cmd_search(args) -> int:
    I = args.I
    J = args.J
    genus = args.genus
    n = 2 * genus + 2
    union = set(I) | set(J)
    if len(union) > n - 1:
        raise SpecError(
            f"I union J covers {len(union)} of {n} branch indices; "
            "at least one index must stay free"
        )
    sel = IJSelection(I, J, genus)
    curve = lambda_search(genus, sel, seed=args.seed, max_trials=args.trials)
    cert = bracket_resultant(curve, sel)
    spec = {
        "kind": "phi_ij",
        "lambdas": [str(v) for v in curve.lambdas],
        "I": sorted(I),
        "J": sorted(J),
        "certificate": {
            "bracket_resultant": str(cert),
            "nonzero": not cert.is_zero,
        },
        "search": {"genus": genus, "seed": args.seed, "trials": args.trials},
    }
    outdir = _outdir(args)
    path = outdir / "found_spec.json"
    text = json.dumps(spec, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
    path.write_text(text, encoding="utf-8")
    print(f"lambdas: {', '.join(spec['lambdas'])}")
    print(f"certificate: bracket resultant = {cert} (nonzero)")
    print(f"spec: {path}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _grid(text: str):
    try:
        rows, cols = text.lower().split("x")
        return int(rows), int(cols)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"grid must look like 64x64, got {text!r}"
        ) from exc


def _index_list(text: str):
    try:
        return [int(tok) for tok in text.split(",") if tok]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"index list must be comma-separated integers, got {text!r}"
        ) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="planar-ends",
        description="Certificates, meshes, and searches for minimal surfaces "
        "with embedded planar ends.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a surface and write its certificate report")
    p.add_argument("--spec", required=True, help="path to a SurfaceSpec JSON file")
    p.add_argument("--out", default=None, help="output directory (default: spec's, else .)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="run the certificate suite on a spec")
    p.add_argument("--spec", required=True, help="path to a SurfaceSpec JSON file")
    p.add_argument("--out", default=None, help="output directory (default: spec's, else .)")
    p.add_argument(
        "--numeric",
        action="store_true",
        help="also run curvature, asymptotics, and self-intersection checks",
    )
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mesh", help="sample the immersion and write OBJ and PLY files")
    p.add_argument("--spec", required=True, help="path to a SurfaceSpec JSON file")
    p.add_argument("--out", default=None, help="output directory (default: spec's, else .)")
    p.add_argument("--grid", type=_grid, default=None, help="rings x columns, e.g. 64x64")
    p.add_argument(
        "--projection",
        type=float,
        nargs=12,
        default=None,
        metavar="F",
        help="12 floats, rows of an orthonormal 3x4 projection",
    )
    p.set_defaults(func=cmd_mesh)

    p = sub.add_parser("search", help="find branch values realizing a two-subset family")
    p.add_argument("genus", type=int, help="genus of the hyperelliptic curve")
    p.add_argument("I", type=_index_list, help="first branch-index set, e.g. 1,2,3")
    p.add_argument("J", type=_index_list, help="second branch-index set, e.g. 1,4,5")
    p.add_argument("--seed", type=int, default=0, help="seed for the sampled branch values")
    p.add_argument("--trials", type=int, default=1000, help="trial cap before giving up")
    p.add_argument("--out", default=None, help="output directory (default: .)")
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SearchError as exc:
        _fail("search", str(exc))
        return 4
    except (SpecError, AlgebraError, MeshError) as exc:
        _fail("spec", str(exc))
        return 2
    except (NumericsError, PoleError) as exc:
        _fail("certificate", str(exc))
        return 3


if __name__ == "__main__":
    sys.exit(main())
