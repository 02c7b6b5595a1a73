"""Sampling immersions into triangle meshes, mesh files, and JSON reports.

The mesh side samples a surface on per-puncture annular charts with ring
radii in geometric progression, so the sampling marches into each end.  The
report side aggregates every certificate the package can produce for one
surface into a single JSON-serializable document.
"""

import cmath
import json
import math
import struct

import numpy as np

from .curve import CurvePoint
from .weierstrass import (
    INFINITY,
    _ext_str,
    check_conformal,
    end_reports,
    gauss_degrees,
    real_periods_zero,
)
from .constructions import involution_check
from .numerics import (
    ArcSegment,
    CurvePath,
    LineSegment,
    NumericsError,
    _checked_segment,
    _R_eval,
    _form_poles,
    _integrand,
    _parallel_map,
    _ring_chain,
    end_asymptotics,
    immersion_eval,
    self_intersection_scan,
    total_curvature,
)


class MeshError(Exception):
    """Invalid mesh data or a failed mesh/report file operation."""


SCHEMA_VERSION = "1"

# one funnel spans this radius ratio; 12 default rings step by 1.5 each
_REFINE_RATIO = 1.5
_DEFAULT_RINGS = 12
_DEFAULT_COLUMNS = 24
_SPAN = _REFINE_RATIO ** (_DEFAULT_RINGS - 1)
_DEGENERATE_AREA = 1e-14


# ---------------------------------------------------------------------------
# mesh container
# ---------------------------------------------------------------------------


def default_projection():
    """Orthonormal 3x4 matrix keeping the first three coordinates."""
    return np.eye(3, 4)


class Mesh:
    """Triangle mesh in R4 with an orthonormal projection to R3.

    vertices is an (n, 4) float array, faces an (m, 3) array of vertex
    indices, projection a row-orthonormal 3x4 matrix, and projected the
    (n, 3) image of the vertices under it.  params, when present, records
    one (chart label, x, y) tuple per vertex so a sampled mesh stays
    checkable against the immersion it came from.
    """

    __slots__ = ("vertices", "faces", "projection", "projected", "params")

    def __init__(self, vertices, faces, projection=None, params=None):
        verts = np.asarray(vertices, dtype=float).reshape(-1, 4)
        fcs = np.asarray(faces, dtype=int).reshape(-1, 3)
        if len(fcs) and (fcs.min() < 0 or fcs.max() >= len(verts)):
            raise MeshError("face index out of range")
        if projection is None:
            projection = default_projection()
        proj = np.asarray(projection, dtype=float).reshape(3, 4)
        if np.max(np.abs(proj @ proj.T - np.eye(3))) > 1e-12:
            raise MeshError("projection rows must be orthonormal within 1e-12")
        self.vertices = verts
        self.faces = fcs
        self.projection = proj
        self.projected = verts @ proj.T
        self.params = list(params) if params is not None else None

    def __repr__(self):
        return f"Mesh({len(self.vertices)} vertices, {len(self.faces)} faces)"


def _triangle_areas(verts, faces):
    if not len(faces):
        return np.zeros(0)
    a = verts[faces[:, 0]]
    u = verts[faces[:, 1]] - a
    v = verts[faces[:, 2]] - a
    uu = np.sum(u * u, axis=1)
    vv = np.sum(v * v, axis=1)
    uv = np.sum(u * v, axis=1)
    return 0.5 * np.sqrt(np.maximum(uu * vv - uv * uv, 0.0))


# ---------------------------------------------------------------------------
# chart layout and sampling
# ---------------------------------------------------------------------------


def _geometric(first, last, n):
    q = (last / first) ** (1.0 / (n - 1))
    return [first * q**k for k in range(n)]


def _puncture_label(p):
    if p is INFINITY:
        return "infinity"
    if isinstance(p, CurvePoint):
        if p.kind == "branch":
            return f"branch point {p.branch_index} (x={p.x0})"
        if p.kind == "infinity":
            return f"infinity on sheet {p.sheet}"
        return f"point (x={p.x0}, y={p.y0})"
    return str(p)


def default_basepoint(data):
    """Anchor for absolute mesh positions: a real point beyond all features."""
    if data.kind == "genus0":
        feats = [complex(p) for p in data.punctures if p is not INFINITY]
        feats += _form_poles(data)
        return complex(2.0 + 2.0 * max([abs(f) for f in feats] or [0.0]))
    return complex(2.0 + 2.0 * max(abs(complex(v)) for v in data.curve.lambdas))


def _annulus_segments(center, rhos, m, turns):
    segs = []
    marks = []
    narc = m * turns
    dth = 2.0 * math.pi * turns / narc
    for k, rho in enumerate(rhos):
        for j in range(narc):
            segs.append(ArcSegment(center, rho, j * dth, (j + 1) * dth))
            marks.append(k)
        if k + 1 < len(rhos):
            segs.append(LineSegment(center + rho, center + rhos[k + 1]))
            marks.append(-1)
    return segs, marks


def _chart_specs(data, rows, cols):
    punct = list(data.punctures)
    if data.kind == "genus0" and len(punct) == 2 and sum(
        p is INFINITY for p in punct
    ) == 1:
        # twice-punctured plane with one end at infinity: a single annulus
        # centered on the finite puncture covers the whole surface
        p = next(q for q in punct if q is not INFINITY)
        center = complex(p)
        rhos = _geometric(_SPAN, 1.0 / _SPAN, rows)
        segs, marks = _annulus_segments(center, rhos, cols, 1)
        return [
            {
                "label": f"annulus around {p}",
                "segs": segs,
                "marks": marks,
                "curve": None,
                "start_y": None,
                "clearance": None,
                "narc": cols,
            }
        ]
    rs = _geometric(1.0, _SPAN, rows)
    charts = []
    for p in punct:
        segs, marks, curve, start_y, cl = _ring_chain(data, p, rs, cols)
        charts.append(
            {
                "label": f"funnel at {_puncture_label(p)}",
                "segs": segs,
                "marks": marks,
                "curve": curve,
                "start_y": start_y,
                "clearance": cl,
                "narc": marks.count(0),
            }
        )
    return charts


def _sheet_of(curve, x, y):
    principal = cmath.sqrt(complex(_R_eval(curve)(x)))
    return 1 if abs(principal - y) <= abs(principal + y) else -1


def sample_mesh(data, grid=None, projection=None):
    """Sample the immersion of `data` into a triangle mesh.

    grid is (rings, columns) per chart, default (12, 24); ring radii follow
    a geometric progression toward each puncture (ratio 1.5 per ring at the
    default ring count).  A twice-punctured plane with one end at infinity
    is covered by a single annulus; every other surface gets one funnel
    chart per puncture.  Funnels at branch points traverse the x-circle
    twice, so they carry 2*columns vertices per ring.  Triangles with area
    below 1e-14 are dropped.
    """
    rows, cols = grid if grid is not None else (_DEFAULT_RINGS, _DEFAULT_COLUMNS)
    rows, cols = int(rows), int(cols)
    if rows < 2 or cols < 3:
        raise MeshError("grid needs at least 2 rings and 3 columns")
    base = default_basepoint(data)
    verts = []
    faces = []
    params = []
    for chart in _chart_specs(data, rows, cols):
        segs = chart["segs"]
        path = CurvePath(
            segs,
            curve=chart["curve"],
            start_y=chart["start_y"],
            clearance=chart["clearance"],
        )
        anchor_x = segs[0].point(0.0)
        if data.kind == "curve":
            sheet = _sheet_of(data.curve, anchor_x, path.start_y)
            anchor = immersion_eval(data, base, anchor_x, sheet=sheet)
        else:
            anchor = immersion_eval(data, base, anchor_x)

        def prefix(form, path=path):
            f = _integrand(form, path)
            acc = 0j
            out = np.empty(len(path.segments), dtype=complex)
            for i in range(len(path.segments)):
                acc += _checked_segment(f, path, i)
                out[i] = acc
            return out

        prefs = _parallel_map(prefix, list(data.forms))

        narc = chart["narc"]
        nring = max(chart["marks"]) + 1
        seg_of = {}
        counts = [0] * nring
        for i, mk in enumerate(chart["marks"]):
            if mk < 0:
                continue
            slot = (counts[mk] + 1) % narc
            counts[mk] += 1
            seg_of[(mk, slot)] = i
        off = len(verts)
        for k in range(nring):
            for s in range(narc):
                i = seg_of[(k, s)]
                x = path.segments[i].point(1.0)
                pos = anchor + np.array([prefs[j][i].real for j in range(4)])
                verts.append(pos)
                y = path.y_at(i, 1.0) if chart["curve"] is not None else None
                params.append((chart["label"], x, y))
        for k in range(nring - 1):
            for s in range(narc):
                a = off + k * narc + s
                b = off + k * narc + (s + 1) % narc
                c = off + (k + 1) * narc + (s + 1) % narc
                d = off + (k + 1) * narc + s
                faces.append((a, b, c))
                faces.append((a, c, d))

    verts = np.array(verts, dtype=float).reshape(-1, 4)
    faces = np.array(faces, dtype=int).reshape(-1, 3)
    areas = _triangle_areas(verts, faces)
    faces = faces[areas >= _DEGENERATE_AREA] if len(faces) else faces
    return Mesh(verts, faces, projection=projection, params=params)


# ---------------------------------------------------------------------------
# OBJ / PLY export and import
# ---------------------------------------------------------------------------


def _fmt(x):
    return repr(float(x))


def export_obj(mesh, destination):
    """Write an ASCII OBJ file.

    'v' lines carry the projected R3 vertices; each is preceded by a
    '# v4 x1 x2 x3 x4' comment carrying the full R4 coordinates.  The
    projection matrix rides along in a '# projection' comment so imports
    can rebuild the mesh exactly.
    """
    lines = ["# planar-ends mesh"]
    lines.append(
        "# projection " + " ".join(_fmt(v) for v in mesh.projection.ravel())
    )
    for p4, p3 in zip(mesh.vertices, mesh.projected):
        lines.append("# v4 " + " ".join(_fmt(c) for c in p4))
        lines.append("v " + " ".join(_fmt(c) for c in p3))
    for f in mesh.faces:
        lines.append("f %d %d %d" % (f[0] + 1, f[1] + 1, f[2] + 1))
    text = "\n".join(lines) + "\n"
    try:
        with open(destination, "w", encoding="ascii") as fh:
            fh.write(text)
    except OSError as exc:
        raise MeshError(f"cannot write OBJ to {destination}: {exc}") from exc


def import_obj(source):
    """Re-read an OBJ written by export_obj, bit-exactly."""
    verts = []
    faces = []
    proj = None
    try:
        with open(source, "r", encoding="ascii") as fh:
            text = fh.read()
    except OSError as exc:
        raise MeshError(f"cannot read OBJ from {source}: {exc}") from exc
    for line in text.splitlines():
        if line.startswith("# projection "):
            vals = [float(t) for t in line.split()[2:]]
            proj = np.array(vals, dtype=float).reshape(3, 4)
        elif line.startswith("# v4 "):
            verts.append([float(t) for t in line.split()[2:]])
        elif line.startswith("f "):
            idx = [int(t) - 1 for t in line.split()[1:]]
            faces.append(idx)
    return Mesh(
        np.array(verts, dtype=float).reshape(-1, 4),
        np.array(faces, dtype=int).reshape(-1, 3),
        projection=proj,
    )


_PLY_VERTEX_PROPS = ("x", "y", "z", "x1", "x2", "x3", "x4")


def export_ply(mesh, destination):
    """Write a binary little-endian PLY.

    Vertices carry seven doubles: the projected x, y, z followed by the
    full R4 coordinates x1..x4.  Faces are uchar-counted int index lists.
    """
    header = ["ply", "format binary_little_endian 1.0", "comment planar-ends mesh"]
    header.append(
        "comment projection " + " ".join(_fmt(v) for v in mesh.projection.ravel())
    )
    header.append(f"element vertex {len(mesh.vertices)}")
    header.extend(f"property double {name}" for name in _PLY_VERTEX_PROPS)
    header.append(f"element face {len(mesh.faces)}")
    header.append("property list uchar int vertex_indices")
    header.append("end_header")
    vdata = np.hstack([mesh.projected, mesh.vertices]).astype("<f8")
    fparts = [struct.pack("<B3i", 3, *map(int, f)) for f in mesh.faces]
    blob = ("\n".join(header) + "\n").encode("ascii") + vdata.tobytes() + b"".join(
        fparts
    )
    try:
        with open(destination, "wb") as fh:
            fh.write(blob)
    except OSError as exc:
        raise MeshError(f"cannot write PLY to {destination}: {exc}") from exc


def import_ply(source):
    """Re-read a PLY written by export_ply, bit-exactly."""
    try:
        with open(source, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise MeshError(f"cannot read PLY from {source}: {exc}") from exc
    marker = b"end_header\n"
    cut = blob.find(marker)
    if cut < 0:
        raise MeshError(f"{source} is not a PLY file (no end_header)")
    header = blob[:cut].decode("ascii").splitlines()
    body = blob[cut + len(marker):]
    nvert = nface = 0
    proj = None
    for line in header:
        if line.startswith("element vertex "):
            nvert = int(line.split()[2])
        elif line.startswith("element face "):
            nface = int(line.split()[2])
        elif line.startswith("comment projection "):
            vals = [float(t) for t in line.split()[2:]]
            proj = np.array(vals, dtype=float).reshape(3, 4)
    vbytes = nvert * 7 * 8
    vdata = np.frombuffer(body[:vbytes], dtype="<f8").reshape(nvert, 7)
    ftype = np.dtype([("n", "u1"), ("v", "<i4", (3,))])
    fdata = np.frombuffer(body[vbytes : vbytes + nface * ftype.itemsize], dtype=ftype)
    if len(fdata) and not np.all(fdata["n"] == 3):
        raise MeshError(f"{source} contains a non-triangle face")
    return Mesh(
        vdata[:, 3:].copy(),
        fdata["v"].reshape(-1, 3).copy(),
        projection=proj,
    )


# ---------------------------------------------------------------------------
# verification reports
# ---------------------------------------------------------------------------


def build_verification_report(
    data,
    spec=None,
    numeric=False,
    *,
    period_tolerance=1e-8,
    curvature_tolerance=0.01,
    asymptotics_tolerance=1e-3,
    curvature_resolution=480,
    scan_resolution=10000,
    asymptotics_radii=(8.0, 16.0, 32.0, 64.0, 128.0),
):
    """Aggregate every certificate for one surface into a JSON-ready dict.

    The exact suite (conformality, end certificates, degrees, symmetry,
    periods) always runs; numeric=True adds total curvature, per-end
    asymptotics, and the self-intersection scan.  Every verdict carries a
    method tag ("exact" or "numeric") and its tolerance.
    """
    report = {}
    report["schema_version"] = SCHEMA_VERSION
    report["spec"] = spec
    report["kind"] = data.kind
    report["genus"] = data.genus

    conf_ok, witness = check_conformal(data)
    report["conformal"] = {
        "ok": bool(conf_ok),
        "witness": None if conf_ok else str(witness),
        "method": "exact",
        "tolerance": 0,
    }

    d1, d2 = gauss_degrees(data)
    report["degrees"] = {
        "values": [int(d1), int(d2)],
        "sum": int(d1 + d2),
        "method": "exact",
        "tolerance": 0,
    }

    ends = []
    for rep in end_reports(data):
        ends.append(
            {
                "puncture": _puncture_label(rep.puncture),
                "min_order": int(rep.min_order),
                "residues": [_ext_str(r) for r in rep.residues],
                "gauss_image": rep.gauss_image_str(),
                "on_quadric": bool(rep.on_quadric()),
                "embedded_planar": bool(rep.is_embedded_planar),
                "method": "exact",
                "tolerance": 0,
            }
        )
    report["ends"] = ends
    ends_ok = all(e["embedded_planar"] for e in ends)
    report["ends_pass"] = ends_ok

    if data.kind == "curve":
        sym_ok = bool(involution_check(data))
        report["symmetry"] = {"ok": sym_ok, "method": "exact", "tolerance": 0}
    else:
        sym_ok = None
        report["symmetry"] = {
            "ok": None,
            "note": "plane model carries no sheet swap",
            "method": "exact",
            "tolerance": 0,
        }

    periods_ok, records = real_periods_zero(data, tolerance=period_tolerance)
    rows = [
        {
            "label": r.label,
            "form_index": int(r.form_index),
            "real_part": float(r.real_part),
            "method": r.method,
        }
        for r in records
    ]
    exact_periods = all(r["method"] in ("primitive", "exact-residue") for r in rows)
    report["periods"] = {
        "ok": bool(periods_ok),
        "max_abs_real": max((abs(r["real_part"]) for r in rows), default=0.0),
        "method": "exact" if exact_periods else "numeric",
        "tolerance": float(period_tolerance),
        "records": rows,
    }

    verdicts = [conf_ok, ends_ok, periods_ok]
    if sym_ok is not None:
        verdicts.append(sym_ok)

    if numeric:
        try:
            tc = total_curvature(data, resolution=curvature_resolution)
            rel = abs(float(tc) - tc.exact) / max(abs(tc.exact), 1.0)
            entry = {
                "estimate": float(tc),
                "coarse": float(tc.coarse),
                "exact": float(tc.exact),
                "rel_error": rel,
                "ok": bool(rel <= curvature_tolerance),
                "method": "numeric",
                "tolerance": float(curvature_tolerance),
            }
        except NumericsError as exc:
            entry = {
                "error": str(exc),
                "ok": False,
                "method": "numeric",
                "tolerance": float(curvature_tolerance),
            }
        report["curvature"] = entry
        verdicts.append(entry["ok"])

        asy = []
        for p, erep in zip(data.punctures, end_reports(data)):
            base_entry = {
                "puncture": _puncture_label(p),
                "method": "numeric",
                "tolerance": float(asymptotics_tolerance),
            }
            if not erep.is_embedded_planar:
                base_entry["skipped"] = "end is not an embedded planar end"
                asy.append(base_entry)
                continue
            try:
                arep = end_asymptotics(data, p, list(asymptotics_radii))
                base_entry.update(
                    {
                        "passes": bool(arep.passes),
                        "beta_inv_norm": float(np.linalg.norm(arep.beta_inv)),
                        "beta_log_norm": float(np.linalg.norm(arep.beta_log)),
                        "residual_rms": float(arep.residual_rms),
                    }
                )
                verdicts.append(arep.passes)
            except NumericsError as exc:
                base_entry["error"] = str(exc)
                verdicts.append(False)
            asy.append(base_entry)
        report["asymptotics"] = asy

        try:
            scan = self_intersection_scan(data, resolution=scan_resolution)
            entry = {
                "sample_count": int(scan.sample_count),
                "raw_min": float(scan.raw_min),
                "min_separation": float(scan.min_separation),
                "candidate_count": len(scan.candidates),
                "flagged_count": len(scan.flagged),
                "ok": not scan.has_candidates,
                "disclaimer": scan.disclaimer,
                "method": "numeric",
                "tolerance": float(scan.flag_tolerance),
            }
            verdicts.append(entry["ok"])
        except NumericsError as exc:
            entry = {"error": str(exc), "ok": False, "method": "numeric"}
            verdicts.append(False)
        report["scan"] = entry

    report["pass"] = all(bool(v) for v in verdicts)
    return report


def write_report(report, destination):
    """Write a report as canonical JSON and return the serialized text.

    Key order is insertion order, floats print as shortest round-trip
    decimals, and NaN/Inf are rejected, so re-parsing and re-serializing
    the file reproduces it byte for byte.
    """
    text = json.dumps(report, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
    try:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise MeshError(f"cannot write report to {destination}: {exc}") from exc
    return text
