"""File schemas: canonical JSON, solution files, geometry files.

All floats are written with 17 significant digits (round-trip exact), so a
given input always produces byte-identical output files.
"""

import json
import math

import numpy as np

from .errors import SchemaError
from .pattern import DecoratedMetric
from .surface import GluedTriangulation, parse_problem, problem_dict


def _canon(value, out):
    if isinstance(value, dict):
        out.append("{")
        for k, (key, item) in enumerate(value.items()):
            if k:
                out.append(", ")
            out.append(json.dumps(str(key)))
            out.append(": ")
            _canon(item, out)
        out.append("}")
    elif isinstance(value, (list, tuple, np.ndarray)):
        out.append("[")
        for k, item in enumerate(value):
            if k:
                out.append(", ")
            _canon(item, out)
        out.append("]")
    elif isinstance(value, (bool, np.bool_)):
        out.append("true" if value else "false")
    elif isinstance(value, (int, np.integer)):
        out.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            raise SchemaError("cannot serialize a non-finite number")
        out.append(format(v, ".17g"))
    elif value is None:
        out.append("null")
    elif isinstance(value, str):
        out.append(json.dumps(value))
    else:
        raise SchemaError(f"cannot serialize {type(value).__name__}")


def canonical_json(value) -> str:
    """Deterministic JSON text: fixed float formatting, insertion key order."""
    out = []
    _canon(value, out)
    out.append("\n")
    return "".join(out)


def solution_dict(tri, data, x, report, tl=None, dm=None):
    doc = {
        "problem": problem_dict(tri, data),
        "angles": {
            "alpha": [list(map(float, row)) for row in x.alphas()],
            "gamma": [list(map(float, row)) for row in x.gammas()],
        },
    }
    if tl is not None:
        doc["a_edge"] = [float(v) for v in tl.a_edge]
        doc["a_vertex"] = [float(v) for v in tl.a_vertex]
    if dm is not None:
        doc["lengths"] = [float(v) for v in dm.lengths]
        doc["radii"] = [float(v) for v in dm.radii]
    doc["report"] = {
        "objective": report.objective,
        "grad_norm": report.projected_grad_norm,
        "iterations": report.iterations,
        "min_slack": report.min_slack,
        "residuals": {"compat1": report.compat1, "compat2": report.compat2},
        "status": report.status,
        "diagnostics": list(report.diagnostics),
    }
    return doc


def read_solution(text):
    """Parse a solution file; returns (tri, data, angles (T,6), dm or None)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"solution file is not valid JSON: {exc}") from exc
    if "problem" not in doc:
        raise SchemaError("solution file is missing the embedded 'problem'")
    tri, data = parse_problem(json.dumps(doc["problem"]))
    try:
        alpha = np.array(doc["angles"]["alpha"], dtype=float)
        gamma = np.array(doc["angles"]["gamma"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"solution file has invalid 'angles': {exc}") from exc
    if alpha.shape != (tri.triangle_count, 3) or gamma.shape != (tri.triangle_count, 3):
        raise SchemaError("solution angles have the wrong shape")
    dm = None
    if "lengths" in doc and "radii" in doc:
        lengths = np.array(doc["lengths"], dtype=float)
        radii = np.array(doc["radii"], dtype=float)
        if lengths.shape != (len(tri.edges),) or radii.shape != (len(tri.vertices),):
            raise SchemaError("solution lengths/radii have the wrong shape")
        dm = DecoratedMetric(lengths=lengths, radii=radii)
    return tri, data, np.hstack([alpha, gamma]).reshape(-1), dm


def geometry_dict(tri, dm):
    return {
        "triangles": tri.triangle_count,
        "gluings": [{"a": list(a), "b": list(b)} for a, b in tri.gluings],
        "lengths": [float(v) for v in dm.lengths],
        "radii": [float(v) for v in dm.radii],
    }


def parse_geometry(text):
    """Parse a geometry file; returns (GluedTriangulation, DecoratedMetric)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"geometry file is not valid JSON: {exc}") from exc
    for key in ("triangles", "gluings", "lengths", "radii"):
        if key not in doc:
            raise SchemaError(f"geometry file is missing key {key!r}")
    gluings = [(tuple(g["a"]), tuple(g["b"])) for g in doc["gluings"]]
    tri = GluedTriangulation(int(doc["triangles"]), gluings)
    lengths = np.array(doc["lengths"], dtype=float)
    radii = np.array(doc["radii"], dtype=float)
    if lengths.shape != (len(tri.edges),):
        raise SchemaError(f"geometry needs {len(tri.edges)} lengths, got {lengths.shape}")
    if radii.shape != (len(tri.vertices),):
        raise SchemaError(f"geometry needs {len(tri.vertices)} radii, got {radii.shape}")
    return tri, DecoratedMetric(lengths=lengths, radii=radii)
