"""Reading and writing linkage and trajectory files.

Floats go through ``repr`` (shortest string that round-trips), so a file
written, read and written again is byte-identical.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from typing import Any

from .darboux_factor import (
    DesignParams,
    Factorization,
    LinkageDescription,
    extract_linkage,
    factorization_residual,
    is_degenerate,
    make_vertical_darboux,
    p3_offsets,
    closed_form_P1,
)
from .linkage_model import Trajectory
from .motion_poly import MotionPolynomial, coeff_residual

LINKAGE_FORMAT = "darboux-linkage/1"
FACTOR_NAMES = ("P1", "P2", "P3", "P4")


class FileFormatError(ValueError):
    pass


def design_block(p: DesignParams) -> dict[str, Any]:
    return {
        "b": p.b,
        "c": p.c,
        "q1": p.q1,
        "q2": p.q2,
        "z1": p.z1,
        "z2": p.z2,
        "z": p.z,
        "z3": p.z3,
        "degenerate": p.degenerate,
        "tol": p.tol,
    }


def linkage_to_dict(f: Factorization, linkage: LinkageDescription | None = None) -> dict[str, Any]:
    linkage = linkage or extract_linkage(f)
    return {
        "format": LINKAGE_FORMAT,
        "design": design_block(f.params),
        "factors": {name: [list(c.coeffs) for c in poly.coeffs] for name, poly in zip(FACTOR_NAMES, f.factors)},
        "joints": [
            {"name": j.name, "type": j.kind, "pluecker": list(j.axis.coords)} for j in linkage.joints
        ],
    }


def dumps_linkage(data: dict[str, Any]) -> str:
    return json.dumps(data, indent=2) + "\n"


def _float(block: dict, key: str, optional: bool = False) -> float | None:
    if key not in block:
        raise FileFormatError(f"design block is missing {key!r}")
    v = block[key]
    if v is None and optional:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise FileFormatError(f"design value {key!r} must be a finite number")
    return float(v)


def parse_design(block: Any) -> DesignParams:
    if not isinstance(block, dict):
        raise FileFormatError("design block must be an object")
    b, c, q1, q2 = (_float(block, k) for k in ("b", "c", "q1", "q2"))
    z1, z2, z3 = (_float(block, k) for k in ("z1", "z2", "z3"))
    z = _float(block, "z", optional=True)
    tol = _float(block, "tol")
    degenerate = block.get("degenerate")
    if degenerate is not (z is not None):
        raise FileFormatError("degenerate flag does not match the presence of z")
    if degenerate != is_degenerate(b, c, q1, q2, tol):
        raise FileFormatError("degenerate flag contradicts b^2 + c^2 - 4(q1^2 + q2^2)")
    if b == 0 and c == 0 or q1 == 0 and q2 == 0:
        raise FileFormatError("(b, c) and (q1, q2) must be nonzero")
    return DesignParams(b, c, q1, q2, z1=z1, z2=z2, z3=z3, z=z, tol=tol)


def parse_factor(name: str, rows: Any) -> MotionPolynomial:
    if not isinstance(rows, list) or len(rows) != 2:
        raise FileFormatError(f"factor {name} must be a list of 2 coefficient rows")
    for row in rows:
        if not isinstance(row, list) or len(row) != 8:
            raise FileFormatError(f"factor {name} rows must hold 8 numbers")
        for v in row:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise FileFormatError(f"factor {name} has a non-numeric coefficient")
    return MotionPolynomial.from_array(rows)


def linkage_from_dict(data: Any) -> Factorization:
    """Rebuild a :class:`Factorization` from the stored factors (not recomputed)."""
    if not isinstance(data, dict) or data.get("format") != LINKAGE_FORMAT:
        raise FileFormatError(f"not a {LINKAGE_FORMAT} file")
    params = parse_design(data.get("design"))
    factors = data.get("factors")
    if not isinstance(factors, dict):
        raise FileFormatError("factors block must be an object")
    polys = []
    for name in FACTOR_NAMES:
        if name not in factors:
            raise FileFormatError(f"factor {name} missing")
        polys.append(parse_factor(name, factors[name]))
    joints = data.get("joints")
    if not isinstance(joints, list) or len(joints) != 5:
        raise FileFormatError("joints block must list 5 joints")
    for j in joints:
        if not isinstance(j, dict) or j.get("type") not in ("R", "C") or len(j.get("pluecker", [])) != 6:
            raise FileFormatError("malformed joint entry")
    y1, y2 = p3_offsets(params.b, params.c, params.q1, params.q2)
    residual = factorization_residual(polys, params.b, params.c)
    deviation = coeff_residual(polys[0], closed_form_P1(params))
    return Factorization(
        params, make_vertical_darboux(params.b, params.c), *polys,
        y1=y1, y2=y2, z3=params.z3, residual=residual, closed_form_deviation=deviation,
    )


def load_linkage(path: str) -> tuple[Factorization, dict[str, Any]]:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    return linkage_from_dict(data), data


def params_hash(data: dict[str, Any]) -> str:
    canonical = json.dumps({"design": data["design"], "factors": data["factors"]}, sort_keys=True)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def trajectory_to_csv(traj: Trajectory, phash: str) -> str:
    buf = io.StringIO()
    buf.write(f"# branch: {traj.label}\n")
    buf.write(f"# assembly: {traj.assembly}\n")
    buf.write("# point: " + ",".join(repr(v) for v in traj.point) + "\n")
    buf.write(f"# params_hash: {phash}\n")
    buf.write("# skipped: " + ";".join(repr(t) for t in traj.skipped) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "x", "y", "z"])
    for row in traj.rows:
        writer.writerow([repr(v) for v in row])
    return buf.getvalue()


def trajectory_to_json(traj: Trajectory, phash: str) -> str:
    return json.dumps({
        "branch": traj.label,
        "assembly": traj.assembly,
        "point": list(traj.point),
        "params_hash": phash,
        "skipped": traj.skipped,
        "rows": [list(r) for r in traj.rows],
    }, indent=2) + "\n"


def read_trajectory(path: str) -> Trajectory:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        try:
            d = json.loads(text)
            traj = Trajectory(d["branch"], int(d["assembly"]), tuple(d["point"]))
            traj.rows = [tuple(float(v) for v in r) for r in d["rows"]]
            traj.skipped = [float(t) for t in d["skipped"]]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise FileFormatError(f"malformed trajectory file {path}: {exc}") from exc
        return traj
    header: dict[str, str] = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            header[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    try:
        rows = [tuple(float(v) for v in rec) for rec in csv.reader(body) if rec != ["t", "x", "y", "z"]]
        traj = Trajectory(
            header.get("branch", ""),
            int(header.get("assembly", "1")),
            tuple(float(v) for v in header.get("point", "0,0,0").split(",")),
        )
    except ValueError as exc:
        raise FileFormatError(f"malformed trajectory file {path}: {exc}") from exc
    if any(len(r) != 4 for r in rows):
        raise FileFormatError(f"malformed trajectory file {path}: rows need 4 columns")
    traj.rows = rows
    skipped = header.get("skipped", "")
    traj.skipped = [float(t) for t in skipped.split(";") if t]
    return traj
