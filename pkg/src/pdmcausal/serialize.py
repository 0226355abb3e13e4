"""JSON and CSV formats, plus the small parsers used by the CLI.

The repo-wide matrix format is an object with fields ``dim`` (integer) and
``re``/``im`` (dim x dim row-major arrays). Floats are emitted with
Python's shortest round-trip repr, which carries full double precision
(at least 15 significant digits), so writing and re-reading a matrix is
lossless and repeated writes of the same data are byte-identical.
"""

import json
import math
import re

import numpy as np

from .channels import ChannelCJ
from .pdm import PDM, CorrelatorTable, pdm
from .tensor import as_complex_matrix

CSV_HEADER = "param,eig_r_1,eig_r_2,eig_r_3,eig_r_4,f_pdm,f_fwd,f_rev,verdict"


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------


def matrix_to_jsonable(m) -> dict:
    a = as_complex_matrix(m)
    return {
        "dim": int(a.shape[0]),
        "re": [[float(x) for x in row] for row in a.real],
        "im": [[float(x) for x in row] for row in a.imag],
    }


def matrix_from_jsonable(obj) -> np.ndarray:
    if not isinstance(obj, dict) or not {"dim", "re", "im"} <= set(obj):
        raise ValueError("matrix payload needs fields dim, re, im")
    dim = int(obj["dim"])
    re_part = np.asarray(obj["re"], dtype=float)
    im_part = np.asarray(obj["im"], dtype=float)
    if re_part.shape != (dim, dim) or im_part.shape != (dim, dim):
        raise ValueError(
            f"matrix payload shape mismatch: dim={dim}, re {re_part.shape}, im {im_part.shape}"
        )
    return re_part + 1j * im_part


# ---------------------------------------------------------------------------
# domain objects
# ---------------------------------------------------------------------------


def pdm_to_jsonable(r: PDM) -> dict:
    out = matrix_to_jsonable(r.mat)
    out["labels_t1"] = list(r.labels_t1)
    out["labels_t2"] = list(r.labels_t2)
    return out


def pdm_from_jsonable(obj) -> PDM:
    mat = matrix_from_jsonable(obj)
    return pdm(mat, obj.get("labels_t1"), obj.get("labels_t2"))


def table_to_jsonable(t: CorrelatorTable) -> list:
    return [
        {"p1": p1, "p2": p2, "value": float(t.values[(p1, p2)])}
        for p1, p2 in sorted(t.values)
    ]


def table_from_jsonable(obj) -> CorrelatorTable:
    if not isinstance(obj, list) or not obj:
        raise ValueError("correlator table payload must be a nonempty array of records")
    values = {}
    for rec in obj:
        try:
            values[(str(rec["p1"]), str(rec["p2"]))] = float(rec["value"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"bad correlator record {rec!r}") from exc
    n = len(next(iter(values))[0])
    return CorrelatorTable(n=n, values=values)


def channel_to_jsonable(c: ChannelCJ) -> dict:
    out = matrix_to_jsonable(c.mat)
    out["in_dim"] = int(c.in_dim)
    out["out_dim"] = int(c.out_dim)
    return out


def channel_from_jsonable(obj) -> ChannelCJ:
    mat = matrix_from_jsonable(obj)
    try:
        return ChannelCJ(mat=mat, in_dim=int(obj["in_dim"]), out_dim=int(obj["out_dim"]))
    except KeyError as exc:
        raise ValueError(f"channel payload is missing field {exc}") from exc


def extraction_to_jsonable(res) -> dict:
    out = matrix_to_jsonable(res.m)
    out["method"] = res.method
    out["residual"] = float(res.residual)
    out["objective"] = None if res.objective is None else float(res.objective)
    out["iterations"] = int(res.iterations)
    out["possibly_degenerate"] = bool(res.possibly_degenerate)
    return out


# ---------------------------------------------------------------------------
# sweep records
# ---------------------------------------------------------------------------


def records_to_jsonable(records) -> list:
    out = []
    for rec in records:
        out.append(
            {
                "param": float(rec.param),
                "eig_pdm": [float(x) for x in rec.eig_pdm],
                "f_pdm": float(rec.f_pdm),
                "eig_forward": [float(x) for x in rec.eig_forward],
                "eig_reverse": [float(x) for x in rec.eig_reverse],
                "f_forward": float(rec.f_forward),
                "f_reverse": float(rec.f_reverse),
                "verdict": rec.verdict,
                "error": rec.error,
            }
        )
    return out


def _csv_float(x) -> str:
    return repr(float(x))


def records_to_csv(records) -> str:
    """Fixed-column CSV for single-qubit-per-time sweeps.

    Columns: param, the four PDM eigenvalues ascending, the three
    negativity values, and the verdict. Larger registers only fit the JSON
    format.
    """
    lines = [CSV_HEADER]
    for rec in records:
        if len(rec.eig_pdm) != 4:
            raise ValueError(
                "CSV output is defined for 4-dimensional PDMs; use --format json"
            )
        verdict = rec.verdict if rec.error is None else "ExtractionFailed"
        lines.append(
            ",".join(
                [_csv_float(rec.param)]
                + [_csv_float(x) for x in rec.eig_pdm]
                + [_csv_float(rec.f_pdm), _csv_float(rec.f_forward), _csv_float(rec.f_reverse)]
                + [verdict]
            )
        )
    return "\n".join(lines) + "\n"


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# ---------------------------------------------------------------------------
# CLI parsers
# ---------------------------------------------------------------------------

_ANGLE_RE = re.compile(r"^\s*(-?)\s*(\d+(?:\.\d+)?)?\s*\*?\s*(pi)?\s*(?:/\s*(\d+(?:\.\d+)?))?\s*$")


def parse_angle(text) -> float:
    """Parse an angle like ``0.7``, ``pi``, ``3pi/8``, ``-pi/2`` or ``2*pi/3``."""
    if isinstance(text, (int, float)):
        return float(text)
    match = _ANGLE_RE.match(text)
    if not match or (match.group(2) is None and match.group(3) is None):
        raise ValueError(f"cannot parse angle {text!r}")
    sign, coeff, has_pi, denom = match.groups()
    value = float(coeff) if coeff is not None else 1.0
    if has_pi:
        value *= math.pi
    if denom is not None:
        value /= float(denom)
    return -value if sign == "-" else value


def parse_grid(text) -> tuple:
    """Parse ``start:stop:count`` (inclusive endpoints) or a comma list.

    Endpoint expressions accept the :func:`parse_angle` grammar, so
    ``0:pi:17`` is seventeen evenly spaced points from 0 to pi.
    """
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid {text!r} must be start:stop:count")
        start, stop = parse_angle(parts[0]), parse_angle(parts[1])
        count = int(parts[2])
        if count < 2:
            raise ValueError("grid needs at least two points")
        return tuple(float(x) for x in np.linspace(start, stop, count))
    return tuple(parse_angle(p) for p in text.split(","))
