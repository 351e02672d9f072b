"""JSON encoding of matrices, candidates and reports.

Complex numbers are ``[re, im]`` pairs; matrices are nested row lists of
such pairs; frames are stored column-major (a list of columns).  Infinite
or undefined reals are written as ``null``.
"""

import json
import math

import numpy as np

from .core import Signature
from .exceptions import DimensionError
from .selfmap import MapCandidate


class FormatError(ValueError):
    """Malformed JSON input."""


def _num(x):
    x = float(x)
    if not math.isfinite(x):
        return None
    return 0.0 if x == 0 else x  # no negative zero in output


def complex_json(z):
    z = complex(z)
    return [_num(z.real), _num(z.imag)]


def real_json(x):
    return None if x is None else _num(x)


def matrix_json(M):
    M = np.asarray(M, dtype=complex)
    return [[complex_json(z) for z in row] for row in M]


def vector_json(v):
    return [complex_json(z) for z in np.asarray(v, dtype=complex).ravel()]


def frame_json(Z):
    Z = np.asarray(Z, dtype=complex)
    return [vector_json(Z[:, k]) for k in range(Z.shape[1])]


def _parse_entry(e):
    if isinstance(e, bool):
        raise FormatError("booleans are not numbers")
    if isinstance(e, (int, float)):
        return complex(e)
    if isinstance(e, list) and len(e) == 2 and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in e):
        return complex(e[0], e[1])
    raise FormatError(f"bad complex entry {e!r}; expected a number or [re, im]")


def parse_vector(obj):
    if not isinstance(obj, list) or not obj:
        raise FormatError("vector must be a non-empty list")
    return np.array([_parse_entry(e) for e in obj], dtype=complex)


def parse_matrix(obj):
    if isinstance(obj, str):
        obj = loads(obj)
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise FormatError("matrix must be a non-empty list of rows")
    rows = [[_parse_entry(e) for e in r] for r in obj]
    if len({len(r) for r in rows}) != 1:
        raise FormatError("matrix rows have different lengths")
    return np.array(rows, dtype=complex)


def parse_frame(obj):
    """Column-major frame -> ``(n, r)`` array."""
    if isinstance(obj, str):
        obj = loads(obj)
    if not isinstance(obj, list) or not obj:
        raise FormatError("frame must be a non-empty list of columns")
    cols = [parse_vector(c) for c in obj]
    if len({c.size for c in cols}) != 1:
        raise FormatError("frame columns have different lengths")
    return np.column_stack(cols)


def loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed JSON: {exc}") from exc


def dumps(obj):
    """Byte-stable JSON text."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def signature_json(sig):
    d = {"p": sig.p, "q": sig.q}
    if sig.r is not None:
        d["r"] = sig.r
    return d


def candidate_json(cand):
    return {**signature_json(cand.signature), "matrix": matrix_json(cand.matrix)}


def parse_signature(obj):
    try:
        return Signature(int(obj["p"]), int(obj["q"]), None if obj.get("r") is None else int(obj["r"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad signature fields: {exc}") from exc


def parse_candidate(obj, sig=None):
    """``{"p", "q", "matrix"}`` (or a bare matrix when ``sig`` is given)."""
    if isinstance(obj, str):
        obj = loads(obj)
    if isinstance(obj, dict):
        if "input" in obj and "matrix" not in obj:  # a report written by this package
            obj = obj["input"]
        if "matrix" not in obj:
            raise FormatError("candidate needs a 'matrix' field")
        file_sig = parse_signature(obj) if "p" in obj else None
        if sig is not None and file_sig is not None and (sig.p, sig.q) != (file_sig.p, file_sig.q):
            raise DimensionError(f"signature {sig} disagrees with the file's {file_sig}")
        sig = sig or file_sig
        M = parse_matrix(obj["matrix"])
    else:
        M = parse_matrix(obj)
    if sig is None:
        raise FormatError("a signature is required (--sig or p/q fields)")
    return MapCandidate(M, sig)


# ------------------------------------------------------------------ reports


def scaling_json(s):
    if s.empty:
        return {"empty": True, "lo": None, "hi": None}
    return {"empty": False, "lo": real_json(s.lo), "hi": real_json(s.hi)}


def report_json(report, extension=None, null_vectors=None):
    d = {
        "verdict": report.verdict.value,
        "rank": report.rank,
        "kernel_signature": list(report.kernel_signature),
        "range_signature": list(report.range_signature),
        "scaling_interval": scaling_json(report.scaling),
        "isometry_constant": real_json(report.isometry_constant),
        "psd_margin": real_json(report.psd_margin),
    }
    if extension is not None:
        d["extension"] = extension.value
    if null_vectors is not None:
        d["kernel_null_vectors"] = [vector_json(v) for v in null_vectors]
    return d


def count_json(c):
    return "infinite" if c == math.inf else int(c)


def fixed_points_json(fa, jordan=None):
    d = {
        "records": [
            {
                "point": vector_json(r.point),
                "eigenvalue": complex_json(r.eigenvalue),
                "location": r.location.value,
                "margin": real_json(r.margin),
            }
            for r in fa.records
        ],
        "lines": [
            {
                "basis": frame_json(l.basis),
                "eigenvalue": complex_json(l.eigenvalue),
                "disposition": l.disposition.value,
                "signature": list(l.signature),
            }
            for l in fa.lines
        ],
        "counts": {k.value: count_json(v) for k, v in fa.counts.items()},
    }
    if jordan is not None:
        d["jordan"] = [
            {"eigenvalue": complex_json(j.eigenvalue), "block_sizes": list(j.block_sizes)} for j in jordan
        ]
    return d


def audit_json(entries):
    return [
        {"theorem": e.theorem, "hypothesis": e.hypothesis, "conclusion": e.conclusion, "status": e.status.value}
        for e in entries
    ]


def plane_json(P):
    return {"r": P.r, "frame": frame_json(P.frame)}


def parse_plane(obj, sig):
    from .grassmann import PlaneFrame

    if isinstance(obj, str):
        obj = loads(obj)
    Z = parse_frame(obj["frame"])
    if "r" in obj and int(obj["r"]) != Z.shape[1]:
        raise DimensionError("'r' disagrees with the number of frame columns")
    return PlaneFrame(Z, sig.with_r(Z.shape[1]))


def factors_json(seq):
    return [
        {
            "kind": f.kind,
            "matrix": matrix_json(f.matrix),
            "params": None
            if f.params is None
            else {"a": real_json(f.params.a), "b": real_json(f.params.b), "slot": int(f.params.slot)},
        }
        for f in seq.factors
    ]


def oracle_json(res):
    d = {"verdict": res.label, "samples": res.samples}
    if res.witness is not None:
        w = np.asarray(res.witness)
        d["witness"] = frame_json(w) if w.ndim == 2 else vector_json(w)
        im = np.asarray(res.image)
        d["image"] = frame_json(im) if im.ndim == 2 else vector_json(im)
    return d
