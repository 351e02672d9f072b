"""Command-line front end.

Exit status: 0 for any computed verdict (including negative ones), 2 for
unreadable or malformed input, 3 for a dimension mismatch, 4 when the
requested analysis does not apply to the input (e.g. fixed points of a
map that is not a self map), 5 for numerical failures.
"""

import argparse
import math
import sys

import numpy as np

from . import io
from ._config import Tolerances
from .automorphisms import PartialIsometry, normal_form, phase_aligned_error, witt_extend, witt_residuals
from .core import Signature, projective_normalize
from .exceptions import (
    ClusteredSpectrumError,
    ConvergenceError,
    DimensionError,
    GenballError,
    InvariantViolation,
    NotSelfMapError,
    PreconditionError,
)
from .fixed_points import analyze_fixed_points, jordan_structure, theorem_audit
from .fixtures import FIXTURES, get_fixture
from .grassmann import oracle_selfmap_planes
from .selfmap import classify, extension_obstruction, kernel_null_vectors, oracle_selfmap_vectors

EXIT_FORMAT = 2
EXIT_DIMENSION = 3
EXIT_PRECONDITION = 4
EXIT_NUMERICAL = 5


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


# ------------------------------------------------------------------ formatting


def fmt_real(x):
    if x is None:
        return "none"
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.12g}"


def fmt_complex(z):
    z = complex(z)
    re, im = z.real, z.imag
    if im == 0:
        return fmt_real(re)
    if re == 0:
        return f"{fmt_real(im)}i"
    sign = "+" if im >= 0 else "-"
    return f"{fmt_real(re)}{sign}{fmt_real(abs(im))}i"


def fmt_vector(v):
    return "[" + ", ".join(fmt_complex(z) for z in np.asarray(v).ravel()) + "]"


def fmt_matrix(M, indent="  "):
    return "\n".join(indent + fmt_vector(row) for row in np.asarray(M))


# ------------------------------------------------------------------ input


def _signature(text):
    try:
        return Signature.parse(text)
    except (ValueError, TypeError) as exc:
        raise CliError(f"bad --sig {text!r}: {exc}", EXIT_FORMAT) from exc


def _tolerances(args):
    try:
        return Tolerances(null=args.tol_null, psd=args.tol_psd, eig=args.tol_eig, rank=args.tol_rank)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_FORMAT) from exc


def _read_json_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_FORMAT) from exc
    return io.loads(text)


def load_candidate(args):
    sig = _signature(args.sig) if args.sig else None
    sources = [s for s in (args.matrix, args.file, args.fixture) if s is not None]
    if len(sources) != 1:
        raise CliError("give exactly one of --matrix, --file, --fixture", EXIT_FORMAT)
    if args.fixture is not None:
        try:
            fx = get_fixture(args.fixture)
        except KeyError as exc:
            raise CliError(str(exc.args[0]), EXIT_FORMAT) from exc
        cand = fx.candidate
        if sig is not None and (sig.p, sig.q) != (cand.signature.p, cand.signature.q):
            raise CliError(f"fixture {fx.name} has signature {cand.signature}", EXIT_DIMENSION)
        if sig is not None and sig.r is not None:
            cand = type(cand)(cand.matrix, cand.signature.with_r(sig.r))
        return cand
    obj = io.loads(args.matrix) if args.matrix is not None else _read_json_file(args.file)
    cand = io.parse_candidate(obj, sig)
    return cand


# ------------------------------------------------------------------ commands


def cmd_classify(args, tol):
    cand = load_candidate(args)
    report = classify(cand, tol=tol)
    ext = nulls = None
    if report.verdict.is_self_map:
        ext = extension_obstruction(cand, tol=tol, report=report)
        K0 = kernel_null_vectors(cand.matrix, cand.signature, tol)
        nulls = [projective_normalize(K0[:, k]) for k in range(K0.shape[1])]
    data = {"command": "classify", "input": io.candidate_json(cand), "report": io.report_json(report, ext, nulls)}
    lines = [
        f"signature: {cand.signature}",
        f"verdict: {report.verdict.value}",
        f"rank: {report.rank}",
        f"kernel signature: {tuple(report.kernel_signature)}",
        f"range signature: {tuple(report.range_signature)}",
    ]
    s = report.scaling
    lines.append("scaling interval: empty" if s.empty else f"scaling interval: [{fmt_real(s.lo)}, {fmt_real(s.hi)}]")
    if report.isometry_constant is not None:
        lines.append(f"isometry constant: {fmt_real(report.isometry_constant)}")
    if ext is not None:
        lines.append(f"extension: {ext.value}")
        for v in nulls or []:
            lines.append(f"note: indeterminacy meets the boundary at {fmt_vector(v)}")
    return data, lines


def cmd_fixed_points(args, tol):
    cand = load_candidate(args)
    fa = analyze_fixed_points(cand.matrix, cand.signature, tol)
    try:
        jordan = jordan_structure(cand.matrix, cand.signature, tol)
        jordan_note = None
    except ClusteredSpectrumError as exc:
        jordan, jordan_note = None, str(exc)
    data = {"command": "fixed-points", "input": io.candidate_json(cand), **io.fixed_points_json(fa, jordan)}
    if jordan_note:
        data["jordan_error"] = jordan_note
    lines = [f"{k.value}: {io.count_json(v)}" for k, v in fa.counts.items()]
    for r in fa.records:
        lines.append(f"point {fmt_vector(r.point)} eigenvalue {fmt_complex(r.eigenvalue)} {r.location.value}")
    for ln in fa.lines:
        lines.append(f"line eigenvalue {fmt_complex(ln.eigenvalue)} {ln.disposition.value} signature {ln.signature}")
    if jordan is not None:
        for j in jordan:
            lines.append(f"jordan eigenvalue {fmt_complex(j.eigenvalue)} blocks {list(j.block_sizes)}")
    elif jordan_note:
        lines.append(f"jordan: {jordan_note}")
    return data, lines


def cmd_normal_form(args, tol):
    cand = load_candidate(args)
    seq = normal_form(cand.matrix, cand.signature, tol)
    A = cand.matrix
    err = phase_aligned_error(A, seq.product()) / max(np.linalg.norm(A), 1e-300)
    data = {
        "command": "normal-form",
        "input": io.candidate_json(cand),
        "word": seq.word(),
        "reduced_word": seq.reduced_word(),
        "scale": io.real_json(seq.scale),
        "factors": io.factors_json(seq),
        "reconstruction_error": io.real_json(err),
    }
    lines = [f"word: {seq.word()}", f"reduced word: {seq.reduced_word()}", f"scale: {fmt_real(seq.scale)}"]
    names = seq.word().split()
    for name, f in zip(names, seq.factors):
        extra = "" if f.params is None else f" a={fmt_real(f.params.a)} b={fmt_real(f.params.b)} slot={f.params.slot}"
        lines.append(f"{name} ({f.kind}){extra}")
        lines.append(fmt_matrix(f.matrix))
    lines.append(f"reconstruction error: {fmt_real(err)}")
    return data, lines


def _load_partial_isometry(args):
    if args.fixture is not None or args.matrix is not None:
        # restrict the map to the span of the first coordinate vectors
        cand = load_candidate(args)
        k = args.k or 1
        if not 1 <= k <= cand.signature.n:
            raise CliError(f"--k must lie in 1..{cand.signature.n}", EXIT_DIMENSION)
        X = np.eye(cand.signature.n, dtype=complex)[:, :k]
        return PartialIsometry(X, cand.matrix @ X, cand.signature)
    if args.file is not None:
        obj = _read_json_file(args.file)
        try:
            sig = io.parse_signature(obj)
            X, Y = io.parse_frame(obj["domain"]), io.parse_frame(obj["images"])
        except (KeyError, TypeError) as exc:
            raise CliError(f"witt input needs p, q, domain, images: {exc}", EXIT_FORMAT) from exc
        if args.sig:
            s2 = _signature(args.sig)
            if (s2.p, s2.q) != (sig.p, sig.q):
                raise CliError("--sig disagrees with the file", EXIT_DIMENSION)
    else:
        if not (args.sig and args.domain and args.images):
            raise CliError("witt needs --file, --fixture, --matrix, or --sig with --domain and --images", EXIT_FORMAT)
        sig = _signature(args.sig)
        X, Y = io.parse_frame(args.domain), io.parse_frame(args.images)
    if X.shape != Y.shape or X.shape[0] != sig.n:
        raise CliError(f"domain/images must both be ({sig.n}, k) frames", EXIT_DIMENSION)
    return PartialIsometry(X, Y, sig)


def cmd_witt(args, tol):
    f = _load_partial_isometry(args)
    F = witt_extend(f, tol=tol)
    iso, interp = witt_residuals(F, f, f.signature)
    data = {
        "command": "witt",
        "input": {
            **io.signature_json(f.signature),
            "domain": io.frame_json(f.domain_basis),
            "images": io.frame_json(f.images),
        },
        "extension": io.matrix_json(F),
        "isometry_residual": io.real_json(iso),
        "interpolation_residual": io.real_json(interp),
    }
    lines = ["extension:", fmt_matrix(F), f"isometry residual: {fmt_real(iso)}", f"interpolation residual: {fmt_real(interp)}"]
    return data, lines


def cmd_oracle(args, tol):
    cand = load_candidate(args)
    r = cand.signature.r
    if r is None:
        res = oracle_selfmap_vectors(cand, samples=args.samples, seed=args.seed, tol=tol)
        mode = "vectors"
    else:
        res = oracle_selfmap_planes(cand, r, samples=args.samples, seed=args.seed, tol=tol)
        mode = f"{r}-planes"
    verdict = classify(cand, tol=tol).verdict
    agree = res.consistent == verdict.is_self_map
    data = {
        "command": "oracle",
        "input": io.candidate_json(cand),
        "mode": mode,
        "seed": args.seed,
        "oracle": io.oracle_json(res),
        "classify": verdict.value,
        "agree": agree,
    }
    lines = [f"oracle ({mode}, {res.samples} samples, seed {args.seed}): {res.label}", f"classify: {verdict.value}", f"agree: {agree}"]
    if res.witness is not None:
        lines.append(f"witness: {fmt_matrix(np.atleast_2d(res.witness.T), '')}")
    return data, lines


def cmd_audit(args, tol):
    cand = load_candidate(args)
    entries = theorem_audit(cand.matrix, cand.signature, tol)
    data = {"command": "audit", "input": io.candidate_json(cand), "audit": io.audit_json(entries)}
    lines = [
        f"{e.theorem}: {e.status.value} (hypothesis {str(e.hypothesis).lower()}, conclusion {str(e.conclusion).lower()})"
        for e in entries
    ]
    return data, lines


def cmd_examples(args, tol):
    data = {
        "command": "examples",
        "fixtures": [
            {"name": f.name, **io.signature_json(f.signature), "provenance": f.provenance} for f in FIXTURES.values()
        ],
    }
    lines = [f"{f.name} ({f.signature}): {f.provenance}" for f in FIXTURES.values()]
    return data, lines


COMMANDS = {
    "classify": (cmd_classify, "classify a matrix as a self map of D_{p,q}"),
    "fixed-points": (cmd_fixed_points, "fixed points, fixed lines and Jordan data"),
    "normal-form": (cmd_normal_form, "factor an automorphism into block unitaries and dilations"),
    "witt": (cmd_witt, "extend a partial isometry to an element of U(p,q)"),
    "oracle": (cmd_oracle, "sampling check of the self-map property (vectors, or r-planes with --sig p,q,r)"),
    "audit": (cmd_audit, "evaluate the fixed-point count theorems on a map"),
    "examples": (cmd_examples, "list the bundled fixtures"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="genball", description="Linear self maps of generalized balls.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sig", help="signature p,q[,r]")
    src = common.add_argument_group("input")
    src.add_argument("--matrix", help="matrix as JSON rows of numbers or [re, im] pairs")
    src.add_argument("--file", help="JSON file with p, q, matrix")
    src.add_argument("--fixture", help="name of a bundled fixture (see 'examples')")
    common.add_argument("--samples", type=int, default=5000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol-null", type=float, default=1e-8)
    common.add_argument("--tol-psd", type=float, default=1e-9)
    common.add_argument("--tol-eig", type=float, default=1e-9)
    common.add_argument("--tol-rank", type=float, default=1e-10)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=help_text)
        if name == "witt":
            sp.add_argument("--domain", help="domain frame, column-major JSON")
            sp.add_argument("--images", help="image frame, column-major JSON")
            sp.add_argument("--k", type=int, help="with --fixture/--matrix: restrict to the first k coordinate vectors")
    return parser


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        if args.samples < 1:
            raise CliError("--samples must be >= 1", EXIT_FORMAT)
        tol = _tolerances(args)
        data, lines = func(args, tol)
    except CliError as exc:
        print(f"error: {exc}", file=stderr)
        return exc.code
    except io.FormatError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_FORMAT
    except DimensionError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_DIMENSION
    except (NotSelfMapError, PreconditionError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_PRECONDITION
    except (ConvergenceError, InvariantViolation, ClusteredSpectrumError, GenballError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_FORMAT
    if args.json:
        stdout.write(io.dumps(data))
    else:
        stdout.write("\n".join(lines) + "\n")
    return 0


def main():
    sys.exit(run())
