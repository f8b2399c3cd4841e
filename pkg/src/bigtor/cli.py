"""Command-line front end: .tcx problem files in, reports out.

The .tcx format is line oriented.  `#` starts a comment.  Recognized
lines:

    m = 4
    faces = {1 2} {2 3} {3 4} {1 4}
    B = [1 0 -2 0 ; 0 2 0 -1]
    form u3 = x2 + x3 - x4

Exit codes: 0 for any computed verdict (a FAILS verdict is a result,
not an error), 1 for bad input, 2 for internal consistency errors.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass, replace

from .errors import InputError, InternalCheckError
from .gkm import find_torsion, gkm_check, phi_restrictions
from .gysin import build_gysin_data, connecting_map_check, verify_exactness
from .intlinalg import IntMatrix, ZModule
from .koszul_tor import (
    depth_estimate,
    rational_tor_ranks,
    regular_sequence_check,
    tor1_witness,
    tor_table,
    verdicts,
)
from .simplicial import (
    SimplicialComplex,
    SubgroupData,
    build_complex,
    check_connected_kernel,
    check_local_freeness,
)
from .stanley_reisner import (
    LinearForm,
    annihilator_search,
    hilbert_coefficient,
    parse_linear_form,
    parse_polynomial,
)


@dataclass(frozen=True)
class ProblemSpec:
    """Parsed .tcx content plus the per-run options from flags."""

    complex: SimplicialComplex
    B: SubgroupData | None = None
    extra_forms: tuple = ()  # (name, LinearForm) pairs, file order
    max_degree: int = 12
    rational: bool = False
    split: int | None = None

    def form(self, name: str) -> LinearForm:
        for key, value in self.extra_forms:
            if key == name:
                return value
        raise InputError(f"no form named {name!r} in the input file")

    def require_B(self) -> SubgroupData:
        if self.B is None:
            raise InputError("this command needs a B matrix in the input file")
        return self.B


_FACE_RE = re.compile(r"\{([^{}]*)\}")
_FORM_KEY_RE = re.compile(r"form\s+([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(.*)")


def _fail(line_no: int, message: str):
    raise InputError(f"line {line_no}: {message}")


def parse_problem(text: str) -> ProblemSpec:
    """Parse .tcx text; problems are reported with their line number."""
    m = None
    faces_line = None
    b_line = None
    forms = []
    seen_names = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("form"):
            match = _FORM_KEY_RE.fullmatch(line)
            if not match:
                _fail(line_no, "expected 'form <name> = <linear expression>'")
            name, expr = match.group(1), match.group(2)
            if name in seen_names:
                _fail(line_no, f"duplicate form name {name!r}")
            seen_names.add(name)
            forms.append((line_no, name, expr))
            continue
        if "=" not in line:
            _fail(line_no, f"expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "m":
            if m is not None:
                _fail(line_no, "duplicate key 'm'")
            try:
                m = int(value)
            except ValueError:
                _fail(line_no, f"m must be an integer, got {value!r}")
            if m < 0:
                _fail(line_no, "m must be nonnegative")
        elif key == "faces":
            if faces_line is not None:
                _fail(line_no, "duplicate key 'faces'")
            faces_line = (line_no, value)
        elif key == "B":
            if b_line is not None:
                _fail(line_no, "duplicate key 'B'")
            b_line = (line_no, value)
        else:
            _fail(line_no, f"unknown key {key!r}")
    if m is None:
        raise InputError("missing required key 'm'")

    faces = []
    if faces_line is not None:
        line_no, value = faces_line
        leftover = _FACE_RE.sub(" ", value).strip()
        if leftover:
            _fail(line_no, f"unexpected text in faces: {leftover!r}")
        for group in _FACE_RE.findall(value):
            try:
                vertices = tuple(int(tok) for tok in group.split())
            except ValueError:
                _fail(line_no, f"face {{{group}}} contains a non-integer")
            faces.append(vertices)
        try:
            complex_ = build_complex(m, faces)
        except InputError as exc:
            _fail(line_no, str(exc))
    else:
        complex_ = build_complex(m, [])

    subgroup = None
    if b_line is not None:
        line_no, value = b_line
        if not (value.startswith("[") and value.endswith("]")):
            _fail(line_no, "B must be bracketed, like [1 0 ; 0 1]")
        body = value[1:-1].strip()
        rows = []
        if body:
            for chunk in body.split(";"):
                try:
                    row = [int(tok) for tok in chunk.split()]
                except ValueError:
                    _fail(line_no, f"matrix row {chunk.strip()!r} contains a non-integer")
                if len(row) != m:
                    _fail(
                        line_no,
                        f"matrix row has {len(row)} entries, expected m = {m}",
                    )
                rows.append(row)
        try:
            subgroup = SubgroupData(IntMatrix(rows, cols=m))
        except InputError as exc:
            _fail(line_no, str(exc))

    parsed_forms = []
    for line_no, name, expr in forms:
        try:
            parsed_forms.append((name, parse_linear_form(expr, m)))
        except InputError as exc:
            _fail(line_no, str(exc))

    return ProblemSpec(complex=complex_, B=subgroup, extra_forms=tuple(parsed_forms))


def render_problem(spec: ProblemSpec) -> str:
    """Canonical .tcx text; parse(render(spec)) round-trips."""
    lines = [f"m = {spec.complex.m}"]
    faces = spec.complex.face_vertices()
    if faces:
        lines.append(
            "faces = " + " ".join("{" + " ".join(map(str, f)) + "}" for f in faces)
        )
    if spec.B is not None:
        rows = " ; ".join(
            " ".join(str(x) for x in spec.B.B.row(r)) for r in range(spec.B.n)
        )
        lines.append(f"B = [{rows}]")
    for name, form in spec.extra_forms:
        lines.append(f"form {name} = {form.render()}")
    return "\n".join(lines) + "\n"


# --- JSON helpers ---------------------------------------------------------


def _group_json(z: ZModule) -> dict:
    return {"rank": z.rank, "torsion": list(z.torsion)}


def _verdict_json(v) -> dict:
    out = {"status": v.status, "bound": v.bound}
    if v.witness:
        out["witness"] = {k: value for k, value in v.witness}
    return out


def emit_json(command: str, input_path: str, max_degree: int, result: dict) -> str:
    payload = {
        "command": command,
        "input": input_path,
        "max_degree": max_degree,
        "result": result,
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


# --- command implementations ----------------------------------------------


def _cmd_tor(spec: ProblemSpec):
    S = spec.require_B()
    D = spec.max_degree
    if spec.rational:
        ranks = rational_tor_ranks(spec.complex, S, D)
        entries = [
            {"p": p, "j": j, "q": j - p, "rank": r, "torsion": []}
            for (p, j), r in sorted(ranks.items())
            if r
        ]
        result = {"entries": entries, "coefficients": "rational"}
        lines = ["Tor ranks over Q (D = %d, n = %d)" % (D, S.n)]
        for e in entries:
            lines.append(
                f"  Tor_{e['p']} at j={e['j']} (q={e['q']}): rank {e['rank']}"
            )
        if not entries:
            lines.append("  all pieces are zero")
        return result, "\n".join(lines)

    table = tor_table(spec.complex, S, D)
    entries = [
        {"p": p, "j": j, "q": j - p, "rank": z.rank, "torsion": list(z.torsion)}
        for p, j, z in table.entries()
    ]
    result = {"entries": entries}
    js = list(range(0, D + 1, 2))
    width = max([len(str(table.piece(p, j))) for p in range(S.n + 1) for j in js] + [4])
    header = "  p\\j " + " ".join(f"{j:>{width}}" for j in js)
    lines = [f"Tor table (D = {D}, n = {S.n})", header]
    for p in range(S.n + 1):
        row = " ".join(f"{str(table.piece(p, j)):>{width}}" for j in js)
        lines.append(f"  {p:<3} " + row)
    lines.append("cohomological view (q = j - p), nonzero pieces:")
    if entries:
        for e in entries:
            lines.append(
                f"  q={e['q']}: Tor_{e['p']} at j={e['j']} is "
                + str(table.piece(e["p"], e["j"]))
            )
    else:
        lines.append("  none")
    return result, "\n".join(lines)


def _witness_json(w) -> dict:
    return {
        "p": w.index.p,
        "j": w.index.j,
        "q": w.index.q,
        "cycle": [
            {"xi": i, "coefficient": poly.render()} for i, poly in w.components
        ],
        "explanation": w.explanation,
    }


def _cmd_check_bigcm(spec: ProblemSpec):
    S = spec.require_B()
    D = spec.max_degree
    table = tor_table(spec.complex, S, D)
    verdict = verdicts(table).bigcm
    regular = regular_sequence_check(spec.complex, S, D)
    if verdict.holds() != regular.regular:
        raise InternalCheckError(
            "Tor_1 verdict and direct regular-sequence check disagree: "
            f"bigcm={verdict}, regular={regular.regular}"
        )
    result = {
        "status": verdict.status,
        "bound": verdict.bound,
        "regular_sequence": {"regular": regular.regular},
    }
    if verdict.holds():
        text = [f"big Cohen-Macaulay: HOLDS_UP_TO({D})"]
        text.append("regular-sequence check agrees: regular up to the bound")
    else:
        w = tor1_witness(spec.complex, S, D)
        if w is None:
            raise InternalCheckError("bigcm FAILS but no Tor_1 witness found")
        result["witness"] = _witness_json(w)
        text = [
            f"big Cohen-Macaulay: FAILS: witness at (p=1, j={w.index.j}): "
            + w.explanation
        ]
        rw = regular.witness
        result["regular_sequence"]["witness"] = {
            "stage": rw.stage,
            "j": rw.j,
            "class": rw.class_text,
            "form": rw.form_text,
        }
        text.append(f"regular-sequence check agrees: {rw}")
    return result, "\n".join(text)


def _cmd_check_free(spec: ProblemSpec):
    S = spec.require_B()
    D = spec.max_degree
    table = tor_table(spec.complex, S, D)
    report = verdicts(table)
    depth = depth_estimate(table)
    result = {
        "bigcm": _verdict_json(report.bigcm),
        "odd_vanishing": _verdict_json(report.odd_vanishing),
        "tor0_torsion_free": _verdict_json(report.tor0_torsion_free),
        "free_over_R": _verdict_json(report.free_over_R),
        "depth": {
            "value": depth.value,
            "qualifier": depth.qualifier,
            "bound": depth.bound,
        },
    }
    text = [
        f"bigcm:             {report.bigcm}",
        f"odd_vanishing:     {report.odd_vanishing}",
        f"tor0_torsion_free: {report.tor0_torsion_free}",
        f"free_over_R:       {report.free_over_R}",
        f"depth:             {depth}",
    ]
    return result, "\n".join(text)


def _cmd_check_local_free(spec: ProblemSpec):
    S = spec.require_B()
    report = check_local_freeness(spec.complex, S)
    result = {
        "status": report.status,
        "face_determinants": [
            {"face": list(face), "det": d} for face, d in report.face_dets
        ],
        "failing_faces": [list(face) for face in report.failing_faces],
        "warnings": list(report.warnings),
    }
    if report.reason:
        result["reason"] = report.reason
    text = [f"local freeness: {report.status}"]
    for face, d in report.face_dets:
        text.append(f"  face {{{' '.join(map(str, face))}}}: det = {d}")
    if report.failing_faces:
        text.append(
            "  failing faces: "
            + ", ".join("{" + " ".join(map(str, f)) + "}" for f in report.failing_faces)
        )
    if report.reason:
        text.append(f"  reason: {report.reason}")
    for w in report.warnings:
        text.append(f"  warning: {w}")
    return result, "\n".join(text)


def _cmd_check_connected(spec: ProblemSpec):
    S = spec.require_B()
    connected = check_connected_kernel(S)
    result = {"connected": connected}
    return result, f"kernel subgroup connected: {'true' if connected else 'false'}"


def _cmd_hilbert(spec: ProblemSpec):
    D = spec.max_degree
    coeffs = [
        {"j": j, "value": hilbert_coefficient(spec.complex, j)}
        for j in range(0, D + 1, 2)
    ]
    result = {"coefficients": coeffs}
    lines = [f"Hilbert coefficients of Z[K] (D = {D})"]
    for c in coeffs:
        lines.append(f"  j={c['j']}: {c['value']}")
    return result, "\n".join(lines)


def _cmd_gkm(spec: ProblemSpec, polynomial_text: str):
    S = spec.require_B()
    p = parse_polynomial(polynomial_text, spec.complex.m)
    t = phi_restrictions(spec.complex, S, p)
    check = gkm_check(spec.complex, S, t)
    result = {
        "tuple": [entry.render() for entry in t.entries],
        "gkm_condition": {
            "ok": check.ok,
            "failing_edges": [
                {"v": v, "w": w, "alpha": alpha} for v, w, alpha in check.failing_edges
            ],
        },
    }
    lines = [f"Phi({p.render()}) = {t.render()}"]
    lines.append(f"GKM divisibility: {'ok' if check.ok else 'violated'}")
    for v, w, alpha in check.failing_edges:
        lines.append(f"  edge v{v}-v{w}: {alpha} does not divide the difference")
    return result, "\n".join(lines)


def _parse_vertex(text: str) -> tuple:
    inner = text.strip()
    if inner.startswith("{") and inner.endswith("}"):
        inner = inner[1:-1]
    tokens = [tok for tok in re.split(r"[,\s]+", inner.strip()) if tok]
    try:
        return tuple(int(tok) for tok in tokens)
    except ValueError:
        raise InputError(f"vertex must be a list of integers, got {text!r}")


def _cmd_find_torsion(spec: ProblemSpec, extra_name: str, vertex_text: str):
    S = spec.require_B()
    extra = spec.form(extra_name)
    vertex = _parse_vertex(vertex_text)
    cert = find_torsion(spec.complex, S, extra, vertex)
    result = {
        "vertex": list(cert.vertex),
        "f": cert.f.render(),
        "g": cert.g_text(),
        "g_extra_coefficient": cert.g_extra_coefficient,
        "g_u_coefficients": list(cert.g_u_coefficients),
        "verified": cert.verified,
    }
    text = [
        f"g = {cert.g_text()}",
        f"f = {cert.f.render()}",
        f"verified: {'true' if cert.verified else 'false'}",
    ]
    return result, "\n".join(text)


def _cmd_annihilate(spec: ProblemSpec, element_text: str):
    S = spec.require_B()
    f = parse_polynomial(element_text, spec.complex.m)
    witnesses = annihilator_search(spec.complex, S, f, spec.max_degree)
    result = {
        "witnesses": [
            {"degree": w.degree, "form": w.render()} for w in witnesses
        ]
    }
    if witnesses:
        lines = [f"annihilators of {f.render()} up to degree {spec.max_degree}:"]
        for w in witnesses:
            lines.append(f"  degree {w.degree}: {w.render()}")
    else:
        lines = [
            f"no annihilator of {f.render()} in Z[u] degrees <= {spec.max_degree}"
        ]
    return result, "\n".join(lines)


def _cmd_gysin(spec: ProblemSpec):
    S = spec.require_B()
    if spec.split is not None and not 1 <= spec.split <= S.n:
        raise InputError(f"--split must be between 1 and {S.n}")
    split = None if spec.split is None else spec.split - 1
    G = build_gysin_data(spec.complex, S, spec.max_degree, split=split)
    report = verify_exactness(G)
    connecting = connecting_map_check(G)
    result = {
        "all_pass": report.all_pass,
        "split_row": report.split_row + 1,
        "connecting_map_agrees": all(connecting.values()),
        "nodes": [
            {
                "term": n.term,
                "p": n.p,
                "j": n.j,
                "group": _group_json(n.group),
                "image": _group_json(n.image),
                "kernel": _group_json(n.kernel),
                "ok": n.ok,
            }
            for n in report.nodes
        ],
    }
    lines = [
        f"Gysin sequence (split row {report.split_row + 1}, D = {report.D}): "
        + ("all nodes PASS" if report.all_pass else "FAILURES FOUND")
    ]
    lines.append(
        "connecting map: multiplication and snake chase agree at "
        f"{len(connecting)} cells"
    )
    shown = [n for n in report.nodes if not n.group.is_zero() or not n.ok]
    for n in shown:
        lines.append(
            f"  {n.term:<15} (p={n.p}, j={n.j}): group {str(n.group):<12} "
            f"image {str(n.image):<12} kernel {str(n.kernel):<12} "
            + ("PASS" if n.ok else "FAIL")
        )
    if not report.all_pass:
        raise InternalCheckError(
            "long exact sequence failed verification; nodes: "
            + ", ".join(f"{n.term}(p={n.p}, j={n.j})" for n in report.failing())
        )
    return result, "\n".join(lines)


# --- argument handling ----------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """argparse that reports problems as input errors (exit 1)."""

    def error(self, message):
        raise InputError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="bigtor", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", required=True, help=".tcx problem file")
        p.add_argument(
            "--max-degree",
            type=int,
            default=12,
            help="even internal degree bound D (default 12)",
        )
        p.add_argument(
            "--rational",
            action="store_true",
            help="rank-only recomputation over Q where supported",
        )
        p.add_argument("--json", action="store_true", help="machine-readable output")

    common(sub.add_parser("tor", help="bigraded Tor table"))
    common(sub.add_parser("check-bigcm", help="Tor_1 vanishing plus regular-sequence cross-check"))
    common(sub.add_parser("check-free", help="all four freeness verdicts and depth"))
    common(sub.add_parser("check-local-free", help="vertex submatrix determinants"))
    common(sub.add_parser("check-connected", help="is the kernel subgroup a torus"))
    common(sub.add_parser("hilbert", help="Hilbert coefficients of Z[K]"))
    p_gkm = sub.add_parser("gkm", help="restriction tuple of a polynomial")
    common(p_gkm)
    p_gkm.add_argument("polynomial", help="polynomial in x1..xm")
    p_ft = sub.add_parser("find-torsion", help="torsion certificate at a vertex")
    common(p_ft)
    p_ft.add_argument("--extra", required=True, help="name of a form from the input file")
    p_ft.add_argument("--vertex", required=True, help="maximal face, like '{1 2}'")
    p_ann = sub.add_parser("annihilate", help="annihilators of an element in the u's")
    common(p_ann)
    p_ann.add_argument("--element", required=True, help="polynomial in x1..xm")
    p_gy = sub.add_parser("gysin", help="long exact sequence verification")
    common(p_gy)
    p_gy.add_argument(
        "--split",
        type=int,
        default=None,
        help="1-based row of B used as the extra form (default: last row)",
    )
    return parser


_DISPATCH = {
    "tor": _cmd_tor,
    "check-bigcm": _cmd_check_bigcm,
    "check-free": _cmd_check_free,
    "check-local-free": _cmd_check_local_free,
    "check-connected": _cmd_check_connected,
    "hilbert": _cmd_hilbert,
}


def run(argv) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        with open(args.input, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc}")
    spec = parse_problem(text)
    spec = replace(
        spec,
        max_degree=args.max_degree,
        rational=getattr(args, "rational", False),
        split=getattr(args, "split", None),
    )
    if spec.max_degree < 0 or spec.max_degree % 2:
        raise InputError(f"--max-degree must be even and nonnegative, got {spec.max_degree}")

    if args.command == "gkm":
        result, text_report = _cmd_gkm(spec, args.polynomial)
    elif args.command == "find-torsion":
        result, text_report = _cmd_find_torsion(spec, args.extra, args.vertex)
    elif args.command == "annihilate":
        result, text_report = _cmd_annihilate(spec, args.element)
    elif args.command == "gysin":
        result, text_report = _cmd_gysin(spec)
    else:
        result, text_report = _DISPATCH[args.command](spec)

    if args.json:
        sys.stdout.write(emit_json(args.command, args.input, spec.max_degree, result))
    else:
        sys.stdout.write(text_report + "\n")
    return 0


def main(argv=None) -> int:
    try:
        return run(sys.argv[1:] if argv is None else argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InternalCheckError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
