"""Command line front end: ``matquad check|solve|hamburger|verify``.

Instances are JSON documents read from ``--input`` or stdin.  Numbers may be
JSON numbers (parsed as exact decimals) or strings such as ``"3/7"`` and
``"-0.25"``.  Results go to stdout as JSON; ``--verbose`` adds a short
summary on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal
from fractions import Fraction

import numpy as np

from . import linalg as la
from . import poly as P
from .dependency import feasibility
from .errors import Inconsistent, MatquadError, ParseError
from .hamburger import LaurentMomentSequence, laurent_residuals, solve_hamburger
from .moments import MomentSequence
from .quadrature import (
    DPS,
    Atom,
    AtomicMeasure,
    ExactForm,
    eval_mass_mp,
    real_roots_of_squarefree,
    solve_quadrature,
    verify_measure,
)

EXIT_OK, EXIT_INFEASIBLE, EXIT_PARSE, EXIT_INTERNAL = 0, 2, 3, 4
MASS_RANK_TOL = 1e-9


# ---------------------------------------------------------------- parsing


def _scalar(v, what: str) -> Fraction:
    if isinstance(v, bool) or v is None or isinstance(v, (list, dict)):
        raise ParseError(f"{what}: expected a number", value=repr(v))
    return la.to_fraction(v)


def _matrix(v, p: int, what: str) -> np.ndarray:
    if p == 1 and not isinstance(v, list):
        v = [[v]]
    elif p == 1 and v and not isinstance(v[0], list):
        v = [v]
    if not isinstance(v, list) or len(v) != p or any(not isinstance(r, list) or len(r) != p for r in v):
        raise ParseError(f"{what}: expected a {p}x{p} row-major matrix")
    M = np.empty((p, p), dtype=object)
    for i in range(p):
        for j in range(p):
            M[i, j] = _scalar(v[i][j], f"{what}[{i}][{j}]")
    return M


def load_json(text: str) -> dict:
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object")
    return doc


def _int_field(doc: dict, key: str) -> int:
    v = doc.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise ParseError(f"field {key!r} must be a non-negative integer", value=repr(v))
    return v


def _moments(doc: dict, count: int) -> tuple[int, list[np.ndarray]]:
    mats = doc.get("moments")
    if not isinstance(mats, list):
        raise ParseError("field 'moments' must be a list of matrices")
    if len(mats) != count:
        raise ParseError("wrong number of moments", expected=count, got=len(mats))
    p = doc.get("p")
    if p is None:
        first = mats[0] if mats else None
        p = len(first) if isinstance(first, list) and first and isinstance(first[0], list) else 1
    elif isinstance(p, bool) or not isinstance(p, int) or p < 1:
        raise ParseError("field 'p' must be a positive integer", value=repr(p))
    return p, [_matrix(M, p, f"moments[{k}]") for k, M in enumerate(mats)]


def _mode(doc: dict, force_float: bool) -> bool:
    """True for exact arithmetic."""
    if force_float:
        return False
    mode = doc.get("options", {}).get("arithmetic", "exact")
    if mode not in ("exact", "float"):
        raise ParseError("options.arithmetic must be 'exact' or 'float'", value=repr(mode))
    return mode == "exact"


def parse_standard(doc: dict, force_float: bool = False) -> tuple[MomentSequence, object, object]:
    """Moment sequence, ``t`` (or None) and ``m`` (int, ``"auto"`` or None)."""
    n = _int_field(doc, "n")
    _, mats = _moments(doc, 2 * n + 1)
    exact = _mode(doc, force_float)
    try:
        S = MomentSequence(tuple(la.convert(M, exact) for M in mats))
    except MatquadError as exc:
        raise ParseError(str(exc), cause=exc.code, **exc.details) from exc
    t = doc.get("t")
    if t is not None:
        t = _scalar(t, "t")
        t = t if exact else float(t)
    m = doc.get("m")
    if m is not None and m != "auto" and (isinstance(m, bool) or not isinstance(m, int) or m < 0):
        raise ParseError("field 'm' must be a non-negative integer or \"auto\"", value=repr(m))
    return S, t, m


def parse_laurent(doc: dict, force_float: bool = False) -> LaurentMomentSequence:
    n1, n2 = _int_field(doc, "n1"), _int_field(doc, "n2")
    _, mats = _moments(doc, 2 * n1 + 2 * n2 + 1)
    exact = _mode(doc, force_float)
    try:
        return LaurentMomentSequence(n1, n2, tuple(la.convert(M, exact) for M in mats))
    except MatquadError as exc:
        raise ParseError(str(exc), cause=exc.code, **exc.details) from exc


def _has_float(v) -> bool:
    if isinstance(v, list):
        return any(_has_float(w) for w in v)
    return isinstance(v, Decimal)


def parse_measure(doc: dict, p: int, exact: bool) -> AtomicMeasure:
    """Atoms and masses from a measure file (the output of ``solve`` works)."""
    atoms, masses = doc.get("atoms"), doc.get("masses")
    if not isinstance(atoms, list) or not isinstance(masses, list) or len(atoms) != len(masses):
        raise ParseError("measure needs equally long 'atoms' and 'masses' lists")
    out = []
    for k, (x, A) in enumerate(zip(atoms, masses)):
        x = _scalar(x, f"atoms[{k}]")
        # masses written as JSON floats carry roundoff, so their rank is numerical
        rounded = _has_float(A)
        A = _matrix(A, p, f"masses[{k}]")
        if not exact:
            x, A = float(x), la.floating(A)
        rk = la.rank(la.floating(A), tol=MASS_RANK_TOL) if rounded or not exact else la.rank(A)
        out.append(Atom(x, A, rk))
    form = None
    ef = doc.get("exact_form")
    if exact and isinstance(ef, dict):
        nodes = [_scalar(c, "exact_form.nodes") for c in ef.get("nodes", [])]
        R = [_matrix(M, p, "exact_form.R") for M in ef.get("R", [])]
        if nodes and len(R) == len(nodes) - 1:
            form = ExactForm(tuple(nodes), tuple(R))
            if not _form_matches(form, out):
                form = None
    return AtomicMeasure(tuple(out), p, form)


def _form_matches(form: ExactForm, atoms: list[Atom]) -> bool:
    """The exact form reproduces the listed atoms and masses.

    Each listed atom is matched with a root of the node polynomial computed
    to high precision; the mass polynomial evaluated there must agree with
    the listed mass to ``1e-12`` (absolute, or relative for large masses).
    """
    if len(form.nodes) - 1 != len(atoms):
        return False
    try:
        real, cplx = real_roots_of_squarefree(list(form.nodes), DPS)
    except (ArithmeticError, ValueError):
        return False
    if cplx or len(real) != len(atoms):
        return False
    for a in atoms:
        x = a.location
        if a.exact and P.evaluate(list(form.nodes), x) == 0:
            A = sum((Rr * x**r for r, Rr in enumerate(form.R)), la.zeros(a.mass.shape[0], a.mass.shape[0], True))
            if not (A == a.mass).all():
                return False
            continue
        xf = float(x)
        root = min((approx for _, approx in real), key=lambda r: abs(float(r) - xf))
        if abs(float(root) - xf) > 1e-12 * max(1.0, abs(xf)):
            return False
        A = _mp_to_float(eval_mass_mp(list(form.R), root, DPS))
        M = la.floating(a.mass)
        if np.max(np.abs(A - M)) > 1e-12 * max(1.0, float(np.max(np.abs(M)))):
            return False
    return True


def _mp_to_float(M) -> np.ndarray:
    return np.array([[float(M[i, j]) for j in range(M.cols)] for i in range(M.rows)])


# ---------------------------------------------------------------- formatting


def fmt_scalar(x):
    """``"a/b"`` for exact values, a decimal string for floats."""
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


def fmt_entry(x):
    return str(x) if isinstance(x, Fraction) else float(x)


def fmt_matrix(M: np.ndarray) -> list:
    if not la.is_exact(M):
        # leftovers of high-precision evaluation, far below double precision
        M = np.where(np.abs(M) < 1e-30 * la.max_abs(M), 0.0, M)
    return [[fmt_entry(v) for v in row] for row in M]


def _measure_dict(mu: AtomicMeasure) -> dict:
    out = {
        "atoms": [fmt_scalar(a.location) for a in mu.atoms],
        "masses": [fmt_matrix(a.mass) for a in mu.atoms],
        "ranks": [a.rank for a in mu.atoms],
        "total_rank": mu.total_rank,
    }
    if mu.exact_form is not None:
        out["exact_form"] = {
            "nodes": [str(c) for c in mu.exact_form.nodes],
            "R": [fmt_matrix(R) for R in mu.exact_form.R],
        }
    return out


def _residual_list(res) -> list:
    return [float(r) for r in res]


# ---------------------------------------------------------------- commands


def cmd_check(doc: dict, args) -> dict:
    S, t, _ = parse_standard(doc, args.float)
    if t is None:
        raise ParseError("check needs a value for 't'")
    res = feasibility(S, t)
    out = {"has_measure": True, "t": fmt_scalar(t)}
    out.update(res.as_dict())
    return out


def cmd_solve(doc: dict, args) -> dict:
    S, t, m = parse_standard(doc, args.float)
    if t is None:
        raise ParseError("solve needs a value for 't'")
    if m is None or m == "auto":
        m = len(feasibility(S, t).A)
    opts = doc.get("options", {})
    prune = args.prune_mass if args.prune_mass is not None else float(opts.get("prune_mass", 0.0))
    seed = opts.get("seed")
    r = solve_quadrature(S, t, m, seed=seed, prune_mass=prune)
    d = r.determinant
    out = {"t": fmt_scalar(t), "m": m, "arithmetic": "exact" if S.exact else "float"}
    out.update(_measure_dict(r.measure))
    out.update(
        {
            "multiplicity_at_t": r.measure.multiplicity_at(t),
            "rank_moment_matrix": r.report.rank_moment_matrix,
            "residuals": _residual_list(r.report.residuals),
            "max_residual": float(r.report.max_residual),
            "determinant": {
                "order_at_t": d.order,
                "predicted_order": r.predicted_order,
                "residual_degree": len(P.trim(d.residual)) - 1,
                "residual": P.format_poly(d.residual) if S.exact else [float(c) for c in d.residual],
                "roots": [{"value": fmt_scalar(q.value), "multiplicity": q.multiplicity} for q in r.roots.roots],
            },
        }
    )
    if r.diagnostics.get("complex_roots_discarded"):
        out["complex_roots_discarded"] = r.diagnostics["complex_roots_discarded"]
    return out


def cmd_hamburger(doc: dict, args) -> dict:
    S = parse_laurent(doc, args.float)
    r = solve_hamburger(S)
    out = {"n1": S.n1, "n2": S.n2, "arithmetic": "exact" if S.exact else "float"}
    out.update(_measure_dict(r.measure))
    out.update(
        {
            "indices": list(S.indices),
            "residuals": _residual_list(r.residuals),
            "residuals_exact": r.residuals_exact,
            "direct_residuals": _residual_list(r.direct_residuals),
            "max_residual": float(r.max_residual),
        }
    )
    return out


def cmd_verify(doc: dict, args) -> dict:
    if not args.measure:
        raise ParseError("verify needs --measure PATH")
    try:
        with open(args.measure, encoding="utf-8") as fh:
            mdoc = load_json(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read measure file: {exc.strerror}", path=args.measure) from exc
    tol = args.tol if args.tol is not None else 1e-8
    if doc.get("kind") == "hamburger":
        S = parse_laurent(doc, args.float)
        mu = parse_measure(mdoc, S.p, S.exact)
        if any(a.location == 0 for a in mu.atoms):
            raise Inconsistent("Laurent measures cannot have an atom at the origin")
        res = laurent_residuals(S, mu)
        rank_M = la.rank(S.hankel(-S.n1, S.n2))
        out = {"indices": list(S.indices), "residuals": _residual_list(res)}
        mult = None
    else:
        S, t, _ = parse_standard(doc, args.float)
        mu = parse_measure(mdoc, S.p, S.exact)
        rep = verify_measure(S, mu, t)
        res = rep.residuals
        rank_M = rep.rank_moment_matrix
        mult = rep.multiplicity_at_t
        out = {"indices": list(range(len(S))), "residuals": _residual_list(res), "residuals_exact": rep.exact}
    max_res = max(res, default=0.0)
    total = mu.total_rank
    out.update(
        {
            "max_residual": float(max_res),
            "tolerance": tol,
            "total_rank": total,
            "rank_moment_matrix": rank_M,
            "minimal": total == rank_M,
            "passed": max_res <= tol and total == rank_M,
        }
    )
    if mult is not None:
        out["multiplicity_at_t"] = mult
    return out


COMMANDS = {"check": cmd_check, "solve": cmd_solve, "hamburger": cmd_hamburger, "verify": cmd_verify}


def _jsonable(v):
    if isinstance(v, (Fraction, Decimal)):
        return str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (set, frozenset, tuple)):
        return sorted(v) if isinstance(v, (set, frozenset)) else list(v)
    return str(v)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="matquad", description="Truncated matrix moment problems with a prescribed atom.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--input", help="instance JSON file (default: stdin)")
    ap.add_argument("--measure", help="measure JSON file for verify")
    ap.add_argument("--float", action="store_true", help="use floating point arithmetic with tolerances")
    ap.add_argument("--tol", type=float, help="rank/zero tolerance in float mode; pass threshold for verify")
    ap.add_argument("--prune-mass", type=float, dest="prune_mass", help="drop float masses below this size")
    ap.add_argument("--verbose", action="store_true", help="print a summary to stderr")
    return ap


def _summary(cmd: str, out: dict) -> str:
    if "error" in out:
        return f"{cmd}: {out['error']}: {out['message']}"
    if cmd == "check":
        return f"check: feasible multiplicities {out['feasible_range']}, A={out['A']}, B={out['B']}"
    if cmd == "verify":
        return f"verify: max residual {out['max_residual']:.3e}, total rank {out['total_rank']}, passed={out['passed']}"
    atoms = ", ".join(f"{x} (rank {r})" for x, r in zip(out["atoms"], out["ranks"]))
    return f"{cmd}: {len(out['atoms'])} atoms: {atoms}; max residual {out['max_residual']:.3e}"


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    code = EXIT_OK
    try:
        if args.input:
            try:
                with open(args.input, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ParseError(f"cannot read input: {exc.strerror}", path=args.input) from exc
        else:
            text = sys.stdin.read()
        doc = load_json(text)
        tol = args.tol if args.tol is not None and args.command != "verify" else None
        with la.tolerance(tol):
            out = COMMANDS[args.command](doc, args)
        if args.command == "verify" and not out["passed"]:
            code = EXIT_INFEASIBLE
        out = {"status": "ok", **out}
    except MatquadError as exc:
        code = exc.exit_code
        out = {"status": "error", "error": exc.code, "message": str(exc), "details": exc.details}
        if exc.code == "NoRepresentingMeasure":
            out["has_measure"] = False
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        code = EXIT_INTERNAL
        out = {"status": "error", "error": type(exc).__name__, "message": str(exc), "details": {}}
    sys.stdout.write(json.dumps(out, default=_jsonable, sort_keys=True) + "\n")
    if args.verbose:
        sys.stderr.write(_summary(args.command, out) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
