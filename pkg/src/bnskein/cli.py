"""Command-line driver: ``python -m bnskein <command> ...``.

Exit codes: 0 success, 1 validation failure, 2 oracle disagreement.
Reports are JSON on stdout (sorted keys), or ``key: value`` lines with
``--text``.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import io
from .colimit import colim_bruteforce, colim_terminal
from .comb2cat import compose, tqft_eval
from .exactalg import StructuralError
from .skein import (
    local_connected_closed_form,
    present,
    sigma_I_dimensions,
    tensor_algebra_oracle,
    unorientable_dimensions,
    unorientable_module,
)

__all__ = ["main", "build_parser", "run"]

EXIT_OK, EXIT_INVALID, EXIT_DISAGREE = 0, 1, 2


class OracleDisagreement(Exception):
    def __init__(self, report):
        super().__init__("oracle disagreement")
        self.report = report


def _load(path):
    if path == "-":
        import json
        return json.load(sys.stdin), None
    if not os.path.exists(path):
        raise StructuralError(f"no such file: {path}")
    return io.load_json(path), os.path.dirname(os.path.abspath(path))


def _algebra(ref, skip_verify):
    if os.path.exists(ref):
        return io.parse_algebra(io.load_json(ref), verify=not skip_verify)
    return io.parse_algebra(ref, verify=not skip_verify)


def _inv(inv):
    return {"free_rank": inv.free_rank, "torsion": list(inv.torsion)}


def _fmt_key(k):
    return list(k) if isinstance(k, tuple) else k


# ---------------------------------------------------------------------------
# commands


def cmd_check_algebra(args):
    A = _algebra(args.algebra, skip_verify=True)
    rep = A.verify_axioms()
    out = {
        "algebra": A.name or args.algebra,
        "rank": A.rank,
        "ring": str(A.ring),
        "pass": rep.passed,
        "failures": [{"axiom": f.axiom, "basis": list(f.indices),
                      "lhs": _vec_str(A, f.lhs), "rhs": _vec_str(A, f.rhs)} for f in rep.failures],
        "handle_element": [A.ring.format(c) for c in A.handle_element().coords],
    }
    if not rep.passed:
        return out, EXIT_INVALID
    return out, EXIT_OK


def _vec_str(A, vec):
    return {",".join(map(str, k if isinstance(k, tuple) else (k,))): A.ring.format(v)
            for k, v in sorted(vec.items())}


def cmd_tqft(args):
    obj, _ = _load(args.cobordism)
    C = io.parse_cobordism(obj)
    A = _algebra(args.algebra, args.skip_verify)
    L = tqft_eval(C, A)
    if not L.dom and not L.cod:
        return {"scalar": A.ring.format(L.scalar_value())}, EXIT_OK
    return {
        "algebra": A.name,
        "domain": list(L.dom),
        "codomain": list(L.cod),
        "entries": [[list(r), list(c), A.ring.format(v)] for r, c, v in L.triplets()],
    }, EXIT_OK


def cmd_glue(args):
    top = io.parse_cobordism(_load(args.top)[0])
    bottom = io.parse_cobordism(_load(args.bottom)[0])
    return io.cobordism_to_json(compose(top, bottom)), EXIT_OK


def cmd_colim(args):
    obj, base = _load(args.graph)
    G, A, _, terminal = io.parse_functor_graph(obj, verify=not args.skip_verify, base_dir=base)
    ring = args.ring or G.ring
    if args.terminal:
        terminal = args.terminal
    if terminal:
        pres, inv = colim_terminal(G, terminal, ring)
    else:
        pres, inv = colim_bruteforce(G, ring)
    out = {"ring": ring, "generators": [{"vertex": v, "rank": r} for v, r, _ in pres.blocks],
           "relation_count": pres.relation_count, **_inv(inv)}
    if args.check and terminal:
        _, brute = colim_bruteforce(G, ring)
        out["bruteforce"] = _inv(brute)
        out["agree"] = brute == inv
        if brute != inv:
            raise OracleDisagreement(out)
    return out, EXIT_OK


def cmd_present(args):
    obj, base = _load(args.graph)
    T = io.parse_graph(obj, verify=not args.skip_verify, base_dir=base)
    res = present(T, args.ring or "q")
    return res.report(args.ring or "q"), EXIT_OK


def cmd_sigma_i(args):
    A = _algebra(args.algebra, args.skip_verify)
    if (args.ring or "q") != "q":
        raise StructuralError("graded commands require --ring q")
    degrees = list(range(args.parity, args.max_k + 1, 2))
    pipeline = sigma_I_dimensions(A, args.genus, args.max_k)
    table = [{"degree": d, "pipeline": pipeline[d]} for d in degrees]
    out = {"algebra": A.name, "genus": args.genus, "parity": args.parity, "max_k": args.max_k, "table": table}
    if args.oracle:
        oracle = tensor_algebra_oracle(A, args.genus, args.max_k)
        for row in table:
            row["oracle"] = oracle[row["degree"]]
        out["agree"] = all(r["pipeline"] == r["oracle"] for r in table)
        if not out["agree"]:
            raise OracleDisagreement(out)
    return out, EXIT_OK


def cmd_unorientable(args):
    A = _algebra(args.algebra, args.skip_verify)
    ring = args.ring or "q"
    invs = unorientable_module(A, args.n, args.max_degree, ring)
    table = [{"degree": d, **_inv(inv)} for d, inv in enumerate(invs)]
    out = {"algebra": A.name, "n": args.n, "ring": ring, "table": table}
    if args.oracle:
        ideal = unorientable_dimensions(A, args.max_degree, "ideal")
        rewrite = unorientable_dimensions(A, args.max_degree, "rewrite")
        for row, a, b in zip(table, ideal, rewrite):
            row["ideal"], row["rewrite"] = a, b
        out["agree"] = ideal == rewrite
        if not out["agree"]:
            raise OracleDisagreement(out)
    return out, EXIT_OK


def cmd_local_connected(args):
    obj, base = _load(args.graph)
    T = io.parse_graph(obj, verify=not args.skip_verify, base_dir=base)
    ring = args.ring or "q"
    order = [v.id for v in T.vertices]
    closed = local_connected_closed_form(T, order, ring)
    pres = present(T, ring, order=order).invariants
    out = {"ring": ring, "closed_form": _inv(closed), "present": _inv(pres), "agree": closed == pres}
    if closed != pres:
        raise OracleDisagreement(out)
    return out, EXIT_OK


COMMANDS = {
    "check-algebra": cmd_check_algebra,
    "tqft": cmd_tqft,
    "glue": cmd_glue,
    "colim": cmd_colim,
    "present": cmd_present,
    "sigma-i": cmd_sigma_i,
    "unorientable": cmd_unorientable,
    "local-connected": cmd_local_connected,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", choices=("q", "z"), default=None,
                        help="invariants over the rationals (q) or the integers (z)")
    common.add_argument("--skip-verify", action="store_true", help="do not check algebra axioms")
    common.add_argument("--text", action="store_true", help="human-readable output instead of JSON")
    p = argparse.ArgumentParser(prog="python -m bnskein",
                                description="Exact Frobenius-algebra, TQFT and skein-module computations.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-algebra", parents=[common], help="verify Frobenius axioms")
    s.add_argument("algebra", help="built-in name or algebra JSON file")

    s = sub.add_parser("tqft", parents=[common], help="evaluate the TQFT on a cobordism")
    s.add_argument("cobordism")
    s.add_argument("--algebra", default="khovanov")

    s = sub.add_parser("glue", parents=[common], help="compose two cobordisms (TOP after BOTTOM)")
    s.add_argument("top")
    s.add_argument("bottom")

    s = sub.add_parser("colim", parents=[common], help="colimit of a functor graph")
    s.add_argument("graph")
    s.add_argument("--terminal", nargs="*", help="terminal vertex set (default: from file, else brute force)")
    s.add_argument("--check", action="store_true", help="compare against the brute-force colimit")

    s = sub.add_parser("present", parents=[common], help="Bar-Natan module of a tunneling graph")
    s.add_argument("graph")

    s = sub.add_parser("sigma-i", parents=[common], help="parallel surfaces in Σ×I")
    s.add_argument("--algebra", default="khovanov")
    s.add_argument("--genus", type=int, required=True)
    s.add_argument("--parity", type=int, choices=(0, 1), required=True)
    s.add_argument("--max-k", type=int, required=True)
    s.add_argument("--oracle", action="store_true", help="compare with the tensor-algebra oracle")

    s = sub.add_parser("unorientable", parents=[common], help="graded (SV)₋ ⊗ V^{⊗n}")
    s.add_argument("--algebra", default="khovanov")
    s.add_argument("--n", type=int, default=0)
    s.add_argument("--max-degree", type=int, required=True)
    s.add_argument("--oracle", action="store_true", help="compare ideal and rewrite computations")

    s = sub.add_parser("local-connected", parents=[common], help="closed form vs presentation")
    s.add_argument("graph")
    return p


def _emit(out, text, stream):
    if not text:
        stream.write(io.dumps(out))
        return
    for k in sorted(out):
        v = out[k]
        if isinstance(v, list) and v and isinstance(v[0], dict):
            stream.write(f"{k}:\n")
            for row in v:
                stream.write("  " + ", ".join(f"{a}={row[a]}" for a in sorted(row)) + "\n")
        else:
            stream.write(f"{k}: {v}\n")


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        out, code = COMMANDS[args.command](args)
    except OracleDisagreement as exc:
        _emit(exc.report, args.text, stdout)
        stderr.write("error: oracle disagreement\n")
        return EXIT_DISAGREE
    except (StructuralError, ValueError, KeyError, ArithmeticError, OSError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    _emit(out, args.text, stdout)
    return code


def main():
    sys.exit(run())
