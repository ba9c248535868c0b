"""``shrubkit`` command line.

Exit codes: 0 success or a positive answer, 1 a negative answer, 2 usage or
validation error, 3 oracle budget exceeded. Output is canonical JSON except
for ``bounds`` (plain text) and ``--dot``.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from contextlib import redirect_stderr
from typing import List, Optional, Sequence, Tuple

from . import bounds as B
from .els import (
    NoEligibleNode, NoHeavyNode, Thresholds, WindowTooNarrow, chain_check, els_down, els_up,
    graph_shrink, grow, preceq, sat_search, shrink,
)
from .graphs import Graph, graph_from_json, graph_to_dot, graph_to_json
from .logic.formula import FormulaSyntaxError, VocabularyError, parse, rank, to_sexpr
from .logic.semantics import UnboundVariable, model_check
from .logic.types import BudgetExceeded, fo_equiv, mso_equiv, mso_type
from .treemodel import (
    InvalidModel, TreeModel, flatten, interpret_formula, interpretation_rank, materialize,
    model_from_json, symmetrize, validate,
)
from .trees import Forest, Tree, tree_from_json, tree_to_json
from .typesys import CapPolicy, calibrate_cap, fingerprint, index_census, type_indicator

__all__ = ["run", "main"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------- input

def _load_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path) as fh:
        return json.load(fh)


def _load(path: str, symmetrize_model: bool = False):
    obj = _load_json(path)
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: expected a JSON object")
    if "vertices" in obj:
        return graph_from_json(obj)
    if "r" in obj and "d" in obj:
        tm = model_from_json(obj)
        return symmetrize(tm) if symmetrize_model else tm
    if "forest" in obj:
        p = int(obj["p"])
        return Forest(p, tuple(tree_from_json({"p": p, "tree": t}) for t in obj["forest"]))
    if "tree" in obj:
        return tree_from_json(obj)
    raise ValueError(f"{path}: not a tree, forest, graph or tree model")


def _load_tree(path: str) -> Tree:
    x = _load(path)
    if isinstance(x, TreeModel):
        return flatten(x)
    if not isinstance(x, Tree):
        raise ValueError(f"{path}: expected a tree")
    return x


def _load_model(path: str, sym: bool) -> TreeModel:
    x = _load(path, sym)
    if not isinstance(x, TreeModel):
        raise ValueError(f"{path}: expected a tree model")
    return x


def _structure(x):
    return flatten(x) if isinstance(x, TreeModel) else x


def _formula(text: str):
    if text.startswith("@"):
        with open(text[1:]) as fh:
            text = fh.read()
    return parse(text)


def _ints(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}") from None


def _thresholds(args, p: int) -> Thresholds:
    if args.paper:
        if args.cap is not None or args.q is not None:
            raise UsageError("--paper cannot be combined with --cap or --q")
        return Thresholds.paper(p, classifier=args.classifier)
    cap = args.cap if args.cap is not None else 2
    return Thresholds.practical(cap, q=args.q, classifier=args.classifier)


# ---------------------------------------------------------------- commands

def _cmd_validate(args) -> Tuple[int, str]:
    tm = _load_model(args.model, args.symmetrize)
    rep = validate(tm)
    return (0 if rep.ok else 2), _dump(rep.to_json())


def _cmd_materialize(args):
    tm = _load_model(args.model, args.symmetrize)
    g = materialize(tm)
    return 0, graph_to_dot(g) if args.dot else _dump(graph_to_json(g))


def _cmd_flatten(args):
    tm = _load_model(args.model, args.symmetrize)
    return 0, _dump(tree_to_json(flatten(tm)))


def _cmd_interpret(args):
    tm = _load_model(args.model, args.symmetrize)
    phi = _formula(args.phi)
    out = interpret_formula(phi, tm.signature, tm.r, tm.p, tm.d)
    res = {"formula": to_sexpr(out), "rank": rank(out), "q0": interpretation_rank(tm.r, tm.p, tm.d)}
    if args.check:
        g_val = model_check(materialize(tm), phi)
        t_val = model_check(flatten(tm), out)
        res.update({"graph_value": g_val, "tree_value": t_val})
        return (0 if g_val == t_val else 1), _dump(res)
    return 0, _dump(res)


def _cmd_equiv(args):
    a, b = _structure(_load(args.a)), _structure(_load(args.b))
    eq = (fo_equiv if args.fo else mso_equiv)(a, b, args.m)
    out = {"equivalent": eq, "m": args.m}
    if args.fo:
        out["logic"] = "FO"
    return (0 if eq else 1), _dump(out)


def _cmd_type(args):
    x = _structure(_load(args.input))
    res = {"m": args.m, "mso_type": mso_type(x, args.m).digest}
    if isinstance(x, Tree):
        cp = CapPolicy.paper(x.p) if args.paper else CapPolicy.practical(args.cap or 2)
        res["fingerprint"] = fingerprint(x, args.m, cp).text
        res["policy"] = cp.describe()
    if args.indicator:
        fam = x if isinstance(x, Forest) else Forest(x.p, x.children) if isinstance(x, Tree) else None
        if fam is None:
            raise ValueError("--indicator needs a tree or forest")
        clf = "oracle" if args.classifier == "oracle" else CapPolicy.practical(args.cap or 2)
        res["indicator"] = type_indicator(fam, args.m, clf).to_json()
    return 0, _dump(res)


def _cmd_census(args):
    n = index_census(args.d, args.p, args.m, args.max_size, args.jobs)
    return 0, _dump({"d": args.d, "p": args.p, "m": args.m, "max_size": args.max_size, "classes": n})


def _cmd_calibrate(args):
    rep = calibrate_cap(args.d, args.p, args.m, args.max_size, args.jobs)
    return 0, _dump(rep.to_json())


def _cmd_shrink(args):
    x = _load(args.input, args.symmetrize)
    if isinstance(x, TreeModel):
        th = _thresholds(args, x.internal_label)
        h, sub = graph_shrink(x, args.m, th)
        from .treemodel import model_to_json
        return 0, _dump({"graph": graph_to_json(h), "model": model_to_json(sub)})
    if not isinstance(x, Tree):
        raise ValueError("shrink needs a tree or a tree model")
    return 0, _dump(tree_to_json(shrink(x, args.m, _thresholds(args, x.p))))


def _cmd_grow(args):
    t = _load_tree(args.input)
    return 0, _dump(tree_to_json(grow(t, args.m, args.k, _thresholds(args, t.p))))


def _cmd_preceq(args):
    a, b = _load_tree(args.a), _load_tree(args.b)
    ok = preceq(a, b, args.m, _thresholds(args, a.p))
    return (0 if ok else 1), _dump({"preceq": ok, "m": args.m})


def _scale(args, t: Tree) -> B.ScaleSpec:
    if args.scale and args.paper_scale:
        raise UsageError("give either --scale or --paper-scale")
    if args.scale:
        return B.ScaleSpec.explicit(_ints(args.scale))
    if args.paper_scale or args.paper:
        return B.theta_scale(t.height, t.p, args.budget_digits)
    raise UsageError("els needs --scale, --paper-scale or --paper")


def _cmd_els(args):
    t = _load_tree(args.input)
    f = _scale(args, t)
    th = _thresholds(args, t.p)
    if args.direction == "down":
        out, rep = els_down(t, args.lam, f, th, verify=not args.no_verify)
    else:
        out, rep = els_up(t, args.lam, f, th, verify=not args.no_verify, max_size=args.max_size)
    return 0, _dump({"tree": tree_to_json(out), "report": rep.to_json()})


def _cmd_sat(args):
    res = sat_search(_formula(args.phi), args.d, args.p, args.max_size)
    return (0 if res.tree is not None else 1), _dump(res.to_json())


def _cmd_bounds(args):
    digits = args.budget_digits
    need = lambda *names: [_require(args, n) for n in names]  # noqa: E731
    fn = args.fn
    if fn == "tower":
        h, n = need("h", "n")
        return 0, str(B.tower(h, n, digits))
    if fn == "g":
        (d,) = need("d")
        return 0, str(B.g(d))
    if fn in ("xi", "chi", "rho", "rho0", "theta"):
        d, p, m = need("d", "p", "m")
        f = {"xi": B.xi, "chi": B.chi, "rho": B.rho, "rho0": B.rho_without_c0, "theta": B.theta}[fn]
        return 0, str(f(d, p, m, digits))
    if fn == "zeta":
        d, p, n1, n2 = need("d", "p", "n1", "n2")
        return 0, str(B.zeta(d, p, n1, n2, digits))
    if fn == "q0":
        r, p, d = need("r", "p", "d")
        return 0, str(interpretation_rank(r, p, d))
    if fn == "h":
        r, p, d = need("r", "p", "d")
        return 0, str(B.h_constant(d, interpretation_rank(r, p, d)))
    if fn == "upsilon":
        r, p, d, i = need("r", "p", "d", "lam")
        return 0, str(B.upsilon(r, p, d, digits=digits).boundary(i))
    if fn == "inequality":
        d, p, lam = need("d", "p", "lam")
        ok = B.check_scale_inequality(d, p, lam, digits)
        return (0 if ok else 1), "true" if ok else "false"
    if fn == "window":
        lam = _require(args, "lam")
        if not args.scale:
            raise UsageError("--fn window needs --scale")
        return 0, str(B.scale_window(B.ScaleSpec.explicit(_ints(args.scale)), lam))
    raise UsageError(f"unknown function {fn!r}")


def _require(args, name):
    v = getattr(args, name)
    if v is None:
        raise UsageError(f"--fn {args.fn} needs --{name.replace('_', '-')}")
    return v


def _cmd_chain(args):
    trees = [_load_tree(p) for p in args.trees]
    ms = _ints(args.ms)
    rep = chain_check(trees, ms, _thresholds(args, trees[0].p))
    return (0 if rep.ok else 1), _dump(rep.to_json())


# ---------------------------------------------------------------- parser

def _threshold_flags(sp):
    sp.add_argument("--cap", type=int, help="practical child cap (default 2)")
    sp.add_argument("--q", type=int, help="indicator rank (default: the cap)")
    sp.add_argument("--paper", action="store_true", help="use the tower-valued thresholds")
    sp.add_argument("--classifier", choices=["fingerprint", "oracle"], default="fingerprint")


def _parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="shrubkit", allow_abbrev=False,
                 description="Tree models, MSO types, and type-preserving tree surgery.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, fn, help_):
        sp = sub.add_parser(name, help=help_, allow_abbrev=False)
        sp.set_defaults(func=fn)
        return sp

    for name, fn, help_ in (("validate", _cmd_validate, "check a tree model"),
                            ("materialize", _cmd_materialize, "graph defined by a tree model"),
                            ("flatten", _cmd_flatten, "tree model as a labeled tree")):
        sp = cmd(name, fn, help_)
        sp.add_argument("model")
        sp.add_argument("--symmetrize", action="store_true", help="close the signature under swap")
        if name == "materialize":
            sp.add_argument("--dot", action="store_true", help="emit Graphviz DOT")

    sp = cmd("interpret", _cmd_interpret, "translate a graph formula to the model's tree")
    sp.add_argument("model")
    sp.add_argument("--phi", required=True, help="s-expression, or @file")
    sp.add_argument("--check", action="store_true", help="evaluate both sides")
    sp.add_argument("--symmetrize", action="store_true")

    sp = cmd("equiv", _cmd_equiv, "exact MSO[m] (or FO[m]) equivalence")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--fo", action="store_true")

    sp = cmd("type", _cmd_type, "Hintikka type digest and fingerprint")
    sp.add_argument("input")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--cap", type=int)
    sp.add_argument("--paper", action="store_true")
    sp.add_argument("--indicator", action="store_true", help="type indicator of the root's children")
    sp.add_argument("--classifier", choices=["fingerprint", "oracle"], default="oracle")

    for name, fn, help_ in (("census", _cmd_census, "count MSO[m] classes of small trees"),
                            ("calibrate", _cmd_calibrate, "find the least sound fingerprint cap")):
        sp = cmd(name, fn, help_)
        for flag in ("--d", "--p", "--m"):
            sp.add_argument(flag, type=int, required=True)
        sp.add_argument("--max-size", type=int, required=True)
        sp.add_argument("--jobs", type=int, default=1)

    sp = cmd("shrink", _cmd_shrink, "type-preserving leaf-hereditary shrink")
    sp.add_argument("input")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--symmetrize", action="store_true")
    _threshold_flags(sp)

    sp = cmd("grow", _cmd_grow, "duplicate a child subtree k times")
    sp.add_argument("input")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--k", type=int, default=1)
    _threshold_flags(sp)

    sp = cmd("preceq", _cmd_preceq, "decide t1 preceq_m t2")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--m", type=int, required=True)
    _threshold_flags(sp)

    sp = cmd("els", _cmd_els, "move a tree into a target scale window")
    sp.add_argument("input")
    sp.add_argument("--direction", choices=["down", "up"], required=True)
    sp.add_argument("--lam", type=int, required=True)
    sp.add_argument("--scale", help="explicit boundaries, e.g. 2,5,11,23")
    sp.add_argument("--paper-scale", action="store_true", help="use the tower-valued boundaries")
    sp.add_argument("--budget-digits", type=int)
    sp.add_argument("--max-size", type=int, default=100_000, help="largest tree els up may build")
    sp.add_argument("--no-verify", action="store_true", help="skip the oracle verdict")
    _threshold_flags(sp)

    sp = cmd("sat", _cmd_sat, "bounded search for a tree model of a formula")
    sp.add_argument("--phi", required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--max-size", type=int, required=True)

    sp = cmd("bounds", _cmd_bounds, "evaluate a bound function")
    sp.add_argument("--fn", required=True,
                    choices=["tower", "g", "xi", "chi", "rho", "rho0", "zeta", "theta", "q0", "h",
                             "upsilon", "inequality", "window"])
    for flag in ("--d", "--p", "--m", "--r", "--h", "--n", "--n1", "--n2", "--lam"):
        sp.add_argument(flag, type=int)
    sp.add_argument("--scale")
    sp.add_argument("--budget-digits", type=int)

    sp = cmd("chain-check", _cmd_chain, "check a finite preceq chain")
    sp.add_argument("trees", nargs="+")
    sp.add_argument("--ms", required=True, help="comma-separated ranks, one per link")
    _threshold_flags(sp)
    return ap


def run(argv: Sequence[str]) -> Tuple[int, str]:
    """Execute one command; returns ``(exit code, output text)``."""
    try:
        with redirect_stderr(io.StringIO()):
            args = _parser().parse_args(list(argv))
        return args.func(args)
    except UsageError as e:
        return 2, _dump({"error": "usage", "detail": str(e)})
    except BudgetExceeded as e:
        return 3, _dump({"error": "budget", "detail": str(e)})
    except (NoHeavyNode, NoEligibleNode, WindowTooNarrow) as e:
        return 1, _dump({"error": type(e).__name__, "detail": str(e)})
    except (InvalidModel, FormulaSyntaxError, VocabularyError, UnboundVariable, ValueError,
            KeyError, IndexError, OSError) as e:
        return 2, _dump({"error": type(e).__name__, "detail": str(e)})


def main(argv: Optional[Sequence[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    if list(argv) in (["-h"], ["--help"]) or not argv:
        _parser().print_help()
        return 0 if argv else 2
    code, out = run(argv)
    stream = sys.stdout if code in (0, 1) else sys.stderr
    print(out, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
