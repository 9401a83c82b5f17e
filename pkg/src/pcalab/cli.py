"""Command-line front end.  Every verb writes exactly one JSON document.

Exit status: 0 on success (for refuters, a witness was produced), 1 when a
candidate turns out to be invalid or a check fails, 2 on usage errors.
Element and term arguments accept inline s-expressions or ``@path``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Dict, List, Optional

from . import acceptance, friedberg, k1, k2, oracle, reductions
from .finite import FiniteTable, FiniteTableModel, search_finite_pca
from .fuel import Defined, outcome_json
from .kernel import DEFAULT_FUEL, StdLib, stdlib
from .terms import compile_term, combinator_str, eval_closed, format_term, parse_term
from .witness import Witness

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


def default_fuel() -> int:
    raw = os.environ.get("PCALAB_FUEL")
    if raw is None:
        return DEFAULT_FUEL
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"PCALAB_FUEL must be a positive integer, got {raw!r}") from None
    if value <= 0:
        raise UsageError("PCALAB_FUEL must be positive")
    return value


def read_spec(text: str) -> str:
    """Inline text, or the contents of a file for ``@path``."""
    if text.startswith("@"):
        try:
            with open(text[1:], encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {text[1:]}: {exc.strerror}") from None
    return text


def read_json_spec(text: str):
    raw = read_spec(text)
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        # bare names such as alpha-hat are allowed without quotes
        return raw.strip()


def positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def natural(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


# -- models -------------------------------------------------------------------------------


_K1_LIB: Optional[StdLib] = None


def k1_lib() -> StdLib:
    global _K1_LIB
    if _K1_LIB is None:
        _K1_LIB = stdlib(k1.K1Model(), fuel=reductions.REFUTE_FUEL)
        _K1_LIB.numeral(3)
    return _K1_LIB


def model_env(selector: str):
    """``(model, env, describe)`` for a model selector."""
    if selector == "k1":
        lib = k1_lib()
        return lib.model, dict(lib.env()), _describer(lib)
    if selector == "k2":
        return k2.K2Model(), dict(k2.BUILTINS, zeros=k2.zeros(), ones=k2.ones()), k2.K2Model().describe
    if selector.startswith("table:"):
        try:
            table = FiniteTable.loads(read_spec("@" + selector[6:]))
        except (ValueError, KeyError) as exc:
            raise UsageError(f"bad table file: {exc}") from None
        model = FiniteTableModel(table)
        return model, {"k": table.k, "s": table.s}, lambda a: a
    if selector.startswith("oracle:"):
        lib = k1_lib()
        f = oracle.OracleFn.from_json(json.loads(read_spec("@" + selector[7:])))
        model = oracle.OracleModel(lib, f)
        model.constants = {"k": lib.k, "s": lib.s}
        return model, dict(lib.env()), _describer(lib)
    raise UsageError(f"unknown model {selector!r} (k1, k2, table:PATH, oracle:PATH)")


def _describer(lib: StdLib):
    def describe(a):
        name = lib.name_of(a)
        return name if name is not None else k1.describe_code(a)
    return describe


def apply_lets(model, env: Dict[str, Any], lets: List[str], fuel: int) -> None:
    for item in lets or ():
        name, sep, spec = item.partition("=")
        if not sep or not name:
            raise UsageError(f"--let expects NAME=TERM, got {item!r}")
        spec = read_spec(spec)
        if spec.strip().isdigit():
            env[name] = int(spec)
            continue
        out = eval_closed(model, _parse_term(spec), fuel, env)
        if not isinstance(out, Defined):
            raise UsageError(f"--let {name}: {outcome_json(out)['outcome']}")
        env[name] = out.value


def _parse_term(text: str):
    try:
        return parse_term(text)
    except ValueError as exc:
        raise UsageError(f"bad term: {exc}") from None


# -- verbs ----------------------------------------------------------------------------------


def cmd_eval(args) -> tuple:
    model, env, describe = model_env(args.model)
    apply_lets(model, env, args.let, args.fuel)
    term = _parse_term(read_spec(args.term))
    _check_names(term, env, model)
    out = eval_closed(model, term, args.fuel, env)
    return 0, {"model": args.model, "fuel": args.fuel, "result": outcome_json(out, describe)}


def _check_names(term, env, model) -> None:
    from .terms import closed_constants

    for c in closed_constants(compile_term(term)):
        if isinstance(c, str) and c not in env and c not in model.constants:
            raise UsageError(f"unbound constant {c!r}; bind it with --let {c}=...")


def cmd_compile(args) -> tuple:
    term = _parse_term(read_spec(args.term))
    compiled = compile_term(term)
    doc = {"term": format_term(term), "compiled": format_term(compiled),
           "combinators": combinator_str(compiled)}
    if args.model == "k1":
        from .terms import free_vars

        if not free_vars(term):
            lib = k1_lib()
            out = eval_closed(lib.model, compiled, args.fuel, lib.env())
            doc["k1"] = outcome_json(out, k1.describe_code)
    return 0, doc


def cmd_k1_run(args) -> tuple:
    if args.program is not None:
        try:
            code = k1.encode(k1.parse_program(read_spec(args.program)))
        except ValueError as exc:
            raise UsageError(f"bad program: {exc}") from None
    elif args.code is not None:
        code = args.code
    else:
        raise UsageError("k1 run needs --code or --program")
    out, spent = k1.run_cost(code, args.input, args.fuel)
    return 0, {"code": k1.describe_code(code), "program": k1.format_program(k1.decode(code)),
               "input": args.input, "fuel": args.fuel, "fuel_spent": spent,
               "result": outcome_json(out, k1.describe_code)}


def cmd_k2_apply(args) -> tuple:
    try:
        alpha = k2.parse_element(read_json_spec(args.alpha))
        beta = k2.parse_element(read_json_spec(args.beta))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res = k2.k2_apply(alpha, beta, args.fuel, coords=args.coords)
    doc = res.to_json()
    return 0, {"alpha": getattr(alpha, "name", repr(alpha)), "beta": getattr(beta, "name", repr(beta)),
               "fuel": args.fuel, "result": doc}


def cmd_friedberg_run(args) -> tuple:
    state = friedberg.init_state(trace=bool(args.trace))
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            for _ in range(args.stages):
                state.step()
                for line in friedberg.trace_lines(state):
                    fh.write(line + "\n")
                state.trace.clear()
    else:
        state.run(args.stages)
    snap = state.snapshot()
    if args.snapshot:
        with open(args.snapshot, "w", encoding="utf-8") as fh:
            json.dump(snap, fh, sort_keys=True)
    report = friedberg.check_invariants(state, deep=False)
    return 0, {"stages": args.stages, "released": len(snap["released"]),
               "active": len(snap["followers"]), "used": len(snap["used"]),
               "invariants_ok": report["ok"],
               "snapshot": snap if not args.snapshot else args.snapshot}


def cmd_friedberg_check(args) -> tuple:
    try:
        snap = json.loads(read_spec("@" + args.snapshot))
        report = friedberg.check_snapshot(snap, deep=not args.shallow)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"bad snapshot: {exc}") from None
    return (0 if report["ok"] else 1), {"result": report}


def cmd_friedberg_find_k(args) -> tuple:
    try:
        found = friedberg.find_k_code(args.stages, samples=args.samples, seed=args.seed)
    except friedberg.NoStableFollower as exc:
        return 1, {"result": {"outcome": "exhausted", "reason": str(exc)}}
    return (0 if found["verified"] else 1), {"result": found}


def cmd_friedberg_refute_s(args) -> tuple:
    con = friedberg.Construction()
    try:
        k_code = friedberg.find_k_code(args.budget, construction=con)["code"]
    except friedberg.NoStableFollower:
        k_code = None
    w = friedberg.refute_s_candidate(args.code, args.budget, k_code=k_code, construction=con)
    return _witness_doc(w, _plain)


def cmd_oracle_run(args) -> tuple:
    lib = k1_lib()
    doc = read_json_spec(args.oracle)
    if not isinstance(doc, dict):
        raise UsageError("--oracle expects a JSON object {\"table\": {...}, \"default\": n}")
    f = oracle.OracleFn.from_json(doc)
    if args.plan is not None:
        try:
            machine = oracle.query_machine(lib, oracle.Plan.from_json(read_json_spec(args.plan)))
        except (oracle.PlanError, KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad plan: {exc}") from None
    elif args.code is not None:
        machine = args.code
    else:
        raise UsageError("oracle run needs --plan or --code")
    out, tr = oracle.oracle_apply(lib, f, machine, args.input, args.fuel)
    problems = oracle.replay(lib, f, machine, args.input, tr, args.fuel)
    describe = _describer(lib)
    return 0, {"input": args.input, "fuel": args.fuel, "result": outcome_json(out, describe),
               "transcript": tr.to_json(describe), "replay_problems": problems}


_FAMILIES = {
    "halting": reductions.k1_halting_candidates,
    "separator": reductions.k1_separator_candidates,
    "extension": reductions.k1_extension_candidates,
}


def cmd_refute(args) -> tuple:
    lib = k1_lib()
    describe = _describer(lib)
    if args.kind == "continuous":
        cands = {g.name: g for g in k2.decider_candidates()}
        picked = _pick(cands, args)
        docs = [(name, k2.refute_continuous_decider(g, fuel=args.fuel)) for name, g in picked]
        return _witness_list(docs, _plain)
    if args.kind == "precomplete":
        kernel = {"identity": k1.IDENTITY_KERNEL, "same-pc-function": k1.FUNCTION_KERNEL}[args.kernel]
        tot = k1.precomplete_totalizer(reductions.diagonal_element(lib))
        try:
            w = reductions.refute_precomplete_injective(lib, tot, kernel, reductions.k1_separator01(lib),
                                                        args.fuel)
        except reductions.PreconditionError as exc:
            return 1, {"result": {"outcome": "precondition", "reason": str(exc)}}
        return _witness_doc(w, describe, args.trace)
    cands = dict(_FAMILIES[args.kind](lib))
    if args.code is not None:
        picked = [(f"code:{args.code}", args.code)]
    elif args.term is not None:
        out = eval_closed(lib.model, _parse_term(read_spec(args.term)), args.fuel, lib.env())
        if not isinstance(out, Defined):
            raise UsageError(f"candidate term is {outcome_json(out)['outcome']}")
        picked = [("term", out.value)]
    else:
        picked = _pick(cands, args)
    docs = []
    for name, c in picked:
        try:
            if args.kind == "halting":
                w = reductions.refute_halting_decider(lib, c, args.fuel)
            elif args.kind == "separator":
                w = reductions.refute_separator(lib, c, args.fuel)
            else:
                w = reductions.refute_total_extension(lib, c, reductions.k1_separator01(lib), args.fuel)
        except reductions.InvalidCandidate as exc:
            w = exc.witness
        docs.append((name, w))
    if len(docs) == 1 and args.trace:
        return _witness_doc(docs[0][1], describe, args.trace)
    return _witness_list(docs, describe)


def _plain(v):
    return v if isinstance(v, (int, str)) else getattr(v, "name", repr(v))


def _pick(cands: dict, args) -> list:
    if args.candidate is None:
        return list(cands.items())
    if args.candidate not in cands:
        raise UsageError(f"unknown candidate {args.candidate!r}; known: {', '.join(cands)}")
    return [(args.candidate, cands[args.candidate])]


def _witness_doc(w: Witness, describe, trace: Optional[str] = None) -> tuple:
    doc = w.to_json(describe)
    if trace:
        with open(trace, "w", encoding="utf-8") as fh:
            for step in doc["transcript"]:
                fh.write(json.dumps(step, sort_keys=True) + "\n")
    doc["replayed"] = w.replay()
    return (1 if w.kind == "invalid-candidate" else 0), {"witness": doc}


def _witness_list(docs, describe) -> tuple:
    out = []
    status = 0
    for name, w in docs:
        d = w.to_json(describe)
        d["candidate"] = name
        d["replayed"] = w.replay()
        out.append(d)
        if w.kind == "invalid-candidate":
            status = 1
    if len(out) == 1:
        return status, {"witness": out[0]}
    return status, {"witnesses": out}


def cmd_search(args) -> tuple:
    if not 1 <= args.size <= 3:
        raise UsageError("--size must be 1, 2 or 3")
    res = search_finite_pca(args.size)
    return 0, {"result": {"n": res["n"], "checked": res["checked"],
                          "structures": [t.dumps() for t in res["structures"]]}}


def cmd_suite(args) -> tuple:
    skip = set(args.skip or ())
    results = acceptance.run_suite(args.seed, skip=skip, echo=lambda s: print(s, file=sys.stderr))
    doc = json.loads(acceptance.suite_json(results, args.seed))
    return (0 if doc["pass"] else 1), {"result": doc}


# -- parser ---------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pcalab", description="Partial combinatory algebra laboratory.")
    sub = p.add_subparsers(dest="verb", required=True)

    def fuel_opt(sp):
        sp.add_argument("--fuel", type=positive, default=None,
                        help="step budget (default: $PCALAB_FUEL or %d)" % DEFAULT_FUEL)

    ev = sub.add_parser("eval", help="evaluate a closed term")
    ev.add_argument("term")
    ev.add_argument("--model", default="k1")
    ev.add_argument("--let", action="append", metavar="NAME=TERM")
    fuel_opt(ev)
    ev.set_defaults(func=cmd_eval)

    co = sub.add_parser("compile", help="lambda*-translate a term")
    co.add_argument("term")
    co.add_argument("--model", choices=["none", "k1"], default="none")
    fuel_opt(co)
    co.set_defaults(func=cmd_compile)

    k1p = sub.add_parser("k1").add_subparsers(dest="action", required=True)
    kr = k1p.add_parser("run", help="run a K1 program on an input")
    kr.add_argument("--code", type=natural)
    kr.add_argument("--program")
    kr.add_argument("--input", type=natural, default=0)
    fuel_opt(kr)
    kr.set_defaults(func=cmd_k1_run)

    k2p = sub.add_parser("k2").add_subparsers(dest="action", required=True)
    ka = k2p.add_parser("apply", help="apply two K2 elements")
    ka.add_argument("alpha")
    ka.add_argument("beta")
    ka.add_argument("--coords", type=positive, default=k2.DEFAULT_COORDS)
    fuel_opt(ka)
    ka.set_defaults(func=cmd_k2_apply)

    fp = sub.add_parser("friedberg").add_subparsers(dest="action", required=True)
    fr = fp.add_parser("run")
    fr.add_argument("--stages", type=positive, required=True)
    fr.add_argument("--trace", help="write one JSON line per stage")
    fr.add_argument("--snapshot", help="write the final state here instead of inline")
    fr.set_defaults(func=cmd_friedberg_run)
    fc = fp.add_parser("check")
    fc.add_argument("snapshot")
    fc.add_argument("--shallow", action="store_true", help="skip recomputing approximations")
    fc.set_defaults(func=cmd_friedberg_check)
    fk = fp.add_parser("find-k")
    fk.add_argument("--stages", type=positive, required=True)
    fk.add_argument("--samples", type=positive, default=50)
    fk.add_argument("--seed", type=int, default=acceptance.SEED)
    fk.set_defaults(func=cmd_friedberg_find_k)
    fs = fp.add_parser("refute-s")
    fs.add_argument("--code", type=natural, required=True)
    fs.add_argument("--budget", type=positive, required=True)
    fs.set_defaults(func=cmd_friedberg_refute_s)

    op = sub.add_parser("oracle").add_subparsers(dest="action", required=True)
    orun = op.add_parser("run", help="run a query dialogue against a table oracle")
    orun.add_argument("--oracle", required=True)
    orun.add_argument("--plan")
    orun.add_argument("--code", type=natural)
    orun.add_argument("--input", type=natural, default=0)
    fuel_opt(orun)
    orun.set_defaults(func=cmd_oracle_run)

    rf = sub.add_parser("refute", help="extract a witness against a candidate")
    rf.add_argument("kind", choices=["halting", "separator", "extension", "precomplete", "continuous"])
    rf.add_argument("--candidate", help="name from the shipped family (default: all)")
    rf.add_argument("--code", type=natural, help="a K1 code as candidate")
    rf.add_argument("--term", help="a closed term as candidate")
    rf.add_argument("--kernel", choices=["identity", "same-pc-function"], default="identity")
    rf.add_argument("--trace", help="write the witness transcript as JSON lines")
    fuel_opt(rf)
    rf.set_defaults(func=cmd_refute)

    se = sub.add_parser("search-finite-pca")
    se.add_argument("--size", type=positive, default=2)
    se.set_defaults(func=cmd_search)

    su = sub.add_parser("suite", help="run the acceptance battery")
    su.add_argument("--seed", type=int, default=acceptance.SEED)
    su.add_argument("--skip", type=int, action="append", metavar="N")
    su.set_defaults(func=cmd_suite)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "fuel", "absent") is None:
            args.fuel = default_fuel()
        status, doc = args.func(args)
    except UsageError as exc:
        print(f"pcalab: error: {exc}", file=sys.stderr)
        return 2
    verb = args.verb if not getattr(args, "action", None) else f"{args.verb} {args.action}"
    if args.verb == "refute":
        verb = f"refute {args.kind}"
    out = {"schema_version": SCHEMA_VERSION, "verb": verb, "status": status, **doc}
    sys.stdout.write(json.dumps(out, sort_keys=True, default=str) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
