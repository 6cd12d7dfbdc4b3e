"""Command line front end: ``smgkit COMMAND FILE ...`` prints a JSON report.

Exit codes: 0 pass, 1 a checked property failed, 2 usage or parse error,
3 a size cap was exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from smgkit.core.green import GreenData, green_data, group_of_units, zero_minimal_ideal
from smgkit.core.semigroup import DEFAULT_MAX_ELEMENTS, CapExceeded, EnumeratedSemigroup, SemigroupError
from smgkit.evalengine import EvalError
from smgkit.flows import FlowError
from smgkit.description import (DescriptionError, SemigroupDescription, build_semigroup,
                                description_from_dict, dump_description, parse_description)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _load(path: str, cap: Optional[int] = None) -> tuple[SemigroupDescription, EnumeratedSemigroup]:
    if not Path(path).is_file():
        raise UsageError(f"{path}: no such file")
    desc = parse_description(path)
    return desc, build_semigroup(desc, cap)


def _element_order(S: EnumeratedSemigroup, x: int) -> int:
    p, k = x, 1
    one = S.identity
    while p != one:
        p = S.mul(p, x)
        k += 1
        if k > len(S):
            return 0
    return k


def _units_report(S: EnumeratedSemigroup, green: GreenData) -> dict:
    units = group_of_units(S, green)
    if not units:
        return {"size": 0}
    orders = sorted(_element_order(S, u) for u in units)
    cyclic = orders[-1] == len(units)
    return {"size": len(units), "cyclic": cyclic, "structure": f"Z{len(units)}" if cyclic else None,
            "element_orders": orders}


def _j_report(S: EnumeratedSemigroup, green: GreenData) -> list[dict]:
    out = []
    for j in green.chain_order():
        members = green.j_classes[j]
        out.append({
            "id": j,
            "size": len(members),
            "regular": green.regular[j],
            "schutzenberger_order": green.schutzenberger_order(j),
            "r_classes": len({green.r_of[x] for x in members}),
            "l_classes": len({green.l_of[x] for x in members}),
            "representative": S.word(members[0]),
            "covers": sorted(b for a, b in green.j_covers() if a == j),
        })
    return out


def cmd_analyze(args) -> tuple[int, dict]:
    from smgkit.rees import classify_monoid, is_gm
    desc, S = _load(args.file, args.max_elements)
    green = green_data(S)
    rep: dict = {"name": desc.name, "size": len(S), "base_points": len(desc.B), "group_order": S.group.order,
                 "j_classes": _j_report(S, green), "units": _units_report(S, green)}
    try:
        ideal = zero_minimal_ideal(S, green)
        rep["zero_minimal_ideal"] = {"size": len(ideal.members), "zero_simple": ideal.zero_simple,
                                     "maximal_subgroup_order": green.schutzenberger_order(ideal.j_class)}
        cert = is_gm(S, green)
        rep["gm"] = {"ggm": cert.is_ggm, "gm": cert.is_gm, "reasons": cert.reasons}
        if cert.coordinatization is not None:
            R = cert.rees
            rep["gm"]["structure_matrix"] = {"A": [str(a) for a in R.A], "B": [str(b) for b in R.B],
                                             "C_T": R.format()}
            rep["gm"]["round_trip"] = cert.coordinatization.round_trip
    except SemigroupError as exc:
        rep["zero_minimal_ideal"] = None
        rep["gm"] = {"ggm": False, "gm": False, "reasons": [str(exc)]}
    if S.identity is not None and S.zero is not None:
        cls = classify_monoid(S, green)
        rep["classification"] = {"kind": cls.kind, "small": cls.kind == "small",
                                 "smallish": cls.kind in ("small", "smallish"),
                                 "strictly_smallish": cls.kind == "smallish", "ideal_powers": cls.powers,
                                 "nilpotent_test": cls.nilpotent_test, "census_test": cls.census_test,
                                 **cls.evidence}
    else:
        rep["classification"] = None
    return EXIT_OK, rep


def _prepare(desc: SemigroupDescription, S: EnumeratedSemigroup, column: Optional[int] = None):
    from smgkit.ev import build_ev_generators, prepare_gm
    from smgkit.rees import is_gm
    cert = is_gm(S)
    strict = cert.left_witness is None and cert.right_witness is None
    S2, coord = prepare_gm(S, column=column, strict=False)
    return S2, coord, build_ev_generators(S2, coord), strict


def cmd_build_ev(args) -> tuple[int, dict]:
    from smgkit.ev import (build_sev, ev_cross_sections, ev_structure_matrix, sev_description, structure_report,
                           verify_ev_properties)
    desc, S = _load(args.file, args.max_elements)
    S2, coord, gen, faithful = _prepare(desc, S, args.column)
    SEv = build_sev(gen, args.max_elements or DEFAULT_MAX_ELEMENTS)
    green = green_data(SEv)
    props = verify_ev_properties(SEv, gen, green)
    rep: dict = {"source": desc.name, "size_S": len(S), "faithful_on_ideal": faithful,
                 "normalized_C_T": coord.rees.format(), "column": coord.rees.a,
                 "relabeled": S2 is not S, "size_SEv": len(SEv), "points": gen.index.size * S.group.order,
                 "properties": [{"name": c.name, "ok": c.ok, **({"witness": c.witness} if not c.ok else {})}
                                for c in props.checks]}
    ok = props.ok
    try:
        data = ev_cross_sections(SEv, gen, green)
        sm = ev_structure_matrix(SEv, gen, data, green)
        rep["structure"] = structure_report(gen, sm)
    except SemigroupError as exc:
        rep["structure"] = {"error": str(exc)}
        ok = False
    out = Path(args.out) if args.out else Path(Path(args.file).stem + "_ev.json")
    out.write_text(dump_description(sev_description(gen, desc.name or Path(args.file).stem, desc.to_dict())))
    rep["written"] = str(out)
    rep["ok"] = ok
    return (EXIT_OK if ok else EXIT_FAIL), rep


def _source_of(desc: SemigroupDescription, S: EnumeratedSemigroup, cap: Optional[int]):
    """For an S^Ev file: rebuild the source and check the stored generators; else use the file itself."""
    from smgkit.ev import build_sev
    src = desc.extra.get("ev_source")
    if not src:
        return desc, S, None
    if not src.get("description"):
        raise UsageError("S^Ev file carries no source description")
    sdesc = description_from_dict(src["description"])
    S0 = build_semigroup(sdesc, cap)
    S2, coord, gen, _ = _prepare(sdesc, S0, src.get("column"))
    SEv = build_sev(gen, cap or DEFAULT_MAX_ELEMENTS)
    if list(SEv.generators) != list(S.generators) or SEv.generator_names != S.generator_names:
        raise UsageError("S^Ev file does not match the construction applied to its source")
    return sdesc, S0, SEv


def cmd_embed_check(args) -> tuple[int, dict]:
    from smgkit.ev import build_sev
    from smgkit.evalengine import embed_check_formula, embed_check_full
    desc, S = _load(args.file, args.max_elements)
    sdesc, S0, SEv = _source_of(desc, S, args.max_elements)
    S2, coord, gen, _ = _prepare(sdesc, S0, None if SEv is None else desc.extra["ev_source"].get("column"))
    if args.mode == "formula":
        r = embed_check_formula(S2, gen)
    else:
        SEv = SEv if SEv is not None else build_sev(gen, args.max_elements or DEFAULT_MAX_ELEMENTS)
        r = embed_check_full(S2, gen, SEv, cap_lattice=args.max_lattice)
    rep = r.to_json()
    rep["source"] = sdesc.name
    return (EXIT_OK if r.ok else EXIT_FAIL), rep


def cmd_complexity(args) -> tuple[int, dict]:
    from smgkit.complexity import complexity_report
    desc, S = _load(args.file, args.max_elements)
    r = complexity_report(S, recurse=args.recurse, max_size=args.max_size)
    lo, hi = r.interval()
    rep = {"name": desc.name, "size": len(S), "interval": [lo, hi], "value": r.value(), **r.to_json()}
    if r.value() is None and hi is not None:
        rep["summary"] = f"{lo} <= c <= {hi}; bounds beyond these are not verified here"
    else:
        rep["summary"] = f"c = {r.value()}" if r.value() is not None else f"c >= {lo}"
    return EXIT_OK, rep


def cmd_type2(args) -> tuple[int, dict]:
    from smgkit.complexity import check_type_ii, type_ii
    desc, S = _load(args.file, args.max_elements)
    cert = type_ii(S, seed=args.seed)
    ok = check_type_ii(S, cert)
    rep = {"name": desc.name, "size": len(S), "type_ii_size": len(cert.members), "rounds": cert.rounds,
           "members": [S.word(x) for x in sorted(cert.members)], "log": cert.log, "certificate_ok": ok}
    return (EXIT_OK if ok else EXIT_FAIL), rep


def cmd_tilson(args) -> tuple[int, dict]:
    from smgkit.complexity import point_partition_oracle, tilson_congruence
    desc, S = _load(args.file, args.max_elements)
    res = tilson_congruence(S)
    oracle = point_partition_oracle(S)
    names = [f"({S.group.name(g)},{b})" for g in range(S.group.order) for b in S.base_names]
    agree = res.partition == oracle == res.restricted
    rep = {"name": desc.name, "partition": [[names[b] for b in blk] for blk in res.partition.blocks],
           "restricted_agrees": res.partition == res.restricted, "oracle_agrees": res.partition == oracle,
           "type_ii_size": len(res.type_ii.members)}
    return (EXIT_OK if agree else EXIT_FAIL), rep


def _flow_input(args):
    from smgkit.flows import FlowError, load_flow
    desc, S = _load(args.file, args.max_elements)
    if not Path(args.flowfile).is_file():
        raise UsageError(f"{args.flowfile}: no such file")
    try:
        return desc, S, load_flow(args.flowfile, S)
    except FlowError as exc:
        raise UsageError(str(exc)) from None


def cmd_flow_verify(args) -> tuple[int, dict]:
    from smgkit.flows import verify_flow, verify_saturated
    desc, S, flow = _flow_input(args)
    r = verify_flow(S, flow)
    rep = {"name": desc.name, "ok": r.ok, "checked": r.checked, "aperiodic": r.aperiodic, "failures": r.failures}
    if flow.target == "Rh":
        rep["saturated_ok"] = verify_saturated(S, flow).ok
    ok = r.ok and r.aperiodic is not False
    return (EXIT_OK if ok else EXIT_FAIL), rep


def cmd_flow_lift(args) -> tuple[int, dict]:
    from smgkit.ev import build_sev
    from smgkit.flows import FlowError, flow_to_dict, lift_flow_ev, relabel_flow, verify_flow
    desc, S, flow = _flow_input(args)
    S2, coord, gen, _ = _prepare(desc, S)
    if S2 is not S:
        flow = relabel_flow(flow, S.group, coord.rees.row_scaling)
    SEv = build_sev(gen, args.max_elements or DEFAULT_MAX_ELEMENTS)
    try:
        lifted = lift_flow_ev(flow, gen, S2, SEv)
    except FlowError as exc:
        return EXIT_FAIL, {"name": desc.name, "ok": False, "error": str(exc)}
    r = verify_flow(SEv, lifted)
    out = Path(args.out) if args.out else Path(Path(args.flowfile).stem + "_ev.json")
    out.write_text(json.dumps(flow_to_dict(lifted, S.group, gen.index.names()), indent=2) + "\n")
    rep = {"name": desc.name, "ok": r.ok, "aperiodic": r.aperiodic, "checked": r.checked,
           "failures": r.failures, "size_SEv": len(SEv), "written": str(out)}
    return (EXIT_OK if r.ok and r.aperiodic is not False else EXIT_FAIL), rep


def cmd_eval(args) -> tuple[int, dict]:
    from smgkit.evalengine import action_check, build_eval_ts, setup
    desc, S = _load(args.file, args.max_elements)
    L, m0 = setup(S, args.max_lattice, args.max_m0)
    ets = build_eval_ts(m0, S.size, args.max_m0)
    rep = ets.report()
    rep["contradiction_reading"] = "a state class carrying two labels over one base point"
    if args.action_check:
        w = action_check(m0)
        rep["action_check"] = w is None
        if w is not None:
            rep["action_witness"] = w
            return EXIT_FAIL, rep
    return EXIT_OK, rep


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="smgkit", description="Complexity-one tools for finite semigroups.")
    p.add_argument("--max-elements", type=int, default=None, help="enumeration cap (default SMGKIT_MAX_ELEMENTS)")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="Green structure, GM test and monoid classification")
    a.add_argument("file")
    a.set_defaults(func=cmd_analyze)

    b = sub.add_parser("build-ev", help="construct S^Ev, verify its properties and write its description")
    b.add_argument("file")
    b.add_argument("--out")
    b.add_argument("--column", type=int, default=None, help="column of C used for normalization")
    b.set_defaults(func=cmd_build_ev)

    c = sub.add_parser("complexity", help="bounds on the group complexity")
    c.add_argument("file")
    c.add_argument("--recurse", type=int, default=2)
    c.add_argument("--max-size", type=int, default=20000)
    c.set_defaults(func=cmd_complexity)

    t = sub.add_parser("type2", help="type II subsemigroup with derivation log")
    t.add_argument("file")
    t.add_argument("--seed", type=int, default=None)
    t.set_defaults(func=cmd_type2)

    t = sub.add_parser("tilson", help="Tilson congruence with the brute-force cross-check")
    t.add_argument("file")
    t.set_defaults(func=cmd_tilson)

    f = sub.add_parser("flow", help="verify or lift a flow")
    fs = f.add_subparsers(dest="flow_command", required=True)
    v = fs.add_parser("verify")
    v.add_argument("file")
    v.add_argument("flowfile")
    v.set_defaults(func=cmd_flow_verify)
    lf = fs.add_parser("lift")
    lf.add_argument("file")
    lf.add_argument("flowfile")
    lf.add_argument("--out")
    lf.set_defaults(func=cmd_flow_lift)

    from smgkit.evalengine import DEFAULT_MAX_LATTICE, DEFAULT_MAX_M0
    e = sub.add_parser("eval", help="0-flow monoid and the evaluation transformation semigroup")
    e.add_argument("file")
    e.add_argument("--max-lattice", type=int, default=DEFAULT_MAX_LATTICE)
    e.add_argument("--max-m0", type=int, default=DEFAULT_MAX_M0)
    e.add_argument("--action-check", action="store_true", help="also check the action exhaustively")
    e.set_defaults(func=cmd_eval)

    k = sub.add_parser("embed-check", help="embedding of (G x B, S) into the evaluation of S^Ev")
    k.add_argument("file", help="a description, or an S^Ev file written by build-ev")
    k.add_argument("--mode", choices=["formula", "full"], default="formula")
    k.add_argument("--max-lattice", type=int, default=DEFAULT_MAX_LATTICE)
    k.set_defaults(func=cmd_embed_check)
    return p


def run_command(argv: Optional[list[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        code, rep = args.func(args)
    except (DescriptionError, UsageError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(json.dumps({"error": str(exc), "cap_exceeded": True}), file=sys.stderr)
        return EXIT_CAP
    except (SemigroupError, EvalError, FlowError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return EXIT_FAIL
    out.write(json.dumps(rep, indent=2, ensure_ascii=False) + "\n")
    return code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
