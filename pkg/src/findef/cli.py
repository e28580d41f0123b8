"""Command-line interface.

Exit codes: 0 definable / holds, 1 not definable / violated, 2 usage error,
3 input error. Every subcommand accepts ``--json``.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .definability import (
    DefiningFormula,
    enumerate_definables,
    is_definable,
    normalize_mode,
    synthesize,
    witness_pair,
)
from .errors import FindefError, NotDefinable
from .formula import parse_formula, render_formula
from .seqspace import (
    boolean_valuation,
    build_counterexample_map,
    canonical_selection,
    check_almost_preserves,
    extend_map,
    extension_exceptions,
    parse_bindings,
    parse_map,
    parse_sequence,
    render_map,
    selection_exceptions,
    witness_sequences,
)
from .structure import load_structure
from .symmetry import automorphisms, cycle_notation, orbits, type_partition

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3


class _Output:
    def __init__(self, as_json: bool, stream):
        self.as_json = as_json
        self.stream = stream
        self.lines: list[str] = []
        self.data: dict = {}

    def line(self, text=""):
        self.lines.append(text)

    def flush(self):
        if self.as_json:
            self.stream.write(json.dumps(self.data, indent=2) + "\n")
        else:
            self.stream.write("\n".join(self.lines) + "\n")


def _seq(s) -> str:
    return ",".join(map(str, s))


def _tup(t) -> str:
    return " ".join(map(str, t))


def _indices(index_set) -> str:
    return "{" + ",".join(map(str, index_set.sorted())) + "}"


def _violation_json(cert):
    return {
        "permutation": list(cert.permutation),
        "a": list(cert.a),
        "b": list(cert.b),
    }


def _print_certificate(out, ok, cert):
    if ok:
        out.line("DEFINABLE")
        out.line("formula: " + render_formula(cert.formula))
        out.data["verdict"] = "definable"
        out.data["certificate"] = {"formula": render_formula(cert.formula)}
    else:
        out.line("NOT DEFINABLE")
        out.line(f"permutation: {_tup(cert.permutation)}  {cycle_notation(cert.permutation)}")
        out.line(f"a: {_tup(cert.a)}")
        out.line(f"b: {_tup(cert.b)}")
        out.data["verdict"] = "not definable"
        out.data["certificate"] = _violation_json(cert)


# -- subcommands -----------------------------------------------------------

def cmd_check(args, S, out):
    ok, cert = is_definable(S, strict=args.strict_limits)
    _print_certificate(out, ok, cert)
    return EXIT_OK if ok else EXIT_VIOLATED


def cmd_synthesize(args, S, out):
    E = enumerate_definables(S, S.target_arity, args.mode, strict=args.strict_limits)
    try:
        f, m_star = synthesize(S, E)
    except NotDefinable as e:
        _print_certificate(out, False, e.certificate)
        return EXIT_VIOLATED
    _print_certificate(out, True, DefiningFormula(f))
    out.line(f"level: {m_star} of {len(E)} ({E.mode})")
    out.data["trace"] = {"level": m_star, "items": len(E), "mode": E.mode}
    return EXIT_OK


def _print_partition(out, part, key="classes"):
    out.data[key] = [[list(t) for t in cl] for cl in part]
    for i, cl in enumerate(part):
        out.line(f"class {i}: " + "; ".join(_tup(t) for t in cl))


def cmd_orbits(args, S, out):
    part = orbits(S, args.arity, strict=args.strict_limits)
    out.line(f"{len(part)} orbits on {args.arity}-tuples")
    out.data["arity"] = args.arity
    _print_partition(out, part)
    return EXIT_OK


def cmd_aut(args, S, out):
    group = automorphisms(S, strict=args.strict_limits)
    out.line(f"{len(group)} automorphisms")
    for g in group:
        out.line(f"{_tup(g)}  {cycle_notation(g)}")
    out.data["automorphisms"] = [list(g) for g in group]
    return EXIT_OK


def cmd_types(args, S, out):
    depth = "stable" if args.depth is None else args.depth
    part, q = type_partition(S, args.arity, depth, strict=args.strict_limits)
    label = "stable at depth" if depth == "stable" else "depth"
    out.line(f"{len(part)} rank-{q} type classes on {args.arity}-tuples ({label} {q})")
    out.data["arity"] = args.arity
    out.data["depth"] = q
    out.data["stable"] = depth == "stable"
    _print_partition(out, part)
    return EXIT_OK


def cmd_witness(args, S, out):
    E = enumerate_definables(S, S.target_arity, args.mode, strict=args.strict_limits)
    pair = witness_pair(S, args.m, E)
    out.data["m"] = min(args.m, len(E))
    out.data["items"] = len(E)
    out.data["mode"] = E.mode
    if pair is None:
        out.line(f"no witness pair at level {min(args.m, len(E))} of {len(E)} ({E.mode})")
        out.data["verdict"] = "none"
        out.data["certificate"] = None
        return EXIT_OK
    a, b = pair
    out.line(f"witness pair at level {min(args.m, len(E))} of {len(E)} ({E.mode})")
    out.line(f"a: {_tup(a)}")
    out.line(f"b: {_tup(b)}")
    out.data["verdict"] = "witness"
    out.data["certificate"] = {"a": list(a), "b": list(b)}
    return EXIT_VIOLATED


def _report(S, m, relation, selection=None, arity=None):
    ok, rep = check_almost_preserves(S, m, relation, 0, arity=arity)
    entry = {"union": rep.union.sorted(), "max": rep.max_size}
    if selection is not None:
        entry["selection"] = list(selection)
        entry["selection_exceptions"] = selection_exceptions(
            S, m, relation, selection, arity=arity
        ).sorted()
    return entry


def cmd_counterexample(args, S, out):
    if args.length <= 0:
        raise FindefError("--length must be positive")
    ok, cert = is_definable(S, strict=args.strict_limits)
    if ok:
        _print_certificate(out, ok, cert)
        return EXIT_OK
    E = enumerate_definables(S, S.target_arity, args.mode, strict=args.strict_limits)
    m = build_counterexample_map(S, E, args.length)
    a_seqs, _ = witness_sequences(S, E, args.length)
    sel = canonical_selection(m, a_seqs)
    _print_certificate(out, False, cert)
    out.line(f"map ({E.mode}, length {args.length}):")
    for line in render_map(m).splitlines():
        out.line("  " + line)
    exceptions = {}
    k = S.target_arity
    rows = [(S.target_name, S.target_name, k, None)]
    rows += [(name, name, arity, None) for name, arity in S.signature]
    rows += [(f"P{i + 1}", table, k, k) for i, table in enumerate(E.tables())]
    out.line("exceptions (witness selection / union over all selections):")
    for label, relation, r, arity in rows:
        entry = _report(S, m, relation, sel if r == len(sel) else None, arity=arity)
        exceptions[label] = entry
        shown = _indices_list(entry.get("selection_exceptions"))
        out.line(f"  {label}: {shown} / {_indices_list(entry['union'])}")
    out.data["map"] = [[list(f), list(g)] for f, g in m.items()]
    out.data["mode"] = E.mode
    out.data["exceptions"] = exceptions
    return EXIT_VIOLATED


def _indices_list(xs):
    if xs is None:
        return "-"
    return "{" + ",".join(map(str, xs)) + "}"


def cmd_extend(args, S, out):
    m = _load_map(args.map, S)
    a = parse_sequence(args.new)
    if len(a) != m.length:
        raise FindefError(f"--new has length {len(a)}, map has length {m.length}")
    if any(not 0 <= v < S.size for v in a):
        raise FindefError("--new has an element out of range")
    E = enumerate_definables(S, len(m) + 1, args.mode, strict=args.strict_limits)
    b, trace = extend_map(S, m, a, E)
    out.line(f"image: {_seq(b)}")
    out.data["image"] = list(b)
    if trace.already_mapped:
        out.line("(already in the domain; existing image returned)")
        out.data["trace"] = {"already_mapped": True}
        return EXIT_OK
    out.line(f"n0: {trace.n0}")
    out.line("k  m_k  b(k)  pattern")
    for k, (mk, y, pat) in enumerate(zip(trace.levels, trace.values, trace.patterns)):
        out.line(f"{k}  {mk}  {y}  {''.join('+' if s > 0 else '-' for s in pat)}")
    exc = extension_exceptions(S, m, a, b, E)
    out.line("exceptions per enumerated relation:")
    for j, s in enumerate(exc, start=1):
        out.line(f"  P{j}: {_indices(s)}")
    out.data["trace"] = {
        "already_mapped": False,
        "n0": trace.n0,
        "levels": list(trace.levels),
        "values": list(trace.values),
        "patterns": [list(p) for p in trace.patterns],
        "mode": E.mode,
    }
    out.data["exceptions"] = {f"P{j}": s.sorted() for j, s in enumerate(exc, start=1)}
    return EXIT_OK


def cmd_verify(args, S, out):
    m = _load_map(args.map, S)
    if args.budget < 0:
        raise FindefError("--budget must be nonnegative")
    if args.formula is not None:
        relation = parse_formula(args.formula, S.signature)
    else:
        relation = args.relation
        S.arity(relation)
    ok, rep = check_almost_preserves(S, m, relation, args.budget)
    out.line(("HOLDS" if ok else "VIOLATED") + f" for {rep.relation} with budget {args.budget}")
    out.line(f"max exceptions: {rep.max_size}")
    out.line(f"union: {_indices(rep.union)}")
    for sel, s in rep.nonempty().items():
        out.line(f"  selection {_tup(sel)}: {_indices(s)}")
    out.data["verdict"] = "holds" if ok else "violated"
    out.data["relation"] = rep.relation
    out.data["budget"] = args.budget
    out.data["exceptions"] = {
        "max": rep.max_size,
        "union": rep.union.sorted(),
        "selections": [[list(sel), s.sorted()] for sel, s in rep.nonempty().items()],
    }
    return EXIT_OK if ok else EXIT_VIOLATED


def cmd_bvalue(args, S, out):
    f = parse_formula(args.formula, S.signature)
    with open(args.seqs, encoding="utf-8") as fh:
        binding = parse_bindings(fh.read(), S.size)
    length = len(next(iter(binding.values())))
    value = boolean_valuation(S, f, binding, length)
    out.line(f"{_indices(value)} of length {length}")
    out.data["formula"] = render_formula(f)
    out.data["length"] = length
    out.data["value"] = value.sorted()
    return EXIT_OK


def _load_map(path, S):
    with open(path, encoding="utf-8") as fh:
        return parse_map(fh.read(), S.size)


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("structure", help="structure file")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument(
        "--strict-limits", action="store_true", help="abort instead of warning past the soft limits"
    )
    mode = argparse.ArgumentParser(add_help=False)
    mode.add_argument("--mode", default="orbit", choices=["orbit", "rank", "orbit-atoms", "by-rank"])

    p = argparse.ArgumentParser(prog="findef", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("check", parents=[common], help="decide definability of the target")
    sub.add_parser("synthesize", parents=[common, mode], help="build a defining formula")
    s = sub.add_parser("orbits", parents=[common], help="automorphism orbits on tuples")
    s.add_argument("--arity", type=int, required=True)
    sub.add_parser("aut", parents=[common], help="list automorphisms")
    s = sub.add_parser("types", parents=[common], help="rank-q type partition")
    s.add_argument("--arity", type=int, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--depth", type=int)
    g.add_argument("--stable", action="store_true")
    s = sub.add_parser("witness", parents=[common, mode], help="witness pair at a level")
    s.add_argument("--m", type=int, required=True)
    s = sub.add_parser("counterexample", parents=[common, mode], help="counterexample sequence map")
    s.add_argument("--length", type=int, required=True)
    s = sub.add_parser("extend", parents=[common, mode], help="extend a map by one sequence")
    s.add_argument("--map", required=True)
    s.add_argument("--new", required=True, help="comma-separated sequence")
    s = sub.add_parser("verify", parents=[common], help="check almost-preservation of a map")
    s.add_argument("--map", required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--relation")
    g.add_argument("--formula")
    s.add_argument("--budget", type=int, required=True)
    s = sub.add_parser("bvalue", parents=[common], help="Boolean value of a formula on sequences")
    s.add_argument("--formula", required=True)
    s.add_argument("--seqs", required=True, help="file of 'xN = v0,v1,...' lines")
    return p


COMMANDS = {
    "check": cmd_check,
    "synthesize": cmd_synthesize,
    "orbits": cmd_orbits,
    "aut": cmd_aut,
    "types": cmd_types,
    "witness": cmd_witness,
    "counterexample": cmd_counterexample,
    "extend": cmd_extend,
    "verify": cmd_verify,
    "bvalue": cmd_bvalue,
}


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    if getattr(args, "mode", None) is not None:
        args.mode = normalize_mode(args.mode)
    if getattr(args, "arity", None) is not None and args.arity < 1:
        print("findef: --arity must be positive", file=stderr)
        return EXIT_USAGE
    if getattr(args, "depth", None) is not None and args.depth < 0:
        print("findef: --depth must be nonnegative", file=stderr)
        return EXIT_USAGE
    if getattr(args, "m", None) is not None and args.m < 0:
        print("findef: --m must be nonnegative", file=stderr)
        return EXIT_USAGE
    out = _Output(args.json, stdout)
    try:
        S = load_structure(args.structure)
        code = COMMANDS[args.command](args, S, out)
    except (FindefError, OSError, ValueError) as e:
        print(f"findef: error: {e}", file=stderr)
        return EXIT_INPUT
    out.flush()
    return code


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
