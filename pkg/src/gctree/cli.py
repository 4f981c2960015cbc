"""Command line front end (``gct`` or ``python -m gctree``).

Exit codes: 0 success, 1 invalid input, 2 expansion guard exceeded.
"""

import argparse
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor

from .bench import bench_string, bench_tree
from .encodings import bin_decode, bin_encode, fcns_decode, fcns_encode, parse_unranked
from .equality import EqCursor, EqIndex, subtree_eq
from .errors import FingerprintContradiction, GrammarError, GuardExceeded, LengthOverflow
from .generate import generate_tslp, random_slp, random_tslp
from .grammar import (
    DEFAULT_GUARD,
    eval_slp,
    eval_tslp,
    parse_slp,
    parse_tslp,
    serialize_slp,
    serialize_tslp,
    strip_comment,
)
from .nextlink import build_tries
from .slp import FingerprintScheme, lcp, substring_slp, symbol_at
from .strcursor import SlpWalker, StringCursor
from .transform import binarize_slp, classify, normalize
from .treecursor import TreeCursor, TreeIndex

EXIT_OK, EXIT_INVALID, EXIT_GUARD = 0, 1, 2


class CliError(Exception):
    """Bad input that is not a grammar error (exit code 1)."""


class Report:
    """Text lines for humans plus the same facts as a JSON-able object."""

    def __init__(self, lines, data, code=EXIT_OK):
        self.lines = list(lines)
        self.data = data
        self.code = code


# ------------------------------------------------------------------ input


def default_guard():
    raw = os.environ.get("GCT_MAX_NODES")
    if raw is None:
        return DEFAULT_GUARD
    try:
        value = int(raw)
    except ValueError:
        raise CliError(f"GCT_MAX_NODES must be an integer, got {raw!r}") from None
    if value < 0:
        raise CliError("GCT_MAX_NODES must be non-negative")
    return value


def read_text(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as f:
        return f.read()


def detect_kind(text):
    """'slp' or 'tslp'. Grammars whose rules all have a single bare symbol
    on the right are read as TSLPs."""
    for raw in text.splitlines():
        line = strip_comment(raw).strip()
        if not line:
            continue
        words = line.split()
        if "->" not in line:
            if words[0] == "start":
                return "tslp"
            if words[0] == "terminals":
                return "slp"
            continue
        if any(ch in line for ch in "(),"):
            return "tslp"
        if len(line.split("->", 1)[1].split()) != 1:
            return "slp"
    return "tslp"


def load(path, kind=None):
    text = read_text(path)
    kind = kind or detect_kind(text)
    g = parse_slp(text) if kind == "slp" else parse_tslp(text)
    return kind, g


def join_symbols(syms):
    syms = list(syms)
    if all(len(s) == 1 for s in syms):
        return "".join(syms)
    return " ".join(syms)


# ------------------------------------------------------------------ validate / stats


def _normal_form(g):
    if not g.is_monadic():
        return f"rank {g.max_nonterminal_rank}"
    try:
        ng = classify(g)
    except GrammarError:
        return "monadic"
    return "forms a-d ({})".format(
        ", ".join(f"{f}={len(getattr(ng, 'n_' + f))}" for f in "abcd")
    )


def describe(path, kind=None):
    """Facts about one grammar file; never raises for bad input."""
    out = {"path": path}
    try:
        text = read_text(path)
        kind = kind or detect_kind(text)
        out["kind"] = kind
        g = parse_slp(text) if kind == "slp" else parse_tslp(text)
    except LengthOverflow as e:
        out.update(ok=False, overflow=True, error=str(e))
        return out
    except (GrammarError, OSError, UnicodeDecodeError) as e:
        out.update(ok=False, error=str(e))
        return out
    out.update(ok=True, size=g.size, rules=len(g.rules), start=g.start)
    if kind == "slp":
        out["length"] = g.lengths[g.start]
        binary = all(len(r) == 2 for r in g.rules.values())
        out["normal_form"] = "binary" if binary else "not binary"
    else:
        out["tree_size"] = g.tree_size
        out["max_rank"] = g.max_nonterminal_rank
        out["normal_form"] = _normal_form(g)
    return out


def _describe_lines(d, prefix=""):
    if not d["ok"]:
        kind = d.get("kind", "grammar").upper()
        if d.get("overflow"):
            return [f"{prefix}{kind}, size overflow: {d['error']}"]
        return [f"{prefix}error: {d['error']}"]
    if d["kind"] == "slp":
        head = f"SLP, size {d['size']}, |val({d['start']})| = {d['length']}"
    else:
        head = f"TSLP, size {d['size']}, tree size {d['tree_size']}"
    return [
        prefix + head,
        f"{prefix}rules: {d['rules']}, normal form: {d['normal_form']}",
    ]


def _batch(fn, paths, jobs):
    if jobs > 1 and len(paths) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, paths))
    return [fn(p) for p in paths]


def cmd_validate(args):
    results = _batch(lambda p: describe(p, args.kind), args.paths, args.jobs)
    lines = []
    for d in results:
        prefix = f"{d['path']}: " if len(results) > 1 else ""
        lines += _describe_lines(d, prefix)
    code = EXIT_OK if all(d["ok"] for d in results) else EXIT_INVALID
    data = results[0] if len(results) == 1 else results
    return Report(lines, data, code)


def stats(path, kind=None):
    d = describe(path, kind)
    if not d["ok"]:
        return d
    kind, g = load(path, d["kind"])
    if kind == "slp":
        if g.lengths[g.start] >= 2:
            h = binarize_slp(g, keep=[g.start])
            d["binary_size"] = h.size
            d["binary_rules"] = len(h.rules)
        return d
    ng = normalize(g)
    d["normalized_size"] = ng.tslp.size
    d["normalized_rules"] = len(ng.rules)
    for f in "abcd":
        d[f"n_{f}"] = len(getattr(ng, "n_" + f))
    ix = TreeIndex(ng)
    d["spine_rules"] = len(ix.spine.h.rules)
    d["side_steps"] = len(ix.spine.m)
    return d


def cmd_stats(args):
    results = _batch(lambda p: stats(p, args.kind), args.paths, args.jobs)
    lines = []
    for d in results:
        prefix = f"{d['path']}: " if len(results) > 1 else ""
        if not d["ok"]:
            lines += _describe_lines(d, prefix)
            continue
        for key, value in d.items():
            if key not in ("path", "ok"):
                lines.append(f"{prefix}{key}: {value}")
    code = EXIT_OK if all(d["ok"] for d in results) else EXIT_INVALID
    data = results[0] if len(results) == 1 else results
    return Report(lines, data, code)


# ------------------------------------------------------------------ decompress / normalize


def cmd_decompress(args):
    guard = args.max_nodes if args.max_nodes is not None else default_guard()
    kind, g = load(args.path, args.kind)
    if kind == "slp":
        text = join_symbols(eval_slp(g, g.start, guard))
    else:
        text = eval_tslp(g, guard=guard).to_text()
    return Report([text], {"kind": kind, "value": text})


def cmd_normalize(args):
    kind, g = load(args.path, args.kind)
    if kind == "slp":
        out = binarize_slp(g, keep=[g.start])
        text = serialize_slp(out)
        size = out.size
    else:
        out = normalize(g).tslp
        text = serialize_tslp(out)
        size = out.size
    data = {"kind": kind, "size_in": g.size, "size_out": size, "grammar": text}
    return Report([text.rstrip("\n")], data)


# ------------------------------------------------------------------ navigation


def _tree_index(path, kind, eq):
    kind, g = load(path, kind)
    if kind != "tslp":
        raise CliError("navigation needs a TSLP")
    ng = normalize(g)
    return EqIndex(ng) if eq else TreeIndex(ng)


def _root(index):
    if isinstance(index, EqIndex):
        return EqCursor.root(index)
    return TreeCursor.root(index)


def split_script(text):
    """Commands separated by newlines, ';' or '/'; '#' starts a comment."""
    out = []
    for raw in text.splitlines():
        line = strip_comment(raw)
        for part in re.split(r"[;/]", line):
            part = part.strip()
            if part:
                out.append(part)
    return out


def run_nav(index, commands):
    """Execute navigation commands; one response string per command."""
    eq = isinstance(index, EqIndex)
    c = _root(index)
    marks = {}
    out = []
    for cmd in commands:
        words = cmd.split()
        op, rest = words[0], words[1:]
        try:
            if op == "root" and not rest:
                c = _root(index)
                out.append("ok")
            elif op == "child" and len(rest) == 1:
                i = int(rest[0])
                out.append("ok" if c.child(i) else "undefined")
            elif op == "parent" and not rest:
                out.append("ok" if c.parent() else "undefined")
            elif op == "label" and not rest:
                out.append(c.label())
            elif op == "rank" and not rest:
                out.append(str(c.rank()))
            elif op == "mark" and len(rest) == 1:
                marks[rest[0]] = c.copy()
                out.append("ok")
            elif op == "goto" and len(rest) == 1:
                if rest[0] not in marks:
                    out.append(f"error: no mark named {rest[0]!r}")
                else:
                    c = marks[rest[0]].copy()
                    out.append("ok")
            elif op == "eq" and len(rest) == 2:
                if not eq:
                    out.append("error: eq needs --eq")
                elif rest[0] not in marks or rest[1] not in marks:
                    missing = rest[0] if rest[0] not in marks else rest[1]
                    out.append(f"error: no mark named {missing!r}")
                else:
                    same = subtree_eq(marks[rest[0]], marks[rest[1]])
                    out.append("true" if same else "false")
            elif op == "cursor" and not rest:
                out.append(" ".join(f"({a},{d},{t})" for a, d, t in c.triples()))
            else:
                out.append(f"error: cannot parse {cmd!r}")
        except ValueError:
            out.append(f"error: cannot parse {cmd!r}")
    return out


def cmd_nav(args):
    index = _tree_index(args.path, args.kind, args.eq)
    text = read_text(args.script) if args.script else sys.stdin.read()
    commands = split_script(text)
    responses = run_nav(index, commands)
    data = [{"command": c, "response": r} for c, r in zip(commands, responses)]
    return Report(responses, data)


def follow(index, address):
    """A cursor at ``address``: moves from the root such as '2 1',
    'child 2 / child 1' or '2.1'. Raises CliError if a move is undefined."""
    c = _root(index)
    for part in split_script(address.replace(".", " ")):
        words = part.split()
        if words[0] == "root" and len(words) == 1:
            c = _root(index)
            continue
        if words[0] == "parent" and len(words) == 1:
            moves = [0]
        elif words[0] == "child" and len(words) == 2:
            moves = [words[1]]
        else:
            moves = words
        for m in moves:
            try:
                i = int(m)
            except ValueError:
                raise CliError(f"bad move {m!r} in address {address!r}") from None
            ok = c.parent() if i == 0 else c.child(i)
            if not ok:
                raise CliError(f"address {address!r} leaves the tree")
    return c


def cmd_eq(args):
    index = _tree_index(args.path, args.kind, True)
    lines = []
    data = {}
    if args.stats:
        red = index.reduced
        ng = red.ng
        if red.already_reduced:
            lines.append("reduced: yes")
        else:
            merged = ", ".join(f"{a}->{b}" for a, b in red.merged.items())
            lines.append(f"reduced: no (merged {merged})")
        rows = {}
        for a, sp in index.splits.items():
            r = ng.rules[sp.r].to_text()
            rows[a] = {"s": sp.s, "prime": sp.prime, "r_name": sp.r, "r": r}
            lines.append(f"{a}: s={sp.s} {a}'={sp.prime} r={r}")
        data["already_reduced"] = red.already_reduced
        data["merged"] = dict(red.merged)
        data["splits"] = rows
    if args.a is not None or args.b is not None:
        if args.a is None or args.b is None:
            raise CliError("eq needs two addresses")
        same = subtree_eq(follow(index, args.a), follow(index, args.b))
        lines.append("equal" if same else "not-equal")
        data["equal"] = same
    if not lines:
        raise CliError("nothing to do: give two addresses or --stats")
    return Report(lines, data)


# ------------------------------------------------------------------ string SLPs


def _slp(path, kind):
    kind, g = load(path, kind or "slp")
    if kind != "slp":
        raise CliError("this command needs an SLP")
    return g


def _symbol(g, x):
    x = x or g.start
    if x not in g.rules:
        raise CliError(f"{x!r} is not a nonterminal")
    return x


def cmd_slp(args):
    g = _slp(args.path, args.kind)
    x = _symbol(g, args.symbol)
    if args.slp_cmd == "at":
        s = symbol_at(g, x, args.i)
        return Report([s], {"position": args.i, "symbol": s})
    if args.slp_cmd == "slice":
        sub = substring_slp(g, x, args.i, args.j)
        if args.expand:
            guard = default_guard()
            text = join_symbols(eval_slp(sub, sub.start, guard))
        else:
            text = serialize_slp(sub).rstrip("\n")
        return Report([text], {"i": args.i, "j": args.j, "value": text})
    if args.slp_cmd == "lcp":
        g2 = _slp(args.other, args.kind) if args.other else g
        y = _symbol(g2, args.y)
        n = lcp(g, x, g2, y, FingerprintScheme(args.seed))
        return Report([str(n)], {"lcp": n})
    # walk
    limit = args.limit if args.limit is not None else default_guard()
    if g.lengths[x] < 2:
        syms = list(eval_slp(g, x))
    else:
        walker = SlpWalker(binarize_slp(g, keep=[x]))
        if args.reverse:
            c = StringCursor.end(walker, x)
            step = c.left
        else:
            c = StringCursor.begin(walker, x)
            step = c.right
        syms = [c.symbol()]
        while len(syms) < limit and step():
            syms.append(c.symbol())
    text = join_symbols(syms[:limit])
    return Report([text], {"symbols": syms[:limit]})


def cmd_tries(args):
    kind, g = load(args.path, args.kind)
    if kind == "slp":
        h = binarize_slp(g, keep=[g.start])
    else:
        h = TreeIndex(normalize(g)).spine.h
    tl, tr = build_tries(h)
    if args.dot:
        text = tl.to_dot() + "\n" + tr.to_dot()
        return Report([text], {"dot": text})
    lines = []
    data = {}
    for name, forest in (("L", tl), ("R", tr)):
        strings = {a: forest.descent_string(a) for a in h.rules}
        edges = sorted(forest.edges())
        for a, s in strings.items():
            lines.append(f"{name}({a}) = {join_symbols(s)}")
        lines.append(f"T_{name} edges: " + " ".join(f"{p}->{c}" for p, c in edges))
        data[name] = {"strings": strings, "edges": edges}
    return Report(lines, data)


# ------------------------------------------------------------------ trees, generators, bench


def cmd_encode(args):
    text = read_text(args.path)
    t = parse_unranked(text)
    if args.decode:
        out = fcns_decode(t) if args.mode == "fcns" else bin_decode(t)
    else:
        out = fcns_encode(t) if args.mode == "fcns" else bin_encode(t)
    s = out.to_text()
    data = {"mode": args.mode, "size_in": t.size(), "size_out": out.size(), "tree": s}
    return Report([s], data)


def cmd_gen(args):
    if args.mode == "general":
        g = random_tslp(args.seed, max_size=args.max_size)
    elif args.mode == "slp":
        g = random_slp(args.seed)
        text = serialize_slp(g)
        return Report([text.rstrip("\n")], {"grammar": text})
    else:
        g = generate_tslp(args.mode, args.k, args.seed)
    text = serialize_tslp(g)
    return Report([text.rstrip("\n")], {"grammar": text, "tree_size": g.tree_size})


def bench_file(path, args):
    kind, g = load(path, args.kind)
    if kind == "slp" or args.string:
        if kind == "slp":
            h = binarize_slp(g, keep=[g.start])
            walker = SlpWalker(h)
            x = g.start
        else:
            ix = TreeIndex(normalize(g))
            walker, x = ix.walker, ix.spine.h.start
            if x is None:
                raise CliError("the start rule has no spine to walk")
        r = bench_string(walker, x, args.steps, args.walk, args.seed)
    else:
        r = bench_tree(normalize(g), args.steps, args.walk, args.seed, eq=args.eq)
    r["path"] = path
    return r


def cmd_bench(args):
    if args.steps < 0:
        raise CliError("--steps must be non-negative")
    results = _batch(lambda p: bench_file(p, args), args.paths, args.jobs)
    lines = []
    for r in results:
        prefix = f"{r['path']}: " if len(results) > 1 else ""
        for key, value in r.items():
            if key != "path":
                if isinstance(value, float):
                    value = f"{value:.6g}"
                lines.append(f"{prefix}{key}: {value}")
    return Report(lines, results[0] if len(results) == 1 else results)


# ------------------------------------------------------------------ parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report")
    grammar = argparse.ArgumentParser(add_help=False)
    grammar.add_argument(
        "--kind", choices=["slp", "tslp"], help="grammar kind (default: detect)"
    )
    jobs = argparse.ArgumentParser(add_help=False)
    jobs.add_argument("--jobs", type=int, default=1, help="worker threads")

    p = argparse.ArgumentParser(
        prog="gct", description="Grammar-compressed trees and strings."
    )
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("validate", parents=[common, grammar, jobs], help="check grammar files")
    s.add_argument("paths", nargs="+")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("stats", parents=[common, grammar, jobs], help="grammar statistics")
    s.add_argument("paths", nargs="+")
    s.set_defaults(fn=cmd_stats)

    s = sub.add_parser("decompress", parents=[common, grammar], help="expand a grammar")
    s.add_argument("path")
    s.add_argument("--max-nodes", type=int, help="expansion guard (env GCT_MAX_NODES)")
    s.set_defaults(fn=cmd_decompress)

    s = sub.add_parser("normalize", parents=[common, grammar], help="normal form")
    s.add_argument("path")
    s.set_defaults(fn=cmd_normalize)

    s = sub.add_parser("nav", parents=[common, grammar], help="run a navigation script")
    s.add_argument("path")
    s.add_argument("--script", help="script file (default: stdin)")
    s.add_argument("--eq", action="store_true", help="enable subtree equality")
    s.set_defaults(fn=cmd_nav)

    s = sub.add_parser("eq", parents=[common, grammar], help="subtree equality")
    s.add_argument("path")
    s.add_argument("a", nargs="?", help="first node address, e.g. '1 2'")
    s.add_argument("b", nargs="?", help="second node address")
    s.add_argument("--stats", action="store_true", help="print s(A), A' and r_A")
    s.set_defaults(fn=cmd_eq)

    s = sub.add_parser("slp", help="queries on string SLPs")
    slp = s.add_subparsers(dest="slp_cmd", required=True)
    for name in ("at", "slice", "lcp", "walk"):
        q = slp.add_parser(name, parents=[common, grammar])
        q.add_argument("path")
        q.add_argument("--symbol", help="nonterminal to query (default: start)")
        q.set_defaults(fn=cmd_slp)
        if name == "at":
            q.add_argument("i", type=int)
        elif name == "slice":
            q.add_argument("i", type=int)
            q.add_argument("j", type=int)
            q.add_argument("--expand", action="store_true", help="print the string")
        elif name == "lcp":
            q.add_argument("other", nargs="?", help="second SLP (default: same)")
            q.add_argument("--y", help="nonterminal of the second SLP")
            q.add_argument("--seed", type=int, default=0, help="fingerprint seed")
        else:
            q.add_argument("--reverse", action="store_true")
            q.add_argument("--limit", type=int)

    s = sub.add_parser("encode", parents=[common], help="binary tree encodings")
    s.add_argument("path", nargs="?", default="-")
    s.add_argument("--mode", choices=["fcns", "bin"], required=True)
    s.add_argument("--decode", action="store_true")
    s.set_defaults(fn=cmd_encode)

    s = sub.add_parser("gen", parents=[common], help="generate grammars")
    s.add_argument(
        "--mode",
        choices=["chain", "balanced", "random", "general", "slp"],
        default="chain",
    )
    s.add_argument("-k", type=int, default=10, help="tree size in [2^k, 2^(k+1)]")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-size", type=int, default=10**4, help="for --mode general")
    s.set_defaults(fn=cmd_gen)

    s = sub.add_parser("bench", parents=[common, grammar, jobs], help="instrumented walks")
    s.add_argument("paths", nargs="+")
    s.add_argument("--steps", type=int, default=10**5)
    s.add_argument("--walk", choices=["random", "dfs"], default="random")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--eq", action="store_true", help="EqCursor plus subtree_eq per step")
    s.add_argument("--string", action="store_true", help="walk the spine string")
    s.set_defaults(fn=cmd_bench)

    s = sub.add_parser("tries", parents=[common, grammar], help="L/R tries")
    s.add_argument("path")
    s.add_argument("--dot", action="store_true", help="emit DOT graphs")
    s.set_defaults(fn=cmd_tries)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        report = args.fn(args)
    except GuardExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        if getattr(args, "json", False):
            print(json.dumps({"error": str(e), "size": e.size, "guard": e.guard}))
        return EXIT_GUARD
    except (
        CliError,
        GrammarError,
        FingerprintContradiction,
        ValueError,
        IndexError,
        OSError,
        UnicodeDecodeError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    if args.json:
        print(json.dumps(report.data, indent=2, default=list))
    else:
        for line in report.lines:
            print(line)
    return report.code


if __name__ == "__main__":
    sys.exit(main())
