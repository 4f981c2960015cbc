"""String and tree straight-line programs: data model, parsing, evaluation."""

import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import cached_property

from .errors import (
    CycleError,
    GrammarError,
    GrammarSyntaxError,
    GuardExceeded,
    LengthOverflow,
    RankError,
)
from .tree import IDENT, Tree, is_param, param_index, parse_term, tokenize

MAX_WORD = 2**63
DEFAULT_GUARD = 10**6


@dataclass(frozen=True)
class Symbol:
    id: int
    name: str
    kind: str  # "terminal" | "nonterminal" | "parameter"
    rank: int


def topological_order(heads, deps):
    """Return ``heads`` ordered so that dependencies come first.

    ``deps(A)`` yields the nonterminals occurring in rhs(A). Raises
    CycleError with a witness cycle.
    """
    state = {}
    order = []
    for root in heads:
        if root in state:
            continue
        state[root] = 1
        path = [root]
        iters = [iter(deps(root))]
        while iters:
            try:
                nxt = next(iters[-1])
            except StopIteration:
                iters.pop()
                done = path.pop()
                state[done] = 2
                order.append(done)
                continue
            st = state.get(nxt)
            if st == 1:
                i = path.index(nxt)
                raise CycleError(path[i:] + [nxt])
            if st is None:
                state[nxt] = 1
                path.append(nxt)
                iters.append(iter(deps(nxt)))
    return order


@contextmanager
def deep_recursion(limit=20000):
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, limit))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


# ---------------------------------------------------------------- SLPs


@dataclass(frozen=True, eq=False)
class Slp:
    """A straight-line program. ``rules`` keeps declaration order."""

    rules: dict
    terminals: frozenset
    start: str = None

    def __post_init__(self):
        for head, rhs in self.rules.items():
            if head in self.terminals:
                raise GrammarError(f"{head} is both a terminal and a rule head")
            for sym in rhs:
                if sym not in self.rules and sym not in self.terminals:
                    raise GrammarError(f"undeclared symbol {sym!r} in rule {head}")
        if self.start is not None and self.start not in self.rules:
            raise GrammarError(f"start symbol {self.start} has no rule")
        self.lengths  # cycle and overflow checks

    @classmethod
    def from_rules(cls, rules, start=None, terminals=None):
        rules = {h: tuple(r) for h, r in rules.items()}
        if terminals is None:
            terminals = {s for rhs in rules.values() for s in rhs if s not in rules}
        if start is None and rules:
            start = next(iter(rules))
        return cls(rules, frozenset(terminals), start)

    @property
    def nonterminals(self):
        return list(self.rules)

    @property
    def size(self):
        return sum(len(r) for r in self.rules.values())

    @cached_property
    def order(self):
        """Nonterminals bottom-up (every rhs symbol before its head)."""
        rules = self.rules
        return topological_order(
            rules, lambda a: (s for s in rules[a] if s in rules)
        )

    @cached_property
    def lengths(self):
        """|val(A)| for every nonterminal and terminal."""
        out = dict.fromkeys(self.terminals, 1)
        for a in self.order:
            n = sum(out[s] for s in self.rules[a])
            if n >= MAX_WORD:
                raise LengthOverflow(a)
            out[a] = n
        return out

    def symbols(self):
        table = []
        for name in self.rules:
            table.append(Symbol(len(table), name, "nonterminal", 0))
        for name in sorted(self.terminals):
            table.append(Symbol(len(table), name, "terminal", 0))
        return table

    def __eq__(self, other):
        if not isinstance(other, Slp):
            return NotImplemented
        return (
            self.rules == other.rules
            and self.terminals == other.terminals
            and self.start == other.start
        )

    __hash__ = None


def strip_comment(line):
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_slp(text):
    rules = {}
    declared = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = strip_comment(raw)
        if not line.strip():
            continue
        tokens = line.split()
        if tokens[0] == "terminals" and "->" not in tokens:
            bad = [t for t in tokens[1:] if not IDENT.fullmatch(t)]
            if bad:
                raise GrammarSyntaxError(f"bad terminal name {bad[0]!r}", lineno)
            declared = set(declared or ()) | set(tokens[1:])
            continue
        if len(tokens) < 2 or tokens[1] != "->":
            raise GrammarSyntaxError("expected 'A -> s1 ... sn'", lineno, 1)
        head = tokens[0]
        for tok in tokens[:1] + tokens[2:]:
            if not IDENT.fullmatch(tok):
                col = line.find(tok) + 1
                raise GrammarSyntaxError(f"bad identifier {tok!r}", lineno, col)
        if head in rules:
            raise GrammarSyntaxError(f"duplicate rule for {head}", lineno, 1)
        rules[head] = tuple(tokens[2:])
    if not rules:
        raise GrammarSyntaxError("no rules", 1)
    if declared is not None:
        clash = declared & rules.keys()
        if clash:
            raise GrammarError(f"declared terminal has a rule: {sorted(clash)[0]}")
        used = {s for rhs in rules.values() for s in rhs if s not in rules}
        missing = used - declared
        if missing:
            raise GrammarError(f"undeclared symbol {sorted(missing)[0]!r}")
    return Slp.from_rules(rules, terminals=declared)


def serialize_slp(g):
    lines = []
    used = {s for rhs in g.rules.values() for s in rhs}
    if g.terminals - used:
        lines.append("terminals " + " ".join(sorted(g.terminals)))
    order = list(g.rules)
    if g.start is not None and order[0] != g.start:
        order.remove(g.start)
        order.insert(0, g.start)
    for head in order:
        lines.append(" ".join([head, "->", *g.rules[head]]).rstrip())
    return "\n".join(lines) + "\n"


def eval_slp(g, x, guard=DEFAULT_GUARD):
    """Expand val(x) into a tuple of terminal names."""
    n = g.lengths[x]
    if n > guard:
        raise GuardExceeded(n, guard)
    out = []
    stack = [x]
    rules = g.rules
    while stack:
        s = stack.pop()
        rhs = rules.get(s)
        if rhs is None:
            out.append(s)
        else:
            stack.extend(reversed(rhs))
    return tuple(out)


# ---------------------------------------------------------------- TSLPs


@dataclass(frozen=True, eq=False)
class Tslp:
    """A tree straight-line program.

    ``rules`` maps each nonterminal to its right-hand side tree, ``ranks``
    gives the rank of every nonterminal and terminal.
    """

    start: str
    rules: dict
    ranks: dict = field(repr=False)

    @classmethod
    def from_rules(cls, rules, nt_ranks, start=None, terminal_ranks=None):
        """Validate and infer terminal ranks."""
        if not rules:
            raise GrammarError("no rules")
        if start is None:
            start = next(iter(rules))
        if start not in rules:
            raise GrammarError(f"start symbol {start} has no rule")
        ranks = dict(terminal_ranks or {})
        for a in rules:
            if is_param(a):
                raise GrammarError(f"{a} is reserved for parameters")
            ranks[a] = nt_ranks[a]
        for a, rhs in rules.items():
            params = []
            for node, _ in rhs.nodes():
                lab = node.label
                if is_param(lab):
                    if node.children:
                        raise RankError(f"parameter {lab} has children in rule {a}")
                    params.append(lab)
                    continue
                k = len(node.children)
                known = ranks.get(lab)
                if known is None:
                    ranks[lab] = k
                elif known != k:
                    kind = "nonterminal" if lab in rules else "terminal"
                    raise RankError(
                        f"{kind} {lab} has rank {known} but occurs with "
                        f"{k} children in rule {a}"
                    )
            if len(params) != len(set(params)):
                raise RankError(f"rule {a} is not linear")
            want = {f"x{i}" for i in range(1, ranks[a] + 1)}
            if set(params) != want:
                raise RankError(
                    f"rule {a} of rank {ranks[a]} must use exactly "
                    f"{sorted(want) or 'no parameters'}, found {sorted(params)}"
                )
        if ranks[start] != 0:
            raise RankError(f"start symbol {start} must have rank 0")
        g = cls(start, dict(rules), ranks)
        g.sizes  # cycle and overflow checks
        return g

    @property
    def nonterminals(self):
        return list(self.rules)

    @cached_property
    def terminals(self):
        return frozenset(s for s in self.ranks if s not in self.rules)

    def rank(self, sym):
        return self.ranks[sym]

    @property
    def size(self):
        """Total number of non-parameter nodes over all right-hand sides."""
        return sum(
            1
            for rhs in self.rules.values()
            for node, _ in rhs.nodes()
            if not is_param(node.label)
        )

    @property
    def max_nonterminal_rank(self):
        return max(self.ranks[a] for a in self.rules)

    def is_monadic(self):
        return self.max_nonterminal_rank <= 1

    @cached_property
    def order(self):
        rules = self.rules

        def deps(a):
            return (n.label for n, _ in rules[a].nodes() if n.label in rules)

        return topological_order(rules, deps)

    @cached_property
    def sizes(self):
        """Number of non-parameter nodes of val(A) for every nonterminal."""
        out = {}
        for a in self.order:
            n = self.term_size(self.rules[a], out)
            if n >= MAX_WORD:
                raise LengthOverflow(a)
            out[a] = n
        return out

    def term_size(self, t, sizes=None):
        sizes = self.sizes if sizes is None else sizes
        total = 0
        for node, _ in t.nodes():
            lab = node.label
            if lab in sizes:
                total += sizes[lab]
            elif not is_param(lab):
                total += 1
        return total

    @property
    def tree_size(self):
        return self.sizes[self.start]

    def with_start(self, start):
        if self.ranks.get(start) != 0 or start not in self.rules:
            raise GrammarError(f"{start} is not a rank-0 nonterminal")
        return Tslp(start, self.rules, self.ranks)

    def symbols(self):
        table = []
        for name in self.rules:
            table.append(Symbol(len(table), name, "nonterminal", self.ranks[name]))
        for name in sorted(self.terminals):
            table.append(Symbol(len(table), name, "terminal", self.ranks[name]))
        for i in range(1, self.max_nonterminal_rank + 1):
            table.append(Symbol(len(table), f"x{i}", "parameter", 0))
        return table

    def __eq__(self, other):
        if not isinstance(other, Tslp):
            return NotImplemented
        return (
            self.start == other.start
            and self.ranks == other.ranks
            and list(self.rules) == list(other.rules)
            and all(self.rules[a] == other.rules[a] for a in self.rules)
        )

    __hash__ = None


def parse_tslp(text):
    start = None
    rules = {}
    nt_ranks = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = strip_comment(raw)
        if not line.strip():
            continue
        stripped = line.strip()
        words = stripped.split()
        if words[0] == "start" and "->" not in stripped:
            if len(words) != 2 or not IDENT.fullmatch(words[1]):
                raise GrammarSyntaxError("expected 'start NAME'", lineno, 1)
            if start is not None:
                raise GrammarSyntaxError("duplicate start line", lineno, 1)
            start = words[1]
            continue
        arrow = line.find("->")
        if arrow < 0:
            raise GrammarSyntaxError("expected 'A(x1,...,xk) -> term'", lineno, 1)
        head_tokens = tokenize(line[:arrow])
        if not head_tokens or not head_tokens[0][1]:
            raise GrammarSyntaxError("missing rule head", lineno, 1)
        head = head_tokens[0][0]
        if is_param(head):
            raise GrammarSyntaxError(f"{head} is reserved for parameters", lineno, 1)
        params = [t for t, ident, _ in head_tokens[1:] if ident]
        expect = [f"x{i}" for i in range(1, len(params) + 1)]
        if params != expect:
            raise GrammarSyntaxError(
                f"rule head parameters must be {', '.join(expect) or 'empty'}",
                lineno,
                1,
            )
        shape = "".join(t for t, ident, _ in head_tokens[1:] if not ident)
        if shape not in ("", "(" + "," * (len(params) - 1) + ")") or (
            params == [] and shape
        ):
            raise GrammarSyntaxError("malformed rule head", lineno, 1)
        if head in rules:
            raise GrammarSyntaxError(f"duplicate rule for {head}", lineno, 1)
        rules[head] = parse_term(line[arrow + 2 :], lineno, arrow + 2)
        nt_ranks[head] = len(params)
    if not rules:
        raise GrammarSyntaxError("no rules", 1)
    return Tslp.from_rules(rules, nt_ranks, start)


def _rule_head(a, rank):
    if rank == 0:
        return a
    return a + "(" + ",".join(f"x{i}" for i in range(1, rank + 1)) + ")"


def serialize_tslp(g):
    lines = [f"start {g.start}"]
    for a, rhs in g.rules.items():
        lines.append(f"{_rule_head(a, g.ranks[a])} -> {rhs.to_text()}")
    return "\n".join(lines) + "\n"


def eval_tslp(g, t=None, guard=DEFAULT_GUARD):
    """Decompress ``t`` (default: the start symbol) into a Tree.

    The size is computed first; nothing is expanded beyond ``guard`` nodes.
    Rank-0 nonterminals are expanded once and shared.
    """
    if t is None:
        t = Tree(g.start)
    n = g.term_size(t)
    if n > guard:
        raise GuardExceeded(n, guard)
    rules = g.rules
    memo = {}

    def expand(term, env):
        lab = term.label
        if not term.children:
            if lab in env:
                return env[lab]
            if lab in memo:
                return memo[lab]
        kids = [expand(c, env) for c in term.children]
        rhs = rules.get(lab)
        if rhs is None:
            return term if not kids and not env else Tree(lab, kids)
        res = expand(rhs, {f"x{i}": k for i, k in enumerate(kids, 1)})
        if not kids:
            memo[lab] = res
        return res

    with deep_recursion():
        return expand(t, {})


def canonical_text(g):
    """Serialization with nonterminals renamed by first use from the start.

    Two grammars are equal up to renaming iff their canonical texts agree.
    Unreachable rules are appended in declaration order.
    """
    order = [g.start]
    done = {g.start}
    i = 0
    while i < len(order):
        for node, _ in g.rules[order[i]].nodes():
            if node.label in g.rules and node.label not in done:
                done.add(node.label)
                order.append(node.label)
        i += 1
    order += [a for a in g.rules if a not in done]
    names = {a: f"N{k}" for k, a in enumerate(order)}
    lines = []
    for a in order:
        renamed = _rename(g.rules[a], names)
        lines.append(f"{_rule_head(names[a], g.ranks[a])} -> {renamed.to_text()}")
    return "\n".join(lines)


def _rename(t, names):
    return Tree(names.get(t.label, t.label), [_rename(c, names) for c in t.children])


__all__ = [
    "DEFAULT_GUARD",
    "MAX_WORD",
    "Slp",
    "Symbol",
    "Tslp",
    "canonical_text",
    "eval_slp",
    "eval_tslp",
    "param_index",
    "parse_slp",
    "parse_tslp",
    "serialize_slp",
    "serialize_tslp",
    "topological_order",
]
