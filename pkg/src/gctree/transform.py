"""Grammar normalizations: binary SLPs, monadic TSLPs and the forms a-d.

Forms of a normalized monadic TSLP (``x`` is the parameter ``x1``)::

    a   A -> B(C)                 rank 0, B rank 1, C rank 0
    b   A(x) -> B(C(x))           B, C rank 1
    c   A -> a                    a a terminal constant
    d   A(x) -> f(A1,..,x,..,An)  f a terminal, all Ai rank-0 nonterminals
"""

from dataclasses import dataclass
from functools import cached_property

from .errors import GrammarError
from .grammar import Slp, Tslp
from .tree import Tree, is_param

X = "x1"


class FreshNames:
    def __init__(self, used):
        self.used = set(used)
        self.counter = {}

    def __call__(self, base):
        n = self.counter.get(base, 1)
        while True:
            n += 1
            name = f"{base}_{n}"
            if name not in self.used:
                self.counter[base] = n
                self.used.add(name)
                return name


# ---------------------------------------------------------------- SLP


def binarize_slp(g, keep=None):
    """Rewrite ``g`` so that every right-hand side has length exactly two.

    Nonterminals deriving fewer than two symbols are inlined and dropped;
    a nonterminal in ``keep`` (default: those not used by any other rule)
    may not be dropped. Long right-hand sides are cut into chains of fresh
    nonterminals, aliases ``A -> B`` copy the (binary) rule of ``B``.
    """
    lengths = g.lengths
    if keep is None:
        used = {s for rhs in g.rules.values() for s in rhs}
        keep = [a for a in g.rules if a not in used]
    short = [a for a in keep if lengths[a] < 2]
    if short:
        raise GrammarError(
            f"{short[0]} derives a string of length {lengths[short[0]]}; "
            "binary form needs length >= 2"
        )
    fresh = FreshNames(set(g.rules) | g.terminals)
    inline = {}
    out = {}
    extra = {}
    for a in g.order:
        rhs = []
        for s in g.rules[a]:
            rhs.extend(inline.get(s, (s,)))
        if lengths[a] < 2:
            inline[a] = tuple(rhs)
            continue
        if len(rhs) == 1:
            rhs = list(out[rhs[0]])
        if len(rhs) > 2:
            chain = []
            prev = a
            for i in range(1, len(rhs) - 1):
                name = fresh(a)
                chain.append((prev, (rhs[i - 1], name)))
                prev = name
            chain.append((prev, (rhs[-2], rhs[-1])))
            out[a] = chain[0][1]
            extra[a] = chain[1:]
        else:
            out[a] = tuple(rhs)
    rules = {}
    for a in g.rules:
        if a in out:
            rules[a] = out[a]
            for name, rhs in extra.get(a, ()):
                rules[name] = rhs
    terminals = {s for rhs in rules.values() for s in rhs if s not in rules}
    start = g.start if g.start in rules else None
    return Slp.from_rules(rules, start=start, terminals=terminals)


# ---------------------------------------------------------------- monadization


class _Ground:
    __slots__ = ("tree",)

    def __init__(self, tree):
        self.tree = tree


class _Param:
    """Context ``ctx`` (or identity) applied to parameter ``index``."""

    __slots__ = ("index", "ctx")

    def __init__(self, index, ctx):
        self.index = index
        self.ctx = ctx


class _Branch:
    """Context ``ctx`` above a terminal ``label`` whose children split params."""

    __slots__ = ("ctx", "label", "parts")

    def __init__(self, ctx, label, parts):
        self.ctx = ctx
        self.label = label
        self.parts = parts


def _compose(outer, inner):
    if outer is None:
        return inner
    if inner is None:
        return outer
    return outer.substitute({X: inner})


def _apply(ctx, tree):
    return tree if ctx is None else ctx.substitute({X: tree})


def _wrap(ctx, part):
    if isinstance(part, _Ground):
        return _Ground(_apply(ctx, part.tree))
    if isinstance(part, _Param):
        return _Param(part.index, _compose(ctx, part.ctx))
    return _Branch(_compose(ctx, part.ctx), part.label, part.parts)


def _branch(label, parts):
    holes = [i for i, p in enumerate(parts) if not isinstance(p, _Ground)]
    if not holes:
        return _Ground(Tree(label, [p.tree for p in parts]))
    if len(holes) == 1:
        j = holes[0]
        ctx = Tree(
            label, [Tree(X) if i == j else p.tree for i, p in enumerate(parts)]
        )
        return _wrap(ctx, parts[j])
    return _Branch(None, label, list(parts))


def _plug(skel, args):
    """Substitute the argument parts into a skeleton's parameters."""
    if isinstance(skel, _Param):
        return _wrap(skel.ctx, args[skel.index - 1])
    parts = [p if isinstance(p, _Ground) else _plug(p, args) for p in skel.parts]
    return _wrap(skel.ctx, _branch(skel.label, parts))


def monadize(g):
    """Return an equivalent TSLP whose nonterminals have rank at most one.

    Every nonterminal of rank k >= 2 is replaced by a skeleton: the tree of
    branching terminal nodes that separate its parameters, with rank-1
    nonterminals for the unary contexts between them and rank-0 nonterminals
    for the subtrees hanging off. Occurrences are then expanded into their
    skeleton, whose size is bounded by the number of branching nodes times
    the terminal rank.
    """
    if g.is_monadic():
        return g
    ranks = g.ranks
    fresh = FreshNames(set(ranks) | {f"x{i}" for i in range(1, 10)})
    rules = {}
    nt_ranks = {}
    skels = {}
    hoisted = {}

    def has_param(t):
        return any(is_param(n.label) for n, _ in t.nodes())

    def ground(t):
        lab = t.label
        kids = [ground(c) for c in t.children]
        if lab in skels:
            return _plug(skels[lab], [_Ground(k) for k in kids]).tree
        return Tree(lab, kids)

    def skeleton(t):
        lab = t.label
        if is_param(lab):
            return _Param(int(lab[1:]), None)
        parts = [skeleton(c) if has_param(c) else _Ground(ground(c)) for c in t.children]
        if lab in skels:
            return _plug(skels[lab], parts)
        if lab in g.rules:  # rank-1 nonterminal
            return _wrap(Tree(lab, [Tree(X)]), parts[0])
        return _branch(lab, parts)

    def hoist_tree(t, rank):
        if rank == 0 and not t.children:
            return t
        if (
            rank == 1
            and len(t.children) == 1
            and t.children[0].label == X
            and nt_ranks.get(t.label, ranks.get(t.label)) == 1
            and (t.label in rules or t.label in g.rules)
        ):
            return t
        key = (rank, t.to_text())
        name = hoisted.get(key)
        if name is None:
            name = fresh("M")
            hoisted[key] = name
            rules[name] = t
            nt_ranks[name] = rank
        return Tree(name, [Tree(X)] if rank else [])

    def hoist(part):
        if isinstance(part, _Ground):
            return _Ground(hoist_tree(part.tree, 0))
        ctx = None if part.ctx is None else hoist_tree(part.ctx, 1)
        if isinstance(part, _Param):
            return _Param(part.index, ctx)
        return _Branch(ctx, part.label, [hoist(p) for p in part.parts])

    for a in g.order:
        k = ranks[a]
        rhs = g.rules[a]
        if k >= 2:
            skels[a] = hoist(skeleton(rhs))
        elif k == 1:
            s = skeleton(rhs)
            rules[a] = Tree(X) if s.ctx is None else s.ctx
            nt_ranks[a] = 1
        else:
            rules[a] = ground(rhs)
            nt_ranks[a] = 0
    ordered = {a: rules[a] for a in g.rules if a in rules}
    ordered.update((a, t) for a, t in rules.items() if a not in ordered)
    terminal_ranks = {s: r for s, r in ranks.items() if s not in g.rules}
    return Tslp.from_rules(ordered, nt_ranks, g.start, terminal_ranks)


# ---------------------------------------------------------------- normal forms


@dataclass(frozen=True, eq=False)
class NormalizedTslp:
    """A monadic TSLP in forms a-d with its classification."""

    tslp: Tslp
    cls: dict

    @property
    def start(self):
        return self.tslp.start

    @property
    def rules(self):
        return self.tslp.rules

    def rank(self, sym):
        return self.tslp.ranks[sym]

    def _members(self, forms):
        return [a for a, c in self.cls.items() if c in forms]

    @cached_property
    def n_a(self):
        return self._members("a")

    @cached_property
    def n_b(self):
        return self._members("b")

    @cached_property
    def n_c(self):
        return self._members("c")

    @cached_property
    def n_d(self):
        return self._members("d")

    @cached_property
    def n1(self):
        return self._members("ab")

    @cached_property
    def n2(self):
        return self._members("cd")

    def param_position(self, a):
        """1-based index of the parameter in rhs(A) for A in N_d."""
        for i, c in enumerate(self.rules[a].children, 1):
            if c.label == X:
                return i
        raise KeyError(a)


def classify_rule(g, a):
    """Return 'a', 'b', 'c' or 'd' for rhs(A), or None if none applies."""
    t = g.rules[a]
    rules, ranks = g.rules, g.ranks
    k = ranks[a]

    def nt(label, rank):
        return label in rules and ranks[label] == rank

    if k == 0:
        if not t.children:
            return "c" if t.label not in rules else None
        if nt(t.label, 1) and not t.children[0].children and nt(t.children[0].label, 0):
            return "a"
        return None
    if k != 1:
        return None
    if t.label in rules:
        if nt(t.label, 1) and len(t.children) == 1:
            inner = t.children[0]
            if nt(inner.label, 1) and len(inner.children) == 1 and inner.children[0].label == X:
                return "b"
        return None
    if not t.children:
        return None
    for c in t.children:
        if c.children:
            return None
        if c.label != X and not nt(c.label, 0):
            return None
    return "d"


def classify(g):
    cls = {}
    for a in g.rules:
        c = classify_rule(g, a)
        if c is None:
            raise GrammarError(f"rule {a} is not in one of the forms a-d")
        cls[a] = c
    return NormalizedTslp(g, cls)


def normalize_monadic(g):
    """Bring a monadic TSLP into forms a-d, preserving val(start).

    Identity and renaming rules are eliminated first; the remaining
    right-hand sides are split top-down along the path to the parameter.
    Newly introduced rules with identical right-hand sides are shared.
    """
    if not g.is_monadic():
        raise GrammarError("normalize_monadic needs a monadic TSLP")
    ranks = g.ranks
    rules = g.rules
    start = g.start
    subst = {}  # eliminated nonterminal -> replacement label, or None for x1

    def rewrite(t):
        lab = t.label
        if lab in subst:
            rep = subst[lab]
            if ranks[lab] == 1:
                child = rewrite(t.children[0])
                return child if rep is None else Tree(rep, [child])
            return Tree(rep)
        return Tree(lab, [rewrite(c) for c in t.children])

    kept = {}
    for a in g.order:
        t = rewrite(rules[a])
        if ranks[a] == 1:
            if t.label == X:
                subst[a] = None
                continue
            if t.label in rules and len(t.children) == 1 and t.children[0].label == X:
                subst[a] = t.label
                continue
        elif a != start and t.label in rules and not t.children:
            subst[a] = t.label
            continue
        kept[a] = t
    alias = kept[start].label
    if alias in kept and not kept[start].children:
        kept[start] = kept[alias]
        if not any(
            n.label == alias for a, t in kept.items() for n, _ in t.nodes()
        ):
            del kept[alias]

    fresh = FreshNames(set(ranks) | {X})
    out = {}
    out_ranks = {}
    shared = {}

    def new_rule(rank, rhs):
        key = (rank, rhs.to_text())
        name = shared.get(key)
        if name is None:
            name = fresh("N")
            shared[key] = name
            out[name] = rhs
            out_ranks[name] = rank
        return name

    def is_nt(label, rank):
        return (label in kept or label in out) and out_ranks.get(
            label, ranks.get(label)
        ) == rank

    def nt0(t):
        if not t.children and is_nt(t.label, 0):
            return t.label
        return new_rule(0, norm0(t))

    def nt1(t):
        if len(t.children) == 1 and t.children[0].label == X and is_nt(t.label, 1):
            return t.label
        return new_rule(1, norm1(t))

    def norm0(t):
        if not t.children:
            return t
        if is_nt(t.label, 1):
            return Tree(t.label, [Tree(nt0(t.children[0]))])
        kids = t.children
        ctx = nt1(Tree(t.label, list(kids[:-1]) + [Tree(X)]))
        return Tree(ctx, [Tree(nt0(kids[-1]))])

    def norm1(t):
        if is_nt(t.label, 1):
            return Tree(t.label, [Tree(nt1(t.children[0]), [Tree(X)])])
        j = next(i for i, c in enumerate(t.children) if _contains_x(c))
        top = Tree(
            t.label,
            [Tree(X) if i == j else Tree(nt0(c)) for i, c in enumerate(t.children)],
        )
        below = t.children[j]
        if below.label == X:
            return top
        return Tree(nt1(top), [Tree(nt1(below), [Tree(X)])])

    for a, t in kept.items():
        out_ranks[a] = ranks[a]
    for a, t in kept.items():
        out[a] = norm0(t) if ranks[a] == 0 else norm1(t)
    ordered = {a: out[a] for a in rules if a in kept}
    ordered.update((a, t) for a, t in out.items() if a not in ordered)
    terminal_ranks = {s: r for s, r in ranks.items() if s not in rules}
    result = Tslp.from_rules(ordered, out_ranks, start, terminal_ranks)
    return classify(result)


def _contains_x(t):
    return any(n.label == X for n, _ in t.nodes())


def normalize(g):
    """monadize followed by normalize_monadic."""
    return normalize_monadic(monadize(g))
