"""Constant-time subtree equality on top of the tree cursor.

Preprocessing (polynomial, randomized through fingerprints):

* the grammar is reduced so that distinct nonterminals derive distinct
  trees (or, for rank 1, distinct contexts);
* for every A in N_a the split position s(A), the nonterminal A' with
  val(A[s(A):]) = val(A') and the rule r_A at position s(A)-1 are found;
* a modified Patricia tree over the reversed spine prefixes answers
  longest-common-suffix lengths with one LCA query.

A cursor never walks a spine past s(A)-1: the spine child there is the
root of val(A'), so a separator and a fresh segment for A' are pushed.
"""

from dataclasses import dataclass, field

from .grammar import Tslp
from .nextlink import LcaIndex
from .slp import (
    FingerprintIndex,
    FingerprintScheme,
    lcs_prefixes,
    preorder_slp,
    symbol_at,
)
from .transform import X, classify
from .tree import Tree
from .treecursor import TreeCursor, TreeIndex

SEP = 0


# grammar reduction


@dataclass(frozen=True)
class ReducedTslp:
    ng: object  # NormalizedTslp
    merged: dict = field(default_factory=dict)  # old nonterminal -> representative

    @property
    def already_reduced(self):
        return not self.merged


def value_keys(ng, scheme=None):
    """Fingerprint key of val(A) for every nonterminal.

    Rank 0: the ranked preorder word. Rank 1: the words before and after the
    parameter in the preorder of val(A)(x), which together fix the context.
    """
    p = preorder_slp(ng, ranked=True)
    idx = FingerprintIndex(p.slp, scheme or FingerprintScheme())
    lens = p.slp.lengths

    def key(w):
        return (lens[w], idx.fp[w])

    out = {}
    for a in ng.rules:
        if ng.rank(a) == 0:
            out[a] = (0,) + key(p.word[a])
        else:
            out[a] = (1,) + key(p.before[a]) + key(p.after[a])
    return out


def reduce_grammar(ng, scheme=None):
    """Merge nonterminals with equal values into one representative."""
    keys = value_keys(ng, scheme)
    order = [ng.start] + [a for a in ng.rules if a != ng.start]
    rep_of_key = {}
    merged = {}
    for a in order:
        rep = rep_of_key.setdefault(keys[a], a)
        if rep != a:
            merged[a] = rep
    if not merged:
        return ReducedTslp(ng)

    def rename(t):
        lab = merged.get(t.label, t.label)
        return Tree(lab, [rename(c) for c in t.children])

    g = ng.tslp
    rules = {a: rename(t) for a, t in g.rules.items() if a not in merged}
    nt_ranks = {a: g.ranks[a] for a in rules}
    term_ranks = {s: g.ranks[s] for s in g.terminals}
    out = Tslp.from_rules(rules, nt_ranks, g.start, term_ranks)
    return ReducedTslp(classify(out), merged)


# split positions


@dataclass(frozen=True)
class SpineSplit:
    spine_length: int  # l(A)
    s: int
    prime: str  # A'
    r: str  # the N_d rule at position s - 1; r_A = rhs of it


def _prefix_count(h, x, target, weight):
    """Number p of leading symbols of val_H(x) whose weights sum to target,
    or None if no prefix hits target exactly."""
    rules = h.rules
    lens = h.lengths
    count = 0
    while target > 0:
        rhs = rules.get(x)
        if rhs is None:
            return None
        y, z = rhs
        wy = weight[y]
        if target < wy:
            x = y
        else:
            target -= wy
            count += lens[y]
            x = z
    return count


def _prefix_weight(h, x, p, weight):
    """Sum of weights of the first p symbols of val_H(x)."""
    rules = h.rules
    lens = h.lengths
    total = 0
    while p > 0:
        rhs = rules.get(x)
        if rhs is None:
            return total + weight[x]
        y, z = rhs
        if p < lens[y]:
            x = y
        else:
            p -= lens[y]
            total += weight[y]
            x = z
    return total


def precompute_splits(ng, h, scheme=None):
    """SpineSplit for every A in N_a of a reduced normalized grammar."""
    g = ng.tslp
    sizes = g.sizes
    p = preorder_slp(ng, ranked=True)
    idx = FingerprintIndex(p.slp, scheme or FingerprintScheme())
    plens = p.slp.lengths
    # tree-size weight and preorder-before weight of every H symbol
    weight = {a: sizes[a] for a in g.rules}
    before = {}
    for a in ng.n_c:
        before[a] = 0
    for a in ng.n_d:
        before[a] = plens[p.before[a]]
    for a in h.order:
        y, z = h.rules[a]
        before[a] = before[y] + before[z]
    by_value = {}
    for b in g.rules:
        if g.ranks[b] == 0:
            by_value[(plens[p.word[b]], idx.fp[p.word[b]])] = b
    cand_sizes = sorted({sizes[b] for b in g.rules if g.ranks[b] == 0}, reverse=True)
    out = {}
    for a in ng.n_a:
        total = sizes[a]
        word = p.word[a]
        found = None
        for n in cand_sizes:
            if n >= total:
                continue
            k = _prefix_count(h, a, total - n, weight)
            if k is None:
                continue
            start = _prefix_weight(h, a, k, before) + 1
            b = by_value.get((n, idx.substring(word, start, start + n - 1)))
            if b is not None:
                found = (k + 1, b)
                break
        assert found is not None, f"no split for {a}"
        s, prime = found
        out[a] = SpineSplit(h.lengths[a], s, prime, symbol_at(h, a, s - 1))
    return out


# modified Patricia tree


class Patricia:
    """Path-compressed trie over prefix-free strings w_k = u_k + '$'.

    Strings are given by ``length(k)`` (of u_k), ``char(k, i)`` for
    0 <= i < length(k) and ``lcp(k1, k2)`` on the u parts. Internal nodes
    store their string depth; a leaf stores length(k). Keys with identical
    strings hang together under one node of depth length(k).
    """

    END = object()

    def __init__(self, keys, length, char, lcp):
        self.keys = list(keys)
        self._length = length
        self._char = char
        self._lcp = lcp
        self.depth = []
        self.children = []  # per node: dict branch -> child, None for leaves
        self.parent = []
        self.rep = []  # some key below the node
        self.dup = []
        self.leaf = {}
        if not self.keys:
            raise ValueError("no keys")
        root = self._new(0, self.keys[0], {})
        first = self._new_leaf(self.keys[0])
        self._attach(root, self._branch(self.keys[0], 0), first)
        for k in self.keys[1:]:
            self._insert(k)
        kids = self.children[0]
        self.root = 0
        if len(kids) == 1:
            (self.root,) = kids.values()
            self.parent[self.root] = -1
        self.lca_index = LcaIndex(self.parent, self.root)

    def _new(self, depth, rep, children, dup=False):
        self.depth.append(depth)
        self.children.append(children)
        self.parent.append(-1)
        self.rep.append(rep)
        self.dup.append(dup)
        return len(self.depth) - 1

    def _new_leaf(self, k):
        v = self._new(self._length(k), k, None)
        self.leaf[k] = v
        return v

    def _attach(self, parent, branch, child):
        self.children[parent][branch] = child
        self.parent[child] = parent

    def _branch(self, k, i):
        return self.END if i == self._length(k) else self._char(k, i)

    def _insert(self, k):
        n = self._length(k)
        # blind descent: any leaf reached shares a longest prefix with k
        v = 0
        while self.children[v] is not None and not self.dup[v] and self.depth[v] <= n:
            nxt = self.children[v].get(self._branch(k, self.depth[v]))
            if nxt is None:
                break
            v = nxt
        other = self.rep[v]
        l = self._lcp(k, other)
        # deepest internal node on k's path with depth <= l
        v = 0
        while True:
            nxt = self.children[v].get(self._branch(k, self.depth[v]))
            if nxt is None or self.depth[nxt] > l:
                break
            if self.depth[nxt] == l and (self.children[nxt] is None or self.dup[nxt]):
                break
            v = nxt
        slot = self._branch(k, self.depth[v])
        below = self.children[v].get(slot)
        if l == n == self._length(other):
            if not self.dup[below]:
                group = self._new(n, other, {}, dup=True)
                self._attach(v, slot, group)
                self._attach(group, ("dup", self.rep[below]), below)
                below = group
            self._attach(below, ("dup", k), self._new_leaf(k))
            return
        leaf = self._new_leaf(k)
        if below is None:
            self._attach(v, slot, leaf)
            return
        mid = self._new(l, other, {})
        self._attach(v, slot, mid)
        self._attach(mid, self._branch(self.rep[below], l), below)
        self._attach(mid, self._branch(k, l), leaf)

    def query(self, a, b):
        """Length of the longest common prefix of u_a and u_b."""
        return self.depth[self.lca_index.lca(self.leaf[a], self.leaf[b])]

    def internal_nodes(self):
        return [v for v in self._reachable() if self.children[v] is not None]

    def _reachable(self):
        out = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            out.append(v)
            if self.children[v]:
                stack.extend(self.children[v].values())
        return out

    def shape(self, v=None):
        """Nested (depth, [children]) / key structure, children sorted."""
        v = self.root if v is None else v
        if self.children[v] is None:
            return self.rep[v]
        kids = sorted((self.shape(c) for c in self.children[v].values()), key=repr)
        return (self.depth[v], kids)


def build_patricia(ng, h, splits, scheme=None):
    """Patricia tree over w_A = reverse(val_H(A)[:s(A)-2]) + '$', A in N_a."""
    keys = list(ng.n_a)
    if not keys:
        return None
    idx = FingerprintIndex(h, scheme or FingerprintScheme())
    m = {a: splits[a].s - 2 for a in keys}

    def char(a, i):
        return idx.symbol_at(a, m[a] - i)

    def lcp(a, b):
        return lcs_prefixes(idx, a, m[a], b, m[b])

    return Patricia(keys, m.__getitem__, char, lcp)


# cursor and query


class EqIndex:
    """Tree index of the reduced grammar plus the equality tables."""

    def __init__(self, ng, scheme=None):
        scheme = scheme or FingerprintScheme()
        self.reduced = reduce_grammar(ng, scheme)
        rng = self.reduced.ng
        self.tree = tree = TreeIndex(rng)
        h = tree.spine.h
        self.splits = precompute_splits(rng, h, scheme)
        self.patricia = build_patricia(rng, h, self.splits, scheme)
        w = tree.walker
        n = len(w.table)
        self.s = [0] * n
        self.prime = [-1] * n
        self.rkey = [None] * n
        for a, sp in self.splits.items():
            i = w.id(a)
            self.s[i] = sp.s
            self.prime[i] = w.id(sp.prime)
            r = rng.rules[sp.r]
            kids = tuple(sp.prime if c.label == X else c.label for c in r.children)
            self.rkey[i] = (r.label, kids)
        self.leaf = [-1] * n
        if self.patricia is not None:
            for a, v in self.patricia.leaf.items():
                self.leaf[w.id(a)] = v

    @property
    def meter(self):
        return self.tree.meter

    def lcs(self, i, j):
        """lcs_query on symbol ids."""
        p = self.patricia
        self.tree.meter.lcas += 1
        return p.depth[p.lca_index.lca(self.leaf[i], self.leaf[j])]

    def lcs_query(self, a, b):
        w = self.tree.walker
        return self.lcs(w.id(a), w.id(b))

    def root(self):
        return EqCursor.root(self)


class EqCursor(TreeCursor):
    """Tree cursor that restarts at A' instead of walking past s(A) - 1."""

    __slots__ = ("eq",)

    def __init__(self, eq, stack, bases, heads, positions):
        super().__init__(eq.tree, stack, bases, heads, positions)
        self.eq = eq

    @classmethod
    def root(cls, eq):
        ix = eq.tree
        c = cls(eq, [], [0], [ix.start], [1])
        if ix.is_spine_head(ix.start):
            ix.walker.begin(c.stack, ix.start)
        return c

    def child(self, i):
        ix = self.index
        b = self.node()
        if i == ix.param[b] and i > 0 and self.positions[-1] == self.eq.s[self.heads[-1]] - 1:
            target = self.eq.prime[self.heads[-1]]
            stack = self.stack
            stack.append((b, SEP, target))
            ix.meter.pushes += 1
            self.bases.append(len(stack))
            self.heads.append(target)
            self.positions.append(1)
            if ix.is_spine_head(target):
                ix.walker.begin(stack, target)
            return True
        return TreeCursor.child(self, i)

    def copy(self):
        return EqCursor(
            self.eq,
            list(self.stack),
            list(self.bases),
            list(self.heads),
            list(self.positions),
        )

    def triples(self):
        out = TreeCursor.triples(self)
        return [(a, "|" if d == SEP else d, t) for a, d, t in out]

    def validate(self):
        eq = self.eq
        for head, pos in zip(self.heads, self.positions):
            if self.index.is_spine_head(head):
                assert pos < eq.s[head], "cursor walked past s(head) - 1"
        TreeCursor.validate(self)

    def _check_link(self, s, base):
        b, k, t = self.stack[base - 1]
        if k != SEP:
            return TreeCursor._check_link(self, s, base)
        prev = self.heads[s - 1]
        assert t == self.heads[s] == self.eq.prime[prev]
        assert self.positions[s - 1] == self.eq.s[prev] - 1
        assert self.stack[base - 2][2] == b
        assert self.index.param[b] > 0


def subtree_eq(c1, c2):
    """True iff the subtrees at the two cursors are equal, in O(1)."""
    eq = c1.eq
    if c2.eq is not eq:
        raise ValueError("cursors belong to different equality indexes")
    ix = eq.tree
    b1, b2 = c1.node(), c2.node()
    if ix.rank[b1] == 0 or ix.rank[b2] == 0:
        return ix.rank[b1] == ix.rank[b2] and ix.label[b1] == ix.label[b2]
    h1, h2 = c1.heads[-1], c2.heads[-1]
    n1, n2 = c1.positions[-1], c2.positions[-1]
    s1, s2 = eq.s[h1], eq.s[h2]
    if s1 - n1 != s2 - n2:
        return False
    k = s1 - 1 - n1
    if k > 0 and k > eq.lcs(h1, h2):
        return False
    return eq.rkey[h1] == eq.rkey[h2]


def lcs_query(eq, a, b):
    return eq.lcs_query(a, b)


__all__ = [
    "EqCursor",
    "EqIndex",
    "Patricia",
    "ReducedTslp",
    "SpineSplit",
    "build_patricia",
    "lcs_query",
    "precompute_splits",
    "reduce_grammar",
    "subtree_eq",
]
