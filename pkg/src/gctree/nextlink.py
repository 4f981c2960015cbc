"""Tries of left/right descent strings and constant-time next-link queries.

For a binary SLP every symbol labels exactly one node of the forest
``T_L``: the parent of nonterminal A is the first symbol of rhs(A), roots
are terminals. Reading the path from A up to its root gives L(A). ``T_R``
is the same with the second symbol.

A next-link query (child of v1 on the path to a descendant v2) is answered
as LCA(v2, last child of v1) in the first-child/next-sibling binary tree of
the forest, with LCA by Euler tour and a sparse table of range minima.
"""

LEFT, RIGHT = 0, 1
_MASK = (1 << 32) - 1


class LcaIndex:
    """O(1) lowest common ancestors on a rooted tree given by parent links."""

    def __init__(self, parent, root):
        n = len(parent)
        kids = [[] for _ in range(n)]
        for v, p in enumerate(parent):
            if p >= 0:
                kids[p].append(v)
        self.depth = depth = [0] * n
        first = [-1] * n
        euler = []
        stack = [(root, 0)]
        while stack:
            v, i = stack.pop()
            if i == 0:
                first[v] = len(euler)
            euler.append((depth[v] << 32) | v)
            if i < len(kids[v]):
                stack.append((v, i + 1))
                c = kids[v][i]
                depth[c] = depth[v] + 1
                stack.append((c, 0))
        self.first = first
        self.euler_length = len(euler)
        table = [euler]
        span = 1
        while 2 * span <= len(euler):
            prev = table[-1]
            table.append(
                [a if a < b else b for a, b in zip(prev, prev[span:])]
            )
            span *= 2
        self.table = table

    def lca(self, u, v):
        lo = self.first[u]
        hi = self.first[v]
        if lo > hi:
            lo, hi = hi, lo
        k = (hi - lo + 1).bit_length() - 1
        row = self.table[k]
        a = row[lo]
        b = row[hi - (1 << k) + 1]
        return (a if a < b else b) & _MASK


def naive_lca(parent, u, v):
    seen = set()
    while u >= 0:
        seen.add(u)
        u = parent[u]
    while v not in seen:
        v = parent[v]
    return v


class SymbolTable:
    """Dense ids: nonterminals in rule order, then terminals sorted."""

    def __init__(self, slp):
        self.names = list(slp.rules) + sorted(slp.terminals)
        self.ids = {s: i for i, s in enumerate(self.names)}
        self.num_nonterminals = len(slp.rules)

    def __len__(self):
        return len(self.names)

    def is_terminal(self, i):
        return i >= self.num_nonterminals


class TrieForest:
    """One of the forests {T_L(a)} or {T_R(a)} for a binary SLP."""

    def __init__(self, slp, side, table=None):
        if any(len(rhs) != 2 for rhs in slp.rules.values()):
            raise ValueError("tries need a binary SLP (|rhs| = 2 everywhere)")
        self.side = side
        self.table = table = table or SymbolTable(slp)
        ids = table.ids
        n = len(table)
        parent = [-1] * n
        for a, rhs in slp.rules.items():
            parent[ids[a]] = ids[rhs[side]]
        children = [[] for _ in range(n)]
        for v in range(n):
            if parent[v] >= 0:
                children[parent[v]].append(v)
        root = list(range(n))
        for a in slp.order:
            v = ids[a]
            root[v] = root[parent[v]]
        self.parent = parent
        self.children = children
        self.root = root

    def node(self, sym):
        return self.table.ids[sym]

    def label(self, v):
        return self.table.names[v]

    def omega(self, sym):
        """omega_L / omega_R: the terminal at the root of sym's trie."""
        return self.label(self.root[self.node(sym)])

    def roots(self):
        return [v for v, p in enumerate(self.parent) if p < 0]

    def descent_string(self, sym):
        """L(sym) (or R(sym)): labels from the node up to its root."""
        out = []
        v = self.node(sym)
        while v >= 0:
            out.append(self.label(v))
            v = self.parent[v]
        return out

    def edges(self):
        return {
            (self.label(p), self.label(v))
            for v, p in enumerate(self.parent)
            if p >= 0
        }

    def to_dot(self, name=None):
        name = name or ("T_L" if self.side == LEFT else "T_R")
        lines = [f"digraph {name} {{"]
        for v, label in enumerate(self.table.names):
            lines.append(f'  n{v} [label="{label}"];')
        for v, p in enumerate(self.parent):
            if p >= 0:
                lines.append(f"  n{p} -> n{v};")
        lines.append("}")
        return "\n".join(lines)


def build_tries(h, table=None):
    table = table or SymbolTable(h)
    return TrieForest(h, LEFT, table), TrieForest(h, RIGHT, table)


class NextLinkIndex:
    """Constant-time next_link(v1, v2) for one trie forest."""

    def __init__(self, forest):
        self.forest = forest
        n = len(forest.parent)
        virtual = n
        # first-child/next-sibling binary tree of the forest under a virtual root
        bparent = [-1] * (n + 1)
        last = [-1] * (n + 1)
        groups = [(virtual, forest.roots())]
        groups += [(v, forest.children[v]) for v in range(n)]
        for v, kids in groups:
            prev = v
            for c in kids:
                bparent[c] = prev
                prev = c
            if kids:
                last[v] = kids[-1]
        self.last_child = last
        self.lca_index = LcaIndex(bparent, virtual)

    def next_link(self, v1, v2):
        return self.lca_index.lca(v2, self.last_child[v1])

    def next_link_checked(self, v1, v2):
        parent = self.forest.parent
        u = v2
        while u >= 0 and parent[u] != v1:
            u = parent[u]
        if u < 0 or v1 == v2:
            raise ValueError("v1 is not a proper ancestor of v2")
        got = self.next_link(v1, v2)
        assert got == u
        return got


def build_next_link(forest):
    return NextLinkIndex(forest)


def naive_next_link(parent, v1, v2):
    while parent[v2] != v1:
        v2 = parent[v2]
        if v2 < 0:
            raise ValueError("not an ancestor")
    return v2


def _reduce(idx, head, target):
    forest = idx.forest
    a = forest.node(head)
    v = idx.next_link(forest.node(target), a)
    if v == a:
        return None
    return forest.label(v)


def reduce_L(idx, head, target):
    """reduce_L(A, l, alpha): the symbol just before alpha in L(A), or None
    when alpha directly follows A."""
    return _reduce(idx, head, target)


def reduce_R(idx, head, target):
    return _reduce(idx, head, target)
