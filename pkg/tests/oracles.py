"""Brute-force reference implementations used as test oracles.

Nothing here shares code with the package beyond the Tree container and the
grammar objects' rule tables.
"""

from pathlib import Path

from gctree.tree import Tree

DATA = Path(__file__).parent / "data"


def data(name):
    return (DATA / name).read_text()


def expand_string(rules, x):
    """val(x) of an SLP by plain recursion."""
    if x not in rules:
        return [x]
    out = []
    for s in rules[x]:
        out += expand_string(rules, s)
    return out


def descent(rules, a, side):
    """L(a) (side 0) or R(a) (side 1) by following first/second symbols."""
    out = [a]
    while a in rules:
        a = rules[a][side]
        out.append(a)
    return out


def expand_tree(rules, t):
    """Decompress by substituting argument trees into expanded bodies."""
    kids = [expand_tree(rules, c) for c in t.children]
    if t.label not in rules:
        return Tree(t.label, kids)
    body = expand_tree(rules, rules[t.label])
    return substitute(body, {f"x{i}": k for i, k in enumerate(kids, 1)})


def substitute(t, env):
    if t.label in env and not t.children:
        return env[t.label]
    return Tree(t.label, [substitute(c, env) for c in t.children])


def preorder_paths(t):
    """[(path, node)] in preorder, paths as tuples of 1-based child indices."""
    out = []
    stack = [((), t)]
    while stack:
        path, node = stack.pop()
        out.append((path, node))
        for i in range(len(node.children), 0, -1):
            stack.append((path + (i,), node.children[i - 1]))
    return out


def subtree_ids(t):
    """Map id(node) -> a class number; equal numbers iff equal subtrees."""
    table = {}
    ids = {}
    for _, node in reversed(preorder_paths(t)):
        key = (node.label, tuple(ids[id(c)] for c in node.children))
        ids[id(node)] = table.setdefault(key, len(table))
    return ids


def common_prefix(u, v):
    n = 0
    while n < min(len(u), len(v)) and u[n] == v[n]:
        n += 1
    return n


def tree_size(t):
    return sum(1 for _ in preorder_paths(t))


def forms_consistent(ng):
    """Every rule of a classified grammar matches its claimed form."""
    for a, c in ng.cls.items():
        t = ng.rules[a]
        if c == "c" and t.children:
            return False
        if c in "ab" and t.label not in ng.rules:
            return False
        if c == "d" and t.label in ng.rules:
            return False
    return True


def random_unranked(rng, n, max_rank=9):
    """A random tree with ``n`` nodes; the fan-out is skewed to exercise gadgets."""
    kids = [[]]
    for v in range(1, n):
        pool = range(max(0, v - max_rank * 3), v) if rng.random() < 0.5 else range(v)
        p = rng.choice(pool)
        while len(kids[p]) >= max_rank:
            p = rng.randrange(v)
        kids[p].append(v)
        kids.append([])
    labels = [rng.choice("abcdef") for _ in range(n)]

    def build(v):
        return Tree(labels[v], [build(c) for c in kids[v]])

    return build(0)
