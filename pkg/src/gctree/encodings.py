"""Binary encodings of unranked trees.

``fcns``: the left child is the first child, the right child is the next
sibling, missing links are ``nil`` leaves.

``bin``: a node with s >= 3 children keeps its label and gets a balanced
binary gadget over the children (left part ceil(s/2), right part
floor(s/2)). Inner gadget nodes are labeled ``<prefix><k>`` where k is the
number of original children below them, so the fan-out of a node can be
read off its two gadget children in O(1).
"""

import re

from .grammar import deep_recursion
from .tree import Tree, parse_term

NIL = "nil"
GADGET = "_g"


def parse_unranked(text):
    return parse_term(text.strip())


def _check_reserved(t, pred, what):
    for node, _ in t.nodes():
        if pred(node.label):
            raise ValueError(f"label {node.label!r} collides with the {what}")


# first-child / next-sibling


def fcns_encode(t, nil=NIL):
    _check_reserved(t, lambda lab: lab == nil, "nil marker")

    def enc(nodes):
        out = Tree(nil)
        for node in reversed(nodes):
            out = Tree(node.label, [enc(node.children), out])
        return out

    with deep_recursion():
        return enc([t])


def fcns_decode(b, nil=NIL):
    def dec(b):
        out = []
        while b.label != nil:
            if len(b.children) != 2:
                raise ValueError(f"fcns node {b.label} must have two children")
            out.append(Tree(b.label, dec(b.children[0])))
            b = b.children[1]
        return out

    with deep_recursion():
        nodes = dec(b)
    if len(nodes) != 1:
        raise ValueError("fcns tree must encode exactly one root")
    return nodes[0]


# balanced binary gadgets


def gadget_prefix(t):
    """A gadget label prefix that no label of ``t`` can be confused with."""
    labels = t.labels()
    prefix = GADGET
    while any(re.fullmatch(re.escape(prefix) + r"\d+", lab) for lab in labels):
        prefix = "_" + prefix
    return prefix


def bin_encode(t, prefix=None):
    prefix = prefix or gadget_prefix(t)

    def gadget(kids):
        if len(kids) == 1:
            return enc(kids[0])
        half = (len(kids) + 1) // 2
        return Tree(f"{prefix}{len(kids)}", [gadget(kids[:half]), gadget(kids[half:])])

    def enc(node):
        kids = node.children
        if len(kids) <= 2:
            return Tree(node.label, [enc(c) for c in kids])
        half = (len(kids) + 1) // 2
        return Tree(node.label, [gadget(kids[:half]), gadget(kids[half:])])

    with deep_recursion():
        out = enc(t)
    assert out.size() <= 3 * t.size(), "bin(t) exceeds 3|t|"
    return out


def _gadget_count(label, prefix):
    if label.startswith(prefix) and label[len(prefix) :].isdigit():
        return int(label[len(prefix) :])
    return 0


def bin_decode(b, prefix=GADGET):
    def flatten(node, out):
        if _gadget_count(node.label, prefix):
            for c in node.children:
                flatten(c, out)
        else:
            out.append(dec(node))

    def dec(node):
        kids = []
        if len(node.children) == 2 and any(
            _gadget_count(c.label, prefix) for c in node.children
        ):
            for c in node.children:
                flatten(c, kids)
        else:
            kids = [dec(c) for c in node.children]
        return Tree(node.label, kids)

    with deep_recursion():
        return dec(b)


def fanout(b, path, prefix=GADGET):
    """Number of original children of the node at ``path`` in bin(t)."""
    node = b.subtree(path)
    if len(node.children) < 2:
        return len(node.children)
    return sum(_gadget_count(c.label, prefix) or 1 for c in node.children)


def bin_nav(b, path, step, prefix=GADGET):
    """Simulate one move of t in bin(t).

    ``path`` (1-based child indices in bin(t)) addresses an original node;
    ``step`` is ``"parent"`` or a child number. Returns (new path, number of
    bin(t) edges traversed). Raises IndexError if the neighbor is absent.
    """
    path = tuple(path)
    if step == "parent":
        if not path:
            raise IndexError("the root has no parent")
        steps = 0
        while True:
            path = path[:-1]
            steps += 1
            if not path or not _gadget_count(b.subtree(path).label, prefix):
                return path, steps
    i = int(step)
    s = fanout(b, path, prefix)
    if not 1 <= i <= s:
        raise IndexError(f"node has {s} children, no child {i}")
    if s <= 2:
        return path + (i,), 1
    lo, hi = 1, s
    steps = 0
    while lo < hi:
        mid = lo + (hi - lo) // 2  # left part holds ceil(n/2)
        if i <= mid:
            path += (1,)
            hi = mid
        else:
            path += (2,)
            lo = mid + 1
        steps += 1
    return path, steps
