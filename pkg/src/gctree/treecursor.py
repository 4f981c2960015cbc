"""Constant-delay navigation in the tree of a normalized monadic TSLP.

Rank-0 rules B(C) and rank-1 rules B(C(x)) (the set N_1) form a string SLP
H over the alphabet N_2 of rules with a terminal on their right-hand side.
For a rank-0 nonterminal A the word val_H(A) lists the rules along A's
spine, so walking the spine is walking val_H(A) with a string cursor.
Leaving the spine to a non-parameter child k of a rule B = f(..) pushes
the triple (B, k, A_k) and starts a new spine for A_k.

A cursor is one flat stack of triples. ``bases[i]`` is the stack index where
segment i starts, ``heads[i]`` the rank-0 nonterminal whose spine it walks
and ``positions[i]`` the spine position (1-based leaf index in val_H).
"""

from dataclasses import dataclass

from .errors import GuardExceeded
from .grammar import DEFAULT_GUARD, Slp
from .strcursor import L, R, SlpWalker


@dataclass(frozen=True)
class SpineSlp:
    h: Slp
    m: frozenset  # of (A, k, A_k)


def derive_spine(ng):
    """H = (N_1, N_2, rhs_1) and the side-step triples M."""
    rules = {}
    for a in ng.n1:
        t = ng.rules[a]
        rules[a] = (t.label, t.children[0].label)
    start = ng.start if ng.start in rules else None
    h = Slp.from_rules(rules, start=start, terminals=set(ng.n2))
    m = set()
    for a in ng.n_d:
        j = ng.param_position(a)
        for k, c in enumerate(ng.rules[a].children, 1):
            if k != j:
                m.add((a, k, c.label))
    return SpineSlp(h, frozenset(m))


class TreeIndex:
    """Everything a TreeCursor needs, built once per normalized grammar."""

    def __init__(self, ng):
        self.ng = ng
        self.spine = derive_spine(ng)
        self.walker = w = SlpWalker(self.spine.h)
        n = len(w.table)
        self.label = [None] * n
        self.rank = [0] * n
        self.param = [0] * n  # parameter position j for N_d, else 0
        self.kids = [()] * n
        for a in ng.n2:
            i = w.id(a)
            t = ng.rules[a]
            self.label[i] = t.label
            self.rank[i] = len(t.children)
            if t.children:
                self.param[i] = ng.param_position(a)
                self.kids[i] = tuple(
                    -1 if c.label == "x1" else w.id(c.label) for c in t.children
                )
        self.start = w.id(ng.start)

    def is_spine_head(self, i):
        """True for N_a (the root needs a triple), False for N_c."""
        return self.walker.is_nonterminal(i)

    @property
    def meter(self):
        return self.walker.meter


class TreeCursor:
    """A node of val(G), represented by a valid sequence of triples."""

    __slots__ = ("index", "stack", "bases", "heads", "positions")

    def __init__(self, index, stack, bases, heads, positions):
        self.index = index
        self.stack = stack
        self.bases = bases
        self.heads = heads
        self.positions = positions

    @classmethod
    def root(cls, index):
        c = cls(index, [], [0], [index.start], [1])
        if index.is_spine_head(index.start):
            index.walker.begin(c.stack, index.start)
        return c

    def node(self):
        """Id of the N_2 rule that produces the current node."""
        return self.stack[-1][2] if self.stack else self.heads[0]

    def label(self):
        return self.index.label[self.node()]

    def rank(self):
        return self.index.rank[self.node()]

    def depth_segments(self):
        return len(self.bases)

    def child(self, i):
        """Move to the i-th child in place; False if it does not exist."""
        ix = self.index
        b = self.node()
        if not 1 <= i <= ix.rank[b]:
            return False
        if i == ix.param[b]:
            ix.walker.right(self.stack, self.bases[-1])
            self.positions[-1] += 1
            return True
        target = ix.kids[b][i - 1]
        stack = self.stack
        stack.append((b, i, target))
        ix.meter.pushes += 1
        self.bases.append(len(stack))
        self.heads.append(target)
        self.positions.append(1)
        if ix.is_spine_head(target):
            ix.walker.begin(stack, target)
        return True

    def parent(self):
        """Move to the parent in place; False at the root."""
        stack = self.stack
        if not stack:
            return False
        base = self.bases[-1]
        seglen = len(stack) - base
        leftmost = seglen == 0 or (seglen == 1 and stack[-1][1] == L)
        if leftmost:
            if base == 0:
                return False
            self.index.meter.pops += len(stack) - base + 1
            del stack[base - 1 :]
            self.bases.pop()
            self.heads.pop()
            self.positions.pop()
            return True
        self.index.walker.left(stack, base)
        self.positions[-1] -= 1
        return True

    def triples(self):
        """The sequence with symbol names; directions 'l', 'r' or a child index."""
        name = self.index.walker.name
        out = []
        for a, d, t in self.stack:
            e = "l" if d == L else "r" if d == R else d
            out.append((name(a), e, name(t)))
        return out

    def copy(self):
        return TreeCursor(
            self.index,
            list(self.stack),
            list(self.bases),
            list(self.heads),
            list(self.positions),
        )

    def __eq__(self, other):
        if not isinstance(other, TreeCursor):
            return NotImplemented
        return self.index is other.index and self.stack == other.stack

    def __hash__(self):
        return hash(tuple(self.stack))

    def __repr__(self):
        return f"TreeCursor({self.triples()})"

    def validate(self):
        """Raise AssertionError unless the cursor is a valid sequence."""
        ix = self.index
        w = ix.walker
        stack = self.stack
        bases, heads = self.bases, self.heads
        assert len(bases) == len(heads) == len(self.positions)
        assert bases[0] == 0 and heads[0] == ix.start
        for s, base in enumerate(bases):
            end = bases[s + 1] - 1 if s + 1 < len(bases) else len(stack)
            head = heads[s]
            if s:
                self._check_link(s, base)
            seg = stack[base:end]
            if ix.is_spine_head(head):
                w.check(stack[:end], base, head)
                assert w.position(stack[:end], base) == self.positions[s]
            else:
                assert not seg, "N_c segment must be empty"
                assert self.positions[s] == 1
            if s + 1 < len(bases):
                assert seg or not ix.is_spine_head(head)
                assert ix.rank[stack[end - 1][2]] > 0

    def _check_link(self, s, base):
        """The triple that opens segment s is a side-step from the node before."""
        ix = self.index
        stack = self.stack
        b, k, t = stack[base - 1]
        assert k > 0, "segment not introduced by a side-step triple"
        assert t == self.heads[s]
        assert 1 <= k <= ix.rank[b] and k != ix.param[b]
        assert ix.kids[b][k - 1] == t
        prev_end = stack[base - 2][2] if base - 2 >= self.bases[s - 1] else None
        assert prev_end == b, "side-step head is not the previous node"


def dfs_preorder(index, guard=DEFAULT_GUARD):
    """Yield (label, depth) in preorder using only cursor moves."""
    c = TreeCursor.root(index)
    count = 1
    yield c.label(), 0
    todo = [1]
    while todo:
        if c.child(todo[-1]):
            todo[-1] += 1
            count += 1
            if count > guard:
                raise GuardExceeded(count, guard)
            yield c.label(), len(todo)
            todo.append(1)
        else:
            todo.pop()
            if todo:
                c.parent()


def nodes_with_cursors(index, guard=DEFAULT_GUARD, root=None):
    """Yield (cursor copy, path of child indices) for every node in preorder.

    ``root`` may be any cursor class's root (default: a plain TreeCursor).
    """
    c = root.copy() if root is not None else TreeCursor.root(index)
    path = []
    yield c.copy(), ()
    todo = [1]
    count = 1
    while todo:
        i = todo[-1]
        if c.child(i):
            todo[-1] += 1
            path.append(i)
            count += 1
            if count > guard:
                raise GuardExceeded(count, guard)
            yield c.copy(), tuple(path)
            todo.append(1)
        else:
            todo.pop()
            if todo:
                c.parent()
                path.pop()
