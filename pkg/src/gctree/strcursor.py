"""Two-way constant-delay traversal of val(X) for a binary SLP.

A position in val(X) is a root-to-leaf path in the derivation tree, stored
as a stack of triples (head, dir, target): a run of left edges is one
``L`` triple, a run of right edges one ``R`` triple, and the two kinds
alternate. Moving to the next leaf touches O(1) triples and asks at most
one next-link query.

Heads and targets are dense symbol ids of a :class:`SymbolTable`. The
walker works on the suffix ``stack[base:]`` so the tree cursor can keep
several string paths on one stack.
"""

from .nextlink import NextLinkIndex, SymbolTable, build_tries

L, R = -1, -2


class Meter:
    """Cumulative operation counters; callers take deltas per step."""

    __slots__ = ("pushes", "pops", "links", "lcas")

    def __init__(self):
        self.pushes = self.pops = self.links = self.lcas = 0

    def snapshot(self):
        return (self.pushes, self.pops, self.links, self.lcas)


class SlpWalker:
    """Tries, next-link indexes and rule tables for one binary SLP."""

    def __init__(self, h):
        self.h = h
        self.table = table = SymbolTable(h)
        tl, tr = build_tries(h, table)
        self.tries = (tl, tr)
        self.links = (NextLinkIndex(tl), NextLinkIndex(tr))
        n = len(table)
        first = [-1] * n
        second = [-1] * n
        for a, (b, c) in h.rules.items():
            i = table.ids[a]
            first[i] = table.ids[b]
            second[i] = table.ids[c]
        self.first = first
        self.second = second
        self.omega_l = tl.root
        self.omega_r = tr.root
        self.lengths = [h.lengths[s] for s in table.names]
        self.meter = Meter()

    def id(self, sym):
        return self.table.ids[sym]

    def name(self, i):
        return self.table.names[i]

    def is_nonterminal(self, i):
        return self.first[i] >= 0

    def reduce(self, side, head, target):
        """reduce_L (side 0) or reduce_R (side 1) on ids; -1 if undefined."""
        self.meter.links += 1
        v = self.links[side].next_link(target, head)
        return -1 if v == head else v

    # moves on stack[base:]

    def begin(self, stack, x):
        stack.append((x, L, self.omega_l[x]))
        self.meter.pushes += 1

    def end(self, stack, x):
        stack.append((x, R, self.omega_r[x]))
        self.meter.pushes += 1

    def right(self, stack, base):
        """Advance to the next leaf; False (stack untouched) at the last."""
        m = self.meter
        top = stack.pop()
        m.pops += 1
        if top[1] == L:
            self.expand_right(stack, base, top[0], top[2])
            return True
        if len(stack) == base:
            stack.append(top)
            m.pushes += 1
            return False
        a, _, t = stack.pop()
        m.pops += 1
        self.expand_right(stack, base, a, t)
        return True

    def left(self, stack, base):
        m = self.meter
        top = stack.pop()
        m.pops += 1
        if top[1] == R:
            self.expand_left(stack, base, top[0], top[2])
            return True
        if len(stack) == base:
            stack.append(top)
            m.pushes += 1
            return False
        a, _, t = stack.pop()
        m.pops += 1
        self.expand_left(stack, base, a, t)
        return True

    def expand_right(self, stack, base, a, alpha):
        """stack[base:] + (a, L, alpha) is a valid prefix; move one leaf right."""
        m = self.meter
        second = self.second
        if alpha != self.first[a]:
            b = self.reduce(0, a, alpha)
            b2 = second[b]
            stack.append((a, L, b))
            stack.append((b, R, b2))
            m.pushes += 2
        else:
            b2 = second[a]
            if len(stack) == base:
                stack.append((a, R, b2))
                m.pushes += 1
            else:
                head = stack.pop()[0]
                stack.append((head, R, b2))
                m.pops += 1
                m.pushes += 1
        if second[b2] >= 0:
            stack.append((b2, L, self.omega_l[b2]))
            m.pushes += 1

    def expand_left(self, stack, base, a, alpha):
        m = self.meter
        first = self.first
        if alpha != self.second[a]:
            b = self.reduce(1, a, alpha)
            b1 = first[b]
            stack.append((a, R, b))
            stack.append((b, L, b1))
            m.pushes += 2
        else:
            b1 = first[a]
            if len(stack) == base:
                stack.append((a, L, b1))
                m.pushes += 1
            else:
                head = stack.pop()[0]
                stack.append((head, L, b1))
                m.pops += 1
                m.pushes += 1
        if first[b1] >= 0:
            stack.append((b1, R, self.omega_r[b1]))
            m.pushes += 1

    def check(self, stack, base, x):
        """Raise AssertionError unless stack[base:] is a valid x-sequence."""
        seg = stack[base:]
        assert seg, "empty sequence"
        assert seg[0][0] == x, "first head differs from the root"
        for (a, d, t), nxt in zip(seg, seg[1:] + [None]):
            assert d in (L, R)
            side = 0 if d == L else 1
            trie = self.tries[side]
            assert t != a and _is_proper_ancestor(trie.parent, t, a), (
                "target not in the descent string of its head"
            )
            if nxt is not None:
                assert nxt[0] == t, "heads do not chain"
                assert nxt[1] != d, "directions do not alternate"
            else:
                assert not self.is_nonterminal(t), "last target is not terminal"

    def position(self, stack, base):
        """Leaf index of stack[base:], recomputed from scratch (for checks)."""
        lens = self.lengths
        pos = 1
        for a, d, t in stack[base:]:
            if d == R:
                # sum the left siblings along the right run from a down to t
                v = a
                while v != t:
                    pos += lens[self.first[v]]
                    v = self.second[v]
        return pos


def _is_proper_ancestor(parent, u, v):
    v = parent[v]
    while v >= 0:
        if v == u:
            return True
        v = parent[v]
    return False


class StringCursor:
    """A position in val(X) with O(1) right/left moves."""

    __slots__ = ("walker", "x", "stack", "pos")

    def __init__(self, walker, x, stack, pos):
        self.walker = walker
        self.x = x
        self.stack = stack
        self.pos = pos

    @classmethod
    def begin(cls, walker, x):
        i = walker.id(x)
        if not walker.is_nonterminal(i):
            raise ValueError(f"{x!r} is not a nonterminal")
        stack = []
        walker.begin(stack, i)
        return cls(walker, i, stack, 1)

    @classmethod
    def end(cls, walker, x):
        i = walker.id(x)
        if not walker.is_nonterminal(i):
            raise ValueError(f"{x!r} is not a nonterminal")
        stack = []
        walker.end(stack, i)
        return cls(walker, i, stack, walker.lengths[i])

    def right(self):
        """Move one position right in place; False when already at the end."""
        if self.walker.right(self.stack, 0):
            self.pos += 1
            return True
        return False

    def left(self):
        if self.walker.left(self.stack, 0):
            self.pos -= 1
            return True
        return False

    def symbol(self):
        return self.walker.name(self.stack[-1][2])

    def triples(self):
        """The stack with symbol names and directions 'l' / 'r'."""
        name = self.walker.name
        return [(name(a), "l" if d == L else "r", name(t)) for a, d, t in self.stack]

    def copy(self):
        return StringCursor(self.walker, self.x, list(self.stack), self.pos)

    def validate(self):
        self.walker.check(self.stack, 0, self.x)
        assert self.walker.position(self.stack, 0) == self.pos, "pos out of sync"

    def __eq__(self, other):
        if not isinstance(other, StringCursor):
            return NotImplemented
        return (
            self.walker is other.walker
            and self.x == other.x
            and self.pos == other.pos
            and self.stack == other.stack
        )

    def __repr__(self):
        return f"StringCursor(pos={self.pos}, {self.triples()})"


def walk(walker, x):
    """Yield the symbols of val(x) left to right with a cursor."""
    c = StringCursor.begin(walker, x)
    yield c.symbol()
    while c.right():
        yield c.symbol()
