"""Ordered labeled trees and the ``f(t1,...,tn)`` term syntax.

Trees produced by decompression share subtrees (a rank-0 nonterminal is
expanded once), so every traversal here is iterative and never assumes the
structure is small or shallow.
"""

import re

from .errors import GrammarSyntaxError

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
PARAM = re.compile(r"x[1-9][0-9]*")


def is_param(label):
    return PARAM.fullmatch(label) is not None


def param_index(label):
    """1-based index of a parameter label such as ``x3``."""
    return int(label[1:])


class Tree:
    __slots__ = ("label", "children")

    def __init__(self, label, children=()):
        self.label = label
        self.children = tuple(children)

    @property
    def arity(self):
        return len(self.children)

    def __repr__(self):
        text = self.to_text()
        if len(text) > 60:
            text = text[:57] + "..."
        return f"Tree({text})"

    def nodes(self):
        """Preorder iterator over (node, depth)."""
        stack = [(self, 0)]
        while stack:
            node, depth = stack.pop()
            yield node, depth
            for child in reversed(node.children):
                stack.append((child, depth + 1))

    def preorder(self):
        return [node.label for node, _ in self.nodes()]

    def size(self):
        return sum(1 for _ in self.nodes())

    def labels(self):
        return {node.label for node, _ in self.nodes()}

    def shape(self):
        """Preorder (label, arity) list; determines the tree uniquely."""
        return [(node.label, len(node.children)) for node, _ in self.nodes()]

    def __eq__(self, other):
        if not isinstance(other, Tree):
            return NotImplemented
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if a.label != b.label or len(a.children) != len(b.children):
                return False
            stack.extend(zip(a.children, b.children))
        return True

    def __hash__(self):
        return hash(tuple(self.shape()))

    def subtree(self, path):
        """Follow a sequence of 1-based child indices."""
        node = self
        for i in path:
            node = node.children[i - 1]
        return node

    def substitute(self, env):
        """Replace leaves whose label is a key of ``env`` (small trees only)."""
        if not self.children:
            return env.get(self.label, self)
        return Tree(self.label, [c.substitute(env) for c in self.children])

    def to_text(self):
        out = []
        stack = [self]
        while stack:
            item = stack.pop()
            if isinstance(item, str):
                out.append(item)
                continue
            out.append(item.label)
            if item.children:
                stack.append(")")
                for i in range(len(item.children) - 1, -1, -1):
                    stack.append(item.children[i])
                    if i:
                        stack.append(",")
                stack.append("(")
        return "".join(out)

    __str__ = to_text


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def tokenize(text):
    pos = 0
    out = []
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1):
            out.append((m.group(1), True, m.start(1)))
        else:
            out.append((m.group(2), False, m.start(2)))
        pos = m.end()
    return out


def parse_term(text, line=None, col_offset=0):
    """Parse ``f(t1,...,tn)`` into a Tree without recursion."""
    tokens = tokenize(text)

    def fail(msg, at):
        raise GrammarSyntaxError(msg, line, col_offset + at + 1)

    if not tokens:
        fail("empty term", 0)
    stack = []  # open frames: (label, children)
    result = None
    i = 0
    while i < len(tokens):
        tok, ident, col = tokens[i]
        if not ident:
            fail(f"unexpected {tok!r}", col)
        i += 1
        if i < len(tokens) and tokens[i][0] == "(" and not tokens[i][1]:
            stack.append((tok, []))
            i += 1
            continue
        node = Tree(tok)
        while True:
            if not stack:
                result = node
                break
            stack[-1][1].append(node)
            if i >= len(tokens):
                fail("incomplete term", len(text))
            sep, sep_ident, sep_col = tokens[i]
            i += 1
            if sep == "," and not sep_ident:
                break
            if sep == ")" and not sep_ident:
                label, kids = stack.pop()
                node = Tree(label, kids)
                continue
            fail(f"expected ',' or ')' but found {sep!r}", sep_col)
        if result is not None:
            if i < len(tokens):
                fail("trailing input", tokens[i][2])
            return result
    fail("incomplete term", len(text))
