"""Queries on SLP-compressed strings without decompression.

Random access and substring extraction descend the derivation using the
length table. Equality and longest-common-prefix questions use Karp-Rabin
style polynomial fingerprints composed bottom-up over the grammar; every
LCP answer is confirmed at its two endpoints by direct symbol access.
"""

import hashlib
import random
from dataclasses import dataclass

from .errors import FingerprintContradiction, GrammarError
from .grammar import Slp, deep_recursion
from .transform import FreshNames, normalize

MODULUS = 2**127 - 1


def lengths(g):
    """|val(A)| for every symbol of ``g``; raises LengthOverflow past 2^63."""
    return g.lengths


def _check_position(n, i):
    if not 1 <= i <= n:
        raise IndexError(f"position {i} out of range 1..{n}")


def symbol_at(g, x, i, lengths=None):
    """val(x)[i] (1-based)."""
    lens = g.lengths if lengths is None else lengths
    _check_position(lens[x], i)
    rules = g.rules
    while x in rules:
        for s in rules[x]:
            n = lens[s]
            if i <= n:
                x = s
                break
            i -= n
    return x


def substring_slp(g, x, i, j):
    """An SLP whose start symbol derives val(x)[i:j] (1-based, inclusive).

    Cuts the derivation at both ends: O(depth) new rules are added to the
    rules of ``g``.
    """
    lens = g.lengths
    _check_position(lens[x], i)
    _check_position(lens[x], j)
    if i > j:
        raise IndexError(f"empty range {i}..{j}")
    rules = g.rules
    fresh = FreshNames(set(rules) | g.terminals)
    new = {}

    def locate(rhs, pos):
        for k, s in enumerate(rhs):
            if pos <= lens[s]:
                return k, pos
            pos -= lens[s]
        raise AssertionError("position beyond rhs")

    def suffix(a, pos):
        if pos == 1:
            return a
        rhs = rules[a]
        k, pos = locate(rhs, pos)
        name = fresh(a + "_suf")
        new[name] = (suffix(rhs[k], pos),) + rhs[k + 1 :]
        return name

    def prefix(a, pos):
        if pos == lens[a]:
            return a
        rhs = rules[a]
        k, pos = locate(rhs, pos)
        name = fresh(a + "_pre")
        new[name] = rhs[:k] + (prefix(rhs[k], pos),)
        return name

    a = x
    with deep_recursion():
        while True:
            if a not in rules or (i == 1 and j == lens[a]):
                body = (a,)
                break
            rhs = rules[a]
            k1, i1 = locate(rhs, i)
            k2, j2 = locate(rhs, j)
            if k1 == k2:
                a, i, j = rhs[k1], i1, j2
                continue
            body = (suffix(rhs[k1], i1),) + rhs[k1 + 1 : k2] + (prefix(rhs[k2], j2),)
            break
    top = fresh(x + "_sub")
    out = dict(rules)
    out.update(new)
    out[top] = body
    return Slp(out, g.terminals, top)


class FingerprintScheme:
    """Base and terminal codes shared by all indexes that get compared."""

    def __init__(self, seed=None):
        if seed is None:
            seed = random.SystemRandom().getrandbits(64)
        self.seed = seed
        rng = random.Random(seed)
        self.base = rng.randrange(2**32, MODULUS - 1)
        self._key = (seed % 2**128).to_bytes(16, "little")
        self._codes = {}

    def code(self, terminal):
        c = self._codes.get(terminal)
        if c is None:
            h = hashlib.blake2b(terminal.encode(), key=self._key, digest_size=16)
            c = int.from_bytes(h.digest(), "little") % (MODULUS - 1) + 1
            self._codes[terminal] = c
        return c


class FingerprintIndex:
    """Per-symbol fingerprint H(val(A)) = sum code(w_k) * base^(|w|-k) mod p."""

    def __init__(self, g, scheme=None):
        self.g = g
        self.scheme = scheme or FingerprintScheme()
        base = self.scheme.base
        p = MODULUS
        self.lengths = lens = g.lengths
        fp = {}
        pw = {}
        for a in g.terminals:
            fp[a] = self.scheme.code(a)
            pw[a] = base
        for a in g.order:
            h = 0
            for s in g.rules[a]:
                h = (h * pw[s] + fp[s]) % p
            fp[a] = h
            pw[a] = pow(base, lens[a], p)
        self.fp = fp
        self.pw = pw

    def prefix(self, x, i):
        """Fingerprint of val(x)[:i]."""
        p = MODULUS
        rules = self.g.rules
        lens, fp, pw = self.lengths, self.fp, self.pw
        acc = 0
        while i > 0:
            rhs = rules.get(x)
            if rhs is None:
                return (acc * pw[x] + fp[x]) % p
            for s in rhs:
                n = lens[s]
                if i >= n:
                    acc = (acc * pw[s] + fp[s]) % p
                    i -= n
                    if i == 0:
                        break
                else:
                    x = s
                    break
        return acc

    def substring(self, x, i, j):
        """Fingerprint of val(x)[i:j]; empty when i > j."""
        if i > j:
            return 0
        hi = self.prefix(x, j)
        lo = self.prefix(x, i - 1)
        return (hi - lo * pow(self.scheme.base, j - i + 1, MODULUS)) % MODULUS

    def symbol_at(self, x, i):
        return symbol_at(self.g, x, i, self.lengths)


def lcp_indexed(idx1, x1, idx2, x2):
    """Longest common prefix of val(x1) and val(x2) over two indexes."""
    if idx1.scheme is not idx2.scheme:
        raise ValueError("fingerprint indexes must share a scheme")
    n = min(idx1.lengths[x1], idx2.lengths[x2])
    lo, hi = 0, n
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if idx1.prefix(x1, mid) == idx2.prefix(x2, mid):
            lo = mid
        else:
            hi = mid - 1
    if lo < n and idx1.symbol_at(x1, lo + 1) == idx2.symbol_at(x2, lo + 1):
        raise FingerprintContradiction(f"symbols agree at {lo + 1} after lcp {lo}")
    if lo > 0 and idx1.symbol_at(x1, lo) != idx2.symbol_at(x2, lo):
        raise FingerprintContradiction(f"symbols differ at lcp end {lo}")
    return lo


def lcs_prefixes(idx, x1, m1, x2, m2):
    """Longest common suffix of val(x1)[:m1] and val(x2)[:m2] (one index)."""
    n = min(m1, m2)
    lo, hi = 0, n
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if idx.substring(x1, m1 - mid + 1, m1) == idx.substring(x2, m2 - mid + 1, m2):
            lo = mid
        else:
            hi = mid - 1
    if lo < n and idx.symbol_at(x1, m1 - lo) == idx.symbol_at(x2, m2 - lo):
        raise FingerprintContradiction(f"symbols agree {lo + 1} from the end")
    if lo > 0 and idx.symbol_at(x1, m1 - lo + 1) != idx.symbol_at(x2, m2 - lo + 1):
        raise FingerprintContradiction(f"symbols differ at suffix end {lo}")
    return lo


def lcp(g1, x1, g2, x2, scheme=None):
    """Length of the longest common prefix of val_g1(x1) and val_g2(x2)."""
    scheme = scheme or FingerprintScheme()
    return lcp_indexed(FingerprintIndex(g1, scheme), x1, FingerprintIndex(g2, scheme), x2)


@dataclass(frozen=True)
class PreorderSlp:
    """SLP for preorder label words of a normalized TSLP.

    ``word[A]`` derives the preorder of val(A) for rank-0 A; for rank-1 A the
    preorder of val(A)(t) is ``before[A]`` + preorder(t) + ``after[A]``.
    """

    slp: Slp
    word: dict
    before: dict
    after: dict


def preorder_slp(ng, ranked=False):
    g = ng.tslp
    fresh = FreshNames(set(g.ranks))

    def term(label):
        return f"{label}/{g.ranks[label]}" if ranked else label

    word, before, after = {}, {}, {}
    for a in g.rules:
        if g.ranks[a] == 0:
            word[a] = a
        else:
            before[a] = fresh(a + "_pre")
            after[a] = fresh(a + "_post")
    rules = {}
    for a, t in g.rules.items():
        form = ng.cls[a]
        if form == "a":
            b, c = t.label, t.children[0].label
            rules[word[a]] = (before[b], word[c], after[b])
        elif form == "b":
            b, c = t.label, t.children[0].label
            rules[before[a]] = (before[b], before[c])
            rules[after[a]] = (after[c], after[b])
        elif form == "c":
            rules[word[a]] = (term(t.label),)
        else:
            j = ng.param_position(a)
            kids = [c.label for c in t.children]
            rules[before[a]] = (term(t.label),) + tuple(word[k] for k in kids[: j - 1])
            rules[after[a]] = tuple(word[k] for k in kids[j:])
    ordered = {word[ng.start]: rules[word[ng.start]]}
    ordered.update(rules)
    return PreorderSlp(Slp.from_rules(ordered), word, before, after)


def tslp_equal(g1, a1, g2, a2, scheme=None):
    """val_g1(a1) == val_g2(a2) for rank-0 nonterminals, without expansion."""
    if g1.ranks.get(a1) != 0 or g2.ranks.get(a2) != 0:
        raise GrammarError("tslp_equal compares rank-0 nonterminals")
    n1, n2 = g1.sizes[a1], g2.sizes[a2]
    if n1 != n2:
        return False
    p1 = preorder_slp(normalize(g1.with_start(a1)), ranked=True)
    p2 = preorder_slp(normalize(g2.with_start(a2)), ranked=True)
    w1, w2 = p1.word[a1], p2.word[a2]
    assert p1.slp.lengths[w1] == n1 and p2.slp.lengths[w2] == n2
    return lcp(p1.slp, w1, p2.slp, w2, scheme) == n1


__all__ = [
    "FingerprintIndex",
    "FingerprintScheme",
    "PreorderSlp",
    "lcp",
    "lcp_indexed",
    "lcs_prefixes",
    "lengths",
    "preorder_slp",
    "substring_slp",
    "symbol_at",
    "tslp_equal",
]
