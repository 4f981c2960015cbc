import math
import random

import pytest

from gctree import Tree
from gctree.encodings import (
    NIL,
    bin_decode,
    bin_encode,
    bin_nav,
    fanout,
    fcns_decode,
    fcns_encode,
    gadget_prefix,
    parse_unranked,
)
from oracles import random_unranked


def _depth(t):
    return 1 + max((_depth(c) for c in t.children), default=0)


# ---------------------------------------------------------------- fcns


def test_fcns_single_node():
    assert fcns_encode(Tree("a")) == Tree("a", [Tree(NIL), Tree(NIL)])


def test_fcns_example():
    t = parse_unranked("a(b,c,d)")
    want = parse_unranked("a(b(nil,c(nil,d(nil,nil))),nil)")
    assert fcns_encode(t) == want
    assert fcns_decode(want) == t


def test_fcns_rejects_nil_label():
    with pytest.raises(ValueError):
        fcns_encode(parse_unranked("a(nil)"))


def test_fcns_decode_rejects_forest():
    with pytest.raises(ValueError):
        fcns_decode(parse_unranked("a(nil,b(nil,nil))"))


@pytest.mark.parametrize("seed", range(50))
def test_fcns_round_trip(seed):
    rng = random.Random(seed)
    t = random_unranked(rng, rng.randint(1, 300))
    b = fcns_encode(t)
    assert all(len(n.children) in (0, 2) for n, _ in b.nodes())
    assert b.size() == 2 * t.size() + 1
    assert fcns_decode(b) == t


# ---------------------------------------------------------------- bin


def test_bin_small_ranks_unchanged():
    for text in ["a", "f(a)", "f(a,b)", "f(g(a),h(b,c))"]:
        t = parse_unranked(text)
        assert bin_encode(t) == t


def test_bin_five_children():
    t = parse_unranked("f(a,b,c,d,e)")
    b = bin_encode(t)
    assert b == parse_unranked("f(_g3(_g2(a,b),c),_g2(d,e))")
    # root to deepest leaf: f, _g3, _g2, a
    assert _depth(b) - 1 == math.ceil(math.log2(5))
    assert bin_decode(b) == t
    assert fanout(b, ()) == 5


def test_bin_gadget_prefix_avoids_labels():
    t = parse_unranked("_g2(a,b,c)")
    assert gadget_prefix(t) == "__g"
    b = bin_encode(t)
    assert bin_decode(b, "__g") == t


@pytest.mark.parametrize("seed", range(50))
def test_bin_round_trip_and_size(seed):
    rng = random.Random(seed)
    t = random_unranked(rng, rng.randint(1, 400), max_rank=rng.choice([3, 9, 40]))
    b = bin_encode(t)
    assert b.size() <= 3 * t.size()
    assert all(len(n.children) <= 2 for n, _ in b.nodes())
    assert bin_decode(b) == t


def _original_paths(t):
    """Pairs (path in t, path in bin(t)) found by navigating with bin_nav."""
    b = bin_encode(t)
    out = [((), ())]
    i = 0
    while i < len(out):
        p, q = out[i]
        node = t.subtree(p)
        for k in range(1, len(node.children) + 1):
            q2, steps = bin_nav(b, q, k)
            out.append((p + (k,), q2))
        i += 1
    return b, out


@pytest.mark.parametrize("seed", range(30))
def test_bin_nav_random(seed):
    rng = random.Random(seed)
    t = random_unranked(rng, rng.randint(1, 300), max_rank=rng.choice([3, 9, 40]))
    b, pairs = _original_paths(t)
    for p, q in pairs:
        node = t.subtree(p)
        r = len(node.children)
        assert b.subtree(q).label == node.label
        assert fanout(b, q) == r
        bound = 2 * math.ceil(math.log2(r)) + 1 if r > 1 else 1
        for k in range(1, r + 1):
            q2, steps = bin_nav(b, q, k)
            assert b.subtree(q2).label == node.children[k - 1].label
            assert steps <= bound
            back, up = bin_nav(b, q2, "parent")
            assert back == q
            assert up <= bound
        with pytest.raises(IndexError):
            bin_nav(b, q, r + 1)


def test_bin_nav_examples():
    b = bin_encode(parse_unranked("f(a,b)"))
    assert bin_nav(b, (), 1) == ((1,), 1)
    b = bin_encode(parse_unranked("f(a,b,c,d,e)"))
    path, steps = bin_nav(b, (), 5)
    assert b.subtree(path).label == "e" and steps <= 3
    path, steps = bin_nav(b, (), 1)
    assert b.subtree(path).label == "a" and steps == 3
    assert bin_nav(b, path, "parent") == ((), 3)
    with pytest.raises(IndexError):
        bin_nav(b, (), "parent")
