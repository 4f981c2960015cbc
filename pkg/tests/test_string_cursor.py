import pytest

from gctree import (
    SlpWalker,
    StringCursor,
    TreeIndex,
    binarize_slp,
    classify,
    generate_tslp,
    parse_slp,
    random_slp,
)
from gctree.strcursor import L, R, walk
from oracles import data, expand_string

EX2 = parse_slp(data("example2.slp"))
VAL_S = "aabaabaabaabaab"


@pytest.fixture(scope="module")
def w2():
    return SlpWalker(EX2)


def test_begin_and_end(w2):
    c = StringCursor.begin(w2, "S")
    assert c.triples() == [("S", "l", "a")] and c.pos == 1 and c.symbol() == "a"
    assert StringCursor.begin(w2, "D").triples() == [("D", "l", "a")]
    assert StringCursor.begin(w2, "C").triples() == [("C", "l", "a")]
    e = StringCursor.end(w2, "S")
    assert e.triples() == [("S", "r", "b")] and e.pos == 15 and e.symbol() == "b"
    d = StringCursor.end(w2, "D")
    assert d.triples() == [("D", "r", "b")] and d.pos == 2
    with pytest.raises(ValueError):
        StringCursor.begin(w2, "a")


def test_expand_right_trace(w2):
    stack = []
    i = w2.id
    w2.expand_right(stack, 0, i("S"), i("a"))
    names = [(w2.name(a), d, w2.name(t)) for a, d, t in stack]
    assert names == [("S", L, "C"), ("C", R, "D"), ("D", L, "a")]


def test_expand_right_first_symbol(w2):
    # alpha = first(A), empty stack: one (A, r, second) plus the descent
    stack = []
    i = w2.id
    w2.expand_right(stack, 0, i("C"), i("a"))
    assert [(w2.name(a), w2.name(t)) for a, _, t in stack] == [("C", "D"), ("D", "a")]


def test_sweep_example2(w2):
    c = StringCursor.begin(w2, "S")
    assert not c.copy().left()
    c.right()
    assert c.pos == 2 and c.symbol() == "a"
    out = [c.symbol()]
    for _ in range(13):
        assert c.right()
        out.append(c.symbol())
    assert c == StringCursor.end(w2, "S")
    before = c.copy()
    assert not c.right() and c == before
    back = []
    while True:
        back.append(c.symbol())
        if not c.left():
            break
    assert "".join(reversed(back)) == VAL_S
    assert c == StringCursor.begin(w2, "S")
    assert "".join(walk(w2, "S")) == VAL_S


def test_single_rule_end_equals_begin():
    w = SlpWalker(parse_slp("S -> a b"))
    assert StringCursor.begin(w, "S").symbol() == "a"
    e = StringCursor.end(w, "S")
    assert e.left() and e == StringCursor.begin(w, "S")


def _check_sweep(h, x):
    w = SlpWalker(h)
    want = expand_string(h.rules, x)
    c = StringCursor.begin(w, x)
    seen = []
    while True:
        c.validate()
        seen.append(c.copy())
        before = w.meter.snapshot()
        moved = c.right()
        after = w.meter.snapshot()
        pushes, pops, links = (after[k] - before[k] for k in range(3))
        assert pushes <= 4 and pops <= 4 and links <= 1
        if not moved:
            break
    assert [s.symbol() for s in seen] == want
    assert [s.pos for s in seen] == list(range(1, len(want) + 1))
    assert c == StringCursor.end(w, x)
    for k in range(len(seen) - 1, 0, -1):
        before = w.meter.snapshot()
        assert c.left()
        after = w.meter.snapshot()
        assert after[0] - before[0] <= 4 and after[1] - before[1] <= 4
        assert after[2] - before[2] <= 1
        assert c == seen[k - 1]
        r = c.copy()
        assert r.right() and r == seen[k]
    assert not c.left()


@pytest.mark.parametrize("seed", range(150))
def test_random_sweeps(seed):
    g = random_slp(seed, max_rules=40, max_rhs=4, max_length=3000)
    if g.lengths[g.start] < 2:
        return
    h = binarize_slp(g, keep=[g.start])
    _check_sweep(h, g.start)


@pytest.mark.parametrize("k", [4, 8, 11])
@pytest.mark.parametrize("mode", ["chain", "random"])
def test_spine_sweeps(mode, k):
    # spine SLPs of generated tree grammars have long words and deep rules
    h = TreeIndex(classify(generate_tslp(mode, k, seed=k))).spine.h
    for x in h.rules:
        if h.lengths[x] <= 5000:
            _check_sweep(h, x)
