import random

import pytest

from gctree import (
    EqCursor,
    EqIndex,
    Tree,
    TreeCursor,
    classify,
    generate_tslp,
    normalize,
    parse_tslp,
    random_tslp,
    reduce_grammar,
    subtree_eq,
)
from gctree.equality import Patricia, SEP, lcs_query
from gctree.grammar import Tslp
from gctree.slp import FingerprintScheme
from gctree.treecursor import nodes_with_cursors
from oracles import common_prefix, data, expand_string, expand_tree, subtree_ids

EX4 = parse_tslp(data("example4.tslp"))


@pytest.fixture(scope="module")
def eq4():
    return EqIndex(normalize(EX4), FingerprintScheme(0))


def eq_nodes(eq):
    return list(nodes_with_cursors(eq.tree, root=EqCursor.root(eq)))


# ---------------------------------------------------------------- Example 4


def test_example4_reduced_and_splits(eq4):
    assert eq4.reduced.already_reduced
    sp = eq4.splits["S"]
    assert (sp.s, sp.prime) == (3, "E")
    assert eq4.reduced.ng.rules[sp.r].to_text() == "f(A,x1)"
    assert (eq4.splits["C"].s, eq4.splits["C"].prime) == (2, "A")
    assert (eq4.splits["E"].s, eq4.splits["E"].prime) == (2, "C")


def test_example4_boxed_node(eq4):
    boxed = EqCursor.root(eq4)
    assert boxed.child(1) and boxed.child(2)
    assert boxed.triples() == [("S", "l", "H"), ("H", "r", "B"), ("B", "|", "E"), ("E", "l", "D")]
    assert boxed.label() == "f"
    e = EqCursor.root(eq4)
    assert e.child(2)
    assert subtree_eq(boxed, e)
    boxed.validate()
    # leaving the separator segment goes back to the S spine
    assert boxed.parent()
    assert boxed.triples() == [("S", "l", "H"), ("H", "r", "B")]
    assert not EqCursor.root(eq4).parent()


def test_example4_all_pairs(eq4):
    t = expand_tree(EX4.rules, Tree("S"))
    ids = subtree_ids(t)
    nodes = eq_nodes(eq4)
    assert len(nodes) == 17
    by_path = {p: n for p, n in _paths(t)}
    for c1, p1 in nodes:
        c1.validate()
        assert subtree_eq(c1, c1)
        for c2, p2 in nodes:
            want = ids[id(by_path[p1])] == ids[id(by_path[p2])]
            assert subtree_eq(c1, c2) == want, (p1, p2)


def _paths(t):
    out = [((), t)]
    i = 0
    while i < len(out):
        p, n = out[i]
        out += [(p + (k,), c) for k, c in enumerate(n.children, 1)]
        i += 1
    return out


def test_different_indexes_rejected(eq4):
    other = EqIndex(normalize(EX4))
    with pytest.raises(ValueError):
        subtree_eq(EqCursor.root(eq4), EqCursor.root(other))


# ---------------------------------------------------------------- reduction


def test_duplicate_constants_merge():
    ng = classify(parse_tslp("S -> F(A)\nF(x1) -> f(B,x1)\nA -> a\nB -> a"))
    red = reduce_grammar(ng)
    assert red.merged == {"B": "A"}
    assert not red.already_reduced
    assert red.ng.tslp.size <= ng.tslp.size
    assert reduce_grammar(red.ng).already_reduced


def _with_duplicates(ng, rng):
    rules = dict(ng.rules)
    ranks = {a: ng.rank(a) for a in rules}
    for k, a in enumerate(rng.sample(list(ng.rules), min(3, len(ng.rules)))):
        rules[f"Dup{k}"] = ng.rules[a]
        ranks[f"Dup{k}"] = ranks[a]
    g = ng.tslp
    terms = {s: g.ranks[s] for s in g.terminals}
    return classify(Tslp.from_rules(rules, ranks, g.start, terms))


@pytest.mark.parametrize("seed", range(40))
def test_reduction_classes(seed):
    rng = random.Random(seed)
    ng = _with_duplicates(normalize(random_tslp(seed, max_size=500)), rng)
    red = reduce_grammar(ng, FingerprintScheme(seed))
    hole = Tree("#hole")

    def value(a):
        arg = [hole] if ng.rank(a) else []
        return (ng.rank(a), expand_tree(ng.rules, Tree(a, arg)))

    vals = {a: value(a) for a in ng.rules}
    rep = {a: red.merged.get(a, a) for a in ng.rules}
    for a in ng.rules:
        for b in ng.rules:
            assert (rep[a] == rep[b]) == (vals[a] == vals[b])
    assert expand_tree(red.ng.rules, Tree(red.ng.start)) == vals[ng.start][1]


# ---------------------------------------------------------------- splits


def split_oracle(eq):
    """s(A) and A' by scanning every spine suffix of the expanded tree."""
    ng = eq.reduced.ng
    h = eq.tree.spine.h
    consts = {
        expand_tree(ng.rules, Tree(b)): b for b in ng.rules if ng.rank(b) == 0
    }
    out = {}
    for a in ng.n_a:
        word = expand_string(h.rules, a)
        node = expand_tree(ng.rules, Tree(a))
        for i, sym in enumerate(word, 1):
            if i >= 2 and node in consts:
                out[a] = (i, consts[node], word[i - 2])
                break
            if ng.cls[sym] == "d":
                node = node.children[ng.param_position(sym) - 1]
    return out


@pytest.mark.parametrize("seed", range(40))
def test_splits_random(seed):
    eq = EqIndex(normalize(random_tslp(seed, max_size=1000)), FingerprintScheme(seed))
    want = split_oracle(eq)
    got = {a: (sp.s, sp.prime, sp.r) for a, sp in eq.splits.items()}
    assert got == want


# ---------------------------------------------------------------- Patricia


def _patricia(strings, order=None):
    keys = order or list(strings)
    return Patricia(
        keys,
        lambda k: len(strings[k]),
        lambda k, i: strings[k][i],
        lambda a, b: common_prefix(strings[a], strings[b]),
    )


def test_example5_patricia():
    words = dict(A="abba", B="abbb", C="ba", D="baba", E="babb")
    p = _patricia(words)
    assert sorted(p.depth[v] for v in p.internal_nodes()) == [0, 2, 3, 3]
    assert p.shape() == (0, [(2, ["C", (3, ["D", "E"])]), (3, ["A", "B"])])
    assert p.query("A", "B") == 3
    assert p.query("D", "E") == 3
    assert p.query("C", "D") == 2
    assert p.query("A", "A") == 4


def test_patricia_disjoint_pair():
    p = _patricia({"u": "ab", "v": "ba"})
    assert p.shape() == (0, ["u", "v"])


@pytest.mark.parametrize("seed", range(30))
def test_patricia_random(seed):
    rng = random.Random(seed)
    words = {
        k: "".join(rng.choice("ab") for _ in range(rng.randint(0, 7)))
        for k in range(rng.randint(1, 12))
    }
    order = list(words)
    rng.shuffle(order)
    p = _patricia(words, order)
    for a in words:
        for b in words:
            assert p.query(a, b) == common_prefix(words[a], words[b])
    for v in p.internal_nodes():
        assert len(p.children[v]) >= 2
        for c in p.children[v].values():
            # leaves and groups of equal strings ending here use the '$' branch
            if p.children[c] is None or p.dup[c]:
                assert p.depth[c] >= p.depth[v]
            else:
                assert p.depth[c] > p.depth[v]


def test_lcs_on_grammar(eq4):
    # w_S = reverse of val_H(S[:1]) = F; w_C and w_E are empty
    assert lcs_query(eq4, "S", "S") == 1
    assert lcs_query(eq4, "S", "C") == 0


# ---------------------------------------------------------------- navigation


def check_eq_grammar(g, seed, pairs=150):
    rng = random.Random(seed)
    ng = normalize(g)
    eq = EqIndex(ng, FingerprintScheme(seed))
    t = expand_tree(g.rules, Tree(g.start))
    ids = subtree_ids(t)
    by_path = dict(_paths(t))
    nodes = eq_nodes(eq)
    assert [p for _, p in nodes] == [p for p, _ in _paths_pre(t)]
    for c, p in nodes:
        assert c.label() == by_path[p].label
        c.validate()
        for i in range(1, c.rank() + 1):
            d = c.copy()
            before = eq.meter.snapshot()
            assert d.child(i)
            after = eq.meter.snapshot()
            assert after[0] - before[0] + after[1] - before[1] <= 8
            assert d.parent() and d == c
    for _ in range(pairs):
        (c1, p1), (c2, p2) = rng.choice(nodes), rng.choice(nodes)
        before = eq.meter.lcas
        got = subtree_eq(c1, c2)
        assert eq.meter.lcas - before <= 1
        assert got == (ids[id(by_path[p1])] == ids[id(by_path[p2])])
        assert got == subtree_eq(c2, c1)
    # lockstep against the plain cursor
    plain = TreeCursor.root(eq.tree.__class__(eq.reduced.ng))
    walker = EqCursor.root(eq)
    for _ in range(300):
        assert plain.label() == walker.label() and plain.rank() == walker.rank()
        if rng.random() < 0.3:
            assert plain.parent() == walker.parent()
        else:
            i = rng.randint(1, plain.rank() + 1)
            assert plain.child(i) == walker.child(i)
    return eq


def _paths_pre(t):
    out = []
    stack = [((), t)]
    while stack:
        p, n = stack.pop()
        out.append((p, n))
        for k in range(len(n.children), 0, -1):
            stack.append((p + (k,), n.children[k - 1]))
    return out


@pytest.mark.parametrize("seed", range(80))
def test_random_grammars(seed):
    check_eq_grammar(random_tslp(seed, max_size=1500), seed)


@pytest.mark.parametrize("mode", ["chain", "balanced", "random"])
def test_generated(mode):
    check_eq_grammar(generate_tslp(mode, 8, seed=5), 5)


def test_separator_constant():
    assert SEP == 0
    eq = EqIndex(classify(generate_tslp("chain", 30, 2)))
    c = EqCursor.root(eq)
    for _ in range(200):
        c.child(c.rank())
    c.validate()
    # deep descents keep the stack logarithmic in the tree depth
    assert len(c.stack) < 20
    assert subtree_eq(c, c)
