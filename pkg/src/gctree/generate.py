"""Seeded grammar generators for tests and benchmarks."""

import random

from .grammar import Slp, Tslp
from .tree import Tree, is_param

TERMINALS = {"a": 0, "b": 0, "g": 1, "f": 2, "h": 3}


def _tslp(rules, ranks, start):
    nt = {a: ranks[a] for a in rules}
    terms = {s: r for s, r in TERMINALS.items()}
    used = {n.label for t in rules.values() for n, _ in t.nodes()}
    terms = {s: r for s, r in terms.items() if s in used}
    return Tslp.from_rules(rules, nt, start, terms)


def _prune(rules, start):
    keep = {start}
    stack = [start]
    while stack:
        for node, _ in rules[stack.pop()].nodes():
            if node.label in rules and node.label not in keep:
                keep.add(node.label)
                stack.append(node.label)
    return {a: t for a, t in rules.items() if a in keep}


def _x():
    return Tree("x1")


def generate_tslp(mode, k, seed=0):
    """A normalized monadic TSLP whose tree has between 2^k and 2^(k+1) nodes."""
    if not 0 <= k <= 62:
        raise ValueError("size exponent must be in 0..62")
    rng = random.Random(f"{mode}:{k}:{seed}")
    if mode == "chain":
        return _chain(rng, k)
    if mode == "balanced":
        return _balanced(k)
    if mode == "random":
        return _random_normalized(rng, k)
    raise ValueError(f"unknown mode {mode!r}")


def _chain(rng, k):
    kind = rng.choice(["g", "fl", "fr"])
    if kind == "g":
        base = Tree("g", [_x()])
        n = k
    else:
        kids = [Tree("A"), _x()] if kind == "fl" else [_x(), Tree("A")]
        base = Tree("f", kids)
        n = k - 1
    if n < 0:
        return _tslp({"S": Tree("a")}, {"S": 0}, "S")
    rules = {"S": Tree(f"D{n}", [Tree("A")]), "A": Tree("a"), "D0": base}
    ranks = {"S": 0, "A": 0, "D0": 1}
    for i in range(1, n + 1):
        rules[f"D{i}"] = Tree(f"D{i - 1}", [Tree(f"D{i - 1}", [_x()])])
        ranks[f"D{i}"] = 1
    return _tslp(rules, ranks, "S")


def _balanced(k):
    if k == 0:
        return _tslp({"S": Tree("a")}, {"S": 0}, "S")
    rules = {"S": Tree(f"F{k}", [Tree(f"B{k - 1}")]), "B0": Tree("a")}
    ranks = {"S": 0, "B0": 0}
    for i in range(1, k + 1):
        rules[f"F{i}"] = Tree("f", [Tree(f"B{i - 1}"), _x()])
        ranks[f"F{i}"] = 1
        if i < k:
            rules[f"B{i}"] = Tree(f"F{i}", [Tree(f"B{i - 1}")])
            ranks[f"B{i}"] = 0
    return _tslp(rules, ranks, "S")


def _random_normalized(rng, k):
    lo, hi = 2**k, 2 ** (k + 1)
    if k == 0:
        return _tslp({"S": Tree(rng.choice("ab"))}, {"S": 0}, "S")
    rules, ranks, size = {}, {}, {}
    zero, one = [], []

    def add(rhs, rank, n):
        name = f"N{len(rules)}"
        rules[name] = rhs
        ranks[name] = rank
        size[name] = n
        (zero if rank == 0 else one).append(name)
        return name

    def recent(names):
        # favour the largest rules so sizes grow geometrically
        if rng.random() < 0.3:
            return rng.choice(names)
        top = sorted(names, key=size.__getitem__)[-3:]
        return rng.choice(top)

    for c in "ab":
        add(Tree(c), 0, 1)
    add(Tree("g", [_x()]), 1, 1)
    while True:
        form = rng.choice("abdd" if len(one) < 3 else "aabd")
        if form == "a":
            b, c = recent(one), rng.choice(zero)
            n = size[b] + size[c]
            if n > hi:
                continue
            name = add(Tree(b, [Tree(c)]), 0, n)
            if lo <= n and rng.random() < 0.7:
                break
        elif form == "b":
            b, c = recent(one), recent(one)
            n = size[b] + size[c]
            if n >= hi:
                continue
            add(Tree(b, [Tree(c, [_x()])]), 1, n)
        else:
            f = rng.choice(["g", "f", "h"])
            arity = TERMINALS[f]
            j = rng.randrange(arity)
            kids = [_x() if i == j else Tree(rng.choice(zero)) for i in range(arity)]
            n = 1 + sum(size[c.label] for c in kids if c.label != "x1")
            if n >= hi:
                continue
            add(Tree(f, kids), 1, n)
    rules = _prune(rules, name)
    return _tslp(rules, ranks, name)


def random_tslp(seed, max_size=10**4, max_rules=12, max_rank=3):
    """A general (not necessarily monadic) TSLP with tree size <= max_size.

    The size target is log-uniform in [1, max_size]; rules prefer to reuse
    earlier nonterminals so that small grammars still derive large trees.
    """
    rng = random.Random(seed)
    n_rules = rng.randint(1, max_rules)
    budget = max(1, round(max_size ** rng.random()))
    syms = [(s, r) for s, r in TERMINALS.items()]
    rules, ranks, size = {}, {}, {}

    def pick(pred):
        cands = [(s, r) for s, r in syms if pred(r)]
        nts = [c for c in cands if c[0] in rules]
        if nts and rng.random() < 0.6:
            return rng.choice(nts)
        return rng.choice(cands)

    def term(params, depth):
        if not params:
            if depth <= 0 or rng.random() < 0.35:
                return Tree(pick(lambda r: r == 0)[0])
            s, r = pick(lambda r: r > 0)
            return Tree(s, [term([], depth - 1) for _ in range(r)])
        if len(params) == 1 and (depth <= 0 or rng.random() < 0.3):
            return Tree(params[0])
        need = len(params) if depth <= 0 else 1
        s, r = pick(lambda r: r >= need)
        groups = [[] for _ in range(r)]
        if depth <= 0:
            for i, p in enumerate(params):
                groups[i].append(p)
        else:
            for p in params:
                groups[rng.randrange(r)].append(p)
        return Tree(s, [term(g, depth - 1) for g in groups])

    def measure(t):
        n = 0
        for node, _ in t.nodes():
            lab = node.label
            if lab in size:
                n += size[lab]
            elif not is_param(lab):
                n += 1
        return n

    for i in range(n_rules):
        rank = 0 if i == n_rules - 1 else rng.randint(0, max_rank)
        params = [f"x{j}" for j in range(1, rank + 1)]
        best, best_size = None, -1
        for _ in range(12):
            rng.shuffle(params)
            t = term(list(params), rng.randint(1, 4))
            n = measure(t)
            if best_size < n <= budget:
                best, best_size = t, n
        if best is None:
            best = _fallback(params)
        name = f"N{i}"
        rules[name] = best
        ranks[name] = rank
        size[name] = measure(best)
        syms.append((name, rank))
    start = f"N{n_rules - 1}"
    rules = _prune(rules, start)
    ordered = {start: rules[start]}
    ordered.update(rules)
    return _tslp(ordered, ranks, start)


def _fallback(params):
    if not params:
        return Tree("a")
    t = Tree(params[-1])
    for p in reversed(params[:-1]):
        t = Tree("f", [Tree(p), t])
    return t


def random_slp(seed, max_rules=8, alphabet="ab", max_rhs=3, max_length=None):
    """A random SLP; later rules refer to earlier ones, the last is the start."""
    rng = random.Random(seed)
    n = rng.randint(1, max_rules)
    rules = {}
    lengths = dict.fromkeys(alphabet, 1)
    names = list(alphabet)
    for i in range(n):
        while True:
            rhs = tuple(rng.choice(names) for _ in range(rng.randint(1, max_rhs)))
            length = sum(lengths[s] for s in rhs)
            if max_length is None or length <= max_length:
                break
        name = f"X{i}"
        rules[name] = rhs
        lengths[name] = length
        names.append(name)
    start = f"X{n - 1}"
    ordered = {start: rules[start]}
    ordered.update(rules)
    used = {s for r in rules.values() for s in r if s in alphabet}
    return Slp(ordered, frozenset(used), start)
