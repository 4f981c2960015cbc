"""Step-by-step instrumented walks over string and tree cursors.

Every move is bracketed by two meter reads; the report keeps the mean and
the maximum of each counter per step, so a constant bound shows up as a
flat maximum no matter how large the compressed object is.
"""

import random
import time

from .equality import EqCursor, EqIndex, subtree_eq
from .strcursor import StringCursor
from .treecursor import TreeCursor, TreeIndex

COUNTERS = ("pushes", "pops", "stack_ops", "links", "lcas")


class StepStats:
    def __init__(self):
        self.steps = 0
        self.total = dict.fromkeys(COUNTERS, 0)
        self.max = dict.fromkeys(COUNTERS, 0)
        self.max_depth = 0

    def add(self, before, after, depth):
        pushes = after[0] - before[0]
        pops = after[1] - before[1]
        row = (pushes, pops, pushes + pops, after[2] - before[2], after[3] - before[3])
        tot, mx = self.total, self.max
        for name, v in zip(COUNTERS, row):
            tot[name] += v
            if v > mx[name]:
                mx[name] = v
        self.steps += 1
        if depth > self.max_depth:
            self.max_depth = depth

    def report(self, wall, **extra):
        n = self.steps
        out = {"steps": n, "wall_s": round(wall, 6)}
        for name in COUNTERS:
            out[f"{name}_mean"] = self.total[name] / n if n else 0.0
            out[f"{name}_max"] = self.max[name]
        out["max_depth"] = self.max_depth
        out.update(extra)
        return out


def bench_string(walker, x, steps, walk="random", seed=0):
    """Walk val(x) with a StringCursor; random walks pick left/right uniformly
    among the legal moves, ``dfs`` sweeps left to right (and back)."""
    stats = StepStats()
    meter = walker.meter
    rng = random.Random(seed)
    c = StringCursor.begin(walker, x)
    n = walker.lengths[c.x]
    forward = True
    t0 = time.perf_counter()
    for _ in range(steps):
        before = meter.snapshot()
        if walk == "random":
            if c.pos == 1:
                ok = c.right()
            elif c.pos == n:
                ok = c.left()
            else:
                ok = c.right() if rng.random() < 0.5 else c.left()
        else:
            ok = c.right() if forward else c.left()
            if not ok:
                forward = not forward
                ok = c.right() if forward else c.left()
        stats.add(before, meter.snapshot(), len(c.stack))
        if not ok:
            break  # a one-symbol word has no moves
    wall = time.perf_counter() - t0
    return stats.report(wall, kind="string", walk=walk, length=n)


def _legal_moves(c):
    moves = list(range(1, c.rank() + 1))
    if len(c.bases) > 1 or c.positions[0] > 1:
        moves.append(0)
    return moves


def bench_tree(ng, steps, walk="random", seed=0, eq=False, index=None):
    """Navigate val(ng) with a TreeCursor (or an EqCursor with ``eq``).

    In eq mode every step also asks subtree_eq between the current node and
    a node remembered from earlier in the walk; its LCA queries are counted
    in the same step.
    """
    if index is None:
        index = EqIndex(ng) if eq else TreeIndex(ng)
    if eq:
        c = EqCursor.root(index)
    else:
        c = TreeCursor.root(index)
    meter = index.meter
    stats = StepStats()
    rng = random.Random(seed)
    other = c.copy()
    edges = 0
    equal = 0
    todo = [1]
    t0 = time.perf_counter()
    for _ in range(steps):
        before = meter.snapshot()
        if walk == "random":
            moves = _legal_moves(c)
            if not moves:
                stats.add(before, meter.snapshot(), len(c.stack))
                break
            m = rng.choice(moves)
            ok = c.parent() if m == 0 else c.child(m)
        else:
            ok = False
            while todo and not ok:
                if c.child(todo[-1]):
                    todo[-1] += 1
                    todo.append(1)
                    ok = True
                else:
                    todo.pop()
                    if todo:
                        ok = c.parent()
            if not ok:
                break
        edges += ok
        if eq:
            equal += subtree_eq(c, other)
        stats.add(before, meter.snapshot(), len(c.stack))
        if eq and rng.random() < 0.01:
            other = c.copy()
    wall = time.perf_counter() - t0
    extra = {"kind": "eq" if eq else "tree", "walk": walk, "edges": edges}
    if eq:
        extra["equal_pairs"] = equal
    return stats.report(wall, **extra)
