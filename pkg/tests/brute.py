"""Slow reference implementations used to cross-check library routines."""
from itertools import product


def all_proper_colorings(g, k):
    nodes = sorted(g.nodes)
    edges = list(g.edges)
    idx = {v: t for t, v in enumerate(nodes)}
    pairs = [(idx[u], idx[v]) for u, v in edges]
    for combo in product(range(1, k + 1), repeat=len(nodes)):
        if all(combo[a] != combo[b] for a, b in pairs):
            yield dict(zip(nodes, combo))


def b_direct(colors, closed):
    """b-value of a color sequence, straight from the definition."""
    seq = list(colors)
    steps = list(zip(seq, seq[1:]))
    if closed:
        steps.append((seq[-1], seq[0]))
    return sum(0 if 3 in (x, y) else x - y for x, y in steps)


def triangles(g):
    out = 0
    for u, v in g.edges:
        out += len(set(g.neighbors(u)) & set(g.neighbors(v)) & {w for w in g.nodes if w > v})
    return out
