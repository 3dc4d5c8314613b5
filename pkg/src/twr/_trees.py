"""Tree helpers shared by the tree solvers: rooting, Steiner subtrees, walks."""

from __future__ import annotations

from fractions import Fraction


def rooted(tree, root):
    """Return ``(parent, order, weight)`` for the tree rooted at ``root``.

    ``order`` is a BFS order, ``weight[x]`` the weight of edge ``(parent[x], x)``.
    """
    adj = tree.neighbors()
    parent = {root: None}
    weight = {root: Fraction(0)}
    order = [root]
    for u in order:
        for v, w in adj[u]:
            if v not in parent:
                parent[v] = u
                weight[v] = w
                order.append(v)
    return parent, order, weight


def steiner_nodes(tree, terminals, root):
    """Nodes of the minimal subtree spanning ``terminals`` and ``root``."""
    parent, order, _ = rooted(tree, root)
    need = set(terminals) | {root}
    keep = set()
    for x in reversed(order):
        if x in need:
            keep.add(x)
            if parent[x] is not None:
                need.add(parent[x])
    return keep


def steiner_weight(tree, terminals) -> Fraction:
    terminals = set(terminals)
    if len(terminals) <= 1:
        return Fraction(0)
    root = min(terminals)
    parent, _, weight = rooted(tree, root)
    keep = steiner_nodes(tree, terminals, root)
    return sum((weight[x] for x in keep if parent[x] is not None), Fraction(0))


def tree_walk(tree, terminals, s, t) -> list:
    """Shortest walk from ``s`` to ``t`` through every terminal, as a node list.

    Depth-first over the Steiner subtree with doubled side branches; children
    in node-id order, the branch toward ``t`` last.  Its length is
    ``2 * steiner_weight - d(s, t)``.
    """
    parent, _, _ = rooted(tree, s)
    keep = steiner_nodes(tree, set(terminals) | {t}, s)
    children = {x: [] for x in keep}
    for x in sorted(keep):
        if parent[x] is not None:
            children[parent[x]].append(x)
    on_path = set()
    x = t
    while x is not None:
        on_path.add(x)
        x = parent[x]

    walk = [s]

    def visit(u):
        kids = sorted(children[u], key=lambda c: (c in on_path, c))
        for c in kids:
            walk.append(c)
            visit(c)
            if c not in on_path:
                walk.append(u)

    visit(s)
    return walk


def walk_length(metric, walk) -> Fraction:
    return sum((metric.d(a, b) for a, b in zip(walk, walk[1:])), Fraction(0))


def first_visits(metric, walk) -> dict:
    """``node -> arc position`` of each node's first appearance on ``walk``."""
    pos = Fraction(0)
    out = {walk[0]: pos}
    for a, b in zip(walk, walk[1:]):
        pos += metric.d(a, b)
        out.setdefault(b, pos)
    return out
