"""Max-flow and general-graph matching used by the (2,0) and (1,1) solvers."""

from __future__ import annotations

from collections import deque
from typing import Hashable, Sequence

INF = float("inf")


class FlowNetwork:
    """Directed network with exact integer capacities; ``None`` means unbounded."""

    def __init__(self):
        self.residual: dict[Hashable, dict[Hashable, float]] = {}
        self.original: dict[tuple, float] = {}

    def add_edge(self, u: Hashable, v: Hashable, capacity: int | None = None) -> None:
        cap = INF if capacity is None else capacity
        self.residual.setdefault(u, {})
        self.residual.setdefault(v, {})
        self.residual[u][v] = self.residual[u].get(v, 0) + cap
        self.residual[v].setdefault(u, 0)
        self.original[(u, v)] = self.original.get((u, v), 0) + cap

    def _bfs(self, s, t):
        parent = {s: None}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v, cap in self.residual[u].items():
                if cap > 0 and v not in parent:
                    parent[v] = u
                    if v == t:
                        return parent
                    queue.append(v)
        return None

    def max_flow(self, s: Hashable, t: Hashable) -> int:
        """Edmonds-Karp: augment along shortest residual paths.

        The number of augmentations is O(VE) whatever the capacities are, so
        counts like 2**40 cost no more than small ones.
        """
        if s not in self.residual or t not in self.residual:
            return 0
        total = 0
        while True:
            parent = self._bfs(s, t)
            if parent is None:
                return total
            push = INF
            v = t
            while parent[v] is not None:
                u = parent[v]
                push = min(push, self.residual[u][v])
                v = u
            if push == INF:
                raise ValueError("unbounded flow: a path of infinite capacity joins s and t")
            push = int(push)
            v = t
            while parent[v] is not None:
                u = parent[v]
                self.residual[u][v] -= push
                self.residual[v][u] += push
                v = u
            total += push

    def flow(self, u: Hashable, v: Hashable) -> int:
        """Flow pushed along ``u -> v``; assumes no antiparallel edge ``v -> u``."""
        return int(self.residual[v][u] - self.original.get((v, u), 0))


def maximum_matching(n: int, adj: Sequence[Sequence[int]]) -> list[int]:
    """Maximum cardinality matching in a general graph (Edmonds' blossoms).

    ``adj[v]`` lists the neighbours of vertex ``v``. Returns ``mate`` with
    ``mate[v] == -1`` for unmatched vertices. O(n**3).
    """
    mate = [-1] * n
    # greedy start; the augmenting phase only has to fix what remains
    for v in range(n):
        if mate[v] == -1:
            for w in adj[v]:
                if w != v and mate[w] == -1:
                    mate[v], mate[w] = w, v
                    break

    for root in range(n):
        if mate[root] != -1:
            continue
        end, p = _find_augmenting_path(n, adj, mate, root)
        while end != -1:
            pv = p[end]
            nxt = mate[pv]
            mate[end], mate[pv] = pv, end
            end = nxt
    return mate


def _find_augmenting_path(n, adj, mate, root):
    used = [False] * n
    p = [-1] * n
    base = list(range(n))
    used[root] = True
    queue = deque([root])

    def lca(a, b):
        seen = [False] * n
        while True:
            a = base[a]
            seen[a] = True
            if mate[a] == -1:
                break
            a = p[mate[a]]
        while True:
            b = base[b]
            if seen[b]:
                return b
            b = p[mate[b]]

    def mark_path(v, b, child, blossom):
        while base[v] != b:
            blossom[base[v]] = blossom[base[mate[v]]] = True
            p[v] = child
            child = mate[v]
            v = p[mate[v]]

    while queue:
        v = queue.popleft()
        for to in adj[v]:
            if base[v] == base[to] or mate[v] == to:
                continue
            if to == root or (mate[to] != -1 and p[mate[to]] != -1):
                cur = lca(v, to)
                blossom = [False] * n
                mark_path(v, cur, to, blossom)
                mark_path(to, cur, v, blossom)
                for i in range(n):
                    if blossom[base[i]]:
                        base[i] = cur
                        if not used[i]:
                            used[i] = True
                            queue.append(i)
            elif p[to] == -1:
                p[to] = v
                if mate[to] == -1:
                    return to, p
                used[mate[to]] = True
                queue.append(mate[to])
    return -1, p
