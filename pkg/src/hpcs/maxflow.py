"""Boykov-Kolmogorov s-t max-flow on float capacities.

The graph is given as directed arcs in sister pairs: arc ``2e`` and its
reverse ``2e + 1`` (so ``sister(a) == a ^ 1``). Terminal capacities are
folded into one signed value per node: positive means an edge from the
source, negative an edge to the sink.
"""

import numpy as np
from numba import njit

_FREE, _SOURCE, _SINK = 0, 1, 2
_ORPHAN, _TERMINAL = -1, -2
_INF_D = 1 << 60


@njit(cache=True)
def _bk_maxflow(n, tr_cap, heads, rcap, out_ptr, out_arcs):
    tree = np.zeros(n, dtype=np.int8)
    parent = np.full(n, _ORPHAN, dtype=np.int64)
    ts = np.zeros(n, dtype=np.int64)
    dist = np.zeros(n, dtype=np.int64)

    # FIFO of active nodes (ring buffer); a node is queued at most once
    qsize = n + 1
    active = np.empty(qsize, dtype=np.int64)
    in_q = np.zeros(n, dtype=np.bool_)
    qh = 0
    qt = 0
    orphans = np.empty(qsize, dtype=np.int64)

    for v in range(n):
        c = tr_cap[v]
        if c != 0.0:
            tree[v] = _SOURCE if c > 0.0 else _SINK
            parent[v] = _TERMINAL
            dist[v] = 1
            active[qt] = v
            qt = (qt + 1) % qsize
            in_q[v] = True

    flow = 0.0
    time = 0
    current = -1
    while True:
        v = -1
        if current >= 0:
            in_q[current] = False
            if tree[current] != _FREE:
                v = current
            current = -1
        while v < 0 and qh != qt:
            u = active[qh]
            qh = (qh + 1) % qsize
            in_q[u] = False
            if tree[u] != _FREE:
                v = u
        if v < 0:
            break

        # growth
        bridge = -1
        if tree[v] == _SOURCE:
            for k in range(out_ptr[v], out_ptr[v + 1]):
                a = out_arcs[k]
                if rcap[a] > 0.0:
                    u = heads[a]
                    if tree[u] == _FREE:
                        tree[u] = _SOURCE
                        parent[u] = a ^ 1
                        ts[u] = ts[v]
                        dist[u] = dist[v] + 1
                        if not in_q[u]:
                            active[qt] = u
                            qt = (qt + 1) % qsize
                            in_q[u] = True
                    elif tree[u] == _SINK:
                        bridge = a
                        break
                    elif ts[u] <= ts[v] and dist[u] > dist[v]:
                        parent[u] = a ^ 1
                        ts[u] = ts[v]
                        dist[u] = dist[v] + 1
        else:
            for k in range(out_ptr[v], out_ptr[v + 1]):
                a = out_arcs[k]
                if rcap[a ^ 1] > 0.0:
                    u = heads[a]
                    if tree[u] == _FREE:
                        tree[u] = _SINK
                        parent[u] = a ^ 1
                        ts[u] = ts[v]
                        dist[u] = dist[v] + 1
                        if not in_q[u]:
                            active[qt] = u
                            qt = (qt + 1) % qsize
                            in_q[u] = True
                    elif tree[u] == _SOURCE:
                        bridge = a ^ 1
                        break
                    elif ts[u] <= ts[v] and dist[u] > dist[v]:
                        parent[u] = a ^ 1
                        ts[u] = ts[v]
                        dist[u] = dist[v] + 1

        time += 1
        if bridge < 0:
            continue

        # keep v as the current node; it stays flagged active meanwhile
        current = v
        in_q[v] = True

        # augmentation along source-tree path, bridge arc, sink-tree path
        s_node = heads[bridge ^ 1]
        t_node = heads[bridge]
        f = rcap[bridge]
        x = s_node
        while parent[x] != _TERMINAL:
            a = parent[x]
            if rcap[a ^ 1] < f:
                f = rcap[a ^ 1]
            x = heads[a]
        if tr_cap[x] < f:
            f = tr_cap[x]
        x = t_node
        while parent[x] != _TERMINAL:
            a = parent[x]
            if rcap[a] < f:
                f = rcap[a]
            x = heads[a]
        if -tr_cap[x] < f:
            f = -tr_cap[x]

        rcap[bridge] -= f
        rcap[bridge ^ 1] += f
        oh = 0
        ot = 0
        x = s_node
        while True:
            a = parent[x]
            if a == _TERMINAL:
                tr_cap[x] -= f
                if tr_cap[x] == 0.0:
                    parent[x] = _ORPHAN
                    orphans[ot] = x
                    ot = (ot + 1) % qsize
                break
            rcap[a] += f
            rcap[a ^ 1] -= f
            nxt = heads[a]
            if rcap[a ^ 1] == 0.0:
                parent[x] = _ORPHAN
                orphans[ot] = x
                ot = (ot + 1) % qsize
            x = nxt
        x = t_node
        while True:
            a = parent[x]
            if a == _TERMINAL:
                tr_cap[x] += f
                if tr_cap[x] == 0.0:
                    parent[x] = _ORPHAN
                    orphans[ot] = x
                    ot = (ot + 1) % qsize
                break
            rcap[a ^ 1] += f
            rcap[a] -= f
            nxt = heads[a]
            if rcap[a] == 0.0:
                parent[x] = _ORPHAN
                orphans[ot] = x
                ot = (ot + 1) % qsize
            x = nxt
        flow += f

        # adoption
        while oh != ot:
            x = orphans[oh]
            oh = (oh + 1) % qsize
            side = tree[x]
            best = -1
            dmin = _INF_D
            for k in range(out_ptr[x], out_ptr[x + 1]):
                a0 = out_arcs[k]
                cap = rcap[a0 ^ 1] if side == _SOURCE else rcap[a0]
                if cap <= 0.0:
                    continue
                j = heads[a0]
                if tree[j] != side or parent[j] == _ORPHAN:
                    continue
                d = 0
                while True:
                    if ts[j] == time:
                        d += dist[j]
                        break
                    pa = parent[j]
                    d += 1
                    if pa == _TERMINAL:
                        ts[j] = time
                        dist[j] = 1
                        break
                    if pa == _ORPHAN:
                        d = _INF_D
                        break
                    j = heads[pa]
                if d < _INF_D:
                    if d < dmin:
                        best = a0
                        dmin = d
                    j = heads[a0]
                    while ts[j] != time:
                        ts[j] = time
                        dist[j] = d
                        d -= 1
                        j = heads[parent[j]]
            if best >= 0:
                parent[x] = best
                ts[x] = time
                dist[x] = dmin + 1
                continue
            # no valid parent: x leaves its tree
            for k in range(out_ptr[x], out_ptr[x + 1]):
                a0 = out_arcs[k]
                j = heads[a0]
                if tree[j] != side:
                    continue
                cap = rcap[a0 ^ 1] if side == _SOURCE else rcap[a0]
                if cap > 0.0 and not in_q[j]:
                    active[qt] = j
                    qt = (qt + 1) % qsize
                    in_q[j] = True
                pa = parent[j]
                if pa >= 0 and heads[pa] == x:
                    parent[j] = _ORPHAN
                    orphans[ot] = j
                    ot = (ot + 1) % qsize
            tree[x] = _FREE
            parent[x] = _ORPHAN

    return flow, tree == _SOURCE


class ArcLayout:
    """Fixed arc structure for an undirected edge list, reused across solves."""

    def __init__(self, n, edges):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        self.n = int(n)
        self.edges = edges
        m = len(edges)
        heads = np.empty(2 * m, dtype=np.int64)
        heads[0::2] = edges[:, 1]
        heads[1::2] = edges[:, 0]
        tails = np.empty(2 * m, dtype=np.int64)
        tails[0::2] = edges[:, 0]
        tails[1::2] = edges[:, 1]
        order = np.argsort(tails, kind="stable")
        self.heads = heads
        self.out_arcs = order.astype(np.int64)
        self.out_ptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(tails, minlength=self.n), out=self.out_ptr[1:])

    def solve(self, terminal, cap_forward, cap_backward=None):
        """Max-flow with per-edge capacities ``p -> q`` (forward) and ``q -> p``.

        ``terminal[v] > 0`` is a source edge of that capacity, ``< 0`` a sink
        edge. Returns ``(flow, source_side)``; nodes not reachable from the
        source in the final residual graph are on the sink side.
        """
        m = len(self.edges)
        rcap = np.zeros(2 * m)
        rcap[0::2] = cap_forward
        if cap_backward is not None:
            rcap[1::2] = cap_backward
        tr = np.array(terminal, dtype=np.float64)
        flow, source_side = _bk_maxflow(self.n, tr, self.heads, rcap, self.out_ptr, self.out_arcs)
        return flow, source_side


def maxflow(n, edges, terminal, cap_forward, cap_backward=None):
    """One-shot convenience wrapper around :class:`ArcLayout`."""
    return ArcLayout(n, edges).solve(terminal, cap_forward, cap_backward)
