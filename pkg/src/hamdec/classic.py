"""Classical decomposition primitives used as black boxes elsewhere:
the zig-zag Hamilton decomposition of complete graphs on an odd number
of clusters, the Hamilton decomposition of complete balanced bipartite
graphs on an even number of clusters per side, flow-based extraction of
regular spanning subgraphs, and exact 1-factorization of regular
bipartite multigraphs by repeated Euler splits.
"""

from __future__ import annotations

from collections import deque
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .core import ClusterCycle, Multigraph
from .errors import (DegreeHypothesisViolated, InvalidParameter,
                     MatchingInfeasible)


def walecki_decompose(K: int) -> list[ClusterCycle]:
    """Decompose the complete graph on cluster indices 0..K-1 (K odd) into
    (K-1)/2 edge-disjoint Hamilton cycles.

    Uses the classical zig-zag construction around a fixed hub vertex;
    each cycle is oriented in construction order (any orientation works
    downstream, so a deterministic one is fixed here).
    """
    if K < 3 or K % 2 == 0:
        raise InvalidParameter(f"K must be odd and >= 3, got {K}")
    hub = K - 1
    t = (K - 1) // 2  # number of cycles; ring Z_{2t} on 0..K-2
    ring = K - 1
    base = [0]
    for step in range(1, t + 1):
        base.append(step)
        if len(base) < ring:
            base.append(-step % ring)
    cycles = []
    for j in range(t):
        order = [hub] + [(x + j) % ring for x in base]
        cycles.append(ClusterCycle(tuple(order)))
    return cycles


def bipartite_hamilton_decompose(K: int) -> list[ClusterCycle]:
    """Decompose the complete bipartite graph between A-clusters 0..K-1 and
    B-clusters 0..K-1 (K even) into K/2 Hamilton cycles on the 2K clusters.

    Cluster indices follow the A1..AK, B1..BK convention: A_i is index i
    and B_i is index K + i.  Cycle j alternates a_i -> b_{i+2j} -> a_{i+1},
    using exactly the two difference classes {2j, 2j-1}.
    """
    if K < 2 or K % 2 == 1:
        raise InvalidParameter(f"K must be even and >= 2, got {K}")
    cycles = []
    for j in range(K // 2):
        order = []
        for i in range(K):
            order.append(i)                      # A_i
            order.append(K + (i + 2 * j) % K)    # B_{i+2j}
        cycles.append(ClusterCycle(tuple(order)))
    return cycles


# -- flow-based regular spanning subgraphs -----------------------------------


def regular_spanning_subgraph(gamma_graph: Multigraph, left: Sequence[int],
                              right: Sequence[int], mu: float, rho: float,
                              degree: int | None = None) -> Multigraph:
    """Extract a spanning r-regular subgraph of a bipartite (multi)graph
    with classes ``left`` and ``right`` of equal size m, where
    r = floor((1 - mu - rho) * m) unless ``degree`` overrides it.

    Realized as an integral max-flow on the source/sink network with unit
    (multiplicity) capacities on the graph edges.  If the flow value falls
    short, raises DegreeHypothesisViolated carrying a cut witness (S1, S2)
    with e(S1, right \\ S2) < r * (|S1| - |S2|).
    """
    m = len(left)
    if m != len(right) or m == 0:
        raise InvalidParameter("classes must be nonempty and of equal size")
    if degree is None:
        if not (0 <= mu <= 0.25) or rho < 0:
            raise InvalidParameter(f"need 0 <= mu <= 1/4 and rho >= 0, "
                                   f"got mu={mu}, rho={rho}")
    r = int((1 - mu - rho) * m) if degree is None else degree
    if r < 0 or r > m:
        raise InvalidParameter(f"target degree {r} outside 0..{m}")
    if r == 0:
        return Multigraph(gamma_graph.n)

    lpos = {v: i for i, v in enumerate(left)}
    rpos = {v: i for i, v in enumerate(right)}
    # network nodes: 0 = source, 1..m = left, m+1..2m = right, 2m+1 = sink
    src, snk = 0, 2 * m + 1
    rows, cols, caps = [], [], []
    pair_index = {}
    for (u, v, k) in gamma_graph.edges():
        if u in lpos and v in rpos:
            a, b = lpos[u] + 1, rpos[v] + m + 1
        elif v in lpos and u in rpos:
            a, b = lpos[v] + 1, rpos[u] + m + 1
            u, v = v, u
        else:
            continue
        pair_index[(a, b)] = (u, v)
        rows.append(a)
        cols.append(b)
        caps.append(k)
    for i in range(m):
        rows.append(src)
        cols.append(i + 1)
        caps.append(r)
        rows.append(m + 1 + i)
        cols.append(snk)
        caps.append(r)
    graph = csr_matrix((np.array(caps, dtype=np.int32),
                        (np.array(rows), np.array(cols))),
                       shape=(2 * m + 2, 2 * m + 2))
    result = maximum_flow(graph, src, snk)
    if result.flow_value == r * m:
        block = result.flow[1:m + 1, m + 1:2 * m + 1].toarray()
        edges = []
        for (a, b), (u, v) in pair_index.items():
            f = block[a - 1, b - m - 1]
            if f > 0:
                edges.append((u, v, int(f)))
        return Multigraph(gamma_graph.n, edges)

    # short flow: extract the min cut from residual reachability and
    # translate it into the degree-hypothesis witness
    s1, s2 = _min_cut_witness(graph, result.flow, src, m)
    s1_v = [left[i] for i in sorted(s1)]
    s2_v = [right[i] for i in sorted(s2)]
    rbar = [v for v in right if v not in set(s2_v)]
    e_val = gamma_graph.edges_between(s1_v, rbar)
    raise DegreeHypothesisViolated(
        f"max flow {result.flow_value} < r*m = {r * m}; cut witness "
        f"violates e(S1, ~S2) >= r(|S1|-|S2|): {e_val} < "
        f"{r * (len(s1_v) - len(s2_v))}",
        witness={"S1": s1_v, "S2": s2_v, "r": r, "e(S1,~S2)": e_val})


def _min_cut_witness(graph: csr_matrix, flow: csr_matrix, src: int, m: int):
    """Residual BFS from the source; returns (S1, S2) as index sets into
    the left/right classes."""
    # the flow matrix is antisymmetric, so graph - flow has positive
    # entries exactly on usable forward and backward residual arcs
    residual = (graph - flow).tocsr()
    n = graph.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[src] = True
    queue = deque([src])
    while queue:
        x = queue.popleft()
        row = residual[x]
        for y, c in zip(row.indices, row.data):
            if c > 0 and not seen[y]:
                seen[y] = True
                queue.append(y)
    s1 = [i for i in range(m) if seen[i + 1]]
    s2 = [i for i in range(m) if seen[m + 1 + i]]
    return s1, s2


# -- Hopcroft-Karp maximum matching ------------------------------------------


def hopcroft_karp(adj: list[list[int]], n_right: int) -> list[int]:
    """Maximum bipartite matching; adj[u] lists right-neighbours of left
    vertex u.  Returns match_left with match_left[u] = matched right vertex
    or -1.  Deterministic given the adjacency order."""
    n_left = len(adj)
    INF = n_left + n_right + 1
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0] * n_left

    def bfs() -> bool:
        queue = deque()
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w == -1:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = match_r[v]
            if w == -1 or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = INF
        return False

    while bfs():
        for u in range(n_left):
            if match_l[u] == -1:
                dfs(u)
    return match_l


def perfect_matching(graph: Multigraph, left: Sequence[int],
                     right: Sequence[int]) -> list[tuple[int, int]]:
    """A perfect matching between ``left`` and ``right`` using edges of
    ``graph``; raises MatchingInfeasible with a Hall violator otherwise."""
    lpos = {v: i for i, v in enumerate(left)}
    rpos = {v: i for i, v in enumerate(right)}
    adj: list[list[int]] = [[] for _ in left]
    for (u, v, _k) in graph.edges():
        if u in lpos and v in rpos:
            adj[lpos[u]].append(rpos[v])
        elif v in lpos and u in rpos:
            adj[lpos[v]].append(rpos[u])
    for row in adj:
        row.sort()
    match_l = hopcroft_karp(adj, len(right))
    if all(x != -1 for x in match_l):
        return [(left[i], right[match_l[i]]) for i in range(len(left))]
    violator = _hall_violator(adj, match_l, len(right))
    raise MatchingInfeasible(
        f"no perfect matching between classes of size {len(left)}",
        witness={"S": [left[i] for i in violator],
                 "N(S)": sorted({right[v] for i in violator for v in adj[i]})})


def _hall_violator(adj, match_l, n_right) -> list[int]:
    """Alternating-reachability set from the unmatched left vertices;
    its neighbourhood is smaller than itself."""
    match_r = [-1] * n_right
    for u, v in enumerate(match_l):
        if v != -1:
            match_r[v] = u
    frontier = [u for u, v in enumerate(match_l) if v == -1]
    reach = set(frontier)
    queue = deque(frontier)
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            w = match_r[v]
            if w != -1 and w not in reach:
                reach.add(w)
                queue.append(w)
    return sorted(reach)


# -- exact 1-factorization of regular bipartite multigraphs ------------------


def regular_bipartite_to_matchings(graph: Multigraph, left: Sequence[int],
                                   right: Sequence[int]) -> list[Multigraph]:
    """Decompose an r-regular bipartite multigraph exactly into r perfect
    matchings (Euler splits down to matchings, peeling one matching via
    augmenting paths whenever the degree is odd)."""
    left = list(left)
    right = list(right)
    degs = {graph.degree(v) for v in left} | {graph.degree(v) for v in right}
    if len(degs) != 1:
        raise InvalidParameter(f"graph is not regular: degrees {sorted(degs)}")
    r = degs.pop()
    if r == 0:
        return []
    vs = set(left) | set(right)
    for (u, v) in graph.support():
        if not ((u in vs) and (v in vs)):
            raise InvalidParameter("graph has edges outside the two classes")
        if (u in set(left)) == (v in set(left)):
            raise InvalidParameter("graph is not bipartite on the classes")
    matchings = _factorize(graph, left, right, r)
    # exactness check: concatenating outputs reproduces the input
    total = Multigraph(graph.n)
    for m in matchings:
        total = total + m
    if total != graph:
        raise InvalidParameter("internal: factorization does not sum to input")
    return matchings


def _factorize(graph: Multigraph, left, right, r: int) -> list[Multigraph]:
    if r == 0:
        return []
    if r == 1:
        return [graph]
    if r % 2 == 1:
        pm_edges = perfect_matching(graph, left, right)
        pm = Multigraph(graph.n, pm_edges)
        rest = graph - pm
        return [pm] + _factorize(rest, left, right, r - 1)
    g1, g2 = _euler_split(graph)
    return (_factorize(g1, left, right, r // 2)
            + _factorize(g2, left, right, r // 2))


def _euler_split(graph: Multigraph) -> tuple[Multigraph, Multigraph]:
    """Split an even-degree bipartite multigraph into two halves by
    alternately colouring the edges of Eulerian circuits."""
    # explicit edge copies with ids so parallel edges are distinct
    edge_list = []
    adj: dict[int, list[int]] = {}
    for (u, v, k) in graph.edges():
        for _ in range(k):
            eid = len(edge_list)
            edge_list.append((u, v))
            adj.setdefault(u, []).append(eid)
            adj.setdefault(v, []).append(eid)
    used = [False] * len(edge_list)
    ptr = {v: 0 for v in adj}
    color = [0] * len(edge_list)
    for start in sorted(adj):
        while ptr[start] < len(adj[start]):
            if used[adj[start][ptr[start]]]:
                ptr[start] += 1
                continue
            # Hierholzer walk from start; in an even-degree graph the walk
            # can only get stuck back at its start, closing a circuit
            circuit = []
            cur = start
            while True:
                row = adj[cur]
                while ptr.get(cur, 0) < len(row) and used[row[ptr[cur]]]:
                    ptr[cur] += 1
                if ptr.get(cur, 0) >= len(row):
                    break
                eid = row[ptr[cur]]
                used[eid] = True
                circuit.append(eid)
                a, b = edge_list[eid]
                cur = b if cur == a else a
            for i, eid in enumerate(circuit):
                color[eid] = i % 2
    e0 = [edge_list[i] for i in range(len(edge_list)) if color[i] == 0]
    e1 = [edge_list[i] for i in range(len(edge_list)) if color[i] == 1]
    return Multigraph(graph.n, e0), Multigraph(graph.n, e1)


def split_regular(graph: Multigraph, left: Sequence[int], right: Sequence[int],
                  t: int, s: int) -> list[Multigraph]:
    """Split an r-regular bipartite multigraph into t edge-disjoint
    s-regular spanning subgraphs (t*s <= r); grouping of the matchings
    from the full 1-factorization."""
    degs = {graph.degree(v) for v in list(left) + list(right)}
    if len(degs) != 1:
        raise InvalidParameter(f"graph is not regular: degrees {sorted(degs)}")
    r = degs.pop()
    if t * s > r:
        raise InvalidParameter(f"t*s = {t * s} exceeds regularity {r}")
    if t == 1 and s == r:
        return [graph]
    matchings = regular_bipartite_to_matchings(graph, left, right)
    out = []
    for i in range(t):
        part = Multigraph(graph.n)
        for m in matchings[i * s:(i + 1) * s]:
            part = part + m
        out.append(part)
    return out
