"""Hamilton decompositions of complete and complete bipartite cluster
graphs: the scaffolding every blow-up decomposition hangs on.

Run:  python demos/01_classical_decompositions.py
"""

from hamdec import bipartite_hamilton_decompose, walecki_decompose

print("=== Complete graph on an odd number of clusters ===")
K = 7
cycles = walecki_decompose(K)
print(f"K_{K} splits into {len(cycles)} Hamilton cycles:")
for j, c in enumerate(cycles):
    print(f"  cycle {j}: " + " -> ".join(map(str, c.order)))
edges = set()
for c in cycles:
    assert not (c.undirected_edge_set() & edges), "cycles overlap!"
    edges |= c.undirected_edge_set()
print(f"edge-disjoint: yes; covered {len(edges)} = K(K-1)/2 = "
      f"{K * (K - 1) // 2} edges\n")

print("=== Complete balanced bipartite cluster graph ===")
K = 6
cycles = bipartite_hamilton_decompose(K)
print(f"K_{{{K},{K}}} splits into {len(cycles)} Hamilton cycles "
      f"(A-clusters are 0..{K - 1}, B-clusters are {K}..{2 * K - 1}):")
for j, c in enumerate(cycles):
    labels = [f"A{i}" if i < K else f"B{i - K}" for i in c.order]
    print(f"  cycle {j}: " + " ".join(labels))
edges = set()
for c in cycles:
    edges |= c.undirected_edge_set()
print(f"covered {len(edges)} = K^2 = {K * K} cluster pairs")
