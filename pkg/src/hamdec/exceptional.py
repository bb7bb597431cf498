"""Exceptional systems and their fictive-edge reductions.

An exceptional system is a sparse path system covering the exceptional
vertices; replacing each of its maximal paths by a single "fictive" edge
between the path's endpoints reduces the decomposition problem to finding
Hamilton cycles on the clusters alone.  The splice operations put the real
paths back and verify the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (ClusterPartition, Digraph, Multigraph,
                   OrderedDirectedMatching, cycle_to_perfect_matchings,
                   is_consistent_with, verify_hamilton_cycle)
from .errors import (InvalidExceptionalSystem, NotConsistent,
                     SpliceVerificationFailed)

KIND_HES = "HES"
KIND_MES = "MES"


def _path_system_or_raise(graph: Multigraph, vertices: set[int], what: str):
    if not graph.is_path_system():
        raise InvalidExceptionalSystem(f"{what}: underlying graph is not a "
                                       "path system")
    if not graph.covered_vertices() <= vertices:
        raise InvalidExceptionalSystem(f"{what}: edge endpoints outside V(J)")


class ExceptionalSystem:
    """A path system J covering V0 in two-cliques mode.

    Validates on construction:
      * J is a path system with V0 <= V(J) <= V,
      * every V0 vertex has degree exactly 2, all others at most 1,
      * no edges inside A or inside B,
      * HES: the number of AB-paths is even and positive,
        MES: no edges between A' and B',
      * at most sqrt(eps0) * n AB-paths,
      * if localized at (i, i'): V(J) inside V0 u A_i u B_i'.
    """

    def __init__(self, partition: ClusterPartition, graph: Multigraph,
                 vertices: set[int] | None = None, eps0: float | None = None,
                 locality: tuple[int, int] | None = None):
        self.partition = partition
        self.graph = graph
        self.vertices = set(vertices) if vertices is not None \
            else graph.covered_vertices() | set(partition.V0)
        self.eps0 = eps0 if eps0 is not None else partition.eps0
        self.locality = locality
        self._validate()

    def _validate(self):
        P = self.partition
        v0 = set(P.V0)
        _path_system_or_raise(self.graph, self.vertices, "exceptional system")
        if not v0 <= self.vertices:
            raise InvalidExceptionalSystem("V0 not fully covered by V(J)")
        for v in self.vertices:
            d = self.graph.degree(v)
            if v in v0:
                if d != 2:
                    raise InvalidExceptionalSystem(
                        f"exceptional vertex {v} has degree {d}, need 2")
            elif d > 1:
                raise InvalidExceptionalSystem(
                    f"non-exceptional vertex {v} has degree {d} > 1")
        a, b = set(P.A), set(P.B)
        for (u, v) in self.graph.support():
            if (u in a and v in a) or (u in b and v in b):
                raise InvalidExceptionalSystem(
                    f"edge ({u},{v}) inside A or inside B")
        n_ab = self.count_ab_paths()
        if n_ab > 0:
            if n_ab % 2 != 0:
                raise InvalidExceptionalSystem(
                    f"odd number of AB-paths ({n_ab})")
            self.kind = KIND_HES
        else:
            ap, bp = set(P.A_prime), set(P.B_prime)
            for (u, v) in self.graph.support():
                if (u in ap) != (v in ap):
                    raise InvalidExceptionalSystem(
                        "zero AB-paths but an A'B'-edge present: neither "
                        "HES nor MES")
            self.kind = KIND_MES
        if self.eps0 is not None:
            limit = math.sqrt(self.eps0) * P.n
            if n_ab > limit:
                raise InvalidExceptionalSystem(
                    f"{n_ab} AB-paths exceed sqrt(eps0)*n = {limit:.2f}")
        if self.locality is not None:
            i, ip = self.locality
            allowed = v0 | set(P.a_cluster(i)) | set(P.b_cluster(ip))
            if not self.vertices <= allowed:
                raise InvalidExceptionalSystem(
                    f"not ({i},{ip})-localized: vertices escape V0+A_i+B_i'")

    def count_ab_paths(self) -> int:
        a, b = set(self.partition.A), set(self.partition.B)
        count = 0
        for path in self.graph.paths():
            ends = {path[0], path[-1]}
            if len(ends & a) == 1 and len(ends & b) == 1:
                count += 1
        return count

    def nontrivial_paths(self) -> list[list[int]]:
        return self.graph.paths()

    def edge_count(self) -> int:
        return self.graph.edge_count()

    def to_json_obj(self) -> dict:
        return {"schema": 1, "kind": self.kind,
                "paths": [p for p in self.graph.paths()],
                "isolated": sorted(self.vertices
                                   - self.graph.covered_vertices()),
                "locality": list(self.locality) if self.locality else None,
                "eps0": self.eps0}

    @classmethod
    def from_json_obj(cls, obj: dict, partition: ClusterPartition):
        edges = []
        verts: set[int] = set(obj.get("isolated", ()))
        for p in obj["paths"]:
            verts.update(p)
            edges.extend((p[i], p[i + 1]) for i in range(len(p) - 1))
        loc = tuple(obj["locality"]) if obj.get("locality") else None
        return cls(partition, Multigraph(partition.n, edges), verts,
                   obj.get("eps0"), loc)


class BalancedExceptionalSystem:
    """A path system J in bipartite mode, localized at (i1, i2, i3, i4).

    Validates (on construction): degree-2 cover of V0 with degree <= 1
    elsewhere; every edge inside A u B is an A_i1 A_i2- or B_i3 B_i4-edge;
    the edges cover equally many A- and B-vertices; e(J) <= eps0 * n; and
    V(J) stays inside A0 u B0 u A_i1 u A_i2 u B_i3 u B_i4.
    """

    kind = "BES"

    def __init__(self, partition: ClusterPartition, graph: Multigraph,
                 vertices: set[int] | None = None, eps0: float | None = None,
                 locality: tuple[int, int, int, int] = None):
        if locality is None or len(locality) != 4:
            raise InvalidExceptionalSystem("BES requires an (i1,i2,i3,i4) tag")
        self.partition = partition
        self.graph = graph
        self.vertices = set(vertices) if vertices is not None \
            else graph.covered_vertices() | set(partition.V0)
        self.eps0 = eps0 if eps0 is not None else partition.eps0
        self.locality = tuple(locality)
        self._validate()

    def _validate(self):
        P = self.partition
        i1, i2, i3, i4 = self.locality
        v0 = set(P.V0)
        _path_system_or_raise(self.graph, self.vertices,
                              "balanced exceptional system")
        if not v0 <= self.vertices:
            raise InvalidExceptionalSystem("V0 not fully covered by V(J)")
        allowed = (v0 | set(P.a_cluster(i1)) | set(P.a_cluster(i2))
                   | set(P.b_cluster(i3)) | set(P.b_cluster(i4)))
        if not self.vertices <= allowed:
            raise InvalidExceptionalSystem("vertices escape the four "
                                           "localized clusters")
        for v in self.vertices:
            d = self.graph.degree(v)
            if v in v0:
                if d != 2:
                    raise InvalidExceptionalSystem(
                        f"exceptional vertex {v} has degree {d}, need 2")
            elif d > 1:
                raise InvalidExceptionalSystem(
                    f"vertex {v} has degree {d} > 1")
        a_i1, a_i2 = set(P.a_cluster(i1)), set(P.a_cluster(i2))
        b_i3, b_i4 = set(P.b_cluster(i3)), set(P.b_cluster(i4))
        ab = set(P.A) | set(P.B)
        for (u, v) in self.graph.support():
            if u in ab and v in ab:
                ok_a = ((u in a_i1 and v in a_i2) or (u in a_i2 and v in a_i1))
                ok_b = ((u in b_i3 and v in b_i4) or (u in b_i4 and v in b_i3))
                if not (ok_a or ok_b):
                    raise InvalidExceptionalSystem(
                        f"edge ({u},{v}) inside A u B is neither an "
                        f"A_{i1}A_{i2}- nor a B_{i3}B_{i4}-edge")
        covered = self.graph.covered_vertices()
        ca = len(covered & set(P.A))
        cb = len(covered & set(P.B))
        if ca != cb:
            raise InvalidExceptionalSystem(
                f"edges cover {ca} A-vertices but {cb} B-vertices")
        if self.eps0 is not None and self.graph.edge_count() > self.eps0 * P.n:
            raise InvalidExceptionalSystem(
                f"e(J) = {self.graph.edge_count()} exceeds eps0*n = "
                f"{self.eps0 * P.n:.2f}")

    def nontrivial_paths(self) -> list[list[int]]:
        return self.graph.paths()

    def edge_count(self) -> int:
        return self.graph.edge_count()

    def to_json_obj(self) -> dict:
        return {"schema": 1, "kind": "BES",
                "paths": [p for p in self.graph.paths()],
                "isolated": sorted(self.vertices
                                   - self.graph.covered_vertices()),
                "locality": list(self.locality),
                "eps0": self.eps0}

    @classmethod
    def from_json_obj(cls, obj: dict, partition: ClusterPartition):
        edges = []
        verts: set[int] = set(obj.get("isolated", ()))
        for p in obj["paths"]:
            verts.update(p)
            edges.extend((p[i], p[i + 1]) for i in range(len(p) - 1))
        return cls(partition, Multigraph(partition.n, edges), verts,
                   obj.get("eps0"), tuple(obj["locality"]))


@dataclass
class FictiveReduction:
    """The fictive-edge package for one exceptional system.

    Two-cliques mode fills ja/jb (+ their ordered directed versions);
    bipartite mode fills jstar directly.  ``jab`` is the endpoint matching
    induced by the maximal paths in every mode.
    """

    jab: Multigraph
    jstar: Multigraph
    ja: Multigraph | None = None
    jb: Multigraph | None = None
    ja_dir: OrderedDirectedMatching | None = None
    jb_dir: OrderedDirectedMatching | None = None
    jstar_dir: OrderedDirectedMatching | None = None
    ab_enumeration: tuple = ()


def induce_jab(system) -> Multigraph:
    """The matching joining the endpoints of each nontrivial path of J."""
    n = system.partition.n
    edges = []
    for path in system.nontrivial_paths():
        edges.append((path[0], path[-1]))
    jab = Multigraph(n, edges)
    if not jab.is_matching():
        raise InvalidExceptionalSystem("induced endpoint graph is not a "
                                       "matching (axiom violation upstream)")
    return jab


def build_fictive_two_cliques(system: ExceptionalSystem) -> FictiveReduction:
    """Construct J*_A, J*_B and their ordered directed versions.

    The AB-edges of J*_AB are enumerated x1y1,...,x_{2l}y_{2l} sorted by
    A-endpoint; J*_A adds the edges x_{2i-1}x_{2i}, J*_B the edges
    y_{2i}y_{2i+1} (indices mod 2l).  Orientations inside J*_AB[A] and
    J*_AB[B] are fixed low id -> high id.
    """
    P = system.partition
    jab = induce_jab(system)
    a, b = set(P.A), set(P.B)
    aa_edges, bb_edges, ab_edges = [], [], []
    for (u, v) in jab.support():
        if u in a and v in a:
            aa_edges.append((min(u, v), max(u, v)))
        elif u in b and v in b:
            bb_edges.append((min(u, v), max(u, v)))
        else:
            x, y = (u, v) if u in a else (v, u)
            ab_edges.append((x, y))
    ab_edges.sort()
    aa_edges.sort()
    bb_edges.sort()
    if len(ab_edges) % 2 != 0:
        raise InvalidExceptionalSystem(
            f"odd number of AB-connections ({len(ab_edges)})")
    ell = len(ab_edges) // 2
    xs = [x for (x, _y) in ab_edges]
    ys = [y for (_x, y) in ab_edges]
    ja_cross = [(xs[2 * i], xs[2 * i + 1]) for i in range(ell)]
    jb_cross = [(ys[(2 * i + 1) % (2 * ell)], ys[(2 * i + 2) % (2 * ell)])
                for i in range(ell)]
    ja = Multigraph(P.n, aa_edges + ja_cross)
    jb = Multigraph(P.n, bb_edges + jb_cross)
    jstar = ja + jb
    if not (ja.is_matching() and jb.is_matching() and jstar.is_matching()):
        raise InvalidExceptionalSystem("fictive graphs are not matchings")
    if jstar.edge_count() != jab.edge_count():
        raise InvalidExceptionalSystem("e(J*) != e(J*_AB)")
    ja_dir = OrderedDirectedMatching(tuple(ja_cross) + tuple(aa_edges))
    jb_dir = OrderedDirectedMatching(tuple(jb_cross) + tuple(bb_edges))
    return FictiveReduction(jab=jab, jstar=jstar, ja=ja, jb=jb,
                            ja_dir=ja_dir, jb_dir=jb_dir,
                            ab_enumeration=tuple(ab_edges))


def build_fictive_bipartite(system: BalancedExceptionalSystem
                            ) -> FictiveReduction:
    """Construct J* = {x_i y_i} for a balanced exceptional system.

    With E(J*_AB[A]) = {x1x2,...,x_{2s-1}x_{2s}},
    E(J*_AB[B]) = {y1y2,...}, E(J*_AB[A,B]) = {x_{2s+1}y_{2s+1},...},
    J* joins x_i to y_i and is ordered/oriented by index.
    """
    P = system.partition
    jab = induce_jab(system)
    a, b = set(P.A), set(P.B)
    aa_edges, bb_edges, ab_edges = [], [], []
    for (u, v) in jab.support():
        if u in a and v in a:
            aa_edges.append((min(u, v), max(u, v)))
        elif u in b and v in b:
            bb_edges.append((min(u, v), max(u, v)))
        else:
            x, y = (u, v) if u in a else (v, u)
            ab_edges.append((x, y))
    aa_edges.sort()
    bb_edges.sort()
    ab_edges.sort()
    if len(aa_edges) != len(bb_edges):
        raise InvalidExceptionalSystem(
            f"e(J*_AB[A]) = {len(aa_edges)} != e(J*_AB[B]) = "
            f"{len(bb_edges)}; violates the balance axiom")
    xs: list[int] = []
    ys: list[int] = []
    for (u, v) in aa_edges:
        xs.extend((u, v))
    for (u, v) in bb_edges:
        ys.extend((u, v))
    for (x, y) in ab_edges:
        xs.append(x)
        ys.append(y)
    arcs = tuple(zip(xs, ys))
    jstar = Multigraph(P.n, list(arcs))
    if not jstar.is_matching():
        raise InvalidExceptionalSystem("J* is not a matching")
    if jstar.edge_count() != jab.edge_count():
        raise InvalidExceptionalSystem("e(J*) != e(J*_AB)")
    return FictiveReduction(jab=jab, jstar=jstar,
                            jstar_dir=OrderedDirectedMatching(arcs),
                            ab_enumeration=tuple(ab_edges))


def splice_two_cliques(c_a_dir: Digraph, c_b_dir: Digraph,
                       system: ExceptionalSystem,
                       reduction: FictiveReduction) -> Multigraph:
    """C_A + C_B - J* + J, with pre- and post-verification.

    For an HES the result is a Hamilton cycle on all of V; for an MES it
    is the vertex-disjoint union of a Hamilton cycle on A' and one on B'.
    """
    P = system.partition
    a, b = set(P.A), set(P.B)
    if not verify_hamilton_cycle(c_a_dir, a):
        raise NotConsistent("C_A is not a directed Hamilton cycle on A")
    if not verify_hamilton_cycle(c_b_dir, b):
        raise NotConsistent("C_B is not a directed Hamilton cycle on B")
    if not is_consistent_with(c_a_dir, reduction.ja_dir):
        raise NotConsistent("C_A is not consistent with J*_A,dir")
    if not is_consistent_with(c_b_dir, reduction.jb_dir):
        raise NotConsistent("C_B is not consistent with J*_B,dir")
    result = (c_a_dir.underlying_multigraph()
              + c_b_dir.underlying_multigraph()
              - reduction.jstar + system.graph)
    a_pr, b_pr = set(P.A_prime), set(P.B_prime)
    if system.kind == KIND_HES:
        ok = verify_hamilton_cycle(result, a_pr | b_pr)
    else:
        ok = (verify_hamilton_cycle(result.restrict(a_pr), a_pr)
              and verify_hamilton_cycle(result.restrict(b_pr), b_pr)
              and result.edges_between(a_pr, b_pr) == 0)
    if not ok:
        raise SpliceVerificationFailed(
            f"splice output failed {system.kind} verification")
    return result


def splice_bipartite(d_dir: Digraph, system: BalancedExceptionalSystem,
                     reduction: FictiveReduction) -> Multigraph:
    """D - J* + J for the bipartite case; output verified Hamiltonian."""
    P = system.partition
    ab = set(P.A) | set(P.B)
    if not verify_hamilton_cycle(d_dir, ab):
        raise NotConsistent("D is not a directed Hamilton cycle on A u B")
    if not is_consistent_with(d_dir, reduction.jstar_dir):
        raise NotConsistent("D is not consistent with J*_dir")
    result = d_dir.underlying_multigraph() - reduction.jstar + system.graph
    everything = ab | set(P.V0)
    if not verify_hamilton_cycle(result, everything):
        raise SpliceVerificationFailed("splice output is not a Hamilton "
                                       "cycle on V")
    return result


def mes_output_matchings(result: Multigraph, partition: ClusterPartition
                         ) -> tuple[Multigraph, Multigraph]:
    """Split an MES splice output into two edge-disjoint perfect matchings
    (requires |A'| and |B'| even)."""
    a_pr, b_pr = set(partition.A_prime), set(partition.B_prime)
    ma1, ma2 = cycle_to_perfect_matchings(result.restrict(a_pr), a_pr)
    mb1, mb2 = cycle_to_perfect_matchings(result.restrict(b_pr), b_pr)
    return ma1 + mb1, ma2 + mb2
