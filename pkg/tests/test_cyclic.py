import math
import random

import pytest

from hamdec.core import Digraph, Multigraph, winds_around
from hamdec.cyclic import (check_robust_outexpander,
                           check_superregular, reserve_regular, reserve_sparse,
                           sysdecom, sysdecombip, two_cliques_reserve_degree,
                           bipartite_reserve_degree)
from hamdec.errors import SamplingFailed
from hamdec.pipeline import InstanceConfig, generate_instance


def complete_pair(m, thin=0, seed=0):
    left = list(range(m))
    right = list(range(m, 2 * m))
    rng = random.Random(seed)
    skips = set(rng.sample(range(m), thin)) if thin else set()
    edges = [(u, m + (u + s) % m) for u in range(m) for s in range(m)
             if s not in skips]
    return Multigraph(2 * m, edges), left, right


class TestSuperregular:
    def test_complete_k88_exhaustive(self):
        g, left, right = complete_pair(8)
        rep = check_superregular(g, left, right, eps=0.5, d=1.0, d_star=1.0,
                                 c=1.0)
        assert rep.all_ok and rep.reg1_mode == "exhaustive"

    def test_empty_fails_reg4(self):
        g = Multigraph(16)
        rep = check_superregular(g, list(range(8)), list(range(8, 16)),
                                 eps=0.5, d=0.0, d_star=0.1, c=1.0)
        assert not rep.reg4_ok

    def test_codegree_exact(self):
        # two left vertices sharing 3 neighbours
        g = Multigraph(8, [(0, 4), (0, 5), (0, 6), (1, 4), (1, 5), (1, 6)])
        rep = check_superregular(g, [0, 1, 2, 3], [4, 5, 6, 7], eps=0.5,
                                 d=0.2, d_star=0.0, c=0.5)
        assert rep.max_codegree == 3
        assert not rep.reg2_ok  # c^2 m = 1 < 3

    def test_sampled_mode_on_larger_pair(self):
        g, left, right = complete_pair(40)
        rep = check_superregular(g, left, right, eps=0.2, d=1.0, d_star=0.9,
                                 c=1.1, mode="sampled", trials=50,
                                 rng=random.Random(1))
        assert rep.all_ok and rep.reg1_mode == "sampled"

    def test_restriction_stability(self):
        # removing few edges per vertex keeps the relaxed verdicts
        # (instance check of the slicing observation)
        m = 60
        g, left, right = complete_pair(m)
        h, _, rep = reserve_sparse(g, left, right, mu=0.0, gamma=0.15,
                                   eps=0.5, rng_seed=5)
        eps, d, d_star, c = 0.5, 0.3, 0.15, 0.45
        assert rep.all_ok
        # remove up to eps^2*d*m edges at each vertex (here: one matching)
        drop = []
        used = set()
        for (u, v) in h.support():
            if u not in used and v not in used:
                drop.append((u, v))
                used.update((u, v))
        h2 = h - Multigraph(h.n, drop)
        rep2 = check_superregular(h2, left, right, 2 * eps, d,
                                  d_star - eps ** 2 * d, c,
                                  mode="sampled", trials=100,
                                  rng=random.Random(7))
        assert rep2.reg2_ok and rep2.reg3_ok and rep2.reg4_ok


class TestRobustOutexpander:
    def test_complete_digraph(self):
        n = 10
        d = Digraph(n, [(u, v) for u in range(n) for v in range(n) if u != v])
        verdict = check_robust_outexpander(d, nu=0.05, tau=0.2)
        assert verdict.ok and verdict.mode == "exhaustive"

    def test_directed_cycle_fails(self):
        n = 10
        d = Digraph(n, [(i, (i + 1) % n) for i in range(n)])
        verdict = check_robust_outexpander(d, nu=0.2, tau=0.2)
        assert not verdict.ok
        assert verdict.violating_set is not None

    def test_sampled_mode(self):
        n = 30
        rng = random.Random(3)
        arcs = {(u, v) for u in range(n) for v in range(n)
                if u != v and rng.random() < 0.7}
        d = Digraph(n, arcs)
        verdict = check_robust_outexpander(d, nu=0.1, tau=0.25,
                                           mode="sampled", trials=300,
                                           rng=random.Random(4))
        assert verdict.ok and verdict.sets_tested == 300


class TestReserveSparse:
    def test_k200_spec_example(self):
        # the stated outcome bounds on a complete pair: degree window and
        # a loose codegree cap, checked on a direct sample
        m = 200
        g, left, right = complete_pair(m)
        rng = random.Random(99)
        h_edges = [e for e in g.support() if rng.random() < 0.2]
        h = Multigraph(g.n, h_edges)
        rep = check_superregular(h, left, right, eps=0.5, d=0.2, d_star=0.1,
                                 c=0.3, mode="sampled", trials=50,
                                 rng=random.Random(1))
        assert rep.max_degree <= 60
        assert rep.min_degree >= 20
        assert rep.max_codegree <= 900
        g2 = g - h
        assert all((1 - 0.4) * m <= g2.degree(v) <= (1 + 0.4) * m
                   for v in left + right)

    def test_degenerate_gamma_fails_fast(self):
        g, left, right = complete_pair(10)
        with pytest.raises(SamplingFailed):
            reserve_sparse(g, left, right, mu=0.0, gamma=0.03, eps=0.5,
                           rng_seed=1)

    def test_near_regular_host(self):
        m = 100
        g, left, right = complete_pair(m, thin=15, seed=2)  # 85-regular
        h, g2, rep = reserve_sparse(g, left, right, mu=0.15, gamma=0.15,
                                    eps=0.5, rng_seed=3)
        assert rep.all_ok
        assert h + g2 == g
        lo, hi = (1 - 0.15 - 0.6) * m, (1 - 0.15 + 0.6) * m
        assert all(lo <= g2.degree(v) <= hi for v in left + right)

    def test_reserve_regular_exact_degrees(self):
        m = 40
        g, left, right = complete_pair(m, thin=4, seed=5)
        h, g2, rep = reserve_regular(g, left, right, degree=10, eps=0.5,
                                     rng_seed=6)
        assert all(h.degree(v) == 10 for v in left + right)
        assert rep.reg3_ok and rep.reg4_ok
        assert h + g2 == g


class TestReserveDegrees:
    def test_formula_values(self):
        f, used, notes = two_cliques_reserve_degree(
            K=3, m=2000, eps0=1e-4, mu=0.0, rho=0.1, max_matching=3)
        assert f == math.floor(10 * 3 * 0.01 * 2000) == 600
        assert used == f and not notes  # fits the budget share

    def test_clamping(self):
        f, used, notes = two_cliques_reserve_degree(
            K=5, m=40, eps0=0.005, mu=0.0125, rho=0.1, max_matching=2)
        assert f == math.floor(10 * 5 * math.sqrt(0.005) * 40)
        assert used == 4 and notes

    def test_bipartite_formula(self):
        f, used, notes = bipartite_reserve_degree(
            K=4, m=4000, eps0=1e-4, mu=0.0, rho=0.1, need=8)
        assert f == math.floor((44 + 62) * 1e-4 * 4000)
        assert used == f and not notes


@pytest.fixture(scope="module")
def two_cliques_decomposed():
    cfg = InstanceConfig.two_cliques_default(seed=12)
    host, partition, systems = generate_instance(cfg)
    a_slices, b_slices, quotas = sysdecom(host, partition, systems,
                                          mu=cfg.mu, rho=cfg.rho, seed=12)
    return cfg, host, partition, systems, a_slices, b_slices, quotas


class TestSysdecom:
    def test_cluster_cycles_cover(self, two_cliques_decomposed):
        cfg, host, P, systems, a_slices, b_slices, quotas = \
            two_cliques_decomposed
        assert len(a_slices) == (cfg.K - 1) // 2
        seen = set()
        for slc in a_slices:
            seen |= slc.cycle.undirected_edge_set()
        assert len(seen) == cfg.K * (cfg.K - 1) // 2

    def test_slot_partition(self, two_cliques_decomposed):
        cfg, host, P, systems, a_slices, b_slices, quotas = \
            two_cliques_decomposed
        a_idx = [slot.es_index for slc in a_slices for slot in slc.slots]
        assert sorted(a_idx) == list(range(len(systems)))
        b_idx = [slot.es_index for slc in b_slices for slot in slc.slots]
        assert sorted(b_idx) == list(range(len(systems)))

    def test_reserve_regularity_exact(self, two_cliques_decomposed):
        cfg, host, P, systems, a_slices, b_slices, quotas = \
            two_cliques_decomposed
        r = quotas.reserve_degree_used
        for slc in a_slices:
            for i in range(cfg.K):
                for ip in range(i + 1, cfg.K):
                    pair = slc.h_reserve.bipartite_restrict(
                        P.a_cluster(i), P.a_cluster(ip))
                    degs = {pair.degree(v)
                            for v in P.a_cluster(i) + P.a_cluster(ip)}
                    assert degs == {r}

    def test_edge_disjointness_ledger(self, two_cliques_decomposed):
        cfg, host, P, systems, a_slices, b_slices, quotas = \
            two_cliques_decomposed
        total = Multigraph(host.n)
        for slc in a_slices:
            total = total + slc.g_dir.underlying_multigraph()
            total = total + slc.h_reserve
        assert total.is_simple()
        assert total.is_submultigraph_of(host.restrict(P.A))

    def test_winding_and_slot_bounds(self, two_cliques_decomposed):
        cfg, host, P, systems, a_slices, b_slices, quotas = \
            two_cliques_decomposed
        for slc in a_slices:
            assert winds_around(slc.g_dir, slc.q, slc.cycle)
            for slot in slc.slots:
                assert len(slot.matching) <= quotas.matching_size_bound
                verts = slot.matching.vertices()
                assert verts <= set(slc.q.cluster(slot.cluster_index))

    def test_cyclic_system_window(self, two_cliques_decomposed):
        cfg, host, P, systems, a_slices, b_slices, quotas = \
            two_cliques_decomposed
        for slc in a_slices + b_slices:
            slc.cyclic_system().validate()


class TestSysdecomUnclamped:
    def test_reserve_matches_formula_when_feasible(self):
        # with no exceptional vertices eps0 can sit below the feasibility
        # threshold, so the reserve degree equals its formula value and
        # every pair is exactly that regular
        cfg = InstanceConfig(mode="two-cliques", K=3, m=60, a0_size=0,
                             b0_size=0, eps0=7.9e-4, mu=0.0, rho=0.1,
                             gamma=0.15, hes_count=6, mes_count=0, seed=41)
        host, P, systems = generate_instance(cfg)
        a_slices, b_slices, quotas = sysdecom(host, P, systems,
                                              mu=cfg.mu, rho=cfg.rho,
                                              seed=41)
        formula = math.floor(10 * cfg.K * math.sqrt(cfg.eps0) * cfg.m)
        assert quotas.reserve_degree_used == formula == 50
        assert not quotas.notes
        for slc in a_slices:
            pair = slc.h_reserve.bipartite_restrict(P.a_cluster(0),
                                                    P.a_cluster(1))
            degs = {pair.degree(v)
                    for v in P.a_cluster(0) + P.a_cluster(1)}
            assert degs == {formula}


class TestSysdecombip:
    def test_invariants(self):
        cfg = InstanceConfig.bipartite_default(seed=21)
        host, P, systems = generate_instance(cfg)
        slices, quotas = sysdecombip(host, P, systems, mu=cfg.mu,
                                     rho=cfg.rho, seed=21)
        assert len(slices) == cfg.K // 2
        idx = [slot.es_index for slc in slices for slot in slc.slots]
        assert sorted(idx) == list(range(len(systems)))
        r = quotas.reserve_degree_used
        assert quotas.reserve_inner + quotas.reserve_outer == r
        total = Multigraph(host.n)
        for slc in slices:
            assert winds_around(slc.g_dir, slc.q, slc.cycle)
            slc.cyclic_system().validate()
            for i in range(cfg.K):
                for ip in range(cfg.K):
                    pair = slc.h_reserve.bipartite_restrict(
                        P.a_cluster(i), P.b_cluster(ip))
                    degs = {pair.degree(v)
                            for v in P.a_cluster(i) + P.b_cluster(ip)}
                    assert degs == {r}
            total = total + slc.g_dir.underlying_multigraph() + slc.h_reserve
        assert total.is_simple()
        assert total.is_submultigraph_of(
            host.bipartite_restrict(P.A, P.B))
