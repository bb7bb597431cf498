"""Command-line surface: generate instances, decompose them, verify
certificates, run the invariant self-tests, and export DOT files.

All JSON artifacts carry a "schema": 1 field.  The HAMDEC_SEED
environment variable overrides any configured seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .core import ClusterPartition, Multigraph, canonical_json
from .errors import HamdecError
from .exceptional import BalancedExceptionalSystem, ExceptionalSystem
from .pipeline import (DecompositionCertificate, InstanceConfig,
                       MODE_BIPARTITE, MODE_TWO_CLIQUES,
                       approx_decompose_bipartite,
                       approx_decompose_two_cliques, generate_instance,
                       trim_instance, verify_certificate)


def _load_instance(path: str):
    with open(path) as fh:
        obj = json.load(fh)
    cfg = InstanceConfig.from_json_obj(obj["config"])
    host = Multigraph.from_json_obj(obj["graph"])
    partition = ClusterPartition.from_json_obj(obj["partition"])
    ctor = (ExceptionalSystem if cfg.mode == MODE_TWO_CLIQUES
            else BalancedExceptionalSystem)
    systems = [ctor.from_json_obj(o, partition)
               for o in obj["exceptional_systems"]]
    return cfg, host, partition, systems


def _dump_instance(path: str, cfg, host, partition, systems):
    obj = {
        "schema": 1,
        "config": cfg.to_json_obj(),
        "graph": host.to_json_obj(),
        "partition": partition.to_json_obj(),
        "exceptional_systems": [es.to_json_obj() for es in systems],
    }
    with open(path, "w") as fh:
        fh.write(canonical_json(obj))


def _effective_seed(args) -> int:
    env = os.environ.get("HAMDEC_SEED")
    if env is not None:
        return int(env)
    return args.seed


def cmd_gen(args) -> int:
    seed = _effective_seed(args)
    if args.params:
        with open(args.params) as fh:
            cfg = InstanceConfig.from_json_obj(json.load(fh))
        cfg.seed = seed
    elif args.mode == MODE_BIPARTITE:
        cfg = InstanceConfig.bipartite_default(seed=seed)
    else:
        cfg = InstanceConfig.two_cliques_default(seed=seed)
    if args.K:
        cfg.K = args.K
    if args.m:
        cfg.m = args.m
    host, partition, systems = generate_instance(cfg)
    _dump_instance(args.out, cfg, host, partition, systems)
    print(f"wrote instance: n={partition.n}, e={host.edge_count()}, "
          f"systems={len(systems)} -> {args.out}")
    return 0


def cmd_decompose(args) -> int:
    cfg, host, partition, systems = _load_instance(args.instance)
    seed = _effective_seed(args) if (args.seed is not None or
                                     os.environ.get("HAMDEC_SEED")) \
        else cfg.seed
    if args.trim:
        host = trim_instance(host, partition, systems)
    if cfg.mode == MODE_BIPARTITE:
        cert = approx_decompose_bipartite(host, partition, systems,
                                          cfg.mu, cfg.rho, cfg.gamma, seed,
                                          jobs=args.jobs)
    else:
        cert = approx_decompose_two_cliques(host, partition, systems,
                                            cfg.mu, cfg.rho, cfg.gamma, seed,
                                            jobs=args.jobs)
    with open(args.out, "w") as fh:
        fh.write(cert.to_json())
    ok = cert.global_report.get("all_ok", False)
    print(f"wrote certificate: {len(cert.slots)} slots, all_ok={ok} "
          f"-> {args.out}")
    return 0 if ok else 1


def cmd_verify(args) -> int:
    cfg, host, partition, systems = _load_instance(args.instance)
    with open(args.certificate) as fh:
        cert = DecompositionCertificate.from_json_obj(json.load(fh))
    report = verify_certificate(host, partition, systems, cert)
    print(canonical_json(report["global"]))
    if not report["global"]["all_ok"]:
        for idx, verdicts in enumerate(report["slots"]):
            if not verdicts["ok"]:
                print(f"slot {idx} failed: {canonical_json(verdicts)}",
                      file=sys.stderr)
        return 1
    return 0


def cmd_selftest(args) -> int:
    """Run the invariant suites on small built-in configurations."""
    from .classic import walecki_decompose, bipartite_hamilton_decompose
    failures = []

    def check(name, fn):
        try:
            fn()
            print(f"  ok   {name}")
        except Exception as exc:  # report, keep going
            failures.append((name, exc))
            print(f"  FAIL {name}: {exc}")

    def walecki():
        for K in (3, 5, 7):
            cycles = walecki_decompose(K)
            seen = set()
            for c in cycles:
                for e in c.undirected_edge_set():
                    assert e not in seen
                    seen.add(e)
            assert len(seen) == K * (K - 1) // 2

    def bipartite():
        for K in (2, 4, 6):
            cycles = bipartite_hamilton_decompose(K)
            seen = set()
            for c in cycles:
                seen |= c.undirected_edge_set()
            assert len(seen) == K * K

    def tiny_pipeline():
        seed = _effective_seed(args)
        cfg = InstanceConfig(mode=MODE_TWO_CLIQUES, K=3, m=24, a0_size=1,
                             b0_size=1, eps0=0.02, mu=0.0, rho=0.1,
                             gamma=0.18, hes_count=5, mes_count=0, seed=seed)
        host, partition, systems = generate_instance(cfg)
        cert = approx_decompose_two_cliques(host, partition, systems,
                                            cfg.mu, cfg.rho, cfg.gamma, seed)
        assert cert.global_report["all_ok"]

    def tiny_bipartite():
        seed = _effective_seed(args)
        cfg = InstanceConfig(mode=MODE_BIPARTITE, K=4, m=32, a0_size=1,
                             b0_size=1, eps0=0.02, mu=0.0, rho=0.1,
                             gamma=0.12, bes_count=8, seed=seed)
        host, partition, systems = generate_instance(cfg)
        cert = approx_decompose_bipartite(host, partition, systems,
                                          cfg.mu, cfg.rho, cfg.gamma, seed)
        assert cert.global_report["all_ok"]

    print("selftest:")
    check("walecki-cover", walecki)
    check("bipartite-cover", bipartite)
    check("two-cliques-pipeline", tiny_pipeline)
    check("bipartite-pipeline", tiny_bipartite)
    return 1 if failures else 0


def cmd_export_dot(args) -> int:
    with open(args.input) as fh:
        obj = json.load(fh)
    if "graph" in obj:
        obj = obj["graph"]
    if "arcs" in obj:
        from .core import Digraph
        text = Digraph.from_json_obj(obj).to_dot()
    else:
        text = Multigraph.from_json_obj(obj).to_dot()
    with open(args.out, "w") as fh:
        fh.write(text + "\n")
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hamdec",
        description="Approximate Hamilton decompositions with certificates")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit a synthetic instance as JSON")
    g.add_argument("--mode", choices=[MODE_TWO_CLIQUES, MODE_BIPARTITE],
                   default=MODE_TWO_CLIQUES)
    g.add_argument("--K", type=int, default=0)
    g.add_argument("--m", type=int, default=0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--params", help="JSON file with an InstanceConfig")
    g.add_argument("--out", default="instance.json")
    g.set_defaults(fn=cmd_gen)

    d = sub.add_parser("decompose",
                       help="instance JSON -> certificate JSON")
    d.add_argument("instance")
    d.add_argument("--seed", type=int, default=None)
    d.add_argument("--trim", action="store_true",
                   help="drop host edges outside the clique sides not "
                        "covered by any exceptional system")
    d.add_argument("--jobs", type=int, default=1,
                   help="worker processes for independent slices")
    d.add_argument("--out", default="certificate.json")
    d.set_defaults(fn=cmd_decompose)

    v = sub.add_parser("verify",
                       help="instance + certificate -> report (exit 0/1)")
    v.add_argument("instance")
    v.add_argument("certificate")
    v.set_defaults(fn=cmd_verify)

    s = sub.add_parser("selftest", help="run the invariant suites")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_selftest)

    e = sub.add_parser("export-dot", help="graph JSON -> DOT")
    e.add_argument("input")
    e.add_argument("--out", default="graph.dot")
    e.set_defaults(fn=cmd_export_dot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except HamdecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
