"""Command-line front end for the walk engine.

Subcommands:

- ``evolve``: run one evolution and export per-timepoint vertex
  distributions as CSV (with a sibling ``.meta.json``) or JSON.
- ``spectrum``: report the generator null-space dimension, the smallest
  eigenvalues and, when unique, the stationary distribution.
- ``bench``: time nonmoralizing path-graph evolutions over a size sweep and
  emit a ``size,seconds`` CSV.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time as _time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import sparse

from .analysis import canonical_measurement, null_dim, stationary_state
from .demoral import nm_init, nm_lind, nm_loc_ham, nm_glob_ham, nm_measurement, vertexsetsize
from .errors import NumericalError, ParseError, ResourceLimitError
from .evolve import evolve, evolve_closed
from .expaction import KrylovConfig
from .generator import evolve_generator, local_lind
from .graphio import GraphSpec, adjacency
from .linalg import hermiticity_defect, proj

_REGIMES = ("local", "global", "nonmoralizing", "closed")


def _parse_times(text: str) -> list[float]:
    if ":" in text:
        fields = text.split(":")
        if len(fields) != 3:
            raise ValueError("time range must be t0:t1:steps")
        t0, t1, steps = float(fields[0]), float(fields[1]), int(fields[2])
        if steps < 1:
            raise ValueError("time range needs at least one step")
        times = list(np.linspace(t0, t1, steps))
    else:
        times = [float(text)]
    if any(t < 0 for t in times):
        raise ValueError("time must be non-negative")
    return times


def _parse_init(text: str, n: int) -> list[int]:
    if text == "mid":
        return [int(np.ceil(n / 2))]
    if os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            text = ",".join(fh.read().split())
    vertices = [int(x) for x in text.replace(",", " ").split()]
    if not vertices:
        raise ValueError("empty initial vertex list")
    for v in vertices:
        if not 1 <= v <= n:
            raise ValueError(f"initial vertex {v} outside 1..{n}")
    return vertices


def _load_lind_dict(path: str) -> dict:
    """JSON file mapping subspace dimension to a row-major complex matrix;
    entries are numbers or [re, im] pairs."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)

    def entry(x):
        if isinstance(x, list):
            return complex(x[0], x[1])
        return complex(x)

    out = {}
    for key, mat in raw.items():
        out[int(key)] = np.array([[entry(x) for x in row] for row in mat], dtype=complex)
    return out


def _build_problem(args):
    """Assemble (generator-or-h, rho0, measure, meta) for the chosen regime."""
    spec = GraphSpec.parse(args.graph, seed=getattr(args, "seed", 0))
    a_und = adjacency(spec, "undirected")
    a_dir = adjacency(spec, "in") if spec.kind == "file" or spec.directed else a_und
    n = a_und.shape[0]
    init_vertices = _parse_init(args.init, n)
    omega = args.omega

    if args.regime == "closed":
        rho0 = sum(proj(v, n) for v in init_vertices) / len(init_vertices)
        return ("closed", a_und), rho0, lambda rho: canonical_measurement(rho).probs, n

    if args.regime in ("local", "global"):
        ls = local_lind(a_dir) if args.regime == "local" else [a_dir.astype(complex)]
        f = evolve_generator(a_und.astype(complex), ls, omega=omega)
        rho0 = sum(proj(v, n) for v in init_vertices) / len(init_vertices)
        return ("open", f), rho0, lambda rho: canonical_measurement(rho).probs, n

    dicts = [_load_lind_dict(p) for p in (args.lind_dict or [])] or [None]
    linds = []
    vs = None
    for d in dicts:
        ell, vs = nm_lind(a_dir, d)
        linds.append(ell)
    h_loc = sparse.csr_array(nm_loc_ham(vs))
    if hermiticity_defect(a_dir) <= 1e-10:
        h_glob = nm_glob_ham(a_dir)
    else:
        # directed input: no symmetric Hamiltonian exists, evolve dissipatively
        h_glob = sparse.csr_array((vertexsetsize(vs), vertexsetsize(vs)), dtype=complex)
    f = evolve_generator(h_glob, linds, h_loc, omega=omega)
    rho0 = nm_init([vs[v - 1] for v in init_vertices], vs)

    def measure(rho):
        return nm_measurement(rho, vs).probs

    return ("open", f), rho0, measure, n


def _worker_count() -> int:
    env = os.environ.get("QSW_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def cmd_evolve(args) -> int:
    times = _parse_times(args.time)
    (mode, op), rho0, measure, n = _build_problem(args)
    cfg = KrylovConfig(subspace_dim=args.krylov_dim, tolerance=args.tol)
    t_build = _time.perf_counter()

    def run_one(t):
        if mode == "closed":
            return measure(evolve_closed(op, rho0, t))
        return measure(evolve(op, rho0, t, krylov=cfg))

    workers = _worker_count()
    if workers > 1 and len(times) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            dists = list(pool.map(run_one, times))
    else:
        dists = [run_one(t) for t in times]
    t_done = _time.perf_counter()

    rows = [(t, v + 1, float(dist[v])) for t, dist in zip(times, dists) for v in range(n)]
    rows.sort(key=lambda r: (r[0], r[1]))
    meta = {
        "regime": args.regime,
        "omega": args.omega,
        "graph": args.graph,
        "vertices": n,
        "init": args.init,
        "times": times,
        "krylov_dim": args.krylov_dim,
        "tolerance": args.tol,
        "timings": {"evolve_seconds": t_done - t_build},
    }
    if args.format == "csv":
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("time,vertex,probability\n")
            for t, v, p in rows:
                fh.write(f"{t!r},{v},{p!r}\n")
        with open(args.out + ".meta.json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2)
            fh.write("\n")
    else:
        payload = {"meta": meta,
                   "rows": [{"time": t, "vertex": v, "probability": p}
                            for t, v, p in rows]}
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return 0


def cmd_spectrum(args) -> int:
    (mode, op), rho0, measure, n = _build_problem(args)
    if mode == "closed":
        op = evolve_generator(op.astype(complex), [])
    dim = null_dim(op, tol=args.tol, max_dim=args.max_dim)
    w = np.linalg.eigvals(np.asarray(
        op.todense() if sparse.issparse(op) else op, dtype=complex))
    smallest = w[np.argsort(np.abs(w))][:10]
    print(f"null_dim: {dim}")
    print("smallest eigenvalues:")
    for lam in smallest:
        print(f"  {lam.real:+.6e}{lam.imag:+.6e}j")
    if dim == 1:
        rho = stationary_state(op, tol=args.tol, max_dim=args.max_dim)
        probs = measure(rho)
        print("stationary distribution:")
        print("  " + " ".join(f"{p:.6f}" for p in probs))
    else:
        print(f"stationary state not unique (multiplicity {dim})")
    return 0


def _parse_sizes(text: str) -> list[int]:
    if ":" in text:
        start, stop, step = (int(x) for x in text.split(":"))
        return list(range(start, stop + 1, step))
    return [int(x) for x in text.split(",")]


def cmd_bench(args) -> int:
    sizes = _parse_sizes(args.sizes)
    cfg = KrylovConfig(subspace_dim=args.krylov_dim, tolerance=args.tol)
    lines = ["size,seconds"]
    for size in sizes:
        t0 = _time.perf_counter()
        a = adjacency(GraphSpec.parse(f"path:{size}"), "undirected")
        ell, vs = nm_lind(a)
        f = evolve_generator(nm_glob_ham(a), [ell],
                             sparse.csr_array(nm_loc_ham(vs)), omega=args.omega)
        rho0 = nm_init([vs[int(np.ceil(size / 2)) - 1]], vs)
        rho = evolve(f, rho0, args.time, krylov=cfg)
        nm_measurement(rho, vs)
        seconds = _time.perf_counter() - t0
        lines.append(f"{size},{seconds:.6f}")
        print(lines[-1], flush=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0


def _make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsw",
        description="Quantum stochastic walks on directed graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("evolve", help="run an evolution and export distributions")
    pe.add_argument("--graph", required=True, help="path:N | er:N:P[:SEED] | file:PATH")
    pe.add_argument("--regime", required=True, choices=_REGIMES)
    pe.add_argument("--omega", type=float, default=None)
    pe.add_argument("--time", required=True, help="t or t0:t1:steps")
    pe.add_argument("--init", default="mid", help="'mid', vertex list, or file")
    pe.add_argument("--out", required=True)
    pe.add_argument("--format", choices=("csv", "json"), default="csv")
    pe.add_argument("--lind-dict", action="append", default=None,
                    help="JSON degree->matrix dictionary (repeatable)")
    pe.add_argument("--krylov-dim", type=int, default=30)
    pe.add_argument("--tol", type=float, default=1e-7)
    pe.add_argument("--seed", type=int, default=0)
    pe.set_defaults(func=cmd_evolve)

    ps = sub.add_parser("spectrum", help="null space and stationary state report")
    ps.add_argument("--graph", required=True)
    ps.add_argument("--regime", required=True, choices=_REGIMES)
    ps.add_argument("--omega", type=float, default=None)
    ps.add_argument("--init", default="1")
    ps.add_argument("--tol", type=float, default=1e-5)
    ps.add_argument("--max-dim", type=int, default=4096)
    ps.add_argument("--seed", type=int, default=0)
    ps.set_defaults(func=cmd_spectrum)

    pb = sub.add_parser("bench", help="size-vs-time sweep of the nonmoralizing walk")
    pb.add_argument("--sizes", default="100:1000:100", help="start:stop:step or list")
    pb.add_argument("--time", type=float, default=10.0)
    pb.add_argument("--omega", type=float, default=0.5)
    pb.add_argument("--krylov-dim", type=int, default=16)
    pb.add_argument("--tol", type=float, default=1e-7)
    pb.add_argument("--out", default=None)
    pb.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = _make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"qsw: parse error: {exc}", file=sys.stderr)
        return 3
    except (NumericalError, ResourceLimitError) as exc:
        print(f"qsw: numerical failure: {exc}", file=sys.stderr)
        return 4
    except (ValueError, OSError) as exc:
        print(f"qsw: invalid arguments: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
