"""Command-line entry point.

Subcommands: partition, spectrum, dangling-census, simulate, overfit-bench,
corecut-table. Every command writes machine-readable CSV/JSON into ``--out``
and exits nonzero with a message on standard error when something is wrong.
"""
import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from corecut.dangling import enumerate_dangling
from corecut.experiments import (
    corecut_table,
    run_overfit_experiment,
    write_reports,
)
from corecut.generators import (
    CorePeripherySpec,
    DcSbmSpec,
    core_periphery_from_spec,
    erdos_renyi,
    plant_dangling,
    sample_dcsbm,
    write_edge_list,
)
from corecut.graph import build_graph, largest_connected_component
from corecut.regularization import RegularizationConfig, Variant
from corecut.spectral import (
    LaplacianOperator,
    dense_spectrum,
    smallest_eigenpairs,
    spectral_partition,
)

log = logging.getLogger("corecut")


class CliError(Exception):
    pass


def read_edge_list(path, largest_component=False):
    """Parse a SNAP-style edge list.

    Lines starting with ``#`` and blank lines are skipped. Each other line
    holds two integer node ids and an optional weight. Ids are remapped to
    ``0..n-1`` in increasing order; edges are symmetrized, self-loops dropped
    and repeated arcs merged.

    Returns ``(graph, node_ids)`` with ``node_ids[k]`` the original id of node
    ``k``.
    """
    src, dst, wts = [], [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            try:
                if len(parts) not in (2, 3):
                    raise ValueError
                i, j = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise CliError(f"{path}:{lineno}: malformed edge line {text!r}") from None
            src.append(i)
            dst.append(j)
            wts.append(w)
    if not src:
        raise CliError(f"{path}: no edges found")
    ids, inverse = np.unique(np.concatenate([src, dst]), return_inverse=True)
    m = len(src)
    edges = np.column_stack([inverse[:m], inverse[m:], wts])
    try:
        g = build_graph(edges, len(ids), symmetrize=True, drop_self_loops=True)
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from None
    if g.n_edges == 0:
        raise CliError(f"{path}: graph is empty after dropping self-loops")
    if largest_component:
        g, old_to_new = largest_connected_component(g)
        ids = ids[old_to_new >= 0]
    return g, ids


def ingest_snap(path):
    """SNAP edge list restricted to its largest connected component."""
    return read_edge_list(path, largest_component=True)


def write_id_map(node_ids, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node", "original_id"])
        for k, orig in enumerate(node_ids.tolist()):
            writer.writerow([k, orig])


def generate(spec, seed):
    """Graph from a generator spec dict. Returns ``(graph, labels or None)``."""
    model = spec.get("model", "core-periphery")
    if model == "core-periphery":
        g, labels, _ = core_periphery_from_spec(CorePeripherySpec.from_dict(spec), seed)
    elif model == "dcsbm":
        g, labels = sample_dcsbm(DcSbmSpec.from_dict(spec["core"] if "core" in spec else spec), seed)
    elif model == "erdos-renyi":
        g, labels = erdos_renyi(int(spec["n"]), float(spec["p"]), seed), None
    else:
        raise CliError(f"unknown generator model {model!r}")
    dangling = spec.get("dangling")
    if dangling:
        g, _ = plant_dangling(g, int(dangling["g"]), int(dangling["count"]), seed)
        if labels is not None:
            labels = np.concatenate([labels, np.full(g.n - len(labels), -2)])
    return g, labels


def _load_spec(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read generator spec {path}: {exc}") from None


def _load_input(args, seed=None, trim=True):
    if args.input:
        g, ids = ingest_snap(args.input) if trim else read_edge_list(args.input)
        return g, ids
    spec = _load_spec(args.gen_spec)
    g, _ = generate(spec, args.seed if seed is None else seed)
    ids = np.arange(g.n)
    if trim:
        g, old_to_new = largest_connected_component(g)
        ids = ids[old_to_new >= 0]
    return g, ids


def _config(args):
    try:
        return RegularizationConfig(args.tau, Variant.parse(args.variant))
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _fmt(x):
    return repr(round(float(x), 12) + 0.0)


def cmd_partition(args):
    g, ids = _load_input(args)
    cfg = _config(args)
    t0 = time.perf_counter()
    part, spectrum = spectral_partition(g, cfg, scoring=args.scoring, seed=args.seed)
    wall = (time.perf_counter() - t0) * 1e3 if args.timings else 0.0
    tau = cfg.resolve(g)
    with open(os.path.join(args.out, "partition.csv"), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["method", "seed", "n", "smaller_side_size", "conductance", "corecut",
                         "matvec_count", "wall_time_ms", "tau", "converged"])
        writer.writerow([
            "vanilla" if tau == 0 else "regularized", args.seed, g.n, part.smaller_side_size,
            _fmt(part.stats.conductance), _fmt(part.corecut_value), spectrum.matvec_count,
            f"{wall:.3f}", _fmt(tau), int(spectrum.converged),
        ])
    with open(os.path.join(args.out, "members.txt"), "w") as fh:
        fh.write("\n".join(str(x) for x in ids[part.set].tolist()) + "\n")
    write_id_map(ids, os.path.join(args.out, "id_map.csv"))
    return 0


def cmd_spectrum(args):
    g, ids = _load_input(args)
    cfg = _config(args)
    k = args.k
    if k >= g.n or (args.solver == "auto" and g.n <= 500) or args.solver == "dense":
        result = dense_spectrum(g, cfg, k=min(k, g.n), max_n=max(g.n, 2000))
    else:
        result = smallest_eigenpairs(LaplacianOperator(g, cfg), k=k, seed=args.seed)
    with open(os.path.join(args.out, "eigenvalues.csv"), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "eigenvalue", "residual"])
        for i, (lam, res) in enumerate(zip(result.eigenvalues, result.residuals), 1):
            writer.writerow([i, _fmt(lam), f"{res:.3e}"])
    meta = {"n": g.n, "k": k, "tau": cfg.resolve(g), "variant": cfg.variant.value,
            "matvec_count": result.matvec_count, "converged": result.converged}
    with open(os.path.join(args.out, "spectrum.json"), "w") as fh:
        json.dump(meta, fh, sort_keys=True, indent=2)
    write_id_map(ids, os.path.join(args.out, "id_map.csv"))
    return 0


def cmd_census(args):
    rows = []
    seeds = [args.seed] if args.input else [args.seed + s for s in range(args.seeds)]
    for seed in seeds:
        g, _ = _load_input(args, seed=seed, trim=False)
        census = enumerate_dangling(g, args.g_max, enforce_component_clause=not args.no_component_clause,
                                    seed=seed)
        rows.extend(census.rows())
    with open(os.path.join(args.out, "census.csv"), "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["g", "count", "n", "seed"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return 0


def cmd_simulate(args):
    if not args.gen_spec:
        raise CliError("simulate needs --gen-spec")
    spec = _load_spec(args.gen_spec)
    g, labels = generate(spec, args.seed)
    write_edge_list(g, os.path.join(args.out, "graph.tsv"), header=f"seed: {args.seed}")
    if labels is not None:
        with open(os.path.join(args.out, "labels.csv"), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["node", "label"])
            writer.writerows(enumerate(labels.tolist()))
    return 0


def _bench_one(job):
    graph_source, cfg, seed, split, scoring, timings = job
    if isinstance(graph_source, dict):
        g, _ = generate(graph_source, seed)
    else:
        g = graph_source
    return run_overfit_experiment(g, cfg, seed=seed, fraction=split, scoring=scoring, timings=timings)


def cmd_overfit(args):
    cfg = _config(args)
    source = ingest_snap(args.input)[0] if args.input else _load_spec(args.gen_spec)
    jobs = [(source, cfg, args.seed + s, args.split, args.scoring, args.timings) for s in range(args.seeds)]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            results = list(pool.map(_bench_one, jobs))
    else:
        results = [_bench_one(job) for job in jobs]
    reports = [r for pair in results for r in pair]
    write_reports(reports, os.path.join(args.out, "overfit.csv"))
    summary = [
        {"seed": reg.seed, "variants_agree": reg.variants_agree,
         "vanilla_converged": van.converged, "regularized_converged": reg.converged}
        for van, reg in results
    ]
    with open(os.path.join(args.out, "overfit_checks.json"), "w") as fh:
        json.dump(summary, fh, sort_keys=True, indent=2)
    return 0


def read_sets(path, node_ids):
    """Sets file: one set per line, ``name: id id ...`` or just ids."""
    lookup = {int(orig): k for k, orig in enumerate(node_ids.tolist())}
    names, sets = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            name, _, body = text.rpartition(":")
            try:
                members = [lookup[int(tok)] for tok in body.split()]
            except (KeyError, ValueError):
                raise CliError(f"{path}:{lineno}: unknown or malformed node id") from None
            names.append(name.strip() or f"S{len(sets) + 1}")
            sets.append(members)
    if not sets:
        raise CliError(f"{path}: no sets")
    return names, sets


def cmd_corecut_table(args):
    if not args.sets:
        raise CliError("corecut-table needs --sets")
    g, ids = _load_input(args)
    cfg = _config(args)
    tau = cfg.resolve(g)
    names, sets = read_sets(args.sets, ids)
    try:
        rows = corecut_table(g, sets, tau, names)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    with open(os.path.join(args.out, "corecut_table.csv"), "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["set", "size", "conductance", "corecut", "tau"])
        for r in rows:
            writer.writerow([r["set"], r["size"], _fmt(r["conductance"]), _fmt(r["corecut"]), _fmt(r["tau"])])
    return 0


COMMANDS = {
    "partition": cmd_partition,
    "spectrum": cmd_spectrum,
    "dangling-census": cmd_census,
    "simulate": cmd_simulate,
    "overfit-bench": cmd_overfit,
    "corecut-table": cmd_corecut_table,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="corecut", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        src = p.add_mutually_exclusive_group(required=name != "simulate")
        src.add_argument("--input", help="SNAP edge list")
        src.add_argument("--gen-spec", help="generator spec (JSON)")
        p.add_argument("--tau", default="avg-degree", help="number or 'avg-degree'")
        p.add_argument("--variant", default="degree-only", choices=["degree-only", "edge-wise"])
        p.add_argument("--k", type=int, default=2)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--seeds", type=int, default=1)
        p.add_argument("--split", type=float, default=0.5)
        p.add_argument("--scoring", default="raw", choices=["raw", "regularized"])
        p.add_argument("--g-max", type=int, default=10)
        p.add_argument("--out", default=".")
        p.add_argument("--sets", help="corecut-table: file of node sets")
        p.add_argument("--solver", default="auto", choices=["auto", "dense", "lanczos"])
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--no-component-clause", action="store_true")
        p.add_argument("--no-timings", dest="timings", action="store_false",
                       help="write wall_time_ms as 0 so outputs are byte-identical across runs")
    return parser


def validate(args):
    """Check every numeric flag before any input is read."""
    _config(args)
    if args.k < 1:
        raise CliError("--k must be >= 1")
    if not 0 < args.split < 1:
        raise CliError("--split must lie in (0, 1)")
    if args.seeds < 1:
        raise CliError("--seeds must be >= 1")
    if args.g_max < 2:
        raise CliError("--g-max must be >= 2")
    if args.workers < 1:
        raise CliError("--workers must be >= 1")


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        validate(args)
        os.makedirs(args.out, exist_ok=True)
        return COMMANDS[args.command](args)
    except (CliError, ValueError, OSError) as exc:
        print(f"corecut {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
