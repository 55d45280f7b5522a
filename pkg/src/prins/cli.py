"""Command-line driver: run kernels, verify against oracles, generate
datasets, sample the roofline and re-account saved instruction traces.

Exit codes: 0 success, 1 verification mismatch, 2 usage or input error.
Reports are deterministic for a fixed argv/seed/config (no timestamps).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import data, kernels, oracle
from .errors import PrinsError
from .kernels import CsrMatrix, GraphEdges, SampleSet
from .perfmodel import (CycleEnergyLedger, DatasetInfo, KernelReport, ModelConfig,
                        build_report, roofline_points)

KERNELS = ("ed", "dp", "hist", "spmv", "bfs")


def _load_config(args) -> ModelConfig:
    path = args.config or os.environ.get("PRINS_CONFIG")
    cfg = ModelConfig.from_file(path) if path else ModelConfig()
    for kv in args.set or []:
        key, _, val = kv.partition("=")
        if not _:
            raise PrinsError(f"--set expects KEY=VALUE, got {kv!r}")
        if key not in ModelConfig.__dataclass_fields__:
            raise PrinsError(f"unknown config key {key!r}")
        current = getattr(cfg, key)
        if key == "baseline_bw_bytes_per_s":
            cfg = cfg.replace(**{key: tuple(float(x) for x in val.split(":"))})
        else:
            cfg = cfg.replace(**{key: type(current)(float(val))})
    return cfg


def _parse_params(spec: str | None) -> dict:
    out = {}
    for part in (spec or "").split(","):
        part = part.strip()
        if not part:
            continue
        key, _, val = part.partition("=")
        if not _:
            raise PrinsError(f"generator spec expects key=value, got {part!r}")
        out[key] = val
    return out


def _resolve_dataset(kernel: str, args):
    """Load from --dataset or generate from --gen/--seed."""
    params = _parse_params(args.gen)
    seed = args.seed
    if args.dataset:
        path = args.dataset
        if kernel == "spmv":
            matrix = data.load_matrix_market(path)
            if not getattr(matrix, "square", True):
                raise PrinsError(f"{path}: matrix is not square; spmv needs a square matrix")
            return matrix, data.gen_bvec(matrix.n, seed=seed)
        if kernel == "bfs":
            return data.load_edge_list(path)
        if kernel == "hist":
            return np.load(path)
        blob = np.load(path)
        samples = SampleSet(blob["values"], int(blob["attr_width"][0]))
        if kernel == "ed":
            return samples, blob["centers"]
        return samples, blob["hvec"]
    return data.gen_synthetic(kernel, seed=seed, **params)


def _run_kernel(kernel: str, dataset, args, config) -> kernels.KernelRun:
    rows = args.rows
    rw = args.row_width
    if kernel == "ed":
        samples, centers = dataset
        return kernels.euclidean_distance(samples, centers, config, rows, rw)
    if kernel == "dp":
        samples, hvec = dataset
        return kernels.dot_product(samples, hvec, config, rows, rw)
    if kernel == "hist":
        return kernels.histogram(dataset, config=config, rows=rows, row_width=rw)
    if kernel == "spmv":
        matrix, bvec = dataset
        return kernels.spmv(matrix, bvec, config, rows, rw)
    matrix = dataset
    return kernels.bfs(dataset, args.source, config, rows)


def _verify(kernel: str, dataset, run: kernels.KernelRun) -> list[str]:
    """Exact oracle comparison; returns a list of mismatch descriptions."""
    problems = []
    if kernel == "ed":
        samples, centers = dataset
        want = oracle.oracle_ed(samples.values, centers)
        if not np.array_equal(np.asarray(run.result, dtype=object),
                              np.asarray(want, dtype=object)):
            problems.append("squared distances differ from oracle")
    elif kernel == "dp":
        samples, hvec = dataset
        want = oracle.oracle_dp(samples.values, hvec)
        if list(run.result) != [int(x) for x in want]:
            problems.append("dot products differ from oracle")
    elif kernel == "hist":
        want = oracle.oracle_hist(np.asarray(dataset))
        if not np.array_equal(run.result, want):
            problems.append("bin counts differ from oracle")
    elif kernel == "spmv":
        matrix, bvec = dataset
        want = oracle.oracle_spmv(matrix.n, matrix.row_idx, matrix.col_idx,
                                  matrix.values, bvec)
        if [int(x) for x in run.result] != [int(x) for x in want]:
            problems.append("product vector differs from oracle")
    else:
        graph = dataset
        dist, pred = run.result
        src = int(run.info.meta["source"])
        want_dist, _ = oracle.oracle_bfs(graph.n_vertices, graph.edges, src)
        if not np.array_equal(dist, want_dist):
            problems.append("distances differ from oracle")
        if not oracle.bfs_predecessors_valid(dist, pred, graph.edges, src):
            problems.append("predecessors do not form a valid search tree")
    return problems


def emit_report(report: KernelReport, fmt: str = "json", path=None) -> None:
    """Serialize a report; stable field order, one CSV row per baseline."""
    if fmt == "json":
        text = report.to_json()
    elif fmt == "csv":
        text = report.CSV_HEADER + "\n" + "\n".join(report.csv_rows()) + "\n"
    else:
        raise PrinsError(f"unknown report format {fmt!r}")
    if path:
        with open(path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _cmd_run(args) -> int:
    config = _load_config(args)
    dataset = _resolve_dataset(args.kernel, args)
    run = _run_kernel(args.kernel, dataset, args, config)
    fp_mode = "fp_modeled" if args.fp_model else "fixed"
    report = build_report(run.ledger, args.kernel, run.info, config, fp_mode)
    if args.trace_out:
        run.ledger.save_trace(args.trace_out, header={
            "kernel": args.kernel,
            "dataset": {"name": run.info.name, "bytes": run.info.bytes,
                        "ops": run.info.ops, "meta": run.info.meta},
        })
    emit_report(report, args.format, args.out)
    return 0


def _cmd_verify(args) -> int:
    config = _load_config(args)
    dataset = _resolve_dataset(args.kernel, args)
    run = _run_kernel(args.kernel, dataset, args, config)
    problems = _verify(args.kernel, dataset, run)
    if problems:
        for p in problems:
            print(f"MISMATCH [{args.kernel}]: {p}", file=sys.stderr)
        return 1
    print(f"verified {args.kernel} on {run.info.name}: exact match")
    return 0


def _cmd_gen(args) -> int:
    params = _parse_params(args.params)
    ds = data.gen_synthetic(args.kind, seed=args.seed, **params)
    out = args.out
    if args.kind == "spmv":
        data.save_matrix_market(ds[0], out)
    elif args.kind == "graph":
        data.save_edge_list(ds, out)
    elif args.kind == "hist":
        np.save(out, ds)
    elif args.kind == "ed":
        samples, centers = ds
        np.savez(out, values=samples.values, centers=centers,
                 attr_width=np.array([samples.attr_width]))
    else:
        samples, hvec = ds
        np.savez(out, values=samples.values, hvec=hvec,
                 attr_width=np.array([samples.attr_width]))
    print(f"wrote {out}")
    return 0


def _cmd_roofline(args) -> int:
    config = _load_config(args)
    ais = [float(x) for x in args.ai.split(",")] if args.ai else \
        [2.0 ** e for e in range(-6, 7)]
    points = roofline_points(config, ais)
    if args.format == "json":
        text = json.dumps(points, indent=2, sort_keys=True) + "\n"
    else:
        lines = ["ai,bw_bytes_per_s,attainable"]
        for p in points:
            bw = "" if p["bw_bytes_per_s"] is None else repr(p["bw_bytes_per_s"])
            lines.append(f"{p['ai']!r},{bw},{p['attainable']!r}")
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_replay(args) -> int:
    config = _load_config(args) if (args.config or args.set) else None
    ledger, header = CycleEnergyLedger.load_trace(args.trace, config,
                                                  rows_override=args.rows)
    if "kernel" in header and "dataset" in header:
        d = header["dataset"]
        scale = 1.0
        if args.rows and header.get("scaled_from_rows"):
            scale = args.rows / header["scaled_from_rows"]
        info = DatasetInfo(d["name"], d["bytes"] * scale, d["ops"] * scale,
                           d.get("meta", {}))
        fp_mode = "fp_modeled" if args.fp_model else "fixed"
        report = build_report(ledger, header["kernel"], info, ledger.config, fp_mode)
        emit_report(report, args.format, args.out)
    else:
        summary = {"rows": header["rows"], "cycles": ledger.cycles,
                   "energy_j": ledger.energy, "counts": ledger.counts}
        sys.stdout.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return 0


def _common_flags(p):
    p.add_argument("--rows", type=int, default=None, help="array rows")
    p.add_argument("--row-width", type=int, default=None, help="bit columns per row")
    p.add_argument("--config", default=None, help="JSON model-config file "
                   "(or set PRINS_CONFIG)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override one model-config field")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write output here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--fp-model", action="store_true",
                   help="report with modeled floating-point arithmetic cycles")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="prins",
                                 description="associative processing-in-storage simulator")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, fn in (("run", _cmd_run), ("verify", _cmd_verify)):
        p = sub.add_parser(name, help=f"{name} a kernel")
        p.add_argument("kernel", choices=KERNELS)
        p.add_argument("--dataset", default=None, help="dataset file "
                       "(.mtx for spmv, edge list for bfs, .npy/.npz otherwise)")
        p.add_argument("--gen", default=None, metavar="K=V,...",
                       help="synthetic generator parameters")
        p.add_argument("--source", type=int, default=0, help="BFS source vertex")
        _common_flags(p)
        if name == "run":
            p.add_argument("--trace-out", default=None,
                           help="save the instruction trace (JSONL)")
        p.set_defaults(fn=fn)

    p = sub.add_parser("gen", help="write a synthetic dataset")
    p.add_argument("kind", choices=KERNELS)
    p.add_argument("--params", default=None, metavar="K=V,...")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("roofline", help="emit roofline sample points")
    p.add_argument("--ai", default=None, help="comma-separated intensities")
    p.add_argument("--config", default=None)
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(fn=_cmd_roofline)

    p = sub.add_parser("replay", help="re-account a saved instruction trace")
    p.add_argument("trace")
    p.add_argument("--rows", type=int, default=None,
                   help="rescale the run to this many rows")
    p.add_argument("--config", default=None)
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--fp-model", action="store_true")
    p.set_defaults(fn=_cmd_replay)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.fn(args)
    except PrinsError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
