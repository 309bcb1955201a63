"""Command-line front end.

Subcommands: enumerate, simulate, baseline, optimize, convert,
cache-tables.  Every command writes a run manifest JSON next to its
outputs recording the full configuration and seed; re-running with the
same arguments reproduces outputs bit-identically.  Exit codes: 0 on
success, 1 when a verification check fails, 2 on usage or parse errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .circuits import (
    CircuitConfig,
    CircuitParseError,
    circuit_from_json,
    circuit_to_json,
    validate,
)
from .engine import CSV_COLUMNS, CircuitInvalidError, csv_row, estimate
from .exact import exact_diagonal_oracle
from .gates import ALL_H_GATES, all_b_gates, build_permutation_table, save_table_file, table_filename
from .graphstate import Graph, convert_to_ghz
from .noise import NoiseModel
from .optimizer import CostFunction, GAConfig, evolve
from .oracle import brute_force_converse, enumerate_ghz_preserving, permutation_cycles
from .protocols import (
    NestedConfig,
    PumpingConfig,
    SequenceConfig,
    nested_setup,
    pumping_setup,
    sequence_setup,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def _write_manifest(output_path: str, command: str, payload: dict) -> None:
    manifest = {"command": command, "ghzdist_version": __version__, **payload}
    path = output_path + ".manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)


def _append_csv(path: str, rows: list[str]) -> None:
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a") as fh:
        if fresh:
            fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(row + "\n")


def _noise_from_args(args) -> NoiseModel:
    bias = None
    if getattr(args, "bias", None):
        parts = [float(x) for x in args.bias.split(",")]
        if len(parts) != 3:
            raise ValueError("--bias needs three comma-separated probabilities px,py,pz")
        bias = tuple(parts)
    return NoiseModel(p_gate=args.p_gate, eta=args.eta, bias=bias)


def _f_in_grid(spec: str) -> list[float]:
    """'0.6:0.99:0.01' => inclusive grid; or comma list '0.7,0.8,0.9'."""
    if ":" in spec:
        start, stop, step = (float(x) for x in spec.split(":"))
        count = int(round((stop - start) / step)) + 1
        return [round(start + k * step, 12) for k in range(count) if start + k * step <= stop + 1e-12]
    return [float(x) for x in spec.split(",")]


def cmd_enumerate(args) -> int:
    if not 2 <= args.n <= 5:
        print(f"enumerate: n must be in 2..5, got {args.n}", file=sys.stderr)
        return EXIT_USAGE
    try:
        gates = enumerate_ghz_preserving(args.n)
    except AssertionError as exc:
        print(f"enumerate: check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    print(f"{len(gates)} distinct GHZ-preserving gates for n={args.n}")
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(f"# GHZ-preserving gate catalog, n={args.n}, count={len(gates)}\n")
            for g in gates:
                fh.write(f"{g.descriptor()} -> {permutation_cycles(g.table)}\n")
        _write_manifest(args.output, "enumerate",
                        {"n": args.n, "count": len(gates), "output": args.output})
    if args.brute_force_converse:
        if args.n != 2:
            print("enumerate: --brute-force-converse supports n=2 only", file=sys.stderr)
            return EXIT_USAGE
        count, tables = brute_force_converse(2)
        enum_keys = {g.table.tobytes() for g in gates}
        conv_keys = {t.tobytes() for t in tables}
        if count != len(gates) or enum_keys != conv_keys:
            print(f"enumerate: converse mismatch: {count} passing pairs", file=sys.stderr)
            return EXIT_CHECK_FAILED
        print(f"{count} passing pairs; converse verified")
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        with open(args.circuit) as fh:
            circuit, dims = circuit_from_json(fh.read())
    except OSError as exc:
        print(f"simulate: cannot read circuit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CircuitParseError as exc:
        print(f"simulate: malformed circuit file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        config = CircuitConfig(noise=_noise_from_args(args), f_in=args.f_in, **dims)
    except ValueError as exc:
        print(f"simulate: bad configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    violations = validate(circuit, config)
    if violations:
        for v in violations:
            print(f"simulate: {v}", file=sys.stderr)
        return EXIT_USAGE
    if args.exact:
        est = exact_diagonal_oracle(circuit, config)
    else:
        est = estimate(circuit, config, args.samples, args.seed, threads=args.threads)
    row = csv_row(args.label, config, est, args.seed)
    _append_csv(args.output, [row])
    _write_manifest(args.output, "simulate", {
        "circuit": args.circuit, "label": args.label, "f_in": args.f_in,
        "p_gate": args.p_gate, "eta": args.eta, "bias": getattr(args, "bias", None),
        "samples": args.samples, "seed": args.seed, "exact": bool(args.exact),
        "threads": args.threads, "output": args.output,
    })
    print(row)
    return EXIT_OK


def _protocol_setup(args, f_in: float, noise: NoiseModel):
    if args.protocol == "pumping":
        return pumping_setup(PumpingConfig(args.rounds, args.n, noise, f_in))
    if args.protocol == "nested":
        return nested_setup(NestedConfig(args.levels, not args.no_twirl, args.n, noise, f_in))
    return sequence_setup(SequenceConfig(args.bases, args.n, noise, f_in))


def cmd_baseline(args) -> int:
    noise = _noise_from_args(args)
    rows = []
    for f_in in _f_in_grid(args.f_in_grid):
        circuit, config = _protocol_setup(args, f_in, noise)
        if args.exact:
            est = exact_diagonal_oracle(circuit, config)
        else:
            est = estimate(circuit, config, args.samples, args.seed, threads=args.threads)
        rows.append(csv_row(args.protocol, config, est, args.seed))
    _append_csv(args.output, rows)
    _write_manifest(args.output, "baseline", {
        "protocol": args.protocol, "n": args.n, "f_in_grid": args.f_in_grid,
        "p_gate": args.p_gate, "eta": args.eta, "rounds": getattr(args, "rounds", None),
        "levels": getattr(args, "levels", None), "bases": getattr(args, "bases", None),
        "no_twirl": getattr(args, "no_twirl", False), "samples": args.samples,
        "seed": args.seed, "exact": bool(args.exact), "threads": args.threads,
        "output": args.output,
    })
    print(f"{len(rows)} rows -> {args.output}")
    return EXIT_OK


def cmd_optimize(args) -> int:
    try:
        with open(args.manifest) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"optimize: cannot read manifest: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        noise = NoiseModel(p_gate=doc.get("p_gate", 0.0), eta=doc.get("eta", 0.0),
                           bias=tuple(doc["bias"]) if doc.get("bias") else None)
        config = CircuitConfig(n=doc["n"], N=doc["N"], K=doc["K"], R=doc["R"],
                               noise=noise, f_in=doc["f_in"])
        cost = CostFunction(mode=doc.get("cost_mode", "fidelity_max"),
                            p_min=doc.get("p_min", 0.0),
                            penalty=doc.get("penalty", 10.0))
        ga = GAConfig(**doc.get("ga", {}))
        seed = int(doc["seed"])
    except (KeyError, TypeError, ValueError) as exc:
        print(f"optimize: bad manifest: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out_prefix = args.output_prefix or os.path.splitext(args.manifest)[0]
    result = evolve(ga, cost, config, seed, threads=args.threads)

    circuit_path = out_prefix + ".best.json"
    with open(circuit_path, "w") as fh:
        fh.write(circuit_to_json(result.best_circuit, config.n, config.N, config.K, config.R))
    history_path = out_prefix + ".history.csv"
    with open(history_path, "w") as fh:
        fh.write("generation,best_fitness,mean_fitness,temperature\n")
        for gen, best, mean, t in result.history:
            fh.write(f"{gen},{best!r},{mean!r},{t!r}\n")
    final = exact_diagonal_oracle(result.best_circuit, config)
    row = csv_row("optimized", config, final, seed)
    result_path = out_prefix + ".result.csv"
    _append_csv(result_path, [row])
    _write_manifest(out_prefix, "optimize", {
        "manifest": args.manifest, "inputs": doc, "threads": args.threads,
        "outputs": {"circuit": circuit_path, "history": history_path, "result": result_path},
        "best_fitness": result.best_fitness,
    })
    print(f"best fitness {result.best_fitness!r}; exact f_out {final.f_out!r} "
          f"p_succ {final.p_succ!r}")
    print(row)
    return EXIT_OK


def cmd_convert(args) -> int:
    try:
        with open(args.graph) as fh:
            pairs = []
            vertices = set()
            for line in fh:
                line = line.split("#")[0].strip()
                if not line:
                    continue
                u, v = (int(tok) for tok in line.split())
                pairs.append((u, v))
                vertices.update((u, v))
        graph = Graph.from_edge_list(max(vertices), pairs)
    except (OSError, ValueError) as exc:
        print(f"convert: cannot read graph: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        lc_vertex, lbc = convert_to_ghz(graph)
    except (ValueError, AssertionError) as exc:
        print(f"convert: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    recipe = []
    if lc_vertex is not None:
        recipe.append(f"LC at {lc_vertex}")
    recipe.append(lbc.describe())
    print("; ".join(recipe) + "; verified")
    return EXIT_OK


def cmd_cache_tables(args) -> int:
    directory = args.dir or os.environ.get("GHZDIST_TABLE_DIR")
    if not directory:
        print("cache-tables: give --dir or set GHZDIST_TABLE_DIR", file=sys.stderr)
        return EXIT_USAGE
    os.makedirs(directory, exist_ok=True)
    gates = list(ALL_H_GATES) + list(all_b_gates(args.n))
    for gate in gates:
        pt = build_permutation_table(gate, args.n)
        save_table_file(os.path.join(directory, table_filename(gate, args.n)), pt)
    print(f"wrote {len(gates)} tables for n={args.n} to {directory}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ghzdist",
                                     description="GHZ distillation circuits: enumeration, "
                                                 "simulation, optimization, conversion")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="enumerate the GHZ-preserving gate group")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--output", help="write the gate catalog (cycle notation) here")
    p.add_argument("--brute-force-converse", action="store_true",
                   help="n=2 only: exhaustively verify against all 720^2 local pairs")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("simulate", help="estimate one circuit file")
    p.add_argument("--circuit", required=True)
    p.add_argument("--f-in", type=float, required=True)
    p.add_argument("--p-gate", type=float, default=0.0)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--bias", help="px,py,pz replacing the isotropic split")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="use the exact diagonal oracle")
    p.add_argument("--threads", type=int, default=0, help="0 = auto")
    p.add_argument("--label", default="circuit", help="protocol column value")
    p.add_argument("--output", default="results.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("baseline", help="sweep a baseline protocol over f_in")
    p.add_argument("--protocol", choices=("pumping", "nested", "sequence"), required=True)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--rounds", type=int, default=3, help="pumping rounds")
    p.add_argument("--levels", type=int, default=2, help="nested levels")
    p.add_argument("--bases", default="ZZZ", help="sequence measurement bases")
    p.add_argument("--no-twirl", action="store_true", help="disable nested twirling")
    p.add_argument("--f-in-grid", required=True, help="start:stop:step or comma list")
    p.add_argument("--p-gate", type=float, default=0.0)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--bias")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--threads", type=int, default=0)
    p.add_argument("--output", default="baseline.csv")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("optimize", help="run a genetic search from a manifest file")
    p.add_argument("--manifest", required=True)
    p.add_argument("--output-prefix")
    p.add_argument("--threads", type=int, default=0)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("convert", help="convert a graph state to GHZ form")
    p.add_argument("--graph", required=True, help="edge list file, one 'u v' per line")
    p.add_argument("--target", choices=("ghz",), default="ghz")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("cache-tables", help="precompute permutation table files")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dir")
    p.set_defaults(func=cmd_cache_tables)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, CircuitInvalidError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AssertionError as exc:
        print(f"{args.command}: check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
