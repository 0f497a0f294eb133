"""Command-line front end: instance files, single runs, sweeps, fidelity bounds.

Four subcommands:

* graph: generate (or normalize) an instance and write it as an edge list.
* run:   one closed-loop run; writes trace.csv and summary.json.
* sweep: a grid of (epsilon_bar, lambda) cells, several seeds each; writes
         one CSV per cell plus aggregate.csv.
* bound: worst-case fidelity bound for a control sequence next to the
         empirical minimum over independent error draws; writes bound.csv.

Settings come from an optional JSON config file and are overridden by flags.
All real numbers in output files carry 17 significant digits and every file
is written with LF endings, so reruns of a fixed configuration are
byte-identical. Failures remove whatever partial output files the failing
command had already written.

Exit codes: 0 on success, 1 for runtime failures (generator retry exhaustion,
non-convergence, I/O), 2 for bad flags, bad config or invalid parameter
combinations.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis, engine, plotting
from .engine import FeedbackLaw, RunConfig
from .graphs import (
    BRUTE_FORCE_MAX_NODES,
    Graph,
    erdos_renyi,
    load_edge_list,
    max_cut_brute_force,
    random_regular,
    save_edge_list,
)
from .hamiltonian import assumption_report, driver_x, ground_energy, maxcut_hamiltonian
from .noise import NoiseKind, NoiseModel, trajectory
from .statevector import inner_product, uniform_state

#: Output directory used when neither --out nor the config gives one.
ENV_OUT_DIR = "FALQON_OUT"

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


class UsageError(ValueError):
    """Bad flags or config values; maps to exit code 2."""


def _fmt(value) -> str:
    """Render one CSV cell: booleans as true/false, reals with 17 digits."""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


class _OutputSink:
    """Tracks the files one command writes so a failure leaves no partial output."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.written: list[Path] = []

    def write_text(self, name: str, text: str) -> Path:
        path = self.out_dir / name
        path.write_text(text, encoding="utf-8", newline="\n")
        self.written.append(path)
        return path

    def write_csv(self, name: str, header: list[str], rows) -> Path:
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(_fmt(cell) for cell in row))
        return self.write_text(name, "\n".join(lines) + "\n")

    def discard(self) -> None:
        for path in self.written:
            try:
                path.unlink()
            except OSError:
                pass


def _load_config(path) -> dict:
    if path is None:
        return {}
    cfg = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    return cfg


def _pick(flag_value, cfg: dict, key: str, default=None):
    """Flag beats config beats default."""
    if flag_value is not None:
        return flag_value
    if key in cfg:
        return cfg[key]
    return default


def _float_list(value, what: str) -> list[float]:
    if value is None:
        raise UsageError(f"missing {what} (flag or config)")
    if isinstance(value, str):
        value = [tok for tok in value.split(",") if tok.strip()]
    try:
        out = [float(v) for v in value]
    except (TypeError, ValueError):
        raise UsageError(f"could not parse {what} from {value!r}") from None
    if not out:
        raise UsageError(f"{what} must be non-empty")
    return out


def _seed_list(value) -> list[int]:
    """Seeds as a list, comma string, or 'a:b' half-open ranges."""
    if value is None:
        raise UsageError("missing seeds (flag or config)")
    if isinstance(value, str):
        out: list[int] = []
        for tok in value.split(","):
            tok = tok.strip()
            if not tok:
                continue
            if ":" in tok:
                a, b = tok.split(":", 1)
                out.extend(range(int(a), int(b)))
            else:
                out.append(int(tok))
    else:
        try:
            out = [int(v) for v in value]
        except (TypeError, ValueError):
            raise UsageError(f"could not parse seeds from {value!r}") from None
    if not out:
        raise UsageError("seeds must be non-empty")
    return out


def _resolve_out_dir(args, cfg: dict) -> Path:
    out = _pick(args.out, cfg, "out")
    if out is None:
        out = os.environ.get(ENV_OUT_DIR, ".")
    return Path(out)


def _resolve_graph(args, cfg: dict) -> tuple[Graph, dict]:
    """Build or load the instance; returns the graph and a config echo."""
    if sum(x is not None for x in (args.graph, args.regular, args.er)) > 1:
        raise UsageError("give at most one of --graph, --regular, --er")
    gcfg = cfg.get("graph") if isinstance(cfg.get("graph"), dict) else {}
    seed = args.graph_seed if args.graph_seed is not None else int(gcfg.get("seed", 0))
    if args.graph is not None:
        graph = load_edge_list(args.graph)
        echo: dict = {"source": "file", "path": str(args.graph)}
    elif args.regular is not None:
        n, d = int(args.regular[0]), int(args.regular[1])
        graph = random_regular(n, d, seed)
        echo = {"source": "regular", "n": n, "d": d, "seed": seed}
    elif args.er is not None:
        try:
            n, p = int(args.er[0]), float(args.er[1])
        except ValueError:
            raise UsageError(f"--er expects an integer and a real, got {args.er}") from None
        graph = erdos_renyi(n, p, seed)
        echo = {"source": "er", "n": n, "p": p, "seed": seed}
    elif "path" in gcfg:
        graph = load_edge_list(gcfg["path"])
        echo = {"source": "file", "path": str(gcfg["path"])}
    elif "regular" in gcfg:
        n, d = (int(v) for v in gcfg["regular"])
        graph = random_regular(n, d, seed)
        echo = {"source": "regular", "n": n, "d": d, "seed": seed}
    elif "er" in gcfg:
        n, p = int(gcfg["er"][0]), float(gcfg["er"][1])
        graph = erdos_renyi(n, p, seed)
        echo = {"source": "er", "n": n, "p": p, "seed": seed}
    else:
        raise UsageError(
            "no graph source: use --graph/--regular/--er or a config 'graph' entry"
        )
    echo["n_nodes"] = graph.n_nodes
    echo["n_edges"] = len(graph.edges)
    return graph, echo


def _run_settings(args, cfg: dict):
    delta_t = float(_pick(args.delta_t, cfg, "delta_t", 0.05))
    depth = int(_pick(args.depth, cfg, "depth", 200))
    lam = float(_pick(args.lam, cfg, "lambda", 0.5))
    gain = float(_pick(args.gain, cfg, "w", 1.0))
    return delta_t, depth, lam, gain


def _noise_settings(args, cfg: dict, default_kind: str):
    ncfg = cfg.get("noise") if isinstance(cfg.get("noise"), dict) else {}
    raw_kind = _pick(getattr(args, "noise", None), ncfg, "kind", default_kind)
    try:
        kind = NoiseKind(str(raw_kind))
    except ValueError:
        raise UsageError(f"unknown noise kind {raw_kind!r}") from None
    epsilon_bar = float(_pick(getattr(args, "epsilon_bar", None), ncfg, "epsilon_bar", 0.0))
    seed = int(_pick(args.seed, ncfg, "seed", 0))
    return kind, epsilon_bar, seed


def cmd_graph(args) -> int:
    cfg = _load_config(args.config)
    seed = int(_pick(args.seed, cfg, "seed", 0))
    if sum(x is not None for x in (args.graph, args.regular, args.er)) != 1:
        raise UsageError("graph needs exactly one of --graph, --regular, --er")
    if args.regular is not None:
        graph = random_regular(int(args.regular[0]), int(args.regular[1]), seed)
    elif args.er is not None:
        try:
            n, p = int(args.er[0]), float(args.er[1])
        except ValueError:
            raise UsageError(f"--er expects an integer and a real, got {args.er}") from None
        graph = erdos_renyi(n, p, seed)
    else:
        graph = load_edge_list(args.graph)
    out = _pick(args.out, cfg, "out")
    if out is None:
        out = Path(os.environ.get(ENV_OUT_DIR, ".")) / "graph.edges"
    save_edge_list(graph, out)
    print(f"nodes {graph.n_nodes} edges {len(graph.edges)} -> {out}")
    if graph.n_nodes <= BRUTE_FORCE_MAX_NODES:
        value, arg = max_cut_brute_force(graph)
        print(f"max cut {_fmt(value)} at partition {arg:0{graph.n_nodes}b}")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _load_config(args.config)
    graph, graph_echo = _resolve_graph(args, cfg)
    delta_t, depth, lam, gain = _run_settings(args, cfg)
    kind, epsilon_bar, noise_seed = _noise_settings(args, cfg, "none")
    config = RunConfig(
        graph, delta_t, depth,
        FeedbackLaw(lam, gain),
        NoiseModel(kind, epsilon_bar, noise_seed),
    )
    sink = _OutputSink(_resolve_out_dir(args, cfg))
    try:
        trace = engine.run(config)
        diag = maxcut_hamiltonian(graph)
        driver = driver_x(graph.n_nodes)
        report = analysis.lipschitz_bound(trace, delta_t, diag, driver, epsilon_bar)
        spectrum = assumption_report(diag, driver, uniform_state(graph.n_nodes))
        succ = analysis.success_probability(trace.final_state, spectrum.ground_states)
        errors = trace.costs - trace.ground_energy
        rows = [
            [t + 1, trace.betas[t], trace.a_values[t], trace.costs[t], errors[t]]
            for t in range(depth)
        ]
        sink.write_csv("trace.csv", ["layer", "beta", "a", "cost", "cost_error"], rows)
        summary = {
            "graph": graph_echo,
            "delta_t": delta_t,
            "depth": depth,
            "lambda": lam,
            "w": gain,
            "noise": {"kind": kind.value, "epsilon_bar": epsilon_bar, "seed": noise_seed},
            "ground_energy": trace.ground_energy,
            "final_cost": float(trace.costs[-1]),
            "final_cost_error": trace.final_cost_error,
            "success_probability": succ,
            "l_value": report.l_value,
            "fidelity_lower_bound": report.fidelity_lower_bound,
            "bound_vacuous": report.vacuous,
            "assumptions": {
                "ground_energy": spectrum.ground_energy,
                "n_ground_states": len(spectrum.ground_states),
                "first_excited_energy": spectrum.first_excited_energy,
                "degenerate_eigenvalues": spectrum.degenerate_eigenvalues,
                "degenerate_gaps": spectrum.degenerate_gaps,
                "driver_connected": spectrum.driver_connected,
                "initial_energy_ok": spectrum.initial_energy_ok,
            },
        }
        sink.write_text("summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
        if args.svg:
            xs = list(range(1, depth + 1))
            svg = plotting.line_plot_svg(
                [("cost_error", xs, list(errors)), ("beta", xs, list(trace.betas))],
                title="closed-loop trace", x_label="layer", y_label="value",
            )
            sink.write_text("trace.svg", svg)
    except BaseException:
        sink.discard()
        raise
    print(f"wrote {', '.join(str(p) for p in sink.written)}")
    print(
        f"final cost {_fmt(trace.costs[-1])} "
        f"error {_fmt(trace.final_cost_error)} success {_fmt(succ)}"
    )
    return EXIT_OK


def _sweep_cell(payload: dict) -> dict:
    """Run every seed of one (epsilon_bar, lambda) cell. Top level for pickling."""
    graph = Graph(payload["n_nodes"], tuple(tuple(e) for e in payload["edges"]))
    law = FeedbackLaw(payload["lam"], payload["gain"])
    kind = NoiseKind(payload["kind"])
    runs = []
    for seed in payload["seeds"]:
        config = RunConfig(
            graph, payload["delta_t"], payload["depth"], law,
            NoiseModel(kind, payload["epsilon_bar"], int(seed)),
        )
        runs.append(engine.run(config))
    diag = maxcut_hamiltonian(graph)
    driver = driver_x(graph.n_nodes)
    p0, _ = ground_energy(diag)
    summary = analysis.aggregate(runs, p0)
    rows = []
    for seed, trace in zip(payload["seeds"], runs):
        ideal = engine.replay(
            trace.betas, np.zeros_like(trace.betas), trace.config.delta_t, diag, driver
        )
        fid = abs(inner_product(ideal, trace.final_state))
        rows.append([int(seed), float(trace.costs[-1]), trace.final_cost_error, fid])
    return {"summary": summary, "rows": rows}


def cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    graph, _ = _resolve_graph(args, cfg)
    delta_t, depth, lam, gain = _run_settings(args, cfg)
    kind, _, _ = _noise_settings(args, cfg, "systematic")
    if kind is NoiseKind.NONE:
        raise UsageError("sweep needs a noisy kind: systematic or independent")
    epsilon_bars = _float_list(_pick(args.epsilon_bars, cfg, "epsilon_bars"), "epsilon_bars")
    lambdas_raw = _pick(args.lambdas, cfg, "lambdas")
    lambdas = _float_list(lambdas_raw, "lambdas") if lambdas_raw is not None else [lam]
    seeds = _seed_list(_pick(args.seeds, cfg, "seeds"))
    jobs = int(_pick(args.jobs, cfg, "jobs", 1))
    payloads = [
        {
            "n_nodes": graph.n_nodes, "edges": graph.edges,
            "delta_t": delta_t, "depth": depth, "lam": lv, "gain": gain,
            "kind": kind.value, "epsilon_bar": eb, "seeds": seeds,
        }
        for eb in epsilon_bars
        for lv in lambdas
    ]
    results = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_sweep_cell, p) for p in payloads]
            for payload, fut in zip(payloads, futures):
                try:
                    results.append(fut.result())
                except Exception as exc:
                    raise RuntimeError(
                        f"cell epsilon_bar={payload['epsilon_bar']:g} "
                        f"lambda={payload['lam']:g} failed: {exc}"
                    ) from exc
    else:
        for payload in payloads:
            try:
                results.append(_sweep_cell(payload))
            except (ValueError, RuntimeError) as exc:
                raise RuntimeError(
                    f"cell epsilon_bar={payload['epsilon_bar']:g} "
                    f"lambda={payload['lam']:g} failed: {exc}"
                ) from exc
    sink = _OutputSink(_resolve_out_dir(args, cfg))
    try:
        agg_rows = []
        for payload, result in zip(payloads, results):
            s = result["summary"]
            name = f"cell_eps{payload['epsilon_bar']:g}_lam{payload['lam']:g}.csv"
            sink.write_csv(
                name, ["seed", "final_cost", "final_cost_error", "fidelity"],
                result["rows"],
            )
            agg_rows.append([
                s.epsilon_bar, s.lam, s.n_seeds,
                s.mean_final_cost_error, s.std_final_cost_error,
            ])
        sink.write_csv(
            "aggregate.csv",
            ["epsilon_bar", "lambda", "n_seeds",
             "mean_final_cost_error", "std_final_cost_error"],
            agg_rows,
        )
        if args.svg:
            series = []
            for lv in lambdas:
                xs, ys = [], []
                for payload, result in zip(payloads, results):
                    if payload["lam"] == lv:
                        xs.append(payload["epsilon_bar"])
                        ys.append(result["summary"].mean_final_cost_error)
                series.append((f"lambda={lv:g}", xs, ys))
            sink.write_text(
                "sweep.svg",
                plotting.line_plot_svg(
                    series, title="final cost error vs error bound",
                    x_label="epsilon_bar", y_label="mean final cost error",
                ),
            )
    except BaseException:
        sink.discard()
        raise
    print(f"wrote {', '.join(str(p) for p in sink.written)}")
    for payload, result in zip(payloads, results):
        s = result["summary"]
        print(
            f"epsilon_bar {payload['epsilon_bar']:g} lambda {payload['lam']:g}: "
            f"mean error {_fmt(s.mean_final_cost_error)} "
            f"(std {_fmt(s.std_final_cost_error)}, n={s.n_seeds})"
        )
    return EXIT_OK


def _read_trace_betas(path: Path) -> np.ndarray:
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise UsageError(f"{path} is empty")
    header = lines[0].split(",")
    try:
        col = header.index("beta")
    except ValueError:
        raise UsageError(f"{path} has no 'beta' column") from None
    betas = []
    for line in lines[1:]:
        if not line.strip():
            continue
        parts = line.split(",")
        try:
            betas.append(float(parts[col]))
        except (ValueError, IndexError):
            raise UsageError(f"{path}: unreadable row {line!r}") from None
    if not betas:
        raise UsageError(f"{path} has no data rows")
    return np.array(betas)


def cmd_bound(args) -> int:
    cfg = _load_config(args.config)
    graph, _ = _resolve_graph(args, cfg)
    delta_t, depth, lam, gain = _run_settings(args, cfg)
    diag = maxcut_hamiltonian(graph)
    driver = driver_x(graph.n_nodes)
    if args.trace is not None:
        betas = _read_trace_betas(Path(args.trace))
        depth = betas.size
    else:
        config = RunConfig(graph, delta_t, depth, FeedbackLaw(lam, gain), NoiseModel())
        betas = engine.run_nominal(config).betas
    epsilon_bars = _float_list(_pick(args.epsilon_bars, cfg, "epsilon_bars"), "epsilon_bars")
    draws = int(_pick(args.draws, cfg, "draws", 100))
    if draws < 1:
        raise UsageError(f"draws must be at least 1, got {draws}")
    seed = int(_pick(args.seed, cfg, "seed", 0))
    base = analysis.lipschitz_from_betas(betas, delta_t, diag, driver, 0.0)
    l_value = base.l_value
    rows = []
    for eb in epsilon_bars:
        raw = 1.0 - 0.5 * (l_value * float(eb)) ** 2
        model = NoiseModel(NoiseKind.INDEPENDENT, float(eb), seed)
        empirical = min(
            analysis.replay_fidelity(
                betas, trajectory(model, depth, rebuild_index=i + 1),
                delta_t, diag, driver,
            )
            for i in range(draws)
        )
        rows.append([
            float(eb), l_value, min(1.0, max(0.0, raw)), empirical, draws, raw < 0.0,
        ])
    sink = _OutputSink(_resolve_out_dir(args, cfg))
    try:
        sink.write_csv(
            "bound.csv",
            ["epsilon_bar", "l_value", "fidelity_lower_bound",
             "empirical_min_fidelity", "draws", "vacuous"],
            rows,
        )
        if args.svg:
            xs = [r[0] for r in rows]
            sink.write_text(
                "bound.svg",
                plotting.line_plot_svg(
                    [("lower bound", xs, [r[2] for r in rows]),
                     ("empirical min", xs, [r[3] for r in rows])],
                    title="fidelity bound", x_label="epsilon_bar", y_label="fidelity",
                ),
            )
    except BaseException:
        sink.discard()
        raise
    print(f"wrote {', '.join(str(p) for p in sink.written)}")
    print(f"l_value {_fmt(l_value)} over {depth} layers")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="falqon",
        description="Feedback-driven MaxCut optimization on a dense statevector simulator.",
    )
    sub = parser.add_subparsers(dest="command")

    def add_common(sp, out_help):
        sp.add_argument("--config", help="JSON config file; flags override its entries")
        sp.add_argument("--out", help=out_help)
        sp.add_argument("--seed", type=int, help="noise/draw seed (generator seed for 'graph')")
        sp.add_argument("--jobs", type=int, help="worker processes for sweep cells")
        sp.add_argument("--svg", action="store_true", help="also write SVG plots")

    def add_graph_source(sp):
        sp.add_argument("--graph", help="edge-list file to load")
        sp.add_argument("--regular", nargs=2, type=int, metavar=("N", "D"),
                        help="random D-regular graph on N nodes")
        sp.add_argument("--er", nargs=2, metavar=("N", "P"),
                        help="Erdos-Renyi graph on N nodes with edge probability P")
        sp.add_argument("--graph-seed", type=int,
                        help="generator seed when the instance is built inline")

    def add_run_params(sp, with_noise=True):
        sp.add_argument("--delta-t", type=float, help="layer time step (default 0.05)")
        sp.add_argument("--depth", type=int, help="number of layers (default 200)")
        sp.add_argument("--lambda", dest="lam", type=float,
                        help="feedback regularization weight (default 0.5)")
        sp.add_argument("--w", dest="gain", type=float, help="feedback gain (default 1)")
        if with_noise:
            sp.add_argument("--noise", choices=[k.value for k in NoiseKind],
                            help="error model kind")
            sp.add_argument("--epsilon-bar", type=float, help="error magnitude bound")

    sp = sub.add_parser("graph", help="generate or normalize an instance file")
    add_common(sp, out_help="output edge-list file (default: graph.edges in $FALQON_OUT or '.')")
    add_graph_source(sp)
    sp.set_defaults(handler=cmd_graph)

    sp = sub.add_parser("run", help="one closed-loop run")
    add_common(sp, out_help="output directory (default: $FALQON_OUT or '.')")
    add_graph_source(sp)
    add_run_params(sp)
    sp.set_defaults(handler=cmd_run)

    sp = sub.add_parser("sweep", help="grid of (epsilon_bar, lambda) cells over seeds")
    add_common(sp, out_help="output directory (default: $FALQON_OUT or '.')")
    add_graph_source(sp)
    add_run_params(sp)
    sp.add_argument("--epsilon-bars", help="comma list of error bounds, e.g. 0.1,0.25")
    sp.add_argument("--lambdas", help="comma list of regularization weights")
    sp.add_argument("--seeds", help="comma list and/or a:b ranges, e.g. 0:50")
    sp.set_defaults(handler=cmd_sweep)

    sp = sub.add_parser("bound", help="fidelity lower bound vs empirical minimum")
    add_common(sp, out_help="output directory (default: $FALQON_OUT or '.')")
    add_graph_source(sp)
    add_run_params(sp, with_noise=False)
    sp.add_argument("--trace", help="trace.csv to take the control sequence from")
    sp.add_argument("--epsilon-bars", help="comma list of error bounds")
    sp.add_argument("--draws", type=int, help="independent error draws per bound row (default 100)")
    sp.set_defaults(handler=cmd_bound)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "handler"):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
