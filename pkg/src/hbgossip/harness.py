"""Seeded multi-trial experiment runner.

Each trial draws a fresh standard-normal initial vector; every configured
protocol runs on that same vector with its own sample stream, derived
deterministically from (master_seed, trial, label). Traces are written as
CSV with 17 significant digits so reruns are byte-identical.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field

import numpy as np

from .protocols import ProtocolConfig, run_protocol
from .topology import Graph, make_cycle, make_grid2d, make_rgg, read_edge_list

FMT = "%.17g"


def _fmt(v: float) -> str:
    return FMT % v


@dataclass(frozen=True)
class GraphSpec:
    family: str | None = None  # cycle | grid | rgg
    n: int = 0
    rows: int = 0
    cols: int = 0
    seed: int = 0
    file: str | None = None  # alternative: load an edge-list file

    def build(self) -> Graph:
        if self.file is not None:
            return read_edge_list(self.file)
        if self.family == "cycle":
            return make_cycle(self.n)
        if self.family == "grid":
            return make_grid2d(self.rows, self.cols)
        if self.family == "rgg":
            return make_rgg(self.n, self.seed)
        raise ValueError(f"unknown graph family {self.family!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    graph: GraphSpec
    protocols: tuple  # ((label, ProtocolConfig), ...)
    trials: int = 1
    iters: int = 1
    master_seed: int = 0
    output: str | None = None
    dump_states: bool = False

    def __post_init__(self):
        if self.trials < 1 or self.iters < 1:
            raise ValueError("trials and iters must be >= 1")
        labels = [lbl for lbl, _ in self.protocols]
        if len(labels) != len(set(labels)):
            raise ValueError("protocol labels must be unique")
        if not labels:
            raise ValueError("at least one protocol is required")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        gs = GraphSpec(**d["graph"])
        protos = []
        for p in d["protocols"]:
            p = dict(p)
            label = p.pop("label")
            if "b_diag" in p and p["b_diag"] is not None:
                p["b_diag"] = np.asarray(p["b_diag"], dtype=float)
            protos.append((label, ProtocolConfig(**p)))
        return cls(
            graph=gs,
            protocols=tuple(protos),
            trials=d.get("trials", 1),
            iters=d.get("iters", 1),
            master_seed=d.get("master_seed", 0),
            output=d.get("output"),
            dump_states=d.get("dump_states", False),
        )

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path) as f:
            return cls.from_dict(json.load(f))


@dataclass(frozen=True)
class TraceTable:
    labels: tuple
    trials: int
    iters: int
    # label -> (trials, iters+1) relative-error array
    traces: dict = field(default_factory=dict)

    def aggregate(self, label) -> np.ndarray:
        return self.traces[label].mean(axis=0)

    def write_csv(self, path) -> None:
        agg_path = str(path) + ".agg.csv" if not str(path).endswith(".csv") else str(path)[:-4] + ".agg.csv"
        with open(path, "w") as f:
            f.write("label,trial,iter,rel_err\n")
            for label in self.labels:
                arr = self.traces[label]
                for t in range(self.trials):
                    for k in range(self.iters + 1):
                        f.write(f"{label},{t},{k},{_fmt(arr[t, k])}\n")
        with open(agg_path, "w") as f:
            f.write("label,iter,mean_rel_err\n")
            for label in self.labels:
                agg = self.aggregate(label)
                for k in range(self.iters + 1):
                    f.write(f"{label},{k},{_fmt(agg[k])}\n")


def trial_init_rng(master_seed: int, trial: int) -> np.random.Generator:
    """PCG64 stream for the trial's initial values."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(trial,)))


def protocol_rng(master_seed: int, trial: int, label: str) -> np.random.Generator:
    """PCG64 stream for one protocol's samples; label enters via crc32 so
    streams are independent of list position and stable across platforms."""
    key = zlib.crc32(label.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(trial, key)))


def run_experiment(cfg: ExperimentConfig, graph: Graph | None = None) -> TraceTable:
    """Execute every (trial, protocol) pair; deterministic end to end."""
    g = graph if graph is not None else cfg.graph.build()
    labels = tuple(lbl for lbl, _ in cfg.protocols)
    traces = {lbl: np.empty((cfg.trials, cfg.iters + 1)) for lbl in labels}
    for t in range(cfg.trials):
        c = trial_init_rng(cfg.master_seed, t).standard_normal(g.n)
        for label, pcfg in cfg.protocols:
            rng = protocol_rng(cfg.master_seed, t, label)
            tr = run_protocol(pcfg, g, c, cfg.iters, rng, dump_states=cfg.dump_states)
            traces[label][t] = tr.rel_err
    table = TraceTable(labels=labels, trials=cfg.trials, iters=cfg.iters, traces=traces)
    if cfg.output is not None:
        table.write_csv(cfg.output)
    return table


def _sweep(base: ExperimentConfig, protocols, suffix: str) -> ExperimentConfig:
    out = None
    if base.output is not None:
        stem = str(base.output)
        if stem.endswith(".csv"):
            stem = stem[:-4]
        out = f"{stem}.{suffix}.csv"
    return ExperimentConfig(
        graph=base.graph,
        protocols=tuple(protocols),
        trials=base.trials,
        iters=base.iters,
        master_seed=base.master_seed,
        output=out,
        dump_states=base.dump_states,
    )


def run_comparisons(base: ExperimentConfig) -> dict[str, TraceTable]:
    """The three head-to-head studies: momentum sweep of pairwise gossip,
    shift-register vs momentum gossip at beta = omega - 1, and the block
    variant's momentum sweep at block size 5."""
    g = base.graph.build()
    results = {}

    sweep = [("mrk-beta0", ProtocolConfig(kind="mrk", omega=1.0, beta=0.0))]
    for b in (0.1, 0.3, 0.5, 0.7, 0.9):
        sweep.append((f"mrk-beta{b}", ProtocolConfig(kind="mrk", omega=1.0, beta=b)))
    results["momentum_sweep"] = run_experiment(_sweep(base, sweep, "momentum_sweep"), g)

    duel = [("baseline", ProtocolConfig(kind="baseline"))]
    for w in (1.2, 1.3):
        duel.append((f"mrk-w{w}", ProtocolConfig(kind="mrk", omega=w, beta=w - 1)))
        duel.append((f"shift-w{w}", ProtocolConfig(kind="shift_register", omega=w)))
    results["shift_register"] = run_experiment(_sweep(base, duel, "shift_register"), g)

    tau = min(5, g.m)
    block = [("baseline", ProtocolConfig(kind="baseline"))]
    for b in (0.0, 0.3, 0.5, 0.7):
        block.append(
            (f"mrbk-tau{tau}-beta{b}", ProtocolConfig(kind="mrbk", omega=1.0, beta=b, tau=tau))
        )
    results["block_sweep"] = run_experiment(_sweep(base, block, "block_sweep"), g)
    return results
