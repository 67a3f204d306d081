"""Evolution engine: repeated generate / expand / prune steps plus the
per-step measurement stream and the clean-slate comparator.

Determinism contract: a (config, seed) pair fixes every byte of the
metric stream.  All randomness flows through named substreams derived
from the seed, the run index, the iteration and a purpose tag, so
inserting or removing a consumer of one stream cannot shift another.
Output files carry no timestamps or absolute paths.

Steady state: each step adds ``b`` accepted targets; once the population
exceeds ``T_s`` the oldest surplus targets (creation order) are removed
and the prune fixpoint cleans up orphaned intermediates.

When the model is MRS, every step also generates a paired selection-free
recombination batch against the same live DAG (read-only, own
substream) and records the ratio of mean accepted marginal costs; a
ratio below one means selection is finding cheaper recombinants than
chance would.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from random import Random
from statistics import mean

from .centrality import HourglassReport, h_score
from .config import RunConfig, config_to_text
from .dag import HierarchyDag
from .greedy import greedy_build
from .incremental import CostEvaluator, expand
from .metrics import (
    avg_depth,
    avg_node_length,
    diversity,
    lev_jaccard,
    levenshtein,
    normalized_cost,
    single_edge_targets,
    stasis_periods,
)
from .symbols import Alphabet, SymbolString, SymbolTable
from .targetgen import GenModelConfig, TargetBatch, gen_mr, gen_rnd, generate


class EngineError(Exception):
    pass


def derived_rng(*parts) -> Random:
    """A named substream: seeding by the joined tag string is stable
    across processes (string seeds hash through sha512, not PYTHONHASHSEED)."""
    return Random(":".join(str(p) for p in parts))


METRIC_FIELDS = (
    "iteration",
    "targets",
    "intermediates",
    "nodes",
    "edge_cost",
    "normalized_cost",
    "avg_depth",
    "avg_node_length",
    "diversity",
    "h",
    "core_size",
    "flat_core_size",
    "core_stability",
    "core_top",
    "single_edge_targets",
    "tested",
    "passed",
    "acceptance",
    "cost_ratio",
)


@dataclass(frozen=True)
class MetricRecord:
    iteration: int
    targets: int
    intermediates: int
    nodes: int
    edge_cost: int
    normalized_cost: float
    avg_depth: float
    avg_node_length: float
    diversity: float
    h: float
    core_size: int
    flat_core_size: int
    core_stability: float | None
    core_top: SymbolString | None
    single_edge_targets: int
    tested: int
    passed: int
    acceptance: float | None
    cost_ratio: float | None

    def to_dict(self) -> dict:
        d = {}
        for name in METRIC_FIELDS:
            v = getattr(self, name)
            if name == "core_top" and v is not None:
                v = list(v)
            d[name] = v
        return d

    def json_line(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, tuple):
        return ".".join(str(x) for x in v)
    return str(v)


@dataclass(frozen=True)
class ComparatorRecord:
    """Incremental DAG vs a clean-slate rebuild of the same target set."""

    iteration: int
    targets: int
    inc_cost: int
    cs_cost: int
    pid: float
    inc_depth: float
    cs_depth: float
    inc_h: float
    cs_h: float
    inc_norm: float
    cs_norm: float

    def json_line(self) -> str:
        d = {
            "iteration": self.iteration,
            "targets": self.targets,
            "inc_cost": self.inc_cost,
            "cs_cost": self.cs_cost,
            "pid": self.pid,
            "inc_depth": self.inc_depth,
            "cs_depth": self.cs_depth,
            "inc_h": self.inc_h,
            "cs_h": self.cs_h,
            "inc_norm": self.inc_norm,
            "cs_norm": self.cs_norm,
        }
        return json.dumps(d, separators=(",", ":"))


@dataclass
class RunState:
    cfg: RunConfig
    run_index: int
    dag: HierarchyDag
    iteration: int = 0
    records: list[MetricRecord] = field(default_factory=list)
    comparator: list[ComparatorRecord] = field(default_factory=list)
    core_history: list[list[SymbolString] | None] = field(default_factory=list)
    top_history: list[SymbolString | None] = field(default_factory=list)
    events: list[str] = field(default_factory=list)
    pair_cache: dict[tuple[SymbolString, SymbolString], int] = field(
        default_factory=dict
    )

    def cached_distance(self, a: SymbolString, b: SymbolString) -> int:
        key = (a, b) if a <= b else (b, a)
        hit = self.pair_cache.get(key)
        if hit is None:
            hit = levenshtein(a, b)
            self.pair_cache[key] = hit
        return hit


def _gen_config(cfg: RunConfig, model: str | None = None) -> GenModelConfig:
    return GenModelConfig(
        model or cfg.model,
        cfg.k,
        beta=cfg.beta,
        stall_limit=cfg.stall_limit,
        selection_denominator=cfg.selection_denominator,
    )


def _measure(
    state: RunState, batch: TargetBatch | None, cost_ratio: float | None
) -> MetricRecord:
    cfg = state.cfg
    dag = state.dag
    report: HourglassReport = h_score(dag, cfg.tau)
    core_strings = [dag.string(v) for v in report.core.members]
    state.core_history.append(core_strings if core_strings else None)
    state.top_history.append(core_strings[0] if core_strings else None)
    stability: float | None = None
    i = len(state.core_history) - 1
    if i >= cfg.window:
        cur, old = state.core_history[i], state.core_history[i - cfg.window]
        if cur is not None and old is not None:
            stability = lev_jaccard(cur, old)
        elif cur is None and old is None:
            stability = 1.0
        elif cur is not None or old is not None:
            stability = 0.0
    div = diversity(dag.target_strings(), state.cached_distance)
    rec = MetricRecord(
        iteration=state.iteration,
        targets=len(dag.targets()),
        intermediates=len(dag.intermediates()),
        nodes=len(dag.node_ids()),
        edge_cost=dag.edge_cost(),
        normalized_cost=normalized_cost(dag),
        avg_depth=avg_depth(dag),
        avg_node_length=avg_node_length(dag),
        diversity=div,
        h=report.value,
        core_size=len(report.core.members),
        flat_core_size=len(report.flat.members) if report.flat else 0,
        core_stability=stability,
        core_top=state.top_history[-1],
        single_edge_targets=single_edge_targets(dag),
        tested=batch.tested if batch else 0,
        passed=batch.passed if batch else 0,
        acceptance=batch.acceptance_likelihood if batch else None,
        cost_ratio=cost_ratio,
    )
    state.records.append(rec)
    return rec


def init_run(cfg: RunConfig, run_index: int) -> RunState:
    """Seed the population with random targets and compress them."""
    rng = derived_rng(cfg.rng_seed, run_index, "init")
    batch = gen_rnd(_gen_config(cfg, "RND"), cfg.s, rng, (), n=cfg.n)
    dag = greedy_build(Alphabet(cfg.n), batch.accepted)
    state = RunState(cfg, run_index, dag)
    state.events.append(
        f"run={run_index} it=0 init targets={cfg.s} cost={dag.edge_cost()}"
    )
    _measure(state, None, None)
    return state


def _paired_cost_ratio(
    state: RunState, batch: TargetBatch, evaluator: CostEvaluator
) -> float | None:
    """Mean accepted cost of the step's MRS batch over a selection-free
    recombination batch drawn read-only against the same DAG."""
    cfg = state.cfg
    mrs_costs = [c for c in batch.accepted_costs if c is not None]
    if not mrs_costs:
        return None
    rng = derived_rng(cfg.rng_seed, state.run_index, state.iteration, "mr")
    mr = gen_mr(state.dag, _gen_config(cfg, "MR"), len(mrs_costs), rng)
    mr_costs = [evaluator.cost(t) for t in mr.accepted]
    denom = mean(mr_costs)
    if denom == 0:
        return None
    return mean(mrs_costs) / denom


def step(state: RunState) -> MetricRecord:
    """One evolution step: generate, expand, trim to steady state, measure."""
    cfg = state.cfg
    state.iteration += 1
    it = state.iteration
    rng = derived_rng(cfg.rng_seed, state.run_index, it, "gen")
    evaluator = CostEvaluator(state.dag, mode=cfg.cost_mode)
    batch = generate(state.dag, _gen_config(cfg), cfg.b, rng, evaluator)
    cost_ratio = None
    if cfg.model == "MRS":
        cost_ratio = _paired_cost_ratio(state, batch, evaluator)
    expansion = expand(state.dag, batch.accepted)
    removed = 0
    inlined = deleted = 0
    surplus = len(state.dag.targets()) - cfg.T_s
    if surplus > 0:
        victims = state.dag.targets()[:surplus]
        prune = state.dag.remove_targets_and_prune(victims)
        removed = len(prune.removed_targets)
        inlined = len(prune.inlined)
        deleted = len(prune.deleted)
    if cfg.validate_every_step:
        issues = state.dag.validate()
        if issues:
            raise EngineError(
                f"run={state.run_index} it={it}: invalid DAG: "
                + "; ".join(f"{i.rule}@{i.node}" for i in issues[:5])
            )
    state.events.append(
        f"run={state.run_index} it={it} added={len(batch.accepted)}"
        f" tested={batch.tested} removed={removed}"
        f" new_nodes={len(expansion.new_intermediates)}"
        f" pruned_del={deleted} pruned_inl={inlined}"
        f" cost={state.dag.edge_cost()}"
    )
    rec = _measure(state, batch, cost_ratio)
    if cfg.eval_every and (it % cfg.eval_every == 0 or it == cfg.iterations):
        state.comparator.append(clean_slate_compare(state))
    return rec


def clean_slate_compare(state: RunState) -> ComparatorRecord:
    """Rebuild the live target set from scratch and compare architectures."""
    dag = state.dag
    cs = greedy_build(dag.alphabet, dag.target_strings())
    inc_h = h_score(dag, state.cfg.tau).value
    cs_h = h_score(cs, state.cfg.tau).value
    return ComparatorRecord(
        iteration=state.iteration,
        targets=len(dag.targets()),
        inc_cost=dag.edge_cost(),
        cs_cost=cs.edge_cost(),
        pid=dag.edge_cost() / cs.edge_cost(),
        inc_depth=avg_depth(dag),
        cs_depth=avg_depth(cs),
        inc_h=inc_h,
        cs_h=cs_h,
        inc_norm=normalized_cost(dag),
        cs_norm=normalized_cost(cs),
    )


@dataclass
class RunResult:
    run_index: int
    records: list[MetricRecord]
    comparator: list[ComparatorRecord]
    top_history: list[SymbolString | None]
    events: list[str]
    dag: HierarchyDag

    @property
    def final(self) -> MetricRecord:
        return self.records[-1]

    def overall_acceptance(self) -> float | None:
        tested = sum(r.tested for r in self.records)
        if tested == 0:
            return None
        return sum(r.passed for r in self.records) / tested

    def mean_cost_ratio(self) -> float | None:
        ratios = [r.cost_ratio for r in self.records if r.cost_ratio is not None]
        if not ratios:
            return None
        return mean(ratios)

    def stasis_fraction(self, mu_ld: float = 0.1, min_len: int = 20) -> float:
        report = stasis_periods(self.top_history, mu_ld, min_len)
        return report.fraction(len(self.top_history))


def run_replicate(
    cfg: RunConfig, run_index: int, out_dir: str | Path | None = None
) -> RunResult:
    state = init_run(cfg, run_index)
    snapshots: list[tuple[int, str, str]] = []  # (iteration, json, dot)
    table = SymbolTable.default(cfg.n)

    def maybe_snapshot() -> None:
        it = state.iteration
        if it in cfg.snapshot_iterations or it in cfg.dot_iterations:
            snapshots.append(
                (
                    it,
                    state.dag.to_json() if it in cfg.snapshot_iterations else "",
                    state.dag.to_dot(table) if it in cfg.dot_iterations else "",
                )
            )

    maybe_snapshot()
    for _ in range(cfg.iterations):
        step(state)
        maybe_snapshot()
    result = RunResult(
        run_index,
        state.records,
        state.comparator,
        state.top_history,
        state.events,
        state.dag,
    )
    if out_dir is not None:
        _write_run(result, cfg, Path(out_dir), snapshots, table)
    return result


def _write_run(
    result: RunResult,
    cfg: RunConfig,
    out_dir: Path,
    snapshots: list[tuple[int, str, str]],
    table: SymbolTable,
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "metrics.jsonl", "w") as f:
        for rec in result.records:
            f.write(rec.json_line() + "\n")
    with open(out_dir / "metrics.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(METRIC_FIELDS)
        for rec in result.records:
            w.writerow(_csv_cell(getattr(rec, name)) for name in METRIC_FIELDS)
    with open(out_dir / "comparator.jsonl", "w") as f:
        for entry in result.comparator:
            f.write(entry.json_line() + "\n")
    with open(out_dir / "events.log", "w") as f:
        for line in result.events:
            f.write(line + "\n")
    (out_dir / "dag_final.json").write_text(result.dag.to_json())
    (out_dir / "dag_final.dot").write_text(result.dag.to_dot(table))
    for it, js, dot in snapshots:
        if js:
            (out_dir / f"dag_it{it}.json").write_text(js)
        if dot:
            (out_dir / f"dag_it{it}.dot").write_text(dot)


SUMMARY_FIELDS = (
    "run",
    "iterations",
    "targets",
    "edge_cost",
    "normalized_cost",
    "avg_depth",
    "avg_node_length",
    "diversity",
    "h",
    "core_size",
    "flat_core_size",
    "acceptance_overall",
    "mean_cost_ratio",
    "stasis_fraction",
    "final_pid",
    "final_cs_depth",
    "final_inc_depth",
    "final_cs_h",
    "final_inc_h",
)


def summarize_run(
    result: RunResult, *, mu_ld: float = 0.1, stasis_min_len: int = 20
) -> dict:
    last = result.final
    comp = result.comparator[-1] if result.comparator else None
    return {
        "run": result.run_index,
        "iterations": last.iteration,
        "targets": last.targets,
        "edge_cost": last.edge_cost,
        "normalized_cost": last.normalized_cost,
        "avg_depth": last.avg_depth,
        "avg_node_length": last.avg_node_length,
        "diversity": last.diversity,
        "h": last.h,
        "core_size": last.core_size,
        "flat_core_size": last.flat_core_size,
        "acceptance_overall": result.overall_acceptance(),
        "mean_cost_ratio": result.mean_cost_ratio(),
        "stasis_fraction": result.stasis_fraction(mu_ld, stasis_min_len),
        "final_pid": comp.pid if comp else None,
        "final_cs_depth": comp.cs_depth if comp else None,
        "final_inc_depth": comp.inc_depth if comp else None,
        "final_cs_h": comp.cs_h if comp else None,
        "final_inc_h": comp.inc_h if comp else None,
    }


def mean_summary(rows: list[dict]) -> dict:
    out = {"run": "mean"}
    for name in SUMMARY_FIELDS[1:]:
        vals = [r[name] for r in rows if r[name] is not None]
        out[name] = mean(vals) if vals else None
    return out


def summary_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(SUMMARY_FIELDS)
    for r in rows + [mean_summary(rows)]:
        w.writerow(_csv_cell(r[name]) for name in SUMMARY_FIELDS)
    return buf.getvalue()


@dataclass
class ExperimentResult:
    cfg: RunConfig
    runs: list[RunResult]

    def summary_rows(self, **kw) -> list[dict]:
        return [summarize_run(r, **kw) for r in self.runs]

    def mean_final(self, name: str) -> float:
        return mean(getattr(r.final, name) for r in self.runs)


def run_experiment(
    cfg: RunConfig, out_dir: str | Path | None = None
) -> ExperimentResult:
    """All replicates of one configuration, plus the output tree."""
    root = Path(out_dir) if out_dir is not None else None
    results = []
    for r in range(cfg.runs):
        sub = root / f"run{r}" if root is not None else None
        results.append(run_replicate(cfg, r, sub))
    exp = ExperimentResult(cfg, results)
    if root is not None:
        root.mkdir(parents=True, exist_ok=True)
        (root / "config.txt").write_text(config_to_text(cfg))
        (root / "summary.csv").write_text(summary_csv(exp.summary_rows()))
    return exp


def load_jsonl(path: str | Path) -> list[dict]:
    out = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line:
                out.append(json.loads(line))
    return out


def discover_runs(root: str | Path) -> list[Path]:
    """Replicate directories under an experiment root, run0 first."""
    root = Path(root)
    if (root / "metrics.jsonl").exists():
        return [root]
    runs = [p for p in root.iterdir() if p.is_dir() and (p / "metrics.jsonl").exists()]
    return sorted(runs, key=lambda p: (len(p.name), p.name))


def analyze_dir(
    root: str | Path, *, mu_ld: float = 0.1, stasis_min_len: int = 20
) -> list[dict]:
    """Recompute per-run summary rows from an experiment's output files."""
    rows = []
    for i, run_dir in enumerate(discover_runs(root)):
        records = load_jsonl(run_dir / "metrics.jsonl")
        comp_path = run_dir / "comparator.jsonl"
        comps = load_jsonl(comp_path) if comp_path.exists() else []
        history = [
            tuple(r["core_top"]) if r["core_top"] is not None else None
            for r in records
        ]
        stasis = stasis_periods(history, mu_ld, stasis_min_len)
        last = records[-1]
        comp = comps[-1] if comps else None
        tested = sum(r["tested"] for r in records)
        ratios = [r["cost_ratio"] for r in records if r["cost_ratio"] is not None]
        rows.append(
            {
                "run": i,
                "iterations": last["iteration"],
                "targets": last["targets"],
                "edge_cost": last["edge_cost"],
                "normalized_cost": last["normalized_cost"],
                "avg_depth": last["avg_depth"],
                "avg_node_length": last["avg_node_length"],
                "diversity": last["diversity"],
                "h": last["h"],
                "core_size": last["core_size"],
                "flat_core_size": last["flat_core_size"],
                "acceptance_overall": (
                    sum(r["passed"] for r in records) / tested if tested else None
                ),
                "mean_cost_ratio": mean(ratios) if ratios else None,
                "stasis_fraction": stasis.fraction(len(history)),
                "final_pid": comp["pid"] if comp else None,
                "final_cs_depth": comp["cs_depth"] if comp else None,
                "final_inc_depth": comp["inc_depth"] if comp else None,
                "final_cs_h": comp["cs_h"] if comp else None,
                "final_inc_h": comp["inc_h"] if comp else None,
            }
        )
    if not rows:
        raise EngineError(f"no run outputs found under {root}")
    return rows
