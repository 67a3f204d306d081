"""Incremental growth and shrinkage of an existing hierarchy DAG.

Expansion happens in two stages.  Stage one parses each new target
optimally over the current dictionary (sources plus intermediates) and
attaches it with that parse; existing nodes only ever gain out-edges, and
no intermediate is created.  Stage two runs the greedy repeat loop over
the new targets' parse forms only, so shared structure introduced by the
batch is extracted without touching any pre-existing parse; the new
intermediates may still tile old ones, since the scan works over the
extended alphabet.

The marginal cost of a candidate target is its stage-one parse cost
against the live dictionary — cheap, side-effect free, and the quantity
the selection models compare.  A clone-and-commit variant (run the full
expansion on a copy, measure the cost delta) exists for sensitivity
checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dag import HierarchyDag, DuplicateTargetError, PruneReport
from .greedy import greedy_compress
from .parse import Matcher, Parse, optimal_parse
from .symbols import SymbolString


@dataclass
class ExpansionReport:
    new_targets: list[int] = field(default_factory=list)
    parses: list[Parse] = field(default_factory=list)
    new_intermediates: list[int] = field(default_factory=list)
    cost_before: int = 0
    cost_after: int = 0


def expand(
    dag: HierarchyDag,
    new_targets: list[SymbolString],
    *,
    compress: bool = True,
) -> ExpansionReport:
    """Attach ``new_targets`` by optimal parse, then compress their forms."""
    report = ExpansionReport(cost_before=dag.edge_cost())
    pending: set[SymbolString] = set()
    for t in new_targets:
        t = tuple(t)
        if dag.target_id(t) is not None or t in pending:
            raise DuplicateTargetError(f"target string already present: {t}")
        pending.add(t)
    if new_targets:
        matcher = Matcher.for_dag(dag)
        for t in new_targets:
            parse = optimal_parse(tuple(t), matcher)
            nid = dag.add_target(tuple(t), list(parse.pieces))
            report.new_targets.append(nid)
            report.parses.append(parse)
        if compress:
            report.new_intermediates = greedy_compress(
                dag, list(report.new_targets)
            )
    report.cost_after = dag.edge_cost()
    return report


def marginal_cost(
    dag: HierarchyDag, t: SymbolString, *, mode: str = "parse"
) -> int:
    """Cost a candidate target against the live DAG without mutating it.

    ``parse`` mode is the stage-one parse cost; ``commit`` clones the DAG,
    runs the full expansion and reports the edge-cost delta.
    """
    if mode == "parse":
        return optimal_parse(tuple(t), Matcher.for_dag(dag)).cost
    if mode == "commit":
        work = dag.clone()
        report = expand(work, [tuple(t)])
        return report.cost_after - report.cost_before
    raise ValueError(f"unknown cost mode {mode!r}")


class CostEvaluator:
    """Batch-scoped marginal-cost evaluator over one dictionary snapshot."""

    def __init__(self, dag: HierarchyDag, *, mode: str = "parse"):
        self._dag = dag
        self._mode = mode
        self._matcher = Matcher.for_dag(dag) if mode == "parse" else None
        self._cache: dict[SymbolString, int] = {}

    def cost(self, t: SymbolString) -> int:
        t = tuple(t)
        hit = self._cache.get(t)
        if hit is None:
            if self._mode == "parse":
                hit = optimal_parse(t, self._matcher).cost
            else:
                hit = marginal_cost(self._dag, t, mode=self._mode)
            self._cache[t] = hit
        return hit


def incremental_step(
    dag: HierarchyDag,
    t_plus: list[SymbolString],
    t_minus: list[int],
) -> tuple[ExpansionReport, PruneReport]:
    """One evolution step: expand with ``t_plus``, then prune ``t_minus``."""
    expansion = expand(dag, t_plus)
    prune = dag.remove_targets_and_prune(t_minus)
    return expansion, prune
