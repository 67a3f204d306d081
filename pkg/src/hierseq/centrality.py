"""Path centrality, core extraction and the hourglass score.

The centrality of a node is the number of source-to-target paths through
it: the product of its upstream path count (sources count one; otherwise
the sum over parse pieces) and its downstream path count (targets count
one; otherwise the sum over referencing hosts, with multiplicity).  In a
valid DAG the upstream count of a node equals its string length, and the
total number of source-to-target paths equals the cumulative target
length.

The core is extracted greedily: repeatedly remove the intermediate with
the highest centrality, recomputing on the damaged graph, until the
remaining paths drop to tau times the original total.  The flat core runs
the same greedy on the flattened DAG (targets tiled directly by sources),
where the only removable nodes are sources and targets and a node's
centrality is simply the number of surviving symbol occurrences it
covers.  The hourglass score compares the two: H = 1 - |core|/|flat core|,
clamped to [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dag import HierarchyDag


class DegenerateError(Exception):
    """The flat core is empty, so the hourglass score is undefined."""


@dataclass
class CoreSet:
    """Greedily removed nodes plus the path counts left after each removal."""

    members: list[int]
    tau: float
    total_paths: int
    remaining: list[int] = field(default_factory=list)  # after 0, 1, ... removals

    @property
    def covered_fraction(self) -> float:
        if self.total_paths == 0:
            return 0.0
        return 1.0 - self.remaining[-1] / self.total_paths


def _topo_order(dag: HierarchyDag) -> list[int]:
    """Non-source nodes ordered so every piece precedes its hosts."""
    return sorted(
        (v for v in dag.node_ids() if not dag.is_source(v)),
        key=lambda v: (
            len(dag.string(v)),
            0 if dag.is_intermediate(v) else 1,
            v,
        ),
    )


def path_stats(
    dag: HierarchyDag, removed: frozenset[int] | set[int] = frozenset()
) -> tuple[dict[int, int], dict[int, int], int]:
    """Upstream/downstream path counts with ``removed`` nodes cut out."""
    order = _topo_order(dag)
    up: dict[int, int] = {}
    for s in dag.sources():
        up[s] = 0 if s in removed else 1
    for v in order:
        if v in removed:
            up[v] = 0
            continue
        up[v] = sum(up[p] for p in dag.parse_of(v))
    down: dict[int, int] = {v: 0 for v in up}
    for v in order:
        if v in removed:
            continue
        if dag.is_target(v):
            down[v] = 1
    for v in reversed(order):
        if v in removed or down[v] == 0:
            continue
        d = down[v]
        for p in dag.parse_of(v):
            down[p] += d
    remaining = sum(up[t] for t in dag.targets() if t not in removed)
    return up, down, remaining


def path_centrality(dag: HierarchyDag) -> dict[int, int]:
    """Source-to-target paths through each intermediate."""
    up, down, _ = path_stats(dag)
    return {v: up[v] * down[v] for v in dag.intermediates()}


def greedy_core(dag: HierarchyDag, tau: float) -> CoreSet:
    """Remove highest-centrality intermediates until paths drop to tau * total.

    Ties break toward the longer string, then the smaller node id.  The
    loop also stops when no intermediate carries any path (nothing left to
    cut): with direct source-to-target edges the constraint may be
    unreachable, and the recorded covered fraction says how far it got.
    """
    total = dag.total_target_length()
    core = CoreSet([], tau, total, [total])
    removed: set[int] = set()
    inters = dag.intermediates()
    remaining = total
    while remaining - tau * total > 1e-9:
        up, down, _ = path_stats(dag, removed)
        best_v = None
        best_key = None
        for v in inters:
            if v in removed:
                continue
            c = up[v] * down[v]
            key = (c, len(dag.string(v)), -v)
            if best_key is None or key > best_key:
                best_key = key
                best_v = v
        if best_v is None or best_key[0] == 0:
            break
        removed.add(best_v)
        core.members.append(best_v)
        _, _, remaining = path_stats(dag, removed)
        core.remaining.append(remaining)
    return core


def flat_core(dag: HierarchyDag, tau: float) -> CoreSet:
    """Run the core greedy on the flattened DAG (targets tiled by sources).

    Candidates are sources and targets; coverage counts play the role of
    centrality.  The flat core can never exceed min(used sources, targets).
    """
    targets = dag.targets()
    strings = {t: dag.string(t) for t in targets}
    total = sum(len(s) for s in strings.values())
    core = CoreSet([], tau, total, [total])
    alive_targets = list(targets)
    dead_sources: set[int] = set()
    remaining = total
    while remaining - tau * total > 1e-9:
        src_cov: dict[int, int] = {}
        tgt_cov: dict[int, int] = {}
        for t in alive_targets:
            c = 0
            for sym in strings[t]:
                if sym not in dead_sources:
                    src_cov[sym] = src_cov.get(sym, 0) + 1
                    c += 1
            tgt_cov[t] = c
        best_v = None
        best_key = None
        for s in sorted(src_cov):
            key = (src_cov[s], 1, -s)
            if best_key is None or key > best_key:
                best_key = key
                best_v = ("s", s)
        for t in alive_targets:
            key = (tgt_cov[t], len(strings[t]), -t)
            if best_key is None or key > best_key:
                best_key = key
                best_v = ("t", t)
        if best_v is None or best_key[0] == 0:
            break
        kind, v = best_v
        if kind == "s":
            dead_sources.add(v)
        else:
            alive_targets.remove(v)
        core.members.append(v)
        remaining = sum(
            1
            for t in alive_targets
            for sym in strings[t]
            if sym not in dead_sources
        )
        core.remaining.append(remaining)
    return core


@dataclass(frozen=True)
class HourglassReport:
    value: float
    core: CoreSet
    flat: CoreSet | None


def h_score(dag: HierarchyDag, tau: float) -> HourglassReport:
    """H = 1 - |core| / |flat core|, clamped to [0, 1].

    A DAG with no intermediates scores 0 by convention.  Raises
    DegenerateError when the flat core is empty (tau = 1).
    """
    if not dag.intermediates():
        empty = CoreSet([], tau, dag.total_target_length())
        empty.remaining = [empty.total_paths]
        return HourglassReport(0.0, empty, None)
    flat = flat_core(dag, tau)
    if not flat.members:
        raise DegenerateError("flat core is empty; hourglass score undefined")
    core = greedy_core(dag, tau)
    value = 1.0 - len(core.members) / len(flat.members)
    value = min(1.0, max(0.0, value))
    return HourglassReport(value, core, flat)


def robustness_curve(dag: HierarchyDag, tau: float) -> list[tuple[int, float]]:
    """Fraction of paths remaining after removing the first j core members."""
    core = greedy_core(dag, tau)
    if core.total_paths == 0:
        return [(0, 0.0)]
    return [
        (j, rem / core.total_paths) for j, rem in enumerate(core.remaining)
    ]
