"""Cost, depth, diversity and stability measurements.

Everything here operates on symbol sequences (tuples) or plain strings;
rendering never affects a distance.  Set similarity uses best-match
Levenshtein similarity summed in both directions over the set sizes, so
it tolerates sets of different cardinality.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .dag import HierarchyDag
from .symbols import SymbolString


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Classic edit distance (insert, delete, substitute all cost 1)."""
    if a == b:
        return 0
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    if la > lb:
        a, b, la, lb = b, a, lb, la
    prev = list(range(la + 1))
    cur = [0] * (la + 1)
    for i in range(1, lb + 1):
        cur[0] = i
        bi = b[i - 1]
        for j in range(1, la + 1):
            if a[j - 1] == bi:
                cur[j] = prev[j - 1]
            else:
                x = prev[j]
                y = cur[j - 1]
                if y < x:
                    x = y
                z = prev[j - 1]
                if z < x:
                    x = z
                cur[j] = x + 1
        prev, cur = cur, prev
    return prev[la]


def similarity(a: Sequence, b: Sequence) -> float:
    """1 - LD/max(|a|, |b|); empty-vs-empty counts as identical."""
    m = max(len(a), len(b))
    if m == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / m


def lev_jaccard(a_set: Sequence[Sequence], b_set: Sequence[Sequence]) -> float:
    """Best-match similarity summed both ways over the set sizes.

    Ties between equally similar partners resolve to the earliest element
    in the stable input order, which keeps the value deterministic; the
    score itself only depends on the maxima.
    """
    if not a_set or not b_set:
        return 1.0 if not a_set and not b_set else 0.0
    forward = sum(max(similarity(a, b) for b in b_set) for a in a_set)
    backward = sum(max(similarity(b, a) for a in a_set) for b in b_set)
    return (forward + backward) / (len(a_set) + len(b_set))


def medoid(
    strings: Sequence[Sequence],
    distance: Callable[[Sequence, Sequence], int] = levenshtein,
) -> int:
    """Index of the element minimizing total distance; first wins ties."""
    if not strings:
        raise ValueError("medoid of an empty collection")
    best_i = 0
    best_total = None
    for i, s in enumerate(strings):
        total = 0
        for other in strings:
            total += distance(s, other)
        if best_total is None or total < best_total:
            best_total = total
            best_i = i
    return best_i


def diversity(
    strings: Sequence[Sequence],
    distance: Callable[[Sequence, Sequence], int] = levenshtein,
) -> float:
    """Mean distance from the medoid, averaged over all members."""
    m = medoid(strings, distance)
    center = strings[m]
    return sum(distance(center, s) for s in strings) / len(strings)


def normalized_cost(dag: HierarchyDag) -> float:
    """Edge cost over cumulative target length; (0, 1] for valid DAGs."""
    total = dag.total_target_length()
    if total == 0:
        raise ValueError("DAG has no targets")
    return dag.edge_cost() / total


def avg_depth(dag: HierarchyDag) -> float:
    """Mean source-to-target path length in edges, averaged over targets."""
    targets = dag.targets()
    if not targets:
        raise ValueError("DAG has no targets")
    order = sorted(
        (v for v in dag.node_ids() if not dag.is_source(v)),
        key=lambda v: (len(dag.string(v)), 0 if dag.is_intermediate(v) else 1, v),
    )
    cnt: dict[int, int] = {s: 1 for s in dag.sources()}
    sm: dict[int, int] = {s: 0 for s in dag.sources()}
    for v in order:
        c = 0
        s = 0
        for p in dag.parse_of(v):
            c += cnt[p]
            s += sm[p] + cnt[p]
        cnt[v] = c
        sm[v] = s
    return sum(sm[t] / cnt[t] for t in targets) / len(targets)


def avg_node_length(dag: HierarchyDag) -> float:
    """Mean intermediate string length; 0 when there are none."""
    inters = dag.intermediates()
    if not inters:
        return 0.0
    return sum(len(dag.string(v)) for v in inters) / len(inters)


def pid(dag: HierarchyDag, targets: Sequence[SymbolString] | None = None) -> float:
    """Incremental-over-clean-slate cost ratio for the same target set."""
    from .greedy import greedy_build

    if targets is None:
        targets = dag.target_strings()
    fresh = greedy_build(dag.alphabet, list(targets))
    return dag.edge_cost() / fresh.edge_cost()


def single_edge_targets(dag: HierarchyDag) -> int:
    return sum(1 for t in dag.targets() if dag.in_degree(t) == 1)


def core_stability(
    history: Sequence[Sequence[Sequence] | None], window: int = 10
) -> list[float | None]:
    """Similarity of each core set to the one ``window`` records earlier."""
    out: list[float | None] = []
    for i in range(len(history)):
        if i < window or history[i] is None or history[i - window] is None:
            out.append(None)
        else:
            out.append(lev_jaccard(history[i], history[i - window]))
    return out


@dataclass(frozen=True)
class StasisReport:
    """Maximal low-drift runs of the top core string, plus cross distances."""

    periods: tuple[tuple[int, int], ...]  # inclusive index ranges
    representatives: tuple[Sequence, ...]  # top string at each period start
    cross_distances: tuple[tuple[float, ...], ...]  # normalized LD matrix

    def fraction(self, total: int) -> float:
        if total <= 0:
            return 0.0
        return sum(b - a + 1 for a, b in self.periods) / total


def stasis_periods(
    history: Sequence[Sequence | None], mu_ld: float, min_len: int
) -> StasisReport:
    """Find maximal runs where consecutive top-string drift stays small.

    Drift between records i-1 and i is LD normalized by the longer length;
    a run extends while drift <= mu_ld, a missing record breaks it, and
    only runs covering at least ``min_len`` records are kept.
    """
    periods: list[tuple[int, int]] = []
    start = None
    for i in range(len(history)):
        cur = history[i]
        prev = history[i - 1] if i > 0 else None
        ok = False
        if i > 0 and cur is not None and prev is not None:
            m = max(len(cur), len(prev))
            drift = 0.0 if m == 0 else levenshtein(cur, prev) / m
            ok = drift <= mu_ld
        if ok:
            if start is None:
                start = i - 1
        else:
            if start is not None and i - 1 - start + 1 >= min_len:
                periods.append((start, i - 1))
            start = None
    if start is not None and len(history) - start >= min_len:
        periods.append((start, len(history) - 1))
    reps = tuple(history[a] for a, _ in periods)
    cross = []
    for r1 in reps:
        row = []
        for r2 in reps:
            m = max(len(r1), len(r2))
            row.append(0.0 if m == 0 else levenshtein(r1, r2) / m)
        cross.append(tuple(row))
    return StasisReport(tuple(periods), reps, tuple(cross))
