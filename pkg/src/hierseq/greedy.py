"""Greedy construction of a hierarchy DAG by repeated-substring extraction.

Candidates are token windows: runs of two or more consecutive parse pieces,
taken from every parse form in scope (targets and intermediates alike).
For a window of token length l occurring f times (non-overlapping,
counted greedily left to right within each parse form and summed over
forms), materializing it as a new node changes the edge cost by
l - f*(l-1): each occurrence collapses l edges to one and the new node's
own parse costs l.  The scan therefore ranks candidates by
saving = f*(l-1) - l, breaking ties toward longer tokens and then the
earliest first occurrence in a deterministic scan order (ascending node
id, ascending offset).

Any window with f >= 2 has saving >= l-2 >= 0, and break-even rewrites
(f = 2, l = 2) are taken: they add structure without changing the cost,
and the loop still terminates because cost-minus-node-count strictly
decreases every step.  The scan enumerates windows level by level on
length, extending only windows whose shorter prefix already repeats,
which prunes the quadratic window space to the repeated part.

Two legality rules keep rewrites valid: a window spanning an
intermediate's entire parse is never a candidate occurrence (collapsing
it would duplicate that node's string or leave it a pure alias), and a
rewrite that would drop some piece's out-degree below two is skipped.
A candidate whose spelled string already names an intermediate is not
materialized twice: its occurrences are rewired to the existing node.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .dag import HierarchyDag, IllegalRewriteError
from .symbols import Alphabet, SymbolString


@dataclass(frozen=True)
class RepeatCandidate:
    """A repeated token window chosen by the scan."""

    token: tuple[int, ...]
    occurrences: tuple[tuple[int, int], ...]  # (host, piece offset), counted
    count: int
    saving: int

    @property
    def length(self) -> int:
        return len(self.token)


def _nonoverlapping(occurrences: list[tuple[int, int]], length: int) -> list[tuple[int, int]]:
    """Greedy left-to-right selection; input is already in scan order."""
    taken: list[tuple[int, int]] = []
    last_end: dict[int, int] = {}
    for host, start in occurrences:
        if start >= last_end.get(host, 0):
            taken.append((host, start))
            last_end[host] = start + length
    return taken


def best_repeat(
    dag: HierarchyDag,
    scope: Iterable[int] | None = None,
    banned: frozenset[tuple[int, ...]] | set[tuple[int, ...]] = frozenset(),
) -> RepeatCandidate | None:
    """Best repeated token window over the in-scope parse forms, or None.

    ``scope`` limits the parse forms scanned (default: every non-source
    node); ``banned`` excludes specific tokens, used to retry after a
    candidate turned out to be an illegal rewrite.
    """
    if scope is None:
        hosts = sorted(v for v in dag.node_ids() if not dag.is_source(v))
    else:
        hosts = sorted(set(scope))
    parses: list[tuple[int, tuple[int, ...], bool]] = []
    for v in hosts:
        parses.append((v, dag.parse_of(v), dag.is_intermediate(v)))

    # level 2 windows, in scan order
    level: dict[tuple[int, ...], list[tuple[int, int]]] = {}
    for v, parse, inter in parses:
        limit = len(parse) - 1
        for j in range(limit):
            if inter and j == 0 and len(parse) == 2:
                continue  # full-span window of an intermediate
            level.setdefault(tuple(parse[j : j + 2]), []).append((v, j))

    parse_len = {v: len(p) for v, p, _ in parses}
    is_inter = {v: i for v, _, i in parses}
    piece_at = {v: p for v, p, _ in parses}

    best: tuple[int, int, tuple[int, int]] | None = None  # saving, length, first occ
    best_cand: RepeatCandidate | None = None
    length = 2
    while level:
        nxt: dict[tuple[int, ...], list[tuple[int, int]]] = {}
        for token, occs in level.items():
            if len(occs) < 2:
                continue
            if token not in banned:
                taken = _nonoverlapping(occs, length)
                f = len(taken)
                if f >= 2:
                    saving = f * (length - 1) - length
                    key = (saving, length, (-taken[0][0], -taken[0][1]))
                    if best is None or key > best:
                        best = key
                        best_cand = RepeatCandidate(token, tuple(taken), f, saving)
            # extend every raw occurrence by one piece
            for host, start in occs:
                end = start + length
                if end >= parse_len[host]:
                    continue
                if is_inter[host] and start == 0 and end + 1 == parse_len[host]:
                    continue  # would become a full-span window
                nxt.setdefault(token + (piece_at[host][end],), []).append((host, start))
        level = nxt
        length += 1
    return best_cand


@dataclass(frozen=True)
class AppliedRepeat:
    node: int
    created: bool
    cost_delta: int


def apply_repeat(dag: HierarchyDag, cand: RepeatCandidate) -> AppliedRepeat:
    """Materialize a candidate, or rewire to an existing same-string node.

    Raises IllegalRewriteError when either route would leave a piece
    under-referenced; callers ban the token and rescan.
    """
    before = dag.edge_cost()
    spelled: SymbolString = tuple(
        s for p in cand.token for s in dag.string(p)
    )
    existing = dag.intermediate_id(spelled)
    if existing is not None:
        dag.rewire_repeat(existing, list(cand.occurrences))
        return AppliedRepeat(existing, False, dag.edge_cost() - before)
    node = dag.materialize_repeat(list(cand.token), list(cand.occurrences))
    delta = dag.edge_cost() - before
    assert delta == -cand.saving, (delta, cand)
    return AppliedRepeat(node, True, delta)


def greedy_compress(
    dag: HierarchyDag, scope: Iterable[int] | None = None
) -> list[int]:
    """Run the repeat loop until no candidate remains; returns new node ids.

    Newly created intermediates join the scope, so their parse forms are
    compressed further in later iterations.
    """
    roots = None if scope is None else set(scope)
    new_nodes: list[int] = []
    banned: set[tuple[int, ...]] = set()
    while True:
        cand = best_repeat(dag, roots, banned)
        if cand is None:
            return new_nodes
        try:
            applied = apply_repeat(dag, cand)
        except IllegalRewriteError:
            banned.add(cand.token)
            continue
        banned.clear()
        if applied.created:
            new_nodes.append(applied.node)
            if roots is not None:
                roots.add(applied.node)


def greedy_build(
    alphabet: Alphabet, targets: Sequence[SymbolString]
) -> HierarchyDag:
    """Build a DAG for ``targets`` from flat parses plus the repeat loop."""
    dag = HierarchyDag(alphabet)
    for t in targets:
        dag.add_flat_target(t)
    greedy_compress(dag)
    return dag
