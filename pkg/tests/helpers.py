"""Independent reference implementations the tests use as oracles.

Everything here is deliberately written with different algorithms than
the package (quadratic DP instead of an automaton, explicit path
enumeration instead of counting, full-matrix edit distance) so that an
agreement between the two is meaningful.
"""

from __future__ import annotations

from collections import defaultdict
from random import Random

from hierseq import HierarchyDag


def dp_parse_cost(text: tuple, entries: set[tuple]) -> float:
    """Minimum pieces tiling ``text`` from ``entries``; inf if impossible."""
    n = len(text)
    max_len = max((len(e) for e in entries), default=0)
    inf = float("inf")
    dist = [inf] * (n + 1)
    dist[0] = 0
    for i in range(1, n + 1):
        for length in range(1, min(i, max_len) + 1):
            if dist[i - length] + 1 < dist[i] and text[i - length : i] in entries:
                dist[i] = dist[i - length] + 1
    return dist[n]


def full_matrix_levenshtein(a, b) -> int:
    rows = len(a) + 1
    cols = len(b) + 1
    d = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        d[i][0] = i
    for j in range(cols):
        d[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            sub = 0 if a[i - 1] == b[j - 1] else 1
            d[i][j] = min(
                d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + sub
            )
    return d[rows - 1][cols - 1]


def enumerate_paths(dag: HierarchyDag) -> list[tuple[int, ...]]:
    """Every source-to-target path, one entry per distinct edge path."""
    adj: dict[int, list[int]] = defaultdict(list)
    for piece, host, _index in dag.edges():
        adj[piece].append(host)
    paths: list[tuple[int, ...]] = []

    def walk(v: int, acc: list[int]) -> None:
        if dag.is_target(v):
            paths.append(tuple(acc))
            return
        for host in adj[v]:
            walk(host, acc + [host])

    for s in dag.sources():
        walk(s, [s])
    return paths


def paths_through(paths: list[tuple[int, ...]], v: int) -> int:
    return sum(1 for p in paths if v in p)


def paths_avoiding(paths: list[tuple[int, ...]], removed: set[int]) -> int:
    return sum(1 for p in paths if not removed.intersection(p))


def exhaustive_best_saving(dag: HierarchyDag, scope=None) -> int | None:
    """Maximum edge-cost saving over every repeated token window.

    Enumerates all windows of length >= 2 over the in-scope parse forms
    (skipping windows that span an intermediate's entire parse), counts
    greedy non-overlapping occurrences, and returns the best value of
    count * (len - 1) - len among tokens occurring at least twice, or
    None when no token repeats.
    """
    hosts = [v for v in dag.node_ids() if not dag.is_source(v)]
    if scope is not None:
        hosts = [v for v in hosts if v in set(scope)]
    occs: dict[tuple, list[tuple[int, int]]] = defaultdict(list)
    for host in hosts:
        pieces = dag.parse_of(host)
        m = len(pieces)
        for start in range(m):
            for length in range(2, m - start + 1):
                if (
                    dag.is_intermediate(host)
                    and start == 0
                    and length == m
                ):
                    continue
                occs[tuple(pieces[start : start + length])].append((host, start))
    best = None
    for token, sites in occs.items():
        length = len(token)
        count = 0
        last: dict[int, int] = {}
        for host, start in sorted(sites):
            if start >= last.get(host, -1):
                count += 1
                last[host] = start + length
        if count < 2:
            continue
        saving = count * (length - 1) - length
        if saving >= 0 and (best is None or saving > best):
            best = saving
    return best


def random_target_set(
    rng: Random, n: int, count: int, k_max: int, k_min: int = 4
) -> list[tuple[int, ...]]:
    """Distinct random targets with repeated chunks so hierarchies form."""
    targets: set[tuple[int, ...]] = set()
    chunks = [
        tuple(rng.randrange(n) for _ in range(rng.randint(2, 4)))
        for _ in range(3)
    ]
    while len(targets) < count:
        k = rng.randint(k_min, k_max)
        t: list[int] = []
        while len(t) < k:
            if rng.random() < 0.6:
                t.extend(rng.choice(chunks))
            else:
                t.append(rng.randrange(n))
        targets.add(tuple(t[:k]))
    return sorted(targets)
