"""Target generation models: random, mutation and recombination, with and
without cost-based selection.

All models draw from a caller-supplied RNG stream and reject any candidate
whose string duplicates an existing or pending target; duplicate redraws
happen before the selection test and are not counted as trials, so the
acceptance likelihood measures selection pressure only.

Selection compares the candidate's marginal cost against its seed cost(s):
the candidate is accepted outright when the ratio R is at most one and
with probability exp(-beta * (R - 1)) otherwise.  For recombination the
reference cost is, by default, the length-weighted average of the two
seed costs over the inherited fragment lengths; the unscaled sum variant
is selectable for sensitivity checks.  A generator raises StallError
after too many consecutive rejected trials.

Draw order per round is fixed (seed pick(s), then position/crossover
index, then replacement symbol, then one uniform draw per probabilistic
accept test, then the uniform pick among passers), which is what makes
runs reproducible from a seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from random import Random
from typing import Iterable

from .dag import HierarchyDag
from .incremental import CostEvaluator
from .symbols import SymbolString

MODELS = ("RND", "M", "MS", "MR", "MRS")


class StallError(Exception):
    """Selection rejected too many consecutive candidates."""


@dataclass(frozen=True)
class GenModelConfig:
    model: str
    k: int
    beta: float = 1.0
    stall_limit: int = 10_000
    selection_denominator: str = "weighted"  # or "printed"

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.k < 2:
            raise ValueError("target length k must be >= 2")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if self.selection_denominator not in ("weighted", "printed"):
            raise ValueError(
                f"unknown selection denominator {self.selection_denominator!r}"
            )


@dataclass(frozen=True)
class CandidateRecord:
    """One selection trial: the candidate, its cost, ratio and verdict."""

    model: str
    candidate: SymbolString
    seeds: tuple[int, ...]
    cost: int | None
    ratio: float | None
    accepted: bool
    crossover: int | None = None
    fragments: tuple[int, int] | None = None
    probability: float | None = None


@dataclass
class TargetBatch:
    """Accepted strings for one iteration plus the full trial log."""

    model: str
    accepted: list[SymbolString] = field(default_factory=list)
    accepted_costs: list[int | None] = field(default_factory=list)
    records: list[CandidateRecord] = field(default_factory=list)
    tested: int = 0
    passed: int = 0

    @property
    def acceptance_likelihood(self) -> float | None:
        if self.tested == 0:
            return None
        return self.passed / self.tested


def _existing_strings(dag: HierarchyDag) -> set[SymbolString]:
    return set(dag.target_strings())


def gen_rnd(
    cfg: GenModelConfig,
    count: int,
    rng: Random,
    existing: Iterable[SymbolString] = (),
    n: int | None = None,
) -> TargetBatch:
    """k i.i.d. uniform symbols per target; duplicates redrawn."""
    if n is None:
        raise ValueError("gen_rnd needs the alphabet size n")
    batch = TargetBatch("RND")
    taken = set(tuple(e) for e in existing)
    while len(batch.accepted) < count:
        t = tuple(rng.randrange(n) for _ in range(cfg.k))
        if t in taken:
            continue
        taken.add(t)
        batch.accepted.append(t)
        batch.accepted_costs.append(None)
    return batch


def _mutate(seed: SymbolString, rng: Random, n: int) -> SymbolString:
    """Replace one uniformly chosen position by a different symbol."""
    pos = rng.randrange(len(seed))
    old = seed[pos]
    repl = rng.randrange(n - 1)
    if repl >= old:
        repl += 1
    return seed[:pos] + (repl,) + seed[pos + 1 :]


def gen_m(
    dag: HierarchyDag, cfg: GenModelConfig, count: int, rng: Random
) -> TargetBatch:
    """Mutate a uniformly chosen seed target; no selection."""
    targets = dag.targets()
    if not targets:
        raise ValueError("mutation model needs at least one target")
    batch = TargetBatch("M")
    taken = _existing_strings(dag)
    n = dag.n
    while len(batch.accepted) < count:
        seed = targets[rng.randrange(len(targets))]
        t = _mutate(dag.string(seed), rng, n)
        if t in taken:
            continue
        taken.add(t)
        batch.accepted.append(t)
        batch.accepted_costs.append(None)
    return batch


def _accept(ratio: float, beta: float, rng: Random) -> tuple[bool, float | None]:
    if ratio <= 1.0:
        return True, None
    p = math.exp(-beta * (ratio - 1.0))
    return rng.random() < p, p


def gen_ms(
    dag: HierarchyDag,
    cfg: GenModelConfig,
    count: int,
    rng: Random,
    evaluator: CostEvaluator | None = None,
) -> TargetBatch:
    """Mutation plus selection against the seed's in-degree cost.

    Seed costs are read once at batch start and not refreshed mid-batch.
    """
    targets = dag.targets()
    if not targets:
        raise ValueError("mutation model needs at least one target")
    evaluator = evaluator or CostEvaluator(dag)
    seed_cost = {t: dag.in_degree(t) for t in targets}
    batch = TargetBatch("MS")
    taken = _existing_strings(dag)
    n = dag.n
    stall = 0
    while len(batch.accepted) < count:
        seed = targets[rng.randrange(len(targets))]
        t = _mutate(dag.string(seed), rng, n)
        if t in taken:
            continue
        cost = evaluator.cost(t)
        ratio = cost / seed_cost[seed]
        ok, p = _accept(ratio, cfg.beta, rng)
        batch.tested += 1
        batch.records.append(
            CandidateRecord("MS", t, (seed,), cost, ratio, ok, probability=p)
        )
        if ok:
            batch.passed += 1
            taken.add(t)
            batch.accepted.append(t)
            batch.accepted_costs.append(cost)
            stall = 0
        else:
            stall += 1
            if stall >= cfg.stall_limit:
                raise StallError(
                    f"{stall} consecutive rejections in the MS model"
                )
    return batch


def recombinations(
    ts1: SymbolString, ts2: SymbolString, i: int, c: int
) -> list[tuple[SymbolString, tuple[int, int]]]:
    """The four crossover assemblies for index i (1-based, 1 <= i <= k-1).

    Each result keeps length k and inherits k-1 symbols split between the
    seeds; the returned pair counts symbols taken from seed one and seed
    two respectively.
    """
    k = len(ts1)
    pre1, suf1 = ts1[: i - 1], ts1[i:]
    pre2, suf2 = ts2[: i - 1], ts2[i:]
    mid = (c,)
    return [
        (pre1 + mid + suf2, (i - 1, k - i)),
        (pre2 + mid + suf1, (k - i, i - 1)),
        (suf2 + mid + pre1, (i - 1, k - i)),
        (suf1 + mid + pre2, (k - i, i - 1)),
    ]


def _pick_two(targets: list[int], rng: Random) -> tuple[int, int]:
    i1 = rng.randrange(len(targets))
    i2 = rng.randrange(len(targets) - 1)
    if i2 >= i1:
        i2 += 1
    return targets[i1], targets[i2]


def gen_mrs(
    dag: HierarchyDag,
    cfg: GenModelConfig,
    count: int,
    rng: Random,
    evaluator: CostEvaluator | None = None,
) -> TargetBatch:
    """Recombination of two distinct seeds plus selection over all four
    assemblies; one passer is emitted uniformly per successful round.

    The replacement symbol is uniform over the whole alphabet.  The
    reference cost weights each seed's cost by the inherited fragment
    length (or sums them unscaled under the ``printed`` denominator).
    """
    targets = dag.targets()
    if len(targets) < 2:
        raise ValueError("recombination needs at least two targets")
    evaluator = evaluator or CostEvaluator(dag)
    seed_cost = {t: dag.in_degree(t) for t in targets}
    batch = TargetBatch("MRS")
    taken = _existing_strings(dag)
    n = dag.n
    k = cfg.k
    stall = 0
    while len(batch.accepted) < count:
        s1, s2 = _pick_two(targets, rng)
        i = rng.randrange(1, k)
        c = rng.randrange(n)
        four = recombinations(dag.string(s1), dag.string(s2), i, c)
        passers: list[tuple[SymbolString, int]] = []
        for t, (f1, f2) in four:
            if t in taken:
                continue
            cost = evaluator.cost(t)
            c1, c2 = seed_cost[s1], seed_cost[s2]
            if cfg.selection_denominator == "weighted":
                ref = (f1 * c1 + f2 * c2) / (f1 + f2)
            else:
                ref = f1 * c1 + f2 * c2
            ratio = cost / ref
            ok, p = _accept(ratio, cfg.beta, rng)
            batch.tested += 1
            batch.records.append(
                CandidateRecord(
                    "MRS", t, (s1, s2), cost, ratio, ok,
                    crossover=i, fragments=(f1, f2), probability=p,
                )
            )
            if ok:
                batch.passed += 1
                stall = 0
                passers.append((t, cost))
            else:
                stall += 1
                if stall >= cfg.stall_limit:
                    raise StallError(
                        f"{stall} consecutive rejections in the MRS model"
                    )
        if not passers:
            continue
        t, cost = passers[rng.randrange(len(passers))]
        taken.add(t)
        batch.accepted.append(t)
        batch.accepted_costs.append(cost)
    return batch


def gen_mr(
    dag: HierarchyDag, cfg: GenModelConfig, count: int, rng: Random
) -> TargetBatch:
    """Recombination without selection: one of the four assemblies is
    chosen uniformly and always accepted, so the acceptance likelihood is
    one by construction."""
    targets = dag.targets()
    if len(targets) < 2:
        raise ValueError("recombination needs at least two targets")
    batch = TargetBatch("MR")
    taken = _existing_strings(dag)
    n = dag.n
    k = cfg.k
    while len(batch.accepted) < count:
        s1, s2 = _pick_two(targets, rng)
        i = rng.randrange(1, k)
        c = rng.randrange(n)
        four = recombinations(dag.string(s1), dag.string(s2), i, c)
        t, frags = four[rng.randrange(4)]
        if t in taken:
            continue
        batch.tested += 1
        batch.passed += 1
        batch.records.append(
            CandidateRecord(
                "MR", t, (s1, s2), None, None, True,
                crossover=i, fragments=frags,
            )
        )
        taken.add(t)
        batch.accepted.append(t)
        batch.accepted_costs.append(None)
    return batch


def generate(
    dag: HierarchyDag,
    cfg: GenModelConfig,
    count: int,
    rng: Random,
    evaluator: CostEvaluator | None = None,
) -> TargetBatch:
    """Dispatch to the configured model."""
    if cfg.model == "RND":
        return gen_rnd(cfg, count, rng, _existing_strings(dag), n=dag.n)
    if cfg.model == "M":
        return gen_m(dag, cfg, count, rng)
    if cfg.model == "MS":
        return gen_ms(dag, cfg, count, rng, evaluator)
    if cfg.model == "MR":
        return gen_mr(dag, cfg, count, rng)
    return gen_mrs(dag, cfg, count, rng, evaluator)
