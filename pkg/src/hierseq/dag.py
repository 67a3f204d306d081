"""Concatenation-hierarchy DAGs over integer symbol strings.

A hierarchy DAG has three node kinds: sources (single alphabet symbols,
in-degree zero), targets (output strings, out-degree zero) and
intermediates (shared substrings).  Every non-source node carries a parse,
the ordered list of nodes whose strings concatenate to its own string.
Edges are implied by parses: piece j of node v contributes the edge
``(piece, v, start)`` where ``start`` is the 1-based offset of that piece
inside v's string.  The edge multiset, the in/out degrees and the edge
cost are therefore all derived from the parse map, which makes the tiling
constraint impossible to violate piecemeal.

Structural rules enforced throughout:

* intermediates are referenced at least twice and parse into at least two
  pieces; intermediate strings are unique;
* targets are never referenced by a parse; a target may parse into a
  single piece (its string then coincides with a dictionary entry);
* parses tile exactly, which together with the kind rules keeps the
  reference graph acyclic (a piece is strictly shorter than its host
  except for single-piece targets, and targets are never pieces).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .symbols import Alphabet, SymbolString, SymbolTable


class DagError(Exception):
    """Base class for structural errors raised by :class:`HierarchyDag`."""


class OverlapError(DagError):
    """Occurrence spans passed to a rewrite overlap each other."""


class DuplicateStringError(DagError):
    """An intermediate with the same string already exists."""


class DuplicateTargetError(DagError):
    """A target with the same string already exists."""


class NotATargetError(DagError):
    """A node passed as a removal victim is not a target."""


class IllegalRewriteError(DagError):
    """A rewrite would leave some intermediate referenced fewer than twice."""


class NodeKind(Enum):
    SOURCE = "source"
    INTERMEDIATE = "intermediate"
    TARGET = "target"


@dataclass(frozen=True)
class ValidationIssue:
    rule: str
    node: int | None
    detail: str


@dataclass
class PruneReport:
    """What a prune pass did: victims, cascaded deletions, inlined nodes."""

    removed_targets: list[tuple[int, SymbolString]] = field(default_factory=list)
    deleted: list[tuple[int, SymbolString]] = field(default_factory=list)
    inlined: list[tuple[int, SymbolString]] = field(default_factory=list)


class HierarchyDag:
    def __init__(self, alphabet: Alphabet):
        self._alphabet = alphabet
        n = alphabet.n
        self._kind: dict[int, NodeKind] = {i: NodeKind.SOURCE for i in range(n)}
        self._string: dict[int, SymbolString] = {i: (i,) for i in range(n)}
        # parse lists exist for every non-source node only
        self._parse: dict[int, list[int]] = {}
        self._out: dict[int, int] = {i: 0 for i in range(n)}
        self._by_string: dict[SymbolString, int] = {}
        self._target_by_string: dict[SymbolString, int] = {}
        self._target_order: list[int] = []
        self._next_id = n
        self._edge_count = 0

    # ------------------------------------------------------------------
    # read access

    @property
    def alphabet(self) -> Alphabet:
        return self._alphabet

    @property
    def n(self) -> int:
        return self._alphabet.n

    def __contains__(self, node: int) -> bool:
        return node in self._kind

    def node_ids(self) -> list[int]:
        return sorted(self._kind)

    def kind(self, node: int) -> NodeKind:
        return self._kind[node]

    def string(self, node: int) -> SymbolString:
        return self._string[node]

    def is_source(self, node: int) -> bool:
        return self._kind[node] is NodeKind.SOURCE

    def is_intermediate(self, node: int) -> bool:
        return self._kind[node] is NodeKind.INTERMEDIATE

    def is_target(self, node: int) -> bool:
        return self._kind[node] is NodeKind.TARGET

    def sources(self) -> range:
        return range(self._alphabet.n)

    def intermediates(self) -> list[int]:
        return sorted(
            v for v, k in self._kind.items() if k is NodeKind.INTERMEDIATE
        )

    def targets(self) -> list[int]:
        """Target node ids in creation order."""
        return list(self._target_order)

    def target_strings(self) -> list[SymbolString]:
        return [self._string[t] for t in self._target_order]

    def parse_of(self, node: int) -> tuple[int, ...]:
        return tuple(self._parse[node])

    def in_degree(self, node: int) -> int:
        parse = self._parse.get(node)
        return 0 if parse is None else len(parse)

    def out_degree(self, node: int) -> int:
        return self._out[node]

    def edge_cost(self) -> int:
        """Total number of edges, equal to the sum of in-degrees."""
        return self._edge_count

    def total_target_length(self) -> int:
        return sum(len(self._string[t]) for t in self._target_order)

    def intermediate_id(self, s: SymbolString) -> int | None:
        return self._by_string.get(tuple(s))

    def target_id(self, s: SymbolString) -> int | None:
        return self._target_by_string.get(tuple(s))

    def dictionary(self) -> dict[SymbolString, int]:
        """Parseable entries: every source symbol plus every intermediate."""
        entries: dict[SymbolString, int] = {
            (i,): i for i in range(self._alphabet.n)
        }
        entries.update(self._by_string)
        return entries

    def edges(self) -> list[tuple[int, int, int]]:
        """Derived edge list ``(piece, host, index)`` with 1-based indices."""
        out: list[tuple[int, int, int]] = []
        for host in sorted(self._parse):
            pos = 1
            for piece in self._parse[host]:
                out.append((piece, host, pos))
                pos += len(self._string[piece])
        return out

    def clone(self) -> "HierarchyDag":
        other = HierarchyDag.__new__(HierarchyDag)
        other._alphabet = self._alphabet
        other._kind = dict(self._kind)
        other._string = dict(self._string)
        other._parse = {v: list(p) for v, p in self._parse.items()}
        other._out = dict(self._out)
        other._by_string = dict(self._by_string)
        other._target_by_string = dict(self._target_by_string)
        other._target_order = list(self._target_order)
        other._next_id = self._next_id
        other._edge_count = self._edge_count
        return other

    # ------------------------------------------------------------------
    # construction

    def _fresh_id(self) -> int:
        nid = self._next_id
        self._next_id += 1
        return nid

    def _check_symbols(self, symbols: SymbolString) -> SymbolString:
        symbols = tuple(symbols)
        for s in symbols:
            if s not in self._alphabet:
                raise ValueError(f"symbol {s!r} outside alphabet of size {self.n}")
        return symbols

    def add_target(self, symbols: SymbolString, pieces: Sequence[int]) -> int:
        """Add a target whose parse is the given piece list."""
        symbols = self._check_symbols(symbols)
        if not symbols:
            raise ValueError("target string must be non-empty")
        if symbols in self._target_by_string:
            raise DuplicateTargetError(
                f"target string already present (node {self._target_by_string[symbols]})"
            )
        pieces = list(pieces)
        if not pieces:
            raise ValueError("target parse must have at least one piece")
        spelled: list[int] = []
        for p in pieces:
            if p not in self._kind:
                raise ValueError(f"unknown piece node {p}")
            if self._kind[p] is NodeKind.TARGET:
                raise ValueError(f"piece {p} is a target; targets cannot be pieces")
            spelled.extend(self._string[p])
        if tuple(spelled) != symbols:
            raise ValueError("parse pieces do not tile the target string")
        nid = self._fresh_id()
        self._kind[nid] = NodeKind.TARGET
        self._string[nid] = symbols
        self._parse[nid] = pieces
        self._out[nid] = 0
        self._target_by_string[symbols] = nid
        self._target_order.append(nid)
        for p in pieces:
            self._out[p] += 1
        self._edge_count += len(pieces)
        return nid

    def add_flat_target(self, symbols: SymbolString) -> int:
        """Add a target tiled symbol-by-symbol from the sources."""
        symbols = self._check_symbols(symbols)
        return self.add_target(symbols, list(symbols))

    def _add_intermediate_node(
        self, symbols: SymbolString, pieces: Sequence[int]
    ) -> int:
        if symbols in self._by_string:
            raise DuplicateStringError(
                f"intermediate string already present (node {self._by_string[symbols]})"
            )
        nid = self._fresh_id()
        self._kind[nid] = NodeKind.INTERMEDIATE
        self._string[nid] = symbols
        self._parse[nid] = list(pieces)
        self._out[nid] = 0
        self._by_string[symbols] = nid
        for p in pieces:
            self._out[p] += 1
        self._edge_count += len(pieces)
        return nid

    # ------------------------------------------------------------------
    # rewiring primitives (piece-window granularity)

    def _piece_offsets(self, host: int) -> list[int]:
        """Symbol offset (0-based) at which each parse piece of host starts."""
        offs = [0]
        for p in self._parse[host]:
            offs.append(offs[-1] + len(self._string[p]))
        return offs

    @staticmethod
    def _check_window_overlap(
        occurrences: Sequence[tuple[int, int]], length: int
    ) -> None:
        last_end: dict[int, int] = {}
        for host, start in sorted(occurrences):
            end = last_end.get(host)
            if end is not None and start < end:
                raise OverlapError(
                    f"windows overlap in host {host} at piece offset {start}"
                )
            last_end[host] = start + length

    def _degree_after_consuming(
        self, consumed: Counter, gained: Counter
    ) -> None:
        """Raise IllegalRewriteError if any intermediate would drop below 2 uses."""
        for piece, c in consumed.items():
            if self._kind[piece] is not NodeKind.INTERMEDIATE:
                continue
            post = self._out[piece] - c + gained.get(piece, 0)
            if post < 2:
                raise IllegalRewriteError(
                    f"rewrite would leave intermediate {piece} with {post} uses"
                )

    def _splice(self, host: int, start: int, length: int, replacement: int) -> None:
        parse = self._parse[host]
        for p in parse[start : start + length]:
            self._out[p] -= 1
        parse[start : start + length] = [replacement]
        self._out[replacement] += 1
        self._edge_count -= length - 1

    def _validate_windows(
        self,
        token: Sequence[int],
        occurrences: Sequence[tuple[int, int]],
    ) -> None:
        length = len(token)
        token = tuple(token)
        seen = set()
        for host, start in occurrences:
            if (host, start) in seen:
                raise OverlapError(f"duplicate window ({host}, {start})")
            seen.add((host, start))
            if host not in self._parse:
                raise ValueError(f"host {host} has no parse")
            parse = self._parse[host]
            if start < 0 or start + length > len(parse):
                raise ValueError(f"window out of range in host {host}")
            if tuple(parse[start : start + length]) != token:
                raise ValueError(
                    f"window ({host}, {start}) does not match the token pieces"
                )
            if (
                self._kind[host] is NodeKind.INTERMEDIATE
                and start == 0
                and length == len(parse)
            ):
                raise IllegalRewriteError(
                    f"window spans the entire parse of intermediate {host}"
                )
        self._check_window_overlap(occurrences, length)

    def materialize_repeat(
        self, pieces: Sequence[int], occurrences: Sequence[tuple[int, int]]
    ) -> int:
        """Create a node for a repeated token window and rewire its occurrences.

        ``pieces`` is the token (a run of existing node ids); every occurrence
        ``(host, piece_offset)`` must currently hold exactly that token.  Each
        occurrence is collapsed to a single edge from the new node, whose own
        parse is the token.  With f occurrences of token length l the edge
        cost changes by exactly l - f*(l-1).
        """
        token = tuple(pieces)
        if len(token) < 2:
            raise ValueError("token must have at least two pieces")
        if len(occurrences) < 2:
            raise ValueError("a repeat needs at least two occurrences")
        self._validate_windows(token, occurrences)
        symbols = tuple(
            s for p in token for s in self._string[p]
        )
        if symbols in self._by_string:
            raise DuplicateStringError(
                f"intermediate string already present (node {self._by_string[symbols]})"
            )
        f = len(occurrences)
        consumed = Counter()
        for p in token:
            consumed[p] += f
        gained = Counter(token)
        self._degree_after_consuming(consumed, gained)
        nid = self._add_intermediate_node(symbols, token)
        for host, start in sorted(occurrences, key=lambda o: (o[0], -o[1])):
            self._splice(host, start, len(token), nid)
        return nid

    def rewire_repeat(
        self, node: int, occurrences: Sequence[tuple[int, int]]
    ) -> None:
        """Collapse token windows spelling an existing intermediate's string.

        Used when a repeat scan finds windows that spell the string of an
        intermediate that already exists (possibly under a different
        tokenization); creating a new node would violate string uniqueness,
        so the windows are rewired to the existing node instead.
        """
        if self._kind.get(node) is not NodeKind.INTERMEDIATE:
            raise ValueError(f"node {node} is not an intermediate")
        if not occurrences:
            raise ValueError("no occurrences to rewire")
        want = self._string[node]
        length = None
        consumed = Counter()
        for host, start in occurrences:
            parse = self._parse.get(host)
            if parse is None:
                raise ValueError(f"host {host} has no parse")
            # windows may tokenize differently per host; check each spells want
            offs = start
            spelled: list[int] = []
            ln = 0
            while offs < len(parse) and len(spelled) < len(want):
                piece = parse[offs]
                spelled.extend(self._string[piece])
                consumed[piece] += 1
                offs += 1
                ln += 1
            if tuple(spelled) != want:
                raise ValueError(
                    f"window ({host}, {start}) does not spell the node string"
                )
            if ln < 2:
                raise ValueError("window must cover at least two pieces")
            if (
                self._kind[host] is NodeKind.INTERMEDIATE
                and start == 0
                and ln == len(parse)
            ):
                raise IllegalRewriteError(
                    f"window spans the entire parse of intermediate {host}"
                )
            if host == node:
                raise IllegalRewriteError("cannot rewire a node onto itself")
        self._degree_after_consuming(consumed, Counter())
        # splice host-by-host, descending offsets so indices stay valid
        spans: list[tuple[int, int, int]] = []
        for host, start in occurrences:
            parse = self._parse[host]
            ln = 0
            total = 0
            while total < len(want):
                total += len(self._string[parse[start + ln]])
                ln += 1
            spans.append((host, start, ln))
        seen_spans: dict[int, list[tuple[int, int]]] = {}
        for host, start, ln in spans:
            seen_spans.setdefault(host, []).append((start, ln))
        for host, sl in seen_spans.items():
            sl.sort()
            for (s1, l1), (s2, _l2) in zip(sl, sl[1:]):
                if s2 < s1 + l1:
                    raise OverlapError(f"windows overlap in host {host}")
        for host, start, ln in sorted(spans, key=lambda x: (x[0], -x[1])):
            self._splice(host, start, ln, node)

    # ------------------------------------------------------------------
    # public spec-level mutation

    def add_intermediate(
        self,
        symbols: SymbolString,
        occurrences: Sequence[tuple[int, int]],
    ) -> int:
        """Add an intermediate for ``symbols`` occurring at ``(node, position)``.

        Positions are 1-based symbol offsets within each host's string.  Every
        occurrence span must align with the host's current piece boundaries;
        the covering pieces are replaced by a single edge from the new node,
        whose parse is taken from the first occurrence's covering window.
        """
        symbols = self._check_symbols(symbols)
        if len(symbols) < 2:
            raise ValueError("an intermediate string needs at least two symbols")
        if len(occurrences) < 2:
            raise ValueError("an intermediate needs at least two occurrences")
        if symbols in self._by_string:
            raise DuplicateStringError(
                f"intermediate string already present (node {self._by_string[symbols]})"
            )
        windows: list[tuple[int, int, int]] = []  # host, piece start, piece len
        for host, pos in occurrences:
            if host not in self._parse:
                raise ValueError(f"host {host} has no parse")
            hstr = self._string[host]
            if pos < 1 or pos - 1 + len(symbols) > len(hstr):
                raise ValueError(f"occurrence ({host}, {pos}) out of range")
            if hstr[pos - 1 : pos - 1 + len(symbols)] != symbols:
                raise ValueError(
                    f"string does not occur at ({host}, {pos})"
                )
            offs = self._piece_offsets(host)
            lo = pos - 1
            hi = lo + len(symbols)
            if lo not in offs or hi not in offs:
                raise ValueError(
                    f"occurrence ({host}, {pos}) does not align with piece boundaries"
                )
            a = offs.index(lo)
            b = offs.index(hi)
            if b - a < 2:
                # a single-piece span would alias an existing node
                raise ValueError(
                    f"occurrence ({host}, {pos}) covers a single piece"
                )
            windows.append((host, a, b - a))
        # overlap check on symbol spans per host
        by_host: dict[int, list[tuple[int, int]]] = {}
        for (host, pos), (_h, a, ln) in zip(occurrences, windows):
            by_host.setdefault(host, []).append((pos - 1, pos - 1 + len(symbols)))
        for host, spans in by_host.items():
            spans.sort()
            for (s1, e1), (s2, _e2) in zip(spans, spans[1:]):
                if s2 < e1:
                    raise OverlapError(
                        f"occurrences overlap in host {host} at symbol {s2 + 1}"
                    )
        for host, a, ln in windows:
            parse = self._parse[host]
            if (
                self._kind[host] is NodeKind.INTERMEDIATE
                and a == 0
                and ln == len(parse)
            ):
                raise IllegalRewriteError(
                    f"occurrence spans the entire parse of intermediate {host}"
                )
        consumed = Counter()
        for host, a, ln in windows:
            for p in self._parse[host][a : a + ln]:
                consumed[p] += 1
        first_host, first_a, first_ln = windows[0]
        new_parse = list(self._parse[first_host][first_a : first_a + first_ln])
        self._degree_after_consuming(consumed, Counter(new_parse))
        nid = self._add_intermediate_node(symbols, new_parse)
        for host, a, ln in sorted(windows, key=lambda w: (w[0], -w[1])):
            self._splice(host, a, ln, nid)
        return nid

    def remove_targets_and_prune(self, victims: Iterable[int]) -> PruneReport:
        """Remove victim targets, then prune orphaned intermediates to fixpoint.

        Intermediates left with zero uses are deleted; intermediates left with
        exactly one use are inlined (their single edge replaced by their own
        parse) and deleted.  Candidates are processed in decreasing
        string-length order, re-checking the live out-degree before each
        action, and the pass repeats until nothing changes.
        """
        victims = list(victims)
        report = PruneReport()
        for v in victims:
            if self._kind.get(v) is not NodeKind.TARGET:
                raise NotATargetError(f"node {v} is not a target")
        for v in victims:
            report.removed_targets.append((v, self._string[v]))
            for p in self._parse[v]:
                self._out[p] -= 1
            self._edge_count -= len(self._parse[v])
            del self._parse[v]
            del self._target_by_string[self._string[v]]
            self._target_order.remove(v)
            del self._kind[v]
            del self._string[v]
            del self._out[v]
        while True:
            weak = [
                v
                for v, k in self._kind.items()
                if k is NodeKind.INTERMEDIATE and self._out[v] < 2
            ]
            if not weak:
                break
            weak.sort(key=lambda v: (-len(self._string[v]), v))
            for v in weak:
                if v not in self._kind or self._out[v] >= 2:
                    continue
                if self._out[v] == 0:
                    report.deleted.append((v, self._string[v]))
                    for p in self._parse[v]:
                        self._out[p] -= 1
                    self._edge_count -= len(self._parse[v])
                    self._delete_intermediate(v)
                else:
                    report.inlined.append((v, self._string[v]))
                    self._inline_intermediate(v)
        return report

    def _delete_intermediate(self, v: int) -> None:
        del self._by_string[self._string[v]]
        del self._parse[v]
        del self._kind[v]
        del self._string[v]
        del self._out[v]

    def _inline_intermediate(self, v: int) -> None:
        host = None
        idx = -1
        for h, parse in self._parse.items():
            for j, p in enumerate(parse):
                if p == v:
                    host, idx = h, j
                    break
            if host is not None:
                break
        assert host is not None, f"out-degree-1 node {v} has no reference"
        pieces = self._parse[v]
        self._parse[host][idx : idx + 1] = pieces
        # piece uses transfer from v's parse into the host's parse: the host
        # gains len(pieces) - 1 edges and v's own parse edges vanish
        self._edge_count -= 1
        del self._by_string[self._string[v]]
        del self._parse[v]
        del self._kind[v]
        del self._string[v]
        del self._out[v]

    # ------------------------------------------------------------------
    # validation

    def validate(self) -> list[ValidationIssue]:
        """Check every structural rule; an empty list means the DAG is valid."""
        issues: list[ValidationIssue] = []
        n = self._alphabet.n
        recount: Counter = Counter()
        edge_total = 0
        for v, kind in self._kind.items():
            s = self._string.get(v)
            if s is None or not s:
                issues.append(ValidationIssue("string", v, "missing or empty string"))
                continue
            if any(not (0 <= c < n) for c in s):
                issues.append(ValidationIssue("symbols", v, f"symbols outside 0..{n - 1}"))
            if kind is NodeKind.SOURCE:
                if v >= n or s != (v,):
                    issues.append(ValidationIssue("source", v, "source id/string mismatch"))
                if v in self._parse:
                    issues.append(ValidationIssue("source", v, "source has a parse"))
                continue
            parse = self._parse.get(v)
            if parse is None:
                issues.append(ValidationIssue("parse", v, "non-source node without parse"))
                continue
            if not parse:
                issues.append(ValidationIssue("parse", v, "empty parse"))
                continue
            spelled: list[int] = []
            ok = True
            for p in parse:
                if p not in self._kind:
                    issues.append(ValidationIssue("piece", v, f"unknown piece {p}"))
                    ok = False
                    break
                if self._kind[p] is NodeKind.TARGET:
                    issues.append(ValidationIssue("piece", v, f"piece {p} is a target"))
                    ok = False
                recount[p] += 1
                spelled.extend(self._string[p])
            edge_total += len(parse)
            if ok and tuple(spelled) != s:
                issues.append(ValidationIssue("tiling", v, "parse does not tile the string"))
            if kind is NodeKind.INTERMEDIATE:
                if len(parse) < 2:
                    issues.append(
                        ValidationIssue("in-degree", v, f"intermediate with in-degree {len(parse)}")
                    )
                if self._by_string.get(s) != v:
                    issues.append(ValidationIssue("uniqueness", v, "string map mismatch"))
            else:
                if self._target_by_string.get(s) != v:
                    issues.append(ValidationIssue("target-map", v, "target map mismatch"))
        for v, kind in self._kind.items():
            have = recount.get(v, 0)
            if self._out.get(v) != have:
                issues.append(
                    ValidationIssue(
                        "out-count", v, f"stored {self._out.get(v)} != actual {have}"
                    )
                )
            if kind is NodeKind.INTERMEDIATE and have < 2:
                issues.append(
                    ValidationIssue("out-degree", v, f"intermediate with out-degree {have}")
                )
            if kind is NodeKind.TARGET and have != 0:
                issues.append(
                    ValidationIssue("out-degree", v, f"target with out-degree {have}")
                )
        if edge_total != self._edge_count:
            issues.append(
                ValidationIssue(
                    "edge-cost", None, f"stored {self._edge_count} != actual {edge_total}"
                )
            )
        if set(self._target_order) != {
            v for v, k in self._kind.items() if k is NodeKind.TARGET
        } or len(self._target_order) != len(set(self._target_order)):
            issues.append(ValidationIssue("target-order", None, "target order list mismatch"))
        for s, v in self._by_string.items():
            if self._kind.get(v) is not NodeKind.INTERMEDIATE or self._string.get(v) != s:
                issues.append(ValidationIssue("uniqueness", v, "stale string map entry"))
        return issues

    # ------------------------------------------------------------------
    # serialization

    def to_snapshot(self) -> dict:
        nodes = []
        for v in sorted(self._kind):
            nodes.append(
                {
                    "id": v,
                    "kind": self._kind[v].value,
                    "symbols": list(self._string[v]),
                }
            )
        parses = {str(v): list(self._parse[v]) for v in sorted(self._parse)}
        return {
            "format": "hierseq-dag-v1",
            "alphabet": self._alphabet.n,
            "nodes": nodes,
            "parses": parses,
            "target_order": list(self._target_order),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_snapshot(), indent=2)

    @classmethod
    def from_snapshot(cls, snap: dict) -> "HierarchyDag":
        if snap.get("format") != "hierseq-dag-v1":
            raise ValueError(f"unsupported snapshot format {snap.get('format')!r}")
        dag = cls(Alphabet(snap["alphabet"]))
        order = {rec["id"]: rec for rec in snap["nodes"]}
        for v, rec in sorted(order.items()):
            kind = NodeKind(rec["kind"])
            if kind is NodeKind.SOURCE:
                if v >= dag.n or tuple(rec["symbols"]) != (v,):
                    raise ValueError(f"bad source record for node {v}")
                continue
            symbols = tuple(rec["symbols"])
            pieces = snap["parses"].get(str(v))
            if pieces is None:
                raise ValueError(f"node {v} has no parse")
            dag._kind[v] = kind
            dag._string[v] = symbols
            dag._parse[v] = list(pieces)
            dag._out.setdefault(v, 0)
            if kind is NodeKind.INTERMEDIATE:
                if symbols in dag._by_string:
                    raise DuplicateStringError(f"duplicate intermediate {symbols}")
                dag._by_string[symbols] = v
            else:
                if symbols in dag._target_by_string:
                    raise DuplicateTargetError(f"duplicate target {symbols}")
                dag._target_by_string[symbols] = v
            dag._next_id = max(dag._next_id, v + 1)
        for v, pieces in dag._parse.items():
            for p in pieces:
                if p not in dag._out:
                    raise ValueError(f"node {v} references unknown piece {p}")
                dag._out[p] += 1
            dag._edge_count += len(pieces)
        dag._target_order = list(snap["target_order"])
        issues = dag.validate()
        if issues:
            raise ValueError(
                "snapshot is not a valid DAG: "
                + "; ".join(f"{i.rule}({i.node}): {i.detail}" for i in issues[:5])
            )
        return dag

    @classmethod
    def from_json(cls, text: str) -> "HierarchyDag":
        return cls.from_snapshot(json.loads(text))

    # ------------------------------------------------------------------
    # DOT export

    def to_dot(
        self,
        table: SymbolTable | None = None,
        max_label: int = 16,
        graph_name: str = "hierarchy",
    ) -> str:
        """Render the DAG to Graphviz DOT with deterministic ordering."""
        table = table or SymbolTable.default(self.n)

        def label(v: int) -> str:
            text = table.render(self._string[v])
            if len(text) > max_label:
                text = text[: max_label - 3] + "..."
            return text.replace('"', '\\"')

        styles = {
            NodeKind.SOURCE: 'shape=circle style=filled fillcolor="#aecbe8"',
            NodeKind.INTERMEDIATE: 'shape=box style=filled fillcolor="#bfe3bf"',
            NodeKind.TARGET: 'shape=box style=filled fillcolor="#f2b8a8"',
        }
        lines = [f"digraph {graph_name} {{", "  rankdir=BT;"]
        order = sorted(
            self._kind,
            key=lambda v: (
                0
                if self._kind[v] is NodeKind.SOURCE
                else 1
                if self._kind[v] is NodeKind.INTERMEDIATE
                else 2,
                v,
            ),
        )
        for v in order:
            lines.append(f'  n{v} [label="{label(v)}" {styles[self._kind[v]]}];')
        for piece, host, index in self.edges():
            lines.append(f'  n{piece} -> n{host} [label="{index}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"
