"""Optimal parsing of a string over a dictionary of reusable entries.

The dictionary holds every source symbol and every intermediate string of a
hierarchy DAG.  Parsing a string into the fewest dictionary pieces is a
shortest-path problem on positions 0..N where each match t[i:j] in the
dictionary contributes a unit edge i -> j; since sources cover every single
symbol a parse always exists and costs at most N.

Matches are found with an Aho-Corasick automaton built once per dictionary
snapshot: a trie over all entries with failure links, so one left-to-right
scan of the query reports every match of every entry.  The matcher is
immutable; callers rebuild it when the dictionary changes.

Among equal-cost parses the reconstruction is leftmost-longest: walking
left to right, it always takes the longest piece consistent with an
optimal completion of the remainder.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .dag import HierarchyDag
from .symbols import SymbolString


@dataclass(frozen=True)
class Parse:
    """An exact tiling of a string by dictionary entries."""

    pieces: tuple[int, ...]
    cost: int


class Matcher:
    """Immutable multi-pattern index over a dictionary snapshot."""

    def __init__(self, entries: dict[SymbolString, int]):
        if not entries:
            raise ValueError("dictionary must not be empty")
        self._entries = dict(entries)
        # trie as parallel arrays: goto maps, failure links, output lists
        self._goto: list[dict[int, int]] = [{}]
        self._fail: list[int] = [0]
        self._hits: list[list[tuple[int, int]]] = [[]]  # (length, node id)
        for pattern, node in sorted(entries.items()):
            state = 0
            for sym in pattern:
                nxt = self._goto[state].get(sym)
                if nxt is None:
                    nxt = len(self._goto)
                    self._goto[state][sym] = nxt
                    self._goto.append({})
                    self._fail.append(0)
                    self._hits.append([])
                state = nxt
            self._hits[state].append((len(pattern), node))
        queue: deque[int] = deque()
        for state in self._goto[0].values():
            queue.append(state)
        while queue:
            state = queue.popleft()
            for sym, nxt in self._goto[state].items():
                queue.append(nxt)
                f = self._fail[state]
                while f and sym not in self._goto[f]:
                    f = self._fail[f]
                link = self._goto[f].get(sym, 0)
                self._fail[nxt] = link
                self._hits[nxt].extend(self._hits[link])

    @classmethod
    def for_dag(cls, dag: HierarchyDag) -> "Matcher":
        return cls(dag.dictionary())

    @property
    def entries(self) -> dict[SymbolString, int]:
        return dict(self._entries)

    def matches(self, text: SymbolString) -> list[list[tuple[int, int]]]:
        """Per start position, every ``(length, node)`` match beginning there."""
        starts: list[list[tuple[int, int]]] = [[] for _ in range(len(text))]
        goto = self._goto
        fail = self._fail
        hits = self._hits
        state = 0
        for j, sym in enumerate(text):
            while state and sym not in goto[state]:
                state = fail[state]
            state = goto[state].get(sym, 0)
            for length, node in hits[state]:
                starts[j - length + 1].append((length, node))
        return starts


def optimal_parse(text: SymbolString, dictionary: Matcher | dict[SymbolString, int]) -> Parse:
    """Parse ``text`` into the fewest dictionary pieces.

    Adding entries to the dictionary can never increase the cost; the
    leftmost-longest rule makes the piece sequence deterministic among
    equal-cost parses.
    """
    text = tuple(text)
    if not text:
        raise ValueError("cannot parse an empty string")
    matcher = dictionary if isinstance(dictionary, Matcher) else Matcher(dictionary)
    starts = matcher.matches(text)
    n = len(text)
    inf = n + 1
    dist = [inf] * (n + 1)
    dist[n] = 0
    for i in range(n - 1, -1, -1):
        best = inf
        for length, _node in starts[i]:
            d = dist[i + length]
            if d + 1 < best:
                best = d + 1
        dist[i] = best
    if dist[0] >= inf:
        missing = sorted({text[i] for i in range(n) if not starts[i]})
        raise ValueError(f"no parse exists; uncovered symbols {missing}")
    pieces: list[int] = []
    i = 0
    while i < n:
        need = dist[i] - 1
        chosen = None
        for length, node in starts[i]:
            if dist[i + length] == need:
                if chosen is None or length > chosen[0]:
                    chosen = (length, node)
        assert chosen is not None
        pieces.append(chosen[1])
        i += chosen[0]
    return Parse(tuple(pieces), dist[0])
