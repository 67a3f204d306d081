"""Symbol alphabets and rendering tables for integer-coded strings."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

SymbolString = tuple[int, ...]

_CHARSET = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass(frozen=True)
class Alphabet:
    """A finite alphabet whose symbols are the integers 0..n-1."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"alphabet size must be >= 2, got {self.n}")

    def __contains__(self, symbol: object) -> bool:
        return isinstance(symbol, int) and 0 <= symbol < self.n


@dataclass(frozen=True)
class SymbolTable:
    """Maps symbols to printable tokens for labels, logs and DOT output.

    Strings are compared as symbol sequences everywhere; rendering is only
    for display, so a multi-character token table (large alphabets) never
    affects any metric.
    """

    tokens: tuple[str, ...]
    separator: str = ""

    @classmethod
    def default(cls, n: int) -> "SymbolTable":
        if n <= len(_CHARSET):
            return cls(tuple(_CHARSET[:n]), "")
        return cls(tuple(str(i) for i in range(n)), ".")

    @classmethod
    def from_chars(cls, chars: str) -> "SymbolTable":
        return cls(tuple(chars), "")

    def render(self, symbols: Iterable[int]) -> str:
        return self.separator.join(self.tokens[s] for s in symbols)

    def encode(self, text: str) -> SymbolString:
        if any(len(tok) != 1 for tok in self.tokens):
            raise ValueError("encode requires a single-character table")
        index = {tok: i for i, tok in enumerate(self.tokens)}
        try:
            return tuple(index[ch] for ch in text)
        except KeyError as e:
            raise ValueError(f"character {e.args[0]!r} is not in the table") from None
