import pytest

from hierseq import Alphabet, SymbolTable


def test_alphabet_membership():
    a = Alphabet(4)
    assert 0 in a and 3 in a
    assert 4 not in a and -1 not in a
    assert "1" not in a


def test_alphabet_requires_two_symbols():
    with pytest.raises(ValueError):
        Alphabet(1)


def test_default_table_small_is_compact():
    t = SymbolTable.default(5)
    assert t.render((0, 1, 4)) == "014"


def test_default_table_large_uses_separator():
    t = SymbolTable.default(100)
    assert t.render((0, 10, 99)) == "0.10.99"


def test_from_chars_roundtrip():
    t = SymbolTable.from_chars("abcd")
    assert t.render((0, 2, 3)) == "acd"
    assert t.encode("acd") == (0, 2, 3)


def test_encode_rejects_unknown():
    t = SymbolTable.from_chars("ab")
    with pytest.raises(ValueError):
        t.encode("abc")
