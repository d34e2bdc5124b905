import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from config.settings import CONFIG
from metrics.edit_metrics import insdel_distance
from schemas.errors import ConstructionFailed
from schemas.registers import Alphabet
from sync import sync_string
from sync.sync_string import (SyncString, construct_sync_string, construct_with_growth, default_alphabet_size,
                              load_sync_string, save_sync_string, sync_cache_path, verify_sync_property)

HALF = Fraction(1, 2)


def test_distinct_symbols_are_synchronizing():
    assert verify_sync_property([0, 1, 2, 3], Fraction(1, 10)).ok
    assert verify_sync_property([0], HALF).ok


def test_repeated_block_is_caught():
    check = verify_sync_property([0, 1, 0, 1], HALF)
    assert not check.ok
    i, j, k = check.violation
    s = [0, 1, 0, 1]
    # the reported triple really violates ED > (1 - eps)(k - i)
    assert insdel_distance(s[i - 1:j - 1], s[j - 1:k - 1]) <= (1 - HALF) * (k - i)


def test_short_strings_use_distinct_symbols():
    s = construct_sync_string(5, HALF, Alphabet(size=8), seed=0)
    assert s.content == (0, 1, 2, 3, 4)


def test_sampled_string_verifies():
    s = construct_sync_string(20, HALF, Alphabet(size=16), seed=7)
    assert len(s) == 20
    assert verify_sync_property(s.content, HALF).ok


def test_construction_is_seeded():
    a = construct_with_growth(24, HALF, seed=3)
    b = construct_with_growth(24, HALF, seed=3)
    assert a.content == b.content


def test_tiny_alphabet_fails():
    with pytest.raises(ConstructionFailed):
        construct_sync_string(20, Fraction(1, 100), Alphabet(size=2), seed=0, max_attempts=3)


def test_growth_starts_at_default_alphabet():
    s = construct_with_growth(10, HALF, seed=1)
    assert s.alphabet_size == default_alphabet_size(HALF) == 16


def test_save_and_load(tmp_path):
    s = construct_with_growth(18, HALF, seed=2)
    path = tmp_path / "s.sync"
    save_sync_string(s, path)
    loaded = load_sync_string(path, alphabet_size=s.alphabet_size)
    assert loaded == s
    assert path.read_text().splitlines()[:2] == ["18", "1/2"]


def test_load_rejects_a_broken_string(tmp_path):
    path = tmp_path / "bad.sync"
    path.write_text("4\n1/2\n0 1 0 1\n")
    with pytest.raises(ValueError):
        load_sync_string(path)


def test_epsilon_range_enforced():
    with pytest.raises(ValueError):
        SyncString(content=(0, 1), alphabet_size=2, epsilon=Fraction(1))


def test_symbol_string_view():
    s = construct_with_growth(12, HALF, seed=4, alphabet_size=4)
    view = s.as_symbol_string()
    assert view.alphabet == s.alphabet
    assert verify_sync_property(view, HALF).ok


def _edit_table_distance(a, b):
    """Insertions and deletions only, by the textbook table"""
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for x in range(len(a) + 1):
        for y in range(len(b) + 1):
            if x == 0 or y == 0:
                table[x][y] = x + y
            elif a[x - 1] == b[y - 1]:
                table[x][y] = table[x - 1][y - 1]
            else:
                table[x][y] = 1 + min(table[x - 1][y], table[x][y - 1])
    return table[len(a)][len(b)]


def _first_violation(s, epsilon):
    n = len(s)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            for k in range(j + 1, n + 2):
                if _edit_table_distance(s[i - 1:j - 1], s[j - 1:k - 1]) <= (1 - epsilon) * (k - i):
                    return i, j, k
    return None


def _words(alphabet, max_length):
    for length in range(max_length + 1):
        yield from itertools.product(range(alphabet), repeat=length)


@pytest.mark.parametrize("alphabet,max_length", [(2, 8), (3, 6), (4, 5)])
def test_verifier_agrees_with_triple_loop(alphabet, max_length):
    for epsilon in (Fraction(1, 4), HALF, Fraction(3, 4)):
        for word in _words(alphabet, max_length):
            check = verify_sync_property(list(word), epsilon)
            expected = _first_violation(word, epsilon)
            assert check.violation == expected, (word, epsilon)
            assert check.ok == (expected is None)


@given(st.lists(st.integers(min_value=0, max_value=3), max_size=14))
@settings(max_examples=80, deadline=None)
def test_sync_property_is_monotone_in_epsilon(word):
    levels = [Fraction(1, 8), Fraction(1, 4), HALF, Fraction(3, 4), Fraction(7, 8)]
    results = [verify_sync_property(word, epsilon).ok for epsilon in levels]
    # once synchronizing, synchronizing for every larger epsilon
    assert results == sorted(results)


def test_extension_alone_yields_a_synchronizing_string():
    for epsilon in (Fraction(1, 4), HALF):
        s = construct_with_growth(80, epsilon, seed=5)
        assert verify_sync_property(s.content, epsilon).ok


def test_finished_strings_go_to_the_cache_dir(monkeypatch, tmp_path):
    monkeypatch.setitem(CONFIG, "sync_cache_dir", str(tmp_path))
    s = construct_sync_string(22, HALF, Alphabet(size=16), seed=31)
    path = sync_cache_path(22, HALF, 16, 31)
    assert path.parent == tmp_path
    assert load_sync_string(path, alphabet_size=16) == s


def test_cached_string_skips_construction(monkeypatch, tmp_path):
    planted = SyncString(content=tuple(range(16)) + (0, 1, 2), alphabet_size=16, epsilon=HALF)
    monkeypatch.setitem(CONFIG, "sync_cache_dir", str(tmp_path))
    save_sync_string(planted, sync_cache_path(19, HALF, 16, 41))

    def refuse(*args, **kwargs):
        raise AssertionError("construction ran despite a cached string")

    monkeypatch.setattr(sync_string, "_randomized_extension", refuse)
    assert construct_sync_string(19, HALF, Alphabet(size=16), seed=41) == planted


def test_no_cache_dir_means_no_cache_path(monkeypatch):
    monkeypatch.setitem(CONFIG, "sync_cache_dir", "")
    assert sync_cache_path(10, HALF, 4, 0) is None
