"""
Tests for the level constructions and their sizes.
Run this from your project root: pytest test_construct.py
"""
from fractions import Fraction

import pytest

from qturan.core.exceptions import DimensionError
from qturan.core.hypercube import Family
from qturan.services.chains import formula_pk
from qturan.services.construct import (
    best_construction,
    best_construction_size,
    best_residue,
    level_set_size,
    levels_family,
    make_level_set,
    residue_levels,
    residue_levels_family,
    v2_family,
    vr_family,
    vr_growth_report,
    vr_levels,
)
from qturan.services.detect import is_free, longest_directed_path, max_out_cover_degree
from qturan.core.hypercube import complement_family
from qturan.services.pattern import opposite_pattern, parse_pattern


def test_levels_family_sizes():
    assert len(levels_family(3, make_level_set(3, [0, 2]))) == 4
    assert len(levels_family(4, make_level_set(4, []))) == 0
    assert levels_family(4, make_level_set(4, range(5))) == Family.full(4)


def test_level_set_out_of_range():
    with pytest.raises(DimensionError):
        make_level_set(3, [4])
    with pytest.raises(DimensionError):
        make_level_set(3, [-1])
    with pytest.raises(DimensionError):
        levels_family(4, make_level_set(3, [0]))


def test_residue_examples():
    f = residue_levels_family(4, 3, 2)
    assert residue_levels(4, 3, 2).included == frozenset({0, 1, 3, 4})
    assert len(f) == 10
    assert len(residue_levels_family(10, 3)) == 683
    assert residue_levels(3, 2, 1).included == frozenset({0, 2})
    assert len(residue_levels_family(3, 2, 1)) == 4


def test_residue_argument_range():
    with pytest.raises(DimensionError):
        residue_levels(3, 4, 1)
    with pytest.raises(DimensionError):
        residue_levels(4, 3, 0)
    with pytest.raises(DimensionError):
        residue_levels(4, 3, 4)


def test_best_residue_ties_go_to_smallest_j():
    # n=4, k=2: both classes weigh 8
    assert best_residue(4, 2) == 1
    assert best_residue(10, 3) == 1


def test_residue_families_are_path_free():
    for n in range(1, 13):
        for k in range(1, n + 1):
            for j in range(1, k + 1):
                length, _ = longest_directed_path(residue_levels_family(n, k, j))
                assert length <= k - 1, (n, k, j)


def test_best_residue_size_matches_formula():
    for n in range(1, 61):
        for k in range(1, n + 1):
            ls = residue_levels(n, k, best_residue(n, k))
            assert level_set_size(ls) == formula_pk(n, k), (n, k)


def test_v2_family():
    assert len(v2_family(5)) == 17
    assert len(v2_family(2)) == 3
    v2 = parse_pattern("V:2")
    for n in range(2, 21):
        f = v2_family(n)
        assert len(f) == 2 ** (n - 1) + 1
        assert is_free(f, v2)
    with pytest.raises(DimensionError):
        v2_family(1)


def test_vr_family():
    f = vr_family(6, 3)
    assert len(f) == 38
    assert max_out_cover_degree(f)[0] == 2
    for n in range(2, 10):
        assert vr_family(n, 2) == v2_family(n)
    with pytest.raises(DimensionError):
        vr_family(3, 4)


@pytest.mark.parametrize("r", [3, 4, 5])
def test_vr_family_is_free(r):
    p = parse_pattern(f"V:{r}")
    for n in range(r, 13):
        assert is_free(vr_family(n, r), p)


def test_vr_growth_band():
    rows = vr_growth_report(3, range(6, 61))
    assert all(row.excess == row.n for row in rows)
    assert all(row.ratio == 1 for row in rows)

    rows = vr_growth_report(4, range(8, 61))
    assert rows[0].ratio == Fraction(29, 64)
    for row in rows:
        assert row.excess == 1 + row.n * (row.n - 1) // 2
        assert Fraction(29, 64) <= row.ratio < Fraction(1, 2)


def test_vr_levels_above_family_cap():
    assert level_set_size(vr_levels(100, 3)) == 2 ** 99 + 100


@pytest.mark.parametrize(
    "spec,n,size",
    [
        ("P:3", 4, 11),
        ("P:3", 10, 683),
        ("V:2", 5, 17),
        ("V:3", 6, 38),
        ("C4", 4, 11),
        ("P:5", 4, 15),
        ("P:6", 4, 16),
        ("V:5", 4, 16),
    ],
)
def test_best_construction(spec, n, size):
    p = parse_pattern(spec)
    family, method = best_construction(n, p)
    assert len(family) == size
    assert best_construction_size(n, p) == (size, method)
    assert is_free(family, p)


def test_best_construction_for_qpat_tree(tmp_path):
    path = tmp_path / "fork.qpat"
    path.write_text("#qpat v1\nroot -> x\nroot -> y\ny -> z\n")
    p = parse_pattern(f"file:{path}")
    family, method = best_construction(6, p)
    assert method.startswith("residue_levels(k=3")
    assert len(family) == formula_pk(6, 3)


def test_construction_size_beyond_family_cap():
    size, _ = best_construction_size(120, parse_pattern("P:4"))
    assert size == formula_pk(120, 4)
    with pytest.raises(DimensionError):
        best_construction(40, parse_pattern("P:4"))


@pytest.mark.parametrize("n", range(3, 9))
def test_in_star_construction_is_the_complemented_v2_family(n):
    in_star = opposite_pattern(parse_pattern("V:2"))
    family, method = best_construction(n, in_star)
    assert method == "complement of v2_family"
    assert family == complement_family(v2_family(n))
    assert len(family) == 2 ** (n - 1) + 1
    assert is_free(family, in_star)


def test_symmetric_patterns_keep_their_direct_construction():
    for spec in ["P:3", "C4", "V:3"]:
        _, method = best_construction_size(12, parse_pattern(spec))
        assert not method.startswith("complement of")
