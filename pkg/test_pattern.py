"""
Tests for pattern parsing and the derived poset data.
Run this from your project root: pytest test_pattern.py
"""
import networkx as nx
import numpy as np
import pytest

from qturan.core.exceptions import PatternError
from qturan.core.hypercube import Family
from qturan.services.detect import contains_copy, is_free
from qturan.services.pattern import (
    check_enumerable,
    is_directed_path,
    is_oriented_c4,
    make_pattern,
    opposite_pattern,
    out_star_leaves,
    parse_pattern,
    pattern_info,
)


def test_builtin_path():
    p = parse_pattern("P:3")
    assert p.m == 3
    assert p.edges == ((0, 1), (1, 2))
    info = pattern_info(p)
    assert info.height == 3
    assert info.is_tree
    assert info.is_saturated
    assert info.level_window == ((1, 3), (2, 2), (3, 1))


def test_builtin_out_star():
    p = parse_pattern("V:2")
    assert p.m == 3
    assert out_star_leaves(p) == 2
    info = pattern_info(p)
    assert info.height == 2
    assert info.is_tree
    assert info.is_saturated


def test_builtin_c4():
    p = parse_pattern("C4")
    info = pattern_info(p)
    assert info.height == 3
    assert not info.is_tree
    assert info.is_saturated is None
    assert is_oriented_c4(p)


@pytest.mark.parametrize("spec", ["Q:3", "P:", "P:0", "V:0", "C5", "", "P:-1"])
def test_bad_specs(spec):
    with pytest.raises(PatternError):
        parse_pattern(spec)


def test_cycle_rejected_from_qpat(tmp_path):
    path = tmp_path / "loop.qpat"
    path.write_text("#qpat v1\na -> b\nb -> c\nc -> a\n")
    with pytest.raises(PatternError, match="cycle"):
        parse_pattern(f"file:{path}")


def test_qpat_file(tmp_path):
    path = tmp_path / "fork.qpat"
    path.write_text("#qpat v1\n# a fork\nroot -> x\nroot -> y\ny -> z\n")
    p = parse_pattern(f"file:{path}")
    assert p.name == "fork"
    assert p.labels == ("root", "x", "y", "z")
    assert p.edges == ((0, 1), (0, 2), (2, 3))
    info = pattern_info(p)
    assert info.height == 3
    assert info.is_tree
    assert not info.is_saturated


def test_missing_pattern_file():
    with pytest.raises(PatternError):
        parse_pattern("file:/nonexistent/nothing.qpat")


def test_make_pattern_validation():
    with pytest.raises(PatternError):
        make_pattern(2, [(0, 0)])
    with pytest.raises(PatternError):
        make_pattern(2, [(0, 1), (0, 1)])
    with pytest.raises(PatternError):
        make_pattern(2, [(0, 2)])
    with pytest.raises(PatternError):
        make_pattern(22, [])


def test_opposite_pattern():
    p = parse_pattern("V:2")
    opp = opposite_pattern(p)
    assert opp.name == "opp(V:2)"
    assert set(opp.edges) == {(1, 0), (2, 0)}
    assert out_star_leaves(opp) is None
    assert opposite_pattern(opp) == p


def test_shape_recognizers():
    assert is_directed_path(parse_pattern("P:1"))
    assert is_directed_path(parse_pattern("P:4"))
    assert not is_directed_path(parse_pattern("V:2"))
    assert is_directed_path(make_pattern(3, [(2, 0), (0, 1)]))
    assert out_star_leaves(make_pattern(4, [(3, 0), (3, 1), (3, 2)])) == 3
    assert out_star_leaves(parse_pattern("P:3")) is None
    assert not is_oriented_c4(make_pattern(4, [(0, 1), (0, 2), (1, 3), (0, 3)]))


@pytest.mark.parametrize("k", [1, 2, 16, 17, 20])
def test_path_height_up_to_twenty(k):
    p = parse_pattern(f"P:{k}")
    assert pattern_info(p).height == k
    assert is_directed_path(p)


@pytest.mark.parametrize("r", [1, 2, 16, 20])
def test_out_star_height_up_to_twenty(r):
    p = parse_pattern(f"V:{r}")
    assert pattern_info(p).height == 2
    assert out_star_leaves(p) == r


def test_embedding_search_size_cap():
    p = parse_pattern("P:17")
    with pytest.raises(PatternError, match="embedding search"):
        check_enumerable(p)
    with pytest.raises(PatternError):
        contains_copy(Family.full(4), p)
    assert is_free(Family.full(4), p)
    assert is_free(Family.full(5), parse_pattern("V:17"))
    assert check_enumerable(parse_pattern("P:16")).m == 16


def _random_dag(rng, m):
    order = rng.permutation(m)
    density = rng.uniform(0.15, 0.7)
    edges = [
        (int(order[i]), int(order[j]))
        for i in range(m)
        for j in range(i + 1, m)
        if rng.random() < density
    ]
    return make_pattern(m, edges, name=f"dag{m}")


def _windows_by_path_enumeration(p):
    g = p.graph()
    down = [1] * p.m
    up = [1] * p.m
    for s in range(p.m):
        for t in range(p.m):
            if s == t:
                continue
            for path in nx.all_simple_paths(g, s, t):
                down[t] = max(down[t], len(path))
                up[s] = max(up[s], len(path))
    return tuple(zip(down, up))


def test_level_windows_match_path_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(200):
        p = _random_dag(rng, int(rng.integers(2, 11)))
        info = pattern_info(p)
        assert info.level_window == _windows_by_path_enumeration(p), p.edges
        assert info.height == max(down for down, _ in info.level_window)


@pytest.mark.parametrize("spec", ["P:1", "P:4", "V:2", "V:3", "C4"])
def test_opposite_keeps_poset_data_of_builtins(spec):
    p = parse_pattern(spec)
    info, dual = pattern_info(p), pattern_info(opposite_pattern(p))
    assert (dual.height, dual.is_tree, dual.is_saturated) == (info.height, info.is_tree, info.is_saturated)


def test_opposite_keeps_poset_data_of_random_dags(tmp_path):
    rng = np.random.default_rng(5)
    fork = tmp_path / "fork.qpat"
    fork.write_text("#qpat v1\nroot -> x\nroot -> y\ny -> z\n")
    patterns = [parse_pattern(f"file:{fork}")] + [_random_dag(rng, int(rng.integers(2, 9))) for _ in range(100)]
    for p in patterns:
        info, dual = pattern_info(p), pattern_info(opposite_pattern(p))
        assert dual.height == info.height
        assert dual.is_tree == info.is_tree
        assert dual.is_saturated == info.is_saturated
