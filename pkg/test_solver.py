"""
Tests for copy enumeration, the exact search, greedy completion and WCNF export.
Run this from your project root: pytest test_solver.py
"""
import io

import numpy as np
import pytest

from qturan.core.config import Settings
from qturan.core.exceptions import GuardExceededError, InfeasibleMethodError, NotFreeError
from qturan.core.hypercube import Family, mask_to_set
from qturan.services.bounds import upper_bound
from qturan.services.chains import formula_pk
from qturan.services.construct import best_construction_size, v2_family
from qturan.services.detect import contains_copy, is_free
from qturan.services.pattern import opposite_pattern, parse_pattern
from qturan.services.solver import (
    TuranSolver,
    complete_to_maximal,
    enumerate_copies,
    exact_exv,
    export_wcnf,
    get_solver_service,
)

BUILTINS = ["P:2", "P:3", "P:4", "V:2", "V:3", "C4"]


@pytest.mark.parametrize("spec,n,count", [("V:2", 3, 6), ("P:3", 3, 12), ("P:3", 5, 160), ("C4", 4, 24)])
def test_copy_counts(spec, n, count):
    p = parse_pattern(spec)
    hypergraph = enumerate_copies(n, p)
    assert len(hypergraph.edges) == count
    assert len(set(hypergraph.edges)) == count
    for e in hypergraph.edges:
        assert e.bit_count() == p.m
        image = Family.from_masks(n, hypergraph.edge_vertices(e))
        assert contains_copy(image, p) is not None


def test_enumeration_guards():
    with pytest.raises(GuardExceededError):
        enumerate_copies(11, parse_pattern("P:2"))
    small = TuranSolver(settings=Settings(MAX_COPY_EDGES=5))
    with pytest.raises(GuardExceededError):
        small.enumerate_copies(3, parse_pattern("P:3"))


def test_path_values_by_brute_force():
    assert exact_exv(4, parse_pattern("P:3"), method="bruteforce").value == 11
    for n in range(2, 5):
        for k in range(2, n + 1):
            result = exact_exv(n, parse_pattern(f"P:{k}"), method="bruteforce")
            assert result.exact
            assert result.value == formula_pk(n, k), (n, k)


@pytest.mark.parametrize("k,value", [(2, 16), (3, 22), (4, 26), (5, 30)])
def test_path_values_by_branch_and_bound(k, value):
    result = exact_exv(5, parse_pattern(f"P:{k}"), method="bnb")
    assert result.exact
    assert result.method == "bnb"
    assert result.value == value == formula_pk(5, k)


@pytest.mark.parametrize("n,value", [(2, 3), (3, 5), (4, 9)])
def test_v2_values_by_brute_force(n, value):
    result = exact_exv(n, parse_pattern("V:2"), method="bruteforce")
    assert result.value == value == 2 ** (n - 1) + 1


def test_v2_value_by_branch_and_bound():
    result = exact_exv(5, parse_pattern("V:2"), method="bnb")
    assert result.exact
    assert result.value == 17


def test_c4_value():
    result = exact_exv(4, parse_pattern("C4"))
    assert result.method == "bruteforce"
    assert result.value == 11
    assert exact_exv(4, parse_pattern("C4"), method="bnb").value == 11


def test_methods_agree_and_witnesses_verify():
    for spec in BUILTINS:
        p = parse_pattern(spec)
        for n in range(2, 5):
            brute = exact_exv(n, p, method="bruteforce")
            bnb = exact_exv(n, p, method="bnb")
            assert brute.value == bnb.value, (spec, n)
            for result in (brute, bnb):
                assert len(result.witness) == result.value
                assert is_free(result.witness, p)


def test_sandwich():
    for spec in BUILTINS:
        p = parse_pattern(spec)
        for n in range(2, 5):
            value = exact_exv(n, p).value
            lower, _ = best_construction_size(n, p)
            upper, _, certified = upper_bound(n, p)
            assert lower <= value
            if certified:
                assert value <= upper


def test_duality_of_exact_values():
    for spec in BUILTINS:
        p = parse_pattern(spec)
        for n in range(2, 5):
            assert exact_exv(n, p).value == exact_exv(n, opposite_pattern(p)).value, (spec, n)


def test_small_out_star_data_respects_sandwich():
    p = parse_pattern("V:3")
    result = exact_exv(4, p)
    lower, _ = best_construction_size(4, p)
    assert lower <= result.value <= 16


def test_infeasible_methods():
    with pytest.raises(InfeasibleMethodError):
        exact_exv(5, parse_pattern("P:3"), method="bruteforce")
    with pytest.raises(InfeasibleMethodError):
        exact_exv(3, parse_pattern("P:3"), method="simplex")


def test_timeout_returns_incumbent_with_bounds():
    solver = TuranSolver(settings=Settings(SOLVER_TIMEOUT_CHECK_INTERVAL=1))
    result = solver.exact_exv(5, parse_pattern("V:2"), method="bnb", timeout=0.0)
    assert not result.exact
    assert result.value == 17
    assert result.lower_bound == 17
    assert result.upper_bound >= 17
    assert is_free(result.witness, parse_pattern("V:2"))


def test_report_payload():
    report = exact_exv(3, parse_pattern("V:2")).to_report()
    assert report.pattern == "V:2"
    assert report.value == 5
    assert report.exact
    assert len(report.witness) == 5
    assert all(s.startswith("{") and s.endswith("}") for s in report.witness)


def _assert_maximal(f, p):
    assert is_free(f, p)
    for v in range(f.universe):
        if v not in f:
            assert not is_free(f.with_vertices([v]), p)


def test_greedy_completion_from_empty():
    p = parse_pattern("V:2")
    f = complete_to_maximal(Family.empty(3), p, order="ascending")
    _assert_maximal(f, p)
    assert 0b111 in f
    assert any(len(s) == 2 for s in f.to_sets())


def test_greedy_completion_keeps_optimal_family():
    p = parse_pattern("V:2")
    start = v2_family(4)
    assert complete_to_maximal(start, p, order="descending") == start


@pytest.mark.parametrize("n", [4, 5])
def test_greedy_maximal_families_hold_top_and_a_coatom(n):
    p = parse_pattern("V:2")
    top = (1 << n) - 1
    for seed in range(100):
        f = complete_to_maximal(Family.empty(n), p, order="random", seed=seed)
        assert top in f
        assert any(len(mask_to_set(v)) == n - 1 for v in f)


def test_random_completion_is_reproducible():
    p = parse_pattern("P:3")
    rng = np.random.default_rng(1)
    start = Family.from_masks(4, rng.choice(16, size=3, replace=False).tolist())
    if not is_free(start, p):
        start = Family.empty(4)
    first = complete_to_maximal(start, p, order="random", seed=42)
    second = complete_to_maximal(start, p, order="random", seed=42)
    assert first == second
    assert start.issubset(first)
    _assert_maximal(first, p)


def test_completion_rejects_non_free_input():
    with pytest.raises(NotFreeError):
        complete_to_maximal(Family.full(3), parse_pattern("V:2"))


@pytest.mark.parametrize("spec,n,hard", [("V:2", 3, 6), ("P:3", 3, 12), ("P:2", 2, 4)])
def test_wcnf_export(spec, n, hard):
    sink = io.StringIO()
    stats = export_wcnf(n, parse_pattern(spec), sink)
    universe = 1 << n
    top = universe + 1
    assert (stats.nv, stats.soft, stats.hard) == (universe, universe, hard)
    assert stats.nc == universe + hard
    assert stats.top == top

    lines = [line for line in sink.getvalue().splitlines() if line and not line.startswith("c")]
    assert lines[0] == f"p wcnf {universe} {universe + hard} {top}"
    clauses = lines[1:]
    soft = [line for line in clauses if line.split()[0] == "1"]
    hard_lines = [line for line in clauses if line.split()[0] == str(top)]
    assert sorted(soft) == sorted(f"1 {v + 1} 0" for v in range(universe))
    assert len(hard_lines) == hard
    for line in hard_lines:
        literals = [int(tok) for tok in line.split()[1:]]
        assert literals[-1] == 0
        assert all(lit < 0 for lit in literals[:-1])


def test_singleton_service():
    assert get_solver_service() is get_solver_service()


@pytest.mark.parametrize("spec", BUILTINS)
def test_orbit_split_agrees_with_plain_search(spec):
    p = parse_pattern(spec)
    for n in range(2, 5):
        plain = exact_exv(n, p, method="bnb")
        split = exact_exv(n, p, method="bnb", orbit_branching=True)
        assert split.exact
        assert split.value == plain.value, (spec, n)
        assert is_free(split.witness, p)


def test_orbit_split_from_settings():
    solver = TuranSolver(settings=Settings(SOLVER_ORBIT_BRANCHING=True))
    result = solver.exact_exv(5, parse_pattern("V:2"), method="bnb")
    assert result.exact
    assert result.value == 17


def test_wcnf_header_comes_first():
    sink = io.StringIO()
    export_wcnf(2, parse_pattern("P:2"), sink)
    lines = sink.getvalue().splitlines()
    assert lines[0] == "p wcnf 4 8 5"
    assert lines[1:5] == ["1 1 0", "1 2 0", "1 3 0", "1 4 0"]
    assert all(line.startswith("5 -") for line in lines[5:])
    assert not any(line.startswith("h ") for line in lines)
