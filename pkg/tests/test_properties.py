import json
import random
from fractions import Fraction

import numpy as np
import pytest

from conftest import path_graph
from tlrecon.graph import Graph, distance_matrix
from tlrecon.oracle import CountingOracle
from tlrecon.properties import (
    PropertyReport,
    betweenness_counts,
    check_betweenness_bound,
    check_ball_separator,
    check_partition,
    check_instance,
    check_bag_separator,
    check_paths_near_set,
    exact_betweenness,
    exact_state,
    random_connected_subset,
    run_suite,
    separator_balanced_check,
    within_alpha,
)
from tlrecon.reconstructor import alpha, is_alpha_balanced, partition_components
from tlrecon.witness import TreeDecomposition, gen_bounded_treelength, gen_random_tree


def path_witness(n):
    return TreeDecomposition.build([{i, i + 1} for i in range(n - 1)], [(i, i + 1) for i in range(n - 2)])


def betweenness_by_enumeration(g, A, v):
    d = distance_matrix(g)
    A = sorted(A)
    pairs = [(a, b) for i, a in enumerate(A) for b in A[i + 1:]]
    return Fraction(sum(d[a, v] + d[v, b] == d[a, b] for a, b in pairs), len(pairs))


def test_betweenness_examples():
    g = path_graph(5)
    assert exact_betweenness(g, range(5), 2) == Fraction(8, 10)
    tree = gen_random_tree(20, 3, 1).graph
    leaf = next(v for v in range(20) if tree.degree(v) == 1)
    assert exact_betweenness(tree, set(range(20)) - {leaf}, leaf) == 0
    A = list(range(20))
    assert exact_betweenness(tree, A, 5) >= Fraction(19, 190)
    with pytest.raises(ValueError):
        exact_betweenness(g, [1], 1)


def test_betweenness_matches_pair_enumeration():
    rng = random.Random(0)
    for seed in range(5):
        g = gen_bounded_treelength(30, 3, 2, seed).graph
        A = random_connected_subset(g, rng, 12)
        for v in rng.sample(range(30), 6):
            assert exact_betweenness(g, A, v) == betweenness_by_enumeration(g, A, v)


def test_within_alpha_exact():
    for delta, k in [(2, 1), (3, 1), (3, 2)]:
        a = alpha(delta, k)
        for n_A in range(2, 300):
            for size in range(n_A + 1):
                if abs(size - a * n_A) > 1e-9:
                    assert within_alpha(size, n_A, delta, k) == (size <= a * n_A)


def test_betweenness_bound_examples():
    edge = Graph(2, [(0, 1)])
    assert check_betweenness_bound(edge, TreeDecomposition.build([{0, 1}]), 1, 2).ok
    assert check_betweenness_bound(path_graph(5), path_witness(5), 1, 2).ok


def test_betweenness_bound_flags_invalid_witness():
    with pytest.raises(ValueError):
        check_betweenness_bound(path_graph(3), TreeDecomposition.build([{0, 1}, {2}], [(0, 1)]), 1, 2)


def test_paths_near_set_examples():
    g = path_graph(7)
    assert check_paths_near_set(g, 1, range(7)).ok
    assert check_paths_near_set(g, 1, [0, 1, 2]).ok
    with pytest.raises(ValueError):
        check_paths_near_set(g, 1, [0, 2])


def test_paths_near_set_detects_violation_on_long_cycle():
    # a 12-cycle has treelength 4, so with k = 1 the short arc between A's ends runs far out
    g = Graph(12, [(i, (i + 1) % 12) for i in range(12)])
    report = check_paths_near_set(g, 1, [0, 1, 2, 3, 4, 5, 6, 7])
    assert not report.ok
    label, example = report.failures[0]
    d = distance_matrix(g)
    a, b, z = example["a"], example["b"], example["z"]
    assert d[a, z] + d[z, b] <= d[a, b]


def test_ball_separator_small_cases():
    g = path_graph(6)
    assert check_ball_separator(g, path_witness(6), 1, 2, [2, 3]).ok
    assert check_ball_separator(g, path_witness(6), 1, 2, range(6)).ok


def test_separator_balanced_check_examples():
    g = path_graph(5)
    assert separator_balanced_check(g, range(5), range(5), Fraction(1, 2))
    assert not separator_balanced_check(g, range(5), [], Fraction(9, 10))
    assert separator_balanced_check(g, range(5), [2], Fraction(1, 2))


def test_separator_check_agrees_with_reconstructor_decision():
    rng = random.Random(3)
    for seed in range(20):
        g = gen_bounded_treelength(50, 3, 2, seed).graph
        A = random_connected_subset(g, rng, 30)
        state = exact_state(g, A, 2)
        S = rng.sample(state.within(), 5)
        partition = partition_components(CountingOracle(g), state, S)
        a = alpha(3, 2)
        assert is_alpha_balanced(partition, a, len(A)) == separator_balanced_check(g, A, S, Fraction(a))


def test_bag_separator_examples():
    assert check_bag_separator(path_graph(5), path_witness(5), range(5)).ok
    assert check_bag_separator(path_graph(5), TreeDecomposition.build([set(range(5))]), range(5)).ok


def test_partition_check_examples():
    assert check_partition(path_graph(5), range(5), [2], 1).ok
    g = gen_random_tree(40, 3, 2).graph
    assert check_partition(g, range(40), [0, 1, 2], 1).ok


def test_exact_state_layers():
    g = path_graph(8)
    state = exact_state(g, [3, 4], 1)
    assert state.layers == [(2, 5), (1, 6), (0, 7)]


def test_random_connected_subset_is_connected():
    from tlrecon.graph import connected_components

    rng = random.Random(0)
    g = gen_bounded_treelength(60, 3, 3, 1).graph
    for _ in range(50):
        A = random_connected_subset(g, rng)
        assert len(connected_components(g, A)) == 1


def test_report_json():
    r = PropertyReport("x", 3, [("g", {"a": 1})])
    data = json.loads(r.to_json())
    assert data == {"name": "x", "instances": 3, "ok": False,
                    "failures": [{"instance": "g", "counterexample": {"a": 1}}]}
    assert PropertyReport("y", 2).merge(r).instances == 5


def test_suites_small_runs_are_clean():
    for report in run_suite("all", count=12, subsets=4, partition_trials=40):
        assert report.ok, report.failures[:1]
    with pytest.raises(ValueError):
        run_suite("nope")


def test_check_instance_on_supplied_witness():
    inst = gen_bounded_treelength(40, 3, 2, 0)
    reports = check_instance(inst.graph, inst.witness, 2, 3, subsets=5)
    assert [r.name for r in reports] == ["betweenness-bound", "bag-separator", "paths-near-set", "ball-separator"]
    assert all(r.ok for r in reports)


def test_betweenness_counts_vectorized_matches_scalar():
    g = gen_random_tree(25, 3, 5).graph
    d = distance_matrix(g)
    A = list(range(0, 25, 2))
    counts = betweenness_counts(d, A, range(25))
    for v in range(25):
        assert Fraction(int(counts[v]), len(A) * (len(A) - 1) // 2) == betweenness_by_enumeration(g, A, v)
