"""Shared fixtures: the worked-example graph, small counterexample graphs,
and the cached random suites used by the acceptance criteria."""

from __future__ import annotations

import random

import pytest

from treeq.graph import Edge, Graph, Node, load_graph
from treeq.search import SearchConfig, run_search
from treeq.synth import gen_random_instance
from treeq.trees import SeedSets

FIG1_NODES = """\
1\tOrgB\turi\tcompany
2\tBob\turi\tentrepreneur
3\tAlice\turi\tentrepreneur
4\tCarole\turi\tentrepreneur
5\tOrgA\turi\tcompany
6\tDoug\turi\tentrepreneur
7\tOrgC\turi\tcompany
8\tFrance\turi\tcountry
9\tElon\turi\tpolitician
10\tUSA\turi\tcountry
11\tNational Liberal Party\tliteral\t
12\tFalcon\turi\tpolitician
"""

FIG1_EDGES = """\
1\t2\tfounded\t1
2\t3\tinvestsIn\t1
3\t2\tparentOf\t4
4\t1\tlocatedIn\t10
5\t2\tcitizenOf\t10
6\t4\tcitizenOf\t10
7\t3\tfounded\t5
8\t5\tCEO\t6
9\t6\tinvestsIn\t7
10\t4\tfounded\t7
11\t9\tparentOf\t6
12\t9\tcitizenOf\t8
13\t6\tcitizenOf\t8
14\t3\tcitizenOf\t8
15\t5\tlocatedIn\t8
16\t9\taffiliation\t11
17\t3\tfunds\t11
18\t12\taffiliation\t11
19\t12\tinvestsIn\t7
"""

Q1_TEXT = (
    '(?x, ?y, ?z, ?w) :- (?x[type = "entrepreneur"], "citizenOf", "USA"), '
    '(?y[type = "entrepreneur"], "citizenOf", "France"), '
    '(?z[type = "politician"], "citizenOf", "France"), '
    "(?x, ?y, ?z, TREE ?w)"
)


def make_graph(labels: list[str], edge_pairs: list[tuple[int, int]]) -> Graph:
    """Nodes ids 1..n with the given labels; edges ids 1..k, all labeled "e"."""
    nodes = [Node(i + 1, lab) for i, lab in enumerate(labels)]
    edges = [Edge(i + 1, s, t, "e") for i, (s, t) in enumerate(edge_pairs)]
    return Graph(nodes, edges)


@pytest.fixture(scope="session")
def fig1() -> Graph:
    return load_graph(FIG1_NODES.splitlines(), FIG1_EDGES.splitlines())


@pytest.fixture(scope="session")
def path_abc() -> tuple[Graph, SeedSets]:
    # A(1) -> 1(2) -> 2(3) -> B(4) -> 3(5) -> C(6): edge-set pruning can miss the path
    g = make_graph(["A", "1", "2", "B", "3", "C"], [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6)])
    return g, SeedSets([(1,), (4,), (6,)])


@pytest.fixture(scope="session")
def tee_abc() -> tuple[Graph, SeedSets]:
    # A(1) -> 1(2) -> x(3) -> 2(4) -> B(5); x(3) -> 3(6) -> C(7): one 3-leaf result at x
    g = make_graph(
        ["A", "1", "x", "2", "B", "3", "C"],
        [(1, 2), (2, 3), (3, 4), (3, 6), (4, 5), (6, 7)],
    )
    return g, SeedSets([(1,), (5,), (7,)])


@pytest.fixture(scope="session")
def six_seed_tree() -> tuple[Graph, SeedSets]:
    # two internal seeds (A, B) with the six-seed result covering 10 edges
    labels = ["A", "1", "2", "B", "3", "C", "4", "5", "6", "7", "8", "9", "D", "10", "E", "F"]
    pairs = [
        (1, 2), (2, 3), (3, 4),  # A-1-2-B
        (4, 5), (5, 6),  # B-3-C
        (1, 7), (1, 8),  # A-4, A-5
        (4, 9), (4, 10), (4, 11),  # B-6, B-7, B-8
        (6, 12),  # C-9
        (7, 13),  # 4-D
        (8, 14), (9, 14),  # 5-10, 6-10
        (10, 15),  # 7-E
        (11, 16), (12, 16),  # 8-F, 9-F
    ]
    g = make_graph(labels, pairs)
    return g, SeedSets([(1,), (4,), (6,), (13,), (15,), (16,)])


@pytest.fixture(scope="session")
def four_seed_cross() -> tuple[Graph, SeedSets]:
    # x(1) between two seed-bearing paths; the 8-edge result is not piecewise spider
    labels = ["x", "2", "B", "1", "A", "3", "C", "4", "D"]
    pairs = [(1, 2), (2, 4), (4, 5), (1, 6), (6, 8), (8, 9), (2, 3), (6, 7)]
    g = make_graph(labels, pairs)
    return g, SeedSets([(5,), (3,), (7,), (9,)])


def random_suite(count: int, m_choices: list[int], rng_seed: int):
    rng = random.Random(rng_seed)
    out = []
    for i in range(count):
        m = m_choices[i % len(m_choices)]
        g, seeds = gen_random_instance(rng, max_nodes=12, max_edges=20, n_labels=3, m=m, max_set_size=2)
        out.append((g, seeds))
    return out


@pytest.fixture(scope="session")
def suite_m3():
    """200 random instances with up to three seed sets, plus exhaustive baselines."""
    out = []
    for g, seeds in random_suite(200, [1, 2, 3, 2, 3, 3], rng_seed=20250811):
        baseline, stats = run_search(g, seeds, SearchConfig(algorithm="bft"))
        assert not stats.timed_out
        out.append((g, seeds, baseline))
    return out


@pytest.fixture(scope="session")
def suite_m456():
    """100 random instances with four to six seed sets, plus exhaustive baselines."""
    out = []
    for g, seeds in random_suite(100, [4, 5, 6], rng_seed=20250812):
        baseline, stats = run_search(g, seeds, SearchConfig(algorithm="bft"))
        assert not stats.timed_out
        out.append((g, seeds, baseline))
    return out
