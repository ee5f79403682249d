"""Graph statistics against brute-force oracles and hand-derived values."""

import numpy as np
import pytest

from netmediate import (
    adjacency_spectrum,
    density,
    diameter,
    from_edge_list,
    transitivity,
    uniform_homophily,
    validate_adjacency,
)

# ---------------------------------------------------------------------------
# brute-force oracles (independent of the library implementations)


def brute_density(a):
    n = len(a)
    edges = sum(a[i][j] for i in range(n) for j in range(i + 1, n))
    return edges / (n * (n - 1) / 2)


def brute_diameter(a):
    """BFS from every node; returns (largest-component diameter, disconnected)."""
    n = len(a)
    neighbors = {i: [j for j in range(n) if a[i][j]] for i in range(n)}

    def bfs(start):
        dist = {start: 0}
        frontier = [start]
        while frontier:
            nxt = []
            for u in frontier:
                for v in neighbors[u]:
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        nxt.append(v)
            frontier = nxt
        return dist

    seen = set()
    components = []
    for i in range(n):
        if i in seen:
            continue
        dist = bfs(i)
        seen |= set(dist)
        components.append(set(dist))
    largest = max(len(c) for c in components)
    best = 0
    for comp in components:
        if len(comp) != largest or len(comp) == 1:
            continue
        for u in comp:
            best = max(best, max(bfs(u).values()))
    return best, len(components) > 1


def brute_transitivity(a):
    """O(n^3) enumeration of triangles and paths of length two."""
    n = len(a)
    triangles = 0
    paths = 0
    for j in range(n):
        for i in range(n):
            if i == j or not a[i][j]:
                continue
            for k in range(i + 1, n):
                if k == j or not a[j][k]:
                    continue
                paths += 1
                if a[i][k]:
                    triangles += 1  # counts each triangle once per center
    if paths == 0:
        return 0.0
    return triangles / paths


def random_graph(n, p, rng):
    a = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    a[iu] = (rng.random(len(iu[0])) < p).astype(float)
    return a + a.T


K3 = from_edge_list([("a", "b"), ("b", "c"), ("a", "c")], ["a", "b", "c"])


# ---------------------------------------------------------------------------
# from_edge_list


def test_from_edge_list_single_edge():
    a = from_edge_list([("a", "b")], ["a", "b", "c"])
    expected = np.zeros((3, 3))
    expected[0, 1] = expected[1, 0] = 1
    assert np.array_equal(a, expected)


def test_from_edge_list_empty():
    assert np.array_equal(from_edge_list([], ["a", "b"]), np.zeros((2, 2)))


def test_from_edge_list_complete_triangle():
    assert np.array_equal(K3, np.ones((3, 3)) - np.eye(3))


def test_from_edge_list_unknown_id():
    with pytest.raises(ValueError, match="unknown node id"):
        from_edge_list([("a", "z")], ["a", "b"])


def test_from_edge_list_self_loop():
    with pytest.raises(ValueError, match="self-loop"):
        from_edge_list([("a", "a")], ["a", "b"])


def test_from_edge_list_duplicate_ids():
    with pytest.raises(ValueError, match="duplicates"):
        from_edge_list([], ["a", "a"])


# ---------------------------------------------------------------------------
# density / diameter / transitivity


def test_density_complete():
    assert density(K3) == 1.0


def test_density_empty():
    assert density(np.zeros((5, 5))) == 0.0


def test_density_two_of_six_dyads():
    a = from_edge_list([(0, 1), (2, 3)], [0, 1, 2, 3])
    assert density(a) == pytest.approx(2 / 6)


def test_diameter_complete():
    assert diameter(K3) == (1, False)


def test_diameter_path():
    a = from_edge_list([(0, 1), (1, 2), (2, 3)], [0, 1, 2, 3])
    assert diameter(a) == (3, False)


def test_diameter_disjoint_edges():
    a = from_edge_list([(0, 1), (2, 3)], [0, 1, 2, 3])
    assert diameter(a) == (1, True)


def test_diameter_edgeless():
    assert diameter(np.zeros((4, 4))) == (0, True)


def test_transitivity_complete():
    assert transitivity(K3) == 1.0


def test_transitivity_star():
    a = from_edge_list([(0, 1), (0, 2), (0, 3)], [0, 1, 2, 3])
    assert transitivity(a) == 0.0


def test_transitivity_k4_minus_edge():
    # 2 triangles, 8 paths of length two -> 6/8
    a = from_edge_list([(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], [0, 1, 2, 3])
    oracle = brute_transitivity(a)
    assert oracle == pytest.approx(0.75)
    assert transitivity(a) == pytest.approx(oracle)


def test_stats_match_brute_force_on_random_graphs():
    rng = np.random.default_rng(2024)
    for _ in range(60):
        n = int(rng.integers(2, 13))
        a = random_graph(n, rng.random(), rng)
        assert density(a) == pytest.approx(brute_density(a))
        assert transitivity(a) == pytest.approx(brute_transitivity(a))
        d_oracle = brute_diameter(a)
        d = diameter(a)
        assert (d.value, d.disconnected) == d_oracle


def test_stats_invariant_under_relabeling():
    rng = np.random.default_rng(7)
    a = random_graph(9, 0.35, rng)
    perm = rng.permutation(9)
    b = a[np.ix_(perm, perm)]
    assert density(a) == pytest.approx(density(b))
    assert transitivity(a) == pytest.approx(transitivity(b))
    assert diameter(a) == diameter(b)


# ---------------------------------------------------------------------------
# uniform homophily


def test_uniform_homophily_definition():
    h = uniform_homophily(["F", "F", "M"])
    assert h[0, 1] == 1 and h[1, 0] == 1
    assert h[0, 2] == 0 and h[1, 2] == 0
    assert np.all(np.diag(h) == 0)


def test_uniform_homophily_single_category():
    h = uniform_homophily(["x"] * 4)
    assert np.array_equal(h, np.ones((4, 4)) - np.eye(4))


def test_uniform_homophily_alternating():
    h = uniform_homophily(["a", "b", "a", "b"])
    expected = np.zeros((4, 4))
    for i, j in [(0, 2), (1, 3)]:
        expected[i, j] = expected[j, i] = 1
    assert np.array_equal(h, expected)


def test_uniform_homophily_missing_value():
    with pytest.raises(ValueError, match="missing category"):
        uniform_homophily(["a", None, "b"])


def test_uniform_homophily_relabel_idempotent():
    labels = ["a", "b", "a", "c", "b", "a"]
    renamed = {"a": "zebra", "b": "yak", "c": "xerus"}
    h1 = uniform_homophily(labels)
    h2 = uniform_homophily([renamed[v] for v in labels])
    assert np.array_equal(h1, h2)


# ---------------------------------------------------------------------------
# spectrum


def test_spectrum_k2():
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(adjacency_spectrum(a), [1.0, -1.0])


def test_spectrum_empty():
    assert np.allclose(adjacency_spectrum(np.zeros((3, 3))), 0.0)


def test_spectrum_k3():
    assert np.allclose(adjacency_spectrum(K3), [2.0, -1.0, -1.0])


def test_spectrum_identities_random_graphs():
    rng = np.random.default_rng(5)
    for _ in range(25):
        n = int(rng.integers(2, 51))
        a = random_graph(n, rng.random(), rng)
        vals = adjacency_spectrum(a)
        assert np.all(np.diff(vals) <= 1e-12)
        assert abs(vals.sum()) < 1e-9
        edges = a.sum() / 2
        if edges:
            assert abs((vals ** 2).sum() - 2 * edges) / (2 * edges) < 1e-6
        else:
            assert abs((vals ** 2).sum()) < 1e-9


# ---------------------------------------------------------------------------
# validation


def test_validate_rejects_asymmetric():
    a = np.zeros((3, 3))
    a[0, 1] = 1
    with pytest.raises(ValueError, match="symmetric"):
        validate_adjacency(a)


def test_validate_rejects_self_loops():
    a = np.eye(3)
    with pytest.raises(ValueError, match="diagonal"):
        validate_adjacency(a)


def test_validate_rejects_nonbinary():
    a = np.zeros((3, 3))
    a[0, 1] = a[1, 0] = 2.0
    with pytest.raises(ValueError, match="binary"):
        validate_adjacency(a)


def test_validate_rejects_single_node():
    with pytest.raises(ValueError, match="at least 2"):
        validate_adjacency(np.zeros((1, 1)))
