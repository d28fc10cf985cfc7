import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import exhaustive_kmeans, exhaustive_kmedians
from specbm.clustering import (
    KMeansConfig,
    assign_labels,
    embed_laplacian,
    geometric_median,
    hausdorff,
    kmeans,
    kmedians_modified,
    row_normalize,
    spectral_cluster,
)
from specbm.errors import EmptySet, SingularDegree, TooFewPoints
from specbm.graphgen import RngSeed, four_param_sbm, sample_adjacency
from specbm.metrics import ccp
from specbm.sbm import edge_prob_matrix

FOUR_POINTS = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])


class TestAssignLabels:
    def test_tie_goes_to_smallest_index(self):
        labels = assign_labels([[0.0]], [[-1.0], [1.0]])
        assert labels[0] == 1

    def test_coincident_centroid(self):
        labels = assign_labels([[5.0]], [[0.0], [2.0], [5.0]])
        assert labels[0] == 3

    def test_matches_naive_scan(self, rng):
        points = rng.normal(size=(40, 3))
        centers = rng.normal(size=(4, 3))
        labels = assign_labels(points, centers)
        for i, x in enumerate(points):
            dists = [np.linalg.norm(x - c) for c in centers]
            best = min(range(4), key=lambda j: (dists[j] > min(dists) + 1e-12, j))
            assert labels[i] == best + 1

    def test_labels_one_based(self, rng):
        points = rng.normal(size=(10, 2))
        labels = assign_labels(points, points[:3])
        assert labels.min() >= 1 and labels.max() <= 3


class TestRowNormalize:
    def test_unit_rows(self):
        normed, degenerate = row_normalize(np.array([[3.0, 4.0]]))
        assert np.allclose(normed, [[0.6, 0.8]])
        assert not degenerate.any()

    def test_zero_row_flagged(self):
        normed, degenerate = row_normalize(np.array([[0.0, 0.0], [1.0, 0.0]]))
        assert np.array_equal(normed[0], [0.0, 0.0])
        assert list(degenerate) == [True, False]

    @given(st.integers(min_value=0, max_value=5_000))
    def test_norms_are_one(self, seed):
        U = np.random.default_rng(seed).normal(size=(8, 3))
        normed, degenerate = row_normalize(U)
        norms = np.linalg.norm(normed, axis=1)
        assert np.allclose(norms[~degenerate], 1.0)


class TestGeometricMedian:
    def test_single_point(self):
        assert np.allclose(geometric_median(np.array([[2.0, 3.0]])), [2.0, 3.0])

    def test_two_points_midpoint(self):
        med = geometric_median(np.array([[0.0, 0.0], [0.0, 1.0]]))
        assert np.allclose(med, [0.0, 0.5], atol=1e-8)

    def test_collinear_three_points(self):
        med = geometric_median(np.array([[0.0], [1.0], [10.0]]))
        assert med[0] == pytest.approx(1.0, abs=1e-7)

    def test_equilateral_centroid(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3) / 2]])
        med = geometric_median(pts)
        assert np.allclose(med, pts.mean(axis=0), atol=1e-8)

    def test_identical_points(self):
        pts = np.ones((4, 2))
        assert np.allclose(geometric_median(pts), [1.0, 1.0])

    def test_first_order_optimality(self, rng):
        pts = rng.normal(size=(7, 2))
        med = geometric_median(pts)
        diffs = pts - med
        norms = np.linalg.norm(diffs, axis=1)
        grad = -(diffs / norms[:, None]).sum(axis=0)
        assert np.linalg.norm(grad) < 1e-6


class TestHausdorff:
    def test_identical_sets(self):
        s = np.array([[0.0], [2.0]])
        assert hausdorff(s, s) == 0.0

    def test_singletons(self):
        assert hausdorff([[0.0]], [[3.0]]) == pytest.approx(3.0)

    def test_asymmetric_cover(self):
        assert hausdorff([[0.0], [10.0]], [[0.0]]) == pytest.approx(10.0)
        assert hausdorff([[0.0]], [[0.0], [10.0]]) == pytest.approx(10.0)

    def test_empty_raises(self):
        with pytest.raises(EmptySet):
            hausdorff(np.zeros((0, 2)), [[0.0, 0.0]])


class TestKMeans:
    def test_two_well_separated_pairs(self):
        result = kmeans(FOUR_POINTS, 2, seed=0)
        assert result.objective == pytest.approx(0.25, abs=1e-12)
        got = {tuple(np.round(c, 9)) for c in result.centroids}
        assert got == {(0.0, 0.5), (10.0, 0.5)}
        assert ccp(result.labels, [1, 1, 2, 2]) == 1.0

    def test_k_equals_n(self, rng):
        pts = rng.normal(size=(5, 2))
        result = kmeans(pts, 5, seed=0)
        assert result.objective == pytest.approx(0.0, abs=1e-12)

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            kmeans(FOUR_POINTS[:1], 2, seed=0)

    def test_deterministic(self, rng):
        pts = rng.normal(size=(30, 2))
        r1 = kmeans(pts, 3, seed=42)
        r2 = kmeans(pts, 3, seed=42)
        assert np.array_equal(r1.labels, r2.labels)
        assert r1.objective == r2.objective

    def test_objective_self_consistent(self, rng):
        pts = rng.normal(size=(25, 3))
        r = kmeans(pts, 4, seed=1)
        d = np.linalg.norm(pts[:, None, :] - r.centroids[None], axis=2)
        recomputed = float((d.min(axis=1) ** 2).mean())
        assert r.objective == pytest.approx(recomputed, abs=1e-10)

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(2026)
        for _ in range(12):
            pts = rng.normal(size=(8, 2))
            got = kmeans(pts, 2, seed=7).objective
            best = exhaustive_kmeans(pts, 2)
            assert got <= best + 1e-9
            assert got >= best - 1e-12

    def test_rotation_invariance(self, rng):
        pts = rng.normal(size=(20, 2))
        theta = 0.83
        R = np.array([[np.cos(theta), -np.sin(theta)],
                      [np.sin(theta), np.cos(theta)]])
        r1 = kmeans(pts, 3, seed=5)
        r2 = kmeans(pts @ R.T, 3, seed=5)
        assert ccp(r1.labels, r2.labels) == 1.0

    def test_medoid_centers_are_points(self, rng):
        pts = rng.normal(size=(15, 2))
        r = kmeans(pts, 3, config=KMeansConfig(mode="medoid"), seed=3)
        for c in r.centroids:
            assert any(np.array_equal(c, p) for p in pts)

    def test_medoid_objective_not_worse_than_best_medoid_restriction(self, rng):
        pts = rng.normal(size=(9, 1))
        r = kmeans(pts, 2, config=KMeansConfig(mode="medoid"), seed=3)
        best = np.inf
        for i in range(9):
            for j in range(i + 1, 9):
                centers = pts[[i, j]]
                d = np.linalg.norm(pts[:, None] - centers[None], axis=2)
                best = min(best, float((d.min(axis=1) ** 2).mean()))
        assert r.objective == pytest.approx(best, abs=1e-9)


class TestModifiedKMeans:
    def test_four_point_objective(self):
        r = kmedians_modified(FOUR_POINTS, 2, seed=0)
        assert r.objective == pytest.approx(0.5, abs=1e-8)

    def test_identical_points(self):
        pts = np.ones((6, 2))
        r = kmedians_modified(pts, 2, seed=0)
        assert r.objective == pytest.approx(0.0, abs=1e-12)

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(515)
        for _ in range(6):
            pts = rng.normal(size=(7, 2))
            got = kmedians_modified(pts, 2, seed=9).objective
            best = exhaustive_kmedians(pts, 2)
            assert got <= best + 1e-6
            assert got >= best - 1e-8

    def test_objective_self_consistent(self, rng):
        pts = rng.normal(size=(25, 3))
        r = kmedians_modified(pts, 4, seed=1)
        d = np.linalg.norm(pts[:, None, :] - r.centroids[None], axis=2)
        recomputed = float(d.min(axis=1).mean())
        assert r.objective == pytest.approx(recomputed, abs=1e-10)

    def test_deterministic(self, rng):
        pts = rng.normal(size=(30, 2))
        r1 = kmedians_modified(pts, 3, seed=42)
        r2 = kmedians_modified(pts, 3, seed=42)
        assert np.array_equal(r1.labels, r2.labels)


class TestEmbedLaplacian:
    def test_sbm_scaling(self):
        L = np.eye(6)
        pts, degenerate = embed_laplacian(L, 2, "tau")
        assert degenerate is None
        norms = np.linalg.norm(pts, axis=1)
        # rows of an n x K orthonormal slice scaled by sqrt(n/K)
        assert pts.shape == (6, 2)
        assert np.allclose((norms**2).sum(), 6.0)

    def test_dc_rows_unit_norm(self, rng):
        M = rng.normal(size=(8, 8))
        L = (M + M.T) / 2
        pts, degenerate = embed_laplacian(L, 3, "tau_prime")
        assert np.allclose(np.linalg.norm(pts[~degenerate], axis=1), 1.0)


class TestSpectralCluster:
    def test_two_disjoint_cliques(self):
        A = np.zeros((8, 8))
        A[:4, :4] = 1.0
        A[4:, 4:] = 1.0
        np.fill_diagonal(A, 0.0)
        r = spectral_cluster(A, 2, variant="plain", algo="kmeans", seed=0)
        assert ccp(r.labels, [1, 1, 1, 1, 2, 2, 2, 2]) == 1.0

    def test_dense_four_param_exact(self):
        model, mem = four_param_sbm(2, 150, 0.05, 0.5)
        P = edge_prob_matrix(model, mem)
        hits = 0
        for rep in range(10):
            A = sample_adjacency(P, RngSeed(55, rep))
            r = spectral_cluster(A, 2, variant="plain", algo="kmeans", seed=rep)
            hits += ccp(r.labels, mem.labels) == 1.0
        assert hits >= 9

    def test_empty_graph_regularized_is_degenerate_but_valid(self):
        # rank-1 Laplacian: the leading eigenvector is constant and the rest
        # span an arbitrary basis of the zero eigenspace, so the result is
        # degenerate but must still be well-formed
        A = np.zeros((6, 6))
        r = spectral_cluster(A, 2, variant="tau", tau=1.0, algo="kmeans", seed=0)
        assert r.labels.shape == (6,)
        assert set(np.unique(r.labels)) <= {1, 2}
        assert np.isfinite(r.objective)

    def test_plain_isolated_node_raises(self):
        A = np.zeros((4, 4))
        A[0, 1] = A[1, 0] = 1.0
        with pytest.raises(SingularDegree):
            spectral_cluster(A, 2, variant="plain", seed=0)

    def test_modified_algo_runs(self):
        A = np.zeros((8, 8))
        A[:4, :4] = 1.0
        A[4:, 4:] = 1.0
        np.fill_diagonal(A, 0.0)
        r = spectral_cluster(A, 2, variant="tau", tau=0.5, algo="modified", seed=0)
        assert ccp(r.labels, [1, 1, 1, 1, 2, 2, 2, 2]) == 1.0

    def test_dprime_degenerate_rows_reported(self):
        A = np.zeros((6, 6))
        A[:2, :2] = 1.0 - np.eye(2)
        A[2:5, 2:5] = 1.0 - np.eye(3)
        theta = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 0.0])
        r = spectral_cluster(A, 2, variant="tau_dprime", tau=1.0, algo="kmeans",
                             seed=0, theta_hat=theta)
        assert r.degenerate_rows is not None
        assert bool(r.degenerate_rows[5])


class TestKMeansConfig:
    def test_rejects_bad_mode(self):
        with pytest.raises(ValueError):
            KMeansConfig(mode="fancy")

    def test_rejects_nonpositive_restarts(self):
        with pytest.raises(ValueError):
            KMeansConfig(restarts=0)
