"""Two-sample metrics: hand oracles, brute-force equivalence, properties."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agrisynth.ganmetrics import (
    AGF1_MAGIC,
    KIND_FEATURES,
    KIND_PROBABILITIES,
    METRIC_ORDER,
    FeatureSet,
    GanMetricsError,
    MetricVector,
    ProbabilityMatrix,
    error_vector,
    evaluate_all,
    fid,
    inception_score,
    kernel_mmd,
    load_agf1,
    load_matrix,
    mode_score,
    model_mean_error,
    one_nn_accuracy,
    reference_baseline,
    save_agf1,
    save_csv,
    wasserstein,
)

feature_pairs = st.integers(0, 2**32 - 1).map(
    lambda seed: np.random.default_rng(seed))


def random_features(rng, n=None, d=None):
    n = n if n is not None else int(rng.integers(2, 12))
    d = d if d is not None else int(rng.integers(1, 6))
    return rng.normal(size=(n, d)) * 3.0


def random_probs(rng, n=None, k=None):
    n = n if n is not None else int(rng.integers(2, 12))
    k = k if k is not None else int(rng.integers(2, 6))
    raw = rng.random((n, k)) + 1e-3
    return raw / raw.sum(axis=1, keepdims=True)


def kl_scalar(p, q):
    # Definitionally transcribed KL with natural log; 0*log(0/q) = 0.
    total = 0.0
    for pi, qi in zip(p, q):
        if pi > 0:
            if qi == 0:
                return math.inf
            total += pi * math.log(pi / qi)
    return total


class TestInceptionScore:
    def test_uniform_rows_give_one(self):
        probs = np.full((5, 4), 0.25)
        assert inception_score(probs) == pytest.approx(1.0, abs=1e-9)

    def test_two_one_hot_rows_give_two(self):
        probs = np.array([[1.0, 0.0], [0.0, 1.0]])
        assert inception_score(probs) == pytest.approx(2.0, abs=1e-9)

    def test_one_hot_over_k_classes_gives_k(self):
        for k in (2, 5, 10):
            probs = np.eye(k)
            assert inception_score(probs) == pytest.approx(k, abs=1e-9)

    def test_hand_oracle_two_rows(self):
        rows = [(0.8, 0.2), (0.6, 0.4)]
        marginal = (0.7, 0.3)
        expected = math.exp((kl_scalar(rows[0], marginal)
                             + kl_scalar(rows[1], marginal)) / 2.0)
        assert inception_score(np.array(rows)) == pytest.approx(expected,
                                                                abs=1e-12)

    @given(feature_pairs)
    @settings(max_examples=40)
    def test_range_is_one_to_k(self, rng):
        probs = random_probs(rng)
        score = inception_score(probs)
        assert 1.0 - 1e-9 <= score <= probs.shape[1] + 1e-9

    def test_splits_average(self):
        probs = np.vstack([np.eye(2), np.eye(2)])
        assert inception_score(probs, splits=2) == pytest.approx(2.0, abs=1e-9)

    def test_splits_validation(self):
        probs = np.full((3, 2), 0.5)
        with pytest.raises(GanMetricsError, match="splits"):
            inception_score(probs, splits=0)
        with pytest.raises(GanMetricsError, match="splits"):
            inception_score(probs, splits=4)

    def test_row_sum_validation(self):
        with pytest.raises(GanMetricsError, match="sums to"):
            inception_score(np.array([[0.5, 0.4]]))

    def test_negative_probability_rejected(self):
        with pytest.raises(GanMetricsError, match=r"\[0, 1\]"):
            inception_score(np.array([[1.2, -0.2]]))


class TestModeScore:
    def test_equal_marginals_reduce_to_inception(self):
        gen = np.array([[0.9, 0.1], [0.1, 0.9]])   # marginal (0.5, 0.5)
        real = np.array([[0.5, 0.5], [0.5, 0.5]])  # same marginal
        assert mode_score(gen, real) == pytest.approx(inception_score(gen),
                                                      abs=1e-12)

    def test_identical_sets_reduce_to_inception(self):
        rng = np.random.default_rng(3)
        probs = random_probs(rng, 6, 3)
        assert mode_score(probs, probs) == pytest.approx(
            inception_score(probs), abs=1e-12)

    def test_hand_oracle_three_rows(self):
        gen = [(0.9, 0.1), (0.7, 0.3), (0.2, 0.8)]
        real = [(0.5, 0.5), (0.6, 0.4), (0.4, 0.6)]
        p_star = (0.5, 0.5)
        p_gen = (0.6, 0.4)
        mean_kl = sum(kl_scalar(row, p_star) for row in gen) / 3.0
        expected = math.exp(mean_kl - kl_scalar(p_gen, p_star))
        assert mode_score(np.array(gen), np.array(real)) == pytest.approx(
            expected, abs=1e-12)

    def test_unsupported_real_class_gives_infinity(self):
        real = np.array([[1.0, 0.0], [1.0, 0.0]])
        gen = np.array([[0.5, 0.5], [0.5, 0.5]])
        assert math.isinf(mode_score(gen, real))

    def test_class_count_mismatch(self):
        with pytest.raises(GanMetricsError, match="class count"):
            mode_score(np.full((2, 2), 0.5), np.full((2, 4), 0.25))


def mmd_oracle(x, y):
    # Direct double-loop transcription of the biased V-statistic.
    pooled = np.vstack([x, y])
    dists = []
    for i in range(len(pooled)):
        for j in range(i + 1, len(pooled)):
            dists.append(math.dist(pooled[i], pooled[j]))
    sigma = float(np.median(dists))
    if sigma == 0.0:
        return 0.0

    def k(a, b):
        return math.exp(-math.dist(a, b) ** 2 / (2.0 * sigma * sigma))

    xx = sum(k(a, b) for a in x for b in x) / (len(x) ** 2)
    yy = sum(k(a, b) for a in y for b in y) / (len(y) ** 2)
    xy = sum(k(a, b) for a in x for b in y) / (len(x) * len(y))
    return math.sqrt(max(xx + yy - 2.0 * xy, 0.0))


class TestKernelMmd:
    def test_identical_sets_give_zero(self, rng):
        x = random_features(rng, 8, 3)
        assert kernel_mmd(x, x) == 0.0

    def test_singleton_closed_form(self):
        a = np.array([[0.0, 0.0]])
        b = np.array([[3.0, 4.0]])
        # sigma = ||a-b|| = 5, so MMD^2 = 2 - 2 exp(-1/2).
        expected = math.sqrt(2.0 - 2.0 * math.exp(-0.5))
        assert abs(kernel_mmd(a, b) - expected) <= 1e-12

    def test_matches_double_loop_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            x = random_features(rng, 10, 2)
            y = random_features(rng, 10, 2)
            assert kernel_mmd(x, y) == pytest.approx(mmd_oracle(x, y),
                                                     abs=1e-9)

    @given(feature_pairs)
    @settings(max_examples=30)
    def test_symmetry_and_nonnegativity(self, rng):
        x = random_features(rng)
        y = random_features(rng, d=x.shape[1])
        forward = kernel_mmd(x, y)
        assert forward >= 0.0
        assert forward == pytest.approx(kernel_mmd(y, x), abs=1e-12)

    def test_dims_mismatch(self):
        with pytest.raises(GanMetricsError, match="dimension mismatch"):
            kernel_mmd(np.zeros((2, 2)), np.zeros((2, 3)))


def emd_oracle(x, y):
    n = len(x)
    best = math.inf
    for perm in itertools.permutations(range(n)):
        cost = sum(math.dist(x[i], y[perm[i]]) for i in range(n))
        best = min(best, cost)
    return best / n


class TestWasserstein:
    def test_singletons(self):
        assert wasserstein(np.array([[0.0]]), np.array([[3.0]])) == 3.0

    def test_identical_multisets_give_zero(self, rng):
        x = random_features(rng, 6, 2)
        shuffled = x[rng.permutation(6)]
        assert wasserstein(x, shuffled) == pytest.approx(0.0, abs=1e-12)

    def test_interleaved_pairs(self):
        x = np.array([[0.0], [2.0]])
        y = np.array([[1.0], [3.0]])
        assert wasserstein(x, y) == 1.0

    def test_matches_brute_force_small_instances(self):
        rng = np.random.default_rng(21)
        for _ in range(25):
            n = int(rng.integers(1, 8))
            d = int(rng.integers(1, 4))
            x = random_features(rng, n, d)
            y = random_features(rng, n, d)
            assert wasserstein(x, y) == pytest.approx(emd_oracle(x, y),
                                                      abs=1e-9)

    @given(feature_pairs)
    @settings(max_examples=20)
    def test_triangle_inequality(self, rng):
        n = int(rng.integers(2, 7))
        d = int(rng.integers(1, 4))
        x, y, z = (random_features(rng, n, d) for _ in range(3))
        assert wasserstein(x, z) <= (wasserstein(x, y) + wasserstein(y, z)
                                     + 1e-9)

    def test_unequal_sizes_direct_to_resample(self):
        with pytest.raises(GanMetricsError, match="resample"):
            wasserstein(np.zeros((3, 1)), np.zeros((4, 1)))


class TestFid:
    def test_identical_sets_give_zero(self, rng):
        x = random_features(rng, 30, 3)
        assert fid(x, x) == pytest.approx(0.0, abs=1e-6)

    def test_diagonal_closed_form(self):
        # Rows chosen so the sample covariances are exactly diagonal:
        # cov_x = diag(6, 1.5), cov_y = diag(1.5, 6), mean shift (1, 2).
        # Closed form: ||v||^2 + sum_i (sqrt(a_i) - sqrt(b_i))^2
        #            = 5 + 2 * (6 + 1.5 - 2*sqrt(9)) = 8 exactly.
        x = np.array([[3.0, 0.0], [-3.0, 0.0], [0.0, 1.5], [0.0, -1.5]])
        y = np.array([[1.5, 0.0], [-1.5, 0.0], [0.0, 3.0], [0.0, -3.0]])
        y = y + np.array([1.0, 2.0])
        closed = 5.0 + (math.sqrt(6) - math.sqrt(1.5)) ** 2 * 2
        assert fid(x, y) == pytest.approx(closed, abs=1e-9)

    def test_mean_shift_dominates_for_large_samples(self):
        rng = np.random.default_rng(8)
        shift = np.array([1.0, -2.0, 0.5])
        x = rng.normal(size=(4000, 3))
        y = rng.normal(size=(4000, 3)) + shift
        expected = float(np.sum(shift**2))
        assert fid(x, y) == pytest.approx(expected, rel=0.05)

    @given(feature_pairs)
    @settings(max_examples=20)
    def test_symmetry(self, rng):
        d = int(rng.integers(1, 4))
        x = random_features(rng, 16, d)
        y = random_features(rng, 16, d)
        assert fid(x, y) == pytest.approx(fid(y, x), abs=1e-9)

    def test_orthogonal_invariance(self, rng):
        d = 4
        x = random_features(rng, 40, d)
        y = random_features(rng, 40, d)
        q, _ = np.linalg.qr(rng.normal(size=(d, d)))
        assert fid(x @ q, y @ q) == pytest.approx(fid(x, y), abs=1e-6)

    def test_warns_when_underdetermined(self, rng):
        x = random_features(rng, 3, 5)
        with pytest.warns(UserWarning, match="fewer rows than dims"):
            fid(x, x)

    def test_nonfinite_features_rejected(self):
        bad = np.zeros((4, 2))
        bad[0, 0] = np.nan
        with pytest.raises(GanMetricsError, match="non-finite"):
            fid(bad, np.zeros((4, 2)))


class TestOneNnAccuracy:
    def test_separable_sets(self):
        x = np.array([[0.0], [0.1]])
        y = np.array([[10.0], [10.1]])
        assert one_nn_accuracy(x, y) == 1.0

    def test_interleaved_sets_score_zero(self):
        # Enumerating all four leave-one-out queries: every point's
        # nearest neighbor (ties to the lower pooled index) has the
        # opposite label.
        x = np.array([[0.0], [2.0]])
        y = np.array([[1.0], [3.0]])
        assert one_nn_accuracy(x, y) == 0.0

    def test_same_distribution_near_half(self):
        rng = np.random.default_rng(17)
        accs = []
        for _ in range(5):
            x = rng.normal(size=(300, 8))
            y = rng.normal(size=(300, 8))
            accs.append(one_nn_accuracy(x, y))
        assert 0.4 <= float(np.mean(accs)) <= 0.6

    @given(feature_pairs)
    @settings(max_examples=30)
    def test_range_and_isometry_invariance(self, rng):
        d = int(rng.integers(1, 4))
        x = random_features(rng, 6, d)
        y = random_features(rng, 6, d)
        base = one_nn_accuracy(x, y)
        assert 0.0 <= base <= 1.0
        q, _ = np.linalg.qr(rng.normal(size=(d, d)))
        shift = rng.normal(size=d)
        assert one_nn_accuracy(x @ q + shift, y @ q + shift) == base

    def test_tie_breaks_prefer_lower_index(self):
        # Query x0 at 0 is equidistant from x1 (-1) and y0 (+1); the
        # lower pooled index is x1, so that query counts as correct and
        # the enumerated accuracy is 3/4 (it would be 2/4 if ties went
        # the other way).
        x = np.array([[0.0], [-1.0]])
        y = np.array([[1.0], [5.0]])
        assert one_nn_accuracy(x, y) == 0.75

    def test_min_rows(self):
        with pytest.raises(GanMetricsError, match="at least 2"):
            one_nn_accuracy(np.zeros((1, 1)), np.zeros((2, 1)))


class TestReferenceBaseline:
    def test_identical_rows_degenerate_levels(self):
        feats = np.ones((8, 3))
        probs = np.full((8, 2), 0.5)
        vec = reference_baseline(feats, probs, repeats=1, seed=0)
        assert vec.emd == 0.0
        assert vec.fid == pytest.approx(0.0, abs=1e-9)
        assert vec.mmd == 0.0
        assert vec.inception == pytest.approx(1.0, abs=1e-12)
        assert vec.mode == pytest.approx(1.0, abs=1e-12)
        assert vec.knn == 0.5  # tie rule sends every query to index 0 or 1

    def test_same_seed_reproduces_vector(self, rng):
        feats = random_features(rng, 24, 3)
        probs = random_probs(rng, 24, 4)
        a = reference_baseline(feats, probs, repeats=3, seed=7)
        b = reference_baseline(feats, probs, repeats=3, seed=7)
        assert a == b
        c = reference_baseline(feats, probs, repeats=3, seed=8)
        assert a != c

    def test_repeats_twenty_runs(self, rng):
        feats = random_features(rng, 30, 2)
        probs = random_probs(rng, 30, 3)
        vec = reference_baseline(feats, probs, repeats=20, seed=1)
        assert all(math.isfinite(v) for v in vec.as_tuple())

    def test_insufficient_rows(self):
        with pytest.raises(GanMetricsError, match="fewer than 2 per side"):
            reference_baseline(np.ones((3, 2)), np.full((3, 2), 0.5))

    def test_row_count_mismatch(self):
        with pytest.raises(GanMetricsError, match="row"):
            reference_baseline(np.ones((6, 2)), np.full((5, 2), 0.5))

    def test_split_validation(self):
        feats = np.ones((8, 2))
        probs = np.full((8, 2), 0.5)
        with pytest.raises(GanMetricsError, match="split"):
            reference_baseline(feats, probs, split=0.8)


class TestMeanErrorRanking:
    def test_first_reported_row(self):
        vec = MetricVector(0.03, 0.07, 1.17, 0.09, 0.07, 1.15)
        assert model_mean_error(vec) == pytest.approx(0.43, abs=0.005)

    def test_underfit_model_row(self):
        vec = MetricVector(21.74, 0.16, 0.95, 0.49, 0.56, 1.38)
        assert model_mean_error(vec) == pytest.approx(4.21, abs=0.005)

    def test_zero_errors(self):
        assert model_mean_error(MetricVector(0, 0, 0, 0, 0, 0)) == 0.0

    def test_nonfinite_rejected(self):
        with pytest.raises(GanMetricsError, match="finite"):
            model_mean_error(MetricVector(math.inf, 0, 0, 0, 0, 0))

    def test_error_vector_absolute_differences(self):
        model = MetricVector(1.0, 2.0, 3.0, 0.2, 0.5, 1.1)
        ref = MetricVector(0.5, 2.5, 1.0, 0.5, 0.4, 1.3)
        err = error_vector(model, ref)
        assert err.as_tuple() == pytest.approx((0.5, 0.5, 2.0, 0.3, 0.1, 0.2))

    def test_metric_order_fixed(self):
        assert METRIC_ORDER == ("emd", "fid", "inception", "knn", "mmd", "mode")
        vec = MetricVector(1, 2, 3, 4, 5, 6)
        assert vec.as_tuple() == (1, 2, 3, 4, 5, 6)
        assert list(vec.to_dict()) == list(METRIC_ORDER)

    def test_evaluate_all_consistent_with_parts(self, rng):
        rf = random_features(rng, 10, 3)
        gf = random_features(rng, 10, 3)
        rp = random_probs(rng, 10, 3)
        gp = random_probs(rng, 10, 3)
        vec = evaluate_all(rf, gf, rp, gp)
        assert vec.emd == wasserstein(rf, gf)
        assert vec.inception == inception_score(gp)
        assert vec.mode == mode_score(gp, rp)


class TestValidation:
    def test_feature_set_rejects_nan(self):
        with pytest.raises(GanMetricsError, match="non-finite"):
            FeatureSet(np.array([[1.0, np.nan]]))

    def test_feature_set_rejects_1d(self):
        with pytest.raises(GanMetricsError, match="2-D"):
            FeatureSet(np.array([1.0, 2.0]))

    def test_probability_matrix_accessors(self):
        pm = ProbabilityMatrix(np.full((4, 2), 0.5))
        assert pm.rows == 4
        assert pm.classes == 2


class TestAgf1Format:
    def test_round_trip_features(self, tmp_path, rng):
        data = rng.normal(size=(7, 5)).astype(np.float32)
        path = save_agf1(tmp_path / "x.agf", data, KIND_FEATURES)
        loaded, kind = load_agf1(path)
        assert kind == KIND_FEATURES
        assert loaded.dtype == np.float32
        assert (loaded == data).all()

    def test_round_trip_probabilities(self, tmp_path, rng):
        data = random_probs(rng, 4, 3).astype(np.float32)
        path = save_agf1(tmp_path / "p.agf", data, KIND_PROBABILITIES)
        loaded, kind = load_agf1(path)
        assert kind == KIND_PROBABILITIES
        assert (loaded == data).all()

    def test_header_layout(self, tmp_path):
        data = np.arange(6, dtype=np.float32).reshape(2, 3)
        path = save_agf1(tmp_path / "h.agf", data, KIND_FEATURES)
        blob = path.read_bytes()
        assert blob[:4] == b"AGF1" == AGF1_MAGIC
        assert blob[4:6] == (1).to_bytes(2, "little")          # version
        assert blob[6] == KIND_FEATURES                        # kind
        assert blob[7] == 0                                    # pad
        assert int.from_bytes(blob[8:12], "little") == 2       # rows
        assert int.from_bytes(blob[12:16], "little") == 3      # dims
        assert len(blob) == 16 + 2 * 3 * 4
        assert np.frombuffer(blob[16:], dtype="<f4")[3] == 3.0

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.agf"
        path.write_bytes(b"NOPE" + bytes(12))
        with pytest.raises(GanMetricsError, match="bad magic"):
            load_agf1(path)

    def test_bad_version_rejected(self, tmp_path):
        path = tmp_path / "v2.agf"
        path.write_bytes(b"AGF1" + (2).to_bytes(2, "little") + bytes(10))
        with pytest.raises(GanMetricsError, match="version"):
            load_agf1(path)

    def test_truncated_payload_rejected(self, tmp_path, rng):
        path = save_agf1(tmp_path / "t.agf", rng.normal(size=(3, 2)),
                         KIND_FEATURES)
        path.write_bytes(path.read_bytes()[:-4])
        with pytest.raises(GanMetricsError, match="payload"):
            load_agf1(path)

    def test_csv_round_trip(self, tmp_path, rng):
        data = rng.normal(size=(4, 3))
        path = save_csv(tmp_path / "x.csv", data)
        assert path.read_text().splitlines()[0] == "dim0,dim1,dim2"
        loaded, kind = load_matrix(path)
        assert kind is None
        assert loaded == pytest.approx(data)

    def test_csv_without_header_rejected(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("1.0,2.0\n3.0,4.0\n")
        with pytest.raises(GanMetricsError, match="header"):
            load_matrix(path)

    def test_load_matrix_dispatches_to_agf1(self, tmp_path, rng):
        data = rng.normal(size=(3, 3)).astype(np.float32)
        path = save_agf1(tmp_path / "d.agf", data, KIND_FEATURES)
        loaded, kind = load_matrix(path)
        assert kind == KIND_FEATURES
        assert (loaded == data).all()
