import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_sparse_rows
from stylo.corpus import LabelSpace
from stylo.classifiers import (
    DecisionTree,
    GradientBoosting,
    KNearestNeighbors,
    LinearSVM,
    LogisticRegression,
    MLPClassifier,
    MajorityClassifier,
    RandomForest,
    predict,
    train,
)
from stylo.classifiers.base import TrainingMatrix
from stylo.classifiers.linear import logreg_loss_and_grads
from stylo.classifiers.mlp import glorot_uniform, mlp_loss_and_grads
from stylo.classifiers.tree import FeatureMatrix, best_gini_split
from stylo.errors import DataError
from stylo.rng import SplitMix64
from stylo.vectors import SparseVector, to_csr

AB = LabelSpace(labels=("A", "B"))
ABC = LabelSpace(labels=("A", "B", "C"))


def vec(dim, **kv):
    return SparseVector.from_dict(dim, {int(k[1:]): v for k, v in kv.items()})


def points(dim, coords):
    return [SparseVector.from_dict(dim, {j: v for j, v in enumerate(c) if v != 0.0})
            for c in coords]


class TestMajority:
    def test_most_frequent(self):
        m = MajorityClassifier().fit(points(1, [[0], [1], [2]]), ["A", "A", "B"], AB)
        assert m.predict(points(1, [[9], [-9]])) == ["A", "A"]

    def test_tie_breaks_lexicographically(self):
        m = MajorityClassifier().fit(points(1, [[0], [1]]), ["B", "A"], AB)
        assert m.predict(points(1, [[5]])) == ["A"]

    def test_accuracy_equals_prevalence(self):
        # on a test set where the stored label has prevalence p, accuracy = p
        m = MajorityClassifier().fit(points(1, [[0], [1], [2]]), ["A", "A", "B"], AB)
        y_test = ["A"] * 211 + ["B"] * 136
        preds = m.predict(points(1, [[i] for i in range(347)]))
        acc = sum(p == t for p, t in zip(preds, y_test)) / 347
        assert acc == pytest.approx(211 / 347, abs=1e-12)


class TestKnn:
    def test_k1_recovers_training_row(self):
        rows = points(2, [[0, 0], [3, 3], [9, 0]])
        m = KNearestNeighbors(k=1).fit(rows, ["A", "B", "A"], AB)
        assert m.predict([rows[1]]) == ["B"]

    def test_hand_distances(self):
        rows = points(2, [[0, 0], [0, 1], [5, 5]])
        m = KNearestNeighbors(k=3).fit(rows, ["A", "A", "B"], AB)
        assert m.predict(points(2, [[0, 0.4]])) == ["A"]

    def test_k_too_large(self):
        with pytest.raises(DataError, match="exceeds"):
            KNearestNeighbors(k=4).fit(points(1, [[0], [1]]), ["A", "B"], AB)

    def test_matches_linear_scan_oracle(self):
        rng = SplitMix64(101)
        train_rows = random_sparse_rows(31, 60, 8)
        labels = [ABC.labels[rng.next_below(3)] for _ in range(60)]
        queries = random_sparse_rows(32, 100, 8)
        for k in (1, 3, 5):
            m = KNearestNeighbors(k=k).fit(train_rows, labels, ABC)
            got = m.predict(queries)
            for q, prediction in zip(queries, got):
                qd = q.to_dense()
                dists = [(float(np.sum((qd - r.to_dense()) ** 2)), idx)
                         for idx, r in enumerate(train_rows)]
                dists.sort()  # distance tie -> lower row index
                votes = [0, 0, 0]
                for _, idx in dists[:k]:
                    votes[ABC.index(labels[idx])] += 1
                best = max(votes)
                want = ABC.labels[votes.index(best)]  # vote tie -> smallest label index
                assert prediction == want


class TestLogreg:
    def test_separable_1d(self):
        rows = points(1, [[-1], [-1.2], [1], [1.1]])
        m = LogisticRegression().fit(rows, ["A", "A", "B", "B"], AB)
        assert m.predict(rows) == ["A", "A", "B", "B"]

    def test_zero_features_predict_majority(self):
        rows = [SparseVector(dimension=3)] * 5
        m = LogisticRegression().fit(rows, ["A", "A", "A", "B", "B"], AB)
        assert m.predict([SparseVector(dimension=3)]) == ["A"]
        assert m.bias_[0] > m.bias_[1]

    def test_gradients_match_finite_differences(self):
        rng = SplitMix64(202)
        n, d, k = 5, 4, 3
        X = to_csr(random_sparse_rows(41, n, d, density=0.8))
        y = np.array([rng.next_below(k) for _ in range(n)])
        onehot = np.eye(k)[y]
        weights = np.array([[rng.next_uniform(-1, 1) for _ in range(k)] for _ in range(d)])
        bias = np.array([rng.next_uniform(-1, 1) for _ in range(k)])
        loss, grad_w, grad_b = logreg_loss_and_grads(X, onehot, weights, bias, 1e-4)
        h = 1e-6
        for i in range(d):
            for j in range(k):
                wp, wm = weights.copy(), weights.copy()
                wp[i, j] += h
                wm[i, j] -= h
                fd = (logreg_loss_and_grads(X, onehot, wp, bias, 1e-4)[0]
                      - logreg_loss_and_grads(X, onehot, wm, bias, 1e-4)[0]) / (2 * h)
                rel = abs(fd - grad_w[i, j]) / max(abs(fd), abs(grad_w[i, j]), 1e-8)
                assert rel < 1e-5
        for j in range(k):
            bp, bm = bias.copy(), bias.copy()
            bp[j] += h
            bm[j] -= h
            fd = (logreg_loss_and_grads(X, onehot, weights, bp, 1e-4)[0]
                  - logreg_loss_and_grads(X, onehot, weights, bm, 1e-4)[0]) / (2 * h)
            rel = abs(fd - grad_b[j]) / max(abs(fd), abs(grad_b[j]), 1e-8)
            assert rel < 1e-5

    def test_probabilities_sum_to_one(self):
        rows = random_sparse_rows(42, 30, 6)
        rng = SplitMix64(4)
        labels = [ABC.labels[rng.next_below(3)] for _ in range(30)]
        m = LogisticRegression().fit(rows, labels, ABC)
        probs = m.predict_proba(random_sparse_rows(43, 10, 6))
        assert np.all(probs >= 0)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)

    def test_single_class_is_error(self):
        with pytest.raises(DataError, match="2 classes"):
            LogisticRegression().fit(points(1, [[1], [2]]), ["A", "A"], AB)


class TestLinearSVM:
    def test_separable_through_origin(self):
        rows = points(2, [[1.0, 0.3], [1.1, -0.2], [-1.0, 0.2], [-0.9, -0.3]])
        m = LinearSVM().fit(rows, ["A", "A", "B", "B"], AB)
        assert m.predict(rows) == ["A", "A", "B", "B"]

    def test_feature_scaling_equivariance(self):
        # scale features by a, C by 1/a^2 -> identical training predictions
        alpha = 4.0
        rows = random_sparse_rows(51, 40, 5)
        rng = SplitMix64(6)
        labels = [AB.labels[rng.next_below(2)] for _ in range(40)]
        scaled = [SparseVector(r.dimension, tuple((i, v * alpha) for i, v in r.entries))
                  for r in rows]
        m1 = LinearSVM(C=1.0, epochs=50).fit(rows, labels, AB)
        m2 = LinearSVM(C=1.0 / alpha ** 2, epochs=50).fit(scaled, labels, AB)
        assert m1.predict(rows) == m2.predict(scaled)
        assert np.allclose(m1.decision_scores(rows), m2.decision_scores(scaled),
                           rtol=1e-9, atol=1e-12)

    def test_decision_value_is_linear(self):
        rows = random_sparse_rows(52, 30, 4)
        rng = SplitMix64(7)
        labels = [AB.labels[rng.next_below(2)] for _ in range(30)]
        m = LinearSVM(epochs=30).fit(rows, labels, AB)
        x1, x2 = rows[0].to_dense(), rows[1].to_dense()
        for alpha in (0.0, 0.25, 0.5, 1.0, 1.5):
            mix = SparseVector.from_dense(alpha * x1 + (1 - alpha) * x2)
            f_mix = m.decision_scores([mix])[0]
            f1 = m.decision_scores([rows[0]])[0]
            f2 = m.decision_scores([rows[1]])[0]
            assert np.allclose(f_mix, alpha * f1 + (1 - alpha) * f2, atol=1e-9)


class TestMLP:
    XOR_ROWS = points(2, [[0, 0], [0, 1], [1, 0], [1, 1]])
    XOR_LABELS = ["A", "B", "B", "A"]

    def test_xor_with_documented_seed(self):
        # hidden=8, lr=0.5, epochs=2000, seed=0 reaches training accuracy 1.0
        m = MLPClassifier(hidden=8, epochs=2000, lr=0.5, seed=0).fit(
            self.XOR_ROWS, self.XOR_LABELS, AB
        )
        assert m.predict(self.XOR_ROWS) == self.XOR_LABELS

    def test_gradients_match_finite_differences(self):
        rng = SplitMix64(303)
        n, d, k, hidden = 6, 3, 2, 4
        X = to_csr(random_sparse_rows(61, n, d, density=0.9))
        y = np.array([rng.next_below(k) for _ in range(n)])
        onehot = np.eye(k)[y]
        w1 = glorot_uniform(11, d, hidden)
        b1 = np.array([0.1, -0.2, 0.3, 0.05])
        w2 = glorot_uniform(12, hidden, k)
        b2 = np.array([0.01, -0.01])
        loss, g1, gb1, g2, gb2 = mlp_loss_and_grads(X, onehot, w1, b1, w2, b2)
        h = 1e-6

        def fd(param, grad, rebuild):
            worst = 0.0
            it = np.nditer(param, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                plus, minus = param.copy(), param.copy()
                plus[idx] += h
                minus[idx] -= h
                fplus = mlp_loss_and_grads(X, onehot, *rebuild(plus))[0]
                fminus = mlp_loss_and_grads(X, onehot, *rebuild(minus))[0]
                est = (fplus - fminus) / (2 * h)
                worst = max(worst, abs(est - grad[idx]) / max(abs(est), abs(grad[idx]), 1e-8))
            return worst

        assert fd(w1, g1, lambda p: (p, b1, w2, b2)) < 1e-4
        assert fd(b1, gb1, lambda p: (w1, p, w2, b2)) < 1e-4
        assert fd(w2, g2, lambda p: (w1, b1, p, b2)) < 1e-4
        assert fd(b2, gb2, lambda p: (w1, b1, w2, p)) < 1e-4

    def test_same_seed_bit_identical(self):
        rows = random_sparse_rows(62, 20, 5)
        rng = SplitMix64(8)
        labels = [AB.labels[rng.next_below(2)] for _ in range(20)]
        m1 = MLPClassifier(hidden=6, epochs=50, seed=9).fit(rows, labels, AB)
        m2 = MLPClassifier(hidden=6, epochs=50, seed=9).fit(rows, labels, AB)
        assert np.array_equal(m1.w1_, m2.w1_)
        assert np.array_equal(m1.b1_, m2.b1_)
        assert np.array_equal(m1.w2_, m2.w2_)
        assert np.array_equal(m1.b2_, m2.b2_)

    def test_glorot_bounds(self):
        w = glorot_uniform(5, 30, 10)
        s = math.sqrt(6.0 / 40)
        assert w.shape == (30, 10)
        assert np.all(np.abs(w) <= s)

    def test_probabilities_sum_to_one(self):
        rows = random_sparse_rows(63, 25, 4)
        rng = SplitMix64(9)
        labels = [ABC.labels[rng.next_below(3)] for _ in range(25)]
        m = MLPClassifier(hidden=5, epochs=30, seed=1).fit(rows, labels, ABC)
        probs = m.predict_proba(rows)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)


def oracle_best_split(dense_rows, labels, k, min_leaf):
    """Exhaustive best-Gini search with exact rational arithmetic.

    Candidates are midpoints between consecutive distinct values per
    feature; ties broken by (lower feature index, lower threshold) via the
    tuple ordering of the search key.
    """
    n = len(dense_rows)
    d = len(dense_rows[0])
    best = None
    for f in range(d):
        values = sorted(set(row[f] for row in dense_rows))
        for a, b in zip(values, values[1:]):
            thr = (a + b) / 2.0
            if thr >= b:
                continue
            left = [i for i in range(n) if dense_rows[i][f] <= thr]
            right = [i for i in range(n) if dense_rows[i][f] > thr]
            if len(left) < min_leaf or len(right) < min_leaf:
                continue

            def gini(idx):
                counts = [0] * k
                for i in idx:
                    counts[labels[i]] += 1
                m = len(idx)
                return 1 - sum(Fraction(c * c, m * m) for c in counts)

            weighted = (Fraction(len(left), n) * gini(left)
                        + Fraction(len(right), n) * gini(right))
            key = (weighted, f, thr)
            if best is None or key < best:
                best = key
    return None if best is None else (best[1], best[2])


def random_small_instance(rng, max_rows=50, max_features=6):
    n = 2 + rng.next_below(max_rows - 1)
    d = 1 + rng.next_below(max_features)
    k = 2 + rng.next_below(2)
    mode = rng.next_below(3)
    dense = []
    for _ in range(n):
        row = []
        for _ in range(d):
            if mode == 0:
                v = 0.0 if rng.next_unit() < 0.5 else float(rng.next_below(4))
            elif mode == 1:
                v = float(rng.next_below(5) - 2)
            else:
                v = round(rng.next_uniform(-1, 1), 2)
            row.append(v)
        dense.append(row)
    labels = np.array([rng.next_below(k) for _ in range(n)], dtype=np.int64)
    return dense, labels, k


def verify_tree_splits(node, fm, dense_rows, labels, k, node_idx, min_leaf):
    """Every internal split in the built tree must equal the oracle choice
    on that node's row subset."""
    if node.is_leaf:
        return
    sub_dense = [dense_rows[i] for i in node_idx]
    sub_labels = labels[node_idx]
    want = oracle_best_split(sub_dense, sub_labels, k, min_leaf)
    assert (node.feature, node.threshold) == want
    values = np.array([dense_rows[i][node.feature] for i in node_idx])
    left = node_idx[values <= node.threshold]
    right = node_idx[values > node.threshold]
    verify_tree_splits(node.left, fm, dense_rows, labels, k, left, min_leaf)
    verify_tree_splits(node.right, fm, dense_rows, labels, k, right, min_leaf)


class TestDecisionTree:
    def test_pure_node_is_single_leaf(self):
        m = DecisionTree().fit(points(2, [[0, 1], [1, 0], [2, 2]]), ["A", "A", "A"],
                               AB)
        assert m.root_.is_leaf

    def test_xor_needs_depth_two(self):
        rows = points(2, [[0, 0], [0, 1], [1, 0], [1, 1]])
        labels = ["A", "B", "B", "A"]
        deep = DecisionTree(max_depth=2).fit(rows, labels, AB)
        assert deep.predict(rows) == labels
        shallow = DecisionTree(max_depth=1).fit(rows, labels, AB)
        assert shallow.predict(rows) != labels

    def test_root_split_matches_bruteforce_on_random_integers(self):
        rng = SplitMix64(404)
        dense, labels, k = random_small_instance(rng, max_rows=40, max_features=5)
        space = LabelSpace(labels=tuple("ABC"[:k]))
        rows = [SparseVector.from_dict(len(dense[0]),
                                       {j: v for j, v in enumerate(r) if v != 0.0})
                for r in dense]
        m = DecisionTree().fit(rows, [space.labels[l] for l in labels], space)
        if not m.root_.is_leaf:
            want = oracle_best_split(dense, labels, k, 1)
            assert (m.root_.feature, m.root_.threshold) == want

    def test_every_split_matches_oracle(self):
        rng = SplitMix64(405)
        for _ in range(10):
            dense, labels, k = random_small_instance(rng)
            space = LabelSpace(labels=tuple("ABC"[:k]))
            min_leaf = 1 + rng.next_below(2)
            rows = [SparseVector.from_dict(len(dense[0]),
                                           {j: v for j, v in enumerate(r) if v != 0.0})
                    for r in dense]
            m = DecisionTree(min_samples_leaf=min_leaf).fit(
                rows, [space.labels[l] for l in labels], space
            )
            fm = FeatureMatrix(rows)
            verify_tree_splits(m.root_, fm, dense, labels, k,
                               np.arange(len(rows), dtype=np.int64), min_leaf)

    def test_min_samples_leaf_respected(self):
        rng = SplitMix64(406)
        rows = random_sparse_rows(71, 30, 4, integer=True)
        labels = [AB.labels[rng.next_below(2)] for _ in range(30)]
        m = DecisionTree(min_samples_leaf=5).fit(rows, labels, AB)

        def check(node, idx):
            if node.is_leaf:
                assert len(idx) >= 5
                return
            values = np.array([rows[i].to_dict().get(node.feature, 0.0) for i in idx])
            check(node.left, idx[values <= node.threshold])
            check(node.right, idx[values > node.threshold])

        check(m.root_, np.arange(30))

    def test_leaf_scores_are_class_frequencies(self):
        rows = points(1, [[0], [0], [5]])
        m = DecisionTree(max_depth=0).fit(rows, ["A", "A", "B"], AB)
        assert m.root_.is_leaf
        assert m.root_.scores == pytest.approx([2 / 3, 1 / 3])


class TestRandomForest:
    def test_degenerate_forest_equals_tree(self):
        rng = SplitMix64(505)
        rows = random_sparse_rows(81, 50, 6, integer=True)
        labels = [ABC.labels[rng.next_below(3)] for _ in range(50)]
        forest = RandomForest(n_trees=1, bootstrap=False, max_features=None,
                              seed=3).fit(rows, labels, ABC)
        tree = DecisionTree().fit(rows, labels, ABC)
        queries = random_sparse_rows(82, 100, 6, integer=True)
        assert forest.predict(queries) == tree.predict(queries)

    def test_same_seed_identical_forests(self, tmp_path):
        from stylo.classifiers import persist_model

        rng = SplitMix64(506)
        rows = random_sparse_rows(83, 40, 5)
        labels = [AB.labels[rng.next_below(2)] for _ in range(40)]
        m1 = RandomForest(n_trees=8, seed=12).fit(rows, labels, AB)
        m2 = RandomForest(n_trees=8, seed=12).fit(rows, labels, AB)
        p1, p2 = tmp_path / "f1.bin", tmp_path / "f2.bin"
        persist_model(m1, p1)
        persist_model(m2, p2)
        # byte-identical apart from the training-time field; compare predictions
        m1.training_time_ = m2.training_time_ = 0.0
        persist_model(m1, p1)
        persist_model(m2, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_different_seed_differs(self):
        rng = SplitMix64(507)
        rows = random_sparse_rows(84, 40, 5)
        labels = [AB.labels[rng.next_below(2)] for _ in range(40)]
        m1 = RandomForest(n_trees=5, seed=1).fit(rows, labels, AB)
        m2 = RandomForest(n_trees=5, seed=2).fit(rows, labels, AB)
        queries = random_sparse_rows(85, 60, 5)
        assert m1.predict(queries) != m2.predict(queries)

    def test_forest_beats_or_matches_single_tree_on_noisy_data(self):
        # ensembling should not lose to one tree on held-out noisy data
        rng = SplitMix64(508)
        def make(n, seed):
            rows = random_sparse_rows(seed, n, 8)
            labels = []
            for r in rows:
                signal = sum(v for i, v in r.entries if i < 4)
                noise = rng.next_uniform(-1.5, 1.5)
                labels.append("A" if signal + noise > 0 else "B")
            return rows, labels
        train_rows, train_labels = make(200, 86)
        test_rows, test_labels = make(100, 87)
        tree_acc, forest_acc = [], []
        for seed in range(5):
            forest = RandomForest(n_trees=30, seed=seed).fit(train_rows, train_labels, AB)
            tree = DecisionTree().fit(train_rows, train_labels, AB)
            forest_acc.append(np.mean([p == t for p, t in zip(forest.predict(test_rows), test_labels)]))
            tree_acc.append(np.mean([p == t for p, t in zip(tree.predict(test_rows), test_labels)]))
        assert np.mean(forest_acc) >= np.mean(tree_acc)


class TestGradientBoosting:
    def test_separable_1d_ten_stages(self):
        rows = points(1, [[-2], [-1], [1], [2]])
        labels = ["A", "A", "B", "B"]
        m = GradientBoosting(n_stages=10).fit(rows, labels, AB)
        assert m.predict(rows) == labels

    def test_loss_trace_non_increasing(self):
        rng = SplitMix64(606)
        rows = random_sparse_rows(91, 80, 6, integer=True)
        labels = ["A" if sum(v for i, v in r.entries if i < 3) >
                  sum(v for i, v in r.entries if i >= 3) else "B" for r in rows]
        if len(set(labels)) < 2:
            labels[0] = "A" if labels[0] == "B" else "B"
        m = GradientBoosting(n_stages=30).fit(rows, labels, AB)
        trace = m.train_loss_trace_
        assert len(trace) == 31
        for before, after in zip(trace, trace[1:]):
            assert after <= before + 1e-9

    def test_zero_stages_forbidden(self):
        with pytest.raises(DataError, match="n_stages"):
            GradientBoosting(n_stages=0).fit(points(1, [[0], [1]]), ["A", "B"], AB)

    def test_single_stump_hand_computation(self):
        # 4 points, depth-1, one stage: residuals +-0.5, Newton denominator
        # sum(|r|(1-|r|)) = 0.5, so leaf = lr * (+-1.0)/0.5 = +-0.2
        rows = points(1, [[0], [0], [1], [1]])
        labels = ["A", "A", "B", "B"]
        m = GradientBoosting(n_stages=1, max_depth=1, learning_rate=0.1).fit(rows, labels, AB)
        stump_a, stump_b = m.stages_[0]
        assert stump_a.threshold == 0.5
        assert stump_a.left.scores[0] == pytest.approx(0.2, abs=1e-15)
        assert stump_a.right.scores[0] == pytest.approx(-0.2, abs=1e-15)
        assert stump_b.left.scores[0] == pytest.approx(-0.2, abs=1e-15)
        assert stump_b.right.scores[0] == pytest.approx(0.2, abs=1e-15)
        # P(A | x=0) = sigmoid(0.4) since both classes started at log(1/2)
        proba = m.predict_proba([rows[0]])
        assert proba[0][0] == pytest.approx(1.0 / (1.0 + math.exp(-0.4)), abs=1e-12)

    def test_probabilities_sum_to_one(self):
        rng = SplitMix64(607)
        rows = random_sparse_rows(92, 40, 5)
        labels = [ABC.labels[rng.next_below(3)] for _ in range(40)]
        m = GradientBoosting(n_stages=5).fit(rows, labels, ABC)
        probs = m.predict_proba(rows)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)

    def test_learning_rate_bounds(self):
        with pytest.raises(DataError, match="learning_rate"):
            GradientBoosting(learning_rate=0.0).fit(points(1, [[0], [1]]), ["A", "B"], AB)
        with pytest.raises(DataError, match="learning_rate"):
            GradientBoosting(learning_rate=1.5).fit(points(1, [[0], [1]]), ["A", "B"], AB)


@pytest.fixture(scope="module")
def setup():
    rng = SplitMix64(707)
    rows = random_sparse_rows(95, 40, 6)
    labels = [AB.labels[rng.next_below(2)] for _ in range(40)]
    queries = random_sparse_rows(96, 20, 6)
    return rows, labels, queries


class TestUniformContract:
    KINDS = {
        "majority": {},
        "knn": {"k": 3},
        "logreg": {"epochs": 20},
        "linsvm": {"epochs": 20},
        "mlp": {"hidden": 4, "epochs": 20, "seed": 5},
        "dtree": {},
        "rforest": {"n_trees": 5, "seed": 5},
        "gboost": {"n_stages": 3},
    }

    @pytest.mark.parametrize("kind", list(KINDS))
    def test_batch_equals_per_row(self, kind, setup):
        rows, labels, queries = setup
        model = train(kind, rows, labels, AB, **self.KINDS[kind])
        batch = predict(model, queries)
        single = [predict(model, [q])[0] for q in queries]
        assert batch == single

    @pytest.mark.parametrize("kind", list(KINDS))
    def test_training_rows_stable(self, kind, setup):
        rows, labels, queries = setup
        model = train(kind, rows, labels, AB, **self.KINDS[kind])
        assert predict(model, rows) == predict(model, rows)

    @pytest.mark.parametrize("kind", list(KINDS))
    def test_dimension_mismatch_rejected(self, kind, setup):
        rows, labels, _ = setup
        model = train(kind, rows, labels, AB, **self.KINDS[kind])
        with pytest.raises(DataError, match="dimension"):
            predict(model, [SparseVector(dimension=3)])

    @pytest.mark.parametrize("kind", list(KINDS))
    def test_training_time_recorded(self, kind, setup):
        rows, labels, _ = setup
        model = train(kind, rows, labels, AB, **self.KINDS[kind])
        assert model.training_time_ >= 0.0

    def test_empty_predict(self, setup):
        rows, labels, _ = setup
        model = train("majority", rows, labels, AB)
        assert predict(model, []) == []


class TestTrainingMatrix:
    def test_length_mismatch(self):
        with pytest.raises(DataError, match="labels"):
            TrainingMatrix(rows=points(1, [[1]]), labels=[0, 1], label_space=AB)

    def test_mixed_dimensions(self):
        rows = [SparseVector(dimension=2), SparseVector(dimension=3)]
        with pytest.raises(DataError, match="dimension"):
            TrainingMatrix(rows=rows, labels=[0, 1], label_space=AB)

    def test_label_index_out_of_range(self):
        with pytest.raises(DataError, match="out of range"):
            TrainingMatrix(rows=points(1, [[1]]), labels=[7], label_space=AB)

    def test_from_labels_infers_space_in_first_appearance_order(self):
        m = TrainingMatrix.from_labels(points(1, [[1], [2], [3]]), ["z", "a", "z"])
        assert m.label_space.labels == ("z", "a")
        assert m.labels == [0, 1, 0]
