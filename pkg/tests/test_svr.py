import math

import numpy as np
import pytest
from qp_oracle import dual_objective as oracle_objective
from qp_oracle import kernel_matrix, kkt_violation, solve_dual

from mixsent.corpus import SentimentLabel
from mixsent.features import FeatureVector
from mixsent.svr import (
    SvrHyperParams,
    SvrModel,
    decode_label,
    encode_label,
    fit,
    kernel_eval,
    predict,
)


def dense(*values):
    return FeatureVector.from_dense(list(values))


def params(**kw):
    defaults = dict(c=10.0, epsilon=0.1, gamma=1.0, kernel="linear")
    defaults.update(kw)
    return SvrHyperParams(**defaults)


def beta_of(model: SvrModel, n: int) -> np.ndarray:
    beta = np.zeros(n)
    for idx, coef in zip(model.support_indices, model.dual_coef):
        beta[idx] = coef
    return beta


class TestHyperParams:
    @pytest.mark.parametrize(
        "kw",
        [
            dict(c=0.0),
            dict(c=-1.0),
            dict(epsilon=-0.1),
            dict(gamma=0.0),
            dict(kernel="poly"),
            dict(tol=0.0),
            dict(cache_size_mb=0),
        ],
    )
    def test_validation(self, kw):
        with pytest.raises(ValueError):
            params(**kw)

    def test_inert_fields_stored(self):
        p = params()
        assert p.coef0 == 0.1 and p.shrinking and not p.probability
        assert p.decision_function_shape == "ovr" and p.degree == 3


class TestKernel:
    def test_rbf_same_point(self):
        p = params(kernel="rbf", gamma=2.0)
        x = dense(0.3, -0.7)
        assert kernel_eval(p, x, x) == 1.0

    def test_linear_orthogonal(self):
        p = params(kernel="linear")
        assert kernel_eval(p, dense(1.0, 0.0), dense(0.0, 1.0)) == 0.0

    def test_rbf_hand_computed(self):
        p = params(kernel="rbf", gamma=0.5)
        # ||x - z||^2 = 2
        value = kernel_eval(p, dense(1.0, 0.0), dense(0.0, 1.0))
        assert value == pytest.approx(math.exp(-1.0), abs=1e-12)

    def test_dimension_mismatch(self):
        p = params(kernel="rbf")
        with pytest.raises(ValueError):
            kernel_eval(p, dense(1.0), dense(1.0, 2.0))


class TestFitAnalytic:
    def test_two_point_linear_case(self):
        X = [dense(0.0), dense(1.0)]
        model = fit(params(c=10.0, epsilon=0.1), X, [0.0, 1.0])
        assert model.converged
        assert predict(model, dense(0.0)) == pytest.approx(0.1, abs=1e-4)
        assert predict(model, dense(1.0)) == pytest.approx(0.9, abs=1e-4)
        assert predict(model, dense(0.5)) == pytest.approx(0.5, abs=1e-4)
        # effective slope 0.8, bias 0.1
        slope = predict(model, dense(1.0)) - predict(model, dense(0.0))
        assert slope == pytest.approx(0.8, abs=1e-4)
        assert model.bias == pytest.approx(0.1, abs=1e-4)

    def test_single_point_inside_tube(self):
        for c in (0.5, 10.0, 1e4):
            model = fit(params(c=c, epsilon=0.1), [dense(2.0)], [0.5])
            assert len(model.support_vectors) == 0
            assert abs(predict(model, dense(2.0)) - 0.5) <= 0.1

    def test_antisymmetric_pair_rbf(self):
        X = [dense(1.0), dense(-1.0)]
        model = fit(params(kernel="rbf", gamma=0.5, epsilon=0.1), X, [-0.7, 0.7])
        assert predict(model, dense(0.0)) == pytest.approx(0.0, abs=1e-9)

    def test_zero_coef_model_predicts_bias(self):
        model = SvrModel(
            params=params(),
            support_vectors=(),
            dual_coef=(),
            bias=0.37,
            n_iterations=0,
            converged=True,
            support_indices=(),
            dual_objective=0.0,
        )
        assert predict(model, dense(123.0)) == 0.37


def random_dataset(rng, n, d):
    pts = rng.uniform(-1.5, 1.5, size=(n, d))
    y = rng.uniform(-2.0, 2.0, size=n)
    return pts, y


class TestFitAgainstOracle:
    def test_objective_matches_enumeration(self):
        rng = np.random.Generator(np.random.Philox(11))
        for trial in range(24):
            n = trial % 6 + 1
            d = trial % 3 + 1
            pts, y = random_dataset(rng, n, d)
            c = (0.5, 10.0)[trial % 2]
            eps = (0.0, 0.1)[(trial // 2) % 2]
            kernel = ("linear", "rbf")[(trial // 4) % 2]
            gamma = 0.8
            K = kernel_matrix(pts, kernel, gamma)
            want, _ = solve_dual(K, y, c, eps)

            p = SvrHyperParams(c=c, epsilon=eps, gamma=gamma, kernel=kernel, tol=1e-10)
            model = fit(p, [dense(*row) for row in pts], y)
            beta = beta_of(model, n)
            got = oracle_objective(K, y, eps, beta)
            assert got == pytest.approx(want, abs=1e-6), (trial, n, c, eps, kernel)
            assert kkt_violation(K, y, c, eps, beta) <= 1e-3


class TestFitInvariants:
    def fits(self):
        rng = np.random.Generator(np.random.Philox(23))
        cases = []
        for trial in range(12):
            n = rng.integers(2, 9)
            d = rng.integers(1, 4)
            pts, y = random_dataset(rng, n, d)
            c = float(rng.uniform(0.2, 20.0))
            eps = float(rng.uniform(0.0, 0.3))
            kernel = ("linear", "rbf")[trial % 2]
            p = SvrHyperParams(c=c, epsilon=eps, gamma=0.6, kernel=kernel)
            model = fit(p, [dense(*row) for row in pts], y)
            cases.append((p, pts, y, model))
        return cases

    def test_dual_feasibility(self):
        for p, pts, y, model in self.fits():
            beta = beta_of(model, len(y))
            assert abs(beta.sum()) <= 1e-8 * p.c
            assert np.all(np.abs(beta) <= p.c + 1e-12)

    def test_kkt_at_default_tol(self):
        for p, pts, y, model in self.fits():
            assert model.converged
            K = kernel_matrix(pts, p.kernel, p.gamma)
            assert kkt_violation(K, y, p.c, p.epsilon, beta_of(model, len(y))) <= p.tol

    def test_stored_objective_matches_recomputation(self):
        for p, pts, y, model in self.fits():
            K = kernel_matrix(pts, p.kernel, p.gamma)
            recomputed = oracle_objective(K, y, p.epsilon, beta_of(model, len(y)))
            assert model.dual_objective == pytest.approx(recomputed, abs=1e-9)

    def test_free_support_vector_prediction_within_tube(self):
        for p, pts, y, model in self.fits():
            beta = beta_of(model, len(y))
            for idx in model.support_indices:
                if abs(beta[idx]) < p.c - 1e-9:
                    got = predict(model, dense(*pts[idx]))
                    assert abs(got - y[idx]) <= p.epsilon + p.tol + 1e-9

    def test_deterministic(self):
        rng = np.random.Generator(np.random.Philox(5))
        pts, y = random_dataset(rng, 7, 2)
        X = [dense(*row) for row in pts]
        p = params(kernel="rbf", gamma=0.5, c=3.0)
        a = fit(p, X, y)
        b = fit(p, X, y)
        assert a.dual_coef == b.dual_coef
        assert a.bias == b.bias
        assert a.n_iterations == b.n_iterations


class TestEpsilonMonotonicity:
    def test_support_count_never_grows_with_epsilon(self):
        rng = np.random.Generator(np.random.Philox(31))
        for kernel in ("linear", "rbf"):
            for _ in range(4):
                pts, y = random_dataset(rng, 6, 2)
                X = [dense(*row) for row in pts]
                counts = []
                for eps in (0.0, 0.05, 0.1, 0.2, 0.5, 1.0):
                    p = SvrHyperParams(c=5.0, epsilon=eps, gamma=0.7, kernel=kernel)
                    counts.append(len(fit(p, X, y).support_vectors))
                assert counts == sorted(counts, reverse=True), (kernel, counts)


class TestScaleProperty:
    def test_linear_kernel_scales_with_targets_and_epsilon(self):
        # Interpolatable data (3 points, 3 degrees of freedom) keeps the
        # box constraint slack at large C, the regime where the property
        # holds without also rescaling C.
        rng = np.random.Generator(np.random.Philox(41))
        pts, y = random_dataset(rng, 3, 2)
        X = [dense(*row) for row in pts]
        for s in (0.5, 2.0, 10.0):
            # the KKT gap lives on the scale of the targets, so the scaled
            # problem gets a proportionally scaled tolerance
            base = fit(
                SvrHyperParams(c=1e5, epsilon=0.1, gamma=1.0, kernel="linear", tol=1e-10),
                X,
                y,
            )
            scaled = fit(
                SvrHyperParams(
                    c=1e5, epsilon=0.1 * s, gamma=1.0, kernel="linear", tol=1e-10 * s
                ),
                X,
                [v * s for v in y],
            )
            assert max((abs(b) for b in base.dual_coef), default=0.0) < 1e4
            assert max((abs(b) for b in scaled.dual_coef), default=0.0) < 1e4
            for probe in (dense(0.0, 0.0), dense(1.0, -1.0), dense(0.3, 0.9)):
                lhs = predict(scaled, probe)
                rhs = s * predict(base, probe)
                assert lhs == pytest.approx(rhs, rel=1e-6, abs=1e-9)


class TestLabelCodec:
    def test_encode(self):
        assert encode_label(SentimentLabel.NEGATIVE) == -1.0
        assert encode_label(SentimentLabel.NEUTRAL) == 0.0
        assert encode_label(SentimentLabel.POSITIVE) == 1.0

    def test_round_trip(self):
        for label in SentimentLabel:
            assert decode_label(encode_label(label)) is label

    def test_nearest_value(self):
        assert decode_label(-0.9) is SentimentLabel.NEGATIVE
        assert decode_label(0.49) is SentimentLabel.NEUTRAL
        assert decode_label(0.51) is SentimentLabel.POSITIVE
        assert decode_label(7.0) is SentimentLabel.POSITIVE

    def test_midpoints_break_toward_neutral(self):
        assert decode_label(0.5) is SentimentLabel.NEUTRAL
        assert decode_label(-0.5) is SentimentLabel.NEUTRAL

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            decode_label(float("nan"))
        with pytest.raises(ValueError):
            decode_label(float("inf"))


class TestFitErrors:
    def test_empty_and_mismatched_inputs(self):
        with pytest.raises(ValueError):
            fit(params(), [], [])
        with pytest.raises(ValueError):
            fit(params(), [dense(1.0)], [1.0, 2.0])

    def test_non_finite_targets(self):
        with pytest.raises(ValueError):
            fit(params(), [dense(1.0)], [float("nan")])

    def test_inconsistent_dimensions(self):
        with pytest.raises(ValueError):
            fit(params(), [dense(1.0), dense(1.0, 2.0)], [0.0, 1.0])

    def test_predict_dimension_mismatch(self):
        model = fit(params(), [dense(0.0), dense(1.0)], [0.0, 1.0])
        with pytest.raises(ValueError):
            predict(model, dense(1.0, 2.0))

    def test_iteration_cap_returns_unconverged_model(self):
        rng = np.random.Generator(np.random.Philox(9))
        pts, y = random_dataset(rng, 8, 2)
        p = SvrHyperParams(c=100.0, epsilon=0.0, gamma=1.0, kernel="rbf", max_iter=1)
        model = fit(p, [dense(*row) for row in pts], y)
        assert not model.converged
        assert model.n_iterations == 1
