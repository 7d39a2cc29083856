import json

import numpy as np
import pytest

from conftest import qs
from fiscalshock import _core
from fiscalshock.exceptions import ConfigError, ConvergenceError, DataError
from fiscalshock.series import build_lag_matrix
from fiscalshock.svr import (HyperGrid, KernelSpec, SvrModel, TrainingSet, chronological_folds,
                             extract_svr_shocks, gram, kernel_eval, load_model, save_model,
                             svr_predict, svr_search, svr_train)
from oracles import kernel_sum, svr_dual_oracle

TIGHT = 1e-9


def oracle_instance(seed):
    """Small seeded problem with a kernel, C and epsilon drawn per seed."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(8, 31))
    X = rng.standard_normal((n, 2))
    y = np.sin(2.0 * X[:, 0]) + 0.5 * X[:, 1] ** 2 + 0.1 * rng.standard_normal(n)
    kind = ("rbf", "linear", "polynomial")[seed % 3]
    kernel = KernelSpec(kind, gamma=0.5, r_offset=1.0, degree=2)
    C = float(rng.choice([0.5, 2.0, 10.0]))
    eps = float(rng.choice([0.01, 0.1, 0.3]))
    return TrainingSet.from_arrays(X, y), kernel, C, eps


def oracle_gap(seed):
    D, kernel, C, eps = oracle_instance(seed)
    m = svr_train(D, C, eps, kernel, tol=TIGHT)
    ref, _ = svr_dual_oracle(gram(kernel, D.inputs, D.inputs), D.targets, C, eps)
    return abs(m.diagnostics["dual_objective"] - ref), m


class TestKernels:
    def test_rbf_self_is_one(self):
        x = np.array([0.3, -1.2, 7.0])
        assert kernel_eval(KernelSpec("rbf", gamma=3.7), x, x) == 1.0

    def test_linear_orthogonal(self):
        assert kernel_eval(KernelSpec("linear"), [1.0, 0.0], [0.0, 5.0]) == 0.0

    def test_polynomial_hand_value(self):
        k = KernelSpec("polynomial", gamma=1.0, r_offset=1.0, degree=2)
        assert kernel_eval(k, [1.0, 0.0], [1.0, 1.0]) == 4.0

    def test_gram_matches_pairwise(self, rng):
        A, B = rng.standard_normal((4, 3)), rng.standard_normal((5, 3))
        for kind in ("linear", "rbf", "polynomial", "sigmoid"):
            k = KernelSpec(kind, gamma=0.4, r_offset=0.5, degree=3)
            ref = [[kernel_eval(k, a, b) for b in B] for a in A]
            np.testing.assert_allclose(gram(k, A, B), ref, rtol=1e-12, atol=1e-14)

    def test_invalid_specs(self):
        with pytest.raises(ConfigError):
            KernelSpec("laplace")
        with pytest.raises(ConfigError):
            KernelSpec("rbf", gamma=0.0)
        with pytest.raises(ConfigError):
            KernelSpec("polynomial", degree=0)
        with pytest.raises(DataError):
            kernel_eval(KernelSpec("linear"), [1.0], [1.0, 2.0])


class TestTraining:
    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_dual_objective_matches_oracle(self, backend, seed):
        gap, _ = oracle_gap(seed)
        assert gap < 1e-6

    def test_rbf_n20_oracle(self, backend):
        rng = np.random.default_rng(20)
        X = rng.uniform(-2, 2, (20, 1))
        y = np.sin(2 * X[:, 0]) + 0.05 * rng.standard_normal(20)
        D = TrainingSet.from_arrays(X, y)
        k = KernelSpec("rbf", gamma=1.0)
        m = svr_train(D, 5.0, 0.05, k, tol=TIGHT)
        ref, _ = svr_dual_oracle(gram(k, D.inputs, D.inputs), D.targets, 5.0, 0.05)
        assert abs(m.diagnostics["dual_objective"] - ref) < 1e-6

    def test_noiseless_line(self, backend):
        x = np.arange(1.0, 41.0)
        m = svr_train(TrainingSet.from_arrays(x, 2.0 * x), 100.0, 0.1, KernelSpec("linear"), tol=TIGHT)
        pred = m.predict(x[:, None])
        assert np.max(np.abs(pred - 2.0 * x)) <= 0.1 + 1e-6
        slope, _ = m.linear_coef()
        assert abs(slope[0] - 2.0) < 0.01
        # flattest line inside the tube: slope 2 - eps / half-range
        assert slope[0] == pytest.approx(2.0 - 0.1 / 19.5, abs=1e-8)

    def test_wide_tube_has_no_support_vectors(self, backend):
        x = np.linspace(0, 1, 15)
        y = 0.3 * x
        m = svr_train(TrainingSet.from_arrays(x, y), 1.0, 1.0, KernelSpec("rbf"))
        assert m.dual_weights.size == 0
        assert m.diagnostics["dual_objective"] == 0.0
        np.testing.assert_array_equal(m.predict(x[:, None]), m.bias)
        assert svr_predict(m, np.array([12.0])) == m.bias

    def test_feasibility_and_complementarity(self, backend):
        rng = np.random.default_rng(200)
        X = rng.standard_normal((200, 3))
        y = np.tanh(X[:, 0]) + 0.3 * X[:, 1] * X[:, 2] + 0.2 * rng.standard_normal(200)
        D = TrainingSet.from_arrays(X, y)
        C, eps, tol = 3.0, 0.1, 1e-3
        m = svr_train(D, C, eps, KernelSpec("rbf", gamma=0.3), tol=tol)
        assert m.diagnostics["converged"] and m.diagnostics["kkt_violation"] <= tol
        w = np.zeros(200)
        idx = [int(np.flatnonzero((D.inputs == sv).all(1))[0]) for sv in m.support_vectors]
        w[idx] = m.dual_weights
        assert abs(w.sum()) < 1e-8
        assert np.all(np.abs(w) <= C + 1e-12)
        r = y - m.predict(X)
        inside = np.abs(w) < C
        assert np.all(np.abs(r[inside]) <= eps + tol)
        outside = np.abs(r) > eps + tol
        assert np.all(np.abs(np.abs(w[outside]) - C) <= tol)

    def test_free_support_vector_on_tube_edge(self, backend):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((40, 2))
        y = X[:, 0] - X[:, 1] ** 2 + 0.2 * rng.standard_normal(40)
        m = svr_train(TrainingSet.from_arrays(X, y), 2.0, 0.1, KernelSpec("rbf", gamma=0.5), tol=TIGHT)
        free = np.flatnonzero((np.abs(m.dual_weights) > 1e-8) & (np.abs(m.dual_weights) < 2.0 - 1e-8))
        assert free.size > 0
        raw = m.support_vectors * m.std + m.mean
        for j in free:
            i = int(np.flatnonzero(np.all(np.isclose(X, raw[j], rtol=1e-12, atol=1e-12), axis=1))[0])
            assert abs(svr_predict(m, X[i]) - y[i]) <= 0.1 + 1e-6

    def test_trace_is_nondecreasing(self, backend):
        D, kernel, C, eps = oracle_instance(7)
        m = svr_train(D, C, eps, kernel, tol=TIGHT, record_trace=True)
        tr = m.diagnostics["trace"]
        assert tr.size > 1
        assert np.all(np.diff(tr) >= -1e-12 * max(1.0, np.abs(tr).max()))

    def test_permutation_invariance(self, backend):
        rng = np.random.default_rng(9)
        X = rng.standard_normal((50, 2))
        y = np.sin(X[:, 0]) + 0.1 * rng.standard_normal(50)
        k = KernelSpec("rbf", gamma=0.5)
        perm = rng.permutation(50)
        a = svr_train(TrainingSet.from_arrays(X, y), 1.0, 0.05, k, tol=TIGHT)
        b = svr_train(TrainingSet.from_arrays(X[perm], y[perm]), 1.0, 0.05, k, tol=TIGHT)
        grid = rng.uniform(-3, 3, (200, 2))
        assert np.max(np.abs(a.predict(grid) - b.predict(grid))) < 1e-6

    def test_prediction_is_kernel_expansion(self, rng):
        X = rng.standard_normal((30, 2))
        y = X[:, 0] ** 2 + 0.1 * rng.standard_normal(30)
        k = KernelSpec("rbf", gamma=0.7)
        m = svr_train(TrainingSet.from_arrays(X, y), 1.0, 0.05, k)
        x = np.array([0.2, -0.4])
        z = m.standardize(x)[0]
        ref = kernel_sum(lambda a, b: kernel_eval(k, a, b), m.support_vectors, m.dual_weights, m.bias, z)
        assert svr_predict(m, x) == pytest.approx(ref, abs=1e-12)

    def test_nonconvergence_carries_best_so_far(self, rng):
        X = rng.standard_normal((60, 2))
        y = rng.standard_normal(60)
        with pytest.raises(ConvergenceError) as info:
            svr_train(TrainingSet.from_arrays(X, y), 10.0, 0.01, KernelSpec("rbf"), tol=1e-12, max_iter=3)
        diag = info.value.diagnostics
        assert diag["iterations"] == 3 and not diag["converged"]
        assert isinstance(diag["model"], SvrModel)

    def test_sigmoid_flags_indefinite_gram(self, rng):
        X = rng.standard_normal((40, 3))
        m = svr_train(TrainingSet.from_arrays(X, X[:, 0]), 1.0, 0.1,
                      KernelSpec("sigmoid", gamma=2.0, r_offset=-1.0), max_iter=200_000)
        assert m.diagnostics["non_psd"]
        m = svr_train(TrainingSet.from_arrays(X, X[:, 0]), 1.0, 0.1, KernelSpec("rbf"))
        assert not m.diagnostics["non_psd"]

    def test_hyperparameter_errors(self, rng):
        D = TrainingSet.from_arrays(rng.standard_normal((10, 1)), rng.standard_normal(10))
        for kw in ({"C": 0.0, "epsilon": 0.1}, {"C": 1.0, "epsilon": -0.1}):
            with pytest.raises(ConfigError):
                svr_train(D, kernel=KernelSpec("linear"), **kw)
        with pytest.raises(ConfigError):
            svr_train(D, 1.0, 0.1, KernelSpec("linear"), tol=0.0)
        with pytest.raises(DataError):
            TrainingSet.from_arrays(np.ones((3, 1)), np.ones(4))
        with pytest.raises(DataError):
            TrainingSet.from_arrays([[np.inf]], [1.0])

    def test_constant_feature_dropped(self, rng):
        X = np.column_stack([rng.standard_normal(30), np.full(30, 4.0)])
        D = TrainingSet.from_arrays(X, X[:, 0])
        assert D.inputs.shape == (30, 1) and list(D.keep) == [True, False]
        m = svr_train(D, 10.0, 0.01, KernelSpec("linear"))
        slope, _ = m.linear_coef()
        assert slope[1] == 0.0


def test_backends_agree():
    mods = _core.backends()
    if len(mods) < 2:
        pytest.skip("compiled kernels not built")
    D, kernel, C, eps = oracle_instance(11)
    K = np.ascontiguousarray(gram(kernel, D.inputs, D.inputs))
    outs = [m.smo_solve(K, D.targets, C, eps, 1e-6, 10**6, False) for m in mods.values()]
    np.testing.assert_allclose(outs[0][0], outs[1][0], rtol=1e-10, atol=1e-12)
    assert outs[0][2] == outs[1][2]


def test_model_roundtrip(tmp_path, rng):
    X = rng.standard_normal((25, 2))
    m = svr_train(TrainingSet.from_arrays(X, X[:, 0] * X[:, 1]), 1.0, 0.05, KernelSpec("polynomial"))
    path = tmp_path / "sub" / "model.json"
    save_model(m, path)
    back = load_model(path)
    grid = rng.standard_normal((10, 2))
    np.testing.assert_array_equal(back.predict(grid), m.predict(grid))
    d = json.loads(path.read_text())
    d["format_version"] = 99
    with pytest.raises(DataError):
        SvrModel.from_dict(d)


class TestExtraction:
    def test_folds(self):
        folds = chronological_folds(23, 5)
        assert np.array_equal(np.concatenate(folds), np.arange(23))
        assert all(np.all(np.diff(f) == 1) for f in folds)
        with pytest.raises(DataError):
            chronological_folds(9, 5)

    def test_grid(self):
        g = HyperGrid()
        cands = list(g.candidates(2.0, 4))
        assert len(cands) == 4 * 3 + 4 * 3 * 3
        assert {round(c[0].gamma, 6) for c in cands if c[0].kind == "rbf"} == {0.0025, 0.025, 0.25}
        with pytest.raises(ConfigError):
            HyperGrid(folds=1)
        with pytest.raises(ConfigError):
            HyperGrid(kernels=("laplace",))

    def test_exact_linear_target(self):
        rng = np.random.default_rng(31)
        X = rng.standard_normal((100, 2))
        y = 1.5 * X[:, 0] - 0.7 * X[:, 1] + 0.2
        ex = svr_search(y, X, HyperGrid(kernels=("linear",)))
        assert np.max(np.abs(ex.residuals.values)) <= ex.epsilon + 1e-3

    def test_noise_recovery(self):
        rng = np.random.default_rng(200)
        z = qs(np.cumsum(rng.standard_normal(204)), "z")
        lm = build_lag_matrix([z], 4, False)
        noise = 0.5 * rng.standard_normal(200)
        y = lm.data @ np.array([0.5, -0.3, 0.2, 0.1]) + noise
        shocks = extract_svr_shocks(y, lm)
        assert shocks.first == lm.sample_start
        assert np.corrcoef(shocks.values, noise)[0, 1] >= 0.9

    def test_constant_target(self, rng):
        X = rng.standard_normal((40, 2))
        res = extract_svr_shocks(np.full(40, 3.25), X, HyperGrid(C=(1.0,), gamma_scale=(0.1,)))
        np.testing.assert_array_equal(res.values, 0.0)
