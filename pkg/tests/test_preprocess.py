import numpy as np
import pytest

from qksvm.errors import ConfigurationError, DimensionError, LoadError
from qksvm.preprocess import (
    FEATURES,
    LabeledDataset,
    PipelineConfig,
    RawRecord,
    ScalerState,
    apply_scalers,
    fit_minmax,
    fit_standardize,
    load_csv,
    n_test_samples,
    random_oversample,
    run_pipeline,
    to_labeled,
    train_test_split,
    write_split_csv,
)

HEADER = "id,diagnosis_result," + ",".join(FEATURES)


def write_rows(path, rows, header=HEADER):
    path.write_text("\n".join([header, *rows]) + "\n")
    return path


def row(i, code="M", base=1.0):
    return f"{i},{code}," + ",".join(str(base + j) for j in range(8))


class TestLoad:
    def test_proxy(self, proxy_csv):
        recs = load_csv(proxy_csv)
        assert len(recs) == 100
        assert sum(r.diagnosis == "M" for r in recs) == 62
        assert all(len(r.features) == 8 for r in recs)

    def test_bad_code_names_row(self, tmp_path):
        rows = [row(i) for i in range(1, 7)] + [row(7, "X")]
        with pytest.raises(LoadError, match=r"row 7.*diagnosis_result"):
            load_csv(write_rows(tmp_path / "d.csv", rows))

    def test_bad_number_names_column(self, tmp_path):
        rows = [row(1), "2,B,1,2,abc,4,5,6,7,8"]
        with pytest.raises(LoadError, match=r"row 2, column 'perimeter'"):
            load_csv(write_rows(tmp_path / "d.csv", rows))

    def test_missing_column(self, tmp_path):
        header = HEADER.replace(",area", "")
        with pytest.raises(LoadError, match="area"):
            load_csv(write_rows(tmp_path / "d.csv", ["1,M,1,2,3,4,5,6,7"], header))

    def test_header_only(self, tmp_path):
        with pytest.warns(RuntimeWarning):
            assert load_csv(write_rows(tmp_path / "d.csv", [])) == []

    def test_empty_file(self, tmp_path):
        (tmp_path / "d.csv").write_text("")
        with pytest.raises(LoadError):
            load_csv(tmp_path / "d.csv")

    def test_column_map(self, tmp_path):
        header = HEADER.replace("diagnosis_result", "dx")
        recs = load_csv(write_rows(tmp_path / "d.csv", [row(1, "b")], header), {"diagnosis_result": "dx"})
        assert recs[0].diagnosis == "B"
        assert recs[0].features == tuple(float(1 + j) for j in range(8))

    def test_load_error_is_value_error(self):
        assert issubclass(LoadError, ValueError)


class TestLabels:
    def test_positive_code(self):
        recs = [RawRecord("a", (0.0,) * 8, "M"), RawRecord("b", (1.0,) * 8, "B")]
        np.testing.assert_array_equal(to_labeled(recs).y, [1, -1])
        np.testing.assert_array_equal(to_labeled(recs, "B").y, [-1, 1])

    def test_bad_code(self):
        with pytest.raises(ConfigurationError):
            to_labeled([RawRecord("a", (0.0,) * 8, "M")], "Q")


class TestOversample:
    def test_balances_proxy(self, proxy_csv):
        ds = to_labeled(load_csv(proxy_csv))
        out = random_oversample(ds, seed=3)
        assert len(out) == 124
        assert out.class_counts() == {1: 62, -1: 62}
        # originals kept in order, duplicates copy existing minority rows
        np.testing.assert_array_equal(out.X[:100], ds.X)
        for rid, x in zip(out.ids[100:], out.X[100:]):
            base = ds.ids.index(rid.split("~")[0])
            np.testing.assert_array_equal(x, ds.X[base])
            assert ds.y[base] == -1

    def test_deterministic(self, proxy_csv):
        ds = to_labeled(load_csv(proxy_csv))
        assert random_oversample(ds, 5).ids == random_oversample(ds, 5).ids

    def test_balanced_input_unchanged(self):
        ds = LabeledDataset(np.eye(2), [1, -1])
        assert len(random_oversample(ds, 0)) == 2

    def test_single_class(self):
        with pytest.raises(ConfigurationError):
            random_oversample(LabeledDataset(np.eye(2), [1, 1]), 0)


class TestScalers:
    def test_standardize_example(self):
        s = fit_standardize(np.array([[2.0], [4.0], [6.0]]))
        np.testing.assert_allclose(s.apply([[2.0], [4.0], [6.0]]).ravel(), [-1.2247, 0, 1.2247], atol=1e-4)
        assert s.b[0] == pytest.approx(np.sqrt(8 / 3))

    def test_standardize_moments(self, rng):
        X = rng.normal(3, 5, size=(50, 4))
        Z = fit_standardize(X).apply(X)
        np.testing.assert_allclose(Z.mean(axis=0), 0, atol=1e-12)
        np.testing.assert_allclose(Z.std(axis=0), 1, atol=1e-12)

    def test_constant_feature(self):
        X = np.array([[1.0, 5.0], [3.0, 5.0]])
        np.testing.assert_array_equal(fit_standardize(X).apply(X)[:, 1], 0.0)
        np.testing.assert_array_equal(fit_minmax(X, (-1, 1)).apply(X)[:, 1], -1.0)

    def test_minmax_example(self):
        X = np.array([[2.0], [4.0], [6.0]])
        np.testing.assert_allclose(fit_minmax(X).apply(X).ravel(), [0, 0.5, 1])
        np.testing.assert_allclose(fit_minmax(X, (-1, 1)).apply(X).ravel(), [-1, 0, 1])

    def test_minmax_unseen_values_not_clipped(self):
        s = fit_minmax(np.array([[0.0], [10.0]]))
        np.testing.assert_allclose(s.apply([[15.0]]), [[1.5]])

    def test_bad_range(self):
        with pytest.raises(ConfigurationError):
            fit_minmax(np.eye(2), (1, 1))

    def test_empty(self):
        with pytest.raises(ConfigurationError):
            fit_standardize(np.zeros((0, 3)))

    def test_width_mismatch(self):
        with pytest.raises(DimensionError):
            fit_standardize(np.eye(3)).apply(np.eye(2))

    def test_roundtrip(self, rng):
        X = rng.normal(size=(10, 3))
        scalers = [fit_standardize(X)]
        scalers.append(fit_minmax(scalers[0].apply(X)))
        back = [ScalerState.from_dict(s.to_dict()) for s in scalers]
        np.testing.assert_array_equal(apply_scalers(back, X), apply_scalers(scalers, X))


class TestSplit:
    @pytest.mark.parametrize("n, ratio, k", [(124, 0.2, 25), (10, 0.25, 3), (100, 0.2, 20), (5, 0.1, 1)])
    def test_counts(self, n, ratio, k):
        assert n_test_samples(n, ratio) == k
        s = train_test_split(n, ratio, seed=1)
        assert s.test.size == k and s.train.size == n - k
        assert np.array_equal(np.sort(np.concatenate([s.train, s.test])), np.arange(n))

    def test_seeded(self):
        a, b = train_test_split(124, 0.2, 9), train_test_split(124, 0.2, 9)
        np.testing.assert_array_equal(a.test, b.test)
        assert not np.array_equal(a.test, train_test_split(124, 0.2, 10).test)

    @pytest.mark.parametrize("ratio", [0.0, 1.0, -0.1])
    def test_bad_ratio(self, ratio):
        with pytest.raises(ConfigurationError):
            train_test_split(10, ratio, 0)


class TestPipeline:
    def test_qsvm_branch(self, proxy_csv):
        res = run_pipeline(load_csv(proxy_csv), PipelineConfig("qsvm", seed=7))
        assert len(res.train) == 99 and len(res.test) == 25 and len(res.full) == 124
        assert res.full.X.min() == pytest.approx(0.0) and res.full.X.max() == pytest.approx(1.0)
        assert not set(res.train.ids) & set(res.test.ids)

    def test_svm_branch(self, proxy_csv):
        res = run_pipeline(load_csv(proxy_csv), PipelineConfig("svm", seed=7))
        np.testing.assert_allclose(res.full.X.mean(axis=0), 0, atol=1e-12)
        assert len(res.scalers) == 1

    def test_deterministic(self, proxy_csv):
        recs = load_csv(proxy_csv)
        a = run_pipeline(recs, PipelineConfig(seed=4))
        b = run_pipeline(recs, PipelineConfig(seed=4))
        np.testing.assert_array_equal(a.train.X, b.train.X)
        assert a.test.ids == b.test.ids

    def test_fit_on_train_only(self, proxy_csv):
        recs = load_csv(proxy_csv)
        res = run_pipeline(recs, PipelineConfig("svm", seed=4, fit_on_train_only=True))
        np.testing.assert_allclose(res.train.X.mean(axis=0), 0, atol=1e-12)
        assert np.max(np.abs(res.test.X.mean(axis=0))) > 1e-6

    def test_bad_branch(self):
        with pytest.raises(ConfigurationError):
            PipelineConfig("knn")

    def test_write_split(self, tmp_path, proxy_csv):
        res = run_pipeline(load_csv(proxy_csv), PipelineConfig(seed=1))
        write_split_csv(res.test, tmp_path / "t.csv")
        lines = (tmp_path / "t.csv").read_text().splitlines()
        assert lines[0] == "id," + ",".join(FEATURES) + ",label"
        assert len(lines) == 26
