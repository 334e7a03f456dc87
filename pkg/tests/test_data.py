import numpy as np
import pytest

from qsvrad.data import (
    DataError,
    MinMaxScaler,
    RawDataset,
    ToyConfig,
    generate_toy,
    load_csv,
    pca_reduce,
    prepare,
    rescale_minmax,
    sample_split,
    write_csv,
)
from qsvrad.metrics import roc_auc


def write(path, text):
    path.write_text(text)
    return path


def labelled(n_normal, n_anomalous, d=6, seed=0):
    rng = np.random.default_rng(seed)
    rows = rng.normal(size=(n_normal + n_anomalous, d))
    return RawDataset(rows, np.r_[np.zeros(n_normal, int), np.ones(n_anomalous, int)])


def test_load_csv(tmp_path):
    rng = np.random.default_rng(0)
    lines = ["a,b,label,c"] + [f"{x:.6f},{y:.6f},{i % 2},{z:.6f}" for i, (x, y, z) in enumerate(rng.normal(size=(100, 3)))]
    data = load_csv(write(tmp_path / "d.csv", "\n".join(lines) + "\n"))
    assert data.rows.shape == (100, 3)
    assert data.columns == ("a", "b", "c")
    assert data.n_normal == 50 and data.n_anomalous == 50
    assert data.name == "d"


def test_load_csv_custom_label_column(tmp_path):
    data = load_csv(write(tmp_path / "d.csv", "y,a\n1,0.5\n0,0.25\n"), label_column="y")
    np.testing.assert_array_equal(data.labels, [1, 0])
    np.testing.assert_array_equal(data.rows, [[0.5], [0.25]])


def test_load_csv_names_bad_cell(tmp_path):
    path = write(tmp_path / "d.csv", "a,b,label\n1,2,0\n3,oops,1\n")
    with pytest.raises(DataError, match=r"row 3.*'b'"):
        load_csv(path)


@pytest.mark.parametrize("body", ["a,label\n1,2\n", "a,label\n1,x\n", "a,label\n1,-1\n"])
def test_load_csv_rejects_bad_labels(tmp_path, body):
    with pytest.raises(DataError, match="not 0 or 1"):
        load_csv(write(tmp_path / "d.csv", body))


def test_load_csv_structural_errors(tmp_path):
    with pytest.raises(DataError, match="no such file"):
        load_csv(tmp_path / "missing.csv")
    with pytest.raises(DataError, match="label column"):
        load_csv(write(tmp_path / "a.csv", "a,b\n1,2\n"))
    with pytest.raises(DataError, match="cells"):
        load_csv(write(tmp_path / "b.csv", "a,label\n1,0,3\n"))
    with pytest.raises(DataError, match="empty"):
        load_csv(write(tmp_path / "c.csv", ""))


def test_csv_round_trip(tmp_path):
    raw, _ = generate_toy(ToyConfig(seed=3))
    write_csv(raw, tmp_path / "t.csv")
    back = load_csv(tmp_path / "t.csv")
    np.testing.assert_array_equal(back.rows, raw.rows)
    np.testing.assert_array_equal(back.labels, raw.labels)


def test_pca_matches_covariance_eigendecomposition():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(400, 6)) * np.sqrt([5, 4, 3, 2, 1, 0.1])
    reduced, pca = pca_reduce(RawDataset(X, np.zeros(400, int)))
    assert reduced.rows.shape == (400, 5)
    evals, evecs = np.linalg.eigh(np.cov(X, rowvar=False))
    order = np.argsort(evals)[::-1][:5]
    np.testing.assert_allclose(pca.explained_variance, evals[order], rtol=1e-10)
    # directions agree up to sign
    np.testing.assert_allclose(np.abs(pca.components @ evecs[:, order]), np.eye(5), atol=1e-8)
    np.testing.assert_allclose(pca.components @ pca.components.T, np.eye(5), atol=1e-12)
    assert np.all(np.diff(pca.explained_variance) <= 0)
    # the dominant axes of the generating covariance are recovered
    np.testing.assert_allclose(np.abs(pca.components[:, :5]).argmax(axis=1), range(5))
    np.testing.assert_allclose(reduced.rows.mean(axis=0), 0, atol=1e-12)


def test_pca_sign_convention():
    _, pca = pca_reduce(labelled(40, 30, seed=2))
    for row in pca.components:
        assert row[np.abs(row).argmax()] > 0


def test_pca_needs_enough_columns_and_rows():
    with pytest.raises(DataError):
        pca_reduce(labelled(40, 30, d=4))
    with pytest.raises(DataError):
        pca_reduce(labelled(3, 2, d=6))


def test_rescale_examples():
    train, test, scaler = rescale_minmax([[0.0], [5.0], [10.0]], [[20.0], [-10.0]])
    np.testing.assert_allclose(train[:, 0], [-1, 0, 1])
    # test data is not clamped
    np.testing.assert_allclose(test[:, 0], [3, -3])
    assert isinstance(scaler, MinMaxScaler)


def test_rescale_constant_column_maps_to_zero():
    train, test, _ = rescale_minmax([[1.0, 2.0], [1.0, 4.0]], [[7.0, 3.0]])
    np.testing.assert_array_equal(train[:, 0], [0, 0])
    assert test[0, 0] == 0.0
    assert test[0, 1] == 0.0


def test_rescale_width_mismatch():
    with pytest.raises(DataError):
        rescale_minmax(np.zeros((3, 2)), np.zeros((3, 3)))


def test_split_sizes_and_disjointness():
    data = labelled(60, 30)
    train, test = sample_split(data, seed=4)
    assert train.size == 30 and test.size == 50
    assert np.intersect1d(train, test).size == 0
    assert np.all(data.labels[train] == 0)
    np.testing.assert_array_equal(data.labels[test], np.r_[np.zeros(25), np.ones(25)])
    assert np.unique(test).size == 50


def test_split_is_seeded():
    data = labelled(60, 30)
    a, b = sample_split(data, 7), sample_split(data, 7)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])
    assert not np.array_equal(sample_split(data, 8)[0], a[0])


@pytest.mark.parametrize("counts", [(40, 30), (60, 24)])
def test_split_too_small(counts):
    with pytest.raises(DataError, match="split needs"):
        sample_split(labelled(*counts), 0)


def test_prepare_pipeline():
    data = labelled(70, 40, d=8)
    ds = prepare(data, seed=1)
    assert ds.train.shape == (30, 5) and ds.test.shape == (50, 5)
    np.testing.assert_allclose(ds.train.min(axis=0), -1)
    np.testing.assert_allclose(ds.train.max(axis=0), 1)
    # scaler fitted on the PCA features of the training rows only
    np.testing.assert_allclose(ds.scaler.transform(ds.pca.transform(data.rows[ds.train_index])), ds.train)
    np.testing.assert_allclose(ds.scaler.transform(ds.pca.transform(data.rows[ds.test_index])), ds.test)


def test_toy_geometry():
    cfg = ToyConfig(seed=9)
    raw, w = generate_toy(cfg)
    assert raw.n_normal == 55 and raw.n_anomalous == 25
    assert np.linalg.norm(w) == pytest.approx(1.0)
    dist = raw.rows @ w
    assert np.all(np.abs(dist[raw.labels == 0]) < 1e-12)
    off = np.abs(dist[raw.labels == 1])
    assert np.all((off >= 0.4) & (off <= 1.0))


def test_toy_is_seeded_and_splittable():
    a, wa = generate_toy(ToyConfig(seed=1))
    b, wb = generate_toy(ToyConfig(seed=1))
    np.testing.assert_array_equal(a.rows, b.rows)
    np.testing.assert_array_equal(wa, wb)
    train, test = sample_split(a, 0)
    # distance to the plane separates the classes perfectly
    assert roc_auc(np.abs(a.rows[test] @ wa), a.labels[test]) == 1.0


def test_toy_config_validation():
    with pytest.raises(DataError):
        ToyConfig(n_normal=0)
    with pytest.raises(DataError):
        ToyConfig(offset_band=(1.0, 0.5))
