from pathlib import Path

import numpy as np
import pytest

from ips2.dataset import canonical_labels, load_csv, standardize, write_csv
from ips2.errors import ParameterError, ParseError, SizeError
from ips2.models import Dataset, Standardization


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "data.csv"
    path.write_text(text, encoding="utf-8")
    return path


def test_load_plain_numeric_csv(tmp_path: Path) -> None:
    dataset = load_csv(_write(tmp_path, "1,2\n3,4\n5,6\n"))

    assert (dataset.m, dataset.n) == (3, 2)
    assert dataset.labels is None
    assert dataset.name == "data"
    np.testing.assert_array_equal(dataset.samples, [[1, 2], [3, 4], [5, 6]])


def test_labels_are_canonicalized_by_first_appearance(tmp_path: Path) -> None:
    path = _write(tmp_path, "x,y,cls\n1,2,a\n3,4,a\n5,6,b\n")

    dataset = load_csv(path, label_column="cls", has_header=True)

    assert dataset.n == 2
    np.testing.assert_array_equal(dataset.labels, [0, 0, 1])


def test_label_column_by_index(tmp_path: Path) -> None:
    dataset = load_csv(_write(tmp_path, "b,1,2\na,3,4\nb,5,6\n"), label_column=0)

    np.testing.assert_array_equal(dataset.labels, [0, 1, 0])
    np.testing.assert_array_equal(dataset.samples[:, 0], [1, 3, 5])


def test_non_numeric_cell_names_row_and_column(tmp_path: Path) -> None:
    with pytest.raises(ParseError) as excinfo:
        load_csv(_write(tmp_path, "1,2\n3,x\n"))

    assert excinfo.value.row == 1
    assert excinfo.value.col == 1


def test_ragged_row_names_row(tmp_path: Path) -> None:
    with pytest.raises(ParseError) as excinfo:
        load_csv(_write(tmp_path, "1,2\n3,4,5\n6,7\n"))

    assert excinfo.value.row == 1


def test_non_finite_cell_is_rejected(tmp_path: Path) -> None:
    with pytest.raises(ParseError):
        load_csv(_write(tmp_path, "1,2\n3,inf\n"))


def test_single_sample_is_a_size_error(tmp_path: Path) -> None:
    with pytest.raises(SizeError):
        load_csv(_write(tmp_path, "1,2\n"))


def test_label_name_without_header(tmp_path: Path) -> None:
    with pytest.raises(ParameterError):
        load_csv(_write(tmp_path, "1,2\n3,4\n"), label_column="cls")


def test_write_then_load_keeps_values_exactly(tmp_path: Path) -> None:
    original = Dataset(np.array([[0.1, 1 / 3], [2.5e-17, -7.0]]), np.array([0, 1]))
    path = tmp_path / "out.csv"

    write_csv(original, path)
    loaded = load_csv(path, label_column="label", has_header=True)

    np.testing.assert_array_equal(loaded.samples, original.samples)
    np.testing.assert_array_equal(loaded.labels, original.labels)


def test_canonical_labels() -> None:
    np.testing.assert_array_equal(canonical_labels(["z", "y", "z", "x"]), [0, 1, 0, 2])


def test_standardize_none_is_identity() -> None:
    dataset = Dataset(np.array([[1.0, 2.0], [3.0, 4.0]]))

    assert standardize(dataset, Standardization.NONE) is dataset


def test_zscore_gives_zero_mean_unit_sample_std() -> None:
    dataset = Dataset(np.array([[1.0], [2.0], [3.0]]))

    column = standardize(dataset, "zscore").samples[:, 0]

    assert column.mean() == pytest.approx(0.0, abs=1e-15)
    assert column.std(ddof=1) == pytest.approx(1.0)


def test_zscore_constant_column_becomes_zeros() -> None:
    dataset = Dataset(np.array([[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]]))

    np.testing.assert_array_equal(standardize(dataset, "zscore").samples[:, 0], [0, 0, 0])


def test_dataset_validation() -> None:
    with pytest.raises(SizeError):
        Dataset(np.zeros((1, 3)))
    with pytest.raises(SizeError):
        Dataset(np.array([[0.0], [np.nan]]))
    with pytest.raises(SizeError):
        Dataset(np.zeros((3, 2)), labels=np.array([0, 1]))


def test_permuted_reorders_labels_with_samples() -> None:
    dataset = Dataset(np.array([[0.0], [1.0], [2.0]]), np.array([0, 1, 1]))

    permuted = dataset.permuted(np.array([2, 0, 1]))

    np.testing.assert_array_equal(permuted.samples[:, 0], [2, 0, 1])
    np.testing.assert_array_equal(permuted.labels, [1, 0, 1])


def test_zscore_is_idempotent() -> None:
    rng = np.random.default_rng(11)
    once = standardize(Dataset(rng.normal(3.0, 2.0, size=(12, 4))), "zscore")

    twice = standardize(once, "zscore")

    np.testing.assert_allclose(twice.samples, once.samples, rtol=0, atol=1e-12)
