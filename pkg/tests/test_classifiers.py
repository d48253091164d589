"""Classifier behaviour: linear scoring, tables, matrix serialization."""

import numpy as np
import pytest

from fairmix import (
    CompatibilityError,
    DataFormatError,
    Dataset,
    Instance,
    LinearClassifier,
    TableClassifier,
    load_prediction_matrix,
    prediction_matrix,
    save_prediction_matrix,
)


@pytest.fixture
def ds() -> Dataset:
    return Dataset.from_arrays(
        [[0.0, 1.0], [2.0, -1.0], [-3.0, 0.5], [1.0, 1.0]],
        [1, -1, 1, -1],
        [0, 0, 1, 1],
    )


class TestLinearClassifier:
    def test_zero_score_is_positive(self):
        clf = LinearClassifier((1.0,), bias=0.0)
        assert clf.predict(Instance((0.0,), 1, 0)) == 1

    def test_predict_matches_score_sign(self):
        clf = LinearClassifier((2.0, -1.0), sensitive_weight=0.5, bias=-1.0)
        inst = Instance((1.0, 0.25), -1, 1)
        assert clf.score(inst.features, inst.sensitive) == 2.0 - 0.25 + 0.5 - 1.0
        assert clf.predict(inst) == 1

    def test_predict_all_agrees_with_predict(self, ds):
        clf = LinearClassifier((0.3, -0.7), sensitive_weight=-0.2, bias=0.1)
        vec = clf.predict_all(ds)
        assert vec.tolist() == [clf.predict(inst) for inst in ds]

    def test_sensitive_weight_reads_group(self, ds):
        aware = LinearClassifier((0.0, 0.0), sensitive_weight=1.0, bias=-0.5)
        assert aware.predict_all(ds).tolist() == [-1, -1, 1, 1]

    def test_negated_flips_off_boundary_points(self, ds):
        clf = LinearClassifier((0.3, -0.7), sensitive_weight=-0.2, bias=0.1)
        flipped = clf.negated()
        scores = [clf.score(i.features, i.sensitive) for i in ds]
        for inst, s in zip(ds, scores):
            if s != 0:
                assert flipped.predict(inst) == -clf.predict(inst)

    def test_negated_boundary_stays_positive(self):
        clf = LinearClassifier((1.0,), bias=-2.0)
        on_boundary = Instance((2.0,), 1, 0)
        assert clf.predict(on_boundary) == 1
        assert clf.negated().predict(on_boundary) == 1

    def test_dimension_mismatch(self, ds):
        clf = LinearClassifier((1.0,))
        with pytest.raises(CompatibilityError, match="dimension mismatch"):
            clf.predict_all(ds)
        with pytest.raises(CompatibilityError, match="dimension mismatch"):
            clf.score((1.0, 2.0, 3.0), 0)

    def test_weights_coerced_to_floats(self):
        clf = LinearClassifier((1, 2))
        assert clf.weights == (1.0, 2.0)
        assert all(isinstance(w, float) for w in clf.weights)


class TestTableClassifier:
    def test_predictions_returned_verbatim(self, ds):
        table = TableClassifier([1, -1, -1, 1], ds)
        assert table.predict_all(ds).tolist() == [1, -1, -1, 1]
        assert table.predict_index(3) == 1

    def test_equal_dataset_accepted(self, ds):
        clone = Dataset.from_arrays(ds.features, ds.labels, ds.sensitive)
        table = TableClassifier([1, 1, 1, 1], ds)
        assert table.predict_all(clone).tolist() == [1, 1, 1, 1]

    def test_foreign_dataset_rejected(self, ds):
        other = Dataset.from_arrays([[9.0, 9.0]], [1], [0])
        table = TableClassifier([1, 1, 1, 1], ds)
        with pytest.raises(CompatibilityError, match="not bound to"):
            table.predict_all(other)

    def test_single_instance_prediction_unsupported(self, ds):
        table = TableClassifier([1, 1, 1, 1], ds)
        with pytest.raises(CompatibilityError, match="table classifiers"):
            table.predict(ds.instance(0))

    def test_length_checked(self, ds):
        with pytest.raises(DataFormatError, match="does not match"):
            TableClassifier([1, -1], ds)

    def test_values_checked(self, ds):
        with pytest.raises(DataFormatError, match="invalid prediction at row 2"):
            TableClassifier([1, 0, 1, 1], ds)

    def test_predictions_read_only(self, ds):
        table = TableClassifier([1, -1, 1, -1], ds)
        with pytest.raises(ValueError):
            table.predictions[0] = -1

    def test_equality(self, ds):
        a = TableClassifier([1, -1, 1, -1], ds)
        b = TableClassifier([1, -1, 1, -1], ds)
        c = TableClassifier([1, 1, 1, 1], ds)
        assert a == b and hash(a) == hash(b)
        assert a != c


class TestPredictionMatrix:
    def test_shape_and_content(self, ds):
        members = [
            LinearClassifier((1.0, 0.0)),
            TableClassifier([-1, -1, -1, -1], ds),
        ]
        matrix = prediction_matrix(members, ds)
        assert matrix.shape == (2, 4)
        assert matrix[0].tolist() == [1, 1, -1, 1]
        assert matrix[1].tolist() == [-1, -1, -1, -1]

    def test_save_load_round_trip(self, ds, tmp_path):
        matrix = np.array([[1, -1, 1, -1], [1, 1, -1, -1], [-1, -1, -1, 1]])
        path = tmp_path / "preds.csv"
        save_prediction_matrix(path, matrix)
        tables = load_prediction_matrix(path, ds)
        assert len(tables) == 3
        rebuilt = prediction_matrix(tables, ds)
        assert np.array_equal(rebuilt, matrix)

    def test_bad_header(self, ds, tmp_path):
        path = tmp_path / "preds.csv"
        path.write_text("clf_1,clf_3\n1,1\n1,1\n1,1\n1,1\n")
        with pytest.raises(DataFormatError, match="header must be clf_1"):
            load_prediction_matrix(path, ds)

    def test_bad_entry(self, ds, tmp_path):
        path = tmp_path / "preds.csv"
        path.write_text("clf_1\n1\n0\n1\n1\n")
        with pytest.raises(DataFormatError, match="row 2: prediction must be -1 or 1"):
            load_prediction_matrix(path, ds)

    def test_malformed_entry(self, ds, tmp_path):
        path = tmp_path / "preds.csv"
        path.write_text("clf_1\n1\nyes\n1\n1\n")
        with pytest.raises(DataFormatError, match="row 2: malformed prediction"):
            load_prediction_matrix(path, ds)

    def test_row_count_mismatch(self, ds, tmp_path):
        path = tmp_path / "preds.csv"
        path.write_text("clf_1\n1\n-1\n")
        with pytest.raises(DataFormatError, match="row count mismatch"):
            load_prediction_matrix(path, ds)

    def test_empty_file(self, ds, tmp_path):
        path = tmp_path / "preds.csv"
        path.write_text("")
        with pytest.raises(DataFormatError, match="empty file"):
            load_prediction_matrix(path, ds)
