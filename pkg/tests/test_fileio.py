import json

import numpy as np
import pytest

from pqdist import fileio


class TestMatrixFiles:
    def test_round_trip_exact(self, tmp_path, rng):
        path = tmp_path / "m.json"
        m = rng.random((5, 5))
        m = (m + m.T) / 3  # awkward decimals on purpose
        np.fill_diagonal(m, 0.0)
        fileio.save_matrix(path, m)
        assert np.array_equal(fileio.load_matrix(path), m)

    def test_declared_size_must_match(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"n": 3, "entries": [[0, 1], [1, 0]]}))
        with pytest.raises(ValueError, match="declared n=3"):
            fileio.load_matrix(path)

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"n": 2, "entries": [[0, None], [None, 0]]}))
        with pytest.raises((ValueError, TypeError)):
            fileio.load_matrix(path)


class TestStateFiles:
    def test_round_trip_exact(self, tmp_path, rng):
        path = tmp_path / "s.json"
        v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        v /= np.linalg.norm(v)
        fileio.save_state(path, v)
        assert np.array_equal(fileio.load_state(path), v)

    def test_norm_gate_reports_measured_norm(self, tmp_path):
        path = tmp_path / "s.json"
        fileio.save_state(path, np.array([1.0, 1.0]))
        with pytest.raises(ValueError, match="norm = 1.41"):
            fileio.load_state(path)

    def test_norm_gate_tolerates_1e9(self, tmp_path):
        path = tmp_path / "s.json"
        fileio.save_state(path, np.array([1.0 + 4e-10, 0.0]))
        assert fileio.load_state(path) is not None

    def test_length_mismatch(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({"n": 3, "amplitudes": [[1, 0], [0, 0]]}))
        with pytest.raises(ValueError, match="amplitude pairs"):
            fileio.load_state(path)


class TestReportFiles:
    def test_round_trip(self, tmp_path):
        doc = {"property": "triangle", "worst_defect": 0.1 + 0.2, "witness": {"x": [[1.0, -0.0]]}}
        path = tmp_path / "r.json"
        fileio.write_report(path, doc)
        assert fileio.load_report(path) == doc

    def test_creates_parent_directories(self, tmp_path):
        path = tmp_path / "a" / "b" / "r.json"
        fileio.write_report(path, {"k": 1})
        assert fileio.load_report(path) == {"k": 1}
