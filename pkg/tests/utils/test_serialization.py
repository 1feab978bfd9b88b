import json
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from core.extension import build_field, fit_flux
from helpers import arctan_field, arctan_layer, strip_mesh
from models import CheckReport, CheckStatus, ConfigError
from utils.serialization import (
    dumps_json,
    load_field,
    load_grid_function,
    save_field,
    save_grid_function,
    sidecar_path,
    to_jsonable,
    write_csv,
)


class Color(str, Enum):
    RED = "red"


class TestJson:
    def test_to_jsonable_types(self, tmp_path):
        data = {
            "array": np.arange(3, dtype=np.int64),
            "flag": np.bool_(True),
            "nan": float("nan"),
            "enum": Color.RED,
            "path": tmp_path,
            "report": CheckReport(name="x", status=CheckStatus.PASS, value=np.float64(0.5)),
        }
        out = to_jsonable(data)
        assert out["array"] == [0, 1, 2]
        assert out["flag"] is True
        assert out["nan"] is None
        assert out["enum"] == "red"
        assert out["path"] == str(tmp_path)
        assert out["report"]["status"] == "pass"

    def test_dumps_sorted(self):
        text = dumps_json({"b": 1, "a": {"d": 2, "c": 3}})
        assert list(json.loads(text)) == ["a", "b"]
        assert text.index('"c"') < text.index('"d"')
        assert text.endswith("\n")


class TestCsv:
    def test_full_precision(self, tmp_path):
        path = write_csv(pd.DataFrame({"v": [1.0 / 3.0]}), tmp_path / "v.csv")
        assert float(path.read_text().splitlines()[1]) == 1.0 / 3.0

    def test_repeatable_bytes(self, tmp_path):
        frame = pd.DataFrame({"x": np.linspace(0.0, 1.0, 7), "y": np.sin(np.linspace(0.0, 1.0, 7))})
        first = write_csv(frame, tmp_path / "a.csv").read_bytes()
        second = write_csv(frame, tmp_path / "b.csv").read_bytes()
        assert first == second


class TestGridFunction:
    def test_round_trip(self, tmp_path):
        v = arctan_layer(half_width=20.0, count=161)
        path = save_grid_function(v, tmp_path / "trace.csv", s=0.5)
        meta = json.loads(sidecar_path(path).read_text())
        assert meta["s"] == 0.5
        assert meta["asymptote_decay"] == "power"
        w = load_grid_function(path)
        np.testing.assert_array_equal(w.values, v.values)
        assert w.x0 == v.x0 and w.h == v.h
        assert w.right_asymptote == 1.0

    def test_missing_sidecar(self, tmp_path):
        path = tmp_path / "trace.csv"
        pd.DataFrame({"x": [0.0, 1.0], "value": [0.0, 1.0]}).to_csv(path, index=False)
        with pytest.raises(ConfigError):
            load_grid_function(path)

    def test_inconsistent_x_column(self, tmp_path):
        v = arctan_layer(half_width=20.0, count=161)
        path = save_grid_function(v, tmp_path / "trace.csv")
        frame = pd.read_csv(path)
        frame["x"] = frame["x"] * 2.0
        frame.to_csv(path, index=False)
        with pytest.raises(ConfigError):
            load_grid_function(path)


class TestField:
    def test_round_trip(self, tmp_path):
        mesh = strip_mesh(0.5, X=8.0, Y=8.0, nx=32, ny=16)
        values = arctan_field(mesh.x_nodes[None, :], mesh.y_nodes[:, None])
        u = build_field(mesh, values, fit_flux(mesh, values))
        path = save_field(u, Path(tmp_path) / "field.csv")
        w = load_field(path)
        assert w.mesh == mesh
        np.testing.assert_allclose(w.values, u.values, rtol=1e-15, atol=0.0)
        np.testing.assert_allclose(w.flux_trace, u.flux_trace, rtol=1e-15, atol=0.0)

    def test_corrupt_sidecar(self, tmp_path):
        mesh = strip_mesh(0.5, nx=8, ny=8)
        values = np.zeros(mesh.shape)
        path = save_field(build_field(mesh, values, fit_flux(mesh, values)), tmp_path / "field.csv")
        sidecar_path(path).write_text(json.dumps({"mesh": {}}))
        with pytest.raises(ConfigError):
            load_field(path)
