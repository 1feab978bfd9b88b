import importlib

import numpy as np
import pandas as pd
import pytest
from typer.testing import CliRunner

from cli import app
from cli.commands import execute, load_run_config
from core.extension import build_field, fit_flux
from helpers import arctan_field, strip_mesh
from models import (
    CheckStatus,
    CommandName,
    ConfigError,
    ContinuationResult,
    ConvergenceError,
    FracOrder,
    LayerSolution,
    LinearSystemStats,
    MeshGeometry,
    PartialResultsError,
    RadialSolveResult,
    RadialStatus,
    RuntimeSettings,
    TopCondition,
)
from utils.serialization import read_json

SMALL_PROPERTIES = [
    "properties.mesh_size=8",
    "properties.max_principle_trials=2",
    "properties.comparison_trials=2",
    "properties.harnack_trials=2",
    "properties.harnack_resolution=8",
    "properties.harnack_exponents=[0.0]",
    "properties.duality_resolutions=[8,16]",
]


def _closed_form_layer():
    mesh = strip_mesh(0.5, X=20.0, Y=20.0, nx=640, ny=96, top_condition=TopCondition.FAR_FIELD)
    x = mesh.x_nodes[None, :]
    y = mesh.y_nodes[:, None]
    values = arctan_field(x, y)
    field = build_field(mesh, values, fit_flux(mesh, values))
    return LayerSolution(trace=field.trace, field=field, order=FracOrder(s=0.5))


@pytest.fixture
def settings(tmp_path):
    return RuntimeSettings(output_dir=tmp_path / "default_out")


class TestConfigResolution:
    def test_defaults_from_yaml(self):
        config = load_run_config(CommandName.EVAL)
        assert config.command == CommandName.EVAL
        assert config.nonlinearity.name == "sine_pi"

    def test_default_mesh(self):
        mesh = load_run_config(CommandName.LAYER).mesh
        assert (mesh.X, mesh.Y, mesh.nx, mesh.ny) == (60.0, None, 512, 256)
        assert mesh.top_condition == TopCondition.NEUMANN

    def test_flags_applied(self, tmp_path):
        config = load_run_config(CommandName.LAYER, overrides=["s=0.3"], output_dir=tmp_path, normalize_trace=True)
        assert config.s == 0.3
        assert config.output_dir == tmp_path
        assert config.solver.normalize_trace

    def test_bad_s_is_config_error(self):
        with pytest.raises(ConfigError):
            load_run_config(CommandName.LAYER, overrides=["s=1.2"])

    def test_bad_s_exit_code(self, tmp_path, settings):
        assert execute(CommandName.LAYER, overrides=["s=1.2"], output_dir=tmp_path, settings=settings) == 2

    def test_missing_config_file(self, tmp_path, settings):
        code = execute(CommandName.LAYER, config_path=tmp_path / "missing.yaml", settings=settings)
        assert code == 2


class TestEval:
    def test_cos_multiplier(self, tmp_path, settings):
        overrides = ["eval.test_function=cos", "eval.points=64", "eval.wavenumber=2", "s=0.3"]
        assert execute(CommandName.EVAL, overrides=overrides, output_dir=tmp_path, settings=settings) == 0
        report = read_json(tmp_path / "eval_report.json")
        assert report["exact_error"]["fourier"] <= 1e-10
        frame = pd.read_csv(tmp_path / "eval.csv")
        assert {"x", "value", "pv", "fourier", "expected"} <= set(frame.columns)
        assert (tmp_path / "eval.svg").exists()
        assert (tmp_path / "resolved_config.yaml").exists()

    def test_constant_gives_zero(self, tmp_path, settings):
        overrides = ["eval.test_function=constant", "eval.points=129", "eval.half_width=10"]
        assert execute(CommandName.EVAL, overrides=overrides, output_dir=tmp_path, settings=settings) == 0
        report = read_json(tmp_path / "eval_report.json")
        assert report["exact_error"]["pv"] <= 1e-10
        assert report["exact_error"]["fourier"] <= 1e-10

    def test_loaded_profile(self, tmp_path, settings):
        from helpers import arctan_layer
        from utils.serialization import save_grid_function

        profile = save_grid_function(arctan_layer(half_width=20.0, count=257), tmp_path / "input.csv", s=0.5)
        out = tmp_path / "out"
        code = execute(CommandName.EVAL, overrides=[f"eval.profile={profile}"], output_dir=out, settings=settings)
        assert code == 0
        report = read_json(out / "eval_report.json")
        assert report["points"] == 257
        assert "exact_error" not in report


class TestLayer:
    def test_bundle_written(self, tmp_path, settings, mocker):
        mocker.patch("cli.commands.solve_layer", return_value=_closed_form_layer())
        overrides = ["mesh.X=20", "mesh.Y=20", "mesh.nx=640", "mesh.ny=96"]
        assert execute(CommandName.LAYER, overrides=overrides, output_dir=tmp_path, settings=settings) == 0
        for name in ("trace.csv", "trace.json", "field.csv", "hamiltonian.csv", "modica_margin.csv",
                     "necessary_conditions.json", "summary.json", "trace.svg", "hamiltonian.svg",
                     "modica_margin.svg"):
            assert (tmp_path / name).exists(), name
        summary = read_json(tmp_path / "summary.json")
        assert summary["identity"]["status"] == "pass"
        assert summary["necessary_conditions"]["failing_clauses"] == []
        hamiltonian = pd.read_csv(tmp_path / "hamiltonian.csv")
        assert list(hamiltonian.columns) == ["x", "H", "G_gap", "margin_min_y"]
        assert len(hamiltonian) == 641
        margin = pd.read_csv(tmp_path / "modica_margin.csv")
        assert margin.columns[0] == "y"
        assert margin.shape == (97, 642)

    def test_non_convergence_exit_4(self, tmp_path, settings, mocker):
        layer = _closed_form_layer()
        error = ConvergenceError("Newton 未收敛", stats=LinearSystemStats(converged=False), partial=layer.field)
        mocker.patch("cli.commands.solve_layer", side_effect=error)
        assert execute(CommandName.LAYER, output_dir=tmp_path, settings=settings) == 4
        diagnostics = read_json(tmp_path / "diagnostics.json")
        assert diagnostics["exit_code"] == 4
        assert diagnostics["stats"]["converged"] is False
        assert (tmp_path / "partial_field.csv").exists()


class TestSweep:
    def test_partial_results_exit_5(self, tmp_path, settings, mocker):
        partial = ContinuationResult(error_window=5.0)
        error = PartialResultsError("s 延拓中止", partial=partial, cause=ConvergenceError("未收敛"))
        mocker.patch("cli.commands.continuation_in_s", side_effect=error)
        assert execute(CommandName.SWEEP, output_dir=tmp_path, settings=settings) == 5
        summary = read_json(tmp_path / "sweep_summary.json")
        assert summary["completed"] is False
        assert summary["s_limit"]["status"] == "not_exercised"
        assert pd.read_csv(tmp_path / "sweep.csv").empty


class TestRadial:
    def test_trivial_not_exercised(self, tmp_path, settings, mocker):
        mesh = strip_mesh(0.5, X=15.0, Y=15.0, nx=60, ny=24, geometry=MeshGeometry.RADIAL, dimension=2)
        values = np.zeros(mesh.shape)
        trivial = build_field(mesh, values, fit_flux(mesh, values))
        mocker.patch(
            "cli.commands.solve_radial",
            return_value=RadialSolveResult(status=RadialStatus.TRIVIAL, trivial_field=trivial),
        )
        overrides = ["nonlinearity.name=power", "mesh.X=15", "mesh.Y=15", "mesh.nx=60", "mesh.ny=24"]
        assert execute(CommandName.RADIAL, overrides=overrides, output_dir=tmp_path, settings=settings) == 0
        summary = read_json(tmp_path / "radial_summary.json")
        assert summary["verdict"] == "not_exercised"
        statuses = {c["name"]: c["status"] for c in summary["checks"]}
        assert statuses["radial_constant_profile"] == "pass"
        assert statuses["radial_solution"] == "not_exercised"


class TestProperties:
    def test_forced_violation_exit_1(self, tmp_path, settings):
        overrides = SMALL_PROPERTIES + ["properties.force_violation=true"]
        assert execute(CommandName.PROPERTIES, overrides=overrides, output_dir=tmp_path, settings=settings) == 1
        report = read_json(tmp_path / "properties.json")
        forced = [c for c in report["checks"] if c["name"] == "forced_violation"]
        assert forced[0]["status"] == CheckStatus.FAIL.value
        assert report["counts"]["fail"] >= 1

    def test_deterministic_outputs(self, tmp_path, settings):
        first, second = tmp_path / "a", tmp_path / "b"
        for out in (first, second):
            execute(CommandName.PROPERTIES, overrides=SMALL_PROPERTIES + ["seed=7"], output_dir=out, settings=settings)
        for name in ("properties.json", "properties.csv"):
            assert (first / name).read_bytes() == (second / name).read_bytes()


# cli/__init__.py 中的 `app` 遮蔽了子模块属性；Python 3.10 的 mock 按属性解析路径，故直接取模块对象
_APP_MODULE = importlib.import_module("cli.app")


class TestApp:
    def test_exit_code_propagates(self, tmp_path, mocker):
        mocker.patch.object(_APP_MODULE, "configure_logging")
        result = CliRunner().invoke(app, ["layer", "--set", "s=1.2", "-o", str(tmp_path)])
        assert result.exit_code == 2

    def test_options_forwarded(self, tmp_path, mocker):
        mocker.patch.object(_APP_MODULE, "configure_logging")
        run = mocker.patch.object(_APP_MODULE, "execute", return_value=0)
        result = CliRunner().invoke(
            app, ["sweep", "-c", "run.yaml", "--set", "mesh.nx=64", "--set", "seed=3", "--normalize-trace", "-q"]
        )
        assert result.exit_code == 0
        args, kwargs = run.call_args
        assert args[0] == CommandName.SWEEP
        assert kwargs["overrides"] == ["mesh.nx=64", "seed=3"]
        assert kwargs["normalize_trace"] is True
        assert str(kwargs["config_path"]) == "run.yaml"
