from types import SimpleNamespace

import numpy as np
import pytest

from core.extension import build_field, fit_flux
from core.hamiltonian import (
    check_far_field,
    check_symmetry,
    hamiltonian_profile,
    layer_profile,
    radial_hamiltonian,
    s_limit_split,
    verify_identity,
    verify_modica,
)
from core.profiles import interface_width, make_nonlinearity, solve_layer, solve_radial
from helpers import arctan_field, strip_mesh
from models import (
    CheckStatus,
    FracOrder,
    GridFunction,
    HamiltonianProfile,
    LayerSolution,
    MeshConfig,
    MeshGeometry,
    RadialSolution,
    RadialStatus,
    SolverConfig,
    TopCondition,
)


def closed_form_field(mesh):
    x = mesh.x_nodes[None, :]
    y = mesh.y_nodes[:, None]
    values = arctan_field(x, y)
    return build_field(mesh, values, fit_flux(mesh, values))


@pytest.fixture(scope="module")
def arctan_solution():
    mesh = strip_mesh(0.5, X=20.0, Y=20.0, nx=640, ny=96, top_condition=TopCondition.FAR_FIELD)
    field = closed_form_field(mesh)
    return LayerSolution(trace=field.trace, field=field, order=FracOrder(s=0.5))


@pytest.fixture(scope="module")
def arctan_profile(arctan_solution):
    return layer_profile(arctan_solution)


@pytest.fixture
def sine():
    return make_nonlinearity("sine_pi")


class TestProfile:
    def test_constant_field_zero(self, half):
        mesh = strip_mesh(0.5)
        values = np.full(mesh.shape, 0.3)
        field = build_field(mesh, values, fit_flux(mesh, values))
        profile = hamiltonian_profile(field, half)
        assert np.all(profile.H == 0.0)
        assert np.all(profile.partial == 0.0)
        assert np.all(profile.tail_bound == 0.0)

    def test_shapes(self, arctan_profile, arctan_solution):
        mesh = arctan_solution.field.mesh
        assert arctan_profile.partial.shape == mesh.shape
        np.testing.assert_allclose(arctan_profile.H, arctan_profile.partial[-1] + arctan_profile.tail)
        np.testing.assert_allclose(
            arctan_profile.partial[-1], arctan_profile.x_part - arctan_profile.y_part, atol=1e-14
        )

    def test_arctan_closed_form(self, arctan_profile, arctan_solution, sine):
        x = arctan_profile.xs
        inner = np.abs(x) <= 18.0
        gap = sine.gap(2.0 / np.pi * np.arctan(x))
        assert np.max(np.abs(arctan_profile.H - gap)[inner]) <= 2e-3

    def test_tail_positive_near_center(self, arctan_profile):
        center = np.argmin(np.abs(arctan_profile.xs))
        assert arctan_profile.tail[center] > 0.0

    def test_neumann_top_has_no_model_tail(self, half):
        field = closed_form_field(strip_mesh(0.5, X=10.0, Y=10.0, nx=160, ny=48))
        profile = hamiltonian_profile(field, half, lower=-1.0, upper=1.0)
        assert np.all(profile.tail == 0.0)
        np.testing.assert_array_equal(profile.H, profile.partial[-1])
        assert np.all(profile.tail_bound > 0.0)

    def test_tail_bound_covers_height_refinement(self, half):
        short = closed_form_field(strip_mesh(0.5, X=10.0, Y=10.0, nx=160, ny=48))
        tall = closed_form_field(strip_mesh(0.5, X=10.0, Y=20.0, nx=160, ny=96))
        p_short = hamiltonian_profile(short, half)
        p_tall = hamiltonian_profile(tall, half)
        change = np.abs(p_tall.partial[-1] - p_short.partial[-1])
        assert np.all(change <= p_short.tail_bound)


class TestChecks:
    def test_identity(self, arctan_solution, arctan_profile, sine):
        report = verify_identity(arctan_solution, sine, profile=arctan_profile)
        assert report.status == CheckStatus.PASS
        assert report.well_mismatch <= 1e-15
        assert report.residual_std <= report.max_residual

    def test_modica(self, arctan_solution, arctan_profile, sine):
        report = verify_modica(arctan_solution, sine, profile=arctan_profile)
        assert report.status == CheckStatus.PASS
        assert report.min_margin_interior > 0.0
        assert len(report.margin_min_y) == arctan_solution.field.mesh.nx + 1

    def test_modica_bottom_row_is_gap(self, arctan_profile, sine):
        assert np.all(arctan_profile.partial[0] == 0.0)

    def test_far_field(self, arctan_solution, arctan_profile, sine):
        report = check_far_field(arctan_solution, sine, profile=arctan_profile)
        assert report.passed
        assert report.details["x_edges"] == pytest.approx([-18.0, 18.0])

    def test_symmetry(self, arctan_profile):
        assert check_symmetry(arctan_profile).passed

    def test_symmetry_detects_skew(self, arctan_profile):
        skewed = HamiltonianProfile(**{**arctan_profile.model_dump(), "H": arctan_profile.H + 1e-3 * arctan_profile.xs})
        assert check_symmetry(skewed).status == CheckStatus.FAIL


@pytest.fixture(scope="module")
def cubic():
    return make_nonlinearity("cubic")


@pytest.fixture(scope="module", params=[0.3, 0.5, 0.7])
def cubic_layer(request, cubic):
    order = FracOrder(s=request.param)
    mesh = MeshConfig(X=40.0, nx=640, ny=128).build(order, width=interface_width(cubic))
    return solve_layer(cubic, order, mesh)


@pytest.mark.slow
class TestCubicLayer:
    def test_modica(self, cubic_layer, cubic):
        report = verify_modica(cubic_layer, cubic)
        assert report.min_margin >= -1e-3 * 0.25
        assert report.min_margin_interior > 0.0
        assert report.status == CheckStatus.PASS

    @pytest.mark.parametrize("cubic_layer", [0.5], indirect=True)
    def test_identity(self, cubic_layer, cubic):
        report = verify_identity(cubic_layer, cubic)
        assert report.relative_residual <= 2e-2
        assert report.status == CheckStatus.PASS

    def test_top_row_neumann(self, cubic_layer):
        assert cubic_layer.field.mesh.top_condition == TopCondition.NEUMANN
        assert np.all(layer_profile(cubic_layer).tail == 0.0)


def _radial_mesh(s=0.5, n=2):
    return strip_mesh(s, X=15.0, Y=15.0, nx=120, ny=48, geometry=MeshGeometry.RADIAL, dimension=n)


class TestRadial:
    def test_zero_field_constant(self):
        mesh = _radial_mesh()
        values = np.zeros(mesh.shape)
        field = build_field(mesh, values, fit_flux(mesh, values))
        rad = RadialSolution(
            profile=GridFunction(x0=0.0, h=mesh.hx, values=values[0]),
            field=field, order=FracOrder(s=0.5, n=2), dimension=2,
        )
        nl = make_nonlinearity("power", {"mu": 1.0, "p": 2.0})
        report = radial_hamiltonian(rad, nl)
        np.testing.assert_allclose(report.profile, -nl.G(0.0))
        assert report.monotone_pass
        assert report.derivative_checked_points == 0
        assert report.gap_endpoints == 0.0

    @pytest.mark.slow
    def test_power_instance_monotone(self):
        nl = make_nonlinearity("power", {"mu": 1.0, "p": 2.0})
        result = solve_radial(nl, FracOrder(s=0.5), 2, _radial_mesh(), solver=SolverConfig())
        assert result.status == RadialStatus.FOUND
        report = radial_hamiltonian(result.solution, nl)
        assert report.monotone_pass
        assert report.gap_endpoints >= 0.0


def _fake_profile(x_part, y_part):
    xs = np.array([-1.0, 0.0, 1.0])
    return HamiltonianProfile(
        xs=xs, H=x_part - y_part, partial=np.zeros((2, 3)), tail=np.zeros(3),
        tail_bound=np.zeros(3), x_part=x_part, y_part=y_part,
    )


class TestSLimit:
    def _layers(self, s_values):
        return [SimpleNamespace(order=FracOrder(s=s), field=None) for s in s_values]

    def test_too_few_layers(self, sine):
        report = s_limit_split(self._layers([0.5, 0.8, 0.9]), [0.0], sine)
        assert report.status == CheckStatus.NOT_EXERCISED
        assert report.s_values == [0.8, 0.9]

    def test_converging_split(self, mocker):
        nl = make_nonlinearity("cubic")
        parts = [
            _fake_profile(np.array([0.1, 0.20, 0.1]), np.array([0.01, 0.05, 0.01])),
            _fake_profile(np.array([0.1, 0.23, 0.1]), np.array([0.01, 0.03, 0.01])),
            _fake_profile(np.array([0.1, 0.24, 0.1]), np.array([0.01, 0.02, 0.01])),
        ]
        mocker.patch("core.hamiltonian.limits.hamiltonian_profile", side_effect=parts)
        report = s_limit_split(self._layers([0.8, 0.9, 0.95]), [0.0], nl)
        assert report.ode_target == pytest.approx([0.25], rel=1e-6)
        assert report.y_part_decreasing
        assert report.x_part_relative_error == pytest.approx(0.04, rel=1e-4)
        assert report.status == CheckStatus.PASS

    def test_growing_y_part_fails(self, mocker):
        nl = make_nonlinearity("cubic")
        parts = [
            _fake_profile(np.array([0.1, 0.24, 0.1]), np.array([0.01, 0.01, 0.01])),
            _fake_profile(np.array([0.1, 0.24, 0.1]), np.array([0.01, 0.02, 0.01])),
            _fake_profile(np.array([0.1, 0.24, 0.1]), np.array([0.01, 0.03, 0.01])),
        ]
        mocker.patch("core.hamiltonian.limits.hamiltonian_profile", side_effect=parts)
        report = s_limit_split(self._layers([0.8, 0.9, 0.95]), [0.0], nl)
        assert not report.y_part_decreasing
        assert report.status == CheckStatus.FAIL
