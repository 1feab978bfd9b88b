import itertools

import numpy as np
import pytest

from core.extension import (
    DirichletToNeumannMap,
    assemble_operator,
    check_comparison,
    check_hopf,
    check_max_principle,
    conjugate_mesh,
    conjugate_residual,
    dirichlet_mask,
    dtn_apply,
    dtn_map,
    dual_conjugate,
    energy,
    estimate_harnack,
    extend_by_convolution,
    extension_multiplier,
    far_field_model,
    fit_flux,
    build_field,
    harnack_mesh,
    hopf_barrier,
    hopf_report,
    is_symmetric,
    mesh_metrics,
    random_boundary,
    solve_dirichlet,
    solve_neumann_nonlinear,
    solve_robin,
    weight_moment,
    weighted_residual,
)
from core.fraclap import fraclap_pv
from core.kernels import extension_constant
from core.profiles.nonlinearities import make_nonlinearity
from helpers import arctan_field, arctan_layer, strip_mesh
from models import (
    BoundaryData,
    CheckStatus,
    ConvergenceError,
    DomainError,
    FracOrder,
    GridFunction,
    HalfStripMesh,
    MeshGeometry,
    PreconditionViolation,
    PropertySuiteConfig,
    SolverConfig,
    SolverStrategy,
    TailError,
    TopCondition,
)


def power_field(mesh):
    a = mesh.weight_exponent
    values = np.repeat((mesh.y_nodes ** (1.0 - a))[:, None], mesh.nx + 1, axis=1)
    return build_field(mesh, values, fit_flux(mesh, values))


class TestAssembly:
    def test_weight_moment_rejects_non_integrable(self):
        with pytest.raises(DomainError):
            weight_moment(0.0, 1.0, -1.0)

    @pytest.mark.parametrize("s", [0.2, 0.5, 0.8])
    def test_metrics_positive(self, s):
        mesh = strip_mesh(s)
        m = mesh_metrics(mesh, mesh.weight_exponent)
        assert np.all(m.cell_weight > 0.0)
        assert np.all(m.face_conductance > 0.0)
        assert np.isclose(m.x_measure.sum(), 2.0 * mesh.X)
        assert np.isclose(m.cell_weight.sum(), mesh.Y ** (1.0 + mesh.weight_exponent) / (1.0 + mesh.weight_exponent))

    def test_operator_symmetric_with_zero_row_sums(self, small_mesh):
        A = assemble_operator(small_mesh)
        assert is_symmetric(A)
        assert np.allclose(A @ np.ones(small_mesh.node_count), 0.0, atol=1e-10)
        assert np.all(A.diagonal() > 0.0)

    def test_radial_measure(self):
        mesh = HalfStripMesh(X=5.0, Y=5.0, nx=20, ny=10, weight_exponent=0.0,
                             geometry=MeshGeometry.RADIAL, dimension=3)
        m = mesh_metrics(mesh, 0.0)
        assert np.isclose(m.x_measure.sum(), mesh.X ** 3 / 3.0)

    def test_top_row_natural_by_default(self, small_mesh, asymptote_mesh):
        for mesh in (small_mesh, asymptote_mesh):
            mask = dirichlet_mask(mesh)
            assert not mask[-1, 1:-1].any()
            assert mask[:, [0, -1]].all()
            assert not mask[:-1, 1:-1].any()

    def test_far_field_top_is_opt_in(self):
        mesh = strip_mesh(0.5, top_condition=TopCondition.FAR_FIELD)
        assert dirichlet_mask(mesh)[-1].all()


class TestDirichlet:
    def test_constant_boundary(self, small_mesh):
        field, stats = solve_dirichlet(small_mesh, BoundaryData.constant(small_mesh, 2.5))
        assert np.allclose(field.values, 2.5, atol=1e-12)
        assert stats.converged
        assert stats.assembly_symmetric
        assert stats.residual_norm >= 0.0

    @pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
    def test_power_profile_is_exact(self, s):
        mesh = strip_mesh(s)
        a = mesh.weight_exponent
        boundary = BoundaryData.from_function(mesh, lambda x, y: y ** (1.0 - a) + 0.0 * x)
        field, _ = solve_dirichlet(mesh, boundary)
        expected = np.repeat((mesh.y_nodes ** (1.0 - a))[:, None], mesh.nx + 1, axis=1)
        assert np.allclose(field.values, expected, atol=1e-10 * mesh.Y ** (1.0 - a))
        assert np.allclose(field.flux_trace, -(1.0 - a), rtol=1e-6)

    def test_arctan_second_order(self):
        errors = []
        for nx, ny in [(64, 32), (128, 64)]:
            mesh = strip_mesh(0.5, X=8.0, Y=8.0, nx=nx, ny=ny)
            field, _ = solve_dirichlet(mesh, BoundaryData.from_function(mesh, arctan_field))
            X, Yg = np.meshgrid(mesh.x_nodes, mesh.y_nodes)
            errors.append(np.max(np.abs(field.values - arctan_field(X, Yg))))
        assert errors[1] <= 2e-2
        assert errors[1] <= 0.6 * errors[0]

    def test_trace_matches_bottom_row(self, small_mesh):
        field, _ = solve_dirichlet(small_mesh, BoundaryData.from_function(small_mesh, arctan_field))
        assert np.array_equal(field.trace.values, field.values[0])
        assert field.trace.x0 == -small_mesh.X

    def test_rejects_wrong_lengths(self, small_mesh):
        boundary = BoundaryData(bottom=np.zeros(5), top=np.zeros(small_mesh.nx + 1))
        with pytest.raises(ValueError):
            solve_dirichlet(small_mesh, boundary)


class TestConvolution:
    def test_multiplier_limits(self):
        assert extension_multiplier(0.3, np.array([0.0]))[0] == 1.0
        t = np.array([1e-8, 0.5, 2.0])
        assert np.allclose(extension_multiplier(0.5, t), np.exp(-t), rtol=1e-12)

    def test_constant(self, small_mesh, half):
        v = GridFunction.sample(lambda x: np.full_like(x, 0.7), -10.0, 10.0, 65,
                                left_asymptote=0.7, right_asymptote=0.7)
        field = extend_by_convolution(v, half, small_mesh)
        assert np.allclose(field.values, 0.7, atol=1e-12)

    def test_arctan_closed_form(self, half):
        mesh = strip_mesh(0.5, X=20.0, Y=20.0, nx=320, ny=64)
        field = extend_by_convolution(arctan_layer(40.0, 641), half, mesh)
        X, Yg = np.meshgrid(mesh.x_nodes, mesh.y_nodes)
        assert np.max(np.abs(field.values - arctan_field(X, Yg))) <= 1e-4

    @pytest.mark.parametrize("s", [0.3, 0.7])
    def test_monotone_rows(self, s):
        mesh = strip_mesh(s, X=20.0, Y=20.0, nx=160, ny=32)
        field = extend_by_convolution(arctan_layer(40.0, 321), FracOrder(s=s), mesh)
        assert np.all(np.diff(field.values, axis=1) >= -1e-12)

    def test_periodic_mode(self, half):
        mesh = strip_mesh(0.5, X=np.pi, Y=4.0, nx=64, ny=16)
        v = GridFunction.sample(np.cos, 0.0, 2.0 * np.pi, 64, periodic=True)
        field = extend_by_convolution(v, half, mesh)
        X, Yg = np.meshgrid(mesh.x_nodes, mesh.y_nodes)
        exact = np.cos(X) * np.exp(-Yg)
        assert np.allclose(field.values[1:], exact[1:], atol=1e-10)
        assert np.allclose(field.values[0], exact[0], atol=1e-5)

    def test_requires_asymptotes(self, small_mesh, half):
        v = GridFunction.sample(lambda x: np.exp(-x * x), -10.0, 10.0, 65)
        with pytest.raises(TailError):
            extend_by_convolution(v, half, small_mesh)

    def test_rejects_mismatched_weight(self, small_mesh):
        with pytest.raises(DomainError):
            extend_by_convolution(arctan_layer(), FracOrder(s=0.3), small_mesh)


class TestDtN:
    def test_constant_maps_to_zero(self, small_mesh, half):
        v = GridFunction.sample(lambda x: np.full_like(x, -0.4), -10.0, 10.0, 65,
                                left_asymptote=-0.4, right_asymptote=-0.4)
        flux = dtn_apply(v, half, small_mesh)
        assert np.allclose(flux.values, 0.0, atol=1e-8)

    def test_cosine_eigenfunction(self, half):
        mesh = strip_mesh(0.5, X=2.0 * np.pi, Y=8.0, nx=128, ny=64)
        v = GridFunction.sample(np.cos, 0.0, 2.0 * np.pi, 64, periodic=True)
        flux = dtn_apply(v, half, mesh)
        scaled = extension_constant(0.5) * flux.values[1:-1]
        assert np.max(np.abs(scaled - np.cos(mesh.x_nodes[1:-1]))) <= 1e-2

    def test_arctan_layer_equation(self, half, layer_mesh):
        v = arctan_layer(40.0, 321)
        flux = dtn_apply(v, half, layer_mesh)
        inner = np.abs(flux.x) <= 20.0
        expected = np.sin(np.pi * v.values) / np.pi
        assert np.max(np.abs(extension_constant(0.5) * flux.values - expected)[inner]) <= 1e-2

    @pytest.mark.slow
    @pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
    def test_consistency_with_principal_value(self, s):
        order = FracOrder(s=s)
        mesh = strip_mesh(s, X=20.0, Y=20.0, nx=320, ny=96)
        v = GridFunction.sample(lambda x: np.exp(-x * x / 4.0), -20.0, 20.0, 321,
                                left_asymptote=0.0, right_asymptote=0.0)
        flux = dtn_apply(v, order, mesh)
        reference = fraclap_pv(v, order).values.values
        inner = np.abs(v.x) <= 10.0
        error = np.max(np.abs(extension_constant(s) * flux.values - reference)[inner])
        assert error / np.max(np.abs(reference[inner])) <= 2e-2

    @pytest.mark.slow
    def test_consistency_on_reference_mesh(self, half):
        errors = []
        for nx, ny in [(512, 256), (1024, 512)]:
            mesh = strip_mesh(0.5, X=60.0, Y=40.0, nx=nx, ny=ny)
            v = GridFunction.sample(lambda x: np.exp(-x * x / 16.0), -60.0, 60.0, nx + 1,
                                    left_asymptote=0.0, right_asymptote=0.0)
            flux = dtn_apply(v, half, mesh)
            reference = fraclap_pv(v, half).values.values
            inner = np.abs(v.x) <= 30.0
            error = np.max(np.abs(extension_constant(0.5) * flux.values - reference)[inner])
            errors.append(error / np.max(np.abs(reference[inner])))
        assert errors[0] <= 2e-2
        assert errors[1] <= 0.5 * errors[0]


class TestFarFieldModel:
    def test_half_order_is_arctan(self, small_mesh, half):
        values = far_field_model(small_mesh, half)
        X, Yg = np.meshgrid(small_mesh.x_nodes, small_mesh.y_nodes)
        assert np.allclose(values[1:], arctan_field(X, Yg)[1:], atol=1e-12)
        assert values[0, 0] == -1.0 and values[0, -1] == 1.0

    def test_asymptote_sides(self, asymptote_mesh, half):
        values = far_field_model(asymptote_mesh, half, lower=-2.0, upper=3.0)
        assert np.all(values[:, 0] == -2.0)
        assert np.all(values[:, -1] == 3.0)

    def test_radial_is_zero(self, half):
        mesh = HalfStripMesh(X=5.0, Y=5.0, nx=16, ny=16, weight_exponent=0.0,
                             geometry=MeshGeometry.RADIAL, dimension=2)
        assert np.all(far_field_model(mesh, half) == 0.0)


class TestDtNMap:
    @pytest.fixture
    def dtn(self, small_mesh, half):
        return DirichletToNeumannMap(small_mesh, far_field_model(small_mesh, half), chunk=16)

    def test_schur_symmetric(self, dtn):
        assert np.array_equal(dtn.S, dtn.S.T)
        assert dtn.size == dtn.mesh.nx - 1

    def test_energy_matches_extension(self, dtn, small_mesh):
        v = np.tanh(small_mesh.x_nodes[1:-1])
        u = dtn.extend(v).ravel()
        A = assemble_operator(small_mesh)
        assert np.isclose(dtn.energy(v), 0.5 * u @ (A @ u), rtol=1e-10)

    def test_apply_is_flux_balance(self, dtn, small_mesh):
        v = np.tanh(small_mesh.x_nodes[1:-1])
        u = dtn.extend(v).ravel()
        A = assemble_operator(small_mesh)
        assert np.allclose(dtn.apply(v), (A @ u)[dtn.B], atol=1e-10)
        field = dtn.field(v)
        assert np.allclose(field.flux_trace[1:-1], dtn.flux(v), atol=1e-10)

    def test_cached_by_side_data(self, small_mesh, half):
        values = far_field_model(small_mesh, half)
        assert dtn_map(small_mesh, values) is dtn_map(small_mesh, values.copy())
        assert dtn_map(small_mesh, values) is not dtn_map(small_mesh, values + 1.0)


class TestNonlinear:
    def _init(self, mesh, order):
        values = far_field_model(mesh, order)
        return build_field(mesh, values, fit_flux(mesh, values))

    def test_zero_nonlinearity_harmonic_interpolant(self, small_mesh, half):
        nl = make_nonlinearity("zero")
        field, stats = solve_neumann_nonlinear(nl, half, small_mesh, self._init(small_mesh, half))
        assert stats.converged
        assert np.max(np.abs(field.flux_trace[1:-1])) <= 1e-7
        assert stats.interior_residual <= 1e-9

    @pytest.mark.parametrize("top, tolerance", [(TopCondition.FAR_FIELD, 1e-2), (TopCondition.NEUMANN, 2e-2)])
    def test_sine_layer_matches_arctan(self, half, top, tolerance):
        mesh = strip_mesh(0.5, X=40.0, Y=30.0, nx=320, ny=96, top_condition=top)
        nl = make_nonlinearity("sine_pi")
        field, stats = solve_neumann_nonlinear(nl, half, mesh, self._init(mesh, half), pin_x=0.0)
        x = mesh.x_nodes
        inner = np.abs(x) <= 10.0
        assert stats.boundary_residual <= 1e-7
        assert stats.lagrange_multiplier is not None
        assert abs(field.values[0, mesh.nx // 2]) <= 1e-12
        assert np.max(np.abs(field.values[0] - 2.0 / np.pi * np.arctan(x))[inner]) <= tolerance

    def test_top_row_is_natural_neumann(self, small_mesh, half):
        init = self._init(small_mesh, half)
        field, _ = solve_neumann_nonlinear(make_nonlinearity("zero"), half, small_mesh, init)
        A = assemble_operator(small_mesh)
        top = small_mesh.node_index(np.arange(1, small_mesh.nx), small_mesh.ny)
        # 顶边对偶单元的通量平衡为零，值不再等于远场模型
        assert weighted_residual(A, field.values.ravel(), top) <= 1e-9
        assert np.max(np.abs(field.values[-1] - init.values[-1])) > 1e-6

    def test_far_field_top_keeps_model(self, half):
        mesh = strip_mesh(0.5, top_condition=TopCondition.FAR_FIELD)
        init = self._init(mesh, half)
        field, _ = solve_neumann_nonlinear(make_nonlinearity("zero"), half, mesh, init)
        assert np.array_equal(field.values[-1], init.values[-1])

    def test_gradient_flow_zero_nonlinearity(self, small_mesh, half):
        nl = make_nonlinearity("zero")
        init = self._init(small_mesh, half)
        _, stats = solve_neumann_nonlinear(nl, half, small_mesh, init, SolverStrategy.GRADIENT_FLOW)
        assert stats.converged
        assert len(stats.energy_history) >= 2

    def test_gradient_flow_energy_decreases(self, small_mesh, half):
        nl = make_nonlinearity("cubic")
        init = self._init(small_mesh, half)
        solver = SolverConfig(strategy=SolverStrategy.GRADIENT_FLOW, gradient_max_iterations=40)
        try:
            _, stats = solve_neumann_nonlinear(nl, half, small_mesh, init, SolverStrategy.GRADIENT_FLOW,
                                               pin_x=0.0, solver=solver)
        except ConvergenceError as e:
            stats = e.stats
        history = np.array(stats.energy_history)
        assert history.size >= 2
        assert np.all(np.diff(history) < 0.0)

    def test_newton_never_takes_ascent_step(self, small_mesh, half, mocker):
        mocker.patch("core.extension.nonlinear._merit", side_effect=itertools.count())
        init = self._init(small_mesh, half)
        with pytest.raises(ConvergenceError) as excinfo:
            solve_neumann_nonlinear(make_nonlinearity("cubic"), half, small_mesh, init, pin_x=0.0)
        assert "线搜索停滞" in str(excinfo.value)
        assert excinfo.value.stats.iterations == 1
        np.testing.assert_array_equal(excinfo.value.partial.values[0, 1:-1], init.values[0, 1:-1])

    def test_non_convergence_carries_partial(self, small_mesh, half):
        nl = make_nonlinearity("cubic")
        solver = SolverConfig(max_iterations=1)
        with pytest.raises(ConvergenceError) as excinfo:
            solve_neumann_nonlinear(nl, half, small_mesh, self._init(small_mesh, half), pin_x=0.0, solver=solver)
        assert excinfo.value.stats is not None
        assert not excinfo.value.stats.converged


class TestDuality:
    @pytest.mark.parametrize("s", [0.3, 0.5, 0.7])
    def test_power_profile_gives_constant(self, s):
        mesh = strip_mesh(s)
        w = dual_conjugate(power_field(mesh))
        assert w.mesh.weight_exponent == -mesh.weight_exponent
        assert np.allclose(w.values, -(1.0 - mesh.weight_exponent), rtol=1e-10)
        assert conjugate_residual(w) <= 1e-8

    def test_conjugate_mesh(self, small_mesh):
        dual = conjugate_mesh(small_mesh)
        assert dual.weight_exponent == -small_mesh.weight_exponent
        assert dual.nx == small_mesh.nx and dual.grading == small_mesh.grading

    def test_residual_decreases_under_refinement(self):
        residuals = []
        for nx, ny in [(64, 32), (128, 64)]:
            mesh = strip_mesh(0.5, X=8.0, Y=8.0, nx=nx, ny=ny)
            u, _ = solve_dirichlet(mesh, BoundaryData.from_function(mesh, arctan_field))
            residuals.append(conjugate_residual(dual_conjugate(u)))
        assert residuals[1] < residuals[0]


class TestEnergy:
    def test_constant_in_well_has_zero_energy(self, small_mesh):
        values = np.ones(small_mesh.shape)
        u = build_field(small_mesh, values, np.zeros(small_mesh.nx + 1))
        assert energy(u, make_nonlinearity("cubic"), 5.0) == 0.0

    def test_linear_in_potential(self, small_mesh):
        u, _ = solve_dirichlet(small_mesh, BoundaryData.from_function(small_mesh, arctan_field))
        nl = make_nonlinearity("cubic")
        bulk = energy(u, make_nonlinearity("zero"), 5.0)
        single = energy(u, nl, 5.0)
        double = energy(u, nl.scaled(0.5), 5.0)
        assert np.isclose(double - single, single - bulk, rtol=1e-12, atol=1e-14)

    def test_rejects_large_radius(self, small_mesh):
        u = power_field(small_mesh)
        with pytest.raises(DomainError):
            energy(u, make_nonlinearity("cubic"), 20.0)


class TestProperties:
    @pytest.fixture
    def mesh(self):
        return strip_mesh(0.3, X=2.0, Y=2.0, nx=16, ny=16)

    def test_zero_boundary(self, mesh):
        field, _ = solve_dirichlet(mesh, BoundaryData.constant(mesh, 0.0))
        report = check_max_principle(field)
        assert report.status == CheckStatus.PASS
        assert report.value == 0.0

    def test_hat_boundary(self, mesh):
        boundary = BoundaryData.from_function(mesh, lambda x, y: np.where(y == 0.0, np.maximum(0.0, 1.0 - np.abs(x)), 0.0))
        field, _ = solve_dirichlet(mesh, boundary)
        assert check_max_principle(field).passed

    def test_random_nonnegative_boundaries(self, mesh):
        for seed in range(100):
            rng = np.random.default_rng(seed)
            field, _ = solve_dirichlet(mesh, random_boundary(mesh, rng))
            assert check_max_principle(field, tol=1e-12).passed, seed

    def test_comparison(self, mesh, rng):
        lower = random_boundary(mesh, rng)
        bump = random_boundary(mesh, rng, scale=0.5)
        upper = BoundaryData(
            bottom=lower.bottom + bump.bottom,
            top=lower.top + bump.top,
            left=lower.left + bump.left,
            right=lower.right + bump.right,
        )
        assert check_comparison(mesh, lower, upper).passed
        with pytest.raises(PreconditionViolation):
            check_comparison(mesh, upper, lower)

    def test_harnack_constant_solution(self):
        mesh = harnack_mesh(FracOrder(s=0.5), resolution=8)
        phi = solve_robin(mesh, np.zeros(mesh.nx + 1), np.ones(mesh.shape))
        assert np.allclose(phi, 1.0, atol=1e-12)

    def test_harnack_classical_bound(self):
        ratio = estimate_harnack(FracOrder(s=0.5), trials=4, d_bound=0.0, resolution=16)
        assert 1.0 <= ratio <= 25.0 / 9.0

    @pytest.mark.slow
    @pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
    def test_harnack_stable_under_refinement(self, s):
        order = FracOrder(s=s)
        coarse = estimate_harnack(order, trials=3, seed=7, d_bound=1.0, resolution=16)
        fine = estimate_harnack(order, trials=3, seed=7, d_bound=1.0, resolution=32)
        assert np.isfinite(coarse) and coarse >= 1.0
        assert abs(fine - coarse) / coarse <= PropertySuiteConfig().harnack_stability

    def test_hopf_barrier(self, mesh):
        flux = check_hopf(hopf_barrier(mesh), mesh.nx // 2)
        assert flux < 0.0
        assert hopf_report(flux).status == CheckStatus.PASS

    def test_hopf_zero_field(self, mesh):
        field = build_field(mesh, np.zeros(mesh.shape), np.zeros(mesh.nx + 1))
        with pytest.raises(PreconditionViolation):
            check_hopf(field, mesh.nx // 2)

    def test_hopf_solver_instance(self, mesh):
        boundary = BoundaryData.from_function(
            mesh, lambda x, y: np.where(y == 0.0, (x / mesh.X) ** 2, 1.0)
        )
        field, _ = solve_dirichlet(mesh, boundary)
        assert check_hopf(field, mesh.nx // 2) < 0.0
