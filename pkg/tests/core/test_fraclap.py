import numpy as np
import pytest

from core.fraclap import fraclap_fourier, fraclap_pv, nonlocal_residual, pv_weights
from core.profiles.nonlinearities import make_nonlinearity
from models import AsymptoteDecay, DomainError, FracOrder, GridFunction, OperatorMethod, TailError


def bump(half_width=20.0, count=2048):
    return GridFunction.sample(
        lambda x: np.exp(-x * x), -half_width, half_width, count, left_asymptote=0.0, right_asymptote=0.0
    )


def periodic_mode(k, count):
    return GridFunction.sample(lambda x: np.cos(k * x), 0.0, 2.0 * np.pi, count, periodic=True)


class TestPrincipalValue:
    def test_weights_positive(self):
        W = pv_weights(200, 0.1, 0.7)
        assert W[0] == 0.0
        assert np.all(W[1:] > 0.0)

    def test_constant_maps_to_zero(self):
        v = GridFunction.sample(lambda x: np.full_like(x, 3.0), -5.0, 5.0, 101)
        report = fraclap_pv(v, FracOrder(s=0.4))
        assert np.allclose(report.values.values[report.valid], 0.0, atol=1e-10)

    def test_periodic_cosine(self):
        v = periodic_mode(1, 2048)
        report = fraclap_pv(v, FracOrder(s=0.5))
        assert np.max(np.abs(report.values.values - v.values)) <= 1e-3

    def test_arctan_layer(self):
        v = GridFunction.sample(
            lambda x: 2.0 / np.pi * np.arctan(x), -50.0, 50.0, 4001,
            left_asymptote=-1.0, right_asymptote=1.0,
            asymptote_decay=AsymptoteDecay.POWER, decay_exponent=1.0,
        )
        report = fraclap_pv(v, FracOrder(s=0.5))
        inner = np.abs(v.x) <= 10.0
        expected = np.sin(np.pi * v.values) / np.pi
        assert np.max(np.abs(report.values.values - expected)[inner]) <= 1e-3

    def test_linearity(self):
        order = FracOrder(s=0.35)
        x0, x1, count = -15.0, 15.0, 301
        v = GridFunction.sample(lambda x: np.exp(-x * x), x0, x1, count)
        w = GridFunction.sample(lambda x: x * np.exp(-x * x / 2.0), x0, x1, count)
        combo = v.with_values(2.0 * v.values - 3.0 * w.values)
        lhs = fraclap_pv(combo, order)
        rhs = 2.0 * fraclap_pv(v, order).values.values - 3.0 * fraclap_pv(w, order).values.values
        assert np.allclose(lhs.values.values[lhs.valid], rhs[lhs.valid], rtol=0.0, atol=1e-12)

    def test_translation_equivariance(self):
        order = FracOrder(s=0.6)
        v = GridFunction.sample(lambda x: np.exp(-x * x), -15.0, 15.0, 301, left_asymptote=0.0, right_asymptote=0.0)
        shifted = v.with_values(np.concatenate([[0.0], v.values[:-1]]))
        base = fraclap_pv(v, order)
        moved = fraclap_pv(shifted, order)
        interior = base.valid[:-1] & moved.valid[1:]
        assert np.allclose(moved.values.values[1:][interior], base.values.values[:-1][interior], rtol=0.0, atol=1e-14)

    def test_positive_at_strict_maximum(self):
        v = bump(10.0, 201)
        report = fraclap_pv(v, FracOrder(s=0.3))
        assert report.values.values[100] > 0.0

    def test_undeclared_growth_raises_tail_error(self):
        v = GridFunction.sample(lambda x: x, -5.0, 5.0, 101)
        with pytest.raises(TailError):
            fraclap_pv(v, FracOrder(s=0.5))

    def test_edge_nodes_invalid(self):
        report = fraclap_pv(bump(10.0, 201), FracOrder(s=0.5), edge_margin=3)
        assert not report.valid[:3].any() and not report.valid[-3:].any()
        assert report.valid[3:-3].all()

    def test_rejects_short_or_multidimensional_input(self):
        with pytest.raises(DomainError):
            fraclap_pv(GridFunction(x0=0.0, h=1.0, values=[1.0, 2.0, 3.0]), FracOrder(s=0.5))
        with pytest.raises(DomainError):
            fraclap_pv(bump(5.0, 64), FracOrder(s=0.5, n=2))


class TestFourier:
    def test_zero_input(self):
        v = GridFunction(x0=0.0, h=0.1, values=np.zeros(64), periodic=True)
        report = fraclap_fourier(v, FracOrder(s=0.5))
        assert np.array_equal(report.values.values, np.zeros(64))

    @pytest.mark.parametrize("s", [0.2, 0.5, 0.8])
    def test_eigenfunction(self, s):
        v = periodic_mode(3, 256)
        report = fraclap_fourier(v, FracOrder(s=s))
        assert np.max(np.abs(report.values.values - 3.0 ** (2.0 * s) * v.values)) <= 1e-10

    def test_periodic_length_must_be_power_of_two(self):
        with pytest.raises(DomainError):
            fraclap_fourier(periodic_mode(1, 100), FracOrder(s=0.5))

    @pytest.mark.parametrize("s", [0.3, 0.5, 0.6, 0.7])
    def test_agrees_with_principal_value(self, s):
        order = FracOrder(s=s)
        v = bump()
        pv = fraclap_pv(v, order)
        ft = fraclap_fourier(v, order)
        inner = np.abs(v.x) <= 5.0
        gap = np.max(np.abs(pv.values.values - ft.values.values)[inner])
        assert gap <= max(1e-3, 10.0 * max(pv.tail_estimate, ft.tail_estimate))
        assert gap <= 1e-3


class TestResidual:
    def test_constant_at_zero_of_f(self):
        v = GridFunction.sample(lambda x: np.ones_like(x), -5.0, 5.0, 101)
        residual = nonlocal_residual(v, make_nonlinearity("cubic"), FracOrder(s=0.5))
        values = residual.values[~np.isnan(residual.values)]
        assert values.size > 0
        assert np.allclose(values, 0.0, atol=1e-10)

    def test_arithmetic_identity(self):
        order = FracOrder(s=0.45)
        nl = make_nonlinearity("cubic")
        v = GridFunction.sample(lambda x: 0.5 * np.exp(-x * x) * np.cos(2.0 * x), -12.0, 12.0, 241)
        report = fraclap_pv(v, order)
        residual = nonlocal_residual(v, nl, order, OperatorMethod.PV)
        expected = report.values.values - nl.f(v.values)
        assert np.array_equal(residual.values[report.valid], expected[report.valid])
        assert np.all(np.isnan(residual.values[~report.valid]))

    def test_exact_layer_residual(self):
        v = GridFunction.sample(
            lambda x: 2.0 / np.pi * np.arctan(x), -50.0, 50.0, 4001,
            left_asymptote=-1.0, right_asymptote=1.0,
            asymptote_decay=AsymptoteDecay.POWER, decay_exponent=1.0,
        )
        residual = nonlocal_residual(v, make_nonlinearity("sine_pi"), FracOrder(s=0.5))
        inner = np.abs(v.x) <= 10.0
        assert np.nanmax(np.abs(residual.values[inner])) <= 1e-3
