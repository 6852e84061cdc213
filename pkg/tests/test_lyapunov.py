"""Certificate construction and the verification domain."""

import json

import numpy as np
import pytest

from stochosc.catalog import build_coupled_lienard, build_model
from stochosc.lyapunov import (
    DEFAULT_DOMAIN,
    ROUTE_DAMPING,
    ROUTE_ORDER,
    ROUTE_SCALAR,
    ROUTE_TRACE,
    ROUTE_VECTOR,
    VerificationDomain,
    asymptotic_sign,
    build_energy_lyapunov,
    build_transformed_lyapunov_scalar,
    build_transformed_lyapunov_vector,
    check_damping_bound,
    check_trace_bound,
    verify_nonexplosion,
)
from stochosc.poly import MultiPolynomial, Polynomial

from helpers import build_antidamped_cubic, build_velocity_noise


class TestAsymptoticSign:
    def test_positive_leading_always_trusted(self):
        assert asymptotic_sign(Polynomial((0.0, 0.0, 3.0))) == ("pos", 2)
        # tiny positive lead on a huge constant still counts as pos
        assert asymptotic_sign(Polynomial((1e9, 0.0, 1e-14)))[0] == "pos"

    def test_negative_leading_needs_margin(self):
        assert asymptotic_sign(Polynomial((0.0, 0.0, -3.0))) == ("neg", 2)
        # a negative lead buried in coefficient noise is indeterminate
        sign, _ = asymptotic_sign(Polynomial((1e9, 0.0, -1e-14)))
        assert sign == "indeterminate"

    def test_zero_polynomial(self):
        assert asymptotic_sign(Polynomial.zero()) == ("zero", -1)


class TestDomain:
    def test_grid_resolution_by_dimension(self):
        d = VerificationDomain()
        assert d.resolution(1) == 201
        assert d.resolution(2) == 201
        assert d.resolution(3) == 41
        assert d.resolution(4) == 41
        assert d.resolution(5) is None

    def test_grid_shapes(self):
        d = VerificationDomain(R_check=5.0)
        g2 = d.grid(2)
        assert g2.shape == (201 * 201, 2)
        assert g2.min() == -5.0 and g2.max() == 5.0
        g6 = d.grid(6)
        assert g6.shape == (d.mc_points, 6)
        assert np.abs(g6).max() <= 5.0

    def test_grid_is_cached(self):
        d = VerificationDomain()
        assert d.grid(2) is d.grid(2)

    def test_ray_directions_include_axes(self):
        d = VerificationDomain()
        dirs = d.ray_directions(2)
        assert dirs.shape == (2 * 2 + 2 * d.n_random_rays, 2)
        for axis in ([1, 0], [-1, 0], [0, 1], [0, -1]):
            assert any(np.allclose(row, axis) for row in dirs)
        norms = np.linalg.norm(dirs, axis=1)
        np.testing.assert_allclose(norms, 1.0, rtol=1e-12)

    def test_rays_come_in_opposite_pairs(self):
        dirs = VerificationDomain().ray_directions(4)
        seen = {tuple(np.round(row, 12)) for row in dirs}
        for row in dirs:
            assert tuple(np.round(-row, 12)) in seen

    def test_describe_lists_grid_policy(self):
        desc = VerificationDomain(R_check=7.0).describe()
        assert desc["R_check"] == 7.0
        assert desc["grid"]["points_per_axis_2d"] == 201
        assert desc["grid"]["points_per_axis_4d"] == 41
        assert desc["grid"]["mc_points"] == 100000
        assert desc["grid"]["random_rays"] == 32

    def test_override_points_per_axis(self):
        d = VerificationDomain(points_per_axis=11)
        assert d.resolution(2) == 11
        assert d.grid(2).shape == (121, 2)

    def test_invalid_parameters_rejected(self):
        with pytest.raises(ValueError):
            VerificationDomain(R_check=0.0)
        with pytest.raises(ValueError):
            VerificationDomain(points_per_axis=1)


class TestLyapunovBuilders:
    def test_energy_builder_value(self):
        model = build_model("duffing")
        V = build_energy_lyapunov(model, K=2.0)
        # G(x) + y^2/2 + K at (2, 1): G(2) = 2 + 12 = 14
        assert V(np.array([2.0, 1.0])) == 14.0 + 0.5 + 2.0
        assert V.K == 2.0
        assert V.total() == V.V + 2.0

    def test_scalar_builder_uses_damping_integral(self):
        model = build_model("vanderpol")
        V = build_transformed_lyapunov_scalar(model)
        # W(1) = int_0^1 (F + g) = 23/48 for the default coefficients
        got = V(np.array([1.0, 0.0]))
        assert abs(got - 23.0 / 48.0) < 1e-15

    def test_vector_builder_combines_H_and_G(self):
        model = build_model("coupled_lienard")
        V = build_transformed_lyapunov_vector(model, K=1.0)
        x = np.array([1.0, 2.0, 0.0, 0.0])
        H = 1.0 / 30.0 + 64.0 / 30.0
        G = -(1.0 + 16.0) - 0.5 * (1.0 + 2.0)
        assert abs(V(x) - (H + G + 1.0)) < 1e-12


class TestRouteCheckers:
    def test_damping_bound_requires_constant_sigma(self):
        with pytest.raises(ValueError, match="constant"):
            check_damping_bound(build_velocity_noise())

    def test_trace_bound_rejects_nonpositive_c(self):
        with pytest.raises(ValueError, match="positive"):
            check_trace_bound(build_model("duffing"), c=0.0)

    def test_trace_bound_passes_vector_duffing_with_zero_K1(self):
        res = check_trace_bound(build_model("vector_duffing"))
        assert res.passed
        assert res.witness["K1"] == 0.0

    def test_damping_bound_fails_for_energy_pumping(self):
        res = check_damping_bound(build_antidamped_cubic())
        assert not res.passed
        assert "alpha_required_on_grid" in res.witness


class TestVerify:
    def test_route_order_is_fixed(self):
        assert ROUTE_ORDER == (ROUTE_DAMPING, ROUTE_TRACE, ROUTE_SCALAR, ROUTE_VECTOR)

    def test_unknown_route_rejected(self):
        with pytest.raises(KeyError, match="unknown route"):
            verify_nonexplosion(build_model("duffing"), routes=("energy",))

    def test_linear_certifies_via_damping(self):
        cert = verify_nonexplosion(build_model("linear"))
        assert cert.theorem_applied == ROUTE_DAMPING
        assert cert.constants["alpha"] == 0.0
        assert cert.constants["c"] == 1.0
        # K = sigma^2 / 2 with no potential dip: 0.09 / 2
        assert abs(cert.constants["K"] - 0.045) < 1e-15

    def test_vector_duffing_uses_trace_route(self):
        cert = verify_nonexplosion(build_model("vector_duffing"))
        assert cert.theorem_applied == ROUTE_TRACE
        assert cert.constants["K"] == 0.0

    def test_every_passing_certificate_ends_with_generator_bound(self):
        for name in ("duffing", "vanderpol", "vector_duffing", "coupled_lienard"):
            cert = verify_nonexplosion(build_model(name))
            assert cert.verified, name
            last = cert.conditions[-1]
            assert last.name == "generator_bound"
            assert last.passed
            assert last.witness["grid_min_cV_minus_LV"] >= -1e-9
            assert last.witness["grid_min_V"] >= 0.0

    def test_report_text_names_model_and_route(self):
        cert = verify_nonexplosion(build_model("duffing"))
        assert "model: duffing" in cert.report_text
        assert "certified via energy_damping_bound" in cert.report_text

    def test_failed_certificate_prefixes_conditions_with_route(self):
        cert = verify_nonexplosion(build_antidamped_cubic())
        assert not cert.verified
        assert cert.constants == {}
        names = [c.name for c in cert.conditions]
        assert any(n.startswith("energy_damping_bound.") for n in names)
        assert any(n.startswith("energy_trace_bound.") for n in names)
        assert "no certificate route applies" in cert.report_text

    def test_json_schema_pads_all_constant_keys(self):
        cert = verify_nonexplosion(build_model("duffing"))
        doc = json.loads(cert.to_json())
        assert set(doc) == {"theorem", "conditions", "constants", "domain"}
        assert set(doc["constants"]) == {"c", "K", "K1", "K2", "c1", "c2", "alpha"}
        assert doc["constants"]["c1"] is None
        assert doc["constants"]["alpha"] == 0.0
        assert doc["theorem"] == ROUTE_DAMPING
        for cond in doc["conditions"]:
            assert set(cond) == {"name", "status", "witness"}
            assert cond["status"] == "pass"

    def test_verification_is_deterministic(self):
        a = verify_nonexplosion(build_model("coupled_lienard"))
        b = verify_nonexplosion(build_model("coupled_lienard"))
        assert a.to_json() == b.to_json()
        assert a.report_text == b.report_text

    def test_domain_override_propagates_to_json(self):
        dom = VerificationDomain(R_check=6.0, points_per_axis=51)
        cert = verify_nonexplosion(build_model("duffing"), domain=dom)
        assert cert.verified
        doc = json.loads(cert.to_json())
        assert doc["domain"]["R_check"] == 6.0
        assert doc["domain"]["grid"]["points_per_axis_2d"] == 51

    def test_route_restriction_skips_earlier_routes(self):
        cert = verify_nonexplosion(build_model("vanderpol"), routes=(ROUTE_SCALAR,))
        assert cert.theorem_applied == ROUTE_SCALAR
        assert {"c1", "c2"} <= set(cert.constants)

    def test_three_component_model_uses_monte_carlo_grid(self):
        # n = 3 puts the phase space at 6 variables, past the dense-grid cap
        model = build_coupled_lienard(xi=(1.0, 1.0, 1.0), a=(1.0, 1.0, 1.0))
        cert = verify_nonexplosion(model, routes=(ROUTE_VECTOR,))
        assert cert.verified
        assert cert.theorem_applied == ROUTE_VECTOR
