"""Position-velocity shear: construction, inverses, exactness."""

from fractions import Fraction

import numpy as np
import pytest

from stochosc.catalog import build_model
from stochosc.poly import MultiPolynomial, Polynomial
from stochosc.system import (
    ConstantMatrix,
    LienardForm,
    OscillatorModel,
    PhasePoint,
    StateDependent,
    reduce_to_phase_system,
)
from stochosc.transform import build_transformed_system, phi_forward, phi_inverse

from helpers import random_points


def test_requires_separable_damping():
    with pytest.raises(ValueError, match="separable"):
        build_transformed_system(build_model("duffing"))


def test_requires_potential():
    # n = 1 autofills the potential, so only a multi-component model can
    # reach the missing-potential branch
    model = OscillatorModel(
        name="no_potential",
        damping=LienardForm((Polynomial((1.0,)), Polynomial((1.0,)))),
        restoring=(MultiPolynomial(2, {(0, 1): 1.0}), MultiPolynomial(2, {(1, 0): 1.0})),
        diffusion=ConstantMatrix(np.eye(2)),
    )
    assert model.potential is None
    with pytest.raises(ValueError, match="potential"):
        build_transformed_system(model)


def test_forward_inverse_round_trip():
    ts = build_transformed_system(build_model("vanderpol"))
    pts = random_points(2, 40, key=61)
    for x, y in pts:
        p = PhasePoint([x], [y])
        q = phi_inverse(phi_forward(p, ts.F), ts.F)
        np.testing.assert_array_equal(q.x, p.x)
        np.testing.assert_allclose(q.y, p.y, rtol=0, atol=1e-15)


def test_dimension_mismatch_rejected():
    ts = build_transformed_system(build_model("vanderpol"))
    with pytest.raises(ValueError):
        phi_forward(PhasePoint([1.0, 2.0], [0.0, 0.0]), ts.F)


def test_vanderpol_antiderivatives():
    ts = build_transformed_system(build_model("vanderpol"))
    # f = 0.2(x^2 - 1) integrates to F = 0.2 x^3 / 3 - 0.2 x
    F = ts.F[0]
    assert F.coeffs == (0.0, -0.2, 0.0, 0.2 / 3.0)
    # H = int F = -0.1 x^2 + 0.2 x^4 / 12
    assert ts.H == MultiPolynomial(1, {(2,): -0.1, (4,): 0.2 / 12.0})


def test_coupled_lienard_H_is_sixth_power_sum():
    ts = build_transformed_system(build_model("coupled_lienard"))
    # f_i = x^4, F_i = x^5/5, int F_i = x^6/30
    want = MultiPolynomial(2, {(6, 0): 1.0 / 30.0, (0, 6): 1.0 / 30.0})
    assert (ts.H - want).max_abs_coeff() == 0.0


def test_position_drift_vanishes_on_the_shear_locus():
    """The transformed x-drift is y_i - F_i(x_i); substituting the locus
    y_i = F_i(x_i) must cancel exactly, coefficient by coefficient."""
    for name in ("vanderpol", "coupled_lienard", "linear"):
        ts = build_transformed_system(build_model(name))
        n = ts.n
        for i in range(n):
            drift_i = ts.system.drift[i]
            locus = ts.F[i].to_multi(2 * n, i)
            subbed = drift_i.substitute(n + i, locus)
            assert subbed.is_zero(), name


def test_velocity_drift_is_potential_gradient_only():
    ts = build_transformed_system(build_model("vanderpol"))
    model = ts.base
    want = -model.potential.partial(0).embed(2)
    assert (ts.system.drift[1] - want).max_abs_coeff() == 0.0


def test_constant_diffusion_passes_through():
    ts = build_transformed_system(build_model("linear"))
    np.testing.assert_array_equal(ts.system.constant_diffusion, [[0.0], [0.3]])


def test_velocity_dependent_diffusion_gets_sheared():
    # theta = 2 so F(x) = 2x; sigma = 0.5 y becomes 0.5 (y - 2x)
    model = OscillatorModel(
        name="sheared_noise",
        damping=LienardForm((Polynomial((2.0,)),)),
        restoring=(MultiPolynomial(1, {(1,): 1.0}),),
        diffusion=StateDependent(((MultiPolynomial(2, {(0, 1): 0.5}),),)),
    )
    ts = build_transformed_system(model)
    entry = ts.system.diffusion_rows[1][0]
    assert entry == MultiPolynomial(2, {(0, 1): 0.5, (1, 0): -1.0})


def test_transformed_dynamics_agree_with_direct_under_change_of_variables():
    """d/dt of eta = y + F(x) along the direct drift equals the transformed
    drift at the image point; checked pointwise at random states."""
    model = build_model("vanderpol")
    direct = reduce_to_phase_system(model)
    ts = build_transformed_system(model)
    f = model.lienard_factors()[0]
    pts = random_points(2, 30, key=62)
    for x, y in pts:
        dd = direct.drift_at(np.array([x, y]))
        eta = y + ts.F[0](x)
        td = ts.system.drift_at(np.array([x, eta]))
        # x-drift: eta - F = y
        assert abs(td[0] - dd[0]) < 1e-12 * max(1.0, abs(dd[0]))
        # eta-drift: dy/dt + f(x) * dx/dt = -g(x)
        chain = dd[1] + f(x) * y
        assert abs(td[1] - chain) < 1e-10 * max(1.0, abs(chain))


def test_exact_rational_bookkeeping_for_H():
    # integrate twice with rationals as the oracle
    ts = build_transformed_system(build_model("vanderpol"))
    f = [Fraction(-1, 5), Fraction(0), Fraction(1, 5)]
    F = [Fraction(0)] + [c / (k + 1) for k, c in enumerate(f)]
    H = [Fraction(0)] + [c / (k + 1) for k, c in enumerate(F)]
    assert set(ts.H.terms) == {(2,), (4,)}
    for exps, c in ts.H.terms.items():
        assert Fraction(c).limit_denominator(10 ** 9) == H[exps[0]]
