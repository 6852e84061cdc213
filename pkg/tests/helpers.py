"""Hand-built models shared across test modules."""

import numpy as np

from stochosc.poly import MultiPolynomial, Polynomial
from stochosc.system import (
    ConstantMatrix,
    GeneralDrift,
    LienardForm,
    OscillatorModel,
    StateDependent,
)


def build_antidamped_cubic(sigma=1.0):
    """b = -y^3 pumps energy; no certificate route applies."""
    b = MultiPolynomial(2, {(0, 3): -1.0})
    g = MultiPolynomial(1, {(1,): 1.0})
    return OscillatorModel(
        name="antidamped_cubic",
        damping=GeneralDrift((b,)),
        restoring=(g,),
        diffusion=ConstantMatrix([[float(sigma)]]),
    )


def build_explosive_quintic(sigma=1.0):
    """x'' = +x^5: superlinear repulsion, finite-time blow-up."""
    b = MultiPolynomial(2, {})
    g = MultiPolynomial(1, {(5,): -1.0})
    return OscillatorModel(
        name="explosive_quintic",
        damping=GeneralDrift((b,)),
        restoring=(g,),
        diffusion=ConstantMatrix([[float(sigma)]]),
    )


def build_shear_regression():
    """f = 3x^2 with g = -x: x g(x) < 0 near 0, yet the scalar
    transformed route certifies it."""
    f = Polynomial((0.0, 0.0, 3.0))
    g = MultiPolynomial(1, {(1,): -1.0})
    return OscillatorModel(
        name="shear_regression",
        damping=LienardForm((f,)),
        restoring=(g,),
        diffusion=ConstantMatrix([[1.0]]),
    )


def build_pure_noise(sigma=1.0):
    """Zero damping and zero restoring force: dv = sigma dW exactly."""
    b = MultiPolynomial(2, {})
    g = MultiPolynomial(1, {})
    return OscillatorModel(
        name="pure_noise",
        damping=GeneralDrift((b,)),
        restoring=(g,),
        diffusion=ConstantMatrix([[float(sigma)]]),
        potential=MultiPolynomial(1, {}),
    )


def build_velocity_noise(coeff=0.5):
    """sigma = coeff * y: the noise amplitude rides on the velocity, so
    the Euler scheme really is order 1/2 here."""
    b = MultiPolynomial(2, {(0, 1): 0.5})
    g = MultiPolynomial(1, {(1,): 1.0})
    sig = StateDependent(((MultiPolynomial(2, {(0, 1): float(coeff)}),),))
    return OscillatorModel(
        name="velocity_noise",
        damping=GeneralDrift((b,)),
        restoring=(g,),
        diffusion=sig,
    )


def build_position_noise():
    """sigma = x on the velocity row; the scheme correction term vanishes
    so the observed order stays near 1."""
    b = MultiPolynomial(2, {(0, 1): 0.5})
    g = MultiPolynomial(1, {(1,): 1.0})
    sig = StateDependent(((MultiPolynomial(2, {(1, 0): 1.0}),),))
    return OscillatorModel(
        name="position_noise",
        damping=GeneralDrift((b,)),
        restoring=(g,),
        diffusion=sig,
    )


def random_points(nvars, count, lo=-3.0, hi=3.0, key=2718):
    rng = np.random.Generator(np.random.Philox(key=[key, nvars]))
    return rng.uniform(lo, hi, size=(count, nvars))
