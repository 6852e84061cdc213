"""Position-velocity shear transform for separable-damping oscillators.

For damping b_i = f_i(x_i) y_i, the map (x, y) -> (x, y + F(x)) with
F_i the antiderivative of f_i turns the phase-space system into

    dx_i  = (y_i - F_i(x_i)) dt
    dy_i  = -dG/dx_i dt + sum_j sigma_ij(x, y - F(x)) dW_j

which absorbs the damping into the x-equation.  The velocity component
of the map is linear in y and F depends on x only, while the x-equation
carries no noise, so the Ito correction of the map vanishes and the two
systems are pathwise equivalent.  H(x) = sum_i integral_0^{x_i} F_i is
the transformed system's accumulated damping potential.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .poly import MultiPolynomial, Polynomial
from .system import (
    ConstantMatrix,
    LienardForm,
    OscillatorModel,
    PhasePoint,
    PhaseSystem,
)

__all__ = [
    "TransformedSystem",
    "build_transformed_system",
    "phi_forward",
    "phi_inverse",
]


@dataclass(frozen=True)
class TransformedSystem:
    """The sheared first-order system plus the data needed to map back."""

    base: OscillatorModel
    F: tuple[Polynomial, ...]
    H: MultiPolynomial
    system: PhaseSystem

    @property
    def n(self) -> int:
        return self.base.n


def _shear_substitute(entry: MultiPolynomial, F: tuple[Polynomial, ...]) -> MultiPolynomial:
    """sigma(x, y) -> sigma(x, y - F(x)), exact polynomial composition."""
    n = len(F)
    nv = 2 * n
    out = entry
    for j in range(n):
        if F[j].is_zero():
            continue
        repl = MultiPolynomial.variable(nv, n + j) - F[j].to_multi(nv, j)
        out = out.substitute(n + j, repl)
    return out


def build_transformed_system(model: OscillatorModel) -> TransformedSystem:
    """Shear a separable-damping model; rejects general b(x, y) damping."""
    if not isinstance(model.damping, LienardForm):
        raise ValueError("transform requires separable damping f_i(x_i) * y_i")
    if model.potential is None:
        raise ValueError("transform requires the restoring force's potential")
    n = model.n
    nv = 2 * n
    F = tuple(f.antiderivative() for f in model.damping.f)
    H = MultiPolynomial.zero(n)
    for i, Fi in enumerate(F):
        H = H + Fi.antiderivative().to_multi(n, i)

    drift = []
    for i in range(n):
        drift.append(MultiPolynomial.variable(nv, n + i) - F[i].to_multi(nv, i))
    for i in range(n):
        drift.append(-model.potential.partial(i).embed(nv))

    m = model.noise_dim
    zero_row = tuple(MultiPolynomial.zero(nv) for _ in range(m))
    rows = [zero_row] * n
    if isinstance(model.diffusion, ConstantMatrix):
        rows += list(model.diffusion.entries(nv))
    else:
        rows += [
            tuple(_shear_substitute(e, F) for e in row) for row in model.diffusion.rows
        ]
    system = PhaseSystem(n=n, drift=tuple(drift), diffusion_rows=tuple(rows), model=model)
    return TransformedSystem(base=model, F=F, H=H, system=system)


def _eval_F(F: tuple[Polynomial, ...], x: np.ndarray) -> np.ndarray:
    return np.array([Fi(xi) for Fi, xi in zip(F, x)])


def phi_forward(state: PhasePoint, F: tuple[Polynomial, ...]) -> PhasePoint:
    """(x, y) -> (x, y + F(x)) componentwise."""
    if len(F) != state.n:
        raise ValueError("dimension mismatch")
    return PhasePoint(state.x, state.y + _eval_F(F, state.x))


def phi_inverse(state: PhasePoint, F: tuple[Polynomial, ...]) -> PhasePoint:
    """(x, eta) -> (x, eta - F(x)); inverse of phi_forward."""
    if len(F) != state.n:
        raise ValueError("dimension mismatch")
    return PhasePoint(state.x, state.y - _eval_F(F, state.x))
