"""The differential generator of a phase-space diffusion.

For dz = drift(z) dt + sigma(z) dW the generator is

    L = sum_i drift_i d/dz_i + 1/2 sum_ij (sigma sigma^T)_ij d^2/dz_i dz_j

Everything here is polynomial, so LV is computed exactly by coefficient
arithmetic.  finite_difference_generator assembles the same quantity
from central differences and serves as an independent numerical oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .poly import MultiPolynomial
from .system import PhaseSystem

__all__ = ["GeneratorOperator", "apply_generator", "finite_difference_generator"]


def _as_poly(V, nvars: int) -> MultiPolynomial:
    # accepts a raw MultiPolynomial or anything carrying one in .V
    p = getattr(V, "V", V)
    if not isinstance(p, MultiPolynomial):
        raise TypeError("V must be a MultiPolynomial or carry one in a .V attribute")
    if p.nvars != nvars:
        raise ValueError(f"V has {p.nvars} variables, system has {nvars}")
    return p


def apply_generator(system: PhaseSystem, V) -> MultiPolynomial:
    """Exact LV for polynomial V; the additive constant K drops out."""
    d = system.dim
    p = _as_poly(V, d)
    grad = p.gradient()
    out = MultiPolynomial.zero(d)
    for i in range(d):
        if not grad[i].is_zero():
            out = out + system.drift[i] * grad[i]
    cov = system.covariance_poly()
    for i in range(d):
        for j in range(d):
            if cov[i][j].is_zero():
                continue
            second = grad[i].partial(j)
            if not second.is_zero():
                out = out + 0.5 * cov[i][j] * second
    return out


@dataclass(frozen=True)
class GeneratorOperator:
    """The generator L bound to one system; apply(V) returns the exact LV."""

    system: PhaseSystem

    def apply(self, V) -> MultiPolynomial:
        return apply_generator(self.system, V)


def finite_difference_generator(system: PhaseSystem, V: Union[MultiPolynomial, Callable],
                                z, h: float = 1e-4) -> float:
    """LV(z) from central finite differences of V; oracle for apply_generator.

    V may be any callable accepting a length-2n point.  Mixed second
    derivatives use the standard four-point stencil.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    z = np.asarray(getattr(z, "z", z), dtype=float)
    d = system.dim
    if z.shape != (d,):
        raise ValueError(f"point must have length {d}")
    f = V if callable(V) else (lambda pt: V(pt))
    Vz = float(f(z))

    def shifted(i, si, j=None, sj=0):
        pt = z.copy()
        pt[i] += si * h
        if j is not None:
            pt[j] += sj * h
        return float(f(pt))

    drift = system.drift_at(z)
    out = 0.0
    for i in range(d):
        out += drift[i] * (shifted(i, 1) - shifted(i, -1)) / (2.0 * h)
    sig = system.diffusion_at(z)
    cov = sig @ sig.T
    for i in range(d):
        for j in range(d):
            c = cov[i, j]
            if c == 0.0:
                continue
            if i == j:
                dij = (shifted(i, 1) - 2.0 * Vz + shifted(i, -1)) / h ** 2
            else:
                dij = (
                    shifted(i, 1, j, 1) - shifted(i, 1, j, -1)
                    - shifted(i, -1, j, 1) + shifted(i, -1, j, -1)
                ) / (4.0 * h ** 2)
            out += 0.5 * c * dij
    return out
