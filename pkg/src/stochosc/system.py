"""Second-order stochastic oscillators and their phase-space form.

An oscillator is x'' + b(x, x') + g(x) = sigma(x, x') W' on R^n.  Writing
y = x' turns it into the first-order Ito system

    dx = y dt
    dy = -[b(x, y) + g(x)] dt + sigma(x, y) dW

on R^{2n}, whose drift has first n components equal to y and whose
diffusion matrix has first n rows zero.  All coefficient functions are
polynomials so that the differential generator can be applied exactly.

Variable ordering convention everywhere: z = (x_1..x_n, y_1..y_n).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .poly import MultiPolynomial, Polynomial

__all__ = [
    "PhasePoint",
    "LienardForm",
    "GeneralDrift",
    "ConstantMatrix",
    "StateDependent",
    "OscillatorModel",
    "PhaseSystem",
    "reduce_to_phase_system",
]


@dataclass(frozen=True)
class PhasePoint:
    """A point (x, y) in phase space; y is the velocity block."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))
        object.__setattr__(self, "y", np.atleast_1d(np.asarray(self.y, dtype=float)))
        if self.x.shape != self.y.shape:
            raise ValueError("x and y must have the same shape")

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def z(self) -> np.ndarray:
        """Stacked coordinates (x_1..x_n, y_1..y_n)."""
        return np.concatenate([self.x, self.y])

    @classmethod
    def from_z(cls, z) -> "PhasePoint":
        z = np.asarray(z, dtype=float)
        if z.ndim != 1 or z.shape[0] % 2:
            raise ValueError("z must be a flat vector of even length")
        n = z.shape[0] // 2
        return cls(z[:n], z[n:])


@dataclass(frozen=True)
class LienardForm:
    """Damping with separable structure b_i(x, y) = f_i(x_i) * y_i.

    The univariate factors f_i are what the position-velocity shear
    transform integrates, so keeping them symbolic (rather than only the
    expanded product) is load-bearing.
    """

    f: tuple[Polynomial, ...]

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(self.f))
        if not self.f:
            raise ValueError("need at least one damping factor")

    @property
    def n(self) -> int:
        return len(self.f)

    def components(self) -> tuple[MultiPolynomial, ...]:
        n = self.n
        out = []
        for i, fi in enumerate(self.f):
            yi = MultiPolynomial.variable(2 * n, n + i)
            out.append(fi.to_multi(2 * n, i) * yi)
        return tuple(out)


@dataclass(frozen=True)
class GeneralDrift:
    """Arbitrary polynomial damping; component i is b_i(x_1..x_n, y_1..y_n)."""

    components: tuple[MultiPolynomial, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        n = len(self.components)
        for b in self.components:
            if b.nvars != 2 * n:
                raise ValueError("each damping component must use all 2n phase variables")

    @property
    def n(self) -> int:
        return len(self.components)


Damping = Union[LienardForm, GeneralDrift]


@dataclass(frozen=True)
class ConstantMatrix:
    """State-independent diffusion coefficient, shape (n, m)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.values, dtype=float))
        object.__setattr__(self, "values", v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def entries(self, nvars: int) -> tuple[tuple[MultiPolynomial, ...], ...]:
        return tuple(
            tuple(MultiPolynomial.constant(nvars, v) for v in row) for row in self.values
        )


@dataclass(frozen=True)
class StateDependent:
    """Polynomial diffusion coefficient sigma(x, y), entries in 2n variables."""

    rows: tuple[tuple[MultiPolynomial, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        if not self.rows or not self.rows[0]:
            raise ValueError("empty diffusion matrix")
        m = len(self.rows[0])
        if any(len(r) != m for r in self.rows):
            raise ValueError("ragged diffusion matrix")

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]))


Diffusion = Union[ConstantMatrix, StateDependent]


@dataclass(frozen=True)
class OscillatorModel:
    """A second-order system x'' + b(x, x') + g(x) = sigma(x, x') W'.

    restoring holds the components g_i as polynomials in the n position
    variables.  potential, when present, is G(x) with grad G = g; it is
    required by every certificate route, and for n = 1 it is filled in
    automatically by antidifferentiation.
    """

    name: str
    damping: Damping
    restoring: tuple[MultiPolynomial, ...]
    diffusion: Diffusion
    potential: Optional[MultiPolynomial] = None
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "restoring", tuple(self.restoring))
        n = self.damping.n
        if len(self.restoring) != n:
            raise ValueError("restoring force dimension does not match damping")
        for g in self.restoring:
            if g.nvars != n:
                raise ValueError("restoring components must depend on positions only")
        if self.diffusion.shape[0] != n:
            raise ValueError("diffusion must have one row per oscillator component")
        if self.potential is None and n == 1:
            # gradient of the antiderivative is g by construction
            g_uni = self.restoring[0].restrict_to_ray((1.0,))
            G = g_uni.antiderivative().to_multi(1, 0)
            object.__setattr__(self, "potential", G)
        if self.potential is not None:
            if self.potential.nvars != n:
                raise ValueError("potential must depend on positions only")
            for i, g in enumerate(self.restoring):
                diff = self.potential.partial(i) - g
                if diff.max_abs_coeff() > 1e-12 * max(1.0, g.max_abs_coeff()):
                    raise ValueError("potential gradient does not match restoring force")

    @property
    def n(self) -> int:
        return self.damping.n

    @property
    def noise_dim(self) -> int:
        return self.diffusion.shape[1]

    def damping_components(self) -> tuple[MultiPolynomial, ...]:
        if isinstance(self.damping, LienardForm):
            return self.damping.components()
        return self.damping.components

    def lienard_factors(self) -> Optional[tuple[Polynomial, ...]]:
        """The univariate f_i when the damping is separable, else None."""
        if isinstance(self.damping, LienardForm):
            return self.damping.f
        return None

    def diffusion_entries(self) -> tuple[tuple[MultiPolynomial, ...], ...]:
        if isinstance(self.diffusion, ConstantMatrix):
            return self.diffusion.entries(2 * self.n)
        return self.diffusion.rows

    def diffusion_depends_on_velocity(self) -> bool:
        n = self.n
        for row in self.diffusion_entries():
            for entry in row:
                for exps in entry.terms:
                    if any(exps[n + i] for i in range(n)):
                        return True
        return False


@dataclass(frozen=True)
class PhaseSystem:
    """First-order Ito system dz = drift(z) dt + diffusion(z) dW on R^{2n}.

    drift has 2n polynomial components and diffusion_rows is a 2n x m
    polynomial matrix, both in the variables (x_1..x_n, y_1..y_n).  When
    every diffusion entry is constant, constant_diffusion caches the
    matrix so integrators can skip per-step evaluation.
    """

    n: int
    drift: tuple[MultiPolynomial, ...]
    diffusion_rows: tuple[tuple[MultiPolynomial, ...], ...]
    model: Optional[OscillatorModel] = None

    def __post_init__(self):
        object.__setattr__(self, "drift", tuple(self.drift))
        object.__setattr__(self, "diffusion_rows", tuple(tuple(r) for r in self.diffusion_rows))
        if len(self.drift) != 2 * self.n:
            raise ValueError("drift must have 2n components")
        if len(self.diffusion_rows) != 2 * self.n:
            raise ValueError("diffusion must have 2n rows")

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def noise_dim(self) -> int:
        return len(self.diffusion_rows[0])

    @property
    def constant_diffusion(self) -> Optional[np.ndarray]:
        rows = []
        for row in self.diffusion_rows:
            vals = []
            for entry in row:
                if not entry.is_constant():
                    return None
                vals.append(entry.constant_value())
            rows.append(vals)
        return np.asarray(rows, dtype=float)

    def drift_at(self, z) -> np.ndarray:
        """Drift vector at points of shape (..., 2n); returns (..., 2n)."""
        z = np.asarray(z, dtype=float)
        return np.stack([np.asarray(p(z), dtype=float) for p in self.drift], axis=-1)

    def diffusion_at(self, z) -> np.ndarray:
        """Diffusion matrix at points of shape (..., 2n); returns (..., 2n, m)."""
        z = np.asarray(z, dtype=float)
        rows = []
        for row in self.diffusion_rows:
            rows.append(
                np.stack(
                    [np.broadcast_to(np.asarray(e(z), dtype=float), z.shape[:-1]) for e in row],
                    axis=-1,
                )
            )
        return np.stack(rows, axis=-2)

    def covariance_poly(self) -> tuple[tuple[MultiPolynomial, ...], ...]:
        """The 2n x 2n polynomial matrix sigma sigma^T (exact products)."""
        m = self.noise_dim
        d = self.dim
        out = []
        for i in range(d):
            row = []
            for j in range(d):
                acc = MultiPolynomial.zero(2 * self.n)
                for k in range(m):
                    acc = acc + self.diffusion_rows[i][k] * self.diffusion_rows[j][k]
                row.append(acc)
            out.append(tuple(row))
        return tuple(out)


def reduce_to_phase_system(model: OscillatorModel) -> PhaseSystem:
    """Phase-space reduction of a second-order oscillator.

    dx_i = y_i dt
    dy_i = -[b_i(x, y) + g_i(x)] dt + sum_k sigma_ik(x, y) dW_k
    """
    n = model.n
    nv = 2 * n
    drift = [MultiPolynomial.variable(nv, n + i) for i in range(n)]
    b = model.damping_components()
    for i in range(n):
        g_embedded = model.restoring[i].embed(nv)
        drift.append(-(b[i] + g_embedded))
    m = model.noise_dim
    zero_row = tuple(MultiPolynomial.zero(nv) for _ in range(m))
    rows = [zero_row] * n + list(model.diffusion_entries())
    return PhaseSystem(n=n, drift=tuple(drift), diffusion_rows=tuple(rows), model=model)
