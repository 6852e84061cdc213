"""Exact polynomial arithmetic with float64 coefficients.

Univariate polynomials are dense coefficient tuples (ascending degree);
multivariate polynomials are sparse maps from exponent tuples to
coefficients.  Differentiation, antidifferentiation, products and
substitution are all exact coefficient operations, which is what makes
the generator calculus and the Lyapunov condition checks exact instead
of finite-difference approximations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = ["Polynomial", "MultiPolynomial"]


def _strip_trailing_zeros(coeffs: Sequence[float]) -> tuple[float, ...]:
    out = [float(c) for c in coeffs]
    while out and out[-1] == 0.0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class Polynomial:
    """Univariate polynomial; ``coeffs[k]`` multiplies x**k.

    Canonical form: the trailing coefficient is nonzero unless the
    polynomial is identically zero (empty tuple).
    """

    coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _strip_trailing_zeros(self.coeffs))

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls(())

    @classmethod
    def constant(cls, c: float) -> "Polynomial":
        return cls((float(c),))

    @classmethod
    def identity(cls) -> "Polynomial":
        """The polynomial x."""
        return cls((0.0, 1.0))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> float:
        return self.coeffs[-1] if self.coeffs else 0.0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        """Horner evaluation; works on scalars and numpy arrays."""
        if np.ndim(x):
            x = np.asarray(x, dtype=float)
            acc = np.zeros(x.shape)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] += c
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, float)):
            return Polynomial(tuple(other * c for c in self.coeffs))
        out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1 or 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def derivative(self) -> "Polynomial":
        return Polynomial(tuple(k * c for k, c in enumerate(self.coeffs))[1:])

    def antiderivative(self) -> "Polynomial":
        """Antiderivative vanishing at 0 (coefficient rule c_k -> c_k/(k+1))."""
        return Polynomial((0.0,) + tuple(c / (k + 1) for k, c in enumerate(self.coeffs)))

    def to_multi(self, nvars: int, var: int) -> "MultiPolynomial":
        """Embed as an nvars-variate polynomial in variable ``var``."""
        terms = {}
        for k, c in enumerate(self.coeffs):
            if c != 0.0:
                e = [0] * nvars
                e[var] = k
                terms[tuple(e)] = c
        return MultiPolynomial(nvars, terms)

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)})"


def _clean_terms(terms: Mapping[tuple, float]) -> dict[tuple[int, ...], float]:
    out = {}
    for exps, c in terms.items():
        c = float(c)
        if c != 0.0:
            out[tuple(int(e) for e in exps)] = c
    return out


@dataclass(frozen=True, eq=False)
class MultiPolynomial:
    """Sparse polynomial in ``nvars`` variables.

    ``terms`` maps exponent tuples (length nvars) to nonzero coefficients.
    Treated as immutable; all operations return new instances.
    """

    nvars: int
    terms: dict[tuple[int, ...], float] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = _clean_terms(self.terms)
        for exps in cleaned:
            if len(exps) != self.nvars:
                raise ValueError(f"exponent tuple {exps} does not have {self.nvars} entries")
        object.__setattr__(self, "terms", cleaned)

    @classmethod
    def zero(cls, nvars: int) -> "MultiPolynomial":
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c: float) -> "MultiPolynomial":
        return cls(nvars, {(0,) * nvars: float(c)})

    @classmethod
    def variable(cls, nvars: int, var: int) -> "MultiPolynomial":
        e = [0] * nvars
        e[var] = 1
        return cls(nvars, {tuple(e): 1.0})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def constant_value(self) -> float:
        return self.terms.get((0,) * self.nvars, 0.0)

    @property
    def total_degree(self) -> int:
        """Maximum total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def __call__(self, pts):
        """Evaluate at points of shape (..., nvars); returns shape (...)."""
        pts = np.asarray(pts, dtype=float)
        scalar = pts.ndim == 1
        if pts.shape[-1] != self.nvars:
            raise ValueError(f"points have {pts.shape[-1]} coordinates, expected {self.nvars}")
        out = np.zeros(pts.shape[:-1])
        # fixed (sorted) term order so a given coefficient dict always
        # evaluates to the same bits regardless of insertion history
        for exps, c in sorted(self.terms.items()):
            t = np.full(pts.shape[:-1], c)
            for k, e in enumerate(exps):
                if e == 1:
                    t = t * pts[..., k]
                elif e > 1:
                    t = t * pts[..., k] ** e
            out += t
        return float(out) if scalar else out

    def __eq__(self, other):
        if not isinstance(other, MultiPolynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __add__(self, other) -> "MultiPolynomial":
        if isinstance(other, (int, float)):
            other = MultiPolynomial.constant(self.nvars, other)
        out = dict(self.terms)
        for exps, c in other.terms.items():
            out[exps] = out.get(exps, 0.0) + c
        return MultiPolynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPolynomial":
        return MultiPolynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPolynomial":
        if isinstance(other, (int, float)):
            other = MultiPolynomial.constant(self.nvars, other)
        return self + (-other)

    def __mul__(self, other) -> "MultiPolynomial":
        if isinstance(other, (int, float)):
            return MultiPolynomial(self.nvars, {e: other * c for e, c in self.terms.items()})
        out: dict[tuple[int, ...], float] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0.0) + c1 * c2
        return MultiPolynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MultiPolynomial":
        if k < 0:
            raise ValueError("negative power")
        out = MultiPolynomial.constant(self.nvars, 1.0)
        for _ in range(k):
            out = out * self
        return out

    def partial(self, var: int) -> "MultiPolynomial":
        """Exact partial derivative with respect to variable ``var``."""
        out = {}
        for exps, c in self.terms.items():
            e = exps[var]
            if e > 0:
                ne = list(exps)
                ne[var] = e - 1
                key = tuple(ne)
                out[key] = out.get(key, 0.0) + c * e
        return MultiPolynomial(self.nvars, out)

    def gradient(self) -> tuple["MultiPolynomial", ...]:
        return tuple(self.partial(k) for k in range(self.nvars))

    def substitute(self, var: int, replacement: "MultiPolynomial") -> "MultiPolynomial":
        """Substitute ``replacement`` (same nvars) for variable ``var``."""
        if replacement.nvars != self.nvars:
            raise ValueError("replacement must have the same number of variables")
        out = MultiPolynomial.zero(self.nvars)
        powers = {0: MultiPolynomial.constant(self.nvars, 1.0)}
        for exps, c in self.terms.items():
            e = exps[var]
            if e not in powers:
                p = powers[max(powers)]
                for k in range(max(powers) + 1, e + 1):
                    p = p * replacement
                    powers[k] = p
            rest = list(exps)
            rest[var] = 0
            out = out + powers[e] * MultiPolynomial(self.nvars, {tuple(rest): c})
        return out

    def embed(self, nvars: int, offset: int = 0) -> "MultiPolynomial":
        """View in a larger variable space; old variable k becomes k+offset."""
        if nvars < self.nvars + offset:
            raise ValueError("target space too small")
        terms = {}
        for exps, c in self.terms.items():
            e = [0] * nvars
            for k, p in enumerate(exps):
                e[k + offset] = p
            terms[tuple(e)] = c
        return MultiPolynomial(nvars, terms)

    def restrict_to_ray(self, direction: Sequence[float]) -> Polynomial:
        """Univariate polynomial t -> p(t * direction), exact in t."""
        direction = [float(d) for d in direction]
        if len(direction) != self.nvars:
            raise ValueError("direction length mismatch")
        coeffs: dict[int, float] = {}
        for exps, c in self.terms.items():
            deg = sum(exps)
            val = c
            for k, e in enumerate(exps):
                if e:
                    val *= direction[k] ** e
            coeffs[deg] = coeffs.get(deg, 0.0) + val
        if not coeffs:
            return Polynomial.zero()
        out = [0.0] * (max(coeffs) + 1)
        for deg, c in coeffs.items():
            out[deg] = c
        return Polynomial(out)

    def __repr__(self):
        return f"MultiPolynomial(nvars={self.nvars}, terms={self.terms})"
