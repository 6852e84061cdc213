"""Built-in oscillator instances.

Each builder validates its parameter constraints and returns a fully
populated OscillatorModel (damping, restoring force, potential,
diffusion).  The CATALOG registry maps names to builders plus default
parameters so the CLI and tests can construct every instance uniformly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from .poly import MultiPolynomial, Polynomial
from .system import (
    ConstantMatrix,
    GeneralDrift,
    LienardForm,
    OscillatorModel,
    StateDependent,
)

__all__ = [
    "ModelCatalogEntry",
    "CATALOG",
    "build_duffing",
    "build_van_der_pol",
    "build_duffing_vdp_general",
    "build_vector_duffing",
    "build_coupled_lienard",
    "build_linear_oscillator",
    "build_model",
]

DiffusionSpec = Union[float, ConstantMatrix, StateDependent]


def _as_diffusion(sigma: DiffusionSpec, n: int) -> Union[ConstantMatrix, StateDependent]:
    """Scalar sigma means a constant multiple of the identity."""
    if isinstance(sigma, (ConstantMatrix, StateDependent)):
        if sigma.shape[0] != n:
            raise ValueError(f"diffusion has {sigma.shape[0]} rows, model needs {n}")
        return sigma
    return ConstantMatrix(float(sigma) * np.eye(n))


def build_duffing(alpha: float = 0.5, omega0: float = 1.0, lam: float = 3.0,
                  sigma: float = 2.0) -> OscillatorModel:
    """x'' + 2*alpha*omega0*x' + omega0^2*(x + lam*x^3) = sigma*W'."""
    if alpha <= 0 or omega0 <= 0 or lam <= 0:
        raise ValueError("alpha, omega0 and lam must be positive")
    w2 = omega0 ** 2
    b = MultiPolynomial(2, {(0, 1): 2.0 * alpha * omega0})
    g = MultiPolynomial(1, {(1,): w2, (3,): w2 * lam})
    G = MultiPolynomial(1, {(2,): w2 / 2.0, (4,): w2 * lam / 4.0})
    return OscillatorModel(
        name="duffing",
        damping=GeneralDrift((b,)),
        restoring=(g,),
        diffusion=_as_diffusion(sigma, 1),
        potential=G,
        description="hardening cubic spring with linear viscous damping and additive noise",
    )


def build_van_der_pol(xi: float = 0.1, omega0: float = 1.0, gamma: float = 0.25,
                      sigma: float = 0.1) -> OscillatorModel:
    """x'' + 2*xi*omega0*(x^2 - 1)*x' + omega0^2*(x + gamma*x^3) = sigma*W'.

    The damping factor is negative near the origin (energy injection)
    and positive for |x| > 1, the classic relaxation-oscillation shape.
    """
    if xi <= 0 or omega0 <= 0 or gamma <= 0:
        raise ValueError("xi, omega0 and gamma must be positive")
    w2 = omega0 ** 2
    f = Polynomial((-2.0 * xi * omega0, 0.0, 2.0 * xi * omega0))
    g = MultiPolynomial(1, {(1,): w2, (3,): w2 * gamma})
    G = MultiPolynomial(1, {(2,): w2 / 2.0, (4,): w2 * gamma / 4.0})
    return OscillatorModel(
        name="vanderpol",
        damping=LienardForm((f,)),
        restoring=(g,),
        diffusion=_as_diffusion(sigma, 1),
        potential=G,
        description="self-exciting oscillator: negative damping inside |x|<1, cubic spring, additive noise",
    )


def build_duffing_vdp_general(xi: Sequence[float] = (0.0, 0.0, 0.0, 1.0),
                              a: Sequence[float] = (0.0, -1.0),
                              sigma: DiffusionSpec = 1.0) -> OscillatorModel:
    """Scalar family f(x) = sum_{j=1}^{2m} xi_j x^j, g(x) = sum_{j=1}^{2n} a_j x^{j+1}.

    xi[k] is the coefficient for j = k+1 (same for a).  Constraints:
    even lengths 2m and 2n with m > n >= 1, leading xi positive, leading
    a negative.  The destabilizing restoring force (negative leading a)
    is held in check by the faster-growing damping integral.
    """
    xi = tuple(float(v) for v in xi)
    a = tuple(float(v) for v in a)
    if len(xi) % 2 or len(xi) == 0:
        raise ValueError("xi must have even length 2m with m >= 1")
    if len(a) % 2 or len(a) == 0:
        raise ValueError("a must have even length 2n with n >= 1")
    m, nn = len(xi) // 2, len(a) // 2
    if m <= nn:
        raise ValueError(f"damping half-degree m={m} must exceed restoring half-degree n={nn}")
    if xi[-1] <= 0:
        raise ValueError("leading damping coefficient xi_2m must be positive")
    if a[-1] >= 0:
        raise ValueError("leading restoring coefficient a_2n must be negative")
    f = Polynomial((0.0,) + xi)
    # g = sum a_j x^{j+1}: coefficient of x^{j+1} is a_j
    g = MultiPolynomial(1, {(j + 2,): c for j, c in enumerate(a)})
    return OscillatorModel(
        name="duffing_vanderpol",
        damping=LienardForm((f,)),
        restoring=(g,),
        diffusion=_as_diffusion(sigma, 1),
        potential=None,
        description="polynomial damping of higher degree dominating a destabilizing polynomial spring",
    )


def build_vector_duffing(B: Sequence[Sequence[float]] = ((1.0, 0.5), (0.5, 1.0)),
                         A: Sequence[Sequence[float]] = ((2.0, -1.0), (-1.0, 2.0)),
                         K_diag: Sequence[float] = (1.0, 1.0),
                         sigma: Optional[DiffusionSpec] = None) -> OscillatorModel:
    """X'' + B X' + (A X + K_ii x_i^3 e_i) = sigma(X, X') W' on R^n.

    B must have nonnegative quadratic form <y, By>; A symmetric positive
    semidefinite.  Default diffusion is the state-dependent diagonal
    matrix diag(x_1, ..., x_n), which the energy route's trace bound
    absorbs into the potential's quartic growth.
    """
    B = np.asarray(B, dtype=float)
    A = np.asarray(A, dtype=float)
    K_diag = tuple(float(k) for k in K_diag)
    n = B.shape[0]
    if B.shape != (n, n) or A.shape != (n, n) or len(K_diag) != n:
        raise ValueError("B, A must be n x n and K_diag length n")
    if not np.allclose(A, A.T, atol=1e-12):
        raise ValueError("A must be symmetric")
    if any(k <= 0 for k in K_diag):
        raise ValueError("K_diag entries must be positive")
    sym = (B + B.T) / 2.0
    if np.linalg.eigvalsh(sym).min() < -1e-12:
        raise ValueError("B must have nonnegative quadratic form <y,By>")
    if np.linalg.eigvalsh(A).min() < -1e-12:
        raise ValueError("A must be positive semidefinite")
    rng = np.random.Generator(np.random.Philox(key=[7, 7]))
    dirs = rng.standard_normal((1000, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    if (np.einsum("ki,ij,kj->k", dirs, B, dirs)).min() < -1e-12:
        raise ValueError("B must have nonnegative quadratic form <y,By>")

    nv = 2 * n
    damping = []
    for i in range(n):
        bi = MultiPolynomial(nv, {})
        for j in range(n):
            if B[i, j] != 0.0:
                bi = bi + MultiPolynomial(nv, {_unit(nv, n + j): B[i, j]})
        damping.append(bi)
    restoring = []
    for i in range(n):
        gi_terms = {}
        for j in range(n):
            if A[i, j] != 0.0:
                gi_terms[_unit(n, j)] = A[i, j]
        gi = MultiPolynomial(n, gi_terms) + MultiPolynomial(n, {_unit(n, i, 3): K_diag[i]})
        restoring.append(gi)
    G = MultiPolynomial(n, {})
    for i in range(n):
        for j in range(n):
            if A[i, j] != 0.0:
                e = [0] * n
                e[i] += 1
                e[j] += 1
                G = G + MultiPolynomial(n, {tuple(e): A[i, j] / 2.0})
        G = G + MultiPolynomial(n, {_unit(n, i, 4): K_diag[i] / 4.0})
    if sigma is None:
        rows = tuple(
            tuple(
                MultiPolynomial.variable(nv, i) if i == j else MultiPolynomial.zero(nv)
                for j in range(n)
            )
            for i in range(n)
        )
        diffusion: Union[ConstantMatrix, StateDependent] = StateDependent(rows)
    else:
        diffusion = _as_diffusion(sigma, n)
    return OscillatorModel(
        name="vector_duffing",
        damping=GeneralDrift(tuple(damping)),
        restoring=tuple(restoring),
        diffusion=diffusion,
        potential=G,
        description="coupled cubic springs with matrix viscous damping; default diffusion diag(x_i)",
    )


def build_coupled_lienard(xi: Sequence[float] = (1.0, 1.0),
                          a: Sequence[float] = (1.0, 1.0),
                          nu: float = 0.5, n1: int = 2, n2: int = 1,
                          sigma: DiffusionSpec = 0.5) -> OscillatorModel:
    """x_i'' + xi_i x_i^{2 n1} x_i' + dG/dx_i = sum_j sigma_ij W_j'.

    G(x) = -sum_i (a_i x_i^{2 n2 + 2} + nu x_1 x_i), with xi_i > 0,
    a_i > 0 and n1 > n2 > 0.  The potential alone diverges to minus
    infinity; non-explosion rests on the damping integral H growing
    faster (degree 2 n1 + 2 beats 2 n2 + 2).
    """
    xi = tuple(float(v) for v in xi)
    a = tuple(float(v) for v in a)
    n = len(xi)
    if len(a) != n or n == 0:
        raise ValueError("xi and a must have the same positive length")
    if not (isinstance(n1, int) and isinstance(n2, int) and n1 > n2 > 0):
        raise ValueError("need natural numbers n1 > n2 > 0")
    if any(v <= 0 for v in xi) or any(v <= 0 for v in a):
        raise ValueError("xi and a entries must be positive")
    f = tuple(Polynomial((0.0,) * (2 * n1) + (xi_i,)) for xi_i in xi)
    G = MultiPolynomial(n, {})
    for i in range(n):
        G = G - MultiPolynomial(n, {_unit(n, i, 2 * n2 + 2): a[i]})
        e = [0] * n
        e[0] += 1
        e[i] += 1
        G = G - MultiPolynomial(n, {tuple(e): nu})
    return OscillatorModel(
        name="coupled_lienard",
        damping=LienardForm(f),
        restoring=G.gradient(),
        diffusion=_as_diffusion(sigma, n),
        potential=G,
        description="stiff even-power damping stabilizing an inverted coupled potential",
    )


def build_linear_oscillator(theta: float = 0.5, k: float = 1.0,
                            sigma: float = 0.3) -> OscillatorModel:
    """x'' + theta*x' + k*x = sigma*W'; the linear-SDE reference case.

    Moments obey a closed-form linear ODE, which makes this entry the
    calibration target for integrator statistics.
    """
    if theta < 0 or k <= 0:
        raise ValueError("need theta >= 0 and k > 0")
    f = Polynomial((float(theta),))
    g = MultiPolynomial(1, {(1,): float(k)})
    return OscillatorModel(
        name="linear",
        damping=LienardForm((f,)),
        restoring=(g,),
        diffusion=_as_diffusion(sigma, 1),
        description="damped harmonic oscillator with additive noise (linear SDE)",
    )


def _unit(nvars: int, var: int, power: int = 1) -> tuple:
    e = [0] * nvars
    e[var] = power
    return tuple(e)


@dataclass(frozen=True)
class ModelCatalogEntry:
    name: str
    builder: Callable[..., OscillatorModel]
    default_params: Mapping[str, object]
    description: str


CATALOG: dict[str, ModelCatalogEntry] = {
    e.name: e
    for e in [
        ModelCatalogEntry(
            "duffing", build_duffing,
            {"alpha": 0.5, "omega0": 1.0, "lam": 3.0, "sigma": 2.0},
            "hardening cubic spring, linear damping, additive noise",
        ),
        ModelCatalogEntry(
            "vanderpol", build_van_der_pol,
            {"xi": 0.1, "omega0": 1.0, "gamma": 0.25, "sigma": 0.1},
            "self-exciting oscillator with cubic spring, additive noise",
        ),
        ModelCatalogEntry(
            "duffing_vanderpol", build_duffing_vdp_general,
            {"xi": (0.0, 0.0, 0.0, 1.0), "a": (0.0, -1.0), "sigma": 1.0},
            "high-degree damping versus destabilizing spring",
        ),
        ModelCatalogEntry(
            "vector_duffing", build_vector_duffing,
            {"B": ((1.0, 0.5), (0.5, 1.0)), "A": ((2.0, -1.0), (-1.0, 2.0)),
             "K_diag": (1.0, 1.0), "sigma": None},
            "two coupled cubic springs, matrix damping, diffusion diag(x_i)",
        ),
        ModelCatalogEntry(
            "coupled_lienard", build_coupled_lienard,
            {"xi": (1.0, 1.0), "a": (1.0, 1.0), "nu": 0.5, "n1": 2, "n2": 1, "sigma": 0.5},
            "even-power damping stabilizing an inverted coupled potential",
        ),
        ModelCatalogEntry(
            "linear", build_linear_oscillator,
            {"theta": 0.5, "k": 1.0, "sigma": 0.3},
            "damped harmonic oscillator, closed-form moments",
        ),
    ]
}


# config-file spelling for parameters whose natural name is a Python keyword
PARAM_ALIASES = {"lambda": "lam"}


def build_model(name: str, params: Optional[Mapping[str, object]] = None) -> OscillatorModel:
    """Construct a catalog model by name, overriding defaults with params."""
    if name not in CATALOG:
        raise KeyError(f"unknown model {name!r}; available: {', '.join(sorted(CATALOG))}")
    entry = CATALOG[name]
    kwargs = dict(entry.default_params)
    if params:
        params = {PARAM_ALIASES.get(k, k): v for k, v in params.items()}
        unknown = set(params) - set(kwargs)
        if unknown:
            raise KeyError(f"unknown parameter(s) for {name}: {', '.join(sorted(unknown))}")
        kwargs.update(params)
    return entry.builder(**kwargs)
