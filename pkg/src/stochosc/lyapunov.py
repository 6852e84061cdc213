"""Certificate machinery for non-explosion of phase-space diffusions.

A route is a recipe that builds a nonnegative, radially unbounded
Lyapunov function V and checks sufficient conditions under which the
generator satisfies LV <= c V, which rules out escape to infinity in
finite time.  Four routes are implemented:

- energy_damping_bound: constant diffusion plus a lower bound
  <b, y> >= -alpha |y|^2 on the damping; V = G + |y|^2/2 + K.
- energy_trace_bound: the trace inequality
  Tr[sigma sigma^T]/2 <= <y, b> + c [G + |y|^2/2] + K1; same V.
- transformed_scalar: scalar separable damping, sheared coordinates;
  V = W(x) + y^2/2 + K with W the antiderivative of F + g.
- transformed_vector: separable damping in any dimension;
  V = H + G + |y|^2/2 + K.

Every inequality is verified two ways: a dense grid scan over the box
[-R_check, R_check]^d and a leading-coefficient sign analysis along
coordinate and random rays.  A finite procedure cannot prove a global
polynomial inequality, so the certificate records the domain scanned;
"indeterminate" is reported when the grid passes but the asymptotic
analysis cannot settle the sign.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .generator import apply_generator
from .poly import MultiPolynomial, Polynomial
from .system import ConstantMatrix, LienardForm, OscillatorModel, StateDependent, reduce_to_phase_system
from .transform import build_transformed_system

__all__ = [
    "VerificationDomain",
    "DEFAULT_DOMAIN",
    "ConditionResult",
    "LyapunovFunction",
    "LyapunovCertificate",
    "build_energy_lyapunov",
    "build_transformed_lyapunov_scalar",
    "build_transformed_lyapunov_vector",
    "check_trace_bound",
    "check_damping_bound",
    "check_scalar_transformed_conditions",
    "check_vector_transformed_conditions",
    "verify_nonexplosion",
    "ROUTE_ORDER",
]

ROUTE_DAMPING = "energy_damping_bound"
ROUTE_TRACE = "energy_trace_bound"
ROUTE_SCALAR = "transformed_scalar"
ROUTE_VECTOR = "transformed_vector"
ROUTE_ORDER = (ROUTE_DAMPING, ROUTE_TRACE, ROUTE_SCALAR, ROUTE_VECTOR)

_GRID_TOL = 1e-9
_NOISE = 1e-12
_CONSTANT_KEYS = ("c", "K", "K1", "K2", "c1", "c2", "alpha")


@dataclass(frozen=True, eq=False)
class VerificationDomain:
    """Box radius plus scan resolutions; grids and rays are cached."""

    R_check: float = 10.0
    points_per_axis: Optional[int] = None
    n_random_rays: int = 32
    mc_points: int = 100_000

    def __post_init__(self):
        if not (self.R_check > 0.0 and np.isfinite(self.R_check)):
            raise ValueError("R_check must be positive and finite")
        if self.points_per_axis is not None and self.points_per_axis < 2:
            raise ValueError("points_per_axis must be at least 2")
        if self.n_random_rays < 0 or self.mc_points < 1:
            raise ValueError("ray and Monte-Carlo counts must be positive")
        object.__setattr__(self, "_cache", {})

    def resolution(self, nvars: int) -> Optional[int]:
        """Points per axis for a full grid; None means Monte-Carlo."""
        if self.points_per_axis is not None:
            return int(self.points_per_axis)
        if nvars <= 2:
            return 201
        if nvars <= 4:
            return 41
        return None

    def grid(self, nvars: int) -> np.ndarray:
        key = ("grid", nvars)
        if key not in self._cache:
            res = self.resolution(nvars)
            R = self.R_check
            if res is None:
                rng = np.random.Generator(np.random.Philox(key=[9100, nvars]))
                pts = rng.uniform(-R, R, size=(self.mc_points, nvars))
            else:
                axis = np.linspace(-R, R, res)
                mesh = np.meshgrid(*([axis] * nvars), indexing="ij")
                pts = np.stack([m.ravel() for m in mesh], axis=-1)
            self._cache[key] = pts
        return self._cache[key]

    def ray_directions(self, nvars: int) -> np.ndarray:
        key = ("rays", nvars)
        if key not in self._cache:
            coord = np.concatenate([np.eye(nvars), -np.eye(nvars)], axis=0)
            rng = np.random.Generator(np.random.Philox(key=[9200, nvars]))
            rnd = rng.standard_normal((self.n_random_rays, nvars))
            rnd /= np.linalg.norm(rnd, axis=1, keepdims=True)
            self._cache[key] = np.concatenate([coord, rnd, -rnd], axis=0)
        return self._cache[key]

    def ring_radii(self) -> tuple[float, float, float]:
        return (self.R_check / 2.0, self.R_check, 2.0 * self.R_check)

    def describe(self) -> dict:
        return {
            "R_check": self.R_check,
            "grid": {
                "points_per_axis_2d": self.resolution(2),
                "points_per_axis_4d": self.resolution(4),
                "mc_points": self.mc_points,
                "random_rays": self.n_random_rays,
            },
        }


DEFAULT_DOMAIN = VerificationDomain()


@dataclass(frozen=True)
class ConditionResult:
    name: str
    status: str  # "pass" | "fail" | "indeterminate"
    witness: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def prefixed(self, route: str) -> "ConditionResult":
        return ConditionResult(f"{route}.{self.name}", self.status, self.witness)


@dataclass(frozen=True)
class LyapunovFunction:
    """V plus its additive constant K; construction names the recipe."""

    V: MultiPolynomial
    K: float
    construction: str

    def total(self) -> MultiPolynomial:
        return self.V + self.K

    def __call__(self, pts):
        return self.V(pts) + self.K


def build_energy_lyapunov(model: OscillatorModel, K: float = 0.0) -> LyapunovFunction:
    """V = G(x) + |y|^2 / 2; requires the potential."""
    if model.potential is None:
        raise ValueError("energy construction requires the model's potential")
    n = model.n
    nv = 2 * n
    V = model.potential.embed(nv)
    for i in range(n):
        V = V + MultiPolynomial(nv, {_unit(nv, n + i, 2): 0.5})
    return LyapunovFunction(V, float(K), "energy")


def build_transformed_lyapunov_scalar(model: OscillatorModel, K: float = 0.0) -> LyapunovFunction:
    """V = int_0^x [F + g] + y^2 / 2 for scalar separable damping."""
    lf = model.lienard_factors()
    if model.n != 1 or lf is None:
        raise ValueError("scalar transformed construction requires n=1 separable damping")
    F = lf[0].antiderivative()
    g = model.restoring[0].restrict_to_ray((1.0,))
    W = (F + g).antiderivative()
    V = W.to_multi(2, 0) + MultiPolynomial(2, {(0, 2): 0.5})
    return LyapunovFunction(V, float(K), "scalar_transformed")


def build_transformed_lyapunov_vector(model: OscillatorModel, K: float = 0.0) -> LyapunovFunction:
    """V = H(x) + G(x) + |y|^2 / 2 for separable damping with a potential."""
    if model.lienard_factors() is None:
        raise ValueError("vector transformed construction requires separable damping")
    if model.potential is None:
        raise ValueError("vector transformed construction requires the potential")
    ts = build_transformed_system(model)
    n = model.n
    nv = 2 * n
    V = (ts.H + model.potential).embed(nv)
    for i in range(n):
        V = V + MultiPolynomial(nv, {_unit(nv, n + i, 2): 0.5})
    return LyapunovFunction(V, float(K), "vector_transformed")


def _unit(nvars: int, var: int, power: int = 1) -> tuple:
    e = [0] * nvars
    e[var] = power
    return tuple(e)


def asymptotic_sign(p: Polynomial, noise: float = _NOISE) -> tuple[str, int]:
    """Sign of p(t) as t -> +inf from the leading coefficient.

    A positive lead is trusted however small it is relative to the other
    coefficients: tiny genuine leads arise along rays nearly tangent to a
    coordinate plane, and the companion grid scan guards the finite
    range.  A negative lead below the cancellation-noise floor cannot be
    told apart from rounding residue, so it reports indeterminate rather
    than a hard fail.
    """
    if p.is_zero():
        return "zero", -1
    lead = p.coeffs[-1]
    deg = len(p.coeffs) - 1
    if lead > 0:
        return "pos", deg
    scale = max(abs(c) for c in p.coeffs)
    if abs(lead) <= noise * scale:
        return "indeterminate", deg
    return "neg", deg


def _reflect(p: Polynomial) -> Polynomial:
    """p(-t)."""
    return Polynomial(tuple(c if k % 2 == 0 else -c for k, c in enumerate(p.coeffs)))


def _eventually_nonneg(p: MultiPolynomial, dirs: np.ndarray) -> tuple[str, dict]:
    """Along every ray, p(t d) must not tend to -inf (nor be a negative
    constant); rays where p vanishes identically count as satisfied."""
    scale = max(1.0, p.max_abs_coeff())
    worst = "pass"
    info: dict = {}
    for d in dirs:
        r = p.restrict_to_ray(d)
        s, deg = asymptotic_sign(r)
        if s in ("zero", "pos"):
            continue
        if s == "neg":
            if deg == 0 and r.coeffs[0] >= -_GRID_TOL * scale:
                continue
            return "fail", {"ray": [float(v) for v in d], "leading_degree": deg}
        if worst == "pass":
            worst = "indeterminate"
            info = {"ray": [float(v) for v in d]}
    return worst, info


def _diverges_pos(p: MultiPolynomial, dirs: np.ndarray,
                  radii: Sequence[float]) -> tuple[str, dict]:
    """p(t d) -> +inf along every ray, cross-checked by growth of the
    minimum over expanding spheres."""
    worst = "pass"
    info: dict = {}
    for d in dirs:
        r = p.restrict_to_ray(d)
        s, deg = asymptotic_sign(r)
        if s == "pos" and deg >= 1:
            continue
        if s == "indeterminate":
            if worst == "pass":
                worst = "indeterminate"
                info = {"ray": [float(v) for v in d]}
            continue
        return "fail", {"ray": [float(v) for v in d], "behavior": s, "leading_degree": deg}
    mins = []
    for radius in radii:
        mins.append(float(p(dirs * radius).min()))
    if not all(b > a for a, b in zip(mins, mins[1:])):
        if worst == "pass":
            worst = "indeterminate"
        info = dict(info, ring_minima=mins)
        return worst, info
    info = dict(info, ring_minima=mins)
    return worst, info


def _grid_check(p: MultiPolynomial, pts: np.ndarray) -> tuple[bool, float, np.ndarray]:
    vals = p(pts)
    i = int(np.argmin(vals))
    vmin = float(vals[i])
    scale = max(1.0, float(np.abs(vals).max()))
    return vmin >= -_GRID_TOL * scale, vmin, pts[i]


def _combine(grid_ok: bool, ray_status: str) -> str:
    if not grid_ok:
        return "fail"
    return ray_status


def _structural(name: str) -> ConditionResult:
    return ConditionResult(
        name, "pass",
        {"note": "polynomial coefficients; smooth and locally Lipschitz by construction"},
    )


def _constant_sigma(model: OscillatorModel) -> Optional[np.ndarray]:
    if isinstance(model.diffusion, ConstantMatrix):
        return model.diffusion.values
    rows = []
    for row in model.diffusion.rows:
        vals = []
        for entry in row:
            if not entry.is_constant():
                return None
            vals.append(entry.constant_value())
        rows.append(vals)
    return np.asarray(rows, dtype=float)


def _velocity_inner_damping(model: OscillatorModel) -> MultiPolynomial:
    """<b(x,y), y> as a polynomial in the 2n phase variables."""
    n = model.n
    nv = 2 * n
    b = model.damping_components()
    out = MultiPolynomial.zero(nv)
    for i in range(n):
        out = out + b[i] * MultiPolynomial.variable(nv, n + i)
    return out


def _speed_squared(nv: int) -> MultiPolynomial:
    n = nv // 2
    out = MultiPolynomial.zero(nv)
    for i in range(n):
        out = out + MultiPolynomial(nv, {_unit(nv, n + i, 2): 1.0})
    return out


def _trace_covariance(rows: Sequence[Sequence[MultiPolynomial]], nv: int) -> MultiPolynomial:
    out = MultiPolynomial.zero(nv)
    for row in rows:
        for entry in row:
            if not entry.is_zero():
                out = out + entry * entry
    return out


def _potential_unbounded(model: OscillatorModel, domain: VerificationDomain,
                         name: str = "potential_unbounded") -> ConditionResult:
    if model.potential is None:
        return ConditionResult(name, "fail", {"note": "model carries no potential"})
    dirs = domain.ray_directions(model.n)
    status, wit = _diverges_pos(model.potential, dirs, domain.ring_radii())
    return ConditionResult(name, status, wit)


def check_trace_bound(model: OscillatorModel, c: float = 1.0,
                      K1: Optional[float] = None,
                      domain: VerificationDomain = DEFAULT_DOMAIN) -> ConditionResult:
    """Tr[sigma sigma^T]/2 <= <y,b> + c [G + |y|^2/2] + K1 on the domain.

    With K1=None the smallest admissible K1 is taken from the grid scan.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    if model.potential is None:
        raise ValueError("trace bound requires the model's potential")
    nv = 2 * model.n
    D0 = (
        _velocity_inner_damping(model)
        + c * (model.potential.embed(nv) + 0.5 * _speed_squared(nv))
        - 0.5 * _trace_covariance(model.diffusion_entries(), nv)
    )
    pts = domain.grid(nv)
    vals = D0(pts)
    if K1 is None:
        K1 = max(0.0, -float(vals.min()))
    shifted = vals + K1
    scale = max(1.0, float(np.abs(shifted).max()))
    grid_ok = bool(shifted.min() >= -_GRID_TOL * scale)
    ray_status, ray_wit = _eventually_nonneg(D0 + K1, domain.ray_directions(nv))
    status = _combine(grid_ok, ray_status)
    i = int(np.argmin(shifted))
    witness = {"c": float(c), "K1": float(K1), "grid_min": float(shifted[i]),
               "argmin": [float(v) for v in pts[i]]}
    witness.update(ray_wit)
    return ConditionResult("trace_energy_inequality", status, witness)


def check_damping_bound(model: OscillatorModel, alpha_search_max: float = 10.0,
                        domain: VerificationDomain = DEFAULT_DOMAIN) -> ConditionResult:
    """Smallest alpha on a 0.05-step grid with <b,y> >= -alpha |y|^2."""
    if _constant_sigma(model) is None:
        raise ValueError("damping bound route requires constant diffusion")
    nv = 2 * model.n
    p0 = _velocity_inner_damping(model)
    q = _speed_squared(nv)
    pts = domain.grid(nv)
    v0 = p0(pts)
    vq = q(pts)
    mask = vq > 0
    ratios = -v0[mask] / vq[mask]
    alpha_req = max(0.0, float(ratios.max())) if ratios.size else 0.0
    candidates = np.arange(0.0, alpha_search_max + 0.025, 0.05)
    dirs = domain.ray_directions(nv)
    for alpha in candidates[candidates >= alpha_req - 1e-12]:
        alpha = float(alpha)
        combo = v0 + alpha * vq
        scale = max(1.0, float(np.abs(combo).max()))
        if combo.min() < -_GRID_TOL * scale:
            continue
        P = p0 + alpha * q
        ray_status, ray_wit = _eventually_nonneg(P, dirs)
        if ray_status == "pass":
            return ConditionResult("damping_velocity_bound", "pass", {"alpha": alpha})
        if ray_status == "fail" and ray_wit.get("leading_degree", 0) > 2:
            # a larger alpha only shifts the quadratic part of each ray
            break
    return ConditionResult(
        "damping_velocity_bound", "fail",
        {"alpha_required_on_grid": alpha_req, "alpha_search_max": float(alpha_search_max)},
    )


def check_scalar_transformed_conditions(
    model: OscillatorModel, domain: VerificationDomain = DEFAULT_DOMAIN
) -> tuple[ConditionResult, ConditionResult, ConditionResult]:
    """The three scalar-route conditions; model must be n=1 separable."""
    lf = model.lienard_factors()
    if model.n != 1 or lf is None:
        raise ValueError("scalar transformed route requires n=1 separable damping")
    F = lf[0].antiderivative()
    g = model.restoring[0].restrict_to_ray((1.0,))
    c01 = _structural("smooth_coefficients")

    # growth of x [F(x) + g(x)] against c1 x^2 outside |x| >= c2
    phi = Polynomial.identity() * (F + g)
    c02 = _restoring_growth(phi, domain)

    # squared noise bounded by (y - F)^2 / 2 + F (F/2 + g) + K1, written
    # in the sheared velocity u = y - F(x): sigma(x, u)^2 / 2 <= u^2 / 2
    # + F (F/2 + g) + K1
    slack = (F * (0.5 * F + g)).to_multi(2, 0) + MultiPolynomial(2, {(0, 2): 0.5})
    D0 = slack - 0.5 * _trace_covariance(model.diffusion_entries(), 2)
    pts = domain.grid(2)
    vals = D0(pts)
    K1 = max(0.0, -float(vals.min()))
    shifted = vals + K1
    scale = max(1.0, float(np.abs(shifted).max()))
    grid_ok = bool(shifted.min() >= -_GRID_TOL * scale)
    ray_status, ray_wit = _eventually_nonneg(D0 + K1, domain.ray_directions(2))
    status = _combine(grid_ok, ray_status)
    wit = {
        "K1": float(K1),
        "note": "squared noise checked as bounded ABOVE by the sheared kinetic "
                "term plus damping-restoring slack; the upper bound is what the "
                "generator estimate consumes",
    }
    wit.update(ray_wit)
    c03 = ConditionResult("diffusion_bound", status, wit)
    return c01, c02, c03


def _restoring_growth(phi: Polynomial, domain: VerificationDomain) -> ConditionResult:
    name = "restoring_growth"
    s_pos, deg = asymptotic_sign(phi)
    s_neg, _ = asymptotic_sign(_reflect(phi))
    if deg < 2:
        return ConditionResult(name, "fail", {"note": "x [F + g] grows slower than x^2"})
    if s_pos == "indeterminate" or s_neg == "indeterminate":
        return ConditionResult(name, "indeterminate", {"leading_degree": deg})
    if s_pos != "pos" or s_neg != "pos":
        return ConditionResult(
            name, "fail", {"note": "x [F + g] is not eventually positive both ways",
                           "leading_degree": deg})
    if deg % 2:
        return ConditionResult(
            name, "fail", {"note": "odd leading degree cannot dominate x^2 on both sides"})
    c1 = 0.5 if deg > 2 else phi.coeffs[2] / 2.0
    psi = phi - c1 * Polynomial((0.0, 0.0, 1.0))
    tail_pos, _ = asymptotic_sign(psi)
    tail_neg, _ = asymptotic_sign(_reflect(psi))
    if tail_pos not in ("pos", "zero") or tail_neg not in ("pos", "zero"):
        return ConditionResult(name, "fail", {"c1": c1, "note": "margin lost asymptotically"})
    R = domain.R_check
    xs = np.linspace(-R, R, 2001)
    vals = psi(xs)
    scale = max(1.0, float(np.abs(vals).max()))
    for c2 in np.arange(0.1, R + 1e-9, 0.1):
        sel = np.abs(xs) >= c2 - 1e-12
        if vals[sel].min() >= -_GRID_TOL * scale:
            return ConditionResult(name, "pass", {"c1": float(c1), "c2": float(round(c2, 10))})
    return ConditionResult(name, "fail", {"c1": float(c1),
                                          "note": f"no threshold below {R} admits the margin"})


def check_vector_transformed_conditions(
    model: OscillatorModel, domain: VerificationDomain = DEFAULT_DOMAIN
) -> tuple[ConditionResult, ConditionResult, ConditionResult]:
    """The three vector-route conditions for separable damping models."""
    if model.lienard_factors() is None:
        raise ValueError("vector transformed route requires separable damping")
    if model.potential is None:
        raise ValueError("vector transformed route requires the potential")
    ts = build_transformed_system(model)
    n = model.n
    nv = 2 * n
    c01 = _structural("smooth_coefficients")

    HG = ts.H + model.potential
    status, wit = _diverges_pos(HG, domain.ray_directions(n), domain.ring_radii())
    c02 = ConditionResult("lyapunov_unbounded", status, wit)

    # Tr[sigma sigma^T] after the shear <= |y|^2 + <F, F + 2 grad G> + K2
    grads = model.potential.gradient()
    slack = _speed_squared(nv)
    for i in range(n):
        Fi = ts.F[i].to_multi(nv, i)
        slack = slack + Fi * (Fi + 2.0 * grads[i].embed(nv))
    D0 = slack - _trace_covariance(ts.system.diffusion_rows[n:], nv)
    pts = domain.grid(nv)
    vals = D0(pts)
    K2 = max(0.0, -float(vals.min()))
    shifted = vals + K2
    scale = max(1.0, float(np.abs(shifted).max()))
    grid_ok = bool(shifted.min() >= -_GRID_TOL * scale)
    ray_status, ray_wit = _eventually_nonneg(D0 + K2, domain.ray_directions(nv))
    wit3 = {"K2": float(K2)}
    wit3.update(ray_wit)
    c03 = ConditionResult("trace_bound", _combine(grid_ok, ray_status), wit3)
    return c01, c02, c03


def _generator_bound(system, V: LyapunovFunction, c: float,
                     domain: VerificationDomain) -> ConditionResult:
    """Direct grid check that c V - LV >= 0 with the chosen constants."""
    LV = apply_generator(system, V.V)
    diff = c * V.total() - LV
    pts = domain.grid(system.dim)
    ok, vmin, arg = _grid_check(diff, pts)
    vok, vmin_V, _ = _grid_check(V.total(), pts)
    status = "pass" if (ok and vok) else "fail"
    return ConditionResult(
        "generator_bound", status,
        {"c": float(c), "K": V.K, "grid_min_cV_minus_LV": vmin,
         "grid_min_V": vmin_V, "argmin": [float(v) for v in arg]},
    )


def _route_damping(model: OscillatorModel, domain: VerificationDomain):
    conds = [_structural("locally_lipschitz"), _potential_unbounded(model, domain)]
    sigma = _constant_sigma(model)
    if sigma is None:
        conds.append(ConditionResult("constant_diffusion", "fail",
                                     {"note": "diffusion is state-dependent"}))
        return conds, {}
    conds.append(ConditionResult("constant_diffusion", "pass", {}))
    c4 = check_damping_bound(model, domain=domain)
    conds.append(c4)
    if not all(r.passed for r in conds):
        return conds, {}
    alpha = c4.witness["alpha"]
    c = 1.0 if 1.0 > 2.0 * alpha else 2.0 * alpha + 1.0
    _, gmin, _ = _grid_check(model.potential, domain.grid(model.n))
    K2 = max(0.0, -gmin)
    trace = float(np.sum(sigma * sigma))
    K = trace / (2.0 * c) + K2
    V = build_energy_lyapunov(model, K=K)
    conds.append(_generator_bound(reduce_to_phase_system(model), V, c, domain))
    constants = {"alpha": alpha, "c": c, "K": K, "K2": K2}
    return conds, constants


def _route_trace(model: OscillatorModel, domain: VerificationDomain):
    conds = [_structural("locally_lipschitz"), _potential_unbounded(model, domain)]
    c = 1.0
    c3 = check_trace_bound(model, c=c, K1=None, domain=domain)
    conds.append(c3)
    if not all(r.passed for r in conds):
        return conds, {}
    K1 = c3.witness["K1"]
    _, gmin, _ = _grid_check(model.potential, domain.grid(model.n))
    K2 = max(0.0, -gmin)
    K = max(K1 / c, K2)
    V = build_energy_lyapunov(model, K=K)
    conds.append(_generator_bound(reduce_to_phase_system(model), V, c, domain))
    constants = {"c": c, "K1": K1, "K2": K2, "K": K}
    return conds, constants


def _route_scalar(model: OscillatorModel, domain: VerificationDomain):
    c01, c02, c03 = check_scalar_transformed_conditions(model, domain)
    conds = [c01, c02, c03]
    if not all(r.passed for r in conds):
        return conds, {}
    K1 = c03.witness["K1"]
    V0 = build_transformed_lyapunov_scalar(model)
    W = V0.V - MultiPolynomial(2, {(0, 2): 0.5})
    _, wmin, _ = _grid_check(W, _lift(domain.grid(1)))
    K = K1 + max(0.0, -wmin)
    V = build_transformed_lyapunov_scalar(model, K=K)
    ts = build_transformed_system(model)
    conds.append(_generator_bound(ts.system, V, 1.0, domain))
    constants = {"c": 1.0, "c1": c02.witness["c1"], "c2": c02.witness["c2"],
                 "K1": K1, "K": K}
    return conds, constants


def _route_vector(model: OscillatorModel, domain: VerificationDomain):
    c01, c02, c03 = check_vector_transformed_conditions(model, domain)
    conds = [c01, c02, c03]
    if not all(r.passed for r in conds):
        return conds, {}
    K2 = c03.witness["K2"]
    ts = build_transformed_system(model)
    _, hgmin, _ = _grid_check(ts.H + model.potential, domain.grid(model.n))
    K = K2 / 4.0 + max(0.0, -hgmin)
    V = build_transformed_lyapunov_vector(model, K=K)
    conds.append(_generator_bound(ts.system, V, 2.0, domain))
    constants = {"c": 2.0, "K2": K2, "K": K}
    return conds, constants


def _lift(xgrid: np.ndarray) -> np.ndarray:
    """1-d x grid -> points (x, 0) in the 2-variable space."""
    return np.stack([xgrid[:, 0], np.zeros(len(xgrid))], axis=-1)


def _applicable(route: str, model: OscillatorModel) -> Optional[str]:
    """None if the route can be attempted, else the reason it cannot."""
    if route == ROUTE_DAMPING:
        if _constant_sigma(model) is None:
            return "diffusion is state-dependent"
        if model.potential is None:
            return "no potential attached"
    elif route == ROUTE_TRACE:
        if model.potential is None:
            return "no potential attached"
    elif route == ROUTE_SCALAR:
        if model.n != 1 or model.lienard_factors() is None:
            return "needs scalar separable damping"
    elif route == ROUTE_VECTOR:
        if model.lienard_factors() is None:
            return "needs separable damping"
        if model.potential is None:
            return "no potential attached"
    return None


_ROUTE_RUNNERS = {
    ROUTE_DAMPING: _route_damping,
    ROUTE_TRACE: _route_trace,
    ROUTE_SCALAR: _route_scalar,
    ROUTE_VECTOR: _route_vector,
}


@dataclass(frozen=True)
class LyapunovCertificate:
    theorem_applied: Optional[str]
    conditions: tuple[ConditionResult, ...]
    constants: Mapping[str, Optional[float]]
    domain: VerificationDomain
    report_text: str

    @property
    def verified(self) -> bool:
        return self.theorem_applied is not None

    def to_json_dict(self) -> dict:
        constants = {k: self.constants.get(k) for k in _CONSTANT_KEYS}
        return {
            "theorem": self.theorem_applied,
            "conditions": [
                {"name": r.name, "status": r.status, "witness": _jsonable(r.witness)}
                for r in self.conditions
            ],
            "constants": constants,
            "domain": self.domain.describe(),
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent, sort_keys=True)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return float(obj)
    return obj


def verify_nonexplosion(model: OscillatorModel,
                        domain: VerificationDomain = DEFAULT_DOMAIN,
                        routes: Optional[Sequence[str]] = None) -> LyapunovCertificate:
    """Try each certificate route in order and return the first full pass.

    When no route passes, the certificate carries theorem_applied=None and
    the per-condition diagnostics of every attempted route.
    """
    routes = tuple(routes) if routes is not None else ROUTE_ORDER
    for r in routes:
        if r not in _ROUTE_RUNNERS:
            raise KeyError(f"unknown route {r!r}; available: {', '.join(ROUTE_ORDER)}")
    lines = [f"model: {model.name}  (dimension n={model.n})"]
    attempts: list[ConditionResult] = []
    for route in routes:
        reason = _applicable(route, model)
        if reason is not None:
            lines.append(f"route {route}: not applicable ({reason})")
            continue
        conds, constants = _ROUTE_RUNNERS[route](model, domain)
        ok = all(r.passed for r in conds)
        lines.append(f"route {route}: {'PASS' if ok else 'no pass'}")
        for r in conds:
            extra = f"  [{_fmt_witness(r.witness)}]" if r.witness else ""
            lines.append(f"  {r.name}: {r.status}{extra}")
        if ok:
            lines.append(f"conclusion: non-explosion certified via {route}")
            return LyapunovCertificate(
                theorem_applied=route,
                conditions=tuple(conds),
                constants=constants,
                domain=domain,
                report_text="\n".join(lines),
            )
        attempts.extend(r.prefixed(route) for r in conds)
    lines.append("conclusion: no certificate route applies")
    return LyapunovCertificate(
        theorem_applied=None,
        conditions=tuple(attempts),
        constants={},
        domain=domain,
        report_text="\n".join(lines),
    )


def _fmt_witness(wit: dict) -> str:
    parts = []
    for k, v in wit.items():
        if isinstance(v, float):
            parts.append(f"{k}={v:.6g}")
        elif isinstance(v, (list, tuple)):
            parts.append(f"{k}=({', '.join(f'{float(x):.4g}' for x in v)})")
        elif k != "note":
            parts.append(f"{k}={v}")
    return ", ".join(parts)
