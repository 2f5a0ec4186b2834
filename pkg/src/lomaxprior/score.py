"""Numerical checks for the score-based derivation of the Lomax prior.

The convex generator is  alpha(u) = sum_i u_i^-(k+d)  composed into
phi(q, g) = q * alpha(g/q), which is positively homogeneous of degree one.
The induced score of a density field q on the positive orthant is

    S(q)(x) = -dphi/dq + sum_i d/dx_i [ dphi/dg_i ],

evaluated along x -> (q(x), grad q(x)).  S vanishes identically when the
field is a multivariate Lomax density with matching shape k, and is bounded
away from zero for other fields; both facts are what the test suite checks.

k is restricted to odd positive integers so that the signed powers
u^-(k+d) are defined for the negative u = g/q values a decaying density
produces, and so that the generator is convex on the positive orthant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from lomaxprior.lomax import LomaxSpec, log_density

__all__ = [
    "AlphaSpec",
    "DensityField",
    "lomax_field",
    "exponential_field",
    "alpha",
    "alpha_grad",
    "alpha_hessian_det",
    "finite_difference_hessian",
    "phi",
    "phi_partials",
    "euler_identity_residual",
    "score",
    "score_grid",
    "default_grid",
    "bregman_divergence",
]


@dataclass(frozen=True)
class AlphaSpec:
    """Shape k (odd positive integer) and dimension d of the generator."""

    k: int
    dim: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1 or self.k % 2 == 0:
            raise ValueError(f"k must be an odd positive integer, got {self.k}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def exponent(self) -> int:
        return self.k + self.dim


@dataclass
class DensityField:
    """A positive density on the open positive orthant with first partials.

    ``grad`` may be None, in which case gradients fall back to central
    differences with relative step ``fd_step``.
    """

    density: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray] | None = None
    fd_step: float = 1e-6

    def gradient(self, x: np.ndarray) -> np.ndarray:
        if self.grad is not None:
            return np.asarray(self.grad(x), dtype=float)
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        for i in range(x.size):
            h = self.fd_step * max(1.0, abs(x[i]))
            h = min(h, 0.5 * x[i]) if x[i] > 0 else h
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            out[i] = (self.density(xp) - self.density(xm)) / (2 * h)
        return out


def lomax_field(spec: LomaxSpec) -> DensityField:
    """LM(d, k, a) density on the positive orthant with analytic gradient."""
    if spec.folded:
        raise ValueError("score checks operate on the positive orthant only")
    m = spec.shape + spec.dim

    def dens(x):
        return math.exp(log_density(spec, x))

    def grad(x):
        q = dens(x)
        return np.full(spec.dim, -m * q / (spec.scale + float(np.sum(x))))

    return DensityField(density=dens, grad=grad)


def exponential_field(dim: int, rate: float = 1.0) -> DensityField:
    """Product of independent Exp(rate) densities; a non-Lomax counterexample."""

    def dens(x):
        return rate**dim * math.exp(-rate * float(np.sum(x)))

    def grad(x):
        return np.full(dim, -rate * dens(x))

    return DensityField(density=dens, grad=grad)


def _check_nonzero(u: np.ndarray):
    if np.any(u == 0.0):
        raise ValueError("alpha is singular where a component of u is zero")


def alpha(spec: AlphaSpec, u) -> float:
    """sum_i u_i^-(k+d), with the signed-power convention for integer exponents."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (spec.dim,):
        raise ValueError(f"u must have length {spec.dim}")
    _check_nonzero(u)
    return float(np.sum(u ** (-spec.exponent)))


def alpha_grad(spec: AlphaSpec, u) -> np.ndarray:
    """Component i is -(k+d) u_i^-(k+d+1)."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    _check_nonzero(u)
    return -spec.exponent * u ** (-(spec.exponent + 1))


def alpha_hessian_det(spec: AlphaSpec, u) -> float:
    """(k+d)^d (k+d+1)^d prod u_i^-(k+d+2), valid on the positive orthant."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(u <= 0.0):
        raise ValueError("Hessian determinant formula requires u > 0")
    m = spec.exponent
    return float(m**spec.dim * (m + 1) ** spec.dim * np.prod(u ** (-(m + 2))))


def finite_difference_hessian(f, x, h: float = 1e-3) -> np.ndarray:
    """Dense central-difference Hessian of a scalar function."""
    x = np.asarray(x, dtype=float)
    n = x.size
    steps = h * np.maximum(1.0, np.abs(x))
    out = np.empty((n, n))
    f0 = f(x)
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = steps[i]
        out[i, i] = (f(x + ei) - 2.0 * f0 + f(x - ei)) / steps[i] ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = steps[j]
            out[i, j] = out[j, i] = (
                f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)
            ) / (4.0 * steps[i] * steps[j])
    return out


def phi(spec: AlphaSpec, q: float, grad) -> float:
    """phi(q, g) = q * alpha(g / q); homogeneous of degree one in (q, g)."""
    if not q > 0:
        raise ValueError("q must be > 0")
    grad = np.atleast_1d(np.asarray(grad, dtype=float))
    return q * alpha(spec, grad / q)


def phi_partials(spec: AlphaSpec, q: float, grad):
    """Analytic (dphi/dq, dphi/dg): the degree-one Euler structure of phi."""
    grad = np.atleast_1d(np.asarray(grad, dtype=float))
    u = grad / q
    g = alpha_grad(spec, u)
    dq = alpha(spec, u) - float(np.dot(u, g))
    return dq, g


def euler_identity_residual(spec: AlphaSpec, q: float, grad, h: float = 1e-5) -> float:
    """phi - (q dphi/dq + sum g_i dphi/dg_i) with partials by central differences."""
    grad = np.atleast_1d(np.asarray(grad, dtype=float))
    f0 = phi(spec, q, grad)
    hq = min(h * max(1.0, abs(q)), 0.5 * q)
    dq = (phi(spec, q + hq, grad) - phi(spec, q - hq, grad)) / (2 * hq)
    total = q * dq
    for i in range(grad.size):
        hi = min(h * max(1.0, abs(grad[i])), 0.5 * abs(grad[i]))
        gp, gm = grad.copy(), grad.copy()
        gp[i] += hi
        gm[i] -= hi
        total += grad[i] * (phi(spec, q, gp) - phi(spec, q, gm)) / (2 * hi)
    return f0 - total


def _partial_phi_component(spec: AlphaSpec, field: DensityField, x: np.ndarray, i: int) -> float:
    """dphi/dg_i along the field, i.e. alpha_i(grad q(x) / q(x))."""
    q = field.density(x)
    if not np.isfinite(q) or q <= 1e-300:
        raise FloatingPointError(f"density underflow at stencil point {x}")
    u = field.gradient(x) / q
    if u[i] == 0.0:
        raise ValueError("alpha is singular where a component of u is zero")
    return -spec.exponent * u[i] ** (-(spec.exponent + 1))


def score(
    spec: AlphaSpec,
    field: DensityField,
    x,
    h: float = 1e-4,
    refine: bool = True,
) -> float:
    """Bregman score of the field at x.

    The outer total derivatives d/dx_i [dphi/dg_i] use central differences
    (with one Richardson refinement step by default); the inner partials of
    phi are analytic.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (spec.dim,):
        raise ValueError(f"x must have length {spec.dim}")
    if np.any(x <= 0.0):
        raise ValueError("score is evaluated on the positive orthant")
    q0 = field.density(x)
    if not np.isfinite(q0) or q0 <= 1e-300:
        raise FloatingPointError(f"density underflow at {x}")
    dq, _ = phi_partials(spec, q0, field.gradient(x))
    total = -dq

    def central(i, step):
        xp, xm = x.copy(), x.copy()
        xp[i] += step
        xm[i] -= step
        return (
            _partial_phi_component(spec, field, xp, i)
            - _partial_phi_component(spec, field, xm, i)
        ) / (2 * step)

    for i in range(spec.dim):
        hi = min(h * max(1.0, x[i]), 0.5 * x[i])
        d1 = central(i, hi)
        if refine:
            d2 = central(i, hi / 2)
            total += (4.0 * d2 - d1) / 3.0
        else:
            total += d1
    return total


def default_grid(dim: int, n_points: int = 20, seed: int = 12345) -> np.ndarray:
    """Deterministic evaluation grid in the positive orthant."""
    rng = np.random.default_rng(seed)
    return 0.3 + 3.0 * rng.random((n_points, dim))


def score_grid(spec: AlphaSpec, field: DensityField, points=None, h: float = 1e-4) -> np.ndarray:
    """Score evaluated at each row of ``points`` (default grid when omitted)."""
    if points is None:
        points = default_grid(spec.dim)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return np.array([score(spec, field, row, h=h) for row in points])


def _bregman_integrand(spec, field_p, field_q, x):
    p = field_p.density(x)
    q = field_q.density(x)
    gp = field_p.gradient(x)
    gq = field_q.gradient(x)
    dq, dg = phi_partials(spec, q, gq)
    # phi(p) -> 0 as p -> 0 with bounded gp/p; guard the underflowed far field
    phi_p = phi(spec, p, gp) if p > 1e-300 else 0.0
    return (
        phi_p
        - phi(spec, q, gq)
        - dq * (p - q)
        - float(np.dot(dg, gp - gq))
    )


def bregman_divergence(
    spec: AlphaSpec,
    field_p: DensityField,
    field_q: DensityField,
    nodes: int = 48,
    scale: float = 1.0,
) -> float:
    """Quadrature of the pointwise Bregman gap over the positive orthant (d <= 2).

    Each axis is compactified with x = scale * t/(1-t); intended as a small
    diagnostic utility, not a tight numerical contract.
    """
    if spec.dim > 2:
        raise ValueError("divergence quadrature supports dim <= 2 only")
    z, w = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (z + 1.0)
    xs = scale * t / (1.0 - t)
    ws = 0.5 * w * scale / (1.0 - t) ** 2
    total = 0.0
    if spec.dim == 1:
        for xi, wi in zip(xs, ws):
            total += wi * _bregman_integrand(spec, field_p, field_q, np.array([xi]))
    else:
        for xi, wi in zip(xs, ws):
            for yj, wj in zip(xs, ws):
                total += wi * wj * _bregman_integrand(
                    spec, field_p, field_q, np.array([xi, yj])
                )
    return total
