"""First-order transport on (0, 1): ``T0 = d/dx + 1`` and its realisations.

Realisations ``T^alpha`` live on ``{u : u(1) = alpha u(0)}`` and
``T^inf`` on ``{u : u(0) = 0}``.  Boundary coordinates are the traces
``(u(0), u(1))``, where the boundary form is ``u(1) v(1) - u(0) v(0)``.
Real scalars throughout.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.integrate
import scipy.sparse

from . import boundary, oracles
from .boundary import BCSubspace, BoundaryModel, MOperatorMat
from .errors import (InvalidW2, NotADirectSum, NotAGenerator, NotBijectiveRealisation,
                     NotInvertible)
from .functions import ClosedForm, GridFunction, trapezoid_weights

__all__ = [
    "E",
    "parse_alpha",
    "format_alpha",
    "transport_model",
    "realisation_subspace",
    "contraction_norm_closed_form",
    "solve_realisation",
    "realisation_residual",
    "semigroup_apply",
    "semigroup_matrix",
    "semigroup_norm",
    "perturbed_semigroup_norm",
    "resolvent_L0",
    "resolvent_norm_sq_published",
    "resolvent_norm_sq_exact",
    "HilleYosidaReport",
    "hille_yosida_violation",
    "w2_r",
    "m_alpha_r",
    "t1_apply",
    "random_domain_samples",
    "SweepRow",
    "sweep",
    "sweep_csv",
]

E = math.e
INV_E = math.exp(-1.0)
DEFAULT_GRID = 1024

_INF_TOKENS = {"inf", "+inf", "infinity", "∞", "oo"}
_INV_E_TOKENS = {"1/e", "e^-1", "e**-1", "exp(-1)", "inv_e"}


def parse_alpha(value) -> float:
    """Boundary parameter as a float; ``inf`` (either sign) encodes ``u(0) = 0``."""
    if isinstance(value, str):
        token = value.strip().lower()
        if token in _INF_TOKENS or token == "-inf":
            return math.inf
        if token in _INV_E_TOKENS:
            return INV_E
        if token in {"-1/e", "-e^-1"}:
            return -INV_E
        value = float(token)
    value = float(value)
    if math.isnan(value):
        raise ValueError("alpha must not be NaN")
    return math.inf if math.isinf(value) else value


def format_alpha(alpha: float) -> str:
    return "inf" if math.isinf(alpha) else repr(float(alpha))


def transport_model() -> BoundaryModel:
    """Trace coordinates, ``J = diag(-1, 1)``, ``K+ = span{(1, e)}``, ``K- = span{(1, 1/e)}``."""
    return BoundaryModel(np.diag([-1.0, 1.0]),
                         np.array([[1.0], [E]]),
                         np.array([[1.0], [INV_E]]),
                         name="transport-1d")


def realisation_subspace(alpha, model: BoundaryModel | None = None) -> BCSubspace:
    """``dom T^alpha`` modulo ``H^1_0``: the line through ``(1, alpha)`` or ``(0, 1)``."""
    alpha = parse_alpha(alpha)
    model = model or transport_model()
    vec = [0.0, 1.0] if math.isinf(alpha) else [1.0, alpha]
    return model.subspace(np.array(vec))


def contraction_norm_closed_form(alpha) -> float:
    """``||U|| = |e - alpha| / (e |alpha - 1/e|)``; ``1/e`` at infinity."""
    alpha = parse_alpha(alpha)
    if math.isinf(alpha):
        return INV_E
    if alpha == INV_E:
        return math.inf
    return abs(E - alpha) / (E * abs(alpha - INV_E))


def _cumulative(values: np.ndarray, h: float) -> np.ndarray:
    x = np.arange(values.size) * h
    return scipy.integrate.cumulative_simpson(values, x=x, initial=0.0)


def solve_realisation(alpha, f: GridFunction, shift: float = 0.0) -> GridFunction:
    """Solve ``u' + (1 + shift) u = f`` with the boundary condition of ``T^alpha``.

    Uses the integrating factor: ``u(x) = exp(-c x) (C + int_0^x exp(c y) f(y) dy)``
    with ``c = 1 + shift``.

    Raises
    ------
    NotInvertible
        If ``alpha = exp(-c)``, where the boundary condition cannot fix ``C``.
    """
    alpha = parse_alpha(alpha)
    if shift < 0:
        raise ValueError("shift must be non-negative")
    c = 1.0 + shift
    x = f.x
    integral = _cumulative(np.exp(c * x) * f.values, f.h)
    if math.isinf(alpha):
        const = 0.0
    else:
        denom = alpha - math.exp(-c)
        if abs(denom) < 1e-12:
            raise NotInvertible(f"T^alpha + {shift} is not bijective at alpha = exp(-{c})")
        const = math.exp(-c) * integral[-1] / denom
    return GridFunction(np.exp(-c * x) * (const + integral))


def realisation_residual(alpha, f: GridFunction, u: GridFunction, shift: float = 0.0) -> float:
    """Max residual of the integrated equation and the boundary condition.

    Checks ``u(x) - u(0) + c int_0^x u - int_0^x f = 0`` on the grid and
    ``u(1) - alpha u(0) = 0`` (or ``u(0) = 0``).
    """
    alpha = parse_alpha(alpha)
    c = 1.0 + shift
    h = u.h
    weak = u.values - u.values[0] + c * _cumulative(u.values, h) - _cumulative(f.values, h)
    bc = u.values[0] if math.isinf(alpha) else u.values[-1] - alpha * u.values[0]
    return float(max(np.max(np.abs(weak)), abs(bc)))


def _shift_indices(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Source index and number of unit wraps for a backward shift by ``k`` cells."""
    j = np.arange(n + 1) - k
    wraps = np.where(j < 0, (-j + n - 1) // n, 0)
    return j + wraps * n, wraps


def _wrap_factor(alpha: float, wraps: np.ndarray) -> np.ndarray:
    if math.isinf(alpha):
        return np.where(wraps > 0, 0.0, 1.0)
    return np.power(float(alpha), -wraps.astype(float))


def _shift_weights(t: float, n: int) -> list[tuple[int, float]]:
    s = t * n
    k = round(s)
    if abs(s - k) <= 1e-9:
        return [(int(k), 1.0)]
    k0 = math.floor(s)
    theta = s - k0
    return [(k0, 1.0 - theta), (k0 + 1, theta)]


def semigroup_apply(alpha, u0: GridFunction, t: float) -> GridFunction:
    """``(S(t) u0)(x) = u0(x - t)`` with ``u0`` extended by ``alpha u0(-s) = u0(1 - s)``.

    Each unit of backward travel multiplies by ``1 / alpha``.  Sampling is
    exact when ``t * n`` is an integer; otherwise the two neighbouring exact
    shifts are blended linearly.

    Raises
    ------
    NotAGenerator
        For ``alpha = 0``, ``t > 0`` and nonzero ``u0``: no extension exists.
    """
    alpha = parse_alpha(alpha)
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return u0
    if alpha == 0:
        if np.any(u0.values != 0):
            raise NotAGenerator("alpha = 0: the translation has no extension beyond u0 = 0")
        return u0
    out = np.zeros_like(u0.values)
    for k, weight in _shift_weights(t, u0.n):
        src, wraps = _shift_indices(u0.n, k)
        out += weight * _wrap_factor(alpha, wraps) * u0.values[src]
    return GridFunction(out)


def semigroup_matrix(alpha, t: float, n: int = DEFAULT_GRID) -> scipy.sparse.csr_matrix:
    """Sparse ``(n+1) x (n+1)`` matrix of :func:`semigroup_apply` on the grid."""
    alpha = parse_alpha(alpha)
    if alpha == 0 and t > 0:
        raise NotAGenerator("alpha = 0 does not generate a semigroup")
    rows = np.arange(n + 1)
    mat = scipy.sparse.csr_matrix((n + 1, n + 1))
    if t == 0:
        return scipy.sparse.identity(n + 1, format="csr")
    for k, weight in _shift_weights(t, n):
        src, wraps = _shift_indices(n, k)
        vals = weight * _wrap_factor(alpha, wraps)
        mat = mat + scipy.sparse.csr_matrix((vals, (rows, src)), shape=(n + 1, n + 1))
    return mat


def semigroup_norm(alpha, t: float, n_grid: int = DEFAULT_GRID) -> float:
    """Norm of ``S(t)`` on grid functions in ``dom T^alpha`` (trapezoid L2 norm)."""
    alpha = parse_alpha(alpha)
    if alpha == 0:
        raise NotAGenerator("alpha = 0 does not generate a semigroup")
    n = n_grid
    s = semigroup_matrix(alpha, t, n)
    w = trapezoid_weights(n)
    # domain parametrisation: free unknowns -> full grid honouring the condition
    if math.isinf(alpha):
        embed = scipy.sparse.identity(n + 1, format="csr")[:, 1:]
        gram = w[1:].copy()
    else:
        embed = scipy.sparse.lil_matrix((n + 1, n))
        embed[np.arange(n), np.arange(n)] = 1.0
        embed[n, 0] = alpha
        embed = embed.tocsr()
        gram = w[:n].copy()
        gram[0] += alpha ** 2 * w[n]
    op = scipy.sparse.diags(np.sqrt(w)) @ s @ embed @ scipy.sparse.diags(1.0 / np.sqrt(gram))
    return oracles.opnorm_estimate(op.tocsr())


def perturbed_semigroup_norm(alpha, t: float, n_grid: int = DEFAULT_GRID) -> float:
    """Norm of ``exp(t) S(t)``, the semigroup after adding ``S = 1`` back."""
    return math.exp(t) * semigroup_norm(alpha, t, n_grid)


_GAUSS = np.polynomial.legendre.leggauss(24)


def _fitted_weights(mu: float, nodes: Sequence[float], a: float, b: float) -> np.ndarray:
    """Weights ``w`` with ``sum w_k p(s_k) = int_a^b exp(-mu (s - a)) p(s) ds``.

    Exact for polynomials ``p`` of degree below ``len(nodes)``.
    """
    deg = len(nodes)
    if mu * (b - a) < 1.0:
        x, w = _GAUSS
        s = (b - a) / 2 * x + (a + b) / 2
        kern = (b - a) / 2 * w * np.exp(-mu * (s - a))
        moments = np.array([np.sum(kern * s ** j) for j in range(deg)])
    else:
        # int_a^b s^j e^{-mu (s-a)} ds by the integration-by-parts recurrence
        eb = math.exp(-mu * (b - a))
        moments = np.empty(deg)
        moments[0] = (1 - eb) / mu
        for j in range(1, deg):
            moments[j] = (a ** j - b ** j * eb) / mu + j / mu * moments[j - 1]
    vander = np.vander(np.asarray(nodes, dtype=float), deg, increasing=True)
    return np.linalg.solve(vander.T, moments)


def resolvent_L0(lam: float, f: GridFunction) -> GridFunction:
    """``R(lam, L^0) f (x) = int_x^1 exp(lam (x - y)) f(y) dy`` on the grid.

    Composite Simpson panels (one 3/8 panel where the parity requires it)
    swept from ``x = 1`` backwards.  Each panel integrates the exponential
    kernel exactly against the interpolating polynomial of ``f``, so the
    result stays accurate when ``lam h`` is not small.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    n, h = f.n, f.h
    mu = lam * h
    fv = f.values
    simpson = h * _fitted_weights(mu, (0, 1, 2), 0, 2)
    three8 = h * _fitted_weights(mu, (0, 1, 2, 3), 0, 3)
    last = h * _fitted_weights(mu, (-1, 0, 1), 0, 1)
    q2, q3 = math.exp(-2 * mu), math.exp(-3 * mu)
    g = np.zeros(n + 1)
    g[n - 1] = last @ fv[n - 2:n + 1]
    for i in range(n - 2, -1, -1):
        if (n - i) % 2 == 0:
            g[i] = q2 * g[i + 2] + simpson @ fv[i:i + 3]
        else:
            g[i] = q3 * g[i + 3] + three8 @ fv[i:i + 4]
    return GridFunction(g)


def resolvent_norm_sq_published(lam: float) -> float:
    """The closed-form lower bound for ``||R(lam, L^0) 1||^2`` as published."""
    return 3 / (2 * lam) * abs(1 - 2 / (3 * lam) - 4 / 3 * math.exp(-lam)
                               + math.exp(-2 * lam) / 3)


def resolvent_norm_sq_exact(lam: float) -> float:
    """``int_0^1 ((1 - exp(lam (x - 1))) / lam)^2 dx`` in closed form."""
    return (1 - 3 / (2 * lam) + 2 * math.exp(-lam) / lam
            - math.exp(-2 * lam) / (2 * lam)) / lam ** 2


@dataclass(frozen=True)
class HilleYosidaReport:
    lambdas: tuple[float, ...]
    products: tuple[float, ...]          # lam * sqrt(published bound)
    exact_products: tuple[float, ...]    # lam * ||R(lam, L^0) 1|| from the exact norm
    strictly_increasing: bool
    unbounded_trend: bool

    @property
    def ok(self) -> bool:
        return self.strictly_increasing and self.unbounded_trend


def hille_yosida_violation(lambdas: Sequence[float]) -> HilleYosidaReport:
    """Tabulate ``lam * ||R(lam, L^0)||`` lower bounds for increasing ``lam``."""
    lams = tuple(float(x) for x in lambdas)
    if any(x <= 0 for x in lams):
        raise ValueError("lambda values must be positive")
    prods = tuple(x * math.sqrt(resolvent_norm_sq_published(x)) for x in lams)
    exact = tuple(x * math.sqrt(resolvent_norm_sq_exact(x)) for x in lams)
    increasing = all(b > a for a, b in zip(prods, prods[1:]))
    unbounded = bool(prods) and prods[-1] > 10
    return HilleYosidaReport(lams, prods, exact, increasing, unbounded)


def w2_r(r: float, model: BoundaryModel | None = None) -> BCSubspace:
    """Traces of ``span{e^{-x} + r e^x}``."""
    model = model or transport_model()
    return model.subspace(np.array([1.0 + r, INV_E + r * E]))


def m_alpha_r(alpha, r: float = 0.0, model: BoundaryModel | None = None) -> MOperatorMat:
    """Boundary matrix of ``M^{alpha,r} = D (1 - 2 p2)`` for ``dom T^alpha (+) W2^r``.

    ``<M u, v> = (u1 - 2K (1/e + r e)) v1 - (u0 - 2K (1 + r)) v0`` with
    ``K = (u1 - alpha u0) / (1/e + r e - alpha (1 + r))`` (``u0 / (1 + r)``
    at infinity).
    """
    alpha = parse_alpha(alpha)
    model = model or transport_model()
    if abs(r) > INV_E * (1 + 1e-12):
        raise InvalidW2(f"|r| = {abs(r)} exceeds 1/e: W2^r is not non-positive")
    w0, w1 = 1.0 + r, INV_E + r * E
    if math.isinf(alpha):
        k = np.array([1.0 / w0, 0.0])
    else:
        denom = w1 - alpha * w0
        if abs(denom) < 1e-12:
            raise NotADirectSum(f"W2^r lies inside dom T^alpha (alpha={alpha}, r={r})")
        k = np.array([-alpha, 1.0]) / denom
    # rows: coefficient of v0, v1;  columns: u0, u1
    mat = np.array([
        [-1.0 + 2 * w0 * k[0], 2 * w0 * k[1]],
        [-2 * w1 * k[0], 1.0 - 2 * w1 * k[1]],
    ])
    return MOperatorMat(model, mat)


def t1_apply(u: ClosedForm) -> ClosedForm:
    """``T1 u = u' + u``."""
    return u.derivative() + u


def _domain_correction(v: ClosedForm, alpha: float) -> ClosedForm:
    u0, u1 = v.traces()
    if math.isinf(alpha):
        return v - ClosedForm.polynomial(u0, -u0)
    return v + ClosedForm.polynomial(0.0, alpha * u0 - u1)


def random_domain_samples(alpha, count: int, seed: int = 0) -> list[ClosedForm]:
    """Random exponential combinations adjusted by a linear term into ``dom T^alpha``."""
    alpha = parse_alpha(alpha)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        k = int(rng.integers(1, 4))
        terms = tuple((float(a), float(r)) for a, r in
                      zip(rng.standard_normal(k), rng.uniform(-4, 4, k)))
        poly = tuple(float(c) for c in rng.standard_normal(int(rng.integers(1, 4))))
        out.append(_domain_correction(ClosedForm(terms, poly), alpha))
    return out


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    bijective: bool
    signed_map: bool
    m_accretive: bool
    U_norm: float
    semigroup_norm_t1: float


def _sweep_one(alpha: float, n_grid: int) -> SweepRow:
    model = transport_model()
    v = realisation_subspace(alpha, model)
    try:
        u_norm = boundary.contraction_from_v(v).norm
        bijective = True
    except NotBijectiveRealisation:
        u_norm = math.nan
        bijective = False
    signed = boundary.check_V(v).ok
    macc = boundary.is_m_accretive(v)
    try:
        sg = semigroup_norm(alpha, 1.0, n_grid)
    except NotAGenerator:
        sg = math.nan
    return SweepRow(alpha, bijective, signed, macc, u_norm, sg)


def sweep(alphas: Iterable, n_grid: int = 256, jobs: int = 1) -> list[SweepRow]:
    """Classify ``T^alpha`` over a grid of parameters, in input order."""
    alphas = [parse_alpha(a) for a in alphas]
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(lambda a: _sweep_one(a, n_grid), alphas))
    return [_sweep_one(a, n_grid) for a in alphas]


def sweep_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["alpha", "bijective", "signed_map", "m_accretive", "U_norm",
                     "semigroup_norm_t1"])
    for r in rows:
        writer.writerow([format_alpha(r.alpha), int(r.bijective), int(r.signed_map),
                         int(r.m_accretive), repr(r.U_norm), repr(r.semigroup_norm_t1)])
    return buf.getvalue()
