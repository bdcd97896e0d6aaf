"""Independent numerical checks: quadrature, finite differences, discrete
accretivity, a priori ratios and operator-norm estimation.

Nothing here evaluates the closed-form solutions of the worked examples;
callers pass in plain callables or matrices so that the checks stay
independent of the code they verify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.csgraph
import scipy.sparse.linalg

from .functions import GridFunction, simpson_weights, trapezoid_weights

__all__ = [
    "quadrature",
    "grid_integral",
    "fd_solve_bvp",
    "fd_dtn",
    "DiscreteOperator",
    "transport_upwind",
    "discrete_accretivity",
    "AprioriReport",
    "apriori_check",
    "opnorm_estimate",
]


def quadrature(f: Callable, a: float, b: float, n: int) -> float:
    """Composite Simpson rule for ``f`` on ``[a, b]`` with ``n`` (even) intervals."""
    if not a < b:
        raise ValueError("need a < b")
    if n < 2 or n % 2:
        raise ValueError("n must be even and >= 2")
    x = np.linspace(a, b, n + 1)
    y = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    h = (b - a) / n
    return float(h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum()))


def grid_integral(values, rule: str = "simpson") -> float:
    """Integral over [0, 1] of uniformly sampled ``values``."""
    v = np.asarray(values, dtype=float)
    n = v.shape[-1] - 1
    w = simpson_weights(n) if rule == "simpson" else trapezoid_weights(n)
    return float(np.sum(v * w))


def fd_solve_bvp(kind: str, data: tuple[float, float], n: int) -> GridFunction:
    """Second-order finite differences for ``-w'' + w = 0`` on (0, 1).

    ``kind="dirichlet"``: ``w(0) = g0``, ``w(1) = g1``.
    ``kind="neumann"``: ``-w'(0) = g0``, ``w'(1) = g1`` with one-sided
    second-order boundary stencils.
    """
    if n < 16:
        raise ValueError("n must be at least 16")
    g0, g1 = map(float, data)
    h = 1.0 / n
    diag = 2.0 / h ** 2 + 1.0
    off = -1.0 / h ** 2
    if kind == "dirichlet":
        m = n - 1
        ab = np.zeros((3, m))
        ab[0, 1:] = off
        ab[1, :] = diag
        ab[2, :-1] = off
        rhs = np.zeros(m)
        rhs[0] -= off * g0
        rhs[-1] -= off * g1
        inner = scipy.linalg.solve_banded((1, 1), ab, rhs)
        return GridFunction(np.concatenate([[g0], inner, [g1]]))
    if kind == "neumann":
        a = scipy.sparse.lil_matrix((n + 1, n + 1))
        for i in range(1, n):
            a[i, i - 1] = off
            a[i, i] = diag
            a[i, i + 1] = off
        # -w'(0) ~ (3 w0 - 4 w1 + w2) / 2h,   w'(1) ~ (3 wn - 4 wn-1 + wn-2) / 2h
        a[0, 0], a[0, 1], a[0, 2] = 3 / (2 * h), -4 / (2 * h), 1 / (2 * h)
        a[n, n], a[n, n - 1], a[n, n - 2] = 3 / (2 * h), -4 / (2 * h), 1 / (2 * h)
        rhs = np.zeros(n + 1)
        rhs[0], rhs[n] = g0, g1
        return GridFunction(scipy.sparse.linalg.spsolve(a.tocsc(), rhs))
    raise ValueError(f"unknown boundary kind {kind!r}")


def fd_dtn(g0: float, g1: float, n: int = 4096) -> tuple[float, float]:
    """Outward normal derivatives ``(-w'(0), w'(1))`` of the FD Dirichlet solution."""
    w = fd_solve_bvp("dirichlet", (g0, g1), n).values
    h = 1.0 / n
    d0 = (3 * w[0] - 4 * w[1] + w[2]) / (2 * h)
    d1 = (3 * w[-1] - 4 * w[-2] + w[-3]) / (2 * h)
    return float(d0), float(d1)


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    """Grid operator with its boundary condition eliminated.

    ``full`` acts on all ``n + 1`` samples; ``embed`` maps the free unknowns
    to the full grid so that every vector in its range satisfies the
    boundary condition.  ``matrix`` and ``mass`` are the reduced form and
    mass matrices (``E^T H A E`` and ``E^T W E``).  Matrices may be dense
    or ``scipy.sparse``.
    """

    n: int
    full: Any
    embed: Any
    matrix: Any
    mass: Any
    order: int
    label: str = ""


def transport_upwind(alpha: float, n: int) -> DiscreteOperator:
    """Upwind (backward difference) discretisation of ``d/dx`` on ``u(1) = alpha u(0)``.

    ``alpha = inf`` means ``u(0) = 0``.
    """
    h = 1.0 / n
    idx = np.arange(1, n + 1)
    full = scipy.sparse.csr_matrix(
        (np.concatenate([np.full(n, 1.0 / h), np.full(n, -1.0 / h)]),
         (np.concatenate([idx, idx]), np.concatenate([idx, idx - 1]))),
        shape=(n + 1, n + 1))
    if math.isinf(alpha):
        embed = scipy.sparse.identity(n + 1, format="csr")[:, 1:]
    else:
        rows = np.append(np.arange(n), n)
        cols = np.append(np.arange(n), 0)
        vals = np.append(np.ones(n), float(alpha))
        embed = scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(n + 1, n))
    weights_form = np.full(n + 1, h)
    weights_form[0] = 0.0
    matrix = (embed.T @ scipy.sparse.diags(weights_form) @ full @ embed).tocsr()
    mass = (embed.T @ scipy.sparse.diags(trapezoid_weights(n)) @ embed).tocsr()
    return DiscreteOperator(n, full, embed, matrix, mass, order=1,
                            label=f"transport upwind alpha={alpha}")


def _smallest_eig(sym, mass) -> float:
    """Smallest eigenvalue of ``sym x = lam mass x``.

    Diagonal mass plus a narrow band after reverse Cuthill-McKee reordering
    goes through ``eig_banded``; anything else falls back to dense ``eigh``.
    """
    if scipy.sparse.issparse(mass):
        d = mass.diagonal()
        diagonal = (mass - scipy.sparse.diags(d)).count_nonzero() == 0
    else:
        mass = np.asarray(mass)
        d = np.diag(mass).copy()
        diagonal = np.count_nonzero(mass - np.diag(d)) == 0
    if diagonal and np.all(d > 0):
        scale = scipy.sparse.diags(1.0 / np.sqrt(d))
        c = (scale @ scipy.sparse.csr_matrix(sym) @ scale).tocsr()
        perm = scipy.sparse.csgraph.reverse_cuthill_mckee(c, symmetric_mode=True)
        c = c[perm][:, perm].tocoo()
        bw = int(np.max(np.abs(c.row - c.col), initial=0))
        if bw <= 16:
            band = np.zeros((bw + 1, c.shape[0]))
            low = c.row >= c.col
            band[c.row[low] - c.col[low], c.col[low]] = c.data[low]
            ev = scipy.linalg.eig_banded(band, lower=True, eigvals_only=True,
                                         select="i", select_range=(0, 0))
            return float(ev[0])
    if scipy.sparse.issparse(sym):
        sym = sym.toarray()
    if scipy.sparse.issparse(mass):
        mass = mass.toarray()
    ev = scipy.linalg.eigh(sym, mass, eigvals_only=True, subset_by_index=[0, 0])
    return float(ev[0])


def discrete_accretivity(descriptor, n: int = 2048) -> float:
    """Smallest generalised eigenvalue of the symmetric part of a discrete ``L``.

    ``descriptor`` is a :class:`DiscreteOperator` or ``("transport", alpha)``.
    A non-negative value means the discrete realisation is accretive.
    """
    if isinstance(descriptor, DiscreteOperator):
        op = descriptor
    else:
        kind, param = descriptor
        if kind != "transport":
            raise ValueError(f"unknown example {kind!r}")
        op = transport_upwind(float(param), n)
    sym = (op.matrix + op.matrix.T) / 2
    return _smallest_eig(sym, op.mass)


@dataclass(frozen=True)
class AprioriReport:
    worst_ratio: float
    ratios: tuple[float, ...]
    excluded: int
    bound: float

    @property
    def ok(self) -> bool:
        return self.worst_ratio <= self.bound + 1e-6


def _l2(f: Callable, x: np.ndarray) -> float:
    vals = np.atleast_2d(np.asarray(f(x), dtype=float))
    return math.sqrt(sum(grid_integral(c ** 2) for c in vals))


def apriori_check(samples: Iterable[tuple[Callable, Callable]], mu: float = 1.0,
                  n: int = 1024) -> AprioriReport:
    """Worst ``(||u|| + ||T1 u||) / ||T1 u||`` over samples ``(u, T1u)``.

    Each callable maps grid points to values (vector-valued functions return
    one row per component).  Samples with ``T1 u = 0`` are excluded and
    counted.
    """
    x = np.linspace(0.0, 1.0, n + 1)
    ratios = []
    excluded = 0
    for u, t1u in samples:
        nu, nt = _l2(u, x), _l2(t1u, x)
        if nt <= 1e-14:
            excluded += 1
            continue
        ratios.append((nu + nt) / nt)
    worst = max(ratios) if ratios else 0.0
    return AprioriReport(worst, tuple(ratios), excluded, 1.0 + 1.0 / mu)


def opnorm_estimate(a, iterations: int = 1000, tol: float = 1e-14, seed: int = 0) -> float:
    """Largest singular value by power iteration on ``A^* A``.

    ``a`` is a dense or sparse matrix, a ``LinearOperator`` or a tuple
    ``(matvec, rmatvec, shape)``.
    """
    if iterations < 10:
        raise ValueError("iterations must be at least 10")
    if isinstance(a, tuple):
        matvec, rmatvec, shape = a
        op = scipy.sparse.linalg.LinearOperator(shape, matvec=matvec, rmatvec=rmatvec)
    else:
        op = scipy.sparse.linalg.aslinearoperator(a)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(op.shape[1])
    x /= np.linalg.norm(x)
    sigma = 0.0
    for k in range(iterations):
        y = op.matvec(x)
        new = float(np.linalg.norm(y))
        if new == 0.0:
            return 0.0
        z = op.rmatvec(y)
        nz = np.linalg.norm(z)
        if nz == 0.0:
            return new
        x = z / nz
        if k >= 10 and abs(new - sigma) <= tol * new:
            sigma = new
            break
        sigma = new
    return sigma
