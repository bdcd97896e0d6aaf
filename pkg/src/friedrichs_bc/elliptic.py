"""First-order form of ``-u'' + u = f`` on (0, 1): ``p = -u'``, ``p' + u = f``.

Unknowns are pairs ``(p, u)``.  The boundary space is four dimensional with
coordinates ``(p0, p1, u0, u1)`` (endpoint values), and the boundary form is

    [(p, u), (q, v)] = p1 v1 + q1 u1 - p0 v0 - q0 u0.

Normal traces of a flux are ``(-p0, p1)``; Dirichlet traces are ``(u0, u1)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from . import boundary, krein
from .boundary import BCSubspace, BoundaryModel, MOperatorMat
from .errors import InvalidParameter
from .functions import ClosedForm

__all__ = [
    "BoundaryTrace4",
    "EllipticPair",
    "elliptic_model",
    "boundary_form",
    "dirichlet_subspace",
    "DirichletReport",
    "dirichlet_report",
    "solve_homog_dirichlet",
    "dtn",
    "dtn_matrix",
    "m_dirichlet",
    "m_alpha",
    "solve_neumann",
    "w2_alpha",
    "W2Report",
    "w2_alpha_report",
    "random_dirichlet_samples",
    "family_rows",
    "family_csv",
    "family_json",
]

E = math.e
SINH1 = math.sinh(1.0)
COSH1 = math.cosh(1.0)
_EMAT = np.diag([-1.0, 1.0])


class BoundaryTrace4(NamedTuple):
    p0: float
    p1: float
    u0: float
    u1: float

    def as_array(self) -> np.ndarray:
        return np.array(self, dtype=float)


@dataclass(frozen=True)
class EllipticPair:
    """A pair ``(p, u)`` of closed-form functions on [0, 1]."""

    p: ClosedForm
    u: ClosedForm

    @classmethod
    def from_potential(cls, u: ClosedForm, sign: float = -1.0) -> EllipticPair:
        """``(sign * u', u)``; ``sign = -1`` gives the flux ``p = -u'``."""
        return cls(u.derivative() * sign, u)

    def traces(self) -> BoundaryTrace4:
        p0, p1 = self.p.traces()
        u0, u1 = self.u.traces()
        return BoundaryTrace4(p0, p1, u0, u1)

    def t1(self) -> EllipticPair:
        """``T1 (p, u) = (u' + p, p' + u)``."""
        return EllipticPair(self.u.derivative() + self.p, self.p.derivative() + self.u)

    def t1_tilde(self) -> EllipticPair:
        """``T~1 (q, v) = (q - v', v - q')``."""
        return EllipticPair(self.p - self.u.derivative(), self.u - self.p.derivative())

    def __call__(self, x) -> np.ndarray:
        return np.vstack([self.p(x), self.u(x)])


def elliptic_model() -> BoundaryModel:
    """Model with ``J = [[0, E], [E, 0]]``, ``E = diag(-1, 1)``.

    ``ker T1`` holds ``(-w', w)`` and ``ker T~1`` holds ``(w', w)`` for
    ``w`` in ``{e^x, e^-x}``.
    """
    gram = np.block([[np.zeros((2, 2)), _EMAT], [_EMAT, np.zeros((2, 2))]])
    k_minus = np.array([[-1.0, -E, 1.0, E], [1.0, 1 / E, 1.0, 1 / E]]).T
    k_plus = np.array([[1.0, E, 1.0, E], [-1.0, -1 / E, 1.0, 1 / E]]).T
    return BoundaryModel(gram, k_plus, k_minus, name="elliptic-1d")


def boundary_form(b, c) -> float:
    """``p1 v1 + q1 u1 - p0 v0 - q0 u0`` for traces ``b = (p, u)``, ``c = (q, v)``."""
    p0, p1, u0, u1 = b
    q0, q1, v0, v1 = c
    return p1 * v1 + q1 * u1 - p0 * v0 - q0 * u0


def dirichlet_subspace(model: BoundaryModel | None = None) -> BCSubspace:
    """Traces with ``u0 = u1 = 0``."""
    model = model or elliptic_model()
    return model.subspace(np.eye(4)[:, :2])


@dataclass(frozen=True)
class DirichletReport:
    self_dual: bool
    maximal_nonneg: bool
    unitary: bool
    isometry_defect: float

    @property
    def ok(self) -> bool:
        return self.self_dual and self.maximal_nonneg and self.unitary


def dirichlet_report(model: BoundaryModel | None = None) -> DirichletReport:
    v = dirichlet_subspace(model)
    u = boundary.contraction_from_v(v)
    m = v.model
    defect = float(np.max(np.abs(u.mat.T @ (-m.g_minus) @ u.mat - m.g_plus)))
    return DirichletReport(v.perp().equals(v), boundary.check_X(v), u.is_unitary(1e-10), defect)


def solve_homog_dirichlet(g0: float, g1: float) -> ClosedForm:
    """Solution of ``-w'' + w = 0`` with ``w(0) = g0``, ``w(1) = g1``."""
    a = (g1 - g0 / E) / (2 * SINH1)
    b = (g0 * E - g1) / (2 * SINH1)
    return ClosedForm(((a, 1.0), (b, -1.0)))


def dtn(g0: float, g1: float) -> tuple[float, float]:
    """Outward normal derivatives ``(-w'(0), w'(1))`` of the Dirichlet solution."""
    return (g0 * COSH1 - g1) / SINH1, (g1 * COSH1 - g0) / SINH1


def dtn_matrix() -> np.ndarray:
    c, s = COSH1 / SINH1, 1.0 / SINH1
    return np.array([[c, -s], [-s, c]])


def _skew_part() -> np.ndarray:
    # <M u, v> = (p1 v1 - p0 v0) - (q1 u1 - q0 u0) + ...; rows (q0, q1, v0, v1)
    a = np.zeros((4, 4))
    a[0, 2], a[1, 3] = 1.0, -1.0
    a[2, 0], a[3, 1] = -1.0, 1.0
    return a


def m_dirichlet(kind: str = "dtn", model: BoundaryModel | None = None) -> MOperatorMat:
    """(M)-operator for homogeneous Dirichlet conditions.

    ``kind="dtn"`` assembles the pairing with the Dirichlet-to-Neumann term
    ``2 <Lambda (u0, u1), (v0, v1)>``; ``kind="kernel_projector"`` builds
    ``D (1 - 2 p2)`` for the split ``V (+) ker T1``.
    """
    model = model or elliptic_model()
    if kind == "dtn":
        a = _skew_part()
        a[2:, 2:] = 2 * dtn_matrix()
        return MOperatorMat(model, a)
    if kind == "kernel_projector":
        return boundary.m_from_v(dirichlet_subspace(model))
    raise ValueError(f"unknown kind {kind!r}")


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not alpha >= 0 or math.isinf(alpha):
        raise InvalidParameter(f"alpha must be a finite non-negative number, got {alpha}")
    return alpha


def m_alpha(alpha: float, model: BoundaryModel | None = None) -> MOperatorMat:
    """``<M u, v> = (p1 v1 - p0 v0) - (q1 u1 - q0 u0) + 2 alpha (u0 v0 + u1 v1)``."""
    alpha = _check_alpha(alpha)
    a = _skew_part()
    a[2, 2] = a[3, 3] = 2 * alpha
    return MOperatorMat(model or elliptic_model(), a)


def solve_neumann(u0t: float, u1t: float) -> ClosedForm:
    """Solution of ``-v'' + v = 0`` with ``-v'(0) = u0t`` and ``v'(1) = u1t``."""
    a = (u1t + u0t / E) / (2 * SINH1)
    b = (u1t + u0t * E) / (2 * SINH1)
    return ClosedForm(((a, 1.0), (b, -1.0)))


def w2_alpha(alpha: float, model: BoundaryModel | None = None) -> BCSubspace:
    """Traces ``(alpha u0, -alpha u1, u0, u1)``."""
    alpha = _check_alpha(alpha)
    model = model or elliptic_model()
    return model.subspace(np.array([[alpha, 0.0, 1.0, 0.0], [0.0, -alpha, 0.0, 1.0]]).T)


@dataclass(frozen=True)
class W2Report:
    alpha: float
    nonpositive: bool
    form_exact: bool
    direct_sum: bool
    m_matches: bool
    m_defect: float

    @property
    def ok(self) -> bool:
        return self.nonpositive and self.form_exact and self.direct_sum and self.m_matches


def w2_alpha_report(alpha: float, samples: int = 20, seed: int = 0,
                    tol: float = 1e-12) -> W2Report:
    alpha = _check_alpha(alpha)
    model = elliptic_model()
    w2 = w2_alpha(alpha, model)
    rng = np.random.default_rng(seed)
    exact = True
    for u0, u1 in rng.standard_normal((samples, 2)):
        b = (alpha * u0, -alpha * u1, u0, u1)
        target = -2 * alpha * (u0 ** 2 + u1 ** 2)
        exact &= abs(boundary_form(b, b) - target) <= 4 * np.finfo(float).eps * abs(target)
    nonpos = krein.cone_check(model.form, w2.space, "nonpos")
    direct = (dirichlet_subspace(model).space + w2.space).dim == 4
    defect = float(np.max(np.abs(
        boundary.m_from_v(dirichlet_subspace(model), w2).mat - m_alpha(alpha, model).mat)))
    return W2Report(alpha, nonpos, bool(exact), direct, defect <= tol, defect)


def _dirichlet_lift(u: ClosedForm) -> ClosedForm:
    u0, u1 = u.traces()
    return u - ClosedForm.polynomial(u0, u1 - u0)


def random_dirichlet_samples(count: int, seed: int = 0) -> list[EllipticPair]:
    """Random pairs with ``u(0) = u(1) = 0`` and unconstrained flux."""
    rng = np.random.default_rng(seed)

    def rand_cf() -> ClosedForm:
        k = int(rng.integers(1, 4))
        terms = tuple((float(a), float(r)) for a, r in
                      zip(rng.standard_normal(k), rng.uniform(-3, 3, k)))
        poly = tuple(float(c) for c in rng.standard_normal(int(rng.integers(1, 4))))
        return ClosedForm(terms, poly)

    return [EllipticPair(rand_cf(), _dirichlet_lift(rand_cf())) for _ in range(count)]


def family_rows(alphas: Iterable[float]) -> list[dict]:
    model = elliptic_model()
    dirichlet = dirichlet_subspace(model)
    rows = []
    for alpha in alphas:
        mop = m_alpha(alpha, model)
        chk = boundary.check_M(mop)
        v, _, _ = boundary.v_from_m(mop) if chk.ok else (None, None, None)
        rows.append({
            "alpha": float(alpha),
            "m1_ok": chk.m1,
            "m2_ok": chk.m2,
            "kerDminusM_is_dirichlet": bool(v is not None and v.equals(dirichlet)),
            "w2_trace_basis": [[alpha, 0.0, 1.0, 0.0], [0.0, -alpha, 0.0, 1.0]],
            "M": mop.mat.tolist(),
        })
    return rows


def family_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["alpha", "m1_ok", "m2_ok", "kerDminusM_is_dirichlet", "w2_trace_basis"])
    for r in rows:
        basis = ";".join(" ".join(repr(float(x)) for x in vec) for vec in r["w2_trace_basis"])
        writer.writerow([repr(r["alpha"]), int(r["m1_ok"]), int(r["m2_ok"]),
                         int(r["kerDminusM_is_dirichlet"]), basis])
    return buf.getvalue()


def family_json(rows: list[dict]) -> str:
    return json.dumps({"schema": 1, "family": rows}, indent=2, sort_keys=True)
