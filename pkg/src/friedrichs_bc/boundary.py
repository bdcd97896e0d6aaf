"""Boundary quotient of a joint pair of abstract Friedrichs operators.

The graph space modulo the minimal domain is modelled by the finite
dimensional space ``ker T~1 (+) ker T1`` carrying the boundary form.  A
:class:`BoundaryModel` fixes some coordinate system on that space (kernel
coordinates for random models, trace coordinates for the worked examples)
together with bases of the two kernel blocks ``K+ = ker T~1`` and
``K- = ker T1``.  The form is positive definite on ``K+``, negative definite
on ``K-`` and the two blocks are form-orthogonal.

Boundary conditions are represented three ways and converted among each
other here:

* a subspace ``V`` (realisation domain modulo the minimal domain),
* an operator ``M`` with matrix ``M_hat`` (pairing ``<M u, v> = v^* M_hat u``),
* a linear map ``U: K+ -> K-`` whose graph is ``V``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
import scipy.linalg

from . import krein
from .errors import (InvalidDimension, InvalidW2, NotADirectSum, NotBijectiveRealisation,
                     NotMBoundary)
from .krein import COND_MAX, EQ_TOL, TOL, IndefForm, Subspace

__all__ = [
    "BoundaryModel",
    "BCSubspace",
    "MOperatorMat",
    "ContractionU",
    "VCheck",
    "MCheck",
    "v_from_contraction",
    "contraction_from_v",
    "check_V",
    "check_X",
    "is_m_accretive",
    "m_from_v",
    "v_from_m",
    "check_M",
    "m_equal_iff_w2_equal",
    "random_model",
    "random_contraction",
    "random_unitary",
    "random_w2",
    "to_json",
    "from_json",
]

SCHEMA = 1


@dataclass(frozen=True, eq=False)
class BoundaryModel:
    """Boundary space with its form and the two kernel blocks.

    Parameters
    ----------
    gram : (n, n) array
        Gram matrix ``J`` of the boundary form in the chosen coordinates.
    k_plus, k_minus : (n, k+) and (n, k-) arrays
        Bases of ``ker T~1`` and ``ker T1`` in the same coordinates.
    name : str, optional
        Label used in reports and serialisation.
    """

    gram: np.ndarray
    k_plus: np.ndarray
    k_minus: np.ndarray
    name: str = "model"
    tol: float = TOL

    def __post_init__(self):
        form = IndefForm(self.gram, tol=self.tol)
        kp = np.atleast_2d(np.asarray(self.k_plus))
        km = np.atleast_2d(np.asarray(self.k_minus))
        n = form.dim
        if kp.shape[0] != n or km.shape[0] != n:
            raise InvalidDimension("kernel bases must have one row per boundary coordinate")
        if kp.shape[1] < 1 or km.shape[1] < 1 or kp.shape[1] + km.shape[1] != n:
            raise InvalidDimension(
                f"kernel blocks of sizes {kp.shape[1]} + {km.shape[1]} do not fill dimension {n}")
        basis = np.hstack([kp, km])
        if np.linalg.cond(basis) > COND_MAX:
            raise InvalidDimension("kernel blocks are not complementary")
        j = form.gram
        cross = kp.conj().T @ j @ km
        scale = max(1.0, np.max(np.abs(j)) * np.linalg.norm(kp) * np.linalg.norm(km))
        if np.max(np.abs(cross)) > 1e-10 * scale:
            raise ValueError("kernel blocks are not orthogonal for the boundary form")
        gp = kp.conj().T @ j @ kp
        gm = km.conj().T @ j @ km
        if np.linalg.eigvalsh((gp + gp.conj().T) / 2)[0] <= self.tol:
            raise ValueError("form is not positive definite on K+")
        if np.linalg.eigvalsh((gm + gm.conj().T) / 2)[-1] >= -self.tol:
            raise ValueError("form is not negative definite on K-")
        object.__setattr__(self, "gram", form.gram)
        for attr, val in (("k_plus", kp), ("k_minus", km)):
            val = np.array(val, copy=True)
            val.setflags(write=False)
            object.__setattr__(self, attr, val)

    @classmethod
    def from_grams(cls, g_plus, g_minus, name: str = "kernel-coordinates") -> BoundaryModel:
        """Model in kernel coordinates: ``J = blockdiag(g_plus, g_minus)``."""
        gp = np.atleast_2d(np.asarray(g_plus))
        gm = np.atleast_2d(np.asarray(g_minus))
        kp_dim, km_dim = gp.shape[0], gm.shape[0]
        n = kp_dim + km_dim
        eye = np.eye(n)
        return cls(scipy.linalg.block_diag(gp, gm), eye[:, :kp_dim], eye[:, kp_dim:], name=name)

    @cached_property
    def form(self) -> IndefForm:
        return IndefForm(self.gram, tol=self.tol)

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @property
    def k_plus_dim(self) -> int:
        return self.k_plus.shape[1]

    @property
    def k_minus_dim(self) -> int:
        return self.k_minus.shape[1]

    @cached_property
    def g_plus(self) -> np.ndarray:
        g = self.k_plus.conj().T @ self.gram @ self.k_plus
        return (g + g.conj().T) / 2

    @cached_property
    def g_minus(self) -> np.ndarray:
        g = self.k_minus.conj().T @ self.gram @ self.k_minus
        return (g + g.conj().T) / 2

    @cached_property
    def _chol_plus(self) -> np.ndarray:
        return np.linalg.cholesky(self.g_plus)

    @cached_property
    def _chol_minus(self) -> np.ndarray:
        return np.linalg.cholesky(-self.g_minus)

    @cached_property
    def _kernel_basis_inv(self) -> np.ndarray:
        return np.linalg.inv(np.hstack([self.k_plus, self.k_minus]))

    def kernel_coordinates(self, vectors) -> tuple[np.ndarray, np.ndarray]:
        """Split boundary vectors into ``K+`` and ``K-`` coefficients."""
        c = self._kernel_basis_inv @ np.asarray(vectors)
        return c[: self.k_plus_dim], c[self.k_plus_dim:]

    def subspace(self, vectors) -> BCSubspace:
        return BCSubspace(self, Subspace.span(vectors, self.dim))

    @property
    def K_plus(self) -> BCSubspace:
        return self.subspace(self.k_plus)

    @property
    def K_minus(self) -> BCSubspace:
        return self.subspace(self.k_minus)

    def __repr__(self):
        return f"BoundaryModel({self.name!r}, k_plus_dim={self.k_plus_dim}, k_minus_dim={self.k_minus_dim})"


@dataclass(frozen=True, eq=False)
class BCSubspace:
    """A realisation domain, modulo the minimal space, inside a model."""

    model: BoundaryModel
    space: Subspace

    def __post_init__(self):
        if self.space.ambient_dim != self.model.dim:
            raise InvalidDimension("subspace does not live in the model's boundary space")

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def basis(self) -> np.ndarray:
        return self.space.basis

    def perp(self) -> BCSubspace:
        return BCSubspace(self.model, krein.ortho_complement(self.model.form, self.space))

    def equals(self, other: BCSubspace, tol: float = EQ_TOL) -> bool:
        return self.space.equals(other.space, tol)

    def __eq__(self, other):
        if not isinstance(other, BCSubspace):
            return NotImplemented
        return self.equals(other)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class MOperatorMat:
    """Boundary matrix of an operator ``M`` from the graph space to its dual."""

    model: BoundaryModel
    mat: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mat)
        if m.shape != (self.model.dim, self.model.dim):
            raise InvalidDimension(f"M matrix must be {self.model.dim}x{self.model.dim}")
        m = np.array(m, copy=True)
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    def pairing(self, u, v) -> complex:
        """``<M u, v>``."""
        return complex(np.vdot(v, self.mat @ u))


@dataclass(frozen=True, eq=False)
class ContractionU:
    """Linear map ``U: K+ -> K-`` in kernel coefficients (``k- x k+``)."""

    model: BoundaryModel
    mat: np.ndarray

    def __post_init__(self):
        u = np.atleast_2d(np.asarray(self.mat))
        if u.shape != (self.model.k_minus_dim, self.model.k_plus_dim):
            raise InvalidDimension(
                f"U must be {self.model.k_minus_dim}x{self.model.k_plus_dim}, got {u.shape}")
        u = np.array(u, copy=True)
        u.setflags(write=False)
        object.__setattr__(self, "mat", u)

    @cached_property
    def norm(self) -> float:
        """Operator norm from ``(K+, [.,.])`` to ``(K-, -[.,.])``."""
        lp, lm = self.model._chol_plus, self.model._chol_minus
        # ||U||  =  || Lm^* U Lp^{-*} ||_2  with g+ = Lp Lp^*, -g- = Lm Lm^*
        core = lm.conj().T @ self.mat @ np.linalg.inv(lp.conj().T)
        return float(np.linalg.norm(core, 2))

    def is_contraction(self, tol: float = TOL) -> bool:
        return self.norm <= 1 + tol

    def is_unitary(self, tol: float = 1e-9) -> bool:
        """``U^* (-g-) U = g+`` with ``U`` bijective."""
        m = self.model
        if m.k_plus_dim != m.k_minus_dim:
            return False
        lhs = self.mat.conj().T @ (-m.g_minus) @ self.mat
        scale = max(1.0, np.max(np.abs(m.g_plus)))
        return bool(np.max(np.abs(lhs - m.g_plus)) <= tol * scale)


class VCheck(NamedTuple):
    v1_on_V: bool
    v1_on_Vperp: bool
    v2: bool

    @property
    def ok(self) -> bool:
        return self.v1_on_V and self.v1_on_Vperp and self.v2


class MCheck(NamedTuple):
    m1: bool
    m2: bool
    kernel_range_ok: bool

    @property
    def ok(self) -> bool:
        return self.m1 and self.m2 and self.kernel_range_ok


def v_from_contraction(u: ContractionU) -> BCSubspace:
    """Graph ``{nu~ + U nu~ : nu~ in K+}`` of a classifying map."""
    m = u.model
    return m.subspace(m.k_plus + m.k_minus @ u.mat)


def contraction_from_v(v: BCSubspace, cond_max: float = COND_MAX) -> ContractionU:
    """Classifying map of a bijective realisation.

    Raises :class:`NotBijectiveRealisation` unless ``V (+) K- `` is the whole
    boundary space.
    """
    m = v.model
    if v.dim != m.k_plus_dim:
        raise NotBijectiveRealisation(f"dim V = {v.dim}, but dim K+ = {m.k_plus_dim}")
    try:
        krein.projector_pair(v.space, m.K_minus.space, cond_max)
    except NotADirectSum as exc:
        raise NotBijectiveRealisation("V is not transversal to ker T1") from exc
    x, y = m.kernel_coordinates(v.basis)
    return ContractionU(m, np.linalg.solve(x.T, y.T).T)


def check_V(v: BCSubspace, tol: float = TOL) -> VCheck:
    """(V)-boundary conditions: opposite signs on ``V`` and ``V^[perp]``."""
    form = v.model.form
    perp = krein.ortho_complement(form, v.space, tol)
    return VCheck(
        krein.cone_check(form, v.space, "nonneg", tol),
        krein.cone_check(form, perp, "nonpos", tol),
        krein.ortho_complement(form, perp, tol).equals(v.space),
    )


def check_X(v: BCSubspace, tol: float = TOL) -> bool:
    """(X)-boundary conditions: ``V`` is maximal non-negative."""
    return krein.is_maximal_semidefinite(v.model.form, v.space, "nonneg", tol)


def is_m_accretive(v: BCSubspace, tol: float = TOL) -> bool:
    """Is ``T1`` restricted to ``V`` m-accretive?

    For Friedrichs pairs this holds exactly when ``V`` is maximal
    non-negative, so the decision is the (X) test.
    """
    return check_X(v, tol)


def m_from_v(v: BCSubspace, w2: BCSubspace | None = None, tol: float = TOL) -> MOperatorMat:
    """``M = D (1 - 2 p2)`` for the decomposition ``V (+) W2``.

    ``w2`` defaults to ``ker T1``.  The result satisfies the (M)-conditions
    whenever ``V`` satisfies the (V)-conditions.
    """
    m = v.model
    if w2 is None:
        w2 = m.K_minus
    elif w2.model.dim != m.dim:
        raise InvalidDimension("W2 belongs to a different boundary space")
    if not krein.cone_check(m.form, w2.space, "nonpos", tol):
        raise InvalidW2("W2 is not non-positive for the boundary form")
    _, p2 = krein.projector_pair(v.space, w2.space)
    return MOperatorMat(m, m.gram @ (np.eye(m.dim) - 2 * p2))


def check_M(mop: MOperatorMat, tol: float = TOL) -> MCheck:
    """(M1), (M2) and invertibility of the boundary matrix."""
    m = mop.model
    a = mop.mat
    herm = (a + a.conj().T) / 2
    m1 = bool(np.linalg.eigvalsh(herm)[0] >= -tol)
    ker_minus = Subspace.span(krein.null_space(m.gram - a, tol), m.dim)
    ker_plus = Subspace.span(krein.null_space(m.gram + a, tol), m.dim)
    m2 = (ker_minus + ker_plus).dim == m.dim
    s = np.linalg.svd(a, compute_uv=False)
    invertible = bool(s[-1] > tol * max(1.0, s[0]))
    return MCheck(m1, m2, invertible)


def v_from_m(mop: MOperatorMat, tol: float = TOL) -> tuple[BCSubspace, BCSubspace, BCSubspace]:
    """Recover ``(ker(D-M), ker(D+M^*), ker(D+M))`` from an (M)-operator."""
    if not check_M(mop, tol).ok:
        raise NotMBoundary("operator does not satisfy the (M)-boundary conditions")
    m = mop.model
    a = mop.mat
    v = m.subspace(krein.null_space(m.gram - a, tol))
    vperp = m.subspace(krein.null_space(m.gram + a.conj().T, tol))
    w2 = m.subspace(krein.null_space(m.gram + a, tol))
    return v, vperp, w2


def m_equal_iff_w2_equal(mop: MOperatorMat, other: MOperatorMat,
                         tol: float = EQ_TOL) -> tuple[bool, bool]:
    """Compare two (M)-operators directly and through ``ker(D+M)``.

    Both booleans agree whenever the operators share ``ker(D-M)``.
    """
    same_m = bool(np.max(np.abs(mop.mat - other.mat)) <= tol)
    m = mop.model
    k1 = Subspace.span(krein.null_space(m.gram + mop.mat, TOL), m.dim)
    k2 = Subspace.span(krein.null_space(other.model.gram + other.mat, TOL), m.dim)
    return same_m, k1.equals(k2, tol)


def random_model(seed, k_plus_dim: int, k_minus_dim: int) -> BoundaryModel:
    """Random model in kernel coordinates.

    ``g+ = A^T A + 0.1 I`` and ``g- = -(B^T B + 0.1 I)`` with Gaussian
    ``A``, ``B``; identical seeds give identical models.
    """
    if k_plus_dim < 1 or k_minus_dim < 1:
        raise InvalidDimension("kernel dimensions must be at least 1")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((k_plus_dim, k_plus_dim))
    b = rng.standard_normal((k_minus_dim, k_minus_dim))
    gp = a.T @ a + 0.1 * np.eye(k_plus_dim)
    gm = -(b.T @ b + 0.1 * np.eye(k_minus_dim))
    return BoundaryModel.from_grams(gp, gm, name=f"random({k_plus_dim},{k_minus_dim})")


def _scale_to(model: BoundaryModel, mat: np.ndarray, norm_cap: float) -> ContractionU:
    u = ContractionU(model, mat)
    if norm_cap == 0 or u.norm == 0:
        return ContractionU(model, np.zeros_like(mat))
    return ContractionU(model, mat * (norm_cap / u.norm))


def random_contraction(seed, model: BoundaryModel, norm_cap: float) -> ContractionU:
    """Random ``U`` with form-induced norm exactly ``norm_cap``."""
    if norm_cap < 0:
        raise ValueError("norm_cap must be non-negative")
    rng = np.random.default_rng(seed)
    mat = rng.standard_normal((model.k_minus_dim, model.k_plus_dim))
    return _scale_to(model, mat, norm_cap)


def random_unitary(seed, model: BoundaryModel) -> ContractionU:
    """Random form-unitary ``U`` (requires ``dim K+ = dim K-``)."""
    if model.k_plus_dim != model.k_minus_dim:
        raise InvalidDimension("unitary maps need dim K+ = dim K-")
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((model.k_plus_dim, model.k_plus_dim)))
    q = q * np.sign(np.diag(r))
    lp, lm = model._chol_plus, model._chol_minus
    # U = Lm^{-*} Q Lp^*  gives  U^* (-g-) U = Lp Q^* Q Lp^* = g+
    return ContractionU(model, np.linalg.solve(lm.conj().T, q @ lp.conj().T))


def random_w2(seed, model: BoundaryModel, norm_cap: float = 0.9) -> BCSubspace:
    """Random non-positive complement: graph of ``Z: K- -> K+`` with ``||Z|| = norm_cap``.

    With ``norm_cap < 1`` the result is transversal to every signed ``V``.
    """
    flipped = BoundaryModel.from_grams(-model.g_minus, -model.g_plus)
    rng = np.random.default_rng(seed)
    z = _scale_to(flipped, rng.standard_normal((model.k_plus_dim, model.k_minus_dim)), norm_cap)
    return model.subspace(model.k_minus + model.k_plus @ z.mat)


# -- serialisation ---------------------------------------------------------

def _enc(a: np.ndarray):
    a = np.asarray(a)
    if np.iscomplexobj(a) and np.any(a.imag):
        return {"real": a.real.tolist(), "imag": a.imag.tolist()}
    return np.real(a).tolist()


def _dec(obj, ncols: int | None = None) -> np.ndarray:
    if isinstance(obj, dict):
        a = np.asarray(obj["real"], dtype=float) + 1j * np.asarray(obj["imag"], dtype=float)
    else:
        a = np.asarray(obj, dtype=float)
    if a.size == 0 and ncols is not None:
        a = a.reshape(0, ncols)
    return a


def _model_dict(model: BoundaryModel) -> dict:
    return {
        "name": model.name,
        "dims": {"boundary": model.dim, "k_plus": model.k_plus_dim,
                 "k_minus": model.k_minus_dim},
        "gram": _enc(model.gram),
        "k_plus": _enc(model.k_plus),
        "k_minus": _enc(model.k_minus),
    }


def to_json(obj, indent: int | None = 2) -> str:
    """Serialise a model, subspace, M-operator or contraction to JSON."""
    doc: dict = {"schema": SCHEMA, "tolerance": {"rank": TOL, "equality": EQ_TOL,
                                                 "cond_max": COND_MAX}}
    if isinstance(obj, BoundaryModel):
        doc.update(kind="BoundaryModel", model=_model_dict(obj))
    elif isinstance(obj, BCSubspace):
        doc.update(kind="BCSubspace", model=_model_dict(obj.model), dim=obj.dim,
                   basis=_enc(obj.basis))
    elif isinstance(obj, MOperatorMat):
        doc.update(kind="MOperatorMat", model=_model_dict(obj.model), mat=_enc(obj.mat))
    elif isinstance(obj, ContractionU):
        doc.update(kind="ContractionU", model=_model_dict(obj.model), mat=_enc(obj.mat),
                   norm=obj.norm)
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")
    return json.dumps(doc, indent=indent, sort_keys=True)


def from_json(text: str):
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema {doc.get('schema')!r}")
    md = doc["model"]
    model = BoundaryModel(_dec(md["gram"]), _dec(md["k_plus"]), _dec(md["k_minus"]),
                          name=md["name"])
    kind = doc["kind"]
    if kind == "BoundaryModel":
        return model
    if kind == "BCSubspace":
        return BCSubspace(model, Subspace(_dec(doc["basis"], doc["dim"]).reshape(model.dim, -1)))
    if kind == "MOperatorMat":
        return MOperatorMat(model, _dec(doc["mat"]))
    if kind == "ContractionU":
        return ContractionU(model, _dec(doc["mat"]))
    raise ValueError(f"unknown kind {kind!r}")
