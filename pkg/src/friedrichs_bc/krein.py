"""Finite-dimensional indefinite inner product spaces.

A nondegenerate Hermitian Gram matrix ``J`` turns ``C^n`` into a small Krein
space with ``[x, y] = y^* J x``.  Everything in :mod:`friedrichs_bc.boundary`
reduces to the handful of operations here: orthogonal complements for the
form, sign tests on subspaces, maximality and oblique projector pairs.

Subspaces are stored through a Euclidean-orthonormal basis obtained from a
column-pivoted QR factorisation, so two :class:`Subspace` objects compare
equal when their orthogonal projectors agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np
import scipy.linalg

from .errors import DegenerateForm, InvalidDimension, NotADirectSum

__all__ = [
    "TOL",
    "COND_MAX",
    "EQ_TOL",
    "IndefForm",
    "Subspace",
    "Signature",
    "null_space",
    "form_eval",
    "ortho_complement",
    "cone_check",
    "is_maximal_semidefinite",
    "extension_oracle",
    "signature",
    "projector_pair",
]

TOL = 1e-10
EQ_TOL = 1e-10
COND_MAX = 1e8

Sign = Literal["nonneg", "nonpos"]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a)
    if not np.iscomplexobj(a):
        a = a.astype(float)
    return a


def null_space(a, tol: float = TOL) -> np.ndarray:
    """Orthonormal basis of ``ker a`` from the SVD.

    Singular values at or below ``tol * max(1, s_max)`` count as zero.
    """
    a = np.atleast_2d(_as_matrix(a))
    m, n = a.shape
    if n == 0:
        return np.zeros((0, 0), dtype=a.dtype)
    if m == 0:
        return np.eye(n, dtype=a.dtype)
    _, s, vh = np.linalg.svd(a)
    scale = max(1.0, s[0]) if s.size else 1.0
    rank = int(np.sum(s > tol * scale))
    return vh[rank:].conj().T


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of ``C^n`` held as an orthonormal basis (columns)."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis)
        if b.ndim != 2:
            raise InvalidDimension("basis must be a 2-d array")
        object.__setattr__(self, "basis", _frozen(b))

    @classmethod
    def span(cls, vectors, ambient_dim: int | None = None, tol: float = TOL) -> Subspace:
        """Canonical subspace spanned by the columns of ``vectors``."""
        a = _as_matrix(vectors)
        if a.ndim == 1:
            a = a.reshape(-1, 1)
        if ambient_dim is not None and a.shape[0] != ambient_dim:
            if a.size == 0:
                a = np.zeros((ambient_dim, 0))
            else:
                raise InvalidDimension(
                    f"vectors have length {a.shape[0]}, expected {ambient_dim}")
        n, k = a.shape
        if k == 0:
            return cls(np.zeros((n, 0), dtype=a.dtype))
        q, r, _ = scipy.linalg.qr(a, mode="economic", pivoting=True)
        d = np.abs(np.diag(r))
        scale = max(1.0, d[0]) if d.size else 1.0
        rank = int(np.sum(d > tol * scale))
        return cls(q[:, :rank])

    @classmethod
    def zero(cls, ambient_dim: int) -> Subspace:
        return cls(np.zeros((ambient_dim, 0)))

    @classmethod
    def full(cls, ambient_dim: int) -> Subspace:
        return cls(np.eye(ambient_dim))

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        """Euclidean orthogonal projector onto the subspace."""
        return self.basis @ self.basis.conj().T

    def contains(self, v, tol: float = 1e-9) -> bool:
        v = np.asarray(v)
        resid = v - self.projector() @ v
        return bool(np.linalg.norm(resid) <= tol * max(1.0, np.linalg.norm(v)))

    def __add__(self, other: Subspace) -> Subspace:
        if other.ambient_dim != self.ambient_dim:
            raise InvalidDimension("ambient dimensions differ")
        return Subspace.span(np.hstack([self.basis, other.basis]), self.ambient_dim)

    def equals(self, other: Subspace, tol: float = EQ_TOL) -> bool:
        if self.ambient_dim != other.ambient_dim or self.dim != other.dim:
            return False
        return bool(np.max(np.abs(self.projector() - other.projector()), initial=0.0) <= tol)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


class Signature(NamedTuple):
    n_plus: int
    n_zero: int
    n_minus: int


@dataclass(frozen=True, eq=False)
class IndefForm:
    """Nondegenerate Hermitian form ``[x, y] = y^* J x``."""

    gram: np.ndarray
    tol: float = TOL

    def __post_init__(self):
        j = np.atleast_2d(_as_matrix(self.gram))
        if j.ndim != 2 or j.shape[0] != j.shape[1] or j.shape[0] == 0:
            raise InvalidDimension(f"gram must be a non-empty square matrix, got {j.shape}")
        if np.max(np.abs(j - j.conj().T)) > 1e-12 * max(1.0, np.max(np.abs(j))):
            raise ValueError("gram matrix is not Hermitian")
        j = (j + j.conj().T) / 2
        smin = np.linalg.svd(j, compute_uv=False)[-1]
        if smin <= self.tol:
            raise DegenerateForm(f"gram matrix is singular (smallest singular value {smin:.3e})")
        object.__setattr__(self, "gram", _frozen(j))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def __call__(self, x, y) -> complex:
        return form_eval(self, x, y)


def _check_dim(form: IndefForm, *subspaces: Subspace) -> None:
    for x in subspaces:
        if x.ambient_dim != form.dim:
            raise InvalidDimension(
                f"subspace lives in dimension {x.ambient_dim}, form has dimension {form.dim}")


def form_eval(form: IndefForm, x, y) -> complex:
    """``[x, y] = y^* J x`` (linear in ``x``, conjugate-linear in ``y``)."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != (form.dim,) or y.shape != (form.dim,):
        raise InvalidDimension(
            f"vectors must have shape ({form.dim},), got {x.shape} and {y.shape}")
    return complex(np.vdot(y, form.gram @ x))


def compressed_gram(form: IndefForm, x: Subspace) -> np.ndarray:
    _check_dim(form, x)
    b = x.basis
    h = b.conj().T @ form.gram @ b
    return (h + h.conj().T) / 2


def ortho_complement(form: IndefForm, x: Subspace, tol: float = TOL) -> Subspace:
    """``X^[perp] = {v : [u, v] = 0 for all u in X}``."""
    _check_dim(form, x)
    if x.dim == 0:
        return Subspace.full(form.dim)
    # [u, v] = v^* J u vanishes for all u in X  <=>  B^* J v = 0
    return Subspace.span(null_space(x.basis.conj().T @ form.gram, tol), form.dim)


def cone_check(form: IndefForm, x: Subspace, sign: Sign, tol: float = TOL) -> bool:
    """Is ``X`` contained in ``W+`` (``nonneg``) or ``W-`` (``nonpos``)?"""
    if sign not in ("nonneg", "nonpos"):
        raise ValueError(f"sign must be 'nonneg' or 'nonpos', got {sign!r}")
    if x.dim == 0:
        _check_dim(form, x)
        return True
    ev = np.linalg.eigvalsh(compressed_gram(form, x))
    if sign == "nonneg":
        return bool(ev[0] >= -tol)
    return bool(ev[-1] <= tol)


def signature(form: IndefForm, tol: float = TOL) -> Signature:
    """Inertia of the Gram matrix; a zero eigenvalue raises :class:`DegenerateForm`."""
    ev = np.linalg.eigvalsh(form.gram)
    n_plus = int(np.sum(ev > tol))
    n_minus = int(np.sum(ev < -tol))
    n_zero = form.dim - n_plus - n_minus
    if n_zero:
        raise DegenerateForm(f"form has {n_zero} zero eigenvalue(s)")
    return Signature(n_plus, n_zero, n_minus)


def is_maximal_semidefinite(form: IndefForm, x: Subspace, sign: Sign, tol: float = TOL,
                            crosscheck: bool = False, samples: int = 100,
                            seed: int = 0) -> bool:
    """Decide whether ``X`` is maximal non-negative (or non-positive).

    A semidefinite subspace is maximal exactly when its dimension equals the
    number of positive (resp. negative) eigenvalues of ``J``.  With
    ``crosscheck=True`` the answer is compared against
    :func:`extension_oracle` and a disagreement raises ``RuntimeError``.
    """
    if not cone_check(form, x, sign, tol):
        result = False
    else:
        sig = signature(form, tol)
        target = sig.n_plus if sign == "nonneg" else sig.n_minus
        result = x.dim == target
    if crosscheck:
        oracle = extension_oracle(form, x, sign, samples=samples, seed=seed, tol=tol)
        if oracle != result:
            raise RuntimeError(
                f"maximality criterion ({result}) disagrees with extension oracle ({oracle})")
    return result


def extension_oracle(form: IndefForm, x: Subspace, sign: Sign, samples: int = 100,
                     seed: int = 0, tol: float = TOL) -> bool:
    """Brute-force maximality test that never looks at the inertia of ``J``.

    ``X`` is reported maximal when it is semidefinite and no candidate
    ``w`` outside ``X`` gives a semidefinite ``span(X, w)``.  Candidates are
    ``samples`` random vectors in the whole space, the same number drawn from
    ``X^[perp]``, and the extreme eigenvector of the form compressed to
    ``X^[perp]`` (if ``X`` can be extended at all, that vector extends it).
    """
    if not cone_check(form, x, sign, tol):
        return False
    n = form.dim
    rng = np.random.default_rng(seed)
    perp = ortho_complement(form, x, tol)
    cands = [rng.standard_normal((n, samples))]
    if perp.dim:
        cands.append(perp.basis @ rng.standard_normal((perp.dim, samples)))
        ev, vec = np.linalg.eigh(compressed_gram(form, perp))
        k = -1 if sign == "nonneg" else 0
        cands.append((perp.basis @ vec[:, k]).reshape(-1, 1))
    proj = x.projector()
    for w in np.hstack(cands).T:
        resid = w - proj @ w
        if np.linalg.norm(resid) <= 1e-8 * max(1.0, np.linalg.norm(w)):
            continue
        ext = Subspace.span(np.column_stack([x.basis, resid]), n)
        if cone_check(form, ext, sign, tol):
            return False
    return True


def projector_pair(x: Subspace, y: Subspace,
                   cond_max: float = COND_MAX) -> tuple[np.ndarray, np.ndarray]:
    """Oblique projectors for ``C^n = X (+) Y``.

    Returns ``(P1, P2)`` with ``ran P1 = X``, ``ker P1 = Y`` and
    ``P1 + P2 = I``.
    """
    if x.ambient_dim != y.ambient_dim:
        raise InvalidDimension("ambient dimensions differ")
    n = x.ambient_dim
    if x.dim + y.dim != n:
        raise NotADirectSum(f"dim X + dim Y = {x.dim + y.dim} != {n}")
    a = np.hstack([x.basis, y.basis])
    if n and np.linalg.cond(a) > cond_max:
        raise NotADirectSum("X and Y are not complementary (condition number above guard)")
    ainv = np.linalg.inv(a) if n else a
    k = x.dim
    p1 = a[:, :k] @ ainv[:k, :]
    p2 = a[:, k:] @ ainv[k:, :]
    return p1, p2
