"""Scalar functions on [0, 1]: closed-form exponential combinations and grid samples."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = ["ClosedForm", "GridFunction", "trapezoid_weights", "simpson_weights"]


@dataclass(frozen=True)
class ClosedForm:
    """``u(x) = sum_k a_k exp(r_k x) + poly(x)``.

    ``exp_terms`` holds ``(a_k, r_k)`` pairs; ``poly`` holds polynomial
    coefficients in increasing degree.  Covers the kernels ``e^{+-x}``,
    ``sinh``/``cosh`` solutions of ``-w'' + w = 0`` and the transport
    solutions with a constant source.
    """

    exp_terms: tuple[tuple[float, float], ...] = ()
    poly: tuple[float, ...] = ()

    @classmethod
    def exp(cls, coef: float = 1.0, rate: float = 1.0) -> ClosedForm:
        return cls(((float(coef), float(rate)),))

    @classmethod
    def polynomial(cls, *coefs: float) -> ClosedForm:
        return cls((), tuple(float(c) for c in coefs))

    @classmethod
    def constant(cls, c: float) -> ClosedForm:
        return cls.polynomial(c)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for a, r in self.exp_terms:
            out = out + a * np.exp(r * x)
        if self.poly:
            out = out + np.polynomial.polynomial.polyval(x, self.poly)
        return out

    def derivative(self) -> ClosedForm:
        terms = tuple((a * r, r) for a, r in self.exp_terms if a * r != 0)
        poly = tuple(k * c for k, c in enumerate(self.poly))[1:]
        return ClosedForm(terms, poly)

    def traces(self) -> tuple[float, float]:
        """``(u(0), u(1))``."""
        return float(self(0.0)), float(self(1.0))

    def __add__(self, other: ClosedForm) -> ClosedForm:
        n = max(len(self.poly), len(other.poly))
        p = [0.0] * n
        for i, c in enumerate(self.poly):
            p[i] += c
        for i, c in enumerate(other.poly):
            p[i] += c
        return ClosedForm(self.exp_terms + other.exp_terms, tuple(p))

    def __neg__(self) -> ClosedForm:
        return self * -1.0

    def __sub__(self, other: ClosedForm) -> ClosedForm:
        return self + (-other)

    def __mul__(self, s: float) -> ClosedForm:
        s = float(s)
        return ClosedForm(tuple((a * s, r) for a, r in self.exp_terms),
                          tuple(c * s for c in self.poly))

    __rmul__ = __mul__

    def sample(self, n: int) -> GridFunction:
        return GridFunction.from_callable(self, n)


def trapezoid_weights(n: int) -> np.ndarray:
    w = np.full(n + 1, 1.0 / n)
    w[[0, -1]] *= 0.5
    return w


def simpson_weights(n: int) -> np.ndarray:
    """Composite Simpson weights on ``n`` (even) uniform intervals of [0, 1]."""
    if n < 2 or n % 2:
        raise ValueError(f"Simpson's rule needs an even number of intervals, got {n}")
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / (3.0 * n)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples ``values[i] = u(i / n)``, ``i = 0..n`` on [0, 1]."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        if v.ndim != 1 or v.size < 3:
            raise ValueError("a grid function needs at least 3 samples (n >= 2)")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function has non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, f: Callable, n: int) -> GridFunction:
        x = np.linspace(0.0, 1.0, n + 1)
        return cls(np.broadcast_to(np.asarray(f(x), dtype=float), x.shape))

    @classmethod
    def constant(cls, c: float, n: int) -> GridFunction:
        return cls(np.full(n + 1, float(c)))

    @property
    def n(self) -> int:
        return self.values.size - 1

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n + 1)

    def norm(self, rule: str = "trapezoid") -> float:
        """Discrete L2 norm (trapezoid weights by default, or ``"simpson"``)."""
        w = simpson_weights(self.n) if rule == "simpson" else trapezoid_weights(self.n)
        return float(np.sqrt(np.sum(w * self.values ** 2)))

    def max_abs_diff(self, other) -> float:
        other = other.values if isinstance(other, GridFunction) else np.asarray(other)
        return float(np.max(np.abs(self.values - other)))

    def __len__(self):
        return self.values.size
