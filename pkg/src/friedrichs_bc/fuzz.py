"""Randomised property suite over boundary models.

Each instance draws block dimensions, a model, a contraction (or a
form-unitary map when the blocks match) and a non-positive complement, then
checks the representation invariants of :mod:`friedrichs_bc.boundary`.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import boundary

__all__ = ["CHECKS", "InstanceResult", "FuzzSummary", "fuzz_instance", "run_fuzz"]

CHECKS = (
    "round_trip",          # U -> V_U -> U entrywise
    "signed_equivalence",  # (V) <=> (X) <=> ||U|| <= 1 <=> m-accretive
    "m_conditions",        # (M1), (M2), invertibility of m_from_v output
    "m_kernels",           # ker(J - M) = V, ker(J + M) = W2 class
    "unitary_selfdual",    # U unitary <=> V = V^[perp]
)


@dataclass(frozen=True)
class InstanceResult:
    index: int
    k_plus_dim: int
    k_minus_dim: int
    norm: float
    unitary: bool
    round_trip_err: float
    failures: tuple[str, ...]


@dataclass
class FuzzSummary:
    count: int
    max_dim: int
    seed: int
    failures: dict = field(default_factory=dict)
    max_round_trip_err: float = 0.0
    signed: int = 0
    unitary: int = 0
    examples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(self.failures.values())


def fuzz_instance(index: int, seed_seq: np.random.SeedSequence, max_dim: int = 8,
                  rt_tol: float = 1e-10, tol: float = 1e-9) -> InstanceResult:
    rng = np.random.default_rng(seed_seq)
    kp, km = (int(d) for d in rng.integers(1, max_dim + 1, size=2))
    if rng.random() < 0.2:
        km = kp  # square blocks, so that unitary maps exist
    s_model, s_u, s_w = (int(x) for x in rng.integers(0, 2 ** 63 - 1, size=3))
    model = boundary.random_model(s_model, kp, km)
    draw = rng.random()
    if kp == km and draw < 0.5:
        u = boundary.random_unitary(s_u, model)
    else:
        cap = 1.0 if draw < 0.6 else float(rng.uniform(0.0, 2.0))
        u = boundary.random_contraction(s_u, model, cap)
    failures = []

    v = boundary.v_from_contraction(u)
    back = boundary.contraction_from_v(v)
    rt_err = float(np.max(np.abs(back.mat - u.mat)))
    if rt_err > rt_tol:
        failures.append("round_trip")

    signed = u.norm <= 1 + boundary.TOL
    verdicts = (boundary.check_V(v).ok, boundary.check_X(v), boundary.is_m_accretive(v))
    if any(x != signed for x in verdicts):
        failures.append("signed_equivalence")

    if signed:
        w2 = model.K_minus if rng.random() < 0.3 else boundary.random_w2(s_w, model, 0.9)
        mop = boundary.m_from_v(v, w2)
        if not boundary.check_M(mop, tol).ok:
            failures.append("m_conditions")
        else:
            v_rec, vperp, w2_rec = boundary.v_from_m(mop, tol)
            if not (v_rec.equals(v, tol) and w2_rec.equals(w2, tol)
                    and vperp.equals(v.perp(), tol)):
                failures.append("m_kernels")

    unitary = u.is_unitary()
    if unitary != v.perp().equals(v, tol):
        failures.append("unitary_selfdual")
    return InstanceResult(index, kp, km, u.norm, unitary, rt_err, tuple(failures))


def run_fuzz(seed: int = 0, count: int = 1000, max_dim: int = 8, jobs: int = 1) -> FuzzSummary:
    """Run ``count`` instances; results are aggregated in index order."""
    if count < 1:
        raise ValueError("count must be at least 1")
    if max_dim < 1:
        raise ValueError("max_dim must be at least 1")
    children = np.random.SeedSequence(seed).spawn(count)
    args = list(enumerate(children))
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            results = list(pool.map(lambda a: fuzz_instance(a[0], a[1], max_dim), args))
    else:
        results = [fuzz_instance(i, s, max_dim) for i, s in args]
    summary = FuzzSummary(count, max_dim, seed, {c: 0 for c in CHECKS})
    for r in results:
        for name in r.failures:
            summary.failures[name] += 1
        summary.max_round_trip_err = max(summary.max_round_trip_err, r.round_trip_err)
        summary.signed += r.norm <= 1 + boundary.TOL
        summary.unitary += r.unitary
        if r.failures and len(summary.examples) < 10:
            summary.examples.append({"index": r.index, "dims": [r.k_plus_dim, r.k_minus_dim],
                                     "norm": r.norm, "failures": list(r.failures)})
    return summary
