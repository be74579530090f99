"""Shannon and collision entropies of measurement statistics, uncertainty
bounds, and the unbiased-vector probe."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .classes import ClassError, CommutingClass, union_mask
from .states import Basis, build_basis

SATURATION_TOL = 1e-9
NORM_TOL = 1e-10


def measure(basis: Basis, state: np.ndarray) -> np.ndarray:
    """Outcome probabilities |<b_j|psi>|^2 of measuring ``basis`` on ``state``."""
    state = np.asarray(state, dtype=complex)
    norm = np.linalg.norm(state)
    if abs(norm - 1) > NORM_TOL:
        raise ValueError(f"state is not normalized (norm {norm!r})")
    probs = np.abs(basis.states.conj() @ state) ** 2
    return np.clip(probs, 0.0, 1.0)


def h1(probs: np.ndarray) -> float:
    """Shannon entropy in bits, with 0 log 0 = 0."""
    q = np.clip(np.asarray(probs, dtype=float), 0.0, 1.0)
    q = q[q > 0]
    return float(-np.sum(q * np.log2(q)))


def h2(probs: np.ndarray) -> float:
    """Collision entropy in bits."""
    q = np.clip(np.asarray(probs, dtype=float), 0.0, 1.0)
    return float(-np.log2(np.sum(q * q)))


def eur_bounds(L: int, p: int) -> tuple[float, float]:
    """Lower bounds on the average H1 and H2 over L mutually unbiased bases in d = p^2."""
    if L < 2:
        raise ValueError("bounds need at least two bases")
    d = p * p
    return float(0.5 * np.log2(d)), float(-np.log2((L + d - 1) / (L * d)))


def maassen_uffink_bound(p: int) -> float:
    """Pairwise bound (1/2) log2 d on the mean Shannon entropy of two bases."""
    return float(0.5 * np.log2(p * p))


@dataclass
class EntropyReport:
    p: int
    per_basis_H1: list[float]
    per_basis_H2: list[float]
    tolerance: float = SATURATION_TOL
    avg_H1: float = field(init=False)
    avg_H2: float = field(init=False)
    bound_H1: float = field(init=False)
    bound_H2: float = field(init=False)

    def __post_init__(self) -> None:
        self.avg_H1 = float(np.mean(self.per_basis_H1))
        self.avg_H2 = float(np.mean(self.per_basis_H2))
        self.bound_H1, self.bound_H2 = eur_bounds(self.L, self.p)

    @property
    def L(self) -> int:
        return len(self.per_basis_H1)

    @property
    def saturated_H1(self) -> bool:
        return bool(abs(self.avg_H1 - self.bound_H1) <= self.tolerance)

    @property
    def saturated_H2(self) -> bool:
        return bool(abs(self.avg_H2 - self.bound_H2) <= self.tolerance)

    @property
    def bounds_hold(self) -> bool:
        return bool(self.avg_H1 >= self.bound_H1 - self.tolerance and self.avg_H2 >= self.bound_H2 - self.tolerance)

    def to_record(self) -> dict:
        return {
            "L": self.L,
            "p": int(self.p),
            "per_basis_H1": self.per_basis_H1,
            "per_basis_H2": self.per_basis_H2,
            "avg_H1": self.avg_H1,
            "avg_H2": self.avg_H2,
            "bound_H1": self.bound_H1,
            "bound_H2": self.bound_H2,
            "saturated_H1": self.saturated_H1,
            "saturated_H2": self.saturated_H2,
            "tolerance": self.tolerance,
        }


def entropy_report(bases: Sequence[Basis], state: np.ndarray, tolerance: float = SATURATION_TOL) -> EntropyReport:
    dists = [measure(b, state) for b in bases]
    p = bases[0].source_class.p
    return EntropyReport(p, [h1(q) for q in dists], [h2(q) for q in dists], tolerance)


def theorem3_check(
    subset_bases: Sequence[Basis], new_class: CommutingClass, tolerance: float = SATURATION_TOL
) -> list[EntropyReport]:
    """Entropy reports for every common eigenstate of ``new_class`` measured
    in the p+1 bases it was assembled from."""
    classes = [b.source_class for b in subset_bases]
    p = new_class.p
    if len(classes) != p + 1:
        raise ClassError(f"need p+1 = {p + 1} bases, got {len(classes)}")
    if new_class in classes or new_class.mask & ~union_mask(classes):
        raise ClassError("new_class is not formed from the words of the given classes")
    eigen = build_basis(new_class)
    return [entropy_report(subset_bases, psi, tolerance) for psi in eigen.states]


def haar_states(d: int, count: int, seed: int) -> np.ndarray:
    """``count`` Haar-random unit vectors in C^d as rows (normalized complex Gaussians)."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


@dataclass
class ProbeResult:
    value: float
    vector: np.ndarray
    restarts: int
    seed: int
    values: list[float]

    def to_record(self) -> dict:
        return {
            "min_objective": self.value,
            "restarts": self.restarts,
            "seed": self.seed,
            "restart_values": self.values,
            "argmin": {"re": [float(v) for v in self.vector.real], "im": [float(v) for v in self.vector.imag]},
            "note": "numerical evidence only; a positive floor is not a proof of strong unextendibility",
        }


def unbiasedness_objective(rows: np.ndarray, d: int):
    """F(z) = sum_k (|<b_k|z>|^2/|z|^2 - 1/d)^2 on R^{2d}, with its gradient."""

    def fun(xy: np.ndarray) -> tuple[float, np.ndarray]:
        z = xy[:d] + 1j * xy[d:]
        s = float(np.vdot(z, z).real)
        c = rows @ z
        q = np.abs(c) ** 2 / s
        r = q - 1.0 / d
        val = float(np.sum(r * r))
        # Wirtinger derivative dF/dz*, then dF/dx = 2 Re, dF/dy = 2 Im
        g = 2.0 * (rows.conj().T @ (r * c) / s - np.sum(r * q) * z / s)
        return val, np.concatenate([2 * g.real, 2 * g.imag])

    return fun


def strong_unext_probe(
    bases: Sequence[Basis], restarts: int = 200, seed: int = 0, max_iter: int = 2000
) -> ProbeResult:
    """Search for a unit vector unbiased to every basis.

    Each restart starts from a seeded Haar-random vector and runs L-BFGS on
    the scale-invariant objective. A value near zero means a (nearly)
    unbiased vector exists; a floor bounded away from zero over many restarts
    is evidence that none does.
    """
    if not bases:
        raise ValueError("need at least one basis")
    d = bases[0].dim
    rows = np.vstack([b.states.conj() for b in bases])
    fun = unbiasedness_objective(rows, d)
    starts = haar_states(d, restarts, seed)
    best_val, best_vec, values = np.inf, starts[0], []
    for z0 in starts:
        res = minimize(
            fun,
            np.concatenate([z0.real, z0.imag]),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": max_iter, "ftol": 0.0, "gtol": 1e-15, "maxcor": 30},
        )
        z = res.x[:d] + 1j * res.x[d:]
        z /= np.linalg.norm(z)
        val = fun(np.concatenate([z.real, z.imag]))[0]
        values.append(val)
        if val < best_val:
            best_val, best_vec = val, z
    return ProbeResult(best_val, best_vec, restarts, seed, values)
