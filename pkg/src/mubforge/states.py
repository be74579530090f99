"""Dense matrices for Pauli words and the common eigenbases of classes."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .classes import ClassError, CommutingClass
from .pauli import PauliWord

PROJECTOR_TOL = 1e-10


@lru_cache(maxsize=None)
def omega_powers(p: int) -> np.ndarray:
    """w^j for j = 0..p-1, each from its exact angle."""
    return np.exp(2j * np.pi * np.arange(p) / p)


@lru_cache(maxsize=None)
def shift_clock(p: int) -> tuple[np.ndarray, np.ndarray]:
    X = np.roll(np.eye(p, dtype=complex), 1, axis=0)  # X|j> = |j+1>
    Z = np.diag(omega_powers(p))
    return X, Z


def _factor(m: int, n: int, p: int, hermitian: bool) -> np.ndarray:
    X, Z = shift_clock(p)
    op = np.linalg.matrix_power(X, m) @ np.linalg.matrix_power(Z, n)
    if hermitian and m and n:
        op = 1j * op  # Y = i X Z
    return op


def realize_word(w: PauliWord, p: int, hermitian: bool | None = None) -> np.ndarray:
    """Matrix of ``X^m Z^n (x) X^k Z^l``.

    For p = 2 the factor X Z gets the phase i by default, so that every
    realized word is Hermitian and squares to the identity. Odd p carry no
    extra scalar.
    """
    if hermitian is None:
        hermitian = p == 2
    return np.kron(_factor(w.m, w.n, p, hermitian), _factor(w.k, w.l, p, hermitian))


def label(x1: int, x2: int, p: int) -> tuple[int, ...]:
    """Full eigenvalue label (x_1, ..., x_{p+1}) with x_k = (k-2) x_1 + x_2."""
    return (x1 % p, x2 % p) + tuple(((k - 2) * x1 + x2) % p for k in range(3, p + 2))


def check_label(x: tuple[int, ...], p: int) -> None:
    if len(x) != p + 1 or tuple(x) != label(x[0], x[1], p):
        raise ClassError(f"inconsistent label {tuple(x)} for p={p}")


def representative_matrices(c: CommutingClass) -> list[np.ndarray]:
    """Matrices of the p+1 independent members, with sigma_k = sigma_1^(k-2) sigma_2
    taken as a matrix product so phases stay consistent inside the class."""
    p = c.p
    m1, m2 = realize_word(c.gen1, p), realize_word(c.gen2, p)
    mats = [m1, m2]
    acc = m2
    for _ in range(3, p + 2):
        acc = m1 @ acc
        mats.append(acc)
    return mats


def projector_from_label(c: CommutingClass, x: tuple[int, ...]) -> np.ndarray:
    """Rank-one projector (1/p^2) [I + sum_l sum_j w^(j x_l) sigma_l^j]."""
    p = c.p
    check_label(x, p)
    w = omega_powers(p)
    d = p * p
    rho = np.eye(d, dtype=complex)
    for xl, sigma in zip(x, representative_matrices(c)):
        term = np.eye(d, dtype=complex)
        for j in range(1, p):
            term = term @ sigma
            rho += w[(j * xl) % p] * term
    return rho / d


@dataclass(frozen=True)
class Basis:
    source_class: CommutingClass
    labels: tuple[tuple[int, ...], ...]
    states: np.ndarray  # rows are unit vectors

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def to_record(self) -> dict:
        return {
            "class": self.source_class.to_record(),
            "states": [
                {"label": list(lab), "re": [float(v) for v in vec.real], "im": [float(v) for v in vec.imag]}
                for lab, vec in zip(self.labels, self.states)
            ],
        }


def fix_phase(v: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Rotate so the first entry with modulus above ``tol`` is real positive."""
    i = int(np.argmax(np.abs(v) > tol))
    return v * (abs(v[i]) / v[i])


def build_basis(c: CommutingClass) -> Basis:
    p = c.p
    labels, states = [], []
    for x1 in range(p):
        for x2 in range(p):
            x = label(x1, x2, p)
            rho = projector_from_label(c, x)
            if abs(np.trace(rho).real - 1) > PROJECTOR_TOL or np.linalg.norm(rho @ rho - rho) > PROJECTOR_TOL:
                raise AssertionError(f"label {x} did not give a rank-one projector")
            col = int(np.argmax(np.real(np.diag(rho))))
            v = rho[:, col] / np.sqrt(rho[col, col].real)
            labels.append(x)
            states.append(fix_phase(v))
    return Basis(c, tuple(labels), np.array(states))


def verify_unbiased(b1: Basis, b2: Basis) -> float:
    """max | |<a|b>|^2 - 1/d | over all pairs of states."""
    if b1.dim != b2.dim:
        raise ValueError(f"dimension mismatch {b1.dim} vs {b2.dim}")
    overlaps = np.abs(b1.states.conj() @ b2.states.T) ** 2
    return float(np.max(np.abs(overlaps - 1.0 / b1.dim)))


def orthonormality_error(b: Basis) -> float:
    gram = b.states.conj() @ b.states.T
    return float(np.max(np.abs(gram - np.eye(b.dim))))
