"""Maximal commuting classes as Lagrangian subspaces of F_p^4.

A class is stored by the reduced row-echelon form of its 2x4 generator
matrix, which makes equal classes compare equal. Its members are the
p^2 - 1 non-identity words of the span, kept sorted, together with a bitmask
over word indices for fast set algebra.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .pauli import (
    PauliWord,
    Prime,
    all_words,
    commute,
    compose,
    independent,
    inverse_mod,
    power,
    word_index,
)

DEFAULT_GUARD_MAX_P = 7
GUARD_ENV = "MUBFORGE_GUARD_MAX_P"


class ClassError(ValueError):
    pass


def guard_max_p() -> int:
    raw = os.environ.get(GUARD_ENV)
    return int(raw) if raw else DEFAULT_GUARD_MAX_P


def check_guard(p: int, max_p: int | None = None) -> Prime:
    p = Prime(p)
    limit = guard_max_p() if max_p is None else max_p
    if p > limit:
        raise ClassError(f"p={p} exceeds resource guard p <= {limit} (set {GUARD_ENV} to raise it)")
    return p


def _rref(rows: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    mat = [[x % p for x in row] for row in rows]
    pivot_row = 0
    for col in range(4):
        pivot = next((r for r in range(pivot_row, len(mat)) if mat[r][col]), None)
        if pivot is None:
            continue
        mat[pivot_row], mat[pivot] = mat[pivot], mat[pivot_row]
        inv = inverse_mod(mat[pivot_row][col], p)
        mat[pivot_row] = [(x * inv) % p for x in mat[pivot_row]]
        for r in range(len(mat)):
            if r != pivot_row and mat[r][col]:
                f = mat[r][col]
                mat[r] = [(x - f * y) % p for x, y in zip(mat[r], mat[pivot_row])]
        pivot_row += 1
        if pivot_row == len(mat):
            break
    return mat


@dataclass(frozen=True)
class CommutingClass:
    p: int
    gen1: PauliWord
    gen2: PauliWord
    members: tuple[PauliWord, ...] = field(compare=False, repr=False)
    mask: int = field(compare=False, repr=False)

    @property
    def key(self) -> tuple[PauliWord, PauliWord]:
        """Canonical sort key (the RREF rows)."""
        return (self.gen1, self.gen2)

    @property
    def representatives(self) -> tuple[PauliWord, ...]:
        """The p+1 independent words gen1, gen2, gen1^(k-2) gen2 for k = 3..p+1.

        Every member is a nonzero power of exactly one of these.
        """
        p = self.p
        reps = [self.gen1, self.gen2]
        reps += [compose(power(self.gen1, j, p), self.gen2, p) for j in range(1, p)]
        return tuple(reps)

    def __contains__(self, w: object) -> bool:
        if not isinstance(w, tuple) or len(w) != 4:
            return False
        w = PauliWord(*w)
        if w.is_identity() or any(not 0 <= x < self.p for x in w):
            return False
        return bool(self.mask >> word_index(w, self.p) & 1)

    def __len__(self) -> int:
        return len(self.members)

    def to_record(self) -> dict:
        return {
            "p": int(self.p),
            "generators": [list(self.gen1), list(self.gen2)],
            "members": [list(w) for w in self.members],
        }

    @classmethod
    def from_record(cls, record: dict) -> "CommutingClass":
        p = Prime(record["p"])
        g1, g2 = (PauliWord(*g) for g in record["generators"])
        c = span_class(g1, g2, p)
        if "members" in record:
            listed = sorted(PauliWord(*w) for w in record["members"])
            if tuple(listed) != c.members:
                raise ClassError(f"member list does not match the span of generators {g1}, {g2}")
        return c


def span_class(u: PauliWord, v: PauliWord, p: int) -> CommutingClass:
    """The maximal commuting class generated by two commuting independent words."""
    u, v = PauliWord(*u), PauliWord(*v)
    if u.is_identity() or v.is_identity() or not independent(u, v, p):
        raise ClassError("rank deficient: generators must be independent non-identity words")
    if not commute(u, v, p):
        raise ClassError("not isotropic: generators do not commute")
    r1, r2 = _rref([u, v], p)
    g1, g2 = PauliWord(*r1), PauliWord(*r2)
    members = sorted(
        {compose(power(g1, a, p), power(g2, b, p), p) for a in range(p) for b in range(p)} - {PauliWord(0, 0, 0, 0)}
    )
    mask = 0
    for w in members:
        mask |= 1 << word_index(w, p)
    return CommutingClass(p, g1, g2, tuple(members), mask)


def class_of_words(words: Iterable[PauliWord], p: int) -> CommutingClass:
    """Rebuild a class from any listing of its members; the listing must be
    exactly the span of its first two independent words."""
    words = [PauliWord(*w) for w in words]
    first = words[0]
    second = next((w for w in words[1:] if independent(first, w, p)), None)
    if second is None:
        raise ClassError("rank deficient: listing spans a single cyclic subgroup")
    c = span_class(first, second, p)
    if set(words) != set(c.members):
        raise ClassError("listing is not a maximal commuting class")
    return c


def _projective_reps(p: int) -> list[PauliWord]:
    # first nonzero exponent equal to 1
    return [w for w in all_words(p) if next(x for x in w if x) == 1]


@lru_cache(maxsize=None)
def _enumerate(p: int) -> tuple[CommutingClass, ...]:
    reps = _projective_reps(p)
    found: dict[tuple, CommutingClass] = {}
    for i, u in enumerate(reps):
        covered: int = 0
        for v in reps[i + 1:]:
            if not commute(u, v, p) or covered >> word_index(v, p) & 1:
                continue
            c = span_class(u, v, p)
            covered |= c.mask
            found.setdefault(c.key, c)
    return tuple(found[k] for k in sorted(found))


def enumerate_all_classes(p: int, max_p: int | None = None) -> list[CommutingClass]:
    """Every maximal commuting class for d = p^2, sorted canonically."""
    p = check_guard(p, max_p)
    return list(_enumerate(int(p)))


def disjoint(a: CommutingClass, b: CommutingClass) -> bool:
    if a.p != b.p:
        raise ClassError(f"classes over different primes ({a.p} vs {b.p})")
    return a.mask & b.mask == 0


def commutant(w: PauliWord, other: CommutingClass) -> list[PauliWord]:
    """Members of ``other`` commuting with ``w``."""
    return [v for v in other.members if commute(w, v, other.p)]


def commutant_counts(a: CommutingClass, b: CommutingClass) -> dict[PauliWord, int]:
    """For each member of ``a``, how many members of the disjoint class ``b``
    it commutes with. Every count should be p - 1."""
    if not disjoint(a, b):
        raise ClassError("classes are not disjoint")
    return {u: len(commutant(u, b)) for u in a.members}


def partner_exponent(l: int, k: int, p: int) -> int:  # noqa: E741
    """Unique m with k*m + l = 0 mod p."""
    if k % p == 0:
        raise ClassError("degenerate commutation constant k = 0")
    return (-l * inverse_mod(k, p)) % p


def union_mask(classes: Iterable[CommutingClass]) -> int:
    mask = 0
    for c in classes:
        mask |= c.mask
    return mask
