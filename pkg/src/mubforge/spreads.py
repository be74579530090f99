"""Complete sets, new-class formation, and unextendibility certificates."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Sequence

from .classes import (
    ClassError,
    CommutingClass,
    check_guard,
    disjoint,
    enumerate_all_classes,
    union_mask,
)

COMPLETE = "complete"
CANDIDATE = "candidate"
CERTIFIED = "certified-unextendible"
KINDS = (COMPLETE, CANDIDATE, CERTIFIED)


class BudgetExhausted(RuntimeError):
    pass


class WorkBudget:
    """Counts search nodes; wall-clock free so runs reproduce across machines."""

    def __init__(self, limit: int):
        if limit <= 0:
            raise ValueError("budget must be positive")
        self.limit = limit
        self.used = 0

    def spend(self, n: int = 1) -> None:
        if self.used + n > self.limit:
            self.used = self.limit
            raise BudgetExhausted(f"work budget of {self.limit} nodes exhausted")
        self.used += n

    @property
    def exhausted(self) -> bool:
        return self.used >= self.limit


def full_mask(p: int) -> int:
    # every non-identity word; index 0 is the identity
    return (1 << p**4) - 2


@dataclass(frozen=True)
class UnextCertificate:
    residual_word_count: int
    lagrangians_checked: int
    witness: CommutingClass | None = None

    @property
    def valid(self) -> bool:
        return self.witness is None

    def to_record(self) -> dict:
        rec = {"residual_word_count": self.residual_word_count, "lagrangians_checked": self.lagrangians_checked}
        if self.witness is not None:
            rec["witness"] = self.witness.to_record()
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "UnextCertificate":
        witness = CommutingClass.from_record(rec["witness"]) if rec.get("witness") else None
        return cls(rec["residual_word_count"], rec["lagrangians_checked"], witness)


@dataclass(frozen=True)
class ClassSet:
    p: int
    classes: tuple[CommutingClass, ...]
    kind: str = CANDIDATE
    certificate: UnextCertificate | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "classes", tuple(self.classes))
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        for a, b in combinations(self.classes, 2):
            if not disjoint(a, b):
                raise ClassError("classes in a ClassSet must be pairwise disjoint")
        if self.kind == COMPLETE:
            if len(self.classes) != self.p**2 + 1 or union_mask(self.classes) != full_mask(self.p):
                raise ClassError("a complete set needs p^2+1 classes covering every non-identity word")
        if self.kind == CERTIFIED and (self.certificate is None or not self.certificate.valid):
            raise ClassError("certified set requires a valid certificate")

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def key(self) -> tuple:
        """Order-insensitive canonical identity."""
        return tuple(sorted(c.key for c in self.classes))

    def same_classes(self, other: "ClassSet") -> bool:
        return self.p == other.p and self.key == other.key

    def index_of(self, c: CommutingClass) -> int:
        return self.classes.index(c)

    def to_record(self) -> dict:
        return {
            "p": int(self.p),
            "kind": self.kind,
            "classes": [c.to_record() for c in self.classes],
            "certificate": self.certificate.to_record() if self.certificate else None,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "ClassSet":
        cert = UnextCertificate.from_record(rec["certificate"]) if rec.get("certificate") else None
        classes = tuple(CommutingClass.from_record(c) for c in rec["classes"])
        return cls(rec["p"], classes, rec["kind"], cert)


def iter_complete_sets(
    p: int, seed: int | None = None, budget: WorkBudget | None = None
) -> Iterator[ClassSet]:
    """Depth-first exact cover of the non-identity words by disjoint classes.

    Branches on the lowest uncovered word; candidate classes are tried in
    canonical order, or in an order shuffled by ``seed``. Yields every complete
    set reachable before the budget runs out, each with classes sorted
    canonically.
    """
    p = check_guard(p)
    classes = enumerate_all_classes(p)
    order = list(range(len(classes)))
    if seed is not None:
        random.Random(seed).shuffle(order)
    by_word: dict[int, list[int]] = {}
    for i in order:
        m = classes[i].mask
        while m:
            low = m & -m
            by_word.setdefault(low.bit_length() - 1, []).append(i)
            m ^= low
    full = full_mask(p)
    chosen: list[int] = []

    def dfs(covered: int) -> Iterator[ClassSet]:
        if covered == full:
            picked = sorted((classes[i] for i in chosen), key=lambda c: c.key)
            yield ClassSet(p, tuple(picked), COMPLETE)
            return
        free = full & ~covered
        idx = (free & -free).bit_length() - 1
        for i in by_word[idx]:
            if classes[i].mask & covered:
                continue
            if budget is not None:
                budget.spend()
            chosen.append(i)
            yield from dfs(covered | classes[i].mask)
            chosen.pop()

    try:
        yield from dfs(0)
    except BudgetExhausted:
        return


def build_complete_set(p: int, seed: int | None = None) -> ClassSet:
    """First complete set found by the exact-cover search (deterministic)."""
    for cs in iter_complete_sets(p, seed):
        return cs
    raise AssertionError(f"no complete set found for p={p}")


def new_classes_from_subset(subset: Sequence[CommutingClass], p: int) -> list[CommutingClass]:
    """Classes lying inside the union of ``p+1`` disjoint classes, other than
    the classes themselves."""
    subset = list(subset)
    if len(subset) != p + 1:
        raise ClassError(f"subset must contain exactly p+1 = {p + 1} classes, got {len(subset)}")
    for a, b in combinations(subset, 2):
        if not disjoint(a, b):
            raise ClassError("subset classes must be pairwise disjoint")
    outside = ~union_mask(subset)
    keys = {c.key for c in subset}
    return [c for c in enumerate_all_classes(p) if not c.mask & outside and c.key not in keys]


def meeting_profile(c: CommutingClass, complete: ClassSet) -> dict[int, int]:
    """Index of each class of ``complete`` that ``c`` meets -> shared word count."""
    out = {}
    for i, s in enumerate(complete.classes):
        shared = (c.mask & s.mask).bit_count()
        if shared:
            out[i] = shared
    return out


def new_class_index(complete: ClassSet, budget: WorkBudget | None = None) -> dict[tuple[int, ...], list[CommutingClass]]:
    """Group every class outside ``complete`` by the set of complete-set classes it meets.

    Each outside class meets exactly p+1 of them, so the group keyed by a
    subset is precisely what :func:`new_classes_from_subset` returns for it.
    """
    inside = {c.key for c in complete.classes}
    groups: dict[tuple[int, ...], list[CommutingClass]] = {}
    for c in enumerate_all_classes(complete.p):
        if c.key in inside:
            continue
        if budget is not None:
            budget.spend()
        met = tuple(sorted(meeting_profile(c, complete)))
        if len(met) != complete.p + 1:
            raise AssertionError(f"class {c.key} meets {len(met)} classes of the complete set")
        groups.setdefault(met, []).append(c)
    return groups


def assemble_unextendible(complete: ClassSet, subset_indices: Sequence[int]) -> ClassSet:
    """Swap the chosen p+1 classes for the new classes they admit.

    The new classes come first, then the untouched classes in their original
    order. ``complete`` is normally a complete set, but any disjoint set is
    accepted so a second swap can run on an already reduced set.
    """
    idx = sorted(set(subset_indices))
    subset = [complete.classes[i] for i in idx]
    new = new_classes_from_subset(subset, complete.p)
    if not new:
        raise ClassError("subset admits no new class")
    rest = [c for i, c in enumerate(complete.classes) if i not in idx]
    return ClassSet(complete.p, tuple(new) + tuple(rest), CANDIDATE)


def certify_unextendible(candidate: ClassSet) -> UnextCertificate:
    """Scan every class for one fitting inside the unused words.

    Returns a certificate whose ``witness`` is the first extending class found,
    or None when the set is unextendible.
    """
    residual = full_mask(candidate.p) & ~union_mask(candidate.classes)
    outside = ~residual
    checked = 0
    for c in enumerate_all_classes(candidate.p):
        checked += 1
        if not c.mask & outside:
            return UnextCertificate(residual.bit_count(), checked, c)
    return UnextCertificate(residual.bit_count(), checked)


def certified(candidate: ClassSet) -> ClassSet:
    """Return ``candidate`` re-tagged as certified, or raise if it extends."""
    cert = certify_unextendible(candidate)
    if not cert.valid:
        raise ClassError(f"set extends by class {cert.witness.key}")
    return ClassSet(candidate.p, candidate.classes, CERTIFIED, cert)


@dataclass
class SubsetScan:
    p: int
    counts: dict[tuple[int, ...], int]

    @property
    def histogram(self) -> Counter:
        return Counter(self.counts.values())

    @property
    def max_new(self) -> int:
        return max(self.counts.values())

    @property
    def never_exactly_one(self) -> bool:
        return 1 not in self.histogram

    def to_record(self) -> dict:
        return {
            "p": self.p,
            "subsets": len(self.counts),
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "max_new": self.max_new,
            "never_exactly_one": self.never_exactly_one,
        }


def scan_subsets(complete: ClassSet) -> SubsetScan:
    """New-class count for every (p+1)-subset of a complete set, by direct scan."""
    if complete.kind != COMPLETE:
        raise ClassError("scan needs a complete set")
    p = complete.p
    counts = {}
    for idx in combinations(range(len(complete.classes)), p + 1):
        counts[idx] = len(new_classes_from_subset([complete.classes[i] for i in idx], p))
    return SubsetScan(p, counts)


def theorem2_scan(complete: ClassSet) -> SubsetScan:
    """All 210 four-class subsets of a p=3 complete set; counts must lie in {0, 2}."""
    if complete.p != 3:
        raise ClassError("the four-subset scan is specific to p = 3")
    return scan_subsets(complete)


def search_unextendible(
    p: int,
    target_size: int,
    budget: int | WorkBudget,
    seed: int | None = None,
) -> list[ClassSet]:
    """Certified unextendible sets of ``target_size`` classes.

    Walks complete sets in search order; inside each, a subset admitting exactly
    one (size p^2-p+1) or two (size p^2-p+2) new classes is swapped for them and
    the result certified. Returns the distinct hits sorted canonically; an
    exhausted budget just ends the walk.
    """
    p = check_guard(p)
    want = target_size - (p * p - p)
    if want not in (1, 2):
        raise ValueError(f"target size must be {p * p - p + 1} or {p * p - p + 2}")
    if not isinstance(budget, WorkBudget):
        budget = WorkBudget(budget)
    hits: dict[tuple, ClassSet] = {}
    for complete in iter_complete_sets(p, seed, budget):
        try:
            groups = new_class_index(complete, budget)
        except BudgetExhausted:
            break
        for subset_idx, new in sorted(groups.items()):
            if len(new) != want:
                continue
            candidate = assemble_unextendible(complete, subset_idx)
            cert = certify_unextendible(candidate)
            if cert.valid:
                found = ClassSet(p, candidate.classes, CERTIFIED, cert)
                hits.setdefault(found.key, found)
        if budget.exhausted:
            break
    return [hits[k] for k in sorted(hits)]
