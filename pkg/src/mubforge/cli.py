"""Command-line front end.

Every verb writes one JSON artifact (``--out``) plus a sidecar
``<out>.manifest.json`` holding the run parameters and wall time, so the
artifact itself is byte-identical across repeated runs.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from itertools import combinations
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .classes import ClassError, enumerate_all_classes
from .entropy import (
    SATURATION_TOL,
    eur_bounds,
    h1,
    h2,
    haar_states,
    maassen_uffink_bound,
    measure,
    strong_unext_probe,
    theorem3_check,
)
from .jsonio import SCHEMA_VERSION, Fixture, fixture_path, load_fixture, read_json, sha256_file, write_json
from .pauli import Prime, all_words, format_word
from .spreads import (
    ClassSet,
    WorkBudget,
    assemble_unextendible,
    build_complete_set,
    certify_unextendible,
    new_classes_from_subset,
    search_unextendible,
    theorem2_scan,
)
from .states import build_basis

log = logging.getLogger("mubforge")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_BUDGET = 100_000


class UsageError(Exception):
    pass


class VerificationError(Exception):
    pass


def _artifact(**fields) -> dict:
    return {"schema": SCHEMA_VERSION, **fields}


def _prime(text: str) -> Prime:
    try:
        return Prime(int(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"{text}: not prime") from exc


def _indices(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad index list {text!r}") from exc


def load_class_set(path: str, set_name: str | None) -> tuple[ClassSet, dict[str, str]]:
    """A ClassSet from a JSON artifact, a fixture file, or a packaged fixture name."""
    p = Path(path)
    if not p.exists() and not p.suffix:
        p = fixture_path(path)
    if not p.exists():
        raise UsageError(f"no such class set file: {path}")
    raw = read_json(p)
    try:
        if "sets" in raw:
            name = set_name or "complete"
            if name not in raw["sets"]:
                raise UsageError(f"{p} has no set named {name!r}")
            cs = ClassSet.from_record(raw["sets"][name])
        else:
            cs = ClassSet.from_record(raw)
    except (ClassError, KeyError, TypeError) as exc:
        raise UsageError(f"invalid class set in {p}: {exc}") from exc
    return cs, {str(p): sha256_file(p)}


def cmd_enumerate(args) -> tuple[dict, dict]:
    classes = enumerate_all_classes(args.prime)
    return _artifact(p=int(args.prime), count=len(classes), classes=[c.to_record() for c in classes]), {}


def cmd_complete(args) -> tuple[dict, dict]:
    cs = build_complete_set(args.prime, args.seed)
    return _artifact(**cs.to_record()), {}


def cmd_unext(args) -> tuple[dict, dict]:
    try:
        budget = WorkBudget(args.budget)
        found = search_unextendible(args.prime, args.target_size, budget, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    log.info("found %d certified sets using %d of %d nodes", len(found), budget.used, budget.limit)
    return (
        _artifact(
            p=int(args.prime),
            target_size=args.target_size,
            budget=args.budget,
            nodes_used=budget.used,
            count=len(found),
            sets=[s.to_record() for s in found],
        ),
        {},
    )


def cmd_eur(args) -> tuple[dict, dict]:
    cs, inputs = load_class_set(args.classset, args.set)
    p = cs.p
    if any(not 0 <= i < len(cs) for i in args.subset) or len(set(args.subset)) != p + 1:
        raise UsageError(f"--subset needs {p + 1} distinct indices in [0, {len(cs) - 1}]")
    subset = [cs.classes[i] for i in sorted(args.subset)]
    new = new_classes_from_subset(subset, p)
    if not new:
        raise UsageError("subset admits no new class")
    bases = [build_basis(c) for c in subset]
    reports = []
    for k, c in enumerate(new):
        for lab, rep in zip(build_basis(c).labels, theorem3_check(bases, c, args.tolerance)):
            reports.append({"new_class": k, "label": list(lab), **rep.to_record()})
    all_saturated = all(r["saturated_H1"] and r["saturated_H2"] for r in reports)

    # bound checks on sampled states
    states = haar_states(p * p, args.samples, args.seed)
    b1, b2 = eur_bounds(len(bases), p)
    mu = maassen_uffink_bound(p)
    min_h1 = min_h2 = min_pair = np.inf
    monotone = True
    for psi in states:
        dists = [measure(b, psi) for b in bases]
        e1 = [h1(q) for q in dists]
        e2 = [h2(q) for q in dists]
        monotone &= all(y <= x + args.tolerance for x, y in zip(e1, e2))
        min_h1 = min(min_h1, float(np.mean(e1)))
        min_h2 = min(min_h2, float(np.mean(e2)))
        min_pair = min(min_pair, min(0.5 * (x + y) for x, y in combinations(e1, 2)))
    sampled = {
        "count": args.samples,
        "seed": args.seed,
        "min_avg_H1": min_h1,
        "min_avg_H2": min_h2,
        "min_pair_avg_H1": min_pair,
        "shannon_bound_holds": bool(min_h1 >= b1 - args.tolerance),
        "h2_bound_holds": bool(min_h2 >= b2 - args.tolerance),
        "pair_bound_holds": bool(min_pair >= mu - args.tolerance),
        "h2_le_h1": bool(monotone),
    }
    ok = all_saturated and all(v for k, v in sampled.items() if k.endswith("holds") or k == "h2_le_h1")
    art = _artifact(
        p=int(p),
        L=len(bases),
        subset=sorted(args.subset),
        bound_H1=b1,
        bound_H2=b2,
        new_classes=[c.to_record() for c in new],
        all_saturated=all_saturated,
        eigenstate_reports=reports,
        sampled=sampled,
    )
    if not ok:
        raise VerificationError("entropy checks failed", art)
    return art, inputs


def cmd_probe(args) -> tuple[dict, dict]:
    cs, inputs = load_class_set(args.classset, args.set)
    idx = sorted(args.subset) if args.subset else list(range(len(cs)))
    if any(not 0 <= i < len(cs) for i in idx):
        raise UsageError("subset index out of range")
    bases = [build_basis(cs.classes[i]) for i in idx]
    res = strong_unext_probe(bases, args.restarts, args.seed)
    return _artifact(p=int(cs.p), bases=idx, **res.to_record()), inputs


def _check(results: list[dict], name: str, passed: bool, detail: str = "") -> None:
    results.append({"artifact": name, "passed": bool(passed), "detail": detail})
    log.info("%-22s %s %s", name, "ok" if passed else "MISMATCH", detail)


def replay_golden(fixture: Fixture, d4: Fixture, tolerance: float = SATURATION_TOL) -> tuple[list[dict], dict]:
    """Recompute the d = 9 and d = 4 constructions and compare with the fixtures."""
    results: list[dict] = []
    artifacts: dict[str, dict] = {}
    cls = fixture.classes
    complete = fixture.sets["complete"]
    p = fixture.p
    _check(results, "complete_set", complete.kind == "complete" and len(complete) == p * p + 1,
           f"{len(complete)} classes")
    artifacts["complete"] = _artifact(**complete.to_record())

    construct = {tuple(c["subset"]): c["new"] for c in fixture.raw["constructions"]}
    first = ("C1", "C2", "C5", "C7")
    new = new_classes_from_subset(fixture.subset(list(first)), p)
    expected = fixture.subset(construct.get(first, []))
    _check(results, "new_classes_CI_CII", sorted(c.key for c in new) == sorted(c.key for c in expected),
           ",".join(fixture.name_of(c) or "?" for c in new))

    idx = [complete.index_of(cls[n]) for n in first]
    eight = assemble_unextendible(complete, idx)
    cert8 = certify_unextendible(eight)
    _check(results, "unextendible_8", eight.same_classes(fixture.sets["unextendible_8"]) and cert8.valid,
           f"{len(eight)} classes, residual {cert8.residual_word_count}")
    artifacts["unextendible_8"] = _artifact(**ClassSet(p, eight.classes, "certified-unextendible", cert8).to_record()) \
        if cert8.valid else _artifact(**eight.to_record())

    second = ("CI", "C3", "C4", "C8")
    new_a = new_classes_from_subset(fixture.subset(list(second)), p)
    _check(results, "new_class_CA", [c.key for c in new_a] == [c.key for c in fixture.subset(construct.get(second, []))],
           ",".join(fixture.name_of(c) or "?" for c in new_a))

    five = assemble_unextendible(eight, [eight.index_of(cls[n]) for n in second])
    cert5 = certify_unextendible(five)
    _check(results, "unextendible_5", five.same_classes(fixture.sets["unextendible_5"]) and cert5.valid,
           f"{len(five)} classes, residual {cert5.residual_word_count}")
    artifacts["unextendible_5"] = _artifact(**ClassSet(p, five.classes, "certified-unextendible", cert5).to_record()) \
        if cert5.valid else _artifact(**five.to_record())

    scan = theorem2_scan(complete)
    _check(results, "subset_scan", scan.max_new <= 2 and scan.never_exactly_one,
           f"histogram {dict(sorted(scan.histogram.items()))}")
    artifacts["subset_scan"] = _artifact(**scan.to_record())

    bases = [build_basis(c) for c in fixture.subset(list(first))]
    sat = {}
    for c in expected:
        reps = theorem3_check(bases, c, tolerance)
        sat[fixture.name_of(c)] = [r.to_record() for r in reps]
    ok3 = all(r["saturated_H1"] and r["saturated_H2"] for rs in sat.values() for r in rs) and bool(sat)
    _check(results, "eur_saturation", ok3, f"{sum(len(v) for v in sat.values())} eigenstates")
    artifacts["saturation"] = _artifact(p=p, subset=list(first), reports=sat)

    tri = d4.sets["unextendible_3"]
    cert4 = certify_unextendible(tri)
    residual = [w for w in all_words(2) if not any(w in c for c in tri.classes)]
    _check(results, "d4_unextendible_3", cert4.valid and residual == sorted(d4.residual),
           f"residual {cert4.residual_word_count}: " + "; ".join(format_word(w) for w in residual))
    artifacts["d4"] = _artifact(**ClassSet(2, tri.classes, "certified-unextendible", cert4).to_record()) \
        if cert4.valid else _artifact(**tri.to_record())
    return results, artifacts


def cmd_replay(args) -> tuple[dict, dict]:
    paths = {"d9": Path(args.fixture) if args.fixture else fixture_path("d9"),
             "d4": Path(args.d4_fixture) if args.d4_fixture else fixture_path("d4")}
    fixtures = {}
    for name, path in paths.items():
        try:
            fixtures[name] = load_fixture(path)
        except (ClassError, ValueError, KeyError, TypeError) as exc:
            raise VerificationError(f"fixture {name} ({path}) failed validation: {exc}") from exc
    try:
        results, artifacts = replay_golden(fixtures["d9"], fixtures["d4"], args.tolerance)
    except (ClassError, KeyError, ValueError) as exc:
        raise VerificationError(f"replay aborted: {exc}") from exc
    out_dir = Path(args.out)
    for name, art in artifacts.items():
        write_json(out_dir / f"{name}.json", art)
    summary = _artifact(checks=results, all_passed=all(r["passed"] for r in results))
    inputs = {str(p): sha256_file(p) for p in paths.values()}
    failed = [r["artifact"] for r in results if not r["passed"]]
    if failed:
        raise VerificationError("mismatch in: " + ", ".join(failed), summary)
    return summary, inputs


def _manifest(args, argv: list[str], inputs: dict, wall: float) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "tool": "mubforge",
        "version": __version__,
        "command": argv,
        "verb": args.verb,
        "p": int(getattr(args, "prime", 0) or 0) or None,
        "seed": getattr(args, "seed", None),
        "budget": getattr(args, "budget", None),
        "restarts": getattr(args, "restarts", None),
        "tolerances": {"saturation": getattr(args, "tolerance", SATURATION_TOL)},
        "inputs": inputs,
        "wall_time_s": round(wall, 3),
    }


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mubforge", description="Unextendible MUB classes in dimension p^2.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="verb", required=True)

    def verb(name: str, func: Callable, help: str, default_out: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help, parents=[common])
        sp.set_defaults(func=func)
        sp.add_argument("--out", default=default_out, help=f"output path (default {default_out})")
        return sp

    sp = verb("enumerate", cmd_enumerate, "all maximal commuting classes", "classes.json")
    sp.add_argument("--prime", type=_prime, required=True)

    sp = verb("complete", cmd_complete, "one complete set of p^2+1 classes", "complete.json")
    sp.add_argument("--prime", type=_prime, required=True)
    sp.add_argument("--seed", type=int, default=None, help="shuffle the branching order (default canonical)")

    sp = verb("unext", cmd_unext, "search and certify unextendible sets", "unext.json")
    sp.add_argument("--prime", type=_prime, required=True)
    sp.add_argument("--target-size", type=int, required=True)
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search node budget")
    sp.add_argument("--seed", type=int, default=None)

    for name, func, help_, out in (
        ("eur", cmd_eur, "entropic saturation for a (p+1)-subset", "eur.json"),
        ("probe-strong", cmd_probe, "numerical search for a vector unbiased to all bases", "probe.json"),
    ):
        sp = verb(name, func, help_, out)
        sp.add_argument("--classset", required=True, help="ClassSet JSON, fixture JSON, or fixture name (d9, d4)")
        sp.add_argument("--set", default=None, help="set name inside a fixture file (default: complete)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tolerance", type=float, default=SATURATION_TOL)
        if name == "eur":
            sp.add_argument("--subset", type=_indices, required=True, help="comma-separated 0-based class indices")
            sp.add_argument("--samples", type=int, default=1000, help="Haar-random states for bound checks")
        else:
            sp.add_argument("--subset", type=_indices, default=None, help="restrict to these class indices")
            sp.add_argument("--restarts", type=int, default=200)

    sp = verb("replay-paper", cmd_replay, "recompute and check the golden d=9 and d=4 datasets", "replay")
    sp.add_argument("--fixture", default=None, help="alternate d=9 fixture file")
    sp.add_argument("--d4-fixture", default=None, help="alternate d=4 fixture file")
    sp.add_argument("--tolerance", type=float, default=SATURATION_TOL)
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    start = time.perf_counter()
    code = EXIT_OK
    try:
        artifact, inputs = args.func(args)
    except (UsageError, ClassError) as exc:
        print(f"mubforge {args.verb}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationError as exc:
        print(f"mubforge {args.verb}: verification failed: {exc.args[0]}", file=sys.stderr)
        if len(exc.args) < 2:
            return EXIT_FAIL
        artifact, inputs, code = exc.args[1], {}, EXIT_FAIL
    out = Path(args.out)
    if args.verb == "replay-paper":
        out = out / "summary.json"
    write_json(out, artifact)
    write_json(out.with_name(out.name + ".manifest.json"),
               _manifest(args, argv, inputs, time.perf_counter() - start))
    return code


if __name__ == "__main__":
    sys.exit(main())
