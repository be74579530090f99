"""Deterministic JSON output and fixture loading."""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from .classes import CommutingClass
from .pauli import PauliWord
from .spreads import ClassSet

SCHEMA_VERSION = 1

_INNER_LIST = re.compile(r"\[\s*(-?[\d.eE+-]+(?:,\s*-?[\d.eE+-]+)*)\s*\]")


def dumps(obj: Any) -> str:
    """Indented JSON with flat numeric lists kept on one line, newline-terminated."""
    text = json.dumps(obj, indent=1, ensure_ascii=False, allow_nan=False)
    text = _INNER_LIST.sub(lambda m: "[" + ",".join(x.strip() for x in m.group(1).split(",")) + "]", text)
    return text + "\n"


def write_json(path: str | Path, obj: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def read_json(path: str | Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class Fixture:
    """A golden dataset: named classes and named class sets."""

    p: int
    classes: dict[str, CommutingClass]
    sets: dict[str, ClassSet]
    labels: dict[str, list[str]]
    raw: dict

    def subset(self, names: list[str]) -> list[CommutingClass]:
        return [self.classes[n] for n in names]

    def name_of(self, c: CommutingClass) -> str | None:
        return next((n for n, d in self.classes.items() if d == c), None)

    @property
    def residual(self) -> list[PauliWord]:
        return [PauliWord(*w) for w in self.raw.get("residual", [])]


def parse_fixture(raw: dict) -> Fixture:
    if raw.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"unsupported fixture schema {raw.get('schema')!r}")
    classes = {name: CommutingClass.from_record(rec) for name, rec in raw["classes"].items()}
    sets, labels = {}, {}
    for name, rec in raw["sets"].items():
        cs = ClassSet.from_record(rec)
        names = rec.get("labels", [])
        if names and [classes[n] for n in names] != list(cs.classes):
            raise ValueError(f"labels of set {name!r} disagree with its class records")
        sets[name], labels[name] = cs, names
    return Fixture(raw["p"], classes, sets, labels, raw)


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("mubforge") / "data" / f"{name}.json"))


def load_fixture(name_or_path: str | Path) -> Fixture:
    """Load ``d9``, ``d4`` or a JSON file path."""
    path = Path(name_or_path)
    if not path.suffix:
        path = fixture_path(str(name_or_path))
    return parse_fixture(read_json(path))
