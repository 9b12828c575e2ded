"""Bundled spec files, one per worked configuration used in the tests."""

from __future__ import annotations

import json
from importlib import resources

from ..langmodel import ShiftSpec, validate_spec


def list_fixtures() -> list[str]:
    root = resources.files(__package__)
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def fixture_document(name: str) -> dict:
    root = resources.files(__package__)
    with (root / f"{name}.json").open("r", encoding="utf-8") as fh:
        return json.load(fh)


def load_fixture(name: str) -> ShiftSpec:
    doc = fixture_document(name)
    repeated = [(e["word"], e["multiplicity"]) for e in doc.get("repeated", [])]
    return validate_spec(doc["alphabet"], doc.get("forbidden", []), repeated)
