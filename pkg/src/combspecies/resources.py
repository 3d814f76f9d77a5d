"""Bundled example systems and JSON schemas."""

from __future__ import annotations

import json
from importlib import resources
from typing import List

from .parser import SystemSpec, parse_system


def corpus_names() -> List[str]:
    return sorted(p.name[:-5] for p in resources.files(__package__).joinpath("corpus").iterdir() if p.name.endswith(".spec"))


def corpus_text(name: str) -> str:
    return resources.files(__package__).joinpath("corpus", f"{name}.spec").read_text(encoding="utf-8")


def load_corpus(name: str) -> SystemSpec:
    return parse_system(corpus_text(name))


def schema(command: str) -> dict:
    return json.loads(resources.files(__package__).joinpath("schemas", f"{command}.schema.json").read_text(encoding="utf-8"))
