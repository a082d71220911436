"""Template pack loading. Packs are versioned YAML files; the pack version
participates in generation determinism."""

from __future__ import annotations

from importlib import resources

import yaml

DOMAINS = ("household", "laboratory", "office", "industrial")

_cache: dict[str, dict] = {}


def load_pack(domain: str) -> dict:
    if domain not in DOMAINS:
        raise ValueError(f"unknown template pack {domain!r}; choose from {DOMAINS}")
    if domain not in _cache:
        text = resources.files("roomsim.data.packs").joinpath(f"{domain}.yaml").read_text()
        _cache[domain] = yaml.safe_load(text)
    return _cache[domain]


def domain_for_seed(seed_text: str) -> str:
    """Map a free-text semantic seed onto a template pack."""
    text = seed_text.lower()
    keywords = {
        "laboratory": ("lab", "chem", "scien", "sample", "reagent", "steril"),
        "office": ("office", "desk", "meeting", "clerical", "paper"),
        "industrial": ("industrial", "factory", "assembly", "warehouse", "weld", "machine"),
    }
    for domain, words in keywords.items():
        if any(word in text for word in words):
            return domain
    return "household"
