"""Shared helpers for the test suite."""

from __future__ import annotations

import random
from pathlib import Path

from hmlcause import (
    And,
    Box,
    Diamond,
    GenParams,
    Not,
    Or,
    Top,
    gen_lts,
)

ROOT = Path(__file__).resolve().parents[1]
FIXTURE_DIR = ROOT / "fixtures"


def w(text: str) -> tuple:
    """Word literal for single-character labels: w("ah") == ("a", "h")."""
    return tuple(text)


def words(*texts: str) -> frozenset:
    return frozenset(w(t) for t in texts)


def seeded_lts(seed: int, **overrides) -> "Lts":
    return gen_lts(GenParams(seed=seed, **overrides))


def rand_formula(rng: random.Random, labels: list, depth: int):
    """Formula sampler independent of the generator shipped in the package."""
    if depth == 0 or rng.random() < 0.2:
        return Top() if rng.random() < 0.5 else Not(Top())
    pick = rng.randrange(5)
    if pick == 0:
        return Diamond(rng.choice(labels), rand_formula(rng, labels, depth - 1))
    if pick == 1:
        return Box(rng.choice(labels), rand_formula(rng, labels, depth - 1))
    if pick == 2:
        return Not(rand_formula(rng, labels, depth - 1))
    if pick == 3:
        return And(
            rand_formula(rng, labels, depth - 1),
            rand_formula(rng, labels, depth - 1),
        )
    return Or(
        rand_formula(rng, labels, depth - 1),
        rand_formula(rng, labels, depth - 1),
    )


def is_subsequence(shorter: tuple, longer: tuple) -> bool:
    it = iter(longer)
    return all(letter in it for letter in shorter)
