"""Shared fixtures: the frozen random word pool used across suites."""

from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

SUITE2_SEED = 0xC0FFEE
SUITE2_SIZE = 200

# one line per acceptance criterion, echoed after the run summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_word_pool(seed: int = SUITE2_SEED, size: int = SUITE2_SIZE) -> list[tuple[int, list[int]]]:
    """Deterministic pool of (strands, letters) pairs, lengths stratified 1..12."""
    rng = random.Random(seed)
    pool: list[tuple[int, list[int]]] = []
    for idx in range(size):
        length = idx % 12 + 1
        strands = rng.randint(2, 4)
        letters = []
        for _ in range(length):
            gen = rng.randint(1, strands - 1)
            letters.append(gen if rng.random() < 0.5 else -gen)
        pool.append((strands, letters))
    rng.shuffle(pool)
    return pool


@pytest.fixture(scope="session")
def suite2_words() -> list[tuple[int, list[int]]]:
    return make_word_pool()
