"""
Shared fixtures for the laboratory tests
"""
import math

import pytest

from config import DEFAULT_SEED
from protocol import ProtocolVariant, SessionConfig
from quantum.bases import BasisKind
from quantum.qmath import SeededRng


def within_stderr(observed: float, expected: float, stderr: float, k: float = 5.0) -> bool:
    """|observed - expected| <= k standard errors, with a floor for degenerate rates"""
    return abs(observed - expected) <= k * max(stderr, 1e-12) + 1e-12


def binomial_stderr(p: float, trials: int) -> float:
    return math.sqrt(p * (1.0 - p) / trials)


@pytest.fixture
def seed() -> int:
    return DEFAULT_SEED


@pytest.fixture
def rng(seed) -> SeededRng:
    return SeededRng(seed)


@pytest.fixture
def mub3_config(seed) -> SessionConfig:
    return SessionConfig(d=3, n=3, kind=BasisKind.MUB, rounds=2000, seed=seed)


@pytest.fixture
def modified3_config(seed) -> SessionConfig:
    return SessionConfig(d=3, n=3, kind=BasisKind.MUB, variant=ProtocolVariant.MODIFIED, rounds=100, seed=seed)
