"""
Protocol parties. Each party holds one register of the distributed state and
acts only on its own register and on public announcements.
"""
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from config import PARTY_NAMES
from protocol.models import AnnouncementOrder, SessionConfig
from quantum.bases import basis_rows
from quantum.errors import LabelError
from quantum.ghz import GhzSpec, basis_valid, ghz_state
from quantum.qmath import SeededRng, StateVector, born_measure


@lru_cache(maxsize=32)
def shared_ghz(d: int, n: int) -> StateVector:
    return ghz_state(GhzSpec(d=d, n=n))


def party_name(index: int) -> str:
    return PARTY_NAMES[index] if index < len(PARTY_NAMES) else f"Party{index}"


class Party:
    """A participant measuring its own register in a chosen basis"""

    def __init__(self, index: int, config: SessionConfig):
        self.index = index
        self.name = party_name(index)
        self.config = config

    def choose_basis(self, rng: SeededRng) -> int:
        return rng.integers(self.config.d)

    def measure(self, state: StateVector, basis_label: int, rng: SeededRng, register: Optional[int] = None) -> tuple[int, StateVector]:
        register = self.index if register is None else register
        return born_measure(state, register, self.basis_matrix(basis_label), rng, checked=True)

    def basis_matrix(self, basis_label: int) -> np.ndarray:
        if not 0 <= basis_label < self.config.d:
            raise LabelError(f"basis label {basis_label} out of range for d={self.config.d}")
        return basis_rows(self.config.kind, self.config.d, basis_label)


class Dealer(Party):
    """Alice: prepares the GHZ state and judges announced bases"""

    def prepare(self) -> StateVector:
        return shared_ghz(self.config.d, self.config.n)

    def judge(self, own_basis: int, announced: Sequence[int]) -> bool:
        return basis_valid([own_basis, *announced], self.config.d)


class Participant(Party):
    """A non-dealer share holder"""

    def announce(self, basis_label: int, heard: Sequence[int] = ()) -> int:
        # honest participants ignore what they heard
        return basis_label


def roster(config: SessionConfig) -> tuple[Dealer, list[Participant]]:
    return Dealer(0, config), [Participant(i, config) for i in range(1, config.n)]


def collect_announcements(config: SessionConfig, participants: Sequence[Participant], bases: Sequence[int]) -> tuple[int, ...]:
    """Non-dealer announcements; under rushing order the last speaker hears the rest first"""
    if config.announcement_order is AnnouncementOrder.SIMULTANEOUS:
        return tuple(party.announce(P) for party, P in zip(participants, bases))
    announced = [party.announce(P) for party, P in zip(participants[:-1], bases[:-1])]
    announced.append(participants[-1].announce(bases[-1], heard=tuple(announced)))
    return tuple(announced)
