"""
Typed records for protocol sessions: configuration, round transcripts,
detection statistics and sifted keys
"""
import json
import math
from enum import Enum
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from config import DEFAULT_PARTIES, DEFAULT_ROUNDS, DEFAULT_SEED, DEFAULT_TEST_FRACTION, MAX_DENSE_AMPLITUDES
from quantum.bases import PROTOCOL_KINDS, BasisKind, BasisSpec, dimension_problem
from quantum.qmath import SeededRng


class ProtocolVariant(str, Enum):
    ORIGINAL = "original"
    MODIFIED = "modified"


class AnnouncementOrder(str, Enum):
    SIMULTANEOUS = "simultaneous"
    RUSHING = "rushing"


class SessionConfig(BaseModel):
    """Parameters of one protocol session"""
    model_config = ConfigDict(frozen=True)

    d: int = Field(..., ge=2, description="Register dimension")
    n: int = Field(default=DEFAULT_PARTIES, ge=2, description="Number of parties, dealer included")
    kind: BasisKind = Field(default=BasisKind.MUB, description="Basis family: mub or mbb")
    variant: ProtocolVariant = Field(default=ProtocolVariant.ORIGINAL, description="original or modified protocol")
    rounds: int = Field(default=DEFAULT_ROUNDS, ge=1, description="Rounds per session")
    test_fraction: float = Field(default=DEFAULT_TEST_FRACTION, gt=0.0, lt=1.0, description="Share of sifted rounds spent on the eavesdrop test")
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2 ** 64, description="Session seed")
    announcement_order: AnnouncementOrder = Field(default=AnnouncementOrder.SIMULTANEOUS, description="How non-dealer announcements are committed")

    @model_validator(mode="after")
    def _check_family(self):
        if self.kind not in PROTOCOL_KINDS:
            raise ValueError(f"protocol sessions use mub or mbb bases, not {self.kind.value}")
        reason = dimension_problem(self.d, self.kind)
        if reason is not None:
            raise ValueError(f"d={self.d} is not valid for {self.kind.value}: {reason}")
        if self.d ** self.n > MAX_DENSE_AMPLITUDES:
            raise ValueError(f"d^n = {self.d ** self.n} amplitudes exceed the dense limit")
        return self

    def rng(self) -> SeededRng:
        return SeededRng(self.seed)

    def basis(self, label: int) -> BasisSpec:
        return BasisSpec(kind=self.kind, d=self.d, P=label)


class RoundTranscript(BaseModel):
    """Full record of one round; immutable once emitted"""
    model_config = ConfigDict(frozen=True)

    round: int
    d: int
    bases: tuple[int, ...] = Field(..., description="Per-party basis labels, dealer first")
    outcomes: tuple[int, ...] = Field(..., description="Per-party outcome labels, dealer first")
    announced: tuple[int, ...] = Field(default=(), description="Publicly announced non-dealer bases")
    valid: bool = Field(..., description="Basis consistency condition held")
    test: bool = False
    check_passed: Optional[bool] = Field(default=None, description="Outcome consistency on valid test rounds")
    adversary: Optional[dict[str, Any]] = None

    @model_validator(mode="after")
    def _check_only_on_valid_tests(self):
        if self.check_passed is not None and not (self.test and self.valid):
            raise ValueError("the outcome check is only evaluated on valid test rounds")
        return self

    def public_view(self) -> dict:
        """What an outsider on the classical channel has seen for this round"""
        view = {"round": self.round, "announced": list(self.announced), "valid": self.valid, "test": self.test}
        if self.test:
            view["outcomes"] = list(self.outcomes)
        return view

    def to_json_line(self) -> str:
        record = self.model_dump(mode="json")
        if record["adversary"] is None:
            del record["adversary"]
        return json.dumps(record, ensure_ascii=False)


class DetectionStats(BaseModel):
    """Mismatch counts on test rounds with a binomial standard error"""
    sifted_rounds: int = 0
    test_rounds: int = 0
    mismatches: int = 0

    @computed_field
    @property
    def rate(self) -> float:
        return self.mismatches / self.test_rounds if self.test_rounds else 0.0

    @computed_field
    @property
    def stderr(self) -> float:
        if not self.test_rounds:
            return 0.0
        return math.sqrt(self.rate * (1.0 - self.rate) / self.test_rounds)

    def __add__(self, other: "DetectionStats") -> "DetectionStats":
        return DetectionStats(
            sifted_rounds=self.sifted_rounds + other.sifted_rounds,
            test_rounds=self.test_rounds + other.test_rounds,
            mismatches=self.mismatches + other.mismatches,
        )


class KeyRecord(BaseModel):
    """Per-party outcomes on the valid non-test rounds"""
    rounds: list[int] = Field(default_factory=list)
    party_outcomes: list[list[int]] = Field(default_factory=list, description="Party-major outcome sequences, dealer first")

    @property
    def dealer_key(self) -> list[int]:
        return self.party_outcomes[0] if self.party_outcomes else []

    def __len__(self) -> int:
        return len(self.rounds)


class SessionResult(BaseModel):
    config: SessionConfig
    transcripts: list[RoundTranscript]
    stats: DetectionStats
    key: KeyRecord
    reconstruction_accuracy: float
    attack: Optional[dict[str, Any]] = None

    @property
    def efficiency(self) -> float:
        return self.stats.sifted_rounds / len(self.transcripts) if self.transcripts else 0.0

    def summary(self) -> dict:
        summary = {
            "config": self.config.model_dump(mode="json"),
            "sifted_count": self.stats.sifted_rounds,
            "test_count": self.stats.test_rounds,
            "detection_rate": self.stats.rate,
            "stderr": self.stats.stderr,
            "key_length": len(self.key),
            "efficiency": self.efficiency,
            "reconstruction_accuracy": self.reconstruction_accuracy,
        }
        if self.attack is not None:
            summary["attack"] = self.attack
        return summary
