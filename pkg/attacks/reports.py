"""
Result records for adversary simulations and audits
"""
import math
from typing import Optional

from pydantic import BaseModel, Field, computed_field

from protocol.models import DetectionStats, ProtocolVariant
from quantum.bases import BasisKind
from quantum.ghz import UniquenessReport


class AttackReport(BaseModel):
    """Key recovery and detection outcome of one simulated attack"""
    attack: str = Field(..., description="intercept or participant")
    variant: ProtocolVariant
    d: int
    kind: BasisKind
    rounds: int
    valid_rounds: int = Field(..., description="Rounds that passed the basis condition")
    recovered: int = Field(..., description="Valid rounds where the adversary's dealer outcome was right")
    detection: DetectionStats
    correct_guess_detection: Optional[DetectionStats] = Field(default=None, description="Intercept rounds where the basis guess was right")
    wrong_guess_detection: Optional[DetectionStats] = Field(default=None, description="Intercept rounds where the basis guess was wrong")

    @computed_field
    @property
    def recovery_rate(self) -> float:
        return self.recovered / self.valid_rounds if self.valid_rounds else 0.0

    @computed_field
    @property
    def recovery_stderr(self) -> float:
        if not self.valid_rounds:
            return 0.0
        return math.sqrt(self.recovery_rate * (1.0 - self.recovery_rate) / self.valid_rounds)

    def summary(self) -> dict:
        summary = {
            "kind": self.attack,
            "recovery": self.recovery_rate,
            "recovery_stderr": self.recovery_stderr,
            "valid_rounds": self.valid_rounds,
            "detection_rate": self.detection.rate,
            "detection_stderr": self.detection.stderr,
        }
        if self.correct_guess_detection is not None:
            summary["correct_guess_detection_rate"] = self.correct_guess_detection.rate
        if self.wrong_guess_detection is not None:
            summary["wrong_guess_detection_rate"] = self.wrong_guess_detection.rate
        return summary


class FakeKeyAudit(BaseModel):
    """Search for states other than GHZ that pass every consistency check"""
    d: int
    n: int
    kind: BasisKind
    candidates: int = Field(..., description="V-perp basis vectors examined")
    basis_tuples: int = Field(..., description="Valid basis tuples used as checks")
    undetectable_dimension: int = Field(..., description="Dimension of the subspace passing every check with certainty")
    ghz_fidelity: float = Field(..., description="Fidelity of that subspace's vector with GHZ when it is one-dimensional")
    min_violation_probability: float = Field(..., description="Smallest per-check failure probability of any V-perp vector")
    survivors: list[int] = Field(default_factory=list, description="V-perp vectors that never fail a check")
    uniqueness: UniquenessReport

    @computed_field
    @property
    def passed(self) -> bool:
        # the undetectable subspace is reported, not gated: degenerate families such as d=2 MBB enlarge it
        return not self.survivors and self.uniqueness.passed
