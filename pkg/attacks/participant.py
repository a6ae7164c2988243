"""
Entanglement-assisted participant's attack.

Charlie* distributes halves of two generalized EPR pairs instead of the GHZ
state: A is paired with his register C and B with his register E. Once the
public discussion reveals Alice's and Bob's bases, measuring C and E in the
conjugate bases hands him both outcomes. Under the basis-chained protocol the
bases are never announced and he is reduced to guessing.
"""
import logging
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from protocol.engine import BOOTSTRAP_STREAM, TEST_STREAM, detection_stats, designate_test_rounds, qkd_bootstrap, sift
from protocol.models import DetectionStats, ProtocolVariant, RoundTranscript, SessionConfig
from protocol.parties import Participant, collect_announcements, roster
from quantum.bases import BasisKind, BasisSpec, basis_rows
from quantum.errors import AttackUnavailable, DimensionError, ProtocolError
from quantum.qmath import (
    SeededRng, StateVector, apply_local_unitary, born_measure, controlled_shift, partial_inner, tensor, basis_state,
)
from attacks.reports import AttackReport

logger = logging.getLogger(__name__)

# register order of the attack state
A, B, C, E = range(4)


@lru_cache(maxsize=32)
def build_participant_attack_state(d: int) -> StateVector:
    """(1/d) sum_{j,k} |j>_A |k>_B |j>_C |k>_E"""
    if d < 2:
        raise DimensionError(d, "participant attack", "too small")
    amps = np.zeros((d, d, d, d), dtype=np.complex128)
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    amps[j, k, j, k] = 1.0 / d
    return StateVector(dims=(d, d, d, d), amps=amps)


def attack_circuit_state(d: int) -> StateVector:
    """Same state prepared by gates: Fourier on A and B, then shifts A->C and B->E"""
    if d < 2:
        raise DimensionError(d, "participant attack", "too small")
    fourier = np.asarray(basis_rows(BasisKind.FOURIER, d)).T
    state = tensor([basis_state(d, 0)] * 4)
    state = apply_local_unitary(state, A, fourier)
    state = apply_local_unitary(state, B, fourier)
    state = controlled_shift(state, A, C)
    return controlled_shift(state, B, E)


def expansion_error(d: int, a_basis: BasisSpec, b_basis: BasisSpec) -> float:
    """Largest deviation of <A_a|<B_b|Psi> from (1/d) conj(A_a) x conj(B_b) over all (a, b)"""
    state = build_participant_attack_state(d)
    a_rows, b_rows = a_basis.matrix(), b_basis.matrix()
    worst = 0.0
    for a in range(d):
        for b in range(d):
            residual = partial_inner([(A, a_basis.vector(a)), (B, b_basis.vector(b))], state)
            expected = np.kron(a_rows[a].conj(), b_rows[b].conj()) / d
            worst = max(worst, float(np.max(np.abs(residual.amps - expected))))
    return worst


def extract_participant(
    ce_state: StateVector,
    a_basis: Optional[BasisSpec],
    b_basis: Optional[BasisSpec],
    rng: SeededRng,
) -> tuple[int, int]:
    """Measure C in conj(A-basis) and E in conj(B-basis); returns Alice's and Bob's outcomes"""
    if a_basis is None or b_basis is None:
        raise AttackUnavailable("Alice's and Bob's bases are not public")
    a, ce_state = born_measure(ce_state, 0, a_basis.matrix().conj(), rng, checked=True)
    b, _ = born_measure(ce_state, 1, b_basis.matrix().conj(), rng, checked=True)
    return a, b


class ParticipantAdversary(Participant):
    """Charlie* in the last participant seat.

    His basis label and announcement are honest random choices: the attack
    reads Alice's and Bob's outcomes only after the whole public discussion,
    so it works under either announcement order.
    """
    description: str = "Hand out EPR halves, wait for the public bases, then read Alice's and Bob's outcomes"

    def __init__(self, config: SessionConfig):
        super().__init__(config.n - 1, config)
        self.name = "Charlie*"

    def prepare(self) -> StateVector:
        return build_participant_attack_state(self.config.d)

    def infer(self, state: StateVector, a_spec: BasisSpec, a: int, b_spec: BasisSpec, b: int,
              known: Optional[tuple[int, int]], rng: SeededRng) -> tuple[int, int]:
        """Alice's and Bob's outcomes as Charlie* reconstructs them.

        ``known`` carries the basis labels he learned publicly, or None.
        ``a`` and ``b`` only locate the residual of his own registers.
        """
        d = self.config.d
        ce_state = partial_inner([(A, a_spec.vector(a)), (B, b_spec.vector(b))], state).normalize()
        bases = (None, None) if known is None else tuple(self.config.basis(P) for P in known)
        try:
            return extract_participant(ce_state, bases[0], bases[1], rng)
        except AttackUnavailable:
            return rng.integers(d), rng.integers(d)


def _require_three_parties(cfg: SessionConfig):
    if cfg.n != 3:
        raise ProtocolError("the participant attack is modelled for three parties with Charlie* last")


def participant_round_original(cfg: SessionConfig, rng: SeededRng, round_index: int = 0) -> RoundTranscript:
    """Charlie* picks and announces a random label, then fakes his outcome from the extracted values"""
    _require_three_parties(cfg)
    dealer, participants = roster(cfg)
    bob = participants[0]
    adversary = ParticipantAdversary(cfg)
    d = cfg.d

    state = adversary.prepare()
    A_label = dealer.choose_basis(rng)
    B_label = bob.choose_basis(rng)
    a, state = dealer.measure(state, A_label, rng)
    b, state = bob.measure(state, B_label, rng)
    C_label = adversary.choose_basis(rng)
    announced = collect_announcements(cfg, [bob, adversary], (B_label, C_label))
    valid = dealer.judge(A_label, announced)

    annotation = {"attack": "participant", "extracted": valid}
    if valid:
        inferred_A = (-sum(announced)) % d
        a_hat, b_hat = adversary.infer(state, cfg.basis(A_label), a, cfg.basis(B_label), b, (inferred_A, announced[0]), rng)
        c = (-(a_hat + b_hat)) % d
        annotation.update({"inferred_dealer_basis": inferred_A, "inferred": [a_hat, b_hat]})
    else:
        c = rng.integers(d)
    return RoundTranscript(
        round=round_index,
        d=d,
        bases=(A_label, B_label, C_label),
        outcomes=(a, b, c),
        announced=announced,
        valid=valid,
        adversary=annotation,
    )


def participant_session_original(cfg: SessionConfig, rng: SeededRng, rounds: Optional[int] = None) -> list[RoundTranscript]:
    if cfg.variant is not ProtocolVariant.ORIGINAL:
        raise ProtocolError("participant_session_original needs the original variant")
    rounds = cfg.rounds if rounds is None else rounds
    logger.debug("participant attack over %d rounds with %s announcements", rounds, cfg.announcement_order.value)
    return [participant_round_original(cfg, rng.stream_for(r), r) for r in range(rounds)]


def participant_session_modified(cfg: SessionConfig, rng: SeededRng, rounds: Optional[int] = None) -> list[RoundTranscript]:
    """Basis-chained session with Charlie* distributing EPR halves every round"""
    _require_three_parties(cfg)
    dealer, participants = roster(cfg)
    bob = participants[0]
    adversary = ParticipantAdversary(cfg)
    d = cfg.d
    rounds = cfg.rounds if rounds is None else rounds

    bases = [spec.P for spec in qkd_bootstrap(cfg, rng.stream_for(BOOTSTRAP_STREAM))]
    transcripts = []
    for r in range(rounds):
        round_rng = rng.stream_for(r)
        state = adversary.prepare()
        a, state = dealer.measure(state, bases[0], round_rng)
        b, state = bob.measure(state, bases[1], round_rng)
        a_hat, b_hat = adversary.infer(state, cfg.basis(bases[0]), a, cfg.basis(bases[1]), b, None, round_rng)
        c = (-(a_hat + b_hat)) % d
        transcripts.append(RoundTranscript(
            round=r,
            d=d,
            bases=tuple(bases),
            outcomes=(a, b, c),
            valid=True,
            adversary={"attack": "participant", "extracted": False, "inferred": [a_hat, b_hat]},
        ))
        bases = [a, b, c]
    return transcripts


def participant_session(cfg: SessionConfig, rng: SeededRng, rounds: Optional[int] = None) -> list[RoundTranscript]:
    if cfg.variant is ProtocolVariant.ORIGINAL:
        return participant_session_original(cfg, rng, rounds)
    return participant_session_modified(cfg, rng, rounds)


def participant_report(cfg: SessionConfig, transcripts: Sequence[RoundTranscript], detection: DetectionStats) -> AttackReport:
    sifted = sift(transcripts)
    return AttackReport(
        attack="participant",
        variant=cfg.variant,
        d=cfg.d,
        kind=cfg.kind,
        rounds=len(transcripts),
        valid_rounds=len(sifted),
        recovered=sum(1 for t in sifted if "inferred" in t.adversary and t.adversary["inferred"][0] == t.outcomes[0]),
        detection=detection,
    )


def simulate_participant_attack(cfg: SessionConfig, rounds: Optional[int] = None, rng: Optional[SeededRng] = None) -> AttackReport:
    """Run the attack and the eavesdrop test on the resulting session"""
    _require_three_parties(cfg)
    rng = rng or cfg.rng()
    transcripts = participant_session(cfg, rng, rounds)
    sifted = sift(transcripts)
    detection = detection_stats(designate_test_rounds(sifted, cfg.test_fraction, rng.stream_for(TEST_STREAM))) if sifted else DetectionStats()
    return participant_report(cfg, transcripts, detection)
