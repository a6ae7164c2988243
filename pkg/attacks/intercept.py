"""
Intercept-resend attack on the three-party protocol.

Charlie* captures the Bob-Charlie pair after Alice has measured, guesses
Alice's basis, measures the pair in the correlated family of that guess and
resends the pair state matching his outcome.
"""
import logging
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from protocol.engine import sift
from protocol.models import DetectionStats, ProtocolVariant, RoundTranscript, SessionConfig
from protocol.parties import collect_announcements, roster
from quantum.bases import BasisKind, BasisSpec, basis_rows, family_rows
from quantum.errors import ProtocolError, StateError
from quantum.ghz import outcome_valid
from quantum.qmath import SeededRng, StateVector, born_measure, born_measure_rows, is_orthonormal, regroup, row_batches
from attacks.reports import AttackReport

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def pair_basis_rows(kind: BasisKind, d: int, P: int) -> np.ndarray:
    """Read-only rows sum_j conj(<j|A'_a'>) |jj>: the normalized pair states <A'_a'|GHZ_3>.

    The d rows are orthonormal and span the diagonal subspace {|jj>}.
    """
    rows = np.zeros((d, d * d), dtype=np.complex128)
    rows[:, np.arange(d) * (d + 1)] = basis_rows(kind, d, P).conj()
    if not is_orthonormal(rows):
        raise StateError(f"correlated pair rows for {BasisKind(kind).value} P={P} are not orthonormal")
    rows.setflags(write=False)
    return rows


def correlated_pair_basis(spec: BasisSpec) -> np.ndarray:
    return pair_basis_rows(spec.kind, spec.d, spec.P)


@lru_cache(maxsize=None)
def pair_family_rows(kind: BasisKind, d: int) -> np.ndarray:
    stack = np.stack([pair_basis_rows(kind, d, P) for P in range(d)])
    stack.setflags(write=False)
    return stack


class InterceptResendAdversary:
    name: str = "Charlie*"
    description: str = "Capture the travelling pair, measure it in a guessed correlated basis and resend"

    def __init__(self, config: SessionConfig):
        self.config = config

    def intercept(self, state: StateVector, rng: SeededRng) -> tuple[int, int, StateVector]:
        """Returns (guessed basis, observed label, state carrying the resent pair)"""
        d = self.config.d
        guess = rng.integers(d)
        pair_view = regroup(state, (d, d * d))
        observed, collapsed = born_measure(
            pair_view, 1, pair_basis_rows(self.config.kind, d, guess), rng, allow_incomplete=True, checked=True,
        )
        if observed == d:
            logger.warning("pair measurement landed in the off-diagonal complement")
        return guess, observed, regroup(collapsed, (d, d, d))


def _require_three_party_original(cfg: SessionConfig):
    if cfg.n != 3 or cfg.variant is not ProtocolVariant.ORIGINAL:
        raise ProtocolError("intercept-resend is modelled for three parties under the original protocol")


def _transcript(cfg: SessionConfig, round_index: int, bases: tuple[int, ...], outcomes: tuple[int, ...],
                announced: tuple[int, ...], valid: bool, guess: int, observed: int) -> RoundTranscript:
    return RoundTranscript(
        round=round_index,
        d=cfg.d,
        bases=bases,
        outcomes=outcomes,
        announced=announced,
        valid=valid,
        adversary={"attack": "intercept", "guess": guess, "guess_correct": guess == bases[0], "observed": observed},
    )


def intercept_resend_round(cfg: SessionConfig, rng: SeededRng, round_index: int = 0) -> RoundTranscript:
    _require_three_party_original(cfg)
    dealer, participants = roster(cfg)
    adversary = InterceptResendAdversary(cfg)

    A = dealer.choose_basis(rng)
    a, state = dealer.measure(dealer.prepare(), A, rng)
    guess, observed, state = adversary.intercept(state, rng)

    bases = [A]
    outcomes = [a]
    for participant in participants:
        label = participant.choose_basis(rng)
        outcome, state = participant.measure(state, label, rng)
        bases.append(label)
        outcomes.append(outcome)
    announced = collect_announcements(cfg, participants, bases[1:])
    return _transcript(cfg, round_index, tuple(bases), tuple(outcomes), announced, dealer.judge(A, announced), guess, observed)


def intercept_resend_session(cfg: SessionConfig, rng: SeededRng, rounds: Optional[int] = None) -> list[RoundTranscript]:
    """Rounds measured batch by batch.

    Round r draws from ``rng.stream_for(r)`` in the order intercept_resend_round
    uses, so both produce the same transcripts.
    """
    _require_three_party_original(cfg)
    rounds = cfg.rounds if rounds is None else rounds
    dealer, participants = roster(cfg)
    d = cfg.d
    ghz = dealer.prepare()
    family = family_rows(cfg.kind, d)
    pair_family = pair_family_rows(cfg.kind, d)

    transcripts = []
    for batch in row_batches(rounds, ghz.amps.size):
        # per round: (A, Alice's draw), (guess, pair draw), (B, Bob's draw), (C, Charlie's draw)
        labels = np.empty((len(batch), 4), dtype=np.int64)
        uniforms = np.empty((len(batch), 4))
        for row, r in enumerate(batch):
            round_rng = rng.stream_for(r)
            for step in range(4):
                labels[row, step] = round_rng.integers(d)
                uniforms[row, step] = round_rng.uniform()

        state = np.broadcast_to(ghz.amps, (len(batch), ghz.amps.size))
        a, state = born_measure_rows(state, ghz.dims, 0, family[labels[:, 0]], uniforms[:, 0])
        observed, state = born_measure_rows(
            state, (d, d * d), 1, pair_family[labels[:, 1]], uniforms[:, 1], allow_incomplete=True,
        )
        if np.any(observed == d):
            logger.warning("pair measurement landed in the off-diagonal complement in %d rounds", int(np.sum(observed == d)))
        b, state = born_measure_rows(state, ghz.dims, 1, family[labels[:, 2]], uniforms[:, 2])
        c, _ = born_measure_rows(state, ghz.dims, 2, family[labels[:, 3]], uniforms[:, 3])

        for row, r in enumerate(batch):
            A, guess, B, C = labels[row].tolist()
            announced = collect_announcements(cfg, participants, (B, C))
            transcripts.append(_transcript(
                cfg, r, (A, B, C), (int(a[row]), int(b[row]), int(c[row])), announced,
                dealer.judge(A, announced), guess, int(observed[row]),
            ))
    return transcripts


def check_all(sifted: Sequence[RoundTranscript]) -> DetectionStats:
    """Outcome check on every sifted round"""
    return DetectionStats(
        sifted_rounds=len(sifted),
        test_rounds=len(sifted),
        mismatches=sum(1 for t in sifted if not outcome_valid(t.outcomes, t.d)),
    )


def simulate_intercept_resend(cfg: SessionConfig, rounds: Optional[int] = None, rng: Optional[SeededRng] = None) -> DetectionStats:
    """Monte Carlo detection rate with every sifted round checked"""
    rng = rng or cfg.rng()
    return check_all(sift(intercept_resend_session(cfg, rng, rounds)))


def intercept_resend_report(cfg: SessionConfig, transcripts: Sequence[RoundTranscript]) -> AttackReport:
    sifted = sift(transcripts)
    correct = [t for t in sifted if t.adversary["guess_correct"]]
    wrong = [t for t in sifted if not t.adversary["guess_correct"]]
    return AttackReport(
        attack="intercept",
        variant=cfg.variant,
        d=cfg.d,
        kind=cfg.kind,
        rounds=len(transcripts),
        valid_rounds=len(sifted),
        recovered=sum(1 for t in sifted if t.adversary["observed"] == t.outcomes[0]),
        detection=check_all(sifted),
        correct_guess_detection=check_all(correct),
        wrong_guess_detection=check_all(wrong),
    )
