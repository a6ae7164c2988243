"""
Secret-sharing protocol engine.

Original protocol: every party measures its GHZ register in a random basis,
the non-dealers announce their bases and the dealer keeps the round only if
the bases sum to 0 mod d. Modified protocol: bases are never announced; the
first round uses bases handed out by a trusted QKD setup and every later
round reuses each party's previous outcome as its basis label.
"""
import logging
from typing import Optional, Sequence

import numpy as np

from protocol.models import (
    DetectionStats, KeyRecord, ProtocolVariant, RoundTranscript, SessionConfig, SessionResult,
)
from protocol.parties import collect_announcements, roster
from quantum.bases import BasisSpec, family_rows
from quantum.errors import ProtocolError
from quantum.ghz import outcome_valid
from quantum.qmath import SeededRng, born_measure_rows, row_batches
from utils.console import show_agent_working

logger = logging.getLogger(__name__)

# Stream ids reserved for session-level draws; round streams use the round index
TEST_STREAM = 0xFFFF_FFFF
BOOTSTRAP_STREAM = 0xFFFF_FFFE


def _require_variant(cfg: SessionConfig, variant: ProtocolVariant):
    if cfg.variant is not variant:
        raise ProtocolError(f"operation needs the {variant.value} variant, config has {cfg.variant.value}")


def run_round_original(cfg: SessionConfig, rng: SeededRng, round_index: int = 0) -> RoundTranscript:
    """One round of the announce-bases protocol"""
    _require_variant(cfg, ProtocolVariant.ORIGINAL)
    dealer, participants = roster(cfg)
    parties = [dealer, *participants]
    state = dealer.prepare()
    bases = [party.choose_basis(rng) for party in parties]
    outcomes = []
    for party, basis in zip(parties, bases):
        outcome, state = party.measure(state, basis, rng)
        outcomes.append(outcome)
    announced = collect_announcements(cfg, participants, bases[1:])
    return RoundTranscript(
        round=round_index,
        d=cfg.d,
        bases=tuple(bases),
        outcomes=tuple(outcomes),
        announced=announced,
        valid=dealer.judge(bases[0], announced),
    )


def run_session_original(cfg: SessionConfig, rng: SeededRng) -> list[RoundTranscript]:
    """All rounds of the announce-bases protocol, measured batch by batch.

    Round r draws from ``rng.stream_for(r)`` in the order run_round_original
    uses (every basis, then one uniform per measurement), so the transcripts
    match it round for round.
    """
    _require_variant(cfg, ProtocolVariant.ORIGINAL)
    dealer, participants = roster(cfg)
    parties = [dealer, *participants]
    ghz = dealer.prepare()
    family = family_rows(cfg.kind, cfg.d)
    transcripts = []
    for batch in row_batches(cfg.rounds, ghz.amps.size):
        bases = np.empty((len(batch), cfg.n), dtype=np.int64)
        uniforms = np.empty((len(batch), cfg.n))
        for row, r in enumerate(batch):
            round_rng = rng.stream_for(r)
            bases[row] = [party.choose_basis(round_rng) for party in parties]
            uniforms[row] = [round_rng.uniform() for _ in parties]
        state = np.broadcast_to(ghz.amps, (len(batch), ghz.amps.size))
        outcomes = np.empty_like(bases)
        for party in parties:
            column = party.index
            outcomes[:, column], state = born_measure_rows(state, ghz.dims, column, family[bases[:, column]], uniforms[:, column])
        for row, r in enumerate(batch):
            round_bases = tuple(bases[row].tolist())
            announced = collect_announcements(cfg, participants, round_bases[1:])
            transcripts.append(RoundTranscript(
                round=r,
                d=cfg.d,
                bases=round_bases,
                outcomes=tuple(outcomes[row].tolist()),
                announced=announced,
                valid=dealer.judge(round_bases[0], announced),
            ))
    return transcripts


def sift(transcripts: Sequence[RoundTranscript]) -> list[RoundTranscript]:
    """Valid rounds in their original order"""
    return [t for t in transcripts if t.valid]


def designate_test_rounds(sifted: Sequence[RoundTranscript], test_fraction: float, rng: SeededRng) -> list[RoundTranscript]:
    """Mark round(test_fraction * len) sifted rounds as tests and evaluate the outcome check on them"""
    if not sifted:
        raise ProtocolError("no sifted rounds to test")
    if not 0.0 < test_fraction < 1.0:
        raise ProtocolError(f"test fraction must lie strictly between 0 and 1, got {test_fraction}")
    total = len(sifted)
    count = max(1, round(test_fraction * total))
    # partial Fisher-Yates over round positions
    order = list(range(total))
    for i in range(count):
        j = i + rng.integers(total - i)
        order[i], order[j] = order[j], order[i]
    chosen = set(order[:count])

    marked = []
    for position, transcript in enumerate(sifted):
        if position in chosen:
            passed = outcome_valid(transcript.outcomes, transcript.d)
            transcript = transcript.model_copy(update={"test": True, "check_passed": passed})
        marked.append(transcript)
    return marked


def detection_stats(marked: Sequence[RoundTranscript]) -> DetectionStats:
    tests = [t for t in marked if t.test]
    return DetectionStats(
        sifted_rounds=len(marked),
        test_rounds=len(tests),
        mismatches=sum(1 for t in tests if t.check_passed is False),
    )


def eavesdrop_test(sifted: Sequence[RoundTranscript], test_fraction: float, rng: SeededRng) -> DetectionStats:
    """Reveal outcomes on a random share of sifted rounds and count outcome-condition failures"""
    return detection_stats(designate_test_rounds(sifted, test_fraction, rng))


def build_key_record(marked: Sequence[RoundTranscript]) -> KeyRecord:
    kept = [t for t in marked if t.valid and not t.test]
    if not kept:
        return KeyRecord()
    parties = len(kept[0].outcomes)
    return KeyRecord(
        rounds=[t.round for t in kept],
        party_outcomes=[[t.outcomes[i] for t in kept] for i in range(parties)],
    )


def reconstruct_secret(record: KeyRecord, d: int) -> list[int]:
    """Non-dealers pool their outcomes: a = -(b + c + ... + omega) mod d per round"""
    shares = record.party_outcomes[1:]
    if not shares or any(len(share) != len(record.rounds) for share in shares):
        raise ProtocolError("reconstruction needs every non-dealer outcome on every key round")
    return [(-sum(column)) % d for column in zip(*shares)]


def reconstruction_accuracy(record: KeyRecord, d: int) -> float:
    if not record.rounds:
        return 1.0
    estimate = reconstruct_secret(record, d)
    return sum(1 for guess, actual in zip(estimate, record.dealer_key) if guess == actual) / len(estimate)


def qkd_bootstrap(cfg: SessionConfig, rng: Optional[SeededRng] = None) -> list[BasisSpec]:
    """Initial valid basis tuple, delivered to each party over a trusted QKD link.

    The QKD layer is an oracle: adversaries never see these labels.
    """
    _require_variant(cfg, ProtocolVariant.MODIFIED)
    rng = rng or SeededRng(cfg.seed, BOOTSTRAP_STREAM)
    others = [rng.integers(cfg.d) for _ in range(cfg.n - 1)]
    return [cfg.basis(label) for label in [(-sum(others)) % cfg.d, *others]]


def run_session_modified(cfg: SessionConfig, rng: SeededRng) -> list[RoundTranscript]:
    """Basis-chained session: round r+1 measures in the labels observed in round r"""
    _require_variant(cfg, ProtocolVariant.MODIFIED)
    dealer, participants = roster(cfg)
    parties = [dealer, *participants]
    bases = [spec.P for spec in qkd_bootstrap(cfg, rng.stream_for(BOOTSTRAP_STREAM))]
    transcripts = []
    for r in range(cfg.rounds):
        round_rng = rng.stream_for(r)
        state = dealer.prepare()
        outcomes = []
        for party, basis in zip(parties, bases):
            outcome, state = party.measure(state, basis, round_rng)
            outcomes.append(outcome)
        # no announcements, so every round is kept
        transcripts.append(RoundTranscript(round=r, d=cfg.d, bases=tuple(bases), outcomes=tuple(outcomes), valid=True))
        bases = outcomes
    return transcripts


class SessionOrchestrator:
    """Runs a session end to end: rounds, sifting, test designation and key assembly"""

    def __init__(self, config: SessionConfig, verbose: bool = False):
        self.config = config
        self.verbose = verbose

    def _report(self, agent_name: str, action: str):
        if self.verbose:
            show_agent_working(agent_name, action)

    def run_rounds(self, rng: SeededRng) -> list[RoundTranscript]:
        self._report("Dealer", f"running {self.config.rounds} {self.config.variant.value} rounds (d={self.config.d}, n={self.config.n})")
        if self.config.variant is ProtocolVariant.ORIGINAL:
            return run_session_original(self.config, rng)
        return run_session_modified(self.config, rng)

    def run(self) -> SessionResult:
        rng = self.config.rng()
        return self.finalize(self.run_rounds(rng), rng)

    def finalize(self, transcripts: Sequence[RoundTranscript], rng: SeededRng, attack: Optional[dict] = None) -> SessionResult:
        sifted = sift(transcripts)
        self._report("Dealer", f"kept {len(sifted)} of {len(transcripts)} rounds")
        marked = designate_test_rounds(sifted, self.config.test_fraction, rng.stream_for(TEST_STREAM)) if sifted else []
        by_round = {t.round: t for t in marked}
        transcripts = [by_round.get(t.round, t) for t in transcripts]
        stats = detection_stats(marked)
        key = build_key_record(marked)
        accuracy = reconstruction_accuracy(key, self.config.d)
        self._report("Participants", f"tested {stats.test_rounds} rounds, {stats.mismatches} mismatches, key length {len(key)}")
        if stats.mismatches:
            logger.warning("outcome check failed on %d of %d test rounds", stats.mismatches, stats.test_rounds)
        return SessionResult(
            config=self.config,
            transcripts=transcripts,
            stats=stats,
            key=key,
            reconstruction_accuracy=accuracy,
            attack=attack,
        )
