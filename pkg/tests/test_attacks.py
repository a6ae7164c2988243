"""
Tests for the adversary models: closed forms, Monte Carlo agreement and audits
"""
import logging
from itertools import product

import numpy as np
import pytest
import sympy
from scipy.stats import chisquare

from conftest import within_stderr
from attacks import (
    analytic_detection_rate, attack_circuit_state, benchmark_dimensions, benchmark_rows, exact_weighted_error_sum,
    build_participant_attack_state, weighted_error_sum, extract_participant, intercept_resend_report,
    intercept_resend_session, outsider_probe_audit, participant_session, simulate_intercept_resend,
    simulate_participant_attack, weighted_error_term, BENCHMARK_COLUMNS,
)
from attacks.benchmark import closed_form_note
from attacks.intercept import correlated_pair_basis, intercept_resend_round
from attacks.participant import expansion_error
from protocol import AnnouncementOrder, ProtocolVariant, SessionConfig
from quantum.bases import BasisKind, BasisSpec
from quantum.errors import AttackUnavailable, DimensionError, EnumerationError, LabelError, ProtocolError
from quantum.qmath import SeededRng, is_orthonormal, partial_inner, schmidt_coefficients

ODD_PRIMES = [d for d in range(3, 32) if sympy.isprime(d)]


class TestAnalyticRates:
    @pytest.mark.parametrize("d, kind, expected", [
        (3, BasisKind.MUB, sympy.Rational(4, 9)),
        (3, BasisKind.MBB, sympy.Rational(4, 9)),
        (4, BasisKind.MBB, sympy.Rational(15, 32)),
        (2, BasisKind.MBB, sympy.Rational(1, 4)),
        (7, BasisKind.MUB, sympy.Rational(36, 49)),
    ])
    def test_closed_forms(self, d, kind, expected):
        assert analytic_detection_rate(d, kind) == expected

    def test_invalid_pairs(self):
        with pytest.raises(DimensionError):
            analytic_detection_rate(4, BasisKind.MUB)
        with pytest.raises(LabelError):
            analytic_detection_rate(3, BasisKind.FOURIER)

    def test_mub_rate_strictly_increasing_over_odd_primes(self):
        rates = [analytic_detection_rate(d, BasisKind.MUB) for d in ODD_PRIMES]
        assert all(a < b for a, b in zip(rates, rates[1:]))

    def test_mub_rate_approaches_one(self):
        assert float(analytic_detection_rate(211, BasisKind.MUB)) > 0.99
        assert all(float(analytic_detection_rate(d, BasisKind.MUB)) > 0.99 for d in (223, 227, 1009))
        assert float(analytic_detection_rate(197, BasisKind.MUB)) < 0.99

    def test_mbb_rate_peaks_at_four(self):
        rates = {d: analytic_detection_rate(d, BasisKind.MBB) for d in range(2, 65)}
        assert max(rates, key=rates.get) == 4
        assert all(rates[d] > rates[d + 1] for d in range(4, 64))


class TestWeightedErrorSum:
    def test_mub_term_for_any_wrong_guess(self):
        d = 5
        for A, a, A_guess, a_guess in product(range(d), repeat=4):
            if A == A_guess:
                continue
            assert weighted_error_term(d, BasisKind.MUB, A, a, A_guess, a_guess) == pytest.approx((1 / d) * (1 - 1 / d))

    def test_same_vector_contributes_nothing(self):
        assert weighted_error_term(4, BasisKind.MBB, 2, 1, 2, 1) == pytest.approx(0.0, abs=1e-12)

    def test_labels_checked(self):
        with pytest.raises(LabelError):
            weighted_error_term(3, BasisKind.MUB, 0, 0, 3, 0)

    @pytest.mark.parametrize("d", ODD_PRIMES)
    def test_sum_reproduces_mub_closed_form(self, d):
        value, exact = weighted_error_sum(d, BasisKind.MUB)
        assert isinstance(exact, sympy.Rational)
        assert exact == analytic_detection_rate(d, BasisKind.MUB)
        assert value == pytest.approx(float(exact), abs=1e-12)

    @pytest.mark.parametrize("d", range(3, 65))
    def test_sum_reproduces_mbb_closed_form(self, d):
        value, exact = weighted_error_sum(d, BasisKind.MBB)
        assert isinstance(exact, sympy.Rational)
        assert exact == analytic_detection_rate(d, BasisKind.MBB)
        assert value == pytest.approx(float(exact), abs=1e-12)

    @pytest.mark.parametrize("d, cosines", [
        (4, [0, -1, 0]),
        (6, [sympy.Rational(1, 2), sympy.Rational(-1, 2), -1, sympy.Rational(-1, 2), sympy.Rational(1, 2)]),
    ])
    def test_exact_mbb_sum_matches_rational_cosines(self, d, cosines):
        # |<A_a|A'_a'>|^2 is 1 - 2(1-c)(d-1)/d^2 for a' = a and 2(1-c)/d^2 otherwise
        total = sympy.Integer(0)
        for c in cosines:
            same = 1 - 2 * (1 - c) * (d - 1) * sympy.Rational(1, d * d)
            other = 2 * (1 - c) * sympy.Rational(1, d * d)
            total += same * (1 - same) + (d - 1) * other * (1 - other)
        assert exact_weighted_error_sum(d, BasisKind.MBB) == total / d

    def test_d2_mbb_family_is_degenerate(self):
        # the two d=2 MBB bases are relabelings of each other, so wrong guesses never disturb
        value, exact = weighted_error_sum(2, BasisKind.MBB)
        assert exact == 0
        assert exact != analytic_detection_rate(2, BasisKind.MBB)
        assert value == pytest.approx(0.0, abs=1e-12)


class TestInterceptResend:
    def test_pair_basis_is_orthonormal(self):
        for kind, d in ((BasisKind.MUB, 5), (BasisKind.MBB, 4)):
            for P in range(d):
                rows = correlated_pair_basis(BasisSpec(kind=kind, d=d, P=P))
                assert rows.shape == (d, d * d)
                assert is_orthonormal(rows)

    @pytest.mark.slow
    @pytest.mark.parametrize("d, kind", [(3, BasisKind.MUB), (5, BasisKind.MUB), (4, BasisKind.MBB)])
    def test_monte_carlo_matches_closed_form(self, d, kind, seed):
        cfg = SessionConfig(d=d, kind=kind, seed=seed)
        stats = simulate_intercept_resend(cfg, 100_000, SeededRng(seed, d))
        expected = float(analytic_detection_rate(d, kind))
        assert stats.test_rounds == stats.sifted_rounds
        assert within_stderr(stats.rate, expected, stats.stderr)

    @pytest.mark.slow
    def test_d2_mbb_converges_to_weighted_sum(self, seed):
        cfg = SessionConfig(d=2, kind=BasisKind.MBB, seed=seed)
        stats = simulate_intercept_resend(cfg, 100_000, SeededRng(seed, 2))
        assert stats.sifted_rounds > 0
        assert stats.rate == pytest.approx(weighted_error_sum(2, BasisKind.MBB)[0], abs=1e-12)

    @pytest.mark.parametrize("d, kind", [(3, BasisKind.MUB), (4, BasisKind.MBB)])
    def test_session_matches_round_by_round_execution(self, d, kind, seed):
        cfg = SessionConfig(d=d, kind=kind, rounds=300, seed=seed)
        rng = cfg.rng()
        session = intercept_resend_session(cfg, rng)
        rounds = [intercept_resend_round(cfg, rng.stream_for(r), r) for r in range(cfg.rounds)]
        assert [t.to_json_line() for t in session] == [t.to_json_line() for t in rounds]

    def test_correct_guess_is_never_detected(self, seed):
        cfg = SessionConfig(d=3, rounds=3000, seed=seed)
        transcripts = intercept_resend_session(cfg, cfg.rng())
        report = intercept_resend_report(cfg, transcripts)
        assert report.correct_guess_detection.test_rounds > 0
        assert report.correct_guess_detection.mismatches == 0
        assert report.wrong_guess_detection.rate > 0.5
        for t in transcripts:
            if t.adversary["guess_correct"]:
                assert t.adversary["observed"] == t.outcomes[0]

    def test_session_is_deterministic(self, seed):
        cfg = SessionConfig(d=3, rounds=200, seed=seed)
        first = intercept_resend_session(cfg, cfg.rng())
        second = intercept_resend_session(cfg, cfg.rng())
        assert [t.to_json_line() for t in first] == [t.to_json_line() for t in second]

    def test_needs_three_party_original(self, seed):
        with pytest.raises(ProtocolError):
            simulate_intercept_resend(SessionConfig(d=3, n=4, seed=seed), 10)
        with pytest.raises(ProtocolError):
            simulate_intercept_resend(SessionConfig(d=3, variant=ProtocolVariant.MODIFIED, seed=seed), 10)


class TestOutsiderAudit:
    @pytest.mark.parametrize("d, n, kind", [(3, 3, BasisKind.MUB), (5, 3, BasisKind.MUB), (3, 4, BasisKind.MUB)])
    def test_ghz_is_the_only_undetectable_state(self, d, n, kind):
        audit = outsider_probe_audit(d, n, kind)
        assert audit.passed
        assert audit.survivors == []
        assert audit.candidates == d ** n - 1
        assert audit.basis_tuples == d ** (n - 1)
        assert audit.undetectable_dimension == 1
        assert audit.ghz_fidelity == pytest.approx(1.0, abs=1e-9)
        assert audit.min_violation_probability >= (d - 1) / d - 1e-9

    def test_d2_mbb_has_no_fake_key_basis_vector(self):
        audit = outsider_probe_audit(2, 3, BasisKind.MBB)
        assert audit.passed
        assert audit.survivors == []
        assert audit.min_violation_probability == pytest.approx(0.5, abs=1e-9)
        # the degenerate family checks a single Fourier parity, which a 4-dim subspace satisfies
        assert audit.undetectable_dimension == 4

    def test_size_limit(self):
        with pytest.raises(EnumerationError):
            outsider_probe_audit(5, 5, BasisKind.MUB)


class TestParticipantAttackState:
    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_schmidt_coefficients_are_flat(self, d):
        state = build_participant_attack_state(d)
        assert state.dims == (d, d, d, d)
        coefficients = schmidt_coefficients(state, 2)
        np.testing.assert_allclose(coefficients, np.full(d * d, 1 / d), atol=1e-9)

    def test_d2_is_two_bell_pairs(self):
        state = build_participant_attack_state(2)
        support = sorted(np.flatnonzero(np.abs(state.amps) > 1e-12).tolist())
        # |j k j k> with index 8j + 4k + 2j + k
        assert support == [0, 5, 10, 15]
        np.testing.assert_allclose(state.amps[support], 0.5)

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_circuit_matches_direct_construction(self, d):
        np.testing.assert_allclose(attack_circuit_state(d).amps, build_participant_attack_state(d).amps, atol=1e-12)

    @pytest.mark.parametrize("kind, d", [(BasisKind.MUB, 3), (BasisKind.MBB, 4)])
    def test_expansion_holds_for_every_basis_pair(self, kind, d):
        for P, Q in product(range(d), repeat=2):
            assert expansion_error(d, BasisSpec(kind=kind, d=d, P=P), BasisSpec(kind=kind, d=d, P=Q)) <= 1e-12

    def test_extraction_is_certain(self, rng):
        d = 3
        a_spec = BasisSpec(kind=BasisKind.MUB, d=d, P=1)
        state = build_participant_attack_state(d)
        for b_label, b in product(range(d), repeat=2):
            b_spec = BasisSpec(kind=BasisKind.MUB, d=d, P=b_label)
            ce = partial_inner([(0, a_spec.vector(2)), (1, b_spec.vector(b))], state).normalize()
            for r in range(5):
                assert extract_participant(ce, a_spec, b_spec, rng.stream_for(r)) == (2, b)

    def test_extraction_needs_public_bases(self, rng):
        state = build_participant_attack_state(3)
        a_spec = BasisSpec(kind=BasisKind.MUB, d=3, P=0)
        ce = partial_inner([(0, a_spec.vector(0)), (1, a_spec.vector(0))], state).normalize()
        with pytest.raises(AttackUnavailable):
            extract_participant(ce, None, a_spec, rng)


class TestParticipantAttack:
    def test_original_variant_is_broken(self, seed):
        cfg = SessionConfig(d=3, rounds=10000, seed=seed)
        report = simulate_participant_attack(cfg)
        assert report.valid_rounds > 0
        assert report.recovery_rate == 1.0
        assert report.detection.test_rounds > 0
        assert report.detection.rate == 0.0

    def test_dealer_and_bob_marginals_look_honest(self, seed):
        cfg = SessionConfig(d=3, rounds=6000, seed=seed)
        transcripts = participant_session(cfg, cfg.rng())
        for party in (0, 1):
            counts = np.bincount([t.outcomes[party] for t in transcripts], minlength=3)
            assert chisquare(counts).pvalue > 0.001

    @pytest.mark.parametrize("d, kind", [(2, BasisKind.MBB), (3, BasisKind.MUB)])
    def test_modified_variant_reduces_to_guessing(self, d, kind, seed):
        cfg = SessionConfig(d=d, kind=kind, variant=ProtocolVariant.MODIFIED, rounds=10000, seed=seed)
        report = simulate_participant_attack(cfg)
        assert report.valid_rounds == 10000
        assert within_stderr(report.recovery_rate, 1 / d, report.recovery_stderr)
        assert within_stderr(report.detection.rate, (d - 1) / d, report.detection.stderr)

    def test_announcement_order_does_not_matter(self, seed):
        simultaneous = SessionConfig(d=3, rounds=1500, seed=seed)
        rushing = simultaneous.model_copy(update={"announcement_order": AnnouncementOrder.RUSHING})
        first = participant_session(simultaneous, simultaneous.rng())
        second = participant_session(rushing, rushing.rng())
        assert [t.to_json_line() for t in first] == [t.to_json_line() for t in second]
        assert simulate_participant_attack(rushing).recovery_rate == 1.0

    def test_needs_three_parties(self, seed):
        with pytest.raises(ProtocolError):
            simulate_participant_attack(SessionConfig(d=3, n=4, rounds=10, seed=seed))


class TestBenchmark:
    def test_dimensions(self):
        assert benchmark_dimensions(BasisKind.MUB, 3, 13) == [3, 5, 7, 11, 13]
        assert benchmark_dimensions(BasisKind.MBB, 2, 5) == [2, 3, 4, 5]

    def test_rows(self, seed):
        rows = benchmark_rows(BasisKind.MBB, [3, 4], 600, seed)
        assert [list(row) for row in rows] == [BENCHMARK_COLUMNS] * 2
        assert (rows[1]["analytic_rate_num"], rows[1]["analytic_rate_den"]) == (15, 32)
        assert rows[1]["analytic_rate"] == pytest.approx(15 / 32)
        assert benchmark_rows(BasisKind.MBB, [4], 600, seed) == rows[1:]

    def test_degenerate_row_carries_a_note(self, seed, caplog):
        caplog.set_level(logging.WARNING, logger="attacks.benchmark")
        rows = benchmark_rows(BasisKind.MBB, [2, 4], 200, seed)
        assert rows[0]["note"].startswith("closed form does not apply")
        assert rows[0]["simulated_rate"] == 0.0
        assert rows[1]["note"] == ""
        assert any("closed form does not apply" in record.getMessage() for record in caplog.records)

    def test_note_is_empty_where_the_closed_form_holds(self):
        assert all(closed_form_note(d, BasisKind.MUB) == "" for d in ODD_PRIMES)
        assert all(closed_form_note(d, BasisKind.MBB) == "" for d in range(3, 20))
