"""
Adversary models and security benchmarks
"""
from .reports import AttackReport, FakeKeyAudit
from .analytic import analytic_detection_rate, exact_weighted_error_sum, weighted_error_sum, weighted_error_term
from .intercept import intercept_resend_report, intercept_resend_session, simulate_intercept_resend
from .outsider import outsider_probe_audit
from .participant import (
    attack_circuit_state, build_participant_attack_state, extract_participant,
    participant_report, participant_session, simulate_participant_attack,
)
from .benchmark import BENCHMARK_COLUMNS, benchmark_dimensions, benchmark_rows

__all__ = [
    'AttackReport', 'FakeKeyAudit',
    'analytic_detection_rate', 'exact_weighted_error_sum', 'weighted_error_sum', 'weighted_error_term',
    'simulate_intercept_resend', 'intercept_resend_session', 'intercept_resend_report',
    'outsider_probe_audit',
    'build_participant_attack_state', 'attack_circuit_state', 'extract_participant',
    'participant_session', 'participant_report', 'simulate_participant_attack',
    'BENCHMARK_COLUMNS', 'benchmark_dimensions', 'benchmark_rows',
]
