"""
Multi-party secret-sharing protocol: parties, transcripts and session engine
"""
from .models import (
    AnnouncementOrder, DetectionStats, KeyRecord, ProtocolVariant,
    RoundTranscript, SessionConfig, SessionResult,
)
from .parties import Dealer, Participant, Party, roster
from .engine import (
    SessionOrchestrator, build_key_record, designate_test_rounds, detection_stats,
    eavesdrop_test, qkd_bootstrap, reconstruct_secret, reconstruction_accuracy,
    run_round_original, run_session_modified, run_session_original, sift,
)

__all__ = [
    'AnnouncementOrder', 'DetectionStats', 'KeyRecord', 'ProtocolVariant',
    'RoundTranscript', 'SessionConfig', 'SessionResult',
    'Dealer', 'Participant', 'Party', 'roster',
    'SessionOrchestrator', 'run_round_original', 'run_session_original', 'sift',
    'designate_test_rounds', 'detection_stats', 'eavesdrop_test', 'build_key_record',
    'reconstruct_secret', 'reconstruction_accuracy', 'qkd_bootstrap', 'run_session_modified',
]
