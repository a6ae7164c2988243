"""
Detection-rate benchmark table: closed form against Monte Carlo per dimension
"""
import logging
from typing import Iterable

from protocol.models import SessionConfig
from quantum.bases import BasisKind, dimension_problem
from quantum.qmath import SeededRng
from attacks.analytic import analytic_detection_rate, exact_weighted_error_sum
from attacks.intercept import simulate_intercept_resend
from utils.console import show_agent_working

logger = logging.getLogger(__name__)

BENCHMARK_COLUMNS = [
    "kind", "d", "analytic_rate_num", "analytic_rate_den", "analytic_rate",
    "simulated_rate", "stderr", "rounds", "seed", "note",
]


def benchmark_dimensions(kind: BasisKind, low: int, high: int) -> list[int]:
    """Dimensions in [low, high] usable by ``kind``; MUB keeps the odd primes"""
    return [d for d in range(low, high + 1) if dimension_problem(d, kind) is None]


def closed_form_note(d: int, kind: BasisKind) -> str:
    """Empty when the closed form equals the weighted error sum the simulation follows"""
    exact = analytic_detection_rate(d, kind)
    weighted = exact_weighted_error_sum(d, kind)
    if weighted == exact:
        return ""
    return (
        f"closed form does not apply: the bases coincide up to relabeling, "
        f"so the simulated rate follows the weighted error sum {weighted}"
    )


def benchmark_rows(kind: BasisKind, d_values: Iterable[int], rounds: int, seed: int, verbose: bool = False) -> list[dict]:
    kind = BasisKind(kind)
    rows = []
    for d in d_values:
        exact = analytic_detection_rate(d, kind)
        cfg = SessionConfig(d=d, n=3, kind=kind, rounds=rounds, seed=seed)
        if verbose:
            show_agent_working("Charlie*", f"intercepting {rounds} rounds at d={d} ({kind.value})")
        # one stream per dimension so rows do not depend on the range requested
        stats = simulate_intercept_resend(cfg, rounds, SeededRng(seed, d))
        note = closed_form_note(d, kind)
        if note:
            logger.warning("d=%d %s: %s", d, kind.value, note)
        logger.debug("d=%d %s: analytic %s, simulated %.6f", d, kind.value, exact, stats.rate)
        rows.append({
            "kind": kind.value,
            "d": d,
            "analytic_rate_num": int(exact.p),
            "analytic_rate_den": int(exact.q),
            "analytic_rate": float(exact),
            "simulated_rate": stats.rate,
            "stderr": stats.stderr,
            "rounds": rounds,
            "seed": seed,
            "note": note,
        })
    return rows
