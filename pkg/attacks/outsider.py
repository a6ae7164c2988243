"""
Outsider entangled-probe audit.

An outsider who entangles a probe with the distributed state learns nothing
unless some state other than GHZ passes every consistency check. The audit
looks for such fake-key states both through the uniqueness inequality and by
building, for each valid basis tuple, the projector onto the states that
always return consistent outcomes.
"""
import logging
from itertools import product

import numpy as np

from config import MAX_AUDIT_DIMENSION, STATE_TOLERANCE
from quantum.bases import BasisKind, validate_dimension
from quantum.errors import EnumerationError
from quantum.ghz import GhzSpec, conditional_amplitudes, ghz_state, verify_uniqueness, vperp_basis
from attacks.reports import FakeKeyAudit

logger = logging.getLogger(__name__)


def consistent_projector(kind: BasisKind, d: int, bases: tuple[int, ...]) -> np.ndarray:
    """Sum of |Lambda><Lambda| over the consistent outcome tuples of one basis tuple"""
    n = len(bases)
    rows = [
        conditional_amplitudes(kind, d, bases, ((-sum(others)) % d,) + others)
        for others in product(range(d), repeat=n - 1)
    ]
    states = np.stack(rows)
    return states.T @ states.conj()


def outsider_probe_audit(d: int, n: int, kind: BasisKind) -> FakeKeyAudit:
    validate_dimension(d, kind)
    spec = GhzSpec(d=d, n=n)
    if spec.size > MAX_AUDIT_DIMENSION:
        raise EnumerationError(f"d^n = {spec.size} exceeds the audit limit {MAX_AUDIT_DIMENSION}")
    uniqueness = verify_uniqueness(spec, kind)

    tuples = [((-sum(others)) % d,) + others for others in product(range(d), repeat=n - 1)]
    candidates = np.stack([v.amps for v in vperp_basis(spec)])
    total = np.zeros((spec.size, spec.size), dtype=np.complex128)
    pass_probability = np.zeros((len(tuples), len(candidates)))
    for t, bases in enumerate(tuples):
        projector = consistent_projector(kind, d, bases)
        total += projector
        pass_probability[t] = np.einsum("vi,ij,vj->v", candidates.conj(), projector, candidates).real

    # states passing every check with certainty sit at the top eigenvalue len(tuples)
    eigenvalues, eigenvectors = np.linalg.eigh(total)
    undetectable = eigenvalues >= len(tuples) - STATE_TOLERANCE * spec.size
    ghz_fidelity = 0.0
    if int(undetectable.sum()) == 1:
        ghz_fidelity = float(abs(np.vdot(ghz_state(spec).amps, eigenvectors[:, undetectable][:, 0])) ** 2)

    violation = 1.0 - pass_probability
    worst_check = violation.max(axis=0)
    survivors = [int(i) for i in np.flatnonzero(worst_check <= STATE_TOLERANCE)]
    if survivors:
        logger.warning("%d V-perp vectors pass every consistency check", len(survivors))
    return FakeKeyAudit(
        d=d,
        n=n,
        kind=BasisKind(kind),
        candidates=len(candidates),
        basis_tuples=len(tuples),
        undetectable_dimension=int(undetectable.sum()),
        ghz_fidelity=ghz_fidelity,
        min_violation_probability=float(violation.min()),
        survivors=survivors,
        uniqueness=uniqueness,
    )
