"""
GHZ states, conditional states and the consistency conditions.

A conditional state is a product of one basis vector per party whose basis
labels and outcome labels each sum to 0 mod d. The uniqueness verifier checks
that no state orthogonal to GHZ overlaps the conditional states as strongly
as GHZ itself does.
"""
import logging
from itertools import product
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import MAX_DENSE_AMPLITUDES, MAX_ENUMERATION, STATE_TOLERANCE
from quantum.bases import BasisKind, BasisSpec, basis_rows, validate_dimension
from quantum.errors import EnumerationError, LabelError, StateError
from quantum.qmath import StateVector, partial_inner, tensor

logger = logging.getLogger(__name__)

OUTCOME_RULE = "sum≡0 mod d"


class GhzSpec(BaseModel):
    """Dimension and party count of a GHZ state"""
    model_config = ConfigDict(frozen=True)

    d: int = Field(..., ge=2, description="Register dimension")
    n: int = Field(..., ge=2, description="Number of parties")

    @property
    def size(self) -> int:
        return self.d ** self.n


class ConditionalState(BaseModel):
    """One (basis, outcome) pair per party, dealer first"""
    model_config = ConfigDict(frozen=True)

    entries: tuple[tuple[BasisSpec, int], ...] = Field(..., min_length=2)

    @model_validator(mode="after")
    def _same_family(self):
        first = self.entries[0][0]
        for spec, outcome in self.entries:
            if spec.d != first.d or spec.kind != first.kind:
                raise ValueError("all entries of a conditional state must share d and kind")
            if not 0 <= outcome < spec.d:
                raise ValueError(f"outcome {outcome} out of range for d={spec.d}")
        return self

    @property
    def d(self) -> int:
        return self.entries[0][0].d

    @property
    def kind(self) -> BasisKind:
        return self.entries[0][0].kind

    @property
    def bases(self) -> list[int]:
        return [spec.P for spec, _ in self.entries]

    @property
    def outcomes(self) -> list[int]:
        return [outcome for _, outcome in self.entries]

    @classmethod
    def from_labels(cls, kind: BasisKind, d: int, bases: Sequence[int], outcomes: Sequence[int]) -> "ConditionalState":
        return cls(entries=tuple((BasisSpec(kind=kind, d=d, P=P), p) for P, p in zip(bases, outcomes)))


class LookupRow(BaseModel):
    bases: tuple[int, ...] = Field(..., description="Non-dealer basis labels (B, C, ..., Omega)")
    dealer_basis: int = Field(..., description="The unique consistent dealer basis A")
    outcome_rule: str = OUTCOME_RULE


class LookupTable(BaseModel):
    """Valid basis combinations and the induced outcome relation"""
    d: int
    n: int
    kind: BasisKind
    rows: list[LookupRow]

    def dealer_basis_for(self, bases: Sequence[int]) -> int:
        return (-sum(bases)) % self.d

    def dealer_outcome_for(self, outcomes: Sequence[int]) -> int:
        return (-sum(outcomes)) % self.d

    def contains(self, full_bases: Sequence[int]) -> bool:
        """Whether the dealer-first tuple (A, B, ..., Omega) is a listed row"""
        return any(row.dealer_basis == full_bases[0] and row.bases == tuple(full_bases[1:]) for row in self.rows)

    def to_json_dict(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "kind": self.kind.value,
            "rows": [
                {"bases": list(row.bases), "dealer_basis": row.dealer_basis, "outcome_rule": row.outcome_rule}
                for row in self.rows
            ],
        }


def ghz_state(spec: GhzSpec) -> StateVector:
    """(1/sqrt d) sum_j |jj...j>"""
    if spec.size > MAX_DENSE_AMPLITUDES:
        raise StateError(f"d^n = {spec.size} amplitudes exceed the dense limit {MAX_DENSE_AMPLITUDES}")
    amps = np.zeros(spec.size, dtype=np.complex128)
    amps[diagonal_indices(spec)] = 1 / np.sqrt(spec.d)
    return StateVector(dims=(spec.d,) * spec.n, amps=amps)


def diagonal_indices(spec: GhzSpec) -> np.ndarray:
    """Flat indices of |jj...j> for j = 0..d-1"""
    stride = sum(spec.d ** k for k in range(spec.n))
    return np.arange(spec.d) * stride


def basis_valid(bases: Sequence[int], d: int) -> bool:
    return sum(bases) % d == 0


def outcome_valid(outcomes: Sequence[int], d: int) -> bool:
    return sum(outcomes) % d == 0


def consistent(bases: Sequence[int], outcomes: Sequence[int], d: int) -> bool:
    """Both consistency conditions: sum of bases and sum of outcomes vanish mod d"""
    if len(bases) != len(outcomes):
        raise LabelError(f"{len(bases)} bases but {len(outcomes)} outcomes")
    return basis_valid(bases, d) and outcome_valid(outcomes, d)


def lookup_table(d: int, n: int, kind: BasisKind = BasisKind.MUB) -> LookupTable:
    validate_dimension(d, kind)
    if n < 2:
        raise LabelError(f"need at least two parties, got n={n}")
    rows = [
        LookupRow(bases=others, dealer_basis=(-sum(others)) % d)
        for others in product(range(d), repeat=n - 1)
    ]
    return LookupTable(d=d, n=n, kind=BasisKind(kind), rows=rows)


def valid_fraction(d: int, n: int) -> float:
    """Fraction of independent uniform basis tuples that pass the basis condition"""
    valid = sum(1 for bases in product(range(d), repeat=n) if basis_valid(bases, d))
    return valid / d ** n


def conditional_state(c: ConditionalState) -> StateVector:
    """|A_a>|B_b>...|Omega_omega> for labels satisfying both conditions"""
    if not consistent(c.bases, c.outcomes, c.d):
        raise LabelError(f"labels bases={c.bases} outcomes={c.outcomes} are inconsistent mod {c.d}")
    return tensor([spec.vector(outcome) for spec, outcome in c.entries])


def dealer_vector_for(entries: Sequence[tuple[BasisSpec, int]]) -> StateVector:
    """|A_a> with A = -(sum of other bases), a = -(sum of other outcomes) mod d"""
    first = entries[0][0]
    A = (-sum(spec.P for spec, _ in entries)) % first.d
    a = (-sum(outcome for _, outcome in entries)) % first.d
    return BasisSpec(kind=first.kind, d=first.d, P=A).vector(a)


def residual_state(spec: GhzSpec, entries: Sequence[tuple[BasisSpec, int]]) -> StateVector:
    """Normalized dealer residual after projecting parties 1..n-1 of GHZ"""
    if len(entries) != spec.n - 1:
        raise LabelError(f"expected {spec.n - 1} non-dealer entries, got {len(entries)}")
    bras = [(i + 1, basis.vector(outcome)) for i, (basis, outcome) in enumerate(entries)]
    return partial_inner(bras, ghz_state(spec)).normalize()


def vperp_coefficients(d: int) -> np.ndarray:
    """Type-2 coefficients: Fourier rows k = 1..d-1, orthonormal and summing to zero"""
    return basis_rows(BasisKind.FOURIER, d)[1:]


def vperp_basis(spec: GhzSpec) -> list[StateVector]:
    """Orthonormal basis of the complement of GHZ: off-diagonal canonical strings, then diagonal combinations"""
    if spec.size > MAX_DENSE_AMPLITUDES:
        raise StateError(f"d^n = {spec.size} amplitudes exceed the dense limit {MAX_DENSE_AMPLITUDES}")
    dims = (spec.d,) * spec.n
    diagonal = set(diagonal_indices(spec).tolist())
    vectors = []
    for index in range(spec.size):
        if index in diagonal:
            continue
        amps = np.zeros(spec.size, dtype=np.complex128)
        amps[index] = 1.0
        vectors.append(StateVector(dims=dims, amps=amps))
    for row in vperp_coefficients(spec.d):
        amps = np.zeros(spec.size, dtype=np.complex128)
        amps[diagonal_indices(spec)] = row
        vectors.append(StateVector(dims=dims, amps=amps))
    return vectors


def consistent_label_tuples(d: int, n: int):
    """Every (bases, outcomes) pair with both sums vanishing mod d, dealer first"""
    for others in product(range(d), repeat=n - 1):
        bases = ((-sum(others)) % d,) + others
        for other_outcomes in product(range(d), repeat=n - 1):
            yield bases, ((-sum(other_outcomes)) % d,) + other_outcomes


def conditional_amplitudes(kind: BasisKind, d: int, bases: Sequence[int], outcomes: Sequence[int]) -> np.ndarray:
    """Flat amplitudes of the conditional state without building a StateVector"""
    rows = [basis_rows(kind, d, P)[p] for P, p in zip(bases, outcomes)]
    out = rows[0]
    for row in rows[1:]:
        out = np.kron(out, row)
    return out


class UniquenessReport(BaseModel):
    """Exhaustive check that GHZ beats every V-perp vector on every conditional state"""
    d: int
    n: int
    kind: BasisKind
    conditional_states: int
    vperp_dimension: int
    max_type1_overlap: float
    max_type2_overlap: float
    min_ghz_overlap: float
    max_ghz_overlap: float
    expected_type1_overlap: float = Field(..., description="d^(-n/2)")
    derived_ghz_overlap: float = Field(..., description="d^((1-n)/2) from direct contraction")
    alternate_ghz_overlap: float = Field(..., description="d^(1-n/2), the competing exponent")
    phases_cancel: bool = Field(..., description="<Lambda|jj...j> real positive d^(-n/2) for every j")
    passed: bool
    discrepancy_note: str


def check_enumeration(d: int, n: int) -> int:
    count = d ** (2 * (n - 1))
    if count > MAX_ENUMERATION:
        raise EnumerationError(f"{count} conditional states for d={d}, n={n} exceed the budget {MAX_ENUMERATION}")
    return count


def verify_uniqueness(spec: GhzSpec, kind: BasisKind) -> UniquenessReport:
    """Strict-inequality audit over every consistent conditional state and V-perp basis vector.

    Type-1 vectors are canonical strings, so their overlap with a conditional
    state is the conjugated amplitude at that string; type-2 overlaps are
    Fourier-weighted sums over the diagonal.
    """
    validate_dimension(spec.d, kind)
    count = check_enumeration(spec.d, spec.n)
    d, n = spec.d, spec.n
    diagonal = diagonal_indices(spec)
    off_diagonal = np.ones(spec.size, dtype=bool)
    off_diagonal[diagonal] = False
    coefficients = vperp_coefficients(d)
    expected_diagonal = d ** (-n / 2)
    ghz_diagonal = np.full(d, 1 / np.sqrt(d))

    max_type1 = max_type2 = 0.0
    min_ghz, max_ghz = np.inf, 0.0
    phases_cancel = True
    for bases, outcomes in consistent_label_tuples(d, n):
        amps = conditional_amplitudes(kind, d, bases, outcomes)
        on_diagonal = amps[diagonal].conj()
        if np.max(np.abs(on_diagonal - expected_diagonal)) > STATE_TOLERANCE:
            phases_cancel = False
        ghz_overlap = abs(complex(on_diagonal @ ghz_diagonal))
        min_ghz = min(min_ghz, ghz_overlap)
        max_ghz = max(max_ghz, ghz_overlap)
        max_type1 = max(max_type1, float(np.max(np.abs(amps[off_diagonal]))))
        max_type2 = max(max_type2, float(np.max(np.abs(coefficients @ on_diagonal))))

    derived = d ** ((1 - n) / 2)
    alternate = d ** (1 - n / 2)
    passed = max(max_type1, max_type2) < min_ghz
    note = (
        f"measured <Lambda|GHZ> = {min_ghz:.12f}; direct contraction predicts d^((1-n)/2) = {derived:.12f}; "
        f"the competing exponent d^(1-n/2) gives {alternate:.12f}"
    )
    if abs(alternate - derived) > STATE_TOLERANCE:
        logger.info("GHZ overlap exponent discrepancy for d=%d n=%d: %s", d, n, note)
    return UniquenessReport(
        d=d,
        n=n,
        kind=BasisKind(kind),
        conditional_states=count,
        vperp_dimension=spec.size - 1,
        max_type1_overlap=max_type1,
        max_type2_overlap=max_type2,
        min_ghz_overlap=float(min_ghz),
        max_ghz_overlap=max_ghz,
        expected_type1_overlap=expected_diagonal,
        derived_ghz_overlap=derived,
        alternate_ghz_overlap=alternate,
        phases_cancel=phases_cancel,
        passed=passed,
        discrepancy_note=note,
    )


def residual_matching_error(spec: GhzSpec, kind: BasisKind) -> float:
    """Largest 1 - fidelity between the dealer residual and |A_a> over all non-dealer labels"""
    validate_dimension(spec.d, kind)
    d = spec.d
    if d ** (2 * (spec.n - 1)) > MAX_ENUMERATION:
        raise EnumerationError(f"residual check for d={d}, n={spec.n} exceeds the budget {MAX_ENUMERATION}")
    worst = 0.0
    for others in product(range(d), repeat=spec.n - 1):
        for outcomes in product(range(d), repeat=spec.n - 1):
            entries = [(BasisSpec(kind=kind, d=d, P=P), p) for P, p in zip(others, outcomes)]
            residual = residual_state(spec, entries)
            dealer = dealer_vector_for(entries)
            worst = max(worst, 1.0 - abs(complex(np.vdot(dealer.amps, residual.amps))) ** 2)
    return worst
