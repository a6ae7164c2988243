"""
Measurement-basis families: canonical, Fourier, quadratic-phase MUBs and the
biased MBB family, with closed-form overlap oracles.

Basis labels P are residues mod d. For MUBs the labels 1..d of the quadratic
phase family are stored mod d, so P = d and P = 0 name the same basis.
"""
from enum import Enum
from functools import lru_cache
from itertools import product
from typing import Optional

import numpy as np
import sympy
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config import STATE_TOLERANCE
from quantum.errors import DimensionError, LabelError, StateError
from quantum.qmath import ComplexAmp, StateVector, is_orthonormal


class BasisKind(str, Enum):
    CANONICAL = "canonical"
    FOURIER = "fourier"
    MUB = "mub"
    MBB = "mbb"


PROTOCOL_KINDS = (BasisKind.MUB, BasisKind.MBB)


def is_prime_power(d: int) -> bool:
    return d >= 2 and len(sympy.factorint(d)) == 1


def dimension_problem(d: int, kind: BasisKind) -> Optional[str]:
    """Reason ``d`` is unusable for ``kind``, or None when it is fine"""
    if d < 2:
        return "too small"
    if BasisKind(kind) is not BasisKind.MUB:
        return None
    if sympy.isprime(d):
        return "even" if d == 2 else None
    if is_prime_power(d) and d % 2:
        return "prime power unsupported"
    return "composite"


def validate_dimension(d: int, kind: BasisKind) -> None:
    reason = dimension_problem(d, kind)
    if reason is not None:
        raise DimensionError(d, BasisKind(kind).value, reason)


class BasisSpec(BaseModel):
    """One orthonormal measurement basis: (kind, d, label P)"""
    model_config = ConfigDict(frozen=True)

    kind: BasisKind = Field(..., description="Basis family")
    d: int = Field(..., ge=2, description="Register dimension")
    P: int = Field(default=0, description="Basis label in Z_d; ignored for canonical and Fourier")

    @model_validator(mode="before")
    @classmethod
    def _normalize_label(cls, data):
        if not isinstance(data, dict):
            return data
        data = dict(data)
        kind = BasisKind(data.get("kind"))
        d = data.get("d")
        label = data.get("P", 0)
        if kind in (BasisKind.CANONICAL, BasisKind.FOURIER):
            data["P"] = 0
        elif kind is BasisKind.MUB and isinstance(d, int) and 0 <= label <= d:
            data["P"] = label % d
        elif isinstance(d, int) and not 0 <= label < d:
            raise ValueError(f"basis label {label} out of range for d={d}")
        return data

    def vector(self, p: int) -> StateVector:
        return StateVector(dims=(self.d,), amps=basis_rows(self.kind, self.d, self.P)[_check_label(p, self.d)])

    def vectors(self) -> list[StateVector]:
        return [self.vector(p) for p in range(self.d)]

    def matrix(self) -> np.ndarray:
        return basis_rows(self.kind, self.d, self.P)


def _check_label(label: int, d: int, name: str = "outcome") -> int:
    if not 0 <= label < d:
        raise LabelError(f"{name} label {label} out of range for d={d}")
    return label


def _phase(exponents: np.ndarray, d: int) -> np.ndarray:
    # reduce mod d before exponentiating so phases stay exact roots of unity
    return np.exp(2j * np.pi * (np.asarray(exponents) % d) / d)


@lru_cache(maxsize=None)
def basis_rows(kind: BasisKind, d: int, P: int = 0) -> np.ndarray:
    """Read-only (d, d) array whose row p is the basis vector |P_p>"""
    kind = BasisKind(kind)
    validate_dimension(d, kind)
    j = np.arange(d)
    p = np.arange(d)[:, None]
    if kind is BasisKind.CANONICAL:
        rows = np.eye(d, dtype=np.complex128)
    elif kind is BasisKind.FOURIER:
        rows = _phase(p * j, d) / np.sqrt(d)
    elif kind is BasisKind.MUB:
        rows = _phase(P * j * j + p * j, d) / np.sqrt(d)
    else:
        rows = _phase(p * j, d) / np.sqrt(d)
        rows[:, 0] = _phase(np.array(P), d) / np.sqrt(d)
    rows = np.ascontiguousarray(rows, dtype=np.complex128)
    if not is_orthonormal(rows):
        raise StateError(f"{kind.value} basis P={P} for d={d} is not orthonormal")
    rows.setflags(write=False)
    return rows


@lru_cache(maxsize=None)
def family_rows(kind: BasisKind, d: int) -> np.ndarray:
    """Read-only (d, d, d) stack of basis_rows for labels P = 0..d-1"""
    stack = np.stack([basis_rows(kind, d, P) for P in range(d)])
    stack.setflags(write=False)
    return stack


def fourier_vector(d: int, k: int) -> StateVector:
    """(1/sqrt d) sum_j e^{i k j phi} |j>"""
    validate_dimension(d, BasisKind.FOURIER)
    _check_label(k, d, "Fourier")
    return StateVector(dims=(d,), amps=basis_rows(BasisKind.FOURIER, d)[k])


def mub_vector(d: int, P: int, p: int) -> StateVector:
    """(1/sqrt d) sum_j e^{i phi (P j^2 + p j)} |j>, P in 1..d stored mod d"""
    validate_dimension(d, BasisKind.MUB)
    if not 0 <= P <= d:
        raise LabelError(f"MUB basis label {P} out of range 1..{d}")
    _check_label(p, d)
    return StateVector(dims=(d,), amps=basis_rows(BasisKind.MUB, d, P % d)[p])


def mbb_vector(d: int, P: int, p: int) -> StateVector:
    """|u_p>_F + (1/sqrt d)(e^{i P phi} - 1)|0>"""
    validate_dimension(d, BasisKind.MBB)
    _check_label(P, d, "MBB basis")
    _check_label(p, d)
    return StateVector(dims=(d,), amps=basis_rows(BasisKind.MBB, d, P)[p])


def analytic_overlap(spec: BasisSpec, p: int, other: BasisSpec, p_other: int) -> ComplexAmp:
    """Closed-form <P_p|P'_p'> for the quadratic-phase MUBs and the MBBs.

    The MUB case completes the square and evaluates the quadratic Gauss sum,
    so both the 1/sqrt(d) magnitude and the phase are exact.
    """
    if spec.kind != other.kind or spec.d != other.d:
        raise LabelError(f"cannot compare {spec.kind.value}(d={spec.d}) with {other.kind.value}(d={other.d})")
    if spec.kind not in PROTOCOL_KINDS:
        raise LabelError(f"no analytic overlap for {spec.kind.value} bases")
    d = spec.d
    _check_label(p, d)
    _check_label(p_other, d)
    delta_basis = (other.P - spec.P) % d
    delta_outcome = (p_other - p) % d
    if spec.kind is BasisKind.MBB:
        return complex((1.0 if delta_outcome == 0 else 0.0) + (np.exp(2j * np.pi * delta_basis / d) - 1) / d)
    if delta_basis == 0:
        return complex(1.0 if delta_outcome == 0 else 0.0)
    # sum_j w^{A j^2 + B j} = w^{-B^2 / 4A} * (A|d) * eps_d * sqrt(d), w = e^{2 pi i / d}
    epsilon = 1.0 if d % 4 == 1 else 1j
    legendre = sympy.legendre_symbol(delta_basis, d)
    shift = (delta_outcome * delta_outcome * pow(4 * delta_basis, -1, d)) % d
    return complex(legendre * epsilon * np.exp(-2j * np.pi * shift / d) / np.sqrt(d))


def mbb_overlap_magnitude(d: int, delta_basis: int, same_outcome: bool) -> float:
    """|<P_p|P'_p'>| for MBBs as a function of P'-P and of p = p' only"""
    return abs((1.0 if same_outcome else 0.0) + (np.exp(2j * np.pi * delta_basis / d) - 1) / d)


def family_specs(kind: BasisKind, d: int) -> list[BasisSpec]:
    """Protocol basis labels in ascending Z_d order (canonical excluded for MUB)"""
    kind = BasisKind(kind)
    validate_dimension(d, kind)
    if kind in (BasisKind.CANONICAL, BasisKind.FOURIER):
        return [BasisSpec(kind=kind, d=d)]
    return [BasisSpec(kind=kind, d=d, P=P) for P in range(d)]


def basis_family(kind: BasisKind, d: int) -> list[list[StateVector]]:
    """All bases of a family; d bases for MUB (P = 1..d) and MBB (P = 0..d-1)"""
    return [spec.vectors() for spec in family_specs(kind, d)]


def family_is_orthonormal(kind: BasisKind, d: int, tolerance: float = STATE_TOLERANCE) -> bool:
    return all(is_orthonormal(spec.matrix(), tolerance) for spec in family_specs(kind, d))


def projector_set(kind: BasisKind, d: int) -> list[np.ndarray]:
    return [np.outer(row, row.conj()) for spec in family_specs(kind, d) for row in spec.matrix()]


def same_projector_sets(first: list[np.ndarray], second: list[np.ndarray], tolerance: float = STATE_TOLERANCE) -> bool:
    """Whether two rank-1 projector collections coincide as sets"""
    if len(first) != len(second):
        return False
    unmatched = list(second)
    for projector in first:
        for i, candidate in enumerate(unmatched):
            if np.max(np.abs(projector - candidate)) <= tolerance:
                del unmatched[i]
                break
        else:
            return False
    return True


def max_unbiasedness_error(d: int) -> float:
    """max | |<P_p|P'_p'>| - 1/sqrt d | over distinct MUB labels"""
    specs = family_specs(BasisKind.MUB, d)
    worst = 0.0
    for first, second in product(specs, repeat=2):
        if first.P == second.P:
            continue
        overlaps = np.abs(first.matrix().conj() @ second.matrix().T)
        worst = max(worst, float(np.max(np.abs(overlaps - 1 / np.sqrt(d)))))
    return worst


def max_mbb_law_error(d: int) -> float:
    """max |numerical overlap - analytic_overlap| across the MBB family"""
    specs = family_specs(BasisKind.MBB, d)
    worst = 0.0
    for first, second in product(specs, repeat=2):
        numeric = first.matrix().conj() @ second.matrix().T
        for p, q in product(range(d), repeat=2):
            worst = max(worst, abs(numeric[p, q] - analytic_overlap(first, p, second, q)))
    return worst
