"""
Dense state-vector algebra over tensor products of d-level registers.

Registers are ordered by party (Alice=0, Bob=1, Charlie=2, ...). Amplitudes are
stored flat in row-major order over ``dims``, so register 0 is the most
significant digit of the canonical index.
"""
import logging
from functools import reduce
from math import prod
from typing import Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import BATCH_AMPLITUDES, IDENTITY_TOLERANCE, STATE_TOLERANCE
from quantum.errors import StateError

logger = logging.getLogger(__name__)

ComplexAmp = complex

_MASK64 = (1 << 64) - 1


class StateVector(BaseModel):
    """Normalized (or explicitly unnormalized) amplitudes over d-level registers"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dims: tuple[int, ...] = Field(..., description="Per-register dimensions in party order")
    amps: np.ndarray = Field(..., description="Flat complex amplitudes of length prod(dims)")
    normalized: bool = Field(default=True, description="Whether sum |amp|^2 = 1 is asserted")

    @field_validator("amps", mode="before")
    @classmethod
    def _as_flat_complex(cls, value):
        arr = np.array(value, dtype=np.complex128).reshape(-1)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def _check_shape_and_norm(self):
        if not self.dims:
            raise ValueError("a state needs at least one register")
        if any(d < 2 for d in self.dims):
            raise ValueError(f"register dimensions must be >= 2, got {self.dims}")
        if self.amps.size != prod(self.dims):
            raise ValueError(f"{self.amps.size} amplitudes do not fit dims {self.dims}")
        if not np.all(np.isfinite(self.amps)):
            raise ValueError("amplitudes must be finite")
        if self.normalized and abs(self.norm_squared() - 1.0) > STATE_TOLERANCE:
            raise ValueError(f"state flagged normalized has squared norm {self.norm_squared():.12f}")
        return self

    @property
    def num_registers(self) -> int:
        return len(self.dims)

    def tensor_view(self) -> np.ndarray:
        return self.amps.reshape(self.dims)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def normalize(self) -> "StateVector":
        norm = np.sqrt(self.norm_squared())
        if norm <= STATE_TOLERANCE:
            raise StateError("cannot normalize a zero-norm state")
        return StateVector(dims=self.dims, amps=self.amps / norm)

    @classmethod
    def trusted(cls, dims: tuple[int, ...], amps: np.ndarray, normalized: bool = True) -> "StateVector":
        """Wrap complex128 amplitudes produced by this module's own algebra without re-validating them"""
        amps = amps.reshape(-1)
        amps.setflags(write=False)
        return cls.model_construct(dims=dims, amps=amps, normalized=normalized)


def _mix64(value: int) -> int:
    # SplitMix64 finalizer, a bijection on 64-bit words
    value = (value + 0x9E3779B97F4A7C15) & _MASK64
    value = ((value ^ (value >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    value = ((value ^ (value >> 27)) * 0x94D049BB133111EB) & _MASK64
    return value ^ (value >> 31)


class SeededRng:
    """Counter-based random stream keyed by (seed, stream id).

    Identical (seed, stream) pairs reproduce identical draws bit for bit, and
    distinct stream ids never share state, so rounds can run in any order.
    Child ids are hashed from the parent id and the index, so siblings never
    collide and nested splits do not land on the parent's other children.
    """

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream = int(stream) & _MASK64
        bit_generator = np.random.Philox(key=(self.seed << 64) | self.stream)
        self._generator = np.random.Generator(bit_generator)

    def __repr__(self) -> str:
        return f"SeededRng(seed={self.seed}, stream={self.stream})"

    def stream_for(self, index: int) -> "SeededRng":
        """Child stream for round ``index`` (0 <= index < 2**64)"""
        if not 0 <= index <= _MASK64:
            raise ValueError(f"stream index {index} outside [0, 2**64)")
        return SeededRng(self.seed, _mix64((_mix64(self.stream) + int(index) + 1) & _MASK64))

    def uniform(self) -> float:
        return float(self._generator.random())

    def integers(self, high: int) -> int:
        return int(self._generator.integers(high))


BasisLike = Union[Sequence[StateVector], np.ndarray]


def basis_state(d: int, j: int) -> StateVector:
    if not 0 <= j < d:
        raise StateError(f"canonical label {j} out of range for d={d}")
    amps = np.zeros(d, dtype=np.complex128)
    amps[j] = 1.0
    return StateVector(dims=(d,), amps=amps)


def computational_basis(d: int) -> list[StateVector]:
    return [basis_state(d, j) for j in range(d)]


def tensor(parts: Sequence[StateVector]) -> StateVector:
    """Kronecker product of normalized states in register order"""
    if not parts:
        raise StateError("tensor needs at least one part")
    for part in parts:
        if not part.normalized:
            raise StateError("tensor parts must be normalized")
    dims = tuple(d for part in parts for d in part.dims)
    amps = reduce(np.kron, (part.amps for part in parts))
    return StateVector(dims=dims, amps=amps)


def inner(bra: StateVector, ket: StateVector) -> ComplexAmp:
    """<bra|ket> = sum conj(bra_i) * ket_i"""
    if bra.dims != ket.dims:
        raise StateError(f"dimension mismatch: {bra.dims} vs {ket.dims}")
    return complex(np.vdot(bra.amps, ket.amps))


def partial_inner(bras: Sequence[tuple[int, StateVector]], state: StateVector) -> StateVector:
    """Contract single-register bras into the given registers of ``state``.

    The residual on the untouched registers is returned unnormalized; its
    squared norm is the probability of the joint outcome.
    """
    indices = [index for index, _ in bras]
    if len(set(indices)) != len(indices):
        raise StateError(f"register indices must be distinct, got {indices}")
    if len(indices) >= state.num_registers:
        raise StateError("partial_inner must leave at least one register; use inner() instead")
    for index, bra in bras:
        if not 0 <= index < state.num_registers:
            raise StateError(f"register {index} out of range for {state.num_registers} registers")
        if bra.num_registers != 1 or bra.dims[0] != state.dims[index]:
            raise StateError(f"bra of dims {bra.dims} does not match register {index} of dims {state.dims}")

    t = state.tensor_view()
    # descending order keeps the lower axis numbers valid after each contraction
    for index, bra in sorted(bras, key=lambda pair: pair[0], reverse=True):
        t = np.tensordot(bra.amps.conj(), t, axes=([0], [index]))
    remaining = tuple(d for i, d in enumerate(state.dims) if i not in set(indices))
    return StateVector(dims=remaining, amps=t.reshape(-1), normalized=False)


def basis_matrix(basis: BasisLike) -> np.ndarray:
    """Stack basis vectors as rows of a complex matrix"""
    if isinstance(basis, np.ndarray):
        matrix = np.asarray(basis, dtype=np.complex128)
    else:
        if not basis:
            raise StateError("empty basis")
        for vector in basis:
            if vector.num_registers != 1:
                raise StateError("measurement basis vectors must be single-register states")
        matrix = np.stack([vector.amps for vector in basis])
    if matrix.ndim != 2:
        raise StateError(f"basis matrix must be 2-D, got shape {matrix.shape}")
    return matrix


def is_orthonormal(matrix: np.ndarray, tolerance: float = STATE_TOLERANCE) -> bool:
    gram = matrix.conj() @ matrix.T
    return bool(np.max(np.abs(gram - np.eye(matrix.shape[0]))) <= tolerance)


def _inverse_cdf(probabilities: np.ndarray, u: float) -> int:
    cdf = np.cumsum(probabilities)
    outcome = min(int(np.searchsorted(cdf, u * cdf[-1], side="right")), len(probabilities) - 1)
    while probabilities[outcome] <= 0.0 and outcome > 0:
        outcome -= 1
    return outcome


def _inverse_cdf_rows(probabilities: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """_inverse_cdf applied to every row"""
    cdf = np.cumsum(probabilities, axis=1)
    targets = uniforms * cdf[:, -1]
    outcomes = np.minimum(np.sum(cdf <= targets[:, None], axis=1), probabilities.shape[1] - 1)
    rows = np.arange(len(outcomes))
    stuck = (probabilities[rows, outcomes] <= 0.0) & (outcomes > 0)
    while stuck.any():
        outcomes[stuck] -= 1
        stuck = (probabilities[rows, outcomes] <= 0.0) & (outcomes > 0)
    return outcomes


def _check_basis_shape(d: int, count: int, width: int, allow_incomplete: bool):
    if width != d:
        raise StateError(f"basis vectors of length {width} do not fit register of dimension {d}")
    if count > d or (count < d and not allow_incomplete):
        raise StateError(f"basis with {count} vectors is not complete for dimension {d}")


def born_measure(
    state: StateVector,
    register: int,
    basis: BasisLike,
    rng: SeededRng,
    *,
    allow_incomplete: bool = False,
    checked: bool = False,
) -> tuple[int, StateVector]:
    """Projective measurement of one register, sampled by inverse CDF.

    Outcome probabilities are enumerated in ascending label order. With
    ``allow_incomplete`` the basis may span a subspace only; the complement
    is reported as the extra outcome ``len(basis)``. ``checked`` skips the
    orthonormality test for rows that were verified when they were built.
    """
    if not 0 <= register < state.num_registers:
        raise StateError(f"register {register} out of range for {state.num_registers} registers")
    matrix = basis_matrix(basis)
    d = state.dims[register]
    count = matrix.shape[0]
    _check_basis_shape(d, count, matrix.shape[1], allow_incomplete)
    if not checked and not is_orthonormal(matrix):
        raise StateError("measurement basis is not orthonormal")

    psi = np.moveaxis(state.tensor_view(), register, 0).reshape(d, -1)
    branches = matrix.conj() @ psi
    probabilities = np.sum(np.abs(branches) ** 2, axis=1)
    total = float(np.sum(np.abs(psi) ** 2))
    if total <= STATE_TOLERANCE:
        raise StateError("cannot measure a zero-norm state")
    if count < d:
        probabilities = np.append(probabilities, max(total - float(probabilities.sum()), 0.0))

    outcome = _inverse_cdf(probabilities / probabilities.sum(), rng.uniform())
    rest = tuple(dim for i, dim in enumerate(state.dims) if i != register)
    if outcome < count:
        collapsed = np.multiply.outer(matrix[outcome], branches[outcome].reshape(rest))
    else:
        logger.debug("register %d projected outside the %d-vector subspace", register, count)
        collapsed = (psi - matrix.T @ branches).reshape((d,) + rest)
    collapsed = np.moveaxis(collapsed, 0, register).reshape(-1)
    collapsed = collapsed / np.linalg.norm(collapsed)
    return outcome, StateVector.trusted(state.dims, collapsed)


def born_measure_rows(
    amps: np.ndarray,
    dims: Sequence[int],
    register: int,
    bases: np.ndarray,
    uniforms: np.ndarray,
    *,
    allow_incomplete: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """born_measure on a stack of independent states, one per row.

    ``amps`` is (rounds, prod(dims)), ``bases`` holds one already-verified
    (count, d) basis per row and ``uniforms`` the inverse-CDF draw of each
    row. Returns the outcome of every row and the collapsed, normalized rows.
    """
    dims = tuple(dims)
    rounds = amps.shape[0]
    d = dims[register]
    if bases.ndim != 3 or bases.shape[0] != rounds or uniforms.shape != (rounds,):
        raise StateError(f"need one basis and one draw per row, got {bases.shape} and {uniforms.shape} for {rounds} rows")
    count = bases.shape[1]
    _check_basis_shape(d, count, bases.shape[2], allow_incomplete)

    psi = np.moveaxis(amps.reshape((rounds,) + dims), register + 1, 1).reshape(rounds, d, -1)
    branches = bases.conj() @ psi
    probabilities = np.sum(np.abs(branches) ** 2, axis=2)
    totals = np.sum(np.abs(psi) ** 2, axis=(1, 2))
    if np.any(totals <= STATE_TOLERANCE):
        raise StateError("cannot measure a zero-norm state")
    if count < d:
        leftover = np.maximum(totals - probabilities.sum(axis=1), 0.0)
        probabilities = np.concatenate([probabilities, leftover[:, None]], axis=1)

    outcomes = _inverse_cdf_rows(probabilities / probabilities.sum(axis=1, keepdims=True), uniforms)
    rows = np.arange(rounds)
    inside = np.minimum(outcomes, count - 1)
    collapsed = bases[rows, inside][:, :, None] * branches[rows, inside][:, None, :]
    outside = outcomes == count
    if outside.any():
        logger.debug("register %d projected outside the %d-vector subspace in %d rows", register, count, int(outside.sum()))
        collapsed[outside] = psi[outside] - np.swapaxes(bases[outside], 1, 2) @ branches[outside]
    collapsed /= np.linalg.norm(collapsed.reshape(rounds, -1), axis=1)[:, None, None]
    rest = tuple(dim for i, dim in enumerate(dims) if i != register)
    collapsed = np.moveaxis(collapsed.reshape((rounds, d) + rest), 1, register + 1)
    return outcomes, collapsed.reshape(rounds, -1)


def row_batches(rounds: int, amplitudes: int) -> list[range]:
    """Consecutive round ranges sized so a batch holds about BATCH_AMPLITUDES amplitudes"""
    size = max(1, BATCH_AMPLITUDES // max(1, amplitudes))
    return [range(start, min(rounds, start + size)) for start in range(0, rounds, size)]


def fidelity(a: StateVector, b: StateVector) -> float:
    return abs(inner(a, b)) ** 2


def regroup(state: StateVector, dims: Sequence[int]) -> StateVector:
    """Reinterpret adjacent registers under new dims with the same total size"""
    dims = tuple(dims)
    if prod(dims) != prod(state.dims):
        raise StateError(f"cannot regroup {state.dims} as {dims}")
    return StateVector.trusted(dims, state.amps, state.normalized)


def schmidt_coefficients(state: StateVector, split: int) -> np.ndarray:
    """Singular values across registers [0, split) | [split, n)"""
    if not 0 < split < state.num_registers:
        raise StateError(f"split {split} must cut {state.dims} into two non-empty sides")
    left = prod(state.dims[:split])
    return np.linalg.svd(state.amps.reshape(left, -1), compute_uv=False)


def apply_local_unitary(state: StateVector, register: int, unitary: np.ndarray) -> StateVector:
    d = state.dims[register]
    unitary = np.asarray(unitary, dtype=np.complex128)
    if unitary.shape != (d, d):
        raise StateError(f"unitary of shape {unitary.shape} does not act on dimension {d}")
    if np.max(np.abs(unitary.conj().T @ unitary - np.eye(d))) > IDENTITY_TOLERANCE * d:
        raise StateError("operator is not unitary")
    t = np.tensordot(unitary, state.tensor_view(), axes=([1], [register]))
    t = np.moveaxis(t, 0, register)
    return StateVector(dims=state.dims, amps=t.reshape(-1), normalized=state.normalized)


def controlled_shift(state: StateVector, control: int, target: int) -> StateVector:
    """Generalized CNOT: |j>_control |m>_target -> |j>|m + j mod d_target>"""
    if control == target:
        raise StateError("control and target must differ")
    t = state.tensor_view()
    out = np.empty_like(t)
    target_axis = target - 1 if target > control else target
    for j in range(state.dims[control]):
        index = [slice(None)] * state.num_registers
        index[control] = j
        out[tuple(index)] = np.roll(t[tuple(index)], j, axis=target_axis)
    return StateVector(dims=state.dims, amps=out.reshape(-1), normalized=state.normalized)
