"""
Dense pure-state simulation of small qubit registers.

Conventions:
- Qubits are 1-based and big-endian: qubit 1 is the most significant bit of
  the amplitude index, so |10> on two qubits sits at index 2.
- Global phase is never tracked; state equality is judged by fidelity.
- Randomness always comes from an explicit ``numpy.random.Generator``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NonSeparableError, NormalizationError, SizeError

MAX_QUBITS = 24
NORM_TOL = 1e-10
PAIR_NORM_TOL = 1e-8
# Branch probabilities below this are treated as impossible.
PROB_FLOOR = 1e-14
SCHMIDT_TOL = 1e-8

_SQRT2_INV = 1 / np.sqrt(2)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitudes of an ``num_qubits``-qubit pure state (read-only)."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise SizeError(f"num_qubits must be in 1..{MAX_QUBITS}, got {self.num_qubits}")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** self.num_qubits:
            raise SizeError(f"{amps.size} amplitudes for {self.num_qubits} qubits")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise NormalizationError(f"state norm^2 is {norm!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, *, renormalize: bool = False) -> StateVector:
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(round(np.log2(amps.size))) if amps.size else 0
        if amps.size == 0 or 2 ** n != amps.size:
            raise SizeError(f"amplitude count {amps.size} is not a power of two")
        if renormalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits}, amplitudes={self.amplitudes!r})"


class BellOutcome(enum.Enum):
    PHI_PLUS = "PhiPlus"
    PHI_MINUS = "PhiMinus"
    PSI_PLUS = "PsiPlus"
    PSI_MINUS = "PsiMinus"


# Bell vectors over the ordered pair (q1, q2), index 2*b1 + b2.
BELL_VECTORS = {
    BellOutcome.PHI_PLUS: np.array([1, 0, 0, 1], dtype=complex) * _SQRT2_INV,
    BellOutcome.PHI_MINUS: np.array([1, 0, 0, -1], dtype=complex) * _SQRT2_INV,
    BellOutcome.PSI_PLUS: np.array([0, 1, 1, 0], dtype=complex) * _SQRT2_INV,
    BellOutcome.PSI_MINUS: np.array([0, 1, -1, 0], dtype=complex) * _SQRT2_INV,
}

_CORRECTIONS = {
    BellOutcome.PHI_PLUS: (),
    BellOutcome.PHI_MINUS: ("Z",),
    BellOutcome.PSI_PLUS: ("X",),
    BellOutcome.PSI_MINUS: ("X", "Z"),
}


class Comparison(enum.Enum):
    EQUAL = "Equal"
    UNEQUAL = "Unequal"


def _axis(state: StateVector, q: int) -> int:
    if not 1 <= q <= state.num_qubits:
        raise IndexError(f"qubit {q} out of range 1..{state.num_qubits}")
    return q - 1


def _wrap(n: int, psi: np.ndarray) -> StateVector:
    return StateVector(n, psi.reshape(-1))


def basis_state(n: int, bits: Sequence[int]) -> StateVector:
    bits = [int(b) for b in bits]
    if len(bits) != n:
        raise SizeError(f"expected {n} bits, got {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"bits must be 0/1, got {bits}")
    amps = np.zeros(2 ** n, dtype=complex)
    amps[int("".join(map(str, bits)), 2)] = 1.0
    return StateVector(n, amps)


def zero_state(n: int) -> StateVector:
    return basis_state(n, [0] * n)


def from_product(qubit_params: Sequence[tuple[complex, complex]]) -> StateVector:
    """Tensor product of single-qubit states ``alpha|0> + beta|1>`` in order.

    Each pair must be normalized to within ``PAIR_NORM_TOL``; pairs are then
    renormalized exactly so the product meets the tighter state tolerance.
    """
    if len(qubit_params) == 0:
        raise SizeError("need at least one qubit")
    amps = np.ones(1, dtype=complex)
    for i, (alpha, beta) in enumerate(qubit_params, start=1):
        pair = np.array([alpha, beta], dtype=complex)
        norm2 = float(np.vdot(pair, pair).real)
        if abs(norm2 - 1.0) > PAIR_NORM_TOL:
            raise NormalizationError(f"qubit {i}: |alpha|^2 + |beta|^2 = {norm2!r}")
        amps = np.kron(amps, pair / np.sqrt(norm2))
    return StateVector(len(qubit_params), amps)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    return StateVector(a.num_qubits + b.num_qubits, np.kron(a.amplitudes, b.amplitudes))


def apply_pauli(state: StateVector, q: int, which: str) -> StateVector:
    ax = _axis(state, q)
    psi = state.tensor_view()
    if which == "X":
        out = np.flip(psi, axis=ax).copy()
    elif which == "Z":
        out = psi.copy()
        idx = [slice(None)] * state.num_qubits
        idx[ax] = 1
        out[tuple(idx)] *= -1
    else:
        raise ValueError(f"unsupported Pauli {which!r}")
    return _wrap(state.num_qubits, out)


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    """CNOT with 1-based qubits; ``control == target`` is the identity."""
    c, t = _axis(state, control), _axis(state, target)
    if c == t:
        return state
    out = state.tensor_view().copy()
    idx = [slice(None)] * state.num_qubits
    idx[c] = 1
    idx = tuple(idx)
    # the control axis is dropped by integer indexing
    t_sub = t if t < c else t - 1
    out[idx] = np.flip(out[idx], axis=t_sub).copy()
    return _wrap(state.num_qubits, out)


def _apply_h(state: StateVector, q: int) -> StateVector:
    ax = _axis(state, q)
    psi = np.moveaxis(state.tensor_view(), ax, 0)
    out = np.stack([psi[0] + psi[1], psi[0] - psi[1]]) * _SQRT2_INV
    return _wrap(state.num_qubits, np.moveaxis(out, 0, ax))


def _apply_cswap(state: StateVector, control: int, q1: int, q2: int) -> StateVector:
    c, a, b = _axis(state, control), _axis(state, q1), _axis(state, q2)
    out = state.tensor_view().copy()
    idx = [slice(None)] * state.num_qubits
    idx[c] = 1
    idx = tuple(idx)
    a_sub = a if a < c else a - 1
    b_sub = b if b < c else b - 1
    out[idx] = np.swapaxes(out[idx], a_sub, b_sub).copy()
    return _wrap(state.num_qubits, out)


def fidelity(a: StateVector, b: StateVector) -> float:
    if a.num_qubits != b.num_qubits:
        raise SizeError(f"cannot compare {a.num_qubits}- and {b.num_qubits}-qubit states")
    f = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(min(max(f, 0.0), 1.0))


def _sample(probs: np.ndarray, rng: np.random.Generator) -> int:
    probs = np.where(probs < PROB_FLOOR, 0.0, probs)
    cdf = np.cumsum(probs / probs.sum())
    u = rng.random()
    return int(min(np.searchsorted(cdf, u, side="right"), len(probs) - 1))


def measure_qubit(state: StateVector, q: int, rng: np.random.Generator) -> tuple[int, StateVector]:
    """Computational-basis measurement of qubit ``q``; draws exactly one random number."""
    ax = _axis(state, q)
    psi = np.moveaxis(state.tensor_view(), ax, 0)
    probs = np.array([np.vdot(psi[0], psi[0]).real, np.vdot(psi[1], psi[1]).real])
    bit = _sample(probs, rng)
    out = np.zeros_like(psi)
    out[bit] = psi[bit] / np.sqrt(probs[bit])
    return bit, _wrap(state.num_qubits, np.moveaxis(out, 0, ax))


def bell_probabilities(state: StateVector, q1: int, q2: int) -> dict[BellOutcome, float]:
    a, b = _axis(state, q1), _axis(state, q2)
    if a == b:
        raise IndexError("Bell measurement needs two distinct qubits")
    psi = np.moveaxis(state.tensor_view(), (a, b), (0, 1)).reshape(4, -1)
    return {k: float(np.linalg.norm(v.conj() @ psi) ** 2) for k, v in BELL_VECTORS.items()}


def bell_measure(
    state: StateVector,
    q1: int,
    q2: int,
    rng: np.random.Generator | None = None,
    *,
    force: BellOutcome | None = None,
) -> tuple[BellOutcome, StateVector]:
    """Projective measurement of ``(q1, q2)`` in the Bell basis.

    The measured pair is left in the reported Bell state and the rest of the
    register holds the renormalized projection. Passing ``force`` postselects
    a branch instead of sampling (useful for exhaustive branch checks); a
    branch with zero probability raises ``ValueError``.
    """
    a, b = _axis(state, q1), _axis(state, q2)
    if a == b:
        raise IndexError("Bell measurement needs two distinct qubits")
    n = state.num_qubits
    psi = np.moveaxis(state.tensor_view(), (a, b), (0, 1)).reshape(4, -1)
    outcomes = list(BELL_VECTORS)
    projections = [BELL_VECTORS[k].conj() @ psi for k in outcomes]
    probs = np.array([np.vdot(p, p).real for p in projections])
    if force is None:
        if rng is None:
            raise ValueError("rng is required unless a branch is forced")
        k = _sample(probs, rng)
    else:
        k = outcomes.index(force)
        if probs[k] < PROB_FLOOR:
            raise ValueError(f"branch {force.value} has zero probability")
    outcome = outcomes[k]
    rest = projections[k] / np.sqrt(probs[k])
    out = np.outer(BELL_VECTORS[outcome], rest).reshape((2,) * n)
    out = np.moveaxis(out, (0, 1), (a, b))
    return outcome, _wrap(n, out)


def teleport_correction(outcome: BellOutcome) -> list[str]:
    """Paulis (applied left to right) that restore a teleported qubit.

    Assumes the resource pair is Phi+ and the Bell measurement is taken on
    (input qubit, sender half).
    """
    return list(_CORRECTIONS[outcome])


def schmidt_factor(state: StateVector, cut: int) -> tuple[StateVector, StateVector]:
    """Split a product state into (first ``cut`` qubits, remaining qubits).

    Raises ``NonSeparableError`` when the Schmidt rank across the cut exceeds 1.
    """
    n = state.num_qubits
    if not 1 <= cut < n:
        raise SizeError(f"cut must be in 1..{n - 1}, got {cut}")
    mat = state.amplitudes.reshape(2 ** cut, 2 ** (n - cut))

    # Rank-1 guess from the heaviest row; the residual norm bounds every
    # singular value past the first, so a tiny residual settles it without SVD.
    row = mat[np.argmax(np.einsum("ij,ij->i", mat, mat.conj()).real)]
    right = row / np.linalg.norm(row)
    left = mat @ right.conj()
    if np.linalg.norm(mat - np.outer(left, right)) < SCHMIDT_TOL * 1e-2:
        left = left / np.linalg.norm(left)
        return StateVector(cut, left), StateVector(n - cut, right)

    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    if len(s) > 1 and np.any(s[1:] >= SCHMIDT_TOL):
        raise NonSeparableError(cut, s)
    left = u[:, 0] / np.linalg.norm(u[:, 0])
    right = vh[0] / np.linalg.norm(vh[0])
    return StateVector(cut, left), StateVector(n - cut, right)


def swap_test_compare(
    a: StateVector, b: StateVector, reps: int, rng: np.random.Generator
) -> Comparison:
    """Run ``reps`` SWAP tests; any ancilla reading 1 means the states differ.

    Each repetition simulates the full circuit on ancilla + both registers.
    Equal states are never flagged; states of fidelity F slip through with
    probability ((1 + F) / 2) ** reps.
    """
    if a.num_qubits != b.num_qubits:
        raise SizeError(f"cannot compare {a.num_qubits}- and {b.num_qubits}-qubit states")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    m = a.num_qubits
    start = tensor(zero_state(1), tensor(a, b))
    for _ in range(reps):
        psi = _apply_h(start, 1)
        for i in range(1, m + 1):
            psi = _apply_cswap(psi, 1, 1 + i, 1 + m + i)
        psi = _apply_h(psi, 1)
        bit, _ = measure_qubit(psi, 1, rng)
        if bit == 1:
            return Comparison.UNEQUAL
    return Comparison.EQUAL
