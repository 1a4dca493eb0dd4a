"""
Chained-CNOT permutation encryption.

For a key K = (k_1, ..., k_n), encryption applies CNOT(p_i -> p_{k_i}) for
i = 1..n in that order and decryption replays the same gates for i = n..1.
Entries with k_i == i contribute no gate.

On computational basis states every CNOT is the reversible update
``b[k] ^= b[i]``, so the whole chain is an invertible linear map over GF(2).
``gf2_matrix`` builds that map independently of the statevector path and
serves as an oracle for it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidKeyError, SizeError
from .statevec import StateVector, apply_cnot


@dataclass(frozen=True)
class PermutationKey:
    mapping: tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(k) for k in self.mapping)
        if sorted(mapping) != list(range(1, len(mapping) + 1)) or not mapping:
            raise InvalidKeyError(f"{mapping} is not a permutation of 1..{len(mapping)}")
        object.__setattr__(self, "mapping", mapping)

    def __len__(self) -> int:
        return len(self.mapping)

    def __str__(self) -> str:
        return ",".join(map(str, self.mapping))

    @classmethod
    def parse(cls, text: str) -> PermutationKey:
        """Parse the comma-separated 1-based form, e.g. ``"3,1,2"``."""
        try:
            values = [int(tok) for tok in text.split(",")]
        except ValueError as exc:
            raise InvalidKeyError(f"malformed key {text!r}") from exc
        return cls(tuple(values))

    @classmethod
    def identity(cls, n: int) -> PermutationKey:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> PermutationKey:
        return cls(tuple(int(k) + 1 for k in rng.permutation(n)))

    def gates(self) -> list[tuple[int, int]]:
        """(control, target) pairs in encryption order, identity steps dropped."""
        return [(i, k) for i, k in enumerate(self.mapping, start=1) if i != k]


def all_keys(n: int) -> Iterator[PermutationKey]:
    for perm in itertools.permutations(range(1, n + 1)):
        yield PermutationKey(perm)


def _check(state: StateVector, key: PermutationKey) -> None:
    if len(key) != state.num_qubits:
        raise SizeError(f"key of length {len(key)} on a {state.num_qubits}-qubit state")


def encrypt(state: StateVector, key: PermutationKey) -> StateVector:
    _check(state, key)
    for control, target in key.gates():
        state = apply_cnot(state, control, target)
    return state


def decrypt(state: StateVector, key: PermutationKey) -> StateVector:
    _check(state, key)
    for control, target in reversed(key.gates()):
        state = apply_cnot(state, control, target)
    return state


@dataclass(frozen=True, eq=False)
class Gf2Matrix:
    """Square 0/1 matrix; row r gives output bit r+1 as a parity of input bits."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=np.uint8) & 1
        if rows.ndim != 2 or rows.shape[0] != rows.shape[1]:
            raise SizeError(f"expected a square matrix, got shape {rows.shape}")
        rows.flags.writeable = False
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    def tolist(self) -> list[list[int]]:
        return self.rows.astype(int).tolist()

    def rank(self) -> int:
        return _gf2_rank(self.rows)

    def is_invertible(self) -> bool:
        return self.rank() == self.n


def _gf2_rank(m: np.ndarray) -> int:
    a = np.array(m, dtype=np.uint8) & 1
    rows, cols = a.shape
    rank = 0
    for col in range(cols):
        pivot = next((r for r in range(rank, rows) if a[r, col]), None)
        if pivot is None:
            continue
        a[[rank, pivot]] = a[[pivot, rank]]
        for r in range(rows):
            if r != rank and a[r, col]:
                a[r] ^= a[rank]
        rank += 1
    return rank


def gf2_matrix(key: PermutationKey) -> Gf2Matrix:
    n = len(key)
    m = np.eye(n, dtype=np.uint8)
    for i, k in key.gates():
        m[k - 1] ^= m[i - 1]
    return Gf2Matrix(m)


def gf2_apply(m: Gf2Matrix, bits: Sequence[int]) -> tuple[int, ...]:
    v = np.asarray(bits, dtype=np.uint8)
    if v.shape != (m.n,):
        raise SizeError(f"{len(bits)} bits for a {m.n}x{m.n} matrix")
    return tuple(int(b) for b in (m.rows.astype(np.int64) @ v) % 2)


def _gf2_null_space(a: np.ndarray) -> list[np.ndarray]:
    """Basis of {x : a x = 0 (mod 2)} via reduced row echelon form."""
    a = np.array(a, dtype=np.uint8) & 1
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for col in range(cols):
        pivot = next((i for i in range(r, rows) if a[i, col]), None)
        if pivot is None:
            continue
        a[[r, pivot]] = a[[pivot, r]]
        for i in range(rows):
            if i != r and a[i, col]:
                a[i] ^= a[r]
        pivots.append(col)
        r += 1
        if r == rows:
            break
    basis = []
    for free in (c for c in range(cols) if c not in pivots):
        x = np.zeros(cols, dtype=np.uint8)
        x[free] = 1
        for row, pc in enumerate(pivots):
            x[pc] = a[row, free]
        basis.append(x)
    return basis


def fixed_basis_states(key: PermutationKey) -> frozenset[tuple[int, ...]]:
    """All bit strings x with E_K|x> = |x>, i.e. the GF(2) kernel of M + I."""
    m = gf2_matrix(key)
    basis = _gf2_null_space(m.rows ^ np.eye(m.n, dtype=np.uint8))
    fixed = set()
    for coeffs in itertools.product((0, 1), repeat=len(basis)):
        x = np.zeros(m.n, dtype=np.uint8)
        for c, vec in zip(coeffs, basis):
            if c:
                x ^= vec
        fixed.add(tuple(int(b) for b in x))
    return frozenset(fixed)
