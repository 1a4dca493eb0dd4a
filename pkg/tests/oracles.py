"""Reference computations that share no code with the package under test."""
import itertools

import numpy as np

SQRT2_INV = 1 / np.sqrt(2)

CNOT_4x4 = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def cnot_matrix(n, control, target):
    """Full 2^n unitary for CNOT via integer bit tricks (1-based, qubit 1 = MSB)."""
    dim = 2 ** n
    u = np.zeros((dim, dim), dtype=complex)
    cbit, tbit = n - control, n - target
    for x in range(dim):
        y = x ^ (1 << tbit) if control != target and (x >> cbit) & 1 else x
        u[y, x] = 1
    return u


def chained_unitary(n, key, decrypt=False):
    """Product CNOT(p_n, p_kn) ... CNOT(p_1, p_k1) written as literal matrix products."""
    u = np.eye(2 ** n, dtype=complex)
    factors = [cnot_matrix(n, i, k) for i, k in enumerate(key, start=1)]
    if decrypt:
        # D_K = CNOT(p_1,p_k1) ... CNOT(p_n,p_kn): rightmost acts first
        for f in reversed(factors):
            u = f @ u
    else:
        for f in factors:
            u = f @ u
    return u


def basis_bits_after(n, key, bits):
    """Classical simulation: bit k_i ^= bit i for i = 1..n."""
    b = list(bits)
    for i, k in enumerate(key, start=1):
        if i != k:
            b[k - 1] ^= b[i - 1]
    return tuple(b)


def brute_force_fixed(n, key):
    return {bits for bits in itertools.product((0, 1), repeat=n) if basis_bits_after(n, key, bits) == bits}


def kron_all(vectors):
    out = np.ones(1, dtype=complex)
    for v in vectors:
        out = np.kron(out, v)
    return out


BELL = {
    "PhiPlus": np.array([1, 0, 0, 1], dtype=complex) * SQRT2_INV,
    "PhiMinus": np.array([1, 0, 0, -1], dtype=complex) * SQRT2_INV,
    "PsiPlus": np.array([0, 1, 1, 0], dtype=complex) * SQRT2_INV,
    "PsiMinus": np.array([0, 1, -1, 0], dtype=complex) * SQRT2_INV,
}

PAULI_RECIPES = {(): I2, ("X",): X, ("Z",): Z, ("X", "Z"): Z @ X}


def teleport_branch(psi, label):
    """Project (psi (x) Phi+) onto Bell state `label` on qubits (1,2).

    Returns (probability, unnormalized-then-normalized state of qubit 3).
    """
    full = np.kron(psi, BELL["PhiPlus"]).reshape(4, 2)
    bob = BELL[label].conj() @ full
    p = float(np.vdot(bob, bob).real)
    return p, bob / np.sqrt(p)


def restoring_recipe(psi, label):
    """Search all Pauli recipes for the one that maps Bob's branch back to psi."""
    _, bob = teleport_branch(psi, label)
    hits = [r for r, m in PAULI_RECIPES.items() if abs(np.vdot(psi, m @ bob)) ** 2 > 1 - 1e-12]
    assert len(hits) == 1, hits
    return hits[0]


def random_qubit(rng):
    g = rng.normal(size=4)
    v = np.array([g[0] + 1j * g[1], g[2] + 1j * g[3]])
    return v / np.linalg.norm(v)
