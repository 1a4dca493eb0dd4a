import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cnot_aqs.cipher import (
    Gf2Matrix,
    PermutationKey,
    all_keys,
    decrypt,
    encrypt,
    fixed_basis_states,
    gf2_apply,
    gf2_matrix,
)
from cnot_aqs.errors import InvalidKeyError, SizeError
from cnot_aqs.statevec import StateVector, basis_state, fidelity, from_product, zero_state
from oracles import SQRT2_INV, basis_bits_after, brute_force_fixed, chained_unitary, kron_all, random_qubit

SWAP_KEY = PermutationKey((2, 1))


def random_product(n, rng):
    return StateVector(n, kron_all(random_qubit(rng) for _ in range(n)))


@st.composite
def keys(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    return PermutationKey(tuple(draw(st.permutations(range(1, n + 1)))))


# -- keys ----------------------------------------------------------------------

def test_key_validation():
    for bad in [(1, 1), (0, 1), (1, 3), ()]:
        with pytest.raises(InvalidKeyError):
            PermutationKey(bad)


def test_key_text_round_trip():
    k = PermutationKey.parse("3,1,2")
    assert k.mapping == (3, 1, 2)
    assert str(k) == "3,1,2"
    with pytest.raises(InvalidKeyError):
        PermutationKey.parse("3,x,2")


def test_random_key_deterministic():
    a = PermutationKey.random(7, np.random.default_rng(5))
    b = PermutationKey.random(7, np.random.default_rng(5))
    assert a == b


def test_all_keys_count():
    assert len(list(all_keys(4))) == 24


# -- encrypt / decrypt -----------------------------------------------------------

def test_encrypt_zero_state_fixed():
    zeros = zero_state(4)
    for key in (PermutationKey((2, 3, 4, 1)), PermutationKey((4, 3, 2, 1))):
        assert np.allclose(encrypt(zeros, key).amplitudes, zeros.amplitudes)


def test_identity_key_is_identity():
    s = random_product(4, np.random.default_rng(0))
    assert np.array_equal(encrypt(s, PermutationKey.identity(4)).amplitudes, s.amplitudes)


def test_encrypt_hand_traces():
    assert np.allclose(encrypt(basis_state(2, [1, 0]), SWAP_KEY).amplitudes, basis_state(2, [0, 1]).amplitudes)
    plus_zero = from_product([(SQRT2_INV, SQRT2_INV), (1, 0)])
    zero_plus = from_product([(1, 0), (SQRT2_INV, SQRT2_INV)])
    assert fidelity(encrypt(plus_zero, SWAP_KEY), zero_plus) == pytest.approx(1.0)


def test_decrypt_hand_traces():
    assert np.allclose(decrypt(basis_state(2, [0, 1]), SWAP_KEY).amplitudes, basis_state(2, [1, 0]).amplitudes)
    for key in all_keys(3):
        assert np.allclose(decrypt(zero_state(3), key).amplitudes, zero_state(3).amplitudes)


def test_size_mismatch():
    with pytest.raises(SizeError):
        encrypt(zero_state(3), SWAP_KEY)
    with pytest.raises(SizeError):
        decrypt(zero_state(3), SWAP_KEY)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_encrypt_decrypt_match_operator_products(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(10):
        key = PermutationKey.random(n, rng)
        s = random_product(n, rng)
        u = chained_unitary(n, key.mapping)
        d = chained_unitary(n, key.mapping, decrypt=True)
        assert np.allclose(encrypt(s, key).amplitudes, u @ s.amplitudes, atol=1e-14)
        assert np.allclose(decrypt(s, key).amplitudes, d @ s.amplitudes, atol=1e-14)


def test_encrypt_order_matters():
    # reversed gate order differs from the chained order for K=(2,1)
    s = basis_state(2, [1, 0])
    assert not np.allclose(encrypt(s, SWAP_KEY).amplitudes, decrypt(s, SWAP_KEY).amplitudes)


@pytest.mark.parametrize("n", range(1, 11))
def test_roundtrip(n):
    rng = np.random.default_rng(n)
    for _ in range(100):
        key = PermutationKey.random(n, rng)
        s = random_product(n, rng)
        assert fidelity(decrypt(encrypt(s, key), key), s) >= 1 - 1e-10


@given(keys(max_n=5), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=60, deadline=None)
def test_encrypt_preserves_inner_products(key, seed):
    rng = np.random.default_rng(seed)
    n = len(key)
    a, b = [StateVector(n, v / np.linalg.norm(v)) for v in rng.normal(size=(2, 2 ** n)) + 0j]
    assert abs(fidelity(encrypt(a, key), encrypt(b, key)) - fidelity(a, b)) <= 1e-9


@pytest.mark.parametrize("n", range(1, 6))
def test_zero_fixed_exhaustive(n):
    zeros = zero_state(n)
    for key in all_keys(n):
        out = encrypt(zeros, key)
        assert abs(out.amplitudes[0] - 1) <= 1e-12


# -- GF(2) oracle ----------------------------------------------------------------

def test_gf2_matrix_examples():
    assert gf2_matrix(PermutationKey.identity(4)).tolist() == np.eye(4, dtype=int).tolist()
    assert gf2_matrix(SWAP_KEY).tolist() == [[0, 1], [1, 1]]


def test_gf2_apply_examples():
    m = gf2_matrix(SWAP_KEY)
    assert gf2_apply(m, (1, 0)) == (0, 1)
    assert gf2_apply(gf2_matrix(PermutationKey.identity(3)), (1, 0, 1)) == (1, 0, 1)
    assert gf2_apply(gf2_matrix(PermutationKey((3, 1, 2))), (0, 0, 0)) == (0, 0, 0)
    with pytest.raises(SizeError):
        gf2_apply(m, (1, 0, 1))


def test_gf2_matrices_invertible():
    rng = np.random.default_rng(50)
    for _ in range(50):
        assert gf2_matrix(PermutationKey.random(6, rng)).is_invertible()
    assert not Gf2Matrix([[1, 1], [1, 1]]).is_invertible()


@pytest.mark.parametrize("n", range(1, 7))
def test_statevector_matches_gf2_map(n):
    rng = np.random.default_rng(200 + n)
    for _ in range(20):
        key = PermutationKey.random(n, rng)
        m = gf2_matrix(key)
        for bits in itertools.product((0, 1), repeat=n):
            out_bits = gf2_apply(m, bits)
            assert out_bits == basis_bits_after(n, key.mapping, bits)
            assert np.array_equal(encrypt(basis_state(n, bits), key).amplitudes, basis_state(n, out_bits).amplitudes)


# -- fixed points ----------------------------------------------------------------

def test_fixed_basis_examples():
    assert len(fixed_basis_states(PermutationKey.identity(2))) == 4
    assert fixed_basis_states(SWAP_KEY) == {(0, 0)}


@given(keys(max_n=6))
@settings(max_examples=80, deadline=None)
def test_fixed_basis_states_brute_force(key):
    n = len(key)
    fixed = fixed_basis_states(key)
    assert fixed == brute_force_fixed(n, key.mapping)
    assert (0,) * n in fixed
    assert math.log2(len(fixed)).is_integer()
