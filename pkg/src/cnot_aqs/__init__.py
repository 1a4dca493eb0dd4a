"""Statevector simulation of a chained-CNOT arbitrated quantum signature scheme and its forgery."""
from .cipher import PermutationKey, decrypt, encrypt, fixed_basis_states, gf2_apply, gf2_matrix
from .errors import InvalidKeyError, NonSeparableError, NormalizationError, SizeError
from .forgery import eve_forge, explain_fixed_points, run_forgery
from .protocol import Comparator, MessageSpec, Mode, PartyKeys, run_honest, trent_arbitrate
from .statevec import BellOutcome, StateVector, basis_state, fidelity, from_product, tensor

__version__ = "0.1.0"

__all__ = [
    "BellOutcome", "Comparator", "InvalidKeyError", "MessageSpec", "Mode", "NonSeparableError",
    "NormalizationError", "PartyKeys", "PermutationKey", "SizeError", "StateVector", "basis_state",
    "decrypt", "encrypt", "eve_forge", "explain_fixed_points", "fidelity", "fixed_basis_states",
    "from_product", "gf2_apply", "gf2_matrix", "run_forgery", "run_honest", "tensor", "trent_arbitrate",
]
