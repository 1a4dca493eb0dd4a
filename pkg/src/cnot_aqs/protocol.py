"""
Three-party arbitrated signature over chained-CNOT encryption.

Alice signs a quantum message for Bob; Trent arbitrates. The phases are:

    setup          keys K_A, K_B, r_B and n Bell pairs           (I1, I2)
    alice_sign     encrypt with fresh K_R, sign with K_A,
                   teleport one copy through the Bell pairs     (S1-S4)
    bob_blind      X-mask with r_B, append |0> ancilla, E_{K_B}  (V1)
    trent_verify   unmask, compare S_A with E_{K_A}(P_enc)      (V2, V3)
    bob_verify     read |V>, undo teleportation, compare        (V4, V5)
    bob_finalize   decrypt P_enc with the published K_R         (V6, V7)

All Bell pairs and the teleported copy live in one joint register laid out
as [message slot 1..n | Alice halves n+1..2n | Bob halves 2n+1..3n].
Role separation is by function signature, not by separate memory.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .cipher import PermutationKey, decrypt, encrypt
from .errors import NonSeparableError, NormalizationError, SizeError
from .serialize import SCHEMA_VERSION, state_to_json
from .statevec import (
    PAIR_NORM_TOL,
    BellOutcome,
    Comparison,
    StateVector,
    apply_pauli,
    basis_state,
    bell_measure,
    fidelity,
    from_product,
    measure_qubit,
    schmidt_factor,
    swap_test_compare,
    teleport_correction,
    tensor,
    zero_state,
)

log = logging.getLogger(__name__)

MAX_MESSAGE_QUBITS = 8
EXACT_THRESHOLD = 1 - 1e-9
DEFAULT_SWAP_REPS = 20


class Mode(enum.Enum):
    EXACT = "exact"
    SWAP = "swap"


@dataclass(frozen=True)
class Comparator:
    """State-equality judgement used by Trent (V2) and Bob (V5).

    ``exact`` reads the fidelity straight off the simulator; ``swap`` runs
    ``reps`` physical SWAP tests and so only consumes copies of the states.
    """

    mode: Mode = Mode.EXACT
    reps: int = DEFAULT_SWAP_REPS
    threshold: float = EXACT_THRESHOLD

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be >= 1")

    def equal(self, a: StateVector, b: StateVector, rng: np.random.Generator) -> bool:
        if self.mode is Mode.EXACT:
            return fidelity(a, b) >= self.threshold
        return swap_test_compare(a, b, self.reps, rng) is Comparison.EQUAL

    def describe(self) -> dict[str, Any]:
        out: dict[str, Any] = {"mode": self.mode.value}
        if self.mode is Mode.SWAP:
            out["reps"] = self.reps
        return out


@dataclass(frozen=True)
class MessageSpec:
    """Classical description of a product message, one (alpha, beta) per qubit."""

    qubit_params: tuple[tuple[complex, complex], ...]

    def __post_init__(self):
        params = tuple((complex(a), complex(b)) for a, b in self.qubit_params)
        if not params:
            raise SizeError("message needs at least one qubit")
        for i, (a, b) in enumerate(params, start=1):
            norm2 = abs(a) ** 2 + abs(b) ** 2
            if abs(norm2 - 1) > PAIR_NORM_TOL:
                raise NormalizationError(f"qubit {i}: |alpha|^2 + |beta|^2 = {norm2!r}")
        object.__setattr__(self, "qubit_params", params)

    @property
    def n(self) -> int:
        return len(self.qubit_params)

    def state(self) -> StateVector:
        return from_product(self.qubit_params)

    @classmethod
    def zeros(cls, n: int) -> MessageSpec:
        return cls(((1, 0),) * n)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> MessageSpec:
        """Haar-random qubits: two complex Gaussians per qubit, normalized."""
        params = []
        for _ in range(n):
            g = rng.normal(size=4)
            pair = np.array([g[0] + 1j * g[1], g[2] + 1j * g[3]])
            pair /= np.linalg.norm(pair)
            params.append((complex(pair[0]), complex(pair[1])))
        return cls(tuple(params))

    @classmethod
    def parse(cls, text: str) -> MessageSpec:
        """Parse ``"re,im,re,im;..."`` with one alpha/beta quadruple per qubit."""
        params = []
        for chunk in text.strip().split(";"):
            parts = [p for p in chunk.split(",")]
            if len(parts) != 4:
                raise ValueError(f"expected 4 numbers per qubit, got {chunk!r}")
            ar, ai, br, bi = (float(p) for p in parts)
            params.append((complex(ar, ai), complex(br, bi)))
        return cls(tuple(params))

    def to_text(self) -> str:
        return ";".join(
            f"{a.real!r},{a.imag!r},{b.real!r},{b.imag!r}" for a, b in self.qubit_params
        )


@dataclass(frozen=True)
class PartyKeys:
    """Trent's pre-shared material: K_A (n), K_B (2n+1) and Bob's mask r_B (2n bits)."""

    k_a: PermutationKey
    k_b: PermutationKey
    r_b: tuple[int, ...]

    def __post_init__(self):
        n = len(self.k_a)
        r_b = tuple(int(b) for b in self.r_b)
        if len(self.k_b) != 2 * n + 1:
            raise SizeError(f"K_B has length {len(self.k_b)}, expected {2 * n + 1}")
        if len(r_b) != 2 * n or any(b not in (0, 1) for b in r_b):
            raise SizeError(f"r_B must be {2 * n} bits, got {r_b}")
        object.__setattr__(self, "r_b", r_b)

    @property
    def n(self) -> int:
        return len(self.k_a)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> PartyKeys:
        k_a = PermutationKey.random(n, rng)
        k_b = PermutationKey.random(2 * n + 1, rng)
        r_b = tuple(int(b) for b in rng.integers(0, 2, size=2 * n))
        return cls(k_a, k_b, r_b)

    def to_json(self) -> dict[str, Any]:
        return {"k_a": list(self.k_a.mapping), "k_b": list(self.k_b.mapping), "r_b": list(self.r_b)}


@dataclass(frozen=True)
class TeleportRegister:
    n: int
    state: StateVector

    def __post_init__(self):
        if self.state.num_qubits != 3 * self.n:
            raise SizeError(f"register must hold {3 * self.n} qubits")

    @classmethod
    def fresh(cls, n: int) -> TeleportRegister:
        """|0^n> in the message slot and a Phi+ pair on each (n+i, 2n+i)."""
        amps = np.zeros(2 ** (3 * n), dtype=complex)
        b = np.arange(2 ** n)
        amps[(b << n) | b] = 2 ** (-n / 2)
        return cls(n, StateVector(3 * n, amps))

    def alice_half(self, i: int) -> int:
        return self.n + i

    def bob_half(self, i: int) -> int:
        return 2 * self.n + i

    def load_message(self, message: StateVector) -> TeleportRegister:
        if message.num_qubits != self.n:
            raise SizeError("message size does not match the register")
        _, pairs = schmidt_factor(self.state, self.n)
        return TeleportRegister(self.n, tensor(message, pairs))

    def bob_state(self) -> StateVector:
        """Bob's n halves, which must be unentangled from the rest."""
        return schmidt_factor(self.state, 2 * self.n)[1]


@dataclass(frozen=True)
class SignaturePackage:
    p_enc_3: StateVector
    s_a: StateVector
    m_a: tuple[BellOutcome, ...]

    def __post_init__(self):
        n = self.p_enc_3.num_qubits
        if self.s_a.num_qubits != n or len(self.m_a) != n:
            raise SizeError("package components disagree on n")

    @property
    def n(self) -> int:
        return self.p_enc_3.num_qubits


class Reason(enum.Enum):
    OK = "Ok"
    V_ZERO = "VZero"
    TELEPORT_MISMATCH = "TeleportMismatch"
    ANCILLA_DIRTY = "AncillaDirty"
    NON_SEPARABLE = "NonSeparable"


@dataclass(frozen=True)
class TrentResult:
    """What Trent learned in V2; ``unblinded`` is P_enc3 (x) S_A as he recovered it."""

    v_bit: int
    reason: Reason
    unblinded: StateVector
    fidelity_sa_st: float | None = None


@dataclass(frozen=True)
class Verdict:
    v_bit: int
    accepted: bool
    reason: Reason
    p_enc_3: StateVector | None = None
    teleport_fidelity: float | None = None

    def __post_init__(self):
        if self.accepted and (self.v_bit != 1 or self.reason is not Reason.OK):
            raise ValueError("an accepted verdict needs v_bit = 1 and reason Ok")


class Ruling(enum.Enum):
    VALID = "Valid"
    FORGED_REJECTED = "Forged-rejected"


@dataclass(frozen=True)
class Arbitration:
    ruling: Ruling
    fidelity: float


@dataclass
class ProtocolTranscript:
    kind: str
    n: int
    seed: int
    comparator: Comparator
    events: list[dict[str, Any]] = field(default_factory=list)
    verdict: dict[str, Any] = field(default_factory=dict)

    def record(self, phase: str, step: str, actor: str, action: str, **outcome: Any) -> None:
        self.events.append(
            {"phase": phase, "step": step, "actor": actor, "action": action, "outcome": outcome}
        )

    @property
    def accepted(self) -> bool:
        return bool(self.verdict.get("accepted"))

    def to_document(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "n": self.n,
            "seed": self.seed,
            "mode": self.comparator.describe(),
            "events": self.events,
            "verdict": self.verdict,
        }


def setup(n: int, rng: np.random.Generator) -> tuple[PartyKeys, TeleportRegister]:
    if not 1 <= n <= MAX_MESSAGE_QUBITS:
        raise SizeError(f"n must be in 1..{MAX_MESSAGE_QUBITS}, got {n}")
    return PartyKeys.random(n, rng), TeleportRegister.fresh(n)


def alice_sign(
    msg: MessageSpec,
    keys: PartyKeys,
    reg: TeleportRegister,
    rng: np.random.Generator,
    *,
    force_outcomes: Sequence[BellOutcome] | None = None,
) -> tuple[SignaturePackage, PermutationKey, TeleportRegister]:
    """Signing phase. ``force_outcomes`` postselects the Bell results (branch checks)."""
    n = msg.n
    if keys.n != n or reg.n != n:
        raise SizeError("message, keys and register disagree on n")
    if force_outcomes is not None and len(force_outcomes) != n:
        raise SizeError("need one forced outcome per qubit")

    k_r = PermutationKey.random(n, rng)
    p_enc = [encrypt(msg.state(), k_r) for _ in range(3)]
    s_a = encrypt(p_enc[0], keys.k_a)

    state = reg.load_message(p_enc[1]).state
    m_a = []
    for i in range(1, n + 1):
        force = None if force_outcomes is None else force_outcomes[i - 1]
        outcome, state = bell_measure(state, i, reg.alice_half(i), rng, force=force)
        m_a.append(outcome)

    pkg = SignaturePackage(p_enc[2], s_a, tuple(m_a))
    return pkg, k_r, TeleportRegister(n, state)


def _mask(state: StateVector, r_b: Sequence[int]) -> StateVector:
    for i, bit in enumerate(r_b, start=1):
        if bit:
            state = apply_pauli(state, i, "X")
    return state


def bob_blind(pkg: SignaturePackage, keys: PartyKeys) -> StateVector:
    if pkg.n != keys.n:
        raise SizeError("package and keys disagree on n")
    payload = _mask(tensor(pkg.p_enc_3, pkg.s_a), keys.r_b)
    return encrypt(tensor(payload, zero_state(1)), keys.k_b)


def trent_verify(
    y_b: StateVector, keys: PartyKeys, comparator: Comparator, rng: np.random.Generator
) -> tuple[StateVector, TrentResult]:
    """Returns Y_T and Trent's finding.

    A dirty ancilla or an entangled P_enc3|S_A cut yields |V> = |0> rather
    than an abort, since |V> is Trent's only signal to Bob.
    """
    n = keys.n
    if y_b.num_qubits != 2 * n + 1:
        raise SizeError(f"Y_B must have {2 * n + 1} qubits, got {y_b.num_qubits}")
    slot = 2 * n + 1
    x = decrypt(y_b, keys.k_b)
    dirty, x = measure_qubit(x, slot, rng)
    if dirty:
        # reuse the ancilla as |V> = |0>
        x = apply_pauli(x, slot, "X")
    x = _mask(x, keys.r_b)
    unblinded, _ = schmidt_factor(x, 2 * n)
    if dirty:
        return encrypt(x, keys.k_b), TrentResult(0, Reason.ANCILLA_DIRTY, unblinded)
    try:
        p_enc_3, s_a = schmidt_factor(unblinded, n)
    except NonSeparableError:
        return encrypt(x, keys.k_b), TrentResult(0, Reason.NON_SEPARABLE, unblinded)

    s_t = encrypt(p_enc_3, keys.k_a)
    f = fidelity(s_a, s_t)
    v_bit = int(comparator.equal(s_a, s_t, rng))
    recovered = decrypt(s_t, keys.k_a)
    y_t = encrypt(tensor(tensor(recovered, s_a), basis_state(1, [v_bit])), keys.k_b)
    reason = Reason.OK if v_bit else Reason.V_ZERO
    return y_t, TrentResult(v_bit, reason, unblinded, f)


def bob_verify(
    y_t: StateVector,
    pkg: SignaturePackage,
    keys: PartyKeys,
    reg: TeleportRegister,
    comparator: Comparator,
    rng: np.random.Generator,
) -> Verdict:
    n = keys.n
    if y_t.num_qubits != 2 * n + 1 or pkg.n != n or reg.n != n:
        raise SizeError("Y_T, package, keys and register disagree on n")
    x = decrypt(y_t, keys.k_b)
    v_bit, x = measure_qubit(x, 2 * n + 1, rng)
    if v_bit == 0:
        return Verdict(0, False, Reason.V_ZERO)
    try:
        payload, _ = schmidt_factor(x, 2 * n)
        p_enc_3, _ = schmidt_factor(payload, n)
    except NonSeparableError:
        return Verdict(1, False, Reason.NON_SEPARABLE)

    state = reg.state
    for i, outcome in enumerate(pkg.m_a, start=1):
        for pauli in teleport_correction(outcome):
            state = apply_pauli(state, reg.bob_half(i), pauli)
    try:
        p_enc_b = TeleportRegister(n, state).bob_state()
    except NonSeparableError:
        return Verdict(1, False, Reason.TELEPORT_MISMATCH, p_enc_3)
    f = fidelity(p_enc_b, p_enc_3)
    if not comparator.equal(p_enc_b, p_enc_3, rng):
        return Verdict(1, False, Reason.TELEPORT_MISMATCH, p_enc_3, f)
    return Verdict(1, True, Reason.OK, p_enc_3, f)


def bob_finalize(p_enc_3: StateVector, k_r: PermutationKey) -> StateVector:
    return decrypt(p_enc_3, k_r)


def trent_arbitrate(
    s_claim: StateVector,
    k_r: PermutationKey,
    p_claim: StateVector,
    keys: PartyKeys,
    comparator: Comparator,
    rng: np.random.Generator,
) -> Arbitration:
    """Dispute check: is ``s_claim`` equal to E_{K_A}(E_{K_R}(p_claim))?"""
    n = keys.n
    if s_claim.num_qubits != n or p_claim.num_qubits != n or len(k_r) != n:
        raise SizeError("claim components must all be n-qubit sized")
    s_t = encrypt(encrypt(p_claim, k_r), keys.k_a)
    ok = comparator.equal(s_t, s_claim, rng)
    return Arbitration(Ruling.VALID if ok else Ruling.FORGED_REJECTED, fidelity(s_t, s_claim))


def flip_signature_qubit(pkg: SignaturePackage, rng: np.random.Generator) -> tuple[SignaturePackage, int]:
    """Channel tampering: X on one uniformly chosen qubit of S_A."""
    q = int(rng.integers(1, pkg.n + 1))
    return SignaturePackage(pkg.p_enc_3, apply_pauli(pkg.s_a, q, "X"), pkg.m_a), q


Tamper = Callable[[SignaturePackage, np.random.Generator], tuple[SignaturePackage, Any]]


def run_honest(
    n: int,
    msg: MessageSpec | None = None,
    comparator: Comparator | None = None,
    seed: int = 0,
    *,
    tamper: Tamper | None = None,
) -> ProtocolTranscript:
    """Run I1 through V7 once and log every step.

    ``msg=None`` draws a random message from the run's generator. ``tamper``
    intercepts the package between S4 and V1.
    """
    comparator = comparator or Comparator()
    rng = np.random.default_rng(seed)
    t = ProtocolTranscript("honest-run", n, seed, comparator)
    try:
        _run_steps(t, n, msg, comparator, rng, tamper)
    except (SizeError, NormalizationError, NonSeparableError, ValueError) as exc:
        log.warning("protocol run failed: %s", exc)
        t.record("error", "-", "orchestrator", "abort", error=f"{type(exc).__name__}: {exc}")
        t.verdict = {"v_bit": 0, "accepted": False, "reason": "Error", "final_fidelity": None}
    return t


def _run_steps(t, n, msg, comparator, rng, tamper) -> None:
    keys, reg = setup(n, rng)
    if msg is None:
        msg = MessageSpec.random(n, rng)
    if msg.n != n:
        raise SizeError(f"message has {msg.n} qubits, expected {n}")
    t.record("initializing", "I1", "Trent", "share_keys", **keys.to_json())
    t.record("initializing", "I2", "Alice", "distribute_bell_pairs", pairs=n, message=msg.to_text())

    pkg, k_r, reg = alice_sign(msg, keys, reg, rng)
    t.record("signing", "S1", "Alice", "encrypt_copies", k_r=list(k_r.mapping))
    t.record("signing", "S2", "Alice", "sign", s_a=state_to_json(pkg.s_a))
    t.record("signing", "S3", "Alice", "bell_measure", m_a=[o.value for o in pkg.m_a])
    t.record("signing", "S4", "Alice", "send_package", p_enc_3=state_to_json(pkg.p_enc_3))

    if tamper is not None:
        pkg, detail = tamper(pkg, rng)
        t.record("signing", "S4", "Channel", "tamper", detail=detail)

    y_b = bob_blind(pkg, keys)
    t.record("verifying", "V1", "Bob", "blind_and_encrypt", qubits=y_b.num_qubits)

    y_t, found = trent_verify(y_b, keys, comparator, rng)
    unblind_f = fidelity(found.unblinded, tensor(pkg.p_enc_3, pkg.s_a))
    t.record(
        "verifying", "V2", "Trent", "compare_signature",
        v_bit=found.v_bit, reason=found.reason.value,
        fidelity_sa_st=found.fidelity_sa_st, unblind_fidelity=unblind_f,
    )
    t.record("verifying", "V3", "Trent", "return_y_t", qubits=y_t.num_qubits)

    verdict = bob_verify(y_t, pkg, keys, reg, comparator, rng)
    t.record("verifying", "V4", "Bob", "measure_v", v_bit=verdict.v_bit)
    final_f = None
    if verdict.v_bit:
        t.record(
            "verifying", "V5", "Bob", "teleport_compare",
            accepted=verdict.accepted, teleport_fidelity=verdict.teleport_fidelity,
        )
    if verdict.accepted:
        t.record("verifying", "V6", "Alice", "publish_k_r", k_r=list(k_r.mapping))
        recovered = bob_finalize(verdict.p_enc_3, k_r)
        final_f = fidelity(recovered, msg.state())
        t.record("verifying", "V7", "Bob", "decrypt_message", final_fidelity=final_f)
    t.verdict = {
        "v_bit": verdict.v_bit,
        "accepted": verdict.accepted,
        "reason": verdict.reason.value,
        "final_fidelity": final_f,
    }
