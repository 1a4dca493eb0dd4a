"""
Eve's forgery against the arbitrated signature.

Eve never touches Alice's signing path. She hands Trent the claim
(|0^n>, K_R) as a signature for |0^n>, with K_R any permutation. Every CNOT
leaves |0...0> alone, so E_{K_A}(E_{K_R}(|0^n>)) = |0^n> whatever K_A is and
Trent's dispute check accepts.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .cipher import PermutationKey, all_keys, encrypt, fixed_basis_states
from .protocol import Comparator, PartyKeys, Ruling, trent_arbitrate
from .serialize import SCHEMA_VERSION
from .statevec import StateVector, zero_state

CENSUS_MAX_QUBITS = 10

NON_REPUDIATION_NOTE = (
    "A third party produced a signature the arbitrator accepts as Alice's, "
    "so an accepted signature no longer proves Alice signed it; Alice can "
    "disown a genuine signature by pointing to forgeries."
)


@dataclass(frozen=True)
class ForgedClaim:
    s_e: StateVector
    k_r: PermutationKey
    p_e: StateVector


@dataclass(frozen=True)
class FixedPointCensus:
    n: int
    keys: tuple[PermutationKey, ...]
    sizes: tuple[int, ...]
    all_contain_zero: bool

    def to_json(self) -> dict[str, Any]:
        hist = Counter(self.sizes)
        return {
            "n": self.n,
            "keys_sampled": len(self.keys),
            "all_contain_zero": self.all_contain_zero,
            "fixed_set_sizes": {str(k): hist[k] for k in sorted(hist)},
            "min_fixed": min(self.sizes),
            "max_fixed": max(self.sizes),
        }


@dataclass
class AttackReport:
    n: int
    seed: int
    comparator: Comparator
    exhaustive: bool = False
    trials: list[dict[str, Any]] = field(default_factory=list)
    census: FixedPointCensus | None = None

    @property
    def acceptance_count(self) -> int:
        return sum(1 for t in self.trials if t["verdict"] == Ruling.VALID.value)

    @property
    def acceptance_rate(self) -> float:
        return self.acceptance_count / len(self.trials) if self.trials else 0.0

    def to_document(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "forgery",
            "n": self.n,
            "seed": self.seed,
            "mode": self.comparator.describe(),
            "exhaustive": self.exhaustive,
            "trials": self.trials,
            "census": None if self.census is None else self.census.to_json(),
            "verdict": {
                "trials": len(self.trials),
                "acceptance_count": self.acceptance_count,
                "acceptance_rate": self.acceptance_rate,
                "attack_succeeded": self.acceptance_count > 0,
                "implication": NON_REPUDIATION_NOTE,
            },
        }


def eve_forge(n: int, rng: np.random.Generator) -> ForgedClaim:
    if n < 1:
        raise ValueError("n must be >= 1")
    zeros = zero_state(n)
    return ForgedClaim(zeros, PermutationKey.random(n, rng), zeros)


def _trial_record(index: int, keys: PartyKeys, claim: ForgedClaim, comparator, rng) -> dict[str, Any]:
    ruling = trent_arbitrate(claim.s_e, claim.k_r, claim.p_e, keys, comparator, rng)
    return {
        "trial": index,
        "k_a": list(keys.k_a.mapping),
        "k_r": list(claim.k_r.mapping),
        "fidelity_st_se": ruling.fidelity,
        "verdict": ruling.ruling.value,
    }


def run_forgery(
    n: int,
    trials: int = 100,
    comparator: Comparator | None = None,
    seed: int = 0,
    *,
    exhaustive: bool = False,
    census_samples: int = 50,
) -> AttackReport:
    """Feed forged claims to Trent's arbitration and tally the rulings.

    Random mode: trial t draws fresh keys and a fresh claim from its own
    generator seeded with ``seed ^ t``. Exhaustive mode walks every (K_A, K_R)
    pair instead; K_B and r_B are irrelevant to arbitration and kept fixed.
    """
    if n < 1 or trials < 1:
        raise ValueError("n and trials must be >= 1")
    comparator = comparator or Comparator()
    report = AttackReport(n, seed, comparator, exhaustive)

    if exhaustive:
        rng = np.random.default_rng(seed)
        base = PartyKeys.random(n, rng)
        zeros = zero_state(n)
        pairs = itertools.product(all_keys(n), all_keys(n))
        for index, (k_a, k_r) in enumerate(pairs):
            keys = PartyKeys(k_a, base.k_b, base.r_b)
            report.trials.append(_trial_record(index, keys, ForgedClaim(zeros, k_r, zeros), comparator, rng))
    else:
        for index in range(trials):
            rng = np.random.default_rng(seed ^ index)
            keys = PartyKeys.random(n, rng)
            claim = eve_forge(n, rng)
            report.trials.append(_trial_record(index, keys, claim, comparator, rng))

    if n <= CENSUS_MAX_QUBITS and census_samples > 0:
        report.census = explain_fixed_points(n, census_samples, np.random.default_rng([seed, n]))
    return report


def explain_fixed_points(n: int, key_samples: int, rng: np.random.Generator) -> FixedPointCensus:
    """Sizes of the fixed basis-state sets for random keys (identity key included).

    The all-zeros string is fixed by every key, which is exactly the hole the
    forgery uses; any other fixed string marks a further forgeable message.
    """
    if n > CENSUS_MAX_QUBITS:
        raise ValueError(f"census limited to n <= {CENSUS_MAX_QUBITS}")
    keys = [PermutationKey.identity(n)]
    keys += [PermutationKey.random(n, rng) for _ in range(max(key_samples - 1, 0))]
    sets = [fixed_basis_states(k) for k in keys]
    zero = (0,) * n
    return FixedPointCensus(n, tuple(keys), tuple(len(s) for s in sets), all(zero in s for s in sets))


def zero_fixed_for_all_keys(n: int, tol: float = 1e-12) -> bool:
    """Exhaustive check that every key maps |0^n> to itself amplitude-wise."""
    zeros = zero_state(n)
    for key in all_keys(n):
        out = encrypt(zeros, key)
        if np.max(np.abs(out.amplitudes - zeros.amplitudes)) >= tol:
            return False
    return True
