"""
Command-line harness.

    cnot-aqs honest-run   --n 3 --seed 7 [--message SPEC|random]
    cnot-aqs forge        --n 4 --trials 100 --seed 1 [--exhaustive-keys]
    cnot-aqs cipher-check --n 5 [--exhaustive-keys]
    cnot-aqs arbitrate    --n 3 --k-r 2,3,1 [--k-a ...] [--claim SPEC] [--message SPEC]

Every subcommand takes --seed, --mode {exact,swap}, --reps and --out. The
JSON document goes to --out when given (with a one-line summary on stdout),
otherwise to stdout.

Exit codes: 0 accepted / valid / checks passed, 1 cipher check failed,
2 signature rejected, 3 forgery accepted, 4 usage or I/O error.
"""
from __future__ import annotations

import argparse
import itertools
import sys
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import cipher
from .errors import InvalidKeyError, NormalizationError, SizeError
from .forgery import AttackReport, explain_fixed_points, run_forgery
from .protocol import (
    MAX_MESSAGE_QUBITS,
    Comparator,
    MessageSpec,
    Mode,
    PartyKeys,
    ProtocolTranscript,
    Ruling,
    run_honest,
    trent_arbitrate,
)
from .serialize import SCHEMA_VERSION, dumps
from .statevec import basis_state, fidelity, from_product, zero_state

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_REJECTED = 2
EXIT_FORGERY_ACCEPTED = 3
EXIT_USAGE = 4

MAX_SEED = 2 ** 64 - 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


@dataclass
class RunConfig:
    subcommand: str
    n: int
    seed: int
    mode: Mode
    reps: int
    trials: int
    message: str
    out: str | None
    exhaustive_keys: bool = False
    k_a: str | None = None
    k_r: str | None = None
    claim: str | None = None

    def __post_init__(self):
        if self.n < 1:
            raise UsageError("--n must be >= 1")
        if self.trials < 1:
            raise UsageError("--trials must be >= 1")
        if self.reps < 1:
            raise UsageError("--reps must be >= 1")
        if not 0 <= self.seed <= MAX_SEED:
            raise UsageError("--seed must be a 64-bit unsigned integer")

    @property
    def comparator(self) -> Comparator:
        return Comparator(self.mode, self.reps)


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--n", type=int, default=3, help="message size in qubits")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.EXACT.value)
    common.add_argument("--reps", type=int, default=20, help="SWAP-test repetitions in swap mode")
    common.add_argument("--trials", type=int, default=100)
    common.add_argument("--message", default="random", help='"re,im,re,im;..." per qubit, or "random"')
    common.add_argument("--out", default=None, help="write the JSON document here")
    common.add_argument("--exhaustive-keys", action="store_true")

    parser = _Parser(prog="cnot-aqs", description="Chained-CNOT arbitrated quantum signature simulator")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    sub.add_parser("honest-run", parents=[common], help="run the full protocol once")
    sub.add_parser("forge", parents=[common], help="submit forged claims to the arbitrator")
    sub.add_parser("cipher-check", parents=[common], help="cipher roundtrip, GF(2) oracle and fixed points")
    arb = sub.add_parser("arbitrate", parents=[common], help="one dispute check from serialized inputs")
    arb.add_argument("--k-a", default=None, help="Alice-Trent key, e.g. 3,1,2 (random if omitted)")
    arb.add_argument("--k-r", default=None, help="published K_R (random if omitted)")
    arb.add_argument("--claim", default=None, help="claimed signature as a product spec (default |0..0>)")
    return parser


def parse_args(argv: Sequence[str]) -> RunConfig:
    ns = _build_parser().parse_args(list(argv))
    return RunConfig(
        subcommand=ns.subcommand,
        n=ns.n,
        seed=ns.seed,
        mode=Mode(ns.mode),
        reps=ns.reps,
        trials=ns.trials,
        message=ns.message,
        out=ns.out,
        exhaustive_keys=ns.exhaustive_keys,
        k_a=getattr(ns, "k_a", None),
        k_r=getattr(ns, "k_r", None),
        claim=getattr(ns, "claim", None),
    )


def emit_transcript(document: dict[str, Any] | ProtocolTranscript | AttackReport, destination=None) -> str:
    """Write the canonical JSON form to a path, a text stream, or stdout."""
    if not isinstance(document, dict):
        document = document.to_document()
    text = dumps(document)
    if destination is None:
        sys.stdout.write(text)
    elif hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _message(cfg: RunConfig) -> MessageSpec | None:
    if cfg.message == "random":
        return None
    msg = MessageSpec.parse(cfg.message)
    if msg.n != cfg.n:
        raise UsageError(f"--message describes {msg.n} qubits but --n is {cfg.n}")
    return msg


def _honest(cfg: RunConfig) -> tuple[dict[str, Any], str, int]:
    if cfg.n > MAX_MESSAGE_QUBITS:
        raise UsageError(f"honest-run supports n <= {MAX_MESSAGE_QUBITS}")
    t = run_honest(cfg.n, _message(cfg), cfg.comparator, cfg.seed)
    v = t.verdict
    summary = f"honest-run n={cfg.n} seed={cfg.seed}: accepted={v['accepted']} reason={v['reason']}"
    return t.to_document(), summary, EXIT_OK if t.accepted else EXIT_REJECTED


def _forge(cfg: RunConfig) -> tuple[dict[str, Any], str, int]:
    if cfg.exhaustive_keys and cfg.n > 5:
        raise UsageError("--exhaustive-keys for forge supports n <= 5")
    report = run_forgery(cfg.n, cfg.trials, cfg.comparator, cfg.seed, exhaustive=cfg.exhaustive_keys)
    summary = (
        f"forge n={cfg.n}: {report.acceptance_count}/{len(report.trials)} forged claims accepted "
        f"(rate {report.acceptance_rate})"
    )
    code = EXIT_FORGERY_ACCEPTED if report.acceptance_count else EXIT_REJECTED
    return report.to_document(), summary, code


def _cipher_check(cfg: RunConfig) -> tuple[dict[str, Any], str, int]:
    n = cfg.n
    if n > 10:
        raise UsageError("cipher-check supports n <= 10")
    if cfg.exhaustive_keys and n > 8:
        raise UsageError("--exhaustive-keys for cipher-check supports n <= 8")
    rng = np.random.default_rng(cfg.seed)
    if cfg.exhaustive_keys:
        keys = list(cipher.all_keys(n))
    else:
        keys = [cipher.PermutationKey.random(n, rng) for _ in range(cfg.trials)]

    zeros = zero_state(n)
    zero_err = max(
        float(np.max(np.abs(cipher.encrypt(zeros, k).amplitudes - zeros.amplitudes))) for k in keys
    )

    roundtrip_min = 1.0
    for k in keys[:100]:
        s = MessageSpec.random(n, rng).state()
        roundtrip_min = min(roundtrip_min, fidelity(cipher.decrypt(cipher.encrypt(s, k), k), s))

    oracle_ok = True
    if n <= 6:
        for k in keys[:20]:
            m = cipher.gf2_matrix(k)
            for bits in itertools.product((0, 1), repeat=n):
                got = cipher.encrypt(basis_state(n, bits), k).amplitudes
                want = basis_state(n, cipher.gf2_apply(m, bits)).amplitudes
                if not np.array_equal(got, want):
                    oracle_ok = False

    census = explain_fixed_points(n, min(len(keys), 50), rng)
    checks = {
        "zero_fixed_point": zero_err < 1e-12,
        "roundtrip": roundtrip_min >= 1 - 1e-10,
        "gf2_oracle": oracle_ok,
        "census_contains_zero": census.all_contain_zero,
    }
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "cipher-check",
        "n": n,
        "seed": cfg.seed,
        "mode": cfg.comparator.describe(),
        "keys_checked": len(keys),
        "exhaustive": cfg.exhaustive_keys,
        "zero_max_amplitude_error": zero_err,
        "roundtrip_min_fidelity": roundtrip_min,
        "gf2_oracle_checked": n <= 6,
        "census": census.to_json(),
        "verdict": {"checks": checks, "passed": all(checks.values())},
    }
    summary = f"cipher-check n={n} keys={len(keys)}: " + " ".join(
        f"{name}={'ok' if ok else 'FAIL'}" for name, ok in checks.items()
    )
    return doc, summary, EXIT_OK if all(checks.values()) else EXIT_CHECK_FAILED


def _arbitrate(cfg: RunConfig) -> tuple[dict[str, Any], str, int]:
    n = cfg.n
    rng = np.random.default_rng(cfg.seed)
    keys = PartyKeys.random(n, rng)
    if cfg.k_a is not None:
        keys = PartyKeys(cipher.PermutationKey.parse(cfg.k_a), keys.k_b, keys.r_b)
    k_r = cipher.PermutationKey.parse(cfg.k_r) if cfg.k_r else cipher.PermutationKey.random(n, rng)
    p_claim = zero_state(n) if cfg.message == "random" else from_product(MessageSpec.parse(cfg.message).qubit_params)
    s_claim = zero_state(n) if cfg.claim is None else from_product(MessageSpec.parse(cfg.claim).qubit_params)
    if len(keys.k_a) != n or len(k_r) != n:
        raise UsageError(f"keys must have length {n}")
    ruling = trent_arbitrate(s_claim, k_r, p_claim, keys, cfg.comparator, rng)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "arbitrate",
        "n": n,
        "seed": cfg.seed,
        "mode": cfg.comparator.describe(),
        "k_a": list(keys.k_a.mapping),
        "k_r": list(k_r.mapping),
        "fidelity_st_claim": ruling.fidelity,
        "verdict": {"ruling": ruling.ruling.value},
    }
    summary = f"arbitrate n={n}: {ruling.ruling.value} (fidelity {ruling.fidelity})"
    return doc, summary, EXIT_OK if ruling.ruling is Ruling.VALID else EXIT_REJECTED


_COMMANDS = {
    "honest-run": _honest,
    "forge": _forge,
    "cipher-check": _cipher_check,
    "arbitrate": _arbitrate,
}


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
        doc, summary, code = _COMMANDS[cfg.subcommand](cfg)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (InvalidKeyError, NormalizationError, SizeError, ValueError) as exc:
        print(f"cnot-aqs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        emit_transcript(doc, cfg.out)
    except OSError as exc:
        print(f"cnot-aqs: cannot write {cfg.out}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.out is not None:
        print(summary)
    return code


if __name__ == "__main__":
    sys.exit(main())
