"""Command-line interface: encode / audit / security.

Every run emits one machine-readable report with the stable top-level keys
{command, params, results, residuals, verdict, seed}.  Identical arguments
and seed produce byte-identical JSON.  Exit codes: 0 success, 2 validation
error, 3 decode failure (no code-word match), 4 security-abort verdict.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from . import coding, entanglement, security, statevec

ENV_SEED = "DENSECODE_SEED"
MAX_AUDIT_QUBITS = 12  # every-bipartition checks stay desk-scale up to here
MAX_GRAM_BITS = 10


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    fmt: str = "json"
    output: Optional[str] = None
    tolerance: float = 1e-9
    cert_tolerance: float = security.CERT_TOLERANCE
    message: Optional[str] = None
    senders: Optional[int] = None
    ghz: Optional[int] = None
    bell: Optional[int] = None
    dnk: Optional[tuple[int, int]] = None
    n: Optional[int] = None
    attack: str = "none"
    rounds: int = 1
    threshold: float = 0.0


def _jsonable(value: Any) -> Any:
    """Coerce numpy scalars/containers into plain JSON types."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    return value


def _sparse_amplitudes(state: statevec.StateVector) -> list[list[float]]:
    out = []
    for idx in np.nonzero(np.abs(state.amplitudes) > 1e-12)[0]:
        a = state.amplitudes[idx]
        out.append([int(idx), float(a.real) + 0.0, float(a.imag) + 0.0])
    return out


def _operator_entry(ps: statevec.PauliString) -> dict[str, Any]:
    return {
        "labels": [lab.value for lab in ps.labels],
        "targets": list(ps.targets),
        "text": str(ps),
    }


def _report(command: str, params: dict, results: dict, residuals: dict,
            verdict: str, seed: int) -> dict:
    return _jsonable(
        {
            "command": command,
            "params": params,
            "results": results,
            "residuals": residuals,
            "verdict": verdict,
            "seed": seed,
        }
    )


# ---------------------------------------------------------------------------
# encode


def cmd_encode(cfg: RunConfig) -> tuple[dict, int]:
    if cfg.message is None:
        raise ValueError("encode requires --message")
    msg = coding.Message.from_string(cfg.message)
    n = len(msg)
    results: dict[str, Any] = {"message": str(msg), "n_bits": n}
    if cfg.senders is None:
        operator = coding.encode_ghz(msg)
        state = coding.encoded_state(msg)
        results["operator"] = _operator_entry(operator)
        results["parties"] = None
    else:
        spec = coding.dnk_spec(n, cfg.senders)
        per_party = coding.dnk_encode(msg, spec)
        state = coding.dnk_encoded_state(msg, spec)
        results["operator"] = _operator_entry(coding.dnk_combined_string(msg, spec))
        results["layout"] = {
            "ghz_size": spec.ghz_size,
            "bell_pairs": spec.bell_pairs,
            "bob_qubits": list(spec.bob_qubits),
        }
        results["parties"] = {
            str(share.party): {
                "qubits": list(share.qubits),
                "bits": list(share.bits),
                "operator": _operator_entry(per_party[share.party]),
            }
            for share in spec.shares
        }
    results["amplitudes"] = _sparse_amplitudes(state)
    norm_dev = abs(float(np.sum(np.abs(state.amplitudes) ** 2)) - 1.0)
    params = {"message": cfg.message, "senders": cfg.senders}
    return _report("encode", params, results, {"norm_deviation": norm_dev}, "ok", cfg.seed), 0


# ---------------------------------------------------------------------------
# audit


def _audit_common(state: statevec.StateVector, alice: list[int], tol: float) -> tuple[dict, dict]:
    opt = entanglement.optimality_report(state, alice, tol=tol)
    results = {
        "capacity": opt.capacity,
        "holevo_bound": opt.holevo_bound,
        "alice_size_sufficient": opt.alice_size_sufficient,
        "bob_marginal_maximally_mixed": opt.bob_marginal_maximally_mixed,
        "optimal": opt.optimal,
    }
    residuals = {
        "capacity_gap": abs(opt.capacity - opt.holevo_bound),
        "bob_marginal_residual": opt.bob_marginal_residual,
    }
    return results, residuals


def _gram_entry(report: coding.GramReport) -> dict:
    return {
        "n_bits": report.n_bits,
        "dimension": report.dimension,
        "max_off_diagonal": report.max_off_diagonal,
        "max_diagonal_deviation": report.max_diagonal_deviation,
    }


def cmd_audit(cfg: RunConfig) -> tuple[dict, int]:
    tol = cfg.tolerance
    chosen = [x for x in (cfg.ghz, cfg.bell, cfg.dnk) if x is not None]
    if len(chosen) != 1:
        raise ValueError("audit requires exactly one of --ghz, --bell, --dnk")

    if cfg.ghz is not None:
        n = cfg.ghz
        if not 2 <= n <= MAX_AUDIT_QUBITS:
            raise ValueError(f"--ghz supports 2..{MAX_AUDIT_QUBITS} qubits, got {n}")
        state = statevec.ghz_state(n)
        results, residuals = _audit_common(state, list(range(1, n)), tol)
        ame = entanglement.is_ame(state, tol=tol)
        results["ame"] = ame.is_ame
        results["gme"] = entanglement.is_gme_pure(state, tol=tol)
        residuals["ame_max_residual"] = ame.max_residual
        if n <= MAX_GRAM_BITS:
            gram = coding.verify_code_orthonormality(n)
            results["orthonormality"] = _gram_entry(gram)
            residuals["gram_residual"] = gram.residual()
        else:
            results["orthonormality"] = None
        params = {"ghz": n, "tolerance": tol}

    elif cfg.bell is not None:
        pairs = cfg.bell
        if not 1 <= pairs <= 10:
            raise ValueError(f"--bell supports 1..10 pairs, got {pairs}")
        state = coding.bell_pairs_state(pairs)
        alice = [2 * p + 1 for p in range(pairs)]
        results, residuals = _audit_common(state, alice, tol)
        rho_a = entanglement.reduced_density(state, alice)
        dim = 2**pairs
        alice_residual = float(np.max(np.abs(rho_a.matrix - np.eye(dim) / dim)))
        residuals["alice_marginal_residual"] = alice_residual
        if 2 * pairs <= MAX_AUDIT_QUBITS:
            ame = entanglement.is_ame(state, tol=tol)
            results["ame"] = ame.is_ame
            results["gme"] = entanglement.is_gme_pure(state, tol=tol)
            residuals["ame_max_residual"] = ame.max_residual
        else:
            results["ame"] = None
            results["gme"] = None
        if pairs <= MAX_GRAM_BITS // 2:
            gram = coding.bell_code_basis(pairs).gram()
            off = gram - np.diag(np.diag(gram))
            results["orthonormality"] = {
                "n_bits": 2 * pairs,
                "dimension": 4**pairs,
                "max_off_diagonal": float(np.max(np.abs(off))),
                "max_diagonal_deviation": float(np.max(np.abs(np.diag(gram) - 1.0))),
            }
            residuals["gram_residual"] = max(
                results["orthonormality"]["max_off_diagonal"],
                results["orthonormality"]["max_diagonal_deviation"],
            )
        else:
            results["orthonormality"] = None
        params = {"bell": pairs, "tolerance": tol}

    else:
        n, k = cfg.dnk
        if not 2 <= n <= MAX_AUDIT_QUBITS:
            raise ValueError(f"--dnk supports 2..{MAX_AUDIT_QUBITS} bits, got {n}")
        spec = coding.dnk_spec(n, k)
        state = coding.dnk_state(spec)
        results, residuals = _audit_common(state, list(spec.alice_qubits), tol)
        results["layout"] = {
            "ghz_size": spec.ghz_size,
            "bell_pairs": spec.bell_pairs,
            "bob_qubits": list(spec.bob_qubits),
            "parties": {
                str(s.party): {"qubits": list(s.qubits), "bits": list(s.bits)}
                for s in spec.shares
            },
        }
        rng = np.random.default_rng(cfg.seed)
        sample = min(2**n, 64)
        picks = sorted(rng.choice(2**n, size=sample, replace=False).tolist())
        failures = 0
        for idx in picks:
            msg = coding.Message(tuple((idx >> (n - 1 - i)) & 1 for i in range(n)))
            if coding.dnk_decode(coding.dnk_encoded_state(msg, spec), spec) != msg:
                failures += 1
        results["roundtrip"] = {"messages_checked": sample, "failures": failures}
        params = {"dnk": [n, k], "tolerance": tol}

    verdict = "optimal" if results.get("optimal") else "suboptimal"
    return _report("audit", params, results, residuals, verdict, cfg.seed), 0


# ---------------------------------------------------------------------------
# security


def _load_attack(spec_text: str) -> Optional[security.EveAttack]:
    if spec_text == "none":
        return None
    if spec_text in security.ATTACK_PRESETS:
        return security.ATTACK_PRESETS[spec_text]()
    if spec_text.startswith("file:"):
        path = spec_text[len("file:"):]
        try:
            with open(path, "r", encoding="utf-8") as fh:
                rows = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValueError(f"cannot read attack matrix file {path!r}: {exc}") from exc
        try:
            matrix = np.array(
                [[complex(re, im) for re, im in row] for row in rows], dtype=complex
            )
        except (TypeError, ValueError) as exc:
            raise ValueError(
                f"malformed attack matrix in {path!r}: expected 4 rows of 4 "
                f"[re, im] pairs ({exc})"
            ) from exc
        return security.EveAttack(matrix)
    raise ValueError(
        f"unknown attack {spec_text!r}: use none, "
        f"{', '.join(sorted(security.ATTACK_PRESETS))}, or file:PATH"
    )


def cmd_security(cfg: RunConfig) -> tuple[dict, int]:
    if cfg.n is None:
        raise ValueError("security requires --n")
    if not 2 <= cfg.n <= MAX_AUDIT_QUBITS:
        raise ValueError(f"--n supports 2..{MAX_AUDIT_QUBITS} qubits, got {cfg.n}")
    if cfg.rounds < 1:
        raise ValueError(f"--rounds must be at least 1, got {cfg.rounds}")
    attack = _load_attack(cfg.attack)

    state = statevec.ghz_state(cfg.n)
    if attack is not None:
        state = security.apply_eve(state, attack)
    exact = security.detection_report(state, n_protocol=cfg.n)

    rng = np.random.default_rng(cfg.seed)
    sim = security.security_simulation(
        cfg.n, attack, cfg.rounds, rng, threshold=cfg.threshold
    )

    results: dict[str, Any] = {
        "n": cfg.n,
        "attack": cfg.attack,
        "exact": {
            "computational_inconsistency": exact.computational_inconsistency,
            "hadamard_inconsistency": exact.hadamard_inconsistency,
            "detection_probability": exact.probability,
        },
        "empirical": {
            "rounds": sim.rounds,
            "computational_rounds": sim.computational_rounds,
            "computational_consistent": sim.computational_consistent,
            "computational_rate": sim.computational_rate,
            "hadamard_rounds": sim.hadamard_rounds,
            "hadamard_consistent": sim.hadamard_consistent,
            "hadamard_rate": sim.hadamard_rate,
            "detections": sim.detections,
            "detection_rate": sim.detection_rate,
        },
        "threshold": cfg.threshold,
    }
    residuals: dict[str, Any] = {
        "empirical_vs_exact": abs(sim.detection_rate - exact.probability),
    }
    if attack is not None:
        cert = security.undetectable_certificate(attack, tol=cfg.cert_tolerance)
        results["certificate"] = {
            "flip_01": cert.flip_01,
            "flip_10": cert.flip_10,
            "branch_mismatch_min_phase": cert.branch_mismatch_min_phase,
            "branch_mismatch": cert.branch_mismatch,
            "undetectable": cert.undetectable,
        }
        residuals["certificate_max"] = max(
            cert.flip_01, cert.flip_10, cert.branch_mismatch
        )
    else:
        results["certificate"] = None

    verdict = "abort" if sim.aborted else "pass"
    params = {
        "n": cfg.n,
        "attack": cfg.attack,
        "rounds": cfg.rounds,
        "threshold": cfg.threshold,
        "cert_tolerance": cfg.cert_tolerance,
    }
    report = _report("security", params, results, residuals, verdict, cfg.seed)
    return report, (4 if sim.aborted else 0)


# ---------------------------------------------------------------------------
# rendering and entry point


def _flatten(prefix: str, value: Any, rows: list[tuple[str, str]]) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            _flatten(f"{prefix}.{key}" if prefix else key, value[key], rows)
    elif isinstance(value, list) and value and isinstance(value[0], (dict, list)):
        rows.append((prefix, json.dumps(value, sort_keys=True)))
    elif isinstance(value, list):
        rows.append((prefix, ";".join(str(v) for v in value)))
    else:
        rows.append((prefix, json.dumps(value)))


def render_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    rows: list[tuple[str, str]] = []
    _flatten("", report, rows)
    if fmt == "csv":
        return "".join(f"{key},{value}\n" for key, value in rows)
    if fmt == "text":
        width = max(len(key) for key, _ in rows)
        return "".join(f"{key.ljust(width)}  {value}\n" for key, value in rows)
    raise ValueError(f"unknown format {fmt!r}")


def _write_output(text: str, output: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(output))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".densecode-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp_path, output)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def _default_seed() -> int:
    raw = os.environ.get(ENV_SEED)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"{ENV_SEED} must be an integer, got {raw!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="densecode",
        description="Simulate and audit dense-coding protocols.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${ENV_SEED} or 0)")
        p.add_argument("--format", choices=("json", "csv", "text"), default="json")
        p.add_argument("--output", default=None, help="write the report to a file")
        p.add_argument("--tolerance", type=float, default=1e-9)

    enc = sub.add_parser("encode", help="encode a classical message")
    common(enc)
    enc.add_argument("--message", required=True, help="bit string, length >= 2")
    enc.add_argument("--senders", type=int, default=None,
                     help="split across this many senders (distributed layout)")

    aud = sub.add_parser("audit", help="verify code and entanglement properties")
    common(aud)
    aud.add_argument("--ghz", type=int, default=None, metavar="N")
    aud.add_argument("--bell", type=int, default=None, metavar="PAIRS")
    aud.add_argument("--dnk", type=int, nargs=2, default=None, metavar=("N", "K"))

    sec = sub.add_parser("security", help="simulate the eavesdropping check")
    common(sec)
    sec.add_argument("--n", type=int, required=True, help="protocol qubits")
    sec.add_argument("--attack", default="none",
                     help="none, identity, cnot, swap0, or file:PATH")
    sec.add_argument("--rounds", type=int, default=10000)
    sec.add_argument("--threshold", type=float, default=0.0,
                     help="abort when the detection rate exceeds this")
    sec.add_argument("--cert-tolerance", type=float, default=security.CERT_TOLERANCE)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        seed=args.seed if args.seed is not None else _default_seed(),
        fmt=args.format,
        output=args.output,
        tolerance=args.tolerance,
        cert_tolerance=getattr(args, "cert_tolerance", security.CERT_TOLERANCE),
        message=getattr(args, "message", None),
        senders=getattr(args, "senders", None),
        ghz=getattr(args, "ghz", None),
        bell=getattr(args, "bell", None),
        dnk=tuple(args.dnk) if getattr(args, "dnk", None) else None,
        n=getattr(args, "n", None),
        attack=getattr(args, "attack", "none"),
        rounds=getattr(args, "rounds", 1),
        threshold=getattr(args, "threshold", 0.0),
    )


_COMMANDS = {"encode": cmd_encode, "audit": cmd_audit, "security": cmd_security}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        report, code = _COMMANDS[cfg.command](cfg)
        _write_output(render_report(report, cfg.fmt), cfg.output)
        return code
    except coding.NoMatchError as exc:
        print(f"densecode: decode failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"densecode: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
