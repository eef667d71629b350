"""Command-line front end.

Exit codes: 0 success, 1 zero-probability herald, 2 bad arguments or input.
JSON reports carry ``"schema": "dfs-herald/1"`` and are byte-identical for
identical arguments.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import dfs, protocols
from .detection import DetectionPattern, herald
from .errors import DfsHeraldError, ZeroProbabilityError
from .fock import FockState, fidelity, product_state

SCHEMA = "dfs-herald/1"
DEFAULT_SEED = 7


class InputError(Exception):
    pass


def _complex(args, name) -> complex:
    return complex(getattr(args, f"{name}_re"), getattr(args, f"{name}_im"))


def _add_qubit_args(p, name, default_re):
    p.add_argument(f"--{name}-re", type=float, default=default_re)
    p.add_argument(f"--{name}-im", type=float, default=0.0)


def _load_state(path) -> FockState:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read state file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc
    try:
        state = FockState.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid state file {path}: {exc}") from exc
    if not state.is_normalized(1e-8):
        raise InputError(f"state in {path} is not normalized (norm^2 = {state.norm_squared()})")
    return state


def _branch(outcome) -> dict:
    return {"pattern": outcome.pattern.to_dict(), "prob": outcome.probability}


# --- commands -----------------------------------------------------------------

def cmd_herald(args) -> dict:
    config = protocols.HnsgConfig(args.theta, args.phi, args.qutrit_zero)
    if args.pattern:
        try:
            pattern = DetectionPattern.from_dict(json.loads(args.pattern), protocols.HNSG_BASES)
        except (json.JSONDecodeError, ValueError, AttributeError) as exc:
            raise InputError(f"bad --pattern: {exc}") from exc
        outcome = herald(protocols.hnsg_output(config), pattern)
        cond = outcome.conditional.restrict(dfs.CODE_RAILS)
        return {
            "theta": config.theta,
            "phi": config.phi,
            "qutrit_zero": config.qutrit_zero,
            "pattern": pattern.to_dict(),
            "probability": outcome.probability,
            "conditional": cond.to_dict(),
            "decomposition": dfs.decompose(cond).to_dict(),
        }
    report = protocols.hnsg_run(config)
    out = report.to_dict()
    del out["outcomes"]
    out["outcome_count"] = len(report.all_outcomes)
    out["total_probability"] = sum(o.probability for o in report.all_outcomes)
    if not config.qutrit_zero:
        mirror = protocols.hnsg_herald(config, protocols.MIRROR_PATTERN)
        out["mirror"] = {
            "pattern": protocols.MIRROR_PATTERN.to_dict(),
            "probability": mirror.probability,
            "fidelity_with_sign_flipped_target": fidelity(protocols.hnsg_mirror_target(config), mirror.conditional),
        }
    out["decomposition"] = dfs.decompose(report.conditional).to_dict()
    return out


def cmd_parity_check(args) -> dict:
    alpha, beta = _complex(args, "alpha"), _complex(args, "beta")
    outcomes = protocols.parity_check_run(alpha, beta)
    reg = outcomes[0].conditional.registry
    same = product_state(reg, {"d": (alpha, beta)})
    flipped = product_state(reg, {"d": (-alpha, beta)})
    branches = []
    for o in outcomes:
        entry = _branch(o)
        if o.pattern.photons("c") == 1:
            entry["fidelity_input"] = fidelity(same, o.conditional)
            entry["fidelity_sigma_z"] = fidelity(flipped, o.conditional)
        branches.append(entry)
    rejected = sum(o.probability for o in outcomes if o.pattern.photons("c") != 1)
    return {"alpha": [alpha.real, alpha.imag], "beta": [beta.real, beta.imag], "outcomes": branches, "rejected": rejected}


def cmd_joint_phase(args) -> dict:
    q1 = (_complex(args, "alpha"), _complex(args, "beta"))
    q2 = (_complex(args, "alpha2"), _complex(args, "beta2"))
    outcomes = protocols.joint_phase_run(q1, q2)
    accepted = {}
    for o in outcomes:
        p = o.pattern
        if p.photons("a3") == 1 and p.photons("a4") == 1:
            accepted["".join(lab for r in ("a3", "a4") for lab in ("F", "S") if p.count(r, lab))] = o.probability
    rejected = sum(o.probability for o in outcomes if not (o.pattern.photons("a3") == 1 and o.pattern.photons("a4") == 1))
    return {"accepted": accepted, "rejected": rejected, "outcome_count": len(outcomes)}


def cmd_decode(args) -> dict:
    if args.input:
        state = _load_state(args.input)
        source = args.input
    else:
        basis = dfs.logical_basis()
        state = basis.state(args.logical, 2)
        source = f"|{args.logical}_L^2>"
        if args.noisy:
            u = dfs.CollectiveUnitary.haar(np.random.default_rng(args.seed))
            state = dfs.apply_collective(state, u)
            source += f" after Haar collective channel (seed {args.seed})"
    results = protocols.decoder_classify(state)
    return {
        "source": source,
        "verdicts": protocols.verdict_distribution(results),
        "outcomes": [{**v.to_dict(), "prob": p} for v, p in results],
        "pattern_table": protocols.decoder_calibration().to_dict(),
    }


def cmd_noise_sweep(args) -> dict:
    return dfs.noise_sweep(args.samples, args.seed)


def cmd_basis(args) -> dict:
    basis = dfs.logical_basis()
    gram = basis.gram()
    off = np.abs(gram - np.eye(9)).max()
    z = lambda s, r: dfs.apply_single_rail(s, r, dfs.SIGMA_Z)  # noqa: E731
    x = lambda s, r: dfs.apply_single_rail(s, r, dfs.SIGMA_X)  # noqa: E731
    zz = z(z(basis.state(2, 2), "o2"), "o3")
    xx = x(x((basis.state(1, 2) + basis.state(2, 2)) / math.sqrt(2), "o1"), "o4")
    out = {
        "gram_max_deviation": float(off),
        "sign_calibration": list(dfs.sign_calibration(basis)),
        "zz_residual_vs_one": (zz - basis.state(1, 2)).norm(),
        "zz_residual_vs_minus_one": (zz + basis.state(1, 2)).norm(),
        "xx_relation_residual": (xx - basis.state(0, 2)).norm(),
    }
    if args.list:
        out["states"] = {f"{q}_L^{k}": basis.state(q, k).to_dict()["terms"] for q, k in basis.labels()}
    return out


COMMANDS = {
    "herald": cmd_herald,
    "parity-check": cmd_parity_check,
    "joint-phase": cmd_joint_phase,
    "decode": cmd_decode,
    "noise-sweep": cmd_noise_sweep,
    "basis": cmd_basis,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dfs-herald", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON report")
    common.add_argument("--output", help="also write the JSON report to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("herald", parents=[common], help="run the heralded generator")
    p.add_argument("--theta", type=float, default=0.0, help="rotation angle (radians)")
    p.add_argument("--phi", type=float, default=0.0, help="relative phase (radians)")
    p.add_argument("--qutrit-zero", action="store_true", help="insert the sigma_x plates and fix theta=pi/4, phi=0")
    p.add_argument("--pattern", help='custom detector pattern, e.g. \'{"d1": {"H": 1}, "d2": {"F": 1}, "d3": 0, "d4": 0}\'')

    p = sub.add_parser("parity-check", parents=[common], help="single parity-check C-phase")
    _add_qubit_args(p, "alpha", 1.0)
    _add_qubit_args(p, "beta", 0.0)

    p = sub.add_parser("joint-phase", parents=[common], help="two C-phases joined at the central FS-PBS")
    _add_qubit_args(p, "alpha", 1.0)
    _add_qubit_args(p, "beta", 0.0)
    _add_qubit_args(p, "alpha2", 1.0)
    _add_qubit_args(p, "beta2", 0.0)

    p = sub.add_parser("decode", parents=[common], help="classify a four-photon state with the decoder")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="state file (JSON) on rails o1..o4")
    src.add_argument("--logical", type=int, choices=(0, 1, 2), help="decode the k=2 basis state of this block")
    p.add_argument("--noisy", action="store_true", help="apply a Haar-random collective channel first")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = sub.add_parser("noise-sweep", parents=[common], help="random collective channels vs logical amplitudes")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = sub.add_parser("basis", parents=[common], help="basis orthonormality and relation checks")
    p.add_argument("--list", action="store_true", help="include the nine states")
    return parser


def _human(report: dict, indent: str = "") -> str:
    lines = []
    for key, value in report.items():
        if isinstance(value, dict) and key not in ("conditional", "pattern", "accept_pattern"):
            lines.append(f"{indent}{key}:")
            lines.append(_human(value, indent + "  "))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{indent}{key}: {len(value)} entries")
            for v in value[:12]:
                lines.append(f"{indent}  {json.dumps(v, sort_keys=True)}")
            if len(value) > 12:
                lines.append(f"{indent}  ...")
        elif key == "conditional":
            lines.append(f"{indent}{key}: {FockState.from_dict(value)!r}")
        else:
            lines.append(f"{indent}{key}: {json.dumps(value, sort_keys=True) if isinstance(value, (dict, list)) else value}")
    return "\n".join(lines)


def run_cli(argv=None) -> tuple[int, dict | None]:
    """Parse and execute; returns ``(exit_code, report)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), None
    if getattr(args, "samples", 1) < 0:
        print("error: --samples must be non-negative", file=sys.stderr)
        return 2, None
    try:
        body = COMMANDS[args.command](args)
    except ZeroProbabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1, None
    except (InputError, DfsHeraldError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2, None
    report = {"schema": SCHEMA, "command": args.command, **body}
    text = json.dumps(report, sort_keys=True, indent=2)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    print(text if args.json else _human(report))
    return 0, report


def main(argv=None) -> int:
    return run_cli(argv)[0]


if __name__ == "__main__":
    sys.exit(main())
