"""Circuit builders for heralded preparation and decoding of the code states.

Rail names follow the usual circuit labels.  A few helper rails are added where the
layout leaves them implicit: ``c3``/``c4`` carry the parity-check ancilla
outputs into the central FS-PBS, ``v3``/``v4`` and ``z1``..``z4`` are the
unused (vacuum) input ports of the detection PBSs, and ``u*``/``w*`` are the
internal decoder paths.

Generator layout (each parity check is an HV-PBS between a target rail and an
``|F>`` ancilla)::

    m1 --------------------------------------------------> o1
    m3 (target) ┐                                     ┌--> o2
    m2 (|F>)   ─┴ HV-PBS ─ c3 ┐                  a3 ──┴ HV-PBS -> d1 (H), d3 (V)
                              ├ FS-PBS (central) ┤
    m5 (|F>)   ─┬ HV-PBS ─ c4 ┘                  a4 ── V(phi) ─ U(theta) ─ FS-PBS -> d2 (F), d4 (S)
    m4 (target) ┘                                     └--> o3
    m6 --------------------------------------------------> o4
"""

from __future__ import annotations

import functools
import math
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .circuit import Bell, Circuit, InputSpec, Qubit, Single, bell_pair, build_input, run
from .detection import DetectionOutcome, DetectionPattern, enumerate_outcomes, herald
from .dfs import CODE_RAILS, logical_basis
from .elements import (
    make_bs_5050,
    make_fs_pbs,
    make_hv_pbs,
    make_phase,
    make_pol_rotation,
    make_sigma_x_plate,
    make_wire,
)
from .errors import NormalizationError, PhotonLayoutError
from .fock import FockState, fidelity, ket, vacuum


def _check_qubit(alpha, beta, name="input"):
    n = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(n - 1) > 1e-10:
        raise NormalizationError(f"{name}: |alpha|^2 + |beta|^2 = {n}")


# --- parity check (single C-phase) ------------------------------------------

PARITY_RAILS = ("a", "b", "c", "d")


def parity_check_build(reflection_phase: float = 0.0) -> Circuit:
    """Target enters on ``b``, the ``|F>`` ancilla on ``a``; ``c`` is read in the F/S basis."""
    return Circuit(PARITY_RAILS, (make_hv_pbs("a", "b", "c", "d", reflection_phase),), ("c",))


def parity_check_run(alpha: complex, beta: complex, reflection_phase: float = 0.0) -> list[DetectionOutcome]:
    """Outcomes on detector ``c``; conditionals are returned on the target output ``d``."""
    _check_qubit(alpha, beta)
    circuit = parity_check_build(reflection_phase)
    state = build_input(InputSpec((Qubit(alpha, beta, "b"), Single("F", "a"))), circuit.registry)
    outcomes = enumerate_outcomes(run(circuit, state), ["c"], {"c": "FS"})
    return [DetectionOutcome(o.pattern, o.probability, o.conditional.restrict(("d",))) for o in outcomes]


# --- joint phase (two C-phases merged at the central FS-PBS) ----------------

JOINT_RAILS = ("m2", "m3", "m4", "m5", "c3", "c4", "o2", "o3", "a3", "a4")


def _joint_phase_elements():
    return (
        make_hv_pbs("m2", "m3", "c3", "o2"),
        make_hv_pbs("m5", "m4", "c4", "o3"),
        make_fs_pbs("c3", "c4", "a3", "a4"),
    )


def joint_phase_build() -> Circuit:
    return Circuit(JOINT_RAILS, _joint_phase_elements(), ("a3", "a4"))


def joint_phase_run(q1: tuple[complex, complex], q2: tuple[complex, complex]) -> list[DetectionOutcome]:
    """Targets ``q1`` on m3 and ``q2`` on m4; ancillas ``|F>`` on m2, m5; a3 and a4 read in F/S.

    Conditionals are returned on the target outputs (o2, o3).
    """
    _check_qubit(*q1, name="q1")
    _check_qubit(*q2, name="q2")
    circuit = joint_phase_build()
    spec = InputSpec((Qubit(*q1, "m3"), Qubit(*q2, "m4"), Single("F", "m2"), Single("F", "m5")))
    state = build_input(spec, circuit.registry)
    outcomes = enumerate_outcomes(run(circuit, state), ["a3", "a4"], {"a3": "FS", "a4": "FS"})
    return [DetectionOutcome(o.pattern, o.probability, o.conditional.restrict(("o2", "o3"))) for o in outcomes]


# --- heralded generator -----------------------------------------------------

HNSG_RAILS = (
    "m1", "m2", "m3", "m4", "m5", "m6",
    "c3", "c4", "a3", "a4", "v3", "v4",
    "o1", "o2", "o3", "o4",
    "d1", "d2", "d3", "d4",
)
HNSG_DETECTORS = ("d1", "d2", "d3", "d4")
HNSG_BASES = {"d1": "HV", "d2": "FS", "d3": "HV", "d4": "FS"}

ACCEPT_PATTERN = DetectionPattern.from_dict(
    {"d1": {"H": 1, "V": 0}, "d2": {"F": 1, "S": 0}, "d3": 0, "d4": 0}, HNSG_BASES
)
MIRROR_PATTERN = DetectionPattern.from_dict(
    {"d1": 0, "d2": {"F": 1, "S": 0}, "d3": {"H": 0, "V": 1}, "d4": 0}, HNSG_BASES
)


@dataclass(frozen=True)
class HnsgConfig:
    theta: float = 0.0
    phi: float = 0.0
    qutrit_zero: bool = False

    def __post_init__(self):
        if self.qutrit_zero:
            object.__setattr__(self, "theta", math.pi / 4)
            object.__setattr__(self, "phi", 0.0)


def hnsg_build(config: HnsgConfig) -> Circuit:
    outer = make_sigma_x_plate if config.qutrit_zero else make_wire
    elements = (
        outer("m1", "o1"),
        outer("m6", "o4"),
        *_joint_phase_elements(),
        make_phase("a4", config.phi),
        make_pol_rotation("a4", config.theta),
        make_hv_pbs("a3", "v3", "d1", "d3"),
        make_fs_pbs("a4", "v4", "d2", "d4"),
    )
    return Circuit(HNSG_RAILS, elements, HNSG_DETECTORS)


def hnsg_input(circuit: Circuit) -> FockState:
    """``|psi->`` on (m1, m3), ``|psi+>`` on (m4, m6), ``|F>`` on m2 and m5."""
    spec = InputSpec((Bell("psi-", ("m1", "m3")), Bell("psi+", ("m4", "m6")), Single("F", "m2"), Single("F", "m5")))
    return build_input(spec, circuit.registry)


def hnsg_target(config: HnsgConfig) -> FockState:
    basis = logical_basis(CODE_RAILS)
    if config.qutrit_zero:
        return basis.state(0, 2)
    return math.cos(config.theta) * basis.state(2, 2) + np.exp(1j * config.phi) * math.sin(config.theta) * basis.state(1, 2)


def hnsg_mirror_target(config: HnsgConfig) -> FockState:
    basis = logical_basis(CODE_RAILS)
    return math.cos(config.theta) * basis.state(2, 2) - np.exp(1j * config.phi) * math.sin(config.theta) * basis.state(1, 2)


@functools.lru_cache(maxsize=64)
def hnsg_output(config: HnsgConfig) -> FockState:
    """Pre-detection state of the generator."""
    circuit = hnsg_build(config)
    return run(circuit, hnsg_input(circuit))


def hnsg_herald(config: HnsgConfig, pattern: DetectionPattern = ACCEPT_PATTERN) -> DetectionOutcome:
    """Condition the generator output on ``pattern``; the conditional lives on o1..o4."""
    outcome = herald(hnsg_output(config), pattern)
    return DetectionOutcome(outcome.pattern, outcome.probability, outcome.conditional.restrict(CODE_RAILS))


@dataclass(frozen=True, eq=False)
class HeraldReport:
    config: HnsgConfig
    accept_probability: float
    conditional: FockState
    target_fidelity: float
    all_outcomes: tuple[DetectionOutcome, ...] = field(repr=False)

    def outcome(self, pattern: DetectionPattern) -> DetectionOutcome | None:
        for o in self.all_outcomes:
            if o.pattern == pattern:
                return o
        return None

    def to_dict(self) -> dict:
        return {
            "theta": self.config.theta,
            "phi": self.config.phi,
            "qutrit_zero": self.config.qutrit_zero,
            "accept_pattern": ACCEPT_PATTERN.to_dict(),
            "accept_probability": self.accept_probability,
            "target_fidelity": self.target_fidelity,
            "conditional": self.conditional.to_dict(),
            "outcomes": [{"pattern": o.pattern.to_dict(), "prob": o.probability} for o in self.all_outcomes],
        }


def hnsg_run(config: HnsgConfig) -> HeraldReport:
    outcomes = tuple(enumerate_outcomes(hnsg_output(config), HNSG_DETECTORS, HNSG_BASES))
    accepted = hnsg_herald(config)
    return HeraldReport(
        config=config,
        accept_probability=accepted.probability,
        conditional=accepted.conditional,
        target_fidelity=min(1.0, fidelity(hnsg_target(config), accepted.conditional)),
        all_outcomes=outcomes,
    )


# --- decoder ----------------------------------------------------------------

TOP_DETECTORS = ("t1", "t2", "t3", "t4")
BOTTOM_DETECTORS = ("b1", "b2", "b3", "b4")
DECODER_DETECTORS = TOP_DETECTORS + BOTTOM_DETECTORS


def _half(inputs, inner, mixed, vac, det):
    """HV-PBS, 50/50 BS, then one HV-PBS per BS output onto two detectors."""
    i1, i2 = inputs
    x, y = inner
    p, q = mixed
    n1, n2 = vac
    d1, d2, d3, d4 = det
    return (
        make_hv_pbs(i1, i2, x, y),
        make_bs_5050(x, y, p, q),
        make_hv_pbs(p, n1, d2, d1),  # H -> d2, V -> d1
        make_hv_pbs(q, n2, d3, d4),  # H -> d3, V -> d4
    )


def decoder_build() -> Circuit:
    rails = CODE_RAILS + (
        "u1", "u2", "w1", "w2", "z1", "z2",
        "u3", "u4", "w3", "w4", "z3", "z4",
    ) + DECODER_DETECTORS
    elements = _half(("o1", "o2"), ("u1", "u2"), ("w1", "w2"), ("z1", "z2"), TOP_DETECTORS) + _half(
        ("o3", "o4"), ("u3", "u4"), ("w3", "w4"), ("z3", "z4"), BOTTOM_DETECTORS
    )
    return Circuit(rails, elements, DECODER_DETECTORS)


# reference inputs for one decoder half, and the click table each must reproduce
REFERENCE_INPUTS = ("psi-", "VV", "HH", "psi+")
TRIPLET = ("VV", "HH", "psi+")
EXPECTED_TABLE = {
    "psi-": {("t1", "t2"), ("t3", "t4")},
    "VV": {("t1", "t1"), ("t4", "t4")},
    "HH": {("t2", "t2"), ("t3", "t3")},
    "psi+": {("t2", "t4"), ("t1", "t3")},
}


@dataclass(frozen=True)
class PatternTable:
    """Click supports per reference input, for each decoder half."""

    top: dict
    bottom: dict

    def singlet(self, half: str) -> frozenset:
        return frozenset(getattr(self, half)["psi-"])

    def triplet(self, half: str) -> frozenset:
        table = getattr(self, half)
        return frozenset().union(*(table[k] for k in TRIPLET))

    def to_dict(self) -> dict:
        return {
            half: {k: sorted(list(p) for p in v) for k, v in getattr(self, half).items()}
            for half in ("top", "bottom")
        }


def _reference_state(registry, kind, r1, r2) -> FockState:
    if kind in ("VV", "HH"):
        return ket(registry, kind, (r1, r2))
    return bell_pair(vacuum(registry), kind, r1, r2)


def _supports(circuit, rails, detectors) -> dict:
    table = {}
    for kind in REFERENCE_INPUTS:
        out = run(circuit, _reference_state(circuit.registry, kind, *rails))
        outcomes = enumerate_outcomes(out, detectors)
        if any(o.pattern.total() != 2 for o in outcomes):
            raise AssertionError(f"{kind} leaks out of its decoder half")
        table[kind] = {o.pattern.clicks() for o in outcomes}
    return table


def check_partition(table: dict) -> None:
    """Structural check: singlet -> two cross coincidences, VV/HH -> doubles, psi+ -> other coincidences."""
    sets = [table[k] for k in REFERENCE_INPUTS]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if sets[i] & sets[j]:
                raise AssertionError(f"decoder supports overlap: {REFERENCE_INPUTS[i]} / {REFERENCE_INPUTS[j]}")
    for kind in ("VV", "HH"):
        if len(table[kind]) != 2 or any(a != b for a, b in table[kind]):
            raise AssertionError(f"{kind} should bunch onto two single detectors, got {table[kind]}")
    for kind in ("psi-", "psi+"):
        clicks = table[kind]
        if len(clicks) != 2 or any(a == b for a, b in clicks):
            raise AssertionError(f"{kind} should give two coincidence pairs, got {clicks}")
        (a, b), (c, d) = clicks
        if {a, b} & {c, d}:
            raise AssertionError(f"{kind} coincidence pairs must be disjoint, got {clicks}")


@functools.lru_cache(maxsize=1)
def decoder_calibration() -> PatternTable:
    circuit = decoder_build()
    top = _supports(circuit, ("o1", "o2"), TOP_DETECTORS)
    bottom = _supports(circuit, ("o3", "o4"), BOTTOM_DETECTORS)
    check_partition(top)
    check_partition(bottom)
    return PatternTable(top, bottom)


ZERO, ONE, TWO, REJECT = "ZERO", "ONE", "TWO", "REJECT"


@dataclass(frozen=True)
class DecoderVerdict:
    label: str
    top_pattern: tuple[str, ...]
    bottom_pattern: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"label": self.label, "top": list(self.top_pattern), "bottom": list(self.bottom_pattern)}


def classify_patterns(top: Sequence[str], bottom: Sequence[str], table: PatternTable | None = None) -> str:
    table = table or decoder_calibration()
    top, bottom = tuple(top), tuple(bottom)
    top_s, top_t = top in table.singlet("top"), top in table.triplet("top")
    bot_s, bot_t = bottom in table.singlet("bottom"), bottom in table.triplet("bottom")
    if top_t and bot_s:
        return ONE
    if top_s and bot_t:
        return TWO
    if top_t and bot_t:
        return ZERO
    return REJECT


def decoder_classify(state: FockState) -> list[tuple[DecoderVerdict, float]]:
    """Per-outcome verdicts for a four-photon state on o1..o4."""
    if set(state.registry.rails) != set(CODE_RAILS):
        state = state.restrict(CODE_RAILS)
    for r in CODE_RAILS:
        if state.rail_counts(r) != {1}:
            raise PhotonLayoutError(f"decoder needs exactly one photon on {r}")
    table = decoder_calibration()
    circuit = decoder_build()
    out = run(circuit, state.embed(circuit.registry))
    results = []
    for o in enumerate_outcomes(out, DECODER_DETECTORS):
        clicks = o.pattern.clicks()
        top = tuple(c for c in clicks if c in TOP_DETECTORS)
        bottom = tuple(c for c in clicks if c in BOTTOM_DETECTORS)
        results.append((DecoderVerdict(classify_patterns(top, bottom, table), top, bottom), o.probability))
    return results


def verdict_distribution(results: Sequence[tuple[DecoderVerdict, float]]) -> dict[str, float]:
    dist = defaultdict(float)
    for verdict, p in results:
        dist[verdict.label] += p
    return {label: dist.get(label, 0.0) for label in (ZERO, ONE, TWO, REJECT)}
