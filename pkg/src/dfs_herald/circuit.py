"""Declarative circuits and input-state construction."""

from __future__ import annotations

import json
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

from .elements import OpticalElement, apply_element, make_element
from .errors import NormalizationError, RegistryError
from .fock import FockState, Registry, add_photon, vacuum

_R2 = math.sqrt(0.5)


@dataclass(frozen=True)
class Circuit:
    rails: tuple[str, ...]
    elements: tuple[OpticalElement, ...] = ()
    detectors: tuple[str, ...] = ()
    registry: Registry = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rails", tuple(self.rails))
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "detectors", tuple(self.detectors))
        object.__setattr__(self, "registry", Registry(self.rails))
        self.validate()

    def validate(self):
        known = set(self.rails)
        for e in self.elements:
            missing = set(e.rails) - known
            if missing:
                raise RegistryError(f"{e.kind} uses unregistered rails {sorted(missing)}")
        for d in self.detectors:
            if d not in known:
                raise RegistryError(f"detector rail {d!r} is not registered")
        # feed-forward: nothing reads a detector rail once it has been fed
        fed = set()
        for e in self.elements:
            reused = fed & set(e.input_rails)
            if reused:
                raise RegistryError(f"{e.kind} reads detector rails {sorted(reused)} after they were fed")
            fed |= set(e.output_rails) & set(self.detectors)

    def to_dict(self) -> dict:
        return {
            "rails": list(self.rails),
            "elements": [e.to_dict() for e in self.elements],
            "detectors": list(self.detectors),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data) -> "Circuit":
        elements = [make_element(e["kind"], e["rails"], e.get("params", {})) for e in data["elements"]]
        return cls(tuple(data["rails"]), tuple(elements), tuple(data.get("detectors", ())))

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))


def run(circuit: Circuit, state: FockState) -> FockState:
    if state.registry != circuit.registry:
        raise RegistryError("input state is not on the circuit registry")
    for element in circuit.elements:
        state = apply_element(state, element)
    return state


# --- input specification ---------------------------------------------------

BELL_KINDS = ("psi-", "psi+", "phi-", "phi+")

# polarization vectors (c_H, c_V)
SINGLE_POLS = {
    "H": (1.0, 0.0),
    "V": (0.0, 1.0),
    "F": (_R2, _R2),
    "S": (-_R2, _R2),
}


@dataclass(frozen=True)
class Bell:
    """psi± = (|VH> ± |HV>)/sqrt2,  phi± = (|HH> ± |VV>)/sqrt2 on ``(rail1, rail2)``."""

    kind: str
    rails: tuple[str, str]

    @property
    def used_rails(self):
        return tuple(self.rails)


@dataclass(frozen=True)
class Single:
    pol: str
    rail: str

    @property
    def used_rails(self):
        return (self.rail,)


@dataclass(frozen=True)
class Qubit:
    alpha: complex
    beta: complex
    rail: str

    @property
    def used_rails(self):
        return (self.rail,)


@dataclass(frozen=True)
class InputSpec:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))


def _two_photon(state: FockState, r1: str, r2: str, pols: Sequence[tuple[complex, str, str]]) -> FockState:
    total = None
    for coef, p1, p2 in pols:
        term = coef * add_photon(add_photon(state, (r1, p1)), (r2, p2))
        total = term if total is None else total + term
    return total


def bell_pair(state: FockState, kind: str, r1: str, r2: str) -> FockState:
    """Create a Bell pair on two rails on top of ``state``."""
    table = {
        "psi-": [(_R2, "V", "H"), (-_R2, "H", "V")],
        "psi+": [(_R2, "V", "H"), (_R2, "H", "V")],
        "phi-": [(_R2, "H", "H"), (-_R2, "V", "V")],
        "phi+": [(_R2, "H", "H"), (_R2, "V", "V")],
    }
    if kind not in table:
        raise ValueError(f"unknown Bell state {kind!r}; expected one of {BELL_KINDS}")
    return _two_photon(state, r1, r2, table[kind])


def single_photon(state: FockState, rail: str, ch: complex, cv: complex) -> FockState:
    return ch * add_photon(state, (rail, "H")) + cv * add_photon(state, (rail, "V"))


def build_input(spec: InputSpec, registry: Registry) -> FockState:
    seen: set[str] = set()
    for part in spec.parts:
        rails = part.used_rails
        if len(set(rails)) != len(rails) or seen & set(rails):
            raise RegistryError(f"rail collision at {rails}")
        seen |= set(rails)
    state = vacuum(registry)
    for part in spec.parts:
        if isinstance(part, Bell):
            state = bell_pair(state, part.kind, *part.rails)
        elif isinstance(part, Single):
            if part.pol not in SINGLE_POLS:
                raise ValueError(f"unknown polarization {part.pol!r}")
            state = single_photon(state, part.rail, *SINGLE_POLS[part.pol])
        elif isinstance(part, Qubit):
            n = abs(part.alpha) ** 2 + abs(part.beta) ** 2
            if abs(n - 1) > 1e-10:
                raise NormalizationError(f"|alpha|^2 + |beta|^2 = {n}")
            state = single_photon(state, part.rail, part.alpha, part.beta)
        else:
            raise TypeError(f"unknown input part {part!r}")
    return state
