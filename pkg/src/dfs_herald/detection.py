"""Photon-number-resolving detection: outcome enumeration and heralding.

A detector rail read in the ``FS`` basis is first re-expressed in the F/S
polarization basis (the H slot then holds F, the V slot S) and counted like
an ``HV`` rail.  This stands in for an FS-PBS feeding a pair of detectors.
"""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .elements import FS_BASIS
from .errors import RegistryError, ZeroProbabilityError
from .fock import FockState, substitute

LABELS = {"HV": ("H", "V"), "FS": ("F", "S")}
_LABEL_BASIS = {"H": "HV", "V": "HV", "F": "FS", "S": "FS"}


@dataclass(frozen=True)
class DetectionPattern:
    """Photon counts ``(n_first, n_second)`` per detector rail in that rail's basis."""

    counts: tuple[tuple[str, tuple[int, int]], ...]
    bases: tuple[tuple[str, str], ...]

    def __post_init__(self):
        for rail, (a, b) in self.counts:
            if a < 0 or b < 0:
                raise ValueError(f"negative count on {rail}")
        if [r for r, _ in self.counts] != [r for r, _ in self.bases]:
            raise ValueError("counts and bases must list the same rails in the same order")
        for _, basis in self.bases:
            if basis not in LABELS:
                raise ValueError(f"unknown basis {basis!r}")

    @property
    def rails(self) -> tuple[str, ...]:
        return tuple(r for r, _ in self.counts)

    def basis(self, rail: str) -> str:
        return dict(self.bases)[rail]

    def photons(self, rail: str) -> int:
        return sum(dict(self.counts)[rail])

    def count(self, rail: str, label: str) -> int:
        basis = self.basis(rail)
        return dict(self.counts)[rail][LABELS[basis].index(label)]

    def total(self) -> int:
        return sum(a + b for _, (a, b) in self.counts)

    def clicks(self) -> tuple[str, ...]:
        """Detector rail once per detected photon, e.g. ``("t1", "t1")``."""
        return tuple(r for r, (a, b) in self.counts for _ in range(a + b))

    def to_dict(self) -> dict:
        out = {}
        for (rail, (a, b)), (_, basis) in zip(self.counts, self.bases):
            first, second = LABELS[basis]
            out[rail] = {first: a, second: b}
        return out

    @classmethod
    def from_dict(cls, data: Mapping, bases: Mapping[str, str] | None = None) -> "DetectionPattern":
        """Accepts ``{"d1": {"H": 1}, "d2": {"F": 1}, "d3": 0}``; basis inferred from labels."""
        bases = dict(bases or {})
        counts, order = [], []
        for rail, spec in data.items():
            if isinstance(spec, Mapping):
                found = {_LABEL_BASIS[k] for k in spec if k in _LABEL_BASIS}
                if set(spec) - set(_LABEL_BASIS):
                    raise ValueError(f"unknown polarization labels in {spec}")
                if len(found) > 1:
                    raise ValueError(f"mixed bases on rail {rail}")
                basis = bases.get(rail) or (found.pop() if found else "HV")
                first, second = LABELS[basis]
                counts.append((rail, (int(spec.get(first, 0)), int(spec.get(second, 0)))))
            else:
                if int(spec) != 0:
                    raise ValueError(f"rail {rail}: a bare count must be 0; give labels for photons")
                basis = bases.get(rail, "HV")
                counts.append((rail, (0, 0)))
            order.append((rail, basis))
        return cls(tuple(counts), tuple(order))

    def __str__(self) -> str:
        return ", ".join(
            f"{rail}:{'+'.join(f'{n}{lab}' for n, lab in zip(c, LABELS[b]) if n) or '0'}"
            for (rail, c), (_, b) in zip(self.counts, self.bases)
        )


@dataclass(frozen=True)
class DetectionOutcome:
    pattern: DetectionPattern
    probability: float
    conditional: FockState

    def to_dict(self) -> dict:
        return {"pattern": self.pattern.to_dict(), "prob": self.probability, "state_ref": self.conditional.to_dict()}


def to_measurement_basis(state: FockState, bases: Mapping[str, str]) -> FockState:
    """Re-express every ``FS`` rail in (F, S) coordinates, stored in its (H, V) slots."""
    reg = state.registry
    for rail, basis in bases.items():
        if basis == "FS":
            modes = list(reg.rail_modes(rail))
            state = substitute(state, modes, modes, FS_BASIS.conj().T)
        elif basis != "HV":
            raise ValueError(f"unknown basis {basis!r}")
    return state


def _normalize_bases(registry, rails, bases) -> dict[str, str]:
    bases = dict(bases or {})
    for r in rails:
        if r not in registry:
            raise RegistryError(f"detector rail {r!r} is not registered")
    extra = set(bases) - set(rails)
    if extra:
        raise RegistryError(f"bases given for non-detector rails {sorted(extra)}")
    return {r: bases.get(r, "HV") for r in rails}


def _split(state: FockState, rails: Sequence[str]):
    """Group terms by detector occupation; yields counts -> {rest occupation: amp}."""
    reg = state.registry
    det_idx = [i for r in rails for i in reg.rail_modes(r)]
    rest_rails = tuple(r for r in reg.rails if r not in set(rails))
    rest_idx = [i for r in rest_rails for i in reg.rail_modes(r)]
    groups = defaultdict(dict)
    for occ, amp in state.items():
        key = tuple(occ[i] for i in det_idx)
        groups[key][tuple(occ[i] for i in rest_idx)] = amp
    return groups, rest_rails


def _outcome(state, rails, bases, key, terms, rest_rails) -> DetectionOutcome:
    counts = tuple((r, (key[2 * k], key[2 * k + 1])) for k, r in enumerate(rails))
    pattern = DetectionPattern(counts, tuple((r, bases[r]) for r in rails))
    prob = float(sum(abs(a) ** 2 for a in terms.values()))
    if not rest_rails:
        raise RegistryError("at least one rail must remain undetected")
    sub = state.registry.sub(rest_rails)
    conditional = FockState(sub, {o: a / np.sqrt(prob) for o, a in terms.items()})
    return DetectionOutcome(pattern, prob, conditional)


def enumerate_outcomes(
    state: FockState, detector_rails: Sequence[str], bases: Mapping[str, str] | None = None
) -> list[DetectionOutcome]:
    """All detection outcomes with non-zero probability, in a deterministic order."""
    rails = tuple(detector_rails)
    bases = _normalize_bases(state.registry, rails, bases)
    rotated = to_measurement_basis(state, bases)
    groups, rest = _split(rotated, rails)
    return [_outcome(rotated, rails, bases, key, groups[key], rest) for key in sorted(groups)]


def herald(state: FockState, pattern: DetectionPattern | Mapping) -> DetectionOutcome:
    """Project the pattern's rails onto the given counts.

    Raises :class:`ZeroProbabilityError` when no term matches.
    """
    if not isinstance(pattern, DetectionPattern):
        pattern = DetectionPattern.from_dict(pattern)
    rails = pattern.rails
    bases = _normalize_bases(state.registry, rails, dict(pattern.bases))
    rotated = to_measurement_basis(state, bases)
    groups, rest = _split(rotated, rails)
    key = tuple(n for _, c in pattern.counts for n in c)
    if key not in groups:
        raise ZeroProbabilityError(pattern)
    return _outcome(rotated, rails, bases, key, groups[key], rest)


def total_probability(outcomes: Sequence[DetectionOutcome]) -> float:
    return float(sum(o.probability for o in outcomes))
