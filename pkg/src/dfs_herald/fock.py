"""Sparse multi-photon Fock states over polarization-resolved rails.

Every spatial rail carries two bosonic modes, ``H`` and ``V``.  A
:class:`Registry` fixes the dense ordering of those modes, and a
:class:`FockState` maps occupation tuples (one count per mode) to complex
amplitudes.  States are immutable values; every operation returns a new state.

Linear-optical elements act by substituting creation operators,
``a†_in[i] -> sum_j U[j, i] a†_out[j]``, which :func:`substitute` carries out
monomial by monomial.
"""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import PhotonCapError, PhotonLayoutError, RegistryError

POLARIZATIONS = ("H", "V")
PRUNE_THRESHOLD = 1e-12
MAX_PHOTONS = 8
NORMALIZED_TOL = 1e-10

Occupation = tuple[int, ...]


class ModeIndex(NamedTuple):
    rail: str
    pol: str


@dataclass(frozen=True)
class Registry:
    """Ordered rail declarations; rail ``i`` owns dense modes ``2i`` (H) and ``2i+1`` (V)."""

    rails: tuple[str, ...]

    def __post_init__(self):
        rails = tuple(str(r) for r in self.rails)
        if len(set(rails)) != len(rails):
            raise RegistryError(f"duplicate rails in {rails}")
        object.__setattr__(self, "rails", rails)
        object.__setattr__(self, "_pos", {r: i for i, r in enumerate(rails)})

    def __contains__(self, rail) -> bool:
        return rail in self._pos

    def __len__(self) -> int:
        return len(self.rails)

    @property
    def n_modes(self) -> int:
        return 2 * len(self.rails)

    def position(self, rail: str) -> int:
        try:
            return self._pos[rail]
        except KeyError:
            raise RegistryError(f"rail {rail!r} is not registered") from None

    def index(self, rail: str, pol: str) -> int:
        if pol not in POLARIZATIONS:
            raise RegistryError(f"polarization must be H or V, got {pol!r}")
        return 2 * self.position(rail) + POLARIZATIONS.index(pol)

    def rail_modes(self, rail: str) -> tuple[int, int]:
        p = 2 * self.position(rail)
        return p, p + 1

    def mode(self, index: int) -> ModeIndex:
        return ModeIndex(self.rails[index // 2], POLARIZATIONS[index % 2])

    def modes(self) -> list[ModeIndex]:
        return [self.mode(i) for i in range(self.n_modes)]

    def sub(self, rails: Iterable[str]) -> "Registry":
        rails = tuple(rails)
        for r in rails:
            self.position(r)
        return Registry(rails)


class FockState:
    """Immutable sparse ket: occupation tuple -> complex amplitude."""

    __slots__ = ("registry", "_terms")

    def __init__(
        self,
        registry: Registry,
        terms: Mapping[Occupation, complex] | None = None,
        threshold: float = PRUNE_THRESHOLD,
    ):
        self.registry = registry
        clean = {}
        for occ, amp in (terms or {}).items():
            occ = tuple(int(n) for n in occ)
            if len(occ) != registry.n_modes:
                raise RegistryError(
                    f"occupation {occ} has {len(occ)} entries, registry has {registry.n_modes} modes"
                )
            if any(n < 0 for n in occ):
                raise ValueError(f"negative occupation in {occ}")
            amp = complex(amp)
            if abs(amp) >= threshold:
                clean[occ] = amp
        self._terms = clean

    @property
    def terms(self) -> Mapping[Occupation, complex]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def amplitude(self, occ: Sequence[int]) -> complex:
        return self._terms.get(tuple(occ), 0j)

    def norm_squared(self) -> float:
        return float(sum(abs(a) ** 2 for a in self._terms.values()))

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    def is_normalized(self, tol: float = NORMALIZED_TOL) -> bool:
        return abs(self.norm_squared() - 1.0) < tol

    def normalized(self) -> "FockState":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("cannot normalize the zero vector")
        return self / n

    def photon_numbers(self) -> set[int]:
        return {sum(occ) for occ in self._terms}

    def total_photons(self) -> int:
        """Photon number shared by every term; raises if the state mixes numbers."""
        numbers = self.photon_numbers()
        if len(numbers) != 1:
            raise PhotonLayoutError(f"state is not a photon-number eigenstate: {sorted(numbers)}")
        return numbers.pop()

    def rail_counts(self, rail: str) -> set[int]:
        h, v = self.registry.rail_modes(rail)
        return {occ[h] + occ[v] for occ in self._terms}

    def occupied_rails(self) -> set[str]:
        used = set()
        for occ in self._terms:
            for i, n in enumerate(occ):
                if n:
                    used.add(self.registry.rails[i // 2])
        return used

    def _check_registry(self, other: "FockState"):
        if self.registry != other.registry:
            raise RegistryError("states live on different registries")

    def __add__(self, other: "FockState") -> "FockState":
        self._check_registry(other)
        out = defaultdict(complex, self._terms)
        for occ, amp in other._terms.items():
            out[occ] += amp
        return FockState(self.registry, out)

    def __sub__(self, other: "FockState") -> "FockState":
        return self + (-1) * other

    def __mul__(self, scalar) -> "FockState":
        scalar = complex(scalar)
        return FockState(self.registry, {o: a * scalar for o, a in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "FockState":
        return self * (1 / complex(scalar))

    def __neg__(self) -> "FockState":
        return self * -1

    def __eq__(self, other) -> bool:
        if not isinstance(other, FockState):
            return NotImplemented
        return self.registry == other.registry and self._terms == other._terms

    __hash__ = None

    def allclose(self, other: "FockState", atol: float = 1e-10) -> bool:
        """Amplitude-level comparison, no phase freedom."""
        if self.registry != other.registry:
            return False
        keys = set(self._terms) | set(other._terms)
        return all(abs(self.amplitude(k) - other.amplitude(k)) <= atol for k in keys)

    def restrict(self, rails: Sequence[str]) -> "FockState":
        """Drop every rail not in ``rails``; those rails must be empty in every term."""
        keep = []
        for r in rails:
            keep.extend(self.registry.rail_modes(r))
        keep_set = set(keep)
        out = {}
        for occ, amp in self._terms.items():
            if any(n for i, n in enumerate(occ) if i not in keep_set):
                raise PhotonLayoutError("cannot restrict: photons present on dropped rails")
            out[tuple(occ[i] for i in keep)] = amp
        return FockState(self.registry.sub(rails), out)

    def embed(self, registry: Registry) -> "FockState":
        """Place this state into a registry that contains all of its rails."""
        idx = []
        for r in self.registry.rails:
            idx.extend(registry.rail_modes(r))
        out = {}
        for occ, amp in self._terms.items():
            full = [0] * registry.n_modes
            for i, n in zip(idx, occ):
                full[i] = n
            out[tuple(full)] = amp
        return FockState(registry, out)

    def to_dict(self) -> dict:
        return {
            "modes": [{"rail": m.rail, "pol": m.pol} for m in self.registry.modes()],
            "terms": [
                {"occ": list(occ), "re": amp.real, "im": amp.imag}
                for occ, amp in sorted(self._terms.items())
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "FockState":
        modes = [(m["rail"], m["pol"]) for m in data["modes"]]
        rails = []
        for k in range(0, len(modes), 2):
            pair = modes[k : k + 2]
            if len(pair) != 2 or pair[0][1] != "H" or pair[1][1] != "V" or pair[0][0] != pair[1][0]:
                raise RegistryError("modes must list each rail as an (H, V) pair")
            rails.append(pair[0][0])
        registry = Registry(tuple(rails))
        terms = defaultdict(complex)
        for t in data["terms"]:
            terms[tuple(t["occ"])] += complex(t["re"], t["im"])
        return cls(registry, terms)

    def __repr__(self) -> str:
        if not self._terms:
            return "FockState(0)"
        parts = []
        for occ, amp in sorted(self._terms.items()):
            label = " ".join(
                f"{self.registry.mode(i).pol}{'' if n == 1 else f'^{n}'}_{self.registry.mode(i).rail}"
                for i, n in enumerate(occ)
                if n
            )
            parts.append(f"({amp:.6g})|{label or 'vac'}>")
        return " + ".join(parts)


def vacuum(registry: Registry) -> FockState:
    if len(registry) == 0:
        raise RegistryError("registry is empty")
    return FockState(registry, {(0,) * registry.n_modes: 1.0})


def _mode_index(registry: Registry, mode) -> int:
    if isinstance(mode, int):
        return mode
    rail, pol = mode
    return registry.index(rail, pol)


def add_photon(state: FockState, mode, max_photons: int = MAX_PHOTONS) -> FockState:
    """Apply a creation operator; amplitudes pick up sqrt(n + 1)."""
    i = _mode_index(state.registry, mode)
    out = {}
    for occ, amp in state.items():
        if sum(occ) + 1 > max_photons:
            raise PhotonCapError(f"photon cap {max_photons} exceeded")
        new = list(occ)
        new[i] += 1
        out[tuple(new)] = amp * math.sqrt(new[i])
    return FockState(state.registry, out)


def tensor(a: FockState, b: FockState) -> FockState:
    """Product of two states whose occupied rails are disjoint."""
    a._check_registry(b)
    overlap = a.occupied_rails() & b.occupied_rails()
    if overlap:
        raise RegistryError(f"states overlap on rails {sorted(overlap)}")
    out = defaultdict(complex)
    for oa, xa in a.items():
        for ob, xb in b.items():
            out[tuple(p + q for p, q in zip(oa, ob))] += xa * xb
    return FockState(a.registry, out)


def inner_product(a: FockState, b: FockState) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    a._check_registry(b)
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    total = 0j
    for occ, amp in small.items():
        other = large.amplitude(occ)
        if other:
            total += amp.conjugate() * other if small is a else other.conjugate() * amp
    return total


def fidelity(a: FockState, b: FockState) -> float:
    """|<a|b>|^2 / (<a|a><b|b>); insensitive to global phase."""
    return abs(inner_product(a, b)) ** 2 / (a.norm_squared() * b.norm_squared())


def prune(state: FockState, threshold: float = PRUNE_THRESHOLD) -> FockState:
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    return FockState(state.registry, state.terms, threshold=threshold)


def product_state(registry: Registry, photons: Mapping[str, Sequence[complex]]) -> FockState:
    """One photon per listed rail with polarization amplitudes ``(c_H, c_V)``."""
    state = vacuum(registry)
    for rail, (ch, cv) in photons.items():
        if not (ch or cv):
            raise ValueError(f"rail {rail!r} has zero polarization vector")
        state = ch * add_photon(state, (rail, "H")) + cv * add_photon(state, (rail, "V"))
    return state


def ket(registry: Registry, pols: str, rails: Sequence[str]) -> FockState:
    """Product ket such as ``ket(reg, "VHVH", rails)``, one photon per rail."""
    if len(pols) != len(rails):
        raise ValueError("need one polarization letter per rail")
    occ = [0] * registry.n_modes
    for p, r in zip(pols, rails):
        occ[registry.index(r, p)] += 1
    return FockState(registry, {tuple(occ): 1.0})


def substitute(
    state: FockState,
    in_modes: Sequence[int],
    out_modes: Sequence[int],
    matrix: np.ndarray,
    threshold: float = PRUNE_THRESHOLD,
) -> FockState:
    """Replace ``a†_in[i]`` by ``sum_j matrix[j, i] a†_out[j]`` in every term.

    Output modes that are not also input modes must be empty; otherwise the
    map would merge photons into an occupied mode and stop being unitary.
    """
    in_modes = list(in_modes)
    out_modes = list(out_modes)
    columns = []
    for i in range(len(in_modes)):
        columns.append([(out_modes[j], complex(matrix[j, i])) for j in range(len(out_modes)) if matrix[j, i] != 0])
    in_set = set(in_modes)
    out_only = [m for m in set(out_modes) if m not in in_set]

    result = defaultdict(complex)
    for occ, amp in state.items():
        base = list(occ)
        scale = 1.0
        for m in in_modes:
            scale *= math.factorial(base[m])
        for m in in_modes:
            base[m] = 0
        if any(base[m] for m in out_only):
            raise RegistryError(f"output mode {state.registry.mode(next(m for m in out_only if base[m]))} is occupied")
        # monomial coefficients: |n> = prod (a†)^n / sqrt(n!) |0>
        spectator = 1.0
        for n in base:
            spectator *= math.factorial(n)
        poly = {tuple(base): amp / math.sqrt(scale * spectator)}
        for pos, m in enumerate(in_modes):
            for _ in range(occ[m]):
                nxt = defaultdict(complex)
                for exps, c in poly.items():
                    for j, u in columns[pos]:
                        e = list(exps)
                        e[j] += 1
                        nxt[tuple(e)] += c * u
                poly = nxt
        for exps, c in poly.items():
            f = 1.0
            for n in exps:
                f *= math.factorial(n)
            result[exps] += c * math.sqrt(f)
    return FockState(state.registry, result, threshold=threshold)
