"""Linear-optical element catalog.

Each element is a unitary on the creation operators of a few modes, stored in
the rectilinear (H, V) basis of the registry.  Elements that act in the
diagonal basis, ``F = (H + V)/sqrt(2)`` and ``S = (V - H)/sqrt(2)``, are built
by conjugating their F/S action with :data:`FS_BASIS`.

Matrix convention: column ``i`` holds the image of input mode ``i``, i.e.
``a†_in[i] -> sum_j matrix[j, i] a†_out[j]``.  The same matrix maps
single-photon polarization vectors.

Beam splitters use a transmission amplitude of 1 (PBS) or 1/sqrt(2) (50/50)
and a reflection amplitude ``exp(1j * reflection_phase)`` (PBS) or
``1j/sqrt(2)`` (50/50).  PBS reflection is real by default; with a
reflection phase of pi/2 the coincidence term of the parity check picks up
``i**2 = -1`` and the F and S heralds trade roles.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import RegistryError, UnitarityError
from .fock import FockState, ModeIndex, substitute

HV_PBS = "HV_PBS"
FS_PBS = "FS_PBS"
BS_5050 = "BS_5050"
POL_ROT = "POL_ROT"
PHASE = "PHASE"
HALF_WAVE_X = "HALF_WAVE_X"
HV_PHASE = "HV_PHASE"
WIRE = "WIRE"

KINDS = (HV_PBS, FS_PBS, BS_5050, POL_ROT, PHASE, HALF_WAVE_X, HV_PHASE, WIRE)

UNITARITY_TOL = 1e-12

_R2 = np.sqrt(0.5)
# columns are |F> and |S> written in (H, V) coordinates
FS_BASIS = np.array([[_R2, -_R2], [_R2, _R2]], dtype=complex)


@dataclass(frozen=True, eq=False)
class OpticalElement:
    kind: str
    rails: tuple[str, ...]
    params: Mapping[str, float]
    in_modes: tuple[ModeIndex, ...]
    out_modes: tuple[ModeIndex, ...]
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (len(self.out_modes), len(self.in_modes)) or m.shape[0] != m.shape[1]:
            raise ValueError(f"{self.kind}: matrix shape {m.shape} does not match modes")
        if not np.allclose(m.conj().T @ m, np.eye(m.shape[0]), rtol=0, atol=UNITARITY_TOL):
            raise UnitarityError(f"{self.kind} on {self.rails} is not unitary")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def input_rails(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(m.rail for m in self.in_modes))

    @property
    def output_rails(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(m.rail for m in self.out_modes))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "rails": list(self.rails), "params": dict(self.params)}


def _rail_modes(rails: Sequence[str]) -> tuple[ModeIndex, ...]:
    return tuple(ModeIndex(r, p) for r in rails for p in ("H", "V"))


def _distinct(rails):
    if len(set(rails)) != len(rails):
        raise RegistryError(f"duplicate rails {rails}")


def _pbs_routing(reflection: complex) -> np.ndarray:
    """Transmit first basis vector a->c, b->d; reflect second a->d, b->c."""
    r = np.zeros((4, 4), dtype=complex)
    r[0, 0] = 1  # aH -> cH
    r[3, 1] = reflection  # aV -> dV
    r[2, 2] = 1  # bH -> dH
    r[1, 3] = reflection  # bV -> cV
    return r


def make_hv_pbs(rail_a, rail_b, rail_c, rail_d, reflection_phase: float = 0.0) -> OpticalElement:
    rails = (rail_a, rail_b, rail_c, rail_d)
    _distinct(rails)
    matrix = _pbs_routing(np.exp(1j * reflection_phase))
    return OpticalElement(
        HV_PBS, rails, {"reflection_phase": float(reflection_phase)},
        _rail_modes(rails[:2]), _rail_modes(rails[2:]), matrix,
    )


def make_fs_pbs(rail_a, rail_b, rail_c, rail_d, reflection_phase: float = 0.0) -> OpticalElement:
    """Transmits |F>, reflects |S>; HV_PBS routing conjugated into the F/S basis."""
    rails = (rail_a, rail_b, rail_c, rail_d)
    _distinct(rails)
    b2 = np.kron(np.eye(2), FS_BASIS)
    matrix = b2 @ _pbs_routing(np.exp(1j * reflection_phase)) @ b2.conj().T
    return OpticalElement(
        FS_PBS, rails, {"reflection_phase": float(reflection_phase)},
        _rail_modes(rails[:2]), _rail_modes(rails[2:]), matrix,
    )


def make_bs_5050(rail_a, rail_b, rail_c, rail_d) -> OpticalElement:
    """Polarization-insensitive symmetric beam splitter."""
    rails = (rail_a, rail_b, rail_c, rail_d)
    _distinct(rails)
    mix = np.array([[1, 1j], [1j, 1]], dtype=complex) * _R2
    matrix = np.kron(mix, np.eye(2))
    return OpticalElement(BS_5050, rails, {}, _rail_modes(rails[:2]), _rail_modes(rails[2:]), matrix)


def _single(kind, rail, out_rail, params, matrix) -> OpticalElement:
    out_rail = rail if out_rail is None else out_rail
    rails = (rail,) if out_rail == rail else (rail, out_rail)
    return OpticalElement(kind, rails, params, _rail_modes([rail]), _rail_modes([out_rail]), matrix)


def make_pol_rotation(rail, theta: float, out_rail=None) -> OpticalElement:
    """|F> -> cos|F> - sin|S>,  |S> -> sin|F> + cos|S>."""
    c, s = np.cos(theta), np.sin(theta)
    in_fs = np.array([[c, s], [-s, c]], dtype=complex)
    return _single(POL_ROT, rail, out_rail, {"theta": float(theta)}, FS_BASIS @ in_fs @ FS_BASIS.conj().T)


def make_phase(rail, phi: float, out_rail=None) -> OpticalElement:
    """|F> -> |F>,  |S> -> exp(i phi)|S>."""
    in_fs = np.diag([1.0, np.exp(1j * phi)])
    return _single(PHASE, rail, out_rail, {"phi": float(phi)}, FS_BASIS @ in_fs @ FS_BASIS.conj().T)


def make_sigma_x_plate(rail, out_rail=None) -> OpticalElement:
    return _single(HALF_WAVE_X, rail, out_rail, {}, np.array([[0, 1], [1, 0]], dtype=complex))


def make_hv_phase(rail, phi: float, out_rail=None) -> OpticalElement:
    """Birefringent retarder: |H> -> |H>,  |V> -> exp(i phi)|V>."""
    return _single(HV_PHASE, rail, out_rail, {"phi": float(phi)}, np.diag([1.0, np.exp(1j * phi)]))


def make_wire(rail, out_rail) -> OpticalElement:
    """Free propagation from one rail label to another."""
    return _single(WIRE, rail, out_rail, {}, np.eye(2, dtype=complex))


def make_element(kind: str, rails: Sequence[str], params: Mapping | None = None) -> OpticalElement:
    """Rebuild an element from its serialized ``(kind, rails, params)`` form."""
    params = dict(params or {})
    rails = list(rails)
    if kind == HV_PBS:
        return make_hv_pbs(*rails, **params)
    if kind == FS_PBS:
        return make_fs_pbs(*rails, **params)
    if kind == BS_5050:
        return make_bs_5050(*rails)
    if kind == WIRE:
        return make_wire(*rails)
    single = {
        POL_ROT: lambda r, o: make_pol_rotation(r, params["theta"], o),
        PHASE: lambda r, o: make_phase(r, params["phi"], o),
        HV_PHASE: lambda r, o: make_hv_phase(r, params["phi"], o),
        HALF_WAVE_X: lambda r, o: make_sigma_x_plate(r, o),
    }
    if kind not in single:
        raise ValueError(f"unknown element kind {kind!r}")
    if len(rails) not in (1, 2):
        raise ValueError(f"{kind} takes one rail or an (in, out) pair")
    return single[kind](rails[0], rails[1] if len(rails) == 2 else None)


def apply_element(state: FockState, element: OpticalElement) -> FockState:
    reg = state.registry
    in_idx = [reg.index(m.rail, m.pol) for m in element.in_modes]
    out_idx = [reg.index(m.rail, m.pol) for m in element.out_modes]
    return substitute(state, in_idx, out_idx, element.matrix)
