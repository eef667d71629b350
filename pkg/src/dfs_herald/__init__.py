"""Simulator for heralded preparation and decoding of collective-noise-protected photonic states."""

from .circuit import Bell, Circuit, InputSpec, Qubit, Single, build_input, run
from .detection import DetectionOutcome, DetectionPattern, enumerate_outcomes, herald
from .dfs import (
    CollectiveUnitary,
    LogicalBasis,
    LogicalDecomposition,
    apply_collective,
    decompose,
    encode,
    gauge_matrix,
    logical_basis,
)
from .elements import (
    OpticalElement,
    apply_element,
    make_bs_5050,
    make_fs_pbs,
    make_hv_pbs,
    make_phase,
    make_pol_rotation,
    make_sigma_x_plate,
)
from .fock import FockState, ModeIndex, Registry, add_photon, fidelity, inner_product, prune, tensor, vacuum
from .protocols import (
    DecoderVerdict,
    HeraldReport,
    HnsgConfig,
    decoder_build,
    decoder_classify,
    hnsg_build,
    hnsg_run,
    joint_phase_run,
    parity_check_run,
)

__version__ = "0.1.0"
