import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfs_herald.circuit import bell_pair
from dfs_herald.errors import PhotonCapError, PhotonLayoutError, RegistryError
from dfs_herald.fock import (
    FockState,
    ModeIndex,
    Registry,
    add_photon,
    fidelity,
    inner_product,
    ket,
    product_state,
    prune,
    tensor,
    vacuum,
)

from oracles import R2

REG4 = Registry(("o1", "o2", "o3", "o4"))


class TestRegistry:
    def test_mode_layout(self):
        reg = Registry(("a", "b"))
        assert reg.n_modes == 4
        assert reg.index("b", "V") == 3
        assert reg.mode(2) == ModeIndex("b", "H")

    def test_duplicate_rail_rejected(self):
        with pytest.raises(RegistryError):
            Registry(("a", "a"))

    def test_unknown_rail(self):
        with pytest.raises(RegistryError):
            Registry(("a",)).index("z", "H")


class TestConstruction:
    def test_vacuum(self):
        vac = vacuum(Registry(("a",)))
        assert vac.terms == {(0, 0): 1}
        assert vac.total_photons() == 0

    def test_double_creation_gives_sqrt2(self):
        reg = Registry(("a",))
        s = add_photon(add_photon(vacuum(reg), ("a", "H")), ("a", "H"))
        assert s.amplitude((2, 0)) == pytest.approx(math.sqrt(2))

    def test_psi_minus_from_creation_ops(self):
        reg = Registry(("a", "b"))
        vac = vacuum(reg)
        vh = add_photon(add_photon(vac, ("a", "V")), ("b", "H"))
        hv = add_photon(add_photon(vac, ("a", "H")), ("b", "V"))
        psi = R2 * (vh - hv)
        assert psi.allclose(bell_pair(vac, "psi-", "a", "b"), atol=1e-15)
        assert psi.is_normalized()
        assert psi.amplitude((0, 1, 1, 0)) == pytest.approx(R2)
        assert psi.amplitude((1, 0, 0, 1)) == pytest.approx(-R2)

    def test_photon_cap(self):
        reg = Registry(("a",))
        s = vacuum(reg)
        for _ in range(3):
            s = add_photon(s, ("a", "H"), max_photons=3)
        with pytest.raises(PhotonCapError):
            add_photon(s, ("a", "V"), max_photons=3)

    def test_wrong_occupation_length(self):
        with pytest.raises(RegistryError):
            FockState(Registry(("a",)), {(1, 0, 0): 1})


class TestTensorAndInner:
    def _pair(self, name, r1, r2):
        return bell_pair(vacuum(REG4), name, r1, r2)

    def test_two_l2_expansion(self):
        # psi- psi+ written out term by term
        s = tensor(self._pair("psi-", "o1", "o2"), self._pair("psi+", "o3", "o4"))
        expected = 0.5 * (
            ket(REG4, "VHVH", REG4.rails)
            + ket(REG4, "VHHV", REG4.rails)
            - ket(REG4, "HVVH", REG4.rails)
            - ket(REG4, "HVHV", REG4.rails)
        )
        assert s.allclose(expected, atol=1e-15)

    def test_one_two_orthogonal(self):
        one = tensor(self._pair("psi+", "o1", "o2"), self._pair("psi-", "o3", "o4"))
        two = tensor(self._pair("psi-", "o1", "o2"), self._pair("psi+", "o3", "o4"))
        # hand expansion: the four +-1/2 terms pair up with opposite signs
        assert inner_product(one, two) == pytest.approx(0, abs=1e-15)
        assert inner_product(one, one) == pytest.approx(1)

    def test_tensor_overlap_rejected(self):
        a = ket(REG4, "H", ("o1",))
        with pytest.raises(RegistryError):
            tensor(a, a)

    def test_fidelity_phase_blind(self):
        s = ket(REG4, "HVHV", REG4.rails)
        assert fidelity(s, 1j * s) == pytest.approx(1)


class TestRestrictEmbedPrune:
    def test_restrict_roundtrip(self):
        s = ket(REG4, "HV", ("o2", "o3"))
        small = s.restrict(("o2", "o3"))
        assert small.registry.rails == ("o2", "o3")
        assert small.embed(REG4) == s

    def test_restrict_refuses_occupied(self):
        with pytest.raises(PhotonLayoutError):
            ket(REG4, "H", ("o1",)).restrict(("o2",))

    def test_prune(self):
        reg = Registry(("a",))
        s = FockState(reg, {(1, 0): 1.0, (0, 1): 1e-9})
        assert len(s) == 2
        assert len(prune(s, 1e-6)) == 1
        assert len(FockState(reg, {(1, 0): 1e-13})) == 0


class TestSerialization:
    def test_json_roundtrip(self):
        s = product_state(REG4, {"o1": (0.6, 0.8j), "o3": (R2, -R2)})
        assert FockState.from_dict(s.to_dict()) == s

    def test_bad_mode_list(self):
        with pytest.raises(RegistryError):
            FockState.from_dict({"modes": [{"rail": "a", "pol": "V"}], "terms": []})


amps = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)
occs = st.tuples(*[st.integers(0, 2)] * 4)
states = st.dictionaries(occs, amps, min_size=1, max_size=6).map(lambda d: FockState(Registry(("x", "y")), d))


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(states, states)
    def test_inner_product_hermitian(self, a, b):
        assert inner_product(a, b) == pytest.approx(np.conj(inner_product(b, a)), abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(states)
    def test_norm_positive(self, a):
        assert inner_product(a, a).real >= 0
        assert abs(inner_product(a, a).imag) < 1e-12

    @settings(max_examples=60, deadline=None)
    @given(states, states, amps)
    def test_linearity(self, a, b, c):
        lhs = inner_product(a, b + c * a)
        rhs = inner_product(a, b) + c * inner_product(a, a)
        assert lhs == pytest.approx(rhs, abs=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(states)
    def test_serialization_roundtrip(self, a):
        assert FockState.from_dict(a.to_dict()).allclose(a, atol=0)
