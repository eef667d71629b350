"""Acceptance criteria, one test per criterion.

Each criterion prints a single PASS/FAIL line (also collected into the pytest
terminal summary).  Run standalone with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dfs_herald.detection import enumerate_outcomes, total_probability  # noqa: E402
from dfs_herald.dfs import (  # noqa: E402
    SIGMA_X,
    SIGMA_Z,
    CollectiveUnitary,
    apply_collective,
    apply_single_rail,
    block_leakage,
    decompose,
    encode,
    gauge_matrix,
    global_phase_distance,
    logical_basis,
    random_encoding,
    random_unit_vector,
    sign_calibration,
)
from dfs_herald.elements import KINDS, apply_element, make_bs_5050, make_element, make_wire  # noqa: E402
from dfs_herald.fock import FockState, Registry, fidelity, product_state  # noqa: E402
from dfs_herald.protocols import (  # noqa: E402
    MIRROR_PATTERN,
    ONE,
    TWO,
    ZERO,
    HnsgConfig,
    check_partition,
    decoder_calibration,
    decoder_classify,
    hnsg_herald,
    hnsg_mirror_target,
    hnsg_output,
    hnsg_target,
    joint_phase_run,
    parity_check_run,
    verdict_distribution,
)

TOL = 1e-10
SEED = 20260418


def random_qubit(rng):
    v = random_unit_vector(rng, 2)
    return complex(v[0]), complex(v[1])


# --- criteria -----------------------------------------------------------------
# each returns (ok, detail)

def criterion_1():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    start = time.perf_counter()
    for _ in range(20):
        alpha, beta = random_qubit(rng)
        outs = parity_check_run(alpha, beta)
        d = outs[0].conditional.registry
        same, flipped = product_state(d, {"d": (alpha, beta)}), product_state(d, {"d": (-alpha, beta)})
        one = {o.pattern.count("c", "F"): o for o in outs if o.pattern.photons("c") == 1}
        rejected = sum(o.probability for o in outs if o.pattern.photons("c") != 1)
        worst = max(
            worst,
            abs(one[1].probability - 0.25),
            abs(one[0].probability - 0.25),
            abs(rejected - 0.5),
            1 - fidelity(same, one[1].conditional),
            1 - fidelity(flipped, one[0].conditional),
        )
    elapsed = time.perf_counter() - start
    return worst <= TOL and elapsed < 1.0, f"worst deviation {worst:.1e}, {elapsed:.2f} s for 20 inputs"


def criterion_2():
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for _ in range(10):
        q1, q2 = random_qubit(rng), random_qubit(rng)
        outs = joint_phase_run(q1, q2)
        acc = {}
        for o in outs:
            if o.pattern.photons("a3") == 1 and o.pattern.photons("a4") == 1:
                acc[(o.pattern.count("a3", "F"), o.pattern.count("a4", "F"))] = o
        rejected = 1 - acc[(1, 1)].probability - acc[(0, 0)].probability
        mixed = sum(acc[k].probability for k in ((1, 0), (0, 1)) if k in acc)
        chi1, chi2 = acc[(1, 1)].conditional, acc[(0, 0)].conditional
        zz = apply_single_rail(apply_single_rail(chi1, "o2", SIGMA_Z), "o3", SIGMA_Z)
        worst = max(
            worst,
            abs(acc[(1, 1)].probability - 1 / 16),
            abs(acc[(0, 0)].probability - 1 / 16),
            abs(rejected - 7 / 8),
            mixed,
            1 - fidelity(zz, chi2),
        )
    return worst <= TOL, f"worst deviation {worst:.1e} over 10 input pairs"


GRID = [
    (t, p)
    for t in (0, math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2)
    for p in (0, math.pi / 3, math.pi, 3 * math.pi / 2)
]


def criterion_3():
    hnsg_output.cache_clear()
    worst = 0.0
    start = time.perf_counter()
    for theta, phi in GRID:
        cfg = HnsgConfig(theta, phi)
        acc = hnsg_herald(cfg)
        mir = hnsg_herald(cfg, MIRROR_PATTERN)
        worst = max(
            worst,
            abs(acc.probability - 1 / 32),
            1 - fidelity(hnsg_target(cfg), acc.conditional),
            abs(mir.probability - 1 / 32),
            1 - fidelity(hnsg_mirror_target(cfg), mir.conditional),
        )
    elapsed = time.perf_counter() - start
    return worst <= TOL and elapsed < 5.0, f"worst deviation {worst:.1e}, {elapsed:.2f} s for 20 settings"


def criterion_4():
    acc = hnsg_herald(HnsgConfig(qutrit_zero=True))
    dev = max(abs(acc.probability - 1 / 32), 1 - fidelity(logical_basis().state(0, 2), acc.conditional))
    return dev <= TOL, f"P = {acc.probability:.6f}, deviation {dev:.1e}"


def criterion_5():
    basis = logical_basis()
    gram = float(np.abs(basis.gram() - np.eye(9)).max())
    zz = apply_single_rail(apply_single_rail(basis.state(2, 2), "o2", SIGMA_Z), "o3", SIGMA_Z)
    keys = set(zz.terms) | set(basis.state(1, 2).terms)
    eq8 = max(abs(zz.amplitude(k) - basis.state(1, 2).amplitude(k)) for k in keys)
    # diagnostic only, never part of the verdict
    eq8_flipped = max(abs(zz.amplitude(k) + basis.state(1, 2).amplitude(k)) for k in keys)
    s = (basis.state(1, 2) + basis.state(2, 2)) / math.sqrt(2)
    xx = apply_single_rail(apply_single_rail(s, "o1", SIGMA_X), "o4", SIGMA_X)
    zero = basis.state(0, 2)
    eq19 = max(abs(xx.amplitude(k) - zero.amplitude(k)) for k in set(xx.terms) | set(zero.terms))
    ok = gram <= 1e-12 and eq8 <= 1e-12 and eq19 <= 1e-12
    return ok, (
        f"Gram {gram:.1e}, zz-relation as stated {eq8:.1e} "
        f"(against -|1_L^2>: {eq8_flipped:.1e}), xx-relation {eq19:.1e}"
    )


def criterion_6():
    signs = sign_calibration(logical_basis())
    basis = logical_basis(signs=signs)
    rng = np.random.default_rng(SEED + 6)
    leak = mismatch = 0.0
    for _ in range(100):
        u = CollectiveUnitary.haar(rng)
        leak = max(leak, *(block_leakage(u, q, basis) for q in range(3)))
        a = [gauge_matrix(u, q, basis) for q in range(3)]
        mismatch = max(mismatch, float(np.abs(a[0] - a[1]).max()), float(np.abs(a[1] - a[2]).max()))
    nu_err = omega_err = modulus_err = 0.0
    for _ in range(100):
        nu, omega = random_encoding(rng)
        u = CollectiveUnitary.haar(rng)
        d = decompose(apply_collective(encode(nu, omega, basis), u), basis)
        nu_err = max(nu_err, global_phase_distance(d.nu, nu))
        omega_err = max(omega_err, *(abs(np.linalg.norm(d.omega[q]) - 1) for q in range(3)))
        nu2, omega2 = random_encoding(rng, shared_gauge=False)
        d2 = decompose(apply_collective(encode(nu2, omega2, basis), u), basis)
        modulus_err = max(modulus_err, float(np.abs(np.abs(d2.nu) - np.abs(nu2)).max()))
    ok = leak < 1e-10 and mismatch <= 1e-10 and nu_err <= 1e-9 and omega_err <= 1e-10 and modulus_err <= 1e-9
    return ok, (
        f"signs {signs}, leakage {leak:.1e}, A mismatch {mismatch:.1e}, "
        f"nu {nu_err:.1e}, omega norm {omega_err:.1e}, |nu| per-Q gauge {modulus_err:.1e}"
    )


def criterion_7():
    table = decoder_calibration()
    check_partition(table.top)
    check_partition(table.bottom)
    disjoint = not (table.singlet("top") & table.triplet("top")) and not (table.singlet("bottom") & table.triplet("bottom"))
    basis = logical_basis()
    rng = np.random.default_rng(SEED + 7)
    labels = (ZERO, ONE, TWO)
    worst_label = worst_sum = 0.0
    for _ in range(200):
        q = int(rng.integers(3))
        nu = np.zeros(3)
        nu[q] = 1
        omega = np.tile(random_unit_vector(rng, 3), (3, 1))
        state = apply_collective(encode(nu, omega, basis), CollectiveUnitary.haar(rng))
        results = decoder_classify(state)
        dist = verdict_distribution(results)
        worst_label = max(worst_label, abs(dist[labels[q]] - 1))
        worst_sum = max(worst_sum, abs(sum(p for _, p in results) - 1))
    ok = disjoint and worst_label <= TOL and worst_sum <= TOL
    return ok, f"partition ok, label deviation {worst_label:.1e}, outcome-sum deviation {worst_sum:.1e} over 200 states"


_PROP_REG = Registry(("a", "b", "c", "d"))


def _random_element(rng):
    kind = KINDS[rng.integers(len(KINDS))]
    angle = float(rng.uniform(0, 2 * math.pi))
    if kind in ("HV_PBS", "FS_PBS"):
        return make_element(kind, ["a", "b", "c", "d"], {"reflection_phase": angle})
    if kind == "BS_5050":
        return make_bs_5050("a", "b", "c", "d")
    if kind == "WIRE":
        return make_wire("a", "c")
    params = {"POL_ROT": {"theta": angle}, "PHASE": {"phi": angle}, "HV_PHASE": {"phi": angle}}.get(kind, {})
    return make_element(kind, ["a"], params)


def _random_state(rng):
    terms = {}
    for _ in range(int(rng.integers(1, 6))):
        occ = tuple(int(x) for x in rng.integers(0, 2, size=4)) + (0, 0, 0, 0)
        terms[occ] = complex(rng.normal(), rng.normal())
    return FockState(_PROP_REG, terms).normalized()


def criterion_8():
    rng = np.random.default_rng(SEED + 8)
    basis = logical_basis()
    failures = {"unitarity": 0, "conservation": 0, "completeness": 0, "roundtrip": 0}
    start = time.perf_counter()
    for i in range(500):
        el = _random_element(rng)
        m = el.matrix
        if not np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=1e-12):
            failures["unitarity"] += 1
        s = _random_state(rng)
        out = apply_element(s, el)
        if abs(out.norm() - 1) > 1e-12 or out.photon_numbers() != s.photon_numbers():
            failures["conservation"] += 1
        bases = {r: ("HV", "FS")[int(rng.integers(2))] for r in ("a", "b")}
        if abs(total_probability(enumerate_outcomes(out, ["a", "b"], bases)) - 1) > 1e-12:
            failures["completeness"] += 1
        nu, omega = random_encoding(rng, shared_gauge=bool(i % 2))
        d = decompose(encode(nu, omega, basis), basis)
        if any(np.abs(d.nu[q] * d.omega[q] - nu[q] * omega[q]).max() > 1e-10 for q in range(3)) or d.residual > 1e-10:
            failures["roundtrip"] += 1
    elapsed = time.perf_counter() - start
    ok = not any(failures.values()) and elapsed < 30
    return ok, f"500 cases, failures {failures}, {elapsed:.2f} s"


CRITERIA = [
    (1, "parity check", criterion_1),
    (2, "joint phase", criterion_2),
    (3, "generator grid", criterion_3),
    (4, "qutrit zero", criterion_4),
    (5, "basis integrity", criterion_5),
    (6, "collective-noise protection", criterion_6),
    (7, "decoder", criterion_7),
    (8, "property suites", criterion_8),
]


def _line(number, name, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {number} ({name}): {detail}"


@pytest.mark.parametrize("number,name,check", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, name, check):
    from conftest import record_criterion

    ok, detail = check()
    line = _line(number, name, ok, detail)
    print(line)
    record_criterion(line)
    assert ok, line


if __name__ == "__main__":
    results = []
    for number, name, check in CRITERIA:
        ok, detail = check()
        results.append(ok)
        print(_line(number, name, ok, detail))
    sys.exit(0 if all(results) else 1)
