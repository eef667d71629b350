"""Reference calculations that share no code with the sparse engine.

* ``permanent_transform``: multi-photon amplitudes from matrix permanents.
* ``dense``: one-photon-per-rail states as plain 2^n numpy vectors (H=0, V=1),
  with the code basis built from Kronecker products.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict

import numpy as np

R2 = 1 / math.sqrt(2)
H = np.array([1, 0], dtype=complex)
V = np.array([0, 1], dtype=complex)


def permanent(m: np.ndarray) -> complex:
    n = m.shape[0]
    if n == 0:
        return 1.0
    return sum(np.prod([m[i, p[i]] for i in range(n)]) for p in itertools.permutations(range(n)))


def full_mode_matrix(n_modes, in_idx, out_idx, u) -> np.ndarray:
    """Columns: image of each mode's creation operator; untouched modes map to themselves.

    Columns of output-only modes are left zero; they are never occupied at the input.
    """
    w = np.zeros((n_modes, n_modes), dtype=complex)
    touched = set(in_idx) | set(out_idx)
    for k in range(n_modes):
        if k not in touched:
            w[k, k] = 1
    for col, i in enumerate(in_idx):
        for row, j in enumerate(out_idx):
            w[j, i] += u[row, col]
    return w


def permanent_transform(terms: dict, w: np.ndarray) -> dict:
    """<m| U |n> = Perm(W[m-list, n-list]) / sqrt(prod n! prod m!)."""
    n_modes = w.shape[0]
    out = defaultdict(complex)
    for occ, amp in terms.items():
        cols = [i for i, n in enumerate(occ) for _ in range(n)]
        total = len(cols)
        nfact = np.prod([math.factorial(n) for n in occ])
        for outocc in _compositions(total, n_modes):
            rows = [i for i, n in enumerate(outocc) for _ in range(n)]
            mfact = np.prod([math.factorial(n) for n in outocc])
            val = permanent(w[np.ix_(rows, cols)]) / math.sqrt(nfact * mfact)
            if abs(val) > 1e-14:
                out[outocc] += amp * val
    return {k: v for k, v in out.items() if abs(v) > 1e-13}


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


# --- dense four-qubit model -------------------------------------------------

def kron(*vs) -> np.ndarray:
    out = np.array([1], dtype=complex)
    for v in vs:
        out = np.kron(out, v)
    return out


PSI_M = R2 * (kron(V, H) - kron(H, V))
PSI_P = R2 * (kron(V, H) + kron(H, V))
HH = kron(H, H)
VV = kron(V, V)


def dense_basis() -> dict:
    """Nine code states written out directly from their defining formulas."""
    return {
        (0, 1): R2 * (kron(PSI_P, VV) - kron(VV, PSI_P)),
        (0, 2): R2 * (kron(HH, VV) - kron(VV, HH)),
        (0, 3): R2 * (kron(HH, PSI_P) - kron(PSI_P, HH)),
        (1, 1): kron(VV, PSI_M),
        (1, 2): kron(PSI_P, PSI_M),
        (1, 3): kron(HH, PSI_M),
        (2, 1): kron(PSI_M, VV),
        (2, 2): kron(PSI_M, PSI_P),
        (2, 3): kron(PSI_M, HH),
    }


def dense(state, rails) -> np.ndarray:
    """FockState with exactly one photon per listed rail -> 2^n vector."""
    reg = state.registry
    vec = np.zeros(2 ** len(rails), dtype=complex)
    for occ, amp in state.items():
        idx = 0
        for r in rails:
            h, v = (occ[i] for i in reg.rail_modes(r))
            assert h + v == 1, "dense oracle needs one photon per rail"
            idx = 2 * idx + v
        vec[idx] += amp
    return vec


def local(op, pos, n=4) -> np.ndarray:
    mats = [np.eye(2)] * n
    mats[pos] = op
    out = np.array([[1]], dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def collective(u, n=4) -> np.ndarray:
    out = np.array([[1]], dtype=complex)
    for _ in range(n):
        out = np.kron(out, u)
    return out
