"""Pure-numpy density-matrix kernels (fallback for the compiled module).

Qubit ``q`` (0-based) is bit ``n - 1 - q`` of a basis index. Both functions
return a new array and leave ``rho`` untouched.
"""

from __future__ import annotations

import numpy as np


def apply_kraus(rho, kraus, qubits, n):
    """``sum_m K_m rho K_m^dagger`` for Kraus operators on ``qubits``."""
    qubits = [int(q) for q in qubits]
    k = len(qubits)
    t = rho.reshape((2,) * (2 * n))
    cols = [n + q for q in qubits]
    src = list(range(k))
    out = np.zeros_like(t)
    for K in kraus:
        kt = K.reshape((2,) * (2 * k))
        x = np.tensordot(kt, t, axes=(list(range(k, 2 * k)), qubits))
        x = np.moveaxis(x, src, qubits)
        y = np.tensordot(kt.conj(), x, axes=(list(range(k, 2 * k)), cols))
        out += np.moveaxis(y, src, cols)
    d = 1 << n
    return out.reshape(d, d)


def apply_layer(rho, mats, n):
    """``U rho U^dagger`` with ``U`` the tensor product of ``mats[q]`` (2x2 each)."""
    d = 1 << n
    t = rho.reshape((2,) * (2 * n)).copy()
    for q in range(n):
        u = mats[q]
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [q])), 0, q)
        t = np.moveaxis(np.tensordot(u.conj(), t, axes=([1], [n + q])), 0, n + q)
    return np.ascontiguousarray(t.reshape(d, d))
