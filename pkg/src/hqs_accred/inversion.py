"""Time-inversion circuits: Pauli layers ``C`` with ``C H C^dagger = -H``."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import CapacityError, DimensionError
from .hamiltonian import AccreditableHamiltonian
from .lattice import two_color
from .pauli import PauliString, WeightedPauliSum, conjugate_sum, to_matrix

NUMERIC_CAP = 12


class InversionBasis(str, Enum):
    Z_ON_CHROMATIC = "Z_on_chromatic"
    COMPOSITE_IY_X = "composite_iY_X"


@dataclass(frozen=True)
class InversionCircuit:
    string: PauliString
    basis: InversionBasis

    @property
    def letters(self) -> str:
        return self.string.letters

    def matrix(self) -> np.ndarray:
        return self.string.matrix()


def _chromatic_vertices(h: AccreditableHamiltonian) -> list[int]:
    # Isolated qubits take part in no interaction and are left untouched.
    coloring = two_color(h.graph)
    return [v for v in sorted(coloring.subset(1)) if h.graph.degree(v) > 0]


def synthesize_inversion(h: AccreditableHamiltonian) -> InversionCircuit:
    """Z on the colour class containing vertex 1."""
    if h.has_onsite:
        raise ValueError("onsite Z terms are not negated by a Z layer; use synthesize_inversion_xy_model")
    ops = {v: "Z" for v in _chromatic_vertices(h)}
    return InversionCircuit(PauliString.from_sparse(h.n, ops), InversionBasis.Z_ON_CHROMATIC)


def synthesize_inversion_xy_model(h: AccreditableHamiltonian) -> InversionCircuit:
    """Z on the chromatic class composed with X on every site.

    ``Z X = iY``, so the chromatic qubits carry ``Y`` and the string phase is
    ``i**|S|``.
    """
    z_part = PauliString.from_sparse(h.n, {v: "Z" for v in _chromatic_vertices(h)})
    x_part = PauliString("X" * h.n)
    return InversionCircuit(z_part * x_part, InversionBasis.COMPOSITE_IY_X)


def verify_inversion_symbolic(h: WeightedPauliSum, c: InversionCircuit) -> bool:
    if c.string.n != h.qubit_count:
        raise DimensionError("inversion circuit and Hamiltonian sizes differ")
    return conjugate_sum(h, c.string).terms == (-h).terms


def spectral_evolution(hm: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i H t)`` of a Hermitian matrix by eigendecomposition."""
    w, v = np.linalg.eigh(hm)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def verify_inversion_numeric(h: WeightedPauliSum, c: InversionCircuit, t: float) -> float:
    """Largest entrywise deviation of ``C exp(-iHt) C^dagger`` from ``exp(iHt)``."""
    if h.qubit_count > NUMERIC_CAP:
        raise CapacityError(f"{h.qubit_count} qubits exceeds numeric cap {NUMERIC_CAP}")
    if c.string.n != h.qubit_count:
        raise DimensionError("inversion circuit and Hamiltonian sizes differ")
    hm = to_matrix(h)
    cm = c.matrix()
    w, v = np.linalg.eigh(hm)
    forward = (v * np.exp(-1j * w * t)) @ v.conj().T
    backward = (v * np.exp(1j * w * t)) @ v.conj().T
    return float(np.max(np.abs(cm @ forward @ cm.conj().T - backward)))
