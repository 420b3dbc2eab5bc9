"""Target and trap circuits.

A trap keeps the target's shape but fills the B and C slots with the
inversion layer and dresses A and D with random gates::

    A_j = P_j H^h Z^{zp_j}        (Z first in time, then H^h, then P_j)
    D_j = Z^{zm_j} H^h P_j        (P_j first in time)

Without errors the whole circuit acts diagonally on |0..0>, so the readout
is all-zero with certainty.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from itertools import product

import numpy as np

from .engine import NAMED_GATES
from .hamiltonian import AccreditableHamiltonian
from .hqs import HqsCircuit, identity_layer
from .inversion import InversionCircuit, synthesize_inversion
from .pauli import PAULI_MATRICES, WeightedPauliSum

_H = NAMED_GATES["H"]
_Z = PAULI_MATRICES["Z"]
_I = PAULI_MATRICES["I"]


@dataclass(frozen=True, eq=False)
class TargetSpec:
    a_prime: np.ndarray
    d_prime: np.ndarray
    hamiltonian: WeightedPauliSum
    t: float

    @property
    def n(self) -> int:
        return self.hamiltonian.qubit_count


@dataclass(frozen=True)
class TrapRandomness:
    h: int
    p: str
    z_prep: tuple[int, ...]
    z_meas: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.p)

    def key(self) -> tuple:
        return (self.h, self.p, self.z_prep, self.z_meas)

    def digest(self) -> str:
        text = f"{self.h}|{self.p}|{''.join(map(str, self.z_prep))}|{''.join(map(str, self.z_meas))}"
        return hashlib.sha1(text.encode()).hexdigest()[:12]

    def describe(self) -> str:
        zp = "".join(map(str, self.z_prep))
        zm = "".join(map(str, self.z_meas))
        return f"h={self.h} P={self.p} zp={zp} zm={zm}"


RANDOMNESS_WIDTH = 3  # uniforms per qubit: P letter, prep Z bit, meas Z bit


def randomness_from_uniforms(n: int, u) -> TrapRandomness:
    """Map ``1 + 3n`` uniforms in [0, 1) to a trap draw.

    ``u[0]`` gives h; ``u[1+3j]``, ``u[2+3j]``, ``u[3+3j]`` give qubit j's
    Pauli letter, prep Z bit and measurement Z bit.
    """
    h = int(u[0] >= 0.5)
    p = "".join("IXYZ"[min(int(u[1 + 3 * j] * 4), 3)] for j in range(n))
    zp = tuple(int(u[2 + 3 * j] >= 0.5) for j in range(n))
    zm = tuple(int(u[3 + 3 * j] >= 0.5) for j in range(n))
    return TrapRandomness(h, p, zp, zm)


def draw_trap_randomness(n: int, rng: np.random.Generator) -> TrapRandomness:
    return randomness_from_uniforms(n, rng.random(1 + RANDOMNESS_WIDTH * n))


def enumerate_trap_randomness(n: int):
    """Every draw of the randomness space; each has probability ``1/(2 * 16**n)``."""
    for h in (0, 1):
        for p in product("IXYZ", repeat=n):
            for zp in product((0, 1), repeat=n):
                for zm in product((0, 1), repeat=n):
                    yield TrapRandomness(h, "".join(p), zp, zm)


def randomness_space_size(n: int) -> int:
    return 2 * 16**n


def build_target(spec: TargetSpec) -> HqsCircuit:
    n = spec.n
    return HqsCircuit(
        n=n,
        a_layer=spec.a_prime,
        b_layer=identity_layer(n),
        c_layer=identity_layer(n),
        d_layer=spec.d_prime,
        hamiltonian=spec.hamiltonian,
        t=spec.t,
    )


def trap_layers(r: TrapRandomness, inversion: InversionCircuit):
    """(A, B, C, D) single-qubit layers for one trap draw."""
    hh = _H if r.h else _I
    a = np.stack([
        PAULI_MATRICES[r.p[j]] @ hh @ (_Z if r.z_prep[j] else _I) for j in range(r.n)
    ])
    d = np.stack([
        (_Z if r.z_meas[j] else _I) @ hh @ PAULI_MATRICES[r.p[j]] for j in range(r.n)
    ])
    bc = np.stack([PAULI_MATRICES[c] for c in inversion.letters])
    return a, bc, bc, d


def build_trap(
    h: AccreditableHamiltonian,
    t: float,
    r: TrapRandomness,
    inversion: InversionCircuit | None = None,
) -> HqsCircuit:
    if r.n != h.n:
        raise ValueError("randomness and Hamiltonian sizes differ")
    inversion = inversion or synthesize_inversion(h)
    a, b, c, d = trap_layers(r, inversion)
    return HqsCircuit(n=h.n, a_layer=a, b_layer=b, c_layer=c, d_layer=d, hamiltonian=h.sum, t=t)


def trap_is_correct(outcome: str) -> bool:
    if not outcome:
        raise ValueError("empty outcome")
    return set(outcome) == {"0"}
