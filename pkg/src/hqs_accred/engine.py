"""Exact density-matrix simulation.

Qubits are 1-based at the API; qubit 1 is the most significant bit of a
basis index and the leftmost character of an outcome bitstring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from . import kernels
from .errors import CapacityError, ChannelError, DimensionError
from .pauli import PAULI_MATRICES, WeightedPauliSum, to_matrix

MAX_QUBITS = 8
TP_TOL = 1e-10
UNITARY_TOL = 1e-12


def _check_cap(n: int) -> None:
    if n < 1:
        raise DimensionError("need at least one qubit")
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the density-matrix cap of {MAX_QUBITS}")


@dataclass(frozen=True, eq=False)
class DensityState:
    rho: np.ndarray
    qubit_count: int

    def __post_init__(self):
        d = 1 << self.qubit_count
        if self.rho.shape != (d, d):
            raise DimensionError(f"rho has shape {self.rho.shape}, expected {(d, d)}")
        self.rho.setflags(write=False)

    @property
    def n(self) -> int:
        return self.qubit_count

    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    def is_physical(self, tol: float = 1e-10) -> bool:
        r = self.rho
        if np.max(np.abs(r - r.conj().T)) > tol:
            return False
        if abs(np.trace(r) - 1) > tol:
            return False
        return bool(np.linalg.eigvalsh((r + r.conj().T) / 2).min() >= -tol)


def prepare_zero(n: int) -> DensityState:
    _check_cap(n)
    d = 1 << n
    rho = np.zeros((d, d), dtype=complex)
    rho[0, 0] = 1.0
    return DensityState(rho, n)


def state_from_vector(psi) -> DensityState:
    psi = np.asarray(psi, dtype=complex)
    n = int(round(math.log2(psi.size)))
    if 1 << n != psi.size:
        raise DimensionError("state vector length is not a power of two")
    psi = psi / np.linalg.norm(psi)
    return DensityState(np.outer(psi, psi.conj()), n)


# --- gates -----------------------------------------------------------------

_S2 = 1 / math.sqrt(2)
NAMED_GATES = {
    "I": PAULI_MATRICES["I"],
    "X": PAULI_MATRICES["X"],
    "Y": PAULI_MATRICES["Y"],
    "Z": PAULI_MATRICES["Z"],
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
    "CNOT": np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    ),
}


def bloch_unitary(theta: float, phi: float, lam: float) -> np.ndarray:
    """Single-qubit unitary from Euler angles (the usual U3 convention)."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


@dataclass(frozen=True, eq=False)
class Gate:
    matrix: np.ndarray
    targets: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        k = len(self.targets)
        if self.matrix.shape != (1 << k, 1 << k):
            raise DimensionError(f"{k}-qubit gate needs a {1 << k}x{1 << k} matrix")
        if len(set(self.targets)) != k:
            raise DimensionError("repeated gate target")
        if not is_unitary(self.matrix):
            raise ValueError(f"gate {self.name or '?'} is not unitary")

    @classmethod
    def named(cls, name: str, *targets: int) -> Gate:
        return _named_gate(name.upper(), tuple(targets))

    @classmethod
    def bloch(cls, theta: float, phi: float, lam: float, target: int) -> Gate:
        return cls(bloch_unitary(theta, phi, lam), (target,), "U3")

    @classmethod
    def two_qubit(cls, matrix, q1: int, q2: int) -> Gate:
        return cls(np.asarray(matrix, dtype=complex), (q1, q2), "U4")


@lru_cache(maxsize=1024)
def _named_gate(key: str, targets: tuple[int, ...]) -> Gate:
    if key == "CX":
        key = "CNOT"
    if key not in NAMED_GATES:
        raise ValueError(f"unknown gate {key!r}")
    return Gate(NAMED_GATES[key], targets, key)


def _targets0(targets, n):
    for q in targets:
        if not 1 <= q <= n:
            raise DimensionError(f"qubit {q} outside 1..{n}")
    return [q - 1 for q in targets]


def apply_gate(s: DensityState, g: Gate) -> DensityState:
    qs = _targets0(g.targets, s.n)
    rho = kernels.apply_kraus(s.rho, g.matrix[None, :, :], qs, s.n)
    return DensityState(rho, s.n)


def apply_unitary(s: DensityState, u: np.ndarray) -> DensityState:
    """Full-register unitary."""
    if u.shape != s.rho.shape:
        raise DimensionError("unitary does not match register size")
    return DensityState(u @ s.rho @ u.conj().T, s.n)


def apply_layer(s: DensityState, mats) -> DensityState:
    """One single-qubit unitary per qubit, applied simultaneously."""
    mats = np.asarray(mats, dtype=complex)
    if mats.shape != (s.n, 2, 2):
        raise DimensionError(f"layer needs shape {(s.n, 2, 2)}, got {mats.shape}")
    return DensityState(kernels.apply_layer(s.rho, mats, s.n), s.n)


# --- evolution ---------------------------------------------------------------

@lru_cache(maxsize=64)
def _spectrum(h: WeightedPauliSum):
    w, v = np.linalg.eigh(to_matrix(h))
    return w, v


@lru_cache(maxsize=256)
def evolution_operator(h: WeightedPauliSum, t: float) -> np.ndarray:
    """``exp(-i H t)`` via the Hermitian spectral decomposition (cached)."""
    _check_cap(h.qubit_count)
    w, v = _spectrum(h)
    u = (v * np.exp(-1j * w * t)) @ v.conj().T
    u.setflags(write=False)
    return u


def evolve(s: DensityState, h: WeightedPauliSum, t: float) -> DensityState:
    if h.qubit_count != s.n:
        raise DimensionError("Hamiltonian and state sizes differ")
    if t == 0 or not h.terms:
        return s
    return apply_unitary(s, evolution_operator(h, t))


# --- channels ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ErrorChannel:
    """CPTP map given by Kraus operators acting on ``qubits`` (1-based).

    ``compliant`` is False for maps built from knowledge of the circuit being
    run (used only in unconstrained error configurations).
    """

    kraus: tuple[np.ndarray, ...]
    qubits: tuple[int, ...]
    label: str = ""
    compliant: bool = True
    stack: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        k = len(self.qubits)
        if k == 0 or len(set(self.qubits)) != k:
            raise ChannelError("channel needs distinct target qubits")
        dim = 1 << k
        ops = tuple(np.asarray(K, dtype=complex) for K in self.kraus)
        if not ops:
            raise ChannelError("channel needs at least one Kraus operator")
        for K in ops:
            if K.shape != (dim, dim):
                raise ChannelError(f"Kraus operator shape {K.shape}, expected {(dim, dim)}")
        total = sum(K.conj().T @ K for K in ops)
        if np.max(np.abs(total - np.eye(dim))) > TP_TOL:
            raise ChannelError("Kraus operators are not trace preserving")
        object.__setattr__(self, "kraus", ops)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "stack", np.ascontiguousarray(np.stack(ops)))

    @property
    def arity(self) -> int:
        return len(self.qubits)


def apply_channel(s: DensityState, e: ErrorChannel) -> DensityState:
    qs = _targets0(e.qubits, s.n)
    return DensityState(kernels.apply_kraus(s.rho, e.stack, qs, s.n), s.n)


def identity_channel(qubits) -> ErrorChannel:
    qubits = tuple(qubits)
    return ErrorChannel((np.eye(1 << len(qubits)),), qubits, "identity")


def unitary_channel(u, qubits, label: str = "unitary", compliant: bool = True) -> ErrorChannel:
    return ErrorChannel((np.asarray(u, dtype=complex),), tuple(qubits), label, compliant)


def _check_prob(p, name="p"):
    if not 0.0 <= p <= 1.0:
        raise ChannelError(f"{name}={p} outside [0, 1]")


def bit_flip(p: float, qubit: int) -> ErrorChannel:
    _check_prob(p)
    return ErrorChannel(
        (math.sqrt(1 - p) * PAULI_MATRICES["I"], math.sqrt(p) * PAULI_MATRICES["X"]),
        (qubit,),
        "bit_flip",
    )


def phase_flip(p: float, qubit: int) -> ErrorChannel:
    _check_prob(p)
    return ErrorChannel(
        (math.sqrt(1 - p) * PAULI_MATRICES["I"], math.sqrt(p) * PAULI_MATRICES["Z"]),
        (qubit,),
        "phase_flip",
    )


def amplitude_damping(gamma: float, qubit: int) -> ErrorChannel:
    _check_prob(gamma, "gamma")
    k0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    return ErrorChannel((k0, k1), (qubit,), "amplitude_damping")


def pauli_string_matrix(letters: str) -> np.ndarray:
    m = np.ones((1, 1), dtype=complex)
    for c in letters:
        m = np.kron(m, PAULI_MATRICES[c])
    return m


def pauli_mixture(weights: dict[str, float], qubits) -> ErrorChannel:
    """Apply Pauli string ``P`` with probability ``weights[P]``.

    The identity takes whatever probability is left over.
    """
    qubits = tuple(qubits)
    k = len(qubits)
    probs: dict[str, float] = {}
    for letters, w in weights.items():
        letters = letters.upper()
        if len(letters) != k or set(letters) - set("IXYZ"):
            raise ChannelError(f"Pauli {letters!r} does not fit {k} qubit(s)")
        _check_prob(w, f"weight[{letters}]")
        probs[letters] = probs.get(letters, 0.0) + w
    ident = "I" * k
    rest = 1.0 - sum(w for s, w in probs.items() if s != ident)
    if rest < -TP_TOL:
        raise ChannelError("Pauli weights sum to more than 1")
    probs[ident] = max(rest, 0.0)
    ops = tuple(
        math.sqrt(w) * pauli_string_matrix(s) for s, w in sorted(probs.items()) if w > 0
    )
    return ErrorChannel(ops, qubits, "pauli_mixture")


def depolarizing(p: float, qubits) -> ErrorChannel:
    """Replace the listed qubits' joint state by the maximally mixed state w.p. ``p``."""
    _check_prob(p)
    qubits = tuple(qubits)
    k = len(qubits)
    share = p / 4**k
    weights = {"".join(s): share for s in product("IXYZ", repeat=k) if set(s) != {"I"}}
    ch = pauli_mixture(weights, qubits)
    return ErrorChannel(ch.kraus, qubits, "depolarizing")


def kraus_explicit(kraus, qubits, label: str = "kraus_explicit") -> ErrorChannel:
    return ErrorChannel(tuple(np.asarray(K, dtype=complex) for K in kraus), tuple(qubits), label)


# --- readout ----------------------------------------------------------------

CLIP_RENORM_TOL = 1e-9


def z_distribution(s: DensityState) -> np.ndarray:
    """Computational-basis outcome probabilities, index order = bit order."""
    p = np.real(np.diag(s.rho)).copy()
    clipped = -p[p < 0].sum()
    p[p < 0] = 0.0
    if clipped > CLIP_RENORM_TOL:
        p /= p.sum()
    return p


def bitstring(index: int, n: int) -> str:
    return format(index, f"0{n}b")


def sample_index(probs: np.ndarray, u: float) -> int:
    """Inverse-CDF draw from ``probs`` using one uniform ``u`` in [0, 1)."""
    cdf = np.cumsum(probs)
    idx = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
    return min(idx, len(probs) - 1)


def sample(s: DensityState, rng: np.random.Generator) -> str:
    return bitstring(sample_index(z_distribution(s), rng.random()), s.n)
