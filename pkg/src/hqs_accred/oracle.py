"""Brute-force ground truth for the accreditation checks.

Everything here rebuilds circuits gate by gate from :mod:`engine`
primitives. None of it goes through :func:`hqs.execute` or the protocol
scheduler, so agreement between the two routes is a real check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .engine import (
    DensityState,
    ErrorChannel,
    Gate,
    apply_channel,
    apply_gate,
    evolve,
    pauli_string_matrix,
    prepare_zero,
    z_distribution,
)
from .errors import CapacityError, DimensionError
from .hamiltonian import AccreditableHamiltonian
from .hqs import ErrorConfig
from .inversion import synthesize_inversion
from .trap import TargetSpec, TrapRandomness, enumerate_trap_randomness, randomness_from_uniforms

ENUMERATION_CAP = 3


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    samples: int

    def agrees_with(self, exact: float, k: float = 3.0) -> bool:
        return abs(self.value - exact) <= k * self.stderr + 1e-12

    def __str__(self):
        return f"{self.value:.6f} +- {self.stderr:.6f} (n={self.samples})"


def variation_distance(p, q) -> float:
    """Half the L1 distance between two outcome distributions."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise DimensionError(f"distribution lengths differ: {p.shape} vs {q.shape}")
    return float(0.5 * np.abs(p - q).sum())


def _gate_sequence(s: DensityState, names, qubit: int) -> DensityState:
    for name in names:
        if name != "I":
            s = apply_gate(s, Gate.named(name, qubit))
    return s


def _errors(s: DensityState, e: ErrorConfig, point: str) -> DensityState:
    for ch in e.at(point):
        s = apply_channel(s, ch)
    return s


def trap_state(
    ham: AccreditableHamiltonian, t: float, r: TrapRandomness, error: ErrorConfig
) -> DensityState:
    """Pre-readout state of one trap draw, built one gate at a time."""
    n = ham.n
    letters = synthesize_inversion(ham).letters
    s = prepare_zero(n)
    s = _errors(s, error, "prep")
    for j in range(n):
        # time order Z', H^h, P
        s = _gate_sequence(s, ["Z" if r.z_prep[j] else "I", "H" if r.h else "I", r.p[j]], j + 1)
    s = _errors(s, error, "a_layer")
    s = _errors(s, error, "u1")
    s = evolve(s, ham.sum, t / 2)
    s = _errors(s, error, "evolution_1")
    s = _errors(s, error, "b_layer")
    for j, c in enumerate(letters):
        s = _gate_sequence(s, [c], j + 1)
    s = evolve(s, ham.sum, t / 2)
    s = _errors(s, error, "evolution_2")
    s = _errors(s, error, "c_layer")
    for j, c in enumerate(letters):
        s = _gate_sequence(s, [c], j + 1)
    s = _errors(s, error, "u2")
    s = _errors(s, error, "d_layer")
    for j in range(n):
        s = _gate_sequence(s, [r.p[j], "H" if r.h else "I", "Z" if r.z_meas[j] else "I"], j + 1)
    s = _errors(s, error, "measurement")
    return s


def trap_zero_probability(ham, t, r, error) -> float:
    return float(z_distribution(trap_state(ham, t, r, error))[0])


def target_distribution(spec: TargetSpec, error: ErrorConfig | None = None) -> np.ndarray:
    """Exact target output distribution (ideal when ``error`` is None)."""
    error = error or ErrorConfig.none()
    n = spec.n
    s = prepare_zero(n)
    s = _errors(s, error, "prep")
    for j in range(n):
        s = apply_gate(s, Gate(np.asarray(spec.a_prime[j]), (j + 1,), "A'"))
    s = _errors(s, error, "a_layer")
    s = _errors(s, error, "u1")
    s = evolve(s, spec.hamiltonian, spec.t / 2)
    s = _errors(s, error, "evolution_1")
    s = _errors(s, error, "b_layer")
    s = evolve(s, spec.hamiltonian, spec.t / 2)
    s = _errors(s, error, "evolution_2")
    s = _errors(s, error, "c_layer")
    s = _errors(s, error, "u2")
    s = _errors(s, error, "d_layer")
    for j in range(n):
        s = apply_gate(s, Gate(np.asarray(spec.d_prime[j]), (j + 1,), "D'"))
    s = _errors(s, error, "measurement")
    return z_distribution(s)


def target_vd(spec: TargetSpec, error: ErrorConfig) -> float:
    return variation_distance(target_distribution(spec), target_distribution(spec, error))


def exact_p_inco(ham: AccreditableHamiltonian, t: float, error: ErrorConfig) -> float:
    """Probability a trap reads out anything but all-zero, by full enumeration.

    Averages over every (h, P, prep Z, measurement Z) draw with equal weight.
    """
    if ham.n > ENUMERATION_CAP:
        raise CapacityError(f"enumeration capped at {ENUMERATION_CAP} qubits; use p_inco_monte_carlo")
    if error.is_error_free:
        return 0.0
    values = [1.0 - trap_zero_probability(ham, t, r, error) for r in enumerate_trap_randomness(ham.n)]
    return float(math.fsum(values) / len(values))


def p_inco_monte_carlo(ham, t, error, n_draws: int, seed: int) -> Estimate:
    """Average exact per-draw failure probability over random draws."""
    rng = np.random.default_rng(seed)
    vals = np.empty(n_draws)
    for i in range(n_draws):
        r = randomness_from_uniforms(ham.n, rng.random(1 + 3 * ham.n))
        vals[i] = 1.0 - trap_zero_probability(ham, t, r, error)
    return Estimate(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n_draws)), n_draws)


def detection_rate_empirical(ham, t, error, n_samples: int, seed: int) -> Estimate:
    """Fraction of sampled traps with a non-zero readout.

    Samples both the trap randomness and the measurement outcome.
    """
    rng = np.random.default_rng(seed)
    hits = 0
    cache: dict[tuple, float] = {}
    for _ in range(n_samples):
        r = randomness_from_uniforms(ham.n, rng.random(1 + 3 * ham.n))
        key = r.key()
        if key not in cache:
            cache[key] = trap_zero_probability(ham, t, r, error)
        if rng.random() >= cache[key]:
            hits += 1
    rate = hits / n_samples
    return Estimate(rate, math.sqrt(rate * (1 - rate) / n_samples), n_samples)


# --- channel representations ------------------------------------------------

def pauli_basis(k: int) -> list[str]:
    """k-qubit Pauli labels, (I, X, Y, Z) per qubit, lexicographic."""
    return ["".join(s) for s in product("IXYZ", repeat=k)]


def process_matrix(e: ErrorChannel) -> np.ndarray:
    """Chi matrix: ``E(rho) = sum_mn chi[m, n] P_m rho P_n``."""
    k = e.arity
    if k > 2:
        raise CapacityError("process matrices are computed for channels on at most 2 qubits")
    basis = [pauli_string_matrix(s) for s in pauli_basis(k)]
    dim = 1 << k
    chi = np.zeros((4**k, 4**k), dtype=complex)
    for K in e.kraus:
        a = np.array([np.trace(P.conj().T @ K) / dim for P in basis])
        chi += np.outer(a, a.conj())
    return chi


def channel_from_chi(chi: np.ndarray, qubits, label="from_chi") -> ErrorChannel:
    """Kraus form of a chi matrix via its eigendecomposition."""
    k = len(qubits)
    basis = [pauli_string_matrix(s) for s in pauli_basis(k)]
    w, v = np.linalg.eigh((chi + chi.conj().T) / 2)
    ops = []
    for lam, vec in zip(w, v.T):
        if lam > 1e-14:
            ops.append(math.sqrt(lam) * sum(c * P for c, P in zip(vec, basis)))
    return ErrorChannel(tuple(ops), tuple(qubits), label)


def twirl(e: ErrorChannel) -> ErrorChannel:
    """Uniform average of ``P E(P rho P) P`` over all Paulis P on the channel's qubits."""
    k = e.arity
    if k > 2:
        raise CapacityError("twirl is computed for channels on at most 2 qubits")
    scale = 1.0 / math.sqrt(4**k)
    ops = []
    for s in pauli_basis(k):
        P = pauli_string_matrix(s)
        for K in e.kraus:
            ops.append(scale * (P @ K @ P))
    return ErrorChannel(tuple(ops), e.qubits, f"twirl({e.label})")


def pauli_weights(e: ErrorChannel) -> dict[str, float]:
    """Diagonal of the chi matrix, labelled by Pauli string."""
    chi = process_matrix(e)
    return {s: float(chi[i, i].real) for i, s in enumerate(pauli_basis(e.arity))}


def max_offdiagonal(chi: np.ndarray) -> float:
    return float(np.max(np.abs(chi - np.diag(np.diag(chi)))))


# --- per-draw comparison of trap and target ----------------------------------

@dataclass(frozen=True)
class DrawComparison:
    target_vd: float
    min_trap_vd: float
    violations: int
    draws: int

    @property
    def holds(self) -> bool:
        return self.violations == 0


def compare_trap_target(spec: TargetSpec, ham, error: ErrorConfig, tol: float = 1e-12) -> DrawComparison:
    """Trap-side VD for every enumerated draw against the target-side VD.

    A trap's ideal output is all-zero, so its VD equals its failure
    probability for that draw.
    """
    if ham.n > ENUMERATION_CAP:
        raise CapacityError(f"enumeration capped at {ENUMERATION_CAP} qubits")
    tvd = target_vd(spec, error)
    trap_vds = [1.0 - trap_zero_probability(ham, spec.t, r, error) for r in enumerate_trap_randomness(ham.n)]
    violations = sum(1 for v in trap_vds if v + tol < tvd)
    return DrawComparison(tvd, min(trap_vds), violations, len(trap_vds))


# --- distribution files --------------------------------------------------------

def parse_distribution(text: str) -> np.ndarray:
    """``<bitstring> <probability>`` per line, ``#`` comments; absent outcomes are 0."""
    entries = {}
    width = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or set(parts[0]) - {"0", "1"}:
            raise ValueError(f"line {lineno}: expected '<bitstring> <probability>', got {line!r}")
        if width is None:
            width = len(parts[0])
        elif len(parts[0]) != width:
            raise DimensionError(f"line {lineno}: bitstring length {len(parts[0])}, expected {width}")
        try:
            entries[int(parts[0], 2)] = float(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: bad probability {parts[1]!r}") from None
    if width is None:
        raise ValueError("empty distribution file")
    p = np.zeros(1 << width)
    for k, v in entries.items():
        p[k] = v
    if p.min() < -1e-12 or abs(p.sum() - 1) > 1e-10:
        raise ValueError("probabilities must be non-negative and sum to 1")
    return p


def format_distribution(p) -> str:
    n = int(round(math.log2(len(p))))
    return "".join(f"{format(i, f'0{n}b')} {v:.17g}\n" for i, v in enumerate(p) if v != 0)
