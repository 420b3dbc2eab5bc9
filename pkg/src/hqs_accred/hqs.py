"""HQS circuit skeleton with error attachment points.

Execution order (time runs left to right)::

    |0..0> -[prep]- A -[a_layer]- U1 -[u1]- e^{-iHt/2} -[evolution_1]-
    -[b_layer]- B - e^{-iHt/2} -[evolution_2]- -[c_layer]- C -[u2]- U2
    -[d_layer]- D -[measurement]- Z readout

Brackets mark where a configured channel acts. Channels at ``b_layer``,
``c_layer``, ``u2`` and ``d_layer`` act just before their operation; the
others just after. With that placement the gate-independent rewrite in
:func:`canonical_form` is an exact identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .engine import (
    DensityState,
    ErrorChannel,
    _check_cap,
    apply_channel,
    apply_layer,
    apply_unitary,
    evolution_operator,
    prepare_zero,
    z_distribution,
)
from .errors import ConfigError, DimensionError
from .pauli import WeightedPauliSum

ATTACHMENT_POINTS = (
    "prep",
    "a_layer",
    "u1",
    "evolution_1",
    "b_layer",
    "evolution_2",
    "c_layer",
    "u2",
    "d_layer",
    "measurement",
)


class ComplianceMode(str, Enum):
    MODEL_COMPLIANT = "model_compliant"
    UNCONSTRAINED = "unconstrained"


def identity_layer(n: int) -> np.ndarray:
    return np.broadcast_to(np.eye(2, dtype=complex), (n, 2, 2)).copy()


def _layer(mats, n, name):
    arr = np.array(mats, dtype=complex)
    if arr.shape != (n, 2, 2):
        raise DimensionError(f"{name} needs shape {(n, 2, 2)}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class HqsCircuit:
    n: int
    a_layer: np.ndarray
    b_layer: np.ndarray
    c_layer: np.ndarray
    d_layer: np.ndarray
    hamiltonian: WeightedPauliSum
    t: float
    u1: np.ndarray | None = None
    u2: np.ndarray | None = None

    def __post_init__(self):
        _check_cap(self.n)
        for name in ("a_layer", "b_layer", "c_layer", "d_layer"):
            object.__setattr__(self, name, _layer(getattr(self, name), self.n, name))
        if self.hamiltonian.qubit_count != self.n:
            raise DimensionError("Hamiltonian size differs from circuit size")
        d = 1 << self.n
        for name in ("u1", "u2"):
            u = getattr(self, name)
            if u is not None and np.shape(u) != (d, d):
                raise DimensionError(f"{name} must be {d}x{d}")

    def half_evolution(self) -> np.ndarray:
        return evolution_operator(self.hamiltonian, self.t / 2)


@dataclass(frozen=True, eq=False)
class ErrorConfig:
    """Channels keyed by attachment point; several channels at one point act in order."""

    channels: dict[str, tuple[ErrorChannel, ...]] = field(default_factory=dict)
    compliance_mode: ComplianceMode = ComplianceMode.MODEL_COMPLIANT

    def __post_init__(self):
        norm = {}
        for point, chans in self.channels.items():
            if point not in ATTACHMENT_POINTS:
                raise ConfigError(f"unknown attachment point {point!r}")
            if isinstance(chans, ErrorChannel):
                chans = (chans,)
            chans = tuple(chans)
            if self.compliance_mode == ComplianceMode.MODEL_COMPLIANT:
                for ch in chans:
                    if not ch.compliant:
                        raise ConfigError(
                            f"channel {ch.label!r} at {point} is circuit-dependent; "
                            "only allowed in unconstrained mode"
                        )
            if chans:
                norm[point] = chans
        object.__setattr__(self, "channels", norm)
        object.__setattr__(self, "compliance_mode", ComplianceMode(self.compliance_mode))

    @classmethod
    def none(cls) -> ErrorConfig:
        return cls({})

    def at(self, point: str) -> tuple[ErrorChannel, ...]:
        return self.channels.get(point, ())

    @property
    def is_error_free(self) -> bool:
        return not self.channels

    def check_fits(self, n: int) -> None:
        for point, chans in self.channels.items():
            for ch in chans:
                if max(ch.qubits) > n or min(ch.qubits) < 1:
                    raise DimensionError(f"channel {ch.label!r} at {point} targets qubits outside 1..{n}")


def _channels(s: DensityState, e: ErrorConfig, point: str) -> DensityState:
    for ch in e.at(point):
        s = apply_channel(s, ch)
    return s


def execute(c: HqsCircuit, e: ErrorConfig | None = None) -> DensityState:
    """State immediately before ideal Z readout (measurement channel included)."""
    e = e or ErrorConfig.none()
    e.check_fits(c.n)
    half = c.half_evolution() if c.hamiltonian.terms and c.t != 0 else None
    s = prepare_zero(c.n)
    s = _channels(s, e, "prep")
    s = apply_layer(s, c.a_layer)
    s = _channels(s, e, "a_layer")
    if c.u1 is not None:
        s = apply_unitary(s, c.u1)
    s = _channels(s, e, "u1")
    if half is not None:
        s = apply_unitary(s, half)
    s = _channels(s, e, "evolution_1")
    s = _channels(s, e, "b_layer")
    s = apply_layer(s, c.b_layer)
    if half is not None:
        s = apply_unitary(s, half)
    s = _channels(s, e, "evolution_2")
    s = _channels(s, e, "c_layer")
    s = apply_layer(s, c.c_layer)
    s = _channels(s, e, "u2")
    if c.u2 is not None:
        s = apply_unitary(s, c.u2)
    s = _channels(s, e, "d_layer")
    s = apply_layer(s, c.d_layer)
    s = _channels(s, e, "measurement")
    return s


def exact_output_distribution(c: HqsCircuit, e: ErrorConfig | None = None) -> np.ndarray:
    return z_distribution(execute(c, e))


# --- gate-independent canonical form -----------------------------------------

def _superop_of(n: int, steps) -> np.ndarray:
    """Liouville matrix (row-major vectorisation) of a sequence of maps.

    Each step is a callable ``DensityState -> DensityState``; they are
    applied to every matrix unit ``|i><j|``.
    """
    d = 1 << n
    cols = np.empty((d * d, d * d), dtype=complex)
    for idx in range(d * d):
        unit = np.zeros((d, d), dtype=complex)
        unit.flat[idx] = 1.0
        s = DensityState(unit, n)
        for step in steps:
            s = step(s)
        cols[:, idx] = s.rho.reshape(-1)
    return cols


def apply_superop(s: DensityState, sop: np.ndarray) -> DensityState:
    d = 1 << s.n
    return DensityState((sop @ s.rho.reshape(-1)).reshape(d, d), s.n)


@dataclass(frozen=True, eq=False)
class CanonicalForm:
    """Composite error channels after the first and second half-evolutions.

    Both depend on the circuit's C layer, U1, U2, H and t, never on the
    A, B or D layers.
    """

    first: np.ndarray
    second: np.ndarray


def canonical_form(c: HqsCircuit, e: ErrorConfig) -> CanonicalForm:
    n = c.n
    half = c.half_evolution()
    half_inv = half.conj().T
    ident = np.eye(1 << n, dtype=complex)
    u1 = ident if c.u1 is None else c.u1
    u2 = ident if c.u2 is None else c.u2

    def unitary(u):
        return lambda s: apply_unitary(s, u)

    def chans(point):
        return lambda s: _channels(s, e, point)

    c_layer = c.c_layer
    c_inv = np.conj(np.transpose(c_layer, (0, 2, 1)))
    first = _superop_of(n, [
        unitary(half_inv),
        unitary(u1.conj().T),
        chans("a_layer"),
        unitary(u1),
        chans("u1"),
        unitary(half),
        chans("evolution_1"),
        chans("b_layer"),
    ])
    second = _superop_of(n, [
        chans("evolution_2"),
        chans("c_layer"),
        lambda s: apply_layer(s, c_layer),
        chans("u2"),
        unitary(u2),
        chans("d_layer"),
        unitary(u2.conj().T),
        lambda s: apply_layer(s, c_inv),
    ])
    return CanonicalForm(first, second)


def execute_canonical(c: HqsCircuit, form: CanonicalForm, e: ErrorConfig) -> DensityState:
    """Run ``c`` with error-free single-qubit layers and the composite channels."""
    half = c.half_evolution()
    s = prepare_zero(c.n)
    s = _channels(s, e, "prep")
    s = apply_layer(s, c.a_layer)
    if c.u1 is not None:
        s = apply_unitary(s, c.u1)
    s = apply_unitary(s, half)
    s = apply_superop(s, form.first)
    s = apply_layer(s, c.b_layer)
    s = apply_unitary(s, half)
    s = apply_superop(s, form.second)
    s = apply_layer(s, c.c_layer)
    if c.u2 is not None:
        s = apply_unitary(s, c.u2)
    s = apply_layer(s, c.d_layer)
    s = _channels(s, e, "measurement")
    return s
