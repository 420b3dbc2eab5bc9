"""YAML run configuration.

Grammar (all sections are mappings)::

    hamiltonian:
      lattice: [rows, cols]            # or graph: {vertices: n, edges: [[u, v], ...]}
      couplings: {uniform: J}          # or couplings: {edges: [[u, v, J], ...]}
    target:
      t: 1.0
      a_prime: H                       # one gate for every qubit, or a per-qubit list
      d_prime: [H, S, [0.3, 0.1, 0.2]] # names or [theta, phi, lambda] Euler angles
    protocol:
      theta: 0.1
      alpha: 0.9
      repetitions: 1                   # optional, default 1
    error:                             # optional, default error-free
      mode: model_compliant            # or unconstrained
      channels:
        - {attach: evolution_2, kind: bit_flip, qubits: [1], params: {p: 0.1}}
    seed: 1234

Channel kinds and their params:

    bit_flip {p}, phase_flip {p}, depolarizing {p}, amplitude_damping {gamma},
    pauli {weights: {X: 0.1, ...}}, rotation {axis: X|Y|Z, angle},
    kraus {operators: nested lists, complex entries as [re, im]},
    hamiltonian_swap {j_prime} or {couplings: [[u, v, J'], ...]}

``hamiltonian_swap`` replaces H by H' for the half-evolution it follows. It
is built from the circuit itself, so it only loads in unconstrained mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from . import engine
from .engine import MAX_QUBITS, NAMED_GATES, ErrorChannel, bloch_unitary, evolution_operator
from .errors import CapacityError, ChannelError, ConfigError, DimensionError, NotTwoColourable
from .hamiltonian import AccreditableHamiltonian, CouplingTable, build_accreditable
from .hqs import ATTACHMENT_POINTS, ComplianceMode, ErrorConfig
from .lattice import InteractionGraph, square_lattice
from .protocol import ProtocolConfig
from .trap import TargetSpec

SECTIONS = ("hamiltonian", "target", "protocol", "error", "seed")
CHANNEL_KINDS = (
    "bit_flip",
    "phase_flip",
    "depolarizing",
    "amplitude_damping",
    "pauli",
    "rotation",
    "kraus",
    "hamiltonian_swap",
)


@dataclass(frozen=True, eq=False)
class RunConfig:
    protocol: ProtocolConfig
    repetitions: int
    echo: dict
    source: str = ""

    @property
    def seed(self) -> int:
        return int(self.protocol.master_seed)


# --- YAML with positions ------------------------------------------------------

def _marks(node, path=(), out=None) -> dict:
    out = {} if out is None else out
    out[path] = (node.start_mark.line + 1, node.start_mark.column + 1)
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            out[path + (k.value,) + ("__key__",)] = (k.start_mark.line + 1, k.start_mark.column + 1)
            _marks(v, path + (k.value,), out)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _marks(v, path + (i,), out)
    return out


def load_yaml(text: str):
    """Parse ``text``; returns (data, marks) where marks maps key paths to (line, column)."""
    loader = yaml.SafeLoader(text)
    try:
        node = loader.get_single_node()
        data = loader.construct_document(node) if node is not None else None
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark else None
        col = mark.column + 1 if mark else None
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(f"YAML syntax error: {problem}", "parse", line, col) from None
    finally:
        loader.dispose()
    return data, (_marks(node) if node is not None else {})


class _Ctx:
    def __init__(self, marks):
        self.marks = marks

    def fail(self, path, message):
        where = self.marks.get(tuple(path))
        while where is None and path:
            path = path[:-1]
            where = self.marks.get(tuple(path))
        line, col = where if where else (None, None)
        label = ".".join(str(p) for p in path)
        raise ConfigError(f"{label or 'config'}: {message}", "validation", line, col)

    def mapping(self, value, path, keys, required=()):
        if not isinstance(value, dict):
            self.fail(path, "expected a mapping")
        for k in value:
            if k not in keys:
                self.fail(list(path) + [k, "__key__"], f"unknown key {k!r}")
        for k in required:
            if k not in value:
                self.fail(path, f"missing key {k!r}")
        return value

    def number(self, value, path, lo=None, hi=None, lo_open=False, hi_open=False) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(path, f"expected a number, got {value!r}")
        x = float(value)
        if not math.isfinite(x):
            self.fail(path, "must be finite")
        if lo is not None and (x < lo or (lo_open and x == lo)):
            self.fail(path, f"{x} is below the allowed range")
        if hi is not None and (x > hi or (hi_open and x == hi)):
            self.fail(path, f"{x} is above the allowed range")
        return x

    def integer(self, value, path, lo=None) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(path, f"expected an integer, got {value!r}")
        if lo is not None and value < lo:
            self.fail(path, f"must be at least {lo}")
        return int(value)


# --- sections -----------------------------------------------------------------

def _graph(ctx: _Ctx, sec, path) -> InteractionGraph:
    if ("lattice" in sec) == ("graph" in sec):
        ctx.fail(path, "give exactly one of 'lattice' or 'graph'")
    if "lattice" in sec:
        dims = sec["lattice"]
        if not isinstance(dims, list) or len(dims) != 2:
            ctx.fail(path + ["lattice"], "expected [rows, cols]")
        rows = ctx.integer(dims[0], path + ["lattice", 0], 1)
        cols = ctx.integer(dims[1], path + ["lattice", 1], 1)
        if rows * cols > MAX_QUBITS:
            raise CapacityError(f"{rows}x{cols} lattice exceeds the {MAX_QUBITS}-qubit cap")
        return square_lattice(rows, cols)
    g = ctx.mapping(sec["graph"], path + ["graph"], ("vertices", "edges"), ("vertices", "edges"))
    n = ctx.integer(g["vertices"], path + ["graph", "vertices"], 1)
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} vertices exceed the {MAX_QUBITS}-qubit cap")
    if not isinstance(g["edges"], list):
        ctx.fail(path + ["graph", "edges"], "expected a list of [u, v] pairs")
    edges = []
    for i, e in enumerate(g["edges"]):
        p = path + ["graph", "edges", i]
        if not isinstance(e, list) or len(e) != 2:
            ctx.fail(p, "expected [u, v]")
        edges.append((ctx.integer(e[0], p + [0], 1), ctx.integer(e[1], p + [1], 1)))
    try:
        return InteractionGraph.from_edges(n, edges)
    except ValueError as exc:
        ctx.fail(path + ["graph"], str(exc))


def _couplings(ctx: _Ctx, value, path, graph: InteractionGraph, name="J") -> CouplingTable:
    c = ctx.mapping(value, path, ("uniform", "edges"))
    if ("uniform" in c) == ("edges" in c):
        ctx.fail(path, "give exactly one of 'uniform' or 'edges'")
    if "uniform" in c:
        return CouplingTable.uniform(graph, ctx.number(c["uniform"], path + ["uniform"]))
    if not isinstance(c["edges"], list):
        ctx.fail(path + ["edges"], f"expected a list of [u, v, {name}]")
    table = {}
    for i, e in enumerate(c["edges"]):
        p = path + ["edges", i]
        if not isinstance(e, list) or len(e) != 3:
            ctx.fail(p, f"expected [u, v, {name}]")
        a, b = ctx.integer(e[0], p + [0], 1), ctx.integer(e[1], p + [1], 1)
        table[(a, b)] = ctx.number(e[2], p + [2])
    return CouplingTable(table)


def _hamiltonian(ctx: _Ctx, sec) -> AccreditableHamiltonian:
    path = ["hamiltonian"]
    ctx.mapping(sec, path, ("lattice", "graph", "couplings"), ("couplings",))
    graph = _graph(ctx, sec, path)
    couplings = _couplings(ctx, sec["couplings"], path + ["couplings"], graph)
    try:
        return build_accreditable(graph, couplings)
    except NotTwoColourable as exc:
        ctx.fail(path, str(exc))
    except ValueError as exc:
        ctx.fail(path + ["couplings"], str(exc))


def _gate(ctx: _Ctx, value, path) -> np.ndarray:
    if isinstance(value, str):
        key = value.upper()
        if key not in NAMED_GATES or NAMED_GATES[key].shape != (2, 2):
            ctx.fail(path, f"unknown single-qubit gate {value!r}")
        return NAMED_GATES[key]
    if isinstance(value, list) and len(value) == 3:
        return bloch_unitary(*(ctx.number(v, path + [i]) for i, v in enumerate(value)))
    ctx.fail(path, "expected a gate name or [theta, phi, lambda]")


def _layer(ctx: _Ctx, value, path, n) -> np.ndarray:
    if isinstance(value, list) and not (len(value) == 3 and all(isinstance(v, (int, float)) for v in value)):
        if len(value) != n:
            ctx.fail(path, f"expected {n} gates, got {len(value)}")
        return np.stack([_gate(ctx, v, path + [i]) for i, v in enumerate(value)])
    g = _gate(ctx, value, path)
    return np.stack([g] * n)


def _target(ctx: _Ctx, sec, ham: AccreditableHamiltonian) -> TargetSpec:
    path = ["target"]
    ctx.mapping(sec, path, ("t", "a_prime", "d_prime"), ("t",))
    t = ctx.number(sec["t"], path + ["t"])
    a = _layer(ctx, sec.get("a_prime", "H"), path + ["a_prime"], ham.n)
    d = _layer(ctx, sec.get("d_prime", "H"), path + ["d_prime"], ham.n)
    return TargetSpec(a, d, ham.sum, t)


def _complex_matrix(ctx: _Ctx, value, path) -> np.ndarray:
    if not isinstance(value, list) or not value:
        ctx.fail(path, "expected a square matrix as nested lists")
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != len(value):
            ctx.fail(path + [i], "matrix is not square")
        out = []
        for j, x in enumerate(row):
            p = path + [i, j]
            if isinstance(x, list):
                if len(x) != 2:
                    ctx.fail(p, "complex entries are [re, im]")
                out.append(complex(ctx.number(x[0], p + [0]), ctx.number(x[1], p + [1])))
            else:
                out.append(complex(ctx.number(x, p)))
        rows.append(out)
    return np.array(rows, dtype=complex)


def _swap_channel(ctx, params, path, ham, t, n):
    ctx.mapping(params, path, ("j_prime", "couplings"))
    if ("j_prime" in params) == ("couplings" in params):
        ctx.fail(path, "give exactly one of 'j_prime' or 'couplings'")
    if "j_prime" in params:
        table = CouplingTable.uniform(ham.graph, ctx.number(params["j_prime"], path + ["j_prime"]))
    else:
        table = _couplings(ctx, {"edges": params["couplings"]}, path + ["couplings"], ham.graph, "J'")
    try:
        h_prime = build_accreditable(ham.graph, table)
    except ValueError as exc:
        ctx.fail(path, str(exc))
    kraus = evolution_operator(h_prime.sum, t / 2) @ evolution_operator(ham.sum, -t / 2)
    return ErrorChannel((kraus,), tuple(range(1, n + 1)), "hamiltonian_swap", compliant=False)


def _channel(ctx: _Ctx, item, path, ham: AccreditableHamiltonian, t: float) -> tuple[str, ErrorChannel]:
    n = ham.n
    ctx.mapping(item, path, ("attach", "kind", "qubits", "params"), ("attach", "kind"))
    attach = item["attach"]
    if attach not in ATTACHMENT_POINTS:
        ctx.fail(path + ["attach"], f"unknown attachment point {attach!r}; one of {', '.join(ATTACHMENT_POINTS)}")
    kind = item["kind"]
    if kind not in CHANNEL_KINDS:
        ctx.fail(path + ["kind"], f"unknown channel kind {kind!r}; one of {', '.join(CHANNEL_KINDS)}")
    params = item.get("params", {}) or {}
    ppath = path + ["params"]
    if kind == "hamiltonian_swap":
        if "qubits" in item:
            ctx.fail(path + ["qubits"], "hamiltonian_swap always acts on the full register")
        if attach not in ("evolution_1", "evolution_2"):
            ctx.fail(path + ["attach"], "hamiltonian_swap attaches to evolution_1 or evolution_2")
        return attach, _swap_channel(ctx, params, ppath, ham, t, n)

    qubits = item.get("qubits")
    if not isinstance(qubits, list) or not qubits:
        ctx.fail(path + ["qubits"] if "qubits" in item else path, "expected a non-empty list of qubits")
    qubits = tuple(ctx.integer(q, path + ["qubits", i], 1) for i, q in enumerate(qubits))
    for i, q in enumerate(qubits):
        if q > n:
            ctx.fail(path + ["qubits", i], f"qubit {q} outside 1..{n}")
    single = ("bit_flip", "phase_flip", "amplitude_damping", "rotation")
    if kind in single and len(qubits) != 1:
        ctx.fail(path + ["qubits"], f"{kind} acts on exactly one qubit")

    try:
        if kind in ("bit_flip", "phase_flip", "depolarizing"):
            ctx.mapping(params, ppath, ("p",), ("p",))
            p = ctx.number(params["p"], ppath + ["p"], 0.0, 1.0)
            if kind == "depolarizing":
                return attach, engine.depolarizing(p, qubits)
            fn = engine.bit_flip if kind == "bit_flip" else engine.phase_flip
            return attach, fn(p, qubits[0])
        if kind == "amplitude_damping":
            ctx.mapping(params, ppath, ("gamma",), ("gamma",))
            return attach, engine.amplitude_damping(ctx.number(params["gamma"], ppath + ["gamma"], 0.0, 1.0), qubits[0])
        if kind == "pauli":
            ctx.mapping(params, ppath, ("weights",), ("weights",))
            w = params["weights"]
            if not isinstance(w, dict) or not w:
                ctx.fail(ppath + ["weights"], "expected a mapping of Pauli strings to probabilities")
            weights = {str(k): ctx.number(v, ppath + ["weights", k], 0.0, 1.0) for k, v in w.items()}
            return attach, engine.pauli_mixture(weights, qubits)
        if kind == "rotation":
            ctx.mapping(params, ppath, ("axis", "angle"), ("axis", "angle"))
            axis = str(params["axis"]).upper()
            if axis not in ("X", "Y", "Z"):
                ctx.fail(ppath + ["axis"], "axis must be X, Y or Z")
            angle = ctx.number(params["angle"], ppath + ["angle"])
            return attach, rotation_channel(axis, angle, qubits[0])
        # kraus
        ctx.mapping(params, ppath, ("operators",), ("operators",))
        ops = params["operators"]
        if not isinstance(ops, list) or not ops:
            ctx.fail(ppath + ["operators"], "expected a list of matrices")
        mats = [_complex_matrix(ctx, m, ppath + ["operators", i]) for i, m in enumerate(ops)]
        return attach, engine.kraus_explicit(mats, qubits)
    except ChannelError as exc:
        ctx.fail(path, str(exc))


def rotation_channel(axis: str, angle: float, qubit: int) -> ErrorChannel:
    """Coherent over-rotation ``exp(-i angle/2 sigma_axis)``."""
    sigma = engine.PAULI_MATRICES[axis]
    u = math.cos(angle / 2) * np.eye(2) - 1j * math.sin(angle / 2) * sigma
    return engine.unitary_channel(u, (qubit,), f"rotation_{axis.lower()}")


def _errors(ctx: _Ctx, sec, ham, t) -> ErrorConfig:
    if sec is None:
        return ErrorConfig.none()
    path = ["error"]
    ctx.mapping(sec, path, ("mode", "channels"))
    mode = sec.get("mode", ComplianceMode.MODEL_COMPLIANT.value)
    if mode not in [m.value for m in ComplianceMode]:
        ctx.fail(path + ["mode"], f"mode must be one of {', '.join(m.value for m in ComplianceMode)}")
    items = sec.get("channels", []) or []
    if not isinstance(items, list):
        ctx.fail(path + ["channels"], "expected a list of channels")
    channels: dict[str, list[ErrorChannel]] = {}
    for i, item in enumerate(items):
        point, ch = _channel(ctx, item, path + ["channels", i], ham, t)
        if not ch.compliant and mode != ComplianceMode.UNCONSTRAINED.value:
            ctx.fail(path + ["channels", i, "kind"], f"{ch.label} is only allowed with mode: unconstrained")
        channels.setdefault(point, []).append(ch)
    return ErrorConfig({k: tuple(v) for k, v in channels.items()}, ComplianceMode(mode))


def parse_config(text: str, seed_override: int | None = None, source: str = "") -> RunConfig:
    data, marks = load_yaml(text)
    ctx = _Ctx(marks)
    if data is None:
        ctx.fail([], "empty config")
    ctx.mapping(data, [], SECTIONS, ("hamiltonian", "target", "protocol"))
    ham = _hamiltonian(ctx, data["hamiltonian"])
    target = _target(ctx, data["target"], ham)

    psec = ctx.mapping(data["protocol"], ["protocol"], ("theta", "alpha", "repetitions"), ("theta", "alpha"))
    theta = ctx.number(psec["theta"], ["protocol", "theta"], 0.0, 1.0, lo_open=True, hi_open=True)
    alpha = ctx.number(psec["alpha"], ["protocol", "alpha"], 0.0, 1.0, hi_open=True)
    reps = ctx.integer(psec.get("repetitions", 1), ["protocol", "repetitions"], 1)

    if seed_override is not None:
        seed = int(seed_override)
    elif "seed" in data:
        seed = ctx.integer(data["seed"], ["seed"], 0)
    else:
        seed = 0
    if not 0 <= seed < 2**64:
        ctx.fail(["seed"], "seed must fit an unsigned 64-bit integer")

    error = _errors(ctx, data.get("error"), ham, target.t)
    try:
        cfg = ProtocolConfig(target, ham, target.t, theta, alpha, seed, error)
    except (ValueError, DimensionError) as exc:
        ctx.fail([], str(exc))
    echo = dict(data)
    echo["seed"] = seed
    return RunConfig(cfg, reps, echo, source)


def load_config(path, seed_override: int | None = None) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {p}: {exc.strerror}", "parse") from None
    return parse_config(text, seed_override, str(p))


class _NoHamiltonian:
    n = MAX_QUBITS


def parse_channel_fixture(text: str) -> ErrorChannel:
    """A single channel document: ``{kind, qubits, params}``; no attachment point."""
    data, marks = load_yaml(text)
    ctx = _Ctx(marks)
    ctx.mapping(data, [], ("kind", "qubits", "params"), ("kind", "qubits"))
    if data["kind"] == "hamiltonian_swap":
        ctx.fail(["kind"], "hamiltonian_swap needs a run config, not a channel fixture")
    _, ch = _channel(ctx, dict(data, attach="prep"), [], _NoHamiltonian(), 0.0)
    return ch


def load_channel_fixture(path) -> ErrorChannel:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}", "parse") from None
    return parse_channel_fixture(text)
