from __future__ import annotations

import numpy as np
import pytest

from hqs_accred import engine, oracle
from hqs_accred.errors import ConfigError, DimensionError
from hqs_accred.hamiltonian import lattice_hamiltonian
from hqs_accred.hqs import (
    ATTACHMENT_POINTS,
    ComplianceMode,
    ErrorConfig,
    HqsCircuit,
    canonical_form,
    exact_output_distribution,
    execute,
    execute_canonical,
    identity_layer,
)
from hqs_accred.trap import (
    TargetSpec,
    TrapRandomness,
    build_target,
    build_trap,
    draw_trap_randomness,
    enumerate_trap_randomness,
    randomness_from_uniforms,
    randomness_space_size,
    trap_is_correct,
    trap_layers,
)
from hqs_accred.inversion import synthesize_inversion

from conftest import random_layer


def test_attachment_points_in_order():
    assert ATTACHMENT_POINTS[0] == "prep" and ATTACHMENT_POINTS[-1] == "measurement"
    assert len(ATTACHMENT_POINTS) == len(set(ATTACHMENT_POINTS))


def test_circuit_shape_checks():
    h = lattice_hamiltonian(1, 2)
    with pytest.raises(DimensionError):
        HqsCircuit(2, identity_layer(3), identity_layer(2), identity_layer(2), identity_layer(2), h.sum, 1.0)
    with pytest.raises(DimensionError):
        HqsCircuit(3, *(identity_layer(3) for _ in range(4)), h.sum, 1.0)
    with pytest.raises(DimensionError):
        HqsCircuit(2, *(identity_layer(2) for _ in range(4)), h.sum, 1.0, u1=np.eye(2))


def test_error_config_validation():
    with pytest.raises(ConfigError):
        ErrorConfig({"nowhere": engine.bit_flip(0.1, 1)})
    bad = engine.unitary_channel(np.eye(2), (1,), compliant=False)
    with pytest.raises(ConfigError):
        ErrorConfig({"prep": bad})
    ok = ErrorConfig({"prep": bad}, ComplianceMode.UNCONSTRAINED)
    assert len(ok.at("prep")) == 1
    with pytest.raises(DimensionError):
        ErrorConfig({"prep": engine.bit_flip(0.1, 3)}).check_fits(2)


def test_target_without_errors_matches_direct_product(rng):
    h = lattice_hamiltonian(2, 2, j=0.4)
    a, d = random_layer(rng, 4), random_layer(rng, 4)
    spec = TargetSpec(a, d, h.sum, 1.7)
    p = exact_output_distribution(build_target(spec))
    u = engine.evolution_operator(h.sum, 1.7)
    ka = np.ones((1, 1))
    kd = np.ones((1, 1))
    for m in a:
        ka = np.kron(ka, m)
    for m in d:
        kd = np.kron(kd, m)
    psi = kd @ u @ ka[:, 0]
    assert np.abs(p - np.abs(psi) ** 2).max() < 1e-12


def test_execute_matches_oracle_target(rng):
    h = lattice_hamiltonian(1, 3, j=0.8)
    spec = TargetSpec(random_layer(rng, 3), random_layer(rng, 3), h.sum, 1.2)
    err = ErrorConfig({
        "prep": engine.bit_flip(0.1, 1),
        "evolution_1": engine.depolarizing(0.2, (2, 3)),
        "c_layer": engine.amplitude_damping(0.1, 3),
        "measurement": engine.phase_flip(0.3, 2),
    })
    a = exact_output_distribution(build_target(spec), err)
    b = oracle.target_distribution(spec, err)
    assert np.abs(a - b).max() < 1e-12


def test_randomness_mapping():
    r = randomness_from_uniforms(2, [0.7, 0.3, 0.6, 0.1, 0.99, 0.2, 0.5])
    assert r == TrapRandomness(1, "XZ", (1, 0), (0, 1))
    assert r.describe() == "h=1 P=XZ zp=10 zm=01"
    assert len(r.digest()) == 12


def test_enumeration_size():
    assert randomness_space_size(2) == 512
    draws = list(enumerate_trap_randomness(2))
    assert len(draws) == len(set(draws)) == 512


def test_draws_are_uniform():
    rng = np.random.default_rng(0)
    counts = {"I": 0, "X": 0, "Y": 0, "Z": 0}
    h = 0
    for _ in range(4000):
        r = draw_trap_randomness(1, rng)
        counts[r.p] += 1
        h += r.h
    for c in counts.values():
        assert abs(c / 4000 - 0.25) < 3 * np.sqrt(0.25 * 0.75 / 4000)
    assert abs(h / 4000 - 0.5) < 3 * np.sqrt(0.25 / 4000)


def test_trap_layers_order():
    inv = synthesize_inversion(lattice_hamiltonian(1, 2))
    r = TrapRandomness(1, "XI", (1, 0), (0, 1))
    a, b, c, d = trap_layers(r, inv)
    hh = engine.NAMED_GATES["H"]
    x, z = engine.PAULI_MATRICES["X"], engine.PAULI_MATRICES["Z"]
    assert np.abs(a[0] - x @ hh @ z).max() < 1e-15
    assert np.abs(d[1] - z @ hh).max() < 1e-15
    assert np.abs(b[0] - z).max() < 1e-15 and np.abs(c[1] - np.eye(2)).max() < 1e-15


def test_every_trap_is_all_zero_without_error():
    h = lattice_hamiltonian(1, 2, j=1.3)
    inv = synthesize_inversion(h)
    for r in enumerate_trap_randomness(2):
        p = exact_output_distribution(build_trap(h, 0.9, r, inv))
        assert abs(p[0] - 1) < 1e-12


def test_trap_routes_agree_under_noise():
    h = lattice_hamiltonian(1, 2, j=0.6)
    err = ErrorConfig({
        "prep": engine.bit_flip(0.1, 2),
        "evolution_1": engine.depolarizing(0.1, (1, 2)),
        "d_layer": engine.amplitude_damping(0.2, 1),
        "measurement": engine.bit_flip(0.05, 1),
    })
    for r in list(enumerate_trap_randomness(2))[::37]:
        a = exact_output_distribution(build_trap(h, 1.1, r), err)
        b = z_distribution_oracle(h, 1.1, r, err)
        assert np.abs(a - b).max() < 1e-12


def z_distribution_oracle(h, t, r, err):
    return engine.z_distribution(oracle.trap_state(h, t, r, err))


def test_trap_size_mismatch():
    with pytest.raises(ValueError):
        build_trap(lattice_hamiltonian(1, 2), 1.0, TrapRandomness(0, "III", (0, 0, 0), (0, 0, 0)))


def test_trap_is_correct():
    assert trap_is_correct("000") and not trap_is_correct("010")
    with pytest.raises(ValueError):
        trap_is_correct("")


def test_canonical_form_is_layer_independent(rng):
    h = lattice_hamiltonian(1, 2, j=0.7)
    err = ErrorConfig({p: engine.depolarizing(0.05, (1,)) for p in ATTACHMENT_POINTS[1:-1]})
    c_layer = random_layer(rng, 2)
    base = HqsCircuit(2, identity_layer(2), identity_layer(2), c_layer, identity_layer(2), h.sum, 0.8)
    form = canonical_form(base, err)
    for _ in range(5):
        c = HqsCircuit(2, random_layer(rng, 2), random_layer(rng, 2), c_layer, random_layer(rng, 2), h.sum, 0.8)
        a = engine.z_distribution(execute(c, err))
        b = engine.z_distribution(execute_canonical(c, form, err))
        assert np.abs(a - b).max() < 1e-12
