from __future__ import annotations

import math

import numpy as np
import pytest

from hqs_accred import engine, oracle
from hqs_accred.errors import DimensionError
from hqs_accred.hamiltonian import lattice_hamiltonian
from hqs_accred.hqs import ErrorConfig
from hqs_accred.protocol import (
    ProtocolConfig,
    ProtocolRunner,
    TrapCache,
    compute_n_traps,
    decode_randomness,
    epsilon_from_tally,
    randomness_codes,
    repetition_uniforms,
    row_uniforms,
    run_batch,
    run_protocol,
    sample_rows,
    target_position,
    validate_bound,
)
from hqs_accred.trap import TargetSpec, enumerate_trap_randomness, randomness_from_uniforms

from conftest import random_layer


def make_cfg(error=None, rows=1, cols=2, theta=0.2, alpha=0.9, seed=1, t=1.1, j=0.8):
    ham = lattice_hamiltonian(rows, cols, j=j)
    rng = np.random.default_rng(99)
    spec = TargetSpec(random_layer(rng, ham.n), random_layer(rng, ham.n), ham.sum, t)
    return ProtocolConfig(spec, ham, t, theta, alpha, seed, error or ErrorConfig.none())


def test_n_traps_examples():
    assert compute_n_traps(0.2, 0.9) == 151
    assert compute_n_traps(0.1, 0.95) == 739
    assert compute_n_traps(0.1, 0.9) == 601
    assert compute_n_traps(0.999999, 0) == 3


@pytest.mark.parametrize("theta,alpha", [(0, 0.5), (1.0, 0.5), (-0.1, 0.5), (0.5, 1.0), (0.5, -0.1)])
def test_n_traps_domain(theta, alpha):
    with pytest.raises(ValueError):
        compute_n_traps(theta, alpha)


def test_config_validation():
    cfg = make_cfg()
    with pytest.raises(ValueError):
        ProtocolConfig(cfg.target, cfg.hamiltonian, 2.0, 0.2, 0.9, 1)
    with pytest.raises(ValueError):
        ProtocolConfig(cfg.target, lattice_hamiltonian(1, 2, j=0.5), cfg.t, 0.2, 0.9, 1)
    with pytest.raises(DimensionError):
        ProtocolConfig(cfg.target, cfg.hamiltonian, cfg.t, 0.2, 0.9, 1, ErrorConfig({"prep": engine.bit_flip(0.1, 3)}))
    with pytest.raises(ValueError):
        ProtocolConfig(cfg.target, cfg.hamiltonian, cfg.t, 0.2, 0.9, -1)
    xy = lattice_hamiltonian(1, 2, u=0.3)
    with pytest.raises(ValueError):
        ProtocolConfig(TargetSpec(cfg.target.a_prime, cfg.target.d_prime, xy.sum, cfg.t), xy, cfg.t, 0.2, 0.9, 1)


def test_error_free_epsilon_is_theta():
    res = run_protocol(make_cfg())
    assert res.n_incorrect == 0 and res.epsilon == pytest.approx(0.2)
    assert len(res.log) == res.n_traps + 1
    assert [r.index for r in res.log] == list(range(1, res.n_traps + 2))
    assert sum(r.kind == "target" for r in res.log) == 1
    assert res.log[res.target_index - 1].kind == "target"
    assert all(r.outcome == "00" for r in res.log if r.kind == "trap")


def test_full_depolarizing_saturates():
    err = ErrorConfig({"evolution_2": engine.depolarizing(1.0, (1, 2))})
    res = run_protocol(make_cfg(err))
    assert res.epsilon == 1.0
    # incorrect with probability 1 - 2**-N
    assert abs(res.n_incorrect / res.n_traps - 0.75) < 4 * math.sqrt(0.75 * 0.25 / res.n_traps)


def test_epsilon_range_and_formula():
    err = ErrorConfig({"evolution_1": engine.bit_flip(0.05, 1)})
    for res in run_batch(make_cfg(err), 30):
        assert res.theta <= res.epsilon <= 1
        assert res.epsilon == epsilon_from_tally(res.n_incorrect, res.n_traps, res.theta)
        assert (res.epsilon == res.theta) == (res.n_incorrect == 0)
        assert res.raw_two_p_hat == pytest.approx(2 * res.n_incorrect / res.n_traps)


def test_seed_reproducible_and_sensitive():
    err = ErrorConfig({"evolution_1": engine.bit_flip(0.1, 2)})
    cfg = make_cfg(err)
    a = run_protocol(cfg, repetition=3)
    b = run_protocol(cfg, repetition=3)
    assert a == b
    c = run_protocol(make_cfg(err, seed=2), repetition=3)
    assert c.log != a.log


def test_threads_do_not_change_results():
    err = ErrorConfig({"evolution_2": engine.depolarizing(0.2, (1, 2, 3))})
    cfg = make_cfg(err, cols=3)
    base = [run_protocol(cfg, r, threads=1) for r in range(3)]
    for threads in (2, 8):
        assert [run_protocol(cfg, r, threads=threads) for r in range(3)] == base


def test_cache_shared_across_repetitions():
    err = ErrorConfig({"evolution_2": engine.bit_flip(0.1, 1)})
    cfg = make_cfg(err)
    runner = ProtocolRunner(cfg)
    runner.run(0)
    filled = len(runner.cache)
    assert 0 < filled <= 512
    runner.run(1)
    assert len(runner.cache) >= filled
    assert ProtocolRunner(cfg, cache=runner.cache).cache is runner.cache
    other = make_cfg(err, seed=5)
    assert ProtocolRunner(other, cache=runner.cache).cache is not runner.cache


def test_row_uniforms_match_bulk_draw():
    bulk = repetition_uniforms(42, 7, 50)
    for row in (0, 1, 17, 50):
        assert np.array_equal(row_uniforms(42, 7, row), bulk[row])


def test_randomness_codes_roundtrip():
    rng = np.random.default_rng(4)
    u = rng.random((300, 32))
    codes = randomness_codes(u, 3)
    for row, code in zip(u, codes):
        assert decode_randomness(int(code), 3) == randomness_from_uniforms(3, row)
    all_codes = {int(randomness_codes(np.array([[0.0] * 32]), 2)[0])}
    assert all_codes == {0}


def test_trap_cache_distribution_matches_oracle():
    err = ErrorConfig({"prep": engine.bit_flip(0.2, 2), "evolution_2": engine.phase_flip(0.1, 1)})
    cfg = make_cfg(err)
    cache = TrapCache(cfg.hamiltonian, cfg.t, err)
    for r in list(enumerate_trap_randomness(2))[::41]:
        want = engine.z_distribution(oracle.trap_state(cfg.hamiltonian, cfg.t, r, err))
        assert np.abs(cache.distribution(r) - want).max() < 1e-12


def test_sample_rows_matches_sample_index():
    rng = np.random.default_rng(8)
    dists = rng.dirichlet(np.ones(4), size=200)
    dists[::7, 1] = 0
    dists /= dists.sum(axis=1, keepdims=True)
    u = rng.random(200)
    got = sample_rows(dists, u)
    assert list(got) == [engine.sample_index(p, x) for p, x in zip(dists, u)]


def test_target_position_uniform_chi_square():
    n_traps = compute_n_traps(0.9, 0.0)
    assert n_traps == 3
    counts = np.zeros(n_traps + 1)
    for rep in range(10_000):
        counts[target_position(row_uniforms(7, rep, 0)[0], n_traps) - 1] += 1
    expected = 10_000 / (n_traps + 1)
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    assert chi2 < 16.27  # 0.999 quantile, 3 degrees of freedom


def test_target_position_edges():
    assert target_position(0.0, 5) == 1
    assert target_position(0.999999999, 5) == 6


def test_target_sample_follows_target_distribution():
    cfg = make_cfg(theta=0.9, alpha=0.0)
    runner = ProtocolRunner(cfg)
    counts = np.zeros(4)
    reps = 3000
    for rep in range(reps):
        counts[int(runner.run(rep, keep_log=False).target_outcome, 2)] += 1
    p = runner.target_dist
    for k in range(4):
        assert abs(counts[k] / reps - p[k]) < 4 * math.sqrt(p[k] * (1 - p[k]) / reps) + 1e-9


@pytest.mark.slow
def test_hoeffding_coverage():
    err = ErrorConfig({"evolution_1": engine.depolarizing(0.1, (1, 2))})
    cfg = make_cfg(err, theta=0.1, alpha=0.9)
    p = oracle.exact_p_inco(cfg.hamiltonian, cfg.t, err)
    results = run_batch(cfg, 500)
    covered = np.mean([abs(r.raw_two_p_hat - 2 * p) <= cfg.theta for r in results])
    margin = 3 * math.sqrt(0.9 * 0.1 / 500)
    assert covered >= cfg.alpha - margin


def test_validate_bound_error_free():
    report = validate_bound(make_cfg())
    assert report.vd_exact == 0 and report.p_inco == 0 and report.holds


def test_result_as_dict_roundtrip():
    res = run_protocol(make_cfg(), keep_log=True)
    d = res.as_dict()
    assert d["n_traps"] == res.n_traps and len(d["log"]) == res.n_traps + 1
    assert set(d["log"][0]) == {"index", "kind", "digest", "outcome"}
