"""The accreditation protocol: trap count, scheduling, tally and epsilon.

Randomness layout. Each protocol execution (one *repetition*) owns a Philox
stream keyed by ``SeedSequence([master_seed, repetition])``. The stream is
read as a ``(runs + 1, ROW_WIDTH)`` array of uniforms: row 0 picks the target
position, row ``r`` drives run ``r``. Row ``r`` is therefore reachable on its
own by advancing the generator ``r * ROW_WIDTH / 4`` counter blocks, so runs
can be executed in any order without changing what they draw.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .engine import MAX_QUBITS, bitstring, z_distribution
from .errors import CapacityError, DimensionError
from .hamiltonian import AccreditableHamiltonian
from .hqs import ErrorConfig, execute
from .inversion import synthesize_inversion
from .trap import RANDOMNESS_WIDTH, TargetSpec, TrapRandomness, build_target, build_trap

ROW_WIDTH = 32
SAMPLE_COLUMN = ROW_WIDTH - 1


def compute_n_traps(theta: float, alpha: float) -> int:
    """Number of traps for accuracy ``theta`` and confidence ``alpha``.

    ``ceil((2 / theta**2) * ln(2 / (1 - alpha))) + 1``
    """
    theta = float(theta)
    alpha = float(alpha)
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta={theta} must lie in the open interval (0, 1)")
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha={alpha} must lie in [0, 1)")
    return math.ceil((2.0 / theta**2) * math.log(2.0 / (1.0 - alpha))) + 1


@dataclass(frozen=True, eq=False)
class ProtocolConfig:
    target: TargetSpec
    hamiltonian: AccreditableHamiltonian
    t: float
    theta: float
    alpha: float
    master_seed: int
    error: ErrorConfig = field(default_factory=ErrorConfig.none)

    def __post_init__(self):
        compute_n_traps(self.theta, self.alpha)
        if self.hamiltonian.has_onsite:
            raise ValueError("the protocol needs a Hamiltonian without onsite terms")
        n = self.hamiltonian.n
        if n > MAX_QUBITS:
            raise CapacityError(f"{n} qubits exceeds the simulation cap of {MAX_QUBITS}")
        if 1 + RANDOMNESS_WIDTH * n >= ROW_WIDTH:
            raise CapacityError(f"{n} qubits do not fit a {ROW_WIDTH}-wide randomness row")
        if self.target.n != n:
            raise DimensionError("target and Hamiltonian sizes differ")
        if self.target.hamiltonian != self.hamiltonian.sum:
            raise ValueError("target Hamiltonian differs from the accreditable Hamiltonian")
        if not math.isclose(self.target.t, self.t, rel_tol=0, abs_tol=1e-15):
            raise ValueError("target evolution time differs from t")
        if int(self.master_seed) < 0:
            raise ValueError("master_seed must be non-negative")
        self.error.check_fits(n)

    @property
    def n(self) -> int:
        return self.hamiltonian.n

    @property
    def n_traps(self) -> int:
        return compute_n_traps(self.theta, self.alpha)


@dataclass(frozen=True)
class RunRecord:
    index: int
    kind: str
    digest: str
    outcome: str


@dataclass(frozen=True)
class ProtocolResult:
    target_outcome: str
    n_traps: int
    n_incorrect: int
    epsilon: float
    raw_two_p_hat: float
    theta: float
    alpha: float
    seed: int
    repetition: int
    target_index: int
    log: tuple[RunRecord, ...] = ()

    def as_dict(self) -> dict:
        return {
            "target_outcome": self.target_outcome,
            "n_traps": self.n_traps,
            "n_incorrect": self.n_incorrect,
            "epsilon": self.epsilon,
            "raw_two_p_hat": self.raw_two_p_hat,
            "theta": self.theta,
            "alpha": self.alpha,
            "seed": self.seed,
            "repetition": self.repetition,
            "target_index": self.target_index,
            "log": [
                {"index": r.index, "kind": r.kind, "digest": r.digest, "outcome": r.outcome}
                for r in self.log
            ],
        }


def epsilon_from_tally(n_incorrect: int, n_traps: int, theta: float) -> float:
    return min(1.0, 2.0 * n_incorrect / n_traps + theta)


# --- randomness ---------------------------------------------------------------

def repetition_generator(master_seed: int, repetition: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(master_seed), int(repetition)])))


def repetition_uniforms(master_seed: int, repetition: int, runs: int) -> np.ndarray:
    """All uniforms of one execution: row 0 schedules, rows 1..runs drive runs."""
    return repetition_generator(master_seed, repetition).random((runs + 1, ROW_WIDTH))


def row_uniforms(master_seed: int, repetition: int, row: int) -> np.ndarray:
    """Row ``row`` of :func:`repetition_uniforms` without drawing the rows before it."""
    bits = np.random.Philox(np.random.SeedSequence([int(master_seed), int(repetition)]))
    bits.advance(row * ROW_WIDTH // 4)
    return np.random.Generator(bits).random(ROW_WIDTH)


def target_position(u: float, n_traps: int) -> int:
    """1-based target index, uniform over 1..n_traps+1."""
    return min(int(u * (n_traps + 1)), n_traps) + 1


def randomness_codes(u: np.ndarray, n: int) -> np.ndarray:
    """Integer code of the trap draw each row of ``u`` describes.

    Same mapping as :func:`trap.randomness_from_uniforms`, vectorised. The
    code packs h, then per qubit (letter, prep bit, meas bit).
    """
    code = (u[:, 0] >= 0.5).astype(np.int64)
    for j in range(n):
        letter = np.minimum((u[:, 1 + 3 * j] * 4).astype(np.int64), 3)
        code = code * 4 + letter
        code = code * 2 + (u[:, 2 + 3 * j] >= 0.5)
        code = code * 2 + (u[:, 3 + 3 * j] >= 0.5)
    return code


def decode_randomness(code: int, n: int) -> TrapRandomness:
    letters, zp, zm = [], [], []
    for _ in range(n):
        zm.append(code & 1)
        code >>= 1
        zp.append(code & 1)
        code >>= 1
        letters.append("IXYZ"[code & 3])
        code >>= 2
    return TrapRandomness(int(code), "".join(reversed(letters)), tuple(reversed(zp)), tuple(reversed(zm)))


def sample_rows(dists: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF sample per row; matches :func:`engine.sample_index`."""
    cdf = np.cumsum(dists, axis=1)
    idx = (cdf <= (u * cdf[:, -1])[:, None]).sum(axis=1)
    return np.minimum(idx, dists.shape[1] - 1)


# --- exact distributions ------------------------------------------------------

class TrapCache:
    """Exact trap output distributions keyed by randomness code.

    Bound to one (Hamiltonian, t, error) triple. Distributions depend only on
    the draw, so the cache is shared freely across repetitions.
    """

    def __init__(self, hamiltonian: AccreditableHamiltonian, t: float, error: ErrorConfig):
        self.hamiltonian = hamiltonian
        self.t = t
        self.error = error
        self.inversion = synthesize_inversion(hamiltonian)
        self._dists: dict[int, np.ndarray] = {}

    def __len__(self):
        return len(self._dists)

    def matches(self, cfg: ProtocolConfig) -> bool:
        return cfg.hamiltonian is self.hamiltonian and cfg.t == self.t and cfg.error is self.error

    def _compute(self, code: int) -> np.ndarray:
        r = decode_randomness(code, self.hamiltonian.n)
        circ = build_trap(self.hamiltonian, self.t, r, self.inversion)
        return z_distribution(execute(circ, self.error))

    def fill(self, codes, threads: int = 1) -> None:
        missing = sorted({int(c) for c in codes} - self._dists.keys())
        if not missing:
            return
        if threads > 1 and len(missing) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(self._compute, missing))
        else:
            results = [self._compute(c) for c in missing]
        self._dists.update(zip(missing, results))

    def lookup(self, codes: np.ndarray) -> np.ndarray:
        return np.stack([self._dists[int(c)] for c in codes])

    def distribution(self, r: TrapRandomness) -> np.ndarray:
        code = int(randomness_codes(_uniforms_for(r), r.n)[0])
        self.fill([code])
        return self._dists[code]


def _uniforms_for(r: TrapRandomness) -> np.ndarray:
    # midpoints of each draw's uniform cell
    u = np.zeros((1, ROW_WIDTH))
    u[0, 0] = 0.75 if r.h else 0.25
    for j in range(r.n):
        u[0, 1 + 3 * j] = ("IXYZ".index(r.p[j]) + 0.5) / 4
        u[0, 2 + 3 * j] = 0.75 if r.z_prep[j] else 0.25
        u[0, 3 + 3 * j] = 0.75 if r.z_meas[j] else 0.25
    return u


@dataclass
class ProtocolRunner:
    """Executes repetitions of one config, reusing exact distributions."""

    cfg: ProtocolConfig
    threads: int = 1
    cache: TrapCache | None = None

    def __post_init__(self):
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        if self.cache is None or not self.cache.matches(self.cfg):
            self.cache = TrapCache(self.cfg.hamiltonian, self.cfg.t, self.cfg.error)
        self.target_dist = z_distribution(execute(build_target(self.cfg.target), self.cfg.error))

    def run(self, repetition: int = 0, keep_log: bool = True) -> ProtocolResult:
        cfg = self.cfg
        n = cfg.n
        n_traps = cfg.n_traps
        runs = n_traps + 1
        u = repetition_uniforms(cfg.master_seed, repetition, runs)
        target_index = target_position(u[0, 0], n_traps)

        trap_rows = np.array([i for i in range(1, runs + 1) if i != target_index])
        codes = randomness_codes(u[trap_rows], n)
        self.cache.fill(codes, self.threads)
        outcomes = sample_rows(self.cache.lookup(codes), u[trap_rows, SAMPLE_COLUMN])
        target_idx = int(sample_rows(self.target_dist[None, :], u[target_index : target_index + 1, SAMPLE_COLUMN])[0])

        n_incorrect = int(np.count_nonzero(outcomes))
        log: tuple[RunRecord, ...] = ()
        if keep_log:
            records = [RunRecord(target_index, "target", "", bitstring(target_idx, n))]
            for row, code, out in zip(trap_rows, codes, outcomes):
                records.append(
                    RunRecord(int(row), "trap", decode_randomness(int(code), n).digest(), bitstring(int(out), n))
                )
            log = tuple(sorted(records, key=lambda r: r.index))
        return ProtocolResult(
            target_outcome=bitstring(target_idx, n),
            n_traps=n_traps,
            n_incorrect=n_incorrect,
            epsilon=epsilon_from_tally(n_incorrect, n_traps, cfg.theta),
            raw_two_p_hat=2.0 * n_incorrect / n_traps,
            theta=cfg.theta,
            alpha=cfg.alpha,
            seed=int(cfg.master_seed),
            repetition=int(repetition),
            target_index=target_index,
            log=log,
        )

    def batch(self, repetitions: int, keep_log: bool = False) -> list[ProtocolResult]:
        return [self.run(rep, keep_log) for rep in range(repetitions)]


def run_protocol(
    cfg: ProtocolConfig,
    repetition: int = 0,
    threads: int = 1,
    cache: TrapCache | None = None,
    keep_log: bool = True,
) -> ProtocolResult:
    return ProtocolRunner(cfg, threads, cache).run(repetition, keep_log)


def run_batch(cfg: ProtocolConfig, repetitions: int, threads: int = 1, keep_log: bool = False):
    return ProtocolRunner(cfg, threads).batch(repetitions, keep_log)


# --- exact bound check --------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    vd_exact: float
    p_inco: float
    epsilon_exact: float
    holds: bool

    def as_dict(self) -> dict:
        return {
            "vd_exact": self.vd_exact,
            "p_inco": self.p_inco,
            "epsilon_exact": self.epsilon_exact,
            "holds": self.holds,
        }


def validate_bound(cfg: ProtocolConfig, tol: float = 1e-12) -> BoundReport:
    """Brute-force check of ``VD(ideal, noisy target) <= 2 p_inco``."""
    from . import oracle

    vd = oracle.target_vd(cfg.target, cfg.error)
    p = oracle.exact_p_inco(cfg.hamiltonian, cfg.t, cfg.error)
    return BoundReport(vd, p, 2.0 * p, vd <= 2.0 * p + tol)
