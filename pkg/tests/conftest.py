from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hqs_accred.hamiltonian import CouplingTable, build_accreditable  # noqa: E402
from hqs_accred.lattice import InteractionGraph  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "configs"
FIXTURES = ROOT / "fixtures"

_acceptance: dict[int, tuple[str, str, str]] = {}


def random_bipartite_hamiltonian(rng, n, p_edge=0.5):
    """Random XY Hamiltonian on a random bipartite graph with ``n`` vertices."""
    side = rng.integers(0, 2, size=n)
    edges = []
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            if side[u - 1] != side[v - 1] and rng.random() < p_edge:
                edges.append((u, v))
    graph = InteractionGraph.from_edges(n, edges)
    j = {e: float(rng.choice([-1, 1]) * rng.uniform(0.1, 2.0)) for e in edges}
    return build_accreditable(graph, CouplingTable(j))


def random_unitary(rng, dim):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_layer(rng, n):
    return np.stack([random_unitary(rng, 2) for _ in range(n)])


def random_kraus(rng, k, rank=None):
    """Kraus operators of a random CPTP map on ``k`` qubits."""
    dim = 1 << k
    rank = rank or int(rng.integers(1, dim * dim + 1))
    v = random_unitary(rng, dim * rank)[:, :dim]
    return [v[i * dim : (i + 1) * dim] for i in range(rank)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m and m.args:
            item.user_properties.append(("criterion", m.args[0]))
            item.user_properties.append(("title", m.args[1] if len(m.args) > 1 else ""))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    n = props["criterion"]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        if hasattr(report, "wasxfail"):
            status = "PASS (expected failure reproduced)" if report.skipped else "FAIL (expected failure did not occur)"
        elif report.passed:
            status = "PASS"
        elif report.skipped:
            status = "SKIP"
        else:
            status = "FAIL"
        detail = ""
        for name, content in report.sections:
            if "stdout" in name:
                lines = [ln for ln in content.splitlines() if ln.startswith("detail:")]
                if lines:
                    detail = lines[-1][len("detail:"):].strip()
        _acceptance[n] = (status, props.get("title", ""), detail)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_acceptance):
        status, title, detail = _acceptance[n]
        line = f"criterion {n:2d} {status:<36} {title}"
        if detail:
            line += f" | {detail}"
        terminalreporter.write_line(line)
