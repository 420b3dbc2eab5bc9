"""XY-interaction Hamiltonians on 2-colourable graphs.

The accreditable family is ``sum_<ij> J_ij (X_i X_j + Y_i Y_j)``. The
XY-model variant adds ``U * Z_k`` on every site; it has its own inversion
circuit and is not accepted by the protocol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .lattice import InteractionGraph, square_lattice, two_color
from .pauli import WeightedPauliSum


@dataclass(frozen=True)
class CouplingTable:
    j: dict[tuple[int, int], float]
    u: float | None = None

    def __post_init__(self):
        norm = {}
        for (a, b), value in self.j.items():
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"coupling on {(a, b)} is not finite")
            norm[(min(a, b), max(a, b))] = value
        object.__setattr__(self, "j", norm)
        if self.u is not None:
            u = float(self.u)
            if not math.isfinite(u):
                raise ValueError("onsite strength is not finite")
            object.__setattr__(self, "u", u)

    @classmethod
    def uniform(cls, graph: InteractionGraph, j: float, u: float | None = None) -> CouplingTable:
        return cls({e: j for e in graph.edges}, u)

    def __hash__(self):
        return hash((tuple(sorted(self.j.items())), self.u))


@dataclass(frozen=True)
class AccreditableHamiltonian:
    graph: InteractionGraph
    couplings: CouplingTable
    sum: WeightedPauliSum = field(compare=False)

    @property
    def n(self) -> int:
        return self.graph.vertex_count

    @property
    def has_onsite(self) -> bool:
        return self.couplings.u is not None


def _check_couplings(graph: InteractionGraph, couplings: CouplingTable) -> None:
    missing = graph.edges - couplings.j.keys()
    extra = couplings.j.keys() - graph.edges
    if missing:
        raise ValueError(f"no coupling given for edges {sorted(missing)}")
    if extra:
        raise ValueError(f"couplings given for non-edges {sorted(extra)}")


def _interaction_terms(graph: InteractionGraph, couplings: CouplingTable):
    n = graph.vertex_count
    for a, b in graph.sorted_edges():
        jab = couplings.j[(a, b)]
        for letter in "XY":
            s = ["I"] * n
            s[a - 1] = s[b - 1] = letter
            yield jab, "".join(s)


def build_accreditable(graph: InteractionGraph, couplings: CouplingTable) -> AccreditableHamiltonian:
    """``sum J_ij (X_i X_j + Y_i Y_j)`` over the graph's edges."""
    if couplings.u is not None:
        raise ValueError("onsite strength given; use build_xy_model for the XY-model variant")
    two_color(graph)
    _check_couplings(graph, couplings)
    h = WeightedPauliSum.from_terms(graph.vertex_count, _interaction_terms(graph, couplings))
    return AccreditableHamiltonian(graph, couplings, h)


def build_xy_model(graph: InteractionGraph, couplings: CouplingTable) -> AccreditableHamiltonian:
    """XY interaction plus ``U * Z_k`` on every vertex."""
    if couplings.u is None:
        raise ValueError("XY-model variant needs an onsite strength u")
    two_color(graph)
    _check_couplings(graph, couplings)
    n = graph.vertex_count
    terms = list(_interaction_terms(graph, couplings))
    for k in range(n):
        terms.append((couplings.u, "I" * k + "Z" + "I" * (n - k - 1)))
    return AccreditableHamiltonian(graph, couplings, WeightedPauliSum.from_terms(n, terms))


def lattice_hamiltonian(rows: int, cols: int, j: float = 1.0, u: float | None = None):
    g = square_lattice(rows, cols)
    c = CouplingTable.uniform(g, j, u)
    return build_xy_model(g, c) if u is not None else build_accreditable(g, c)


def from_pauli_sum(h: WeightedPauliSum) -> AccreditableHamiltonian:
    """Recover graph and couplings from a sum of XX+YY pairs and onsite Z terms.

    Raises ValueError for any other term shape, for XX/YY pairs with unequal
    weights, and for onsite terms that are not uniform.
    """
    n = h.qubit_count
    xx: dict[tuple[int, int], float] = {}
    yy: dict[tuple[int, int], float] = {}
    onsite: dict[int, float] = {}
    for coeff, letters in h.terms:
        support = [i + 1 for i, c in enumerate(letters) if c != "I"]
        kinds = {letters[i - 1] for i in support}
        if len(support) == 2 and kinds == {"X"}:
            xx[tuple(support)] = coeff
        elif len(support) == 2 and kinds == {"Y"}:
            yy[tuple(support)] = coeff
        elif len(support) == 1 and kinds == {"Z"}:
            onsite[support[0]] = coeff
        else:
            raise ValueError(f"term {coeff:g}*{letters} is not an XY interaction or onsite Z")
    if xx.keys() != yy.keys():
        raise ValueError("every XX term needs a matching YY term on the same pair")
    for e in xx:
        if abs(xx[e] - yy[e]) > 1e-12:
            raise ValueError(f"XX and YY couplings differ on pair {e}")
    graph = InteractionGraph.from_edges(n, xx.keys())
    if onsite:
        values = set(onsite.values())
        if len(onsite) != n or len(values) != 1:
            raise ValueError("onsite Z terms must be present on every site with one strength")
        return build_xy_model(graph, CouplingTable(xx, values.pop()))
    return build_accreditable(graph, CouplingTable(xx))
