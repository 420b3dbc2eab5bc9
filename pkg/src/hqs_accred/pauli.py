"""Symbolic Pauli algebra.

Strings are stored as a letter sequence over ``IXYZ`` plus an integer phase
exponent ``k`` meaning a global factor ``i**k``. Letter ``j`` of a string
(0-based in Python) acts on qubit ``j + 1``; qubit 1 is the most significant
bit of a computational-basis index.

Weighted sums keep real coefficients only and are canonicalised on
construction: duplicate letter sequences are merged, near-zero terms dropped,
and terms sorted lexicographically.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CapacityError, DimensionError

LETTERS = "IXYZ"
MERGE_TOL = 1e-12
MATRIX_CAP = 12

# (a, b) -> (k, c) with a*b = i**k * c
_PRODUCT = {
    ("I", "I"): (0, "I"), ("I", "X"): (0, "X"), ("I", "Y"): (0, "Y"), ("I", "Z"): (0, "Z"),
    ("X", "I"): (0, "X"), ("X", "X"): (0, "I"), ("X", "Y"): (1, "Z"), ("X", "Z"): (3, "Y"),
    ("Y", "I"): (0, "Y"), ("Y", "X"): (3, "Z"), ("Y", "Y"): (0, "I"), ("Y", "Z"): (1, "X"),
    ("Z", "I"): (0, "Z"), ("Z", "X"): (1, "Y"), ("Z", "Y"): (3, "X"), ("Z", "Z"): (0, "I"),
}

_PHASES = (1, 1j, -1, -1j)

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check_letters(letters: str) -> None:
    bad = set(letters) - set(LETTERS)
    if bad:
        raise ValueError(f"invalid Pauli letters {sorted(bad)} in {letters!r}")


def multiply_letters(a: str, b: str) -> tuple[int, str]:
    """Return ``(k, c)`` such that ``a * b = i**k * c``."""
    return _PRODUCT[a, b]


def conjugate_letter(target: str, by: str) -> tuple[int, str]:
    """Conjugate a single Pauli letter: ``by * target * by^dagger``.

    The result picks up a sign of -1 exactly when both letters are
    non-identity and distinct.
    """
    if target != "I" and by != "I" and target != by:
        return -1, target
    return 1, target


@dataclass(frozen=True)
class PauliString:
    """``i**phase`` times a tensor product of single-qubit Pauli letters."""

    letters: str
    phase: int = 0

    def __post_init__(self):
        _check_letters(self.letters)
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_sparse(cls, n: int, ops: dict[int, str], phase: int = 0) -> PauliString:
        """Build a string from ``{qubit (1-based): letter}``; other qubits get I."""
        letters = ["I"] * n
        for q, letter in ops.items():
            if not 1 <= q <= n:
                raise DimensionError(f"qubit {q} outside 1..{n}")
            letters[q - 1] = letter
        return cls("".join(letters), phase)

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls("I" * n)

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def coefficient(self) -> complex:
        return _PHASES[self.phase]

    @property
    def weight(self) -> int:
        return sum(1 for c in self.letters if c != "I")

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: PauliString) -> PauliString:
        if not isinstance(other, PauliString):
            return NotImplemented
        if other.n != self.n:
            raise DimensionError(f"length mismatch {self.n} vs {other.n}")
        k = self.phase + other.phase
        out = []
        for a, b in zip(self.letters, other.letters):
            dk, c = _PRODUCT[a, b]
            k += dk
            out.append(c)
        return PauliString("".join(out), k)

    def dagger(self) -> PauliString:
        # Pauli letters are Hermitian, so only the phase conjugates.
        return PauliString(self.letters, -self.phase)

    def without_phase(self) -> PauliString:
        return PauliString(self.letters)

    def commutes_with(self, other: PauliString) -> bool:
        anti = sum(
            1 for a, b in zip(self.letters, other.letters) if a != "I" and b != "I" and a != b
        )
        return anti % 2 == 0

    def matrix(self) -> np.ndarray:
        if self.n > MATRIX_CAP:
            raise CapacityError(f"{self.n} qubits exceeds matrix cap {MATRIX_CAP}")
        return self.coefficient * _letters_matrix(self.letters)

    def __str__(self):
        prefix = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.phase]
        return prefix + self.letters


def conjugate_string(target: PauliString, by: PauliString) -> PauliString:
    """Return ``by * target * by^dagger`` with the phase tracked exactly."""
    if target.n != by.n:
        raise DimensionError(f"length mismatch {target.n} vs {by.n}")
    sign = 1
    for a, b in zip(target.letters, by.letters):
        s, _ = conjugate_letter(a, b)
        sign *= s
    return PauliString(target.letters, target.phase + (0 if sign == 1 else 2))


def _letters_matrix(letters: str) -> np.ndarray:
    """Dense matrix of a phase-free Pauli string.

    A Pauli string is a signed permutation: column ``x`` has its only
    non-zero entry in row ``x ^ flip``.
    """
    n = len(letters)
    dim = 1 << n
    flip = 0
    ymask = 0
    zmask = 0
    for j, c in enumerate(letters):
        bit = 1 << (n - 1 - j)
        if c in "XY":
            flip |= bit
        if c == "Y":
            ymask |= bit
        if c in "YZ":
            zmask |= bit
    cols = np.arange(dim)
    rows = cols ^ flip
    # Y|b> = i(-1)^b |1-b>, Z|b> = (-1)^b |b>
    parity = _popcount(cols & zmask) & 1
    ny = bin(ymask).count("1")
    values = (1j**ny) * np.where(parity, -1.0, 1.0)
    m = np.zeros((dim, dim), dtype=complex)
    m[rows, cols] = values
    return m


def _popcount(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.int64)
    count = np.zeros_like(a)
    while np.any(a):
        count += a & 1
        a >>= 1
    return count


@dataclass(frozen=True)
class WeightedPauliSum:
    """Real-weighted sum of phase-free Pauli strings.

    ``terms`` is a tuple of ``(coefficient, letters)`` in canonical order.
    Construct through :meth:`from_terms` to get merging and sorting.
    """

    qubit_count: int
    terms: tuple[tuple[float, str], ...] = ()

    def __post_init__(self):
        if self.qubit_count < 1:
            raise ValueError("qubit_count must be positive")
        for _, letters in self.terms:
            if len(letters) != self.qubit_count:
                raise DimensionError(
                    f"term {letters!r} has length {len(letters)}, expected {self.qubit_count}"
                )
            _check_letters(letters)

    @classmethod
    def from_terms(cls, qubit_count: int, terms) -> WeightedPauliSum:
        """Canonicalise an iterable of ``(coeff, letters | PauliString)``.

        A PauliString term with phase ``+-i`` would make the sum
        non-Hermitian and is rejected.
        """
        acc: dict[str, float] = {}
        for coeff, s in terms:
            if isinstance(s, PauliString):
                if s.phase % 2:
                    raise ValueError(f"imaginary phase on {s}; sum would not be Hermitian")
                coeff = coeff * s.coefficient.real
                s = s.letters
            if isinstance(coeff, complex):
                if abs(coeff.imag) > MERGE_TOL:
                    raise ValueError("coefficients must be real")
                coeff = coeff.real
            if len(s) != qubit_count:
                raise DimensionError(f"term {s!r} has length {len(s)}, expected {qubit_count}")
            acc[s] = acc.get(s, 0.0) + float(coeff)
        kept = tuple((acc[s], s) for s in sorted(acc) if abs(acc[s]) > MERGE_TOL)
        return cls(qubit_count, kept)

    @classmethod
    def zero(cls, qubit_count: int) -> WeightedPauliSum:
        return cls(qubit_count, ())

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __neg__(self) -> WeightedPauliSum:
        return WeightedPauliSum(self.qubit_count, tuple((-c, s) for c, s in self.terms))

    def __add__(self, other: WeightedPauliSum) -> WeightedPauliSum:
        if other.qubit_count != self.qubit_count:
            raise DimensionError("qubit count mismatch")
        return WeightedPauliSum.from_terms(self.qubit_count, self.terms + other.terms)

    def __sub__(self, other: WeightedPauliSum) -> WeightedPauliSum:
        return self + (-other)

    def scaled(self, factor: float) -> WeightedPauliSum:
        return WeightedPauliSum.from_terms(
            self.qubit_count, ((factor * c, s) for c, s in self.terms)
        )

    def as_dict(self) -> dict[str, float]:
        return {s: c for c, s in self.terms}

    def is_close(self, other: WeightedPauliSum, tol: float = MERGE_TOL) -> bool:
        if other.qubit_count != self.qubit_count:
            return False
        return all(abs(c) <= tol for c, _ in (self - other).terms)

    @cached_property
    def is_traceless(self) -> bool:
        return all(s != "I" * self.qubit_count for _, s in self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c:g}*{s}" for c, s in self.terms)


def conjugate_sum(h: WeightedPauliSum, by: PauliString) -> WeightedPauliSum:
    """Conjugate every term of ``h`` by ``by``; returns ``by h by^dagger``."""
    if by.n != h.qubit_count:
        raise DimensionError(f"length mismatch {h.qubit_count} vs {by.n}")
    out = []
    for coeff, letters in h.terms:
        c = conjugate_string(PauliString(letters), by)
        out.append((coeff * c.coefficient.real, letters))
    return WeightedPauliSum.from_terms(h.qubit_count, out)


def to_matrix(h: WeightedPauliSum) -> np.ndarray:
    """Dense ``2**N x 2**N`` realisation of ``h``."""
    if h.qubit_count > MATRIX_CAP:
        raise CapacityError(f"{h.qubit_count} qubits exceeds matrix cap {MATRIX_CAP}")
    dim = 1 << h.qubit_count
    m = np.zeros((dim, dim), dtype=complex)
    for coeff, letters in h.terms:
        m += coeff * _letters_matrix(letters)
    return m


def parse_pauli_sum(text: str) -> WeightedPauliSum:
    """Parse the ``<coeff> <letters>`` line format (``#`` starts a comment)."""
    terms = []
    n = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected '<coeff> <letters>', got {raw!r}")
        try:
            coeff = float(parts[0])
        except ValueError:
            raise ValueError(f"line {lineno}: bad coefficient {parts[0]!r}") from None
        letters = parts[1].upper()
        try:
            _check_letters(letters)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if n is None:
            n = len(letters)
        elif len(letters) != n:
            raise ValueError(f"line {lineno}: term length {len(letters)} differs from {n}")
        terms.append((coeff, letters))
    if n is None:
        raise ValueError("no terms found")
    return WeightedPauliSum.from_terms(n, terms)


def format_pauli_sum(h: WeightedPauliSum) -> str:
    return "".join(f"{c!r} {s}\n" for c, s in h.terms)
