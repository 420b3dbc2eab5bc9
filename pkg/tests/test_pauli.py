from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hqs_accred.errors import CapacityError, DimensionError
from hqs_accred.pauli import (
    PAULI_MATRICES,
    PauliString,
    WeightedPauliSum,
    conjugate_letter,
    conjugate_string,
    conjugate_sum,
    format_pauli_sum,
    multiply_letters,
    parse_pauli_sum,
    to_matrix,
)

letters = st.text(alphabet="IXYZ", min_size=1, max_size=5)


def test_letter_products_match_matrices():
    for a in "IXYZ":
        for b in "IXYZ":
            k, c = multiply_letters(a, b)
            lhs = PAULI_MATRICES[a] @ PAULI_MATRICES[b]
            assert np.abs(lhs - (1j**k) * PAULI_MATRICES[c]).max() < 1e-15


def test_xy_is_iz():
    s = PauliString("X") * PauliString("Y")
    assert s.letters == "Z" and s.phase == 1


def test_conjugate_letter_sign():
    assert conjugate_letter("X", "Z") == (-1, "X")
    assert conjugate_letter("X", "X") == (1, "X")
    assert conjugate_letter("I", "Y") == (1, "I")


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.text("IXYZ", min_size=n, max_size=n), st.text("IXYZ", min_size=n, max_size=n),
    st.integers(0, 3), st.integers(0, 3))))
def test_product_matches_matrix_product(args):
    a, b, pa, pb = args
    sa, sb = PauliString(a, pa), PauliString(b, pb)
    assert np.abs((sa * sb).matrix() - sa.matrix() @ sb.matrix()).max() < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.text("IXYZ", min_size=n, max_size=n), st.text("IXYZ", min_size=n, max_size=n))))
def test_commutation_matches_matrices(args):
    a, b = (PauliString(x) for x in args)
    ma, mb = a.matrix(), b.matrix()
    commute = np.abs(ma @ mb - mb @ ma).max() < 1e-12
    assert a.commutes_with(b) == commute


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.text("IXYZ", min_size=n, max_size=n), st.text("IXYZ", min_size=n, max_size=n))))
def test_conjugate_string_matches_matrices(args):
    t, by = PauliString(args[0]), PauliString(args[1], 1)
    c = conjugate_string(t, by)
    expect = by.matrix() @ t.matrix() @ by.matrix().conj().T
    assert np.abs(c.matrix() - expect).max() < 1e-12


def test_dagger_inverts():
    s = PauliString("XYZ", 1)
    assert (s * s.dagger()).letters == "III"
    assert (s * s.dagger()).phase == 0


def test_length_mismatch():
    with pytest.raises(DimensionError):
        PauliString("X") * PauliString("XX")


def test_invalid_letter():
    with pytest.raises(ValueError):
        PauliString("XQ")


def test_from_sparse():
    assert PauliString.from_sparse(4, {1: "Z", 3: "Y"}).letters == "ZIYI"
    with pytest.raises(DimensionError):
        PauliString.from_sparse(2, {3: "X"})


def test_sum_canonicalises():
    h = WeightedPauliSum.from_terms(2, [(1.0, "XX"), (0.5, "ZI"), (2.0, "XX"), (1e-14, "YY")])
    assert h.terms == ((3.0, "XX"), (0.5, "ZI"))


def test_sum_rejects_imaginary_phase():
    with pytest.raises(ValueError):
        WeightedPauliSum.from_terms(1, [(1.0, PauliString("X", 1))])


def test_sum_arithmetic():
    a = WeightedPauliSum.from_terms(2, [(1.0, "XX"), (1.0, "YY")])
    assert (a - a).terms == ()
    assert (-a).is_close(a.scaled(-1))
    assert a.is_traceless


def test_conjugate_sum_negates_xy_pair():
    h = parse_pauli_sum("1 XX\n1 YY\n")
    assert conjugate_sum(h, PauliString("ZI")).terms == (-h).terms


def test_to_matrix_hermitian(rng):
    h = WeightedPauliSum.from_terms(3, [(rng.normal(), "XZY"), (rng.normal(), "IIZ"), (rng.normal(), "YYI")])
    m = to_matrix(h)
    assert np.abs(m - m.conj().T).max() < 1e-14


def test_matrix_cap():
    with pytest.raises(CapacityError):
        PauliString("X" * 13).matrix()


def test_parse_format_roundtrip():
    h = parse_pauli_sum("# comment\n0.5 XXI\n-1.25 IZZ  # trailing\n")
    assert parse_pauli_sum(format_pauli_sum(h)) == h


@pytest.mark.parametrize("text", ["", "1.0", "abc XX", "1 XQ", "1 XX\n1 XXX"])
def test_parse_errors(text):
    with pytest.raises(ValueError):
        parse_pauli_sum(text)
