from itertools import product

import pytest

from sylperm.errors import DimensionError, SizeLimitError
from sylperm.hadamard import (
    GroupElement,
    SignMatrix,
    cocycle_entry,
    format_matrix,
    identity,
    is_hadamard,
    is_normalized,
    kronecker,
    matmul,
    parse_matrix,
    sylvester,
)

M = -1
H4_DISPLAYED = [
    [1, 1, 1, 1],
    [1, M, 1, M],
    [1, 1, M, M],
    [1, M, M, 1],
]
H8_DISPLAYED = [
    [1, 1, 1, 1, 1, 1, 1, 1],
    [1, M, 1, M, 1, M, 1, M],
    [1, 1, M, M, 1, 1, M, M],
    [1, M, M, 1, 1, M, M, 1],
    [1, 1, 1, 1, M, M, M, M],
    [1, M, 1, M, M, 1, M, 1],
    [1, 1, M, M, M, M, 1, 1],
    [1, M, M, 1, M, 1, 1, M],
]
H2 = SignMatrix.from_rows([[1, 1], [1, -1]])


def test_group_element_indexing():
    assert GroupElement.from_index(1, 3).bits == (0, 0, 0)
    assert GroupElement.from_index(2, 3).bits == (0, 0, 1)
    assert str(GroupElement.from_index(7, 3)) == "110"
    assert {GroupElement.from_index(i, 4).value for i in range(1, 17)} == set(range(16))
    for i in range(1, 9):
        assert GroupElement.from_index(i, 3).index == i
    with pytest.raises(ValueError):
        GroupElement.from_index(9, 3)
    with pytest.raises(ValueError):
        GroupElement(8, 3)


def test_group_law_is_xor():
    a, b = GroupElement.from_bits("011"), GroupElement.from_bits("110")
    assert str(a * b) == "101"


@pytest.mark.parametrize("p, expected", [(1, [[1, 1], [1, -1]]), (2, H4_DISPLAYED), (3, H8_DISPLAYED)])
def test_sylvester_matches_displayed(p, expected):
    assert sylvester(p).tolist() == expected


def test_sylvester_is_iterated_kronecker():
    h = H2
    for p in range(2, 6):
        h = kronecker(h, H2)
        assert h == sylvester(p)


def test_sylvester_size_guard():
    with pytest.raises(SizeLimitError):
        sylvester(0)
    with pytest.raises(SizeLimitError):
        sylvester(17)
    with pytest.raises(SizeLimitError):
        sylvester(5, max_order=16)


def test_cocycle_entry_examples():
    assert cocycle_entry(GroupElement.from_bits("000"), GroupElement.from_bits("101")) == 1
    assert cocycle_entry(GroupElement.from_bits("001"), GroupElement.from_bits("001")) == -1
    with pytest.raises(DimensionError):
        cocycle_entry(GroupElement.from_bits("01"), GroupElement.from_bits("001"))


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_entries_are_cocycle_values(p):
    h = sylvester(p)
    n = 1 << p
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            assert h[i - 1, j - 1] == cocycle_entry(GroupElement.from_index(i, p), GroupElement.from_index(j, p))


@pytest.mark.parametrize("p", [1, 2, 3])
def test_cocycle_identity(p):
    els = [GroupElement(v, p) for v in range(1 << p)]
    psi = cocycle_entry
    for gi, gj, gk in product(els, repeat=3):
        assert psi(gi, gj) * psi(gi * gj, gk) == psi(gj, gk) * psi(gi, gj * gk)


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_orthogonality(p):
    h = sylvester(p)
    assert matmul(h, h.transpose()) == identity(1 << p).scale(1 << p)


def test_kronecker_examples():
    assert kronecker(H2, H2) == sylvester(2)
    k = kronecker(sylvester(2), identity(4))
    assert all(sum(a != 0 for a in row) == 4 for row in k.entries)
    assert not k.plus_minus
    with pytest.raises(SizeLimitError):
        kronecker(sylvester(3), sylvester(3), max_order=32)


@pytest.mark.parametrize("n, m", [(a, b) for a in range(1, 4) for b in range(1, 4) if a + b <= 4])
def test_decomposition_identity(n, m):
    left = kronecker(sylvester(n), identity(1 << m))
    right = kronecker(identity(1 << n), sylvester(m))
    assert matmul(left, right) == sylvester(n + m)


def test_matmul_examples():
    assert matmul(H2, H2.transpose()) == identity(2).scale(2)
    assert matmul(identity(4), sylvester(2)) == sylvester(2)
    with pytest.raises(DimensionError):
        matmul(identity(2), identity(3))


def test_predicates():
    for p in range(1, 5):
        assert is_hadamard(sylvester(p)) and is_normalized(sylvester(p))
    assert not is_hadamard(identity(4))
    negated = sylvester(2).negate_row(1)
    assert is_hadamard(negated)
    assert not is_normalized(negated)


def test_sign_matrix_validation():
    with pytest.raises(DimensionError):
        SignMatrix(((1, 1), (1,)))
    with pytest.raises(ValueError):
        SignMatrix(((1, 0), (1, 1)), plus_minus=True)


def test_text_format_roundtrip():
    h = sylvester(3)
    text = format_matrix(h)
    assert text.splitlines()[0] == "8"
    assert text.splitlines()[2].split()[:2] == ["1", "-1"]
    assert parse_matrix(text) == h
    k = kronecker(sylvester(1), identity(2))
    assert parse_matrix(format_matrix(k)) == k


@pytest.mark.parametrize("text", ["", "2\n1 1\n", "2\n1 1\n1 2\n", "2 2\n1 1\n1 1\n"])
def test_text_format_rejects(text):
    with pytest.raises(ValueError):
        parse_matrix(text)
