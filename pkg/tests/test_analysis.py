from math import factorial

import pytest

from sylperm.analysis import (
    check_divisibility,
    check_inequality,
    check_sufficient_condition,
    f,
    opcount_report,
    opcount_table,
    product_matrix,
)
from sylperm.errors import SizeLimitError
from sylperm.hadamard import sylvester


def two_adic_valuation(x: int) -> int:
    e = 0
    while x % 2 == 0:
        x //= 2
        e += 1
    return e


@pytest.mark.parametrize("n, expected", [(4, 3), (8, 7), (16, 15)])
def test_f_examples(n, expected):
    assert f(n) == expected


def test_f_against_factorial():
    for n in range(1, 200):
        assert f(n) == two_adic_valuation(factorial(n)) == n - n.bit_count()
    with pytest.raises(ValueError):
        f(0)


@pytest.mark.parametrize("p, f_n, value", [(2, 3, 8), (3, 7, 384), (4, 15, 50692096)])
def test_divisibility(p, f_n, value):
    rep = check_divisibility(p)
    assert (rep.f_n, rep.permanent) == (f_n, value)
    assert rep.divides and not rep.next_power_divides and rep.holds
    assert rep.to_dict()["permanent"] == str(value)


def test_divisibility_fails_for_vanishing_permanent():
    # per(H_2) = 0 is divisible by every power of two
    rep = check_divisibility(1)
    assert rep.divides and rep.next_power_divides and not rep.holds


@pytest.mark.parametrize("n, m, lhs, rhs", [(1, 1, 8, 0), (1, 2, 384, 0), (2, 1, 384, 0), (2, 2, 50692096, 16777216)])
def test_inequality(n, m, lhs, rhs):
    rep = check_inequality(n, m)
    assert rep.identity_validated
    assert (rep.lhs, rep.rhs) == (lhs, rhs)
    assert rep.holds


def test_inequality_guards():
    with pytest.raises(SizeLimitError):
        check_inequality(2, 3)
    with pytest.raises(ValueError):
        check_inequality(0, 2)


def test_product_matrix_is_sylvester():
    assert product_matrix(2, 2) == sylvester(4)


def test_sufficient_condition():
    rep = check_sufficient_condition(4)
    assert rep["passed"]
    assert [x["permanent"] for x in rep["permanents"]] == ["8", "384", "50692096"]
    assert rep["bounds"] == [{"n": 2, "m": 2, "permanent": "50692096", "bound": "16777216", "holds": True}]
    assert check_sufficient_condition(3)["bounds"] == []
    with pytest.raises(SizeLimitError):
        check_sufficient_condition(5)


@pytest.mark.parametrize("p", [2, 3])
def test_opcount_report(p):
    rep = opcount_report(p)
    assert rep["passed"] and rep["values_agree"] and rep["cocyclic_cheaper"]
    ryser = rep["measured"]["ryser"]
    coc = rep["measured"]["cocyclic-half"]
    assert coc["total"] < ryser["total"]
    assert coc["preprocess"]["total"] + coc["evaluation"]["total"] == coc["total"]
    assert "reference" in rep and rep["reference"]


def test_opcount_h4_classical_and_reference():
    rep = opcount_report(2)
    classical = rep["measured"]["classical"]
    assert (classical["multiplications"], classical["additions"]) == (72, 23)
    assert rep["reference"]["cocyclic-half"] == {"additions": 4, "multiplications": 9}
    text = opcount_table(rep)
    assert "classical" in text and "additions=101" in text


def test_opcount_deterministic():
    assert opcount_report(3) == opcount_report(3)
    assert opcount_report(4)["passed"]
    with pytest.raises(SizeLimitError):
        opcount_report(5)
