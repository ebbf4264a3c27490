import pickle

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ghostslopes.arith import INFINITY, is_prime, padic_val, residue, wdiff_val
from ghostslopes.errors import ParameterError

PRIMES = st.sampled_from([2, 3, 5, 7, 11, 13, 101])


def test_padic_val_examples():
    assert padic_val(1, 11) == 0
    assert padic_val(0, 11) is INFINITY
    assert padic_val(1331, 11) == 3
    assert padic_val(-22, 11) == 1


@pytest.mark.parametrize("p", [0, 1, 4, 12, -11])
def test_padic_val_rejects_non_primes(p):
    with pytest.raises(ParameterError):
        padic_val(5, p)


def test_residue_examples():
    assert residue(-2, 10) == 8
    assert residue(18, 10) == 8
    assert residue(10, 10) == 0
    with pytest.raises(ParameterError):
        residue(3, 0)


def test_wdiff_val_examples():
    assert wdiff_val(4, 14, 11) == 1
    assert wdiff_val(4, 114, 11) == 2
    assert wdiff_val(7, 7, 11) is INFINITY
    assert wdiff_val(-7, 4, 11) == 2


def test_infinity_behaviour():
    assert INFINITY + 3 is INFINITY
    assert 3 + INFINITY is INFINITY
    assert INFINITY > 10**100
    assert not INFINITY < 5
    assert 2 * INFINITY is INFINITY
    with pytest.raises(ValueError):
        0 * INFINITY
    assert pickle.loads(pickle.dumps(INFINITY)) is INFINITY
    assert sorted([INFINITY, 3, 0]) == [0, 3, INFINITY]


def test_is_prime_small():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6), PRIMES)
def test_wdiff_val_symmetric_and_positive(k, l, p):
    assert wdiff_val(k, l, p) == wdiff_val(l, k, p)
    if k != l:
        assert wdiff_val(k, l, p) >= 1


@given(st.integers(1, 10**9).filter(bool), st.integers(-10**9, 10**9).filter(bool), PRIMES)
def test_padic_val_multiplicative(a, b, p):
    assert padic_val(a * b, p) == padic_val(a, p) + padic_val(b, p)


@given(st.integers(-10**12, 10**12), st.integers(1, 1000))
def test_residue_is_representative(x, m):
    r = residue(x, m)
    assert 0 <= r < m and (x - r) % m == 0
