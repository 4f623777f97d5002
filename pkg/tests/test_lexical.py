from itertools import product

import pytest

from hmmreduce import DomainError, SizeLimitError
from hmmreduce.lexical import LexOrder, flo, llo


def test_flo_order_m2_n2():
    order = flo(2, 2)
    assert [order.encode(w) for w in [(0, 0), (1, 0), (0, 1), (1, 1)]] == [0, 1, 2, 3]


def test_llo_order_m2_n2():
    order = llo(2, 2)
    assert [order.encode(w) for w in [(0, 0), (0, 1), (1, 0), (1, 1)]] == [0, 1, 2, 3]


@pytest.mark.parametrize("make", [flo, llo])
def test_length_one_is_identity(make):
    order = make(3, 1)
    for y in range(3):
        assert order.encode((y,)) == y
        assert order.decode(y) == (y,)


def test_decode_examples():
    assert flo(2, 2).decode(1) == (1, 0)
    assert llo(3, 1).decode(2) == (2,)


@pytest.mark.parametrize("make", [flo, llo])
@pytest.mark.parametrize("m,n", [(2, 1), (2, 4), (3, 4), (2, 5), (3, 5)])
def test_encode_decode_roundtrip(make, m, n):
    order = make(m, n)
    seen = set()
    for w in product(range(m), repeat=n):
        idx = order.encode(w)
        assert 0 <= idx < order.size
        assert order.decode(idx) == w
        seen.add(idx)
    assert len(seen) == order.size


@pytest.mark.parametrize("make", [flo, llo])
@pytest.mark.parametrize("m,n", [(2, 1), (2, 3), (3, 3), (2, 4)])
def test_prepend_append_agree_with_encode(make, m, n):
    short = make(m, n)
    longer = make(m, n + 1)
    for u in product(range(m), repeat=n):
        for y in range(m):
            assert short.prepend(y, short.encode(u)) == longer.encode((y,) + u)
            assert short.append(short.encode(u), y) == longer.encode(u + (y,))


def test_prepend_examples():
    assert flo(2, 1).prepend(1, 0) == 1       # "10" in flo
    assert llo(2, 1).prepend(1, 0) == 2       # "10" in llo
    assert llo(2, 1).append(0, 1) == 1        # "01" in llo
    assert flo(2, 1).append(1, 0) == 1        # "10" in flo


def test_domain_errors():
    order = flo(2, 2)
    with pytest.raises(DomainError):
        order.encode((0, 2))
    with pytest.raises(DomainError):
        order.encode((0, 0, 0))
    with pytest.raises(DomainError):
        order.decode(4)
    with pytest.raises(DomainError):
        order.prepend(2, 0)
    with pytest.raises(DomainError):
        order.append(4, 0)
    with pytest.raises(DomainError):
        LexOrder("middle", 2, 2)


def test_size_limit():
    with pytest.raises(SizeLimitError):
        LexOrder("flo", 2, 100)
