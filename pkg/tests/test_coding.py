from hypothesis import given, strategies as st

from pcalab.coding import pair, query_code, query_decode, seq_code, seq_decode, unpair

nat = st.integers(min_value=0, max_value=10**6)


def test_pair_small_values():
    # the diagonal enumeration, written out
    order = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0)]
    assert [pair(x, y) for x, y in order] == list(range(7))


@given(nat, nat)
def test_unpair_inverts_pair(x, y):
    assert unpair(pair(x, y)) == (x, y)


@given(st.integers(min_value=0, max_value=10**9))
def test_pair_inverts_unpair(z):
    assert pair(*unpair(z)) == z


def test_pair_huge_arguments():
    x, y = 3 ** 500, 7 ** 300
    assert unpair(pair(x, y)) == (x, y)


@given(st.lists(st.integers(min_value=0, max_value=50), max_size=6))
def test_seq_roundtrip(seq):
    assert seq_decode(seq_code(seq)) == tuple(seq)


def test_seq_code_is_onto_small_codes():
    assert sorted(seq_code(seq_decode(c)) for c in range(200)) == list(range(200))
    assert seq_code(()) == 0


@given(st.integers(min_value=0, max_value=20), st.lists(st.integers(0, 3), max_size=5))
def test_query_roundtrip(n, seq):
    assert query_decode(query_code(n, seq)) == (n, tuple(seq))
