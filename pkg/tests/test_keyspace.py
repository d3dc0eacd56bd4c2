import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from peerselect import Bucket, KeySpace, bucket_of, bucket_range, ring_distance, xor_distance


def brute_force_bucket(source: int, j: int, n: int) -> set[int]:
    """Oracle: keys whose XOR distance from the source lies in [2^j, 2^(j+1))."""
    return {k for k in range(n) if (1 << j) <= (k ^ source) < (1 << (j + 1))}


class TestKeySpace:
    @pytest.mark.parametrize("n,m", [(2, 1), (16, 4), (1024, 10)])
    def test_bits(self, n, m):
        assert KeySpace(n).m == m

    @pytest.mark.parametrize("n", [0, 1, 3, 12, 100])
    def test_rejects_non_power_of_two(self, n):
        with pytest.raises(ValueError):
            KeySpace(n)

    def test_check_key(self):
        ks = KeySpace(8)
        assert ks.check_key(7) == 7
        with pytest.raises(ValueError):
            ks.check_key(8)
        with pytest.raises(ValueError):
            ks.check_key(-1)


class TestXorDistance:
    def test_identity(self):
        assert xor_distance(5, 5) == 0

    def test_single_bit(self):
        assert xor_distance(0, 8) == 8

    def test_mixed_bits(self):
        assert xor_distance(5, 3) == 6


class TestRingDistance:
    def test_self(self):
        assert ring_distance(3, 3, KeySpace(8)) == 0

    def test_wraparound(self):
        assert ring_distance(6, 1, KeySpace(8)) == 3

    def test_full_ring_predecessor(self):
        assert ring_distance(0, 7, KeySpace(8)) == 7


class TestBucketRange:
    def test_farthest_bucket(self):
        assert bucket_range(0, 3, KeySpace(16)) == Bucket(index=3, start=8, end=15)

    def test_successor_bucket(self):
        assert bucket_range(0, 0, KeySpace(16)) == Bucket(index=0, start=1, end=1)

    def test_offset_source(self):
        b = bucket_range(5, 2, KeySpace(16))
        assert (b.start, b.end) == (0, 3)
        assert set(b.keys()) == brute_force_bucket(5, 2, 16)

    def test_rejects_out_of_range_index(self):
        ks = KeySpace(16)
        for j in (-1, 4, 10):
            with pytest.raises(ValueError):
                bucket_range(0, j, ks)

    @given(
        exp=st.integers(min_value=1, max_value=8),
        source=st.integers(min_value=0),
        j=st.integers(min_value=0),
    )
    def test_matches_brute_force(self, exp, source, j):
        n = 1 << exp
        source %= n
        j %= exp
        b = bucket_range(source, j, KeySpace(n))
        assert set(b.keys()) == brute_force_bucket(source, j, n)
        assert len(b) == 1 << j
        assert b.start % (1 << j) == 0


class TestBucketOf:
    def test_successor(self):
        assert bucket_of(0, 1) == 0

    def test_high_bucket(self):
        assert bucket_of(0, 12) == 3

    def test_close_pair(self):
        assert bucket_of(5, 6) == 1

    def test_rejects_self(self):
        with pytest.raises(ValueError):
            bucket_of(5, 5)

    @given(exp=st.integers(min_value=1, max_value=8), source=st.integers(min_value=0), k=st.integers(min_value=0))
    def test_inverse_of_bucket_range(self, exp, source, k):
        n = 1 << exp
        source %= n
        k %= n
        if k == source:
            return
        j = bucket_of(source, k)
        assert k in bucket_range(source, j, KeySpace(n))


@pytest.mark.parametrize("n", [16, 64, 1024])
def test_partition_law(n):
    """The m buckets of each source are disjoint and cover everything but the source."""
    ks = KeySpace(n)
    for source in range(n):
        seen: set[int] = set()
        for j in range(ks.m):
            keys = set(bucket_range(source, j, ks).keys())
            assert not keys & seen
            seen |= keys
        assert seen == set(range(n)) - {source}


@pytest.mark.parametrize("n", [16, 256])
def test_prefix_law(n):
    """Keys in bucket j share the top m-1-j bits with the source and differ at bit j."""
    ks = KeySpace(n)
    for source in range(n):
        for j in range(ks.m):
            for k in bucket_range(source, j, ks).keys():
                assert (k >> (j + 1)) == (source >> (j + 1))
                assert (k >> j) & 1 != (source >> j) & 1


@settings(max_examples=200)
@given(exp=st.integers(min_value=1, max_value=10), source=st.integers(min_value=0), k=st.integers(min_value=0))
def test_bucket_of_iff_in_range(exp, source, k):
    n = 1 << exp
    source %= n
    k %= n
    if k == source:
        return
    ks = KeySpace(n)
    j = bucket_of(source, k)
    for other in range(ks.m):
        assert (k in bucket_range(source, other, ks)) == (other == j)
