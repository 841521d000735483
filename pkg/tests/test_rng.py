"""Deterministic RNG: splitmix64 seeding, xoshiro256** outputs, shuffling."""
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from witforge.rng import Xoshiro256, _splitmix64, shuffled

# Published splitmix64 outputs for seed 0.
SPLITMIX_SEED0 = [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]

# xoshiro256** outputs from state [1, 2, 3, 4], stepped by hand from the
# reference update rules.
XOSHIRO_1234 = [
    11520,
    0,
    1509978240,
    1215971899390074240,
    1216172134540287360,
]


def test_splitmix64_seed_zero_vector():
    state = 0
    outs = []
    for _ in range(3):
        state, value = _splitmix64(state)
        outs.append(value)
    assert outs == SPLITMIX_SEED0


def test_xoshiro_reference_sequence():
    rng = Xoshiro256(0)
    rng._s = [1, 2, 3, 4]
    assert [rng.next_u64() for _ in range(5)] == XOSHIRO_1234


def test_outputs_fit_in_64_bits():
    rng = Xoshiro256(12345)
    for _ in range(1000):
        value = rng.next_u64()
        assert 0 <= value <= 0xFFFFFFFFFFFFFFFF


def test_seeding_never_yields_all_zero_state():
    # splitmix64 expansion makes an all-zero state impossible for any seed
    for seed in (0, 1, 2**64 - 1):
        rng = Xoshiro256(seed)
        assert any(word != 0 for word in rng._s)


def test_same_seed_same_stream():
    a = Xoshiro256(99)
    b = Xoshiro256(99)
    assert [a.next_u64() for _ in range(50)] == [b.next_u64() for _ in range(50)]


def test_different_seeds_diverge():
    a = [Xoshiro256(1).next_u64() for _ in range(4)]
    b = [Xoshiro256(2).next_u64() for _ in range(4)]
    assert a != b


def test_randrange_bounds():
    rng = Xoshiro256(7)
    seen = Counter(rng.randrange(6) for _ in range(6000))
    assert set(seen) == {0, 1, 2, 3, 4, 5}


def test_randrange_rejects_nonpositive():
    rng = Xoshiro256(7)
    with pytest.raises(ValueError):
        rng.randrange(0)


def test_randrange_one_is_always_zero():
    rng = Xoshiro256(7)
    assert all(rng.randrange(1) == 0 for _ in range(10))


@given(st.lists(st.integers(), max_size=40), st.integers(min_value=0, max_value=2**63))
def test_shuffle_is_a_permutation(items, seed):
    out = shuffled(items, seed)
    assert Counter(out) == Counter(items)


def test_shuffle_deterministic_per_seed():
    items = list(range(30))
    assert shuffled(items, 7) == shuffled(items, 7)
    assert shuffled(items, 7) != shuffled(items, 8)


def test_shuffle_in_place_matches_helper():
    items = list(range(30))
    copy = list(items)
    Xoshiro256(42).shuffle(copy)
    assert copy == shuffled(items, 42)
    assert items == list(range(30))  # helper leaves its input alone
