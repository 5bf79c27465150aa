import itertools

import pytest
from hypothesis import settings, strategies as st

from transfer_ideals.groups import AbelianPGroup

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def small_groups(max_order=16, primes=(2, 3)):
    out = []
    for p in primes:
        for j in range(0, 5):
            for exps in itertools.combinations_with_replacement(range(1, 5), j):
                A = AbelianPGroup(p, exps)
                if A.order <= max_order and A not in out:
                    out.append(A)
    return out


@st.composite
def groups(draw, max_order=16, primes=(2, 3)):
    return draw(st.sampled_from(small_groups(max_order, primes)))


@pytest.fixture
def klein():
    return AbelianPGroup(2, (1, 1))
