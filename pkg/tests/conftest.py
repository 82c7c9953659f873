import pytest
from hypothesis import settings, strategies as st

from mdlattack.core import Dataset
from mdlattack.experiment import EXAMPLE_TRANSACTIONS

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def example():
    return Dataset(EXAMPLE_TRANSACTIONS)


@st.composite
def datasets(draw, max_items=8, max_n=20, min_n=1):
    m = draw(st.integers(1, max_items))
    alphabet = list(range(m))
    rows = draw(st.lists(st.sets(st.sampled_from(alphabet)), min_size=min_n, max_size=max_n))
    return Dataset.from_iterables(rows, alphabet)


def naive_cover(patterns, t):
    """Reference greedy cover over an explicit pattern order."""
    rem = set(t)
    out = []
    for p in patterns:
        if set(p) <= rem:
            out.append(tuple(p))
            rem -= set(p)
    assert not rem
    return out


def naive_length(ct, t):
    lengths = {r.pattern: r.code_length for r in ct.rows}
    return sum(lengths[p] for p in naive_cover([r.pattern for r in ct.rows], t))
