from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def fractions(max_abs: int = 50):
    """Nonzero-denominator rationals with bounded numerator and denominator."""
    return st.builds(
        Fraction,
        st.integers(-max_abs, max_abs),
        st.integers(1, max_abs),
    )


def positive_fractions(max_abs: int = 50):
    return st.builds(Fraction, st.integers(1, max_abs), st.integers(1, max_abs))


def squares_mod(p: int) -> set[int]:
    """Exhaustive squaring table, the residue oracle used throughout."""
    return {x * x % p for x in range(1, p)}


@pytest.fixture
def rng():
    return np.random.default_rng(0)
