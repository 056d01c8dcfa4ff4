import random
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def rng(seed):
    return random.Random(seed)


F = Fraction
