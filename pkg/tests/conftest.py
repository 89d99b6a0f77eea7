import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from fbasis.chain import ChainSpec
from fbasis.fixtures import Bounds, random_chain
from fbasis.identities import generic_params

rationals = st.builds(Fraction, st.integers(-30, 30), st.integers(1, 7))
nonzero_rationals = rationals.filter(lambda x: x != 0)


@pytest.fixture
def n2():
    """The hand-worked chain: N=2, xi=(0,2), eta=1."""
    return ChainSpec("xxx", 1, (0, 2))


@pytest.fixture
def chain4():
    return ChainSpec("xxx", Fraction(2, 3),
                     (Fraction(1, 3), Fraction(5, 2), Fraction(-7, 4),
                      Fraction(9, 5)))


def make_chain(seed: int, n: int, eta=Fraction(1)) -> ChainSpec:
    return random_chain(random.Random(seed), n, Bounds(eta=eta))


def off_shell_params(seed: int, spec: ChainSpec, m: int, avoid=()):
    """Generic rationals away from the xi's, their +-eta shifts and ``avoid``."""
    rng = random.Random(seed)
    return tuple(generic_params(rng, m, spec.eta,
                                avoid=[*spec.xi, *avoid]))
