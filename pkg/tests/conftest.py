import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import settings
from hypothesis import strategies as st

from cartan_algebroids.catalog import catalog
from cartan_algebroids.kernel import Polynomial

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

small_rationals = st.fractions(min_value=-4, max_value=4, max_denominator=4)


@st.composite
def polynomials(draw, nvars=2, max_degree=3, max_terms=5):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        exps = tuple(draw(st.integers(0, max_degree)) for _ in range(nvars))
        if sum(exps) > max_degree:
            continue
        terms[exps] = draw(small_rationals)
    return Polynomial(nvars, terms)


def to_sympy(p: Polynomial, xs):
    """Independent view of a polynomial as a sympy expression."""
    out = sp.Integer(0)
    for exps, c in p.terms:
        term = sp.Rational(c.numerator, c.denominator)
        for x, e in zip(xs, exps):
            term *= x**e
        out += term
    return sp.expand(out)


def from_sympy(expr, xs) -> Polynomial:
    poly = sp.Poly(sp.expand(expr), *xs)
    terms = {}
    for exps, c in poly.terms():
        c = sp.Rational(c)
        terms[tuple(exps)] = Fraction(int(c.p), int(c.q))
    return Polynomial(len(xs), terms)


@pytest.fixture(scope="session")
def euclid():
    return catalog("euclidean2")


@pytest.fixture(scope="session")
def sphere_doc():
    return catalog("so3-sphere")


@pytest.fixture(scope="session")
def affine():
    return catalog("affine1")


@pytest.fixture
def rng():
    return random.Random(20240611)


# acceptance lines, printed once at the end of the run
ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = {}


@pytest.fixture
def acceptance(request):
    return request.config.stash[ACCEPTANCE_KEY]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE_KEY, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(results[key])
