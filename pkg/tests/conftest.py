from fractions import Fraction

from hypothesis import settings, strategies as st

from qesforms.exactpoly import DiffOp, Polynomial

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def exponents(dim, max_exp=3):
    return st.tuples(*[st.integers(0, max_exp)] * dim)


def polynomials(dim, max_terms=4, max_exp=3):
    return st.dictionaries(exponents(dim, max_exp), rationals, max_size=max_terms).map(
        lambda terms: Polynomial(dim, terms)
    )


def diffops(dim, max_terms=3, max_order=2):
    term = st.tuples(polynomials(dim, 3, 2), exponents(dim, max_order))
    return st.lists(term, max_size=max_terms).map(lambda terms: DiffOp(dim, terms))


def frac(x) -> Fraction:
    return Fraction(x)
