from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from nilfrac.classify import Kind, classify_nilpotent, theorem_kind
from nilfrac.errors import NotNilpotentError, UndecidableJetError
from nilfrac.polyfield import NilpotentModel, PlanarVectorField

X, Y = sp.symbols("x y")
ORDER = 8


def sympy_F_G(A, B):
    """Leading (exponent, coefficient) of F and G by fixed-point iteration in sympy."""
    f = sp.Integer(0)
    for _ in range(ORDER + 1):
        f = sp.expand(-A.subs(Y, f))
        f = sum(f.coeff(X, k) * X**k for k in range(ORDER + 1))
    F = sp.expand(B.subs(Y, f))
    G = sp.expand((sp.diff(A, X) + sp.diff(B, Y)).subs(Y, f))

    def lead(e):
        for k in range(ORDER + 1):
            c = e.coeff(X, k)
            if c != 0:
                return k, Fraction(str(c))
        return None
    return lead(F), lead(G)


coef = st.integers(-3, 3)
higher = st.dictionaries(st.sampled_from([(2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (4, 0), (3, 1)]),
                         coef, max_size=4)


@settings(max_examples=40, deadline=None)
@given(higher, higher)
def test_leading_F_G_match_sympy(a_terms, b_terms):
    A = sum((c * X**i * Y**j for (i, j), c in a_terms.items()), sp.Integer(0))
    B = sum((c * X**i * Y**j for (i, j), c in b_terms.items()), sp.Integer(0))
    field = PlanarVectorField.from_terms([(0, 1, 1)] + [(i, j, c) for (i, j), c in a_terms.items()],
                                         [(i, j, c) for (i, j), c in b_terms.items()])
    (lf, lg) = sympy_F_G(A, B)
    try:
        rep = classify_nilpotent(field, order=ORDER)
    except UndecidableJetError:
        assert lf is None or (lf[0] < 2 and lg is not None)
        return
    assert (rep.m, rep.a) == lf
    assert (rep.n, rep.b) == (lg if lg is not None else (None, None))


# the five worked examples: model (a, m, b, n) and the published type
EXAMPLES = [
    ((1, 2, -1, 1), Kind.CUSP),
    ((1, 3, -1, 2), Kind.SADDLE),
    ((1, 4, 1, 1), Kind.SADDLE_NODE),
    ((-1, 5, -4, 2), Kind.NODE),
    ((-1, 3, 3, 1), Kind.ELLIPTIC_HYPERBOLIC),
]


@pytest.mark.parametrize("params,kind", EXAMPLES)
def test_worked_examples(params, kind):
    a, m, b, n = params
    rep = classify_nilpotent(NilpotentModel(Fraction(a), m, Fraction(b), n).to_field())
    assert rep.kind is kind


def test_node_stability_follows_b():
    rep = classify_nilpotent(NilpotentModel(Fraction(-1), 5, Fraction(-4), 2).to_field())
    assert rep.stability == "attracting"
    rep = classify_nilpotent(NilpotentModel(Fraction(-1), 5, Fraction(4), 2).to_field())
    assert rep.stability == "repelling"


def test_float_mode_agrees():
    rep = classify_nilpotent(NilpotentModel(1.0, 4, 1.0, 1).to_field())
    assert rep.kind is Kind.SADDLE_NODE


def test_monodromic_flagged():
    rep = classify_nilpotent(NilpotentModel(Fraction(-1), 3).to_field())
    assert rep.kind is Kind.CENTER_OR_FOCUS and rep.monodromic


def test_table_boundaries():
    # m = 2n+1 with negative discriminant is monodromic, otherwise a node or elliptic sector
    assert theorem_kind(3, Fraction(-1), 1, Fraction(1))[0] is Kind.CENTER_OR_FOCUS
    assert theorem_kind(3, Fraction(-1), 1, Fraction(3))[0] is Kind.ELLIPTIC_HYPERBOLIC
    assert theorem_kind(5, Fraction(-1), 2, Fraction(4))[0] is Kind.NODE
    assert theorem_kind(2, Fraction(1), 1, Fraction(1))[0] is Kind.CUSP
    assert theorem_kind(4, Fraction(1), 1, Fraction(1))[0] is Kind.SADDLE_NODE
    assert theorem_kind(4, Fraction(1))[0] is Kind.CUSP


def test_rejects_non_nilpotent():
    with pytest.raises(NotNilpotentError):
        classify_nilpotent(PlanarVectorField.from_terms([(1, 0, 1)], [(0, 1, 1)]))
    with pytest.raises(NotNilpotentError):
        classify_nilpotent(PlanarVectorField.from_terms([(0, 1, 1), (0, 0, 1)], [(2, 0, 1)]))
