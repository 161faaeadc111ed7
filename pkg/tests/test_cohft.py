import json
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from e7cylg import catalog
from e7cylg.algebra import FieldElem, Series
from e7cylg.cohft import (
    Degenerate,
    Potential,
    change_vars,
    extract_triple,
    grading_check,
    p2222_potential,
    pairing_from_cubic,
    parse_monomial,
    wdvv_residual,
)
from e7cylg.halphen import HalphenTriple, is_solution, x_tau0_omega0

ZERO = Series.constant(0)


def _pair(P, a, b):
    return pairing_from_cubic(P)[P.var_names.index(a)][P.var_names.index(b)]


def test_parse_monomial():
    assert parse_monomial("t1^2*t3", ("t0", "t1", "t2", "t3")) == (0, 2, 0, 1)
    with pytest.raises(KeyError):
        parse_monomial("t9", ("t0", "t1"))


def test_pairing_p2222():
    P = p2222_potential(ZERO, ZERO, ZERO)
    assert _pair(P, "t0", "t-1") == 1
    for t in ("t1", "t2", "t3", "t4"):
        assert _pair(P, t, t) == Fr(1, 2)
    assert _pair(P, "t1", "t2") == 0


def test_pairing_g1():
    P = catalog.build("e7g1", 4).potential
    assert _pair(P, "t_J", "t_a2J") == 1
    assert _pair(P, "t_aJ", "t_aJ") == 1
    assert _pair(P, "t_bJ", "t_a2bJ") == 1
    assert _pair(P, "t_c_xy", "t_c_xy") == Fr(1, 16)


def test_missing_cubic_is_degenerate():
    P = Potential.from_terms(("t0", "t-1", "t1"), "t0", "t-1", "tau", [("t1^4", 1)])
    with pytest.raises(Degenerate):
        pairing_from_cubic(P)


def test_zero_triple_template_solves_wdvv():
    assert wdvv_residual(p2222_potential(ZERO, ZERO, ZERO), 6).passed


def test_fixture_triple_template_solves_wdvv():
    X = x_tau0_omega0(11)
    assert wdvv_residual(p2222_potential(X.X4, X.X2, X.X3, prec=11), 8).passed


def test_perturbed_template_fails():
    X = x_tau0_omega0(11)
    bumped = X.X2 + Series({2: 1}, prec=11)
    rep = wdvv_residual(p2222_potential(X.X4, bumped, X.X3, prec=11), 8)
    assert not rep.passed
    assert rep.failures and len(rep.failures[0]["quadruple"]) == 4


def test_identity_change_of_variables():
    P = catalog.build("e7g1", 4).potential
    assert change_vars(P, {}).first_difference(P) is None


def test_g1_map_gives_template():
    P = catalog.change_map("g1").apply(catalog.build("e7g1", 8).potential)
    match = extract_triple(P)
    assert match.matched
    assert isinstance(match.triple, HalphenTriple)


def test_corrupted_template_does_not_match():
    X = x_tau0_omega0(8)
    P = p2222_potential(X.X4, X.X2, X.X3, prec=8)
    terms = dict(P.terms)
    key = parse_monomial("t1^4", P.var_names)
    terms[key] = terms[key] + Series.constant(1)
    bad = Potential(P.var_names, P.unit, P.modular, P.mode, terms, P.prec, P.grades)
    match = extract_triple(bad)
    assert not match.matched and "t1^4" in match.failure


def test_grading():
    assert grading_check(catalog.build("e7g1", 4).potential)
    P = p2222_potential(ZERO, ZERO, ZERO)
    assert grading_check(P)
    stray = Potential.from_terms(P.var_names, "t0", "t-1", "tau",
                                 [*((m, s) for m, s in P.terms.items()), ("t1^3", 1)], grades=P.grades)
    assert not grading_check(stray)


def test_json_round_trip():
    P = catalog.build("e7g2_plus", 4).potential
    back = Potential.from_json(json.loads(json.dumps(P.to_json())))
    assert back.first_difference(P) is None
    assert back.var_names == P.var_names


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from([0, 0, 1, -1, Fr(1, 4), Fr(-3, 7)]), min_size=3, max_size=3))
def test_wdvv_matches_halphen_on_constant_triples(values):
    # template WDVV holds exactly when the slot triple solves Halphen
    A, B, C = (Series.constant(v) for v in values)
    passed = wdvv_residual(p2222_potential(A, B, C), 3).passed
    assert passed == is_solution(HalphenTriple(B, C, A))


@settings(max_examples=20, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3))
def test_rescaling_preserves_wdvv(a, b):
    P = catalog.build("e7g1", 4).potential
    c = FieldElem(a) + FieldElem(b) * FieldElem(0, 1)
    if c.is_zero():
        return
    images = {"t_aJ": {"t_aJ": c}, "t_bJ": {"t_bJ": c}, "t_a2bJ": {"t_a2bJ": c.inv()}}
    Q = change_vars(P, images)
    # cubic block changes, but associativity is invariant under linear changes of variables
    assert wdvv_residual(Q, 4).passed
