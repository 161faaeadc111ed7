from fractions import Fraction as Fr

import pytest

from e7cylg import catalog
from e7cylg.algebra import I
from e7cylg.cohft import parse_monomial, wdvv_residual

ORDER = 8


@pytest.mark.parametrize("name", catalog.ENTRY_NAMES)
def test_wdvv(name):
    rep = catalog.wdvv_check(name, ORDER)
    assert rep.passed, rep.failures[:1]


def test_ten_entries():
    assert len(catalog.ENTRY_NAMES) == 10


def test_unknown_entry():
    with pytest.raises(catalog.UnknownName):
        catalog.build("e8", 4)


def test_perturbed_template_is_caught():
    rep = catalog.perturbed_template_check(ORDER)
    assert rep.passed
    assert rep.details["residual_status"] == "fail"


@pytest.mark.parametrize("group, perm", [("g1", "(X2, X4, X3)"), ("g2", "(X3, X4, X2)"), ("g3", None)])
def test_cylg(group, perm):
    rep = catalog.cylg_check(group, ORDER)
    assert rep.passed, rep.failures
    assert rep.details["halphen"]
    assert rep.details.get("permutation") == perm


@pytest.mark.parametrize("group", ["g1", "g2", "g3"])
def test_concave_restriction(group):
    rep = catalog.concave_restriction_check(group, ORDER)
    assert rep.passed, rep.failures[:1]


def test_g3_aj4_needs_no_quarter():
    # f11 = -(X2 + X3 + X4)/24 matches G_max; a quarter of it does not
    g3 = catalog.build("e7g3", ORDER).potential
    gmax = catalog.build("e7gmax", ORDER).potential
    f11 = g3.coefficient("t_aJ^4")
    target = gmax.coefficient("t_r22^4")
    assert (f11 - target).is_zero()
    assert not (f11.scale(Fr(1, 4)) - target).is_zero()


def test_printed_g2_swap_fails():
    assert not catalog.g2_branch_check(ORDER, K=I).passed


def test_corrected_g2_relation():
    assert catalog.g2_branch_relation_check(ORDER).passed


def test_g3_irrationality():
    rep = catalog.g3_irrationality_check(ORDER)
    assert rep.passed, rep.failures
    assert rep.details["sqrt2_in_x0"]
    assert rep.details["field_after"] == ["1"]


def test_rational_form_keeps_wdvv():
    P = catalog.rational_form(catalog.build("e7g3", ORDER).potential)
    assert P.coefficient_field() == {"1"}
    assert wdvv_residual(P, ORDER).passed


def test_gmax_is_rational():
    assert catalog.build("e7gmax", ORDER).potential.coefficient_field() == {"1"}


@pytest.mark.parametrize("group", ["g1", "g2", "g3", "gmax"])
def test_chiodo_against_catalog(group):
    rep = catalog.chiodo_selection_check(group, ORDER)
    assert rep.passed, rep.failures[:2]
    assert rep.details["violating"] > 0 and rep.details["four_point"] > 0


def test_g2_branches_differ():
    plus = catalog.build("e7g2_plus", ORDER).potential
    minus = catalog.build("e7g2_minus", ORDER).potential
    assert plus.first_difference(minus) is not None


def test_givental_determinants():
    data = {m.name: m for m in catalog.givental_data(40)}
    for k in (1, 2, 3):
        assert data[f"A^G{k}"].det().close_to(1, 30)
    assert data["A^(tau0,omega0)"].det().close_to(1, 30)


def test_build_is_truncation_stable():
    small = catalog.build("e7g1", 5).potential
    big = catalog.build("e7g1", 9).potential
    for mono in small.terms:
        a, b = small.terms[mono], big.coefficient(mono)
        assert all(a[n] == b[n] for n in range(small.prec))


def test_template_shape_after_g2_map():
    P = catalog.change_map("g2").apply(catalog.build("e7g2_plus", ORDER).potential)
    assert parse_monomial("t1^4", P.var_names) in P.terms
