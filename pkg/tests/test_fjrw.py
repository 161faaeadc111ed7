from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from e7cylg.fjrw import (
    IDENTITY,
    J,
    BroadInsertion,
    GroupElement,
    allowed_monomials,
    ansatz_check,
    bernoulli2,
    chat,
    chiodo_fourpoint,
    enumerate_group,
    form_label,
    group,
    sector_data,
    selection_ok,
    state_basis,
)

G1_STATES = {"[J]", "[c,xy]", "[bJ]", "[aJ]", "[a^2bJ]", "[a^2J]"}


def test_central_charge():
    assert chat() == 1


@pytest.mark.parametrize("name, size", [("g1", 16), ("g2", 8), ("g3", 8), ("gmax", 32)])
def test_group_orders(name, size):
    G = group(name)
    assert len(G) == size
    assert J in G and IDENTITY in G


def test_cyclic_j():
    assert len(enumerate_group([J])) == 4


def test_unit_sector():
    s = sector_data(J)
    assert (s.iota, s.narrow, s.deg_W) == (0, True, 0)


def test_narrow_sector_a2j():
    s = sector_data(GroupElement("3/4", "3/4", "1/2"))
    assert (s.iota, s.narrow, s.deg_W) == (1, True, 2)


def test_broad_sector_c():
    s = sector_data(GroupElement(0, 0, "1/2"), G=group("g1"))
    assert s.N_h == 2 and s.iota == Fr(-1, 2) and s.deg_W == 1
    assert [form_label(f) for f in s.basis_forms] == ["xy"]


def test_state_bases():
    g1 = state_basis("g1")
    assert {s.label for s in g1} == G1_STATES
    g3_labels = {s.label for s in state_basis("g3")}
    assert {"[b,x^2]", "[b,xy]", "[b,y^2]"} <= g3_labels
    assert len(state_basis("g2")) == 6


def test_g2_broad_label_kept_with_computed_form():
    s = next(s for s in state_basis("g2") if s.label == "[a^2b,xy]")
    assert form_label(s.form) == "y"


@pytest.mark.parametrize("name, count", [("g1", 19), ("g2", 14), ("g3", 10)])
def test_ansatz_sizes(name, count):
    assert len(allowed_monomials(name)) == count
    assert ansatz_check(name).passed


def test_ansatz_grade_sum():
    for name in ("g1", "g2", "g3"):
        grades = {s.var: s.grade for s in state_basis(name)}
        for t in allowed_monomials(name).terms:
            assert sum(grades[v] * e for v, e in t.monomial) == 3 - chat()


def test_g1_ansatz_parities():
    terms = {t.monomial: t for t in allowed_monomials("g1").terms}
    assert terms[(("t_aJ", 1), ("t_c_xy", 3))].parity == "even"
    assert (("t_aJ", 3), ("t_bJ", 1)) not in terms


def test_chiodo_selection_zeros():
    aJ = GroupElement("1/2", "1/2", "1/2")
    assert chiodo_fourpoint([aJ] * 4) == 0
    ab, a3b = GroupElement("1/4", "3/4", "1/2"), GroupElement("3/4", "1/4", "1/2")
    assert chiodo_fourpoint([ab, ab, a3b, a3b]) == 0


def test_chiodo_rejects_broad_and_wrong_arity():
    with pytest.raises(BroadInsertion):
        chiodo_fourpoint([GroupElement(0, 0, "1/2")] * 4)
    with pytest.raises(ValueError):
        chiodo_fourpoint([J] * 3)


def test_chiodo_wrong_dimension_vanishes():
    # passes the selection rule, but the R^1 ranks add up to 2
    r23, r32 = GroupElement("1/2", "3/4", "1/2"), GroupElement("3/4", "1/2", "1/2")
    assert selection_ok([r23, r23, r32, r32])
    assert chiodo_fourpoint([r23, r23, r32, r32]) == 0


def test_chiodo_symmetric():
    gmax = [h for h in group("gmax") if 0 not in h.thetas]
    quad = [gmax[1], gmax[2], gmax[4], gmax[7]]
    assert chiodo_fourpoint(quad) == chiodo_fourpoint(quad[::-1])


@given(st.fractions(min_value=0, max_value=1, max_denominator=1000))
def test_bernoulli_symmetry(x):
    assert bernoulli2(x) == bernoulli2(1 - x)


@given(st.permutations(range(4)))
def test_selection_rule_symmetric(perm):
    hs = [GroupElement("1/4", "1/2", "1/2"), GroupElement("1/2", "1/4", "1/2"),
          GroupElement("1/4", "3/4", "1/2"), GroupElement("3/4", "1/4", "1/2")]
    assert selection_ok(hs) == selection_ok([hs[k] for k in perm])

