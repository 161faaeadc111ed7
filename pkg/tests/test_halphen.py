import json
from fractions import Fraction as Fr
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from e7cylg.algebra import SQRT2, FieldElem, Series
from e7cylg.halphen import (
    HalphenTriple,
    derived_structure,
    is_solution,
    permute,
    psi_triple,
    residual,
    taylor_solve,
    transform_scale,
    x_tau0_omega0,
)

FIXTURE = Path(__file__).resolve().parents[1] / "src" / "e7cylg" / "fixtures" / "halphen" / "x_tau0_omega0.json"

# coefficients t^0..t^8 of the distinguished triple, transcribed by hand
X2_TABLE = [Fr(1, 4), Fr(-1, 16), Fr(1, 64), Fr(-1, 768), Fr(1, 3072), Fr(-1, 20480), Fr(1, 245760),
            Fr(-13, 20643840), Fr(1, 9175040)]
X3_TABLE = [0, Fr(1, 16), 0, Fr(-1, 768), 0, Fr(1, 20480), 0, Fr(-13, 20643840), 0]
X4_TABLE = [-c * (-1) ** k for k, c in enumerate(X2_TABLE)]


def test_fixture_table():
    T = x_tau0_omega0(9)
    assert [T.X2[k] for k in range(9)] == X2_TABLE
    assert [T.X3[k] for k in range(9)] == X3_TABLE
    assert [T.X4[k] for k in range(9)] == X4_TABLE
    assert T.X4[6] == Fr(-1, 245760)


def test_fixture_file_matches_solver():
    data = json.loads(FIXTURE.read_text())
    assert HalphenTriple.from_json(data) == x_tau0_omega0(9)


def test_first_step_of_recurrence():
    assert taylor_solve((Fr(1, 4), 0, Fr(-1, 4)), 2).X2[1] == Fr(-1, 16)


def test_zero_triple():
    Z = taylor_solve((0, 0, 0), 6)
    assert all(s.is_zero() for s in Z)
    assert all(r.is_zero() for r in residual(Z))
    assert all(s.is_zero() for s in transform_scale(Z, 3))


def test_residual_precision_and_fixture_residual():
    rs = residual(x_tau0_omega0(9))
    assert all(r.is_zero() and r.prec == 8 for r in rs)


def test_perturbation_breaks_residual():
    T = x_tau0_omega0(9)
    bad = HalphenTriple(T.X2 + Series({2: 1}, prec=9), T.X3, T.X4)
    assert not is_solution(bad)


def test_fixture_symmetries_order_40():
    T = x_tau0_omega0(40)
    assert T.X3.parity() == "odd"
    assert T.X4 == -T.X2.scale_var(-1)
    assert sum((s[0] for s in T), FieldElem(0)) == 0
    assert all(v.is_rational() for s in T for _, v in s.items())


init_values = st.tuples(*[st.fractions(min_value=-3, max_value=3, max_denominator=8)] * 3)


@settings(max_examples=25, deadline=None)
@given(init_values, st.integers(1, 40))
def test_taylor_solve_has_zero_residual(init, N):
    assert is_solution(taylor_solve(init, N))


@settings(max_examples=15, deadline=None)
@given(init_values, st.permutations([2, 3, 4]))
def test_taylor_solve_natural_under_permutation(init, perm):
    T = taylor_solve(init, 12)
    by_index = dict(zip((2, 3, 4), init))
    assert permute(T, perm) == taylor_solve([by_index[p] for p in perm], 12)


def test_scale_transform():
    T = x_tau0_omega0(12)
    assert transform_scale(T, 1) == T
    S = transform_scale(T, 4)
    assert is_solution(S) and S.X2[0] == 1
    assert is_solution(transform_scale(T, FieldElem(0, 1)))


def test_permutations():
    T = x_tau0_omega0(12)
    assert permute(T, (2, 3, 4)) == T
    assert is_solution(permute(T, (2, 4, 3)))
    assert is_solution(permute(psi_triple(20), (3, 4, 2)))
    with pytest.raises(ValueError):
        permute(T, (2, 2, 4))


def test_derived_structure_fixture():
    D = derived_structure(x_tau0_omega0(12))
    assert D.x0[0] == SQRT2 / 4 + Fr(1, 4)
    assert D.y0[0] == SQRT2 / 4 - Fr(1, 4)
    assert D.w0[0] == Fr(1, 16) + SQRT2 / 8
    assert (D.z0 * D.z0 - (D.x0 * D.y0).scale(4)).is_zero()


def test_derived_structure_solves_xyzw_system():
    D = derived_structure(x_tau0_omega0(16))
    x, y, w = D.x0, D.y0, D.w0
    x2 = x * x
    assert (w.derivative() - (w * w - x2 * x2)).is_zero()
    assert (x.derivative() - x * (w - x2 + (y * y).scale(2))).is_zero()
    assert (y.derivative() - y * (w + x2)).is_zero()


def test_quartic_combination_is_rational():
    T = x_tau0_omega0(40)
    D = derived_structure(T)
    comb = D.w0.scale(Fr(-1, 8)) + (D.x0 * D.x0).scale(Fr(1, 12)) - (D.y0 * D.y0).scale(Fr(1, 24))
    assert comb.component(2).is_zero() and comb.component(3).is_zero()
    assert comb == (T.X2 + T.X3 + T.X4).scale(Fr(-1, 24)).truncate(comb.prec)


def test_triple_json_roundtrip():
    T = psi_triple(6)
    assert HalphenTriple.from_json(json.loads(json.dumps(T.to_json()))) == T
