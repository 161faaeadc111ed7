from fractions import Fraction as Fr

import pytest

from e7cylg.halphen import psi_triple, residual
from e7cylg.qmodular import (
    check_q_identities,
    check_theta_psi_identities,
    check_xyzw_odes,
    eisenstein_f,
    gw442_xyzw,
    psi_series,
    qseries_table,
    theta_series,
)


def divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def psi2_oracle(N):
    return 4 * sum((-1) ** (n - 1) * n for n in divisors(N))


def psi3_oracle(N):
    # coefficient of q^(N/2)
    return 4 * sum((-1) ** (n - 1) * n for n in divisors(N) if (N // n) % 2)


def psi4_oracle(N):
    return -4 * sum(n for n in divisors(N) if (N // n) % 2)


def test_theta_examples():
    t3 = theta_series(3, 8)
    assert [t3[Fr(k, 2)] for k in range(16)] == [1, 2, 0, 0, 2, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0]
    t2 = theta_series(2, 4)
    assert t2.valuation() == Fr(1, 8)
    assert t2[Fr(1, 8)] == 2 and t2[Fr(9, 8)] == 2 and t2[Fr(25, 8)] == 2 and t2[Fr(17, 8)] == 0
    t4 = theta_series(4, 8)
    assert t4[Fr(1, 2)] == -2 and t4[2] == 2 and t4[Fr(9, 2)] == -2


def test_theta_via_sum_over_integers():
    # independent brute force over n in Z
    order = 12
    t3, t4, t2 = (theta_series(k, order) for k in (3, 4, 2))
    for num in range(order * 8):
        e = Fr(num, 8)
        c3 = sum(1 for n in range(-10, 11) if Fr(n * n, 2) == e)
        c4 = sum((-1) ** abs(n) for n in range(-10, 11) if Fr(n * n, 2) == e)
        c2 = sum(1 for n in range(-10, 11) if Fr((2 * n - 1) ** 2, 8) == e)
        assert (t3[e], t4[e], t2[e]) == (c3, c4, c2)


@pytest.mark.parametrize("k,oracle", [(2, psi2_oracle), (3, psi3_oracle), (4, psi4_oracle)])
def test_psi_divisor_oracles(k, oracle):
    s = psi_series(k, 20)
    if k == 2:
        assert s[0] == Fr(1, 2)
        for N in range(1, 20):
            assert s[N] == oracle(N)
            assert s[Fr(2 * N + 1, 2)] == 0
    else:
        assert s[0] == 0
        for N in range(1, 40):
            assert s[Fr(N, 2)] == oracle(N)


def test_psi_examples():
    assert [psi_series(2, 5)[k] for k in range(5)] == [Fr(1, 2), 4, -4, 16, -20]
    p3 = psi_series(3, 2)
    assert [p3[Fr(k, 2)] for k in (1, 2, 3)] == [4, -8, 16]
    p4 = psi_series(4, 2)
    assert [p4[Fr(k, 2)] for k in (1, 2, 3)] == [-4, -8, -16]


def test_eisenstein_sigma_oracle():
    f = eisenstein_f(30)
    assert f[0] == 1
    for N in range(1, 30):
        assert f[N] == -24 * sum(divisors(N))
    assert [f[k] for k in range(5)] == [1, -24, -72, -96, -168]


def test_xyzw_examples():
    x, y, z, w = gw442_xyzw(16)
    assert [x[k] for k in range(13)] == [1, 0, 0, 0, 4, 0, 0, 0, 4, 0, 0, 0, 0]
    assert y[2] == 4 and y[10] == 8 and y[6] == 0
    assert [w[k] for k in (0, 4, 8)] == [1, -8, -8]
    assert z[1] == 4


def test_table_invariants():
    tab = qseries_table(12)
    assert tab["theta2"].valuation() == Fr(1, 8) and tab["theta2"].leading() == 2
    assert tab["theta3"][0] == 1 and tab["theta4"][0] == 1
    assert tab["psi2"][0] == Fr(1, 2) and tab["x"][0] == 1
    for s in tab.entries.values():
        assert all(v.is_rational() for _, v in s.items())


def test_table_stable_under_order_doubling():
    small, big = qseries_table(10), qseries_table(20)
    for name, s in small.entries.items():
        assert big[name].agrees_with(s, prec=s.prec), name


def test_identity_suite_order_40():
    rep = check_q_identities(40)
    assert len(rep.results) == 16
    failed = [r.name for r in rep.results if not r.passed]
    assert not failed
    assert all(r.checked_below == 40 for r in rep.results)


def test_identity_suite_rejects_low_order():
    with pytest.raises(ValueError):
        check_q_identities(3)


def test_identity_report_flags_a_broken_identity():
    rep = check_theta_psi_identities(8)
    rep.add("deliberately wrong", theta_series(3, 8) - theta_series(4, 8))
    assert not rep.passed
    bad = rep.to_json()["identities"][-1]
    assert bad["first_nonzero"]["exp"] == "1/2"


def test_psi_triple_solves_q_halphen():
    assert all(r.is_zero() and r.prec == 40 for r in residual(psi_triple(40)))


def test_xyzw_odes_hold():
    rep = check_xyzw_odes(40)
    assert rep.passed and all(r.checked_below == 40 for r in rep.results)
