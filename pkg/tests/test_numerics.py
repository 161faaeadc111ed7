from fractions import Fraction as Fr

import mpmath
import pytest
from mpmath import mp, mpc, mpf

from e7cylg import catalog, numerics
from e7cylg.algebra import I, FieldElem
from e7cylg.cohft import extract_triple
from e7cylg.numerics import (
    ImageNotInH,
    NotInUpperHalfPlane,
    PreciseComplex,
    a_group,
    a_tau_omega,
    constants_check,
    double_argument_check_numeric,
    field_to_mpc,
    g3_transport_check,
    omega0,
    sigma_prime,
    sl2_transport,
    theta_eval,
    x_inf_eval,
)
from e7cylg.qmodular import qseries_table

D = 40
G3_VALUES = (FieldElem(0), I / 4, -I / 4)


def _gamma34():
    with mp.workdps(D + 10):
        return mpmath.gamma(mpf(3) / 4)


def test_theta3_at_i():
    with mp.workdps(D + 10):
        target = mp.pi ** mpf(0.25) / _gamma34()
    assert theta_eval(3, 1j, D).close_to(target, 35)


def test_theta2_over_theta3_at_i():
    with mp.workdps(D + 10):
        target = mpf(2) ** mpf(-0.25)
    assert (theta_eval(2, 1j, D) / theta_eval(3, 1j, D)).close_to(target, 30)


def test_theta4_shift():
    tau = mpc(0.5, 1)
    assert theta_eval(4, tau + 1, D).close_to(theta_eval(3, tau, D), 35)


def test_lower_half_plane_rejected():
    with pytest.raises(NotInUpperHalfPlane):
        theta_eval(3, -1j, D)


def test_tail_bound_is_honest():
    low = theta_eval(2, mpc(0.3, 0.7), 30)
    high = theta_eval(2, mpc(0.3, 0.7), 60)
    assert low.distance(high) <= low.err + high.err + numerics.tolerance(30)


@pytest.mark.parametrize("tau", [1j, 2j, 1 + 1j])
def test_x_inf_matches_q_expansion(tau):
    # X_k^inf = 2 d/dtau log theta_k = pi i psi_k(q), q = exp(2 pi i tau)
    table = qseries_table(Fr(40))
    with mp.workdps(D + 15):
        q_half = mpmath.exp(mp.pi * 1j * mpc(tau))
        for k in (2, 3, 4):
            psi = table[f"psi{k}"]
            total = mpc(0)
            for e, c in psi.items():
                total += field_to_mpc(c, D) * q_half ** int(2 * e)
            assert x_inf_eval(k, tau, D).close_to(mp.pi * 1j * total, 30)


def test_x_inf_leading_mode():
    # near i infinity X_2^inf -> pi i / 2
    with mp.workdps(D):
        assert x_inf_eval(2, 12j, D).close_to(mp.pi * 1j / 2, 12)


def test_sigma_prime_identity():
    w0 = omega0(D)
    lhs = PreciseComplex.exact(-1j, D) / (2 * w0 ** 2)
    assert lhs.distance(sigma_prime(D)) < mpf(10) ** -30


def test_gamma34_value():
    assert numerics.gamma34(D).close_to(_gamma34(), 35)


def test_transport_of_a_tau0():
    X2, X3, X4 = sl2_transport(a_tau_omega(1j, omega0(D), D), 0, D)
    assert X2.close_to(0.25, 25) and X3.close_to(0, 25) and X4.close_to(-0.25, 25)


def test_identity_transport_is_x_inf():
    values = sl2_transport(((1, 0), (0, 1)), 2j, D)
    for k, v in zip((2, 3, 4), values):
        assert v.close_to(x_inf_eval(k, 2j, D), 35)


def test_transport_outside_h():
    with pytest.raises(ImageNotInH):
        sl2_transport(((1, 0), (0, -1)), 1j, D)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_group_determinants(k):
    (a, b), (c, d) = a_group(k, D)
    assert (a * d - b * c).close_to(1, 30)


def test_constants_check():
    rep = constants_check(D)
    assert rep.passed, rep.failures


@pytest.mark.parametrize("A, tau", [
    (((1, 0), (0, 1)), 2j),
    ("tau0", 0.1j),
    (((1, 1), (0, 1)), 1j),
])
def test_double_argument(A, tau):
    if A == "tau0":
        A = a_tau_omega(1j, omega0(D), D)
    rep = double_argument_check_numeric(A, [tau], D)
    assert rep.passed, rep.failures


def test_g3_transport_point():
    assert g3_transport_check(G3_VALUES, D).passed


def test_printed_g3_point_fails():
    assert not g3_transport_check(G3_VALUES, D, printed=True).passed


def test_printed_point_lands_on_aux_branch():
    P = catalog.change_map("g3").apply(catalog.build("aux3", 8).potential)
    values = extract_triple(P).triple.initial_values()
    assert g3_transport_check(values, D, printed=True).passed


def test_precision_monotonicity():
    low, high = constants_check(40), constants_check(60)
    assert low.passed and high.passed
    for a, b in zip(low.details["constants"], high.details["constants"]):
        assert a["name"] == b["name"] and (not a["passed"] or b["passed"])
