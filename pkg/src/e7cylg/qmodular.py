"""q-expansions of theta constants, the Lambert series psi_k, the weight-two
Eisenstein series f, and the x, y, z, w functions of the (4,4,2) orbifold.

Nome convention: q = exp(2 pi i tau), so theta_k(tau) lives on the lattice
(1/8)Z and the odd psi series on (1/2)Z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import Series

__all__ = [
    "theta_series",
    "psi_series",
    "eisenstein_f",
    "gw442_xyzw",
    "xyzw_from_psi",
    "qseries_table",
    "QSeriesTable",
    "IdentityResult",
    "IdentityReport",
    "check_q_identities",
    "check_theta_psi_identities",
    "check_xyzw_odes",
]

THETA_DEN = 8
PSI_DEN = 2


def _order(order) -> Fraction:
    order = Fraction(order)
    if order <= 0:
        raise ValueError("order must be positive")
    return order


def theta_series(k: int, order) -> Series:
    """Partial sum of the theta constant theta_k, exponents < order."""
    order = _order(order)
    cut = math.ceil(order * THETA_DEN)
    coeffs: dict[int, int] = {}
    n = 0
    while True:
        if k == 2:
            # (n - 1/2)^2 / 2 = (2n - 1)^2 / 8 ; n and 1 - n give the same term
            e = (2 * n + 1) ** 2
            if e >= cut:
                break
            coeffs[e] = coeffs.get(e, 0) + 2
        elif k in (3, 4):
            e = 4 * n * n
            if e >= cut:
                break
            sign = -1 if (k == 4 and n % 2) else 1
            coeffs[e] = coeffs.get(e, 0) + (sign if n == 0 else 2 * sign)
        else:
            raise ValueError("theta index must be 2, 3 or 4")
        n += 1
    return Series(coeffs, prec=order, den=THETA_DEN)


def psi_series(k: int, order) -> Series:
    """Lambert series psi_k expanded directly from its defining sum."""
    order = _order(order)
    cut = math.ceil(order * PSI_DEN)  # lattice numerators, exponent = m/2
    coeffs: dict[int, int] = {}
    if k == 2:
        coeffs[0] = Fraction(1, 2)
        # 4 (-1)^(n-1) n q^n / (1 - q^n)
        for n in range(1, cut):
            c = 4 * n * (1 if n % 2 else -1)
            for m in range(2 * n, cut, 2 * n):
                coeffs[m] = coeffs.get(m, 0) + c
    elif k in (3, 4):
        # 4 (+-1) n q^(n/2) / (1 - q^n): exponents n/2 + j n
        for n in range(1, cut):
            if k == 3:
                c = 4 * n * (1 if n % 2 else -1)
            else:
                c = -4 * n
            for m in range(n, cut, 2 * n):
                coeffs[m] = coeffs.get(m, 0) + c
    else:
        raise ValueError("psi index must be 2, 3 or 4")
    return Series(coeffs, prec=order, den=PSI_DEN)


def eisenstein_f(order) -> Series:
    """f(q) = 1 - 24 sum k q^k / (1 - q^k)."""
    order = _order(order)
    cut = math.ceil(order)
    coeffs: dict[int, int] = {0: 1}
    for k in range(1, cut):
        for m in range(k, cut, k):
            coeffs[m] = coeffs.get(m, 0) - 24 * k
    return Series(coeffs, prec=order)


def gw442_xyzw(order) -> tuple[Series, Series, Series, Series]:
    """x = theta_3(q^8)^2, y = theta_2(q^8)^2, z = theta_2(q^4)^2, w from f(q^4), f(q^8), f(q^16)."""
    order = _order(order)
    th3 = theta_series(3, order / 8).compose_power(8)
    th2_8 = theta_series(2, order / 8).compose_power(8)
    th2_4 = theta_series(2, order / 4).compose_power(4)
    x = (th3 * th3).reduced()
    y = (th2_8 * th2_8).reduced()
    z = (th2_4 * th2_4).reduced()
    f4 = eisenstein_f(order / 4).compose_power(4)
    f8 = eisenstein_f(order / 8).compose_power(8)
    f16 = eisenstein_f(order / 16).compose_power(16)
    w = (f4 - f8.scale(2) + f16.scale(4)).scale(Fraction(1, 3)).reduced()
    return (x.with_denominator(1), y.with_denominator(1), z.with_denominator(1), w.with_denominator(1))


def xyzw_from_psi(order) -> tuple[Series, Series, Series]:
    """x, y, w through square roots of psi_k(q^4) combinations (positive branch)."""
    order = _order(order)
    p2, p3, p4 = (psi_series(k, order / 4).compose_power(4) for k in (2, 3, 4))
    r24 = (p2 - p4).scale(2).sqrt(1)
    r23 = (p2 - p3).scale(2).sqrt(1)
    x = (r24 + r23).scale(Fraction(1, 2))
    y = (r24 - r23).scale(Fraction(1, 2))
    cross = ((p2 - p3) * (p2 - p4)).sqrt(Fraction(1, 2))
    w = p2 + (p3 + p4).scale(Fraction(1, 2)) + cross
    return x.reduced().with_denominator(1), y.reduced().with_denominator(1), w.reduced().with_denominator(1)


@dataclass(frozen=True)
class QSeriesTable:
    order: Fraction
    entries: dict[str, Series]

    def __getitem__(self, name: str) -> Series:
        return self.entries[name]


def qseries_table(order) -> QSeriesTable:
    order = _order(order)
    x, y, z, w = gw442_xyzw(order)
    entries = {
        "theta2": theta_series(2, order),
        "theta3": theta_series(3, order),
        "theta4": theta_series(4, order),
        "psi2": psi_series(2, order),
        "psi3": psi_series(3, order),
        "psi4": psi_series(4, order),
        "f": eisenstein_f(order),
        "x": x,
        "y": y,
        "z": z,
        "w": w,
    }
    return QSeriesTable(order, entries)


@dataclass(frozen=True)
class IdentityResult:
    name: str
    residual: Series

    @property
    def passed(self) -> bool:
        return self.residual.is_zero()

    @property
    def checked_below(self):
        return self.residual.prec

    def to_json(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "checked_below": str(self.residual.prec)}
        if not self.passed:
            e, v = next(self.residual.items())
            out["first_nonzero"] = {"exp": str(e), "val": v.to_json()}
        return out


@dataclass
class IdentityReport:
    order: Fraction
    results: list[IdentityResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def add(self, name: str, residual: Series) -> None:
        self.results.append(IdentityResult(name, residual))

    def to_json(self) -> dict:
        return {"order": str(self.order), "passed": self.passed, "identities": [r.to_json() for r in self.results]}


def _qd(s: Series) -> Series:
    return s.log_derivative_operator()


def check_theta_psi_identities(order) -> IdentityReport:
    """Theta/psi quartic relations, theta and psi double-argument formulas, and the log-derivative bridge."""
    order = _order(order)
    rep = IdentityReport(order)
    th = {k: theta_series(k, order) for k in (2, 3, 4)}
    ps = {k: psi_series(k, order) for k in (2, 3, 4)}
    sq = {k: th[k] * th[k] for k in (2, 3, 4)}

    rep.add("theta2^4 = 2(psi3 - psi4)", sq[2] * sq[2] - (ps[3] - ps[4]).scale(2))
    rep.add("theta3^4 = 2(psi2 - psi4)", sq[3] * sq[3] - (ps[2] - ps[4]).scale(2))
    rep.add("theta4^4 = 2(psi2 - psi3)", sq[4] * sq[4] - (ps[2] - ps[3]).scale(2))

    half = Fraction(1, 2)
    th_dbl = {k: theta_series(k, order / 2).compose_power(2) for k in (2, 3, 4)}
    rep.add("theta2(q^2)^2 = (theta3^2 - theta4^2)/2", th_dbl[2] * th_dbl[2] - (sq[3] - sq[4]).scale(half))
    rep.add("theta3(q^2)^2 = (theta3^2 + theta4^2)/2", th_dbl[3] * th_dbl[3] - (sq[3] + sq[4]).scale(half))
    rep.add("theta4(q^2)^2 = theta3 theta4", th_dbl[4] * th_dbl[4] - th[3] * th[4])

    # psi_k(q) stands for X_k(tau); the doubled argument is psi_k(q^2)
    ps_dbl = {k: psi_series(k, order / 2).compose_power(2) for k in (2, 3, 4)}
    rep.add(
        "2 X2(q^2) (theta3^2 - theta4^2) = X3 theta3^2 - X4 theta4^2",
        ps_dbl[2].scale(2) * (sq[3] - sq[4]) - (ps[3] * sq[3] - ps[4] * sq[4]),
    )
    rep.add(
        "2 X3(q^2) (theta3^2 + theta4^2) = X3 theta3^2 + X4 theta4^2",
        ps_dbl[3].scale(2) * (sq[3] + sq[4]) - (ps[3] * sq[3] + ps[4] * sq[4]),
    )
    rep.add("2 X4(q^2) = (X3 + X4)/2", ps_dbl[4].scale(2) - (ps[3] + ps[4]).scale(half))

    for k in (2, 3, 4):
        rep.add(f"4 q dtheta{k}/dq = psi{k} theta{k}", _qd(th[k]).scale(4) - ps[k] * th[k])
    return rep


def check_q_identities(order=40) -> IdentityReport:
    """Full identity suite: theta/psi relations plus the x, y, z, w identities."""
    order = _order(order)
    if order < 4:
        raise ValueError("the identity suite needs order >= 4")
    rep = check_theta_psi_identities(order)
    x, y, z, w = gw442_xyzw(order)
    xp, yp, wp = xyzw_from_psi(order)
    rep.add("x = (sqrt(2psi2-2psi4) + sqrt(2psi2-2psi3))/2 at q^4", x - xp)
    rep.add("y = (sqrt(2psi2-2psi4) - sqrt(2psi2-2psi3))/2 at q^4", y - yp)
    rep.add("w = psi2 + psi3/2 + psi4/2 + sqrt((psi2-psi3)(psi2-psi4)) at q^4", w - wp)
    rep.add("z^2 = 4xy", z * z - (x * y).scale(4))
    return rep


def check_xyzw_odes(order=40) -> IdentityReport:
    """q d/dq of x, y, w expressed polynomially in x, y, w (WDVV for the (4,4,2) orbifold)."""
    order = _order(order)
    rep = IdentityReport(order)
    x, y, _, w = gw442_xyzw(order)
    x2 = x * x
    rep.add("q dx/dq = 2xy^2 - x(x^2 - w)", _qd(x) - ((x * y * y).scale(2) - x * (x2 - w)))
    rep.add("q dy/dq = 2x^2 y - y(x^2 - w)", _qd(y) - ((x2 * y).scale(2) - y * (x2 - w)))
    rep.add("q dw/dq = w^2 - x^4", _qd(w) - (w * w - x2 * x2))
    return rep
