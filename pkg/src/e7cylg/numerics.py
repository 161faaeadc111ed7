"""High-precision evaluation of theta constants, the Halphen solutions
X_k^inf = 2 d/dtau log theta_k, their SL(2,C) transport, and the
transcendental constants omega0, Theta and sigma'.

Every public evaluator takes ``digits`` and works internally with guard
digits; values carry a conservative absolute error bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import mpmath
from mpmath import mp, mpc, mpf

from .algebra import I, FieldElem
from .report import CheckReport

__all__ = [
    "PreciseComplex",
    "NotInUpperHalfPlane",
    "ImageNotInH",
    "DEFAULT_DIGITS",
    "theta_eval",
    "x_inf_eval",
    "sl2_transport",
    "a_tau_omega",
    "gamma34",
    "omega0",
    "big_theta",
    "sigma_prime",
    "a_group",
    "constants_check",
    "g3_transport_check",
    "transport_compare",
    "G3_POINT",
    "G3_PRINTED_POINT",
    "double_argument_check_numeric",
    "tolerance",
    "field_to_mpc",
    "a_tau0_symbolic",
    "symbolic_det",
]

DEFAULT_DIGITS = 40
GUARD = 15


class NotInUpperHalfPlane(ValueError):
    pass


class ImageNotInH(ValueError):
    pass


def tolerance(digits: int) -> mpf:
    """Equality threshold: five guard digits below the working precision."""
    with mp.workdps(digits + GUARD):
        return mpf(10) ** (5 - digits)


@dataclass(frozen=True)
class PreciseComplex:
    """A complex value with an absolute error bound, computed at ``digits`` digits."""

    value: mpc
    err: mpf
    digits: int = DEFAULT_DIGITS

    @classmethod
    def exact(cls, z, digits: int = DEFAULT_DIGITS) -> PreciseComplex:
        with mp.workdps(digits + GUARD):
            return cls(mpc(z), mpf(0), digits)

    def _wrap(self, other) -> PreciseComplex:
        if isinstance(other, PreciseComplex):
            return other
        return PreciseComplex.exact(other, self.digits)

    def _round(self, value: mpc, err: mpf, digits: int) -> PreciseComplex:
        ulp = abs(value) * mpf(10) ** (-(digits + GUARD - 2))
        return PreciseComplex(value, err + ulp, digits)

    def __add__(self, other) -> PreciseComplex:
        o = self._wrap(other)
        d = min(self.digits, o.digits)
        with mp.workdps(d + GUARD):
            return self._round(self.value + o.value, self.err + o.err, d)

    __radd__ = __add__

    def __neg__(self) -> PreciseComplex:
        with mp.workdps(self.digits + GUARD):
            return PreciseComplex(-self.value, self.err, self.digits)

    def __sub__(self, other) -> PreciseComplex:
        return self + (-self._wrap(other))

    def __rsub__(self, other) -> PreciseComplex:
        return self._wrap(other) - self

    def __mul__(self, other) -> PreciseComplex:
        o = self._wrap(other)
        d = min(self.digits, o.digits)
        with mp.workdps(d + GUARD):
            err = abs(self.value) * o.err + abs(o.value) * self.err + self.err * o.err
            return self._round(self.value * o.value, err, d)

    __rmul__ = __mul__

    def reciprocal(self) -> PreciseComplex:
        with mp.workdps(self.digits + GUARD):
            lower = abs(self.value) - self.err
            if lower <= 0:
                raise ZeroDivisionError("value not bounded away from zero")
            return self._round(1 / self.value, self.err / (abs(self.value) * lower), self.digits)

    def __truediv__(self, other) -> PreciseComplex:
        return self * self._wrap(other).reciprocal()

    def __rtruediv__(self, other) -> PreciseComplex:
        return self._wrap(other) * self.reciprocal()

    def __pow__(self, n: int) -> PreciseComplex:
        if n < 0:
            return self.reciprocal() ** (-n)
        out = PreciseComplex.exact(1, self.digits)
        for _ in range(n):
            out = out * self
        return out

    def sqrt(self) -> PreciseComplex:
        """Principal square root; error from |d sqrt| <= err / (2 sqrt(|z| - err))."""
        with mp.workdps(self.digits + GUARD):
            lower = abs(self.value) - self.err
            if lower <= 0:
                raise ValueError("square root too close to the branch point")
            return self._round(mpmath.sqrt(self.value), self.err / (2 * mpmath.sqrt(lower)), self.digits)

    @property
    def real(self) -> mpf:
        return self.value.real

    @property
    def imag(self) -> mpf:
        return self.value.imag

    def close_to(self, other, digits: int | None = None) -> bool:
        o = self._wrap(other)
        d = digits or min(self.digits, o.digits)
        with mp.workdps(d + GUARD):
            return abs(self.value - o.value) < tolerance(d) + self.err + o.err

    def distance(self, other) -> mpf:
        o = self._wrap(other)
        with mp.workdps(min(self.digits, o.digits) + GUARD):
            return abs(self.value - o.value)

    def __str__(self) -> str:
        with mp.workdps(self.digits):
            return mpmath.nstr(self.value, self.digits)

    def to_json(self) -> dict:
        with mp.workdps(self.digits):
            return {
                "re": mpmath.nstr(self.value.real, self.digits),
                "im": mpmath.nstr(self.value.imag, self.digits),
                "err": mpmath.nstr(self.err, 3),
            }


def _as_pc(z, digits: int) -> PreciseComplex:
    return z if isinstance(z, PreciseComplex) else PreciseComplex.exact(z, digits)


# ---- theta constants -----------------------------------------------------------------


def _theta_terms(k: int, tau: mpc, target: mpf):
    """Exponents e (theta_k = sum c * exp(pi i e tau)) with coefficients, plus a tail bound.

    Returns (terms, tail, tail_derivative) where the tails bound the omitted
    parts of theta_k and of d/dtau theta_k.
    """
    if tau.imag <= 0:
        raise NotInUpperHalfPlane(tau)
    r = mpmath.exp(-mp.pi * tau.imag)
    if k == 2:
        exps = lambda n: (mpf(2 * n + 1) / 2) ** 2
        coeff = lambda n: 2
    elif k == 3:
        exps = lambda n: mpf(n * n)
        coeff = lambda n: 1 if n == 0 else 2
    elif k == 4:
        exps = lambda n: mpf(n * n)
        coeff = lambda n: 1 if n == 0 else 2 * (-1) ** n
    else:
        raise ValueError("theta index must be 2, 3 or 4")
    terms = []
    n = 0
    while True:
        e = exps(n)
        terms.append((coeff(n), e))
        n += 1
        nxt = exps(n)
        # consecutive exponents grow by at least 1, and |c| <= 2
        tail = 2 * r ** nxt / (1 - r)
        dtail = 2 * mp.pi * (nxt + 1) * r ** nxt / (1 - r) ** 2
        if tail < target and dtail < target:
            return terms, tail, dtail


def _theta_pair(k: int, tau, digits: int) -> tuple[PreciseComplex, PreciseComplex]:
    with mp.workdps(digits + GUARD):
        tau_err = tau.err if isinstance(tau, PreciseComplex) else mpf(0)
        tau = mpc(tau.value if isinstance(tau, PreciseComplex) else tau)
        target = mpf(10) ** (-(digits + GUARD // 2))
        terms, tail, dtail = _theta_terms(k, tau, target)
        val = mpc(0)
        der = mpc(0)
        ipi = mpc(0, 1) * mp.pi
        for c, e in terms:
            t = c * mpmath.exp(ipi * e * tau)
            val += t
            der += ipi * e * t
        # first-order effect of the uncertainty in tau, doubled for safety
        spread = 2 * tau_err * (abs(der) + 1) * (1 + mp.pi * terms[-1][1]) ** 2
        return PreciseComplex(val, tail + spread, digits), PreciseComplex(der, dtail + spread, digits)


def theta_eval(k: int, tau, digits: int = DEFAULT_DIGITS) -> PreciseComplex:
    """theta_k(tau) with nome exp(pi i tau) summed until the tail drops below 10^-(digits+7)."""
    return _theta_pair(k, tau, digits)[0]


def x_inf_eval(k: int, tau, digits: int = DEFAULT_DIGITS) -> PreciseComplex:
    """X_k^inf(tau) = 2 theta_k'(tau) / theta_k(tau)."""
    val, der = _theta_pair(k, tau, digits)
    return 2 * der / val


# ---- SL(2,C) transport -----------------------------------------------------------------

Matrix = Sequence[Sequence]


def _entries(A: Matrix, digits: int) -> tuple[PreciseComplex, ...]:
    (a, b), (c, d) = A
    return tuple(_as_pc(v, digits) for v in (a, b, c, d))


def sl2_transport(A: Matrix, tau=0, digits: int = DEFAULT_DIGITS,
                  x_inf: Callable = x_inf_eval) -> tuple[PreciseComplex, PreciseComplex, PreciseComplex]:
    """(X_2^A, X_3^A, X_4^A)(tau) with X^A = (c tau + d)^-2 X^inf(A.tau) - c / (c tau + d).

    The sign of the shift is the one under which X^A again solves the
    Halphen system with the plain tau-derivative.
    """
    a, b, c, d = _entries(A, digits)
    tau = _as_pc(tau, digits)
    den = c * tau + d
    image = (a * tau + b) / den
    if image.imag <= image.err:
        raise ImageNotInH(str(image))
    shift = -c / den
    inv2 = den.reciprocal() ** 2
    return tuple(inv2 * x_inf(k, image, digits) + shift for k in (2, 3, 4))


def gamma34(digits: int = DEFAULT_DIGITS) -> PreciseComplex:
    """Gamma(3/4) = pi sqrt 2 / Gamma(1/4), Gamma(1/4)^2 = (2 pi)^(3/2) / AGM(sqrt 2, 1)."""
    with mp.workdps(digits + GUARD):
        g14 = mpmath.sqrt((2 * mp.pi) ** mpf(1.5) / mpmath.agm(mpmath.sqrt(2), 1))
        val = mp.pi * mpmath.sqrt(2) / g14
        return PreciseComplex(mpc(val), abs(val) * mpf(10) ** (-(digits + GUARD - 3)), digits)


def _lambda4_sq(digits: int) -> PreciseComplex:
    with mp.workdps(digits + GUARD):
        return PreciseComplex.exact(mpc(0, 1) * mp.pi / 2, digits)


def _pi(digits: int) -> PreciseComplex:
    with mp.workdps(digits + GUARD):
        return PreciseComplex.exact(mp.pi, digits)


def omega0(digits: int = DEFAULT_DIGITS) -> PreciseComplex:
    """omega0 = lambda4 sqrt(2 pi) / Gamma(3/4)^2 with lambda4 = sqrt(pi i / 2)."""
    return _lambda4_sq(digits).sqrt() * (2 * _pi(digits)).sqrt() / gamma34(digits) ** 2


def big_theta(digits: int = DEFAULT_DIGITS) -> PreciseComplex:
    return (2 * _pi(digits)).sqrt() / gamma34(digits) ** 2


def sigma_prime(digits: int = DEFAULT_DIGITS) -> PreciseComplex:
    """-Gamma(3/4)^4 / (2 pi^2)."""
    return -(gamma34(digits) ** 4) / (2 * _pi(digits) ** 2)


def a_tau_omega(tau0, omega, digits: int = DEFAULT_DIGITS) -> tuple[tuple[PreciseComplex, ...], ...]:
    """[[i conj(tau0) / (2 omega Im tau0), omega tau0], [i / (2 omega Im tau0), omega]]."""
    tau0 = _as_pc(tau0, digits)
    omega = _as_pc(omega, digits)
    i = PreciseComplex.exact(1j, digits)
    with mp.workdps(digits + GUARD):
        conj = PreciseComplex(mpmath.conj(tau0.value), tau0.err, digits)
        im = PreciseComplex(mpc(tau0.value.imag), tau0.err, digits)
    den = 2 * omega * im
    return ((i * conj / den, omega * tau0), (i / den, omega))


def a_group(k: int, digits: int = DEFAULT_DIGITS) -> tuple[tuple[PreciseComplex, ...], ...]:
    """The matrices A^{G_1} = A^{G_2} and A^{G_3} relating the FJRW and orbifold potentials."""
    th = big_theta(digits)
    pi = _pi(digits)
    i = PreciseComplex.exact(1j, digits)
    if k in (1, 2):
        return ((1 / th, -pi * th), (1 / (2 * pi * th), th / 2))
    if k == 3:
        return (((2 * i + 1) / (2 * th), pi * th * (i - PreciseComplex.exact(0.5, digits))),
                (1 / (pi * th), th))
    raise ValueError(f"no matrix recorded for G_{k}")


def _det(A) -> PreciseComplex:
    (a, b), (c, d) = A
    return a * d - b * c


def _row(name: str, got: PreciseComplex, expected, digits: int) -> tuple[dict, bool]:
    ok = got.close_to(expected, digits)
    e = _as_pc(expected, digits)
    with mp.workdps(digits + GUARD):
        return {"name": name, "value": got.to_json(), "target": e.to_json(),
                "residual": mpmath.nstr(got.distance(e), 3), "bound": mpmath.nstr(tolerance(digits) + got.err, 3),
                "passed": ok}, ok


def a_tau0_symbolic():
    """A^(i, omega0) as (coefficient, power of omega0) pairs with exact coefficients."""
    half = FieldElem(1) / 2
    return (((half, -1), (I, 1)), ((I * half, -1), (FieldElem(1), 1)))


def symbolic_det(A) -> tuple:
    """Determinant of a matrix of (coefficient, omega-power) monomials, as {power: coefficient}."""
    (a, b), (c, d) = A
    out: dict[int, object] = {}
    for x, y, sign in ((a, d, 1), (b, c, -1)):
        p = x[1] + y[1]
        out[p] = out.get(p, 0) + sign * (x[0] * y[0])
    return {p: v for p, v in out.items() if v}


def constants_check(digits: int = DEFAULT_DIGITS) -> CheckReport:
    """sigma' identity, Gamma(3/4) against mpmath's gamma, det A = 1 and the transport of A^(i, omega0)."""
    rep = CheckReport("constants", True, {"digits": digits, "constants": []})
    rows = rep.details["constants"]
    w0 = omega0(digits)
    with mp.workdps(digits + GUARD):
        gamma_oracle = mpmath.gamma(mpf(3) / 4)
    checks = [
        ("sigma' = -i / (2 omega0^2)", PreciseComplex.exact(-1j, digits) / (2 * w0 ** 2), sigma_prime(digits)),
        ("Gamma(3/4)", gamma34(digits), gamma_oracle),
        ("omega0^2 = pi^2 i / Gamma(3/4)^4", w0 ** 2,
         PreciseComplex.exact(1j, digits) * _pi(digits) ** 2 / gamma34(digits) ** 4),
    ]
    for k in (1, 2, 3):
        checks.append((f"det A^G{k}", _det(a_group(k, digits)), 1))
    A0 = a_tau_omega(1j, w0, digits)
    checks.append(("det A^(i, omega0)", _det(A0), 1))
    for name, value in zip(("X2", "X3", "X4"), sl2_transport(A0, 0, digits)):
        target = {"X2": 0.25, "X3": 0, "X4": -0.25}[name]
        checks.append((f"{name}^(i, omega0)(0)", value, mpf(target)))
    for name, got, expected in checks:
        row, ok = _row(name, got, expected, digits)
        rows.append(row)
        if not ok:
            rep.failures.append({"slot": name, "expected": row["target"], "got": row["value"]})
    det = symbolic_det(a_tau0_symbolic())
    exact_ok = set(det) == {0} and det[0] == 1
    rows.append({"name": "det A^(i, omega0) in symbols", "value": {str(p): v.to_json() for p, v in det.items()},
                 "target": "1", "passed": exact_ok})
    if not exact_ok:
        rep.failures.append({"slot": "det A^(i, omega0) in symbols", "expected": "1", "got": str(det)})
    rep.passed = not rep.failures
    return rep


# X^(tau0 + 1, omega0) swaps X3 and X4; halving tau then gives the G3 triple
G3_POINT = (mpc(0.5, 0.5), "(1 + i)/2")
# tau0 -> tau0/2 followed by the swap on the transported triple (lands on the aux branch)
G3_PRINTED_POINT = (mpc(1, 0.5), "1 + i/2")


def transport_compare(values: Sequence, tau, omega, order: Sequence[int] = (2, 3, 4),
                      digits: int = DEFAULT_DIGITS, name: str = "transport") -> CheckReport:
    """Exact initial values against (X_order[0], X_order[1], X_order[2])^(tau, omega)(0)."""
    X = dict(zip((2, 3, 4), sl2_transport(a_tau_omega(tau, omega, digits), 0, digits)))
    rep = CheckReport(name, True, {"digits": digits, "order": list(order), "comparison": []})
    for slot, k, exact in zip(("X2", "X3", "X4"), order, values):
        row, ok = _row(slot, X[k], field_to_mpc(exact, digits), digits)
        rep.details["comparison"].append(row)
        if not ok:
            rep.failures.append({"slot": slot, "expected": row["target"], "got": row["value"]})
    rep.passed = not rep.failures
    return rep


def g3_transport_check(values: Sequence, digits: int = DEFAULT_DIGITS, printed: bool = False) -> CheckReport:
    """Initial values of the G3 triple against the A^(tau3, sqrt2 omega0) transport.

    By default tau3 = (1 + i)/2.  With ``printed`` the point 1 + i/2 is used
    and X3, X4 of the transport are exchanged.
    """
    (tau, label), order = (G3_PRINTED_POINT, (2, 4, 3)) if printed else (G3_POINT, (2, 3, 4))
    omega = PreciseComplex.exact(2, digits).sqrt() * omega0(digits)
    rep = transport_compare(values, PreciseComplex.exact(tau, digits), omega, order, digits, "g3_transport")
    rep.details.update({"tau": label, "omega": "sqrt(2) omega0"})
    return rep


def field_to_mpc(x, digits: int):
    """Numeric value of an element of Q(i, sqrt 2) (anything else passes through)."""
    if not hasattr(x, "components"):
        return x
    with mp.workdps(digits + GUARD):
        a, b, c, d = (mpf(int(v.numerator)) / int(v.denominator) for v in x.components())
        r2 = mpmath.sqrt(2)
        return mpc(a + c * r2, b + d * r2)


def double_argument_check_numeric(A: Matrix, tau_samples: Sequence, digits: int = DEFAULT_DIGITS) -> CheckReport:
    """(2 X_k(2 tau))^A against the theta-weighted combinations of X_3^A, X_4^A at each sample."""
    a, b, c, d = _entries(A, digits)
    rep = CheckReport("double_argument", True, {"digits": digits, "samples": []})
    for tau in tau_samples:
        tau = _as_pc(tau, digits)
        den = c * tau + d
        image = (a * tau + b) / den
        if image.imag <= image.err:
            raise ImageNotInH(str(image))
        shift = -c / den
        inv2 = den.reciprocal() ** 2
        lhs = [inv2 * (2 * x_inf_eval(k, 2 * image, digits)) + shift for k in (2, 3, 4)]
        X = {k: inv2 * x_inf_eval(k, image, digits) + shift for k in (3, 4)}
        T = {k: theta_eval(k, image, digits) ** 2 / den for k in (3, 4)}
        rhs = [
            (X[3] * T[3] - X[4] * T[4]) / (T[3] - T[4]),
            (X[3] * T[3] + X[4] * T[4]) / (T[3] + T[4]),
            (X[3] + X[4]) / 2,
        ]
        for k, l, r in zip((2, 3, 4), lhs, rhs):
            row, ok = _row(f"X{k} at {tau}", l, r, digits)
            rep.details["samples"].append(row)
            if not ok:
                rep.failures.append({"slot": row["name"], "expected": row["target"], "got": row["value"]})
    rep.passed = not rep.failures
    return rep
