"""Exact arithmetic in Q(i, sqrt2) and truncated power series over it.

``FieldElem`` stores a + b*i + c*r + d*i*r with r = sqrt(2) as four gmpy2
rationals.  ``Series`` is a sparse truncated series on the exponent lattice
(1/D)Z; every coefficient with exponent below ``prec`` is exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

from gmpy2 import mpq, is_square, isqrt

__all__ = [
    "AlgebraError",
    "DivisionByZero",
    "NoRootInField",
    "BadSeed",
    "FieldElem",
    "Series",
    "ZERO",
    "ONE",
    "I",
    "SQRT2",
    "INF",
    "as_field",
    "parse_rational",
    "format_rational",
    "SingularMatrix",
    "mat_det",
    "mat_inverse",
    "mat_mul",
    "solve_linear",
]

INF = math.inf

Scalar = Union[int, Fraction, "FieldElem"]


class AlgebraError(ArithmeticError):
    pass


class DivisionByZero(AlgebraError, ZeroDivisionError):
    pass


class NoRootInField(AlgebraError):
    pass


class SingularMatrix(AlgebraError):
    """A square matrix over the field has determinant zero."""


class BadSeed(AlgebraError):
    pass


_Q0 = mpq(0)
_Q1 = mpq(1)


def _q(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return parse_rational(x)
    return mpq(x)


def parse_rational(s: str) -> mpq:
    s = s.strip()
    if "/" in s:
        num, den = s.split("/")
        return mpq(int(num), int(den))
    return mpq(int(s))


def format_rational(x) -> str:
    x = mpq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _rational_sqrt(x: mpq) -> mpq | None:
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    if is_square(n) and is_square(d):
        return mpq(isqrt(n), isqrt(d))
    return None


def _sign_a_plus_c_r2(a: mpq, c: mpq) -> int:
    """Exact sign of a + c*sqrt(2)."""
    if a >= 0 and c >= 0:
        return 0 if (a == 0 and c == 0) else 1
    if a <= 0 and c <= 0:
        return -1
    # opposite signs: compare a^2 with 2c^2
    lhs, rhs = a * a, 2 * c * c
    if lhs == rhs:
        return 0
    if a > 0:
        return 1 if lhs > rhs else -1
    return -1 if lhs > rhs else 1


class FieldElem:
    """Element a + b*i + c*sqrt2 + d*i*sqrt2 of Q(i, sqrt2)."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a=0, b=0, c=0, d=0) -> None:
        self.a = _q(a)
        self.b = _q(b)
        self.c = _q(c)
        self.d = _q(d)

    @classmethod
    def _raw(cls, a: mpq, b: mpq, c: mpq, d: mpq) -> FieldElem:
        obj = object.__new__(cls)
        obj.a = a
        obj.b = b
        obj.c = c
        obj.d = d
        return obj

    # ---- predicates -------------------------------------------------
    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c or self.d)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational(self) -> bool:
        return not (self.b or self.c or self.d)

    def components(self) -> tuple[mpq, mpq, mpq, mpq]:
        return (self.a, self.b, self.c, self.d)

    # ---- ring operations -------------------------------------------
    def __add__(self, other) -> FieldElem:
        if not isinstance(other, FieldElem):
            other = as_field(other)
        return FieldElem._raw(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    __radd__ = __add__

    def __neg__(self) -> FieldElem:
        return FieldElem._raw(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other) -> FieldElem:
        if not isinstance(other, FieldElem):
            other = as_field(other)
        return FieldElem._raw(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __rsub__(self, other) -> FieldElem:
        return as_field(other) - self

    def __mul__(self, other) -> FieldElem:
        if not isinstance(other, FieldElem):
            if isinstance(other, (int, Fraction, type(_Q0))):
                k = _q(other)
                return FieldElem._raw(self.a * k, self.b * k, self.c * k, self.d * k)
            return NotImplemented
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        if not (f or g or h):
            return FieldElem._raw(a * e, b * e, c * e, d * e)
        if not (b or c or d):
            return FieldElem._raw(a * e, a * f, a * g, a * h)
        return FieldElem._raw(
            a * e - b * f + 2 * (c * g - d * h),
            a * f + b * e + 2 * (c * h + d * g),
            a * g - b * h + c * e - d * f,
            a * h + b * g + c * f + d * e,
        )

    __rmul__ = __mul__

    def conj_r(self) -> FieldElem:
        """Galois conjugate sqrt2 -> -sqrt2."""
        return FieldElem._raw(self.a, self.b, -self.c, -self.d)

    def conj_i(self) -> FieldElem:
        """Galois conjugate i -> -i."""
        return FieldElem._raw(self.a, -self.b, self.c, -self.d)

    def inv(self) -> FieldElem:
        if self.is_zero():
            raise DivisionByZero("inverse of zero in Q(i, sqrt2)")
        if self.is_rational():
            return FieldElem._raw(1 / self.a, _Q0, _Q0, _Q0)
        # x * conj_r(x) lies in Q(i); then invert p + q i
        n = self * self.conj_r()
        p, q = n.a, n.b
        den = p * p + q * q
        ninv = FieldElem._raw(p / den, -q / den, _Q0, _Q0)
        return self.conj_r() * ninv

    def __truediv__(self, other) -> FieldElem:
        if not isinstance(other, FieldElem):
            other = as_field(other)
        return self * other.inv()

    def __rtruediv__(self, other) -> FieldElem:
        return as_field(other) * self.inv()

    def __pow__(self, n: int) -> FieldElem:
        if n < 0:
            return self.inv() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldElem):
            try:
                other = as_field(other)
            except TypeError:
                return NotImplemented
        return self.a == other.a and self.b == other.b and self.c == other.c and self.d == other.d

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.c, self.d))

    # ---- square roots -----------------------------------------------
    def sqrt(self) -> FieldElem:
        """Canonical square root: positive real part, ties broken by positive imaginary part."""
        for root in self._sqrt_candidates():
            if root * root == self:
                return root.canonical_sign()
        raise NoRootInField(f"{self} has no square root in Q(i, sqrt2)")

    def _sqrt_candidates(self) -> Iterator[FieldElem]:
        if self.is_zero():
            yield ZERO
            return
        u = (self.a, self.b)  # Q(i) part
        v = (self.c, self.d)  # coefficient of sqrt2
        if not (v[0] or v[1]):
            for p in _qi_sqrt(u):
                yield FieldElem._raw(p[0], p[1], _Q0, _Q0)
            half = (u[0] / 2, u[1] / 2)
            for q in _qi_sqrt(half):
                yield FieldElem._raw(_Q0, _Q0, q[0], q[1])
            return
        # y = p + q r, p^2 + 2 q^2 = u, 2 p q = v  =>  p^4 - u p^2 + v^2/2 = 0
        u2 = _qi_mul(u, u)
        v2 = _qi_mul(v, v)
        disc = (u2[0] - 2 * v2[0], u2[1] - 2 * v2[1])
        for s in _qi_sqrt(disc):
            p2 = ((u[0] + s[0]) / 2, (u[1] + s[1]) / 2)
            for p in _qi_sqrt(p2):
                if not (p[0] or p[1]):
                    continue
                pinv = _qi_inv(p)
                q = _qi_mul(v, pinv)
                q = (q[0] / 2, q[1] / 2)
                yield FieldElem._raw(p[0], p[1], q[0], q[1])

    def real_sign(self) -> int:
        return _sign_a_plus_c_r2(self.a, self.c)

    def imag_sign(self) -> int:
        return _sign_a_plus_c_r2(self.b, self.d)

    def canonical_sign(self) -> FieldElem:
        rs = self.real_sign()
        if rs < 0 or (rs == 0 and self.imag_sign() < 0):
            return -self
        return self

    def to_complex(self) -> complex:
        r2 = math.sqrt(2.0)
        return complex(float(self.a) + float(self.c) * r2, float(self.b) + float(self.d) * r2)

    # ---- formatting / serialisation --------------------------------
    def to_json(self) -> list[str]:
        return [format_rational(x) for x in (self.a, self.b, self.c, self.d)]

    @classmethod
    def from_json(cls, data: Iterable[str]) -> FieldElem:
        a, b, c, d = (parse_rational(str(x)) for x in data)
        return cls._raw(a, b, c, d)

    def __repr__(self) -> str:
        return f"FieldElem({format_rational(self.a)!r}, {format_rational(self.b)!r}, {format_rational(self.c)!r}, {format_rational(self.d)!r})"

    def __str__(self) -> str:
        parts = []
        for coef, unit in ((self.a, ""), (self.b, "i"), (self.c, "√2"), (self.d, "i√2")):
            if not coef:
                continue
            s = format_rational(coef)
            if unit:
                if s == "1":
                    s = unit
                elif s == "-1":
                    s = "-" + unit
                else:
                    s = f"({s}){unit}" if "/" in s else f"{s}{unit}"
            parts.append(s)
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out


def _qi_mul(x: tuple[mpq, mpq], y: tuple[mpq, mpq]) -> tuple[mpq, mpq]:
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _qi_inv(x: tuple[mpq, mpq]) -> tuple[mpq, mpq]:
    den = x[0] * x[0] + x[1] * x[1]
    return (x[0] / den, -x[1] / den)


def _qi_sqrt(z: tuple[mpq, mpq]) -> list[tuple[mpq, mpq]]:
    """All square roots of z = m + n i inside Q(i) (zero, one pair, or none)."""
    m, n = z
    if not (m or n):
        return [(_Q0, _Q0)]
    out: list[tuple[mpq, mpq]] = []
    if not n:
        r = _rational_sqrt(m)
        if r is not None:
            out += [(r, _Q0), (-r, _Q0)]
        r = _rational_sqrt(-m)
        if r is not None:
            out += [(_Q0, r), (_Q0, -r)]
        return out
    mod = _rational_sqrt(m * m + n * n)
    if mod is None:
        return out
    s = _rational_sqrt((m + mod) / 2)
    if s is None or not s:
        return out
    t = n / (2 * s)
    return [(s, t), (-s, -t)]


ZERO = FieldElem._raw(_Q0, _Q0, _Q0, _Q0)
ONE = FieldElem._raw(_Q1, _Q0, _Q0, _Q0)
I = FieldElem._raw(_Q0, _Q1, _Q0, _Q0)
SQRT2 = FieldElem._raw(_Q0, _Q0, _Q1, _Q0)


def as_field(x) -> FieldElem:
    if isinstance(x, FieldElem):
        return x
    if isinstance(x, (int, Fraction, str)) or type(x) is type(_Q0):
        return FieldElem._raw(_q(x), _Q0, _Q0, _Q0)
    raise TypeError(f"cannot interpret {x!r} as an element of Q(i, sqrt2)")


# ---------------------------------------------------------------------------
# Truncated series on the lattice (1/D)Z
# ---------------------------------------------------------------------------


def _to_prec(p) -> Fraction | float:
    if p is None or p == INF:
        return INF
    if isinstance(p, Fraction):
        return p
    if isinstance(p, str):
        if p == "inf":
            return INF
        q = parse_rational(p)
        return Fraction(int(q.numerator), int(q.denominator))
    if type(p) is type(_Q0):
        return Fraction(int(p.numerator), int(p.denominator))
    return Fraction(p)


def _cutoff(prec, den: int) -> int | None:
    """Smallest lattice numerator n with n/den >= prec (None for infinite precision)."""
    if prec == INF:
        return None
    return math.ceil(prec * den)


class Series:
    """Sparse truncated power series  sum c_n * v^(n/D) + O(v^prec).

    Immutable.  ``coeffs`` maps lattice numerators n (exponent n/D) to nonzero
    FieldElem values.  ``prec`` may be ``INF`` for exact (polynomial) data.
    """

    __slots__ = ("den", "prec", "coeffs")

    def __init__(self, coeffs: Mapping[int, Scalar] | None = None, prec=INF, den: int = 1) -> None:
        if den <= 0:
            raise ValueError("lattice denominator must be positive")
        self.den = int(den)
        self.prec = _to_prec(prec)
        cut = _cutoff(self.prec, self.den)
        data: dict[int, FieldElem] = {}
        if coeffs:
            for n, v in coeffs.items():
                if cut is not None and n >= cut:
                    continue
                v = as_field(v)
                if v:
                    data[int(n)] = v
        self.coeffs = data

    @classmethod
    def _raw(cls, coeffs: dict[int, FieldElem], prec, den: int) -> Series:
        obj = object.__new__(cls)
        obj.den = den
        obj.prec = prec
        obj.coeffs = coeffs
        return obj

    # ---- constructors ------------------------------------------------
    @classmethod
    def constant(cls, c: Scalar, prec=INF) -> Series:
        return cls({0: c}, prec=prec)

    @classmethod
    def zero(cls, prec=INF, den: int = 1) -> Series:
        return cls._raw({}, _to_prec(prec), den)

    @classmethod
    def from_list(cls, values: Iterable[Scalar], prec=None, den: int = 1) -> Series:
        vals = list(values)
        if prec is None:
            prec = Fraction(len(vals), den)
        return cls(dict(enumerate(vals)), prec=prec, den=den)

    @classmethod
    def from_exponents(cls, terms: Mapping[Fraction, Scalar], prec=INF, den: int | None = None) -> Series:
        if den is None:
            den = 1
            for e in terms:
                den = math.lcm(den, Fraction(e).denominator)
        out = {}
        for e, v in terms.items():
            n = Fraction(e) * den
            if n.denominator != 1:
                raise ValueError(f"exponent {e} not on lattice 1/{den}")
            out[int(n)] = v
        return cls(out, prec=prec, den=den)

    # ---- inspection --------------------------------------------------
    def __getitem__(self, exponent) -> FieldElem:
        """Coefficient at a (rational) exponent."""
        e = Fraction(exponent)
        if e >= self.prec:
            raise IndexError(f"exponent {e} is beyond the precision {self.prec}")
        n = e * self.den
        if n.denominator != 1:
            return ZERO
        return self.coeffs.get(int(n), ZERO)

    def coefficient(self, exponent) -> FieldElem:
        return self[exponent]

    def items(self) -> Iterator[tuple[Fraction, FieldElem]]:
        for n in sorted(self.coeffs):
            yield Fraction(n, self.den), self.coeffs[n]

    def is_zero(self) -> bool:
        return not self.coeffs

    def valuation(self) -> Fraction | None:
        if not self.coeffs:
            return None
        return Fraction(min(self.coeffs), self.den)

    def leading(self) -> FieldElem:
        if not self.coeffs:
            return ZERO
        return self.coeffs[min(self.coeffs)]

    def is_integral_lattice(self) -> bool:
        return all(n % self.den == 0 for n in self.coeffs)

    def dense(self, n_terms: int | None = None) -> list[FieldElem]:
        """Coefficients of v^0 .. v^(n-1) on an integer lattice."""
        s = self.with_denominator(1) if self.den != 1 else self
        if n_terms is None:
            if s.prec == INF:
                n_terms = (max(s.coeffs) + 1) if s.coeffs else 0
            else:
                n_terms = math.ceil(s.prec)
        return [s.coeffs.get(k, ZERO) for k in range(n_terms)]

    # ---- lattice / precision management ------------------------------
    def with_denominator(self, den: int) -> Series:
        if den == self.den:
            return self
        if den % self.den == 0:
            k = den // self.den
            return Series._raw({n * k: v for n, v in self.coeffs.items()}, self.prec, den)
        for n in self.coeffs:
            if (n * den) % self.den:
                raise ValueError(f"series does not live on lattice 1/{den}")
        return Series._raw({n * den // self.den: v for n, v in self.coeffs.items()}, self.prec, den)

    def reduced(self) -> Series:
        """Same series on the coarsest lattice containing its support."""
        g = self.den
        for n in self.coeffs:
            g = math.gcd(g, n)
            if g == 1:
                return self
        if g <= 1:
            return self
        return Series._raw({n // g: v for n, v in self.coeffs.items()}, self.prec, self.den // g)

    def truncate(self, prec) -> Series:
        prec = _to_prec(prec)
        if prec >= self.prec:
            return self
        cut = _cutoff(prec, self.den)
        return Series._raw({n: v for n, v in self.coeffs.items() if n < cut}, prec, self.den)

    # ---- arithmetic ----------------------------------------------------
    def _align(self, other: Series) -> tuple[Series, Series, int]:
        den = math.lcm(self.den, other.den)
        return self.with_denominator(den), other.with_denominator(den), den

    def __add__(self, other) -> Series:
        if not isinstance(other, Series):
            other = Series.constant(other)
        a, b, den = self._align(other)
        prec = min(a.prec, b.prec)
        cut = _cutoff(prec, den)
        out = {n: v for n, v in a.coeffs.items() if cut is None or n < cut}
        for n, v in b.coeffs.items():
            if cut is not None and n >= cut:
                continue
            w = out.get(n)
            if w is None:
                out[n] = v
            else:
                s = w + v
                if s:
                    out[n] = s
                else:
                    del out[n]
        return Series._raw(out, prec, den)

    __radd__ = __add__

    def __neg__(self) -> Series:
        return Series._raw({n: -v for n, v in self.coeffs.items()}, self.prec, self.den)

    def __sub__(self, other) -> Series:
        if not isinstance(other, Series):
            other = Series.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> Series:
        return (-self) + other

    def scale(self, c: Scalar) -> Series:
        c = as_field(c)
        if not c:
            return Series._raw({}, self.prec, self.den)
        return Series._raw({n: v * c for n, v in self.coeffs.items()}, self.prec, self.den)

    def __mul__(self, other) -> Series:
        if not isinstance(other, Series):
            if isinstance(other, (FieldElem, int, Fraction)) or type(other) is type(_Q0):
                return self.scale(other)
            return NotImplemented
        return self.mul(other)

    __rmul__ = __mul__

    def mul(self, other: Series, prec=None) -> Series:
        """Cauchy product, optionally truncated further at ``prec``."""
        a, b, den = self._align(other)
        # never report beyond either input precision, even where valuations
        # would allow it; a zero series counts as having valuation = precision
        pa, pb = a.prec, b.prec
        va = a.valuation()
        vb = b.valuation()
        va = pa if va is None else va
        vb = pb if vb is None else vb
        p = min(pa, pb, va + pb, vb + pa)
        if prec is not None:
            p = min(p, _to_prec(prec))
        if not a.coeffs or not b.coeffs:
            return Series._raw({}, p, den)
        cut = _cutoff(p, den)
        out: dict[int, FieldElem] = {}
        bitems = sorted(b.coeffs.items())
        for n, x in a.coeffs.items():
            for m, y in bitems:
                k = n + m
                if cut is not None and k >= cut:
                    break
                w = out.get(k)
                out[k] = x * y if w is None else w + x * y
        return Series._raw({k: v for k, v in out.items() if v}, p, den)

    def __pow__(self, n: int) -> Series:
        if n < 0:
            raise ValueError("negative powers are not supported; use inverse()")
        result = Series.constant(ONE)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> Series:
        """Multiplicative inverse; requires a nonzero constant term on an integral valuation 0."""
        if self.valuation() != 0:
            raise AlgebraError("inverse needs an invertible constant term")
        c0inv = self.coeffs[0].inv()
        den = self.den
        if self.prec == INF:
            raise AlgebraError("inverse of an exact series needs a finite precision")
        cut = _cutoff(self.prec, den)
        inv: dict[int, FieldElem] = {0: c0inv}
        support = sorted(n for n in self.coeffs if n > 0)
        for k in range(1, cut):
            acc = ZERO
            for n in support:
                if n > k:
                    break
                prev = inv.get(k - n)
                if prev is not None:
                    acc = acc + self.coeffs[n] * prev
            if acc:
                inv[k] = -(acc * c0inv)
        return Series._raw({k: v for k, v in inv.items() if v}, self.prec, den)

    def __truediv__(self, other) -> Series:
        if isinstance(other, Series):
            return self * other.inverse()
        return self.scale(as_field(other).inv())

    def sqrt(self, seed: Scalar) -> Series:
        """Square root whose leading coefficient is ``seed``."""
        seed = as_field(seed)
        if not self.coeffs:
            if seed:
                raise BadSeed("nonzero seed for the square root of zero")
            return Series._raw({}, self.prec / 2 if self.prec != INF else INF, self.den)
        v0 = min(self.coeffs)
        lead = self.coeffs[v0]
        if seed * seed != lead:
            raise BadSeed(f"seed {seed} does not square to the leading coefficient {lead}")
        den = self.den
        if v0 % 2:
            # move to a finer lattice so the halved valuation is integral
            s = self.with_denominator(2 * den)
            return s.sqrt(seed)
        if self.prec == INF:
            raise AlgebraError("square root of an exact series needs a finite precision")
        shift = v0 // 2
        # normalised u = self / v^(v0) with unit constant; r^2 = u, r0 = seed
        u = {n - v0: c for n, c in self.coeffs.items()}
        cut_u = _cutoff(self.prec, den) - v0
        two_r0_inv = (seed * 2).inv()
        r: dict[int, FieldElem] = {0: seed}
        for k in range(1, cut_u):
            acc = u.get(k, ZERO)
            for j in range(1, k):
                rj = r.get(j)
                if rj is None:
                    continue
                rk = r.get(k - j)
                if rk is not None:
                    acc = acc - rj * rk
            if acc:
                r[k] = acc * two_r0_inv
        prec = self.prec - Fraction(v0, den) + Fraction(shift, den)
        return Series._raw({n + shift: c for n, c in r.items() if c}, prec, den)

    # ---- calculus and substitutions -----------------------------------
    def derivative(self) -> Series:
        """d/dv on an integer lattice; precision drops by one step."""
        if self.den != 1:
            s = self.reduced()
            if s.den != 1:
                raise AlgebraError("plain derivative needs an integer lattice")
            return s.derivative()
        out = {n - 1: v * n for n, v in self.coeffs.items() if n}
        prec = self.prec - 1 if self.prec != INF else INF
        return Series._raw(out, prec, 1)

    def log_derivative_operator(self) -> Series:
        """v d/dv: multiplies the coefficient of v^e by e; precision preserved."""
        out = {}
        for n, v in self.coeffs.items():
            if n:
                out[n] = v * mpq(n, self.den)
        return Series._raw(out, self.prec, self.den)

    def compose_power(self, m: int) -> Series:
        """s(v^m)."""
        if m <= 0:
            raise ValueError("power must be a positive integer")
        prec = self.prec * m if self.prec != INF else INF
        return Series._raw({n * m: v for n, v in self.coeffs.items()}, prec, self.den)

    def scale_var(self, c: Scalar) -> Series:
        """s(c v) for an integer lattice."""
        c = as_field(c)
        s = self.reduced() if self.den != 1 else self
        if s.den != 1:
            raise AlgebraError("scale_var needs an integer lattice")
        out = {}
        for n, v in s.coeffs.items():
            w = v * (c ** n)
            if w:
                out[n] = w
        return Series._raw(out, s.prec, 1)

    def parity(self) -> str | None:
        """'even', 'odd' or None for an integer-lattice series (zero counts as even)."""
        s = self.reduced() if self.den != 1 else self
        if s.den != 1:
            raise AlgebraError("parity needs an integer lattice")
        if not s.coeffs:
            return "even"
        if all(n % 2 == 0 for n in s.coeffs):
            return "even"
        if all(n % 2 == 1 for n in s.coeffs):
            return "odd"
        return None

    def map_coeffs(self, fn) -> Series:
        out = {}
        for n, v in self.coeffs.items():
            w = fn(v)
            if w:
                out[n] = w
        return Series._raw(out, self.prec, self.den)

    def component(self, which: int) -> Series:
        """Series of one rational component (0: 1, 1: i, 2: sqrt2, 3: i sqrt2)."""
        return self.map_coeffs(lambda v: FieldElem._raw(v.components()[which], _Q0, _Q0, _Q0))

    # ---- comparison ------------------------------------------------------
    def agrees_with(self, other: Series, prec=None) -> bool:
        """Equality of all coefficients below the common (or given) precision."""
        p = min(self.prec, other.prec)
        if prec is not None:
            p = min(p, _to_prec(prec))
        return (self - other).truncate(p).is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return self.prec == other.prec and self.agrees_with(other)

    def __hash__(self) -> int:
        return hash((self.prec, tuple(sorted((Fraction(n, self.den), v) for n, v in self.coeffs.items()))))

    # ---- serialisation ---------------------------------------------------
    def to_json(self) -> dict:
        prec = "inf" if self.prec == INF else format_rational(mpq(self.prec.numerator, self.prec.denominator))
        return {
            "denominator": self.den,
            "prec": prec,
            "coeffs": [
                {"exp": f"{n}/{self.den}", "val": v.to_json()} for n, v in sorted(self.coeffs.items())
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> Series:
        den = int(data["denominator"])
        prec = _to_prec(data["prec"])
        coeffs = {}
        for entry in data["coeffs"]:
            e = Fraction(str(entry["exp"]))
            n = e * den
            if n.denominator != 1:
                raise ValueError(f"exponent {e} is off the lattice 1/{den}")
            coeffs[int(n)] = FieldElem.from_json(entry["val"])
        return cls(coeffs, prec=prec, den=den)

    def __repr__(self) -> str:
        terms = []
        for e, v in self.items():
            terms.append(f"({v})*v^{e}")
        body = " + ".join(terms) if terms else "0"
        tail = "" if self.prec == INF else f" + O(v^{self.prec})"
        return f"Series[{body}{tail}]"


# ---- small dense linear algebra over Q(i, sqrt2) ----------------------------


def _as_matrix(M) -> list[list[FieldElem]]:
    return [[as_field(v) for v in row] for row in M]


def _eliminate(M: list[list[FieldElem]], ncols: int) -> tuple[list[list[FieldElem]], list[int], FieldElem]:
    """Reduced row echelon form over the first ncols columns; returns (rows, pivots, det factor)."""
    rows = [row[:] for row in M]
    pivots = []
    det = ONE
    r = 0
    for col in range(ncols):
        piv = next((k for k in range(r, len(rows)) if rows[k][col]), None)
        if piv is None:
            det = ZERO
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
            det = -det
        p = rows[r][col]
        det = det * p
        inv = p.inv()
        rows[r] = [v * inv for v in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][col]:
                f = rows[k][col]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows, pivots, det


def mat_det(M) -> FieldElem:
    M = _as_matrix(M)
    n = len(M)
    if n == 0:
        return ONE
    _, pivots, det = _eliminate(M, n)
    return det if len(pivots) == n else ZERO


def mat_inverse(M) -> list[list[FieldElem]]:
    M = _as_matrix(M)
    n = len(M)
    aug = [row + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(M)]
    rows, pivots, _ = _eliminate(aug, n)
    if len(pivots) < n:
        raise SingularMatrix("matrix is singular")
    return [row[n:] for row in rows]


def mat_mul(A, B) -> list[list[FieldElem]]:
    A, B = _as_matrix(A), _as_matrix(B)
    out = []
    for row in A:
        new = []
        for j in range(len(B[0])):
            acc = ZERO
            for k, a in enumerate(row):
                if a and B[k][j]:
                    acc = acc + a * B[k][j]
            new.append(acc)
        out.append(new)
    return out


def solve_linear(A, b) -> tuple[list[FieldElem], list[list[FieldElem]]] | None:
    """Particular solution and nullspace basis of A x = b, or None when inconsistent."""
    A = _as_matrix(A)
    ncols = len(A[0]) if A else 0
    aug = [row + [as_field(v)] for row, v in zip(A, b)]
    rows, pivots, _ = _eliminate(aug, ncols)
    for row in rows[len(pivots):]:
        if row[ncols]:
            return None
    x = [ZERO] * ncols
    for row, col in zip(rows, pivots):
        x[col] = row[ncols]
    free = [c for c in range(ncols) if c not in pivots]
    kernel = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for row, col in zip(rows, pivots):
            v[col] = -row[f]
        kernel.append(v)
    return x, kernel
