"""The Halphen system X2' = X2(X3+X4) - X3 X4 (and cyclic) on truncated series.

Two derivative conventions are supported: ``"tau"`` (plain d/dt, one order of
precision is lost) and ``"q"`` (q d/dq, precision preserved).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import ZERO, FieldElem, Series, as_field
from .qmodular import psi_series

__all__ = [
    "HalphenTriple",
    "DerivedStructure",
    "residual",
    "is_solution",
    "taylor_solve",
    "transform_scale",
    "permute",
    "derived_structure",
    "x_tau0_omega0",
    "psi_triple",
    "FIXTURE_INIT",
    "FIXTURE_SEEDS",
]

TAU = "tau"
Q = "q"

FIXTURE_INIT = (Fraction(1, 4), Fraction(0), Fraction(-1, 4))


@dataclass(frozen=True)
class HalphenTriple:
    X2: Series
    X3: Series
    X4: Series
    mode: str = TAU

    def __post_init__(self) -> None:
        if self.mode not in (TAU, Q):
            raise ValueError(f"unknown mode {self.mode!r}")

    def __iter__(self):
        return iter((self.X2, self.X3, self.X4))

    def __getitem__(self, k: int) -> Series:
        """Access by the conventional index 2, 3 or 4."""
        return (self.X2, self.X3, self.X4)[k - 2]

    @property
    def prec(self):
        return min(s.prec for s in self)

    def initial_values(self) -> tuple[FieldElem, FieldElem, FieldElem]:
        return tuple(s[0] for s in self)

    def map(self, fn) -> HalphenTriple:
        return HalphenTriple(fn(self.X2), fn(self.X3), fn(self.X4), self.mode)

    def truncate(self, prec) -> HalphenTriple:
        return self.map(lambda s: s.truncate(prec))

    def to_json(self) -> dict:
        return {"mode": self.mode, "X2": self.X2.to_json(), "X3": self.X3.to_json(), "X4": self.X4.to_json()}

    @classmethod
    def from_json(cls, data) -> HalphenTriple:
        return cls(*(Series.from_json(data[k]) for k in ("X2", "X3", "X4")), mode=data.get("mode", TAU))


def _derivative(s: Series, mode: str) -> Series:
    return s.derivative() if mode == TAU else s.log_derivative_operator()


def residual(triple: HalphenTriple) -> tuple[Series, Series, Series]:
    """Left minus right side of the three Halphen equations."""
    X2, X3, X4 = triple
    m = triple.mode
    r2 = _derivative(X2, m) - (X2 * (X3 + X4) - X3 * X4)
    r3 = _derivative(X3, m) - (X3 * (X2 + X4) - X2 * X4)
    r4 = _derivative(X4, m) - (X4 * (X2 + X3) - X2 * X3)
    return r2, r3, r4


def is_solution(triple: HalphenTriple) -> bool:
    return all(r.is_zero() for r in residual(triple))


def taylor_solve(init: Sequence, order: int) -> HalphenTriple:
    """Unique formal tau-mode solution with the given constant terms, exact below t^order."""
    if order < 1:
        raise ValueError("order must be at least 1")
    c = [[as_field(v)] for v in init]
    for n in range(order - 1):
        # coefficient of t^n of the right-hand sides
        def conv(a, b):
            acc = ZERO
            for j in range(n + 1):
                x, y = a[j], b[n - j]
                if x and y:
                    acc = acc + x * y
            return acc

        p23, p24, p34 = conv(c[0], c[1]), conv(c[0], c[2]), conv(c[1], c[2])
        inv = Fraction(1, n + 1)
        c[0].append((p23 + p24 - p34) * inv)
        c[1].append((p23 + p34 - p24) * inv)
        c[2].append((p24 + p34 - p23) * inv)
    series = [Series(dict(enumerate(col)), prec=order) for col in c]
    return HalphenTriple(*series, mode=TAU)


def transform_scale(triple: HalphenTriple, k) -> HalphenTriple:
    """t -> k X(k t); preserves tau-mode solutions."""
    if triple.mode != TAU:
        raise ValueError("scaling acts on tau-mode triples")
    k = as_field(k)
    return triple.map(lambda s: s.scale_var(k).scale(k))


def permute(triple: HalphenTriple, perm: Sequence[int]) -> HalphenTriple:
    """New triple (X_{perm[0]}, X_{perm[1]}, X_{perm[2]}) with perm a permutation of (2, 3, 4)."""
    if sorted(perm) != [2, 3, 4]:
        raise ValueError(f"{perm!r} is not a permutation of (2, 3, 4)")
    return HalphenTriple(triple[perm[0]], triple[perm[1]], triple[perm[2]], triple.mode)


@dataclass(frozen=True)
class DerivedStructure:
    x0: Series
    y0: Series
    z0: Series
    w0: Series

    def __iter__(self):
        return iter((self.x0, self.y0, self.z0, self.w0))


# square-root seeds for (X2 - X4, X2 - X3, X3 - X4) on the distinguished triple
FIXTURE_SEEDS = (FieldElem(0, 0, Fraction(1, 2)), FieldElem(Fraction(1, 2)), FieldElem(Fraction(1, 2)))


def derived_structure(triple: HalphenTriple, seeds=FIXTURE_SEEDS) -> DerivedStructure:
    """x, y, z, w built from square roots of the pairwise differences of the triple."""
    X2, X3, X4 = triple
    s24, s23, s34 = seeds
    r24 = (X2 - X4).sqrt(s24)
    r23 = (X2 - X3).sqrt(s23)
    half = Fraction(1, 2)
    x0 = (r24 + r23).scale(half)
    y0 = (r24 - r23).scale(half)
    z0 = (X3 - X4).sqrt(s34)
    w0 = (X2.scale(2) + X3 + X4 + (r23 * r24).scale(2)).scale(Fraction(1, 4))
    return DerivedStructure(x0, y0, z0, w0)


def x_tau0_omega0(order: int = 9) -> HalphenTriple:
    """The distinguished rational triple with constant terms (1/4, 0, -1/4)."""
    return taylor_solve(FIXTURE_INIT, order)


def psi_triple(order) -> HalphenTriple:
    """(psi2(q^2), psi3(q^2), psi4(q^2)) as a q-mode triple."""
    order = Fraction(order)
    parts = [psi_series(k, order / 2).compose_power(2).with_denominator(1) for k in (2, 3, 4)]
    return HalphenTriple(*parts, mode=Q)
