"""Genus-zero potentials, their pairing, the WDVV residual engine, linear
changes of variables and the P^1_{2,2,2,2} template.

A potential is a polynomial in the flat coordinates whose coefficients are
truncated series in the modular variable.  In ``"tau"`` mode the modular
variable is the series variable itself; in ``"q"`` mode the series variable is
q = exp(t_mod) and the cubic term t0^2 t_mod / 2 is stored as a literal
monomial.

Heavy polynomial arithmetic is delegated to python-flint.  Elements of
Q(i, sqrt2) = Q(zeta_8) are encoded as polynomials in an extra variable z
reduced modulo z^4 + 1 (i = z^2, sqrt2 = z - z^3).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import flint
from gmpy2 import mpq

from .algebra import ONE, ZERO, FieldElem, INF, Series, SingularMatrix, as_field, mat_det, mat_inverse
from .halphen import HalphenTriple

__all__ = [
    "TAU",
    "Q",
    "Degenerate",
    "NonInvertible",
    "Potential",
    "WDVVReport",
    "TemplateMatch",
    "pairing_from_cubic",
    "wdvv_residual",
    "change_vars",
    "extract_triple",
    "grading_check",
    "grading_rescale",
    "p2222_potential",
    "P2222_NAMES",
    "parse_monomial",
]

TAU = "tau"
Q = "q"


class Degenerate(ValueError):
    """The pairing read off the cubic block is singular."""


class NonInvertible(ValueError):
    """A linear change of variables is not invertible or breaks the unit/modular roles."""


def parse_monomial(text: str, names: Sequence[str]) -> tuple[int, ...]:
    """'t0^2*t1' -> exponent vector over names; '1' is the empty monomial."""
    exps = [0] * len(names)
    text = text.strip()
    if text in ("", "1"):
        return tuple(exps)
    index = {n: k for k, n in enumerate(names)}
    for factor in text.split("*"):
        name, _, power = factor.strip().partition("^")
        if name not in index:
            raise KeyError(f"unknown variable {name!r}")
        exps[index[name]] += int(power) if power else 1
    return tuple(exps)


def format_monomial(mono: Sequence[int], names: Sequence[str]) -> str:
    parts = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, mono) if e]
    return "*".join(parts) or "1"


@dataclass(frozen=True)
class Potential:
    var_names: tuple[str, ...]
    unit: int
    modular: int
    mode: str
    terms: Mapping[tuple[int, ...], Series]
    prec: object = INF
    grades: tuple[Fraction, ...] | None = None

    def __post_init__(self) -> None:
        if self.mode not in (TAU, Q):
            raise ValueError(f"unknown mode {self.mode!r}")
        n = len(self.var_names)
        for mono, s in self.terms.items():
            if len(mono) != n:
                raise ValueError("monomial length does not match the variables")
            if self.mode == TAU and mono[self.modular]:
                raise ValueError("tau-mode potentials carry the modular variable in the series only")

    # ---- construction ------------------------------------------------------
    @classmethod
    def from_terms(
        cls,
        var_names: Sequence[str],
        unit: str,
        modular: str,
        mode: str,
        terms: Iterable[tuple[str | Mapping[str, int] | Sequence[int], object]],
        prec=INF,
        grades: Mapping[str, Fraction] | Sequence[Fraction] | None = None,
    ) -> Potential:
        names = tuple(var_names)
        acc: dict[tuple[int, ...], Series] = {}
        for mono, coeff in terms:
            if isinstance(mono, str):
                key = parse_monomial(mono, names)
            elif isinstance(mono, Mapping):
                key = parse_monomial("*".join(f"{k}^{v}" for k, v in mono.items()), names)
            else:
                key = tuple(mono)
            s = coeff if isinstance(coeff, Series) else Series.constant(coeff)
            acc[key] = acc[key] + s if key in acc else s
        if isinstance(grades, Mapping):
            grades = tuple(Fraction(grades[n]) for n in names)
        elif grades is not None:
            grades = tuple(Fraction(g) for g in grades)
        return cls._normalized(names, names.index(unit), names.index(modular), mode, acc, prec, grades)

    @classmethod
    def _normalized(cls, names, unit, modular, mode, terms, prec, grades) -> Potential:
        if prec == INF:
            prec = min((s.prec for s in terms.values()), default=INF)
        clean = {}
        for mono, s in terms.items():
            s = s.truncate(prec)
            if s.den != 1:
                s = s.reduced()
            if not s.is_zero():
                clean[mono] = s
        return cls(tuple(names), unit, modular, mode, clean, prec, grades)

    # ---- access ------------------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.var_names)

    def index(self, name: str) -> int:
        return self.var_names.index(name)

    def key(self, mono) -> tuple[int, ...]:
        if isinstance(mono, str):
            return parse_monomial(mono, self.var_names)
        return tuple(mono)

    def coefficient(self, mono) -> Series:
        return self.terms.get(self.key(mono), Series.zero(self.prec))

    def monomials(self) -> list[tuple[int, ...]]:
        return sorted(self.terms, key=lambda m: (sum(m), tuple(-e for e in m)))

    def truncate(self, prec) -> Potential:
        return Potential._normalized(self.var_names, self.unit, self.modular, self.mode,
                                     dict(self.terms), min(prec, self.prec), self.grades)

    def map_series(self, fn) -> Potential:
        return Potential._normalized(self.var_names, self.unit, self.modular, self.mode,
                                     {m: fn(s) for m, s in self.terms.items()}, INF, self.grades)

    def with_grades(self, grades) -> Potential:
        if isinstance(grades, Mapping):
            grades = tuple(Fraction(grades[n]) for n in self.var_names)
        return Potential(self.var_names, self.unit, self.modular, self.mode, self.terms, self.prec, tuple(grades))

    def restrict(self, keep: Iterable[str]) -> Potential:
        """Set every variable outside keep (and the unit/modular pair) to zero."""
        keep_idx = {self.index(n) for n in keep} | {self.unit, self.modular}
        terms = {m: s for m, s in self.terms.items() if all(e == 0 or k in keep_idx for k, e in enumerate(m))}
        return Potential(self.var_names, self.unit, self.modular, self.mode, terms, self.prec, self.grades)

    def coefficient_field(self) -> set[str]:
        """Which components (1, i, sqrt2, i sqrt2) occur among the coefficients."""
        used = set()
        labels = ("1", "i", "sqrt2", "i*sqrt2")
        for s in self.terms.values():
            for _, v in s.items():
                used.update(lab for lab, c in zip(labels, v.components()) if c)
        return used

    def agrees_with(self, other: Potential, prec=None) -> bool:
        return self.first_difference(other, prec) is None

    def first_difference(self, other: Potential, prec=None):
        """First monomial whose coefficient series differ below the common precision."""
        if (self.var_names, self.unit, self.modular, self.mode) != (
            other.var_names, other.unit, other.modular, other.mode
        ):
            return ("structure", None)
        p = min(self.prec, other.prec) if prec is None else min(prec, self.prec, other.prec)
        for mono in sorted(set(self.terms) | set(other.terms)):
            d = (self.coefficient(mono) - other.coefficient(mono)).truncate(p)
            if not d.is_zero():
                return (format_monomial(mono, self.var_names), d)
        return None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Potential):
            return NotImplemented
        return self.prec == other.prec and self.first_difference(other) is None

    def __hash__(self) -> int:
        return hash((self.var_names, self.mode, len(self.terms)))

    # ---- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        grades = self.grades or (None,) * self.nvars
        return {
            "vars": [{"name": n, "grade": None if g is None else str(g)} for n, g in zip(self.var_names, grades)],
            "unit": self.var_names[self.unit],
            "modular": self.var_names[self.modular],
            "mode": self.mode,
            "prec": "inf" if self.prec == INF else str(self.prec),
            "terms": [
                {"monomial": {n: e for n, e in zip(self.var_names, m) if e}, "series": self.terms[m].to_json()}
                for m in self.monomials()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> Potential:
        names = [v["name"] for v in data["vars"]]
        grades = [v.get("grade") for v in data["vars"]]
        grades = None if any(g is None for g in grades) else [Fraction(g) for g in grades]
        prec = data.get("prec", "inf")
        prec = INF if prec == "inf" else Fraction(prec)
        terms = [(t["monomial"], Series.from_json(t["series"])) for t in data["terms"]]
        return cls.from_terms(names, data["unit"], data["modular"], data["mode"], terms, prec, grades)


# ---- flint bridge -------------------------------------------------------------


@lru_cache(maxsize=None)
def _ctx(n: int):
    return flint.fmpq_mpoly_ctx.get(("z", "s", *[f"v{k}" for k in range(n)]), "lex")


def _fmpq(x) -> flint.fmpq:
    x = mpq(x)
    return flint.fmpq(int(x.numerator), int(x.denominator))


def _mpq(x: flint.fmpq) -> mpq:
    return mpq(int(x.p), int(x.q))


def _field_zexps(v: FieldElem) -> list[tuple[int, mpq]]:
    a, b, c, d = v.components()
    return [(k, u) for k, u in ((0, a), (1, c + d), (2, b), (3, d - c)) if u]


def _field_from_z(u: Sequence[mpq]) -> FieldElem:
    return FieldElem._raw(u[0], u[2], (u[1] - u[3]) / 2, (u[1] + u[3]) / 2)


class _Ring:
    def __init__(self, n: int) -> None:
        self.n = n
        self.ctx = _ctx(n)
        gens = self.ctx.gens()
        self.z, self.s, self.v = gens[0], gens[1], gens[2:]
        self.zmod = self.z**4 + 1

    def const(self, v) -> flint.fmpq_mpoly:
        v = as_field(v)
        return self.ctx.from_dict({(k, 0) + (0,) * self.n: _fmpq(u) for k, u in _field_zexps(v)})

    def from_potential(self, P: Potential, cut: int) -> flint.fmpq_mpoly:
        data = {}
        for mono, s in P.terms.items():
            for e, v in s.items():
                if e >= cut:
                    break
                if Fraction(e).denominator != 1:
                    raise ValueError("only integer lattices can enter the polynomial engine")
                for k, u in _field_zexps(v):
                    data[(k, int(e)) + mono] = _fmpq(u)
        return self.ctx.from_dict(data)

    def reduce(self, p, cut: int):
        return (p % self.s**cut) % self.zmod

    def to_terms(self, p) -> dict[tuple[int, ...], dict[int, list[mpq]]]:
        out: dict[tuple[int, ...], dict[int, list]] = {}
        for exps, c in p.to_dict().items():
            z, s, mono = int(exps[0]), int(exps[1]), tuple(int(e) for e in exps[2:])
            comps = out.setdefault(mono, {}).setdefault(s, [mpq(0)] * 4)
            comps[z] = _mpq(c)
        return out

    def to_potential_terms(self, p, prec) -> dict[tuple[int, ...], Series]:
        return {
            mono: Series({e: _field_from_z(u) for e, u in by_s.items()}, prec=prec)
            for mono, by_s in self.to_terms(p).items()
        }

    def constant_term(self, p) -> FieldElem:
        u = [mpq(0)] * 4
        for exps, c in p.to_dict().items():
            if not any(exps[1:]):
                u[exps[0]] = _mpq(c)
        return _field_from_z(u)


def _cut(P: Potential, order=None) -> int:
    p = P.prec if order is None else min(order, P.prec)
    if p == INF:
        # exact polynomial potential: any finite cut is faithful
        deg = max((e for s in P.terms.values() for e, _ in s.items()), default=0)
        return int(deg) + 4
    return int(Fraction(p).__ceil__())


class _Derivatives:
    """Cached partial derivatives of a potential inside the flint ring."""

    def __init__(self, P: Potential, cut: int) -> None:
        self.P = P
        self.R = _Ring(P.nvars)
        self.cut = cut
        self.F = self.R.from_potential(P, cut)
        self.cache: dict[tuple[int, ...], object] = {(): self.F}

    def d(self, p, a: int):
        R, P = self.R, self.P
        if a == P.modular:
            if P.mode == TAU:
                return p.derivative(1)
            return R.s * p.derivative(1) + p.derivative(2 + a)
        return p.derivative(2 + a)

    def get(self, idx: Sequence[int]):
        key = tuple(sorted(idx))
        if key not in self.cache:
            self.cache[key] = self.d(self.get(key[:-1]), key[-1])
        return self.cache[key]


def pairing_from_cubic(P: Potential) -> list[list[FieldElem]]:
    """eta(a, b) = third derivative in (unit, a, b) at the origin."""
    D = _Derivatives(P, _cut(P))
    n = P.nvars
    eta = [[D.R.constant_term(D.get((P.unit, a, b))) for b in range(n)] for a in range(n)]
    if mat_det(eta).is_zero():
        raise Degenerate("the cubic block gives a singular pairing")
    return eta


@dataclass
class WDVVReport:
    passed: bool
    checked_below: object
    quadruples: int
    failures: list[dict] = field(default_factory=list)
    failed_quadruples: int = 0

    def to_json(self) -> dict:
        return {
            "status": "pass" if self.passed else "fail",
            "checked_below": str(self.checked_below),
            "quadruples": self.quadruples,
            "failed_quadruples": self.failed_quadruples,
            "failures": self.failures,
        }


def wdvv_residual(P: Potential, order=None, max_failures: int = 5) -> WDVVReport:
    """Check sum_{p,q} F_ijp eta^pq F_qkl symmetric in (i,j,k,l) for every quadruple.

    ``order`` is the requested modular order below which the residual is
    certified; the potential must carry enough precision (tau mode loses up to
    three orders to the modular derivatives).
    """
    n = P.nvars
    loss = 3 if P.mode == TAU else 0
    cut = _cut(P) if order is None else min(_cut(P), int(order) + loss)
    D = _Derivatives(P, cut)
    R = D.R
    eta = [[R.constant_term(D.get((P.unit, a, b))) for b in range(n)] for a in range(n)]
    try:
        inv = mat_inverse(eta)
    except SingularMatrix as exc:
        raise Degenerate("the cubic block gives a singular pairing") from exc
    inv_poly = {(p, q): R.const(inv[p][q]) for p in range(n) for q in range(n) if inv[p][q]}

    third = {}
    for i, j in itertools.combinations_with_replacement(range(n), 2):
        third[(i, j)] = [R.reduce(D.get((i, j, p)), cut) for p in range(n)]

    raised = {}

    def raised_vec(pair):
        if pair not in raised:
            vec = third[pair]
            raised[pair] = [
                sum((inv_poly[(p, q)] * vec[q] for q in range(n) if (p, q) in inv_poly and not vec[q].is_zero()),
                    R.ctx.from_dict({}))
                for p in range(n)
            ]
        return raised[pair]

    prod_cache = {}

    def contraction(p1, p2):
        key = (p1, p2) if p1 <= p2 else (p2, p1)
        if key not in prod_cache:
            a, b = third[key[0]], raised_vec(key[1])
            acc = R.ctx.from_dict({})
            for x, y in zip(a, b):
                if not x.is_zero() and not y.is_zero():
                    acc += x * y
            prod_cache[key] = R.reduce(acc, cut)
        return prod_cache[key]

    def mod_count(pair):
        return sum(1 for k in pair if k == P.modular)

    def valid(p1, p2):
        # each modular derivative costs one order; the contraction may add one more
        if P.mode != TAU:
            return cut
        return cut - max(mod_count(p1), mod_count(p2)) - 1

    failures = []
    failed = 0
    count = 0
    checked = cut - loss
    for quad in itertools.combinations_with_replacement(range(n), 4):
        i, j, k, l = quad
        pairings = [((i, j), (k, l)), ((i, k), (j, l)), ((i, l), (j, k))]
        pairings = [(tuple(sorted(a)), tuple(sorted(b))) for a, b in pairings]
        base = contraction(*pairings[0])
        count += 1
        for other in pairings[1:]:
            bound = min(valid(*pairings[0]), valid(*other))
            diff = (base - contraction(*other)) % R.s**bound
            if not diff.is_zero():
                failed += 1
                if len(failures) < max_failures:
                    terms = diff.to_dict()
                    failures.append({
                        "quadruple": [P.var_names[x] for x in quad],
                        "pairings": [[P.var_names[x] for x in pairings[0][0] + pairings[0][1]],
                                     [P.var_names[x] for x in other[0] + other[1]]],
                        "residual_terms": len(terms),
                        "lowest_modular_order": int(min(e[1] for e in terms)),
                    })
                break
    return WDVVReport(failed == 0, checked, count, failures, failed)


# ---- changes of variables ----------------------------------------------------


def change_vars(
    P: Potential,
    images: Mapping[str, Mapping[str, object]],
    new_names: Sequence[str] | None = None,
    unit: str | None = None,
    modular: str | None = None,
    grades=None,
) -> Potential:
    """Substitute each old variable by a linear form in the new variables.

    ``images[old] = {new: coefficient}``; old variables not listed map to the
    new variable of the same name.  The old modular variable must map to a
    multiple of the new modular variable (exactly 1 in q mode) and no other
    old variable may involve it.
    """
    new_names = tuple(new_names or P.var_names)
    n = P.nvars
    if len(new_names) != n:
        raise NonInvertible("the number of variables must be preserved")
    unit = unit or P.var_names[P.unit]
    modular = modular or P.var_names[P.modular]
    u_new, m_new = new_names.index(unit), new_names.index(modular)
    M = [[ZERO] * n for _ in range(n)]
    for a, old in enumerate(P.var_names):
        img = images.get(old, {old: 1})
        for name, c in img.items():
            M[a][new_names.index(name)] = as_field(c)
    mod_row = M[P.modular]
    if any(v for b, v in enumerate(mod_row) if b != m_new) or not mod_row[m_new]:
        raise NonInvertible("the modular variable must map to a multiple of the new modular variable")
    if any(M[a][m_new] for a in range(n) if a != P.modular):
        raise NonInvertible("only the modular variable may involve the new modular variable")
    c_mod = mod_row[m_new]
    if P.mode == Q and c_mod != ONE:
        raise NonInvertible("q-mode potentials admit no rescaling of the modular variable")
    if mat_det(M).is_zero():
        raise NonInvertible("singular change of variables")

    cut = _cut(P)
    R = _Ring(n)
    F = R.from_potential(P, cut)
    subs = [R.z, R.s * R.const(c_mod) if P.mode == TAU else R.s]
    for a in range(n):
        form = R.ctx.from_dict({})
        for b in range(n):
            if M[a][b]:
                form += R.const(M[a][b]) * R.v[b]
        subs.append(form)
    G = R.reduce(F.compose(*subs, ctx=R.ctx), cut)
    prec = P.prec
    terms = R.to_potential_terms(G, prec if prec != INF else INF)
    if grades is None and P.grades is not None:
        # grades follow the variables through the linear map when it is grade-homogeneous
        grades = _transport_grades(P, M, new_names)
    return Potential._normalized(new_names, u_new, m_new, P.mode, terms, prec, grades)


def _transport_grades(P: Potential, M, new_names) -> tuple[Fraction, ...] | None:
    new = [None] * len(new_names)
    for a, row in enumerate(M):
        for b, c in enumerate(row):
            if c:
                if new[b] is not None and new[b] != P.grades[a]:
                    return None
                new[b] = P.grades[a]
    return None if any(g is None for g in new) else tuple(new)


def grading_check(P: Potential, chat=1) -> bool:
    """Every monomial has total grade 3 - chat (series in the modular variable have grade 0)."""
    if P.grades is None:
        raise ValueError("potential carries no grades")
    target = 3 - Fraction(chat)
    return all(sum(g * e for g, e in zip(P.grades, m)) == target for m in P.terms)


def grading_rescale(P: Potential, k) -> Potential:
    """The scaling t_v -> k^(1 - 3 g_v / 2) t_v of a graded tau-mode potential.

    For a monomial of total degree n (counting powers of the modular
    variable) the fractional powers combine to k^(n - 3), so the result stays
    over Q(i, sqrt2).  On the P^1_{2,2,2,2} template this is X(t) -> k X(k t).
    """
    if P.mode != TAU:
        raise ValueError("grading rescale acts on tau-mode potentials")
    if not grading_check(P, 1):
        raise ValueError("potential is not grade-homogeneous of degree 2")
    k = as_field(k)
    kinv = k.inv()
    terms = {}
    for mono, s in P.terms.items():
        shift = sum(mono) - 3
        factor = k**shift if shift >= 0 else kinv ** (-shift)
        terms[mono] = s.scale_var(k).scale(factor)
    return Potential._normalized(P.var_names, P.unit, P.modular, P.mode, terms, P.prec, P.grades)


# ---- the P^1_{2,2,2,2} template ---------------------------------------------------

P2222_NAMES = ("t0", "t-1", "t1", "t2", "t3", "t4")

# quartic slot supports: A pairs (34, 12), B pairs (13, 24), C pairs (23, 14)
_SLOTS = {"A": ((3, 4), (1, 2)), "B": ((1, 3), (2, 4)), "C": ((2, 3), (1, 4))}


def p2222_potential(A: Series, B: Series, C: Series, mode: str = TAU, names: Sequence[str] = P2222_NAMES,
                    prec=INF) -> Potential:
    """1/2 t0^2 t_mod + 1/4 t0 sum t_k^2 - 1/16 (slot pairs) - 1/96 sum t_k^4 (A + B + C)."""
    unit, mod, *tw = names
    terms: list = []
    if mode == TAU:
        terms.append((f"{unit}^2", Series({1: Fraction(1, 2)})))
    else:
        terms.append((f"{unit}^2*{mod}", Fraction(1, 2)))
    for t in tw:
        terms.append((f"{unit}*{t}^2", Fraction(1, 4)))
    for slot, series in zip("ABC", (A, B, C)):
        for a, b in _SLOTS[slot]:
            terms.append((f"{tw[a - 1]}^2*{tw[b - 1]}^2", series.scale(Fraction(-1, 16))))
    total = (A + B + C).scale(Fraction(-1, 96))
    for t in tw:
        terms.append((f"{t}^4", total))
    grades = {unit: 1, mod: 0, **{t: Fraction(1, 2) for t in tw}}
    return Potential.from_terms(names, unit, mod, mode, terms, prec, grades)


@dataclass
class TemplateMatch:
    matched: bool
    slots: dict[str, Series] = field(default_factory=dict)
    triple: HalphenTriple | None = None
    failure: str | None = None

    def to_json(self) -> dict:
        out = {"matched": self.matched}
        if self.failure:
            out["failure"] = self.failure
        if self.slots:
            out["slots"] = {k: v.to_json() for k, v in self.slots.items()}
        return out


def extract_triple(P: Potential) -> TemplateMatch:
    """Read the three slot series off a potential of P^1_{2,2,2,2} shape.

    The twisted variables are taken in the order they appear in ``P.var_names``.
    The returned triple uses the analytic slot order (X2, X3, X4) = (B, C, A).
    """
    tw = [k for k in range(P.nvars) if k not in (P.unit, P.modular)]
    if len(tw) != 4:
        return TemplateMatch(False, failure="expected exactly four twisted variables")
    names = (P.var_names[P.unit], P.var_names[P.modular], *(P.var_names[k] for k in tw))
    slots = {}
    for slot, ((a, b), _) in _SLOTS.items():
        slots[slot] = P.coefficient(f"{names[1 + a]}^2*{names[1 + b]}^2").scale(-16)
    reordered = _reorder(P, names)
    expected = p2222_potential(slots["A"], slots["B"], slots["C"], P.mode, names, P.prec)
    diff = reordered.first_difference(expected)
    if diff is not None:
        return TemplateMatch(False, slots, failure=f"coefficient of {diff[0]} breaks the template")
    triple = HalphenTriple(slots["B"], slots["C"], slots["A"], mode=P.mode)
    return TemplateMatch(True, slots, triple)


def _reorder(P: Potential, names: Sequence[str]) -> Potential:
    perm = [P.index(n) for n in names]
    terms = {tuple(m[k] for k in perm): s for m, s in P.terms.items()}
    return Potential(tuple(names), 0, 1, P.mode, terms, P.prec,
                     None if P.grades is None else tuple(P.grades[k] for k in perm))
