"""Order-by-order WDVV reconstruction of the FJRW potentials from their ansatz.

The potential is ``t_u^2 tau / 2 + t_u Q(t) + sum_slot f_slot(tau) m_slot(t)``.
WDVV turns into polynomial identities in the non-modular variables whose
coefficients are at most quadratic in the slot functions and their tau
derivatives (``derive_constraints``).  Expanding every slot in powers of tau
makes each identity, coefficient by coefficient, a polynomial of degree at
most two in the unknown Taylor coefficients.  The solver only ever solves the
linear ones, plus univariate quadratics while enumerating branch seeds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from .algebra import ZERO, FieldElem, NoRootInField, Series, as_field
from .cohft import Potential, parse_monomial
from .fjrw import load_ansatz, state_basis
from .store import on_change

__all__ = [
    "Inconsistent",
    "GaugeAmbiguity",
    "NonTriangular",
    "Constraint",
    "ConstraintSystem",
    "BranchSeed",
    "Solution",
    "derive_constraints",
    "enumerate_branches",
    "solve",
    "parity_filter",
    "reconstruct",
    "GAUGES",
    "Gauge",
    "REFERENCES",
    "catalog_diff",
    "concave_slots",
]


class Inconsistent(ValueError):
    """No extension of the current data satisfies WDVV."""


class GaugeAmbiguity(ValueError):
    def __init__(self, order: int, free: Sequence) -> None:
        super().__init__(f"undetermined coefficients at order {order}: {sorted(free)}")
        self.order = order
        self.free = list(free)


class NonTriangular(ValueError):
    def __init__(self, equation: str) -> None:
        super().__init__(f"no univariate equation left; stuck at {equation}")
        self.equation = equation


# ---- symbolic third derivatives ------------------------------------------------------
#
# A symbol is (slot, d): the d-th tau derivative of a slot function.  A "quad"
# is {key: coefficient} with key a sorted tuple of at most two symbols.

Symbol = tuple[str, int]
Key = tuple[Symbol, ...]
Quad = dict[Key, FieldElem]
Poly = dict[tuple[int, ...], Quad]


def _quad_add(a: Quad, b: Quad, sign: int = 1) -> None:
    for k, v in b.items():
        w = a.get(k, ZERO) + (v if sign > 0 else -v)
        if w:
            a[k] = w
        else:
            a.pop(k, None)


def _poly_mul(p: Poly, q: Poly, c: FieldElem) -> Poly:
    out: Poly = {}
    for m1, a in p.items():
        for m2, b in q.items():
            mono = tuple(x + y for x, y in zip(m1, m2))
            tgt = out.setdefault(mono, {})
            for k1, v1 in a.items():
                for k2, v2 in b.items():
                    key = tuple(sorted(k1 + k2))
                    w = tgt.get(key, ZERO) + v1 * v2 * c
                    if w:
                        tgt[key] = w
                    else:
                        tgt.pop(key, None)
    return {m: v for m, v in out.items() if v}


@dataclass(frozen=True)
class _Term:
    mono: tuple[int, ...]
    coeff: FieldElem
    tau_power: int = 0
    slot: str | None = None


def _third(terms: Sequence[_Term], idx: Sequence[int | None]) -> Poly:
    """d^3/dt_i dt_j dt_k of the symbolic potential; None stands for tau."""
    d = sum(1 for i in idx if i is None)
    out: Poly = {}
    for t in terms:
        mono = list(t.mono)
        c = t.coeff
        ok = True
        for i in idx:
            if i is None:
                continue
            if mono[i] == 0:
                ok = False
                break
            c = c * mono[i]
            mono[i] -= 1
        if not ok:
            continue
        if t.slot is None:
            if d > t.tau_power or t.tau_power - d:
                continue
            c = c * (factorial(t.tau_power) // factorial(t.tau_power - d))
            key: Key = ()
        else:
            key = ((t.slot, d),)
        tgt = out.setdefault(tuple(mono), {})
        _quad_add(tgt, {key: c})
    return {m: v for m, v in out.items() if v}


@dataclass(frozen=True)
class Constraint:
    """One WDVV identity coefficient: sum over keys of coefficient * product of symbols = 0."""

    terms: tuple[tuple[Key, FieldElem], ...]
    origin: str = ""

    @property
    def max_derivative(self) -> int:
        return max((d for k, _ in self.terms for _, d in k), default=0)

    def slots(self) -> set[str]:
        return {s for k, _ in self.terms for s, _ in k}

    def __str__(self) -> str:
        parts = []
        for k, v in self.terms:
            sym = "*".join(s + "'" * d for s, d in k) or "1"
            parts.append(f"({v})*{sym}")
        return " + ".join(parts) + " = 0"


@dataclass
class ConstraintSystem:
    group: str
    slots: tuple[str, ...]
    unknown: tuple[str, ...]
    known: dict[str, Series]
    parity: dict[str, str | None]
    constraints: list[Constraint]

    def zero_forced(self) -> set[str]:
        """Unknown slots s with a constraint c * s^(d) = 0 or c * s * s = 0."""
        out = set()
        for c in self.constraints:
            if len(c.terms) == 1:
                key = c.terms[0][0]
                if len({s for s, _ in key}) == 1 and key[0][0] in self.unknown:
                    out.add(key[0][0])
        return out


def _normalize(q: Quad) -> tuple[tuple[Key, FieldElem], ...]:
    items = sorted(q.items())
    lead = items[0][1]
    return tuple((k, v / lead) for k, v in items)


def _symbolic_terms(group: str, names: Sequence[str], modular: str, unit: str, ansatz: Mapping) -> list[_Term]:
    from .catalog import FJRW_QUADRATIC

    flat = [n for n in names if n != modular]
    pos = {n: i for i, n in enumerate(flat)}

    def mono_of(spec) -> tuple[int, ...]:
        exps = [0] * len(flat)
        items = spec.items() if isinstance(spec, Mapping) else zip(names, parse_monomial(spec, names))
        for v, e in items:
            if e:
                exps[pos[v]] += e
        return tuple(exps)

    u, quadratic = FJRW_QUADRATIC[group]
    terms = [_Term(mono_of({unit: 2}), as_field(Fraction(1, 2)), 1)]
    for m, c in quadratic:
        terms.append(_Term(mono_of(f"{unit}*{m}"), as_field(c)))
    for t in ansatz["terms"]:
        terms.append(_Term(mono_of(t["monomial"]), as_field(1), 0, t["slot"]))
    return terms


def _pairing_inverse(terms: Sequence[_Term], unit_idx: int, n: int) -> dict[tuple[int | None, int | None], FieldElem]:
    """eta^{alpha beta} over indices 0..n-1 and None (tau), from F_{unit alpha beta}."""
    idx: list[int | None] = list(range(n)) + [None]
    eta = {}
    for a in idx:
        for b in idx:
            p = _third(terms, (unit_idx, a, b))
            v = p.get((0,) * n, {}).get((), ZERO)
            if v:
                eta[(a, b)] = v
    # the pairing is block diagonal with 1x1 and 2x2 symmetric blocks
    inv = {}
    seen = set()
    for (a, b), v in eta.items():
        if (a, b) in seen:
            continue
        if a == b:
            inv[(a, a)] = 1 / v
            seen.add((a, a))
        else:
            inv[(a, b)] = inv[(b, a)] = 1 / v
            seen |= {(a, b), (b, a)}
            if (a, a) in eta or (b, b) in eta:
                raise ValueError("pairing blocks are not anti-diagonal")
    return inv


def derive_constraints(group: str, known: Mapping[str, Series] | None = None, order: int = 8,
                       gw_invariant: bool | None = None) -> ConstraintSystem:
    """WDVV for the group's ansatz as identities quadratic in the slot functions.

    ``known`` defaults to the concave slots imported from the G_max potential.
    """
    ans = load_ansatz(group)
    basis = state_basis(group)
    names = [s.var for s in basis]
    unit, modular = ans["unit"], ans["modular"]
    flat = [n for n in names if n != modular]
    n = len(flat)
    terms = _symbolic_terms(group, names, modular, unit, ans)
    inv = _pairing_inverse(terms, flat.index(unit), n)
    idx: list[int | None] = list(range(n)) + [None]

    cache: dict[tuple, Poly] = {}

    def third(*ix):
        key = tuple(sorted(ix, key=lambda i: -1 if i is None else i))
        if key not in cache:
            cache[key] = _third(terms, key)
        return cache[key]

    def contract(i, j, k, l) -> Poly:
        out: Poly = {}
        for (a, b), v in inv.items():
            left = third(i, j, a)
            right = third(b, k, l)
            if left and right:
                for m, q in _poly_mul(left, right, v).items():
                    _quad_add(out.setdefault(m, {}), q)
        return out

    found: dict[tuple, Constraint] = {}
    for i, j, k, l in itertools.product(idx, repeat=4):
        order_key = lambda x: -1 if x is None else x
        if not (order_key(j) < order_key(k)):
            continue
        lhs = contract(i, j, k, l)
        rhs = contract(i, k, j, l)
        for m, q in rhs.items():
            _quad_add(lhs.setdefault(m, {}), q, -1)
        for m, q in lhs.items():
            if q:
                norm = _normalize(q)
                if norm not in found:
                    label = ",".join("tau" if x is None else flat[x] for x in (i, j, k, l))
                    found[norm] = Constraint(norm, f"WDVV({label}) at {m}")
    slots = tuple(t["slot"] for t in ans["terms"])
    if known is None:
        known = concave_slots(group, order)
    parity = {t.slot: t.parity for t in _ansatz_terms(group, gw_invariant)}
    unknown = tuple(s for s in slots if s not in known)
    return ConstraintSystem(group, slots, unknown, dict(known), parity, list(found.values()))


def _ansatz_terms(group: str, gw_invariant: bool | None):
    from .fjrw import allowed_monomials

    return allowed_monomials(group, gw_invariant=gw_invariant).terms


def concave_slots(group: str, order: int = 8) -> dict[str, Series]:
    """Slots whose monomial only involves narrow states, read off the G_max potential."""
    from .catalog import _narrow_identification, build

    ident = _narrow_identification(group)
    G = build("e7gmax", order).potential
    out = {}
    for t in load_ansatz(group)["terms"]:
        mono = t["monomial"]
        if all(v in ident for v in mono):
            key = {ident[v]: e for v, e in mono.items()}
            exps = tuple(key.get(v, 0) for v in G.var_names)
            out[t["slot"]] = G.coefficient(exps)
    return out


# ---- order-by-order evaluation -----------------------------------------------------------
#
# A coefficient variable is (slot, n): the t^n coefficient of an unknown slot.
# Expressions in these variables are {monomial: value} with monomials sorted
# tuples of at most two variables.

Var = tuple[str, int]
Expr = dict[tuple[Var, ...], FieldElem]


def _falling(q: int, d: int) -> int:
    out = 1
    for j in range(1, d + 1):
        out *= q + j
    return out


def _expr_mul(a: Expr, b: Expr) -> Expr:
    out: Expr = {}
    for k1, v1 in a.items():
        for k2, v2 in b.items():
            key = tuple(sorted(k1 + k2))
            w = out.get(key, ZERO) + v1 * v2
            if w:
                out[key] = w
            else:
                out.pop(key, None)
    return out


def _expr_iadd(a: Expr, b: Expr, c: FieldElem) -> None:
    for k, v in b.items():
        w = a.get(k, ZERO) + v * c
        if w:
            a[k] = w
        else:
            a.pop(k, None)


def _degree(e: Expr) -> int:
    return max((len(k) for k in e), default=0)


def _vars(e: Expr) -> set[Var]:
    return {v for k in e for v in k}


class _State:
    """Known coefficients of every slot below ``size``, plus the current assignment.

    ``extras`` holds linear relations imposed from outside the WDVV system
    (gauge choices, the second factor of a product branch).
    """

    def __init__(self, system: ConstraintSystem, size: int, values: Mapping[Var, FieldElem] | None = None,
                 extras: Iterable[Expr] = ()) -> None:
        self.system = system
        self.size = size
        self.values: dict[Var, FieldElem] = dict(values or {})
        self.extras: list[Expr] = list(extras)

    def copy(self) -> _State:
        return _State(self.system, self.size, self.values, self.extras)

    def atom(self, slot: str, d: int, q: int) -> Expr | None:
        n = q + d
        if n >= self.size:
            return None
        f = _falling(q, d)
        known = self.system.known.get(slot)
        if known is not None:
            v = known[n] * f
            return {(): v} if v else {}
        v = self.values.get((slot, n))
        if v is not None:
            v = v * f
            return {(): v} if v else {}
        return {((slot, n),): as_field(f)}

    def evaluate(self, ci: int, p: int) -> Expr | None:
        """t^p coefficient of constraint ``ci``; None when it reaches past ``size``."""
        out: Expr = {}
        for key, c in self.system.constraints[ci].terms:
            if not key:
                if p == 0:
                    _expr_iadd(out, {(): ONE}, c)
                continue
            if len(key) == 1:
                (s, d), = key
                a = self.atom(s, d, p)
                if a is None:
                    return None
                _expr_iadd(out, a, c)
                continue
            (s1, d1), (s2, d2) = key
            for q in range(p + 1):
                a = self.atom(s1, d1, q)
                b = self.atom(s2, d2, p - q)
                if a is None or b is None:
                    return None
                if a and b:
                    _expr_iadd(out, _expr_mul(a, b), c)
        return out

    def label(self, ci: int, p: int) -> str:
        return f"[{self.system.constraints[ci]}] at t^{p}"

    def equations(self, lo: int = 0) -> list[tuple[int, int]]:
        """Every (constraint, power) pair fully inside ``size`` with power + derivative >= lo."""
        out = []
        for ci, c in enumerate(self.system.constraints):
            d = c.max_derivative
            out.extend((ci, p) for p in range(max(lo - d, 0), self.size - d))
        return out


ONE = as_field(1)


def _rref(rows: list[Expr]) -> tuple[list[tuple[Var, Expr]], bool]:
    """Row-reduce linear expressions; returns (pivot var, reduced row) pairs and consistency."""
    pivots: list[tuple[Var, Expr]] = []
    for row in rows:
        r = dict(row)
        for var, prow in pivots:
            c = r.get((var,))
            if c:
                _expr_iadd(r, prow, -c)
        lin = sorted(k[0] for k in r if k)
        if not lin:
            if r.get((), ZERO):
                return pivots, False
            continue
        var = lin[0]
        inv = 1 / r[(var,)]
        r = {k: v * inv for k, v in r.items()}
        for i, (pv, prow) in enumerate(pivots):
            c = prow.get((var,))
            if c:
                new = dict(prow)
                _expr_iadd(new, r, -c)
                pivots[i] = (pv, new)
        pivots.append((var, r))
    return pivots, True


def _substitute(e: Expr, sub: Mapping[Var, Expr]) -> Expr:
    out: Expr = {}
    for key, c in e.items():
        term: Expr = {(): c}
        for v in key:
            term = _expr_mul(term, sub.get(v, {(v,): ONE}))
            if not term:
                break
        _expr_iadd(out, term, ONE)
    return out


def _propagate(state: _State, eqs: Iterable[tuple[int, int]]) -> list[tuple[int, int, Expr]]:
    """Solve every linear consequence of ``eqs``; return the equations still open.

    Linear relations that do not pin a value down are substituted into the
    quadratic equations, so ``x * (y - 2z) = 0`` becomes useful once ``y = 2z``
    is known.  Open equations come back with that substitution applied.
    """
    eqs = list(eqs)
    sub: dict[Var, Expr] = {}
    while True:
        consts = {v: {(): c} for v, c in state.values.items()}
        linear = [_substitute(x, consts) for x in state.extras]
        open_: list[tuple[int, int, Expr]] = []
        for ci, p in eqs:
            e = state.evaluate(ci, p)
            if not e:
                continue
            if _degree(e) == 2 and sub:
                e = _substitute(e, sub)
            deg = _degree(e)
            if deg == 0:
                if e:
                    raise Inconsistent(state.label(ci, p))
                continue
            if deg == 1:
                linear.append(e)
            open_.append((ci, p, e))
        pivots, ok = _rref([x for x in linear if x])
        if not ok:
            raise Inconsistent("the linear part has no solution")
        new_sub: dict[Var, Expr] = {}
        solved = 0
        for var, row in pivots:
            if all(not k or k == (var,) for k in row):
                state.values[var] = -row.get((), ZERO)
                solved += 1
            else:
                new_sub[var] = {k: -v for k, v in row.items() if k != (var,)}
        progress = solved or len(new_sub) > len(sub)
        sub = new_sub
        eqs = [(ci, p) for ci, p, _ in open_]
        if not progress:
            return open_


# ---- branching ------------------------------------------------------------------------


def _univariate_roots(e: Expr) -> list[dict[Var, FieldElem]] | None:
    """Roots of a one-variable equation of degree <= 2, or None if more variables occur."""
    vs = _vars(e)
    if len(vs) != 1:
        return None
    (x,) = vs
    a, b, c = e.get((x, x), ZERO), e.get((x,), ZERO), e.get((), ZERO)
    if not a:
        return [{x: -c / b}]
    try:
        r = (b * b - 4 * a * c).sqrt()
    except NoRootInField:
        return []
    return [{x: z} for z in dict.fromkeys(((-b + r) / (2 * a), (-b - r) / (2 * a)))]


def _common_factor(e: Expr) -> tuple[Var, Expr] | None:
    """Split a homogeneous quadratic x * L into (x, L)."""
    if not e or any(len(k) != 2 for k in e):
        return None
    common = set.intersection(*(set(k) for k in e))
    if not common:
        return None
    x = min(common)
    rest: Expr = {}
    for k, v in e.items():
        kk = list(k)
        kk.remove(x)
        _expr_iadd(rest, {tuple(kk): v}, ONE)
    return x, rest


def _branch(state: _State, open_: list[tuple[int, int, Expr]]) -> list[_State] | None:
    """Children of a stuck state, or None if no equation can be split."""
    for ci, p, e in open_:
        roots = _univariate_roots(e)
        if roots is not None and _degree(e) == 2:
            children = []
            for r in roots:
                child = state.copy()
                child.values.update(r)
                children.append(child)
            return children
    for ci, p, e in open_:
        split = _common_factor(e)
        if split is not None:
            x, rest = split
            zero = state.copy()
            zero.values[x] = ZERO
            other = state.copy()
            other.extras.append(rest)
            return [zero, other]
    return None


@dataclass(frozen=True)
class Gauge:
    """Normalization of the variable-rescaling freedom left by WDVV.

    ``fixed`` pins coefficients to given values, ``equal`` identifies pairs of
    coefficients, and ``sign`` asks for the canonical sign (positive real part,
    else positive imaginary part) of one coefficient.
    """

    fixed: tuple[tuple[Var, FieldElem], ...] = ()
    equal: tuple[tuple[Var, Var], ...] = ()
    sign: Var | None = None
    rescaling: str = ""

    def relations(self) -> list[Expr]:
        out: list[Expr] = [{(v,): ONE, (): -c} for v, c in self.fixed]
        out += [{(a,): ONE, (b,): -ONE} for a, b in self.equal]
        return [{k: v for k, v in r.items() if v} for r in out]

    def admits(self, values: Mapping[Var, FieldElem]) -> bool:
        if self.sign is None or self.sign not in values:
            return True
        x = values[self.sign]
        return x.canonical_sign() == x

    def to_json(self) -> dict:
        name = lambda v: f"{v[0]}[t^{v[1]}]"
        return {
            "fixed": {name(v): str(c) for v, c in self.fixed},
            "equal": [[name(a), name(b)] for a, b in self.equal],
            "sign": name(self.sign) if self.sign else None,
            "rescaling": self.rescaling,
        }


GAUGES: dict[str, Gauge] = {
    "g1": Gauge(rescaling="none: the order-0/1 system already has a single solution"),
    "g2": Gauge(fixed=((("h3", 0), as_field(Fraction(-1, 128))),),
                rescaling="t_ab -> i t_ab, t_a3b -> -i t_a3b flips every h slot"),
    "g3": Gauge(equal=((("h1", 0), ("h2", 0)),), sign=("h1", 0),
                rescaling="t_b_y2 -> t_b_y2 / c, t_b_x2 -> c t_b_x2 scales h1/h2 by c^-4; t_aJ -> -t_aJ flips h1, h2"),
}

# Taylor coefficients t^0 .. t^(size-1) inspected while enumerating seeds; G3 only
# separates its three branches once the t^2 and t^3 equations are in.
SEED_SIZE = {"g1": 2, "g2": 2, "g3": 4}
SEED_ORDER = 1
_FILTER_ORDER = 4


@dataclass
class BranchSeed:
    group: str
    values: dict[Var, FieldElem]
    provenance: str = "enumerated"

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "provenance": self.provenance,
            "values": {f"{s}[t^{n}]": v.to_json() for (s, n), v in sorted(self.values.items())},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> BranchSeed:
        values = {}
        for key, v in data["values"].items():
            slot, rest = key.split("[t^")
            values[(slot, int(rest.rstrip("]")))] = FieldElem.from_json(v)
        return cls(data["group"], values, data.get("provenance", "user-supplied"))

    def __str__(self) -> str:
        parts = [f"{s}[t^{n}]={v}" for (s, n), v in sorted(self.values.items()) if v]
        return f"{self.group} seed: " + (", ".join(parts) or "all zero")


@dataclass
class Solution:
    group: str
    order: int
    slots: dict[str, Series]
    known: dict[str, Series]
    seed: BranchSeed
    gauge: Gauge

    def all_slots(self) -> dict[str, Series]:
        return {**self.known, **self.slots}

    def potential(self) -> Potential:
        from .catalog import _fjrw_potential, fjrw_cubic

        return _fjrw_potential(self.group, fjrw_cubic(self.group), self.all_slots(), self.order + 3)

    def parity_ok(self, tags: Mapping[str, str | None]) -> bool:
        # the zero series has every parity
        return all(tags.get(k) is None or v.is_zero() or v.parity() == tags[k] for k, v in self.slots.items())

    def to_json(self) -> dict:
        return {
            "group": self.group,
            "order": self.order,
            "seed": self.seed.to_json(),
            "gauge": self.gauge.to_json(),
            "slots": {k: v.to_json() for k, v in self.slots.items()},
        }


_SYSTEMS: dict[tuple[str, int], ConstraintSystem] = {}
on_change(_SYSTEMS.clear)


def _system(group: str, size: int) -> ConstraintSystem:
    """Constraint system whose known slots carry at least ``size`` coefficients."""
    order = max(size, 8)
    key = (group, order)
    if key not in _SYSTEMS:
        _SYSTEMS[key] = derive_constraints(group, order=order)
    return _SYSTEMS[key]


def enumerate_branches(group: str, gauge: Gauge | None = None) -> list[BranchSeed]:
    """All gauge-normalized order-0/1 seeds of the group's WDVV system.

    Depth-first search: propagate linear consequences, then split on a
    univariate quadratic or on a product ``x * L = 0``; anything else raises
    NonTriangular.  Leaves that do not extend to order 4 are discarded.
    """
    gauge = GAUGES[group] if gauge is None else gauge
    size = SEED_SIZE[group]
    system = _system(group, _FILTER_ORDER + 2)
    root = _State(system, size, extras=gauge.relations())
    leaves: list[dict[Var, FieldElem]] = []
    stack = [root]
    while stack:
        st = stack.pop()
        try:
            open_ = _propagate(st, st.equations())
        except Inconsistent:
            continue
        if any(_degree(e) == 2 for _, _, e in open_):
            children = _branch(st, [x for x in open_ if _degree(x[2]) == 2])
            if children is None:
                ci, p, _ = next(x for x in open_ if _degree(x[2]) == 2)
                raise NonTriangular(st.label(ci, p))
            stack.extend(reversed(children))
            continue
        if gauge.admits(st.values):
            leaves.append(st.values)
    seeds: list[BranchSeed] = []
    seen = set()
    for values in leaves:
        low = {k: v for k, v in values.items() if k[1] <= SEED_ORDER}
        key = tuple(sorted(low.items()))
        if key in seen:
            continue
        seen.add(key)
        seed = BranchSeed(group, low)
        try:
            solve(group, seed, _FILTER_ORDER, gauge)
        except (Inconsistent, GaugeAmbiguity, NonTriangular):
            continue
        seeds.append(seed)
    return seeds


def solve(group: str, seed: BranchSeed, order: int = 8, gauge: Gauge | None = None) -> Solution:
    """Extend a seed coefficient by coefficient.

    The slot series keep t^0 .. t^(order+2), the precision at which the
    potential's WDVV residual is certified below t^order (three orders go to
    the tau derivatives).  Each new power of t only adds equations linear in
    the new coefficients; quadratic equations stay open until lower data
    makes them linear.
    """
    gauge = GAUGES[group] if gauge is None else gauge
    prec = order + 3
    size = prec + 1
    system = _system(group, size)
    st = _State(system, 1, seed.values, gauge.relations())
    open_: list[tuple[int, int, Expr]] = []
    for s in range(1, size + 1):
        st.size = s
        fresh = [(ci, p) for ci, p in st.equations(s - 1) if p + system.constraints[ci].max_derivative == s - 1]
        open_ = _propagate(st, [(ci, p) for ci, p, _ in open_] + fresh)
    free = sorted({(slot, n) for slot in system.unknown for n in range(prec)} - st.values.keys())
    if free:
        low = min(n for _, n in free)
        quad = [x for x in open_ if _degree(x[2]) == 2 and any(v in free for v in _vars(x[2]))]
        if quad and not any(_degree(x[2]) == 1 and any(v[1] == low for v in _vars(x[2])) for x in open_):
            raise NonTriangular(st.label(quad[0][0], quad[0][1]))
        raise GaugeAmbiguity(low, [f"{s}[t^{n}]" for s, n in free if n == low])
    slots = {slot: Series({n: st.values[(slot, n)] for n in range(prec)}, prec=prec) for slot in system.unknown}
    known = {k: v.truncate(prec) for k, v in system.known.items()}
    return Solution(group, order, slots, known, seed, gauge)


def parity_filter(solutions: Sequence[Solution]) -> list[Solution]:
    """Keep solutions whose slots have the parity the selection rule assigns them."""
    out = []
    for sol in solutions:
        tags = {t.slot: t.parity for t in _ansatz_terms(sol.group, None)}
        if sol.parity_ok(tags):
            out.append(sol)
    return out


# catalog entries a group's solutions are compared with
REFERENCES = {"g1": ("e7g1",), "g2": ("e7g2_minus", "e7g2_plus"), "g3": ("e7g3", "second", "aux3")}


def _reference_slots(name: str, group: str, order: int) -> dict[str, Series]:
    from .catalog import build, g3_branch_entry

    P = g3_branch_entry("second", order).potential if name == "second" else build(name, order).potential
    out = {}
    for t in load_ansatz(group)["terms"]:
        exps = tuple(t["monomial"].get(v, 0) for v in P.var_names)
        out[t["slot"]] = P.coefficient(exps)
    return out


def catalog_diff(solution: Solution) -> dict:
    """Closest catalog entry and the slot coefficients (through t^order) that differ from it."""
    best = None
    for name in REFERENCES[solution.group]:
        ref = _reference_slots(name, solution.group, solution.order)
        diffs = []
        for slot, ser in solution.all_slots().items():
            for n in range(solution.order + 1):
                if ser[n] != ref[slot][n]:
                    diffs.append({"slot": slot, "power": n, "solved": str(ser[n]), "catalog": str(ref[slot][n])})
        if best is None or len(diffs) < len(best["differences"]):
            best = {"entry": name, "matches": not diffs, "differences": diffs[:10]}
    return best


def reconstruct(group: str, order: int = 8, seeds: Sequence[BranchSeed] | None = None) -> list[Solution]:
    """Enumerate (or take) seeds and solve each one through t^order."""
    if group not in GAUGES:
        raise ValueError(f"no reconstruction for group {group!r}")
    seeds = enumerate_branches(group) if seeds is None else seeds
    return [solve(group, seed, order) for seed in seeds]
