"""FJRW combinatorics for W = x^4 + y^4 + z^2: diagonal symmetry groups,
sectors, state spaces, quartic ansatz generation and the genus-zero
four-point Chiodo integral.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Iterable, Sequence

from .algebra import FieldElem
from .report import CheckReport
from .store import read_fixture

__all__ = [
    "WEIGHTS",
    "EXPONENTS",
    "GroupElement",
    "Sector",
    "State",
    "AnsatzTerm",
    "Ansatz",
    "BroadInsertion",
    "GROUPS",
    "J",
    "chat",
    "enumerate_group",
    "group",
    "sector_data",
    "state_basis",
    "allowed_monomials",
    "selection_ok",
    "bernoulli2",
    "chiodo_fourpoint",
    "load_states",
    "load_ansatz",
    "ansatz_check",
]

WEIGHTS = (Fraction(1, 4), Fraction(1, 4), Fraction(1, 2))
EXPONENTS = (4, 4, 2)
COORDS = ("x", "y", "z")


class BroadInsertion(ValueError):
    """The Chiodo formula is only available for narrow insertions."""


def _frac(x) -> Fraction:
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True, order=True)
class GroupElement:
    thetas: tuple[Fraction, Fraction, Fraction]

    def __init__(self, *thetas) -> None:
        if len(thetas) == 1 and not isinstance(thetas[0], (int, Fraction, str)):
            thetas = tuple(thetas[0])
        object.__setattr__(self, "thetas", tuple(_frac(Fraction(t)) for t in thetas))

    def __add__(self, other: GroupElement) -> GroupElement:
        return GroupElement(*(a + b for a, b in zip(self.thetas, other.thetas)))

    __mul__ = __add__

    def __neg__(self) -> GroupElement:
        return GroupElement(*(-a for a in self.thetas))

    def inverse(self) -> GroupElement:
        return -self

    def power(self, n: int) -> GroupElement:
        return GroupElement(*(a * n for a in self.thetas))

    @property
    def order(self) -> int:
        return reduce(lcm, (t.denominator for t in self.thetas), 1)

    def is_identity(self) -> bool:
        return not any(self.thetas)

    def key(self) -> str:
        return ",".join(str(t) for t in self.thetas)

    def __repr__(self) -> str:
        return f"GroupElement({self.key()})"


J = GroupElement(*WEIGHTS)
IDENTITY = GroupElement(0, 0, 0)


def chat(weights: Sequence[Fraction] = WEIGHTS) -> Fraction:
    return sum((1 - 2 * q for q in weights), Fraction(0))


def enumerate_group(generators: Iterable[GroupElement]) -> list[GroupElement]:
    """Closure of the generators under componentwise addition mod 1."""
    gens = [g if isinstance(g, GroupElement) else GroupElement(*g) for g in generators]
    seen = {IDENTITY}
    frontier = [IDENTITY]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                k = h + g
                if k not in seen:
                    seen.add(k)
                    nxt.append(k)
        frontier = nxt
    return sorted(seen)


GROUPS = {
    "g1": [GroupElement("1/4", "1/4", 0), GroupElement(0, "1/2", 0), GroupElement(0, 0, "1/2")],
    "g2": [GroupElement("1/4", "1/4", "1/2"), GroupElement(0, "1/2", 0)],
    "g3": [GroupElement("1/4", "1/4", 0), GroupElement(0, 0, "1/2")],
    "gmax": [GroupElement("1/4", 0, 0), GroupElement(0, "1/4", 0), GroupElement(0, 0, "1/2")],
}


def group(name: str) -> list[GroupElement]:
    return enumerate_group(GROUPS[name])


@dataclass(frozen=True)
class Sector:
    h: GroupElement
    fix_coords: tuple[str, ...]
    N_h: int
    iota: Fraction
    deg_W: Fraction
    narrow: bool
    basis_forms: tuple[tuple[int, int, int], ...]


def _invariant_forms(h: GroupElement, G: Sequence[GroupElement]) -> list[tuple[int, int, int]]:
    fixed = [t == 0 for t in h.thetas]
    ranges = [range(e - 1) if on else range(1) for e, on in zip(EXPONENTS, fixed)]
    forms = []
    for form in itertools.product(*ranges):
        if all(_frac(sum(t * (e + 1) for t, e, on in zip(g.thetas, form, fixed) if on)) == 0 for g in G):
            forms.append(tuple(form))
    return forms


def sector_data(h: GroupElement, weights: Sequence[Fraction] = WEIGHTS, G: Sequence[GroupElement] | None = None) -> Sector:
    """Degree data of the h-sector and its G-invariant forms (all of G_max's forms if G is None)."""
    fix = tuple(c for c, t in zip(COORDS, h.thetas) if t == 0)
    n_h = len(fix)
    iota = sum((t - q for t, q in zip(h.thetas, weights)), Fraction(0))
    G = list(G) if G is not None else [h]
    forms = tuple(_invariant_forms(h, G)) if n_h else ((0, 0, 0),)
    return Sector(h, fix, n_h, iota, n_h + 2 * iota, n_h == 0, forms)


def form_label(form: Sequence[int]) -> str:
    parts = []
    for c, e in zip(COORDS, form):
        if e:
            parts.append(c if e == 1 else f"{c}^{e}")
    return "".join(parts) or "1"


@dataclass(frozen=True)
class State:
    sector: Sector
    form: tuple[int, int, int]
    label: str = ""
    var: str = ""

    @property
    def h(self) -> GroupElement:
        return self.sector.h

    @property
    def grade(self) -> Fraction:
        return 1 - self.sector.deg_W / 2

    @property
    def narrow(self) -> bool:
        return self.sector.narrow

    def character(self, g: GroupElement) -> Fraction:
        """Phase of g on the state; narrow states carry the trivial action."""
        if self.narrow:
            return Fraction(0)
        fixed = [t == 0 for t in self.h.thetas]
        return _frac(sum(t * (e + 1) for t, e, on in zip(g.thetas, self.form, fixed) if on))


def load_states() -> dict:
    return read_fixture("fjrw", "states")


def state_basis(name: str, weights: Sequence[Fraction] = WEIGHTS) -> list[State]:
    """All states of (W, G_name), labelled through the recorded name map."""
    G = group(name)
    names = load_states().get(name, {}).get("states", [])
    lookup = {(s["h"], s["form"]): s for s in names}
    out = []
    for h in G:
        sec = sector_data(h, weights, G)
        for form in sec.basis_forms:
            entry = lookup.get((h.key(), form_label(form)), {})
            out.append(State(sec, form, entry.get("label", ""), entry.get("var", "")))
    out.sort(key=lambda s: (s.sector.deg_W, s.h.thetas, s.form))
    return out


# ---- selection rule and ansatz ---------------------------------------------------


def selection_ok(thetas: Iterable[GroupElement], n: int | None = None, weights=WEIGHTS, genus: int = 0) -> bool:
    hs = list(thetas)
    n = len(hs) if n is None else n
    for k, q in enumerate(weights):
        if _frac(q * (2 * genus - 2 + n) - sum(h.thetas[k] for h in hs)) != 0:
            return False
    return True


def _allowed_residues(hs: Sequence[GroupElement], mod: GroupElement, weights=WEIGHTS) -> set[int]:
    period = reduce(lcm, ((q - t).denominator for q, t in zip(weights, mod.thetas)), 1)
    return {m for m in range(period) if selection_ok(list(hs) + [mod] * m, weights=weights)}


@dataclass(frozen=True)
class AnsatzTerm:
    monomial: tuple[tuple[str, int], ...]
    parity: str | None
    slot: str = ""

    def as_dict(self) -> dict[str, int]:
        return dict(self.monomial)


@dataclass
class Ansatz:
    group: str
    unit: str
    modular: str
    terms: list[AnsatzTerm] = field(default_factory=list)

    def monomials(self) -> set[tuple[tuple[str, int], ...]]:
        return {t.monomial for t in self.terms}

    def by_slot(self) -> dict[str, AnsatzTerm]:
        return {t.slot: t for t in self.terms}

    def __len__(self) -> int:
        return len(self.terms)


def _monomial_key(states: Sequence[State]) -> tuple[tuple[str, int], ...]:
    counts: dict[str, int] = {}
    for s in states:
        counts[s.var] = counts.get(s.var, 0) + 1
    return tuple(sorted(counts.items()))


def allowed_monomials(name: str, max_nonmodular_degree: int = 4, gw_invariant: bool | None = None,
                      weights=WEIGHTS) -> Ansatz:
    """Monomials of grade 3 - chat in the non-unit, non-modular states passing the selection rule.

    The parity tag records which numbers of extra modular insertions the
    selection rule admits.  ``gw_invariant`` additionally requires the product
    of the G_max characters of the broad forms to be trivial; ``None`` uses the
    recorded setting of the group's ansatz fixture.
    """
    basis = state_basis(name, weights)
    unit = next(s for s in basis if s.h == J)
    mod = next(s for s in basis if s.h == J.inverse())
    others = [s for s in basis if s is not unit and s is not mod]
    if gw_invariant is None:
        gw_invariant = load_ansatz(name).get("gw_invariant", False)
    gmax = GROUPS["gmax"]
    target = 3 - chat(weights)
    slots = {tuple(sorted(t["monomial"].items())): t["slot"] for t in load_ansatz(name).get("terms", [])}
    terms = []
    seen = set()
    for size in range(1, max_nonmodular_degree + 1):
        for combo in itertools.combinations_with_replacement(others, size):
            if sum((s.grade for s in combo), Fraction(0)) != target:
                continue
            residues = _allowed_residues([s.h for s in combo], mod.h, weights)
            if not residues:
                continue
            if gw_invariant and any(_frac(sum(s.character(g) for s in combo)) != 0 for g in gmax):
                continue
            key = _monomial_key(combo)
            if key in seen:
                continue
            seen.add(key)
            parity = {frozenset({0}): "even", frozenset({1}): "odd"}.get(frozenset(residues))
            terms.append(AnsatzTerm(key, parity, slots.get(key, "")))
    return Ansatz(name, unit.var, mod.var, terms)


def load_ansatz(name: str) -> dict:
    return read_fixture("fjrw", f"ansatz_{name}", missing_ok=True)


def ansatz_check(name: str) -> CheckReport:
    """Generated ansatz against the stored term list of the group."""
    gen = allowed_monomials(name)
    stored = {tuple(sorted(t["monomial"].items())): t["slot"] for t in load_ansatz(name).get("terms", [])}
    fmt = lambda key: "*".join(v if e == 1 else f"{v}^{e}" for v, e in key)
    rep = CheckReport(f"ansatz:{name}", True, {
        "unit": gen.unit,
        "modular": gen.modular,
        "terms": [{"slot": t.slot, "monomial": fmt(t.monomial), "parity": t.parity} for t in gen.terms],
        "generated": len(gen),
        "stored": len(stored),
    })
    for key in sorted(gen.monomials() - stored.keys()):
        rep.failures.append({"slot": "", "expected": "absent", "got": fmt(key)})
    for key in sorted(stored.keys() - gen.monomials()):
        rep.failures.append({"slot": stored[key], "expected": fmt(key), "got": "absent"})
    rep.passed = not rep.failures
    return rep


# ---- four-point Chiodo integral ------------------------------------------------------


def bernoulli2(x) -> Fraction:
    x = Fraction(x)
    return x * x - x + Fraction(1, 6)


_SPLITTINGS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def chiodo_fourpoint(hs: Sequence[GroupElement], weights=WEIGHTS) -> FieldElem:
    """Genus-zero four-point class integrated over M_{0,4} (kappa_1, psi_j, boundary each give 1).

    For concave narrow insertions the class is c_1(R^1 pi_* L) = -ch_1(R pi_* L), with ch_1 from
    the Chiodo formula.
    """
    hs = list(hs)
    if len(hs) != 4:
        raise ValueError("exactly four insertions")
    if any(0 in h.thetas for h in hs):
        raise BroadInsertion("all four insertions must be narrow")
    if not selection_ok(hs, weights=weights):
        return FieldElem(0)
    # rank of R^1 pi_* L_i is -(deg L_i + 1); the class has degree n - 3 = 1
    ranks = [-(q * 2 - sum(h.thetas[i] for h in hs)) - 1 for i, q in enumerate(weights)]
    if sum(ranks) != 1:
        return FieldElem(0)
    total = Fraction(0)
    for i, q in enumerate(weights):
        total += bernoulli2(q)
        total -= sum(bernoulli2(h.thetas[i]) for h in hs)
        for (a, b), _ in _SPLITTINGS:
            total += bernoulli2(_frac(q - hs[a].thetas[i] - hs[b].thetas[i]))
    return FieldElem(-total / 2)
