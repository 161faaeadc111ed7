"""Concrete genus-zero potentials, the linear maps between them and the
composite CY/LG pipelines.

tau-mode entries are series in the modular variable t built on the rational
Halphen triple with X(0) = (1/4, 0, -1/4); ``build(name, order)`` keeps them
exact below t^(order + 3), enough to certify WDVV below t^order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from typing import TYPE_CHECKING, Callable, Mapping

from .algebra import I, SQRT2, FieldElem, Series, as_field
from .cohft import (
    Q,
    TAU,
    Potential,
    change_vars,
    extract_triple,
    grading_check,
    grading_rescale,
    p2222_potential,
    wdvv_residual,
)
from .fjrw import chiodo_fourpoint, load_ansatz, selection_ok, state_basis
from .halphen import FIXTURE_SEEDS, HalphenTriple, derived_structure, is_solution, psi_triple, x_tau0_omega0
from .qmodular import gw442_xyzw
from .report import CheckReport
from .store import on_change, read_fixture

if TYPE_CHECKING:
    from .numerics import PreciseComplex

__all__ = [
    "ENTRY_NAMES",
    "MAP_NAMES",
    "CatalogEntry",
    "LinearMap",
    "UnknownName",
    "CheckReport",
    "build",
    "change_map",
    "fixture_triple",
    "cylg_check",
    "concave_restriction_check",
    "g2_branch_check",
    "g2_branch_relation_check",
    "givental_data",
    "MatrixData",
    "rational_form",
    "SLOT_PERMUTATIONS",
    "FJRW_QUADRATIC",
    "fjrw_cubic",
    "g3_branch_entry",
    "g3_irrationality_check",
    "chiodo_selection_check",
    "wdvv_check",
    "perturbed_template_check",
    "concave_restriction_check",
]

F = Fraction
HALF = F(1, 2)


class UnknownName(KeyError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    potential: Potential
    source: str
    seeds: Mapping[str, str] = field(default_factory=dict)

    @property
    def field(self) -> set[str]:
        return self.potential.coefficient_field()

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "source": self.source,
            "seeds": dict(self.seeds),
            "coefficient_field": sorted(self.field),
            "potential": self.potential.to_json(),
        }


# ---- shared series -------------------------------------------------------------


@lru_cache(maxsize=None)
def fixture_triple(prec: int) -> HalphenTriple:
    return x_tau0_omega0(prec)


@lru_cache(maxsize=None)
def _derived(prec: int):
    return derived_structure(fixture_triple(prec), FIXTURE_SEEDS)


def _lin(X: HalphenTriple, c2, c3, c4) -> Series:
    return X.X2.scale(F(c2)) + X.X3.scale(F(c3)) + X.X4.scale(F(c4))


def _xyw(D, xx=0, xy=0, yy=0, w=0) -> Series:
    """xx x^2 + xy x y + yy y^2 + w w in the derived x0, y0, w0."""
    x, y = D.x0, D.y0
    return (x * x).scale(F(xx)) + (x * y).scale(F(xy)) + (y * y).scale(F(yy)) + D.w0.scale(F(w))


def _grades(group: str) -> dict[str, Fraction]:
    return {s.var: s.grade for s in state_basis(group)}


def _tau_cubic(unit: str, quadratic: list[tuple[str, object]]) -> list:
    terms = [(f"{unit}^2", Series({1: HALF}))]
    terms += [(f"{unit}*{m}", c) for m, c in quadratic]
    return terms


# ---- P^1_{2,2,2,2} -----------------------------------------------------------------


def _p2222_formal(order: int) -> CatalogEntry:
    X = psi_triple(order)
    P = p2222_potential(X.X4, X.X2, X.X3, mode=Q, prec=order)
    return CatalogEntry("p2222_formal", P, "P^1_{2,2,2,2} potential on (psi2, psi3, psi4)(q^2), q-form")


def _p2222_template(order: int) -> CatalogEntry:
    X = fixture_triple(order + 3)
    P = p2222_potential(X.X4, X.X2, X.X3, mode=TAU)
    return CatalogEntry("p2222_template", P, "P^1_{2,2,2,2} template on the rational Halphen triple")


# ---- P^1_{4,4,2} -------------------------------------------------------------------

P442_NAMES = ("t0", "t-1", "t1", "t2", "t3", "t4", "t5", "t6", "t7")
P442_GRADES = dict(zip(P442_NAMES, map(F, (1, 0, "3/4", "1/2", "1/4", "3/4", "1/2", "1/4", "1/2"))))


@lru_cache(maxsize=1)
def _p442_data() -> dict:
    return read_fixture("catalog", "p442")


def _p442(xyzw, mode: str, prec) -> Potential:
    vals = dict(zip("xyzw", xyzw))
    powers: dict[str, Series] = {}

    def mono(m: str) -> Series:
        if m not in powers:
            s = Series.constant(1)
            if m != "1":
                for factor in m.split("*"):
                    v, _, e = factor.partition("^")
                    s = s * vals[v] ** int(e or 1)
            powers[m] = s.truncate(prec)
        return powers[m]

    terms = []
    for t in _p442_data()["terms"]:
        c = Series.zero()
        for m, v in t["coefficient"].items():
            c = c + mono(m).scale(F(v))
        mon = dict(t["monomial"])
        if mode == TAU and "t-1" in mon:
            c = c * Series({mon.pop("t-1"): 1})
        terms.append((mon, c))
    return Potential.from_terms(P442_NAMES, "t0", "t-1", mode, terms, prec, P442_GRADES)


def _p442_q(order: int) -> CatalogEntry:
    P = _p442(gw442_xyzw(order), Q, order)
    return CatalogEntry("p442_q", P, "P^1_{4,4,2} potential with theta/Eisenstein x, y, z, w, q-form")


def _p442_template(order: int) -> CatalogEntry:
    D = _derived(order + 3)
    P = _p442(tuple(D), TAU, order + 3)
    return CatalogEntry("p442_template", P, "P^1_{4,4,2} potential on x0, y0, z0, w0 of the rational triple",
                        {"X2-X4": "sqrt2/2", "X2-X3": "1/2", "X3-X4": "1/2"})


# ---- FJRW potentials ------------------------------------------------------------------


def _e7gmax(order: int) -> CatalogEntry:
    base = _p442_template(order).potential
    m = change_map("gmax")
    P = m.apply(base)
    return CatalogEntry("e7gmax", P, "(E7~, G_max) potential: P^1_{4,4,2} template in the r_ij coordinates",
                        {"X2-X4": "sqrt2/2", "X2-X3": "1/2", "X3-X4": "1/2"})


def _fjrw_potential(group: str, cubic: list, slots: Mapping[str, Series], prec: int) -> Potential:
    ans = load_ansatz(group)
    by_slot = {t["slot"]: t["monomial"] for t in ans["terms"]}
    terms = list(cubic)
    for slot, series in slots.items():
        terms.append((by_slot[slot], series))
    names = [s.var for s in state_basis(group)]
    return Potential.from_terms(names, ans["unit"], ans["modular"], TAU, terms, prec, _grades(group))


# unit and quadratic part of the cubic term t_unit * (pairing) for each FJRW group
FJRW_QUADRATIC = {
    "g1": ("t_J", [("t_aJ^2", HALF), ("t_bJ*t_a2bJ", 1), ("t_c_xy^2", F(1, 32))]),
    "g2": ("t_a", [("t_ab*t_a3b", 1), ("t_b_x^2", F(1, 16)), ("t_a2b_xy^2", F(1, 32))]),
    "g3": ("t_J", [("t_aJ^2", HALF), ("t_b_xy^2", F(1, 32)), ("t_b_x2*t_b_y2", F(1, 16))]),
}


def fjrw_cubic(group: str) -> list:
    return _tau_cubic(*FJRW_QUADRATIC[group])


def _e7g1(order: int) -> CatalogEntry:
    N = order + 3
    D = _derived(N)
    cubic = fjrw_cubic("g1")
    f03 = _xyw(D, xx=F(-1, 8), xy=F(-1, 4), yy=F(-1, 8))
    f11 = _xyw(D, xx=F(-1, 48), xy=F(1, 8), yy=F(-1, 48))
    h = _xyw(D, xx=F(1, 128), xy=F(1, 64), yy=F(1, 128))
    slots = {
        "g1": _xyw(D, xx=F(1, 3072), w=F(-1, 2048), yy=F(-1, 6144)),
        "g2": _xyw(D, xx=F(1, 64), xy=F(1, 32), yy=F(-1, 64), w=F(-1, 32)),
        "g5": _xyw(D, xy=F(-1, 32), xx=F(1, 64), w=F(-1, 64)),
        "h1": h,
        "h2": h,
        "f03": f03,
        "f04": f03,
        "f11": f11,
        "f12": _xyw(D, w=HALF * -1, xx=F(3, 8), xy=F(-1, 4), yy=F(-1, 8)),
        "f13": f11,
        "f14": _xyw(D, w=HALF * -1, xx=F(1, 4), xy=HALF, yy=F(-1, 4)),
        "f15": _xyw(D, w=F(-1, 8), xx=F(1, 12), yy=F(-1, 24)),
    }
    P = _fjrw_potential("g1", cubic, slots, N)
    return CatalogEntry("e7g1", P, "(E7~, G1) potential in x0, y0, w0 of the rational triple",
                        {"X2-X4": "sqrt2/2", "X2-X3": "1/2"})


def _e7g2(order: int, sign: int) -> CatalogEntry:
    N = order + 3
    X = fixture_triple(N)
    cubic = fjrw_cubic("g2")
    f1 = _lin(X, F(-1, 48), F(2, 48), F(-1, 48))
    f2 = _lin(X, F(-1, 8), F(-2, 8), F(-1, 8))
    if sign > 0:
        d = X.X2 - X.X4  # sqrt((X2 - X4)^2) resolved as +(X2 - X4)
        slots = {
            "g1": _lin(X, F(-1, 1536), F(-1, 1536), F(-1, 1536)),
            "g2": X.X3.scale(F(-1, 512)),
            "g3": _lin(X, F(-1, 6144), F(-1, 6144), F(-1, 6144)),
            "g4": _lin(X, F(-1, 32), 0, F(-1, 32)),
            "g5": _lin(X, F(-1, 64), 0, F(-1, 64)),
            "h1": d.scale(F(-1, 64)),
            "h3": d.scale(F(-1, 64)),
            "h2": d.scale(F(1, 128)),
            "h4": d.scale(F(1, 128)),
        }
        seeds, name, label = {}, "e7g2_plus", "c = 1"
    else:
        S = ((X.X2 - X.X3) * (X.X3 - X.X4)).sqrt(F(1, 4))
        slots = {
            "g1": _lin(X, F(-1, 3072), F(-4, 3072), F(-1, 3072)),
            "g2": _lin(X, F(-1, 1024), 0, F(-1, 1024)),
            "g3": _lin(X, F(-1, 12288), F(-4, 12288), F(-1, 12288)),
            "g4": X.X3.scale(F(-1, 16)),
            "g5": X.X3.scale(F(-1, 32)),
            "h1": S.scale(F(1, 32)),
            "h3": S.scale(F(-1, 32)),
            "h4": S.scale(F(1, 64)),
            "h2": S.scale(F(-1, 64)),
        }
        seeds, name, label = {"(X2-X3)(X3-X4)": "1/4"}, "e7g2_minus", "c = -1"
    slots.update({"f11": f1, "f13": f1, "f12": f2})
    P = _fjrw_potential("g2", cubic, slots, N)
    return CatalogEntry(name, P, f"(E7~, G2) potential, WDVV branch {label}", seeds)


# p-branches of the G3 reconstruction: distinguished index b with g7 = -X_b/32
_G3_BRANCHES = {
    "p0": (3, lambda X: (X.X3 - X.X2) * (X.X3 - X.X4), FieldElem(0, F(1, 4))),
    "second": (2, lambda X: (X.X2 - X.X3) * (X.X2 - X.X4), FieldElem(0, 0, F(1, 4))),
    "aux3": (4, lambda X: (X.X2 - X.X4) * (X.X3 - X.X4), FieldElem(0, 0, F(1, 4))),
}


def g3_slots(X: HalphenTriple, branch: str = "p0") -> dict[str, Series]:
    """All ten G3 coefficient functions on a triple for one of the three p-branches (c = 1)."""
    b, radicand, seed = _G3_BRANCHES[branch]
    total = X.X2 + X.X3 + X.X4
    g7 = X[b].scale(F(-1, 32))
    g5 = (total - X[b].scale(3)).scale(F(1, 12288))
    h = radicand(X).sqrt(seed).scale(F(1, 128))
    return {
        "g1": g5,
        "g2": (g7 - g5.scale(128)).scale(F(1, 64)),
        "g3": g7.scale(F(1, 16)),
        "g4": g7.scale(F(1, 16)) - g5.scale(6),
        "g5": g5,
        "g6": g7.scale(HALF),
        "g7": g7,
        "h1": h,
        "h2": h,
        "f11": total.scale(F(-1, 24)),
    }


G3_CUBIC = fjrw_cubic("g3")


def g3_branch_entry(branch: str, order: int = 8) -> CatalogEntry:
    """The G3 WDVV solution of one p-branch: "p0" (FJRW), "second" or "aux3"."""
    if branch not in _G3_BRANCHES:
        raise UnknownName(branch)
    return _e7g3(order, branch)


def _e7g3(order: int, branch: str = "p0") -> CatalogEntry:
    N = order + 3
    X = fixture_triple(N)
    P = _fjrw_potential("g3", G3_CUBIC, g3_slots(X, branch), N)
    name = "e7g3" if branch == "p0" else branch
    seed = {"p0": "i/4", "second": "sqrt2/4", "aux3": "sqrt2/4"}[branch]
    return CatalogEntry(name, P, f"(E7~, G3) WDVV solution, branch {branch}, c = 1", {"h radicand": seed})


_BUILDERS: dict[str, Callable[[int], CatalogEntry]] = {
    "p2222_formal": _p2222_formal,
    "p2222_template": _p2222_template,
    "p442_q": _p442_q,
    "p442_template": _p442_template,
    "e7gmax": _e7gmax,
    "e7g1": _e7g1,
    "e7g2_plus": lambda n: _e7g2(n, 1),
    "e7g2_minus": lambda n: _e7g2(n, -1),
    "e7g3": _e7g3,
    "aux3": lambda n: _e7g3(n, "aux3"),
}

ENTRY_NAMES = tuple(_BUILDERS)


@lru_cache(maxsize=64)
def build(name: str, order: int = 8) -> CatalogEntry:
    if name not in _BUILDERS:
        raise UnknownName(name)
    if order < 4:
        raise ValueError("order must be at least 4")
    return _BUILDERS[name](order)


@on_change
def _clear_caches() -> None:
    build.cache_clear()
    _p442_data.cache_clear()


# ---- linear maps -----------------------------------------------------------------------


@dataclass(frozen=True)
class LinearMap:
    """old variable -> linear form in the new variables."""

    name: str
    images: Mapping[str, Mapping[str, FieldElem]]
    new_names: tuple[str, ...] | None = None
    unit: str | None = None
    modular: str | None = None

    def apply(self, P: Potential) -> Potential:
        return change_vars(P, self.images, self.new_names, self.unit, self.modular)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "images": {o: {n: c.to_json() for n, c in img.items()} for o, img in self.images.items()},
            "new_names": list(self.new_names) if self.new_names else None,
        }


def _map(name, images, new_names=None, unit=None, modular=None) -> LinearMap:
    conv = {o: {n: FieldElem(c) if not isinstance(c, FieldElem) else c for n, c in img.items()}
            for o, img in images.items()}
    return LinearMap(name, conv, tuple(new_names) if new_names else None, unit, modular)


P2222 = ("t0", "t-1", "t1", "t2", "t3", "t4")
R2 = SQRT2
IR2 = I * SQRT2


def _gmax_map() -> LinearMap:
    names = tuple(s.var for s in state_basis("gmax"))
    images = {
        "t0": {"t_r11": 1},
        "t-1": {"t_r33": 1},
        "t1": {"t_r12": IR2, "t_r21": -IR2},
        "t2": {"t_r13": -1, "t_r22": R2, "t_r31": -1},
        "t3": {"t_r23": IR2, "t_r32": -IR2},
        "t4": {"t_r12": R2, "t_r21": R2},
        "t5": {"t_r13": 1, "t_r22": R2, "t_r31": 1},
        "t6": {"t_r23": R2, "t_r32": R2},
        "t7": {"t_r13": I, "t_r31": -I},
    }
    return _map("gmax", images, names, "t_r11", "t_r33")


def _g1_map() -> LinearMap:
    images = {
        "t_J": {"t0": 1},
        "t_a2J": {"t-1": 1},
        "t_aJ": {"t1": R2 / 2},
        "t_bJ": {"t2": HALF, "t3": I / 2},
        "t_a2bJ": {"t2": HALF, "t3": -I / 2},
        "t_c_xy": {"t4": 2 * R2},
    }
    return _map("g1", images, P2222, "t0", "t-1")


def _g2_map() -> LinearMap:
    images = {
        "t_a": {"t0": 1},
        "t_a3": {"t-1": 1},
        "t_ab": {"t1": HALF, "t2": I / 2},
        "t_a3b": {"t1": HALF, "t2": -I / 2},
        "t_a2b_xy": {"t3": 2 * R2},
        "t_b_x": {"t4": 2},
    }
    return _map("g2", images, P2222, "t0", "t-1")


def _g3_map() -> LinearMap:
    images = {
        "t_J": {"t0": 1},
        "t_a2J": {"t-1": 1},
        "t_aJ": {"t1": HALF, "t3": -HALF},
        "t_b_x2": {"t2": 2, "t4": 2 * I},
        "t_b_xy": {"t1": 2, "t3": 2},
        "t_b_y2": {"t2": 2, "t4": -2 * I},
    }
    return _map("g3", images, P2222, "t0", "t-1")


def g2_swap_map(K: FieldElem = I) -> LinearMap:
    """The displayed rescaling t^- = c t^+ between the two G2 branches, as a substitution into F^-."""
    K = as_field(K)
    images = {
        "t_a": {"t_a": K.inv() ** 2},
        "t_a3": {"t_a3": K**2},
        "t_ab": {"t_ab": (1 - I) * K / R2},
        "t_a3b": {"t_a3b": (1 + I) * K / R2},
        "t_a2b_xy": {"t_a2b_xy": K},
        "t_b_x": {"t_b_x": K},
    }
    return _map("g2_branch_swap", images)


_MAPS: dict[str, Callable[[], LinearMap]] = {
    "gmax": _gmax_map,
    "g1": _g1_map,
    "g2": _g2_map,
    "g3": _g3_map,
    "g2_branch_swap": g2_swap_map,
}
MAP_NAMES = tuple(_MAPS)


def change_map(name: str) -> LinearMap:
    if name not in _MAPS:
        raise UnknownName(name)
    return _MAPS[name]()


# ---- composite checks ---------------------------------------------------------------


# fixture index feeding each template slot after the CY/LG change
SLOT_PERMUTATIONS = {
    "g1": {"A": 2, "B": 4, "C": 3},
    "g2": {"A": 3, "B": 4, "C": 2},
}

_GROUP_ENTRY = {"g1": "e7g1", "g2": "e7g2_plus", "g3": "e7g3"}


def cylg_check(group: str, order: int = 8, digits: int = 40, numeric: bool = True) -> CheckReport:
    """FJRW entry -> CY/LG change -> template extraction -> Halphen and slot comparison.

    For g3 the extracted initial values are compared with the numeric
    SL(2, C) transport unless ``numeric`` is off.
    """
    if group not in _GROUP_ENTRY:
        raise UnknownName(group)
    entry = build(_GROUP_ENTRY[group], order)
    P = change_map(group).apply(entry.potential)
    match = extract_triple(P)
    rep = CheckReport(f"cylg:{group}", False, {"order": order})
    if not match.matched:
        rep.failures.append({"slot": "template", "expected": "P^1_{2,2,2,2} shape", "got": match.failure})
        return rep
    triple = match.triple
    halphen = is_solution(triple)
    rep.details["halphen"] = halphen
    if not halphen:
        rep.failures.append({"slot": "triple", "expected": "Halphen solution", "got": "nonzero residual"})
    if group in SLOT_PERMUTATIONS:
        perm = SLOT_PERMUTATIONS[group]
        X = fixture_triple(order + 3)
        rep.details["slots"] = {k: f"X{v}" for k, v in perm.items()}
        rep.details["permutation"] = "(" + ", ".join(f"X{perm[k]}" for k in "ABC") + ")"
        for slot, k in perm.items():
            got = match.slots[slot]
            if not got.agrees_with(X[k]):
                rep.failures.append({"slot": slot, "expected": f"X{k}", "got": str(got[0])})
    elif numeric:
        from .numerics import g3_transport_check

        values = triple.initial_values()
        num = g3_transport_check(values, digits)
        rep.details["initial_values"] = [v.to_json() for v in values]
        rep.details["numeric"] = num.to_json()
        if not num.passed:
            rep.failures.append({"slot": "initial values", "expected": "A^(tau3, omega3) transport",
                                 "got": num.to_json()})
    rep.passed = not rep.failures
    return rep


def _narrow_identification(group: str) -> dict[str, str]:
    gmax = {s.h: s.var for s in state_basis("gmax")}
    return {s.var: gmax[s.h] for s in state_basis(group) if s.narrow}


def concave_restriction_check(group: str, order: int = 8) -> CheckReport:
    """Narrow-only part of e7g_k against the corresponding part of e7gmax."""
    if group not in _GROUP_ENTRY:
        raise UnknownName(group)
    ident = _narrow_identification(group)
    P = build(_GROUP_ENTRY[group], order).potential
    G = build("e7gmax", order).potential
    prec = min(P.prec, G.prec)

    def narrow_terms(pot, allowed, rename):
        out = {}
        for mono, s in pot.terms.items():
            used = {pot.var_names[k]: e for k, e in enumerate(mono) if e}
            if all(v in allowed for v in used):
                key = tuple(sorted((rename.get(v, v), e) for v, e in used.items()))
                out[key] = s.truncate(prec)
        return out

    mine = narrow_terms(P, set(ident), ident)
    theirs = narrow_terms(G, set(ident.values()), {})
    rep = CheckReport(f"concave:{group}", True, {"identification": ident, "monomials": len(theirs)})
    for key in sorted(set(mine) | set(theirs)):
        a = mine.get(key, Series.zero(prec))
        b = theirs.get(key, Series.zero(prec))
        if not (a - b).is_zero():
            rep.passed = False
            rep.failures.append({"slot": "*".join(f"{v}^{e}" for v, e in key),
                                 "expected": b.to_json(), "got": a.to_json()})
    return rep


def chiodo_selection_check(group: str, order: int = 8) -> CheckReport:
    """Chiodo's integral vanishes on every narrow quadruple the selection rule forbids,
    and so does the matching coefficient of the catalog potential.  On quadruples free of
    the unit and the modular variable the integral equals the constant coefficient times
    the automorphism factor, whether or not the selection rule holds."""
    entry = {**_GROUP_ENTRY, "gmax": "e7gmax"}.get(group)
    if entry is None:
        raise UnknownName(group)
    P = build(entry, order).potential
    narrow = [s for s in state_basis(group) if s.narrow]
    unit, mod = P.var_names[P.unit], P.var_names[P.modular]
    rep = CheckReport(f"chiodo:{group}", True, {"violating": 0, "compared_with_catalog": 0, "four_point": 0})
    for combo in itertools.combinations_with_replacement(narrow, 4):
        hs = [s.h for s in combo]
        names = [s.var for s in combo]
        label = "*".join(names)
        value = chiodo_fourpoint(hs)
        counts = tuple(names.count(v) for v in P.var_names)
        if unit not in names and mod not in names:
            rep.details["four_point"] += 1
            c = P.coefficient(counts)[0] * prod(factorial(e) for e in counts)
            if c != value:
                rep.failures.append({"slot": label, "expected": str(c), "got": str(value)})
        if selection_ok(hs):
            continue
        rep.details["violating"] += 1
        if value:
            rep.failures.append({"slot": label, "expected": "0", "got": str(value)})
        if unit in names:
            continue
        m = names.count(mod)
        exps = tuple(0 if v == mod else e for v, e in zip(P.var_names, counts))
        if m < P.prec:
            rep.details["compared_with_catalog"] += 1
            c = P.coefficient(exps)[m]
            if c:
                rep.failures.append({"slot": label, "expected": "0 in the catalog", "got": str(c)})
    rep.passed = not rep.failures
    return rep


def g2_branch_check(order: int = 8, K=I) -> CheckReport:
    """Does the displayed rescaling carry e7g2_minus onto e7g2_plus?"""
    minus = build("e7g2_minus", order).potential
    plus = build("e7g2_plus", order).potential
    mapped = g2_swap_map(K).apply(minus)
    diff = mapped.first_difference(plus)
    rep = CheckReport("g2_branch_swap", diff is None, {"K": as_field(K).to_json()})
    if diff is not None:
        rep.failures.append({"slot": diff[0], "expected": "e7g2_plus coefficient",
                             "got": None if diff[1] is None else diff[1].to_json()})
    return rep


ZETA8 = (1 + I) * SQRT2 / 2


def g2_branch_relation_check(order: int = 8) -> CheckReport:
    """e7g2_plus from e7g2_minus by X(t) -> i X(i t) and t_ab -> t_ab / zeta8, t_a3b -> zeta8 t_a3b."""
    minus = build("e7g2_minus", order).potential
    plus = build("e7g2_plus", order).potential
    images = {"t_ab": {"t_ab": ZETA8.inv()}, "t_a3b": {"t_a3b": ZETA8}}
    mapped = change_vars(grading_rescale(minus, I), images)
    diff = mapped.first_difference(plus)
    rep = CheckReport("g2_branch_relation", diff is None, {"k": I.to_json(), "zeta8": ZETA8.to_json()})
    if diff is not None:
        rep.failures.append({"slot": diff[0], "expected": "e7g2_plus coefficient",
                             "got": None if diff[1] is None else diff[1].to_json()})
    return rep


def rational_form(P: Potential, k=I) -> Potential:
    """The grading rescaling X(t) -> k X(k t) used to clear the imaginary unit from e7g3."""
    return grading_rescale(P, k)


def g3_irrationality_check(order: int = 8) -> CheckReport:
    """Where the irrational numbers of e7g3 sit, and that the rescaling clears them.

    The h slots lie in i Q[[t^2]], rational_form(e7g3) is rational, and the
    sqrt2 parts of x0, y0, w0 cancel in -w0/8 + x0^2/12 - y0^2/24 = f11.
    """
    P = build("e7g3", order).potential
    rep = CheckReport("g3_irrationality", True, {"order": order})
    ans = {t["slot"]: t["monomial"] for t in load_ansatz("g3")["terms"]}
    for slot in ("h1", "h2"):
        h = P.coefficient(tuple(ans[slot].get(v, 0) for v in P.var_names))
        ok = h.parity() == "even" and all(v == FieldElem(0, v.components()[1]) for _, v in h.items())
        if not ok:
            rep.failures.append({"slot": slot, "expected": "i Q[[t^2]]", "got": h.to_json()})
    rational = rational_form(P)
    rep.details["field_before"] = sorted(P.coefficient_field())
    rep.details["field_after"] = sorted(rational.coefficient_field())
    if rational.coefficient_field() != {"1"}:
        rep.failures.append({"slot": "rational_form", "expected": ["1"], "got": rep.details["field_after"]})
    wd = wdvv_residual(rational, order)
    if not wd.passed:
        rep.failures.append({"slot": "rational_form WDVV", "expected": "zero residual", "got": wd.failures[:1]})
    X = fixture_triple(order + 3)
    D = derived_structure(X)
    f = D.w0.scale(F(-1, 8)) + (D.x0 * D.x0).scale(F(1, 12)) - (D.y0 * D.y0).scale(F(1, 24))
    rep.details["sqrt2_in_x0"] = not D.x0.component(2).is_zero()
    for which, label in ((2, "sqrt2"), (3, "i sqrt2")):
        if not f.component(which).is_zero():
            rep.failures.append({"slot": f"f11 {label} part", "expected": "0", "got": f.component(which).to_json()})
    if not (f + (X.X2 + X.X3 + X.X4).scale(F(1, 24))).is_zero():
        rep.failures.append({"slot": "f11", "expected": "-(X2 + X3 + X4)/24", "got": f.to_json()})
    rep.passed = not rep.failures
    return rep


def perturbed_template_check(order: int = 8) -> CheckReport:
    """Negative control: the P^1_{2,2,2,2} template on a triple that is not Halphen must fail WDVV."""
    X = fixture_triple(order + 3)
    bumped = X.X2 + Series({2: 1}, prec=X.X2.prec)
    P = p2222_potential(X.X4, bumped, X.X3, mode=TAU)
    wd = wdvv_residual(P, order)
    rep = CheckReport("wdvv:perturbed_template", not wd.passed,
                      {"perturbation": "X2 + t^2", "residual_status": "pass" if wd.passed else "fail",
                       "first_failure": wd.failures[:1]})
    if wd.passed:
        rep.failures.append({"slot": "residual", "expected": "nonzero", "got": "zero"})
    return rep


def wdvv_check(name: str, order: int = 8) -> CheckReport:
    entry = build(name, order)
    P = entry.potential
    rep = wdvv_residual(P, order)
    out = CheckReport(f"wdvv:{name}", rep.passed and (P.grades is None or grading_check(P)), rep.to_json())
    out.failures = rep.failures
    return out


# ---- Givental and SL(2,C) matrix data -----------------------------------------------


@dataclass(frozen=True)
class MatrixEntry:
    expr: str
    value: "PreciseComplex"
    exact: FieldElem | None = None

    def to_json(self) -> dict:
        out = {"expr": self.expr, "value": self.value.to_json()}
        if self.exact is not None:
            out["exact"] = self.exact.to_json()
        return out


@dataclass(frozen=True)
class MatrixData:
    name: str
    rows: tuple[tuple[MatrixEntry, ...], ...]
    note: str = ""

    @property
    def size(self) -> int:
        return len(self.rows)

    def det(self):
        if self.size != 2:
            raise ValueError("determinant only recorded for 2x2 data")
        (a, b), (c, d) = self.rows
        return a.value * d.value - b.value * c.value

    def to_json(self) -> dict:
        return {"name": self.name, "note": self.note, "rows": [[e.to_json() for e in r] for r in self.rows]}


def _entry(expr: str, value, exact=None, digits: int = 40) -> MatrixEntry:
    from .numerics import PreciseComplex

    if exact is not None and value is None:
        value = PreciseComplex.exact(_complex(exact, digits), digits)
    return MatrixEntry(expr, value, exact)


def _complex(x: FieldElem, digits: int):
    from .numerics import field_to_mpc

    return field_to_mpc(x, digits)


def _unipotent(name: str, n: int, pos: tuple[int, int], expr: str, value, note: str, digits: int) -> MatrixData:
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if (i, j) == pos:
                row.append(_entry(expr, value, digits=digits))
            else:
                row.append(_entry("1" if i == j else "0", None, FieldElem(int(i == j)), digits))
        rows.append(tuple(row))
    return MatrixData(name, tuple(rows), note)


def givental_data(digits: int = 40) -> list[MatrixData]:
    """R^sigma', S^tau0, A^(i, omega0), A^{G_k} and S_0^A for each A^{G_k} at tau = 0."""
    from .numerics import PreciseComplex, a_group, a_tau_omega, omega0, sigma_prime

    n2222 = len(P2222)
    out = [
        _unipotent("R^sigma'", n2222, (0, n2222 - 1), "sigma' z", sigma_prime(digits),
                   "exp of the corner nilpotent times z; value is the coefficient of z", digits),
        _unipotent("S^tau0", 9, (8, 0), "tau0 z^-1", PreciseComplex.exact(1j, digits),
                   "expansion at t_-1 = tau0 = i; value is the coefficient of z^-1", digits),
    ]
    (a, b), (c, d) = a_tau_omega(1j, omega0(digits), digits)
    out.append(MatrixData("A^(tau0,omega0)", (
        (_entry("1/(2 omega0)", a), _entry("i omega0", b)),
        (_entry("i/(2 omega0)", c), _entry("omega0", d)),
    ), "tau0 = i, omega0 = lambda4 sqrt(2 pi)/Gamma(3/4)^2"))
    exprs = {
        1: (("1/Theta", "-pi Theta"), ("1/(2 pi Theta)", "Theta/2")),
        3: (("(2i+1)/(2 Theta)", "pi Theta (i - 1/2)"), ("1/(pi Theta)", "Theta")),
    }
    for k in (1, 2, 3):
        A = a_group(k, digits)
        ex = exprs[1 if k < 3 else 3]
        out.append(MatrixData(f"A^G{k}", tuple(tuple(_entry(ex[i][j], A[i][j]) for j in range(2)) for i in range(2)),
                              "Theta = sqrt(2 pi)/Gamma(3/4)^2"))
        dd = A[1][1]
        diag = [PreciseComplex.exact(1, digits)] + [dd] * (n2222 - 2) + [dd * dd]
        labels = ["1"] + ["(c tau + d)"] * (n2222 - 2) + ["(c tau + d)^2"]
        rows = tuple(
            tuple(_entry(labels[i], diag[i]) if i == j else _entry("0", None, FieldElem(0), digits)
                  for j in range(n2222))
            for i in range(n2222)
        )
        out.append(MatrixData(f"S0^(A^G{k})", rows, "at tau = 0, so c tau + d = d"))
    return out
