import json
from fractions import Fraction as Fr

import pytest

from e7cylg import reconstruct as R
from e7cylg.algebra import I, FieldElem
from e7cylg.cohft import change_vars, wdvv_residual
from e7cylg.fjrw import load_ansatz

ORDER = 8


@pytest.fixture(scope="module")
def solutions():
    return {g: [R.solve(g, s, ORDER) for s in R.enumerate_branches(g)] for g in ("g1", "g2", "g3")}


@pytest.mark.parametrize("group, count", [("g1", 1), ("g2", 2), ("g3", 3)])
def test_seed_counts(solutions, group, count):
    assert len(solutions[group]) == count


@pytest.mark.parametrize("group, entries", [
    ("g1", {"e7g1"}),
    ("g2", {"e7g2_minus", "e7g2_plus"}),
    ("g3", {"e7g3", "second", "aux3"}),
])
def test_solutions_match_catalog(solutions, group, entries):
    diffs = [R.catalog_diff(s) for s in solutions[group]]
    assert all(d["matches"] for d in diffs), [d["differences"][:2] for d in diffs]
    assert {d["entry"] for d in diffs} == entries


@pytest.mark.parametrize("group, survivors", [("g1", {"e7g1"}), ("g2", {"e7g2_minus", "e7g2_plus"}),
                                              ("g3", {"e7g3"})])
def test_parity_filter(solutions, group, survivors):
    kept = R.parity_filter(solutions[group])
    assert {R.catalog_diff(s)["entry"] for s in kept} == survivors


def test_solutions_satisfy_wdvv(solutions):
    for group in ("g1", "g3"):
        for sol in solutions[group]:
            assert wdvv_residual(sol.potential(), ORDER).passed


def test_g2_gauge(solutions):
    for sol in solutions["g2"]:
        assert sol.slots["h3"][0] == Fr(-1, 128)


def test_g3_gauge(solutions):
    for sol in solutions["g3"]:
        h1 = sol.slots["h1"][0]
        assert h1 == sol.slots["h2"][0]
        assert h1.canonical_sign() == h1


def test_seed_json_round_trip():
    seed = R.enumerate_branches("g2")[0]
    back = R.BranchSeed.from_json(json.loads(json.dumps(seed.to_json())))
    assert back.values == seed.values and back.group == "g2"


def test_inconsistent_seed():
    seed = R.BranchSeed("g2", {("h1", 0): FieldElem(Fr(1, 64))})
    with pytest.raises(R.Inconsistent):
        R.solve("g2", seed, 4)


def test_empty_seed_is_ambiguous():
    with pytest.raises(R.GaugeAmbiguity) as err:
        R.solve("g2", R.BranchSeed("g2", {}), 4)
    assert err.value.order == 0


def test_g3_without_gauge_is_not_triangular():
    with pytest.raises(R.NonTriangular):
        R.enumerate_branches("g3", R.Gauge())


def test_unknown_group():
    with pytest.raises(ValueError):
        R.reconstruct("g9")


def test_g2_rescaling_is_a_gauge_orbit():
    # without the gauge the seeds come in pairs exchanged by t_ab -> i t_ab, t_a3b -> -i t_a3b
    seeds = R.enumerate_branches("g2", R.Gauge())
    assert len(seeds) == 4
    pots = [R.solve("g2", s, 5, R.Gauge()).potential() for s in seeds]
    images = {"t_ab": {"t_ab": I}, "t_a3b": {"t_a3b": -I}}
    for P in pots:
        Q = change_vars(P, images)
        partners = [k for k, P2 in enumerate(pots) if Q.first_difference(P2) is None]
        assert len(partners) == 1 and pots[partners[0]] is not P


def test_g3_sign_flip(solutions):
    sol = next(s for s in solutions["g3"] if R.catalog_diff(s)["entry"] == "e7g3")
    P = sol.potential()
    Q = change_vars(P, {"t_aJ": {"t_aJ": FieldElem(-1)}})
    assert wdvv_residual(Q, 6).passed
    monos = {t["slot"]: t["monomial"] for t in load_ansatz("g3")["terms"]}
    for slot in ("h1", "h2"):
        exps = tuple(monos[slot].get(v, 0) for v in P.var_names)
        assert not P.coefficient(exps).is_zero()
        assert (Q.coefficient(exps) + P.coefficient(exps)).is_zero()


def test_reconstruct_entry_point():
    sols = R.reconstruct("g1", 4)
    assert len(sols) == 1 and R.catalog_diff(sols[0])["matches"]
