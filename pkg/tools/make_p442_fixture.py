"""Expand the hand transcription of the P^1_{4,4,2} potential into the structured fixture."""

import json
from pathlib import Path

import sympy as sp

HERE = Path(__file__).resolve().parent
OUT = HERE.parent / "src" / "e7cylg" / "fixtures" / "catalog" / "p442.json"

T_NAMES = ["t0", "tm1"] + [f"t{k}" for k in range(1, 8)]
MODULAR = ["x", "y", "z", "w"]


def expand(source: str) -> list[dict]:
    ts = sp.symbols(T_NAMES)
    ms = sp.symbols(MODULAR)
    expr = sp.expand(sp.sympify(source.replace("\n", " ")))
    terms = []
    for tmono, coeff in sp.Poly(expr, *ts).terms():
        cpoly = sp.Poly(coeff, *ms)
        terms.append({
            "monomial": {n.replace("tm1", "t-1"): e for n, e in zip(T_NAMES, tmono) if e},
            "coefficient": {
                "*".join(f"{m}^{e}" for m, e in zip(MODULAR, mm) if e) or "1": str(c)
                for mm, c in cpoly.terms()
            },
        })
    return terms


def main() -> None:
    source = (HERE / "p442_source.txt").read_text()
    data = {
        "name": "p442",
        "source": "genus-zero potential of P^1_{4,4,2} in x, y, z, w (hand transcription)",
        "expression": " ".join(source.split()),
        "terms": expand(source),
    }
    OUT.write_text(json.dumps(data, indent=1) + "\n")


if __name__ == "__main__":
    main()
