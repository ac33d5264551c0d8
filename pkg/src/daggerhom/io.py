"""JSON readers and writers for elements, chains and towers."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, Union

from .algebra import AlgebraElement, Cocycle
from .barcomplex import BarChain
from .group import parse_group
from .scalar import format_rational, parse_rational

Source = Union[str, Dict[str, Any]]


def _load(src: Source) -> Dict[str, Any]:
    if isinstance(src, dict):
        return src
    with open(src, encoding="utf-8") as fh:
        return json.load(fh)


def _coeff(raw) -> Fraction:
    return parse_rational(str(raw))


def load_element(src: Source) -> AlgebraElement:
    """``{"group", "lambda"?, "terms": [{"g", "coeff"}]}``; a lambda twists ``zn:2``."""
    data = _load(src)
    G = parse_group(data["group"])
    twist = Cocycle(_coeff(data["lambda"])) if data.get("lambda") is not None else None
    terms = {}
    for t in data.get("terms", []):
        g = G.parse_element(t["g"])
        terms[g] = terms.get(g, 0) + _coeff(t.get("coeff", "1"))
    return AlgebraElement(G, terms, twist)


def dump_element(f: AlgebraElement) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "group": f.group.spec,
        "terms": [{"g": f.group.format_element(g), "coeff": format_rational(f.terms[g])}
                  for g in f.support()],
    }
    if f.twist is not None:
        out["lambda"] = format_rational(f.twist.lam)
    return out


def load_chain(src: Source) -> BarChain:
    """``{"group", "degree", "reduced", "terms": [{"tuple", "coeff"}]}``."""
    data = _load(src)
    G = parse_group(data["group"])
    degree = int(data["degree"])
    terms = {}
    for t in data.get("terms", []):
        simplex = tuple(G.parse_element(x) for x in t["tuple"])
        if len(simplex) != degree + 1:
            raise ValueError(f"tuple {t['tuple']!r} does not have degree {degree}")
        terms[simplex] = terms.get(simplex, 0) + _coeff(t.get("coeff", "1"))
    return BarChain(G, degree, terms, bool(data.get("reduced", True)))


def dump_chain(ch: BarChain) -> Dict[str, Any]:
    G = ch.group
    return {
        "group": G.spec,
        "degree": ch.degree,
        "reduced": ch.reduced,
        "terms": [{"tuple": [G.format_element(x) for x in t], "coeff": format_rational(ch.terms[t])}
                  for t in ch.support()],
    }


def canonical_json(obj: Any, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
