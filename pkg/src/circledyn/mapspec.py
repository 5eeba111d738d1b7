"""Strict JSON map specifications.

Complex numbers are written [re, im]; angles are in turns.  Unknown or
missing fields are rejected so that experiment files stay reproducible.
"""

from __future__ import annotations

import json
import os
from fractions import Fraction

from .circle_maps import BlaschkeProduct, ConjugatedMap, PiecewiseMoebius, PowerMap, RationalMap
from .geometry import MoebiusTransform


class SpecError(ValueError):
    """The map specification is malformed."""


_FIELDS = {
    "power": ({"degree"}, {"orientation"}),
    "blaschke": ({"zeros"}, {"rotation"}),
    "blaschke_rational": ({"numerator", "denominator"}, set()),
    "piecewise_moebius": ({"points", "pieces"}, set()),
    "conjugated": ({"base", "by"}, set()),
    "rational": ({"numerator", "denominator"}, set()),
}


def _complex(v, where: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise SpecError(f"{where}: expected a number or [re, im], got {v!r}")


def _complex_list(v, where: str) -> list[complex]:
    if not isinstance(v, list) or not v:
        raise SpecError(f"{where}: expected a non-empty list")
    return [_complex(x, f"{where}[{i}]") for i, x in enumerate(v)]


def _moebius(doc, where: str) -> MoebiusTransform:
    if not isinstance(doc, dict) or set(doc) - {"coefficients", "anti"} or "coefficients" not in doc:
        raise SpecError(f"{where}: expected {{'coefficients': [a, b, c, d], 'anti': bool}}")
    coeffs = _complex_list(doc["coefficients"], f"{where}.coefficients")
    if len(coeffs) != 4:
        raise SpecError(f"{where}: a Moebius map has four coefficients")
    anti = doc.get("anti", False)
    if not isinstance(anti, bool):
        raise SpecError(f"{where}.anti must be a boolean")
    return MoebiusTransform(*coeffs, anti=anti)


def parse_map_spec(doc, where: str = "spec"):
    """Build a CoveringMap (or RationalMap for type 'rational') from a parsed document."""
    if not isinstance(doc, dict) or "type" not in doc:
        raise SpecError(f"{where}: expected an object with a 'type' field")
    kind = doc["type"]
    if kind not in _FIELDS:
        raise SpecError(f"{where}: unknown map type {kind!r}")
    required, optional = _FIELDS[kind]
    keys = set(doc) - {"type"}
    if required - keys:
        raise SpecError(f"{where}: missing fields {sorted(required - keys)}")
    if keys - required - optional:
        raise SpecError(f"{where}: unknown fields {sorted(keys - required - optional)}")
    try:
        if kind == "power":
            d, o = doc["degree"], doc.get("orientation", 1)
            if not isinstance(d, int) or not isinstance(o, int):
                raise SpecError(f"{where}: degree and orientation must be integers")
            return PowerMap(d, o)
        if kind == "blaschke":
            rot = _complex(doc.get("rotation", 1.0), f"{where}.rotation")
            return BlaschkeProduct(_complex_list(doc["zeros"], f"{where}.zeros"), rot)
        if kind == "blaschke_rational":
            return BlaschkeProduct.from_rational(_complex_list(doc["numerator"], f"{where}.numerator"),
                                                 _complex_list(doc["denominator"], f"{where}.denominator"))
        if kind == "rational":
            return RationalMap(_complex_list(doc["numerator"], f"{where}.numerator"),
                               _complex_list(doc["denominator"], f"{where}.denominator"))
        if kind == "piecewise_moebius":
            pts = doc["points"]
            if not isinstance(pts, list) or not all(isinstance(p, (int, float)) for p in pts):
                raise SpecError(f"{where}.points: expected a list of angles")
            if not isinstance(doc["pieces"], list):
                raise SpecError(f"{where}.pieces: expected a list")
            pieces = [_moebius(m, f"{where}.pieces[{i}]") for i, m in enumerate(doc["pieces"])]
            return PiecewiseMoebius(pts, pieces)
        base = parse_map_spec(doc["base"], f"{where}.base")
        if isinstance(base, RationalMap):
            raise SpecError(f"{where}.base must be a circle covering")
        return ConjugatedMap(base, _moebius(doc["by"], f"{where}.by"))
    except SpecError:
        raise
    except (ValueError, TypeError) as exc:
        raise SpecError(f"{where}: {exc}") from exc


def load_map_spec(text: str):
    """Parse a spec from a JSON string or from the path of a JSON file."""
    if os.path.exists(text):
        with open(text) as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc}") from exc
    return parse_map_spec(doc)


def parse_angles(text: str) -> list[float]:
    """'0, 1/3, 2/3' -> [0.0, 0.333.., 0.666..]."""
    try:
        return [float(Fraction(tok.strip())) for tok in text.split(",") if tok.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"bad angle list {text!r}: {exc}") from exc


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise SpecError(f"bad complex number {text!r}") from exc
