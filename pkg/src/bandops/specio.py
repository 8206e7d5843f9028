"""Operator specification files: UTF-8 JSON, validated, canonicalized.

Document layout::

    {
      "block_dim": 1,
      "exponent": 2,                      // 1 | 2 | "inf"
      "diagonals": [
        {"offset": 0, "law": {"kind": "constant", "value": MAT}},
        {"offset": 1, "law": {"kind": "periodic",
                              "values": [MAT, ...], "anchor": 0}},
        {"offset": -1, "law": {"kind": "eventually_periodic",
                               "radius": 2,
                               "core": [MAT, ...],     // positions -radius..radius
                               "left":  {"values": [MAT, ...], "anchor": 0},
                               "right": {"values": [MAT, ...], "anchor": 0}}},
        {"offset": 2, "law": {"kind": "seeded_random",
                              "bound": 0.5, "seed": 7}}
      ]
    }

MAT is a d*d block serialized as a row-major flat list of [re, im] pairs.
The canonical form sorts diagonals by offset, normalizes anchors, collapses
period-1 periodic laws to "constant", and is emitted with sorted keys and
2-space indentation; parsing then re-emitting a canonical document is the
identity.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import SpecFormatError
from .laws import EventuallyPeriodic, Periodic, SeededRandom
from .operator import BandOperator, band_operator


def _expect(cond, message, location):
    if not cond:
        raise SpecFormatError(message, location)


def _parse_matrix(obj, d, location) -> np.ndarray:
    _expect(isinstance(obj, list) and len(obj) == d * d,
            f"matrix must be a flat row-major list of {d * d} [re, im] pairs",
            location)
    flat = np.empty(d * d, dtype=complex)
    for idx, pair in enumerate(obj):
        _expect(isinstance(pair, list) and len(pair) == 2
                and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                        for v in pair),
                "matrix entry must be a [re, im] pair of numbers",
                f"{location}[{idx}]")
        _expect(all(math.isfinite(v) for v in pair),
                "matrix entries must be finite", f"{location}[{idx}]")
        flat[idx] = complex(pair[0], pair[1])
    return flat.reshape(d, d)


def _parse_periodic(obj, d, location) -> Periodic:
    _expect(isinstance(obj, dict), "periodic part must be an object", location)
    values = obj.get("values")
    _expect(isinstance(values, list) and values,
            "periodic part needs a non-empty 'values' list", location)
    anchor = obj.get("anchor", 0)
    _expect(isinstance(anchor, int) and not isinstance(anchor, bool),
            "'anchor' must be an integer", f"{location}/anchor")
    mats = tuple(_parse_matrix(v, d, f"{location}/values[{i}]")
                 for i, v in enumerate(values))
    return Periodic(mats, anchor)


def _parse_law(obj, d, location):
    _expect(isinstance(obj, dict), "law must be an object", location)
    kind = obj.get("kind")
    if kind == "constant":
        _expect("value" in obj, "constant law needs 'value'", location)
        return Periodic((_parse_matrix(obj["value"], d, f"{location}/value"),))
    if kind == "periodic":
        return _parse_periodic(obj, d, location)
    if kind == "eventually_periodic":
        radius = obj.get("radius")
        _expect(isinstance(radius, int) and not isinstance(radius, bool)
                and radius >= 0, "'radius' must be a non-negative integer",
                f"{location}/radius")
        core = obj.get("core")
        _expect(isinstance(core, list) and len(core) == 2 * radius + 1,
                f"'core' must list exactly {2 * radius + 1} matrices "
                "(positions -radius..radius)", f"{location}/core")
        mats = tuple(_parse_matrix(v, d, f"{location}/core[{i}]")
                     for i, v in enumerate(core))
        left = _parse_periodic(obj.get("left"), d, f"{location}/left")
        right = _parse_periodic(obj.get("right"), d, f"{location}/right")
        return EventuallyPeriodic(mats, radius, left, right)
    if kind == "seeded_random":
        bound = obj.get("bound")
        seed = obj.get("seed")
        _expect(isinstance(bound, (int, float)) and not isinstance(bound, bool)
                and math.isfinite(bound) and bound >= 0,
                "'bound' must be a finite non-negative number", f"{location}/bound")
        _expect(isinstance(seed, int) and not isinstance(seed, bool),
                "'seed' must be an integer", f"{location}/seed")
        return SeededRandom(float(bound), seed, d)
    raise SpecFormatError(
        "law 'kind' must be one of constant, periodic, eventually_periodic, "
        f"seeded_random (got {kind!r})", f"{location}/kind")


def operator_from_dict(doc) -> BandOperator:
    """Validate a parsed JSON document and build the operator."""
    _expect(isinstance(doc, dict), "top level must be an object", "")
    d = doc.get("block_dim")
    _expect(isinstance(d, int) and not isinstance(d, bool) and d >= 1,
            "'block_dim' must be an integer >= 1", "block_dim")
    p_raw = doc.get("exponent")
    if p_raw in (1, 2):
        p = p_raw
    elif p_raw == "inf":
        p = math.inf
    else:
        raise SpecFormatError("'exponent' must be 1, 2 or \"inf\"", "exponent")
    diags_obj = doc.get("diagonals")
    _expect(isinstance(diags_obj, list), "'diagonals' must be a list", "diagonals")
    unknown = set(doc) - {"block_dim", "exponent", "diagonals"}
    _expect(not unknown, f"unknown top-level fields: {sorted(unknown)}", "")
    diags = {}
    for i, entry in enumerate(diags_obj):
        loc = f"diagonals[{i}]"
        _expect(isinstance(entry, dict), "diagonal must be an object", loc)
        off = entry.get("offset")
        _expect(isinstance(off, int) and not isinstance(off, bool),
                "'offset' must be an integer", f"{loc}/offset")
        _expect(off not in diags, f"duplicate offset {off}", f"{loc}/offset")
        diags[off] = _parse_law(entry.get("law"), d, f"{loc}/law")
    return band_operator(diags, d, p)


def load_operator(path) -> BandOperator:
    """Load and validate an operator specification file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SpecFormatError(f"cannot read spec file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecFormatError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return operator_from_dict(doc)


# -- canonical serialization -------------------------------------------------


def _matrix_to_json(m: np.ndarray) -> list:
    return [[float(v.real), float(v.imag)] for v in np.asarray(m).ravel()]


def _periodic_to_json(law: Periodic) -> dict:
    return {"values": [_matrix_to_json(v) for v in law.values],
            "anchor": law.anchor}


def _law_to_json(law) -> dict:
    if isinstance(law, SeededRandom):
        return {"kind": "seeded_random", "bound": law.bound, "seed": law.seed}
    if isinstance(law, Periodic):
        if law.period == 1:
            return {"kind": "constant", "value": _matrix_to_json(law.values[0])}
        return {"kind": "periodic", **_periodic_to_json(law)}
    if isinstance(law, EventuallyPeriodic):
        return {"kind": "eventually_periodic",
                "radius": law.radius,
                "core": [_matrix_to_json(v) for v in law.core],
                "left": _periodic_to_json(law.left),
                "right": _periodic_to_json(law.right)}
    raise TypeError(f"unserializable law {type(law).__name__}")


def canonical_dict(a: BandOperator) -> dict:
    exponent = "inf" if a.exponent == math.inf else int(a.exponent)
    return {"block_dim": a.block_dim,
            "exponent": exponent,
            "diagonals": [{"offset": off, "law": _law_to_json(law)}
                          for off, law in a.diagonals]}


def canonical_json(a: BandOperator) -> str:
    return json.dumps(canonical_dict(a), indent=2, sort_keys=True) + "\n"


def save_operator(a: BandOperator, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(a))
