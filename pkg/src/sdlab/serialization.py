"""JSON documents for matrices, algebras, maps, elements and reports.

Complex numbers are ``[re, im]`` pairs.  Floats go through ``repr`` (shortest
round-trip), so parsing a serialized object gives back the same bits.
:func:`dumps` sorts keys, which makes reports byte-for-byte reproducible.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .algebra import StarAlgebra, build_algebra
from .errors import InvalidSpecError, ShapeError
from .supermap import SuperMap

__all__ = [
    "dumps",
    "matrix_to_json",
    "matrix_from_json",
    "algebra_to_json",
    "algebra_from_json",
    "supermap_to_json",
    "supermap_from_json",
    "element_to_json",
    "element_from_json",
    "construction_report_to_json",
    "plain",
]


def plain(obj):
    """Convert numpy scalars/arrays inside ``obj`` to JSON-ready Python values."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            raise InvalidSpecError(f"refusing to serialize non-finite value {value!r}")
        return value
    return obj


def dumps(obj) -> str:
    return json.dumps(plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _complex_pairs(values):
    flat = np.asarray(values, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def _parse_pairs(pairs, where):
    if not isinstance(pairs, list):
        raise InvalidSpecError(f"{where}: expected a list of [re, im] pairs")
    out = np.empty(len(pairs), dtype=complex)
    for k, pair in enumerate(pairs):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)
        ):
            raise InvalidSpecError(f"{where}[{k}]: expected [re, im], got {pair!r}")
        if not all(math.isfinite(v) for v in pair):
            raise InvalidSpecError(f"{where}[{k}]: entries must be finite")
        out[k] = complex(float(pair[0]), float(pair[1]))
    return out


def matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"n": int(M.shape[0]), "entries": _complex_pairs(M)}


def matrix_from_json(obj, where="matrix") -> np.ndarray:
    if not isinstance(obj, dict) or "n" not in obj or "entries" not in obj:
        raise InvalidSpecError(f"{where}: expected an object with 'n' and 'entries'")
    n = obj["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InvalidSpecError(f"{where}.n: expected a positive integer, got {n!r}")
    entries = _parse_pairs(obj["entries"], f"{where}.entries")
    if entries.size != n * n:
        raise ShapeError(f"{where}.entries: expected {n * n} entries, got {entries.size}")
    return entries.reshape(n, n)


def algebra_to_json(alg: StarAlgebra) -> dict:
    return {"blocks": list(alg.blocks)}


def algebra_from_json(obj, where="algebra") -> StarAlgebra:
    if not isinstance(obj, dict) or "blocks" not in obj:
        raise InvalidSpecError(f"{where}: expected an object with 'blocks'")
    blocks = obj["blocks"]
    if not isinstance(blocks, list):
        raise InvalidSpecError(f"{where}.blocks: expected a list of positive integers")
    try:
        return build_algebra(blocks)
    except InvalidSpecError as exc:
        raise InvalidSpecError(f"{where}.blocks: {exc}") from None


def supermap_to_json(sigma: SuperMap) -> dict:
    return {"algebra": algebra_to_json(sigma.domain), "images": [matrix_to_json(M) for M in sigma.images]}


def supermap_from_json(obj, where="map") -> SuperMap:
    if not isinstance(obj, dict) or "algebra" not in obj or "images" not in obj:
        raise InvalidSpecError(f"{where}: expected an object with 'algebra' and 'images'")
    alg = algebra_from_json(obj["algebra"], f"{where}.algebra")
    images = obj["images"]
    if not isinstance(images, list):
        raise InvalidSpecError(f"{where}.images: expected a list of matrices")
    if len(images) != alg.dim:
        raise ShapeError(f"{where}.images: expected {alg.dim} images, got {len(images)}")
    mats = [matrix_from_json(M, f"{where}.images[{k}]") for k, M in enumerate(images)]
    for k, M in enumerate(mats):
        if M.shape[0] != alg.N:
            raise ShapeError(f"{where}.images[{k}]: expected n={alg.N}, got n={M.shape[0]}")
    return SuperMap(alg, mats)


def element_to_json(u) -> dict:
    return {"a": _complex_pairs(u.a), "x": matrix_to_json(u.x)}


def element_from_json(obj, where="element"):
    from .semidirect import SemidirectElement

    if not isinstance(obj, dict) or "a" not in obj or "x" not in obj:
        raise InvalidSpecError(f"{where}: expected an object with 'a' and 'x'")
    return SemidirectElement(_parse_pairs(obj["a"], f"{where}.a"), matrix_from_json(obj["x"], f"{where}.x"))


def construction_report_to_json(report) -> dict:
    return {
        "P": matrix_to_json(report.P),
        "Sigma": supermap_to_json(report.Sigma),
        "D": None if report.Dmap is None else supermap_to_json(report.Dmap),
        "residuals": dict(report.residuals),
        "singular_values": [float(v) for v in report.singular_values],
        "passed": report.passed,
    }
