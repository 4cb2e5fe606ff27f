"""
Serialization helpers: strategy documents in, fixed-precision JSON/CSV out.

Reals are written with 12 significant digits (``%.12g``) rather than Python's
shortest round-trip repr, so identical runs give byte-identical files.
Non-finite reals are written as JSON ``null`` (empty cell in CSV).
"""
from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import InvalidArgumentError, QGambleError
from .protocol import AliceStrategy, BobStrategy, GameRules

REAL_FORMAT = ".12g"


class InputFileError(QGambleError):
    """An input document could not be read or does not describe a valid game."""


def format_real(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    if x == 0.0:
        return "0"  # folds -0.0
    return format(x, REAL_FORMAT)


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON text; dict order is kept as given."""
    return _encode(obj, indent, 0)


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_real(obj)
    if isinstance(obj, complex):
        return _encode([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return _encode(obj.item(), indent, level)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return "" if not math.isfinite(v) else format_real(v)
    return str(v)


def flatten(doc: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in doc.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(flatten(v, key + "."))
        elif isinstance(v, complex):
            out[key + ".re"], out[key + ".im"] = v.real, v.imag
        elif isinstance(v, (list, tuple)):
            out[key] = json.dumps(v) if all(not isinstance(x, float) for x in v) else ";".join(csv_cell(x) for x in v)
        else:
            out[key] = v
    return out


def csv_text(rows: list[dict], columns: list[str] | None = None) -> str:
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(csv_cell(row.get(c)) for c in columns))
    return "\n".join(lines) + "\n"


def alice_to_dict(alice: AliceStrategy) -> dict:
    return {name: [getattr(alice, name).real, getattr(alice, name).imag]
            for name in ("alpha", "beta", "gamma", "delta")}


def _amplitude(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex amplitude must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    return complex(float(v))


def parse_alice(doc) -> AliceStrategy:
    if doc == "honest":
        return AliceStrategy.honest()
    if not isinstance(doc, dict):
        raise ValueError("alice must be an object or \"honest\"")
    if "eta" in doc:
        return AliceStrategy.restricted(float(doc["eta"]))
    return AliceStrategy(*(_amplitude(doc.get(k, 0.0)) for k in ("alpha", "beta", "gamma", "delta")))


def parse_bob(doc) -> BobStrategy:
    if not isinstance(doc, dict):
        raise ValueError("bob must be an object")
    if "theta" in doc:
        return BobStrategy(float(doc["theta"]))
    if "s" in doc:
        return BobStrategy.from_s(float(doc["s"]))
    raise ValueError("bob needs 'theta' or 's'")


def parse_rules(doc) -> GameRules:
    if not isinstance(doc, dict):
        raise ValueError("rules must be an object")
    return GameRules(float(doc["R"]), float(doc.get("win", 1.0)), float(doc.get("loss", -1.0)))


def load_strategy_document(path) -> dict:
    """Parse ``{"alice": ..., "bob": ..., "rules": ...}``; every section is optional.

    Returns a dict with keys ``alice``, ``bob``, ``rules`` (missing ones are None).
    """
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputFileError(f"cannot read strategy file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputFileError(f"{path}: top level must be a JSON object")
    out = {}
    for key, parser in (("alice", parse_alice), ("bob", parse_bob), ("rules", parse_rules)):
        try:
            out[key] = parser(doc[key]) if key in doc else None
        except (KeyError, TypeError, ValueError, InvalidArgumentError) as exc:
            raise InputFileError(f"{path}: invalid '{key}' section: {exc}") from exc
    return out
