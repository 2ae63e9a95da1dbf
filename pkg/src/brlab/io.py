"""File formats: set JSON, continued-fraction JSON, CSV tables, run manifests.

Exact rationals serialize as "p/q" strings; quadratic irrationals as
"(a+b*sqrt(c))/d"; everything else as decimal text with a declared digit
count.
"""
from __future__ import annotations

import csv
import json
import os
import platform
import re
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import mpmath

from .errors import InvalidInputError
from .geometry import Disc, Polygon, TorusSet
from .quadratic import QuadraticNumber

DEFAULT_DIGITS = 34

_QUAD = re.compile(r"^\(?(-?\d+)([+-]\d+)\*sqrt\((\d+)\)\)?(?:/(\d+))?$")


def parse_number(v):
    """int, "p/q", decimal string, quadratic string or float."""
    if isinstance(v, bool):
        raise InvalidInputError("booleans are not numbers")
    if isinstance(v, (int, float)):
        return v
    if isinstance(v, str):
        s = v.strip().replace(" ", "")
        m = _QUAD.match(s)
        if m:
            a, b, c, d = m.groups()
            return QuadraticNumber(int(a), int(b), int(c), int(d or 1))
        try:
            f = Fraction(s)
        except ValueError as exc:
            raise InvalidInputError(f"cannot parse number {v!r}") from exc
        return f.numerator if f.denominator == 1 else f
    raise InvalidInputError(f"cannot parse number {v!r}")


def format_number(x, digits: int = DEFAULT_DIGITS) -> str:
    if isinstance(x, bool):
        return str(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    if isinstance(x, QuadraticNumber):
        return str(x)
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, digits, strip_zeros=False)
    if isinstance(x, float):
        return repr(x)
    try:
        return repr(float(x))
    except (TypeError, ValueError):
        return str(x)


def format_decimal(x, digits: int = DEFAULT_DIGITS) -> str:
    """Decimal text for any supported number (CSV cells)."""
    if isinstance(x, (int, bool)):
        return str(int(x))
    if isinstance(x, float):
        return repr(x)
    with mpmath.workprec(int(digits * 3.33) + 16):
        if isinstance(x, Fraction):
            v = mpmath.mpf(x.numerator) / x.denominator
        elif isinstance(x, QuadraticNumber):
            v = x.to_mpf(int(digits * 3.33) + 16)
        else:
            v = mpmath.mpf(x)
        return mpmath.nstr(v, digits, strip_zeros=False)


# -- sets ----------------------------------------------------------------------

def set_from_dict(d: dict) -> TorusSet:
    """Accepts {"type": ...} records and the short {"polygon": [...]} / {"disc": {...}} forms."""
    if "type" not in d:
        if "polygon" in d:
            d = {"type": "polygon", "vertices": d["polygon"]}
        elif "disc" in d:
            d = {"type": "disc", **d["disc"]}
    kind = d.get("type")
    if kind == "polygon":
        return Polygon(tuple((parse_number(x), parse_number(y)) for x, y in d["vertices"]))
    if kind == "disc":
        cx, cy = d["center"]
        return Disc((parse_number(cx), parse_number(cy)), parse_number(d["radius"]))
    raise InvalidInputError(f"unknown set type {kind!r}")


def set_to_dict(s: TorusSet) -> dict:
    if isinstance(s, Disc):
        return {"type": "disc", "center": [format_number(c) for c in s.center],
                "radius": format_number(s.radius)}
    return {"type": "polygon", "vertices": [[format_number(x), format_number(y)] for x, y in s.vertices]}


def load_set(path) -> TorusSet:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{path}: {exc}") from exc
    return set_from_dict(data)


def save_set(s: TorusSet, path) -> Path:
    return write_json(set_to_dict(s), path)


# -- generic writers -----------------------------------------------------------

def write_json(obj, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_csv(path, header, rows, digits: int = DEFAULT_DIGITS) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_decimal(v, digits) if not isinstance(v, str) else v for v in row])
    return path


def cf_to_dict(cf, digits: int = DEFAULT_DIGITS) -> dict:
    d = cf.to_dict()
    if cf.value is not None:
        d["value"] = format_decimal(cf.value, digits)
    return d


def ostrowski_to_dict(exp) -> dict:
    return {"digits": list(exp.digits), "quotients": list(exp.base.quotients)}


def decomposition_rows(terms) -> list:
    return [t.row() for t in terms]


DECOMPOSITION_HEADER = ["l", "b", "k", "m_l", "x_l", "theta_l", "rho", "omega"]
TRACE_HEADER = ["T", "delta", "running_sup"]
REMAINDER_HEADER = ["N", "remainder"]
PROFILE_HEADER = ["x", "tau"]


# -- manifest ------------------------------------------------------------------

@dataclass
class RunManifest:
    command: list
    parameters: dict
    mode: str
    seed: int | None
    version: str
    digits: int = DEFAULT_DIGITS
    started: str = ""
    finished: str = ""
    outputs: list = field(default_factory=list)
    python: str = field(default_factory=lambda: platform.python_version())
    precision_bits: int | None = None

    def write(self, outdir) -> Path:
        return write_json(asdict(self), Path(outdir) / "manifest.json")


def now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def env_precision() -> int | None:
    v = os.environ.get("BRLAB_PRECISION_BITS")
    return int(v) if v and v.isdigit() else None
