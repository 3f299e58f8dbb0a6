"""Text formats: rationals, configuration strings and measure files.

Rationals are always written "num/den".  A binary config is the lowercase
hex of its truth table (bit i = value at point i), zero padded to
max(1, 2^n / 4) digits; a k-ary config (k > 2) is its 2^n base-k digits,
most significant (point 2^n - 1) first.

Measure file, version 1::

    cubex-measure 1
    n 2
    k 2
    0 1/2
    f 1/2

Entries are sorted by config key, so saving is deterministic.
"""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

from .cube import Config
from .measures import ExactMeasure, MeasureError

MAGIC = "cubex-measure"
VERSION = 1
DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"
_RATIONAL = re.compile(r"^(-?\d+)/(\d+)$")


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


def format_fraction(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str) -> Fraction:
    text = str(text).strip()
    m = _RATIONAL.match(text)
    if m:
        den = int(m.group(2))
        if den == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(m.group(1)), den)
    if re.fullmatch(r"-?\d+", text):
        return Fraction(int(text))
    raise ValueError(f"not an exact rational: {text!r} (expected num/den)")


def _hex_width(n: int) -> int:
    return max(1, (1 << n) // 4)


def config_to_str(c: Config) -> str:
    if c.k == 2:
        return format(c.key, f"0{_hex_width(c.n)}x")
    if c.k > len(DIGITS):
        raise ValueError("alphabets above 36 symbols have no digit encoding")
    return "".join(DIGITS[v] for v in reversed(c.values))


def config_from_str(text: str, n: int, k: int) -> Config:
    if k == 2:
        if len(text) != _hex_width(n) or not re.fullmatch(r"[0-9a-f]+", text):
            raise ValueError(f"expected {_hex_width(n)} lowercase hex digits")
        key = int(text, 16)
        if key >> (1 << n):
            raise ValueError("truth table has bits beyond 2^n points")
        return Config.from_key(n, 2, key)
    if len(text) != 1 << n:
        raise ValueError(f"expected {1 << n} base-{k} digits")
    vals = []
    for ch in reversed(text):
        v = DIGITS.find(ch)
        if not 0 <= v < k:
            raise ValueError(f"digit {ch!r} out of range for k={k}")
        vals.append(v)
    return Config(n, k, tuple(vals))


def dumps_measure(mu: ExactMeasure) -> str:
    lines = [f"{MAGIC} {VERSION}", f"n {mu.n}", f"k {mu.k}"]
    lines += [f"{config_to_str(c)} {format_fraction(p)}" for c, p in mu.items()]
    return "\n".join(lines) + "\n"


def _header(lines, i, name):
    if i >= len(lines):
        raise ParseError(f"missing '{name}' header", i + 1, 1)
    parts = lines[i].split()
    if len(parts) != 2 or parts[0] != name:
        raise ParseError(f"expected '{name} <int>'", i + 1, 1)
    try:
        return int(parts[1])
    except ValueError:
        raise ParseError(f"'{name}' is not an integer", i + 1, len(parts[0]) + 2) from None


def loads_measure(text: str) -> ExactMeasure:
    lines = text.splitlines()
    if not lines or lines[0].split()[:1] != [MAGIC]:
        raise ParseError(f"missing '{MAGIC}' magic", 1, 1)
    head = lines[0].split()
    if len(head) != 2 or head[1] != str(VERSION):
        raise ParseError(f"unsupported format version {head[1:]}", 1, len(MAGIC) + 2)
    n = _header(lines, 1, "n")
    k = _header(lines, 2, "k")
    weights: dict[Config, Fraction] = {}
    for lineno, line in enumerate(lines[3:], start=4):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("expected '<config> <num/den>'", lineno, 1)
        try:
            c = config_from_str(parts[0], n, k)
        except ValueError as e:
            raise ParseError(str(e), lineno, 1) from None
        try:
            p = parse_fraction(parts[1])
        except ValueError as e:
            raise ParseError(str(e), lineno, line.index(parts[1]) + 1) from None
        if p <= 0:
            raise ParseError("weights must be positive", lineno, line.index(parts[1]) + 1)
        if c in weights:
            raise ParseError("duplicate configuration", lineno, 1)
        weights[c] = p
    total = sum(weights.values(), Fraction(0))
    if total != 1:
        raise MeasureError(f"weights sum to {format_fraction(total)}, not 1")
    return ExactMeasure(n, k, weights)


def save_measure(mu: ExactMeasure, path) -> None:
    Path(path).write_text(dumps_measure(mu))


def load_measure(path) -> ExactMeasure:
    return loads_measure(Path(path).read_text())
