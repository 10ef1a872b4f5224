"""Text case files.

Layout::

    ldpcase 1
    # seed 42
    # kind ConsistentWitness
    m 2
    n 1
    G
    1
    -1
    h
    0.25
    -1
    witness
    0.5

Values are written with 17 significant digits, which round-trips every
finite double exactly (negative zero and subnormals included). On input,
hexadecimal floats (``float.hex`` form) are accepted as well. ``# key value``
lines carry metadata and may appear anywhere; blank lines are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
from pathlib import Path

import numpy as np

from .problem import LdpProblem

__all__ = ["CaseFile", "CaseFormatError", "format_value", "parse_value", "dumps", "loads", "load", "dump"]

HEADER = "ldpcase 1"


class CaseFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True, eq=False)
class CaseFile:
    problem: LdpProblem
    witness: np.ndarray | None = None
    meta: dict[str, str] = field(default_factory=dict)


def format_value(x: float) -> str:
    return "%.17g" % x


def parse_value(token: str) -> float:
    """Parse a decimal or hexadecimal float; reject non-finite values."""
    try:
        if token.lstrip("+-")[:2].lower() == "0x":
            value = float.fromhex(token)
        else:
            value = float(token)
    except ValueError:
        raise ValueError(f"not a number: {token!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"non-finite value: {token!r}")
    return value


def dumps(problem: LdpProblem, witness=None, meta: dict | None = None) -> str:
    lines = [HEADER]
    for key, value in (meta or {}).items():
        lines.append(f"# {key} {value}")
    lines.append(f"m {problem.m}")
    lines.append(f"n {problem.n}")
    lines.append("G")
    for row in problem.G:
        lines.append(" ".join(format_value(v) for v in row))
    lines.append("h")
    lines.extend(format_value(v) for v in problem.h)
    if witness is not None:
        lines.append("witness")
        lines.extend(format_value(v) for v in witness)
    return "\n".join(lines) + "\n"


def loads(text: str) -> CaseFile:
    meta: dict[str, str] = {}
    body: list[tuple[int, str]] = []
    last = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last = lineno
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].strip().split(None, 1)
            if parts:
                meta[parts[0]] = parts[1] if len(parts) > 1 else ""
            continue
        body.append((lineno, line))
    pos = 0

    def take(what: str) -> tuple[int, str]:
        nonlocal pos
        if pos >= len(body):
            raise CaseFormatError(last + 1, f"unexpected end of file, expected {what}")
        item = body[pos]
        pos += 1
        return item

    def keyword(word: str):
        lineno, line = take(f"'{word}'")
        if line != word:
            raise CaseFormatError(lineno, f"expected '{word}', got {line!r}")

    def count(word: str) -> int:
        lineno, line = take(f"'{word} <int>'")
        parts = line.split()
        if len(parts) != 2 or parts[0] != word:
            raise CaseFormatError(lineno, f"expected '{word} <int>', got {line!r}")
        try:
            value = int(parts[1])
        except ValueError:
            raise CaseFormatError(lineno, f"bad integer {parts[1]!r}") from None
        if value < 1:
            raise CaseFormatError(lineno, f"{word} must be at least 1")
        return value

    def values(k: int, what: str) -> list[float]:
        lineno, line = take(what)
        tokens = line.split()
        if len(tokens) != k:
            raise CaseFormatError(lineno, f"expected {k} value(s) for {what}, got {len(tokens)}")
        try:
            return [parse_value(t) for t in tokens]
        except ValueError as exc:
            raise CaseFormatError(lineno, str(exc)) from None

    keyword(HEADER)
    m = count("m")
    n = count("n")
    keyword("G")
    G = [values(n, f"row {i + 1} of G") for i in range(m)]
    keyword("h")
    h = [values(1, f"h[{i + 1}]")[0] for i in range(m)]
    witness = None
    if pos < len(body):
        keyword("witness")
        witness = np.array([values(1, f"witness[{j + 1}]")[0] for j in range(n)])
    if pos < len(body):
        lineno, line = body[pos]
        raise CaseFormatError(lineno, f"unexpected trailing content {line!r}")
    return CaseFile(LdpProblem(G, h), witness, meta)


def load(path) -> CaseFile:
    return loads(Path(path).read_text())


def dump(path, problem: LdpProblem, witness=None, meta: dict | None = None) -> None:
    Path(path).write_text(dumps(problem, witness, meta))
