"""Plain-text reports: ``key: value`` blocks and TSV tables with a round-trip parser.

p-adic numbers are written as in :class:`PadicNumber.__str__`; a cyclotomic
value is a ``;``-separated list of its power-basis coefficients.
"""

from __future__ import annotations

from .cyclo import CycloElement
from .padic import PadicNumber


def format_cyclo(x: CycloElement | PadicNumber) -> str:
    if isinstance(x, PadicNumber):
        return str(x)
    return "; ".join(str(c) for c in x.coeffs)


def parse_cyclo(text: str, p: int) -> CycloElement:
    coeffs = [PadicNumber.parse(t.strip()) for t in text.split(";")]
    m = 0
    n = len(coeffs)
    while n > 1 and (p - 1) * p**m != n:
        m += 1
    if n > 1:
        m += 1
    return CycloElement(p, m, coeffs)


def format_block(pairs: list[tuple[str, object]]) -> str:
    return "".join(f"{k}: {v}\n" for k, v in pairs)


def parse_block(text: str) -> list[tuple[str, str]]:
    out = []
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        key, _, val = line.partition(": ")
        out.append((key, val))
    return out


def format_table(header: list[str], rows: list[list[object]]) -> str:
    lines = ["\t".join(header)]
    for r in rows:
        cells = [str(c) for c in r]
        for c in cells:
            if "\t" in c or "\n" in c:
                raise ValueError("cell contains a tab or newline")
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> tuple[list[str], list[list[str]]]:
    if not text.endswith("\n"):
        raise ValueError("table must end with a newline")
    # blank lines are rows of a single empty cell, so only the final newline is dropped
    lines = text[:-1].split("\n")
    header = lines[0].split("\t")
    rows = [ln.split("\t") for ln in lines[1:]]
    for r in rows:
        if len(r) != len(header):
            raise ValueError(f"row has {len(r)} cells, header has {len(header)}")
    return header, rows


def format_report(block: list[tuple[str, object]], header: list[str] | None = None,
                  rows: list[list[object]] | None = None) -> str:
    """A key:value block, then an optional table after a ``--`` separator."""
    out = format_block(block)
    if header is not None:
        out += "--\n" + format_table(header, rows or [])
    return out


def parse_report(text: str) -> tuple[list[tuple[str, str]], tuple[list[str], list[list[str]]] | None]:
    if text.startswith("--\n"):
        return [], parse_table(text[3:])
    head, sep, tail = text.partition("\n--\n")
    if sep:
        head += "\n"
    return parse_block(head), (parse_table(tail) if sep else None)
