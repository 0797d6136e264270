"""
Text formats: QFAM v1 (families) and QPAT v1 (patterns).

QFAM v1:
    #qfam v1
    n=<dim>
    1,3,5        one set per line, sorted elements in 1..n
    -            the empty set
    # comment

QPAT v1:
    #qpat v1
    a -> b       one edge per line, names [A-Za-z0-9_]+
    # comment
"""
from pathlib import Path
from typing import TextIO
import logging
import re

from qturan.core.exceptions import InvalidFamilyError, PatternError
from qturan.core.hypercube import Family, mask_to_set, set_to_mask

logger = logging.getLogger(__name__)

QFAM_HEADER = "#qfam v1"
QPAT_HEADER = "#qpat v1"
_DIM_RE = re.compile(r"^n\s*=\s*(\d+)$")
_EDGE_RE = re.compile(r"^([A-Za-z0-9_]+)\s*->\s*([A-Za-z0-9_]+)$")


def format_qfam_line(v: int) -> str:
    elements = mask_to_set(v)
    return ",".join(str(x) for x in elements) if elements else "-"


def write_qfam(f: Family, sink: TextIO) -> None:
    """Write a family in QFAM v1, sets in ascending mask order."""
    sink.write(f"{QFAM_HEADER}\n")
    sink.write(f"n={f.n}\n")
    for v in f:
        sink.write(format_qfam_line(v) + "\n")


def save_qfam(f: Family, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as sink:
        write_qfam(f, sink)
    logger.info(f"Wrote family of size {len(f)} to {path}")


def parse_qfam(text: str) -> Family:
    """
    Parse QFAM v1 text.

    Raises:
        InvalidFamilyError: On a bad header, malformed line, element out of
            range or duplicate set
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != QFAM_HEADER:
        raise InvalidFamilyError(f"QFAM must start with '{QFAM_HEADER}'")
    if len(lines) < 2 or not _DIM_RE.match(lines[1].strip()):
        raise InvalidFamilyError("QFAM line 2 must be 'n=<dim>'")
    n = int(_DIM_RE.match(lines[1].strip()).group(1))

    masks = []
    seen = set()
    for lineno, raw in enumerate(lines[2:], start=3):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line == "-":
            elements = []
        else:
            try:
                elements = [int(tok) for tok in line.split(",")]
            except ValueError:
                raise InvalidFamilyError(f"line {lineno}: malformed set '{line}'")
            if elements != sorted(elements):
                raise InvalidFamilyError(f"line {lineno}: elements must be sorted")
        mask = set_to_mask(elements, n)
        if mask in seen:
            raise InvalidFamilyError(f"line {lineno}: duplicate set '{line}'")
        seen.add(mask)
        masks.append(mask)
    return Family.from_masks(n, masks)


def load_qfam(path: str | Path) -> Family:
    with open(path, encoding="utf-8") as source:
        family = parse_qfam(source.read())
    logger.info(f"Loaded family of size {len(family)} (n={family.n}) from {path}")
    return family


def parse_qpat(text: str) -> tuple[list[str], list[tuple[int, int]]]:
    """
    Parse QPAT v1 text into vertex names and index edges.

    Vertex indices follow first-appearance order; names are case-sensitive.
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != QPAT_HEADER:
        raise PatternError(f"QPAT must start with '{QPAT_HEADER}'")
    names: dict[str, int] = {}
    edges = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        match = _EDGE_RE.match(line)
        if not match:
            raise PatternError(f"line {lineno}: expected 'u -> v', got '{line}'")
        u, v = (names.setdefault(name, len(names)) for name in match.groups())
        edges.append((u, v))
    if not names:
        raise PatternError("QPAT file has no edges")
    return list(names), edges
