"""Patterns: normalized cell sets, RLE codec, transforms, placement.

A pattern's cells are offsets normalized so the minimum dx and dy are
both zero. Serialization uses the standard Life RLE format. The built-in
component library lives under ``assets/`` as RLE files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from . import engine
from .engine import CONWAY, Grid, Rule

Coord = tuple[int, int]

BUILTIN_NAMES = (
    "blinker",
    "block",
    "boat",
    "glider",
    "gosper_gun",
    "p92_gun",
    "passive_blinker",
)


def _normalize(cells) -> frozenset[Coord]:
    cells = frozenset((int(x), int(y)) for x, y in cells)
    if not cells:
        return cells
    mx = min(x for x, _ in cells)
    my = min(y for _, y in cells)
    return frozenset((x - mx, y - my) for x, y in cells)


@dataclass(frozen=True)
class Pattern:
    """Normalized set of live-cell offsets with an optional label."""

    cells: frozenset[Coord]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "cells", _normalize(self.cells))

    @property
    def width(self) -> int:
        return max((x for x, _ in self.cells), default=-1) + 1

    @property
    def height(self) -> int:
        return max((y for _, y in self.cells), default=-1) + 1

    def __len__(self):
        return len(self.cells)

    def translated(self, ox: int, oy: int) -> set[Coord]:
        """Absolute coordinates of the cells placed with origin (ox, oy)."""
        return {(x + ox, y + oy) for x, y in self.cells}


@dataclass(frozen=True)
class Transform:
    """One of the 8 square symmetries.

    ``flip`` mirrors across the vertical axis (x -> -x) first, then
    ``rotation`` quarter-turns clockwise are applied.
    """

    rotation: int = 0
    flip: bool = False

    def __post_init__(self):
        if self.rotation not in (0, 1, 2, 3):
            raise ValueError("rotation must be 0..3")

    def apply(self, x: int, y: int) -> Coord:
        if self.flip:
            x = -x
        for _ in range(self.rotation):
            x, y = -y, x
        return x, y

    def inverse(self) -> "Transform":
        # brute inverse over the 8-element group; cheap and obviously right
        probe = [(0, 0), (1, 0), (0, 1), (2, 1)]
        for rot in range(4):
            for flip in (False, True):
                cand = Transform(rot, flip)
                if all(cand.apply(*self.apply(x, y)) == (x, y) for x, y in probe):
                    return cand
        raise AssertionError("unreachable: symmetry group is closed")


IDENTITY = Transform()


def apply_transform(p: Pattern, t: Transform) -> Pattern:
    """Rotate/flip a pattern and re-normalize. Cell count is preserved."""
    return Pattern(frozenset(t.apply(x, y) for x, y in p.cells), p.name)


@dataclass(frozen=True)
class Placement:
    """A pattern, oriented and phased, anchored at a grid coordinate.

    ``phase`` pre-steps the transformed pattern in isolation (on an empty
    grid of the target's dimensions) before merging.
    """

    pattern: Pattern
    origin: Coord
    transform: Transform = IDENTITY
    phase: int = 0

    def __post_init__(self):
        if self.phase < 0:
            raise ValueError("phase must be >= 0")


class PlacementError(ValueError):
    pass


def placement_cells(grid_width: int, grid_height: int, pl: Placement,
                    rule: Rule = CONWAY) -> frozenset[Coord]:
    """Absolute cells a placement contributes to a grid of the given size."""
    p = apply_transform(pl.pattern, pl.transform)
    cells = p.translated(*pl.origin)
    for x, y in cells:
        if not (0 <= x < grid_width and 0 <= y < grid_height):
            raise PlacementError(
                f"placement of {pl.pattern.name or 'pattern'} at {pl.origin} "
                f"leaves bounds ({x}, {y})"
            )
    if pl.phase:
        scratch = Grid.from_cells(grid_width, grid_height, cells)
        scratch = engine.step_n(scratch, rule, pl.phase)
        cells = scratch.live_cells()
    return frozenset(cells)


def place(grid: Grid, pl: Placement, rule: Rule = CONWAY) -> Grid:
    """Merge a placement into the grid; overlap with live cells is an error."""
    cells = placement_cells(grid.width, grid.height, pl, rule)
    a = grid.array.copy()
    for x, y in cells:
        if a[y, x]:
            raise PlacementError(
                f"placement of {pl.pattern.name or 'pattern'} at {pl.origin} "
                f"overlaps a live cell at ({x}, {y})"
            )
        a[y, x] = True
    return Grid(a, grid.generation)


# -- RLE codec ----------------------------------------------------------

_HEADER_RE = re.compile(
    r"^\s*x\s*=\s*(\d+)\s*,\s*y\s*=\s*(\d+)\s*(?:,\s*rule\s*=\s*(\S+)\s*)?$",
    re.IGNORECASE,
)


class RleError(ValueError):
    pass


def parse_rle(text: str, name: str | None = None) -> Pattern:
    """Decode standard Life RLE into a normalized pattern.

    Accepts ``#`` comment lines and an optional ``x = W, y = H`` header;
    if a header is present its extents must match the decoded content.
    """
    header = None
    body_lines = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _HEADER_RE.match(stripped)
        if m and header is None and not body_lines:
            header = (int(m.group(1)), int(m.group(2)))
            continue
        body_lines.append(stripped)
    body = "".join(body_lines)
    if "!" not in body:
        raise RleError("RLE body missing '!' terminator")
    body = body[: body.index("!")]

    cells = set()
    x = y = 0
    run = ""
    for ch in body:
        if ch.isdigit():
            run += ch
        elif ch in ("b", "o"):
            n = int(run) if run else 1
            if ch == "o":
                cells.update((x + i, y) for i in range(n))
            x += n
            run = ""
        elif ch == "$":
            n = int(run) if run else 1
            y += n
            x = 0
            run = ""
        elif ch.isspace():
            continue
        else:
            raise RleError(f"unexpected character {ch!r} in RLE body")
    if run:
        raise RleError("dangling run count before '!'")

    p = Pattern(frozenset(cells), name)
    if header is not None and cells:
        if header != (p.width, p.height):
            raise RleError(
                f"header says {header[0]}x{header[1]} but content is "
                f"{p.width}x{p.height}"
            )
    if header is not None and not cells and header != (0, 0):
        raise RleError("nonzero header for empty pattern")
    return p


def emit_rle(p: Pattern, comments: list[str] | None = None) -> str:
    """Encode a pattern as RLE with header; round-trips via parse_rle."""
    lines = [f"#C {c}" for c in (comments or [])]
    lines.append(f"x = {p.width if p.cells else 0}, y = {p.height if p.cells else 0}")
    if not p.cells:
        lines.append("!")
        return "\n".join(lines)

    w, h = p.width, p.height
    rows = [[False] * w for _ in range(h)]
    for x, y in p.cells:
        rows[y][x] = True

    runs = []
    blank = 0
    for yy in range(h):
        row = rows[yy]
        if not any(row):
            blank += 1
            continue
        if yy and runs:
            runs.append((blank + 1, "$"))
        blank = 0
        i = 0
        last_live = max(ix for ix, v in enumerate(row) if v)
        while i <= last_live:
            j = i
            while j <= last_live and row[j] == row[i]:
                j += 1
            runs.append((j - i, "o" if row[i] else "b"))
            i = j
    runs.append((1, "!"))

    body = ""
    line = ""
    for n, ch in runs:
        tok = (str(n) if n > 1 else "") + ch
        if len(line) + len(tok) > 70:
            body += line + "\n"
            line = ""
        line += tok
    body += line
    lines.extend(body.splitlines())
    return "\n".join(lines)


# -- builtin library ----------------------------------------------------


def _load_asset(name: str) -> Pattern:
    text = resources.files("lifelab.assets").joinpath(f"{name}.rle").read_text()
    return parse_rle(text, name)


_builtin_cache: dict[str, Pattern] = {}


def builtin(name: str) -> Pattern:
    """Return a canonical library pattern by name."""
    if name not in BUILTIN_NAMES:
        raise KeyError(f"unknown builtin {name!r}; choose from {BUILTIN_NAMES}")
    if name not in _builtin_cache:
        _builtin_cache[name] = _load_asset(name)
    return _builtin_cache[name]
