"""Grid representation and deterministic synchronous stepping.

Coordinates follow the RLE convention: x grows rightward, y grows
downward, origin at the top-left. Cells outside the grid are permanently
dead (fixed dead boundary, no wraparound). Grids are immutable values;
every operation returns a new grid.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable

import numpy as np

Coord = tuple[int, int]


@dataclass(frozen=True)
class Rule:
    """Life rule triple (new_life, over_population, under_population).

    A dead cell with exactly ``new_life`` live neighbors is born; a live
    cell survives iff its neighbor count lies in
    [under_population, over_population].
    """

    new_life: int
    over_population: int
    under_population: int

    def __post_init__(self):
        for name in ("new_life", "over_population", "under_population"):
            v = getattr(self, name)
            if not (0 <= v <= 8):
                raise ValueError(f"{name} must be in 0..8, got {v}")
        if self.under_population > self.over_population:
            raise ValueError(
                "under_population must not exceed over_population: "
                f"({self.under_population}, {self.over_population})"
            )


#: Conway's rule, (3, 3, 2).
CONWAY = Rule(3, 3, 2)


@dataclass(frozen=True)
class Region:
    """Inclusive rectangle of cells [x0..x1] x [y0..y1]."""

    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if self.x0 > self.x1 or self.y0 > self.y1:
            raise ValueError(f"degenerate region {self}")

    @property
    def width(self) -> int:
        return self.x1 - self.x0 + 1

    @property
    def height(self) -> int:
        return self.y1 - self.y0 + 1

    def contains(self, x: int, y: int) -> bool:
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1


class Grid:
    """Immutable bounded Life grid with a generation counter.

    Backed by a read-only boolean array indexed [y, x]; correctness is
    defined by set-of-live-cells semantics.
    """

    __slots__ = ("_a", "generation")

    def __init__(self, array: np.ndarray, generation: int = 0):
        a = np.ascontiguousarray(array, dtype=bool)
        a.setflags(write=False)
        self._a = a
        self.generation = generation

    # -- constructors -------------------------------------------------

    @classmethod
    def empty(cls, width: int, height: int, generation: int = 0) -> "Grid":
        if width <= 0 or height <= 0:
            raise ValueError("grid dimensions must be positive")
        return cls(np.zeros((height, width), dtype=bool), generation)

    @classmethod
    def from_cells(
        cls, width: int, height: int, cells: Iterable[Coord], generation: int = 0
    ) -> "Grid":
        a = np.zeros((height, width), dtype=bool)
        for x, y in cells:
            if not (0 <= x < width and 0 <= y < height):
                raise ValueError(f"cell ({x}, {y}) outside {width}x{height} grid")
            a[y, x] = True
        return cls(a, generation)

    # -- accessors ----------------------------------------------------

    @property
    def width(self) -> int:
        return self._a.shape[1]

    @property
    def height(self) -> int:
        return self._a.shape[0]

    @property
    def array(self) -> np.ndarray:
        """Read-only boolean array, indexed [y, x]."""
        return self._a

    def live_cells(self) -> frozenset[Coord]:
        ys, xs = np.nonzero(self._a)
        return frozenset(zip(xs.tolist(), ys.tolist()))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return (
            self._a.shape == other._a.shape
            and bool(np.array_equal(self._a, other._a))
        )

    def __hash__(self):
        return hash((self._a.shape, self._a.tobytes()))

    def __repr__(self):
        return (
            f"Grid({self.width}x{self.height}, gen={self.generation}, "
            f"pop={population(self)})"
        )


# -- operations --------------------------------------------------------


def step_raw(a: np.ndarray, rule: Rule) -> np.ndarray:
    """Array-in, array-out stepping for hot loops (no Grid wrapper)."""
    n = np.zeros(a.shape, dtype=np.uint8)
    n[1:, :] += a[:-1, :]
    n[:-1, :] += a[1:, :]
    n[:, 1:] += a[:, :-1]
    n[:, :-1] += a[:, 1:]
    n[1:, 1:] += a[:-1, :-1]
    n[:-1, :-1] += a[1:, 1:]
    n[1:, :-1] += a[:-1, 1:]
    n[:-1, 1:] += a[1:, :-1]
    born = (~a) & (n == rule.new_life)
    survive = a & (n >= rule.under_population) & (n <= rule.over_population)
    return born | survive


def step(grid: Grid, rule: Rule) -> Grid:
    """Advance one generation. Deterministic; dead boundary."""
    return Grid(step_raw(grid._a, rule), grid.generation + 1)


def step_n(grid: Grid, rule: Rule, n: int) -> Grid:
    """n-fold composition of :func:`step`; ``n = 0`` is the identity."""
    if n < 0:
        raise ValueError("n must be >= 0")
    g = grid
    for _ in range(n):
        g = step(g, rule)
    return g


def _check_region(grid: Grid, r: Region):
    if r.x0 < 0 or r.y0 < 0 or r.x1 >= grid.width or r.y1 >= grid.height:
        raise ValueError(f"region {r} exceeds {grid.width}x{grid.height} grid")


def clear_region(grid: Grid, r: Region) -> Grid:
    """Kill every cell inside ``r``; generation unchanged."""
    _check_region(grid, r)
    a = grid._a.copy()
    a[r.y0 : r.y1 + 1, r.x0 : r.x1 + 1] = False
    return Grid(a, grid.generation)


def write_region(grid: Grid, r: Region, cells: Iterable[Coord]) -> Grid:
    """Clear ``r`` then set ``cells`` (absolute coordinates) live.

    Every cell must lie inside ``r``. Generation unchanged.
    """
    _check_region(grid, r)
    a = grid._a.copy()
    a[r.y0 : r.y1 + 1, r.x0 : r.x1 + 1] = False
    for x, y in cells:
        if not r.contains(x, y):
            raise ValueError(f"cell ({x}, {y}) outside region {r}")
        a[y, x] = True
    return Grid(a, grid.generation)


def population(grid: Grid) -> int:
    return int(grid._a.sum())


def grid_hash(grid: Grid) -> str:
    """Stable hex digest of (width, height, live cells).

    Equal grids hash equal across runs and platforms; the generation
    counter is not part of the digest.
    """
    h = hashlib.sha256()
    h.update(f"{grid.width}x{grid.height}:".encode())
    h.update(np.packbits(grid._a, bitorder="big").tobytes())
    return h.hexdigest()


# -- plain-text dumps ---------------------------------------------------


def to_text(grid: Grid) -> str:
    """Height lines of width characters: '.' dead, 'O' live."""
    return "\n".join(
        "".join("O" if v else "." for v in row) for row in grid._a
    )


def from_text(text: str, generation: int = 0) -> Grid:
    rows = [line for line in text.splitlines() if line]
    if not rows:
        raise ValueError("empty grid text")
    w = len(rows[0])
    if any(len(r) != w for r in rows):
        raise ValueError("ragged grid text")
    a = np.array([[c == "O" for c in row] for row in rows], dtype=bool)
    return Grid(a, generation)
