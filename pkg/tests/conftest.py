import numpy as np

from lifelab.engine import CONWAY, Grid


def naive_step_cells(cells, width, height, rule=CONWAY):
    """Independent stepping oracle: per-cell 8-neighbor counting over sets.

    Deliberately shares nothing with the engine implementation.
    """
    cells = set(cells)
    out = set()
    for y in range(height):
        for x in range(width):
            n = 0
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if dx == 0 and dy == 0:
                        continue
                    if (x + dx, y + dy) in cells:
                        n += 1
            if (x, y) in cells:
                if rule.under_population <= n <= rule.over_population:
                    out.add((x, y))
            elif n == rule.new_life:
                out.add((x, y))
    return out


def random_grid(rng, width=16, height=16, density=0.3):
    a = rng.random((height, width)) < density
    return Grid(a)


def rng_for(seed):
    return np.random.default_rng(seed)
