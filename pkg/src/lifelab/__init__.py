"""Deterministic Game-of-Life laboratory with a primary/backup failover rig.

The package is organized in layers:

- ``engine``: synchronous stepping of a bounded grid under a
  (new_life, over_population, under_population) rule triple.
- ``patterns``: RLE codec, geometric transforms, and the built-in
  component library (blinker, block, boat, glider, guns, ...).
- ``oracles``: behavioral analysis - period detection, glider tracking,
  collision classification, and brute-force reaction discovery.
- ``failover``: the 420x200 primary/backup configuration, session
  monitoring, and the Init / KillPrimary / ResetBackup actions.
- ``cli``: scriptable scenario runner (``lifelab run|validate|discover``).
- ``service``: line-delimited-JSON session server for interactive use.
"""

from .engine import Rule, Grid, Region, CONWAY
from .patterns import Pattern, Transform, Placement, parse_rle, emit_rle, builtin

__all__ = [
    "Rule",
    "Grid",
    "Region",
    "CONWAY",
    "Pattern",
    "Transform",
    "Placement",
    "parse_rle",
    "emit_rle",
    "builtin",
]

__version__ = "0.1.0"
