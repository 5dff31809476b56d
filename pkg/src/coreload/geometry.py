"""Square-lattice core geometry: cells, adjacency, region classes, symmetry orbits.

Cores live on the integer lattice with the core center at the origin. Cell ids
are assigned in reading order (rows top to bottom, columns left to right), so
the printed map and the id numbering agree.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from pathlib import Path


class Region(Enum):
    BORDER = "border"
    MIDDLE = "middle"
    INNER = "inner"


class SymmetryGroup(Enum):
    IDENTITY = "identity"
    ROTATIONAL = "rotation"  # quarter-turn rotations (C4)
    MIRROR = "mirror"        # reflections about the two axes and their composition
    FULL = "full"            # all rotations and reflections (D4)


def _ident(x: int, y: int):
    return x, y


def _rot90(x: int, y: int):
    return -y, x


def _rot180(x: int, y: int):
    return -x, -y


def _rot270(x: int, y: int):
    return y, -x


def _ref_v(x: int, y: int):
    return -x, y


def _ref_h(x: int, y: int):
    return x, -y


def _ref_diag(x: int, y: int):
    return y, x


def _ref_anti(x: int, y: int):
    return -y, -x


_GROUP_ELEMENTS = {
    SymmetryGroup.IDENTITY: (_ident,),
    SymmetryGroup.ROTATIONAL: (_ident, _rot90, _rot180, _rot270),
    SymmetryGroup.MIRROR: (_ident, _ref_v, _ref_h, _rot180),
    SymmetryGroup.FULL: (
        _ident, _rot90, _rot180, _rot270, _ref_v, _ref_h, _ref_diag, _ref_anti,
    ),
}

# Neighbor probe order fixes the deterministic ordering of adjacency lists.
_NEIGHBOR_STEPS = ((-1, 0), (1, 0), (0, 1), (0, -1))  # left, right, top, bottom


@dataclass(frozen=True)
class Cell:
    id: int
    x: int
    y: int


@dataclass(frozen=True)
class CoreLayout:
    """Immutable lattice with per-cell adjacency and region class.

    ``adjacency[i]`` lists the in-core von Neumann neighbors of cell ``i`` in
    left/right/top/bottom order, absent positions skipped. ``region_overrides``
    are reapplied whenever regions are recomputed, so layouts loaded from file
    keep their declared classes.
    """

    name: str
    cells: tuple[Cell, ...]
    adjacency: tuple[tuple[int, ...], ...]
    region: tuple[Region, ...]
    inner_depth: int = 2
    region_overrides: tuple[tuple[int, Region], ...] = ()

    @property
    def n(self) -> int:
        return len(self.cells)

    @cached_property
    def coord_to_id(self) -> dict[tuple[int, int], int]:
        return {(c.x, c.y): c.id for c in self.cells}

    def neighbors(self, i: int) -> tuple[int, ...]:
        if not 0 <= i < self.n:
            raise ValueError(f"cell id {i} out of range for {self.n}-cell core")
        return self.adjacency[i]

    def region_cells(self, region: Region) -> tuple[int, ...]:
        return tuple(c.id for c in self.cells if self.region[c.id] is region)

    def region_tally(self) -> dict[Region, int]:
        tally = {r: 0 for r in Region}
        for r in self.region:
            tally[r] += 1
        return tally


@dataclass(frozen=True)
class SymmetryOrbits:
    """Partition of the cell set into equivalence classes under a group action."""

    group: SymmetryGroup
    orbits: tuple[tuple[int, ...], ...]


def _build_adjacency(cells: tuple[Cell, ...], coord_to_id) -> tuple[tuple[int, ...], ...]:
    adj = []
    for c in cells:
        ids = []
        for dx, dy in _NEIGHBOR_STEPS:
            j = coord_to_id.get((c.x + dx, c.y + dy))
            if j is not None:
                ids.append(j)
        adj.append(tuple(ids))
    return tuple(adj)


def _boundary_distances(adjacency) -> list[int]:
    """Graph distance to the nearest cell with fewer than four neighbors."""
    n = len(adjacency)
    dist = [-1] * n
    queue = deque()
    for i in range(n):
        if len(adjacency[i]) < 4:
            dist[i] = 0
            queue.append(i)
    while queue:
        i = queue.popleft()
        for j in adjacency[i]:
            if dist[j] < 0:
                dist[j] = dist[i] + 1
                queue.append(j)
    return dist


def _classify(adjacency, inner_depth: int, overrides=()) -> tuple[Region, ...]:
    dist = _boundary_distances(adjacency)
    region = [
        Region.BORDER if d == 0 else Region.INNER if d >= inner_depth else Region.MIDDLE
        for d in dist
    ]
    for i, r in overrides:
        region[i] = r
    return tuple(region)


def _finalize(name: str, cells: tuple[Cell, ...], inner_depth: int,
              overrides: tuple[tuple[int, Region], ...] = ()) -> CoreLayout:
    if inner_depth < 1:
        raise ValueError("inner_depth must be at least 1")
    coord_to_id = {}
    for c in cells:
        if (c.x, c.y) in coord_to_id:
            raise ValueError(f"duplicate cell coordinates ({c.x}, {c.y})")
        coord_to_id[(c.x, c.y)] = c.id
    adjacency = _build_adjacency(cells, coord_to_id)
    region = _classify(adjacency, inner_depth, overrides)
    return CoreLayout(
        name=name,
        cells=cells,
        adjacency=adjacency,
        region=region,
        inner_depth=inner_depth,
        region_overrides=overrides,
    )


def _layout_from_coords(name: str, coords, inner_depth: int) -> CoreLayout:
    ordered = sorted(coords, key=lambda p: (-p[1], p[0]))  # reading order
    cells = tuple(Cell(i, x, y) for i, (x, y) in enumerate(ordered))
    return _finalize(name, cells, inner_depth)


def build_disc_core(radius_sq: int, inner_depth: int = 2, name: str | None = None) -> CoreLayout:
    """Core of all lattice cells with x^2 + y^2 <= radius_sq.

    Symmetric under the full D4 group by construction.
    """
    if radius_sq < 0:
        raise ValueError("radius_sq must be non-negative")
    r = math.isqrt(radius_sq)
    coords = [
        (x, y)
        for y in range(r, -r - 1, -1)
        for x in range(-r, r + 1)
        if x * x + y * y <= radius_sq
    ]
    return _layout_from_coords(name or f"disc{radius_sq}", coords, inner_depth)


def build_square_core(n: int, inner_depth: int = 2, name: str | None = None) -> CoreLayout:
    """Full n-by-n core centered at the origin; n must be odd so a central cell exists."""
    if n < 1:
        raise ValueError("n must be positive")
    if n % 2 == 0:
        raise ValueError("n must be odd so the lattice has a central cell")
    h = n // 2
    coords = [(x, y) for y in range(h, -h - 1, -1) for x in range(-h, h + 1)]
    return _layout_from_coords(name or f"square{n}", coords, inner_depth)


def classify_regions(layout: CoreLayout, inner_depth: int) -> CoreLayout:
    """Reclassify regions by boundary distance: border at distance 0 (fewer than
    four neighbors), inner at distance >= inner_depth, middle in between.
    Stored per-cell overrides are reapplied on top."""
    region = _classify(layout.adjacency, inner_depth, layout.region_overrides)
    return CoreLayout(
        name=layout.name,
        cells=layout.cells,
        adjacency=layout.adjacency,
        region=region,
        inner_depth=inner_depth,
        region_overrides=layout.region_overrides,
    )


def symmetry_orbits(layout: CoreLayout, group: SymmetryGroup) -> SymmetryOrbits:
    """Orbits of the cells under the group action.

    The cell set must be closed under every group element; the first cell whose
    image falls outside the core is named in the error otherwise.
    """
    coord_to_id = layout.coord_to_id
    parent = list(range(layout.n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for cell in layout.cells:
        for op in _GROUP_ELEMENTS[group]:
            tx, ty = op(cell.x, cell.y)
            j = coord_to_id.get((tx, ty))
            if j is None:
                raise ValueError(
                    f"layout {layout.name!r} is not closed under {group.value} "
                    f"symmetry: cell {cell.id} at ({cell.x}, {cell.y}) maps to "
                    f"({tx}, {ty}), which is not in the core"
                )
            ri, rj = find(cell.id), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

    members: dict[int, list[int]] = {}
    for i in range(layout.n):
        members.setdefault(find(i), []).append(i)
    orbits = tuple(sorted(tuple(sorted(v)) for v in members.values()))
    return SymmetryOrbits(group=group, orbits=orbits)


def neighbors(layout: CoreLayout, i: int) -> tuple[int, ...]:
    """In-core von Neumann neighbors of cell i (left, right, top, bottom order)."""
    return layout.neighbors(i)


def save_layout(layout: CoreLayout, path) -> None:
    doc: dict = {
        "name": layout.name,
        "cells": [{"id": c.id, "x": c.x, "y": c.y} for c in layout.cells],
        "inner_depth": layout.inner_depth,
    }
    if layout.region_overrides:
        doc["region_overrides"] = {str(i): r.value for i, r in layout.region_overrides}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_layout(path) -> CoreLayout:
    """Load a layout file, recompute adjacency and regions, apply overrides."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed layout file {path}: {exc}") from exc
    if not isinstance(doc, dict) or "cells" not in doc:
        raise ValueError(f"malformed layout file {path}: missing 'cells'")

    raw_cells = doc["cells"]
    if not isinstance(raw_cells, list) or not raw_cells:
        raise ValueError(f"malformed layout file {path}: 'cells' must be a non-empty array")
    n = len(raw_cells)
    by_id: dict[int, Cell] = {}
    for entry in raw_cells:
        try:
            cell = Cell(int(entry["id"]), int(entry["x"]), int(entry["y"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed cell entry {entry!r} in {path}") from exc
        if cell.id in by_id:
            raise ValueError(f"duplicate cell id {cell.id} in {path}")
        by_id[cell.id] = cell
    if sorted(by_id) != list(range(n)):
        raise ValueError(f"cell ids in {path} must be contiguous 0..{n - 1}")
    cells = tuple(by_id[i] for i in range(n))

    inner_depth = int(doc.get("inner_depth", 2))
    overrides = []
    for key, value in (doc.get("region_overrides") or {}).items():
        i = int(key)
        if not 0 <= i < n:
            raise ValueError(f"region override for unknown cell id {i} in {path}")
        try:
            overrides.append((i, Region(value)))
        except ValueError as exc:
            raise ValueError(f"invalid region {value!r} for cell {i} in {path}") from exc

    name = str(doc.get("name", Path(path).stem))
    return _finalize(name, cells, inner_depth, tuple(sorted(overrides)))


# Built-in cores: disc-clipped lattices (plus one odd square) whose cell counts
# match the seven benchmark core sizes. Each preset is revalidated at build time.
_BUILTINS: dict[str, tuple[str, int, int]] = {
    "core13": ("disc", 4, 13),
    "core37": ("disc", 10, 37),
    "core69": ("disc", 20, 69),
    "core97": ("disc", 29, 97),
    "core121": ("square", 11, 121),
    "pwr193": ("disc", 61, 193),
    "core241": ("disc", 74, 241),
}

BUILTIN_CORE_NAMES = tuple(_BUILTINS)


def builtin_core(name: str, inner_depth: int = 2) -> CoreLayout:
    """Construct a built-in core by name (core13 .. core241, pwr193)."""
    try:
        kind, param, expected = _BUILTINS[name]
    except KeyError:
        known = ", ".join(BUILTIN_CORE_NAMES)
        raise ValueError(f"unknown core {name!r}; available: {known}") from None
    if kind == "disc":
        layout = build_disc_core(param, inner_depth, name=name)
    else:
        layout = build_square_core(param, inner_depth, name=name)
    if layout.n != expected:
        raise AssertionError(f"preset {name} produced {layout.n} cells, expected {expected}")
    return layout
