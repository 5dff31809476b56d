"""Decode bit vectors into loading patterns and check every placement rule directly.

The checker never looks at the QUBO; it re-derives each rule from the layout,
so energy-zero assignments and checker-accepted patterns can be compared as
independent routes to the same answer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .encoder import EncodeOptions, FuelCounts
from .geometry import CoreLayout, Region, SymmetryGroup, symmetry_orbits

LEVEL_NAMES = {0: "fresh", 1: "once-burnt", 2: "twice-burnt"}
LEVEL_CHARS = {0: "F", 1: "O", 2: "T"}
REGION_CHARS = {Region.BORDER: "P", Region.MIDDLE: "M", Region.INNER: "I"}


class DecodeError(ValueError):
    """Bit vector is not one-hot on some cells."""

    def __init__(self, cells: Sequence[int], message: str):
        super().__init__(message)
        self.cells = tuple(cells)


@dataclass(frozen=True)
class LoadingPattern:
    """Burn level (0 fresh, 1 once-burnt, 2 twice-burnt) assigned to every cell."""

    assignment: dict[int, int]
    layout_name: str = ""

    def level_counts(self) -> FuelCounts:
        tally = [0, 0, 0]
        for b in self.assignment.values():
            tally[b] += 1
        return FuelCounts(*tally)


@dataclass(frozen=True)
class Violation:
    rule: str
    cells: tuple[int, ...]
    message: str


@dataclass(frozen=True)
class FeasibilityReport:
    violations: tuple[Violation, ...]

    @property
    def feasible(self) -> bool:
        return not self.violations


def decode(z: Sequence[int], layout: CoreLayout) -> LoadingPattern:
    """Read the one-hot blocks of z into a pattern; cells whose three bits do
    not sum to one are collected into a DecodeError."""
    n = layout.n
    if len(z) != 3 * n:
        raise ValueError(f"assignment length {len(z)} != 3N = {3 * n}")
    bad = []
    assignment = {}
    for i in range(n):
        hot = [b for b in range(3) if z[b * n + i]]
        if len(hot) != 1:
            bad.append(i)
        else:
            assignment[i] = hot[0]
    if bad:
        raise DecodeError(bad, f"cells without exactly one burn-level bit set: {bad}")
    return LoadingPattern(assignment=assignment, layout_name=layout.name)


def pattern_to_bits(pattern: LoadingPattern, layout: CoreLayout) -> tuple[int, ...]:
    """Inverse of decode for a pattern covering the layout."""
    n = layout.n
    z = [0] * (3 * n)
    for i, b in pattern.assignment.items():
        z[b * n + i] = 1
    return tuple(z)


def _cells_str(layout: CoreLayout, ids) -> str:
    return ", ".join(f"{i}@({layout.cells[i].x},{layout.cells[i].y})" for i in ids)


def _fresh_pair_exempt(layout: CoreLayout, i: int, k: int, prose_rule: bool) -> bool:
    if prose_rule:
        # pair allowed when either member touches a border cell
        return any(
            layout.region[m] is Region.BORDER
            for cell in (i, k)
            for m in layout.adjacency[cell]
        )
    # formula convention: only pairs lying entirely on the border are allowed
    return layout.region[i] is Region.BORDER and layout.region[k] is Region.BORDER


def _symmetry_violations(levels, layout, group: SymmetryGroup, rule: str) -> list[Violation]:
    found = []
    for orbit in symmetry_orbits(layout, group).orbits:
        values = {levels[i] for i in orbit}
        if len(values) > 1:
            detail = ", ".join(f"{i}={LEVEL_NAMES[levels[i]]}" for i in orbit)
            found.append(Violation(rule, tuple(orbit), f"orbit not constant: {detail}"))
    return found


def check(pattern: LoadingPattern, layout: CoreLayout, counts: FuelCounts,
          options: EncodeOptions = EncodeOptions(), *,
          prose_fresh_rule: bool = False) -> FeasibilityReport:
    """Check every placement rule independently and report all violations.

    prose_fresh_rule switches the fresh-adjacency exemption from the formula
    convention (border partners) to the looser textual one (either member
    adjacent to a border cell).
    """
    n = layout.n
    if set(pattern.assignment) != set(range(n)):
        raise ValueError("pattern does not cover the layout's cells exactly")
    levels = [pattern.assignment[i] for i in range(n)]
    if any(b not in (0, 1, 2) for b in levels):
        raise ValueError("burn levels must be 0, 1, or 2")
    violations: list[Violation] = []

    found = [0, 0, 0]
    for b in levels:
        found[b] += 1
    for b, (have, want) in enumerate(zip(found, counts.as_tuple())):
        if have != want:
            violations.append(Violation(
                "counts", (),
                f"{LEVEL_NAMES[b]} count is {have}, expected {want}",
            ))

    bad = [i for i in range(n) if layout.region[i] is Region.BORDER and levels[i] == 2]
    if bad:
        violations.append(Violation(
            "border_twice", tuple(bad),
            f"twice-burnt fuel on border cells {_cells_str(layout, bad)}",
        ))
    bad = [i for i in range(n) if layout.region[i] is Region.INNER and levels[i] == 0]
    if bad:
        violations.append(Violation(
            "inner_fresh", tuple(bad),
            f"fresh fuel on inner cells {_cells_str(layout, bad)}",
        ))

    for i in range(n):
        for k in layout.adjacency[i]:
            if k < i:
                continue
            if levels[i] == 0 and levels[k] == 0 and not _fresh_pair_exempt(layout, i, k, prose_fresh_rule):
                violations.append(Violation(
                    "fresh_adjacency", (i, k),
                    f"adjacent fresh pair {_cells_str(layout, (i, k))}",
                ))
            if levels[i] == 2 and levels[k] == 2:
                violations.append(Violation(
                    "twice_adjacency", (i, k),
                    f"adjacent twice-burnt pair {_cells_str(layout, (i, k))}",
                ))

    if options.rotational_symmetry:
        violations.extend(_symmetry_violations(levels, layout, SymmetryGroup.ROTATIONAL, "rot_symmetry"))
    if options.mirror_symmetry:
        violations.extend(_symmetry_violations(levels, layout, SymmetryGroup.MIRROR, "mirror_symmetry"))

    return FeasibilityReport(tuple(violations))


def check_bits(z: Sequence[int], layout: CoreLayout, counts: FuelCounts,
               options: EncodeOptions = EncodeOptions(), *,
               prose_fresh_rule: bool = False) -> FeasibilityReport:
    """Check a raw bit vector; non-one-hot cells become cell_loading violations
    instead of an exception, so solver outputs can be scored uniformly."""
    try:
        pattern = decode(z, layout)
    except DecodeError as exc:
        return FeasibilityReport((Violation(
            "cell_loading", exc.cells,
            f"cells without exactly one burn level: {_cells_str(layout, exc.cells)}",
        ),))
    return check(pattern, layout, counts, options, prose_fresh_rule=prose_fresh_rule)


def _render_grid(layout: CoreLayout, char_for_cell) -> str:
    xs = [c.x for c in layout.cells]
    ys = [c.y for c in layout.cells]
    coord_to_id = layout.coord_to_id
    rows = []
    for y in range(max(ys), min(ys) - 1, -1):
        row = []
        for x in range(min(xs), max(xs) + 1):
            i = coord_to_id.get((x, y))
            row.append("." if i is None else char_for_cell(i))
        rows.append(" ".join(row))
    return "\n".join(rows)


def render_layout(layout: CoreLayout) -> str:
    """ASCII core map with region markers: P border, M middle, I inner."""
    return _render_grid(layout, lambda i: REGION_CHARS[layout.region[i]])


def render_pattern(pattern: LoadingPattern, layout: CoreLayout) -> str:
    """ASCII core map with burn-level markers: F fresh, O once, T twice."""
    return _render_grid(layout, lambda i: LEVEL_CHARS[pattern.assignment[i]])


def report_text(report: FeasibilityReport) -> str:
    if report.feasible:
        return "feasible"
    lines = [f"infeasible: {len(report.violations)} violation(s)"]
    for v in report.violations:
        lines.append(f"  {v.rule:16s} {v.message}")
    return "\n".join(lines)


def report_doc(report: FeasibilityReport) -> dict:
    return {
        "feasible": report.feasible,
        "violations": [
            {"rule": v.rule, "cells": list(v.cells), "message": v.message}
            for v in report.violations
        ],
    }


def save_pattern(pattern: LoadingPattern, path) -> None:
    doc = {
        "layout": pattern.layout_name,
        "assignment": {str(i): b for i, b in sorted(pattern.assignment.items())},
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_pattern(path) -> LoadingPattern:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed pattern file {path}: {exc}") from exc
    if not isinstance(doc, dict) or "assignment" not in doc:
        raise ValueError(f"malformed pattern file {path}: missing 'assignment'")
    assignment = {}
    for key, value in doc["assignment"].items():
        b = int(value)
        if b not in (0, 1, 2):
            raise ValueError(f"invalid burn level {value!r} for cell {key} in {path}")
        assignment[int(key)] = b
    return LoadingPattern(assignment=assignment, layout_name=str(doc.get("layout", "")))
