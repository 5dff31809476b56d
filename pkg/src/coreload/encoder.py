"""Penalty encoding of the reloading rules as a QUBO over 3N one-hot bits.

Variable layout: bit ``b * N + i`` says cell ``i`` holds fuel at burn level
``b`` (0 fresh, 1 once-burnt, 2 twice-burnt). Five penalty groups are summed,
each weighted separately:

  one_hot    exactly one burn level per cell
  counts     the per-level totals match the requested batch sizes
  region     no twice-burnt fuel on the border, no fresh fuel in the inner zone
  adjacency  no adjacent fresh pairs (pairs whose partner sits on the border
             are exempt) and no adjacent twice-burnt pairs
  symmetry   bits constant on every orbit of the enabled symmetry group

Every group is non-negative and vanishes exactly on assignments satisfying its
rule, so total energy zero certifies feasibility.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import CoreLayout, Region, SymmetryGroup, symmetry_orbits
from .model import QuboBuilder, QuboModel

BURN_LEVELS = (0, 1, 2)


@dataclass(frozen=True)
class FuelCounts:
    """Available assemblies per burn level for one reload."""

    fresh: int
    once: int
    twice: int

    def __post_init__(self):
        if min(self.fresh, self.once, self.twice) < 0:
            raise ValueError("fuel counts must be non-negative")

    @property
    def total(self) -> int:
        return self.fresh + self.once + self.twice

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.fresh, self.once, self.twice)


@dataclass(frozen=True)
class PenaltyWeights:
    """Multipliers for the five penalty groups; all default to 1."""

    one_hot: float = 1.0
    counts: float = 1.0
    region: float = 1.0
    adjacency: float = 1.0
    symmetry: float = 1.0

    def __post_init__(self):
        if min(self.one_hot, self.counts, self.region, self.adjacency, self.symmetry) < 0:
            raise ValueError("penalty weights must be non-negative")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.one_hot, self.counts, self.region, self.adjacency, self.symmetry)


@dataclass(frozen=True)
class EncodeOptions:
    rotational_symmetry: bool = False
    mirror_symmetry: bool = False
    weights: PenaltyWeights = field(default_factory=PenaltyWeights)
    # Squared region sums match the reference formulation (cross terms between
    # offending cells included); the linear form has the same zero set.
    squared_region_terms: bool = True


def var_index(b: int, i: int, n: int) -> int:
    """Variable index of burn level b at cell i for an n-cell core."""
    return b * n + i


def symmetry_group(options: EncodeOptions) -> SymmetryGroup | None:
    """Orbit group implied by the enabled symmetry flags, or None."""
    if options.rotational_symmetry and options.mirror_symmetry:
        return SymmetryGroup.FULL
    if options.rotational_symmetry:
        return SymmetryGroup.ROTATIONAL
    if options.mirror_symmetry:
        return SymmetryGroup.MIRROR
    return None


def encode(layout: CoreLayout, counts: FuelCounts,
           options: EncodeOptions = EncodeOptions()) -> QuboModel:
    """Build the penalty QUBO for a layout and batch mix.

    Term emission order is fixed, so encoding the same inputs twice yields
    bit-identical models.
    """
    n = layout.n
    if counts.total != n:
        raise ValueError(
            f"fuel counts sum to {counts.total}, expected {n} for layout {layout.name!r}"
        )
    w = options.weights
    q = QuboBuilder(3 * n)

    # one hot: (x0 + x1 + x2 - 1)^2 per cell
    for i in range(n):
        v = [var_index(b, i, n) for b in BURN_LEVELS]
        for b in BURN_LEVELS:
            q.add_linear(v[b], -w.one_hot)
        for a in range(3):
            for b in range(a + 1, 3):
                q.add_quadratic(v[a], v[b], 2.0 * w.one_hot)
        q.add_offset(w.one_hot)

    # batch sizes: (sum_i x_i - target)^2 per level
    for b, target in zip(BURN_LEVELS, counts.as_tuple()):
        vs = [var_index(b, i, n) for i in range(n)]
        for v in vs:
            q.add_linear(v, w.counts * (1.0 - 2.0 * target))
        for a in range(n):
            for c in range(a + 1, n):
                q.add_quadratic(vs[a], vs[c], 2.0 * w.counts)
        q.add_offset(w.counts * float(target * target))

    # region exclusions: twice-burnt off the border, fresh out of the inner zone
    border = [c.id for c in layout.cells if layout.region[c.id] is Region.BORDER]
    inner = [c.id for c in layout.cells if layout.region[c.id] is Region.INNER]
    for cells, b in ((border, 2), (inner, 0)):
        vs = [var_index(b, i, n) for i in cells]
        for v in vs:
            q.add_linear(v, w.region)
        if options.squared_region_terms:
            for a in range(len(vs)):
                for c in range(a + 1, len(vs)):
                    q.add_quadratic(vs[a], vs[c], 2.0 * w.region)

    # adjacency: ordered neighbor pairs; fresh pairs skip partners on the border
    for i in range(n):
        for k in layout.adjacency[i]:
            if layout.region[k] is not Region.BORDER:
                q.add_quadratic(var_index(0, i, n), var_index(0, k, n), w.adjacency)
            q.add_quadratic(var_index(2, i, n), var_index(2, k, n), w.adjacency)

    # symmetry: tie each orbit member to the orbit representative, per level
    group = symmetry_group(options)
    if group is not None:
        orbits = symmetry_orbits(layout, group)
        for orbit in orbits.orbits:
            rep = orbit[0]
            for j in orbit[1:]:
                for b in BURN_LEVELS:
                    vi = var_index(b, rep, n)
                    vj = var_index(b, j, n)
                    # (x_i - x_j)^2 = x_i + x_j - 2 x_i x_j on binaries
                    q.add_linear(vi, w.symmetry)
                    q.add_linear(vj, w.symmetry)
                    q.add_quadratic(vi, vj, -2.0 * w.symmetry)

    return q.build()
