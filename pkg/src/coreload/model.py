"""Sparse quadratic binary (QUBO) and spin (Ising) models with a text file format.

Both models are plain coefficient maps with a constant offset. Keys are kept
strictly upper triangular (i < j) and entries that accumulate to exactly zero
are dropped, so two identically-built models compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


@dataclass(frozen=True)
class QuboModel:
    """energy(z) = offset + sum_i linear[i] z_i + sum_{i<j} quadratic[i,j] z_i z_j, z in {0,1}^n."""

    n: int
    linear: dict[int, float] = field(default_factory=dict)
    quadratic: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    def energy(self, z: Sequence[int]) -> float:
        """Evaluate at a bit vector. Terms accumulate in sorted key order so the
        result is reproducible bit for bit."""
        if len(z) != self.n:
            raise ValueError(f"assignment length {len(z)} != variable count {self.n}")
        e = self.offset
        for i in sorted(self.linear):
            if z[i]:
                e += self.linear[i]
        for i, j in sorted(self.quadratic):
            if z[i] and z[j]:
                e += self.quadratic[(i, j)]
        return e

    @property
    def num_linear(self) -> int:
        return len(self.linear)

    @property
    def num_quadratic(self) -> int:
        return len(self.quadratic)


@dataclass(frozen=True)
class IsingModel:
    """energy(s) = offset + sum_i h[i] s_i + sum_{i<j} J[i,j] s_i s_j, s in {-1,+1}^n."""

    n: int
    h: dict[int, float] = field(default_factory=dict)
    j: dict[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0

    def energy(self, s: Sequence[int]) -> float:
        if len(s) != self.n:
            raise ValueError(f"assignment length {len(s)} != variable count {self.n}")
        e = self.offset
        for i in sorted(self.h):
            e += self.h[i] * s[i]
        for i, jx in sorted(self.j):
            e += self.j[(i, jx)] * s[i] * s[jx]
        return e

    @property
    def num_linear(self) -> int:
        return len(self.h)

    @property
    def num_quadratic(self) -> int:
        return len(self.j)


class QuboBuilder:
    """Accumulates QUBO coefficients; i == j is folded into linear (z^2 = z)."""

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("variable count must be non-negative")
        self.n = n
        self._linear: dict[int, float] = {}
        self._quadratic: dict[tuple[int, int], float] = {}
        self._offset = 0.0

    def _check(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise ValueError(f"variable {i} out of range for {self.n} variables")

    def add_offset(self, c: float) -> None:
        self._offset += c

    def add_linear(self, i: int, c: float) -> None:
        self._check(i)
        self._linear[i] = self._linear.get(i, 0.0) + c

    def add_quadratic(self, i: int, j: int, c: float) -> None:
        if i == j:
            self.add_linear(i, c)
            return
        self._check(i)
        self._check(j)
        key = (i, j) if i < j else (j, i)
        self._quadratic[key] = self._quadratic.get(key, 0.0) + c

    def build(self) -> QuboModel:
        linear = {i: v for i, v in sorted(self._linear.items()) if v != 0.0}
        quadratic = {k: v for k, v in sorted(self._quadratic.items()) if v != 0.0}
        return QuboModel(self.n, linear, quadratic, self._offset)


def to_ising(model: QuboModel) -> IsingModel:
    """Map bits to spins via z_i = (s_i + 1) / 2.

    Exact: the divisions are by powers of two, so ising.energy(bits_to_spins(z))
    equals qubo.energy(z) up to summation-order rounding only.
    """
    h: dict[int, float] = {}
    offset = model.offset
    for i, a in model.linear.items():
        h[i] = h.get(i, 0.0) + a / 2.0
        offset += a / 2.0
    j: dict[tuple[int, int], float] = {}
    for (p, q), b in model.quadratic.items():
        j[(p, q)] = b / 4.0
        h[p] = h.get(p, 0.0) + b / 4.0
        h[q] = h.get(q, 0.0) + b / 4.0
        offset += b / 4.0
    h_clean = {i: v for i, v in sorted(h.items()) if v != 0.0}
    j_clean = {k: v for k, v in sorted(j.items()) if v != 0.0}
    return IsingModel(model.n, h_clean, j_clean, offset)


def bits_to_spins(z: Iterable[int]) -> tuple[int, ...]:
    """0 -> -1, 1 -> +1; anything else is rejected."""
    out = []
    for v in z:
        if v == 1:
            out.append(1)
        elif v == 0:
            out.append(-1)
        else:
            raise ValueError(f"bit value {v!r} is not 0 or 1")
    return tuple(out)


def spins_to_bits(s: Iterable[int]) -> tuple[int, ...]:
    """+1 -> 1, -1 -> 0; anything else is rejected."""
    out = []
    for v in s:
        if v == 1:
            out.append(1)
        elif v == -1:
            out.append(0)
        else:
            raise ValueError(f"spin value {v!r} is not +1 or -1")
    return tuple(out)


def _write_model(tag: str, n: int, linear: dict, quadratic: dict, offset: float, path) -> None:
    lines = [f"# coreload {tag} model"]
    lines.append(f"{tag} {n} {len(linear)} {len(quadratic)} {offset!r}")
    for i in sorted(linear):
        lines.append(f"{i} {linear[i]!r}")
    for i, j in sorted(quadratic):
        lines.append(f"{i} {j} {quadratic[(i, j)]!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_qubo(model: QuboModel, path) -> None:
    _write_model("qubo", model.n, model.linear, model.quadratic, model.offset, path)


def save_ising(model: IsingModel, path) -> None:
    _write_model("ising", model.n, model.h, model.j, model.offset, path)


def _parse_model(tag: str, path):
    text = Path(path).read_text(encoding="utf-8")
    header = None
    linear: dict[int, float] = {}
    quadratic: dict[tuple[int, int], float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if header is None:
            if tokens[0] != tag or len(tokens) != 5:
                raise ValueError(f"{path}:{lineno}: expected header '{tag} <n> <n_lin> <n_quad> <offset>'")
            try:
                header = (int(tokens[1]), int(tokens[2]), int(tokens[3]), float(tokens[4]))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed header") from exc
            continue
        try:
            if len(tokens) == 2:
                i, c = int(tokens[0]), float(tokens[1])
                if not 0 <= i < header[0]:
                    raise ValueError(f"{path}:{lineno}: variable {i} out of range")
                if i in linear:
                    raise ValueError(f"{path}:{lineno}: duplicate linear entry for {i}")
                linear[i] = c
            elif len(tokens) == 3:
                i, j, c = int(tokens[0]), int(tokens[1]), float(tokens[2])
                if not (0 <= i < j < header[0]):
                    raise ValueError(f"{path}:{lineno}: pair ({i}, {j}) must satisfy 0 <= i < j < n")
                if (i, j) in quadratic:
                    raise ValueError(f"{path}:{lineno}: duplicate quadratic entry for ({i}, {j})")
                quadratic[(i, j)] = c
            else:
                raise ValueError(f"{path}:{lineno}: expected 2 or 3 fields, got {len(tokens)}")
        except ValueError as exc:
            if str(exc).startswith(str(path)):
                raise
            raise ValueError(f"{path}:{lineno}: malformed entry {line!r}") from exc
    if header is None:
        raise ValueError(f"{path}: missing '{tag}' header line")
    n, n_lin, n_quad, offset = header
    if len(linear) != n_lin or len(quadratic) != n_quad:
        raise ValueError(
            f"{path}: header declares {n_lin} linear / {n_quad} quadratic terms, "
            f"found {len(linear)} / {len(quadratic)}"
        )
    return n, dict(sorted(linear.items())), dict(sorted(quadratic.items())), offset


def load_qubo(path) -> QuboModel:
    n, linear, quadratic, offset = _parse_model("qubo", path)
    return QuboModel(n, linear, quadratic, offset)


def load_ising(path) -> IsingModel:
    n, h, j, offset = _parse_model("ising", path)
    return IsingModel(n, h, j, offset)
