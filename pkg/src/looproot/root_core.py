"""Generalized Cartan matrices and the real roots they generate.

Roots live in simple-root coordinates; the ambient vector spaces are never
built.  Every root carries its coroot coordinates too, so the pairing
<beta, gamma^vee> is a plain bilinear form in the Cartan entries.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from looproot.errors import (
    AsymmetricZero,
    DiagonalNotTwo,
    IncompleteSystem,
    MalformedMatrix,
    PositiveOffDiagonal,
    SafetyCapExceeded,
)

DEFAULT_SAFETY_CAP = 10_000

Coords = tuple[int, ...]


@dataclass(frozen=True)
class GeneralizedCartanMatrix:
    """Square integer matrix, entry (i, j) = <alpha_i, alpha_j^vee>."""

    labels: tuple[str, ...]
    entries: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.labels)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def submatrix(self, indices: Sequence[int]) -> "GeneralizedCartanMatrix":
        return GeneralizedCartanMatrix(
            tuple(self.labels[i] for i in indices),
            tuple(tuple(self.entries[i][j] for j in indices) for i in indices),
        )

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "matrix": [list(r) for r in self.entries]}


def _is_int(x: object) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def validate_gcm(
    matrix: Sequence[Sequence[int]], labels: Sequence[str] | None = None
) -> GeneralizedCartanMatrix:
    """Check the three GCM axioms and return an immutable matrix.

    Offending index pairs are reported with their labels; the default labels
    are ``"1", "2", ...``.
    """
    n = len(matrix)
    if n == 0:
        raise MalformedMatrix("matrix must be nonempty")
    if labels is None:
        labels = [str(i + 1) for i in range(n)]
    labels = tuple(str(x) for x in labels)
    if len(labels) != n or len(set(labels)) != n:
        raise MalformedMatrix("labels must be distinct and match the matrix size")
    rows = []
    for row in matrix:
        if len(row) != n:
            raise MalformedMatrix("matrix must be square")
        if not all(_is_int(x) for x in row):
            raise MalformedMatrix("matrix entries must be integers")
        rows.append(tuple(row))
    for i in range(n):
        if rows[i][i] != 2:
            raise DiagonalNotTwo((labels[i], labels[i]), f"diagonal entry is {rows[i][i]}")
    for i in range(n):
        for j in range(n):
            if i != j and rows[i][j] > 0:
                raise PositiveOffDiagonal(
                    (labels[i], labels[j]), f"off-diagonal entry is {rows[i][j]}"
                )
    for i in range(n):
        for j in range(i + 1, n):
            if (rows[i][j] == 0) != (rows[j][i] == 0):
                raise AsymmetricZero((labels[i], labels[j]), "zero pattern is not symmetric")
    return GeneralizedCartanMatrix(labels, tuple(rows))


def coxeter_matrix(gcm: GeneralizedCartanMatrix) -> tuple[tuple[int, ...], ...]:
    """Coxeter matrix from the products a_ij * a_ji; 0 stands for infinity."""
    orders = {0: 2, 1: 3, 2: 4, 3: 6}
    n = gcm.rank
    return tuple(
        tuple(1 if i == j else orders.get(gcm[i, j] * gcm[j, i], 0) for j in range(n))
        for i in range(n)
    )


def _chain(n: int) -> list[list[int]]:
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i in range(n - 1):
        a[i][i + 1] = a[i + 1][i] = -1
    return a


def cartan_matrix(name: str) -> GeneralizedCartanMatrix:
    """Named Cartan matrices in Bourbaki numbering.

    Accepts ``A1``..``An``, ``Bn``, ``Cn``, ``Dn``, ``E6``-``E8``, ``F4``,
    ``G2`` (case-insensitive) and ``a1~`` for affine A1.
    """
    key = name.strip().lower()
    if key == "a1~":
        return validate_gcm([[2, -2], [-2, 2]], ["a0", "a1"])
    m = re.fullmatch(r"([a-g])(\d+)", key)
    if not m:
        raise MalformedMatrix(f"unknown Cartan type {name!r}")
    kind, n = m.group(1), int(m.group(2))
    if kind == "a" and n >= 1:
        a = _chain(n)
    elif kind == "b" and n >= 2:
        a = _chain(n)
        a[n - 2][n - 1] = -2
    elif kind == "c" and n >= 2:
        a = _chain(n)
        a[n - 1][n - 2] = -2
    elif kind == "d" and n >= 4:
        a = _chain(n)
        a[n - 2][n - 1] = a[n - 1][n - 2] = 0
        a[n - 3][n - 1] = a[n - 1][n - 3] = -1
    elif kind == "e" and n in (6, 7, 8):
        a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
        edges = [(0, 2), (2, 3), (1, 3)] + [(k, k + 1) for k in range(3, n - 1)]
        for i, j in edges:
            a[i][j] = a[j][i] = -1
    elif kind == "f" and n == 4:
        a = _chain(4)
        a[1][2] = -2
    elif kind == "g" and n == 2:
        a = [[2, -1], [-3, 2]]
    else:
        raise MalformedMatrix(f"unknown Cartan type {name!r}")
    return validate_gcm(a, [f"a{i + 1}" for i in range(n)])


@dataclass(frozen=True)
class Root:
    root_coords: Coords
    coroot_coords: Coords

    @property
    def height(self) -> int:
        return sum(self.root_coords)

    @property
    def is_positive(self) -> bool:
        return self.height > 0

    def __neg__(self) -> "Root":
        return Root(
            tuple(-x for x in self.root_coords), tuple(-x for x in self.coroot_coords)
        )

    def sort_key(self) -> tuple:
        return (self.height, self.root_coords)

    def __repr__(self) -> str:
        return f"Root{self.root_coords}"


def unit(n: int, i: int) -> Coords:
    return tuple(1 if k == i else 0 for k in range(n))


def simple_root(gcm: GeneralizedCartanMatrix, i: int) -> Root:
    e = unit(gcm.rank, i)
    return Root(e, e)


def pairing(beta: Root, gamma: Root, gcm: GeneralizedCartanMatrix) -> int:
    """<beta, gamma^vee> as sum_{i,j} b_i c_j a_ij."""
    total = 0
    for i, b in enumerate(beta.root_coords):
        if b:
            row = gcm.entries[i]
            for j, c in enumerate(gamma.coroot_coords):
                if c:
                    total += b * c * row[j]
    return total


def reflect(beta: Root, gamma: Root, gcm: GeneralizedCartanMatrix) -> Root:
    """s_gamma(beta), applied to the root and to its coroot."""
    c = pairing(beta, gamma, gcm)
    d = pairing(gamma, beta, gcm)
    return Root(
        tuple(b - c * g for b, g in zip(beta.root_coords, gamma.root_coords)),
        tuple(b - d * g for b, g in zip(beta.coroot_coords, gamma.coroot_coords)),
    )


def root_label(coords: Coords, labels: Sequence[str]) -> str:
    """Readable linear combination, e.g. ``2*a1+a2`` or ``-a1-a2``."""
    parts = []
    for c, lab in zip(coords, labels):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = "" if abs(c) == 1 else f"{abs(c)}*"
        parts.append(f"{sign}{mag}{lab}")
    text = "".join(parts)
    return text[1:] if text.startswith("+") else text or "0"


@dataclass(frozen=True)
class RootSystem:
    gcm: GeneralizedCartanMatrix
    roots: frozenset[Root]
    height_bound: int | None
    complete: bool

    @property
    def rank(self) -> int:
        return self.gcm.rank

    @cached_property
    def sorted_roots(self) -> tuple[Root, ...]:
        return tuple(sorted(self.roots, key=Root.sort_key))

    @cached_property
    def positive_roots(self) -> tuple[Root, ...]:
        return tuple(r for r in self.sorted_roots if r.is_positive)

    @cached_property
    def simple_roots(self) -> tuple[Root, ...]:
        return tuple(simple_root(self.gcm, i) for i in range(self.rank))

    @cached_property
    def by_coords(self) -> Mapping[Coords, Root]:
        return {r.root_coords: r for r in self.roots}

    def lookup(self, coords: Iterable[int]) -> Root | None:
        return self.by_coords.get(tuple(coords))

    @cached_property
    def index(self) -> Mapping[Root, int]:
        return {r: k for k, r in enumerate(self.sorted_roots)}

    @cached_property
    def pairing_table(self) -> tuple[tuple[int, ...], ...]:
        """Entry [b][a] is <root_b, root_a^vee> in sorted_roots order."""
        rs = self.sorted_roots
        return tuple(tuple(pairing(b, a, self.gcm) for a in rs) for b in rs)

    @cached_property
    def reflection_table(self) -> tuple[tuple[int, ...], ...]:
        """Entry [a][b] is the index of s_a(b), or -1 outside the generated window."""
        rs = self.sorted_roots
        idx = self.index
        return tuple(
            tuple(idx.get(reflect(b, a, self.gcm), -1) for b in rs) for a in rs
        )

    def label(self, root: Root) -> str:
        return root_label(root.root_coords, self.gcm.labels)


def generate_root_system(
    gcm: GeneralizedCartanMatrix,
    height_bound: int | None = None,
    safety_cap: int = DEFAULT_SAFETY_CAP,
) -> RootSystem:
    """Breadth-first closure of the simple roots under simple reflections.

    ``height_bound=None`` is the unbounded mode for finite-type input;
    generation then stops with SafetyCapExceeded once more than
    ``safety_cap`` roots appear.  With a bound, roots of |height| above it
    are dropped and ``complete`` records whether anything was dropped.
    """
    if height_bound is not None and height_bound < 1:
        raise ValueError("height_bound must be positive")
    simples = [simple_root(gcm, i) for i in range(gcm.rank)]
    seen: set[Root] = set(simples) | {-s for s in simples}
    queue = deque(simples)
    complete = True
    while queue:
        beta = queue.popleft()
        for s in simples:
            g = reflect(beta, s, gcm)
            if g in seen:
                continue
            if height_bound is not None and abs(g.height) > height_bound:
                complete = False
                continue
            seen.add(g)
            seen.add(-g)
            if len(seen) > safety_cap:
                raise SafetyCapExceeded(
                    f"more than {safety_cap} roots generated; Cartan matrix is not of finite type"
                )
            queue.append(g)
    return RootSystem(gcm, frozenset(seen), height_bound, complete)


def orbit_partition(
    roots: Iterable[Root], reflectors: Sequence[Root], gcm: GeneralizedCartanMatrix
) -> tuple[frozenset[Root], ...]:
    """Orbits of ``roots`` under the group generated by ``reflectors``."""
    remaining = set(roots)
    orbits = []
    for start in sorted(remaining, key=Root.sort_key):
        if start not in remaining:
            continue
        orbit = {start}
        stack = [start]
        while stack:
            b = stack.pop()
            for a in reflectors:
                r = reflect(b, a, gcm)
                if r not in orbit:
                    orbit.add(r)
                    stack.append(r)
        remaining -= orbit
        orbits.append(frozenset(orbit))
    return tuple(orbits)


def weyl_orbits(rs: RootSystem) -> tuple[frozenset[Root], ...]:
    if not rs.complete:
        raise IncompleteSystem("orbits need a complete root system")
    return orbit_partition(rs.roots, rs.simple_roots, rs.gcm)


def squared_length_ratios(gcm: GeneralizedCartanMatrix, block: Sequence[int]) -> dict[int, Fraction]:
    """Squared lengths of the simple roots of a connected block, shortest = 1.

    Uses (alpha_i, alpha_i) / (alpha_j, alpha_j) = a_ij / a_ji along edges.
    """
    block = list(block)
    lengths: dict[int, Fraction] = {block[0]: Fraction(1)}
    stack = [block[0]]
    while stack:
        j = stack.pop()
        for i in block:
            if i != j and gcm[i, j] != 0 and i not in lengths:
                lengths[i] = lengths[j] * Fraction(gcm[i, j], gcm[j, i])
                stack.append(i)
    low = min(lengths.values())
    return {i: v / low for i, v in lengths.items()}


def is_finite_type(gcm: GeneralizedCartanMatrix, safety_cap: int = DEFAULT_SAFETY_CAP) -> bool:
    try:
        generate_root_system(gcm, None, safety_cap)
    except SafetyCapExceeded:
        return False
    return True


__all__ = [
    "DEFAULT_SAFETY_CAP",
    "GeneralizedCartanMatrix",
    "Root",
    "RootSystem",
    "cartan_matrix",
    "coxeter_matrix",
    "generate_root_system",
    "is_finite_type",
    "orbit_partition",
    "pairing",
    "reflect",
    "root_label",
    "simple_root",
    "squared_length_ratios",
    "unit",
    "validate_gcm",
    "weyl_orbits",
]
