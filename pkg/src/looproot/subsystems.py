"""Reflection-closed root subsets, their canonical simple systems and liftings."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from looproot.errors import (
    IncompleteSystem,
    LiftIncomplete,
    NotClosed,
    PostconditionFailure,
    RankBoundExceeded,
    RootNotInAmbient,
)
from looproot.root_core import (
    DEFAULT_SAFETY_CAP,
    Coords,
    GeneralizedCartanMatrix,
    Root,
    RootSystem,
    orbit_partition,
    pairing,
    reflect,
    validate_gcm,
)


def _index_closure(seed: Iterable[int], table: Sequence[Sequence[int]]) -> set[int]:
    closed = set(seed)
    frontier = list(closed)
    while frontier:
        new = []
        for x in frontier:
            for y in list(closed):
                for r in (table[x][y], table[y][x]):
                    if r >= 0 and r not in closed:
                        closed.add(r)
                        new.append(r)
        frontier = new
    return closed


def reflection_closure(seed: Iterable[Root], ambient: RootSystem) -> frozenset[Root]:
    """Smallest subset of ``ambient`` containing ``seed`` and closed under s_a(b).

    In a bounded (incomplete) ambient system reflections leaving the height
    window are dropped, so the result is only closed inside that window.
    """
    idx = ambient.index
    seeds = []
    for r in seed:
        if r not in idx:
            raise RootNotInAmbient(f"{r!r} is not a root of the ambient system")
        seeds.append(idx[r])
    rs = ambient.sorted_roots
    return frozenset(rs[k] for k in _index_closure(seeds, ambient.reflection_table))


def _is_closed(psi: frozenset[Root], ambient: RootSystem) -> bool:
    idx = ambient.index
    table = ambient.reflection_table
    members = {idx[r] for r in psi}
    for a in members:
        row = table[a]
        for b in members:
            r = row[b]
            if r >= 0 and r not in members:
                return False
            if r < 0 and ambient.complete:
                return False
    return True


def _check_in_ambient(psi: Iterable[Root], ambient: RootSystem) -> frozenset[Root]:
    psi = frozenset(psi)
    for r in psi:
        if r not in ambient.index:
            raise RootNotInAmbient(f"{r!r} is not a root of the ambient system")
    return psi


def canonical_simple_system(psi: Iterable[Root], ambient: RootSystem) -> tuple[Root, ...]:
    """The positive roots of ``psi`` that are not a sum of two positive roots of ``psi``.

    Ordered by height, ties broken so that earlier ambient labels come first;
    for the full system this is the ambient simple system in label order.
    The output is certified: pairwise pairings are nonpositive and the
    reflection closure of the result gives ``psi`` back.
    """
    psi = _check_in_ambient(psi, ambient)
    if not _is_closed(psi, ambient):
        raise NotClosed("root set is not closed under its own reflections")
    positives = sorted((r for r in psi if r.is_positive), key=Root.sort_key)
    sums = {
        tuple(x + y for x, y in zip(a.root_coords, b.root_coords))
        for i, a in enumerate(positives)
        for b in positives[i + 1 :]
    }
    gamma = tuple(
        sorted(
            (r for r in positives if r.root_coords not in sums),
            key=lambda r: (r.height, tuple(-x for x in r.root_coords)),
        )
    )
    for i, a in enumerate(gamma):
        for b in gamma[i + 1 :]:
            if pairing(a, b, ambient.gcm) > 0 or pairing(b, a, ambient.gcm) > 0:
                raise PostconditionFailure(f"simple roots {a!r}, {b!r} pair positively")
    if reflection_closure(gamma, ambient) != psi:
        raise PostconditionFailure("closure of the simple system differs from the input")
    return gamma


def gamma_cartan(gamma: Sequence[Root], gcm: GeneralizedCartanMatrix) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(pairing(a, b, gcm) for b in gamma) for a in gamma)


def lift_coordinates(
    psi: Iterable[Root],
    gamma: Sequence[Root],
    ambient: RootSystem,
    safety_cap: int = DEFAULT_SAFETY_CAP,
) -> tuple[dict[Root, Coords], dict[Root, Coords]]:
    """Gamma-coordinates of every root of ``psi`` and of its coroot.

    Generates the lifted system from the Cartan matrix of ``gamma`` alone,
    reflecting the coordinate tuple and the ambient root in lockstep.
    """
    psi = frozenset(psi)
    k = len(gamma)
    a = gamma_cartan(gamma, ambient.gcm)
    units = [tuple(1 if t == i else 0 for t in range(k)) for i in range(k)]
    lift: dict[Root, Coords] = {}
    colift: dict[Root, Coords] = {}
    for g, e in zip(gamma, units):
        for sign in (1, -1):
            r = g if sign == 1 else -g
            lift[r] = tuple(sign * x for x in e)
            colift[r] = lift[r]
    frontier = list(lift)
    while frontier:
        new = []
        for beta in frontier:
            lb, cb = lift[beta], colift[beta]
            for j, g in enumerate(gamma):
                # <beta_0, g_0^vee>_0 and <g_0, beta_0^vee>_0 in the lifted datum
                c = sum(lb[i] * a[i][j] for i in range(k))
                d = sum(cb[i] * a[j][i] for i in range(k))
                if c != pairing(beta, g, ambient.gcm) or d != pairing(g, beta, ambient.gcm):
                    raise PostconditionFailure("lifted pairing disagrees with ambient pairing")
                if c == 0 and d == 0:
                    continue
                r = reflect(beta, g, ambient.gcm)
                lr = tuple(x - c * u for x, u in zip(lb, units[j]))
                cr = tuple(x - d * u for x, u in zip(cb, units[j]))
                if r in lift:
                    if lift[r] != lr or colift[r] != cr:
                        raise PostconditionFailure(f"two different lifts reach {r!r}")
                    continue
                if r not in psi:
                    continue
                lift[r] = lr
                colift[r] = cr
                new.append(r)
                if len(lift) > safety_cap:
                    raise LiftIncomplete("lifted system exceeds the safety cap")
        frontier = new
    if set(lift) != psi:
        raise LiftIncomplete(f"lift reached {len(lift)} of {len(psi)} roots")
    if len(set(lift.values())) != len(lift):
        raise PostconditionFailure("lift is not injective")
    for r, coords in lift.items():
        total = [0] * ambient.rank
        for c, g in zip(coords, gamma):
            for t, x in enumerate(g.root_coords):
                total[t] += c * x
        if tuple(total) != r.root_coords:
            raise PostconditionFailure(f"lift of {r!r} does not reproduce its coordinates")
    return lift, colift


@dataclass(frozen=True)
class ComponentSplit:
    """Connected blocks of a simple system, as sorted index tuples."""

    blocks: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.blocks)

    def block_of(self, i: int) -> int:
        for b, block in enumerate(self.blocks):
            if i in block:
                return b
        raise IndexError(i)


def components(gamma: Sequence, pairings) -> ComponentSplit:
    """Connected components of the graph on ``gamma`` with an edge wherever
    the pairing is nonzero.  ``pairings`` is indexable as ``[i][j]`` or a GCM."""
    n = len(gamma)
    rows = pairings.entries if isinstance(pairings, GeneralizedCartanMatrix) else pairings
    seen: set[int] = set()
    blocks = []
    for start in range(n):
        if start in seen:
            continue
        block = {start}
        stack = [start]
        while stack:
            i = stack.pop()
            for j in range(n):
                if j not in block and (rows[i][j] != 0 or rows[j][i] != 0):
                    block.add(j)
                    stack.append(j)
        seen |= block
        blocks.append(tuple(sorted(block)))
    return ComponentSplit(tuple(blocks))


@dataclass(frozen=True)
class Subsystem:
    """A root subsystem with its canonical simple system and lifting."""

    ambient: RootSystem = field(compare=False, repr=False)
    roots: frozenset[Root]
    gamma: tuple[Root, ...] = field(compare=False)
    lift: Mapping[Root, Coords] = field(compare=False, repr=False, hash=False)
    colift: Mapping[Root, Coords] = field(compare=False, repr=False, hash=False)

    @classmethod
    def of(cls, roots: Iterable[Root], ambient: RootSystem) -> "Subsystem":
        roots = frozenset(roots)
        gamma = canonical_simple_system(roots, ambient)
        lift, colift = lift_coordinates(roots, gamma, ambient)
        return cls(ambient, roots, gamma, lift, colift)

    @property
    def bounded(self) -> bool:
        return not self.ambient.complete

    @property
    def rank(self) -> int:
        return len(self.gamma)

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.ambient.label(g) for g in self.gamma)

    @cached_property
    def cartan(self) -> GeneralizedCartanMatrix:
        """Cartan matrix of Gamma, labelled by the roots' ambient expressions."""
        return GeneralizedCartanMatrix(self.labels, gamma_cartan(self.gamma, self.ambient.gcm))

    @cached_property
    def split(self) -> ComponentSplit:
        return components(self.gamma, self.cartan)

    @cached_property
    def sorted_roots(self) -> tuple[Root, ...]:
        return tuple(sorted(self.roots, key=Root.sort_key))

    @cached_property
    def orbits(self) -> tuple[frozenset[Root], ...]:
        """Orbits of the subsystem's own reflection group on its roots."""
        return orbit_partition(self.roots, self.gamma, self.ambient.gcm)

    def gamma_index(self, root: Root) -> int | None:
        try:
            return self.gamma.index(root)
        except ValueError:
            return None

    def to_record(self) -> dict:
        return {
            "roots": [list(r.root_coords) for r in self.sorted_roots],
            "gamma": [list(g.root_coords) for g in self.gamma],
            "cartan": [list(row) for row in self.cartan.entries],
            "components": [[self.labels[i] for i in b] for b in self.split.blocks],
        }

    def check_cartan(self) -> GeneralizedCartanMatrix:
        """Re-validate the Gamma Cartan matrix through the GCM axioms."""
        if not self.gamma:
            return self.cartan
        return validate_gcm(self.cartan.entries, self.labels)


def enumerate_subsystems(ambient: RootSystem, rank_bound: int = 4) -> list[Subsystem]:
    """Every root subsystem of a finite-type system, the empty one included.

    Closures of all subsets of positive roots with at most rank(ambient)
    elements, deduplicated by root set and sorted by (size, roots).
    """
    if not ambient.complete:
        raise IncompleteSystem("subsystem enumeration needs a complete root system")
    if ambient.rank > rank_bound:
        raise RankBoundExceeded(f"rank {ambient.rank} exceeds the bound {rank_bound}")
    idx = ambient.index
    table = ambient.reflection_table
    positives = [idx[r] for r in ambient.positive_roots]
    found: set[frozenset[int]] = set()

    def extend(start: int, depth: int, closed: frozenset[int]) -> None:
        found.add(closed)
        if depth == ambient.rank:
            return
        for t in range(start, len(positives)):
            p = positives[t]
            nxt = closed if p in closed else frozenset(_index_closure(closed | {p}, table))
            extend(t + 1, depth + 1, nxt)

    extend(0, 0, frozenset())
    rs = ambient.sorted_roots
    subs = [Subsystem.of((rs[k] for k in s), ambient) for s in found]
    subs.sort(key=lambda s: (len(s.roots), [r.sort_key() for r in s.sorted_roots]))
    return subs


__all__ = [
    "ComponentSplit",
    "Subsystem",
    "canonical_simple_system",
    "components",
    "enumerate_subsystems",
    "gamma_cartan",
    "lift_coordinates",
    "reflection_closure",
]
