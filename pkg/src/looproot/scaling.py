"""Scaling functions on a simple system.

A scaling function assigns m_g >= 0 to each simple root g with
m_b | <b, a^vee> m_a for all a, b.  Taking p-adic valuations turns this
into difference constraints e_b <= e_a + cost(a, b), where cost is a
shortest-path distance; the finitely many normalized solutions per prime
give the basic scaling functions.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from itertools import product
from typing import Sequence

from looproot.errors import (
    NonIntegerEntry,
    NotAScalingFunction,
    NotFiniteType,
    PostconditionFailure,
)
from looproot.root_core import (
    DEFAULT_SAFETY_CAP,
    GeneralizedCartanMatrix,
    coxeter_matrix,
    is_finite_type,
    squared_length_ratios,
    validate_gcm,
)
from looproot.subsystems import ComponentSplit, components

INF = math.inf


def _rows(cartan) -> tuple[tuple[int, ...], ...]:
    if isinstance(cartan, GeneralizedCartanMatrix):
        return cartan.entries
    if hasattr(cartan, "cartan"):
        return cartan.cartan.entries
    return tuple(tuple(r) for r in cartan)


def _as_gcm(cartan) -> GeneralizedCartanMatrix:
    if isinstance(cartan, GeneralizedCartanMatrix):
        return cartan
    if hasattr(cartan, "cartan"):
        return cartan.cartan
    rows = _rows(cartan)
    return GeneralizedCartanMatrix(tuple(str(i + 1) for i in range(len(rows))), rows)


def divides(d: int, x: int) -> bool:
    """d | x, with 0 dividing only 0."""
    if d == 0:
        return x == 0
    return x % d == 0


def valuation(x: int, p: int) -> float:
    """p-adic valuation of an integer; infinity for 0."""
    if x == 0:
        return INF
    x = abs(x)
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class ScalingFunction:
    m: tuple[int, ...]
    case: str = ""


def is_scaling_function(m: Sequence[int], cartan) -> bool:
    """m_b | <b, a^vee> m_a for every ordered pair (a, b)."""
    a = _rows(cartan)
    if len(m) != len(a) or any(x < 0 for x in m):
        return False
    n = len(m)
    return all(divides(m[b], a[b][c] * m[c]) for b in range(n) for c in range(n))


def prime_support(cartan) -> tuple[int, ...]:
    """Primes dividing an off-diagonal pairing of absolute value above 1."""
    a = _rows(cartan)
    primes: set[int] = set()
    for i, row in enumerate(a):
        for j, x in enumerate(row):
            if i != j and abs(x) > 1:
                primes.update(prime_factors(x))
    return tuple(sorted(primes))


@dataclass(frozen=True)
class PadicCostMatrix:
    prime: int
    cost: tuple[tuple[float, ...], ...]

    def __getitem__(self, ij: tuple[int, int]) -> float:
        return self.cost[ij[0]][ij[1]]


def cost_matrix(cartan, p: int) -> PadicCostMatrix:
    """Least total valuation over chains a = a_0, ..., a_n = b.

    The step a_{i-1} -> a_i weighs nu_p(<a_i, a_{i-1}^vee>); only nonzero
    pairings are steps.  Roots in different components are at infinite cost.
    """
    a = _rows(cartan)
    n = len(a)
    rows = []
    for src in range(n):
        dist = [INF] * n
        dist[src] = 0
        heap = [(0, src)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for v in range(n):
                if v != u and a[v][u] != 0:
                    nd = d + valuation(a[v][u], p)
                    if nd < dist[v]:
                        dist[v] = nd
                        heapq.heappush(heap, (nd, v))
        rows.append(tuple(dist))
    return PadicCostMatrix(p, tuple(rows))


def _exponent_solutions(block: Sequence[int], cost: PadicCostMatrix) -> list[tuple[int, ...]]:
    """All e over ``block`` with min 0 and e_b <= e_a + cost(a, b)."""
    k = len(block)
    top = max(int(cost[i, j]) for i in block for j in block)
    out = []
    e: list[int] = []

    def fits(pos: int, value: int) -> bool:
        j = block[pos]
        for q in range(pos):
            i = block[q]
            if value > e[q] + cost[i, j] or e[q] > value + cost[j, i]:
                return False
        return True

    def search(pos: int) -> None:
        if pos == k:
            if min(e) == 0:
                out.append(tuple(e))
            return
        for value in range(top + 1):
            if fits(pos, value):
                e.append(value)
                search(pos + 1)
                e.pop()

    search(0)
    return out


@dataclass(frozen=True)
class BasicScalingSet:
    """Normalized exponent solutions per (component, prime) and the basics they induce.

    ``exponents[(b, p)]`` lists tuples over ``split.blocks[b]``.
    ``per_component[b]`` lists basic values over that block; ``basics``
    combines blocks by cartesian product into tuples over all of Gamma.
    """

    split: ComponentSplit
    primes: tuple[int, ...]
    exponents: dict[tuple[int, int], tuple[tuple[int, ...], ...]]
    per_component: tuple[tuple[tuple[int, ...], ...], ...]
    basics: tuple[tuple[int, ...], ...]

    def count(self, prime: int) -> int:
        return max(
            (len(v) for (b, p), v in self.exponents.items() if p == prime), default=1
        )


def _combine_blocks(
    split: ComponentSplit, per_block: Sequence[Sequence[tuple[int, ...]]], n: int
) -> list[tuple[int, ...]]:
    out = []
    for choice in product(*per_block):
        m = [0] * n
        for block, values in zip(split.blocks, choice):
            for i, v in zip(block, values):
                m[i] = v
        out.append(tuple(m))
    return out


def enumerate_basic_scalings(cartan) -> BasicScalingSet:
    """Basic scaling functions from the p-adic difference constraints."""
    a = _rows(cartan)
    n = len(a)
    split = components(range(n), a)
    exponents: dict[tuple[int, int], tuple[tuple[int, ...], ...]] = {}
    per_component = []
    all_primes: set[int] = set()
    for b, block in enumerate(split.blocks):
        sub = tuple(tuple(a[i][j] for j in block) for i in block)
        primes = prime_support(sub)
        all_primes.update(primes)
        local = list(range(len(block)))
        solutions = []
        for p in primes:
            sols = tuple(sorted(_exponent_solutions(local, cost_matrix(sub, p))))
            exponents[(b, p)] = sols
            solutions.append(sols)
        values = set()
        for choice in product(*solutions):
            values.add(
                tuple(
                    math.prod(p**e[i] for p, e in zip(primes, choice)) for i in local
                )
            )
        per_component.append(tuple(sorted(values)))
    basics = _combine_blocks(split, per_component, n)
    return BasicScalingSet(
        split, tuple(sorted(all_primes)), exponents, tuple(per_component), tuple(sorted(basics))
    )


def _closed_form_block(gcm: GeneralizedCartanMatrix, block: Sequence[int]) -> list[tuple[tuple[int, ...], str]]:
    ratios = squared_length_ratios(gcm, block)
    k = max(ratios.values())
    if k.denominator != 1 or k.numerator not in (1, 2, 3):
        raise PostconditionFailure(f"squared length ratio {k} outside {{1,2,3}}")
    options = [(tuple(1 for _ in block), "constant")]
    if k > 1:
        options.append(
            (tuple(int(k) if ratios[i] == k else 1 for i in block), "short-long")
        )
    return options


def finite_type_scalings(
    cartan, include_zero: bool = False, safety_cap: int = DEFAULT_SAFETY_CAP
) -> list[ScalingFunction]:
    """Basic scaling functions from the short/long closed form.

    Per component: constant 1, and short -> 1, long -> k when the squared
    length ratio k exceeds 1; with ``include_zero`` also the zero function.
    Components are combined by product, and ``case`` joins the per-component
    case names with commas.
    """
    gcm = _as_gcm(cartan)
    n = gcm.rank
    split = components(range(n), gcm)
    per_block = []
    for block in split.blocks:
        if not is_finite_type(gcm.submatrix(block), safety_cap):
            raise NotFiniteType(f"component {[gcm.labels[i] for i in block]} is not of finite type")
        options = _closed_form_block(gcm, block)
        if include_zero:
            options.append((tuple(0 for _ in block), "zero"))
        per_block.append(options)
    out = []
    for choice in product(*per_block):
        m = [0] * n
        for block, (values, _) in zip(split.blocks, choice):
            for i, v in zip(block, values):
                m[i] = v
        out.append(ScalingFunction(tuple(m), ",".join(case for _, case in choice)))
    out.sort(key=lambda s: s.m)
    return out


def scaling_functions(cartan, bound: int, include_zero: bool = True) -> list[tuple[int, ...]]:
    """All scaling functions with every value at most ``bound``.

    Per component: positive multiples of each basic, plus the zero function.
    """
    basic = enumerate_basic_scalings(cartan)
    n = len(_rows(cartan))
    per_block = []
    for values in basic.per_component:
        options = set()
        for v in values:
            for q in range(1, bound // max(v) + 1):
                options.add(tuple(q * x for x in v))
        if include_zero:
            options.add(tuple(0 for _ in values[0]))
        per_block.append(sorted(options))
    return sorted(_combine_blocks(basic.split, per_block, n))


@dataclass(frozen=True)
class ScaledDatum:
    gamma_scaled: tuple[tuple[str, int], ...]
    cartan_scaled: GeneralizedCartanMatrix


def scaled_datum(cartan, m: Sequence[int]) -> ScaledDatum:
    """Cartan matrix of the rescaled simple roots m_a^{-1} a, with coroots m_a a^vee.

    Entry (a, b) is <a, b^vee> m_b / m_a.  ``cartan`` may be a GCM, a
    Subsystem, or a plain square matrix.
    """
    gcm = _as_gcm(cartan)
    m = tuple(m)
    if any(x <= 0 for x in m) or not is_scaling_function(m, gcm):
        raise NotAScalingFunction(f"{m} is not a positive scaling function")
    n = gcm.rank
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            num = gcm[i, j] * m[j]
            if num % m[i]:
                raise NonIntegerEntry(f"entry ({gcm.labels[i]},{gcm.labels[j]}) is {num}/{m[i]}")
            row.append(num // m[i])
        rows.append(row)
    scaled = validate_gcm(rows, gcm.labels)
    if coxeter_matrix(scaled) != coxeter_matrix(gcm):
        raise PostconditionFailure("rescaling changed the Coxeter matrix")
    return ScaledDatum(tuple(zip(gcm.labels, m)), scaled)


__all__ = [
    "BasicScalingSet",
    "PadicCostMatrix",
    "ScaledDatum",
    "ScalingFunction",
    "cost_matrix",
    "divides",
    "enumerate_basic_scalings",
    "finite_type_scalings",
    "is_scaling_function",
    "prime_support",
    "scaled_datum",
    "scaling_functions",
    "valuation",
]
