"""The coweight lattice of a subsystem, realised as Z^Gamma.

A coweight f is stored as its values (f(g_0))_{g in Gamma}; its value on any
root is read off through the subsystem's lift.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from looproot.errors import NotAScalingFunction, NotSimple, RootNotInSubsystem
from looproot.root_core import Root
from looproot.scaling import divides, is_scaling_function
from looproot.subsystems import Subsystem

Coweight = tuple[int, ...]


def evaluate(f: Sequence[int], alpha: Root, sub: Subsystem) -> int:
    try:
        coords = sub.lift[alpha]
    except KeyError:
        raise RootNotInSubsystem(f"{alpha!r} is not in the subsystem") from None
    return sum(x * c for x, c in zip(f, coords))


def coweight_reflect(gamma: Root, f: Sequence[int], sub: Subsystem) -> Coweight:
    """(s_gamma f)_{g'} = f_{g'} - <g', gamma^vee> f_gamma."""
    j = sub.gamma_index(gamma)
    if j is None:
        raise NotSimple(f"{gamma!r} is not in the canonical simple system")
    a = sub.cartan.entries
    return tuple(f[i] - a[i][j] * f[j] for i in range(len(f)))


def extend_scaling(m: Sequence[int], sub: Subsystem) -> dict[Root, int]:
    """n_alpha = gcd_g(m_g |lift(alpha)_g|), so that X_M(alpha_0) = n_alpha Z."""
    m = tuple(m)
    if not is_scaling_function(m, sub.cartan):
        raise NotAScalingFunction(f"{m} is not a scaling function")
    return {
        alpha: math.gcd(*(mg * abs(c) for mg, c in zip(m, coords)))
        for alpha, coords in sub.lift.items()
    }


def check_n_family(n: Mapping[Root, int], sub: Subsystem) -> bool:
    """Divisibility n_b | <b, a^vee> n_a on all pairs and constancy on orbits."""
    table = sub.ambient.pairing_table
    idx = sub.ambient.index
    roots = sub.sorted_roots
    if set(n) != set(roots):
        return False
    for b in roots:
        ib = idx[b]
        for a in roots:
            if not divides(n[b], table[ib][idx[a]] * n[a]):
                return False
    for orbit in sub.orbits:
        if len({n[r] for r in orbit}) > 1:
            return False
    return True


def canonical_coset(x: Sequence[int], m: "Sequence[int] | AdmissibleSubgroup") -> Coweight:
    """Reduce x coordinate-wise mod m_g; coordinates with m_g = 0 stay as they are."""
    if isinstance(m, AdmissibleSubgroup):
        m = m.m
    return tuple(xi % mi if mi else xi for xi, mi in zip(x, m))


@dataclass(frozen=True)
class AdmissibleSubgroup:
    """X_M: coweights f with m_g | f_g for every simple root g."""

    m: tuple[int, ...]
    subsystem: Subsystem

    def __post_init__(self) -> None:
        if len(self.m) != self.subsystem.rank or not is_scaling_function(
            self.m, self.subsystem.cartan
        ):
            raise NotAScalingFunction(f"{self.m} is not a scaling function")

    def __contains__(self, f: Sequence[int]) -> bool:
        return len(f) == len(self.m) and all(divides(mi, fi) for mi, fi in zip(self.m, f))

    def generators(self) -> list[Coweight]:
        """m_g * omega_g, where omega_g is the fundamental coweight (omega_g)_h = delta_gh."""
        k = len(self.m)
        return [tuple(self.m[i] if t == i else 0 for t in range(k)) for i in range(k)]

    def extension(self) -> dict[Root, int]:
        return extend_scaling(self.m, self.subsystem)

    def sample(self, rng: random.Random, bound: int = 5) -> Coweight:
        """A member with generator coefficients drawn from [-bound, bound]."""
        return tuple(mi * rng.randint(-bound, bound) for mi in self.m)


__all__ = [
    "AdmissibleSubgroup",
    "Coweight",
    "canonical_coset",
    "check_n_family",
    "coweight_reflect",
    "evaluate",
    "extend_scaling",
]
