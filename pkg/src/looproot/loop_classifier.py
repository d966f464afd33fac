"""Root subsystems of the loop extension Phi + Z delta.

A subsystem of the loop extension is a family alpha -> Z_alpha of level
sets.  Every such family is a coset family Z_alpha = r_alpha + n_alpha Z
(n_alpha = 0 meaning the singleton {r_alpha}), and these families are in
bijection with triples (subsystem, scaling function m on Gamma, coset
representative xbar).  This module converts in both directions and checks
the result against brute-force reflection closure on a level window.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping

from looproot.coweight import canonical_coset, evaluate, extend_scaling
from looproot.errors import (
    InternalInconsistency,
    InvalidPair,
    NotARootFunction,
    RootNotInAmbient,
    WindowOverflow,
)
from looproot.root_core import Root, RootSystem, pairing, reflect
from looproot.scaling import is_scaling_function, scaling_functions
from looproot.subsystems import Subsystem, enumerate_subsystems


@dataclass(frozen=True)
class AffineRoot:
    base: Root
    level: int

    def to_record(self) -> dict:
        return {"base": list(self.base.root_coords), "level": self.level}

    def sort_key(self) -> tuple:
        return (self.base.sort_key(), self.level)


def affine_reflect(a: AffineRoot, b: AffineRoot, gcm) -> AffineRoot:
    """s_{alpha + m delta}(beta + n delta) = s_alpha(beta) + (n - m <beta, alpha^vee>) delta."""
    return AffineRoot(
        reflect(b.base, a.base, gcm), b.level - a.level * pairing(b.base, a.base, gcm)
    )


@dataclass(frozen=True)
class CosetFamily:
    """Root function in normal form: entries (root, offset, modulus), sorted by root.

    Roots without an entry have empty level set.  Build through
    :meth:`from_mapping` to get normalized offsets 0 <= r < n when n > 0.
    """

    entries: tuple[tuple[Root, int, int], ...]

    @classmethod
    def from_mapping(cls, mapping: Mapping[Root, tuple[int, int]]) -> "CosetFamily":
        entries = []
        for root, (r, n) in mapping.items():
            if n < 0:
                raise ValueError(f"negative modulus {n} at {root!r}")
            entries.append((root, r % n if n else r, n))
        entries.sort(key=lambda e: e[0].sort_key())
        return cls(tuple(entries))

    @cached_property
    def as_dict(self) -> dict[Root, tuple[int, int]]:
        return {root: (r, n) for root, r, n in self.entries}

    @property
    def support(self) -> frozenset[Root]:
        return frozenset(self.as_dict)

    def coset(self, root: Root) -> tuple[int, int] | None:
        return self.as_dict.get(root)

    def is_normalized(self) -> bool:
        return all(n >= 0 and (n == 0 or 0 <= r < n) for _, r, n in self.entries) and len(
            self.as_dict
        ) == len(self.entries)

    def contains(self, root: Root, level: int) -> bool:
        c = self.as_dict.get(root)
        if c is None:
            return False
        r, n = c
        return level == r if n == 0 else (level - r) % n == 0

    def to_record(self) -> dict:
        return {
            "entries": [
                {"root": list(root.root_coords), "offset": r, "modulus": n}
                for root, r, n in self.entries
            ]
        }


@dataclass(frozen=True)
class ClassifiedPair:
    """(Psi, m, xbar): a subsystem, a scaling function on its Gamma, a coset representative."""

    subsystem: Subsystem
    m: tuple[int, ...]
    xbar: tuple[int, ...]

    def __post_init__(self) -> None:
        k = self.subsystem.rank
        if len(self.m) != k or len(self.xbar) != k:
            raise InvalidPair("m and xbar must have one entry per simple root")
        if not is_scaling_function(self.m, self.subsystem.cartan):
            raise InvalidPair(f"{self.m} is not a scaling function")
        if canonical_coset(self.xbar, self.m) != self.xbar:
            raise InvalidPair(f"{self.xbar} is not reduced modulo {self.m}")

    def to_record(self) -> dict:
        sub = self.subsystem
        return {
            "support": [list(r.root_coords) for r in sub.sorted_roots],
            "gamma": [list(g.root_coords) for g in sub.gamma],
            "m": dict(zip(sub.labels, self.m)),
            "xbar": dict(zip(sub.labels, self.xbar)),
        }

    def serialized(self) -> str:
        return json.dumps(self.to_record(), separators=(",", ":"))


def build_root_function(pair: ClassifiedPair) -> CosetFamily:
    """Z_alpha = xbar(alpha_0) + n_alpha Z with n the extension of m to Psi."""
    sub = pair.subsystem
    n = extend_scaling(pair.m, sub)
    return CosetFamily.from_mapping(
        {alpha: (evaluate(pair.xbar, alpha, sub), n[alpha]) for alpha in sub.roots}
    )


@dataclass(frozen=True)
class Failure:
    kind: str
    alpha: Root | None = None
    beta: Root | None = None
    detail: str = ""

    def __str__(self) -> str:
        where = ""
        if self.alpha is not None:
            where = f" alpha={list(self.alpha.root_coords)}"
        if self.beta is not None:
            where += f" beta={list(self.beta.root_coords)}"
        return f"{self.kind}:{where} {self.detail}".rstrip()


@dataclass(frozen=True)
class Verification:
    """Outcome of verify_root_function; truthy iff every check passed.

    Failure kinds: ``not-in-ambient``, ``unnormalized``, ``support-not-closed``,
    ``Z`` (containment fails, so equality fails too) and ``Z=`` (containment
    holds but equality fails).
    """

    failures: tuple[Failure, ...]

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.ok

    @property
    def first(self) -> Failure | None:
        return self.failures[0] if self.failures else None


def _same_coset(r: int, n: int, r2: int, n2: int) -> bool:
    return n == n2 and (r == r2 if n == 0 else (r - r2) % n == 0)


def _coset_within(r: int, n: int, r2: int, n2: int) -> bool:
    """r + nZ is contained in r2 + n2 Z."""
    if n2 == 0:
        return n == 0 and r == r2
    return n % n2 == 0 and (r - r2) % n2 == 0


def verify_root_function(
    cf: CosetFamily, ambient: RootSystem, stop_at_first: bool = False
) -> Verification:
    """Check Z_b - <b, a^vee> Z_a = Z_{s_a(b)} for all a, b in the support.

    Coset arithmetic is exact: (r_b + n_b Z) - c (r_a + n_a Z) is
    (r_b - c r_a) + gcd(n_b, |c| n_a) Z.
    """
    failures: list[Failure] = []
    if not cf.is_normalized():
        failures.append(Failure("unnormalized"))
        if stop_at_first:
            return Verification(tuple(failures))
    idx = ambient.index
    for root, _, _ in cf.entries:
        if root not in idx:
            failures.append(Failure("not-in-ambient", root))
    if failures and any(f.kind == "not-in-ambient" for f in failures):
        return Verification(tuple(failures))
    rs = ambient.sorted_roots
    table = ambient.reflection_table
    pairs = ambient.pairing_table
    cosets = cf.as_dict
    for alpha, (ra, na) in cosets.items():
        ia = idx[alpha]
        for beta, (rb, nb) in cosets.items():
            ib = idx[beta]
            target_index = table[ia][ib]
            target = rs[target_index] if target_index >= 0 else None
            got = cosets.get(target) if target is not None else None
            if got is None:
                if target_index < 0 and not ambient.complete:
                    continue
                failures.append(Failure("support-not-closed", alpha, beta))
            else:
                c = pairs[ib][ia]
                lhs_r = rb - c * ra
                lhs_n = math.gcd(nb, abs(c) * na)
                r2, n2 = got
                if not _same_coset(lhs_r, lhs_n, r2, n2):
                    kind = "Z=" if _coset_within(lhs_r, lhs_n, r2, n2) else "Z"
                    failures.append(
                        Failure(
                            kind,
                            alpha,
                            beta,
                            f"lhs {lhs_r}+{lhs_n}Z vs stored {r2}+{n2}Z",
                        )
                    )
            if failures and stop_at_first:
                return Verification(tuple(failures))
    return Verification(tuple(failures))


def classify_root_function(cf: CosetFamily, ambient: RootSystem) -> ClassifiedPair:
    """Recover (Psi, m, xbar) from a verified family using its values on Gamma."""
    report = verify_root_function(cf, ambient, stop_at_first=True)
    if not report:
        raise NotARootFunction(str(report.first))
    sub = Subsystem.of(cf.support, ambient)
    cosets = cf.as_dict
    m = tuple(cosets[g][1] for g in sub.gamma)
    x = tuple(cosets[g][0] for g in sub.gamma)
    if not is_scaling_function(m, sub.cartan):
        raise InternalInconsistency(f"moduli on Gamma {m} are not a scaling function")
    n = extend_scaling(m, sub)
    for alpha, (r, na) in cosets.items():
        if n[alpha] != na:
            raise InternalInconsistency(f"modulus at {alpha!r}: stored {na}, extended {n[alpha]}")
        value = evaluate(x, alpha, sub)
        if not _same_coset(value, na, r, na):
            raise InternalInconsistency(f"offset at {alpha!r}: stored {r}, evaluated {value}")
    return ClassifiedPair(sub, m, canonical_coset(x, m))


def materialize_window(cf: CosetFamily, window: int) -> frozenset[AffineRoot]:
    """All alpha + n delta with n in Z_alpha and |n| <= window."""
    out = set()
    for root, r, n in cf.entries:
        if n == 0:
            if abs(r) <= window:
                out.add(AffineRoot(root, r))
        else:
            start = r - ((r + window) // n) * n
            for level in range(start, window + 1, n):
                out.add(AffineRoot(root, level))
    return frozenset(out)


def oracle_generators(pair: ClassifiedPair) -> list[AffineRoot]:
    """{g + xbar_g delta, g + (xbar_g + m_g) delta} for g in Gamma."""
    gens = []
    for g, x, mg in zip(pair.subsystem.gamma, pair.xbar, pair.m):
        gens.append(AffineRoot(g, x))
        if mg:
            gens.append(AffineRoot(g, x + mg))
    return gens


def closure_oracle(
    gens: Iterable[AffineRoot],
    ambient: RootSystem,
    window: int,
    factor: int = 3,
    max_rounds: int = 10_000,
) -> frozenset[AffineRoot]:
    """Brute-force reflection closure of ``gens`` on |level| <= factor * window,
    truncated to |level| <= window.

    Everything returned lies in the true closure; the converse is only
    expected, not guaranteed, near the window edge.  Level sets are kept as
    integer bitmasks, one per ambient root.
    """
    if window < 1:
        raise ValueError("window must be positive")
    outer = factor * window
    full = (1 << (2 * outer + 1)) - 1
    idx = ambient.index
    rs = ambient.sorted_roots
    refl = ambient.reflection_table
    pairs = ambient.pairing_table
    masks = [0] * len(rs)
    for g in gens:
        if g.base not in idx:
            raise RootNotInAmbient(f"{g.base!r} is not a root of the ambient system")
        if abs(g.level) > window:
            raise ValueError(f"generator level {g.level} outside the window")
        masks[idx[g.base]] |= 1 << (g.level + outer)

    def levels(mask: int) -> list[int]:
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1 - outer)
            mask ^= low
        return out

    changed = True
    rounds = 0
    while changed:
        rounds += 1
        if rounds > max_rounds:
            raise WindowOverflow(f"no fixpoint after {max_rounds} rounds")
        changed = False
        snapshot = list(masks)
        live = [k for k, mk in enumerate(snapshot) if mk]
        for a in live:
            la = levels(snapshot[a])
            for b in live:
                mb = snapshot[b]
                s = refl[a][b]
                if s < 0:
                    continue
                c = pairs[b][a]
                if c == 0:
                    acc = mb
                else:
                    acc = 0
                    for m in la:
                        shift = -c * m
                        acc |= (mb << shift) if shift >= 0 else (mb >> -shift)
                    acc &= full
                merged = masks[s] | acc
                if merged != masks[s]:
                    masks[s] = merged
                    changed = True
    return frozenset(
        AffineRoot(rs[k], level)
        for k, mk in enumerate(masks)
        for level in levels(mk)
        if abs(level) <= window
    )


def oracle_check(
    pair: ClassifiedPair, window: int, factor: int = 3
) -> tuple[frozenset[AffineRoot], frozenset[AffineRoot]]:
    """(predicted but not generated, generated but not predicted) on the window."""
    predicted = materialize_window(build_root_function(pair), window)
    generated = closure_oracle(oracle_generators(pair), pair.subsystem.ambient, window, factor)
    return predicted - generated, generated - predicted


def enumerate_loop_subsystems(
    ambient: RootSystem,
    modulus_bound: int,
    offset_bound: int | None = None,
    include_zero: bool = True,
    rank_bound: int = 4,
) -> list[ClassifiedPair]:
    """All pairs with nonzero scaling values <= modulus_bound.

    Zero-modulus coordinates of xbar range over [-offset_bound, offset_bound]
    (default: the modulus bound).  Sorted by serialized record.
    """
    if offset_bound is None:
        offset_bound = modulus_bound
    pairs = []
    for sub in enumerate_subsystems(ambient, rank_bound):
        for m in scaling_functions(sub.cartan, modulus_bound, include_zero):
            ranges = [range(mi) if mi else range(-offset_bound, offset_bound + 1) for mi in m]
            for x in product(*ranges):
                pairs.append(ClassifiedPair(sub, m, tuple(x)))
    pairs.sort(key=ClassifiedPair.serialized)
    return pairs


__all__ = [
    "AffineRoot",
    "ClassifiedPair",
    "CosetFamily",
    "Failure",
    "Verification",
    "affine_reflect",
    "build_root_function",
    "classify_root_function",
    "closure_oracle",
    "enumerate_loop_subsystems",
    "materialize_window",
    "oracle_check",
    "oracle_generators",
    "verify_root_function",
]
