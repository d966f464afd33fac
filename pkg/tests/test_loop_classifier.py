from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from looproot.errors import InvalidPair, MalformedInput, NotARootFunction
from looproot.loop_classifier import (
    AffineRoot,
    ClassifiedPair,
    CosetFamily,
    affine_reflect,
    build_root_function,
    classify_root_function,
    closure_oracle,
    enumerate_loop_subsystems,
    materialize_window,
    oracle_generators,
    verify_root_function,
)
from looproot.records import family_from_record, loads, pair_from_record
from looproot.root_core import cartan_matrix, generate_root_system, validate_gcm
from looproot.subsystems import Subsystem

A1 = generate_root_system(cartan_matrix("a1"))
A2 = generate_root_system(validate_gcm(oracles.A2))
B2 = generate_root_system(validate_gcm(oracles.B2, ("a", "b")))
G2 = generate_root_system(validate_gcm(oracles.G2, ("a", "b")))

ALPHA = A1.lookup((1,))


def full(rs):
    return Subsystem.of(rs.roots, rs)


def test_affine_reflect_examples():
    a1, a2 = A2.lookup((1, 0)), A2.lookup((0, 1))
    assert affine_reflect(AffineRoot(a1, 0), AffineRoot(a2, 4), A2.gcm) == AffineRoot(
        A2.lookup((1, 1)), 4
    )
    got = affine_reflect(AffineRoot(ALPHA, 1), AffineRoot(-ALPHA, -1), A1.gcm)
    assert got == AffineRoot(ALPHA, 1)
    a = AffineRoot(a1, 3)
    assert affine_reflect(a, a, A2.gcm) == AffineRoot(-a1, -3)


def test_build_examples():
    cf = build_root_function(ClassifiedPair(full(A1), (2,), (1,)))
    assert cf.as_dict == {ALPHA: (1, 2), -ALPHA: (1, 2)}
    cf = build_root_function(ClassifiedPair(full(A2), (1, 1), (0, 0)))
    assert set(cf.as_dict.values()) == {(0, 1)}
    cf = build_root_function(ClassifiedPair(full(A2), (0, 0), (1, 0)))
    assert cf.coset(A2.lookup((1, 0))) == (1, 0)
    assert cf.coset(A2.lookup((0, 1))) == (0, 0)
    assert cf.coset(A2.lookup((1, 1))) == (1, 0)


def test_invalid_pairs():
    with pytest.raises(InvalidPair):
        ClassifiedPair(full(B2), (2, 1), (0, 0))
    with pytest.raises(InvalidPair):
        ClassifiedPair(full(B2), (1, 2), (0, 3))
    with pytest.raises(InvalidPair):
        ClassifiedPair(full(B2), (1,), (0,))


def test_verify_examples():
    bad = CosetFamily.from_mapping(
        {
            A2.lookup((1, 0)): (1, 0),
            A2.lookup((0, 1)): (0, 0),
            A2.lookup((1, 1)): (0, 0),
            A2.lookup((-1, 0)): (-1, 0),
            A2.lookup((0, -1)): (0, 0),
            A2.lookup((-1, -1)): (0, 0),
        }
    )
    report = verify_root_function(bad, A2)
    assert not report
    assert report.first.kind in ("Z", "Z=")
    assert verify_root_function(CosetFamily(()), A2)


def test_verify_distinguishes_containment_from_equality():
    # Z_alpha = 2Z and Z_{-alpha} = Z: containment Z_a - 2 Z_a in Z_{-a} holds, equality fails
    cf = CosetFamily.from_mapping({ALPHA: (0, 2), -ALPHA: (0, 1)})
    kinds = {f.kind for f in verify_root_function(cf, A1).failures}
    assert "Z=" in kinds


def test_verify_reports_open_support():
    cf = CosetFamily.from_mapping({ALPHA: (0, 1)})
    assert verify_root_function(cf, A1).first.kind == "support-not-closed"


def test_classify_examples():
    cf = CosetFamily.from_mapping({ALPHA: (2, 4), -ALPHA: (-2, 4)})
    pair = classify_root_function(cf, A1)
    assert pair.m == (4,) and pair.xbar == (2,) and pair.subsystem.roots == {ALPHA, -ALPHA}
    cf = CosetFamily.from_mapping({r: (0, 1) for r in A2.roots})
    pair = classify_root_function(cf, A2)
    assert (pair.m, pair.xbar, len(pair.subsystem.roots)) == ((1, 1), (0, 0), 6)
    singleton = build_root_function(ClassifiedPair(full(A2), (0, 0), (1, 0)))
    assert classify_root_function(singleton, A2) == ClassifiedPair(full(A2), (0, 0), (1, 0))
    with pytest.raises(NotARootFunction):
        classify_root_function(CosetFamily.from_mapping({ALPHA: (0, 1)}), A1)


def test_materialize_examples():
    cf = build_root_function(ClassifiedPair(full(A1), (2,), (1,)))
    window = materialize_window(cf, 3)
    assert {a.level for a in window if a.base == ALPHA} == {-3, -1, 1, 3}
    assert {a.level for a in window if a.base == -ALPHA} == {-3, -1, 1, 3}
    assert materialize_window(CosetFamily.from_mapping({ALPHA: (5, 0), -ALPHA: (-5, 0)}), 3) == set()
    whole = CosetFamily.from_mapping({ALPHA: (0, 1), -ALPHA: (0, 1)})
    assert {a.level for a in materialize_window(whole, 1) if a.base == ALPHA} == {-1, 0, 1}


def test_closure_oracle_examples():
    got = closure_oracle([AffineRoot(ALPHA, 1), AffineRoot(-ALPHA, 1)], A1, 6)
    expected = materialize_window(CosetFamily.from_mapping({ALPHA: (1, 2), -ALPHA: (1, 2)}), 6)
    assert got == expected
    assert closure_oracle([AffineRoot(ALPHA, 0)], A1, 4) == {AffineRoot(ALPHA, 0), AffineRoot(-ALPHA, 0)}
    a1, a2 = A2.lookup((1, 0)), A2.lookup((0, 1))
    got = closure_oracle([AffineRoot(a1, 0), AffineRoot(a2, 0)], A2, 4)
    assert got == {AffineRoot(r, 0) for r in A2.roots}


def test_enumeration_examples():
    pairs = enumerate_loop_subsystems(A1, 2, include_zero=False)
    assert len(pairs) == 4
    assert sum(1 for p in pairs if not p.subsystem.roots) == 1
    pairs = enumerate_loop_subsystems(A2, 1, include_zero=False)
    assert len(pairs) == 5
    assert all(set(p.m) <= {1} and set(p.xbar) <= {0} for p in pairs)


def test_enumeration_counts_and_order():
    pairs = enumerate_loop_subsystems(B2, 3)
    assert len(pairs) == 456
    keys = [p.serialized() for p in pairs]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)


def test_records_round_trip():
    for pair in enumerate_loop_subsystems(B2, 2):
        record = loads(pair.serialized())
        assert pair_from_record(record, B2) == pair
        family = build_root_function(pair)
        assert family_from_record(loads(json.dumps(family.to_record())), B2) == family


def test_records_reject_floats_and_duplicates():
    with pytest.raises(MalformedInput):
        loads('{"entries": [{"root": [1], "offset": 1.5, "modulus": 2}]}')
    dup = {"entries": [{"root": [1], "offset": 0, "modulus": 1}] * 2}
    with pytest.raises(MalformedInput):
        family_from_record(dup, A1)


POOL = [
    (rs, p)
    for rs in (A1, A2, B2, G2)
    for p in enumerate_loop_subsystems(rs, 3, offset_bound=2)
]
pool = st.sampled_from(POOL)


@given(pool)
@settings(max_examples=150, deadline=None)
def test_built_families_satisfy_invariants(item):
    rs, pair = item
    cf = build_root_function(pair)
    assert cf.is_normalized()
    assert verify_root_function(cf, rs)
    n = {root: nn for root, _, nn in cf.entries}
    for root, r, nn in cf.entries:
        # negation symmetry
        r2, n2 = cf.coset(-root)
        assert n2 == nn
        assert (r2 == -r) if nn == 0 else (r2 + r) % nn == 0
    for orbit in pair.subsystem.orbits:
        assert len({n[x] for x in orbit}) == 1


@given(pool, st.integers(2, 5))
@settings(max_examples=30, deadline=None)
def test_closure_oracle_matches_independent_closure(item, window):
    rs, pair = item
    if rs is G2:
        return
    gens = oracle_generators(pair)
    if any(abs(g.level) > window for g in gens):
        return
    ours = closure_oracle(gens, rs, window)
    theirs = oracles.coset_family_closure(
        rs.gcm.entries, [(g.base.root_coords, g.level) for g in gens], window
    )
    assert {(a.base.root_coords, a.level) for a in ours} == theirs
    assert ours == materialize_window(build_root_function(pair), window)


@given(pool, st.data())
@settings(max_examples=60, deadline=None)
def test_random_generators_close_to_a_classified_family(item, data):
    """Any window-closed set generated from part of a family is itself a family window."""
    rs, pair = item
    if not pair.subsystem.roots or not any(pair.m):
        return
    window = 8
    points = sorted(materialize_window(build_root_function(pair), 2), key=AffineRoot.sort_key)
    if not points:
        return
    gens = data.draw(st.lists(st.sampled_from(points), min_size=1, max_size=3, unique=True))
    got = closure_oracle(gens, rs, window)
    cosets = {}
    for a in got:
        cosets.setdefault(a.base, set()).add(a.level)
    mapping = {}
    for root, levels in cosets.items():
        levels = sorted(levels)
        if len(levels) == 1:
            mapping[root] = (levels[0], 0)
        else:
            step = levels[1] - levels[0]
            mapping[root] = (levels[0], step)
    family = CosetFamily.from_mapping(mapping)
    assert verify_root_function(family, rs)
    assert got <= materialize_window(build_root_function(pair), window)
    assert materialize_window(family, window) == got
