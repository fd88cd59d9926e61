"""Lattice geometry, holes, charges and validation."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lozenge.lattice import (
    BadSlope,
    HoleSystem,
    LozengeLocation,
    MultiHole,
    NonIntegerIndex,
    OverlappingHoles,
    TriHole,
    UnpairableConfiguration,
    charge,
    distance,
    hole,
    left,
    lozenges_covering,
    right,
    to_cartesian,
    validate_system,
)

coords = st.integers(min_value=-50, max_value=50)


def test_charges():
    assert TriHole("E", 0, 0).charge == 2
    assert TriHole("W", 0, 0).charge == -2
    assert charge(LozengeLocation(3, -1, 2)) == 0
    assert charge(TriHole("E", 5, 2).triangles()) == 2


def test_charge_additive_over_disjoint_union():
    e, w = TriHole("E", 0, 0), TriHole("W", 6, 3)
    union = e.triangles() | w.triangles()
    assert charge(union) == e.charge + w.charge == 0


def test_decompose():
    assert TriHole("E", 0, 0).decompose() == {right(-1, 0), right(0, -1)}
    assert TriHole("W", 0, 0).decompose() == {left(1, 0), left(0, 1)}
    assert TriHole("E", 5, 2).decompose() == {right(4, 2), right(5, 1)}


def test_decompose_lies_inside_hole():
    for h in (TriHole("E", 2, -1), TriHole("W", -3, 4)):
        assert h.decompose() <= h.triangles()


def test_lozenges_covering_left():
    l1, l2, l3 = lozenges_covering(left(0, 0))
    assert l1.monomers() == (right(0, 0), left(0, 0))
    assert l2.monomers() == (right(-1, 0), left(0, 0))
    assert l3.monomers() == (right(0, -1), left(0, 0))
    for loz in (l1, l2, l3):
        assert left(0, 0) in loz.triangles()


def test_lozenges_covering_right():
    for loz in lozenges_covering(right(2, 5)):
        assert right(2, 5) in loz.triangles()


@given(coords, coords)
def test_lozenges_covering_translation_covariant(x, y):
    base = lozenges_covering(left(0, 0))
    moved = lozenges_covering(left(x, y))
    for b, m in zip(base, moved):
        assert (m.a, m.b, m.direction) == (b.a + x, b.b + y, b.direction)


def test_lozenge_from_pair_roundtrip():
    for d in (1, 2, 3):
        loz = LozengeLocation(4, -2, d)
        r, l = loz.monomers()
        assert LozengeLocation.from_pair(r, l) == loz


def test_lozenge_shares_edge():
    # the two monomers of any lozenge share exactly two vertices
    for d in (1, 2, 3):
        r, l = LozengeLocation(0, 0, d).monomers()
        assert len(set(r.vertices()) & set(l.vertices())) == 2


def test_cartesian_distance_agreement():
    for (a, b), (c, d) in [((0, 0), (1, 0)), ((0, 0), (1, 1)), ((0, 0), (1, -1)),
                           ((3, -2), (-1, 4))]:
        da, db = a - c, b - d
        metric = math.sqrt(da * da + da * db + db * db)
        p, q = to_cartesian(a, b), to_cartesian(c, d)
        assert math.dist(p, q) == pytest.approx(metric, abs=1e-12)
    assert distance((0, 0), (1, 1)) == pytest.approx(math.sqrt(3), abs=1e-15)
    assert distance((0, 0), (1, -1)) == pytest.approx(1.0, abs=1e-15)


def test_multihole_constraints():
    MultiHole("E", Fraction(1), (0, 2, 4))  # fine
    MultiHole("E", Fraction(-2), (0, 1))    # 1-q = 3
    MultiHole("W", Fraction(1, 4), (0, 4))  # 1-q = 3/4, q*a integral
    with pytest.raises(BadSlope):
        MultiHole("E", Fraction(2), (0, 3))
    with pytest.raises(NonIntegerIndex):
        MultiHole("E", Fraction(1, 4), (0, 2))
    with pytest.raises(NonIntegerIndex):
        MultiHole("E", Fraction(1), (2, 2))


def test_validate_disjoint_pair():
    hs = HoleSystem((hole("E", 0, 0), hole("W", 6, 0)))
    report = validate_system(hs)
    assert report.valid and report.total_charge == 0 and report.pairable


def test_validate_overlap():
    hs = HoleSystem((hole("E", 0, 0), hole("E", 1, 0)))
    report = validate_system(hs)
    assert not report.valid
    with pytest.raises(OverlappingHoles):
        validate_system(hs, strict=True)


def test_validate_probe_overlap():
    hs = HoleSystem((hole("E", 0, 0),))
    report = validate_system(hs, [LozengeLocation(0, 0, 1)])
    assert not report.valid


def test_unpairable_probes():
    report = validate_system(HoleSystem(()), [right(0, 0), left(40, 40)])
    assert not report.pairable
    with pytest.raises(UnpairableConfiguration):
        validate_system(HoleSystem(()), [right(0, 0), left(40, 40)], strict=True)


def test_validation_is_pure():
    hs = HoleSystem((hole("E", 0, 0), hole("W", 6, 0)))
    assert validate_system(hs) == validate_system(hs)


def test_json_roundtrip():
    hs = HoleSystem(
        (
            MultiHole("E", Fraction(1, 4), (0, 4), (2, -3)),
            MultiHole("W", Fraction(1), (0, 2), (9, 9)),
        )
    )
    again = HoleSystem.from_json(hs.to_json())
    assert again == hs
    assert '"q": "1/4"' in hs.to_json()


def test_multihole_string_matches_bigger_hole_decomposition():
    # a slope-1 string of touching side-2 holes is a valid multihole
    m = MultiHole("E", Fraction(1), (0, 2), (0, 0))
    assert len(m.constituents()) == 2
    assert m.charge == 4
    tris = [t.triangles() for t in m.constituents()]
    assert not (tris[0] & tris[1])


def test_reflection_maps_species():
    e = TriHole("E", 3, -1)
    reflected = {m.reflect_vertical() for m in e.decompose()}
    assert reflected == TriHole("W", 1, -3).decompose()
