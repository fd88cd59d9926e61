"""Lattice geometry: monomers, triangular holes, lozenge locations.

Coordinates follow the 60-degree oblique system: the point (a, b) sits at
a*u1 + b*u2 in the plane, where u1 and u2 are unit vectors in the polar
directions -pi/6 and +pi/6.  Monomers (unit triangles) are addressed by the
midpoint of their vertical side; lattice nodes live at ((A*sqrt(3)/2, B/2))
for integers A, B with A + B even.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

LEFT = "L"
RIGHT = "R"

# Unit vectors of the oblique axes (polar directions -pi/6 and +pi/6).
U1 = (math.sqrt(3.0) / 2.0, -0.5)
U2 = (math.sqrt(3.0) / 2.0, 0.5)


class LatticeError(ValueError):
    """Base class for invalid lattice configurations."""


class OverlappingHoles(LatticeError):
    pass


class BadSlope(LatticeError):
    pass


class NonIntegerIndex(LatticeError):
    pass


class UnpairableConfiguration(LatticeError):
    pass


class Monomer(NamedTuple):
    kind: str  # LEFT or RIGHT
    a: int
    b: int

    def vertices(self) -> tuple[tuple[int, int], ...]:
        """Corner nodes in integer node coordinates (A, B)."""
        A = self.a + self.b
        B = self.b - self.a
        apex = (A - 1, B + 1) if self.kind == LEFT else (A + 1, B + 1)
        return ((A, B), (A, B + 2), apex)

    def translate(self, da: int, db: int) -> "Monomer":
        return Monomer(self.kind, self.a + da, self.b + db)

    def reflect_vertical(self) -> "Monomer":
        """Mirror image across the vertical lattice line through the origin."""
        kind = RIGHT if self.kind == LEFT else LEFT
        return Monomer(kind, -self.b, -self.a)


def left(a: int, b: int) -> Monomer:
    return Monomer(LEFT, a, b)


def right(a: int, b: int) -> Monomer:
    return Monomer(RIGHT, a, b)


def to_cartesian(a: float, b: float) -> tuple[float, float]:
    return (a * U1[0] + b * U2[0], a * U1[1] + b * U2[1])


def distance(p: Sequence[float], q: Sequence[float]) -> float:
    da, db = p[0] - q[0], p[1] - q[1]
    return math.sqrt(da * da + da * db + db * db)


def monomer_midpoint(m: Monomer) -> tuple[float, float]:
    """Cartesian midpoint of the vertical side (node frame of reference)."""
    A = m.a + m.b
    B = m.b - m.a
    return (A * math.sqrt(3.0) / 2.0, (B + 1) / 2.0)


@dataclass(frozen=True)
class TriHole:
    """Side-2 triangular hole, east- or west-pointing."""

    kind: str  # "E" or "W"
    a: int
    b: int

    def triangles(self) -> frozenset[Monomer]:
        a, b = self.a, self.b
        if self.kind == "E":
            return frozenset({left(a, b), right(a, b), right(a - 1, b), right(a, b - 1)})
        return frozenset({right(a, b), left(a, b), left(a + 1, b), left(a, b + 1)})

    def decompose(self) -> frozenset[Monomer]:
        """The two monomers whose removal is equivalent to removing the hole.

        The remaining pair inside the side-2 triangle is forced to tile
        itself, so correlations only see these two.
        """
        a, b = self.a, self.b
        if self.kind == "E":
            return frozenset({right(a - 1, b), right(a, b - 1)})
        return frozenset({left(a + 1, b), left(a, b + 1)})

    @property
    def charge(self) -> int:
        return 2 if self.kind == "E" else -2


@dataclass(frozen=True)
class MultiHole:
    """Union of side-2 holes along a line of slope q (3 must divide 1 - q)."""

    kind: str
    q: Fraction
    indices: tuple[int, ...]
    anchor: tuple[int, int] = (0, 0)

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if self.kind not in ("E", "W"):
            raise LatticeError(f"unknown hole kind {self.kind!r}")
        if any(x >= y for x, y in zip(self.indices, self.indices[1:])):
            raise NonIntegerIndex("indices must be strictly increasing")
        if (1 - self.q).numerator % 3 != 0:
            raise BadSlope(f"slope {self.q}: 3 does not divide 1 - q")
        for i in self.indices:
            if (self.q * i).denominator != 1:
                raise NonIntegerIndex(f"q*a = {self.q * i} is not an integer")

    def constituents(self) -> tuple[TriHole, ...]:
        ax, ay = self.anchor
        return tuple(
            TriHole(self.kind, i + ax, int(self.q * i) + ay) for i in self.indices
        )

    @property
    def charge(self) -> int:
        per = 2 if self.kind == "E" else -2
        return per * len(self.indices)

    @property
    def size(self) -> int:
        return len(self.indices)


def hole(kind: str, a: int, b: int) -> MultiHole:
    """Single side-2 hole as a one-constituent multihole anchored at (a, b)."""
    return MultiHole(kind, Fraction(1), (0,), (a, b))


@dataclass(frozen=True)
class HoleSystem:
    multiholes: tuple[MultiHole, ...]

    def __post_init__(self):
        object.__setattr__(self, "multiholes", tuple(self.multiholes))

    @property
    def total_charge(self) -> int:
        return sum(m.charge for m in self.multiholes)

    def tri_holes(self) -> tuple[TriHole, ...]:
        return tuple(t for m in self.multiholes for t in m.constituents())

    def triangles(self) -> frozenset[Monomer]:
        out: set[Monomer] = set()
        for t in self.tri_holes():
            out |= t.triangles()
        return frozenset(out)

    def to_json(self) -> str:
        return json.dumps(
            {
                "multiholes": [
                    {
                        "kind": m.kind,
                        "q": str(m.q),
                        "indices": list(m.indices),
                        "anchor": list(m.anchor),
                    }
                    for m in self.multiholes
                ]
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "HoleSystem":
        data = json.loads(text)
        holes = tuple(
            MultiHole(
                h["kind"],
                Fraction(h["q"]),
                tuple(h["indices"]),
                tuple(h.get("anchor", (0, 0))),
            )
            for h in data["multiholes"]
        )
        return cls(holes)


EMPTY_SYSTEM = HoleSystem(())


class LozengeLocation(NamedTuple):
    """Lozenge identified by its left monomer and its direction class.

    Direction 1, 2, 3 <-> long diagonal in polar direction 0, 2pi/3, 4pi/3.
    """

    a: int
    b: int
    direction: int

    def monomers(self) -> tuple[Monomer, Monomer]:
        a, b = self.a, self.b
        if self.direction == 1:
            return (right(a, b), left(a, b))
        if self.direction == 2:
            return (right(a - 1, b), left(a, b))
        if self.direction == 3:
            return (right(a, b - 1), left(a, b))
        raise LatticeError(f"direction must be 1, 2 or 3, got {self.direction}")

    def triangles(self) -> frozenset[Monomer]:
        return frozenset(self.monomers())

    @property
    def angle(self) -> float:
        return (0.0, 2 * math.pi / 3, 4 * math.pi / 3)[self.direction - 1]

    @property
    def charge(self) -> int:
        return 0

    @classmethod
    def from_pair(cls, r: Monomer, l: Monomer) -> "LozengeLocation":
        if r.kind != RIGHT or l.kind != LEFT:
            raise LatticeError("lozenge needs one right and one left monomer")
        if (r.a, r.b) == (l.a, l.b):
            return cls(l.a, l.b, 1)
        if (r.a + 1, r.b) == (l.a, l.b):
            return cls(l.a, l.b, 2)
        if (r.a, r.b + 1) == (l.a, l.b):
            return cls(l.a, l.b, 3)
        raise LatticeError("monomers do not form a lozenge")


def lozenges_covering(m: Monomer) -> tuple[LozengeLocation, LozengeLocation, LozengeLocation]:
    """The three lozenge locations containing the given monomer.

    For a right monomer the same three direction classes appear, realised by
    the lozenges pairing it with its three left neighbours.
    """
    a, b = m.a, m.b
    if m.kind == LEFT:
        return (LozengeLocation(a, b, 1), LozengeLocation(a, b, 2), LozengeLocation(a, b, 3))
    return (
        LozengeLocation(a, b, 1),
        LozengeLocation(a + 1, b, 2),
        LozengeLocation(a, b + 1, 3),
    )


def charge(region: Iterable[Monomer] | MultiHole | TriHole | HoleSystem | LozengeLocation) -> int:
    """Right-pointing minus left-pointing unit triangles."""
    if isinstance(region, (MultiHole, TriHole)):
        return region.charge
    if isinstance(region, HoleSystem):
        return region.total_charge
    if isinstance(region, LozengeLocation):
        return 0
    return sum(1 if t.kind == RIGHT else -1 for t in region)


def _share_vertex(m1: Monomer, m2: Monomer) -> bool:
    return bool(set(m1.vertices()) & set(m2.vertices()))


def pairable(monomers: Sequence[Monomer]) -> bool:
    """Can the multiset be split into pairs sharing at least one vertex?"""
    ms = list(monomers)
    if len(ms) % 2:
        return False

    def match(remaining: list[int]) -> bool:
        if not remaining:
            return True
        first, rest = remaining[0], remaining[1:]
        for k, j in enumerate(rest):
            if _share_vertex(ms[first], ms[j]):
                if match(rest[:k] + rest[k + 1:]):
                    return True
        return False

    return match(list(range(len(ms))))


@dataclass
class ValidationReport:
    valid: bool
    total_charge: int
    pairable: bool
    errors: list[str]


def validate_system(
    hs: HoleSystem,
    probes: Sequence[Monomer | LozengeLocation] = (),
    strict: bool = False,
) -> ValidationReport:
    """Check disjointness, slope and index constraints, and pairability.

    With ``strict=True`` the first failure raises the matching exception
    instead of being collected into the report.
    """
    errors: list[str] = []

    def fail(exc: type[LatticeError], msg: str):
        if strict:
            raise exc(msg)
        errors.append(msg)

    seen: set[Monomer] = set()
    for t in hs.tri_holes():
        tris = t.triangles()
        if seen & tris:
            fail(OverlappingHoles, f"hole {t} overlaps another hole")
        seen |= tris
    probe_monomers: list[Monomer] = []
    for p in probes:
        tris = p.triangles() if isinstance(p, LozengeLocation) else frozenset({p})
        if seen & tris:
            fail(OverlappingHoles, f"probe {p} overlaps a hole or another probe")
        seen |= tris
        probe_monomers.extend(tris)

    config = probe_monomers + [m for t in hs.tri_holes() for m in t.decompose()]
    ok_pairs = pairable(config)
    if not ok_pairs:
        fail(UnpairableConfiguration, "monomer multiset admits no vertex-sharing pairing")

    return ValidationReport(
        valid=not errors,
        total_charge=hs.total_charge,
        pairable=ok_pairs,
        errors=errors,
    )
