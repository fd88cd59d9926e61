"""Joint correlations of monomers and holes via exact determinants.

The correlation of a balanced monomer configuration is the absolute value
of a determinant whose entries are coupling values at coordinate
differences; charge-imbalanced configurations (more rights than lefts)
append column pairs of asymptotic-series coefficients, two per surplus
pair.  Balanced determinants, and those needing only the series index 0,
are evaluated exactly in Q[sqrt(3)/pi]; higher series indices fall back to
floating point with extrapolated coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .exact import SqrtPiPoly, det_exact
from .coupling import coupling_p, u0_exact, u_coefficient
from .lattice import (
    LEFT,
    RIGHT,
    HoleSystem,
    LozengeLocation,
    Monomer,
    UnpairableConfiguration,
    lozenges_covering,
    pairable,
)

EXACT = "exact"
EXTRAPOLATED = "extrapolated"

SQRT3_2 = math.sqrt(3.0) / 2.0

# Unit vectors along the long diagonals of the three lozenge classes
# (polar directions 0, 2pi/3, 4pi/3 in the node frame).
E1 = (1.0, 0.0)
E2 = (-0.5, SQRT3_2)
E3 = (-0.5, -SQRT3_2)


class ZeroDenominator(ZeroDivisionError):
    pass


class ProbeOverlapsHole(ValueError):
    pass


class ExtrapolationTolerance(ArithmeticError):
    pass


@dataclass(frozen=True)
class MonomerConfig:
    rights: tuple[tuple[int, int], ...]
    lefts: tuple[tuple[int, int], ...]

    @classmethod
    def from_monomers(cls, monomers: Sequence[Monomer]) -> "MonomerConfig":
        ms = list(monomers)
        n_right = sum(1 for m in ms if m.kind == RIGHT)
        if n_right * 2 < len(ms):
            # fewer rights than lefts: reflect across a vertical lattice line
            ms = [m.reflect_vertical() for m in ms]
        rights = tuple((m.a, m.b) for m in ms if m.kind == RIGHT)
        lefts = tuple((m.a, m.b) for m in ms if m.kind == LEFT)
        return cls(rights, lefts)

    @property
    def surplus(self) -> int:
        return len(self.rights) - len(self.lefts)


@dataclass(frozen=True)
class CorrelationValue:
    value: float
    exactness: str
    signed: SqrtPiPoly | None = None
    cond: float | None = None

    def __float__(self) -> float:
        return self.value


def correlation_det(
    cfg: MonomerConfig,
    check_pairing: bool = True,
    u_tolerance: float = 1e-6,
) -> CorrelationValue:
    """Correlation of the configuration as a determinant magnitude."""
    m, n = len(cfg.rights), len(cfg.lefts)
    if (m + n) % 2:
        raise UnpairableConfiguration("odd number of monomers")
    if check_pairing:
        monomers = [Monomer(RIGHT, a, b) for a, b in cfg.rights] + [
            Monomer(LEFT, c, d) for c, d in cfg.lefts
        ]
        if not pairable(monomers):
            raise UnpairableConfiguration(
                "monomers cannot be paired sharing vertices"
            )
    surplus = m - n
    halves = surplus // 2

    if halves <= 1:
        rows: list[list[SqrtPiPoly]] = []
        for a, b in cfg.rights:
            row = [coupling_p(a - c, b - d) for c, d in cfg.lefts]
            if halves == 1:
                row.append(u0_exact(a, b + 1))
                row.append(u0_exact(a + 1, b))
            rows.append(row)
        det = det_exact(rows)
        return CorrelationValue(
            value=abs(float(det)),
            exactness=EXACT if halves == 0 else EXTRAPOLATED,
            signed=det,
        )

    import numpy as np

    rows_f: list[list[float]] = []
    for a, b in cfg.rights:
        row = [float(coupling_p(a - c, b - d)) for c, d in cfg.lefts]
        for s in range(halves):
            if s == 0:
                row.append(float(u0_exact(a, b + 1)))
                row.append(float(u0_exact(a + 1, b)))
            else:
                ua = u_coefficient(s, a, b + 1)
                ub = u_coefficient(s, a + 1, b)
                if max(ua.error, ub.error) > u_tolerance:
                    raise ExtrapolationTolerance(
                        f"series coefficient error exceeds {u_tolerance}"
                    )
                row.append(ua.value)
                row.append(ub.value)
        rows_f.append(row)
    mat = np.array(rows_f, dtype=float)
    det = float(np.linalg.det(mat))
    cond = float(np.linalg.cond(mat))
    return CorrelationValue(value=abs(det), exactness=EXTRAPOLATED, cond=cond)


def _decompose(
    hs: HoleSystem, probes: Sequence[LozengeLocation | Monomer]
) -> list[Monomer]:
    out: list[Monomer] = []
    for p in probes:
        if isinstance(p, LozengeLocation):
            out.extend(p.monomers())
        else:
            out.append(p)
    for t in hs.tri_holes():
        out.extend(sorted(t.decompose()))
    return out


def omega(
    hs: HoleSystem, probes: Sequence[LozengeLocation | Monomer] = ()
) -> CorrelationValue:
    """Joint correlation of the hole system plus optional probes."""
    cfg = MonomerConfig.from_monomers(_decompose(hs, probes))
    return correlation_det(cfg)


def _check_probe_clear(probe_triangles: frozenset, hs: HoleSystem) -> None:
    if probe_triangles & hs.triangles():
        raise ProbeOverlapsHole("probe intersects a hole")


def placement_parts(
    L: LozengeLocation, hs: HoleSystem
) -> tuple[CorrelationValue, CorrelationValue]:
    _check_probe_clear(L.triangles(), hs)
    return omega(hs, [L]), omega(hs)


def placement_probability(L: LozengeLocation, hs: HoleSystem) -> float:
    """Probability that the lozenge location is occupied, as a raw ratio."""
    num, den = placement_parts(L, hs)
    if den.value == 0.0:
        raise ZeroDenominator("correlation of the hole system vanishes")
    return num.value / den.value


def occupation_probability(L: LozengeLocation, hs: HoleSystem) -> float:
    """Like ``placement_probability`` but 0 for locations overlapping a hole."""
    if L.triangles() & hs.triangles():
        return 0.0
    return placement_probability(L, hs)


@dataclass(frozen=True)
class FieldSample:
    probe: Monomer
    p1: float
    p2: float
    p3: float
    fx: float
    fy: float
    exactness: str

    @property
    def vector(self) -> tuple[float, float]:
        """Cartesian field vector reconstructed from the class probabilities."""
        sign = 1.0 if self.probe.kind == LEFT else -1.0
        return (
            sign * (self.p1 * E1[0] + self.p2 * E2[0] + self.p3 * E3[0]),
            sign * (self.p1 * E1[1] + self.p2 * E2[1] + self.p3 * E3[1]),
        )


def discrete_field(e: Monomer, hs: HoleSystem) -> FieldSample:
    """Average-orientation field at a monomer from exact placement ratios.

    For right-pointing probes the mirror convention applies: the long
    diagonals are taken as pointing toward the partner monomer, which
    negates all three class vectors.
    """
    _check_probe_clear(frozenset({e}), hs)
    den = omega(hs)
    if den.value == 0.0:
        raise ZeroDenominator("correlation of the hole system vanishes")
    ps = []
    exactness = den.exactness
    for L in lozenges_covering(e):
        num = omega(hs, [L])
        ps.append(num.value / den.value)
        if num.exactness == EXTRAPOLATED:
            exactness = EXTRAPOLATED
    p1, p2, p3 = ps
    sign = 1.0 if e.kind == LEFT else -1.0
    return FieldSample(
        probe=e,
        p1=p1,
        p2=p2,
        p3=p3,
        fx=sign * SQRT3_2 * (p1 - p2),
        fy=sign * SQRT3_2 * (p1 - p3),
        exactness=exactness,
    )


def test_charge_field(
    x: int, y: int, alpha: int, beta: int, hs: HoleSystem
) -> float:
    """Relative change of the correlation under displacing a probe hole."""
    from .lattice import TriHole

    if alpha == 0 and beta == 0:
        raise ValueError("displacement (alpha, beta) must be nonzero")
    here = TriHole("E", x, y)
    there = TriHole("E", x + alpha, y + beta)
    blocked = hs.triangles()
    for t in (here, there):
        if t.triangles() & blocked:
            raise ProbeOverlapsHole(f"test hole {t} intersects the system")
    num = omega(hs, sorted(there.decompose()))
    den = omega(hs, sorted(here.decompose()))
    if den.value == 0.0:
        raise ZeroDenominator("correlation with the test hole vanishes")
    if num.signed is not None and den.signed is not None and num.signed == den.signed:
        ratio = 1.0  # exact-field equality, e.g. translation invariance
    else:
        ratio = num.value / den.value
    return (ratio - 1.0) / math.sqrt(alpha * alpha + alpha * beta + beta * beta)
