"""Convergence harness: exact finite-R quantities against their limits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .continuum import Charge, LimitConfig, coulomb_field
from .correlation import discrete_field
from .lattice import HoleSystem, MultiHole, left


@dataclass(frozen=True)
class ConvergenceRow:
    R: int
    r_fx: float
    r_fy: float
    limit_fx: float
    limit_fy: float
    rel_error: float


def lattice_system_at_scale(cfg: LimitConfig, R: int) -> HoleSystem:
    """Place the limit configuration on the lattice at scale R.

    Each weight-s charge becomes a horizontal string of s side-2 holes
    (slope 1, indices 0, 2, ..., 2s-2) anchored at the rounded position.
    """
    holes = []
    for sign_kind, charges in (("E", cfg.positives), ("W", cfg.negatives)):
        for c in charges:
            anchor = (round(R * c.x), round(R * c.y))
            holes.append(
                MultiHole(sign_kind, Fraction(1), tuple(range(0, 2 * c.size, 2)), anchor)
            )
    return HoleSystem(tuple(holes))


def field_convergence_table(cfg: LimitConfig, r_values: list[int]) -> list[ConvergenceRow]:
    """R * (exact field) vs the limit coefficient, row per scale."""
    rows = []
    lim_fx, lim_fy = coulomb_field(cfg, 1.0)  # 1/R coefficient
    norm = math.hypot(lim_fx, lim_fy)
    for R in r_values:
        hs = lattice_system_at_scale(cfg, R)
        probe = left(round(R * cfg.probe.x), round(R * cfg.probe.y))
        fs = discrete_field(probe, hs)
        rfx, rfy = R * fs.fx, R * fs.fy
        err = math.hypot(rfx - lim_fx, rfy - lim_fy) / norm if norm else math.inf
        rows.append(
            ConvergenceRow(
                R=R,
                r_fx=rfx,
                r_fy=rfy,
                limit_fx=lim_fx,
                limit_fy=lim_fy,
                rel_error=err,
            )
        )
    return rows


def golden_pair_config(separation: float = 2.0) -> LimitConfig:
    """The standard convergence family: opposite unit charges on a line,
    probe offset along their perpendicular bisector."""
    from .continuum import Probe

    return LimitConfig(
        positives=(Charge(0.0, 0.0, 1),),
        negatives=(Charge(separation, 0.0, 1),),
        probe=Probe(separation / 8.0, 3.0 * separation / 4.0),
    )
