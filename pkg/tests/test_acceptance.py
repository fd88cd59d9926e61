"""Acceptance suite: one test per criterion, with a pass line per case.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the criterion
summary lines and timings.
"""

import math
import random
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from lozenge.continuum import (
    Charge,
    LimitConfig,
    Probe,
    field_ratio,
    field_ratio_closed_form,
)
from lozenge.convergence import field_convergence_table, golden_pair_config
from lozenge.correlation import discrete_field, omega
from lozenge.coupling import (
    _eval_reduced,
    coupling_p,
    coupling_p_quadrature,
    dd_p_exact,
    dd_p_leading,
    reduce_domain,
)
from lozenge.exact import SqrtPiPoly
from lozenge.lattice import (
    HoleSystem,
    LozengeLocation,
    hole,
    left,
    lozenges_covering,
)
from lozenge.oracle import (
    TorusSpec,
    count_tilings_brute,
    count_tilings_kasteleyn,
    hexagon,
    oracle_probability_float,
    torus_count_brute,
    torus_count_kasteleyn,
)
from lozenge.surface import (
    FIBER_MODULUS,
    Window,
    average_surface,
    compare_to_helicoids,
    enclosed_charge,
    helicoid_specs_for_system,
    loop_circulation,
    rectangle_loop,
)

GOLDEN_PAIR = HoleSystem((hole("E", 0, 0), hole("W", 6, 0)))


def report(name: str, ok: bool, detail: str):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_criterion_1_coupling_exactness():
    t0 = time.time()
    assert coupling_p(0, 0).coeffs == (Fraction(1, 3),)

    memo = {}
    bad = 0
    seen = set()
    for x in range(-30, 31):
        for y in range(-30, 31):
            orbit = frozenset({(x, y), (y, x), (-x - y - 1, x), (x, -x - y - 1),
                               (y, -x - y - 1), (-x - y - 1, y)})
            if orbit in seen:
                continue
            seen.add(orbit)
            reps = {reduce_domain(*p) for p in orbit}
            vals = []
            for r in reps:
                if r not in memo:
                    memo[r] = _eval_reduced(*r)
                vals.append(memo[r])
            if any(v != vals[0] for v in vals[1:]):
                bad += 1

    worst = 0.0
    for x in range(-15, 0):
        for y in range(-15, 16):
            worst = max(worst, abs(float(_eval_reduced(x, y)) - coupling_p_quadrature(x, y)))
    elapsed = time.time() - t0
    report(
        "criterion 1 (coupling exactness)",
        bad == 0 and worst <= 1e-10 and elapsed < 5.0,
        f"symmetry failures={bad}, quadrature max err={worst:.2e}, time={elapsed:.2f}s",
    )


def test_criterion_2_field_identity():
    t0 = time.time()
    from lozenge.continuum import sample_limit_config

    rng = random.Random(7)
    worst = 0.0
    for _ in range(100):
        cfg = sample_limit_config(rng)
        lhs = field_ratio(cfg)
        rhs = field_ratio_closed_form(cfg)
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(rhs)))
    elapsed = time.time() - t0
    report(
        "criterion 2 (determinant ratio identity)",
        worst <= 1e-8 and elapsed < 30.0,
        f"max residual={worst:.2e} over 100 configs, time={elapsed:.2f}s",
    )


def test_criterion_3_block_identities():
    from lozenge.continuum import (
        border_block,
        border_block_reduced,
        border_block_target,
        random_zeta_function,
        shift_block,
        shift_block_cols,
        shift_block_rows,
    )

    rng = random.Random(7)
    bad = 0
    for _ in range(20):
        f = random_zeta_function(rng)
        a = rng.randint(-6, 6)
        if shift_block_rows(shift_block(a, f)) != shift_block(a - 1, f):
            bad += 1
        if shift_block_cols(shift_block(a, f)) != shift_block(a + 1, f):
            bad += 1
        al, be, ga = (rng.randint(-6, 6) for _ in range(3))
        if border_block_reduced(border_block(al, be, ga, f)) != border_block_target(al, be, ga, f):
            bad += 1
    report(
        "criterion 3 (exact block operations)",
        bad == 0,
        f"failures={bad} over 20 random rational functions (exact arithmetic)",
    )


def test_criterion_4_field_convergence():
    t0 = time.time()
    cfg = golden_pair_config(separation=2.0)
    rows = field_convergence_table(cfg, [8, 16, 32, 64])
    errs = [r.rel_error for r in rows]
    decreasing = all(a > b for a, b in zip(errs, errs[1:]))
    # the finite-scale fields use exact determinants only
    hs = HoleSystem((hole("E", 0, 0), hole("W", 2 * 8, 0)))
    assert discrete_field(left(2, 12), hs).exactness == "exact"
    elapsed = time.time() - t0
    report(
        "criterion 4 (field converges to the Coulomb form)",
        decreasing and errs[-1] <= 0.05 and elapsed < 60.0,
        f"relative errors={['%.4f' % e for e in errs]}, time={elapsed:.2f}s",
    )


def test_criterion_5_probability_axioms():
    den = omega(GOLDEN_PAIR).signed
    den = den if float(den) >= 0 else -den
    holes = GOLDEN_PAIR.triangles()
    checked = 0
    bad_range = 0
    bad_sum = 0
    for a in range(-7, 13):
        for b in range(-10, 10):
            e = left(a, b)
            covers = lozenges_covering(e)
            if e in holes or any(L.triangles() & holes for L in covers):
                continue
            total = SqrtPiPoly.zero()
            for L in covers:
                num = omega(GOLDEN_PAIR, [L]).signed
                p = float(num) / float(den)
                if not (0.0 <= p <= 1.0):
                    bad_range += 1
                total = total + (num if float(num) >= 0 else -num)
            if total != den:
                bad_sum += 1
            checked += 1
    report(
        "criterion 5 (probability axioms on a 20x20 window)",
        bad_range == 0 and bad_sum == 0 and checked > 300,
        f"probes={checked}, out-of-range={bad_range}, inexact sums={bad_sum}",
    )


def test_criterion_6_circulation():
    loops = {
        (-4, -8, 4, 6): None,
        (2, -14, 12, 0): None,
        (-4, -14, 12, 6): None,
        (-8, 0, -4, 4): None,
        (8, 2, 12, 6): None,
    }
    worst_charged = 0.0
    worst_contractible = 0.0
    for rect in loops:
        total = loop_circulation(rectangle_loop(*rect), GOLDEN_PAIR)
        q = enclosed_charge(rect, GOLDEN_PAIR)
        resid = abs(total + FIBER_MODULUS * q)
        if q:
            worst_charged = max(worst_charged, resid)
        else:
            worst_contractible = max(worst_contractible, resid)
    report(
        "criterion 6 (monodromy around holes)",
        worst_charged <= 1e-8 and worst_contractible <= 1e-9,
        f"charged residual={worst_charged:.2e}, contractible residual={worst_contractible:.2e}",
    )


def test_criterion_7_divided_difference_asymptotics():
    t0 = time.time()
    dirs = [
        (Fraction(-9, 10), Fraction(3, 10)),
        (Fraction(3, 10), Fraction(-9, 10)),
        (Fraction(6, 10), Fraction(6, 10)),
    ]
    worst_band = 0.0
    for k in (0, 1, 2):
        for l in (0, 1, 2):
            for u, v in dirs:
                scaled = []
                for n in (50, 100, 200, 400):
                    rn, sn = int(u * n), int(v * n)
                    exact = dd_p_exact(k, l, rn, sn, Fraction(1),
                                       list(range(k + 1)), list(range(l + 1)))
                    lead = dd_p_leading(k, l, rn, sn, Fraction(1))
                    scaled.append(abs(exact - lead) * n ** (k + l + 2))
                worst_band = max(worst_band, max(scaled) / min(scaled))
    elapsed = time.time() - t0
    report(
        "criterion 7 (divided-difference asymptotics)",
        worst_band <= 3.0 and elapsed < 120.0,
        f"worst band={worst_band:.2f} over k,l in 0..2 and 3 directions, time={elapsed:.2f}s",
    )


def test_criterion_8_surface_convergence():
    t0 = time.time()
    results = {}
    for R in (8, 16, 32):
        hs = HoleSystem((hole("E", 0, 0), hole("W", 2 * R, 0)))
        mu = 0.6
        alo = int(-mu * 2 * R / math.sqrt(3)) - 1
        ahi = 2 * R + int(mu * 2 * R / math.sqrt(3)) + 1
        blo, bhi = int(-2 * R - 2 * mu * R) - 1, int(2 * mu * R) + 1
        sheet = average_surface(hs, Window(alo, blo, ahi, bhi))
        results[R] = compare_to_helicoids(sheet, R, helicoid_specs_for_system(hs, R))
    maxes = [results[R].max_abs for R in (8, 16, 32)]
    decreasing = maxes[0] > maxes[1] > maxes[2]
    grad32 = results[32].grad_max_rel
    elapsed = time.time() - t0
    report(
        "criterion 8 (surface converges to the helicoid sum)",
        decreasing and grad32 <= 0.10,
        f"fiber max={['%.4f' % m for m in maxes]}, gradient rel err at R=32: "
        f"{grad32:.4f}, time={elapsed:.1f}s",
    )


def test_criterion_9_oracle_agreement():
    t0 = time.time()
    corpus = [(1, 1, 1), (2, 1, 1), (2, 2, 1), (3, 1, 1), (2, 2, 2), (3, 2, 1), (3, 2, 2)]
    regions = [hexagon(*abc) for abc in corpus]
    h4 = hexagon(4, 4, 4)
    regions.append(h4.remove(LozengeLocation(1, 1, 1)))
    regions.append(h4.remove(HoleSystem((hole("E", -1, 0), hole("W", 2, 0)))))
    mismatches = sum(
        1
        for reg in regions
        if len(reg) <= 48 and count_tilings_kasteleyn(reg) != count_tilings_brute(reg)
    )
    h222 = count_tilings_brute(hexagon(2, 2, 2))
    torus_ok = torus_count_kasteleyn(TorusSpec(4)) == torus_count_brute(TorusSpec(4))

    pair = HoleSystem((hole("E", -3, 0), hole("W", 3, 0)))
    loz = LozengeLocation(0, 3, 1)
    from lozenge.correlation import placement_probability

    bulk = placement_probability(loz, pair)
    gaps = []
    for side in (8, 16, 24):
        reg = hexagon(side, side, side)
        assert pair.triangles() <= reg.triangles and loz.triangles() <= reg.triangles
        finite = oracle_probability_float(loz, reg.remove(pair))
        gaps.append(abs(finite - bulk))
    elapsed = time.time() - t0
    report(
        "criterion 9 (enumeration oracle agreement)",
        mismatches == 0 and h222 == 20 and torus_ok and gaps[0] > gaps[1] > gaps[2],
        f"corpus mismatches={mismatches}, hex(2,2,2)={h222}, "
        f"gaps={['%.2e' % g for g in gaps]}, time={elapsed:.1f}s",
    )


def test_criterion_10_cli_determinism(tmp_path):
    pair = tmp_path / "pair.json"
    pair.write_text(GOLDEN_PAIR.to_json())
    limit = tmp_path / "limit.json"
    limit.write_text(
        '{"positives":[{"x":0.0,"y":0.0}],"negatives":[{"x":2.0,"y":0.0}],'
        '"probe":{"x":0.25,"y":1.5},"q":"1"}'
    )

    def run(*args):
        return subprocess.run(
            [sys.executable, "-m", "lozenge.cli", *args],
            capture_output=True, timeout=600,
        )

    commands = [
        ("coupling", "--x", "4", "--y", "-9"),
        ("coupling-table", "--range", "3", "--out", "-"),
        ("field", "--holes", str(pair), "--probes", "grid:2,0,3,1", "--out", "-"),
        ("coulomb", "--config", str(limit), "--grid", "3,3,4,4,2,2", "--out", "-"),
        ("converge", "--holes", str(limit), "--R-list", "4,8", "--out", "-"),
        ("verify", "identity31", "--trials", "5", "--seed", "7"),
        ("verify", "lemma33", "--seed", "7"),
        ("verify", "lemma34", "--seed", "7"),
        ("oracle", "count", "--region", "hex:2,2,2"),
    ]
    bad = []
    for cmd in commands:
        a, b = run(*cmd), run(*cmd)
        if a.returncode != 0 or a.stdout != b.stdout:
            bad.append(cmd[0])
    # surface writes a file; compare bytes
    s1, s2 = tmp_path / "s1.obj", tmp_path / "s2.obj"
    args = ("surface", "--holes", str(pair), "--window=-6,-14,14,6", "--R", "8")
    run(*args, "--out", str(s1))
    run(*args, "--out", str(s2))
    if s1.read_bytes() != s2.read_bytes():
        bad.append("surface")
    report(
        "criterion 10 (deterministic CLI output)",
        not bad,
        f"non-deterministic commands: {bad or 'none'}",
    )
