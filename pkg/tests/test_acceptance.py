"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that pytest prints in its terminal summary.
"""

import math

import numpy as np
import pytest

from bcpath import cspath as cp
from bcpath import normalization as nz
from bcpath import oracle as orc
from bcpath import reduction as rd
from bcpath.cspath import CsPath, SampledPath
from bcpath.dubins import dubins_length, solve_dubins
from bcpath.geometry import TWO_PI, Config, wrap_to_pi

from acceptance_log import record
from helpers import (csc_pieces, piecewise_curvature_path, random_config, random_cs_path,
                     random_pieces, smooth_curvature_path)

O = Config(0, 0, 0)


def endpoint_error(p: CsPath, q: Config) -> float:
    e = cp.endpoint(p)
    return math.hypot(e.x - q.x, e.y - q.y)


def step_ok(s: rd.ReductionStep) -> bool:
    a, b = cp.endpoint(s.before), cp.endpoint(s.after)
    return (math.hypot(a.x - b.x, a.y - b.y) < 1e-9 and abs(wrap_to_pi(a.theta - b.theta)) < 1e-9
            and s.length_delta <= 1e-12)


@pytest.mark.slow
def test_solver_agrees_with_lattice():
    spec = orc.LatticeSpec(control_step=0.02)
    res = orc.compare_batch(orc.random_query_pairs(100, 1), spec)
    gaps = np.array([r.gap for r in res])
    worst = int(np.argmax(gaps))
    ok = record("solver vs lattice", gaps.max() <= spec.resolution,
                f"max gap {gaps.max():.4f} (query {worst}), mean {gaps.mean():.4f}, "
                f"tolerance {spec.resolution:.2f}")
    assert ok


def fragments(n_random=400, n_csc=100, seed=20):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n_random + n_csc):
        total = rng.uniform(0.05, 0.99)
        if i < n_random:
            pieces = random_pieces(rng, total, int(rng.integers(1, 6)))
        else:
            pieces = csc_pieces(rng, total)
        out.append((i >= n_random, piecewise_curvature_path(random_config(rng), pieces, 1e-3)))
    return out


@pytest.fixture(scope="module")
def replacements():
    return [(is_csc, f, nz.replace_fragment(f)) for is_csc, f in fragments()]


def matches_fragment(rep: CsPath, f: SampledPath, tol: float = 1e-6) -> bool:
    """Whether the fragment samples lie on the replacement path."""
    total = cp.length(rep)
    if abs(total - f.total_length) > tol:
        return False
    for s, x, y in zip(f.s, f.x, f.y):
        c = cp.evaluate(rep, min(float(s), total))
        if math.hypot(c.x - x, c.y - y) > tol:
            return False
    return True


def test_replacement_is_never_longer(replacements):
    # generic fragments are not CSC paths, so they must come out strictly shorter;
    # the CSC fragments are the equality cases and must be reproduced
    over, not_strict, not_reproduced, close = 0, 0, 0, 0
    for is_csc, f, rep in replacements:
        step = float(np.max(np.diff(f.s)))
        d = cp.length(rep) - f.total_length
        over += d > 10 * step * step
        if is_csc:
            not_reproduced += not matches_fragment(rep, f)
        else:
            not_strict += not d < 0.0
            close += d > -1e-6
    ok = record("replacement dominance", over == 0 and not_strict == 0 and not_reproduced == 0,
                f"{len(replacements)} fragments, {over} longer than allowed, "
                f"{not_strict} generic not strictly shorter ({close} within 1e-6), "
                f"{not_reproduced} CSC fragments not reproduced within 1e-6")
    assert ok


def test_replacement_arcs_below_half_turn(replacements):
    worst = max(c.length for _, _, rep in replacements for c in rep.components if c.is_arc)
    bad = sum(any(c.is_arc and c.length >= math.pi for c in rep.components)
              for _, _, rep in replacements)
    ok = record("replacement arc bound", bad == 0,
                f"{bad} violations, longest arc {worst:.6f} < pi")
    assert ok


def test_normalization_is_monotone():
    rng = np.random.default_rng(5)
    step = 1e-3
    worst_len, worst_end, fails = -math.inf, 0.0, 0
    for i in range(50):
        total = rng.uniform(0.5, 10.0)
        start = random_config(rng)
        if i % 2:
            p = smooth_curvature_path(start, total, step, rng.uniform(0.2, 1.0),
                                      rng.uniform(0.5, 4.0), rng.uniform(0, TWO_PI))
        else:
            p = piecewise_curvature_path(start, random_pieces(rng, total, int(rng.integers(2, 12))),
                                         step)
        res = nz.normalize_detailed(p)
        m = res.fragment_count
        excess = cp.length(res.path) - p.total_length - m * nz.discretization_allowance(p)
        end = endpoint_error(res.path, Config(p.x[-1], p.y[-1], p.theta[-1]))
        worst_len = max(worst_len, excess)
        worst_end = max(worst_end, end / m)
        fails += excess > 0 or end > m * 1e-7
    ok = record("normalization monotone", fails == 0,
                f"50 paths, {fails} failures, worst excess over m*eps_d {worst_len:.2e}, "
                f"worst endpoint error per fragment {worst_end:.2e}")
    assert ok


def test_reduction_reaches_dubins_shape():
    rng = np.random.default_rng(8)
    fails, most = [], 0
    for i in range(100):
        p = random_cs_path(rng, int(rng.integers(4, 9)))
        try:
            out, steps = rd.reduce_to_minimizer(p)
        except (rd.IterationCap, rd.ReductionInternal) as e:
            fails.append(f"{i}: {type(e).__name__}")
            continue
        most = max(most, len(steps))
        good = (all(step_ok(s) for s in steps)
                and cp.complexity(out) <= 3 and rd.is_minimizer_shape(out)
                and cp.length(out) <= cp.length(p) + 1e-9
                and cp.length(out) >= dubins_length(p.start, cp.endpoint(p)) - 1e-6)
        if not good:
            fails.append(str(i))
    ok = record("reduction to minimizer", not fails,
                f"100 paths of complexity 4-8, most steps {most}, failures {fails or 'none'}")
    assert ok


def test_scs_always_shortens():
    rng = np.random.default_rng(13)
    fails, worst = 0, -math.inf
    for i in range(100):
        arc = rng.uniform(1e-7, 1e-6) if i % 25 == 0 else rng.uniform(1e-3, TWO_PI - 1e-3)
        p = CsPath.of(random_config(rng), [("S", rng.uniform(0.01, 3)), ("LR"[i % 2], arc),
                                          ("S", rng.uniform(0.01, 3))])
        s = rd.shorten_scs(rd.ComponentWindow(p, 0, "SCS"))
        limit = arc < 1e-6
        good = step_ok(s) and (s.length_delta <= 0 if limit else s.length_delta < -1e-9)
        if not limit:
            worst = max(worst, s.length_delta)
        fails += not good
    ok = record("SCS shortening", fails == 0,
                f"100 windows, {fails} failures, smallest decrease {-worst:.3e}")
    assert ok


def test_ccc_short_middle_is_replaced():
    rng = np.random.default_rng(17)
    fails, worst = 0, -math.inf
    for i in range(100):
        senses = "LRL" if i % 2 else "RLR"
        p = CsPath.of(random_config(rng), [(senses[0], rng.uniform(0.01, TWO_PI - 0.01)),
                                          (senses[1], rng.uniform(0.01, math.pi - 0.01)),
                                          (senses[2], rng.uniform(0.01, TWO_PI - 0.01))])
        s = rd.reduce_ccc_short_middle(rd.ComponentWindow(p, 0, "CCC"))
        csc = s.after.word[1:2] == "S" or cp.complexity(s.after) < 3
        worst = max(worst, s.length_delta)
        fails += not (step_ok(s) and s.length_delta < -1e-9 and csc)
    ok = record("CCC short middle", fails == 0,
                f"100 windows, {fails} failures, smallest decrease {-worst:.3e}")
    assert ok


@pytest.mark.xfail(strict=True, reason="a half-turn middle arc can still be shortened; "
                                       "see the boundary example in this test")
def test_ccc_half_turn_middle_is_stationary():
    rng = np.random.default_rng(19)
    deltas = []
    for i in range(20):
        senses = "LRL" if i % 2 else "RLR"
        a, b = rng.uniform(0.05, TWO_PI - 0.05, 2)
        p = CsPath.of(random_config(rng), [(senses[0], a), (senses[1], math.pi), (senses[2], b)])
        deltas.append(rd.reduce_ccc_short_middle(rd.ComponentWindow(p, 0, "CCC")).length_delta)
    # L:pi/2 R:pi L:pi/2 from the origin ends at (4, 0, 0): 2*pi against the straight 4
    edge = CsPath.of(O, [("L", math.pi / 2), ("R", math.pi), ("L", math.pi / 2)])
    deltas.append(rd.reduce_ccc_short_middle(rd.ComponentWindow(edge, 0, "CCC")).length_delta)
    ok = all(-1e-9 <= d <= 0 for d in deltas)
    record("CCC half-turn middle", ok,
           f"delta in [{min(deltas):.4f}, {max(deltas):.2e}]; all <= 0 but not >= -1e-9, "
           "a half-turn middle is not a stationary point")
    assert ok


def test_cccc_configurations_are_unstable():
    rng = np.random.default_rng(23)
    rows = []
    for i in range(10):
        senses = "LRLR" if i % 2 == 0 else "RLRL"
        a, delta = rng.uniform(0.2, 1.2), rng.uniform(0.2, 2.8)
        p = CsPath.of(random_config(rng), [(senses[0], a), (senses[1], math.pi + delta),
                                          (senses[2], math.pi + delta), (senses[3], a)])
        w = rd.ComponentWindow(p, 0, "CCCC")
        a0, f = rd.cccc_length_profile(w)
        d3, d4 = rd.second_difference(f, a0, 1e-3), rd.second_difference(f, a0, 1e-4)
        s = rd.cccc_instability(w)
        rows.append((d3, d4, s.length_delta, step_ok(s)))
    fails = sum(not (d3 < 0 and d4 < 0 and sd < -1e-9 and good) for d3, d4, sd, good in rows)
    ok = record("CCCC instability", fails == 0,
                f"10 configurations, {fails} failures, second differences in "
                f"[{min(r[1] for r in rows):.3f}, {max(r[1] for r in rows):.3f}]")
    assert ok


def random_outer_curve(rng: np.random.Generator) -> SampledPath:
    n = 4000
    t = np.linspace(0.0, 1.0, n + 1)
    phi = rng.uniform(-TWO_PI, TWO_PI) * t + rng.uniform(-1, 1) * np.sin(np.pi * t * rng.integers(1, 4))
    r = 1.0 + rng.uniform(0, 2) * np.sin(np.pi * t * rng.uniform(0.1, 1.0)) ** 2
    x, y = r * np.cos(phi), r * np.sin(phi)
    s = np.concatenate([[0.0], np.cumsum(np.hypot(np.diff(x), np.diff(y)))])
    return SampledPath(s, x, y, np.zeros_like(s))


def random_walk_curve(rng: np.random.Generator) -> SampledPath:
    th = np.cumsum(rng.normal(0, 0.2, 300)) + rng.uniform(0, TWO_PI)
    ds = rng.uniform(0.001, 0.05, 300)
    x = np.concatenate([[0.0], np.cumsum(ds * np.cos(th))])
    y = np.concatenate([[0.0], np.cumsum(ds * np.sin(th))])
    s = np.concatenate([[0.0], np.cumsum(ds)])
    return SampledPath(s, x, y, np.concatenate([th[:1], th]))


def test_length_lemma_validators():
    rng = np.random.default_rng(29)
    polar_bad = proj_bad = 0
    for _ in range(1000):
        L, eta = orc.check_polar_bound(random_outer_curve(rng))
        polar_bad += L < abs(eta) - 1e-6
        d = rng.normal(size=2)
        L, z = orc.check_projection_bound(random_walk_curve(rng), direction=d)
        proj_bad += L < z - 1e-6
    # equality cases
    phi = np.linspace(0.0, rng.uniform(0.5, 6.0), 20001)
    L, eta = orc.check_polar_bound(SampledPath(phi, np.cos(phi), np.sin(phi), phi + math.pi / 2))
    polar_eq = abs(L - eta) <= 1e-6
    t = np.linspace(0.0, 1.0, 101)
    L, z = orc.check_projection_bound(SampledPath(3 * t, 3 * t * 0.6, 3 * t * 0.8, np.zeros_like(t)),
                                      direction=(0.6, 0.8))
    proj_eq = abs(L - z) <= 1e-12
    ok = record("length lemma validators",
                polar_bad == 0 and proj_bad == 0 and polar_eq and proj_eq,
                f"1000 curves each, {polar_bad} polar and {proj_bad} projection violations, "
                f"equality on unit arc {polar_eq}, on aligned segment {proj_eq}")
    assert ok


def rigid(c: Config, a: float, t) -> Config:
    ca, sa = math.cos(a), math.sin(a)
    return Config(ca * c.x - sa * c.y + t[0], sa * c.x + ca * c.y + t[1], c.theta + a)


def test_solver_invariance():
    rng = np.random.default_rng(31)
    worst = 0.0
    for _ in range(200):
        x, y = random_config(rng), random_config(rng)
        base = solve_dubins(x, y).total
        a, t = rng.uniform(0, TWO_PI), rng.uniform(-10, 10, 2)
        moved = solve_dubins(rigid(x, a, t), rigid(y, a, t)).total
        back = solve_dubins(Config(y.x, y.y, y.theta + math.pi),
                            Config(x.x, x.y, x.theta + math.pi)).total
        worst = max(worst, abs(moved - base), abs(back - base))
    ok = record("solver invariance", worst <= 1e-9, f"200 queries, worst difference {worst:.2e}")
    assert ok
