"""Acceptance criteria 1-10, each at its stated tolerance; one PASS/FAIL line per criterion."""

import cmath
import math
import random
import time
from math import lcm

import numpy as np
from conftest import ACCEPTANCE_LINES

from cremerlab.cremermap import (
    DomainCxU, brute_force_Lk, coefficient_identity, divergence_profile, escape_certificate, eval_a, eval_Lk,
    first_integral_direct, first_integral_residual, lemma_chain,
)
from cremerlab.cremermap.escape import ESCAPED, stepwise_exit
from cremerlab.dynsim import (FINITE, INFINITE, PERIODIC, PolyMap, PolyVectorField, exp_flow, jordan_block,
                              jordan_projection, linear_orbit_classify, monomial_drift, st_example)
from cremerlab.dynsim.exact import GaussRat
from cremerlab.dynsim.flow import PETAL_POINT
from cremerlab.numerics import BallComplex, BallReal
from cremerlab.perk import FIRES, SILENT, components, fixed_curve_probe, isolated_fixed_criterion, per_k_points
from cremerlab.rotations import RotationNumber, bruno_partial_sum, bruno_partials
from cremerlab.seedforge import ForgePolicy, certify, certify_inverse, forge, load_seed, save_seed


def record(n: int, ok: bool, detail: str):
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def _annulus(rng, lo, hi):
    r = lo + (hi - lo) * rng.random()
    return complex(r * cmath.exp(2j * math.pi * rng.random()))


# -- 1 -----------------------------------------------------------------------------------------


def test_criterion_1_seed_certification(tmp_path):
    t0 = time.perf_counter()
    policy = ForgePolicy(target_depth=3, materialize_depth=2)
    theta, seqs = forge(policy)
    path = tmp_path / "seed.json"
    save_seed(str(path), theta, seqs, policy)
    # certification starts from the file alone
    theta2, seqs2, _ = load_seed(str(path))
    fwd = certify(theta2, seqs2, max_prec=4096)
    inv = certify_inverse(theta2, seqs2, max_prec=4096)
    dt = time.perf_counter() - t0
    c4 = fwd.get(3, "C4")
    ok = (len(fwd.verdicts) == 15 and len(inv.verdicts) == 15 and fwd.all_pass and inv.all_pass
          and "interval" in c4.method and "interval" in inv.get(3, "C4").method
          and max(fwd.max_prec_used, inv.max_prec_used) <= 4096 and dt < 60)
    record(1, ok, f"(15+15 checks, all PASS={fwd.all_pass and inv.all_pass}, level-3 C4 via '{c4.method}', "
                  f"max precision {max(fwd.max_prec_used, inv.max_prec_used)} bits, {dt:.2f} s)")
    assert ok


# -- 2 -----------------------------------------------------------------------------------------


def test_criterion_2_lemma_bounds(forged_spec):
    rng = random.Random(2)
    bad = []
    checked = 0
    for j in (1, 2):
        for _ in range(50):
            x = _annulus(rng, 1 / j, j)
            ch = lemma_chain(forged_spec, j, x)
            jj = BallReal(j, 0, 64)
            ok = ch.ok and ch.lower.ge(ch.lower.from_value(j)) and ch.upper.le(ch.closed_upper)
            if j == 1:
                v = eval_Lk(forged_spec, forged_spec.level(1).k, x).enclosure()
                lo, hi = abs(v).lower(), abs(v).upper()
                # the value ball must sit inside the certified chain interval and above j
                ok = ok and ch.lower.to_ball(128).lower() <= lo and hi <= ch.upper.to_ball(128).upper() and jj.lower() <= lo
            checked += 1
            if not ok:
                bad.append((j, x))
    ok = not bad
    record(2, ok, f"({checked} points, levels 1 and 2, value-mode cross-check at k_1 = "
                  f"{forged_spec.level(1).k.value}; failures {len(bad)})")
    assert ok, bad[:3]


# -- 3 -----------------------------------------------------------------------------------------


def test_criterion_3_escape_soundness(forged_spec, toy_spec):
    rng = random.Random(3)
    dom = DomainCxU(0, 0.4)
    pts = [(_annulus(rng, 0.5, 2.0), 0.4 * math.sqrt(rng.random()) * cmath.exp(2j * math.pi * rng.random()) * 0.999)
           for _ in range(200)]
    fails = 0
    for x, y in pts:
        for d in ("fwd", "bwd"):
            if escape_certificate(forged_spec, (x, y), dom, d).verdict != ESCAPED:
                fails += 1
    toy_bad = 0
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    for d in ("fwd", "bwd"):
        steps = stepwise_exit(toy_spec, xs, ys, dom, d)
        for (x, y), s in zip(pts, steps):
            c = escape_certificate(toy_spec, (x, y), dom, d)
            if c.verdict != ESCAPED or not (0 < s <= c.k.value):
                toy_bad += 1
    ok = fails == 0 and toy_bad == 0
    record(3, ok, f"(200 points x 2 directions: {400 - fails} ESCAPED; toy stepwise exits at or before "
                  f"the predicted iterate for {400 - toy_bad}/400)")
    assert ok


# -- 4 -----------------------------------------------------------------------------------------


def test_criterion_4_divergent_linearization(forged_spec):
    prof = divergence_profile(forged_spec)
    roots_ok = all(v.contains(2 * j) for j, v in prof)
    # a_j + b_j (lambda^{m_j} - 1) = 0 coefficientwise, so through level 2 the residual vanishes
    # identically and what remains is the omitted part of a, bounded by the level-3 tail
    cancel = all(coefficient_identity(forged_spec, j) for j, _ in prof)
    rng = random.Random(4)
    worst_rad, tail_log2, bad = 0.0, None, 0
    for _ in range(20):
        # |x| <= 1/2 keeps the roundoff of the level-2 term (|b_2| = 4^101) far below |a(x)|
        x = _annulus(rng, 0.1, 0.5)
        r = first_integral_residual(forged_spec, 2, x)
        tail_log2 = float(r.tail.log2_hi)
        direct = first_integral_direct(forged_spec, 2, x)
        ok = r.partial.contains(0) and direct.contains(0) and r.tail.log2_hi < 0
        worst_rad = max(worst_rad, float(abs(r.partial).upper()))
        bad += not ok
    ok = roots_ok and cancel and bad == 0 and worst_rad < 1e-40
    record(4, ok, f"(|b_j|^(1/m_j) contains 2j for j = {[j for j, _ in prof]}; coefficient cancellation {cancel}; "
                  f"residual ball contains 0 on 20 points with radius <= {worst_rad:.2g}; "
                  f"level-3 tail 2^{tail_log2:.4g})")
    assert ok


# -- 5 -----------------------------------------------------------------------------------------


def test_criterion_5_Lk_oracle(forged_spec):
    rng = random.Random(5)
    lam = forged_spec.lam
    mismatches = 0
    pts = [_annulus(rng, 0.05, 2.0) for _ in range(20)]
    for x in pts:
        # independent route: accumulate a(lambda^i x) term by term
        acc = BallComplex(0, 0, forged_spec.prec)
        li = BallComplex(1, 0, forged_spec.prec)
        xb = BallComplex.from_complex(x, forged_spec.prec)
        for k in range(0, 65):
            if not eval_Lk(forged_spec, k, x).enclosure().overlaps(acc):
                mismatches += 1
            acc = acc + eval_a(forged_spec, li * xb).enclosure()
            li = li * lam
    # and the library's own brute-force routine at the top k
    spot = all(eval_Lk(forged_spec, 64, x).enclosure().overlaps(brute_force_Lk(forged_spec, 64, x)) for x in pts[:3])
    cocycle_bad = 0
    for _ in range(100):
        k1 = rng.randint(0, 64)
        k2 = rng.randint(0, 64 - k1)
        x = _annulus(rng, 0.05, 2.0)
        lhs = eval_Lk(forged_spec, k1 + k2, x).enclosure()
        rhs = eval_Lk(forged_spec, k1, x).enclosure() + eval_Lk(forged_spec, k2, (lam ** k1) * x).enclosure()
        cocycle_bad += not lhs.overlaps(rhs)
    ok = mismatches == 0 and spot and cocycle_bad == 0
    record(5, ok, f"(20 points x k = 0..64: {mismatches} mismatches; cocycle 100 pairs: {cocycle_bad} failures)")
    assert ok


# -- 6 -----------------------------------------------------------------------------------------


def _unimodular(rng, n):
    P = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(3 * n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        c = rng.choice([-2, -1, 1, 2])
        P[i] = [a + c * b for a, b in zip(P[i], P[j])]
    return P


def _inv_int(P):
    A = [[GaussRat(v) for v in row] for row in P]
    n = len(A)
    I = [[GaussRat(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c])
        A[c], A[p], I[c], I[p] = A[p], A[c], I[p], I[c]
        f = A[c][c]
        A[c] = [v / f for v in A[c]]
        I[c] = [v / f for v in I[c]]
        for r in range(n):
            if r != c and A[r][c]:
                g = A[r][c]
                A[r] = [a - g * b for a, b in zip(A[r], A[c])]
                I[r] = [a - g * b for a, b in zip(I[r], I[c])]
    return I


def _blockdiag(blocks):
    n = sum(len(b) for b in blocks)
    M = [[0] * n for _ in range(n)]
    o = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                M[o + i][o + j] = v
        o += len(b)
    return M


BLOCKS = {  # integer blocks with eigenvalues of known order
    "1": ([[1]], 1), "-1": ([[-1]], 2), "R3": ([[0, -1], [1, -1]], 3), "R4": ([[0, -1], [1, 0]], 4),
    "R6": ([[1, -1], [1, 0]], 6), "J1": ([[1, 1], [0, 1]], 1), "-J": ([[-1, 1], [0, -1]], 2),
    "R5": ([[0, 0, 0, -1], [1, 0, 0, -1], [0, 1, 0, -1], [0, 0, 1, -1]], 5),
    "i": ([[1j]], 4), "-i": ([[-1j]], 4),
}


def test_criterion_6_linear_theory():
    rng = random.Random(6)
    proj_bad = 0
    for lam in (GaussRat(1), GaussRat(-1), GaussRat(0, 1), GaussRat(3, 4) / 5):
        for n in range(1, 6):
            x = [GaussRat(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(n)]
            B = jordan_block(lam, n)
            Am = [[GaussRat(int(i == j)) for j in range(n)] for i in range(n)]
            for m in range(0, 101):
                want = [sum((Am[i][j] * x[j] for j in range(n)), GaussRat(0)) for i in range(n)]
                got = jordan_projection(lam, n, x, m, prec=256)
                proj_bad += not all(g.re.contains(w.re) and g.im.contains(w.im) for g, w in zip(got, want))
                Am = [[sum((B[i][t] * Am[t][j] for t in range(n)), GaussRat(0)) for j in range(n)] for i in range(n)]
    names = list(BLOCKS)
    cls_bad = []
    for t in range(20):
        pick = [names[t % len(names)]] + rng.sample(names, rng.randint(0, 2))
        blocks = [BLOCKS[p][0] for p in pick]
        want = 1
        for p in pick:
            want = lcm(want, BLOCKS[p][1])
        B = _blockdiag(blocks)
        if all(isinstance(v, int) for row in B for v in row):
            P = _unimodular(rng, len(B))
            M = [[GaussRat(v) for v in row] for row in B]
            M = _mul(_mul([[GaussRat(v) for v in row] for row in P], M), _inv_int(P))
        else:
            M = [[GaussRat.of(v) for v in row] for row in B]
        r = linear_orbit_classify(M)
        if r.verdict != FINITE or r.unipotent_power != want:
            cls_bad.append((pick, r.verdict, r.unipotent_power, want))
    r = linear_orbit_classify([[1, 1], [1, 2]])
    s5 = BallReal(5, 0, 200).sqrt()
    targets = [(BallReal(3, 0, 200) + s5) / 2, (BallReal(3, 0, 200) - s5) / 2]
    balls = [e.ball(128) for e in r.eigenvalues]
    eig_ok = r.verdict == INFINITE and all(any(b.re.contains(t) and b.im.contains(0) for b in balls) for t in targets)
    ok = proj_bad == 0 and not cls_bad and eig_ok
    record(6, ok, f"(Jordan projections n <= 5, m <= 100: {proj_bad} mismatches; 20 root-of-unity matrices: "
                  f"{20 - len(cls_bad)} correct; [[1,1],[1,2]] INFINITE with balls containing (3 +- sqrt 5)/2: {eig_ok})")
    assert ok, cls_bad


def _mul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    return [[sum((A[i][t] * B[t][j] for t in range(k)), GaussRat(0)) for j in range(m)] for i in range(n)]


# -- 7 -----------------------------------------------------------------------------------------


def test_criterion_7_flow_fidelity():
    rng = np.random.default_rng(7)
    X = PolyVectorField.parse(f"({2 * math.pi!r}i + y)*x, 0")
    worst = 0.0
    for _ in range(20):
        p = (rng.normal(size=2) + 1j * rng.normal(size=2))
        p = 0.5 * rng.random() * p / np.max(np.abs(p))
        r = exp_flow(X, 1.0, p)
        want = np.array([cmath.exp(p[1]) * p[0], p[1]])
        worst = max(worst, float(np.max(np.abs(r.z - want) / np.maximum(np.abs(want), 1e-300))))
    G = PolyVectorField.parse("2i*z^3", names=("z",))
    worst_g = 0.0
    for z0 in [0.1, 0.25j, 0.2 - 0.2j, -0.3, 0.05 + 0.3j]:
        r = exp_flow(G, 1.0, [z0])
        want = z0 / cmath.sqrt(1 - 4j * z0 ** 2)
        worst_g = max(worst_g, abs(r.z[0] - want) / abs(want))
    ok = worst < 1e-10 and worst_g < 1e-10
    record(7, ok, f"(x(2 pi i + y) d/dx: max relative error {worst:.2e} on 20 points with |p| <= 0.5; "
                  f"2iz^3 d/dz: {worst_g:.2e}; order 16, 2^10 substeps)")
    assert ok


# -- 8 -----------------------------------------------------------------------------------------


def test_criterion_8_st_example():
    r = st_example((0.2, 0.2), domain=0.3, budget=40, compare=50)
    semi_ok = r.steps_compared == 50 and r.semiconj_residual < 1e-6
    sector = st_example(PETAL_POINT, domain=0.3, budget=50, mode="T", compare=2).orbit
    d10 = monomial_drift(1, 0, sector)["strictly_increasing"]
    d21 = monomial_drift(2, 1, sector)["strictly_increasing"]
    periods = []
    for p in [(0, 0.2), (0.15, 0), (0, -0.1j), (0.25 * cmath.exp(1j), 0)]:
        o = st_example(p, domain=0.3, budget=20, compare=1).orbit
        periods.append(o.step if o.termination == PERIODIC else None)
    per_ok = all(s is not None and s <= 4 for s in periods)
    ok = semi_ok and d10 and d21 and per_ok
    record(8, ok, f"(semiconjugacy residual {r.semiconj_residual:.2e} over k <= {r.steps_compared}; drift (1,0) "
                  f"{d10}, (2,1) {d21} along {len(sector.points)} petal points; axis periods {periods})")
    assert ok


# -- 9 -----------------------------------------------------------------------------------------


def test_criterion_9_per_k():
    F = PolyMap.parse("-x, -x - y")
    r1 = per_k_points(F, 1, 1.0)
    only_origin = len(r1.points) == 1 and np.max(np.abs(r1.points[0].point)) < 1e-8
    r2 = components(per_k_points(F, 2, 1.0))
    c = r2.components
    line_ok = (len(c) == 1 and c[0].dimension == 1 and all(abs(p.point[0]) < 1e-8 for p in r2.points))
    probe = fixed_curve_probe(F)
    fires = isolated_fixed_criterion(PolyMap.parse("x + x^2, y + y^2"))["verdict"] == FIRES
    silent = isolated_fixed_criterion(PolyMap.parse("x + x^2, y + x*y"))["verdict"] == SILENT
    ok = only_origin and line_ok and probe.m == 2 and fires and silent
    record(9, ok, f"(k=1 only origin {only_origin}; k=2 {len(r2.points)} points in {len(c)} cluster(s) of dimension "
                  f"{[x.dimension for x in c]} on |x| < 1e-8; probe m = {probe.m}; criterion FIRES/SILENT "
                  f"{fires}/{silent})")
    assert ok


# -- 10 ----------------------------------------------------------------------------------------


def test_criterion_10_arithmetic_contrast(forged):
    golden = RotationNumber.golden()
    ps = bruno_partials(golden, 20)
    cap = ps[9].value.lower() * 2
    bounded = all(p.value.upper() <= cap for p in ps)
    g20 = ps[19].value
    theta, _ = forged
    c3 = bruno_partial_sum(theta, 3)
    ratio_lo = c3.lower() / g20.upper()
    contrast = ratio_lo > 1000
    ok = bounded and contrast
    record(10, ok, f"(golden K <= 20 below 2 x K=10 value: {bounded}; forged K=3 partial "
                   f"{float(c3.mid):.4f} vs golden K=20 {float(g20.mid):.5f}, ratio >= {float(ratio_lo):.3f}, "
                   f"needs > 1000)")
    assert ok
