"""End-to-end acceptance suite.

Each test exercises one release criterion at full stated scale and prints
a single machine-greppable pass/fail line. Tolerances are asserted
exactly as stated; nothing here is downscaled.
"""

import itertools
import math
import time

import numpy as np
import pytest

from frustloop.analyze import expected_intersections, mc_min_poisson
from frustloop.bench import (
    collect_point,
    default_nsweep,
    density_scan,
    lognormal_stats,
    rho_peak_reference,
    scaling_study,
)
from frustloop.convert import (
    Max2SatInstance,
    WeightedClause,
    binary_to_ising,
    max2sat_to_qubo,
    qubo_to_bipartite,
    satisfied_weight,
)
from frustloop.core import (
    RbmInstance,
    SpinState,
    brute_force_ground_state,
    energy,
    energy_gap,
    frustration_index,
    gauge_fix,
    local_fields,
)
from frustloop.generate import (
    GenParams,
    SaturationError,
    alpha_from_f,
    b1b4_state,
    block_sums,
    f_from_alpha,
    generate_instance,
    random_loop_instance,
    structured_loop_instance,
)
from frustloop.solve import AnnealSchedule, final_fields, solve_with_restarts

F_GRID = [0.05, 0.10, 0.15, 0.20, 0.24]
RHO_GRID = [0.2, 0.5, 1.0]
D_GRID = [0.2, 0.5, 0.9]


def report(num, ok, detail):
    line = f"criterion {num:02d}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    assert ok, line


def sample_params(rng, mode):
    f = float(rng.choice(F_GRID))
    rho = float(rng.choice(RHO_GRID))
    if mode == "random":
        n = int(rng.integers(4, 13))
        m = int(rng.integers(4, 13))
        d = 0.5
    else:
        d = float(rng.choice(D_GRID))
        # block edges need at least two rows/columns on the small side
        lo = {0.2: 11, 0.5: 5, 0.9: 4}[d]
        n = int(rng.integers(lo, 13))
        m = int(rng.integers(lo, 13))
    return GenParams(n=n, m=m, f=f, rho=rho, seed=int(rng.integers(2**32)),
                     mode=mode, d=d)


@pytest.fixture(scope="module")
def corpus():
    rng = np.random.default_rng(20240817)
    instances = []
    t0 = time.time()
    for mode in ("random", "structured"):
        count = 0
        while count < 1000:
            p = sample_params(rng, mode)
            try:
                inst = generate_instance(p)
            except SaturationError:
                # tight blocks at high density can fill up; such
                # parameter combinations admit no instance at all
                continue
            instances.append((p, inst))
            count += 1
    return instances, time.time() - t0


def test_01_planted_optimum_soundness(corpus):
    instances, gen_time = corpus
    t0 = time.time()
    worst = 0.0
    for p, inst in instances:
        _, e = brute_force_ground_state(inst)
        err = max(abs(e - inst.ground_energy),
                  abs(energy(inst, inst.planted) - inst.ground_energy))
        worst = max(worst, err)
    elapsed = gen_time + time.time() - t0
    ok = worst <= 1e-9 and elapsed < 300
    report(1, ok, f"2000 instances, max energy error {worst:.2e}, "
                  f"{elapsed:.1f}s")


def test_02_frustration_exactness(corpus):
    instances, _ = corpus
    worst = max(abs(frustration_index(inst) - p.f) for p, inst in instances)
    report(2, worst <= 1e-12, f"max |measured f - requested f| = {worst:.2e}")


def test_03_structured_degeneracy():
    rng = np.random.default_rng(3)
    worst_deg = worst_gap = worst_block = 0.0
    eps = 1e-3
    for _ in range(25):
        n = int(rng.integers(8, 13))
        seed = int(rng.integers(2**32))
        # exactly degenerate pair at the maximal frustration point
        p = GenParams(n=n, m=n, f=0.25, rho=1.0, seed=seed, mode="structured")
        inst = structured_loop_instance(p)
        worst_deg = max(worst_deg, abs(energy(inst, b1b4_state(inst))
                                       - inst.ground_energy))
        # gap 2 eps N just below it
        p2 = GenParams(n=n, m=n, f=f_from_alpha(1.0 - eps), rho=1.0,
                       seed=seed, mode="structured")
        inst2 = structured_loop_instance(p2)
        N = sum(inst2.meta[k] for k in ("N1", "N2", "N3"))
        gap = energy(inst2, b1b4_state(inst2)) - inst2.ground_energy
        worst_gap = max(worst_gap, abs(gap - 2 * eps * N))
        for target, tol in ((inst, 0.0), (inst2, 1e-9)):
            N1, N2, N3 = (target.meta[k] for k in ("N1", "N2", "N3"))
            alpha = target.meta["alpha"]
            b1, b2, b3, b4 = block_sums(target)
            # integer weights at alpha=1 make the sums exact; the
            # perturbed alpha accumulates float rounding
            err = max(
                abs(b1 - ((N1 + N2) - alpha * (N1 + N2 + N3))),
                abs(b2 - (2 * N2 + N3)),
                abs(b3 - (2 * N1 + N3)),
                abs(b4 - N3),
            )
            worst_block = max(worst_block, err - tol)
    ok = worst_deg == 0.0 and worst_gap <= 1e-9 and worst_block <= 0.0
    report(3, ok, f"degeneracy err {worst_deg:.2e}, gap err {worst_gap:.2e}, "
                  f"block-sum slack {worst_block:.2e}")


def test_04_conversion_chain_optimum():
    rng = np.random.default_rng(4)
    t0 = time.time()
    worst = 0.0
    for _ in range(100):
        nv = int(rng.integers(2, 9))
        clauses = []
        for _ in range(int(rng.integers(1, 17))):
            v1 = int(rng.integers(1, nv + 1))
            v2 = int(rng.integers(1, nv + 1))
            l1 = v1 if rng.random() < 0.5 else -v1
            if v2 == v1 or rng.random() < 0.2:
                l2 = None
            else:
                l2 = v2 if rng.random() < 0.5 else -v2
            clauses.append(WeightedClause(l1, l2, float(rng.uniform(0.01, 2.0))))
        sat = Max2SatInstance(nv, clauses)
        best = max(satisfied_weight(sat, a)
                   for a in itertools.product([-1, 1], repeat=nv))
        inst, const = binary_to_ising(qubo_to_bipartite(max2sat_to_qubo(sat)))
        _, e = brute_force_ground_state(inst)
        worst = max(worst, abs((-e + const) - best))
    elapsed = time.time() - t0
    ok = worst <= 1e-9 and elapsed < 60
    report(4, ok, f"100 chains, max optimum error {worst:.2e}, {elapsed:.1f}s")


def test_05_hardness_peak_location():
    t0 = time.time()
    densities = [round(0.30 + 0.05 * k, 2) for k in range(8)]
    _, peak = density_scan(30, 0.05, densities, 200, master_seed=2024)
    elapsed = time.time() - t0
    ok = 0.35 <= peak <= 0.6 and elapsed <= 1800
    report(5, ok, f"p95 peak at rho={peak}, {elapsed:.1f}s")


def test_06_low_frustration_scaling():
    t0 = time.time()
    _, fits = scaling_study(0.05, [30, 40, 50, 60, 70, 80], 200,
                            master_seed=777)
    b = fits["power_law"]["b"]
    geo_means = []
    for idx, f in enumerate([0.05, 0.15, 0.23]):
        samples, censored = collect_point(
            30, 30, f, rho_peak_reference(30), 500, 555, idx)
        geo_means.append(lognormal_stats(samples, censored).geo_mean)
    elapsed = time.time() - t0
    monotone = geo_means[0] < geo_means[1] < geo_means[2]
    ok = 1.5 <= b <= 2.5 and monotone and elapsed <= 7200
    report(6, ok, f"power-law exponent {b:.3f}, geo means "
                  f"{[round(g, 1) for g in geo_means]}, {elapsed:.1f}s")


def test_07_structured_harder_at_high_density():
    t0 = time.time()
    n_sweep = default_nsweep(40, 0.23)
    # cap restarts so censored structured samples still order the medians
    kw = dict(n=40, m=40, f=0.23, rho=40.0, k=300, master_seed=99,
              n_sweep=n_sweep, max_runs=100)
    rnd, _ = collect_point(point_idx=0, mode="random", **kw)
    struct, _ = collect_point(point_idx=1, mode="structured", d=0.2, **kw)
    med_r = float(np.median(rnd))
    med_s = float(np.median(struct))
    elapsed = time.time() - t0
    ok = med_s > med_r and elapsed <= 7200
    report(7, ok, f"median TTS structured {med_s:.0f} > random {med_r:.0f}, "
                  f"{elapsed:.1f}s")


def test_08_gap_variance():
    n = m = 20
    rng = np.random.default_rng(8)
    gaps = np.empty(10**5)
    for t in range(gaps.size):
        inst = RbmInstance(W=rng.normal(0.0, 1.0, size=(n, m)))
        s = SpinState.random(n, m, rng)
        # flipping 5 of 20 visible rows puts the pair at distance 0.25
        s2 = s.flip(visible=rng.choice(n, size=5, replace=False))
        gaps[t] = energy_gap(inst, s, s2)
    var = gaps.var(ddof=1)
    ok = abs(var - 400.0) / 400.0 <= 0.05
    report(8, ok, f"empirical gap variance {var:.1f} vs 400")


def test_09_two_row_frustration_bound():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(10**4):
        m = int(rng.integers(2, 7))
        inst = RbmInstance(W=rng.normal(size=(2, m)))
        ground, _ = brute_force_ground_state(inst)
        worst = max(worst, frustration_index(gauge_fix(inst, ground)))
    ok = worst <= 0.25 + 1e-12
    report(9, ok, f"max gauged frustration over 10^4 2xm matrices {worst:.6f}")


def test_10_intersection_series_vs_monte_carlo():
    worst = 0.0
    nm = (20, 20)
    for lam, N in [(0.5, 50), (1.0, 100), (4.0, 400), (10.0, 1000)]:
        pred = expected_intersections(*nm, N)
        ref = mc_min_poisson(lam, 10**6, seed=int(lam * 100))
        worst = max(worst, abs(pred - ref) / ref)
    tail = expected_intersections(20, 20, 4000)  # lam = 40
    ok = worst <= 0.02 and tail < 10.0
    report(10, ok, f"max MC deviation {worst:.4f}, value at lam=40 "
                   f"{tail:.4f} < 10")


def test_11_solver_correctness():
    rng = np.random.default_rng(11)
    worst = 0.0
    flips = 0
    trial = 0
    while flips < 10_000:
        inst = RbmInstance(W=rng.normal(size=(10, 10)),
                           a=rng.normal(size=10), b=rng.normal(size=10))
        sched = AnnealSchedule(n_sweep=100, seed=0, beta_min=0.05,
                               beta_max=2.0)
        st, theta, phi, e, rest = final_fields(inst, sched, run_seed=trial)
        th2, ph2 = local_fields(inst, st)
        worst = max(worst, float(np.abs(theta - th2).max()),
                    float(np.abs(phi - ph2).max()),
                    abs(e - energy(inst, st)))
        flips += rest[3]
        trial += 1
    found = 0
    sched = AnnealSchedule(n_sweep=100, max_runs=1, seed=31)
    for i in range(100):
        p = GenParams(n=30, m=30, f=0.001, rho=0.2, seed=1000 + i)
        inst = random_loop_instance(p)
        found += solve_with_restarts(inst, inst.ground_energy, sched).found
    ok = worst <= 1e-9 and found >= 99
    report(11, ok, f"field drift {worst:.2e} over {flips} flips, "
                   f"first-run solves {found}/100")


def test_12_estimator_identities():
    rng = np.random.default_rng(12)
    x = rng.lognormal(mean=3.0, sigma=0.5, size=10**5)
    st = lognormal_stats(x)
    recovered = (abs(st.mu_hat - 3.0) < 0.01
                 and abs(st.sigma_hat - 0.5) < 0.01)
    worst = 0.0
    for _ in range(100):
        samples = np.maximum(
            rng.lognormal(rng.uniform(2, 5), rng.uniform(0.1, 1), 40), 1.0)
        s = lognormal_stats(samples)
        worst = max(worst, abs(s.p95 * s.p5 - s.geo_mean**2)
                    / s.geo_mean**2)
    ok = recovered and worst <= 1e-9
    report(12, ok, f"mu/sigma recovered {recovered}, "
                   f"max |p95*p5 - gm^2|/gm^2 = {worst:.2e}")
