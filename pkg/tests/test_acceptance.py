"""The twelve acceptance criteria, each at its stated tolerance and time budget.

Every test prints one ``PASS``/``FAIL`` line; the lines are also collected
into a summary section at the end of the pytest run. Run just this module
with ``pytest tests/test_acceptance.py -v``.
"""

import math
import time

import numpy as np
import pytest

from impulsive_rd import (
    BevertonHolt,
    HyperRect,
    LinearMap,
    LinearReaction,
    Logistic,
    Ricker,
    application_preset,
    bessel_first_zero,
    classify_domain,
    critical_hypercube_L,
    extreme_volume,
    lambda1_closed,
    lambda1_numeric,
    liyau_bound,
    rasterize,
    rfk_bound,
    solve_equilibrium,
)
from impulsive_rd.simulation import SeasonPropagator, default_initial_state

from conftest import fk_corpus

E = math.e
RESULTS = []


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def verdict(number, title, ok, detail):
    line = f"AC{number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_ac01_unit_square_eigenvalue():
    with Timer() as t:
        closed = lambda1_closed(1, [0, 0], HyperRect((1, 1))).lambda1
        numeric = lambda1_numeric(rasterize(HyperRect((1, 1)), 1 / 128), 1).lambda1
    rel = abs(numeric - 2 * math.pi**2) / (2 * math.pi**2)
    ok = closed == pytest.approx(2 * math.pi**2, rel=1e-15) and rel < 0.01 and t.elapsed < 15
    verdict(1, "unit-square eigenvalue", ok,
            f"closed {closed:.6f}, numeric {numeric:.6f} (rel err {rel:.2e}), {t.elapsed:.1f}s")


def test_ac02_bessel_zeros():
    with Timer() as t:
        j0 = bessel_first_zero(0)
        jhalf = bessel_first_zero(0.5)
    ok = abs(j0 - 2.404826) <= 1e-6 and abs(jhalf - math.pi) <= 1e-9 and t.elapsed < 1
    verdict(2, "Bessel zeros", ok,
            f"j(0,1) = {j0:.10f} (not 2.408), j(1/2,1) - pi = {jhalf - math.pi:.1e}, {t.elapsed:.2f}s")


def test_ac03_disk_eigenvalue():
    h = 1 / 128
    with Timer() as t:
        disk = fk_corpus(h)[3][1]
        lam = lambda1_numeric(rasterize(disk), 1).lambda1
    target = bessel_first_zero(0) ** 2
    rel = abs(lam - target) / target
    verdict(3, "unit-disk eigenvalue", rel < 0.02 and t.elapsed < 30,
            f"numeric {lam:.5f} vs {target:.5f} (rel err {rel:.2%}), {t.elapsed:.1f}s")


def test_ac04_faber_krahn_ordering():
    ratios = {}
    with Timer() as t:
        for name, dom, h in fk_corpus(1 / 128):
            ratios[name] = lambda1_numeric(rasterize(dom, h), 1).lambda1 / rfk_bound(1, dom).lambda1
    above = all(r >= 0.98 for r in ratios.values())
    near_equality = {n for n, r in ratios.items() if abs(r - 1) <= 0.02}
    ok = above and near_equality == {"disk"} and t.elapsed < 120
    detail = ", ".join(f"{n} {r:.4f}" for n, r in ratios.items())
    verdict(4, "Faber-Krahn ordering", ok, f"lambda1/RFK: {detail}; {t.elapsed:.1f}s")


def test_ac05_bound_ordering():
    corpus = fk_corpus(1 / 64)
    below = all(liyau_bound(1, 1, dom).lambda1 < rfk_bound(1, dom).lambda1 for _, dom, _ in corpus)
    square = corpus[0][1]
    ratio = liyau_bound(1, 1, square).lambda1 / rfk_bound(1, square).lambda1
    target = 2 / bessel_first_zero(0) ** 2
    ok = below and abs(ratio - target) <= 1e-6
    verdict(5, "Li-Yau below Faber-Krahn", ok, f"all shapes ordered: {below}, n=2 ratio {ratio:.8f} vs 2/j^2 = {target:.8f}")


def test_ac06_linearized_growth_factor():
    L, d, f, g = 2.0, 0.1, LinearReaction(0.2), LinearMap(2)
    with Timer() as t:
        grid = rasterize(HyperRect((L,)), L / 256)
        state, _ = default_initial_state(grid, d, None)
        prop = SeasonPropagator(grid, d, None, f)
        u = state.interior_values
        sups = [u.max()]
        for _ in range(5):
            u = prop.cycle(u, g)
            sups.append(u.max())
    lam = lambda1_closed(d, None, HyperRect((L,))).lambda1
    rho = 2 * math.exp(0.2 - lam)
    measured = sups[5] / sups[4]
    rel = abs(measured - rho) / rho
    verdict(6, "linearized growth factor", rel < 0.01 and t.elapsed < 10,
            f"cycle-5 ratio {measured:.6f} vs {rho:.6f} (rel {rel:.1e}), {t.elapsed:.1f}s")


def test_ac07_fisher_bracketing():
    d, f, g = 0.01, Logistic(1), LinearMap(1)
    L_star = critical_hypercube_L(d, None, f, g, 1).value
    with Timer() as t:
        out = {}
        for factor in (0.9, 1.1):
            L = factor * L_star
            out[factor], _ = classify_domain(HyperRect((L,)), g, d, None, f, h=L / 256)
    ok = (abs(L_star - 0.1 * math.pi) < 1e-14 and out[0.9].verdict == "Extinction"
          and out[1.1].verdict == "Persistence" and t.elapsed < 30)
    verdict(7, "1-D Fisher critical length", ok,
            f"L* = {L_star:.6f}; 0.9L* {out[0.9].verdict} ({out[0.9].cycles_run} cycles), "
            f"1.1L* {out[1.1].verdict} ({out[1.1].cycles_run} cycles), {t.elapsed:.1f}s")


@pytest.mark.slow
def test_ac08_marine_square_bracketing():
    d, f = 1.0, LinearReaction(-0.5)
    maps = {"Beverton-Holt": BevertonHolt(E - 1), "Ricker": Ricker(1)}
    L_star = application_preset("marine", gamma=0.5, lam=E - 1, d=d, n=2)["L_star"].value
    outcomes = {}
    with Timer() as t:
        for name, g in maps.items():
            for factor in (0.9, 1.1):
                L = factor * L_star
                c, _ = classify_domain(HyperRect((L, L)), g, d, None, f, h=L / 32)
                outcomes[name, factor] = c.verdict
    ok = (abs(L_star - 2 * math.pi) < 1e-12 and t.elapsed < 120
          and all(outcomes[n, 0.9] == "Extinction" and outcomes[n, 1.1] == "Persistence" for n in maps))
    detail = ", ".join(f"{n} {fac}L* {v}" for (n, fac), v in outcomes.items())
    verdict(8, "marine-reserve square", ok, f"L* = {L_star:.6f}; {detail}; {t.elapsed:.1f}s")


def test_ac09_equilibrium_closed_forms():
    errors = []
    with Timer() as t:
        for lam in (0.5, 1.0, 2.0, 3.0, 5.0):
            for frac in (0.1, 0.3, 0.5, 0.7, 0.9):
                gamma = frac * math.log1p(lam)
                expected = (math.exp(-gamma) * (1 + lam) - 1) / lam
                errors.append(abs(solve_equilibrium(LinearReaction(-gamma), BevertonHolt(lam)) - expected))
        for r in (0.5, 1.0, 1.5, 2.0, 2.5):
            for frac in (0.1, 0.3, 0.5, 0.7, 0.9):
                gamma = frac * r
                errors.append(abs(solve_equilibrium(LinearReaction(-gamma), Ricker(r)) - (r - gamma) / r))
        for r in (0.5, 1.0, 1.5, 2.0, 3.0):
            for frac in (0.1, 0.3, 0.5, 0.7, 0.9):
                s = frac * (1 - math.exp(-r))  # keeps (1 - s) e^r > 1
                q = 1 - s
                expected = (q * math.exp(r) - 1) / (q * (math.exp(r) - 1))
                errors.append(abs(solve_equilibrium(Logistic(r), LinearMap(q)) - expected))
    worst = max(errors)
    verdict(9, "equilibrium closed forms", worst <= 1e-8 and len(errors) == 75 and t.elapsed < 5,
            f"75 cases, worst abs error {worst:.1e}, {t.elapsed:.1f}s")


def test_ac10_rect_volume_identity():
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for _ in range(500):
        d, m, n = rng.uniform(0.01, 10), rng.uniform(0.01, 10), int(rng.integers(1, 4))
        f, g = LinearReaction(m), LinearMap(1.0)
        L = critical_hypercube_L(d, None, f, g, n).value
        V = extreme_volume("Rect", d, None, f, g, n).value
        worst = max(worst, abs(V - L**n) / V)
    verdict(10, "Rect extreme volume = L*^n", worst <= 1e-12, f"500 samples, worst rel error {worst:.1e}")


def test_ac11_advection_extinction():
    d, a, margin = 1.0, 1.1, 0.25
    f, g = LinearReaction(0.1), LinearMap(math.exp(margin - 0.1))
    L = 100 * math.sqrt(d / margin)
    with Timer() as t:
        c, _ = classify_domain(HyperRect((L,)), g, d, [a], f, h=L / 1024, max_cycles=500)
    ok = a * a > 4 * d * margin and c.verdict == "Extinction" and c.rho < 1 and t.elapsed < 60
    verdict(11, "advection-dominated extinction", ok,
            f"L = {L:g}, rho {c.rho:.4f}, {c.verdict} after {c.cycles_run} cycles, {t.elapsed:.1f}s")


@pytest.mark.slow
def test_ac12_climate_speed_bound():
    d, lam, gamma, side = 1.0, E - 1, 0.5, 10.0
    c_max = application_preset("climate", d=d, lam=lam, gamma=gamma, L1=side, L2=side)["c_max"].value
    f, g = LinearReaction(-gamma), BevertonHolt(lam)
    out = {}
    with Timer() as t:
        for factor in (0.9, 1.1):
            c, _ = classify_domain(HyperRect((side, side)), g, d, [-factor * c_max, 0.0], f,
                                   h=side / 32, max_cycles=400)
            out[factor] = c
    ok = (abs(c_max - 1.10019) < 1e-5 and out[0.9].verdict == "Persistence"
          and out[1.1].verdict == "Extinction" and t.elapsed < 120)
    verdict(12, "climate-change speed bound", ok,
            f"c_max = {c_max:.6f}; 0.9c {out[0.9].verdict} ({out[0.9].cycles_run} cycles), "
            f"1.1c {out[1.1].verdict} ({out[1.1].cycles_run} cycles), {t.elapsed:.1f}s")
