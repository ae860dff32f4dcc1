"""Acceptance gate: one test per criterion, each at its pinned tolerance and runtime."""
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from coneindex.cli import main, run_football
from coneindex.errors import CompletenessError, WeightOnSpectrumError
from coneindex.fredholm import MSIModel, cone_model, dual_weight, fredholm_index
from coneindex.geometry import (
    area_thresholds,
    density_bound,
    minimality_study,
    sphere_area,
    veronese_embed,
)
from coneindex.growth import (
    GrowthField,
    GrowthParams,
    Mode,
    OscParams,
    annular_mass,
    check_gap,
    estimate_asymptotic_rate,
    find_K0,
    osc_integral,
    radial_ode_solve,
    three_circle_residual,
    three_circle_terms,
)
from coneindex.indicial import cone_asymptotics, indicial_roots
from coneindex.spectra import (
    clifford_torus_spectrum,
    discrete_link_eigenvalues,
    flat_torus_operator,
    observed_order,
    richardson,
    user_spectrum,
)


@pytest.fixture
def criterion(record_property):
    def mark(k, detail=""):
        record_property("criterion", k)
        record_property("detail", detail)
    return mark


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def test_criterion_01_clifford_spectrum(criterion, capsys):
    criterion(1, "Clifford spectrum fixture, exact, < 1 s")
    with Timer() as t:
        spec = clifford_torus_spectrum(1)
        code = main(["spectrum", "--cutoff", "1"])
    out = capsys.readouterr().out
    assert code == 0
    assert spec.expanded() == [-4, -2, -2, -2, -2, 0, 0, 0, 0]
    assert all(type(v) is Fraction for v in spec.expanded())
    assert '"eigenvalues": [\n    [-4, 1],\n    [-2, 4],\n    [0, 4]\n  ]' in out
    assert t.elapsed < 1.0


def test_criterion_02_discrete_oracle(criterion):
    criterion(2, "Richardson 32/64 within 1e-3, order >= 1.8, < 30 s")
    catalog = np.array(clifford_torus_spectrum(1).expanded(), dtype=float)
    with Timer() as t:
        coarse = np.array(discrete_link_eigenvalues(flat_torus_operator(32), 9))
        fine = np.array(discrete_link_eigenvalues(flat_torus_operator(64), 9))
    extrapolated = richardson(coarse, fine)
    assert np.max(np.abs(extrapolated - catalog)) < 1e-3
    assert observed_order(coarse - catalog, fine - catalog) >= 1.8
    assert t.elapsed < 30.0


def test_criterion_03_indicial_fixture(criterion):
    criterion(3, "Clifford indicial roots to 1e-12, gamma_- = 0 exactly")
    spec = clifford_torus_spectrum(10)
    roots = {int(r.lam): r for r in indicial_roots(spec)}
    s7 = math.sqrt(7) / 2
    assert abs(roots[-4].gamma_plus - complex(-0.5, s7)) <= 1e-12
    assert abs(roots[-4].gamma_minus - complex(-0.5, -s7)) <= 1e-12
    assert (roots[-2].re_plus, roots[-2].re_minus, roots[-2].eigen_multiplicity) == (0, -1, 4)
    assert (roots[0].re_plus, roots[0].re_minus, roots[0].eigen_multiplicity) == (1, -2, 4)
    asym = cone_asymptotics(spec)
    assert asym.gamma_minus_of_cone == 0 and type(asym.gamma_minus_of_cone) is Fraction


def test_criterion_04_football(criterion):
    criterion(4, "football index -10 / -18, hat -2, I = 1, sequence and jumps, < 1 s")
    with Timer() as t:
        rep = run_football()
    assert rep["ok"]
    assert rep["index"] == -10 and rep["index_on_1_2"] == -18
    assert rep["hat_index"] == -2 and rep["per_cone_I"] == [1, 1]
    assert [x["index"] for x in rep["intervals"]] == [10, 2, -2, -10, -18]
    assert rep["jumps"] == [8, 4, 8, 8]
    assert t.elapsed < 1.0


def random_msi(rng):
    n = int(rng.integers(2, 8))
    N = int(rng.integers(n + 1, n + 5))
    cones = []
    for _ in range(int(rng.integers(1, 5))):
        # the eigenvalue -(n-1) with multiplicity >= N carries the translation root 0
        entries = [(-(n - 1), int(rng.integers(N, N + 4)))]
        for _ in range(int(rng.integers(0, 8))):
            if rng.random() < 0.5:
                value = int(rng.integers(-3 * n, 40))
            else:
                value = float(rng.uniform(-3 * n, 40))
            entries.append((value, int(rng.integers(1, 7))))
        cones.append(cone_model(user_spectrum(entries, n, N, cutoff=60)))
    return MSIModel(N=N, n=n, cones=tuple(cones))


def test_criterion_05_duality(criterion):
    criterion(5, "duality on 1e3 random MSI models, exact integers, < 10 s")
    rng = np.random.default_rng(20240605)
    checked = 0
    with Timer() as t:
        while checked < 1000:
            msi = random_msi(rng)
            lo = max(float(c.indicial.gamma_minus_of_cone) for c in msi.cones)
            tau = float(rng.uniform(lo, 1.0))
            try:
                a = fredholm_index(msi, tau).index
                b = fredholm_index(msi, dual_weight(tau, msi.n)).index
            except (WeightOnSpectrumError, CompletenessError):
                continue
            assert type(a) is int and type(b) is int
            assert a == -b
            checked += 1
    assert t.elapsed < 10.0


def random_field(rng):
    n = int(rng.integers(3, 6))
    centre = (n - 2) / 2
    modes = []
    for _ in range(int(rng.integers(1, 4))):
        u = rng.random()
        if u < 0.1:
            mu = -centre * centre  # repeated root
        elif u < 0.4:
            mu = float(rng.uniform(-centre * centre - 8, -centre * centre))
        else:
            mu = float(rng.uniform(-centre * centre, 25))
        if mu < -centre * centre:
            c = complex(*rng.standard_normal(2))
            modes.append(Mode(mu, c, c.conjugate()))
        else:
            modes.append(Mode(mu, *rng.standard_normal(2)))
    return GrowthField(n, modes), centre


def quad_osc(p):
    g = lambda t: math.cos(p.alpha * t + p.theta) ** 2 * math.exp(2 * p.beta * t)
    val, _ = integrate.quad(g, math.log(p.r), math.log(p.K * p.r), limit=500,
                            epsabs=0, epsrel=1e-12)
    return val


def test_criterion_06_three_circle(criterion):
    criterion(6, "three-circle residual >= 0 on 1e4 fields, quadrature 1e-8, identity 1e-12, < 60 s")
    rng = np.random.default_rng(7)
    sigmas = (0.1, 0.3, 0.5, 0.9)
    with Timer() as t:
        K0 = {s: find_K0(s) for s in sigmas}
        accepted = 0
        worst = math.inf
        while accepted < 10_000:
            field, centre = random_field(rng)
            sigma = sigmas[int(rng.integers(len(sigmas)))]
            params = GrowthParams(float(rng.uniform(-centre - 3, 3)), K0[sigma], sigma)
            try:
                check_gap(field, params)
                a, b, c = three_circle_terms(field, params)
                res = three_circle_residual(field, params)
            except (ValueError, OverflowError):
                continue
            scale = a + 2 * b + c
            assert scale > 0
            assert res > 1e-12 * scale
            worst = min(worst, res / scale)
            accepted += 1
        zero = GrowthField(3, [Mode(2.0, 0.0, 0.0), Mode(-1.0, 0j, 0j)])
        assert three_circle_residual(zero, GrowthParams(0.25, K0[0.5], 0.5)) == 0.0

        for _ in range(10_000):
            p = OscParams(float(10 ** rng.uniform(-2, 1.5)),
                          float(rng.choice([-1, 1]) * rng.uniform(0.05, 3)),
                          float(rng.uniform(0, 2 * math.pi)), float(rng.uniform(2.1, 50)),
                          float(rng.uniform(0.2, 5)))
            assert osc_integral(p) == pytest.approx(quad_osc(p), rel=1e-8)
            q = OscParams(p.alpha, p.beta, p.theta + math.pi / 2, p.K, p.r)
            plain = p.r ** (2 * p.beta) * math.expm1(2 * p.beta * math.log(p.K)) / (2 * p.beta)
            assert abs(osc_integral(p) + osc_integral(q) - plain) <= 1e-12 * abs(plain)
    assert worst > 0
    assert t.elapsed < 60.0


def test_criterion_07_k0(criterion):
    criterion(7, "find_K0 > 2 and non-increasing over sigma, < 120 s")
    find_K0.cache_clear()
    with Timer() as t:
        ks = [find_K0(s) for s in (0.1, 0.3, 0.5, 0.9)]
    assert all(k > 2 for k in ks)
    assert all(a >= b for a, b in zip(ks, ks[1:]))
    assert t.elapsed < 120.0


@pytest.mark.parametrize("mu,n", [(2.0, 3), (0.0, 3), (6.0, 4), (15.0, 6)])
def test_criterion_08_ode_and_rate(criterion, mu, n):
    criterion(8, "radial ODE vs r^gamma to 1e-8 on [0.01, 1], rate within 0.01")
    half = (n - 2) / 2
    root = math.sqrt(half * half + mu)
    for g, start in ((-half + root, 0.01), (-half - root, 1.0)):
        tr = radial_ode_solve(mu, n, (0.01, 1.0), (start**g, g * start ** (g - 1)), start=start)
        assert tr.r[0] == 0.01 and tr.r[-1] == 1.0
        assert np.max(np.abs(tr.f - tr.r**g) / tr.r**g) < 1e-8
        field = GrowthField(n, [Mode(mu, 1.0, 0.0) if g > -half else Mode(mu, 0.0, 1.0)])
        samples = [(s, annular_mass(field, s)) for s in 2.0 ** -np.arange(1, 25)]
        assert abs(estimate_asymptotic_rate(samples, n) - g) < 0.01
        unweighted = [(s, m * s**n) for s, m in samples]
        assert abs(estimate_asymptotic_rate(unweighted, n, density_weighted=False) - g) < 0.01


def test_criterion_09_geometry(criterion, capsys):
    criterion(9, "density pi/2, pi^3/A3, 4 pi^2 = 2 A3, pi^3 print flag, < 1 s")
    with Timer() as t:
        A3 = sphere_area(3)
        assert abs(density_bound(2 * math.pi**2, 3) - math.pi / 2) <= 1e-12
        assert abs(math.pi**3 / A3 - math.pi / 2) <= 1e-12
        assert abs(4 * math.pi**2 - 2 * A3) <= 1e-12 * 4 * math.pi**2
        th = area_thresholds()
        assert th.football_print_mismatch
        assert round(th.football_area, 5) == 31.00628
        code = main(["thresholds"])
    assert code == 0 and '"football_print_mismatch": true' in capsys.readouterr().out
    assert t.elapsed < 1.0


def test_criterion_10_veronese(criterion):
    criterion(10, "Veronese on sphere (1e5 samples), R residual < 1e-3 at order >= 1.8, antipodal")
    rng = np.random.default_rng(314)
    with Timer() as t:
        for f, m in (("R", 1), ("C", 2), ("H", 4)):
            u, v, w = (rng.standard_normal((100_000, m)) for _ in range(3))
            F = veronese_embed(f, u, v, w)
            assert np.max(np.abs(np.linalg.norm(F, axis=1) - 1)) <= 1e-12
        study = minimality_study("R", 64)
        assert study.residual < 1e-3 and study.order >= 1.8
        u, v, w = (rng.standard_normal((100_000, 1)) for _ in range(3))
        assert np.array_equal(veronese_embed("R", u, v, w), veronese_embed("R", -u, -v, -w))
    assert t.elapsed < 60.0
