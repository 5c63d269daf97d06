"""Exit criteria for the package, one PASS/FAIL line per criterion.

Run with ``pytest -m acceptance -v``. Each test prints its verdict line
directly to the terminal and fails with a real assertion when unmet.
Runtimes are measured after a warm-up call so that one-time JIT
compilation is not counted.
"""

import json
import math
import time

import numpy as np
import pytest

from claimfreq.cli import main
from claimfreq.distributions import (
    BetaBinomialParams,
    BetaParams,
    beta_binomial_moments,
    beta_binomial_pmf,
    beta_moments,
    binomial_conditional_moments,
    sample_beta,
)
from claimfreq.estimation import ProportionSample, empirical_proportions, fit_beta_mom, mom_from_moments
from claimfreq.gof import FIXED_PARAMS, REESTIMATE, compute_tn, mc_test
from claimfreq.portfolio import fit_tariff, parse_portfolio_csv, tariff_seed
from claimfreq.rng import RngSeed
from claimfreq.specfun import beta_quantile, ln_gamma, reg_inc_beta

from oracles import mixture_pmf, tn_bruteforce, uniform_ks_pvalue

pytestmark = pytest.mark.acceptance

EXPECTED_ROWS = {
    "A": (["3.71", "4.10", "3.98", "4.02", "3.80"], "3.92", "0.16", 572, 14007),
    "B": (["3.48", "3.87", "2.75", "3.26", "2.49"], "3.17", "0.55", 32, 967),
    "C": (["3.84", "2.75", "3.96", "2.49", "2.07"], "3.02", "0.84", 13, 402),
    "D": (["3.16", "3.59", "3.49", "3.76", "3.53"], "3.51", "0.22", 249, 6838),
}
FIGURE_TN = [3.663, 4.748, 3.219, 2.924]
FIGURE_P = [0.7177, 0.9422, 0.4263, 0.6798]
SEED = 42


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail

    return emit


def _tariff_samples(histories):
    return [empirical_proportions(h.years) for h in histories]


def test_criterion_1_table_reproduction(table1_path, verdict):
    text = table1_path.read_text(encoding="utf-8")
    fit_tariff(parse_portfolio_csv(text)[0])
    start = time.perf_counter()
    rows = {}
    for h in parse_portfolio_csv(text):
        d = fit_tariff(h).display_row
        rows[h.tariff_id] = (d["proportions_pct"], d["mean_pct"], d["sd_pct"], d["alpha"], d["beta"])
    elapsed = time.perf_counter() - start
    mismatches = [f"{t}: got {rows.get(t)} want {want}" for t, want in EXPECTED_ROWS.items() if rows.get(t) != want]
    ok = not mismatches and elapsed < 1.0
    verdict(1, ok, f"{4 - len(mismatches)}/4 rows exact, {elapsed:.3f} s; " + "; ".join(mismatches))


def test_criterion_2_tn_reproduction(histories, verdict):
    samples = _tariff_samples(histories)
    params = [fit_beta_mom(s) for s in samples]
    compute_tn(samples[0], params[0])
    start = time.perf_counter()
    tns = [compute_tn(s, p).tn for s, p in zip(samples, params)]
    elapsed = time.perf_counter() - start
    oracle = [tn_bruteforce(s.proportions, p.alpha, p.beta) for s, p in zip(samples, params)]
    oracle_err = max(abs(a - b) for a, b in zip(tns, oracle))
    # figure annotations are unlabelled: find the closest assignment
    order = [min(range(4), key=lambda j, t=t: abs(t - FIGURE_TN[j])) for t in tns]
    figure_err = max(abs(t - FIGURE_TN[j]) for t, j in zip(tns, order))
    in_order = order == [0, 1, 2, 3]
    ok = oracle_err <= 1e-6 and figure_err <= 0.005 and sorted(order) == [0, 1, 2, 3] and elapsed < 1.0
    verdict(
        2,
        ok,
        f"T_n = {[round(t, 4) for t in tns]}, oracle diff {oracle_err:.1e}, figure diff {figure_err:.1e}, "
        f"assignment {'A-D in order' if in_order else order}, {elapsed:.3f} s",
    )


def test_criterion_3_monte_carlo_p_values(histories, verdict):
    samples = _tariff_samples(histories)
    n = 100_000
    mc_test(samples[0], 200, RngSeed(0))
    start = time.perf_counter()
    re = [mc_test(s, n, tariff_seed(SEED, i), mode=REESTIMATE).p_value for i, s in enumerate(samples)]
    elapsed = time.perf_counter() - start
    fx = [mc_test(s, n, tariff_seed(SEED, i), mode=FIXED_PARAMS).p_value for i, s in enumerate(samples)]
    dev = [abs(p - q) for p, q in zip(re, FIGURE_P)]
    bad = [t for t, d in zip("ABCD", dev) if d > 0.05]
    ok = not bad and elapsed < 30.0
    fmt = lambda ps: ", ".join(f"{100 * p:.2f}%" for p in ps)  # noqa: E731
    verdict(
        3,
        ok,
        f"re-estimate [{fmt(re)}] vs figures [{fmt(FIGURE_P)}], outside 5 pp: {bad or 'none'}; "
        f"fixed-params [{fmt(fx)}]; {elapsed:.1f} s",
    )


def test_criterion_4_distribution_suite(verdict):
    start = time.perf_counter()
    grid_a, grid_b = [0.5, 1.0, 2.2, 12.0, 572.0], [0.5, 1.0, 2.6, 55.0, 14007.0]
    norm_err = 0.0
    for m in (1, 5, 50, 500):
        ks = np.arange(m + 1)
        for a in grid_a:
            for b in grid_b:
                pmf = beta_binomial_pmf(ks, BetaBinomialParams(m, BetaParams(a, b)))
                norm_err = max(norm_err, abs(math.fsum(pmf) - 1.0))
    quad_err = 0.0
    for m in (1, 4, 10, 20):
        for a, b in [(0.5, 0.5), (1.2, 1.6), (2.2, 2.6), (12, 55), (12, 2.6)]:
            got = beta_binomial_pmf(np.arange(m + 1), BetaBinomialParams(m, BetaParams(a, b)))
            ref = np.array([mixture_pmf(k, m, a, b) for k in range(m + 1)])
            quad_err = max(quad_err, float(np.max(np.abs(got - ref))))
    mom_err = 0.0
    for m in (1, 3, 17, 60, 200):
        ks = np.arange(m + 1, dtype=float)
        for a in grid_a:
            for b in grid_b:
                p = BetaBinomialParams(m, BetaParams(a, b))
                pmf = beta_binomial_pmf(ks, p)
                mean, var = beta_binomial_moments(p)
                s_mean = math.fsum(ks * pmf)
                s_var = math.fsum((ks - s_mean) ** 2 * pmf)
                mom_err = max(mom_err, abs(s_mean / mean - 1), abs(s_var / var - 1))
    form_err = 0.0
    for m in (1, 5, 100, 8805, 10**6):
        for a in grid_a:
            for b in grid_b:
                _, var = beta_binomial_moments(BetaBinomialParams(m, BetaParams(a, b)))
                _, vxi = beta_moments(BetaParams(a, b))
                alt = m * m * vxi * (1 + (a + b) / m)
                form_err = max(form_err, abs(var - alt) / alt)
    ms = np.unique(np.geomspace(1, 10**6, 101).astype(int))
    ps = np.linspace(0.0, 1.0, 10_000 // len(ms) + 1)
    checked = violations = 0
    for m in ms:
        for p in ps:
            _, var, bound = binomial_conditional_moments(int(m), float(p))
            violations += var / m**2 > bound
            checked += 1
    elapsed = time.perf_counter() - start
    ok = (
        norm_err <= 1e-12 and quad_err <= 1e-8 and mom_err <= 1e-9 and form_err <= 1e-12
        and checked >= 10_000 and violations == 0 and elapsed < 10.0
    )
    verdict(
        4,
        ok,
        f"normalisation {norm_err:.1e}, quadrature {quad_err:.1e}, moments {mom_err:.1e}, "
        f"two forms {form_err:.1e}, bound violations {violations}/{checked}, {elapsed:.1f} s",
    )


def test_criterion_5_special_functions(verdict):
    shapes = [0.5, 1.0, 2.2, 12.0, 55.0, 572.0, 14007.0]
    levels = [0.01, 0.1, 0.5, 0.9, 0.99, 1 / 6, 5 / 6]
    beta_quantile(0.5, 2.0, 3.0)
    start = time.perf_counter()
    trip = 0.0
    for a in shapes:
        for b in shapes:
            for u in levels:
                trip = max(trip, abs(reg_inc_beta(beta_quantile(u, a, b), a, b) - u))
    xs = np.geomspace(0.1, 1e4, 2001)
    upper = ln_gamma(xs + 1)
    err = np.abs(upper - ln_gamma(xs) - np.log(xs))
    elapsed = time.perf_counter() - start
    over = int(np.sum(err > 1e-12))
    scaled = float(np.max(err / (np.finfo(float).eps * np.maximum(1.0, np.abs(upper)))))
    small = float(err[xs < 400].max())
    ok = trip <= 1e-10 and over == 0 and elapsed < 5.0
    verdict(
        5,
        ok,
        f"round trip {trip:.1e}; ln_gamma recurrence max {err.max():.1e} absolute "
        f"({over}/{len(xs)} points above 1e-12, max {small:.1e} for x < 400, "
        f"worst {scaled:.1f} eps relative to max(1, |ln_gamma(x+1)|)); {elapsed:.2f} s",
    )


def test_criterion_6_estimator_round_trip(verdict):
    grid = np.geomspace(0.5, 2e4, 40)
    start = time.perf_counter()
    worst = 0.0
    for a in grid:
        for b in grid:
            p = mom_from_moments(*beta_moments(BetaParams(a, b)))
            worst = max(worst, abs(p.alpha / a - 1), abs(p.beta / b - 1))
    elapsed = time.perf_counter() - start
    verdict(6, worst <= 1e-9 and elapsed < 1.0, f"worst relative error {worst:.1e} on 40x40 grid, {elapsed:.3f} s")


def test_criterion_7_calibration(verdict):
    law = BetaParams(12, 55)
    mc_test(ProportionSample(tuple(sample_beta(law, RngSeed(1), 5))), 200, RngSeed(1))
    start = time.perf_counter()
    pvals = []
    for i in range(500):
        x = sample_beta(law, RngSeed(2024, i), 5)
        pvals.append(mc_test(ProportionSample(tuple(x)), 500, RngSeed(777, i)).p_value)
    elapsed = time.perf_counter() - start
    ks_p = uniform_ks_pvalue(pvals)
    verdict(7, ks_p > 0.01 and elapsed < 60.0, f"KS p-value {ks_p:.3f} over 500 meta-samples, {elapsed:.1f} s")


def test_criterion_8_determinism(table1_path, tmp_path, capsys, verdict):
    runs = [[], [], ["--workers", "4"], ["--workers", "3", "--mode", "fixed-params"]]
    start = time.perf_counter()
    blobs = []
    for i, extra in enumerate(runs):
        out = tmp_path / f"r{i}.json"
        code = main(["gof", "-i", str(table1_path), "--seed", str(SEED), "-o", str(out)] + extra)
        capsys.readouterr()
        assert code == 0
        blobs.append(out.read_bytes())
    elapsed = time.perf_counter() - start
    doc = json.loads(blobs[0])
    same = blobs[0] == blobs[1] == blobs[2]
    # a different mode must change the bytes, so equality above is not vacuous
    differs = blobs[3] != blobs[0]
    verdict(
        8,
        same and differs and elapsed < 30.0,
        f"{doc['settings']['replicates']} replicates: runs identical {same} (workers 1, 1, 4), "
        f"mode change detected {differs}, {elapsed:.1f} s",
    )
