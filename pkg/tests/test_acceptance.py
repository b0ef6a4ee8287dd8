"""Acceptance gates, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured figure,
shown even without ``-s``.  Run alone with::

    pytest tests/test_acceptance.py -v
"""

import csv
import io
import math

import pytest

from corrwiretap.channel import ChannelParams
from corrwiretap.cli import main
from corrwiretap.closedform import SeriesControl, average_secrecy_capacity, outage_probability
from corrwiretap.montecarlo import (
    chi_square_gof,
    estimate_capacity,
    estimate_outage,
    power_correlation,
    sample_pairs,
    substreams,
)
from corrwiretap.oracle import capacity_by_quadrature, outage_by_quadrature

LAMBDAS = [1.0, 3.162, 10.0, 31.62, 100.0, 316.2]
RHOS = [0.0, 0.2, 0.4, 0.6, 0.8, 0.9]
RATES = [0.1, 0.5, 1.0, 2.0]
GRID = [ChannelParams(lam, lam, rho) for lam in LAMBDAS for rho in RHOS]


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, f"{name}: {detail}"

    return emit


def test_capacity_matches_quadrature(report):
    worst = max(
        abs(average_secrecy_capacity(p).value - (q := capacity_by_quadrature(p).value)) / q for p in GRID
    )
    report("capacity vs quadrature, 36 points", worst <= 1e-6, f"max rel err {worst:.2e} (gate 1e-6)")


def test_outage_matches_quadrature(report):
    worst = max(
        abs(outage_probability(p, r).value - outage_by_quadrature(p, r).value) for p in GRID for r in RATES
    )
    report("outage vs quadrature, 144 points", worst <= 1e-6, f"max abs err {worst:.2e} (gate 1e-6)")


def test_monte_carlo_consistency(report):
    sub = [ChannelParams(lam, lam, rho) for lam in (1.0, 10.0, 100.0) for rho in (0.0, 0.4, 0.8, 0.9)]
    cap_out, pout_out = 0, 0
    zs = []
    for i, p in enumerate(sub):
        est = estimate_capacity(p, 1_000_000, seed=1000 + i)
        z = (est.mean - average_secrecy_capacity(p).value) / est.std_error
        cap_out += abs(z) > 3
        est = estimate_outage(p, 1.0, 1_000_000, seed=2000 + i)
        zo = (est.mean - outage_probability(p, 1.0).value) / est.std_error
        pout_out += abs(zo) > 3
        zs += [z, zo]
    ok = cap_out <= 1 and pout_out <= 1
    report(
        "Monte Carlo within 3 sigma, 12 points",
        ok,
        f"capacity excursions {cap_out}/12, outage excursions {pout_out}/12, max |z| {max(map(abs, zs)):.2f}",
    )


def test_zero_rate_independent_pin(report):
    pairs = [(1, 1), (2, 1), (1, 3), (10, 0.5), (0.2, 7)]
    worst = max(abs(outage_probability(ChannelParams(a, b, 0.0), 0.0).value - b / (a + b)) for a, b in pairs)
    report("P_out(R=0, rho=0) = l2/(l1+l2)", worst <= 1e-12, f"max abs err {worst:.2e} (gate 1e-12)")


def test_independence_reduction(report):
    worst, terms = 0.0, set()
    for lam in LAMBDAS:
        p = ChannelParams(lam, lam / 2, 0.0)
        res = average_secrecy_capacity(p)
        terms.add(res.terms_used)
        worst = max(worst, abs(res.value - capacity_by_quadrature(p).value) / res.value)
        res = outage_probability(p, 1.0)
        terms.add(res.terms_used)
        worst = max(worst, abs(res.value - outage_by_quadrature(p, 1.0).value))
    ok = terms == {1} and worst <= 1e-8
    report("rho = 0 single term", ok, f"terms used {sorted(terms)}, max err {worst:.2e} (gate 1e-8)")


def test_sweep_shape(report, tmp_path):
    path = tmp_path / "sweep.csv"
    code = main(["sweep", "--snr-db-start", "0", "--snr-db-stop", "30", "--snr-db-step", "5",
                 "--rho", "0", "0.3", "0.6", "0.9", "--out", str(path)], stdout=io.StringIO(), stderr=io.StringIO())
    table = [(float(r["snr_db"]), float(r["rho"]), float(r["cs_nats"])) for r in csv.DictReader(path.open())]
    by_snr, by_rho = {}, {}
    for s, r, c in table:
        by_snr.setdefault(s, []).append(c)
        by_rho.setdefault(r, []).append(c)
    dec_rho = all(all(b < a for a, b in zip(v, v[1:])) for v in by_snr.values())
    inc_snr = all(all(b >= a for a, b in zip(v, v[1:])) for v in by_rho.values())
    ok = code == 0 and len(table) == 28 and dec_rho and inc_snr
    report("sweep decreasing in rho, increasing in SNR", ok,
           f"rows {len(table)}, decreasing in rho {dec_rho}, increasing in SNR {inc_snr}")


def test_truncation_robustness(report):
    loose, tight = SeriesControl(rel_tol=1e-10), SeriesControl(rel_tol=1e-13)
    worst = 0.0
    for p in GRID:
        a = average_secrecy_capacity(p, loose).value
        b = average_secrecy_capacity(p, tight).value
        worst = max(worst, abs(a - b) / b)
        for r in RATES:
            a = outage_probability(p, r, loose).value
            b = outage_probability(p, r, tight).value
            worst = max(worst, abs(a - b) / b)
    report("rel_tol 1e-10 vs 1e-13", worst < 1e-9, f"max rel change {worst:.2e} (gate 1e-9)")


@pytest.mark.parametrize("rho", [0.0, 0.5, 0.9])
def test_sampler_law(report, rho):
    p = ChannelParams(2.0, 1.0, rho)
    a, b = sample_pairs(p, 1_000_000, substreams(7)[0])
    gof = chi_square_gof(p, a, b)
    corr = power_correlation(a, b)
    ok = gof.p_value > 0.001 and abs(corr - rho) <= 0.01
    report(f"sampler law rho={rho}", ok,
           f"chi2 p-value {gof.p_value:.3f} (gate 0.001), correlation {corr:.4f}")


def test_compare_deterministic(report, tmp_path):
    argv = ["compare", "--snr-db-stop", "10", "--rho", "0", "0.5", "0.9",
            "--mc-samples", "20000", "--seed", "20240601", "--workers", "2"]
    blobs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        code = main(argv + ["--out", str(path)], stdout=io.StringIO(), stderr=io.StringIO())
        assert code == 0
        blobs.append(path.read_bytes())
    same = blobs[0] == blobs[1]
    report("compare byte-identical", same, f"{len(blobs[0])} bytes, identical {same}")
