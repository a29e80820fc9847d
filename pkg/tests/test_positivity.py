"""Exact positivity statistics and the Monte Carlo harness."""

from fractions import Fraction as F

import pytest

from matchdiff.graphs import BipGraph, gen_regular_bipartite
from matchdiff.positivity import (alpha0_exact, delta_sign, delta_table,
                                  ensemble_grid, ensemble_run, graph_positive,
                                  rho_vector, trend_report)
C4 = BipGraph(2, 2, [[0, 1], [0, 1]])
K33 = BipGraph(3, 3, [[0, 1, 2]] * 3)


def test_rho_fixtures():
    assert rho_vector(C4) == [F(1), F(1), F(3, 2)]
    assert rho_vector(K33) == [F(1), F(1), F(10, 9), F(50, 27)]


def test_rho_first_two_always_one():
    for seed in range(25):
        n = 6 + seed % 7
        r = 3 + seed % 2
        rho = rho_vector(gen_regular_bipartite(n, r, seed=seed))
        assert rho[0] == 1 and rho[1] == 1
        assert all(q > 0 for q in rho)


def test_delta_table_c4():
    prof = delta_table(C4)
    assert prof.positive()
    assert prof.signs[(0, 0)] == 0 and prof.signs[(1, 0)] == 0
    assert prof.signs[(2, 0)] > 0  # d(2) = ln(3/2) > 0
    assert set(prof.signs) == {(i, k) for k in range(3)
                               for i in range(3 - k)}


def test_delta_table_k33():
    prof = delta_table(K33)
    # d = (0, 0, ln(10/9), ln(50/27)); all meaningful differences known
    assert prof.signs[(2, 0)] > 0
    assert prof.signs[(1, 1)] > 0   # d(2) - d(1) > 0
    assert prof.signs[(0, 2)] > 0   # d(2) - 2 d(1) + d(0) > 0
    # Delta^2 d(1) = d(3) - 2 d(2) + d(1): 50/27 vs (10/9)^2 = 100/81
    assert prof.signs[(1, 2)] == (F(50, 27) > F(100, 81)) - \
        (F(50, 27) < F(100, 81))
    assert graph_positive(K33) == prof.positive()


def test_d_values_certified_intervals():
    from mpmath import mp

    prof = delta_table(K33)
    ds = prof.d_values()
    assert ds[0].a <= 0 <= ds[0].b
    mp.prec = 300
    ref = mp.log(mp.mpf(10) / 9)
    assert ds[2].a <= ref <= ds[2].b
    assert float(ds[2].delta) < 2 ** -64


def test_alpha0_exact_fixtures():
    assert alpha0_exact(C4, 1, 0) == 0  # rho_1 - 1
    assert alpha0_exact(K33, 1, 1) == F(1, 9)
    with pytest.raises(ValueError):
        alpha0_exact(K33, 2, 2)


def test_alpha0_sign_equals_delta_sign():
    for seed in range(15):
        g = gen_regular_bipartite(8, 3, seed=seed)
        rho = rho_vector(g)
        for k in range(4):
            for i in range(8 - k + 1):
                a0 = alpha0_exact(rho, i, k)
                s = delta_sign(rho, i, k)
                assert (a0 > 0) - (a0 < 0) == s


def test_exact_signs_agree_with_interval_logs():
    """Interval-log evaluation of Delta^k d(i) (256-bit) must agree with
    the exact integer cross-multiplication decision on 1000+ random
    (g, i, k) whenever the interval is decisive."""
    checked = 0
    for seed in range(25):
        g = gen_regular_bipartite(7 + seed % 3, 3, seed=seed)
        prof = delta_table(g)
        for (i, k), sign in prof.signs.items():
            val = prof.delta_value(i, k, prec_bits=256)
            if val.a > 0:
                assert sign > 0, (seed, i, k)
            elif val.b < 0:
                assert sign < 0, (seed, i, k)
            # interval straddling zero cannot certify; the exact path decides
            checked += 1
    assert checked >= 1000


def test_d0_d1_zero_on_random_graphs():
    for seed in range(30):
        r = 3 if seed % 2 == 0 else 4
        n = 6 + seed % 5
        rho = rho_vector(gen_regular_bipartite(n, r, seed=seed))
        assert rho[0] == 1 and rho[1] == 1


def test_alpha0_constant_for_low_index():
    """m_1..m_3 depend only on (n, r), so alpha_0 with i + k <= 3 is the
    same for every simple graph at fixed (n, r)."""
    vals = set()
    for seed in range(10):
        g = gen_regular_bipartite(9, 3, seed=seed)
        rho = rho_vector(g)
        vals.add((alpha0_exact(rho, 1, 1), alpha0_exact(rho, 0, 2),
                  alpha0_exact(rho, 1, 2), alpha0_exact(rho, 3, 0)))
    assert len(vals) == 1


def test_ensemble_reproducible_and_exact():
    a = ensemble_run(3, 8, 60, i=2, k=1, seed=77)
    b = ensemble_run(3, 8, 60, i=2, k=1, seed=77)
    assert a == b
    # exact moments equal brute-force recomputation from per-sample values
    from matchdiff.positivity import _sample_graph

    vals = []
    for idx in range(60):
        rho = rho_vector(_sample_graph(3, 8, 77, idx))
        vals.append(alpha0_exact(rho, 2, 1))
    mean = sum(vals, F(0)) / 60
    beta = sum((v * v for v in vals), F(0)) / 60 - mean * mean
    assert a.alpha_hat == mean and a.beta_hat == beta
    assert a.p_violation == F(sum(v < 0 for v in vals), 60)


def test_ensemble_single_sample():
    st = ensemble_run(3, 8, 1, i=1, k=1, seed=3)
    assert st.beta_hat == 0
    assert st.p_violation in (F(0), F(1))


def test_ensemble_parallel_agrees_with_serial():
    a = ensemble_grid(3, 7, 40, [(1, 1), (2, 2)], seed=5, jobs=1)
    b = ensemble_grid(3, 7, 40, [(1, 1), (2, 2)], seed=5, jobs=2)
    assert a == b


def test_trend_report_structure():
    rep = trend_report(3, [6, 8], 40, [(1, 1), (0, 0)], seed=9)
    assert [row.n for row in rep.rows] == [6, 8]
    csv = rep.csv("cfg")
    assert csv.startswith("# cfg\n")
    assert "p_graph_positive" in csv.splitlines()[2]
    # k=0, i<=1 violation frequency identically 0 (d(0) = d(1) = 0)
    st = rep.rows[0].stats[(0, 0)]
    assert st.p_violation == 0
    assert rep.monotone_violation(0, 0)
