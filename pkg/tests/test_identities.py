"""Identity checkers against the derived table: parity split, coefficient
extractions, the two product identities, cancellation, and the extended
expansion."""

from fractions import Fraction as F

from matchdiff.atable import ConjectureSpec
from matchdiff.identities import (CheckReport, alpha0_series, build_F,
                                  check_log_coefficients, check_alpha0_series,
                                  check_extended_expansion, check_fd_monomial,
                                  check_first_identity, check_second_identity,
                                  check_second_identity_synthetic,
                                  check_t_cancellation, check_top_coefficient,
                                  core_suite, lsplit, random_conjecture_spec)
from matchdiff.rng import Rng
from matchdiff.series import JPoly, RLaurent


def test_lsplit():
    assert lsplit(1) == ((1,), (0,))
    assert lsplit(0) == ((0,), ())
    assert lsplit(3) == ((1, 3), (0, 2))
    assert lsplit(2) == ((0, 2), (1,))


def test_report_pass_iff_no_witness():
    ok = CheckReport("x", {})
    assert ok.passed and "PASS" in ok.line()
    bad = CheckReport("x", {}, witness={(2, 1): "boom"})
    assert not bad.passed and "FAIL" in bad.line()


def test_build_F_small_orders(table):
    f = build_F(table, 1)
    # [1/n](F - 1) = j(j-1)/(2r)
    expect = (JPoly.monomial(2) - JPoly.monomial(1)) * \
        RLaurent({-1: F(1, 2)}, (-1, 0))
    assert f.jpoly(1) == expect
    assert f.subst_j(0).jpoly(0) == JPoly.const(1)
    # F at j=1 is exactly 1 to all computed orders
    g = build_F(table, 2).subst_j(1)
    assert g.jpoly(0) == JPoly.const(1)
    assert g.jpoly(1).is_zero() and g.jpoly(2).is_zero()


def test_log_coefficient_identities(table):
    assert check_log_coefficients(table, 1).passed
    assert check_log_coefficients(table, 2).passed
    assert check_log_coefficients(table, 3, at_r=3).passed


def test_top_coefficient(table):
    rep2 = check_top_coefficient(table, 2)
    assert rep2.passed
    rep3 = check_top_coefficient(table, 3)
    assert rep3.passed


def test_cubic_closed_form_values(table):
    """Spot-check the k=3 closed form at specific (s, r)."""
    from matchdiff.identities import _cubic_closed_form

    poly = _cubic_closed_form(None)
    for s in range(0, 6):
        for r in (3, 4, 5):
            expect = -F(1, 12) * F(s) * (3 * r * r * s - 3 * r * r
                                         - 12 * r * s - 2 * s * s
                                         + 12 * r + 9 * s - 7) / (r * r)
            assert poly.eval_j(s).eval(r) == expect
    lnf = (build_F(table, 2) - 1).ln1p()
    assert lnf.jpoly(2) == poly


def test_fd_monomial():
    assert check_fd_monomial(2, 2).passed  # value 2
    assert check_fd_monomial(3, 2).passed  # value 0
    assert check_fd_monomial(4, 4).passed  # value 24
    assert not CheckReport("x", witness={}).witness


def test_first_identity_symbolic(table):
    for k in (2, 3):
        for i in range(4):
            assert check_first_identity(table, i, k).passed


def test_first_identity_k4_value(table):
    """k=4, i=0, r=3: the sum must equal 2/27 exactly."""
    rep = check_first_identity(table, 0, 4, at_r=3)
    assert rep.passed


def test_t_cancellation(table):
    for i in range(4):
        assert check_t_cancellation(table, i, 3).passed
        assert check_t_cancellation(table, i, 4, at_r=3).passed
    assert check_t_cancellation(table, None, 3).passed


def test_second_identity_table_and_synthetic(table):
    for k in (0, 1, 2, 3):
        for i in (0, 1, 2):
            assert check_second_identity(table, i, k, order=2).passed
    rep = check_second_identity_synthetic(seed=421, trials=10)
    assert rep.passed


def test_alpha0_leading_terms(table):
    for k in (1, 2, 3):
        assert check_alpha0_series(table, None, k).passed
    rep0 = check_alpha0_series(table, None, 0)
    assert rep0.passed and "1/2*r^-1" in rep0.note
    for i in range(4):
        assert check_alpha0_series(table, i, 4, at_r=3).passed


def test_alpha0_explicit_values(table):
    # k=2: [1/n] alpha_0 = 1/r for every i (constant in the index)
    a0 = alpha0_series(table, None, 2, 1)
    assert a0.jpoly(1) == JPoly([RLaurent({-1: F(1)}, (-1, 0))])
    # k=1 at i=2: [1/n] = 2/r
    a1 = alpha0_series(table, 2, 1, 1)
    assert a1.jpoly(1) == JPoly([RLaurent({-1: F(2)}, (-1, 0))])


def test_alpha0_leading_invariant_under_widening(table):
    lead2 = alpha0_series(table, None, 3, 2).jpoly(2)
    lead3 = alpha0_series(table, None, 3, 2, at_r=None).jpoly(2)
    a0_wide = alpha0_series(table, 1, 3, 3, at_r=3)
    assert lead2 == lead3
    assert a0_wide.jpoly(2) == JPoly.const(F(1, 9))


def test_extended_expansion_empty_and_fixed_specs(table):
    rep, _ = check_extended_expansion(table, ConjectureSpec(()), 2)
    assert rep.passed
    rep, _ = check_extended_expansion(table, ConjectureSpec(((1, F(5, 7)),)), 2)
    assert rep.passed
    rep3, vals = check_extended_expansion(
        table, ConjectureSpec(((1, F(5, 7)), (2, F(-3, 11)))), 3, at_r=3)
    assert rep3.passed
    _, vals_b = check_extended_expansion(
        table, ConjectureSpec(((2, F(9, 2)),)), 3, at_r=3)
    assert vals == vals_b  # bit-identical across constant choices
    assert vals[3] == RLaurent.const(F(1, 12) * (F(1, 27) - 2))


def test_extended_expansion_detects_corruption(table):
    """Fault injection: a corrupted a_2 must produce a coefficient witness."""
    import copy

    broken = copy.deepcopy(table)
    bad = broken.entries[2].sym + JPoly.monomial(4, F(1, 9))
    broken.entries[2].sym = JPoly(bad.c, bound=4)
    rep, _ = check_extended_expansion(broken, ConjectureSpec(()), 2)
    assert not rep.passed
    assert any(key == (4, 2) for key in rep.witness)


def test_random_spec_sampler_documented_ranges():
    rng = Rng(7)
    for _ in range(50):
        spec = random_conjecture_spec(rng, z_max=2)
        assert 1 <= len(spec.terms) <= 2
        assert all(1 <= z <= 2 and c != 0 for z, c in spec.terms)


def test_core_suite_all_pass(table):
    reports = core_suite(table)
    failed = [r.line() for r in reports if not r.passed]
    assert not failed, failed
