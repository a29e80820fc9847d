"""Coefficient table: the closed-form level-1 entry, reconstruction from
counting data, symbolic fits with held-out validation, series builders,
and file round-trips."""

from fractions import Fraction as F

import pytest

from matchdiff.atable import (ATable, ATableError, ConjectureSpec, FitError,
                              QualificationError, a1_builtin,
                              build_F_conjecture, build_H, derive_M_pointwise,
                              export_atable, fit_atable, import_atable,
                              root_product)
from matchdiff.derive import derive_with_invariance, qualified_family
from matchdiff.graphs import incidence_pg, random_lift
from matchdiff.matchcount import match_count_upto
from matchdiff.series import JPoly, NSeries, RLaurent


def test_a1_builtin_values():
    a1 = a1_builtin()
    assert a1.eval_j(2).eval(3) == F(-5, 3)
    assert a1.eval_j(1).is_zero()
    assert a1.coeff(2) == RLaurent({-1: F(1, 2), 0: F(-1)}, (-1, 0))


def test_root_product():
    pi = root_product(2)
    assert pi.eval_j(0).is_zero() and pi.eval_j(2).is_zero()
    assert pi.eval_j(4).as_rat() == 4 * 3 * 2


def test_derive_pointwise_heawood_family():
    """The pipeline's self-test: a_1(3, 2) from real counting data."""
    hw = incidence_pg(2)
    fam = [hw, random_lift(hw, 2, seed=1), random_lift(hw, 3, seed=2)]
    samples = [(g.n, match_count_upto(g, 2).counts[2]) for g in fam]
    got = derive_M_pointwise(3, 2, samples)
    assert got == {1: F(-5, 3)}


def test_derive_pointwise_r4():
    pg = incidence_pg(3)
    fam = [pg, random_lift(pg, 2, seed=3), random_lift(pg, 3, seed=4)]
    samples = [(g.n, match_count_upto(g, 2).counts[2]) for g in fam]
    assert derive_M_pointwise(4, 2, samples) == {1: F(-7, 4)}


def test_derive_pointwise_j1_consistency():
    hw = incidence_pg(2)
    assert derive_M_pointwise(3, 1, [(7, 21), (14, 42)]) == {}
    with pytest.raises(QualificationError):
        derive_M_pointwise(3, 1, [(7, 20), (14, 42)])


def test_derive_pointwise_needs_distinct_n():
    with pytest.raises(ATableError):
        derive_M_pointwise(3, 2, [(7, 168), (7, 168)])
    with pytest.raises(ATableError):
        derive_M_pointwise(3, 3, [(7, 644), (14, 5908)])


def test_derive_pointwise_flags_unqualified_family():
    """Feeding a 4-cycle-rich graph where girth 6 is required breaks the
    consistency row."""
    hw = incidence_pg(2)
    fams = [hw, random_lift(hw, 2, seed=1), random_lift(hw, 3, seed=2),
            random_lift(hw, 4, seed=3), random_lift(hw, 5, seed=4)]
    samples = [(g.n, match_count_upto(g, 4).counts[4]) for g in fams]
    good = derive_M_pointwise(3, 4, samples)
    assert 3 in good
    from matchdiff.graphs import gen_regular_bipartite
    bad_graph = gen_regular_bipartite(18, 3, seed=0)  # girth 4, not qualified
    bad = samples[:4] + [(18, match_count_upto(bad_graph, 4).counts[4])]
    with pytest.raises(QualificationError):
        derive_M_pointwise(3, 4, bad)


def test_fit_reproduces_synthetic_polynomial():
    # a synthetic level-2 entry with the forced roots and window [-2, 0]
    w = (-2, 0)
    quotient = JPoly([RLaurent({0: F(1, 3), -2: F(-2, 7)}, w),
                      RLaurent({-1: F(5, 2)}, w)])
    truth = root_product(2) * quotient
    points = {(r, j): truth.eval_j(j).eval(r)
              for r in (3, 4, 5) for j in (3, 4, 5)}
    fitted = fit_atable(points, 2, window=w)
    assert fitted == JPoly(truth.c, bound=4)


def test_fit_rejects_corrupt_sample():
    w = (-1, 0)
    truth = root_product(1) * JPoly([RLaurent({0: F(1), -1: F(-1, 2)}, w)])
    points = {(r, j): truth.eval_j(j).eval(r)
              for r in (3, 4, 5) for j in (2, 3)}
    points[(5, 3)] += 1
    with pytest.raises(FitError):
        fit_atable(points, 1, window=w)


def test_fit_requires_held_out_row():
    with pytest.raises(FitError):
        fit_atable({(3, 2): F(-5, 3), (4, 2): F(-7, 4)}, 1, window=(-1, 0))
    with pytest.raises(FitError):
        fit_atable({}, 1)


def test_reconstruction_invariance_smoke():
    vals = derive_with_invariance(3, 2, seed=123)
    assert vals == {1: F(-5, 3)}


def test_strict_policy_agrees_on_overlap(table, repo_cache_dir):
    """girth > 2j derivation must reproduce the default-policy entries."""
    from matchdiff.derive import build_default_table

    strict = build_default_table(root=repo_cache_dir, strict=True)
    assert strict.entries[1].sym == table.entries[1].sym == a1_builtin()
    (r, j), = ((3, 3),)
    assert strict.value(2, r, j) == table.value(2, r, j)


def test_lift_spec_builds():
    from matchdiff.graphs import LiftSpec, girth

    hw = incidence_pg(2)
    spec = LiftSpec(hw, 2, seed=5)
    g = spec.build()
    assert (g.n, g.r) == (14, 3)
    assert girth(g) >= 6


def test_table_predicts_held_out_cage_counts(table):
    """The 12-cage (girth 12, never used in any fit) must have its exact
    matching counts reproduced by the M_j formula with the derived table;
    this exercises the pointwise a_3, a_4 entries on independent data."""
    from math import factorial

    from matchdiff._backend import BACKEND
    from matchdiff.graphs import builtin_graph

    cage = builtin_graph("tutte_12cage")
    n, r = cage.n, cage.r
    j_max = 5 if BACKEND == "cython" else 3
    counts = match_count_upto(cage, j_max).counts
    for j in range(2, j_max + 1):
        pred = F(n ** j * r ** j, factorial(j)) * (
            1 + sum(table.value(h, r, j) * F(1, n ** h)
                    for h in range(1, j)))
        assert pred == counts[j], j


def test_qualified_family_enforces_girth():
    from matchdiff.graphs import girth

    fam = qualified_family(3, 4, 4, seed=5, style="structured")
    assert len(fam) == 4
    assert all(girth(g) >= 6 for g in fam)
    assert len({g.n for g in fam}) == 4


def test_table_store_and_conflicts():
    t = ATable()
    t.set_sym(1, a1_builtin(), "builtin")
    assert t.value(1, 3, 2) == F(-5, 3)
    assert t.value(1, 3, 0) == 0 and t.value(1, 3, 1) == 0
    t.add_point(2, 3, 3, F(-37, 6), "test")  # arbitrary but self-consistent
    with pytest.raises(ATableError):
        t.add_point(2, 3, 3, F(1), "conflict")
    with pytest.raises(ATableError):
        t.add_point(1, 3, 2, F(0), "conflicts with symbolic")
    with pytest.raises(ATableError):
        t.set_sym(1, JPoly.monomial(1), "no roots")


def test_jpoly_at_r_interpolates_points(table):
    jp = table.jpoly_at_r(3, 3)
    assert jp.deg <= 6
    for j in range(0, 4):
        assert jp.eval_j(j).is_zero()
    assert jp.eval_j(4).as_rat() == table.value(3, 3, 4)


def test_build_H_level1(table):
    h = build_H(table, 1)
    assert h.jpoly(1) == a1_builtin()


def test_build_H_log_coefficients(table):
    lnh = (build_H(table, 2)).ln1p()
    assert lnh.coeff(3, 2) == RLaurent({-2: F(1, 6), 0: F(-1, 3)}, (-2, 0))
    assert lnh.coeff(4, 2).is_zero()


def test_conjecture_series_empty_spec(table):
    f = build_F_conjecture(table, ConjectureSpec(()), 2)
    assert f == NSeries.one(2, (-2, 0)) + build_H(table, 2)


def test_conjecture_series_single_term(table):
    # z=1 term adds c j/(n r) (1 + a_1(r, j-1)/n + ...)
    c = F(5, 7)
    f = build_F_conjecture(table, ConjectureSpec(((1, c),)), 2)
    base = NSeries.one(2, (-2, 0)) + build_H(table, 2)
    delta = f - base
    assert delta.coeff(1, 1) == RLaurent({-1: c}, (-2, 0))
    # level 2, j-part: c/r * j * a_1(r, j-1)
    expect = (JPoly.monomial(1) * a1_builtin().shift_j(1)) * \
        RLaurent({-1: c}, (-2, 0))
    assert delta.jpoly(2) == expect


def test_conjecture_series_vanishes_at_zero(table):
    f = build_F_conjecture(table, ConjectureSpec(((1, F(2, 3)), (2, F(-1, 5)))), 2)
    assert f.subst_j(0) == NSeries.one(2)
    with pytest.raises(ATableError):
        build_F_conjecture(table, ConjectureSpec(((3, F(1)),)), 2)
    with pytest.raises(ValueError):
        ConjectureSpec(((0, F(1)),))


def test_export_import_roundtrip(table, tmp_path):
    path = tmp_path / "t.txt"
    export_atable(table, path)
    again = import_atable(path)
    assert again.entries[1].sym == table.entries[1].sym
    assert again.entries[2].sym == table.entries[2].sym
    assert again.entries[3].points == table.entries[3].points
    path2 = tmp_path / "t2.txt"
    export_atable(again, path2)
    assert path.read_text().splitlines()[2:] != [] \
        and [l for l in path.read_text().splitlines() if not l.startswith("#")] \
        == [l for l in path2.read_text().splitlines() if not l.startswith("#")]


def test_import_rejects_wrong_a1(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("atable version=1\na h=1 sym\n1 0 -1\n2 0 1\n")
    with pytest.raises(ATableError):
        import_atable(path)


def test_import_rejects_malformed(tmp_path):
    path = tmp_path / "junk.txt"
    path.write_text("something else\n")
    with pytest.raises(ATableError):
        import_atable(path)
