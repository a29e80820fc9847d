"""The coefficient table a_h(r, j) of the expansion
M_j = (n^j r^j / j!) (1 + H_j),  H_j = sum_h a_h(r, j) / n^h.

Entries are either symbolic in j (JPoly over Laurent-in-r, degree <= 2h,
with forced roots at j = 0..h) or pointwise values at fixed (r, j).  Tables
are reconstructed from exact matching counts of girth-qualified graphs by
exact linear algebra; every fit keeps held-out rows whose residuals must be
exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .series import (EXACT_ORDER, InconsistentSystemError, JPoly, NSeries,
                     Rat, RLaurent, parse_rat, rat_str,
                     solve_overdetermined_exact)


class ATableError(ValueError):
    pass


class QualificationError(ATableError):
    """Counting data inconsistent with the no-short-subgraph model; the
    qualification policy (girth bound) was probably violated."""


class FitError(ATableError):
    pass


def a1_builtin() -> JPoly:
    """a_1(r, j) = j(j-1)(1/(2r) - 1), exact."""
    top = RLaurent({0: Fraction(-1), -1: Fraction(1, 2)}, (-1, 0))
    return JPoly([RLaurent.zero((-1, 0)), -top, top], bound=2)


def root_product(h: int) -> JPoly:
    """j(j-1)...(j-h): the forced roots of a_h at integer j = 0..h."""
    p = JPoly.monomial(1)
    for z in range(1, h + 1):
        p = p * JPoly([Fraction(-z), Fraction(1)])
    return p


@dataclass
class AEntry:
    h: int
    sym: JPoly | None = None
    points: dict[tuple[int, int], Rat] = field(default_factory=dict)
    provenance: list[str] = field(default_factory=list)


class ATable:
    """Write-once coefficient store with provenance and cross-validation."""

    def __init__(self):
        self.entries: dict[int, AEntry] = {}

    def entry(self, h: int) -> AEntry:
        if h not in self.entries:
            self.entries[h] = AEntry(h)
        return self.entries[h]

    def sym_max(self) -> int:
        """Largest h with symbolic entries for all levels 1..h."""
        h = 0
        while (h + 1) in self.entries and self.entries[h + 1].sym is not None:
            h += 1
        return h

    def point_max(self, r: int) -> int:
        """Largest h usable at fixed r (symbolic or j-interpolable)."""
        h = 0
        while True:
            nxt = h + 1
            e = self.entries.get(nxt)
            if e is None:
                return h
            if e.sym is None:
                needed = range(nxt + 1, 2 * nxt + 1)
                if not all((r, j) in e.points for j in needed):
                    return h
            h = nxt

    def value(self, h: int, r: int, j: int) -> Rat:
        """a_h(r, j) at integers; 0 at the forced roots j <= h."""
        if j <= h:
            return Fraction(0)
        e = self.entries.get(h)
        if e is None:
            raise ATableError(f"no entry for h={h}")
        if e.sym is not None:
            return e.sym.eval_j(j).eval(r)
        if (r, j) in e.points:
            return e.points[(r, j)]
        raise ATableError(f"no value for a_{h}({r}, {j})")

    def jpoly_at_r(self, h: int, r: int) -> JPoly:
        """The j-polynomial of a_h at fixed r.

        Symbolic entries are evaluated; pointwise entries are interpolated
        through the forced roots 0..h plus the h stored values at
        j = h+1..2h (degree <= 2h pins the polynomial exactly)."""
        e = self.entries.get(h)
        if e is None:
            raise ATableError(f"no entry for h={h}")
        if e.sym is not None:
            return e.sym.subst_r(r)
        js = sorted(j for (rr, j) in e.points if rr == r and j > h)
        if len(js) < h:
            raise ATableError(
                f"need pointwise a_{h}({r}, j) at {h} points beyond the "
                f"roots to interpolate, have j={js}")
        pi = root_product(h)
        # quotient of degree <= h-1; extra points act as held-out rows
        rows = [[Fraction(j) ** t for t in range(h)] for j in js]
        rhs = [e.points[(r, j)] / pi.eval_j(j).as_rat() for j in js]
        if len(js) > h:
            q = solve_overdetermined_exact(rows, rhs)
        else:
            from .series import solve_linear_exact
            q = solve_linear_exact(rows, rhs)
        out = pi * JPoly([Fraction(x) for x in q])
        return JPoly(out.c, bound=2 * h)

    def set_sym(self, h: int, jp: JPoly, provenance: str) -> None:
        if jp.deg > 2 * h:
            raise ATableError(f"a_{h} degree {jp.deg} exceeds 2h")
        for z in range(0, h + 1):
            if not jp.eval_j(z).is_zero():
                raise ATableError(f"a_{h} must vanish at j={z}")
        e = self.entry(h)
        if e.sym is not None and e.sym != jp:
            raise ATableError(f"conflicting symbolic a_{h}")
        for (r, j), v in e.points.items():
            if jp.eval_j(j).eval(r) != v:
                raise ATableError(
                    f"symbolic a_{h} conflicts with stored point ({r}, {j})")
        e.sym = jp
        e.provenance.append(provenance)

    def add_point(self, h: int, r: int, j: int, val: Rat,
                  provenance: str) -> None:
        e = self.entry(h)
        if e.sym is not None and e.sym.eval_j(j).eval(r) != val:
            raise ATableError(
                f"point a_{h}({r}, {j}) = {val} conflicts with symbolic entry")
        old = e.points.get((r, j))
        if old is not None and old != val:
            raise ATableError(
                f"conflicting values for a_{h}({r}, {j}): {old} vs {val}")
        e.points[(r, j)] = Fraction(val)
        e.provenance.append(f"{provenance} (r={r}, j={j})")

    def check_roots(self, j_window: int = 8) -> None:
        """Exact root check at all integer points in the window."""
        for h, e in self.entries.items():
            if e.sym is not None:
                for z in range(0, h + 1):
                    assert e.sym.eval_j(z).is_zero(), (h, z)


# -- reconstruction from counting data --------------------------------------


def derive_M_pointwise(r: int, j: int,
                       samples: list[tuple[int, int]]) -> dict[int, Rat]:
    """Solve  m_j = (n^j r^j / j!)(1 + sum_h a_h / n^h)  for a_1..a_{j-1}.

    `samples` holds (n, m_j) pairs from qualified graphs with distinct n;
    at least j rows are required so the solve keeps a consistency row, and
    any nonzero residual raises QualificationError."""
    ns = [n for n, _ in samples]
    if len(set(ns)) != len(ns):
        raise ATableError("duplicate n in derivation family")
    if len(samples) < j:
        raise ATableError(
            f"need at least {j} distinct n values for j={j}, got {len(samples)}")
    ys = [Fraction(mj * factorial(j), n ** j * r ** j) - 1
          for n, mj in samples]
    if j == 1:
        bad = [n for (n, _), y in zip(samples, ys) if y != 0]
        if bad:
            raise QualificationError(f"m_1 != n r at n={bad}")
        return {}
    rows = [[Fraction(1, n ** h) for h in range(1, j)] for n in ns]
    try:
        sol = solve_overdetermined_exact(rows, ys)
    except InconsistentSystemError as exc:
        raise QualificationError(
            f"inconsistent counts for (r={r}, j={j}) over n={ns}: {exc}; "
            "a family member likely fails the girth policy") from exc
    return {h: sol[h - 1] for h in range(1, j)}


def fit_atable(points: dict[tuple[int, int], Rat], h: int,
               window: tuple[int, int] | None = None) -> JPoly:
    """Fit the symbolic a_h from pointwise values.

    The forced roots j = 0..h are divided out first, so only the degree
    <= h-1 quotient in j (with Laurent-in-r coefficients over `window`)
    remains.  The system must be overdetermined; every extra row is a
    held-out sample whose residual must be exactly zero."""
    if not points:
        raise FitError("empty sample set")
    if window is None:
        window = (-h, 0)
    lo, hi = window
    rpows = list(range(lo, hi + 1))
    unknowns = [(t, e) for t in range(h) for e in rpows]
    if len(points) <= len(unknowns):
        raise FitError(
            f"need more than {len(unknowns)} samples for a held-out row, "
            f"got {len(points)}")
    pi = root_product(h)
    rows, rhs = [], []
    for (r, j), v in sorted(points.items()):
        if j <= h:
            if v != 0:
                raise FitError(f"sample at root j={j} must be zero")
            continue
        rows.append([Fraction(j) ** t * Fraction(r) ** e
                     for (t, e) in unknowns])
        rhs.append(Fraction(v) / pi.eval_j(j).as_rat())
    try:
        sol = solve_overdetermined_exact(rows, rhs)
    except InconsistentSystemError as exc:
        raise FitError(
            f"held-out residual nonzero for a_{h} over window {window}: "
            f"{exc}; widen the r-window or check the girth policy") from exc
    pos = {ue: k for k, ue in enumerate(unknowns)}
    quotient = JPoly([RLaurent({e: sol[pos[(t, e)]] for e in rpows}, window)
                      for t in range(h)])
    out = pi * quotient
    return JPoly(out.c, bound=2 * h)


# -- series builders ---------------------------------------------------------


def build_H(table: ATable, h_max: int, at_r: int | None = None) -> NSeries:
    """H = sum_{h=1}^{h_max} a_h(r, j)/n^h as a proper zero-constant series.

    The finite upper limit j-1 of the defining sum is encoded by the roots
    of the a_h, not by truncating in j."""
    window = (-h_max, 0) if at_r is None else (0, 0)
    coeffs = {}
    for h in range(1, h_max + 1):
        if at_r is None:
            e = table.entries.get(h)
            if e is None or e.sym is None:
                raise ATableError(f"symbolic a_{h} unavailable (have up to "
                                  f"h={table.sym_max()})")
            jp = e.sym
            jp = jp.map_coeffs(lambda x: x.with_window(window))
        else:
            jp = table.jpoly_at_r(h, at_r)
        coeffs[h] = jp
    return NSeries(coeffs, h_max, window)


@dataclass(frozen=True)
class ConjectureSpec:
    """Formal-constant terms of the extended expansion: list of (z_i, c_i)."""

    terms: tuple[tuple[int, Rat], ...]

    def __post_init__(self):
        for z, _ in self.terms:
            if z < 1:
                raise ValueError("z_i must be positive integers")

    def describe(self) -> str:
        if not self.terms:
            return "empty"
        return ",".join(f"(z={z},c={rat_str(c)})" for z, c in self.terms)


def falling_factorial_jpoly(z: int) -> JPoly:
    """j(j-1)...(j-z+1) as a JPoly."""
    p = JPoly.const(1)
    for t in range(z):
        p = p * JPoly([Fraction(-t), Fraction(1)])
    return p


def build_F_conjecture(table: ATable, spec: ConjectureSpec, h_max: int,
                       at_r: int | None = None) -> NSeries:
    """F of the extended expansion:

    F = sum_{s>=0} a_s/n^s
        + sum_i c_i j(j-1)..(j-z_i+1) (1/(n r))^{z_i} sum_{s>=0} a_s(r, j-z_i)/n^s

    with a_0 = 1 (forced by the (1 + H) normal form).  Empty spec reduces
    to 1 + H."""
    for z, _ in spec.terms:
        if z > h_max:
            raise ATableError(
                f"z={z} exceeds truncation h_max={h_max}; the term would be "
                "invisible at this order")
    window = (-h_max, 0) if at_r is None else (0, 0)
    base = NSeries.one(h_max, window) + build_H(table, h_max, at_r=at_r)
    f = base
    for z, c in spec.terms:
        shifted = base.shift_j(z).truncate(h_max - z)
        if at_r is None:
            rfac = RLaurent.term(Fraction(c), -z, (-h_max, 0))
        else:
            rfac = RLaurent.const(Fraction(c) / Fraction(at_r) ** z)
        coeff = falling_factorial_jpoly(z) * rfac
        term = NSeries.term(z, coeff, EXACT_ORDER, window) * shifted
        f = f + term
    return f


# -- persistence --------------------------------------------------------------


def export_atable(table: ATable, path) -> None:
    lines = ["atable version=1"]
    for h in sorted(table.entries):
        e = table.entries[h]
        for p in e.provenance:
            lines.append(f"# {p}")
        if e.sym is not None:
            lines.append(f"a h={h} sym")
            for jpow in range(e.sym.deg + 1):
                rl = e.sym.coeff(jpow)
                for rpow in sorted(rl.c):
                    lines.append(f"{jpow} {rpow} {rat_str(rl.c[rpow])}")
        for (r, j) in sorted(e.points):
            lines.append(f"a h={h} point r={r} j={j} "
                         f"{rat_str(e.points[(r, j)])}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def import_atable(path) -> ATable:
    """Load a table file; imported entries are cross-validated (a_1 must
    match the closed form, overlaps must agree exactly)."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != "atable version=1":
        raise ATableError("missing 'atable version=1' header")
    table = ATable()
    i = 1
    while i < len(lines):
        ln = lines[i].strip()
        i += 1
        if not ln or ln.startswith("#"):
            continue
        if not ln.startswith("a "):
            raise ATableError(f"malformed line: {ln!r}")
        tokens = ln.split()[1:]
        fields = dict(kv.split("=") for kv in tokens if "=" in kv)
        h = int(fields["h"])
        if "sym" in tokens:
            triples = []
            while i < len(lines):
                nxt = lines[i].strip()
                if not nxt or nxt.startswith("#") or nxt.startswith("a "):
                    break
                jp, rp, v = nxt.split()
                triples.append((int(jp), int(rp), parse_rat(v)))
                i += 1
            if not triples:
                raise ATableError(f"empty symbolic block for h={h}")
            deg = max(t[0] for t in triples)
            lo = min(min(t[1] for t in triples), -h)
            coeffs: list[dict[int, Rat]] = [{} for _ in range(deg + 1)]
            for jp, rp, v in triples:
                coeffs[jp][rp] = v
            jpoly = JPoly([RLaurent(c, (lo, 0)) for c in coeffs], bound=2 * h)
            table.set_sym(h, jpoly, "imported")
        else:
            val = parse_rat(tokens[-1])
            table.add_point(h, int(fields["r"]), int(fields["j"]), val,
                            "imported")
    if 1 in table.entries:
        e = table.entries[1]
        builtin = a1_builtin()
        if e.sym is not None and e.sym != builtin:
            raise ATableError("imported a_1 conflicts with the closed form")
        for (r, j), v in e.points.items():
            if builtin.eval_j(j).eval(r) != v:
                raise ATableError(
                    f"imported a_1({r}, {j}) conflicts with the closed form")
    return table
