"""Per-graph positivity statistics and Monte Carlo estimation.

The central quantities are the exact rational ratios
rho_i = (m_i / mbar_i) ((v-1)/r)^i; every sign decision about the finite
differences of d(i) = ln(rho_i) is made by integer cross-multiplication of
binomially exponentiated rho products.  Logarithms (certified interval
arithmetic) are attached for display only and never decide a sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .graphs import BipGraph, gen_regular_bipartite
from .identities import lsplit
from .matchcount import FULL_POLY_CAP, MatchVector, match_poly_full, mbar_vector
from .rng import derive_seed
from .series import Rat, rat_str


def rho_vector(g: BipGraph, mvec: MatchVector | None = None) -> list[Rat]:
    """Exact rho_0..rho_n; rho_0 = rho_1 = 1 for every regular bipartite
    graph."""
    if mvec is None:
        mvec = match_poly_full(g)
    v = 2 * g.n
    mbar = mbar_vector(v)
    out = []
    for i in range(g.n + 1):
        out.append(Fraction(mvec[i] * (v - 1) ** i,
                            mbar[i] * g.r ** i))
    return out


def delta_sign(rho: list[Rat], i: int, k: int) -> int:
    """Exact sign of Delta^k d(i) via the parity-split product comparison."""
    lplus, lminus = lsplit(k)
    lhs = 1
    rhs = 1
    for ell in lplus:
        q = rho[i + ell]
        lhs *= q.numerator ** comb(k, ell)
        rhs *= q.denominator ** comb(k, ell)
    for ell in lminus:
        q = rho[i + ell]
        lhs *= q.denominator ** comb(k, ell)
        rhs *= q.numerator ** comb(k, ell)
    return (lhs > rhs) - (lhs < rhs)


def alpha0_exact(g_or_rho, i: int, k: int) -> Rat:
    """alpha_0 = prod_{L+} rho^{C(k,l)} - prod_{L-} rho^{C(k,l)}, exact."""
    rho = g_or_rho if isinstance(g_or_rho, list) else rho_vector(g_or_rho)
    if i + k > len(rho) - 1:
        raise ValueError(f"need i + k <= n, got i={i}, k={k}, n={len(rho)-1}")
    lplus, lminus = lsplit(k)
    p = Fraction(1)
    for ell in lplus:
        p *= rho[i + ell] ** comb(k, ell)
    q = Fraction(1)
    for ell in lminus:
        q *= rho[i + ell] ** comb(k, ell)
    return p - q


@dataclass
class DProfile:
    """Exact positivity profile of one graph."""

    graph_id: str
    n: int
    rho: list[Rat]
    signs: dict[tuple[int, int], int]  # (i, k) -> sign of Delta^k d(i)

    def d_values(self, prec_bits: int = 128):
        """d(i) = ln(rho_i) as certified intervals (display only)."""
        from mpmath import iv
        iv.prec = prec_bits
        out = []
        for q in self.rho:
            val = iv.log(iv.mpf(q.numerator) / iv.mpf(q.denominator))
            assert val.delta < iv.mpf(2) ** -64
            out.append(val)
        return out

    def delta_value(self, i: int, k: int, prec_bits: int = 128):
        """Certified interval for Delta^k d(i): display only, never used
        for sign decisions (those come from the exact `signs` table)."""
        ds = self.d_values(prec_bits)
        total = 0
        for ell in range(k + 1):
            total += (-1) ** (k + ell) * comb(k, ell) * ds[i + ell]
        return total

    def positive(self) -> bool:
        return all(s >= 0 for s in self.signs.values())


def delta_table(g: BipGraph, mvec: MatchVector | None = None) -> DProfile:
    """Exact sign table of Delta^k d(i) over the meaningful domain
    i + k <= n (d(i) is only finite for i <= n)."""
    rho = rho_vector(g, mvec)
    n = g.n
    signs = {}
    for k in range(n + 1):
        for i in range(n - k + 1):
            signs[(i, k)] = delta_sign(rho, i, k)
    return DProfile(g.graph_id(), n, rho, signs)


def graph_positive(g: BipGraph, mvec: MatchVector | None = None) -> bool:
    return delta_table(g, mvec).positive()


@dataclass
class EnsembleStats:
    """Per-(r, n, i, k) Monte Carlo summary with exact rational moments."""

    r: int
    n: int
    i: int
    k: int
    samples: int
    seed: int
    alpha_hat: Rat
    beta_hat: Rat
    p_violation: Rat
    p_graph_positive: Rat

    @property
    def cheb_bound(self) -> Rat | None:
        """beta/alpha^2 (None when alpha_hat = 0)."""
        if self.alpha_hat == 0:
            return None
        return self.beta_hat / self.alpha_hat ** 2

    def p_violation_se(self) -> float:
        p = float(self.p_violation)
        return (p * (1 - p) / self.samples) ** 0.5

    def csv_row(self) -> str:
        cheb = self.cheb_bound
        cells = [self.r, self.n, self.samples, self.seed, self.i, self.k,
                 rat_str(self.alpha_hat), f"{float(self.alpha_hat):.6g}",
                 rat_str(self.beta_hat), f"{float(self.beta_hat):.6g}",
                 rat_str(cheb) if cheb is not None else "NA",
                 f"{float(cheb):.6g}" if cheb is not None else "NA",
                 rat_str(self.p_violation), f"{float(self.p_violation):.6g}",
                 rat_str(self.p_graph_positive),
                 f"{float(self.p_graph_positive):.6g}"]
        return ",".join(str(c) for c in cells)


CSV_HEADER = ("r,n,samples,seed,i,k,alpha_hat,alpha_hat_dec,beta_hat,"
              "beta_hat_dec,cheb_bound,cheb_bound_dec,p_violation,"
              "p_violation_dec,p_graph_positive,p_graph_positive_dec")


def _sample_graph(r: int, n: int, seed: int, index: int) -> BipGraph:
    return gen_regular_bipartite(n, r, derive_seed(seed, index))


def _grid_worker(args):
    r, n, seed, lo, hi, pairs, full = args
    sums = {p: Fraction(0) for p in pairs}
    sqs = {p: Fraction(0) for p in pairs}
    viol = {p: 0 for p in pairs}
    pos = 0
    for idx in range(lo, hi):
        g = _sample_graph(r, n, seed, idx)
        rho = rho_vector(g)
        for (i, k) in pairs:
            a0 = alpha0_exact(rho, i, k)
            sums[(i, k)] += a0
            sqs[(i, k)] += a0 * a0
            if a0 < 0:
                viol[(i, k)] += 1
        if full:
            prof = delta_table(g)
            if prof.positive():
                pos += 1
    return sums, sqs, viol, pos


def ensemble_grid(r: int, n: int, samples: int, pairs, seed: int,
                  full_positivity: bool = True,
                  jobs: int = 1) -> dict[tuple[int, int], EnsembleStats]:
    """Shared-sample ensemble statistics for several (i, k) pairs at once.

    Per-sample seeds come from a splittable counter scheme, so results are
    identical for any `jobs`; exact-rational aggregation is associative."""
    pairs = [p for p in pairs if p[0] + p[1] <= n]
    if samples < 1:
        raise ValueError("need samples >= 1")
    chunks = []
    if jobs > 1:
        step = max(64, samples // (4 * jobs) + 1)
        starts = list(range(0, samples, step))
        for lo in starts:
            chunks.append((r, n, seed, lo, min(lo + step, samples), pairs,
                           full_positivity))
    else:
        chunks.append((r, n, seed, 0, samples, pairs, full_positivity))

    if jobs > 1:
        import multiprocessing as mp
        with mp.Pool(jobs) as pool:
            parts = pool.map(_grid_worker, chunks)
    else:
        parts = [_grid_worker(c) for c in chunks]

    sums = {p: Fraction(0) for p in pairs}
    sqs = {p: Fraction(0) for p in pairs}
    viol = {p: 0 for p in pairs}
    pos = 0
    for psums, psqs, pviol, ppos in parts:
        for p in pairs:
            sums[p] += psums[p]
            sqs[p] += psqs[p]
            viol[p] += pviol[p]
        pos += ppos
    out = {}
    for (i, k) in pairs:
        mean = sums[(i, k)] / samples
        beta = sqs[(i, k)] / samples - mean * mean
        out[(i, k)] = EnsembleStats(
            r=r, n=n, i=i, k=k, samples=samples, seed=seed,
            alpha_hat=mean, beta_hat=beta,
            p_violation=Fraction(viol[(i, k)], samples),
            p_graph_positive=Fraction(pos, samples))
    return out


def ensemble_run(r: int, n: int, samples: int, i: int, k: int,
                 seed: int, jobs: int = 1) -> EnsembleStats:
    """Monte Carlo estimate at a single (i, k); deterministic in all
    arguments."""
    if n > FULL_POLY_CAP:
        raise ValueError(f"n={n} beyond the exact-counting cap")
    return ensemble_grid(r, n, samples, [(i, k)], seed, jobs=jobs)[(i, k)]


def wilson_bounds(successes: int, samples: int,
                  z: float = 2.0) -> tuple[float, float]:
    """Wilson score interval; unlike the plug-in standard error it stays
    informative at p_hat in {0, 1}, which boundary proportions hit often."""
    p = successes / samples
    denom = samples + z * z
    center = (successes + z * z / 2) / denom
    half = z * (p * (1 - p) * samples + z * z / 4) ** 0.5 / denom
    return center - half, center + half


@dataclass
class TrendRow:
    n: int
    stats: dict[tuple[int, int], EnsembleStats]


@dataclass
class TrendReport:
    r: int
    samples: int
    seed: int
    rows: list[TrendRow]

    def monotone_violation(self, i: int, k: int, z: float = 2.0) -> bool:
        """p_violation non-increasing in n within noise: fails only when a
        later Wilson interval (z ~ 2 standard errors) lies strictly above
        an earlier one."""
        seq = [row.stats[(i, k)] for row in self.rows
               if (i, k) in row.stats]
        for a, b in zip(seq, seq[1:]):
            xa = int(a.p_violation * a.samples)
            xb = int(b.p_violation * b.samples)
            _, hi_a = wilson_bounds(xa, a.samples, z)
            lo_b, _ = wilson_bounds(xb, b.samples, z)
            if lo_b > hi_a:
                return False
        return True

    def monotone_positivity(self, z: float = 2.0) -> bool:
        """Positivity fraction non-decreasing in n within noise (Wilson
        intervals, see monotone_violation)."""
        seq = []
        for row in self.rows:
            st = next(iter(row.stats.values()))
            seq.append((int(st.p_graph_positive * st.samples), st.samples))
        for (xa, na), (xb, nb) in zip(seq, seq[1:]):
            lo_a, _ = wilson_bounds(xa, na, z)
            _, hi_b = wilson_bounds(xb, nb, z)
            if hi_b < lo_a:
                return False
        return True

    def csv(self, config_line: str = "") -> str:
        lines = []
        if config_line:
            lines.append(f"# {config_line}")
        lines.append("# model=permutation-union-conditioned-on-simple; "
                     "domain i+k<=n")
        lines.append(CSV_HEADER)
        for row in self.rows:
            for key in sorted(row.stats):
                lines.append(row.stats[key].csv_row())
        return "\n".join(lines) + "\n"


def trend_report(r: int, n_list, samples: int, pairs, seed: int,
                 jobs: int = 1) -> TrendReport:
    rows = []
    for n in n_list:
        stats = ensemble_grid(r, n, samples, pairs, seed, jobs=jobs)
        rows.append(TrendRow(n=n, stats=stats))
    return TrendReport(r=r, samples=samples, seed=seed, rows=rows)
