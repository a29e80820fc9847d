"""Exact truncated series algebra in 1/n over polynomials in j with Laurent
coefficients in r.

The carrier type is NSeries: a map  h -> JPoly  where h is the exponent of
1/n (negative h means a positive power of n, allowed for intermediates) and
each JPoly is a polynomial in the matching index j whose coefficients are
Laurent polynomials in the degree r with exact rational coefficients.

All arithmetic is exact; floating point never enters this module.
"""

from __future__ import annotations

from fractions import Fraction

Rat = Fraction

# Validity order assigned to values that are exact polynomials in 1/n and n
# (no truncation error at any order).
EXACT_ORDER = 1 << 30

DEFAULT_ORDER = 6


def rat(p, q=1) -> Rat:
    return Fraction(p, q)


def rat_str(x: Rat) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def parse_rat(s: str) -> Rat:
    return Fraction(s)


class WindowOverflowError(ArithmeticError):
    """A Laurent coefficient in r fell outside the declared exponent window."""


class TruncationError(ArithmeticError):
    """A coefficient beyond the series' validity order was requested."""


class ImproperSeriesError(ValueError):
    """ln/exp input had a nonzero constant term or positive powers of n."""


class RLaurent:
    """Laurent polynomial in r: sparse {exponent: Fraction} within a window."""

    __slots__ = ("c", "lo", "hi")

    def __init__(self, coeffs: dict[int, Rat], window: tuple[int, int]):
        lo, hi = window
        c = {e: Fraction(v) for e, v in coeffs.items() if v != 0}
        for e in c:
            if not lo <= e <= hi:
                raise WindowOverflowError(
                    f"r-exponent {e} outside window [{lo}, {hi}]")
        self.c = c
        self.lo = lo
        self.hi = hi

    @classmethod
    def zero(cls, window=(0, 0)) -> "RLaurent":
        return cls({}, window)

    @classmethod
    def const(cls, x, window=(0, 0)) -> "RLaurent":
        return cls({0: Fraction(x)}, window)

    @classmethod
    def term(cls, coeff, rpow: int, window=None) -> "RLaurent":
        if window is None:
            window = (min(rpow, 0), max(rpow, 0))
        return cls({rpow: Fraction(coeff)}, window)

    @property
    def window(self) -> tuple[int, int]:
        return (self.lo, self.hi)

    def is_zero(self) -> bool:
        return not self.c

    def with_window(self, window: tuple[int, int]) -> "RLaurent":
        """Explicit reallocation to a new window (the only sanctioned widening)."""
        return RLaurent(self.c, window)

    def _join(self, other) -> tuple["RLaurent", tuple[int, int]]:
        if isinstance(other, (int, Fraction)):
            other = RLaurent.const(other, self.window)
        w = (min(self.lo, other.lo), max(self.hi, other.hi))
        return other, w

    def __add__(self, other):
        other, w = self._join(other)
        c = dict(self.c)
        for e, v in other.c.items():
            c[e] = c.get(e, Fraction(0)) + v
        return RLaurent(c, w)

    __radd__ = __add__

    def __neg__(self):
        return RLaurent({e: -v for e, v in self.c.items()}, self.window)

    def __sub__(self, other):
        other, _ = self._join(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RLaurent({e: v * other for e, v in self.c.items()},
                            self.window)
        w = (min(self.lo, other.lo), max(self.hi, other.hi))
        c: dict[int, Rat] = {}
        for e1, v1 in self.c.items():
            for e2, v2 in other.c.items():
                e = e1 + e2
                c[e] = c.get(e, Fraction(0)) + v1 * v2
        return RLaurent(c, w)

    __rmul__ = __mul__

    def shift(self, rpow: int) -> "RLaurent":
        """Multiply by r**rpow (window must already cover the result)."""
        return RLaurent({e + rpow: v for e, v in self.c.items()}, self.window)

    def eval(self, r0) -> Rat:
        r0 = Fraction(r0)
        if r0 == 0 and any(e < 0 for e in self.c):
            raise ZeroDivisionError("Laurent evaluation at r=0")
        return sum((v * r0 ** e for e, v in self.c.items()), Fraction(0))

    def as_rat(self) -> Rat:
        """Value of a constant-in-r element."""
        if any(e != 0 for e in self.c):
            raise ValueError(f"not constant in r: {self!r}")
        return self.c.get(0, Fraction(0))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.c == ({0: Fraction(other)} if other != 0 else {})
        if not isinstance(other, RLaurent):
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __bool__(self):
        return bool(self.c)

    def __repr__(self):
        if not self.c:
            return "0"
        parts = []
        for e in sorted(self.c, reverse=True):
            v = self.c[e]
            mono = "" if e == 0 else ("r" if e == 1 else f"r^{e}")
            if mono and abs(v) == 1:
                coef = "-" if v < 0 else ""
            else:
                coef = rat_str(v) + ("*" if mono else "")
            parts.append(coef + mono)
        return " + ".join(parts).replace("+ -", "- ")


def _as_rlaurent(x, window) -> RLaurent:
    if isinstance(x, RLaurent):
        return x
    return RLaurent.const(x, window)


class DegreeBoundError(ValueError):
    """A JPoly exceeded its declared degree bound."""


class JPoly:
    """Polynomial in j with RLaurent coefficients; index = power of j."""

    __slots__ = ("c", "bound")

    def __init__(self, coeffs, bound: int | None = None, window=(0, 0)):
        c = [_as_rlaurent(x, window) for x in coeffs]
        while c and c[-1].is_zero():
            c.pop()
        if bound is not None and len(c) - 1 > bound:
            raise DegreeBoundError(
                f"degree {len(c) - 1} exceeds bound {bound}")
        self.c = tuple(c)
        self.bound = bound

    @classmethod
    def zero(cls) -> "JPoly":
        return cls([])

    @classmethod
    def const(cls, x, window=(0, 0)) -> "JPoly":
        return cls([_as_rlaurent(x, window)])

    @classmethod
    def monomial(cls, jpow: int, coeff=1, window=(0, 0)) -> "JPoly":
        return cls([RLaurent.zero(window)] * jpow
                   + [_as_rlaurent(coeff, window)])

    @property
    def deg(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def coeff(self, jpow: int) -> RLaurent:
        if 0 <= jpow < len(self.c):
            return self.c[jpow]
        return RLaurent.zero()

    def _merge_bound(self, other, combine):
        if self.bound is None or other.bound is None:
            return None
        return combine(self.bound, other.bound)

    def __add__(self, other):
        if isinstance(other, (int, Fraction, RLaurent)):
            other = JPoly.const(other)
        n = max(len(self.c), len(other.c))
        c = [(self.c[i] if i < len(self.c) else RLaurent.zero())
             + (other.c[i] if i < len(other.c) else RLaurent.zero())
             for i in range(n)]
        return JPoly(c, self._merge_bound(other, max))

    __radd__ = __add__

    def __neg__(self):
        return JPoly([-x for x in self.c], self.bound)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, RLaurent)):
            other = JPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RLaurent)):
            return JPoly([x * other for x in self.c], self.bound)
        c = [RLaurent.zero() for _ in range(len(self.c) + len(other.c) - 1)] \
            if self.c and other.c else []
        for i, a in enumerate(self.c):
            for k, b in enumerate(other.c):
                c[i + k] = c[i + k] + a * b
        return JPoly(c, self._merge_bound(other, lambda x, y: x + y))

    __rmul__ = __mul__

    def eval_j(self, j0) -> RLaurent:
        """Exact evaluation at a number j0 (Horner)."""
        acc = RLaurent.zero()
        for x in reversed(self.c):
            acc = acc * Fraction(j0) + x
        return acc

    def shift_j(self, z: int) -> "JPoly":
        """Substitute j -> j - z."""
        if z == 0:
            return self
        acc = JPoly.zero()
        jmz = JPoly([_as_rlaurent(Fraction(-z), (0, 0)),
                     RLaurent.const(1)])
        for x in reversed(self.c):
            acc = acc * jmz + JPoly.const(x)
        return JPoly(acc.c, self.bound)

    def subst_r(self, r0) -> "JPoly":
        return JPoly([RLaurent.const(x.eval(r0)) for x in self.c], self.bound)

    def map_coeffs(self, f) -> "JPoly":
        return JPoly([f(x) for x in self.c], self.bound)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, RLaurent)):
            other = JPoly.const(other)
        if not isinstance(other, JPoly):
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __bool__(self):
        return bool(self.c)

    def __repr__(self):
        if not self.c:
            return "0"
        parts = []
        for i in range(len(self.c) - 1, -1, -1):
            if self.c[i].is_zero():
                continue
            mono = "" if i == 0 else ("j" if i == 1 else f"j^{i}")
            parts.append(f"({self.c[i]!r}){mono}" if mono else repr(self.c[i]))
        return " + ".join(parts)


class NSeries:
    """Truncated formal series in 1/n.

    coeffs maps the 1/n exponent h to a JPoly; h < 0 encodes positive powers
    of n (bounded intermediates only).  `order` is the validity order: all
    coefficients with h <= order are exact, everything deeper is unknown.
    """

    __slots__ = ("c", "order", "window")

    def __init__(self, coeffs: dict[int, JPoly], order: int,
                 window: tuple[int, int] = (0, 0)):
        self.c = {h: p for h, p in coeffs.items()
                  if h <= order and not p.is_zero()}
        self.order = order
        self.window = window

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, order=DEFAULT_ORDER, window=(0, 0)) -> "NSeries":
        return cls({}, order, window)

    @classmethod
    def one(cls, order=DEFAULT_ORDER, window=(0, 0)) -> "NSeries":
        return cls({0: JPoly.const(1, window)}, order, window)

    @classmethod
    def const(cls, x, order=DEFAULT_ORDER, window=(0, 0)) -> "NSeries":
        return cls({0: JPoly.const(x, window)}, order, window)

    @classmethod
    def term(cls, h: int, jpoly: JPoly, order=DEFAULT_ORDER,
             window=(0, 0)) -> "NSeries":
        return cls({h: jpoly}, order, window)

    # -- structure ---------------------------------------------------------

    @property
    def min_exp(self) -> int | None:
        return min(self.c) if self.c else None

    def coeff(self, jpow: int, npow: int) -> RLaurent:
        """Exact coefficient of j^jpow / n^npow."""
        if npow > self.order:
            raise TruncationError(
                f"coefficient at 1/n^{npow} beyond validity order {self.order}")
        p = self.c.get(npow)
        if p is None:
            return RLaurent.zero(self.window)
        return p.coeff(jpow)

    def jpoly(self, npow: int) -> JPoly:
        if npow > self.order:
            raise TruncationError(
                f"coefficient at 1/n^{npow} beyond validity order {self.order}")
        return self.c.get(npow, JPoly.zero())

    def is_proper(self, const_term: int | None = None) -> bool:
        """No positive powers of n; constant term 0 or 1 as declared."""
        if any(h < 0 for h in self.c):
            return False
        c0 = self.c.get(0, JPoly.zero())
        if const_term is None:
            return c0.is_zero() or c0 == JPoly.const(1)
        return c0 == (JPoly.const(const_term) if const_term else JPoly.zero())

    def require_proper(self, const_term: int) -> "NSeries":
        if not self.is_proper(const_term):
            raise ImproperSeriesError(
                f"series is not proper with constant term {const_term}: "
                f"min exponent {self.min_exp}, "
                f"constant {self.c.get(0, JPoly.zero())!r}")
        return self

    def truncate(self, order: int) -> "NSeries":
        return NSeries({h: p for h, p in self.c.items() if h <= order},
                       min(self.order, order), self.window)

    # -- ring operations ---------------------------------------------------

    def _join_window(self, other):
        return (min(self.window[0], other.window[0]),
                max(self.window[1], other.window[1]))

    def __add__(self, other):
        if isinstance(other, (int, Fraction, RLaurent, JPoly)):
            other = NSeries.const(other, self.order, self.window) \
                if not isinstance(other, JPoly) \
                else NSeries.term(0, other, self.order, self.window)
        order = min(self.order, other.order)
        c = {h: p for h, p in self.c.items() if h <= order}
        for h, p in other.c.items():
            if h <= order:
                c[h] = c[h] + p if h in c else p
        return NSeries(c, order, self._join_window(other))

    __radd__ = __add__

    def __neg__(self):
        return NSeries({h: -p for h, p in self.c.items()}, self.order,
                       self.window)

    def __sub__(self, other):
        if not isinstance(other, NSeries):
            return self + (-Fraction(other) if isinstance(other, (int, Fraction))
                           else -other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RLaurent)):
            return NSeries({h: p * other for h, p in self.c.items()},
                           self.order, self.window)
        if isinstance(other, JPoly):
            return NSeries({h: p * other for h, p in self.c.items()},
                           self.order, self.window)
        return self.mul_capped(other, EXACT_ORDER)

    __rmul__ = __mul__

    def mul_capped(self, other: "NSeries", cap: int) -> "NSeries":
        """Product with coefficients computed only through 1/n^cap (avoids
        building coefficients beyond the working truncation, which would
        also widen r-windows past their declared bounds)."""
        # Validity: error terms of one factor meet the lowest exponent of
        # the other, so the product is exact through min(Oa+mb, Ob+ma) --
        # but never claim more than the larger operand order (a product of
        # two order-H series is an order-H series).
        cands = [max(self.order, other.order)]
        if other.c:
            cands.append(self.order + min(other.c))
        if self.c:
            cands.append(other.order + min(self.c))
        order = min(min(cands), cap, EXACT_ORDER)
        c: dict[int, JPoly] = {}
        for h1, p1 in self.c.items():
            for h2, p2 in other.c.items():
                h = h1 + h2
                if h > order:
                    continue
                prod = p1 * p2
                c[h] = c[h] + prod if h in c else prod
        return NSeries(c, order, self._join_window(other))

    def pow_int(self, e: int) -> "NSeries":
        """s**e for a non-negative integer e, by repeated squaring."""
        if e < 0:
            raise ValueError("negative exponent")
        result = NSeries.one(self.order, self.window)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result.truncate(self.order)

    # -- transcendental (terminating on proper inputs) ----------------------

    def ln1p(self) -> "NSeries":
        """ln(1 + x) for x with all exponents >= 1; exact to the order."""
        if self.c and min(self.c) < 1:
            raise ImproperSeriesError(
                "ln1p input must have zero constant term and no positive "
                f"powers of n (min exponent {self.min_exp})")
        order = self.order
        out = NSeries.zero(order, self.window)
        power = NSeries.one(order, self.window)
        for m in range(1, order + 1):
            power = power.mul_capped(self, order)
            if not power.c:
                break
            out = out + power * Fraction((-1) ** (m + 1), m)
        return out

    def exp(self) -> "NSeries":
        """exp(x) for x with all exponents >= 1; exact to the order."""
        if self.c and min(self.c) < 1:
            raise ImproperSeriesError(
                "exp input must have zero constant term and no positive "
                f"powers of n (min exponent {self.min_exp})")
        order = self.order
        out = NSeries.one(order, self.window)
        power = NSeries.one(order, self.window)
        fact = 1
        for m in range(1, order + 1):
            power = power.mul_capped(self, order)
            fact *= m
            if not power.c:
                break
            out = out + power * Fraction(1, fact)
        return out

    # -- substitutions -----------------------------------------------------

    def subst_j(self, j0) -> "NSeries":
        return NSeries({h: JPoly([p.eval_j(j0)]) for h, p in self.c.items()},
                       self.order, self.window)

    def subst_r(self, r0) -> "NSeries":
        if Fraction(r0) == 0:
            raise ZeroDivisionError("substitution r=0")
        return NSeries({h: p.subst_r(r0) for h, p in self.c.items()},
                       self.order, (0, 0))

    def shift_j(self, z: int) -> "NSeries":
        """Substitute j -> j - z (degree bounds preserved)."""
        return NSeries({h: p.shift_j(z) for h, p in self.c.items()},
                       self.order, self.window)

    # -- misc ----------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = NSeries.const(other, self.order, self.window)
        if not isinstance(other, NSeries):
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __repr__(self):
        if not self.c:
            return f"NSeries(0; order={self.order})"
        parts = [f"({self.c[h]!r})/n^{h}" if h > 0
                 else (f"({self.c[h]!r})" if h == 0
                       else f"({self.c[h]!r})*n^{-h}")
                 for h in sorted(self.c)]
        return " + ".join(parts) + f" + O(n^-{self.order + 1})"

    # -- text form (used by the atable cache) --------------------------------

    def to_text(self) -> str:
        lines = [f"nseries H={self.order}"]
        for h in sorted(self.c):
            p = self.c[h]
            for jpow in range(p.deg + 1):
                rl = p.coeff(jpow)
                for rpow in sorted(rl.c):
                    lines.append(f"{h} {jpow} {rpow} {rat_str(rl.c[rpow])}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, window=None) -> "NSeries":
        lines = [ln.strip() for ln in text.splitlines()
                 if ln.strip() and not ln.startswith("#")]
        if not lines or not lines[0].startswith("nseries H="):
            raise ValueError("missing 'nseries H=<order>' header")
        order = int(lines[0].split("=", 1)[1])
        triples = []
        for ln in lines[1:]:
            hs, js, rs, vs = ln.split()
            triples.append((int(hs), int(js), int(rs), parse_rat(vs)))
        if window is None:
            rexps = [t[2] for t in triples] or [0]
            window = (min(min(rexps), 0), max(max(rexps), 0))
        per_h: dict[int, dict[int, dict[int, Rat]]] = {}
        for h, jpow, rpow, v in triples:
            per_h.setdefault(h, {}).setdefault(jpow, {})[rpow] = v
        coeffs = {}
        for h, jmap in per_h.items():
            deg = max(jmap)
            coeffs[h] = JPoly(
                [RLaurent(jmap.get(i, {}), window) for i in range(deg + 1)])
        return cls(coeffs, order, window)


def solve_linear_exact(rows: list[list[Rat]], rhs: list[Rat]) -> list[Rat]:
    """Solve a square exact-rational system by Gaussian elimination."""
    m = len(rows)
    a = [[Fraction(x) for x in row] + [Fraction(rhs[i])]
         for i, row in enumerate(rows)]
    for col in range(m):
        piv = next((r for r in range(col, m) if a[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular linear system")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(m):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][m] for r in range(m)]


class InconsistentSystemError(ValueError):
    """An overdetermined exact system had a nonzero residual."""


def solve_overdetermined_exact(rows: list[list[Rat]],
                               rhs: list[Rat]) -> list[Rat]:
    """Solve an exact-rational system with more rows than unknowns.

    The system must have full column rank and be exactly consistent; any
    nonzero residual raises InconsistentSystemError (this is how held-out
    validation rows are enforced)."""
    nun = len(rows[0]) if rows else 0
    a = [[Fraction(x) for x in row] + [Fraction(rhs[i])]
         for i, row in enumerate(rows)]
    nr = len(a)
    prow = 0
    pivots = []
    for col in range(nun):
        piv = next((r for r in range(prow, nr) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[prow], a[piv] = a[piv], a[prow]
        inv = 1 / a[prow][col]
        a[prow] = [x * inv for x in a[prow]]
        for r in range(nr):
            if r != prow and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[prow])]
        pivots.append(col)
        prow += 1
    if len(pivots) < nun:
        raise ValueError(
            f"rank deficient: {len(pivots)} independent rows for {nun} unknowns")
    bad = [r for r in range(prow, nr) if a[r][nun] != 0]
    if bad:
        raise InconsistentSystemError(
            f"{len(bad)} residual rows are nonzero (first at index {bad[0]})")
    x = [Fraction(0)] * nun
    for k, col in enumerate(pivots):
        x[col] = a[k][nun]
    return x
