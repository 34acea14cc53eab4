"""Interval arithmetic with arbitrary-precision directed rounding.

Every rigorous statement produced by this package bottoms out in the
containment guarantee of this module: for intervals X, Y and any implemented
operation ``op``, and for all x in X, y in Y, the true value op(x, y) lies in
op(X, Y).  Endpoints are MPFR binary floats (via gmpy2) rounded outward, so
the guarantee holds including all rounding error.

Intervals are immutable; all operations are pure and safe to share across
workers.  Emptiness is not representable: an operation that cannot produce a
valid enclosure raises instead of returning a poisoned value.
"""

from __future__ import annotations

import enum
import fractions
from typing import Iterable, Sequence, Union

import gmpy2
from gmpy2 import mpfr, mpq

DEFAULT_PREC = 128
MIN_PREC = 53


class RigorError(ArithmeticError):
    """Base class for failures of rigorous operations."""


class DivisionByZeroInterval(RigorError):
    """Denominator interval contains zero."""


class NegativeSqrt(RigorError):
    """Square root of an interval lying (partly) below zero."""


class SingularBlock(RigorError):
    """Block determinant requested with a pivot block not certified invertible."""


class Sign(enum.Enum):
    POSITIVE = 1
    NEGATIVE = -1
    AMBIGUOUS = 0


_CTX_CACHE: dict[int, tuple[gmpy2.context, gmpy2.context]] = {}


def contexts(prec: int) -> tuple[gmpy2.context, gmpy2.context]:
    """Return cached (round-down, round-up) contexts at `prec` bits."""
    pair = _CTX_CACHE.get(prec)
    if pair is None:
        dn = gmpy2.context(precision=prec, round=gmpy2.RoundDown)
        up = gmpy2.context(precision=prec, round=gmpy2.RoundUp)
        pair = (dn, up)
        _CTX_CACHE[prec] = pair
    return pair


_ZERO = mpfr(0)
_ONE = mpfr(1)

Scalar = Union[int, float, str, mpfr, mpq, fractions.Fraction]


def _neg_exact(x: mpfr) -> mpfr:
    """Exact negation.  Python operators on raw mpfr round to the global
    53-bit context, so all endpoint arithmetic must go through contexts."""
    dn, _ = contexts(max(x.precision, MIN_PREC))
    return dn.minus(x)


def _abs_exact(x: mpfr) -> mpfr:
    return _neg_exact(x) if x < 0 else x


def _endpoints(x: Scalar, prec: int) -> tuple[mpfr, mpfr]:
    """Outward-rounded mpfr endpoints enclosing the exact value of x."""
    dn, up = contexts(prec)
    if isinstance(x, mpfr):
        return dn.add(x, _ZERO), up.add(x, _ZERO)
    if isinstance(x, float):
        v = mpfr(x, MIN_PREC if prec < MIN_PREC else prec)
        return dn.add(v, _ZERO), up.add(v, _ZERO)
    if isinstance(x, int):
        # exact embed first (gmpy2 int conversion ignores context rounding)
        exact = mpfr(x, max(x.bit_length() + 1, 2))
        return dn.add(exact, _ZERO), up.add(exact, _ZERO)
    if isinstance(x, str):
        return gmpy2.mpfr(x, prec, 10, dn), gmpy2.mpfr(x, prec, 10, up)
    if isinstance(x, fractions.Fraction):
        x = mpq(x.numerator, x.denominator)
    if isinstance(x, mpq):
        num = mpfr(int(x.numerator), max(int(x.numerator).bit_length() + 1, 2))
        den = mpfr(int(x.denominator), max(int(x.denominator).bit_length() + 1, 2))
        return dn.div(num, den), up.div(num, den)
    raise TypeError(f"cannot build interval endpoints from {type(x)!r}")


class Interval:
    """Closed real interval [lo, hi] with outward-rounded mpfr endpoints."""

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo: mpfr, hi: mpfr, prec: int = DEFAULT_PREC):
        if prec < MIN_PREC:
            raise ValueError(f"precision_bits must be >= {MIN_PREC}, got {prec}")
        if gmpy2.is_nan(lo) or gmpy2.is_nan(hi):
            raise RigorError("NaN endpoint; upstream operation was invalid")
        if lo > hi:
            raise RigorError(f"inverted endpoints: lo={lo} > hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "prec", prec)

    def __setattr__(self, *a):
        raise AttributeError("Interval is immutable")

    # -- construction -----------------------------------------------------

    @staticmethod
    def point(x: Scalar, prec: int = DEFAULT_PREC) -> "Interval":
        lo, hi = _endpoints(x, prec)
        return Interval(lo, hi, prec)

    @staticmethod
    def bounds(lo: Scalar, hi: Scalar, prec: int = DEFAULT_PREC) -> "Interval":
        llo, _ = _endpoints(lo, prec)
        _, hhi = _endpoints(hi, prec)
        return Interval(llo, hhi, prec)

    def to_prec(self, prec: int) -> "Interval":
        """Re-enclose at a new working precision (never shrinks the true set)."""
        dn, up = contexts(prec)
        return Interval(dn.add(self.lo, _ZERO), up.add(self.hi, _ZERO), prec)

    # -- queries -----------------------------------------------------------

    def width(self) -> mpfr:
        _, up = contexts(self.prec)
        return up.sub(self.hi, self.lo)

    def mid(self) -> mpfr:
        dn, _ = contexts(self.prec)
        return dn.div(dn.add(self.lo, self.hi), mpfr(2))

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, (mpq, fractions.Fraction)):
            return self.lo <= x and x <= self.hi
        return self.lo <= mpfr(x, 1 if isinstance(x, int) and x != 0 else 53) <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def sign(self) -> Sign:
        if self.lo > 0:
            return Sign.POSITIVE
        if self.hi < 0:
            return Sign.NEGATIVE
        return Sign.AMBIGUOUS

    def is_finite(self) -> bool:
        return gmpy2.is_finite(self.lo) and gmpy2.is_finite(self.hi)

    def is_exact_zero(self) -> bool:
        return self.lo == 0 and self.hi == 0

    def abs_upper(self) -> mpfr:
        return max(_abs_exact(self.lo), _abs_exact(self.hi))

    def abs_lower(self) -> mpfr:
        if self.contains_zero():
            return _ZERO
        return min(_abs_exact(self.lo), _abs_exact(self.hi))

    def hull(self, other: "Interval") -> "Interval":
        prec = max(self.prec, other.prec)
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi), prec)

    def intersect(self, other: "Interval") -> "Interval":
        if not self.overlaps(other):
            raise RigorError("intersection of disjoint intervals")
        prec = max(self.prec, other.prec)
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi), prec)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "Interval":
        if isinstance(other, Interval):
            return other
        return Interval.point(other, self.prec)

    def __add__(self, other):
        b = self._coerce(other)
        prec = max(self.prec, b.prec)
        dn, up = contexts(prec)
        return Interval(dn.add(self.lo, b.lo), up.add(self.hi, b.hi), prec)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        prec = max(self.prec, b.prec)
        dn, up = contexts(prec)
        return Interval(dn.sub(self.lo, b.hi), up.sub(self.hi, b.lo), prec)

    def __rsub__(self, other):
        return self._coerce(other).__sub__(self)

    def __neg__(self):
        return Interval(_neg_exact(self.hi), _neg_exact(self.lo), self.prec)

    def __mul__(self, other):
        b = self._coerce(other)
        prec = max(self.prec, b.prec)
        dn, up = contexts(prec)
        al, ah, bl, bh = self.lo, self.hi, b.lo, b.hi
        # Moore sign-case rules; the only case needing 4 products is straddle*straddle
        if al >= 0:
            if bl >= 0:
                return Interval(dn.mul(al, bl), up.mul(ah, bh), prec)
            if bh <= 0:
                return Interval(dn.mul(ah, bl), up.mul(al, bh), prec)
            return Interval(dn.mul(ah, bl), up.mul(ah, bh), prec)
        if ah <= 0:
            if bl >= 0:
                return Interval(dn.mul(al, bh), up.mul(ah, bl), prec)
            if bh <= 0:
                return Interval(dn.mul(ah, bh), up.mul(al, bl), prec)
            return Interval(dn.mul(al, bh), up.mul(al, bl), prec)
        if bl >= 0:
            return Interval(dn.mul(al, bh), up.mul(ah, bh), prec)
        if bh <= 0:
            return Interval(dn.mul(ah, bl), up.mul(al, bl), prec)
        lo = min(dn.mul(al, bh), dn.mul(ah, bl))
        hi = max(up.mul(al, bl), up.mul(ah, bh))
        return Interval(lo, hi, prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        if b.contains_zero():
            raise DivisionByZeroInterval(f"denominator {b} contains 0")
        prec = max(self.prec, b.prec)
        dn, up = contexts(prec)
        al, ah, bl, bh = self.lo, self.hi, b.lo, b.hi
        if bl > 0:
            lo = dn.div(al, bh if al >= 0 else bl)
            hi = up.div(ah, bl if ah >= 0 else bh)
            return Interval(lo, hi, prec)
        # b < 0: a/b = (-a)/(-b)
        al, ah = _neg_exact(ah), _neg_exact(al)
        bl, bh = _neg_exact(bh), _neg_exact(bl)
        lo = dn.div(al, bh if al >= 0 else bl)
        hi = up.div(ah, bl if ah >= 0 else bh)
        return Interval(lo, hi, prec)

    def __rtruediv__(self, other):
        return self._coerce(other).__truediv__(self)

    def __pow__(self, n: int):
        return iv_pow_int(self, n)

    def __abs__(self):
        return iv_abs(self)

    def scale_int(self, n: int) -> "Interval":
        """Multiply by an exact integer (cheaper than full interval product)."""
        dn, up = contexts(self.prec)
        m = mpfr(n, max(abs(n).bit_length() + 1, 2))
        if n >= 0:
            return Interval(dn.mul(self.lo, m), up.mul(self.hi, m), self.prec)
        return Interval(dn.mul(self.hi, m), up.mul(self.lo, m), self.prec)

    # -- presentation --------------------------------------------------------

    def __repr__(self):
        return f"Interval[{self.lo!r}, {self.hi!r}]"

    def __str__(self):
        digits = max(6, int(self.prec / 3.32) + 2)
        return "[{0:.{d}g}, {1:.{d}g}]".format(self.lo, self.hi, d=digits)

    def decimal_endpoints(self, digits: int | None = None) -> tuple[str, str]:
        """Outward decimal strings (lo rounded down, hi rounded up)."""
        if digits is None:
            digits = int(self.prec / 3.32) + 3
        lo = "{0:.{d}DE}".format(self.lo, d=digits)
        hi = "{0:.{d}UE}".format(self.hi, d=digits)
        return lo, hi


def iv(x, prec: int = DEFAULT_PREC) -> Interval:
    """Lift a scalar (or pass through an Interval) at the given precision."""
    if isinstance(x, Interval):
        return x
    return Interval.point(x, prec)


# -- spec-named operation aliases -------------------------------------------

def iv_add(a: Interval, b: Interval) -> Interval:
    return a + b


def iv_sub(a: Interval, b: Interval) -> Interval:
    return a - b


def iv_mul(a: Interval, b: Interval) -> Interval:
    return a * b


def iv_div(a: Interval, b: Interval) -> Interval:
    return a / b


def iv_neg(a: Interval) -> Interval:
    return -a


def iv_abs(a: Interval) -> Interval:
    if a.lo >= 0:
        return a
    if a.hi <= 0:
        return -a
    return Interval(_ZERO, max(_neg_exact(a.lo), a.hi), a.prec)


def iv_sqrt(a: Interval, clamp: bool = False) -> Interval:
    """Interval square root.

    With clamp=False the input must satisfy lo >= 0.  clamp=True admits an
    interval dipping below 0 provided |lo| <= hi, replacing lo by 0; callers
    use this only where the enclosed quantity is provably nonnegative and the
    negative dip is interval slack (radicands vanishing at a domain edge).
    """
    if a.hi < 0:
        raise NegativeSqrt(f"sqrt of negative interval {a}")
    lo = a.lo
    if lo < 0:
        if not clamp:
            raise NegativeSqrt(
                f"interval {a} straddles 0; pass clamp=True only if nonnegativity is known"
            )
        if _neg_exact(lo) > a.hi:
            raise NegativeSqrt(f"interval {a} is mostly negative; clamp refused")
        lo = _ZERO
    dn, up = contexts(a.prec)
    return Interval(dn.sqrt(lo), up.sqrt(a.hi), a.prec)


def iv_pow_int(a: Interval, n: int) -> Interval:
    if not isinstance(n, int) or n < 0:
        raise ValueError("iv_pow_int requires a nonnegative integer exponent")
    prec = a.prec
    if n == 0:
        return Interval(_ONE, _ONE, prec)
    if n == 1:
        return a
    dn, up = contexts(prec)
    e = mpfr(n)
    if n % 2 == 1 or a.lo >= 0:
        return Interval(dn.pow(a.lo, e), up.pow(a.hi, e), prec)
    if a.hi <= 0:
        return Interval(dn.pow(a.hi, e), up.pow(a.lo, e), prec)
    return Interval(_ZERO, max(up.pow(a.lo, e), up.pow(a.hi, e)), prec)


def iv_sign(a: Interval) -> Sign:
    return a.sign()


def iv_max_zero(a: Interval) -> Interval:
    """Enclosure of max(x, 0) over x in a."""
    return Interval(max(a.lo, _ZERO), max(a.hi, _ZERO), a.prec)


def iv_sum(terms: Iterable[Interval], prec: int | None = None) -> Interval:
    acc = None
    for t in terms:
        acc = t if acc is None else acc + t
    if acc is None:
        return Interval.point(0, prec or DEFAULT_PREC)
    return acc


# ---------------------------------------------------------------------------
# Interval-coefficient polynomials
# ---------------------------------------------------------------------------

class IPoly:
    """Univariate polynomial with interval coefficients, degree ascending.

    Trailing coefficients are trimmed only when exactly [0, 0]; an interval
    merely containing 0 is kept, since dropping it would change the degree
    claim used by divisibility checks.
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Sequence[Interval], var: str = "t"):
        cs = list(coeffs)
        while len(cs) > 1 and cs[-1].is_exact_zero():
            cs.pop()
        if not cs:
            raise ValueError("IPoly needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "var", var)

    def __setattr__(self, *a):
        raise AttributeError("IPoly is immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def prec(self) -> int:
        return max(c.prec for c in self.coeffs)

    @staticmethod
    def from_scalars(vals, prec: int = DEFAULT_PREC, var: str = "t") -> "IPoly":
        return IPoly([iv(v, prec) for v in vals], var=var)

    def __call__(self, t) -> Interval:
        return self.eval(t)

    def eval(self, t) -> Interval:
        """Horner evaluation; contains p(x) for every x in t and every
        pointwise polynomial with coefficients in self.coeffs."""
        x = t if isinstance(t, Interval) else Interval.point(t, self.prec)
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def derive(self) -> "IPoly":
        if self.degree == 0:
            return IPoly([Interval.point(0, self.prec)], var=self.var)
        return IPoly(
            [c.scale_int(i) for i, c in enumerate(self.coeffs) if i >= 1],
            var=self.var,
        )

    def __add__(self, other):
        other = self._as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        zero = Interval.point(0, max(self.prec, other.prec))
        a = list(self.coeffs) + [zero] * (n - len(self.coeffs))
        b = list(other.coeffs) + [zero] * (n - len(other.coeffs))
        return IPoly([x + y for x, y in zip(a, b)], var=self.var)

    def __sub__(self, other):
        return self + (-self._as_poly(other))

    def __neg__(self):
        return IPoly([-c for c in self.coeffs], var=self.var)

    def __mul__(self, other):
        if isinstance(other, Interval):
            return IPoly([c * other for c in self.coeffs], var=self.var)
        if isinstance(other, (int, float, str, mpfr, mpq)):
            k = Interval.point(other, self.prec)
            return IPoly([c * k for c in self.coeffs], var=self.var)
        other = self._as_poly(other)
        prec = max(self.prec, other.prec)
        zero = Interval.point(0, prec)
        out = [zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return IPoly(out, var=self.var)

    __rmul__ = __mul__

    def compose(self, inner: "IPoly") -> "IPoly":
        """self(inner(t)) by Horner over the polynomial ring."""
        prec = max(self.prec, inner.prec)
        acc = IPoly([self.coeffs[-1]], var=inner.var)
        for c in reversed(self.coeffs[:-1]):
            acc = acc * inner + IPoly([c], var=inner.var)
        return acc

    def _as_poly(self, other) -> "IPoly":
        if isinstance(other, IPoly):
            return other
        return IPoly([iv(other, self.prec)], var=self.var)

    def coeff(self, i: int) -> Interval:
        if i > self.degree:
            return Interval.point(0, self.prec)
        return self.coeffs[i]

    def shift_down(self, k: int) -> "IPoly":
        """Divide by t**k, verifying the k lowest coefficients contain 0."""
        for i in range(min(k, len(self.coeffs))):
            if not self.coeffs[i].contains_zero():
                raise RigorError(
                    f"coefficient {i} = {self.coeffs[i]} does not contain 0; not divisible by t^{k}"
                )
        rest = self.coeffs[k:]
        if not rest:
            rest = [Interval.point(0, self.prec)]
        return IPoly(rest, var=self.var)

    def divide_linear(self, root) -> tuple["IPoly", Interval]:
        """Synthetic division by (t - root); returns (quotient, remainder)."""
        r = iv(root, self.prec)
        q = [None] * self.degree if self.degree else []
        acc = self.coeffs[-1]
        for i in range(self.degree - 1, -1, -1):
            q[i] = acc
            acc = self.coeffs[i] + acc * r
        if not q:
            q = [Interval.point(0, self.prec)]
        return IPoly(q, var=self.var), acc

    def __repr__(self):
        return f"IPoly(deg={self.degree}, var={self.var!r})"


def ipoly_eval(p: IPoly, t) -> Interval:
    return p.eval(t)


def ipoly_derive(p: IPoly) -> IPoly:
    return p.derive()


def ipoly_add(p: IPoly, q: IPoly) -> IPoly:
    return p + q


def ipoly_mul(p: IPoly, q: IPoly) -> IPoly:
    return p * q


def ipoly_compose(p: IPoly, q: IPoly) -> IPoly:
    return p.compose(q)


# ---------------------------------------------------------------------------
# Interval matrices
# ---------------------------------------------------------------------------

class IMatrix:
    """Rectangular matrix of intervals (row-major)."""

    __slots__ = ("entries", "rows", "cols")

    def __init__(self, entries: Sequence[Sequence[Interval]]):
        rows = len(entries)
        if rows == 0:
            raise ValueError("empty matrix")
        cols = len(entries[0])
        for row in entries:
            if len(row) != cols:
                raise ValueError("ragged matrix")
        object.__setattr__(self, "entries", tuple(tuple(r) for r in entries))
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)

    def __setattr__(self, *a):
        raise AttributeError("IMatrix is immutable")

    @property
    def prec(self) -> int:
        return max(c.prec for row in self.entries for c in row)

    @staticmethod
    def identity(n: int, prec: int = DEFAULT_PREC) -> "IMatrix":
        one = Interval.point(1, prec)
        zero = Interval.point(0, prec)
        return IMatrix([[one if i == j else zero for j in range(n)] for i in range(n)])


def _det_ring(rows):
    """Cofactor determinant over any ring with +, -, * (Interval or IPoly)."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    acc = None
    for j in range(n):
        minor = [[rows[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = rows[0][j] * _det_ring(minor)
        if j % 2 == 1:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def imat_det(m: IMatrix) -> Interval:
    if m.rows != m.cols:
        raise ValueError("determinant of non-square matrix")
    return _det_ring([list(r) for r in m.entries])


def imat_det_poly(rows) -> "IPoly":
    """Determinant of a square matrix of IPoly entries (cofactor expansion)."""
    return _det_ring([list(r) for r in rows])


def imat_inv(m: IMatrix) -> IMatrix:
    """Gauss-Jordan inverse; every pivot must exclude 0."""
    if m.rows != m.cols:
        raise ValueError("inverse of non-square matrix")
    n = m.rows
    prec = m.prec
    a = [list(r) for r in m.entries]
    inv = [list(r) for r in IMatrix.identity(n, prec).entries]
    for col in range(n):
        piv_row = None
        for r in range(col, n):
            if not a[r][col].contains_zero():
                piv_row = r
                break
        if piv_row is None:
            raise SingularBlock(f"no certified-nonzero pivot in column {col}")
        a[col], a[piv_row] = a[piv_row], a[col]
        inv[col], inv[piv_row] = inv[piv_row], inv[col]
        piv = a[col][col]
        a[col] = [x / piv for x in a[col]]
        inv[col] = [x / piv for x in inv[col]]
        for r in range(n):
            if r == col:
                continue
            f = a[r][col]
            if f.is_exact_zero():
                continue
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
            inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return IMatrix(inv)


def imat_mul(a: IMatrix, b: IMatrix) -> IMatrix:
    if a.cols != b.rows:
        raise ValueError("shape mismatch")
    out = []
    for i in range(a.rows):
        row = []
        for j in range(b.cols):
            acc = a.entries[i][0] * b.entries[0][j]
            for k in range(1, a.cols):
                acc = acc + a.entries[i][k] * b.entries[k][j]
            row.append(acc)
        out.append(row)
    return IMatrix(out)


def imat_sub(a: IMatrix, b: IMatrix) -> IMatrix:
    if a.rows != b.rows or a.cols != b.cols:
        raise ValueError("shape mismatch")
    return IMatrix(
        [
            [a.entries[i][j] - b.entries[i][j] for j in range(a.cols)]
            for i in range(a.rows)
        ]
    )


def imat_block_det(a: IMatrix, b: IMatrix, c: IMatrix, d: IMatrix) -> Interval:
    """det of [[A, B], [C, D]] as det(A) * det(D - C A^-1 B).

    Requires det(A) certified nonzero; raises SingularBlock otherwise.
    """
    det_a = imat_det(a)
    if det_a.sign() is Sign.AMBIGUOUS:
        raise SingularBlock(f"det(A) = {det_a} not certified nonzero")
    schur = imat_sub(d, imat_mul(imat_mul(c, imat_inv(a)), b))
    return det_a * imat_det(schur)
