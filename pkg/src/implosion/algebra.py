"""Closed-form interval evaluation of the phase-plane constants.

The autonomous system for the Riemann-invariant profile (W, Z) is

    dW/dxi = N_W / D_W,   dZ/dxi = N_Z / D_Z,

with, for alpha = (gamma - 1)/2,

    D_W = 1 + (W + Z + alpha (W - Z))/2,
    D_Z = 1 + (W + Z - alpha (W - Z))/2,
    N_W = -(r + ((1 + 2 alpha) W + (1 - alpha) Z)/2) W + (alpha/2) Z^2,
    N_Z = -(r + ((1 - alpha) W + (1 + 2 alpha) Z)/2) Z + (alpha/2) W^2.

This module evaluates, as interval enclosures over interval (gamma, r):
the sonic points P_s and P_s-bar (the two roots of D_Z = N_Z = 0), the
slopes (W_1, Z_1) and (W_1, Z_1-check) of the two smooth branches through
P_s, the eigenvalue ratio k(r), the critical exponent r*(gamma), and the
interior equilibrium P_eye of (N_W, N_Z) with its eigendirection.

Everything here works in the raw (gamma, r) chart; the desingularized
charts used near gamma -> 1 and gamma -> infinity live in `verify`.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
from gmpy2 import mpq

from .rigor import (
    DEFAULT_PREC,
    Interval,
    RigorError,
    Sign,
    iv,
    iv_sqrt,
)

MIN_PREC_BITS = 53
_TWO = gmpy2.mpfr(2)


class RadicandAmbiguous(RigorError):
    """A radicand enclosure straddles 0 beyond the clamp tolerance."""


class AtRStar(RigorError):
    """k(r) requested where its denominator contains 0 (r at or beyond r*)."""

    def __init__(self, msg, sentinel=None):
        super().__init__(msg)
        self.sentinel = sentinel


class BisectionStall(RigorError):
    """invert_k could not certify a sign at maximal precision."""


def _parse_param(x, prec):
    """Accept Interval, exact rational string like '7/5', decimal string,
    int, float or mpq; decimal strings are read as exact rationals."""
    if isinstance(x, Interval):
        return x.to_prec(prec)
    if isinstance(x, str):
        return Interval.point(mpq(x), prec)
    if isinstance(x, float):
        return Interval.point(x, prec)
    return Interval.point(x, prec)


@dataclass(frozen=True)
class GasParams:
    """Adiabatic exponent gamma > 1 and self-similar exponent r, as intervals."""

    gamma: Interval
    r: Interval
    prec: int = DEFAULT_PREC

    @staticmethod
    def make(gamma, r, prec: int = DEFAULT_PREC) -> "GasParams":
        g = _parse_param(gamma, prec)
        rr = _parse_param(r, prec)
        if not g.lo > 1:
            raise ValueError(f"gamma must satisfy gamma.lo > 1, got {g}")
        return GasParams(g, rr, prec)

    @property
    def alpha(self) -> Interval:
        return (self.gamma - 1) / 2

    def with_r(self, r) -> "GasParams":
        return GasParams(self.gamma, _parse_param(r, self.prec), self.prec)


# -- the four fields and their derivatives -----------------------------------

def fields_DN(p: GasParams, W: Interval, Z: Interval):
    """(D_W, D_Z, N_W, N_Z) at a point or box (W, Z)."""
    a = p.alpha
    half = iv(mpq(1, 2), p.prec)
    s = W + Z
    d = W - Z
    DW = 1 + half * (s + a * d)
    DZ = 1 + half * (s - a * d)
    NW = -(p.r + half * ((1 + 2 * a) * W + (1 - a) * Z)) * W + half * a * Z * Z
    NZ = -(p.r + half * ((1 - a) * W + (1 + 2 * a) * Z)) * Z + half * a * W * W
    return DW, DZ, NW, NZ


def grad_D_W(p: GasParams):
    a = p.alpha
    return (1 + a) / 2, (1 - a) / 2


def grad_D_Z(p: GasParams):
    a = p.alpha
    return (1 - a) / 2, (1 + a) / 2


def grad_N_W(p: GasParams, W: Interval, Z: Interval):
    a = p.alpha
    return (
        -p.r - (1 + 2 * a) * W - (1 - a) * Z / 2,
        -(1 - a) * W / 2 + a * Z,
    )


def grad_N_Z(p: GasParams, W: Interval, Z: Interval):
    a = p.alpha
    return (
        -(1 - a) * Z / 2 + a * W,
        -p.r - (1 + 2 * a) * Z - (1 - a) * W / 2,
    )


def hess_N_W(p: GasParams):
    """Constant Hessian of N_W: rows/cols ordered (W, Z)."""
    a = p.alpha
    off = -(1 - a) / 2
    return ((-(1 + 2 * a), off), (off, a))


def hess_N_Z(p: GasParams):
    a = p.alpha
    off = -(1 - a) / 2
    return ((a, off), (off, -(1 + 2 * a)))


# -- radicands ---------------------------------------------------------------

def R1_squared(p: GasParams) -> Interval:
    g, r = p.gamma, p.r
    return g * g * (r - 3) ** 2 - 2 * g * (3 * r * r - 6 * r + 7) + (9 * r * r - 14 * r + 9)


def _S_parts(p: GasParams):
    """S = P0 + R1 * P1 with R2 = sqrt(S)/(gamma - 1)."""
    g, r = p.gamma, p.r
    P0 = (
        g * ((76 - 27 * g) * g - 71)
        + 18
        - r * r * (3 * g - 5) * ((g - 5) * g + 2)
        + r * (g * (g * (18 * g - 52) + 50) - 8)
    )
    P1 = 9 * (g - 2) * g + ((2 - 3 * g) * g + 5) * r + 5
    return P0, P1


def _checked_sqrt(a: Interval, what: str) -> Interval:
    try:
        return iv_sqrt(a, clamp=True)
    except RigorError as e:
        raise RadicandAmbiguous(f"{what} enclosure {a}: {e}") from e


def R1_of(p: GasParams) -> Interval:
    return _checked_sqrt(R1_squared(p), "R1^2")


def R2_of(p: GasParams, R1: Interval | None = None) -> Interval:
    if R1 is None:
        R1 = R1_of(p)
    P0, P1 = _S_parts(p)
    S = P0 + R1 * P1
    return _checked_sqrt(S, "R2^2") / (p.gamma - 1)


# -- sonic point data ---------------------------------------------------------

@dataclass(frozen=True)
class SonicData:
    """P_s, P_s-bar, first-order slopes and eigen-ratio data at P_s."""

    W0: Interval
    Z0: Interval
    Wbar0: Interval
    Zbar0: Interval
    R1: Interval
    R2: Interval
    W1: Interval
    Z1: Interval
    Z1check: Interval
    k: Interval  # may be huge near r*; computed from DZ1check/DZ1 when safe
    DW0: Interval
    DZ1: Interval
    DZ1check: Interval
    NW0: Interval
    dW_NZ0: Interval  # del_W N_Z at P_s
    dZ_NZ0: Interval  # del_Z N_Z at P_s


def sonic_point(p: GasParams) -> SonicData:
    g, r = p.gamma, p.r
    R1 = R1_of(p)
    R2 = R2_of(p, R1)
    den = 4 * (g - 1) ** 2

    W0 = (g * g * r + (g + 1) * R1 - 3 * g * g - 2 * g * r + 10 * g - 3 * r - 3) / den
    Z0 = (g * g * r + (g - 3) * R1 - 3 * g * g - 6 * g * r + 6 * g + 9 * r - 7) / den
    Wb0 = (g * g * r - (g + 1) * R1 - 3 * g * g - 2 * g * r + 10 * g - 3 * r - 3) / den
    Zb0 = (g * g * r + (3 - g) * R1 - 3 * g * g - 6 * g * r + 6 * g + 9 * r - 7) / den

    W1 = (g * (-3 * (R1 + 6) - 3 * g * (r - 3) + 2 * r) + R1 + 5 * r + 5) / den

    den1 = den * (g + 1)
    Z1 = (
        -(3 * g ** 3 - 7 * g * g + g + 11) * r
        + g * (g * (9 * g - 3 * R1 - 25) + 10 * R1 - 4 * (g - 1) * R2 + 27)
        - 3 * R1
        + 4 * (g - 1) * R2
        - 3
    ) / den1
    Z1c = -(
        (3 * g ** 3 - 7 * g * g + g + 11) * r
        - g * (g * (9 * g - 3 * R1 - 25) + 10 * R1 + 4 * (g - 1) * R2 + 27)
        + 3 * R1
        + 4 * (g - 1) * R2
        + 3
    ) / den1

    DW0, _, NW0, _ = fields_DN(p, W0, Z0)
    gzW, gzZ = grad_D_Z(p)
    DZ1 = gzW * W1 + gzZ * Z1
    dW_NZ0, dZ_NZ0 = grad_N_Z(p, W0, Z0)
    # k * DZ1 identity: DZ1check = del_Z N_Z(P_s) - Z1 * del_Z D_Z(P_s)
    DZ1check = dZ_NZ0 - Z1 * gzZ

    if DZ1.contains_zero():
        k = Interval.bounds(1, gmpy2.inf(), p.prec)
    else:
        k = DZ1check / DZ1

    return SonicData(
        W0=W0, Z0=Z0, Wbar0=Wb0, Zbar0=Zb0, R1=R1, R2=R2,
        W1=W1, Z1=Z1, Z1check=Z1c, k=k,
        DW0=DW0, DZ1=DZ1, DZ1check=DZ1check, NW0=NW0,
        dW_NZ0=dW_NZ0, dZ_NZ0=dZ_NZ0,
    )


def k_of_r(p: GasParams, at_rstar_sentinel: bool = False) -> Interval:
    """Eigenvalue ratio k = (E - R2)/(E + R2), E = -4 + (1+gamma)(r-1)/(gamma-1).

    Monotone increasing in r on [1, r*); the denominator vanishes at r = r*.
    """
    g = p.gamma
    E = -4 + (1 + g) * (p.r - 1) / (g - 1)
    R2 = R2_of(p)
    denom = E + R2
    if denom.contains_zero():
        if at_rstar_sentinel:
            return Interval.bounds(1, gmpy2.inf(), p.prec)
        raise AtRStar(
            f"k(r) denominator {denom} contains 0 (r at or beyond r*)",
            sentinel=Interval.bounds(1, gmpy2.inf(), p.prec),
        )
    return (E - R2) / denom


def r_star(gamma, prec: int = DEFAULT_PREC) -> Interval:
    """Critical exponent r*(gamma); two branches split at gamma = 5/3."""
    g = _parse_param(gamma, prec)
    if not g.lo > 1:
        raise ValueError("r_star needs gamma.lo > 1")
    five_thirds = Interval.point(mpq(5, 3), prec)

    def low(gg: Interval) -> Interval:
        root = iv_sqrt(2 / (gg - 1))
        return 2 / (root + 1) ** 2 + 1

    def high(gg: Interval) -> Interval:
        return (3 * gg - 1) / (2 + iv_sqrt(Interval.point(3, prec)) * (gg - 1))

    if g.hi <= five_thirds.lo:
        return low(g)
    if g.lo >= five_thirds.hi:
        return high(g)
    lo_part = low(Interval(g.lo, five_thirds.hi, prec))
    hi_part = high(Interval(five_thirds.lo, g.hi, prec))
    return lo_part.hull(hi_part)


def invert_k(gamma, j: int, tol, prec: int = DEFAULT_PREC, max_prec: int = 4096) -> Interval:
    """Interval of width <= tol containing the unique r in [1, r*) with k(r) = j.

    Rigorous bisection: the sign of k - j is certified at every probe; k is
    monotone increasing (proved in the source material and re-checked by the
    k-derivative verification task).
    """
    if j < 1:
        raise ValueError("j must be >= 1")
    g = _parse_param(gamma, prec)
    tol = gmpy2.mpfr(str(tol)) if not isinstance(tol, gmpy2.mpfr) else tol
    if not tol > 0:
        raise ValueError("tol must be positive")
    rs = r_star(g, prec)
    lo = gmpy2.mpfr(1)
    hi = rs.lo  # stay strictly below r*
    if j == 1:
        # k(1) = 1 and k is increasing; the root is the left endpoint
        return Interval.bounds(1, min(1 + tol, hi), prec)

    def sign_at(x, bits):
        pp = GasParams.make(g.to_prec(bits), Interval.point(x, bits), bits)
        try:
            kk = k_of_r(pp)
        except AtRStar:
            return Sign.POSITIVE
        return (kk - j).sign()

    from .rigor import contexts

    dn, _ = contexts(max(prec, 2 * MIN_PREC_BITS))
    while dn.sub(hi, lo) > tol:
        mid = dn.div(dn.add(lo, hi), _TWO)
        bits = prec
        s = sign_at(mid, bits)
        while s is Sign.AMBIGUOUS and bits < max_prec:
            bits *= 2
            s = sign_at(mid, bits)
        if s is Sign.AMBIGUOUS:
            if dn.sub(hi, lo) <= tol / 4:
                break
            raise BisectionStall(
                f"sign of k - {j} ambiguous at r = {mid} with {bits} bits"
            )
        if s is Sign.NEGATIVE:
            lo = mid
        else:
            hi = mid
    return Interval(gmpy2.mpfr(lo), gmpy2.mpfr(hi), prec)


# -- interior equilibrium P_eye ------------------------------------------------

def p_eye(p: GasParams):
    """P_eye = (X0, Y0), the only zero of (N_W, N_Z) in {W > Z}, plus the
    eigendirection (X1, Y1) used by the far-left barrier."""
    g, r = p.gamma, p.r
    sqrt3 = iv_sqrt(Interval.point(3, p.prec))
    den = 3 * g - 1
    X0 = 2 * (sqrt3 - 1) * r / den
    Y0 = -(2 * (1 + sqrt3) * r) / den

    rad = (
        2 * (53 - 3 * g * (45 * g ** 3 - 110 * g + 88)) * r
        + (27 * g * g - 30 * g + 7) ** 2
        + (3 * g * (g * (3 * g * (g + 20) - 94) + 28) + 25) * r * r
    )
    Theta = (
        -_checked_sqrt(rad, "Theta radicand")
        + 3 * sqrt3 * g * g * (r - 5)
        + 2 * sqrt3 * g * (r + 7)
        - sqrt3 * (r + 3)
    )
    X1 = -2 * (3 * g + 4 * sqrt3 - 9) * (
        3 * g * g * (r * r - 3) - 6 * g * (r - 2) * r + 6 * g - r * (r + 4) - 1
    )
    Y1 = Theta * (3 * (sqrt3 - 1) * g * r - (sqrt3 - 3) * (3 * g - 1) - (3 + sqrt3) * r)
    return X0, Y0, X1, Y1


# -- closed forms used as cross-checks ----------------------------------------

def DW0_closed(p: GasParams) -> Interval:
    g, r = p.gamma, p.r
    return (g + (g - 3) * r + 1 + R1_of(p)) / (2 * (g - 1))


def DZ1_closed(p: GasParams) -> Interval:
    g, r = p.gamma, p.r
    return -(3 - 5 * g + (1 + g) * r + R2_of(p) * (g - 1)) / (4 * (g - 1))


def DZ1check_closed(p: GasParams) -> Interval:
    g, r = p.gamma, p.r
    return -(3 + r - 5 * g + r * g - (g - 1) * R2_of(p)) / (4 * (g - 1))
