"""Power-series machinery at the sonic point and at the origin.

The smooth profile through P_s has Taylor coefficients (W_n, Z_n) fixed by
the recurrence of the autonomous system: with D_{o,n}, N_{o,n} the Taylor
coefficients of the four fields along the solution,

    D_{W,0} W_m = N_{W,m-1} - sum_{j=0}^{m-2} C(m-1,j) D_{W,m-1-j} W_{j+1},
    Z_m D_{Z,1} (m-k) = -sum_{j=1}^{m-2} C(m,j) D_{Z,m-j} Z_{j+1}
                        + (N_{Z,m} - dZ N_Z(P_s) Z_m) - Z_1 W_m dW D_Z(P_s).

Internally coefficients are stored factorial-normalized (w_n = W_n/n!) to
keep magnitudes tame; public accessors return the unnormalized values.  The
Z denominator is always evaluated as m*D_{Z,1} - k*D_{Z,1} with the product
k*D_{Z,1} in its closed form (dZ N_Z(P_s) - Z_1 dZ D_Z), which stays finite
and nonzero at r = r* where D_{Z,1} vanishes and k blows up; this is what
makes the long high-precision run at exactly r = r* well posed.

Normalized(j) mode carries the factor (k - j) symbolically so the tables
stay finite on parameter boxes where k - j contains zero: the stored entry
at index j is Z_j (k - j) and at index j+1 the pair W_{j+1}(k-j),
Z_{j+1}(k-j)(k-j-1).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import gmpy2
from gmpy2 import mpq

from . import algebra
from .algebra import GasParams, SonicData
from .rigor import DEFAULT_PREC, Interval, RigorError, Sign, iv, iv_abs, iv_sqrt


class ResonantIndex(RigorError):
    """m - k contains 0 at a raw-mode index m (Taylor recurrence not solvable)."""

    def __init__(self, m, msg=""):
        super().__init__(msg or f"resonant index m={m}: m - k contains 0")
        self.m = m


class PrecisionExhausted(RigorError):
    """A required denominator sign could not be certified at this precision."""


class ZeroAmplitude(ValueError):
    """Origin expansion requested with amplitude A = 0."""


RAW = "raw"
SINGULAR_SPLIT = "split"


def normalized(j: int) -> tuple:
    return ("norm", j)


def _fac(n: int) -> int:
    return math.factorial(n)


@dataclass
class CoeffTable:
    """Taylor data of the smooth solution at P_s.

    Wc/Zc hold the factorial-normalized w_n = W_n/n!, z_n = Z_n/n!; in
    Normalized(j) mode the entries at indices j and j+1 additionally carry
    the powers of (k - j) recorded in norm_powers.
    """

    params: GasParams
    sonic: SonicData
    n_max: int
    mode: object
    Wc: list  # normalized w_n
    Zc: list  # normalized z_n
    DWc: list
    DZc: list
    NWc: list
    NZc: list
    norm_powers: dict = field(default_factory=dict)  # index -> (pow for W, pow1, pow2 for Z)
    Ws: Optional[list] = None  # SingularSplit extras, unnormalized
    Wns: Optional[list] = None
    Zs: Optional[list] = None
    Zns: Optional[list] = None

    def W(self, n: int) -> Interval:
        """Unnormalized W_n (in Normalized mode at n=j+1: W_n (k-j))."""
        return self.Wc[n].scale_int(_fac(n))

    def Z(self, n: int) -> Interval:
        """Unnormalized Z_n (in Normalized mode: times its (k-j) powers)."""
        return self.Zc[n].scale_int(_fac(n))

    def w(self, n: int) -> Interval:
        return self.Wc[n]

    def z(self, n: int) -> Interval:
        return self.Zc[n]

    def to_csv(self, path, digits: int | None = None):
        """Columns n, W_lo, W_hi, Z_lo, Z_hi as decimal strings."""
        with open(path, "w", newline="") as f:
            wr = csv.writer(f)
            wr.writerow(["n", "W_lo", "W_hi", "Z_lo", "Z_hi",
                         f"precision_bits={self.params.prec}"])
            for n in range(self.n_max + 1):
                wl, wh = self.W(n).decimal_endpoints(digits)
                zl, zh = self.Z(n).decimal_endpoints(digits)
                wr.writerow([n, wl, wh, zl, zh])


class _Affine:
    """c0 + c1 * sym, used to carry the unknown z_j through the j+1 step."""

    __slots__ = ("c0", "c1")

    def __init__(self, c0: Interval, c1: Interval):
        self.c0 = c0
        self.c1 = c1

    @staticmethod
    def const(x: Interval, prec: int) -> "_Affine":
        return _Affine(x, Interval.point(0, prec))

    def __add__(self, o):
        if isinstance(o, _Affine):
            return _Affine(self.c0 + o.c0, self.c1 + o.c1)
        return _Affine(self.c0 + o, self.c1)

    def __sub__(self, o):
        if isinstance(o, _Affine):
            return _Affine(self.c0 - o.c0, self.c1 - o.c1)
        return _Affine(self.c0 - o, self.c1)

    def __neg__(self):
        return _Affine(-self.c0, -self.c1)

    def scale(self, s: Interval) -> "_Affine":
        return _Affine(self.c0 * s, self.c1 * s)

    def scale_int(self, n: int) -> "_Affine":
        return _Affine(self.c0.scale_int(n), self.c1.scale_int(n))


def _quadform_products(wa, za, wb, zb):
    """Shared products (wa wb, wa zb + za wb, za zb) for both Hessians."""
    return wa * wb, wa * zb + za * wb, za * zb


def coeffs_at_Ps(p: GasParams, n_max: int, mode=RAW,
                 sonic: SonicData | None = None) -> CoeffTable:
    """Taylor table of the smooth solution at P_s up to index n_max."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    norm_j = None
    if isinstance(mode, tuple) and len(mode) == 2 and mode[0] == "norm":
        norm_j = int(mode[1])
        if norm_j < 2:
            raise ValueError("Normalized(j) requires j >= 2")
        if n_max > norm_j + 1:
            raise NotImplementedError(
                "Normalized(j) tables are built up to index j+1; higher indices "
                "would need deeper (k-j) power tracking"
            )
        if n_max == norm_j + 1 and norm_j < 3:
            raise NotImplementedError(
                "index j+1 of Normalized(2) needs quadratic (k-2) tracking"
            )
    elif mode not in (RAW, SINGULAR_SPLIT):
        raise ValueError(f"unknown mode {mode!r}")

    sd = sonic if sonic is not None else algebra.sonic_point(p)
    prec = p.prec
    zero = Interval.point(0, prec)

    gdW = algebra.grad_D_W(p)
    gdZ = algebra.grad_D_Z(p)
    gnW = algebra.grad_N_W(p, sd.W0, sd.Z0)
    gnZ = (sd.dW_NZ0, sd.dZ_NZ0)
    HW = algebra.hess_N_W(p)
    HZ = algebra.hess_N_Z(p)
    hW00, hW01, hW11 = HW[0][0], HW[0][1], HW[1][1]
    hZ00, hZ01, hZ11 = HZ[0][0], HZ[0][1], HZ[1][1]

    DW0_, DZ0_, NW0_, NZ0_ = algebra.fields_DN(p, sd.W0, sd.Z0)

    w = [sd.W0, sd.W1]
    z = [sd.Z0, sd.Z1]
    dW = [DW0_, gdW[0] * sd.W1 + gdW[1] * sd.Z1]
    dZ = [DZ0_, sd.DZ1]
    nW = [NW0_, gnW[0] * sd.W1 + gnW[1] * sd.Z1]
    nZ = [NZ0_, gnZ[0] * sd.W1 + gnZ[1] * sd.Z1]
    norm_powers: dict = {}

    def hess_sums(m):
        """(hseW, hseZ) for index m: symmetrized pair sums over j + (m-j) = m."""
        P1 = P2 = P3 = None
        for jj in range(1, (m - 1) // 2 + 1):
            a, b, c = _quadform_products(w[jj], z[jj], w[m - jj], z[m - jj])
            P1 = a if P1 is None else P1 + a
            P2 = b if P2 is None else P2 + b
            P3 = c if P3 is None else P3 + c
        if m % 2 == 0:
            h = m // 2
            a, b, c = _quadform_products(w[h], z[h], w[h], z[h])
            half = iv(mpq(1, 2), prec)
            a, b, c = a * half, b * half, c * half
            P1 = a if P1 is None else P1 + a
            P2 = b if P2 is None else P2 + b
            P3 = c if P3 is None else P3 + c
        if P1 is None:
            return zero, zero
        hw = hW00 * P1 + hW01 * P2 + hW11 * P3
        hz = hZ00 * P1 + hZ01 * P2 + hZ11 * P3
        return hw, hz

    def z_denominator(m):
        return sd.DZ1.scale_int(m) - sd.DZ1check

    m = 2
    while m <= n_max:
        if norm_j is not None and m == norm_j + 1:
            break
        hw, hz = hess_sums(m)
        # W_m step
        SW = None
        for t in range(1, m):
            term = dW[m - t] * w[t].scale_int(t)
            SW = term if SW is None else SW + term
        nWm1 = nW[m - 1]
        wm = (nWm1 - SW) / (DW0_.scale_int(m))
        # Z_m step
        SZ = None
        for t in range(2, m):
            term = dZ[m - t + 1] * z[t].scale_int(t)
            SZ = term if SZ is None else SZ + term
        rhs = gnZ[0] * wm + hz - sd.Z1 * wm * gdZ[0]
        if SZ is not None:
            rhs = rhs - SZ
        den = z_denominator(m)
        if norm_j is not None and m == norm_j:
            # store z_m (k - m) = -rhs / D_{Z,1}
            if sd.DZ1.contains_zero():
                raise PrecisionExhausted(f"D_Z,1 = {sd.DZ1} contains 0")
            zm = -rhs / sd.DZ1
            norm_powers[m] = (0, 1, 0)
        else:
            if den.contains_zero():
                if sd.k.is_finite() and sd.k.contains(m):
                    raise ResonantIndex(m)
                raise PrecisionExhausted(
                    f"Z denominator {den} at m={m} contains 0"
                )
            zm = rhs / den
        w.append(wm)
        z.append(zm)
        dW.append(gdW[0] * wm + gdW[1] * zm)
        dZ.append(gdZ[0] * wm + gdZ[1] * zm)
        nW.append(gnW[0] * wm + gnW[1] * zm + hw)
        nZ.append(gnZ[0] * wm + gnZ[1] * zm + hz)
        m += 1

    if norm_j is not None and n_max == norm_j + 1:
        _normalized_step_j_plus_1(
            p, sd, norm_j, w, z, dW, dZ, nW, nZ,
            gdW, gdZ, gnW, gnZ, (hW00, hW01, hW11), (hZ00, hZ01, hZ11),
            DW0_, norm_powers,
        )

    table = CoeffTable(
        params=p, sonic=sd, n_max=n_max, mode=mode,
        Wc=w, Zc=z, DWc=dW, DZc=dZ, NWc=nW, NZc=nZ,
        norm_powers=norm_powers,
    )
    if mode == SINGULAR_SPLIT:
        _attach_singular_split(table)
    return table


def _normalized_step_j_plus_1(p, sd, j, w, z, dW, dZ, nW, nZ,
                              gdW, gdZ, gnW, gnZ, HW, HZ, DW0_, norm_powers):
    """Index j+1 of a Normalized(j) table.

    z[j] stores zn_j = z_j (k - j); the true z_j enters the step linearly, so
    all index-j quantities are carried as affine expressions c0 + c1 z_j and
    the final identities are multiplied through by (k - j), which is never
    divided by.  Appended entries: w_{j+1}(k-j) and z_{j+1}(k-j)(k-j-1).
    """
    prec = p.prec
    zero = Interval.point(0, prec)
    zn_j = z[j]
    kminusj = sd.k - iv(j, prec)
    m = j + 1

    wj_aff = _Affine.const(w[j], prec)
    zj_aff = _Affine(zero, Interval.point(1, prec))  # the symbol itself
    dWj = _Affine(gdW[0] * w[j], gdW[1])
    dZj = _Affine(gdZ[0] * w[j], gdZ[1])

    def aff(x):
        return x if isinstance(x, _Affine) else _Affine.const(x, prec)

    def mul_raw(a: _Affine, r: Interval) -> _Affine:
        return a.scale(r)

    # Hessian pair sums for index m = j+1 (pairs (t, m-t), t = 1..j//2 ... )
    hW00, hW01, hW11 = HW
    hZ00, hZ01, hZ11 = HZ
    P1 = _Affine.const(zero, prec)
    P2 = _Affine.const(zero, prec)
    P3 = _Affine.const(zero, prec)
    for t in range(1, (m - 1) // 2 + 1):
        o = m - t
        if o == j:
            # v_t raw, v_j affine in z_j
            a = mul_raw(wj_aff, w[t])
            b = mul_raw(wj_aff, z[t]) + mul_raw(zj_aff, w[t])
            c = mul_raw(zj_aff, z[t])
        else:
            aa, bb, cc = _quadform_products(w[t], z[t], w[o], z[o])
            a, b, c = aff(aa), aff(bb), aff(cc)
        P1 = P1 + a
        P2 = P2 + b
        P3 = P3 + c
    if m % 2 == 0:
        h = m // 2
        half = iv(mpq(1, 2), prec)
        aa, bb, cc = _quadform_products(w[h], z[h], w[h], z[h])
        P1 = P1 + aff(aa * half)
        P2 = P2 + aff(bb * half)
        P3 = P3 + aff(cc * half)
    hw_aff = mul_raw(P1, hW00) + mul_raw(P2, hW01) + mul_raw(P3, hW11)
    hz_aff = mul_raw(P1, hZ00) + mul_raw(P2, hZ01) + mul_raw(P3, hZ11)

    # W step: w_{j+1} = (nW[j] - SW)/(DW0 (j+1))
    nWj = _Affine(gnW[0] * w[j], gnW[1])
    hwj, hzj_unused = _hess_sums_raw(p, w, z, j, HW, HZ)
    nWj = nWj + hwj
    # at most one factor per term is affine since t == j excludes m - t == j
    SW = _Affine.const(zero, prec)
    for t in range(1, m):
        if (m - t) == j:
            term = mul_raw(dWj, w[t]).scale_int(t)
        elif t == j:
            term = mul_raw(wj_aff, dW[m - t]).scale_int(t)
        else:
            term = aff(dW[m - t] * w[t].scale_int(t))
        SW = SW + term
    wm_aff = (nWj - SW).scale(1 / (DW0_.scale_int(m)))

    # Z step rhs (free of z_m): -SZ + gnZ_W w_m + hz - Z1 w_m dW D_Z
    SZ = _Affine.const(zero, prec)
    for t in range(2, m):
        idx = m - t + 1
        if idx == j:
            term = mul_raw(dZj, z[t]).scale_int(t)
        elif t == j:
            term = mul_raw(zj_aff, dZ[idx]).scale_int(t)
        else:
            term = aff(dZ[idx] * z[t].scale_int(t))
        SZ = SZ + term
    rhs = mul_raw(wm_aff, gnZ[0]) + hz_aff - mul_raw(wm_aff, sd.Z1 * gdZ[0]) - SZ

    if sd.DZ1.contains_zero():
        raise PrecisionExhausted(f"D_Z,1 = {sd.DZ1} contains 0")
    # z_{j+1} (k-j)(k-j-1) = -[rhs0 (k-j) + rhs1 zn_j]/D_{Z,1}
    zn2 = -(rhs.c0 * kminusj + rhs.c1 * zn_j) / sd.DZ1
    wn1 = wm_aff.c0 * kminusj + wm_aff.c1 * zn_j

    w.append(wn1)
    z.append(zn2)
    norm_powers[m] = (1, 1, 1)
    # d/n values at j+1 are not well defined in normalized storage; append
    # placeholders so the lists stay aligned
    dW.append(gdW[0] * wn1 + gdW[1] * zn2)
    dZ.append(gdZ[0] * wn1 + gdZ[1] * zn2)
    nW.append(zero)
    nZ.append(zero)


def _hess_sums_raw(p, w, z, m, HW, HZ):
    """Plain hessian pair sums at index m over already-raw entries."""
    prec = p.prec
    zero = Interval.point(0, prec)
    hW00, hW01, hW11 = HW
    hZ00, hZ01, hZ11 = HZ
    P1 = P2 = P3 = None
    for jj in range(1, (m - 1) // 2 + 1):
        a, b, c = _quadform_products(w[jj], z[jj], w[m - jj], z[m - jj])
        P1 = a if P1 is None else P1 + a
        P2 = b if P2 is None else P2 + b
        P3 = c if P3 is None else P3 + c
    if m % 2 == 0:
        h = m // 2
        half = iv(mpq(1, 2), prec)
        a, b, c = _quadform_products(w[h], z[h], w[h], z[h])
        a, b, c = a * half, b * half, c * half
        P1 = a if P1 is None else P1 + a
        P2 = b if P2 is None else P2 + b
        P3 = c if P3 is None else P3 + c
    if P1 is None:
        return _Affine.const(zero, prec), _Affine.const(zero, prec)
    hw = hW00 * P1 + hW01 * P2 + hW11 * P3
    hz = hZ00 * P1 + hZ01 * P2 + hZ11 * P3
    return _Affine.const(hw, prec), _Affine.const(hz, prec)


def _attach_singular_split(table: CoeffTable):
    """Exact split W_k = W_k^s/gt + W_k^ns for gamma <= 5/3.

    The singular parts form the pure exp(-xi) mode: with
    s0 = 1 - rt + Rt/2 (rt = (r-1)/gt, Rt = R1/gt),
    W_k^s = (-1)^k s0 and Z_k^s = -W_k^s, so Z_k^s = -Z_{k-1}^s.
    """
    p = table.params
    gt = p.gamma - 1
    if not gt.hi <= mpq(2, 3):
        raise ValueError("SingularSplit is defined for gamma <= 5/3")
    rt = (p.r - 1) / gt
    Rt = table.sonic.R1 / gt
    s0 = 1 - rt + Rt / 2
    Ws, Zs, Wns, Zns = [], [], [], []
    for k in range(table.n_max + 1):
        sgn = 1 if k % 2 == 0 else -1
        wsk = s0 if sgn == 1 else -s0
        zsk = -wsk
        Ws.append(wsk)
        Zs.append(zsk)
        Wns.append(table.W(k) - wsk / gt)
        Zns.append(table.Z(k) - zsk / gt)
    table.Ws, table.Zs, table.Wns, table.Zns = Ws, Zs, Wns, Zns


# ---------------------------------------------------------------------------
# Expansion at the origin P_0
# ---------------------------------------------------------------------------

@dataclass
class OriginSeries:
    """Power series of the profile at the origin: curly-W(zeta) = sum w_i zeta^i.

    w_0 = A is the free amplitude; v and gbar are the auxiliary coefficient
    sequences of the product form of the equation.  The reconstruction is
    W(xi) = exp(-xi) curly-W(exp(xi)), Z(xi) = -exp(-xi) curly-W(-exp(xi)).
    """

    A: float
    gamma: float
    r: float
    w: list
    v: list
    gbar: list
    radius_estimate: float

    def eval_W_curly(self, zeta: float) -> float:
        acc = 0.0
        for c in reversed(self.w):
            acc = acc * zeta + c
        return acc

    def eval_pair(self, zeta: float) -> tuple[float, float]:
        """(W, Z) at xi = log(zeta) for zeta > 0."""
        return (
            self.eval_W_curly(zeta) / zeta,
            -self.eval_W_curly(-zeta) / zeta,
        )

    def reconstructed_coeffs(self, j_max: int) -> list[tuple[float, float]]:
        """(W^o_j, Z^o_j) pairs of the expansion in exp(j xi); the parity
        identity W^o_j = (-1)^j Z^o_j holds by construction."""
        out = []
        for j in range(min(j_max, len(self.w) - 2) + 1):
            wo = self.w[j + 1] * _fac(j)
            zo = (-1) ** j * self.w[j + 1] * _fac(j)
            out.append((wo, zo))
        return out


def coeffs_at_origin(gamma: float, r: float, A: float, n_max: int) -> OriginSeries:
    """Origin expansion coefficients w_i, with w_0 = A, by the quadratic
    recurrence; floating point (this series feeds the non-rigorous solver)."""
    if A == 0:
        raise ZeroAmplitude("amplitude A must be nonzero")
    gamma = float(gamma)
    r = float(r)
    al = (gamma - 1.0) / 2.0
    w = [float(A)]
    v = []
    gb = []

    def v_of(i):
        par = 1.0 + al + (1.0 - al) * (-1.0) ** (i + 1)
        base = w[i] / 2.0 * par
        return base + (1.0 if i == 1 else 0.0)

    def gbar_of(i):
        s = 0.0
        if i % 2 == 0:
            for jj in range(1, i):
                s += w[jj] * w[i - jj + 1]
        return (1.0 - r) * w[i] - al * s

    v.append(v_of(0))
    gb.append(gbar_of(0))
    for n in range(0, n_max):
        lhs = al * w[0] * (n + 1 + (2 if n % 2 == 0 else 0))
        acc = gb[n]
        for i in range(0, n):
            acc -= (i + 1) * v[n - i] * w[i + 1]
        w.append(acc / lhs)
        v.append(v_of(n + 1))
        gb.append(gbar_of(n + 1))

    tail = [abs(c) for c in w[max(2, n_max - 10):] if c != 0.0]
    if len(tail) >= 2:
        growth = (tail[-1] / tail[0]) ** (1.0 / (len(tail) - 1))
        radius = 1.0 / max(growth, 1e-12)
    else:
        radius = 1.0
    return OriginSeries(A=float(A), gamma=gamma, r=r, w=w, v=v, gbar=gb,
                        radius_estimate=radius)


# ---------------------------------------------------------------------------
# Long high-precision run at r = r*
# ---------------------------------------------------------------------------

@dataclass
class LongrunDiagnostics:
    table: CoeffTable
    w_over_z_ok_upto: int       # last i with |W_i/Z_i| < 2 certified
    ratio_window_ok: bool       # bracketing of |Z_{i+1}/Z_i| on [160, n-1]
    ratio_failures: list
    z_final: Interval           # unnormalized Z_{n_max}


def cstar_limit(prec: int = DEFAULT_PREC) -> Interval:
    """C* = (-29 + 12 sqrt 5)/726, the limit of D_{Z,2}/(2 k D_{Z,1})."""
    s5 = iv_sqrt(Interval.point(5, prec))
    return (-29 + 12 * s5) / 726


def cstar_bar(prec: int = DEFAULT_PREC) -> Interval:
    """0.95 C*; |C*bar| lies in (0.00283, 0.00284)."""
    return cstar_limit(prec) * iv(mpq(19, 20), prec)


def longrun_Z(precision_bits: int, n_max: int, gamma="7/5",
              progress=None) -> LongrunDiagnostics:
    """Coefficient run at exactly r = r*(gamma), default gamma = 7/5.

    Uses the (m D_{Z,1} - k D_{Z,1}) denominator form, finite at r*.  Checks
    |W_i/Z_i| < 2 up to i = 160 and the ratio window
    |C*bar|(i+1)^2 < |Z_{i+1}/Z_i| < 3|C*bar|(i+1)^2 for i >= 160.
    """
    if n_max > 2000 and precision_bits < 2000:
        raise ValueError("n_max > 2000 requires >= 2000 bits")
    if n_max > 160 and precision_bits < 512:
        raise ValueError("n_max > 160 requires >= 512 bits")
    prec = precision_bits
    rs = algebra.r_star(gamma, prec)
    p = GasParams.make(gamma, rs, prec)
    table = coeffs_at_Ps(p, n_max, RAW)
    if progress:
        progress("table built")

    cb = iv_abs(cstar_bar(prec))
    w_ok_upto = 0
    for i in range(1, min(160, n_max) + 1):
        # |W_i| < 2 |Z_i|  <=>  2|z_i| - |w_i| > 0
        d = iv_abs(table.Zc[i]).scale_int(2) - iv_abs(table.Wc[i])
        if d.sign() is Sign.POSITIVE:
            w_ok_upto = i
        else:
            break

    failures = []
    for i in range(160, n_max):
        # |Z_{i+1}/Z_i| vs C (i+1)^2, in normalized terms |z_{i+1}/z_i| vs C (i+1)
        zi = iv_abs(table.Zc[i])
        zi1 = iv_abs(table.Zc[i + 1])
        low = zi1 - cb * zi.scale_int(i + 1)
        high = cb.scale_int(3) * zi.scale_int(i + 1) - zi1
        if low.sign() is not Sign.POSITIVE or high.sign() is not Sign.POSITIVE:
            failures.append(i)
            if len(failures) > 20:
                break
    z_final = table.Z(n_max)
    return LongrunDiagnostics(
        table=table,
        w_over_z_ok_upto=w_ok_upto,
        ratio_window_ok=(not failures) and n_max > 160,
        ratio_failures=failures,
        z_final=z_final,
    )


def zn_ratio(table: CoeffTable, i: int) -> Interval:
    """Enclosure of Z_{i+1}/Z_i."""
    return (table.Zc[i + 1] / table.Zc[i]).scale_int(i + 1)


# ---------------------------------------------------------------------------
# Blow-up order diagnostic near a resonance r_n
# ---------------------------------------------------------------------------

def asymptotic_blowup_exponent(table_a: CoeffTable, table_b: CoeffTable,
                               n: int) -> list[dict]:
    """Estimate, per index m, the blow-up order of |Z_m| in 1/|k - n| from
    two tables at nearby r; diagnostic only (non-rigorous floats).

    Flags entries whose estimated order exceeds floor((m-1)/(n-1)).
    """
    ka = float(table_a.sonic.k.mid())
    kb = float(table_b.sonic.k.mid())
    la = abs(ka - n)
    lb = abs(kb - n)
    if min(la, lb) <= 0 or abs(math.log(lb / la)) < 1e-12:
        raise ValueError("tables must sit at distinct distances from r_n")
    out = []
    for m in range(0, min(table_a.n_max, table_b.n_max) + 1):
        za = abs(float(table_a.Z(m).mid()))
        zb = abs(float(table_b.Z(m).mid()))
        if za == 0 or zb == 0:
            est = 0.0
        else:
            est = math.log(zb / za) / math.log(la / lb)
        cap = (m - 1) // (n - 1) if m >= 1 else 0
        out.append({
            "m": m,
            "estimated_order": est,
            "max_expected": cap,
            "flagged": est > cap + 0.35,
        })
    return out
