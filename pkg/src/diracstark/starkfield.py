"""Two point wells in a constant field: solutions, m-functions and spectral density.

Between and beyond the wells the spinor is a combination of the two
parabolic-cylinder spinors

    phi1 = (U1 + U1~, -i (U1 - U1~)),   phi2 = (U2 + U2~, -i (U2 - U2~))

evaluated at y(x).  phi1 is the one that survives at x -> +inf and phi2 the
one that survives at x -> -inf (for Im E > 0).  Everything below only needs
these spinors up to a constant factor per order, which is what lets values
spanning hundreds of decades be carried as scaled pairs.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import mpmath

from . import pcf
from .model import ModelParams, jump_matrix_left, jump_matrix_right
from .zerofield import SpectralSample


@dataclass(frozen=True)
class FieldBasis:
    """Coefficients of u, v in the central region and of the exterior solutions.

    c1, c2 (for u) and c1p, c2p (for v) multiply phi1, phi2 normalised to
    unit scale at x = 0; b2, b2p multiply phi2 right of +R and a1, a1p
    multiply phi1 left of -R, each relative to the scaled spinors at the
    well.  ``u`` and ``v`` hold the central solutions at (-R, 0, R).
    """

    c1: complex
    c2: complex
    c1p: complex
    c2p: complex
    b2: complex
    b2p: complex
    a1: complex
    a1p: complex
    u: tuple
    v: tuple
    ill_conditioned: bool = False


@dataclass(frozen=True)
class BoundaryConstants:
    Gu_minus: complex
    Gu_plus: complex
    Gv_minus: complex
    Gv_plus: complex
    Hu_plus: complex
    Hu_minus: complex
    Hv_plus: complex
    Hv_minus: complex


@dataclass(frozen=True)
class MPair:
    m_plus: complex
    m_minus: complex
    pole: bool = False


@dataclass
class _Point:
    """The four basis functions at one x, U1 pair and U2 pair each with its own log scale."""

    y: complex
    u1: object
    u2: object
    u1t: object
    u2t: object
    s1: float
    s2: float


def width_estimate(E: float, params: ModelParams) -> float:
    """Rough decay width of a level at E in the gap: the tunnelling factor to the upper continuum."""
    mc2 = params.mc2
    e = min(max(E / mc2, -1.0), 1.0)
    # integral of sqrt(1 - t^2) from e to 1
    area = (math.pi / 2 - (e * math.sqrt(1 - e * e) + math.asin(e))) / 2
    expo = 2 * mc2 * mc2 * area / (params.c * params.F)
    return math.exp(-expo) if expo < 745 else 0.0


class FieldEvaluator:
    """Evaluates the basis functions at y(-R), y(0), y(R) for one parameter set.

    ``digits=None`` works in doubles, falling back to high precision for any
    value the double routes cannot certify.  With ``digits`` set, everything
    (energy included) is carried in mpmath at that precision, which is how
    widths far below double resolution are resolved.
    """

    def __init__(self, params: ModelParams, digits: Optional[int] = None):
        if not params.F > 0:
            raise ValueError("the field solutions need F > 0")
        self.params = params
        self.digits = digits
        self.a = pcf.field_order(params)
        fallback_bits = 80 if digits is None else int(digits * 3.33) + 16
        self._caches = {
            1: pcf.WeberCache(self.a, fallback_bits),
            2: pcf.WeberCache(-self.a, fallback_bits),
        }

    @property
    def exact(self) -> bool:
        return self.digits is not None

    def _pair(self, which, z):
        """(log scale, w, dw) for U(+-a, z)."""
        if not self.exact:
            r = pcf.u_pair_double(self.a if which == 1 else -self.a, complex(z))
            if r is not None:
                return r.log_scale, r.w, r.dw
        with mpmath.workdps((self.digits or 20) + 10):
            s = self._caches[which].pair(z)
            if self.exact:
                return 0.0, s.w, s.dw
            n = max(abs(s.w), abs(s.dw))
            return float(mpmath.log(n)), complex(s.w / n), complex(s.dw / n)

    def point(self, E, x) -> _Point:
        p = self.params
        if self.exact:
            with mpmath.workdps(self.digits + 10):
                E = mpmath.mpc(E)
                y = pcf.field_argument(p, E, mpmath.mpf(x))
                s1, w1, d1 = self._pair(1, y)
                s2, w2, d2 = self._pair(2, mpmath.mpc(0, -1) * y)
                u1, u2, u1t, u2t = pcf.quad_from_pairs(p, y, (w1, d1), (w2, d2), mpmath.mp)
        else:
            y = pcf.field_argument(p, complex(E), x)
            s1, w1, d1 = self._pair(1, y)
            s2, w2, d2 = self._pair(2, -1j * y)
            u1, u2, u1t, u2t = pcf.quad_from_pairs(p, y, (w1, d1), (w2, d2))
        return _Point(y, u1, u2, u1t, u2t, s1, s2)

    def points(self, E):
        R = self.params.R
        return self.point(E, -R), self.point(E, 0.0), self.point(E, R)


def _spinors(pt: _Point):
    phi1 = (pt.u1 + pt.u1t, -1j * (pt.u1 - pt.u1t))
    phi2 = (pt.u2 + pt.u2t, -1j * (pt.u2 - pt.u2t))
    return phi1, phi2


def _exp(x, exact):
    return mpmath.exp(x) if exact else math.exp(x)


def _central(ev: FieldEvaluator, pts):
    """c-coefficients and u, v at (-R, 0, R).  Returns also the digits lost to
    the near-dependence of phi1 and phi2 at x = 0 (inf when fully lost)."""
    left, mid, right = pts
    exact = ev.exact
    f1, f2 = _spinors(mid)
    det = f1[0] * f2[1] - f1[1] * f2[0]
    scale = max(abs(f1[0] * f2[1]), abs(f1[1] * f2[0]))
    lost = math.inf if det == 0 else float(mpmath.log10(scale / abs(det))) if exact \
        else math.log10(scale / abs(det))
    if det == 0:
        return None, None, None, lost
    # Phi(0)^-1 columns: coefficients of u = (1,0) and v = (0,1)
    c1, c2 = f2[1] / det, -f1[1] / det
    c1p, c2p = -f2[0] / det, f1[0] / det
    out_u = []
    out_v = []
    for pt in (left, mid, right):
        g1, g2 = _spinors(pt)
        r1 = _exp(pt.s1 - mid.s1, exact)
        r2 = _exp(pt.s2 - mid.s2, exact)
        out_u.append(tuple(c1 * r1 * g1[i] + c2 * r2 * g2[i] for i in range(2)))
        out_v.append(tuple(c1p * r1 * g1[i] + c2p * r2 * g2[i] for i in range(2)))
    return (c1, c2, c1p, c2p), tuple(out_u), tuple(out_v), lost


def _boundary(params, u, v):
    right = jump_matrix_right(params)
    left = jump_matrix_left(params)
    gu_m, gu_p = right.apply(*u[2])
    gv_m, gv_p = right.apply(*v[2])
    hu_p, hu_m = left.apply(*u[0])
    hv_p, hv_m = left.apply(*v[0])
    return BoundaryConstants(gu_m, gu_p, gv_m, gv_p, hu_p, hu_m, hv_p, hv_m)


def _pq(bc: BoundaryConstants, pts):
    """P_u, P_v (right side, phi1 projection) and Q_u, Q_v (left side, phi2)."""
    left, _, right = pts
    U1p = right.u1 + right.u1t
    U1m = right.u1 - right.u1t
    U2p = left.u2 + left.u2t
    U2m = left.u2 - left.u2t
    Pu = 1j * bc.Gu_plus * U1p - bc.Gu_minus * U1m
    Pv = 1j * bc.Gv_plus * U1p - bc.Gv_minus * U1m
    Qu = 1j * bc.Hu_minus * U2p - bc.Hu_plus * U2m
    Qv = 1j * bc.Hv_minus * U2p - bc.Hv_plus * U2m
    return Pu, Pv, Qu, Qv


class FieldState:
    """Everything derived from the basis functions at one energy.

    Off the real axis phi1 and phi2 can agree to many digits at x = 0.  A
    double-precision evaluator then hands the energy to mpmath with enough
    extra digits; the public results are converted back to doubles.
    """

    def __init__(self, E, params: ModelParams, evaluator: Optional[FieldEvaluator] = None):
        self.E = E
        self.params = params
        ev = evaluator or FieldEvaluator(params)
        self.double_out = not ev.exact
        # the double routes deliver about 12 good digits, not 16
        budget = ev.digits if ev.exact else 12
        while True:
            self.ev = ev
            with mpmath.workdps((ev.digits or 5) + 10):
                self.pts = ev.points(E)
                coeffs, u, v, lost = _central(ev, self.pts)
            if lost < budget - 8:
                break
            if ev.exact and not self.double_out:
                if coeffs is None:
                    raise ZeroDivisionError("the two field solutions are dependent at x = 0")
                break
            digits = 30 if not ev.exact else 2 * ev.digits
            if not math.isinf(lost):
                digits = max(digits, int(lost) + 24)
            if digits > 2000:
                raise ArithmeticError(f"phi1 and phi2 are dependent beyond reach at E={E}")
            ev = FieldEvaluator(params, digits)
            budget = digits
        self.lost_digits = lost
        self.promoted = self.double_out and ev.exact
        self.ill = lost > budget - 8
        self.coeffs = coeffs
        self.u, self.v = u, v
        with mpmath.workdps((ev.digits or 5) + 10):
            self.bc = _boundary(params, self.u, self.v)
            self.P_u, self.P_v, self.Q_u, self.Q_v = _pq(self.bc, self.pts)
        self._basis = None
        if self.promoted:
            with mpmath.workdps(ev.digits):
                self._to_double()

    def _to_double(self):
        """Bring a promoted evaluation back to plain complex numbers."""
        conv = lambda t: tuple(complex(x) for x in t)
        b = self._make_basis()
        self._basis = FieldBasis(*conv((b.c1, b.c2, b.c1p, b.c2p, b.b2, b.b2p, b.a1, b.a1p)),
                                 tuple(conv(t) for t in b.u), tuple(conv(t) for t in b.v), b.ill_conditioned)
        self.coeffs = conv(self.coeffs)
        self.u, self.v = self._basis.u, self._basis.v
        self.bc = BoundaryConstants(*conv(vars(self.bc).values()))
        # P and Q grow with the basis functions; ratios and D only need each
        # pair up to a common factor
        sp = max(abs(self.P_u), abs(self.P_v))
        sq = max(abs(self.Q_u), abs(self.Q_v))
        self.P_u, self.P_v = complex(self.P_u / sp), complex(self.P_v / sp)
        self.Q_u, self.Q_v = complex(self.Q_u / sq), complex(self.Q_v / sq)

    def _make_basis(self) -> FieldBasis:
        left, _, right = self.pts
        # b2 = P/(2W) and a1 = -Q/(2W) with W = U1~ U2 - U1 U2~ at the well
        wr = right.u1t * right.u2 - right.u1 * right.u2t
        wl = left.u1t * left.u2 - left.u1 * left.u2t
        c1, c2, c1p, c2p = self.coeffs
        return FieldBasis(c1, c2, c1p, c2p,
                          self.P_u / (2 * wr), self.P_v / (2 * wr),
                          -self.Q_u / (2 * wl), -self.Q_v / (2 * wl),
                          self.u, self.v, self.ill)

    def basis(self) -> FieldBasis:
        return self._basis if self._basis is not None else self._make_basis()

    def m_pair(self) -> MPair:
        if self.P_v == 0 or self.Q_v == 0:
            return MPair(math.inf, math.inf, True)
        return MPair(-self.P_u / self.P_v, -self.Q_u / self.Q_v)

    def denominator(self):
        """P_u Q_v - Q_u P_v divided by the larger of its two products."""
        t1 = self.P_u * self.Q_v
        t2 = self.Q_u * self.P_v
        n = max(abs(t1), abs(t2))
        if n == 0:
            return t1 - t2
        return (t1 - t2) / n

    def density(self) -> float:
        """(1/pi) Im[(m+ m- + 1)/(m+ - m-)] = (1/pi) Im[-(P_u Q_u + P_v Q_v)/D]."""
        d = self.P_u * self.Q_v - self.Q_u * self.P_v
        if d == 0:
            return math.inf
        val = -(self.P_u * self.Q_u + self.P_v * self.Q_v) / d
        return val.imag / math.pi if isinstance(val, complex) else float(mpmath.im(val) / mpmath.pi)


def central_basis(E, params: ModelParams) -> FieldBasis:
    return FieldState(E, params).basis()


def boundary_constants(E, params: ModelParams) -> BoundaryConstants:
    return FieldState(E, params).bc


def m_functions(E, params: ModelParams) -> MPair:
    return FieldState(E, params).m_pair()


def pole_denominator(E, params: ModelParams, evaluator: Optional[FieldEvaluator] = None):
    return FieldState(E, params, evaluator).denominator()


def stark_density(E: float, params: ModelParams,
                  evaluator: Optional[FieldEvaluator] = None) -> SpectralSample:
    st = FieldState(E, params, evaluator)
    rho = st.density()
    gap = abs(E) < params.mc2
    if not math.isfinite(rho):
        return SpectralSample(E, rho, gap, "pole")
    return SpectralSample(E, rho, gap, "ill-conditioned" if st.ill else None)


def default_grid(emin: float = -8.0, emax: float = 8.0, n: int = 4001):
    """Midpoints of n equal cells on [emin, emax]; the half-step offset keeps
    the default grid off E = +-mc^2."""
    h = (emax - emin) / n
    return [emin + (i + 0.5) * h for i in range(n)]


def density_on_grid(energies, params: ModelParams):
    ev = FieldEvaluator(params)
    return [stark_density(E, params, ev) for E in energies]


def density_diagnostic(E: float, params: ModelParams, eps: float = 1e-8) -> float:
    """Relative change of m+ when E moves to E + i eps."""
    m0 = m_functions(E, params).m_plus
    m1 = m_functions(complex(E, eps), params).m_plus
    return abs(m1 - m0) / abs(m0)
