"""Parabolic cylinder function U(a, z) for complex order and argument.

U solves the Weber equation w'' = (z^2/4 + a) w.  Near the origin it is
summed as a Taylor series in fixed-point integer arithmetic, with as many
bits as the cancellation in the series demands; far from the origin the
descending asymptotic expansion is used.  Results are exposed either as
mpmath numbers (which carry their own exponent and never overflow) or as a
:class:`PcfValue` holding log-modulus and phase.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import mpmath
from mpmath.libmp import from_man_exp, to_fixed

LN2 = math.log(2.0)
DEFAULT_DIGITS = 30
MAX_BITS = 1 << 20


class PcfAccuracyWarning(UserWarning):
    """Two evaluation regimes disagree, or a result is near a sector boundary."""


class PcfPrecisionError(ArithmeticError):
    """The requested accuracy needs more working precision than allowed."""


@dataclass(frozen=True)
class PcfValue:
    """A complex number stored as log-modulus and phase in (-pi, pi]."""

    log_modulus: float
    phase: float

    @classmethod
    def from_number(cls, w) -> "PcfValue":
        w = mpmath.mpc(w)
        if w == 0:
            return cls(-math.inf, 0.0)
        return cls(float(mpmath.log(abs(w))), float(mpmath.arg(w)))

    def to_mpc(self):
        if self.log_modulus == -math.inf:
            return mpmath.mpc(0)
        return mpmath.exp(mpmath.mpc(self.log_modulus, self.phase))

    def to_complex(self) -> complex:
        """Plain complex value; raises OverflowError when out of double range."""
        if self.log_modulus == -math.inf:
            return 0j
        return cmath.exp(complex(self.log_modulus, self.phase))

    def log(self) -> complex:
        return complex(self.log_modulus, self.phase)

    def __mul__(self, other: "PcfValue") -> "PcfValue":
        phase = math.remainder(self.phase + other.phase, 2 * math.pi)
        if phase == -math.pi:
            phase = math.pi
        return PcfValue(self.log_modulus + other.log_modulus, phase)

    def __truediv__(self, other: "PcfValue") -> "PcfValue":
        return self * PcfValue(-other.log_modulus, -other.phase)


@dataclass(frozen=True)
class PcfQuad:
    """U1, U2 and the paired components U1~, U2~ at one point y(x)."""

    u1: PcfValue
    u2: PcfValue
    u1_tilde: PcfValue
    u2_tilde: PcfValue
    y: complex


def z_switch(a) -> float:
    """Radius beyond which the asymptotic expansion replaces the series."""
    return 6.0 * max(4.0 / 3.0, math.sqrt(abs(complex(a))))


# --------------------------------------------------------------------------
# values at the origin

def _rgamma(s):
    """1/Gamma(s) through loggamma, which is far cheaper at high precision."""
    if s.imag == 0 and s.real <= 0 and s.real == mpmath.floor(s.real):
        return mpmath.mpc(0)
    return mpmath.exp(-mpmath.loggamma(s))


@lru_cache(maxsize=256)
def _origin_cached(a_re, a_im, bits):
    with mpmath.workprec(bits + 20):
        a = mpmath.mpc(a_re, a_im)
        sqpi = mpmath.sqrt(mpmath.pi)
        quarter = mpmath.mpf(1) / 4
        u0 = sqpi * mpmath.power(2, -a / 2 - quarter) * _rgamma(3 * quarter + a / 2)
        du0 = -sqpi * mpmath.power(2, -a / 2 + quarter) * _rgamma(quarter + a / 2)
    return u0, du0


def origin_values(a, bits: int = 128):
    """U(a, 0) and U'(a, 0) from their Gamma-function closed forms."""
    a = mpmath.mpc(a)
    return _origin_cached(a.real, a.imag, int(bits))


# --------------------------------------------------------------------------
# Taylor stepping in fixed point

def _fix(x, prec):
    re, im = x._mpc_
    return to_fixed(re, prec), to_fixed(im, prec)


def _unfix(n, prec):
    return mpmath.mpf(from_man_exp(int(n), -prec))


def _bits(x) -> int:
    return max(abs(x[0]).bit_length(), abs(x[1]).bit_length())


def _log2abs(w) -> float:
    if w == 0:
        return -math.inf
    return float(mpmath.log(abs(w), 2))


def _growth_bits(a, z0, h) -> float:
    """Upper estimate (in bits) of how much the Taylor terms can grow over a step."""
    q0 = abs(complex(mpmath.mpc(z0) ** 2 / 4 + a))
    q1 = abs(complex(z0)) / 2
    r = abs(complex(h))
    n = 32
    total = 0.0
    for k in range(n):
        s = r * (k + 0.5) / n
        total += math.sqrt(q0 + q1 * s + s * s / 4)
    return total * r / n / LN2


def _taylor_fixed(a, z0, w, dw, h, prec):
    """Sum the Taylor series of the Weber solution about z0, evaluated at z0 + h.

    Works with integers scaled by 2**prec.  Returns (S, DS, terms, maxbits)
    where S/2**prec is w(z0+h) and DS/2**prec is h*w'(z0+h).
    """
    pc = prec + 24
    c0 = (mpmath.mpc(z0) ** 2 / 4 + a) * h * h
    c1 = (mpmath.mpc(z0) / 2) * h ** 3
    c2 = h ** 4 / 4
    coeffs = []
    for c in (c0, c1, c2):
        cr, ci = _fix(c, pc)
        coeffs.append((cr, ci, cr + ci, ci - cr, cr != 0 or ci != 0))
    bound = 4.0 * (abs(complex(c0)) + abs(complex(c1)) + abs(complex(c2))) + 8

    t0 = _fix(mpmath.mpc(w), prec)
    t1 = _fix(mpmath.mpc(dw) * h, prec)
    hist = [(0, 0), (0, 0), t0, t1]
    sr, si = t0[0] + t1[0], t0[1] + t1[1]
    dr, di = t1
    maxbits = max(_bits(t0), _bits(t1))
    quiet = 0
    n = 2
    while True:
        accr = acci = 0
        for (cr, ci, cs, cd, live), (xr, xi) in zip(coeffs, (hist[-2], hist[-3], hist[-4])):
            if not live or (xr == 0 and xi == 0):
                continue
            if ci == 0:
                accr += cr * xr
                acci += cr * xi
            else:
                k1 = cr * (xr + xi)
                accr += k1 - xi * cs
                acci += k1 + xr * cd
        d = n * (n - 1)
        tr = (accr >> pc) // d
        ti = (acci >> pc) // d
        hist.append((tr, ti))
        del hist[0]
        sr += tr
        si += ti
        dr += n * tr
        di += n * ti
        b = max(abs(tr).bit_length(), abs(ti).bit_length())
        if b > maxbits:
            maxbits = b
        if d > bound and b <= 2:
            quiet += 1
            if quiet >= 4:
                break
        else:
            quiet = 0
        n += 1
    return (sr, si), (dr, di), n, maxbits


class StepResult:
    """Value and derivative of a Weber solution at z, with accuracy in bits."""

    __slots__ = ("z", "w", "dw", "acc")

    def __init__(self, z, w, dw, acc):
        self.z = z
        self.w = w
        self.dw = dw
        self.acc = acc

    def __repr__(self):
        return f"StepResult(z={self.z}, w={mpmath.nstr(self.w, 8)}, acc={self.acc:.0f})"


def origin_start(a, bits: int) -> StepResult:
    u0, du0 = origin_values(a, bits)
    return StepResult(mpmath.mpc(0), u0, du0, float(bits))


def taylor_step(a, start, z, target_bits: int, max_bits: int = MAX_BITS) -> StepResult:
    """Continue a Weber solution from ``start.z`` to ``z`` in one Taylor step.

    ``start`` is a StepResult, None to start from U(a, .) at the origin, or a
    callable mapping a bit count to a StepResult (origin data evaluated at
    whatever precision the step ends up using).  The working
    precision is raised until the result carries ``target_bits`` correct bits
    or the accuracy of ``start`` becomes the limit.
    """
    a = mpmath.mpc(a)
    z = mpmath.mpc(z)
    z0 = mpmath.mpc(start.z) if isinstance(start, StepResult) else mpmath.mpc(0)
    h = z - z0
    growth = _growth_bits(a, z0, h)
    bits = int(target_bits + 2 * growth + 64)
    while True:
        if bits > max_bits:
            raise PcfPrecisionError(f"Taylor step needs more than {max_bits} bits")
        if start is None:
            src = origin_start(a, bits)
        elif callable(start):
            src = start(bits)
        else:
            src = start
        if h == 0:
            return StepResult(z, src.w, src.dw, src.acc)
        e0 = max(_log2abs(src.w), _log2abs(src.dw * h))
        if e0 == -math.inf:
            return StepResult(z, mpmath.mpc(0), mpmath.mpc(0), src.acc)
        # the equation is linear: work on values scaled to about one
        shift = int(math.floor(e0))
        prec = bits
        with mpmath.workprec(bits + 64):
            s, ds, nterms, maxbits = _taylor_fixed(a, z0, mpmath.ldexp(src.w.real, -shift) + 1j * mpmath.ldexp(src.w.imag, -shift),
                                                   mpmath.ldexp(src.dw.real, -shift) + 1j * mpmath.ldexp(src.dw.imag, -shift), h, prec)
            w = mpmath.mpc(_unfix(s[0], prec), _unfix(s[1], prec))
            dwh = mpmath.mpc(_unfix(ds[0], prec), _unfix(ds[1], prec))
        lmax = maxbits - prec
        lw = _log2abs(w)
        ldw = _log2abs(dwh)
        with mpmath.workprec(bits + 64):
            w = mpmath.ldexp(w.real, shift) + 1j * mpmath.ldexp(w.imag, shift)
            dwh = mpmath.ldexp(dwh.real, shift) + 1j * mpmath.ldexp(dwh.imag, shift)
            dw = dwh / h
        ln = math.log2(nterms)
        # an ulp lost early in the recurrence is amplified like the terms themselves
        acc_round = min(lw - lmax + bits - ln, ldw - lmax + bits - 2 * ln) - 2
        acc_inherited = min(lw, ldw) - lmax + src.acc
        acc = min(acc_round, acc_inherited)
        if acc_round >= target_bits or (isinstance(start, StepResult) and acc_round >= acc_inherited + 8):
            return StepResult(z, w, dw, acc)
        bits += int(target_bits - acc_round) + 64


# --------------------------------------------------------------------------
# Taylor stepping in double precision

def _step_complex(q0, q1, h, w, dw):
    """One Taylor step in complex doubles.  Returns (w, dw, maxterm)."""
    c0 = q0 * h * h
    c1 = q1 * h ** 3
    c2 = h ** 4 / 4
    t0 = w
    t1 = dw * h
    tm3 = tm4 = 0j
    tm2, tm1 = t0, t1
    s = t0 + t1
    ds = t1
    biggest = max(abs(t0), abs(t1))
    bound = 4.0 * (abs(c0) + abs(c1) + abs(c2)) + 8
    quiet = 0
    n = 2
    while n < 400:
        t = (c0 * tm2 + c1 * tm3 + c2 * tm4) / (n * (n - 1))
        s += t
        ds += n * t
        at = abs(t)
        if at > biggest:
            biggest = at
        if n * (n - 1) > bound and at <= 1e-18 * biggest:
            quiet += 1
            if quiet >= 3:
                break
        else:
            quiet = 0
        tm4, tm3, tm2, tm1 = tm3, tm2, tm1, t
        n += 1
    return s, ds / h, biggest


def walk_complex(a: complex, z0: complex, w: complex, dw: complex, z1: complex,
                 reach: float = 1.5):
    """March a Weber solution from z0 to z1 in double precision.

    Steps are short enough that each local Taylor series converges quickly.
    Returns (w, dw, bits) where ``bits`` estimates the correct bits left
    after cancellation in every step has been accounted for.
    """
    a = complex(a)
    dz = z1 - z0
    length = abs(dz)
    if length == 0:
        return w, dw, 52.0
    rate = math.sqrt(abs(z0 * z0 / 4 + a) + abs(z0) * length / 2 + length * length / 4)
    nsteps = max(1, int(math.ceil(length * rate / reach)))
    h = dz / nsteps
    lost = 0.0
    z = z0
    for _ in range(nsteps):
        w, dw, biggest = _step_complex(z * z / 4 + a, z / 2, h, w, dw)
        z += h
        scale = max(abs(w), abs(dw * h))
        if scale == 0.0 or not math.isfinite(scale):
            return w, dw, -math.inf
        if biggest > scale:
            lost += math.log2(biggest / scale)
    return w, dw, 52.0 - lost - math.log2(nsteps + 1)


# --------------------------------------------------------------------------
# descending asymptotic expansion

def _descending(ctx, p, z, sign, rel_tol, max_terms=2000):
    """Sum sign^s (p)_{2s} / (s! (2 z^2)^s) with its derivative companion.

    The companion carries the factor (sign*z/2 - (p+2s)/z) that comes from
    differentiating exp(sign*z^2/4) z^(-p-2s).  Summation stops at the
    requested tolerance or at the smallest term once the series diverges.
    """
    inv = 1 / (2 * z * z)
    half_z = sign * z / 2
    t = ctx.mpc(1)
    w = t
    d = t * (half_z - p / z)
    last = ctx.mpf(1)
    s = 0
    while True:
        nxt = t * sign * (p + 2 * s) * (p + 2 * s + 1) * inv / (s + 1)
        an = abs(nxt)
        if an >= last and s > 0:
            return w, d, last
        s += 1
        t = nxt
        w += t
        d += t * (half_z - (p + 2 * s) / z)
        last = an
        if an <= rel_tol * abs(w) or s >= max_terms:
            return w, d, an


def asymptotic_pair(a, z, ctx=mpmath.mp, rel_tol=None):
    """U(a, z) and U'(a, z) from the descending expansion.

    For |arg z| <= pi/2 only the exp(-z^2/4) series is kept.  Beyond that the
    exp(+z^2/4) series is added with the connection coefficient
    +-i sqrt(2 pi)/Gamma(1/2 + a) exp(-+i pi a), sign following arg z.
    Returns (U, U', relative error estimate).
    """
    if rel_tol is None:
        rel_tol = ctx.eps
    a = ctx.mpc(a)
    z = ctx.mpc(z)
    half = ctx.mpf(1) / 2
    logz = ctx.log(z)
    w1, d1, e1 = _descending(ctx, a + half, z, -1, rel_tol)
    l1 = -z * z / 4 - (a + half) * logz
    f1 = ctx.exp(l1)
    u = f1 * w1
    du = f1 * d1
    err = abs(f1) * e1
    theta = float(ctx.im(logz))
    if abs(theta) > math.pi / 2:
        sg = 1 if theta > 0 else -1
        rg = _rgamma_ctx(ctx, half + a)
        if rg != 0:
            w2, d2, e2 = _descending(ctx, half - a, z, 1, rel_tol)
            coef = sg * 1j * ctx.sqrt(2 * ctx.pi) * rg
            l2 = z * z / 4 - (half - a) * logz - sg * 1j * ctx.pi * a
            f2 = coef * ctx.exp(l2)
            u += f2 * w2
            du += f2 * d2
            err += abs(f2) * e2
    scale = abs(u)
    rel = err / scale if scale else ctx.inf
    return u, du, float(rel)


def _rgamma_ctx(ctx, s):
    if ctx is mpmath.mp:
        return _rgamma(s)
    return ctx.rgamma(s)


def stokes_margin(a, z) -> float:
    """Size of the exp(+z^2/4) contribution relative to U near the Stokes line.

    The expansion switches that contribution on at |arg z| = pi/2; the
    switch is invisible only if the contribution is negligible there.
    """
    a = complex(a)
    z = complex(z)
    theta = cmath.phase(z)
    if abs(abs(theta) - math.pi / 2) > 0.25:
        return 0.0
    lz = cmath.log(z)
    ratio = (z * z / 2).real + (2 * a * lz).real
    try:
        ratio += math.log(2 * math.pi) / 2 - mpmath.re(mpmath.loggamma(0.5 + a))
    except (ValueError, ZeroDivisionError):
        return 0.0
    ratio += math.pi * abs(a.imag)
    return math.exp(min(ratio, 700.0))


# --------------------------------------------------------------------------
# public evaluators

def _bits_for(digits: int) -> int:
    return int(math.ceil(digits * math.log2(10))) + 8


def pcf_u_pair(a, z, digits: int = DEFAULT_DIGITS):
    """U(a, z) and U'(a, z) as mpmath numbers correct to about ``digits`` digits."""
    a = mpmath.mpc(a)
    z = mpmath.mpc(z)
    if abs(z) >= z_switch(complex(a)):
        with mpmath.workdps(digits + 10):
            u, du, rel = asymptotic_pair(a, z, mpmath.mp, mpmath.mpf(10) ** (-digits - 5))
        if rel < 10.0 ** (-digits):
            return u, du
    r = taylor_step(a, None, z, _bits_for(digits))
    return r.w, r.dw


def pcf_u(a, z) -> PcfValue:
    """U(a, z) as a PcfValue.

    The series covers |z| <= z_switch and the asymptotic expansion the rest.
    Just outside the switch radius both are computed and compared; a
    disagreement beyond 1e-6 raises a PcfAccuracyWarning.
    """
    a = complex(a)
    z = complex(z)
    zs = z_switch(a)
    if abs(z) <= zs:
        r = taylor_step(a, None, z, _bits_for(DEFAULT_DIGITS))
        return PcfValue.from_number(r.w)
    with mpmath.workdps(DEFAULT_DIGITS + 10):
        u, _, rel = asymptotic_pair(a, z, mpmath.mp, mpmath.mpf(10) ** (-DEFAULT_DIGITS))
    if abs(z) <= 1.25 * zs:
        s = taylor_step(a, None, z, _bits_for(DEFAULT_DIGITS)).w
        if abs(u - s) > 1e-6 * abs(s):
            warnings.warn(f"series and asymptotic regimes disagree at a={a}, z={z}",
                          PcfAccuracyWarning, stacklevel=2)
        if rel > 1e-10:
            u = s
    elif rel > 1e-10:
        u = taylor_step(a, None, z, _bits_for(DEFAULT_DIGITS)).w
    return PcfValue.from_number(u)


def pcf_asymptotic(a, z) -> PcfValue:
    """U(a, z) from the descending expansion alone; needs |z| >= z_switch(a)."""
    a = complex(a)
    z = complex(z)
    # the circle itself belongs to both regimes; allow for roundoff in |z|
    if abs(z) < z_switch(a) * (1 - 1e-12):
        raise ValueError(f"|z| = {abs(z):.6g} is inside the series radius {z_switch(a):.6g}")
    if stokes_margin(a, z) > 1e-10:
        warnings.warn(f"z={z} lies near the Stokes line arg z = +-pi/2", PcfAccuracyWarning,
                      stacklevel=2)
    with mpmath.workdps(DEFAULT_DIGITS + 10):
        u, _, rel = asymptotic_pair(a, z, mpmath.mp, mpmath.mpf(10) ** (-DEFAULT_DIGITS))
    if rel > 1e-8:
        warnings.warn(f"asymptotic expansion only reaches {rel:.1e} at a={a}, z={z}",
                      PcfAccuracyWarning, stacklevel=2)
    return PcfValue.from_number(u)


def pcf_recurrence_check(a, z) -> float:
    """Scaled residual of the two three-term recurrences linking U(a-1), U(a), U(a+1)."""
    a = mpmath.mpc(a)
    z = mpmath.mpc(z)
    with mpmath.workdps(DEFAULT_DIGITS):
        u, du = pcf_u_pair(a, z)
        up, _ = pcf_u_pair(a + 1, z)
        um, _ = pcf_u_pair(a - 1, z)
        half = mpmath.mpf(1) / 2
        parts1 = (half * z * u, du, (a + half) * up)
        parts2 = (half * z * u, -du, -um)
        scale = max(abs(x) for x in parts1 + parts2)
        if scale == 0:
            return 0.0
        res = abs(sum(parts1)) + abs(sum(parts2))
        return float(res / scale)


# --------------------------------------------------------------------------
# fast paths used by the field solutions

@dataclass(frozen=True)
class ScaledPair:
    """U and U' at z as exp(log_scale) * (w, dw); mpmath numbers or complex doubles."""

    z: complex
    log_scale: float
    w: object
    dw: object


def _asymptotic_scaled(a: complex, z: complex):
    """Double-precision descending expansion with the exponentials kept in log form."""
    fp = mpmath.fp
    logz = cmath.log(z)
    w1, d1, e1 = _descending(fp, a + 0.5, z, -1, 1e-17)
    l1 = -z * z / 4 - (a + 0.5) * logz
    terms = [(l1, w1, d1, e1)]
    if abs(logz.imag) > math.pi / 2:
        sg = 1 if logz.imag > 0 else -1
        try:
            lg = complex(fp.loggamma(0.5 + a))
        except (ValueError, ZeroDivisionError):
            lg = None
        if lg is not None:
            w2, d2, e2 = _descending(fp, 0.5 - a, z, 1, 1e-17)
            l2 = (z * z / 4 - (0.5 - a) * logz - sg * 1j * math.pi * a
                  + 0.5 * math.log(2 * math.pi) - lg + sg * 1j * math.pi / 2)
            terms.append((l2, w2, d2, e2))
    ls = max(t[0].real for t in terms)
    w = dw = 0j
    err = 0.0
    for l, wk, dk, ek in terms:
        f = cmath.exp(l - ls)
        w += f * complex(wk)
        dw += f * complex(dk)
        err += abs(f) * float(ek)
    rel = err / abs(w) if w != 0 else math.inf
    return ls, w, dw, rel


@lru_cache(maxsize=64)
def _origin_double(a: complex):
    u0, du0 = origin_values(a, 64)
    n = max(abs(u0), abs(du0))
    ls = float(mpmath.log(n))
    return ls, complex(u0 / n), complex(du0 / n)


def u_pair_double(a, z, min_bits: float = 44.0):
    """U(a, z), U'(a, z) in double precision, or None when that cannot be trusted.

    Uses the asymptotic expansion when it converges to roundoff, otherwise a
    Taylor walk out from the origin.  ``min_bits`` is the accuracy demanded of
    the walk.
    """
    a = complex(a)
    z = complex(z)
    if abs(z) >= z_switch(a):
        ls, w, dw, rel = _asymptotic_scaled(a, z)
        if rel < 1e-14 and math.isfinite(ls):
            return ScaledPair(z, ls, w, dw)
    ls, w0, dw0 = _origin_double(a)
    w, dw, bits = walk_complex(a, 0j, w0, dw0, z)
    if bits >= min_bits:
        return ScaledPair(z, ls, w, dw)
    # U may shrink on the way out; then come in from the asymptotic zone instead
    if z != 0:
        far = z / abs(z) * 1.05 * z_switch(a)
        ls, wf, dwf, rel = _asymptotic_scaled(a, far)
        if rel < 1e-14 and math.isfinite(ls):
            w, dw, bits = walk_complex(a, far, wf, dwf, z)
            if bits >= min_bits:
                return ScaledPair(z, ls, w, dw)
    return None


class WeberCache:
    """High-precision U(a, .) for one order, reusing earlier points as Taylor anchors.

    Evaluating far from the origin at large |a| needs thousands of bits, so
    the first value near some region is costly.  Later values nearby are a
    short Taylor step away from it.
    """

    def __init__(self, a, bits: int, reach: float = 2.0):
        self.a = mpmath.mpc(a)
        self.bits = int(bits)
        self.reach = reach
        self.anchors = []

    def _nearest(self, z):
        best = None
        for s in self.anchors:
            d = abs(complex(z - s.z))
            if d <= self.reach and (best is None or d < best[0]):
                best = (d, s)
        return best[1] if best else None

    def pair(self, z) -> StepResult:
        z = mpmath.mpc(z)
        ca = complex(self.a)
        if abs(complex(z)) >= z_switch(ca):
            with mpmath.workprec(self.bits + 40):
                u, du, rel = asymptotic_pair(self.a, z, mpmath.mp, mpmath.mpf(2) ** (-self.bits - 8))
            if rel < 2.0 ** (-self.bits):
                return StepResult(z, u, du, float(self.bits))
        anchor = self._nearest(z)
        if anchor is not None and anchor.acc >= self.bits + 16:
            r = taylor_step(self.a, anchor, z, self.bits + 16)
            if r.acc >= self.bits:
                return r
        r = taylor_step(self.a, None, z, self.bits + 48)
        self.anchors.append(r)
        if len(self.anchors) > 64:
            del self.anchors[0]
        return r


def field_order(params) -> complex:
    """a = i m^2 c^3 / (2F) - 1/2."""
    return 1j * params.m ** 2 * params.c ** 3 / (2 * params.F) - 0.5


def field_argument(params, E, x):
    """y(x) = exp(-i pi/4) sqrt(2c/F) (E + F x) / c; exact in mpmath when E is mpc."""
    if isinstance(E, (mpmath.mpc, mpmath.mpf)):
        pre = mpmath.expjpi(mpmath.mpf(-1) / 4) * mpmath.sqrt(2 * mpmath.mpf(params.c) / params.F)
        return pre * (E + mpmath.mpf(params.F) * x) / params.c
    pre = cmath.exp(-0.25j * math.pi) * math.sqrt(2 * params.c / params.F)
    return pre * (complex(E) + params.F * x) / params.c


def quad_from_pairs(params, y, p1, p2, ctx=None):
    """(U1, U2, U1~, U2~) from U(a, y), U'(a, y) and U(-a, -iy), U'(-a, -iy).

    The shifted orders come from the recurrences
    U(a+1, z) = -(z U/2 + U') / (a + 1/2) and U(-a-1, z) = z U(-a, z)/2 - U'(-a, z).
    Inputs are (w, dw) pairs; outputs are plain numbers of the same kind.
    """
    m, c, F = params.m, params.c, params.F
    if ctx is None:
        a = field_order(params)
        k1 = m * c * math.sqrt(c / (2 * F)) * cmath.exp(0.75j * math.pi)
        k2 = math.sqrt(2 * F / c) / (m * c) * cmath.exp(-0.25j * math.pi)
        w2 = -1j * y
    else:
        a = ctx.mpc(0, ctx.mpf(m) ** 2 * ctx.mpf(c) ** 3 / (2 * ctx.mpf(F))) - ctx.mpf(1) / 2
        k1 = m * c * ctx.sqrt(ctx.mpf(c) / (2 * ctx.mpf(F))) * ctx.expjpi(ctx.mpf(3) / 4)
        k2 = ctx.sqrt(2 * ctx.mpf(F) / c) / (m * c) * ctx.expjpi(-ctx.mpf(1) / 4)
        w2 = ctx.mpc(0, -1) * y
    u1, du1 = p1
    u2, du2 = p2
    up = -(y * u1 / 2 + du1) / (a + 0.5)
    um = w2 * u2 / 2 - du2
    return u1, u2, k1 * up, k2 * um


def pcf_quad(params, E, x) -> PcfQuad:
    """U1, U2, U1~, U2~ at y(x) for field strength params.F > 0."""
    if not params.F > 0:
        raise ValueError("pcf_quad needs F > 0")
    a = field_order(params)
    y = field_argument(params, complex(E), x)
    with mpmath.workdps(DEFAULT_DIGITS):
        p1 = pcf_u_pair(a, y)
        p2 = pcf_u_pair(-a, -1j * y)
        vals = quad_from_pairs(params, mpmath.mpc(y), p1, p2, mpmath.mp)
        return PcfQuad(*(PcfValue.from_number(v) for v in vals), y=y)
