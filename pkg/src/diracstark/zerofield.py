"""Free particle and field-free double well: closed-form solutions and densities.

Energies are measured in the same units as m c^2.  The momentum p is
continued so that exp(i p x / c) decays for Im E > 0; on the real axis that
means p = sign(E) sqrt(E^2 - m^2 c^4) in the continua and p = i sqrt(m^2 c^4 - E^2)
in the gap.  With that single convention one formula for m+ covers both
continua.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .model import ModelParams, jump_matrix_right


@dataclass(frozen=True)
class TrigBasis:
    """The solutions u, v with u(0) = (1, 0), v(0) = (0, 1), evaluated at x."""

    x: float
    p: complex
    u: tuple
    v: tuple

    @property
    def wronskian(self) -> complex:
        return self.u[0] * self.v[1] - self.u[1] * self.v[0]


@dataclass(frozen=True)
class SpectralSample:
    E: float
    rho: float
    is_gap: bool
    flag: Optional[str] = None


@dataclass(frozen=True)
class BoundStateSet:
    ground: Optional[float] = None
    excited: Optional[float] = None

    @property
    def count(self) -> int:
        return (self.ground is not None) + (self.excited is not None)

    def energies(self):
        return [e for e in (self.ground, self.excited) if e is not None]


def momentum(E, params: ModelParams) -> complex:
    """p(E) on the sheet Im p >= 0, with real-axis values taken from above."""
    mc2 = params.mc2
    if isinstance(E, complex) and E.imag != 0:
        p = cmath.sqrt(E * E - mc2 * mc2)
        return -p if p.imag < 0 else p
    E = float(E.real if isinstance(E, complex) else E)
    if abs(E) > mc2:
        return complex(math.copysign(math.sqrt(E * E - mc2 * mc2), E), 0.0)
    return complex(0.0, math.sqrt(mc2 * mc2 - E * E))


def _ratio(E, p, params):
    """k = p / (E - m c^2), the amplitude ratio psi2 / psi1 of a plane wave."""
    return p / (E - params.mc2)


def trig_basis(E, x: float, params: ModelParams) -> TrigBasis:
    """Free solutions u, v at x (valid between the wells, |x| < R, or with no wells)."""
    p = momentum(E, params)
    k = _ratio(E, p, params)
    arg = p * x / params.c
    s = cmath.sin(arg)
    co = cmath.cos(arg)
    return TrigBasis(x, p, (co, k * s), (-s / k, co))


def free_density(E: float, params: ModelParams) -> SpectralSample:
    """rho(E) = |E| / (pi sqrt(E^2 - m^2 c^4)) in the continua, 0 in the gap."""
    mc2 = params.mc2
    a = abs(E)
    if a < mc2:
        return SpectralSample(E, 0.0, True)
    if a == mc2:
        return SpectralSample(E, math.inf, False, "edge")
    return SpectralSample(E, a / (math.pi * math.sqrt(E * E - mc2 * mc2)), False)


def free_m_plus(E, params: ModelParams) -> complex:
    p = momentum(E, params)
    return -1j * _ratio(E, p, params)


def density_from_m_plus(m_plus: complex) -> float:
    """(1/2pi) Im(-m+ + 1/m+), the density of an even potential."""
    return ((-m_plus + 1 / m_plus) / (2 * math.pi)).imag


def _outer_coefficients(E, params: ModelParams):
    """(a1, a2, b1, b2): u and v beyond the right well in the sin/cos basis."""
    p = momentum(E, params)
    k = _ratio(E, p, params)
    arg = p * params.R / params.c
    s = cmath.sin(arg)
    co = cmath.cos(arg)
    lam = jump_matrix_right(params)
    gu_m, gu_p = lam.apply(co, k * s)
    gv_m, gv_p = lam.apply(-s / k, co)
    a1 = gu_m * s - gu_p * co / k
    a2 = gu_p * s / k + gu_m * co
    b1 = gv_m * s - gv_p * co / k
    b2 = gv_p * s / k + gv_m * co
    return a1, a2, b1, b2


def _propagate(E, p, d, psi, params):
    """Free evolution of a spinor over a distance d."""
    k = _ratio(E, p, params)
    arg = p * d / params.c
    s = cmath.sin(arg)
    co = cmath.cos(arg)
    return co * psi[0] - s / k * psi[1], k * s * psi[0] + co * psi[1]


def outer_basis(E, x: float, params: ModelParams) -> TrigBasis:
    """u, v carried across the right well and on to some x >= R."""
    inner = trig_basis(E, params.R, params)
    lam = jump_matrix_right(params)
    d = x - params.R
    u = _propagate(E, inner.p, d, lam.apply(*inner.u), params)
    v = _propagate(E, inner.p, d, lam.apply(*inner.v), params)
    return TrigBasis(x, inner.p, u, v)


def _growing_parts(E, params: ModelParams):
    """Amplitudes of exp(-ipx/c) beyond the right well for u and v.

    These equal (i a1 + a2) and (i b1 + b2) times exp(-ipR/c).  Dropping
    that phase avoids the cancellation the sin/cos form suffers once
    Im(pR/c) is large.  Also returns the scale of each amplitude's terms.
    """
    p = momentum(E, params)
    k = _ratio(E, p, params)
    arg = p * params.R / params.c
    s = cmath.sin(arg)
    co = cmath.cos(arg)
    lam = jump_matrix_right(params)
    gu_m, gu_p = lam.apply(co, k * s)
    gv_m, gv_p = lam.apply(-s / k, co)
    nu = gu_m - 1j * gu_p / k
    nv = gv_m - 1j * gv_p / k
    return nu, nv, max(abs(gu_m), abs(gu_p / k)), max(abs(gv_m), abs(gv_p / k))


def double_delta_m_plus(E, params: ModelParams) -> complex:
    """m+ = -(i a1 + a2)/(i b1 + b2) for two wells at +-R and no field.

    Raises ZeroDivisionError exactly at a zero of the denominator (a bound state).
    """
    nu, nv, _, _ = _growing_parts(E, params)
    if nv == 0:
        raise ZeroDivisionError(f"m+ has a pole at E={E}")
    return -nu / nv


def double_delta_density(E: float, params: ModelParams) -> SpectralSample:
    mc2 = params.mc2
    if abs(E) == mc2:
        return SpectralSample(E, math.inf, False, "edge")
    if abs(E) < mc2:
        # m+ is real in the gap, so only the bound-state poles carry weight
        return SpectralSample(E, 0.0, True)
    try:
        mp = double_delta_m_plus(E, params)
    except ZeroDivisionError:
        return SpectralSample(E, math.inf, False, "pole")
    return SpectralSample(E, density_from_m_plus(mp), False)


def pole_denominator(E, params: ModelParams) -> complex:
    """(i a1 + a2)(i b1 + b2) up to a phase, each factor scaled by its terms.

    The density -m+ + 1/m+ blows up where either factor vanishes: one for
    the even states, the other for the odd ones.
    """
    nu, nv, su, sv = _growing_parts(E, params)
    return (nu / su) * (nv / sv)


def bound_state_function(E: float, params: ModelParams, branch: int) -> float:
    """Left side of the bound-state condition; branch +1 is the ground state."""
    mc2 = params.mc2
    pt = math.sqrt(max((mc2 - E) * (mc2 + E), 0.0))
    return _f(E, pt, params, branch)


def _f(E, pt, params, branch):
    c = params.c
    g = params.g
    mc2 = params.mc2
    # E + branch*mc2*exp(-2 pt R/c), rearranged so that nothing cancels when
    # the level hugs a gap edge (pt -> 0)
    if E * branch < 0:
        near = branch * pt * pt / (mc2 + abs(E))
    else:
        near = E + branch * mc2
    return -(1 - g * g / (4 * c * c)) * pt + (g / c) * (near + branch * mc2 * math.expm1(-2 * pt * params.R / c))


def _pt_grid(mc2: float, n: int = 4001):
    # dense near pt = 0 (energies hugging the gap edges) and uniform elsewhere
    lo = np.geomspace(1e-14, 1e-2, n // 4, endpoint=False)
    hi = np.linspace(1e-2, 1.0, n - n // 4)
    return np.concatenate([lo, hi]) * mc2


def _roots(params: ModelParams, branch: int):
    """Roots of the bound-state condition on one branch.

    The scan runs over pt = sqrt(m^2c^4 - E^2) on both halves of the gap, and
    the function is divided by pt so the trivial zero at a gap edge does not
    mask a genuine root sitting right next to it.
    """
    mc2 = params.mc2
    found = []
    pts = _pt_grid(mc2)
    for side in (-1.0, 1.0):
        def h(pt):
            E = side * math.sqrt(max(mc2 * mc2 - pt * pt, 0.0))
            return _f(E, pt, params, branch) / pt

        vals = [h(pt) for pt in pts]
        for i in range(len(pts) - 1):
            if vals[i] == 0.0:
                found.append(side * math.sqrt(mc2 * mc2 - pts[i] ** 2))
            elif vals[i] * vals[i + 1] < 0:
                pt = brentq(h, pts[i], pts[i + 1], xtol=1e-300, rtol=8.9e-16, maxiter=500)
                found.append(side * math.sqrt(max(mc2 * mc2 - pt * pt, 0.0)))
    # E = 0 is shared by both halves
    out = []
    for E in sorted(found):
        if not out or abs(E - out[-1]) > 1e-12 * mc2:
            out.append(E)
    return [_polish(E, params, branch) for E in out]


def _polish(E, params, branch):
    """A few Newton steps in E; keeps the bracketed root if they do not help."""
    mc2 = params.mc2
    best = E
    fb = abs(bound_state_function(E, params, branch))
    for _ in range(4):
        h = 1e-7 * mc2
        lo = max(E - h, -mc2)
        hi = min(E + h, mc2)
        d = (bound_state_function(hi, params, branch) - bound_state_function(lo, params, branch)) / (hi - lo)
        if d == 0:
            break
        E = E - bound_state_function(E, params, branch) / d
        if not -mc2 < E < mc2:
            break
        fe = abs(bound_state_function(E, params, branch))
        if fe < fb:
            best, fb = E, fe
    return best


def bound_states(params: ModelParams) -> BoundStateSet:
    if not params.g > 0:
        return BoundStateSet()
    ground = _roots(params, +1)
    excited = _roots(params, -1)
    return BoundStateSet(ground[0] if ground else None, excited[0] if excited else None)


def critical_g(params: ModelParams):
    """Strengths at which the excited state appears and the ground state leaves the gap."""
    m, c, R = params.m, params.c, params.R
    root = 2 * c * math.sqrt(4 * m * m * c * c * R * R + 1)
    shift = 4 * m * c * c * R
    return -shift + root, shift + root
