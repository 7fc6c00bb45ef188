import cmath
import math
import random
import warnings

import mpmath
import pytest

from oracles import origin_data, weber_oracle

from diracstark import pcf
from diracstark.model import ModelParams


def rel(x, y):
    return abs(x - y) / abs(y)


# -- the oracle itself -------------------------------------------------------

@pytest.mark.parametrize("a,z,ref", [
    (-0.5, 1.0, cmath.log(math.exp(-0.25))),
    (-1.5, 2.0, cmath.log(2 * math.exp(-1))),
    (-0.5, 6 - 6j, -(6 - 6j) ** 2 / 4),
    (-1.5, -5j, cmath.log(-5j) - (-5j) ** 2 / 4),
])
def test_oracle_closed_forms(a, z, ref):
    got, err = weber_oracle(a, z)
    assert abs(cmath.exp(got - ref) - 1) < 1e-9


def test_oracle_against_mpmath():
    # a third, unrelated implementation: mpmath's hypergeometric pcfu
    rng = random.Random(7)
    for _ in range(6):
        a = complex(rng.uniform(-2, 2), rng.uniform(-40, 40))
        z = rng.uniform(1, 30) * cmath.exp(1j * rng.choice((0, -math.pi / 4, -math.pi / 2)))
        got, _ = weber_oracle(a, z)
        with mpmath.workdps(40):
            ref = complex(mpmath.log(mpmath.pcfu(a, z)))
        assert abs(cmath.exp(got - ref) - 1) < 1e-7


def test_origin_data():
    u, du = origin_data(0.5)
    assert u == pytest.approx(math.sqrt(math.pi / 2), rel=1e-14)
    with mpmath.workdps(30):
        w, dw = pcf.origin_values(1.3 - 2j)
    u, du = origin_data(1.3 - 2j)
    assert rel(complex(w), u) < 1e-13 and rel(complex(dw), du) < 1e-13


# -- PcfValue ------------------------------------------------------------------

def test_pcf_value_roundtrip():
    v = pcf.PcfValue.from_number(-3 + 4j)
    assert v.log_modulus == pytest.approx(math.log(5))
    assert -math.pi < v.phase <= math.pi
    assert v.to_complex() == pytest.approx(-3 + 4j)
    z = pcf.PcfValue.from_number(0)
    assert z.log_modulus == -math.inf and z.to_complex() == 0
    assert pcf.PcfValue.from_number(-1).phase == pytest.approx(math.pi)


def test_pcf_value_arithmetic():
    x = pcf.PcfValue.from_number(1j)
    y = pcf.PcfValue.from_number(-1 + 1j)
    assert (x * y).to_complex() == pytest.approx(1j * (-1 + 1j))
    assert (x / y).to_complex() == pytest.approx(1j / (-1 + 1j))
    huge = pcf.PcfValue(2000.0, 0.5)
    assert (huge / huge).to_complex() == pytest.approx(1.0)
    with pytest.raises(OverflowError):
        huge.to_complex()


# -- evaluator examples --------------------------------------------------------

def test_closed_form_examples():
    assert pcf.pcf_u(-0.5, 1).to_complex() == pytest.approx(math.exp(-0.25), rel=1e-13)
    assert abs(pcf.pcf_u(-0.5, 1).to_complex() - 0.778800783) < 1e-9
    assert pcf.pcf_u(-1.5, 2).to_complex() == pytest.approx(2 * math.exp(-1), rel=1e-13)
    assert abs(pcf.pcf_u(-1.5, 2).to_complex() - 0.735758882) < 1e-9
    assert pcf.pcf_u(0.5, 0).to_complex() == pytest.approx(math.sqrt(math.pi / 2), rel=1e-13)
    assert abs(pcf.pcf_u(0.5, 0).to_complex() - 1.253314137) < 1e-9


def test_examples_match_oracle():
    for a, z in ((-0.5, 1), (-1.5, 2), (0.5, 0)):
        got = pcf.pcf_u(a, z).log()
        ref, _ = weber_oracle(a, z)
        assert abs(cmath.exp(got - ref) - 1) < 1e-10


def test_asymptotic_examples():
    v = pcf.pcf_asymptotic(-0.5, 20)
    assert v.log_modulus == pytest.approx(-100, abs=1e-12)
    assert abs(v.phase) < 1e-12
    # on the imaginary axis the exp(+z^2/4) behaviour takes over
    up = pcf.pcf_asymptotic(-0.5, 20j)
    assert up.log_modulus == pytest.approx(100, abs=1e-10)
    with pytest.raises(ValueError):
        pcf.pcf_asymptotic(0.3, 1.0)


def test_regime_overlap_example():
    a = 2.5j - 0.5
    for k in range(12):
        z = pcf.z_switch(a) * cmath.exp(1j * (-math.pi + 2 * math.pi * (k + 0.5) / 12))
        series = pcf.taylor_step(a, None, z, 120).w
        asym = pcf.pcf_asymptotic(a, z).to_mpc()
        assert float(abs(asym / series - 1)) < 1e-8


def test_regime_continuity_random():
    rng = random.Random(3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", pcf.PcfAccuracyWarning)
        for _ in range(20):
            a = complex(rng.uniform(-3, 3), rng.uniform(-50, 50))
            z = pcf.z_switch(a) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
            series = pcf.taylor_step(a, None, z, 120).w
            asym = pcf.pcf_asymptotic(a, z).to_mpc()
            assert float(abs(asym / series - 1)) < 1e-8


def test_stokes_flag(monkeypatch):
    a = -0.5 + 30j
    z = 8 * cmath.exp(-1j * (math.pi / 2 - 0.05))
    assert pcf.stokes_margin(a, z) > 1e-10
    assert pcf.stokes_margin(a, abs(z)) == 0.0
    monkeypatch.setattr(pcf, "z_switch", lambda a: 1.0)
    with pytest.warns(pcf.PcfAccuracyWarning):
        pcf.pcf_asymptotic(a, z)


def test_oracle_rays():
    rng = random.Random(11)
    for _ in range(30):
        a = complex(rng.uniform(-2, 2), rng.uniform(-50, 50))
        z = rng.uniform(0, 40) * cmath.exp(1j * rng.choice((0.0, -math.pi / 4, -math.pi / 2)))
        ref, _ = weber_oracle(a, z)
        got = pcf.pcf_u(a, z).log()
        assert abs(cmath.exp(got - ref) - 1) < 1e-7, (a, z)


def test_recurrence_examples():
    assert pcf.pcf_recurrence_check(-0.5, 1) < 1e-10
    assert pcf.pcf_recurrence_check(2j - 0.5, 2 - 2j) < 1e-8
    r = pcf.pcf_recurrence_check(0.7 - 3j, 0)
    assert math.isfinite(r) and r < 1e-8


def test_recurrence_random():
    rng = random.Random(5)
    for _ in range(25):
        a = complex(rng.uniform(-3, 3), rng.uniform(-50, 50))
        z = rng.uniform(0, 40) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
        assert pcf.pcf_recurrence_check(a, z) < 1e-8


def _second_derivative(f, z, h):
    return (-f(z + 2 * h) + 16 * f(z + h) - 30 * f(z) + 16 * f(z - h) - f(z - 2 * h)) / (12 * h * h)


def test_ode_residual_random():
    rng = random.Random(17)
    for _ in range(25):
        a = complex(rng.uniform(-2, 2), rng.uniform(-50, 50))
        z = rng.uniform(0, 40) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
        # work relative to U(z) so nothing overflows
        base = pcf.pcf_u(a, z).log()
        f = lambda s: cmath.exp(pcf.pcf_u(a, s).log() - base)
        h = 1e-2 / max(1.0, abs(z), math.sqrt(abs(a)))
        d2 = _second_derivative(f, z, h)
        res = abs(d2 - (z * z / 4 + a))
        assert res / abs(d2) < 1e-6


def test_fast_pair_matches():
    rng = random.Random(23)
    done = 0
    for _ in range(60):
        a = complex(-0.5, rng.uniform(-40, 40))
        z = rng.uniform(0, 35) * cmath.exp(1j * rng.uniform(-math.pi, math.pi))
        r = pcf.u_pair_double(a, z)
        if r is None:
            continue
        done += 1
        ref = pcf.pcf_u(a, z).log()
        assert abs(cmath.exp(r.log_scale + cmath.log(r.w) - ref) - 1) < 1e-10
    assert done > 30


def test_cache_matches():
    a = 0.7j - 0.5
    cache = pcf.WeberCache(a, 120)
    for z in (0.5, 3 - 2j, 7 - 7j, 12 - 12j, 2 + 9j):
        with mpmath.workdps(40):
            w = cache.pair(z).w
            ref = pcf.pcf_u(a, z).to_mpc()
            assert float(abs(w / ref - 1)) < 1e-12


# -- the four basis functions --------------------------------------------------

def test_argument_at_origin():
    p = ModelParams(g=1, R=1, F=0.2)
    E = 0.3 + 0.1j
    y0 = cmath.exp(-1j * math.pi / 4) * math.sqrt(2 / 0.2) * E
    assert pcf.field_argument(p, E, 0.0) == pytest.approx(y0, rel=1e-15)
    q = pcf.pcf_quad(p, E, 0.0)
    assert q.y == pytest.approx(y0, rel=1e-15)


def test_quad_at_zero_argument():
    p = ModelParams(F=1.0)
    q = pcf.pcf_quad(p, 0.0, 0.0)
    assert q.y == 0
    a = pcf.field_order(p)
    assert a == pytest.approx(0.5j - 0.5)
    assert q.u1.to_complex() == pytest.approx(origin_data(a)[0], rel=1e-12)
    for v in (q.u1, q.u2, q.u1_tilde, q.u2_tilde):
        assert math.isfinite(v.log_modulus)


@pytest.mark.parametrize("x", [-1.0, 0.0, 0.8])
def test_quad_tilde_definitions(x):
    p = ModelParams(m=1.2, c=0.9, F=0.3)
    E = 0.2 + 0.05j
    q = pcf.pcf_quad(p, E, x)
    a = pcf.field_order(p)
    y = q.y
    mc = p.m * p.c
    k1 = mc * math.sqrt(p.c / (2 * p.F)) * cmath.exp(3j * math.pi / 4)
    k2 = math.sqrt(2 * p.F / p.c) / mc * cmath.exp(-1j * math.pi / 4)
    assert rel(q.u1.to_complex(), pcf.pcf_u(a, y).to_complex()) < 1e-10
    assert rel(q.u2.to_complex(), pcf.pcf_u(-a, -1j * y).to_complex()) < 1e-10
    assert rel(q.u1_tilde.to_complex(), k1 * pcf.pcf_u(a + 1, y).to_complex()) < 1e-10
    assert rel(q.u2_tilde.to_complex(), k2 * pcf.pcf_u(-a - 1, -1j * y).to_complex()) < 1e-10


def test_weber_residual_of_combination():
    p = ModelParams(F=0.2)
    a = pcf.field_order(p)
    y = pcf.field_argument(p, 0.3, 0.4)
    c1, c2 = 0.7 - 0.2j, -1.1 + 0.4j

    def omega(s):
        return c1 * pcf.pcf_u(a, s).to_complex() + c2 * pcf.pcf_u(-a, -1j * s).to_complex()

    d2 = _second_derivative(omega, y, 1e-2)
    assert abs(d2 - (y * y / 4 + a) * omega(y)) / abs(d2) < 1e-8
