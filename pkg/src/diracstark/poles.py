"""Resonance poles: zeros of the density denominator D(E) and their paths in R."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import mpmath

from .model import ModelParams
from .starkfield import FieldEvaluator, FieldState, width_estimate
from .zerofield import bound_states

STRIP_RE = (-10.0, 10.0)
STRIP_IM = (-5.0, 0.0)
# widths below this are reported as zero: resolving them would need more
# working digits than is reasonable
WIDTH_FLOOR = 1e-330
MAX_DIGITS = 350


class PoleError(ArithmeticError):
    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


class PoleNotConverged(PoleError):
    pass


class PoleOutOfStrip(PoleError):
    pass


@dataclass(frozen=True)
class PoleRecord:
    """A converged zero of D.  ``resolved`` is False when Im E fell below WIDTH_FLOOR."""

    R: float
    E: complex
    residual: float
    iterations: int
    resolved: bool = True


@dataclass
class PoleTrace:
    branch_id: int
    records: List[PoleRecord] = field(default_factory=list)
    events: list = field(default_factory=list)
    failure: Optional[str] = None
    flags: list = field(default_factory=list)
    label: str = ""


def working_digits(E_guess, params: ModelParams) -> Optional[int]:
    """None for double precision, else the mpmath digits needed to see the width."""
    w = width_estimate(complex(E_guess).real, params)
    a = abs(1 / (2 * params.F)) * params.m ** 2 * params.c ** 3
    if w > 1e-9 and a < 200:
        return None
    if w <= 0.0:
        return MAX_DIGITS
    return int(min(MAX_DIGITS, max(30, -math.log10(w) + 25)))


def _in_strip(E) -> bool:
    return STRIP_RE[0] <= E.real <= STRIP_RE[1] and STRIP_IM[0] - 1e-12 <= E.imag <= STRIP_IM[1] + 1e-12


def _muller(f, x0, x1, x2, tol_step, tol_f, maxit, sqrt):
    f0, f1, f2 = f(x0), f(x1), f(x2)
    best = min(((abs(f0), x0), (abs(f1), x1), (abs(f2), x2)), key=lambda t: t[0])
    for it in range(1, maxit + 1):
        h1 = x1 - x0
        h2 = x2 - x1
        if h1 == 0 or h2 == 0 or h1 + h2 == 0:
            break
        d1 = (f1 - f0) / h1
        d2 = (f2 - f1) / h2
        A = (d2 - d1) / (h2 + h1)
        B = A * h2 + d2
        disc = sqrt(B * B - 4 * f2 * A)
        den = B + disc if abs(B + disc) >= abs(B - disc) else B - disc
        if den == 0:
            step = h2
        else:
            step = -2 * f2 / den
        x3 = x2 + step
        f3 = f(x3)
        if abs(f3) < best[0]:
            best = (abs(f3), x3)
        x0, x1, x2 = x1, x2, x3
        f0, f1, f2 = f1, f2, f3
        yield it, x3, f3, abs(step)
    return


def find_pole(E_guess, params: ModelParams, evaluator: Optional[FieldEvaluator] = None,
              digits: Optional[int] = None, max_iter: int = 100) -> PoleRecord:
    """Muller iteration on the normalised denominator, started around E_guess.

    Precision is picked from the expected width unless ``digits`` (or an
    evaluator) is given.  Converged means |dE| < 1e-12 and |D| < 1e-10; in
    high precision the iteration continues until the width itself settles.
    """
    E_guess = complex(E_guess)
    if not _in_strip(E_guess):
        raise PoleOutOfStrip(f"guess {E_guess} is outside the search strip")
    if evaluator is None:
        if digits is None:
            digits = working_digits(E_guess, params)
        evaluator = FieldEvaluator(params, digits)
    exact = evaluator.exact

    def f(E):
        return FieldState(E, params, evaluator).denominator()

    if exact:
        ctx = mpmath.workdps(evaluator.digits + 10)
        ctx.__enter__()
        seeds = [mpmath.mpc(E_guess), mpmath.mpc(E_guess) * (1 + mpmath.mpf("1e-4")) + mpmath.mpc(0, "1e-4"),
                 mpmath.mpc(E_guess) * (1 - mpmath.mpf("1e-4")) + mpmath.mpc(0, "1e-4")]
        sqrt = mpmath.sqrt
        floor = max(WIDTH_FLOOR, 10.0 ** (-(evaluator.digits - 15)))
    else:
        seeds = [E_guess, E_guess * (1 + 1e-4) + 1e-4j, E_guess * (1 - 1e-4) + 1e-4j]
        sqrt = lambda z: complex(z) ** 0.5
        floor = 0.0
    try:
        last = None
        for it, E, fE, step in _muller(f, seeds[1], seeds[2], seeds[0], 1e-12, 1e-10, max_iter, sqrt):
            Ec = complex(E)
            # iterates may wander a little (the seeds sit above the axis)
            if not (-2 * STRIP_RE[1] <= Ec.real <= 2 * STRIP_RE[1] and -2 * abs(STRIP_IM[0]) <= Ec.imag <= 5):
                raise PoleOutOfStrip(f"iterate {Ec} left the search region", Ec)
            last = (it, Ec, abs(complex(fE)))
            if step < 1e-12 and abs(complex(fE)) < 1e-10:
                if exact and abs(Ec.imag) > floor and step > 1e-6 * abs(Ec.imag):
                    continue
                if not _in_strip(Ec):
                    raise PoleOutOfStrip(f"root {Ec} lies outside the search strip", Ec)
                resolved = abs(Ec.imag) > floor or not exact
                Eout = Ec if resolved else complex(Ec.real, 0.0)
                return PoleRecord(params.R, Eout, abs(complex(fE)), it, resolved)
        raise PoleNotConverged(f"no convergence from {E_guess} in {max_iter} iterations",
                               last[1] if last else None)
    finally:
        if exact:
            ctx.__exit__(None, None, None)


def residual(record: PoleRecord, params: ModelParams) -> float:
    """|D| re-evaluated from scratch at the recorded energy."""
    digits = None if record.resolved else working_digits(record.E, params)
    return abs(complex(FieldState(record.E, params, FieldEvaluator(params, digits)).denominator()))


def bound_state_seeds(params: ModelParams) -> List[complex]:
    """F = 0 bound energies pushed 1e-3 into the lower half plane."""
    bs = bound_states(params.with_(F=0.0))
    return [complex(e, -1e-3) for e in (bs.ground, bs.excited) if e is not None]


def scan_poles(params: ModelParams, re_range, im_range, n_re: int = 61, n_im: int = 16,
               evaluator: Optional[FieldEvaluator] = None) -> List[complex]:
    """Poles inside a rectangle, found by refining every local minimum of |D|.

    Im values are spaced geometrically so that narrow resonances close to the
    real axis are not stepped over.  Returns distinct roots sorted by Re E.
    """
    ev = evaluator or FieldEvaluator(params)
    res = [re_range[0] + (re_range[1] - re_range[0]) * i / (n_re - 1) for i in range(n_re)]
    top = min(im_range[1], -1e-3)
    ims = [top * (im_range[0] / top) ** (j / (n_im - 1)) for j in range(n_im)]
    D = [[abs(FieldState(complex(x, y), params, ev).denominator()) for y in ims] for x in res]
    roots = []
    for i in range(n_re):
        for j in range(n_im):
            v = D[i][j]
            nb = [D[i + a][j + b] for a in (-1, 0, 1) for b in (-1, 0, 1)
                  if (a or b) and 0 <= i + a < n_re and 0 <= j + b < n_im]
            if not all(v <= w for w in nb):
                continue
            try:
                rec = find_pole(complex(res[i], ims[j]), params, evaluator=ev)
            except PoleError:
                continue
            E = rec.E
            inside = re_range[0] <= E.real <= re_range[1] and im_range[0] <= E.imag <= im_range[1]
            if inside and not any(abs(E - q) < 1e-8 for q in roots):
                roots.append(E)
    return sorted(roots, key=lambda z: (z.real, z.imag))


def _r_values(r0, r1, step):
    n = int(math.floor((r1 - r0) / step + 1e-9))
    return [round(r0 + k * step, 12) for k in range(n + 1)]


CONTINUUM_WINDOW = ((-3.0, -1.0), (-0.5, 0.0))


def initial_seeds(params: ModelParams, continuum_window=CONTINUUM_WINDOW):
    """Converged starting poles at params.R as (label, E) pairs.

    The bound-state branches ("ground", "excited") come from the F = 0
    energies.  Continuum resonances below -mc^2 join the pool so that the
    bound-state branches have partners to interact with; pass
    ``continuum_window=None`` to skip them.
    """
    ev = FieldEvaluator(params)
    bs = bound_states(params.with_(F=0.0))
    seeds = []
    for label, e in (("ground", bs.ground), ("excited", bs.excited)):
        if e is None:
            continue
        try:
            seeds.append((label, find_pole(complex(e, -1e-3), params, evaluator=ev).E))
        except PoleError:
            continue
    if continuum_window is not None:
        for E in scan_poles(params, continuum_window[0], continuum_window[1], evaluator=ev,
                            n_re=101, n_im=20):
            if not any(abs(E - q) < 1e-8 for _, q in seeds):
                seeds.append(("continuum", E))
    return seeds


def _march(bid, seed, params, rs, digits, label):
    tr = PoleTrace(bid, label=label)
    hist = []
    for R in rs:
        p = params.with_(R=R)
        if len(hist) >= 2:
            guess = 2 * hist[-1] - hist[-2]
        elif hist:
            guess = hist[-1]
        else:
            guess = complex(seed)
        try:
            rec = find_pole(guess, p, digits=digits)
        except PoleError as exc:
            tr.failure = f"R={R}: {exc}"
            break
        tr.records.append(rec)
        hist.append(rec.E)
    return tr


def continue_in_R(seeds, params: ModelParams, R_range, step: float,
                  digits: Optional[int] = None, workers: int = 1,
                  labels=None) -> List[PoleTrace]:
    """March every seed in R, predicting each start by linear extrapolation.

    Branches are independent, so with workers > 1 they run in separate
    processes; the result does not depend on the worker count.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    rs = _r_values(R_range[0], R_range[1], step)
    labels = labels or [""] * len(seeds)
    jobs = [(bid, seed, params, rs, digits, lab) for bid, (seed, lab) in enumerate(zip(seeds, labels))]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(min(workers, len(jobs))) as pool:
            traces = list(pool.map(_march, *zip(*jobs)))
    else:
        traces = [_march(*j) for j in jobs]
    _flag_collisions(traces)
    return traces


def _flag_collisions(traces, tol=1e-9):
    for i in range(len(traces)):
        for j in range(i + 1, len(traces)):
            a = {r.R: r.E for r in traces[i].records}
            for r in traces[j].records:
                if r.R in a and abs(a[r.R] - r.E) < tol:
                    traces[i].flags.append(("collision", r.R, traces[j].branch_id))
                    traces[j].flags.append(("collision", r.R, traces[i].branch_id))


def _im_exchange(di, lo, hi):
    """True if Im E_i - Im E_j changes sign within [lo, hi]: the widths swap."""
    return any(di[k] * di[k + 1] < 0 or di[k] == 0 for k in range(lo, hi))


def classify_events(traces: List[PoleTrace], d_avoid: float = 0.05, window: int = 5,
                    d_cross: float = 0.02):
    """Mark avoided crossings and crossings between every pair of branches.

    Avoided crossing: the branch distance has a local minimum below d_avoid
    and within +-window steps of it the two branches trade imaginary parts
    (the sign of Im E_i - Im E_j flips).  Crossing: the Re E ordering swaps
    while the Im E values stay more than d_cross apart.  A window where both
    fire is labelled ambiguous.
    """
    for tr in traces:
        tr.events = []
    for i in range(len(traces)):
        for j in range(i + 1, len(traces)):
            ti, tj = traces[i], traces[j]
            ej = {r.R: r.E for r in tj.records}
            common = [(r.R, r.E, ej[r.R]) for r in ti.records if r.R in ej]
            if len(common) < 3:
                continue
            rs = [c[0] for c in common]
            ei = [c[1] for c in common]
            ek = [c[2] for c in common]
            dist = [abs(x - y) for x, y in zip(ei, ek)]
            found = []
            di = [x.imag - y.imag for x, y in zip(ei, ek)]
            for k in range(1, len(common) - 1):
                if dist[k] < d_avoid and dist[k] <= dist[k - 1] and dist[k] <= dist[k + 1]:
                    lo = max(0, k - window)
                    hi = min(len(common) - 1, k + window)
                    if _im_exchange(di, lo, hi):
                        found.append([k, "avoided-crossing"])
            for k in range(len(common) - 1):
                s0 = ei[k].real - ek[k].real
                s1 = ei[k + 1].real - ek[k + 1].real
                if s0 * s1 < 0 and abs(di[k]) > d_cross and abs(di[k + 1]) > d_cross:
                    found.append([k, "crossing"])
            found.sort()
            merged = []
            for k, kind in found:
                if merged and k - merged[-1][0] <= window and kind != merged[-1][1]:
                    merged[-1][1] = "ambiguous"
                    continue
                if merged and k - merged[-1][0] <= window and kind == merged[-1][1]:
                    continue
                merged.append([k, kind])
            for k, kind in merged:
                ti.events.append((rs[k], kind, tj.branch_id))
                tj.events.append((rs[k], kind, ti.branch_id))
    for tr in traces:
        tr.events.sort(key=lambda e: e[0])
    return traces
