"""Physical parameters and the point-interaction jump matrices.

Units have hbar = 1; m and c stay explicit.  A well of strength g sitting at
x0 connects the spinor on its two sides through a real unimodular 2x2
matrix, psi(x0+) = right * psi(x0-).
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Mass m, light speed c, well strength g, half separation R, field F."""

    m: float = 1.0
    c: float = 1.0
    g: float = 0.0
    R: float = 1.0
    F: float = 0.0

    def __post_init__(self):
        if not (self.m > 0 and self.c > 0):
            raise ValueError("m and c must be positive")
        if not self.g >= 0:
            raise ValueError("g must be non-negative")
        if not self.R > 0:
            raise ValueError("R must be positive")
        if not self.F >= 0:
            raise ValueError("F must be non-negative")

    @property
    def mc2(self) -> float:
        return self.m * self.c * self.c

    def with_(self, **kw) -> "ModelParams":
        return replace(self, **kw)


@dataclass(frozen=True)
class JumpMatrix:
    """Entries ((delta, gamma), (beta, alpha)) acting on (psi1, psi2); phase omega = 1."""

    delta: float
    gamma: float
    beta: float
    alpha: float
    omega: int = 1

    def as_array(self) -> np.ndarray:
        return np.array([[self.delta, self.gamma], [self.beta, self.alpha]])

    @property
    def det(self) -> float:
        return self.alpha * self.delta - self.gamma * self.beta

    def apply(self, psi1, psi2):
        return self.delta * psi1 + self.gamma * psi2, self.beta * psi1 + self.alpha * psi2


def _entries(g: float, c: float):
    k = g * g / (4 * c * c)
    den = 1 + k
    return (1 - k) / den, (g / c) / den


def jump_matrix_right(params: ModelParams) -> JumpMatrix:
    """Matrix taking the spinor from the left side of a well to its right side."""
    diag, off = _entries(params.g, params.c)
    return JumpMatrix(diag, -off, off, diag)


def jump_matrix_left(params: ModelParams) -> JumpMatrix:
    """Inverse of :func:`jump_matrix_right`: right side back to the left side."""
    diag, off = _entries(params.g, params.c)
    return JumpMatrix(diag, off, -off, diag)


def charge_conjugation_check(params: ModelParams, matrix=None, tol: float = 1e-14) -> bool:
    """True when Lambda(-g) = sx conj(Lambda(g)) sx entrywise.

    ``matrix`` lets a caller test some other candidate for Lambda(g); the
    default is the right jump matrix built from params.
    """
    lam = jump_matrix_right(params) if matrix is None else matrix
    lam = lam.as_array() if isinstance(lam, JumpMatrix) else np.asarray(lam)
    # Lambda(-g) from the same closed form, with g allowed to go negative
    diag, off = _entries(-params.g, params.c)
    flipped = np.array([[diag, -off], [off, diag]])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    return bool(np.all(np.abs(flipped - sx @ np.conj(lam) @ sx) <= tol))


def colombeau_cubic_roots(params: ModelParams):
    """All three roots of a^3 - a^2/2 + (c/g)^2 a - c^2/(2 g^2)."""
    if not params.g > 0:
        raise ValueError("the cubic needs g > 0")
    r = (params.c / params.g) ** 2
    return np.roots([1.0, -0.5, r, -0.5 * r])


def colombeau_constant(params: ModelParams) -> float:
    """The real root of the regularisation cubic (it is 1/2 for every g, c)."""
    roots = colombeau_cubic_roots(params)
    real = [z.real for z in roots if abs(z.imag) <= 1e-9 * max(1.0, abs(z))]
    real = [x for x in real if 0.0 <= x <= 1.0]
    if len(real) != 1:
        raise ArithmeticError(f"expected one real root in [0, 1], got {roots}")
    # polish with Newton on the cubic
    a = real[0]
    r = (params.c / params.g) ** 2
    for _ in range(5):
        f = ((a - 0.5) * a + r) * a - 0.5 * r
        df = (3 * a - 1.0) * a + r
        if df == 0:
            break
        a -= f / df
    return a
