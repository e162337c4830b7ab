"""Real roots of a real cubic polynomial.

Closed-form trigonometric/Cardano solution on the depressed cubic, followed
by Newton polishing of every root on the original coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

from .errors import DomainError

DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class CubicRoots:
    roots: Tuple[float, ...]
    degenerate: bool


def _polish(coeffs, x, iters=3):
    a, b, c, d = coeffs
    for _ in range(iters):
        f = ((a * x + b) * x + c) * x + d
        df = (3 * a * x + 2 * b) * x + c
        if df == 0.0:
            break
        dx = f / df
        x_new = x - dx
        f_new = ((a * x_new + b) * x_new + c) * x_new + d
        if abs(f_new) > abs(f):
            break
        x = x_new
        if dx == 0.0:
            break
    return x


def real_cubic_roots(a, b, c, d) -> CubicRoots:
    """Sorted real roots of ``a x^3 + b x^2 + c x + d``.

    When the discriminant is within ``DEGENERATE_TOL`` (relative) of zero
    the nearly coincident pair is returned as one double root with
    ``degenerate=True``.
    """
    if a == 0.0:
        raise DomainError("leading coefficient must be non-zero")
    B, C, D = b / a, c / a, d / a
    Q = (B * B - 3.0 * C) / 9.0
    R = (2.0 * B ** 3 - 9.0 * B * C + 27.0 * D) / 54.0
    Q3 = Q ** 3
    disc = R * R - Q3
    scale = max(R * R, abs(Q3), 1e-300)
    degenerate = abs(disc) <= DEGENERATE_TOL * scale
    shift = B / 3.0
    if degenerate:
        # double root at s + x where x solves the depressed cubic
        s = math.copysign(abs(R) ** (1.0 / 3.0), R)
        raw = [-2.0 * s - shift, s - shift]
        if R == 0.0 and Q == 0.0:
            raw = [-shift]
    elif disc < 0.0:
        sq = math.sqrt(Q)
        theta = math.acos(max(-1.0, min(1.0, R / (sq * Q))))
        raw = [-2.0 * sq * math.cos((theta + k * 2.0 * math.pi) / 3.0) - shift for k in range(3)]
    else:
        A = -math.copysign((abs(R) + math.sqrt(disc)) ** (1.0 / 3.0), R)
        Bc = Q / A if A != 0.0 else 0.0
        raw = [A + Bc - shift]
    coeffs = (a, b, c, d)
    roots = tuple(sorted(_polish(coeffs, x) for x in raw))
    return CubicRoots(roots=roots, degenerate=degenerate)


def cubic_residual(coeffs, x):
    """Residual relative to the largest term magnitude."""
    a, b, c, d = coeffs
    terms = (a * x ** 3, b * x ** 2, c * x, d)
    return abs(sum(terms)) / max(max(abs(t) for t in terms), 1e-300)
