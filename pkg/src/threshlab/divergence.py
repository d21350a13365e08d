"""Relative entropy and total variation between density pairs.

Integration is adaptive Simpson with a per-panel Richardson error estimate.
The crossing point of each pair and any recorded breakpoints (bump support
edges) are inserted as mandatory panel boundaries, because the integrand's
derivative jumps there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InfiniteEntropy, QuadratureNotConverged
from .model import DensityPair

__all__ = [
    "QuadratureSpec",
    "relative_entropy",
    "total_variation",
    "adaptive_simpson",
    "integrate_field",
]

_P_FLOOR = 1e-30  # 0 * log 0 := 0 below this mass
_P_MASS = 1e-12   # p above this while q below _P_FLOOR => infinite entropy


@dataclass(frozen=True)
class QuadratureSpec:
    panels: int = 8
    tol: float = 1e-10
    max_depth: int = 48

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.panels < 1 or self.max_depth < 1:
            raise ValueError("panels and max_depth must be positive")


def _simpson(fa, fm, fb, h):
    return h / 6.0 * (fa + 4.0 * fm + fb)


def _adapt(f, a, b, fa, fm, fb, whole, tol, depth, max_depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    err = (left + right - whole) / 15.0
    if abs(err) <= tol:
        return left + right + err, abs(err)
    if depth >= max_depth:
        raise QuadratureNotConverged(
            f"max depth {max_depth} hit on [{a}, {b}], error estimate {err:.3e}"
        )
    li, le = _adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth)
    ri, re = _adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth)
    return li + ri, le + re


def adaptive_simpson(f, a: float, b: float, spec: QuadratureSpec,
                     breakpoints=()) -> tuple:
    """Integrate scalar f on [a, b]; returns (value, error_estimate).

    Interior breakpoints become hard panel boundaries; each base panel is
    then refined recursively until the Richardson estimate meets the
    (length-proportional) share of spec.tol.
    """
    if b <= a:
        return 0.0, 0.0
    knots = sorted({a, b, *(p for p in breakpoints if a < p < b)})
    edges = []
    for lo, hi in zip(knots[:-1], knots[1:]):
        w = (hi - lo) / spec.panels
        edges.extend(lo + i * w for i in range(spec.panels))
    edges.append(b)
    total = 0.0
    err = 0.0
    span = b - a
    for lo, hi in zip(edges[:-1], edges[1:]):
        fa, fm, fb = f(lo), f(0.5 * (lo + hi)), f(hi)
        whole = _simpson(fa, fm, fb, hi - lo)
        tol = spec.tol * (hi - lo) / span
        v, e = _adapt(f, lo, hi, fa, fm, fb, whole, tol, 0, spec.max_depth)
        total += v
        err += e
    return total, err


def integrate_field(field, a: float, b: float, spec: QuadratureSpec,
                    breakpoints=()) -> float:
    val, _ = adaptive_simpson(lambda x: float(field.val(x)), a, b, spec, breakpoints)
    return val


def _pair_breakpoints(P: DensityPair, Q: DensityPair):
    return (*P.breakpoints, *Q.breakpoints, P.threshold, Q.threshold)


def relative_entropy(P: DensityPair, Q: DensityPair,
                     spec: QuadratureSpec = QuadratureSpec()) -> float:
    """H(P, Q) = sum over labels of integral of f_P log(f_P / f_Q)."""
    bps = _pair_breakpoints(P, Q)
    total = 0.0
    for fP, fQ in ((P.fplus, Q.fplus), (P.fminus, Q.fminus)):
        def integrand(x, fP=fP, fQ=fQ):
            p = float(fP.val(x))
            if p <= _P_FLOOR:
                return 0.0
            q = float(fQ.val(x))
            if q < _P_FLOOR:
                if p > _P_MASS:
                    raise InfiniteEntropy(
                        f"f_Q vanishes at x={x} while f_P={p:.3e}"
                    )
                return 0.0
            return p * math.log(p / q)

        val, _ = adaptive_simpson(integrand, 0.0, 1.0, spec, bps)
        total += val
    return total


def total_variation(P: DensityPair, Q: DensityPair,
                    spec: QuadratureSpec = QuadratureSpec()) -> float:
    """TV(P, Q) = (1/2) sum over labels of integral of |f_P - f_Q|; in [0, 1]."""
    bps = _pair_breakpoints(P, Q)
    total = 0.0
    for fP, fQ in ((P.fplus, Q.fplus), (P.fminus, Q.fminus)):
        val, _ = adaptive_simpson(
            lambda x, fP=fP, fQ=fQ: abs(float(fP.val(x)) - float(fQ.val(x))),
            0.0, 1.0, spec, bps,
        )
        total += val
    return 0.5 * total
