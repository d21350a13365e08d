"""Executable information inequalities.

Three checkers: the entropy filter relating expectations under two measures,
the two-point disjunction forcing every estimator to err on one of a
low-entropy, well-separated pair, and its general-loss analogue verified by
exhaustive enumeration on finite models.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .divergence import QuadratureSpec, relative_entropy
from .errors import InvalidModel, PremiseFails, TooLarge
from .estimators import resolve_estimator
from .model import DensityPair
from .sampling import SeedPolicy, draw

__all__ = [
    "FiniteModel",
    "GeneralLossSetup",
    "CutoffProfile",
    "finite_relative_entropy",
    "lemma21_check",
    "disjunction_check",
    "DisjunctionReport",
    "lemma71_check",
]

_TOL = 1e-12


@dataclass(frozen=True)
class FiniteModel:
    """Two distributions p, q on k <= 8 outcomes with q > 0 wherever p > 0."""

    p: tuple
    q: tuple

    def __post_init__(self):
        k = len(self.p)
        if not (1 <= k <= 8) or len(self.q) != k:
            raise InvalidModel("p and q must have equal length in 1..8")
        for dist, label in ((self.p, "p"), (self.q, "q")):
            if any(v < 0 for v in dist):
                raise InvalidModel(f"{label} has a negative entry")
            if abs(sum(dist) - 1.0) > _TOL:
                raise InvalidModel(f"{label} sums to {sum(dist)}, not 1")
        if any(pi > 0 and qi == 0 for pi, qi in zip(self.p, self.q)):
            raise InvalidModel("q vanishes where p has mass (infinite entropy)")

    @property
    def outcomes(self) -> int:
        return len(self.p)


@dataclass(frozen=True)
class CutoffProfile:
    """The sharp window chi = indicator of [-1, 1]."""

    def __call__(self, x):
        return np.where(np.abs(np.asarray(x, dtype=float)) <= 1.0, 1.0, 0.0)


def finite_relative_entropy(m: FiniteModel) -> float:
    """H(p, q) computed exactly on the finite outcome space."""
    return sum(
        pi * math.log(pi / qi) for pi, qi in zip(m.p, m.q) if pi > 0
    )


def lemma21_check(m: FiniteModel, x_values) -> tuple:
    """Entropy filter: E_q[X] >= e^(-2H(p,q)-1) (E_p[X] - 1/2) for 0 <= X <= 1.

    Returns (lhs, rhs, holds).  This is a proved inequality; a violation
    beyond tolerance indicates an arithmetic bug.
    """
    x = np.asarray(x_values, dtype=float)
    if len(x) != m.outcomes:
        raise InvalidModel("x_values length must equal the outcome count")
    if np.any(x < 0) or np.any(x > 1):
        raise InvalidModel("X must take values in [0, 1]")
    h = finite_relative_entropy(m)
    lhs = float(np.dot(m.q, x))
    rhs = math.exp(-2.0 * h - 1.0) * (float(np.dot(m.p, x)) - 0.5)
    return lhs, rhs, lhs >= rhs - _TOL


@dataclass(frozen=True)
class DisjunctionReport:
    chi_mean_p: float
    stderr_p: float
    chi_mean_q: float
    stderr_q: float
    delta: float
    trials: int
    holds: bool


def disjunction_check(P: DensityPair, Q: DensityPair, n: int, beta: float,
                      delta: float, estimator: str, trials: int,
                      seed: SeedPolicy,
                      spec: QuadratureSpec = QuadratureSpec()) -> DisjunctionReport:
    """Two-point disjunction: under the premises n H(P,Q) <= (1/2) log(1/(11 delta))
    and beta |a(P) - a(Q)| > 4, at least one of the chi-means must fall below
    1 - delta.  Monte Carlo estimates both means and asserts the conclusion
    up to 3 binomial standard errors.
    """
    if not (0.0 < delta < 1.0 / 11.0):
        raise PremiseFails("delta", f"delta={delta} outside (0, 1/11)")
    h = relative_entropy(P, Q, spec)
    budget = 0.5 * math.log(1.0 / (11.0 * delta))
    if n * h > budget:
        raise PremiseFails("entropy", f"nH={n * h:.4g} > {budget:.4g}")
    if beta * abs(P.threshold - Q.threshold) <= 4.0:
        raise PremiseFails(
            "separation",
            f"beta|a(P)-a(Q)|={beta * abs(P.threshold - Q.threshold):.4g} <= 4",
        )
    est = resolve_estimator(estimator)
    chi = CutoffProfile()
    means = []
    errs = []
    for index, pair in enumerate((P, Q)):
        hits = 0
        for t in range(trials):
            s = draw(pair, n, SeedPolicy(seed.master_seed,
                                         seed.trial_index + 2 * t + index))
            a_hat = est(s)
            hits += int(chi(beta * (a_hat - pair.threshold)))
        mean = hits / trials
        means.append(mean)
        errs.append(math.sqrt(max(mean * (1.0 - mean), 1e-12) / trials))
    holds = (means[0] < 1.0 - delta + 3.0 * errs[0]) or \
            (means[1] < 1.0 - delta + 3.0 * errs[1])
    return DisjunctionReport(
        chi_mean_p=means[0], stderr_p=errs[0],
        chi_mean_q=means[1], stderr_q=errs[1],
        delta=delta, trials=trials, holds=holds,
    )


@dataclass(frozen=True)
class GeneralLossSetup:
    """Finite two-measure setup with per-hypothesis losses and a gap gamma.

    The premise requires the regret sums Delta_P(h) + Delta_Q(h) >= gamma
    for every hypothesis h, where Delta is loss minus the per-measure
    minimum.
    """

    model: FiniteModel
    loss_p: tuple
    loss_q: tuple
    gamma: float

    def __post_init__(self):
        if len(self.loss_p) != len(self.loss_q) or len(self.loss_p) < 1:
            raise InvalidModel("loss lists must be nonempty and equal length")
        if self.gamma <= 0:
            raise InvalidModel("gamma must be positive")

    @property
    def hypotheses(self) -> int:
        return len(self.loss_p)

    def regrets(self) -> tuple:
        dp = tuple(v - min(self.loss_p) for v in self.loss_p)
        dq = tuple(v - min(self.loss_q) for v in self.loss_q)
        return dp, dq


def lemma71_check(setup: GeneralLossSetup, n: int, delta: float,
                  decision_rule) -> tuple:
    """General-loss disjunction, verified by exact enumeration.

    decision_rule maps each length-n outcome sequence (a tuple of outcome
    indices, enumerated lexicographically) to a hypothesis index; it may be
    a callable or an indexable of length k^n.  Returns (eP, eQ, holds) where
    eP = E_{P^n}[capped regret under P] and the disjunction is
    eP >= delta*gamma  OR  eQ >= (1/2 - delta)*gamma*e^(-2nH(P,Q)-1).
    """
    if not (0.0 < delta < 0.5):
        raise InvalidModel("delta must lie in (0, 1/2)")
    k = setup.model.outcomes
    if n < 1 or k ** n > 4096:
        raise TooLarge(f"k^n = {k ** n} exceeds the enumeration cap 4096")
    dp, dq = setup.regrets()
    gamma = setup.gamma
    if min(a + b for a, b in zip(dp, dq)) < gamma - _TOL:
        raise PremiseFails("regret-gap",
                           "some h has Delta_P(h) + Delta_Q(h) < gamma")
    dpg = [min(gamma, v) for v in dp]
    dqg = [min(gamma, v) for v in dq]
    rule = decision_rule if callable(decision_rule) else \
        (lambda s, _r=decision_rule: _r[_encode(s, k)])
    ep = 0.0
    eq = 0.0
    for s in itertools.product(range(k), repeat=n):
        h = rule(s)
        prob_p = math.prod(setup.model.p[i] for i in s)
        prob_q = math.prod(setup.model.q[i] for i in s)
        ep += prob_p * dpg[h]
        eq += prob_q * dqg[h]
    hq = finite_relative_entropy(setup.model)
    holds = (ep >= delta * gamma - _TOL) or (
        eq >= (0.5 - delta) * gamma * math.exp(-2.0 * n * hq - 1.0) - _TOL
    )
    return ep, eq, holds


def _encode(seq, k: int) -> int:
    idx = 0
    for s in seq:
        idx = idx * k + s
    return idx
