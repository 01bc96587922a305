"""Closed-form sample-complexity bounds and Chernoff tails.

All logarithms are natural.  Bounds are reported as the ceiling of the
real-valued expression; pass ``ceil=False`` to get the real value itself.
A value above the signed 64-bit range comes back as :data:`ASTRONOMICAL`.

Where only an O-form is known the leading constant is a knob
(``c_graph``, ``c_fund``, ``c_lower``), not a claim about the truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

ASTRONOMICAL = math.inf
COUNT_MAX = 2**63 - 1

# snap ceilings of values within this relative distance of an integer, so that
# e.g. ln(e) rounding to 1 + 1ulp does not add a whole sample
_SNAP_RTOL = 1e-12


class Infeasible(ValueError):
    """No epsilon in (0, 1] meets the requested sample size."""


def _ceil(x: float):
    if not math.isfinite(x) or x > COUNT_MAX:
        return ASTRONOMICAL
    r = round(x)
    if abs(x - r) <= _SNAP_RTOL * max(1.0, abs(x)):
        return int(r)
    return math.ceil(x)


def _in_unit(name: str, x: float, *, closed_lo: bool = False) -> None:
    ok = (0 <= x <= 1) if closed_lo else (0 < x <= 1)
    if not ok:
        raise ValueError(f"{name} must lie in {'[0' if closed_lo else '(0'}, 1], got {x}")


@dataclass(frozen=True)
class BoundParams:
    """Inputs shared by the bound calculators.

    ``card_gamma``, ``card_h`` and ``card_y`` are |Gamma|, |H| and |Y|; ``d``
    is a graph-dimension (or VC-dimension) upper bound.
    """

    epsilon: float = 0.05
    delta: float = 0.05
    gamma: float = 0.1
    psi: float = 0.1
    lam: float = 0.1
    card_gamma: int = 1
    card_h: int = 1
    card_y: int = 2
    d: int = 1
    c_graph: float = 64.0
    c_fund: float = 8.0
    c_lower: float = 1.0

    def __post_init__(self):
        for name in ("epsilon", "delta", "gamma", "psi", "lam"):
            _in_unit(name, getattr(self, name))
        for name in ("card_gamma", "card_h", "card_y"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.d < 0:
            raise ValueError("d must be nonnegative")
        for name in ("c_graph", "c_fund", "c_lower"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def replace(self, **changes) -> "BoundParams":
        return replace(self, **changes)


def finite_class_bound(p: BoundParams, *, ceil: bool = True):
    """``8 / (eps^2 gamma psi) * ln(8 |Gamma| |H| / (delta lambda))``.

    Samples sufficient for every member of a finite class to have empirical
    calibration error within ``epsilon`` of the true error on all of its
    interesting categories, with probability ``1 - delta``.
    """
    x = 8.0 / (p.epsilon**2 * p.gamma * p.psi) * math.log(
        8.0 * p.card_gamma * p.card_h / (p.delta * p.lam)
    )
    return _ceil(x) if ceil else x


def graph_dim_bound(p: BoundParams, *, ceil: bool = True):
    """``c_graph * (d + ln(|Gamma| |Y| / delta)) / (eps^2 psi^2 gamma)``."""
    x = p.c_graph * (p.d + math.log(p.card_gamma * p.card_y / p.delta)) / (
        p.epsilon**2 * p.psi**2 * p.gamma
    )
    return _ceil(x) if ceil else x


def lower_bound(p: BoundParams, *, ceil: bool = True):
    """``c_lower * ln(1/delta) / (psi gamma eps^2)``."""
    x = p.c_lower * math.log(1.0 / p.delta) / (p.psi * p.gamma * p.epsilon**2)
    return _ceil(x) if ceil else x


def subpopulation_coverage_bound(gamma: float, delta: float, card_gamma: int, *, ceil: bool = True):
    """Samples after which every group of mass >= gamma holds > gamma*m/2 points
    with probability ``1 - delta``: ``(8/gamma) ln(|Gamma|/delta)``."""
    if not (0 < gamma < 1 and 0 < delta < 1):
        raise ValueError("gamma and delta must lie in (0, 1)")
    if card_gamma < 1:
        raise ValueError("card_gamma must be at least 1")
    x = 8.0 / gamma * math.log(card_gamma / delta)
    return _ceil(x) if ceil else x


def binary_uc_bound(d: int, epsilon: float, delta: float, c_fund: float = 8.0, *, ceil: bool = True):
    """``c_fund * (d + ln(1/delta)) / eps^2`` for a binary class of VC-dimension d."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    if not (epsilon > 0 and 0 < delta <= 1 and c_fund > 0):
        raise ValueError("need epsilon > 0, delta in (0, 1], c_fund > 0")
    x = c_fund * (d + math.log(1.0 / delta)) / epsilon**2
    return _ceil(x) if ceil else x


def occupancy_threshold(p: BoundParams) -> float:
    """Per-category sample count ``(2/eps^2) ln(8|Gamma||H|/(delta lambda))``
    behind the finite-class bound; a diagnostic readout only."""
    return 2.0 / p.epsilon**2 * math.log(8.0 * p.card_gamma * p.card_h / (p.delta * p.lam))


def chernoff_absolute_tail(n: int, epsilon: float, *, clamp: bool = True) -> float:
    """Bound ``2 exp(-2 eps^2 n)`` on ``Pr[|mean - mu| >= eps]`` for n Bernoulli draws."""
    if n < 1 or not epsilon > 0:
        raise ValueError("need n >= 1 and epsilon > 0")
    t = 2.0 * math.exp(-2.0 * epsilon**2 * n)
    return min(t, 1.0) if clamp else t


def chernoff_relative_tail(expectation: float, epsilon: float) -> float:
    """Bound ``exp(-eps^2 E[X] / 2)`` on ``Pr[X <= (1 - eps) E[X]]``."""
    if expectation < 0 or not (0 < epsilon < 1):
        raise ValueError("need expectation >= 0 and epsilon in (0, 1)")
    return math.exp(-(epsilon**2) * expectation / 2.0)


def achievable_epsilon(m: int, p: BoundParams, mode: str = "finite") -> float:
    """Smallest epsilon whose bound (other parameters from ``p``) is at most ``m``.

    ``mode="finite"`` inverts :func:`finite_class_bound` in closed form;
    ``mode="graph"`` bisects :func:`graph_dim_bound` to 1e-9.

    Raises:
        Infeasible: if even epsilon = 1 needs more than ``m`` samples.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if mode == "finite":
        bound = finite_class_bound
    elif mode == "graph":
        bound = graph_dim_bound
    else:
        raise ValueError(f"mode must be 'finite' or 'graph', got {mode!r}")
    if bound(p.replace(epsilon=1.0)) > m:
        raise Infeasible(f"{m} samples are not enough even for epsilon = 1")

    if mode == "finite":
        L = math.log(8.0 * p.card_gamma * p.card_h / (p.delta * p.lam))
        eps = min(1.0, math.sqrt(8.0 * L / (p.gamma * p.psi * m)))
        while bound(p.replace(epsilon=eps)) > m:
            eps = math.nextafter(eps, 2.0)
        # step back while the smaller value still fits
        while eps > 0:
            lower = math.nextafter(eps, 0.0)
            if lower <= 0 or bound(p.replace(epsilon=lower)) > m:
                break
            eps = lower
        return eps

    lo, hi = 0.0, 1.0
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        if bound(p.replace(epsilon=mid)) <= m:
            hi = mid
        else:
            lo = mid
    return hi
