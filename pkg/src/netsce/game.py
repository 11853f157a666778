"""Linear-quadratic games with action feedback on a weighted network.

Agent i chooses an action a_i in [0, a_max_i] and receives

    v_i = alpha_i * a_i - a_i**2 / 2 + a_i * x_i,

where x_i = sum_j z_ij * a_j is the externality aggregate. After play, an
agent observes only its own realized payoff; an active agent can invert that
payoff to the exact aggregate, an inactive agent learns nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import UsageError
from .network import WeightedNetwork

__all__ = [
    "DEFAULT_ACTION_CAP",
    "GameSpec",
    "InfoSet",
    "aggregate",
    "best_reply",
    "expost_info_set",
    "feedback_message",
    "invert_feedback",
    "justifiable_inactivity_set",
    "make_game",
    "payoff",
    "realized_payoff",
]

DEFAULT_ACTION_CAP = 1e6


def _vec(value, n, name) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = np.full(n, float(arr))
    if arr.shape != (n,):
        raise UsageError(f"{name} must be a scalar or length-{n} vector")
    if not np.all(np.isfinite(arr)):
        raise UsageError(f"{name} must be finite")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GameSpec:
    """A fully specified game: network, intercepts, caps, conjecture ranges.

    ``x_lo``/``x_hi`` bound each agent's conjecture about its aggregate and
    must contain every attainable aggregate value; violations raise at
    construction so downstream logic can rely on containment.
    """

    net: WeightedNetwork
    alpha: np.ndarray
    a_max: np.ndarray
    x_lo: np.ndarray
    x_hi: np.ndarray

    def __post_init__(self):
        n = self.net.n
        object.__setattr__(self, "alpha", _vec(self.alpha, n, "alpha"))
        object.__setattr__(self, "a_max", _vec(self.a_max, n, "a_max"))
        object.__setattr__(self, "x_lo", _vec(self.x_lo, n, "x_lo"))
        object.__setattr__(self, "x_hi", _vec(self.x_hi, n, "x_hi"))
        if np.any(self.a_max <= 0):
            i = int(np.flatnonzero(self.a_max <= 0)[0])
            raise UsageError(f"a_max[{i}] must be positive")
        if np.any(self.x_lo > self.x_hi):
            i = int(np.flatnonzero(self.x_lo > self.x_hi)[0])
            raise UsageError(f"x_lo[{i}] exceeds x_hi[{i}]")
        z = self.net.z
        attain_lo = np.minimum(z, 0.0) @ self.a_max
        attain_hi = np.maximum(z, 0.0) @ self.a_max
        ok_lo = self.x_lo <= attain_lo + 1e-12
        ok_hi = self.x_hi >= attain_hi - 1e-12
        if not np.all(ok_lo & ok_hi):
            i = int(np.flatnonzero(~(ok_lo & ok_hi))[0])
            raise UsageError(
                f"conjecture range for agent {i} does not contain all "
                f"attainable aggregates [{attain_lo[i]:.6g}, {attain_hi[i]:.6g}]"
            )

    @property
    def n(self) -> int:
        return self.net.n


def make_game(
    net: WeightedNetwork,
    alpha,
    a_max=None,
    x_lo=None,
    x_hi=None,
) -> GameSpec:
    """Build a :class:`GameSpec`, filling defaults.

    Action caps default to ``DEFAULT_ACTION_CAP``. Conjecture ranges default
    to the symmetric interval [-B, B] with ``B = max_i sum_j w * a_max_j``
    when the network carries weight bounds (w the larger bound magnitude),
    and twice the max attainable aggregate magnitude otherwise.
    """
    n = net.n
    a_cap = _vec(DEFAULT_ACTION_CAP if a_max is None else a_max, n, "a_max")
    if (x_lo is None) != (x_hi is None):
        raise UsageError("give both conjecture bounds or neither")
    if x_lo is None:
        if net.w_lo is not None:
            w = max(abs(net.w_lo), abs(net.w_hi))
            b = float(max(w * (a_cap.sum() - a_cap[i]) for i in range(n)))
        else:
            b = 2.0 * float(np.max(np.abs(net.z) @ a_cap))
        x_lo, x_hi = -b, b
    return GameSpec(net=net, alpha=alpha, a_max=a_cap, x_lo=x_lo, x_hi=x_hi)


def aggregate(spec: GameSpec, actions: np.ndarray, i: Optional[int] = None):
    """Externality aggregates x = Z a (one agent's entry when ``i`` is given)."""
    x = spec.net.z @ np.asarray(actions, dtype=float)
    if i is None:
        return x
    if not 0 <= i < spec.n:
        raise UsageError(f"agent index {i} out of range")
    return float(x[i])


def best_reply(spec: GameSpec, conjectures: np.ndarray) -> np.ndarray:
    """Subjective best replies: alpha + x_hat truncated into [0, a_max].

    The indifference point alpha_i + x_hat_i = 0 resolves to exactly 0.
    """
    return np.clip(spec.alpha + np.asarray(conjectures, dtype=float), 0.0, spec.a_max)


def payoff(spec: GameSpec, actions, aggregates) -> np.ndarray:
    """Payoffs under given actions and (true or conjectured) aggregates."""
    a = np.asarray(actions, dtype=float)
    x = np.asarray(aggregates, dtype=float)
    return spec.alpha * a - 0.5 * a * a + a * x


def realized_payoff(spec: GameSpec, actions) -> np.ndarray:
    return payoff(spec, actions, aggregate(spec, actions))


def feedback_message(spec: GameSpec, actions) -> np.ndarray:
    """The post-play message each agent receives: its own realized payoff."""
    return realized_payoff(spec, actions)


def invert_feedback(alpha, actions, messages):
    """Recover aggregates from payoffs: x = m/a - alpha + a/2.

    Exact for any strictly positive action, including capped ones. Raises
    for non-positive actions, whose payoff (zero) carries no information.
    """
    a = np.asarray(actions, dtype=float)
    if np.any(a <= 0):
        raise UsageError("feedback inversion needs strictly positive actions")
    return np.asarray(messages, dtype=float) / a - np.asarray(alpha, dtype=float) + a / 2.0


@dataclass(frozen=True)
class InfoSet:
    """What one agent can infer about its aggregate after one play."""

    kind: str  # "point" or "interval"
    point: Optional[float] = None
    lo: Optional[float] = None
    hi: Optional[float] = None


def expost_info_set(spec: GameSpec, i: int, a_i: float, x_i: float) -> InfoSet:
    """Ex-post information about x_i: exact if active, vacuous if not."""
    if not 0 <= i < spec.n:
        raise UsageError(f"agent index {i} out of range")
    if a_i > 0:
        return InfoSet(kind="point", point=float(x_i))
    return InfoSet(kind="interval", lo=float(spec.x_lo[i]), hi=float(spec.x_hi[i]))


def justifiable_inactivity_set(spec: GameSpec) -> frozenset:
    """Agents whose conjecture range admits a belief rationalizing zero.

    Agent i qualifies iff x_lo_i <= -alpha_i: some admissible conjecture
    makes the unconstrained reply nonpositive.
    """
    return frozenset(int(i) for i in np.flatnonzero(spec.x_lo <= -spec.alpha))
