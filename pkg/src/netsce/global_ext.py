"""Games with an unobservable-composition global spillover.

On top of the network payoff each agent receives y_i = beta * sum_{j!=i} a_j
regardless of links. Feedback still reveals only one number (the realized
payoff), so an active agent learns the TOTAL externality a_i*x_i + y_i but
not its split between the local and the global channel. Agents resolve the
ambiguity with a fixed perceived centrality c_i — the ratio x_hat/y_hat they
believe in — which pins the split: conjecture updates keep x_hat = c*y_hat.

The rest points of that updating rule in the all-active regime (common
alpha > 0, nonnegative weights) solve, per agent,

    H_i(a) = alpha + c_i (a_i x_i + y_i) / (1 + c_i a_i) - a_i = 0,

and the positive solution for one coordinate given the others is the
positive root of c a^2 + (1 - c(alpha + x)) a - (alpha + c y) = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import NumericError, UsageError
from .game import GameSpec, aggregate, realized_payoff
from .network import WeightedNetwork

__all__ = [
    "GlobalConjecture",
    "GlobalGameSpec",
    "GlobalSceCheck",
    "GlobalSolve",
    "GlobalStep",
    "Homeo2Report",
    "PhiEntry",
    "TrueCentrality",
    "bonacich",
    "check_global_sce",
    "check_homeo2",
    "global_learn_step",
    "global_payoff",
    "global_spillover",
    "make_global_game",
    "phi_map",
    "residual",
    "solve_global_sce",
    "true_centrality",
]


def _vec(value, n, name):
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
class GlobalGameSpec:
    """Base game plus global spillover rate and perceived centralities.

    Perceived centralities must be admissible: 0 < c_i <= rowsum_i / beta,
    where rowsum_i is agent i's total incoming weight. (A correct belief
    lies in that range whenever others' actions are nondecreasing in index
    order of magnitude; the upper end is the all-equal-actions ratio.)
    """

    base: GameSpec
    beta: float
    c: np.ndarray
    y_lo: np.ndarray
    y_hi: np.ndarray

    def __post_init__(self):
        n = self.base.n
        beta = float(self.beta)
        if not np.isfinite(beta) or beta <= 0:
            raise UsageError("beta must be positive and finite")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "c", _vec(self.c, n, "c"))
        object.__setattr__(self, "y_lo", _vec(self.y_lo, n, "y_lo"))
        object.__setattr__(self, "y_hi", _vec(self.y_hi, n, "y_hi"))
        if np.any(self.c <= 0):
            i = int(np.flatnonzero(self.c <= 0)[0])
            raise UsageError(f"c[{i}] must be strictly positive")
        bound = self.base.net.z.sum(axis=1) / beta
        if np.any(self.c > bound + 1e-12):
            i = int(np.flatnonzero(self.c > bound + 1e-12)[0])
            raise UsageError(
                f"c[{i}]={self.c[i]:.6g} exceeds the admissible bound "
                f"{bound[i]:.6g} (row weight sum over beta)"
            )
        attain_hi = beta * (self.base.a_max.sum() - self.base.a_max)
        if np.any(self.y_lo > 0.0 + 1e-12) or np.any(self.y_hi < attain_hi - 1e-12):
            i = int(
                np.flatnonzero(
                    (self.y_lo > 1e-12) | (self.y_hi < attain_hi - 1e-12)
                )[0]
            )
            raise UsageError(
                f"spillover range for agent {i} does not contain attainable "
                f"values [0, {attain_hi[i]:.6g}]"
            )

    @property
    def n(self) -> int:
        return self.base.n


def make_global_game(
    base: GameSpec, beta: float, c, y_lo=None, y_hi=None
) -> GlobalGameSpec:
    """Build a :class:`GlobalGameSpec`; spillover bounds default to the
    attainable range [0, beta * sum_{j!=i} a_max_j]."""
    n = base.n
    if (y_lo is None) != (y_hi is None):
        raise UsageError("give both spillover bounds or neither")
    if y_lo is None:
        y_lo = np.zeros(n)
        y_hi = beta * (base.a_max.sum() - base.a_max)
    return GlobalGameSpec(base=base, beta=beta, c=c, y_lo=y_lo, y_hi=y_hi)


def global_spillover(g: GlobalGameSpec, actions) -> np.ndarray:
    """y_i = beta * sum of others' actions."""
    a = np.asarray(actions, dtype=float)
    return g.beta * (a.sum() - a)


def global_payoff(g: GlobalGameSpec, actions) -> np.ndarray:
    """Realized payoffs including the global spillover term."""
    return realized_payoff(g.base, actions) + global_spillover(g, actions)


def _require_learning_regime(g: GlobalGameSpec) -> float:
    """The belief-update ops assume a common positive intercept and
    nonnegative weights; returns the scalar intercept."""
    alpha = g.base.alpha
    if not np.allclose(alpha, alpha[0], rtol=0, atol=1e-12):
        raise UsageError("conjecture updating requires a common intercept alpha")
    if alpha[0] <= 0:
        raise UsageError("conjecture updating requires a positive intercept")
    if np.any(g.base.net.z < 0):
        raise UsageError("conjecture updating requires nonnegative weights")
    return float(alpha[0])


@dataclass(frozen=True)
class GlobalConjecture:
    """An agent-wise belief about the externality split."""

    x_hat: np.ndarray
    y_hat: np.ndarray


@dataclass(frozen=True)
class GlobalSceCheck:
    ok: bool
    violations: tuple = ()  # (agent, reason, magnitude)


def check_global_sce(
    g: GlobalGameSpec, actions, conjecture: GlobalConjecture, tol: float = 1e-9
) -> GlobalSceCheck:
    """Selfconfirming test with the two-channel conjecture.

    Active agents must best-respond to x_hat and believe a payoff equal to
    the realized one, which pins y_hat = y + a (x - x_hat). Inactive agents
    observe exactly y (their network term vanishes), so y_hat must equal y
    and x_hat must justify staying out.
    """
    a = np.asarray(actions, dtype=float)
    xh = np.asarray(conjecture.x_hat, dtype=float)
    yh = np.asarray(conjecture.y_hat, dtype=float)
    x = aggregate(g.base, a)
    y = global_spillover(g, a)
    spec = g.base
    bad = []
    for i in range(g.n):
        if a[i] < -tol or a[i] > spec.a_max[i] + tol:
            bad.append((i, "range", float(a[i])))
        if xh[i] < spec.x_lo[i] - tol or xh[i] > spec.x_hi[i] + tol:
            bad.append((i, "range", float(xh[i])))
        if yh[i] < g.y_lo[i] - tol or yh[i] > g.y_hi[i] + tol:
            bad.append((i, "range", float(yh[i])))
        if a[i] > 0:
            br = min(max(spec.alpha[i] + xh[i], 0.0), spec.a_max[i])
            if abs(a[i] - br) > tol:
                bad.append((i, "rationality", float(abs(a[i] - br))))
            gap = yh[i] - (y[i] + a[i] * (x[i] - xh[i]))
            if abs(gap) > tol:
                bad.append((i, "confirmation", float(abs(gap))))
        else:
            if spec.alpha[i] + xh[i] > tol:
                bad.append((i, "rationality", float(spec.alpha[i] + xh[i])))
            if abs(yh[i] - y[i]) > tol:
                bad.append((i, "confirmation", float(abs(yh[i] - y[i]))))
    return GlobalSceCheck(ok=not bad, violations=tuple(bad))


@dataclass(frozen=True)
class TrueCentrality:
    """Realized ratio x/y per agent, with definedness and admissibility."""

    values: np.ndarray  # nan where undefined
    defined: np.ndarray  # bool
    admissible: np.ndarray  # bool; False where undefined


def true_centrality(g: GlobalGameSpec, actions) -> TrueCentrality:
    a = np.asarray(actions, dtype=float)
    x = aggregate(g.base, a)
    y = global_spillover(g, a)
    defined = y != 0.0
    values = np.full(g.n, np.nan)
    np.divide(x, y, out=values, where=defined)
    bound = g.base.net.z.sum(axis=1) / g.beta
    admissible = defined & (values > 0) & (values <= bound + 1e-12)
    return TrueCentrality(values=values, defined=defined, admissible=admissible)


def bonacich(net: WeightedNetwork, alpha) -> np.ndarray:
    """Action-weighted network centrality: the solution of (I - Z) b = alpha."""
    n = net.n
    rhs = np.asarray(alpha, dtype=float)
    if rhs.ndim == 0:
        rhs = np.full(n, float(rhs))
    try:
        return np.linalg.solve(np.eye(n) - net.z, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"centrality system is singular: {exc}") from exc


@dataclass(frozen=True)
class GlobalStep:
    actions: np.ndarray
    payoffs: np.ndarray
    x_hat_next: np.ndarray
    y_hat_next: np.ndarray


def global_learn_step(g: GlobalGameSpec, x_hat) -> GlobalStep:
    """One update of the split conjectures in the all-active regime.

    Agents play a = alpha + x_hat, observe total externality e = a x + y,
    and re-split it along their perceived centrality: the new conjectures
    solve x_hat' = c y_hat' and a x_hat' + y_hat' = e, i.e.
    x_hat' = c e / (1 + c a).
    """
    alpha = _require_learning_regime(g)
    xh = np.asarray(x_hat, dtype=float)
    a = alpha + xh
    if np.any(a <= 0):
        i = int(np.flatnonzero(a <= 0)[0])
        raise UsageError(
            f"conjecture x_hat[{i}]={xh[i]:.6g} drives agent {i} inactive; "
            "the updating rule is defined for active profiles only"
        )
    x = aggregate(g.base, a)
    y = global_spillover(g, a)
    e = a * x + y
    x_next = g.c * e / (1.0 + g.c * a)
    y_next = e / (1.0 + g.c * a)
    v = g.base.alpha * a - 0.5 * a * a + e
    return GlobalStep(actions=a, payoffs=v, x_hat_next=x_next, y_hat_next=y_next)


def residual(g: GlobalGameSpec, actions) -> np.ndarray:
    """Fixed-point defect H(a) of the rest-point system, per agent."""
    alpha = _require_learning_regime(g)
    a = np.asarray(actions, dtype=float)
    x = aggregate(g.base, a)
    y = global_spillover(g, a)
    return alpha + g.c * (a * x + y) / (1.0 + g.c * a) - a


@dataclass(frozen=True)
class Homeo2Report:
    """Per-agent check of the contraction window for plain iteration.

    Agent i passes when 0 < c_i beta (n-1) < rowsum_i < 2.
    """

    lhs: np.ndarray  # c * beta * (n - 1)
    row_sums: np.ndarray
    per_agent: np.ndarray  # bool
    holds: bool


def check_homeo2(g: GlobalGameSpec) -> Homeo2Report:
    _require_learning_regime(g)
    n = g.n
    lhs = g.c * g.beta * (n - 1)
    row_sums = g.base.net.z.sum(axis=1)
    per_agent = (lhs > 0) & (lhs < row_sums) & (row_sums < 2.0)
    return Homeo2Report(
        lhs=lhs, row_sums=row_sums, per_agent=per_agent, holds=bool(per_agent.all())
    )


@dataclass(frozen=True)
class GlobalSolve:
    """A solved (or best-effort) rest point of the split-belief dynamics."""

    actions: np.ndarray
    x_hat: np.ndarray
    y_hat: np.ndarray
    residual: float
    iterations: int
    method: str
    converged: bool


def _iterate(g, damping, tol, max_iter):
    xh = np.zeros(g.n)
    for k in range(max_iter):
        try:
            step = global_learn_step(g, xh)
        except UsageError:
            return xh, k + 1, False
        new = (1.0 - damping) * xh + damping * step.x_hat_next
        if not np.all(np.isfinite(new)) or float(np.max(np.abs(new))) > 1e12:
            return xh, k + 1, False
        if float(np.max(np.abs(new - xh))) < tol:
            return new, k + 1, True
        xh = new
    return xh, max_iter, False


def _seidel(g, alpha, tol, max_iter):
    z = g.base.net.z
    a = np.full(g.n, alpha)
    for k in range(max_iter):
        prev = a.copy()
        for i in range(g.n):
            x_i = float(z[i] @ a)
            y_i = g.beta * (a.sum() - a[i])
            ci = g.c[i]
            b2 = 1.0 - ci * (alpha + x_i)
            const = alpha + ci * y_i
            disc = b2 * b2 + 4.0 * ci * const
            if not np.isfinite(disc) or disc < 0.0:
                return prev, k + 1, False
            a[i] = (-b2 + np.sqrt(disc)) / (2.0 * ci)
        if float(np.max(np.abs(a))) > 1e12:
            return a, k + 1, False
        if float(np.max(np.abs(a - prev))) < tol:
            return a, k + 1, True
    return a, max_iter, False


def _newton(g, alpha, tol, max_iter):
    """Damped Newton on H(a) = 0 with the analytic Jacobian.

    Started at the common base payoff intercept, which keeps it on the
    small-action branch when the rest-point system has several solutions.
    """
    z = g.base.net.z
    n = g.n
    a = np.full(n, alpha)
    h = residual(g, a)
    for k in range(min(max_iter, 200)):
        norm = float(np.max(np.abs(h)))
        if norm < tol * max(1.0, float(np.max(np.abs(a)))):
            return a, k + 1, True
        x = aggregate(g.base, a)
        y = global_spillover(g, a)
        e = a * x + y
        d = 1.0 + g.c * a
        jac = (g.c / (d * d))[:, None] * (a[:, None] * z + g.beta * (1.0 - np.eye(n)))
        jac += np.diag(g.c * (x * d - g.c * e) / (d * d) - 1.0)
        try:
            step = np.linalg.solve(jac, -h)
        except np.linalg.LinAlgError:
            return a, k + 1, False
        t = 1.0
        while t > 1e-12:
            cand = a + t * step
            # stay in the dynamics' domain: genuine rest points have a > 0
            if np.all(cand > 0.0):
                h_cand = residual(g, cand)
                if float(np.max(np.abs(h_cand))) < norm:
                    a, h = cand, h_cand
                    break
            t *= 0.5
        else:
            return a, k + 1, False
    return a, min(max_iter, 200), False


def solve_global_sce(
    g: GlobalGameSpec,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    method: str = "auto",
) -> GlobalSolve:
    """Solve the rest-point system of the split-belief dynamics.

    ``method``: "iterate" replays the update map itself (fast on mild
    networks, but it can blow up from a cold start on hot ones even inside
    the check_homeo2 window), "damped" averages it with the identity,
    "seidel" sweeps the per-agent quadratic, "newton" runs damped Newton on
    the rest-point defect, "auto" tries them in that order, skipping plain
    iteration when the window test fails. The returned residual is
    max |H_i| at the final actions; ``converged`` compares it against
    ``tol`` scaled by the action size and additionally requires a strictly
    positive profile, the domain on which the update rule is defined.
    """
    alpha = _require_learning_regime(g)
    attempts = {
        "iterate": lambda: _iterate(g, 1.0, tol, max_iter),
        "damped": lambda: _iterate(g, 0.5, tol, max_iter),
        "seidel": lambda: _seidel(g, alpha, tol, max_iter),
        "newton": lambda: _newton(g, alpha, tol, max_iter),
    }
    if method in attempts:
        order = [method]
    elif method == "auto":
        window = check_homeo2(g).holds
        order = (["iterate"] if window else []) + ["damped", "seidel", "newton"]
    else:
        raise UsageError(f"unknown method {method!r}")

    total = 0
    best = None
    for name in order:
        with np.errstate(over="ignore", invalid="ignore"):
            out, iters, ok = attempts[name]()
        total += iters
        a = alpha + out if name in ("iterate", "damped") else out
        with np.errstate(invalid="ignore"):
            res = float(np.max(np.abs(residual(g, a))))
        if not np.isfinite(res):
            res = float("inf")
        if best is None or res < best[1]:
            best = (a, res, name)
        if ok and np.all(a > 0.0) and res < tol * max(1.0, float(np.max(np.abs(a)))):
            best = (a, res, name)
            break

    a, res, name = best
    x = aggregate(g.base, a)
    y = global_spillover(g, a)
    e = a * x + y
    with np.errstate(invalid="ignore", over="ignore"):
        x_hat = g.c * e / (1.0 + g.c * a)
        y_hat = e / (1.0 + g.c * a)
    good = bool(np.all(a > 0.0)) and res < tol * max(1.0, float(np.max(np.abs(a))))
    return GlobalSolve(
        actions=a,
        x_hat=x_hat,
        y_hat=y_hat,
        residual=res,
        iterations=total,
        method=name,
        converged=good,
    )


@dataclass(frozen=True)
class PhiEntry:
    """One point of the centrality-to-action map."""

    c: np.ndarray
    solve: GlobalSolve


def phi_map(
    base: GameSpec,
    beta: float,
    c_grid: Iterable,
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> tuple:
    """Solve the rest-point system along a grid of perceived centralities."""
    entries = []
    for c in c_grid:
        g = make_global_game(base, beta, c)
        entries.append(PhiEntry(c=g.c, solve=solve_global_sce(g, tol=tol, max_iter=max_iter)))
    return tuple(entries)
