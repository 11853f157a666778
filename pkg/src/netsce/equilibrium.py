"""Nash and selfconfirming equilibrium computation.

A profile is selfconfirming when every agent best-responds to a conjecture
its own feedback cannot refute: active agents observe their aggregate
exactly (so their conjecture must be correct), inactive agents observe
nothing (so any conjecture in range that justifies staying out survives).

Candidate equilibria are found by active-set enumeration: for an active set
K the interior first-order conditions are the linear system
(I - Z_KK) a_K = alpha_K, and a candidate is kept when the solution is
strictly positive, clears the action caps, and no agent outside K wants in.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import NotSymmetrizableError, NumericError, UsageError
from .game import GameSpec, aggregate, justifiable_inactivity_set, realized_payoff
from .network import WeightedNetwork, check_assumption, spectral_radius, symmetrize_decompose

__all__ = [
    "ACTIVE_TOL",
    "BOUNDARY_TOL",
    "CAP_MARGIN",
    "ConditionEntry",
    "EquilibriumRecord",
    "InteriorReport",
    "SceCheck",
    "SocialOptimum",
    "SolveDiagnostics",
    "enumerate_sce",
    "interior_conditions",
    "is_sce",
    "make_record",
    "social_optimum",
    "solve_auxiliary_ne",
    "solve_full_ne",
    "welfare",
]

#: An action counts as active only strictly above this.
ACTIVE_TOL = 1e-9
#: Candidates this close to the action cap are rejected as cap-bound.
CAP_MARGIN = 1e-6
#: Slack for the Nash boundary test on inactive agents.
BOUNDARY_TOL = 1e-9

_MAX_ENUM_BITS = 20


@dataclass(frozen=True)
class EquilibriumRecord:
    """One equilibrium: actions, witness conjectures, classification.

    ``kind`` is "NE" when every inactive agent's true incentive
    alpha_i + x_i is nonpositive (within tolerance), else "SCE-non-NE".
    ``declared_inactive`` lists agents whose zero action is justified by an
    unrefuted pessimistic conjecture rather than by true incentives.
    """

    actions: np.ndarray
    conjectures: np.ndarray
    active_set: frozenset
    declared_inactive: frozenset
    kind: str

    def __post_init__(self):
        for name in ("actions", "conjectures"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def bitmask(self) -> int:
        return sum(1 << i for i in self.active_set)


@dataclass(frozen=True)
class SolveDiagnostics:
    """Side information from an enumeration run."""

    examined: int = 0
    singular: tuple = ()  # (active-set frozenset, "continuum" | "inconsistent")
    cap_hits: tuple = ()  # active sets whose solution pressed the cap


def make_record(
    spec: GameSpec,
    actions: np.ndarray,
    declared_inactive: frozenset = frozenset(),
    conjectures: Optional[np.ndarray] = None,
    validate: bool = True,
) -> EquilibriumRecord:
    """Assemble a record for a given action profile.

    Default witness conjectures: the true aggregate for every agent except
    the declared-inactive ones, who are assigned their most pessimistic
    admissible conjecture x_lo. With ``validate`` the pair must pass is_sce;
    solvers that guarantee validity by construction switch it off.
    """
    a = np.asarray(actions, dtype=float)
    x = aggregate(spec, a)
    active = frozenset(int(i) for i in np.flatnonzero(a > ACTIVE_TOL))
    if conjectures is None:
        conj = x.copy()
        for i in declared_inactive:
            conj[i] = spec.x_lo[i]
    else:
        conj = np.asarray(conjectures, dtype=float)
    if validate:
        chk = is_sce(spec, a, conj)
        if not chk.ok:
            worst = ", ".join(
                f"agent {i}: {why} off by {gap:.3g}" for i, why, gap in chk.violations[:3]
            )
            raise UsageError(f"profile and conjectures are not selfconfirming ({worst})")
    inactive = [i for i in range(spec.n) if i not in active]
    is_ne = all(spec.alpha[i] + x[i] <= BOUNDARY_TOL for i in inactive)
    return EquilibriumRecord(
        actions=a,
        conjectures=conj,
        active_set=active,
        declared_inactive=frozenset(declared_inactive),
        kind="NE" if is_ne else "SCE-non-NE",
    )


def _solve_active(spec: GameSpec, k: Sequence[int]):
    """Solve the interior conditions on active set k.

    Returns (solution, None) or (None, "continuum" | "inconsistent") when
    the restricted system is singular.
    """
    if not k:
        return np.zeros(0), None
    idx = np.array(sorted(k), dtype=int)
    sub = np.eye(len(idx)) - spec.net.z[np.ix_(idx, idx)]
    rhs = spec.alpha[idx]
    try:
        sol = np.linalg.solve(sub, rhs)
    except np.linalg.LinAlgError:
        lsq = np.linalg.lstsq(sub, rhs, rcond=None)[0]
        resid = np.max(np.abs(sub @ lsq - rhs)) if len(idx) else 0.0
        return None, ("continuum" if resid <= 1e-9 else "inconsistent")
    # Guard against silent blow-ups of near-singular systems.
    if not np.all(np.isfinite(sol)) or np.max(np.abs(sub @ sol - rhs)) > 1e-7 * max(
        1.0, float(np.max(np.abs(rhs)))
    ):
        return None, "inconsistent"
    return sol, None


def _embed(spec: GameSpec, k: Sequence[int], sol: np.ndarray) -> np.ndarray:
    a = np.zeros(spec.n)
    for pos, i in enumerate(sorted(k)):
        a[i] = sol[pos]
    return a


def solve_auxiliary_ne(spec: GameSpec, candidates: Iterable[int]):
    """All Nash equilibria of the game with agents outside ``candidates``
    clamped to zero.

    Enumerates active subsets K of the candidate set: the interior solution
    on K is accepted when strictly positive (> 1e-9), clear of the caps (by
    1e-6), and no candidate outside K has a positive incentive at the
    profile. Returns (records, diagnostics), records sorted by active-set
    bitmask.
    """
    j = sorted(set(int(i) for i in candidates))
    for i in j:
        if not 0 <= i < spec.n:
            raise UsageError(f"agent index {i} out of range")
    if len(j) > _MAX_ENUM_BITS:
        raise UsageError(
            f"active-set enumeration over {len(j)} agents needs 2^{len(j)} solves; "
            f"limit is {_MAX_ENUM_BITS}"
        )
    declared = frozenset(range(spec.n)) - frozenset(j)
    records, singular, cap_hits = [], [], []
    seen = set()
    examined = 0
    for r in range(len(j) + 1):
        for k in itertools.combinations(j, r):
            examined += 1
            sol, fail = _solve_active(spec, k)
            if fail is not None:
                singular.append((frozenset(k), fail))
                continue
            if np.any(sol <= ACTIVE_TOL):
                continue
            caps = spec.a_max[list(k)] if k else np.zeros(0)
            if np.any(sol > caps - CAP_MARGIN):
                cap_hits.append(frozenset(k))
                continue
            a = _embed(spec, k, sol)
            x = aggregate(spec, a)
            rest = [i for i in j if i not in k]
            if any(spec.alpha[i] + x[i] > ACTIVE_TOL for i in rest):
                continue
            key = tuple(np.round(a, 12))
            if key in seen:
                continue
            seen.add(key)
            records.append(make_record(spec, a, declared_inactive=declared, validate=False))
    records.sort(key=lambda rec: rec.bitmask)
    diags = SolveDiagnostics(
        examined=examined, singular=tuple(singular), cap_hits=tuple(cap_hits)
    )
    return records, diags


def solve_full_ne(spec: GameSpec):
    """All Nash equilibria of the unrestricted game (records, diagnostics)."""
    return solve_auxiliary_ne(spec, range(spec.n))


def enumerate_sce(spec: GameSpec):
    """All selfconfirming equilibria (records, diagnostics).

    For every subset S of the justifiable-inactivity set, clamp S to zero
    with pessimistic conjectures and keep the fully active interior solution
    on the rest when it is strictly positive and clear of the caps. Every
    Nash equilibrium reappears here (its inactive agents are always
    justifiable because conjecture ranges contain attainable aggregates), so
    the returned set contains the Nash set.
    """
    i0 = sorted(justifiable_inactivity_set(spec))
    if len(i0) > _MAX_ENUM_BITS:
        raise UsageError(
            f"{len(i0)} agents can justify inactivity; enumeration needs "
            f"2^{len(i0)} solves, limit is {_MAX_ENUM_BITS}"
        )
    records, singular, cap_hits = [], [], []
    seen = set()
    examined = 0
    all_agents = frozenset(range(spec.n))
    for r in range(len(i0) + 1):
        for s in itertools.combinations(i0, r):
            examined += 1
            active = sorted(all_agents - frozenset(s))
            sol, fail = _solve_active(spec, active)
            if fail is not None:
                singular.append((frozenset(active), fail))
                continue
            if np.any(sol <= ACTIVE_TOL):
                continue
            caps = spec.a_max[active] if active else np.zeros(0)
            if np.any(sol > caps - CAP_MARGIN):
                cap_hits.append(frozenset(active))
                continue
            a = _embed(spec, active, sol)
            key = tuple(np.round(a, 12))
            if key in seen:
                continue
            seen.add(key)
            records.append(
                make_record(spec, a, declared_inactive=frozenset(s), validate=False)
            )
    records.sort(key=lambda rec: rec.bitmask)
    diags = SolveDiagnostics(
        examined=examined, singular=tuple(singular), cap_hits=tuple(cap_hits)
    )
    return records, diags


@dataclass(frozen=True)
class SceCheck:
    """Verdict of a pointwise selfconfirming-equilibrium test."""

    ok: bool
    violations: tuple = ()  # (agent, reason, magnitude)


def is_sce(spec: GameSpec, actions, conjectures, tol: float = 1e-9) -> SceCheck:
    """Check subjective rationality and confirmation at a profile.

    Violations are reported per agent: "range" (action or conjecture out of
    bounds), "rationality" (action is not the best reply to the conjecture),
    "confirmation" (an active agent's conjecture differs from its true
    aggregate).
    """
    a = np.asarray(actions, dtype=float)
    xh = np.asarray(conjectures, dtype=float)
    x = aggregate(spec, a)
    bad = []
    for i in range(spec.n):
        if a[i] < -tol or a[i] > spec.a_max[i] + tol:
            bad.append((i, "range", float(a[i])))
        if xh[i] < spec.x_lo[i] - tol or xh[i] > spec.x_hi[i] + tol:
            bad.append((i, "range", float(xh[i])))
        br = min(max(spec.alpha[i] + xh[i], 0.0), spec.a_max[i])
        if abs(a[i] - br) > tol:
            bad.append((i, "rationality", float(abs(a[i] - br))))
        if a[i] > ACTIVE_TOL and abs(xh[i] - x[i]) > tol:
            bad.append((i, "confirmation", float(abs(xh[i] - x[i]))))
    return SceCheck(ok=not bad, violations=tuple(bad))


@dataclass(frozen=True)
class ConditionEntry:
    """One sufficient condition for an interior equilibrium."""

    name: str
    holds: bool
    witness: dict = field(default_factory=dict)


@dataclass(frozen=True)
class InteriorReport:
    """Sufficient-condition scan for interior (all-active) equilibria.

    ``solution`` solves (I - Z) a = alpha; ``positive`` says whether it is
    strictly positive; each entry in ``conditions`` alone guarantees that
    outcome for every positive intercept vector.
    """

    conditions: tuple
    solution: Optional[np.ndarray]
    positive: Optional[bool]
    degenerate: bool

    def any_holds(self) -> bool:
        return any(c.holds for c in self.conditions)


def interior_conditions(net: WeightedNetwork, alpha=None) -> InteriorReport:
    """Evaluate the three sufficient conditions and the interior solution.

    Conditions: (i) entries bounded by 1/n in magnitude; (ii) nonpositive
    weights with spectral radius below one; (iii) diagonally symmetrizable
    with largest symmetrized eigenvalue below one in magnitude.
    """
    n = net.n
    z = net.z
    a_vec = np.ones(n) if alpha is None else np.asarray(alpha, dtype=float)

    bounded = check_assumption(net, "bounded")
    cond_bounded = ConditionEntry("bounded", bounded.holds, dict(bounded.witness))

    off = ~np.eye(n, dtype=bool)
    max_off = float(z[off].max()) if n > 1 else -np.inf
    rho = spectral_radius(z)
    cond_neg = ConditionEntry(
        "negative-limited",
        holds=bool(max_off < 0.0 and rho < 1.0),
        witness={"max_offdiag": max_off, "rho": rho},
    )

    try:
        dec = symmetrize_decompose(net)
        lam = dec.lambda_max()
        cond_sym = ConditionEntry(
            "symmetrizable-limited",
            holds=bool(abs(lam) < 1.0),
            witness={"lambda_max": lam},
        )
    except NotSymmetrizableError as exc:
        cond_sym = ConditionEntry(
            "symmetrizable-limited",
            holds=False,
            witness={"reason": exc.reason, "detail": exc.detail},
        )

    try:
        sol = np.linalg.solve(np.eye(n) - z, a_vec)
        positive = bool(np.all(sol > 0))
        degenerate = False
    except np.linalg.LinAlgError:
        sol, positive, degenerate = None, None, True

    return InteriorReport(
        conditions=(cond_bounded, cond_neg, cond_sym),
        solution=sol,
        positive=positive,
        degenerate=degenerate,
    )


def welfare(spec: GameSpec, beta: float, actions) -> float:
    """Total payoffs plus uniform global spillovers beta per other agent."""
    a = np.asarray(actions, dtype=float)
    return float(realized_payoff(spec, a).sum() + beta * (spec.n - 1) * a.sum())


@dataclass(frozen=True)
class SocialOptimum:
    """Unconstrained welfare maximizer and its feasibility report."""

    actions: np.ndarray
    welfare: float
    clamped: bool
    actions_clamped: np.ndarray


def social_optimum(spec: GameSpec, beta: float) -> SocialOptimum:
    """Maximize total welfare; first-order system (I - Z - Z^T) a = rhs.

    The planner internalizes both directions of every externality, hence
    the symmetrized coefficient z_ij + z_ji. The raw stationary point is
    returned even when infeasible, with a clamped copy and a flag.
    """
    n = spec.n
    m = np.eye(n) - spec.net.z - spec.net.z.T
    rhs = spec.alpha + beta * (n - 1)
    try:
        sol = np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"welfare first-order system is singular: {exc}") from exc
    clamped = bool(np.any(sol < 0) or np.any(sol > spec.a_max))
    return SocialOptimum(
        actions=sol,
        welfare=welfare(spec, beta, sol),
        clamped=clamped,
        actions_clamped=np.clip(sol, 0.0, spec.a_max),
    )
