"""Weighted directed networks of payoff externalities.

Agents are indexed 0..n-1. Entry ``z[i, j]`` is the weight with which agent
j's action enters agent i's aggregate; the diagonal is identically zero. All
structural tests used by the rest of the package (boundedness, sign symmetry,
spectral limits, diagonal symmetrizability) live here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import NotSymmetrizableError, NumericError, UsageError

__all__ = [
    "ASSUMPTIONS",
    "AssumptionReport",
    "Decomposition",
    "NeighborSets",
    "RandomNetSpec",
    "WeightedNetwork",
    "check_assumption",
    "neighbor_sets",
    "random_symmetrizable",
    "spectral_radius",
    "submatrix",
    "symmetrize_decompose",
]

ASSUMPTIONS = (
    "bounded",
    "same-sign",
    "negative",
    "limited",
    "symmetrizable",
    "symmetrizable-limited",
)

#: Relative tolerance for ratio-consistency and symmetry checks.
_REL_TOL = 1e-9


def _as_readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class WeightedNetwork:
    """A weighted externality network.

    Parameters
    ----------
    z : (n, n) array_like
        Weight matrix, zero diagonal. ``z[i, j]`` multiplies agent j's
        action in agent i's aggregate.
    w_lo, w_hi : float, optional
        A priori bounds on individual weights, if known. When provided they
        must bracket every entry and are used to size default conjecture
        ranges downstream.
    labels : tuple of int, optional
        Original agent labels; defaults to ``0..n-1``. Kept through
        :func:`submatrix` so sub-network results can be reported in the
        parent's indexing.
    """

    z: np.ndarray
    w_lo: Optional[float] = None
    w_hi: Optional[float] = None
    labels: Optional[tuple] = None

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        if z.ndim != 2 or z.shape[0] != z.shape[1]:
            raise UsageError(f"weight matrix must be square, got shape {z.shape}")
        if not np.all(np.isfinite(z)):
            raise UsageError("weight matrix entries must be finite")
        if np.any(np.diag(z) != 0.0):
            i = int(np.flatnonzero(np.diag(z))[0])
            raise UsageError(f"z[{i}][{i}] must be 0")
        object.__setattr__(self, "z", _as_readonly(z))
        n = z.shape[0]
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(range(n)))
        else:
            labels = tuple(int(l) for l in self.labels)
            if len(labels) != n:
                raise UsageError("labels length must match matrix size")
            object.__setattr__(self, "labels", labels)
        if (self.w_lo is None) != (self.w_hi is None):
            raise UsageError("weight bounds must be given as a pair or not at all")
        if self.w_lo is not None:
            if not (self.w_lo <= self.w_hi):
                raise UsageError("w_lo must not exceed w_hi")
            off = z[~np.eye(n, dtype=bool)]
            if off.size and (off.min() < self.w_lo or off.max() > self.w_hi):
                raise UsageError("weight bounds do not bracket the matrix entries")

    @property
    def n(self) -> int:
        return self.z.shape[0]

    def row_abs_sums(self) -> np.ndarray:
        """Per-agent total incoming weight magnitude, sum_j |z_ij|."""
        return np.abs(self.z).sum(axis=1)


class NeighborSets(NamedTuple):
    """In-neighborhood of one agent, split by externality sign."""

    members: frozenset
    positive: frozenset
    negative: frozenset


def neighbor_sets(net: WeightedNetwork, i: int) -> NeighborSets:
    """Agents whose actions enter agent ``i``'s aggregate, split by sign."""
    row = net.z[i]
    members = frozenset(int(j) for j in np.flatnonzero(row) if j != i)
    pos = frozenset(j for j in members if row[j] > 0)
    neg = frozenset(j for j in members if row[j] < 0)
    return NeighborSets(members, pos, neg)


def spectral_radius(m: Union[WeightedNetwork, np.ndarray]) -> float:
    """Largest eigenvalue modulus; 0 for an empty matrix."""
    z = m.z if isinstance(m, WeightedNetwork) else np.asarray(m, dtype=float)
    if z.size == 0:
        return 0.0
    try:
        ev = np.linalg.eigvals(z)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numpy rarely fails here
        raise NumericError(f"eigenvalue computation failed: {exc}") from exc
    return float(np.max(np.abs(ev)))


@dataclass(frozen=True)
class Decomposition:
    """A factorization Z = scale * Z0 with positive diagonal scaling.

    ``kind`` is one of:

    - ``"uniform"``: Z = gamma * z0 with a scalar gamma and symmetric z0;
    - ``"diagonal"``: Z = diag(gamma) @ z0 with a positive vector gamma and
      symmetric z0;
    - ``"signed"``: Z = gamma * (signs * z0) with symmetric sign pattern and
      symmetric nonnegative magnitudes (a construction helper);
    - ``"general"``: no structure claimed, z0 is Z itself.
    """

    kind: str
    z0: np.ndarray
    gamma: Union[float, np.ndarray, None] = None
    signs: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "z0", _as_readonly(self.z0))
        if self.kind not in ("uniform", "diagonal", "signed", "general"):
            raise UsageError(f"unknown decomposition kind {self.kind!r}")
        if self.kind in ("uniform", "diagonal") and not np.allclose(
            self.z0, self.z0.T, rtol=1e-9, atol=0.0
        ):
            raise UsageError(f"{self.kind} decomposition needs a symmetric z0")
        if self.kind == "uniform":
            g = float(self.gamma)
            if g == 0:
                raise UsageError("uniform scale must be nonzero")
            object.__setattr__(self, "gamma", g)
        elif self.kind == "diagonal":
            g = np.asarray(self.gamma, dtype=float)
            if g.ndim != 1 or g.shape[0] != self.z0.shape[0]:
                raise UsageError("diagonal decomposition needs one gamma per agent")
            if np.any(g <= 0):
                raise UsageError("diagonal scaling must be strictly positive")
            object.__setattr__(self, "gamma", _as_readonly(g))
        elif self.kind == "signed":
            s = np.asarray(self.signs, dtype=float)
            if s.shape != self.z0.shape or not np.array_equal(s, s.T):
                raise UsageError("sign pattern must be a symmetric matrix")
            if np.any(np.abs(s[s != 0]) != 1):
                raise UsageError("sign pattern entries must be -1, 0 or +1")
            object.__setattr__(self, "signs", _as_readonly(s))
            g = 1.0 if self.gamma is None else float(self.gamma)
            object.__setattr__(self, "gamma", g)

    def recompose(self) -> np.ndarray:
        """The matrix this decomposition denotes."""
        if self.kind == "uniform":
            return self.gamma * self.z0
        if self.kind == "diagonal":
            return self.gamma[:, None] * self.z0
        if self.kind == "signed":
            return self.gamma * (self.signs * self.z0)
        return np.array(self.z0)

    def symmetrized(self) -> np.ndarray:
        """The similar symmetric matrix sqrt(G) Z0 sqrt(G).

        Entry (i, j) equals z0_ij * sqrt(gamma_i * gamma_j). Invariant under
        the rescaling (c*Gamma, Z0/c), so it is a property of Z itself.
        Defined for the uniform and diagonal kinds.
        """
        if self.kind == "uniform":
            if self.gamma < 0:
                raise UsageError("symmetrized form needs a positive scaling")
            return self.gamma * np.array(self.z0)
        if self.kind == "diagonal":
            d = np.sqrt(self.gamma)
            return d[:, None] * self.z0 * d[None, :]
        raise UsageError(f"symmetrized form undefined for kind {self.kind!r}")

    def lambda_max(self) -> float:
        """Algebraically largest eigenvalue of the symmetrized form."""
        zt = self.symmetrized()
        if zt.size == 0:
            return 0.0
        return float(np.linalg.eigvalsh(zt)[-1])


def symmetrize_decompose(net: WeightedNetwork) -> Decomposition:
    """Factor Z as diag(gamma) @ z0 with gamma > 0 and z0 symmetric.

    gamma is normalized to 1 at the first agent of each connected component
    (connectivity taken over the undirected support of Z). Raises
    :class:`NotSymmetrizableError` when the sign pattern is asymmetric or the
    weight ratios are inconsistent around a cycle.
    """
    z = net.z
    n = net.n
    # Sign-symmetric support is necessary: z_ij and z_ji must vanish together
    # and agree in sign.
    iu, ju = np.triu_indices(n, k=1)
    a, b = z[iu, ju], z[ju, iu]
    bad = np.flatnonzero(((a == 0) != (b == 0)) | (a * b < 0))
    if bad.size:
        k = int(bad[0])
        raise NotSymmetrizableError("sign", (int(iu[k]), int(ju[k])))

    # Propagate gamma ratios over the support graph: z = Gamma z0 with z0
    # symmetric forces gamma_i / gamma_j = z_ij / z_ji on every edge.
    gamma = np.full(n, np.nan)
    for root in range(n):
        if not np.isnan(gamma[root]):
            continue
        gamma[root] = 1.0
        stack = [root]
        while stack:
            i = stack.pop()
            for j in np.flatnonzero(z[i]):
                ratio = z[i, j] / z[j, i]
                if np.isnan(gamma[j]):
                    gamma[j] = gamma[i] / ratio
                    stack.append(int(j))
                elif not math.isclose(gamma[i] / gamma[j], ratio, rel_tol=_REL_TOL):
                    raise NotSymmetrizableError("cycle", (i, int(j)))

    z0 = z / gamma[:, None]
    # The edge-by-edge ratio checks make z0 symmetric up to roundoff; equalize.
    z0 = (z0 + z0.T) / 2.0

    if np.allclose(gamma, gamma[0], rtol=_REL_TOL, atol=0.0):
        return Decomposition(kind="uniform", z0=z0 * gamma[0], gamma=1.0)
    return Decomposition(kind="diagonal", z0=z0, gamma=gamma)


@dataclass(frozen=True)
class AssumptionReport:
    """Outcome of one structural test, with its numeric witness."""

    assumption: str
    holds: bool
    witness: dict = field(default_factory=dict)


def check_assumption(net: WeightedNetwork, assumption: str) -> AssumptionReport:
    """Test one named structural property of the network.

    Recognized names are listed in :data:`ASSUMPTIONS`. The witness dict
    carries the quantity that decides the test (spectral radius, violating
    pair, top eigenvalue of the symmetrized form, ...).
    """
    z = net.z
    n = net.n
    off = ~np.eye(n, dtype=bool)

    if assumption == "bounded":
        bound = 1.0 / n
        absz = np.abs(z)
        flat = int(np.argmax(absz))
        i, j = divmod(flat, n)
        max_abs = float(absz[i, j])
        return AssumptionReport(
            assumption,
            holds=bool(max_abs < bound),
            witness={"bound": bound, "max_abs": max_abs, "argmax": (int(i), int(j))},
        )

    if assumption == "same-sign":
        s = np.sign(z)
        bad = np.argwhere((s != s.T) & off)
        if bad.size:
            i, j = (int(v) for v in bad[0])
            return AssumptionReport(
                assumption,
                holds=False,
                witness={"violation": (i, j), "values": (float(z[i, j]), float(z[j, i]))},
            )
        return AssumptionReport(assumption, holds=True, witness={"violation": None})

    if assumption == "negative":
        bad = np.argwhere((z >= 0) & off)
        if bad.size:
            i, j = (int(v) for v in bad[0])
            return AssumptionReport(
                assumption,
                holds=False,
                witness={"violation": (i, j), "value": float(z[i, j])},
            )
        return AssumptionReport(assumption, holds=True, witness={"violation": None})

    if assumption == "limited":
        rho = spectral_radius(z)
        return AssumptionReport(assumption, holds=bool(rho < 1.0), witness={"rho": rho})

    if assumption == "symmetrizable":
        try:
            dec = symmetrize_decompose(net)
        except NotSymmetrizableError as exc:
            return AssumptionReport(
                assumption,
                holds=False,
                witness={"reason": exc.reason, "detail": exc.detail},
            )
        return AssumptionReport(
            assumption,
            holds=True,
            witness={"kind": dec.kind, "decomposition": dec},
        )

    if assumption == "symmetrizable-limited":
        try:
            dec = symmetrize_decompose(net)
        except NotSymmetrizableError as exc:
            return AssumptionReport(
                assumption,
                holds=False,
                witness={"reason": exc.reason, "detail": exc.detail},
            )
        lam = dec.lambda_max()
        rho = spectral_radius(dec.symmetrized())
        return AssumptionReport(
            assumption,
            holds=bool(rho < 1.0),
            witness={"lambda_max": lam, "rho": rho, "decomposition": dec},
        )

    raise UsageError(
        f"unknown assumption {assumption!r}; expected one of {', '.join(ASSUMPTIONS)}"
    )


def submatrix(net: WeightedNetwork, agents: Iterable[int]) -> WeightedNetwork:
    """Restriction of the network to ``agents``, keeping their labels."""
    idx = sorted(set(int(a) for a in agents))
    for a in idx:
        if not 0 <= a < net.n:
            raise UsageError(f"agent index {a} out of range for n={net.n}")
    sel = np.ix_(idx, idx)
    return WeightedNetwork(
        z=net.z[sel],
        w_lo=net.w_lo,
        w_hi=net.w_hi,
        labels=tuple(net.labels[a] for a in idx),
    )


@dataclass(frozen=True)
class RandomNetSpec:
    """Parameters for the random symmetrizable generator.

    n agents; an undirected link is present with probability k/(n-1) so the
    expected degree is k; per-agent sensitivities gamma_i are i.i.d.
    lognormal with mean ``mu`` and variance ``sigma2`` (a point mass at mu
    when sigma2 = 0).
    """

    n: int
    k: float
    mu: float
    sigma2: float
    seed: int

    def __post_init__(self):
        if self.n < 2:
            raise UsageError("random network needs n >= 2")
        if not 0 < self.k < self.n:
            raise UsageError("expected degree k must lie in (0, n)")
        if self.mu <= 0:
            raise UsageError("mean sensitivity mu must be positive")
        if self.sigma2 < 0:
            raise UsageError("sensitivity variance must be nonnegative")


def random_symmetrizable(spec: RandomNetSpec) -> WeightedNetwork:
    """Draw Z = diag(gamma) @ A with A an undirected 0/1 graph.

    Deterministic for a given seed. The result decomposes by construction,
    so :func:`symmetrize_decompose` recovers a scaling and the symmetrized
    form whenever they are needed.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    p = spec.k / (n - 1)
    upper = rng.random((n, n)) < p
    adj = np.triu(upper, k=1)
    a = (adj | adj.T).astype(float)

    if spec.sigma2 == 0:
        gamma = np.full(n, spec.mu)
    else:
        # Match the lognormal's mean and variance exactly.
        s2 = math.log1p(spec.sigma2 / spec.mu**2)
        m = math.log(spec.mu) - s2 / 2.0
        gamma = rng.lognormal(mean=m, sigma=math.sqrt(s2), size=n)

    dec = Decomposition(kind="diagonal", z0=a, gamma=gamma)
    return WeightedNetwork(z=dec.recompose())
