"""Core types for anti-ferromagnetic two-spin systems on finite graphs.

A system is a graph together with edge activities (beta, gamma) and per-vertex
fields lambda_v.  A configuration sigma in {-1,+1}^n has weight

    beta^{m++(sigma)} * gamma^{m--(sigma)} * prod_{sigma_v = +1} lambda_v

where m++ / m-- count monochromatic (+,+) / (-,-) edges, with the convention
0^0 = 1 so that the hardcore case beta = 0 simply kills configurations with an
occupied edge.  Distributions over configurations are kept dense and exact:
everything in this package is desk-scale enumeration, never approximation.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "INFINITY",
    "is_infinite",
    "EnumerationLimitError",
    "InfeasiblePinningError",
    "BudgetExhaustedError",
    "Graph",
    "TwoSpinSystem",
    "SpinConfig",
    "Pinning",
    "DenseDistribution",
    "gibbs_weight",
    "gibbs_distribution",
    "condition",
    "marginal_ratio",
    "magnetize",
    "flip",
    "flip_direction",
    "flip_system",
    "min_probability",
    "marginal_bound",
    "enumeration_limit",
]

DEFAULT_ENUM_LIMIT = 20
ENUM_LIMIT_ENV = "SPINMIX_ENUM_LIMIT"

_MASS_TOL = 1e-12


class EnumerationLimitError(RuntimeError):
    """Raised when an exact computation would exceed the enumeration budget."""


class InfeasiblePinningError(ValueError):
    """Raised when a pinning has zero probability under the distribution."""


class BudgetExhaustedError(RuntimeError):
    """Raised when an iterative search runs out of its configured budget."""


class _Infinity:
    """Tag for an infinite odds ratio (the minus-marginal is exactly zero).

    Deliberately not a float: arithmetic with it is a bug, comparisons against
    it must be explicit.  A single shared instance ``INFINITY`` is exported.
    """

    __slots__ = ()

    def __repr__(self) -> str:
        return "INFINITY"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _Infinity)

    def __hash__(self) -> int:
        return hash("spinmix-infinite-ratio")


INFINITY = _Infinity()


def is_infinite(value: object) -> bool:
    """True iff ``value`` is the tagged infinite ratio."""
    return isinstance(value, _Infinity)


def enumeration_limit(override: int | None = None) -> int:
    """Resolve the enumeration limit: explicit override > env var > default."""
    if override is not None:
        return int(override)
    raw = os.environ.get(ENUM_LIMIT_ENV)
    if raw:
        return int(raw)
    return DEFAULT_ENUM_LIMIT


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1 with a fixed edge list."""

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        seen = set()
        canon = []
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range for n={self.n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            canon.append(key)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(a)) for a in nbrs)

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        deg.setflags(write=False)
        return deg

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @property
    def is_regular(self) -> bool:
        return bool(self.degrees.min() == self.degrees.max())

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Adjacency in CSR form (indptr, indices) for the sampling kernel."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        for u, nbrs in enumerate(self.adjacency):
            indptr[u + 1] = indptr[u] + len(nbrs)
        indices = np.fromiter(
            (v for nbrs in self.adjacency for v in nbrs),
            dtype=np.int64,
            count=int(indptr[-1]),
        )
        return indptr, indices

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_text(cls, text: str) -> "Graph":
        """Parse the ``"n m"`` header plus ``m`` lines of ``"u v"`` (0-based)."""
        lines = [ln for ln in (s.strip() for s in text.splitlines()) if ln and not ln.startswith("#")]
        if not lines:
            raise ValueError("empty graph text")
        header = lines[0].split()
        if len(header) != 2:
            raise ValueError(f"bad header {lines[0]!r}: expected 'n m'")
        n, m = int(header[0]), int(header[1])
        if len(lines) - 1 != m:
            raise ValueError(f"header promises {m} edges, found {len(lines) - 1}")
        edges = []
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 2:
                raise ValueError(f"bad edge line {ln!r}")
            edges.append((int(parts[0]), int(parts[1])))
        return cls(n, tuple(edges))

    def to_text(self) -> str:
        body = "".join(f"{u} {v}\n" for u, v in self.edges)
        return f"{self.n} {len(self.edges)}\n{body}"

    @classmethod
    def from_json(cls, obj: str | Mapping) -> "Graph":
        data = json.loads(obj) if isinstance(obj, str) else obj
        return cls(int(data["n"]), tuple((int(u), int(v)) for u, v in data["edges"]))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    # -- small builders used by tests and the CLI ---------------------------

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        if n < 3:
            raise ValueError("cycle needs n >= 3")
        return cls(n, tuple((i, (i + 1) % n) for i in range(n)))

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, tuple((i, i + 1) for i in range(n - 1)))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, tuple(itertools.combinations(range(n), 2)))

    @classmethod
    def star(cls, leaves: int) -> "Graph":
        return cls(leaves + 1, tuple((0, i) for i in range(1, leaves + 1)))

    @classmethod
    def biclique(cls, a: int, b: int) -> "Graph":
        return cls(a + b, tuple((i, a + j) for i in range(a) for j in range(b)))

    @classmethod
    def random(cls, n: int, p: float, seed: int) -> "Graph":
        rng = np.random.default_rng(seed)
        edges = tuple(
            (u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p
        )
        return cls(n, edges)


# ---------------------------------------------------------------------------
# systems, configurations, pinnings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoSpinSystem:
    """Graph plus (beta, gamma, per-vertex fields)."""

    graph: Graph
    beta: float
    gamma: float
    fields: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")
        if len(self.fields) != self.graph.n:
            raise ValueError("one field per vertex required")
        if any(lam <= 0 for lam in self.fields):
            raise ValueError("fields must be > 0")
        object.__setattr__(self, "fields", tuple(float(x) for x in self.fields))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "gamma", float(self.gamma))

    @classmethod
    def uniform(cls, graph: Graph, beta: float, gamma: float, lam: float) -> "TwoSpinSystem":
        return cls(graph, beta, gamma, (float(lam),) * graph.n)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def is_antiferromagnetic(self) -> bool:
        return self.beta * self.gamma < 1

    @property
    def is_hardcore(self) -> bool:
        return self.beta == 0.0

    @property
    def has_uniform_field(self) -> bool:
        return len(set(self.fields)) == 1

    def field_array(self) -> np.ndarray:
        return np.asarray(self.fields, dtype=np.float64)

    def to_json(self) -> dict:
        out: dict = {"graph": self.graph.to_json(), "beta": self.beta, "gamma": self.gamma}
        if self.has_uniform_field:
            out["lambda"] = self.fields[0]
        else:
            out["fields"] = list(self.fields)
        return out

    @classmethod
    def from_json(cls, obj: str | Mapping, graph: Graph | None = None) -> "TwoSpinSystem":
        data = json.loads(obj) if isinstance(obj, str) else obj
        g = graph if graph is not None else Graph.from_json(data["graph"])
        if "fields" in data:
            fields = tuple(float(x) for x in data["fields"])
        elif "lambda" in data:
            fields = (float(data["lambda"]),) * g.n
        else:
            raise ValueError("system JSON needs 'lambda' or 'fields'")
        return cls(g, float(data["beta"]), float(data["gamma"]), fields)


@dataclass(frozen=True)
class SpinConfig:
    """A full +-1 assignment, hashable and immutable."""

    spins: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(s not in (-1, 1) for s in self.spins):
            raise ValueError("spins must be -1 or +1")

    @classmethod
    def from_array(cls, arr: Sequence[int] | np.ndarray) -> "SpinConfig":
        return cls(tuple(int(s) for s in arr))

    @property
    def n(self) -> int:
        return len(self.spins)

    def array(self) -> np.ndarray:
        return np.asarray(self.spins, dtype=np.int8)

    def plus_set(self) -> frozenset[int]:
        return frozenset(i for i, s in enumerate(self.spins) if s == 1)


@dataclass(frozen=True)
class Pinning:
    """A partial +-1 assignment on a subset of vertices (original indexing)."""

    items: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        vertices = [v for v, _ in self.items]
        if len(set(vertices)) != len(vertices):
            raise ValueError("pinning repeats a vertex")
        if any(s not in (-1, 1) for _, s in self.items):
            raise ValueError("pinned values must be -1 or +1")
        object.__setattr__(self, "items", tuple(sorted((int(v), int(s)) for v, s in self.items)))

    @classmethod
    def from_dict(cls, mapping: Mapping[int, int]) -> "Pinning":
        return cls(tuple(mapping.items()))

    @classmethod
    def empty(cls) -> "Pinning":
        return cls(())

    @property
    def domain(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.items)

    def as_dict(self) -> dict[int, int]:
        return dict(self.items)

    def value(self, v: int) -> int | None:
        for u, s in self.items:
            if u == v:
                return s
        return None

    def extended(self, v: int, s: int) -> "Pinning":
        return Pinning(self.items + ((v, s),))

    def __len__(self) -> int:
        return len(self.items)


# ---------------------------------------------------------------------------
# dense distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DenseDistribution:
    """Exact distribution over +-1 configurations, support rows + masses.

    ``support`` is an (S, n) int8 array of distinct configurations with
    strictly positive mass; ``mass`` sums to one within 1e-12.  Instances are
    immutable; every operation returns a new distribution.
    """

    n: int
    support: np.ndarray
    mass: np.ndarray

    def __post_init__(self) -> None:
        support = np.ascontiguousarray(np.asarray(self.support, dtype=np.int8))
        mass = np.asarray(self.mass, dtype=np.float64).copy()
        if support.ndim != 2 or support.shape[1] != self.n:
            raise ValueError("support must be (S, n)")
        if support.shape[0] != mass.shape[0]:
            raise ValueError("support/mass length mismatch")
        if support.shape[0] == 0:
            raise ValueError("empty support")
        if not np.all((support == 1) | (support == -1)):
            raise ValueError("support entries must be +-1")
        if np.any(mass <= 0):
            raise ValueError("masses must be strictly positive on the support")
        if abs(mass.sum() - 1.0) > _MASS_TOL:
            raise ValueError(f"mass sums to {mass.sum()!r}, not 1")
        support.setflags(write=False)
        mass.setflags(write=False)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "mass", mass)

    @classmethod
    def from_weights(cls, support: np.ndarray, weights: np.ndarray, n: int) -> "DenseDistribution":
        """Normalize nonnegative weights, pruning zero-weight rows.

        One global max-rescaling guards against overflow in the normalizer;
        weights stay in linear space throughout.
        """
        weights = np.asarray(weights, dtype=np.float64)
        top = weights.max() if weights.size else 0.0
        if not np.isfinite(top) or top <= 0.0:
            raise ValueError("partition function must be positive and finite")
        scaled = weights / top
        keep = scaled > 0.0
        scaled = scaled[keep]
        support = np.asarray(support, dtype=np.int8)[keep]
        return cls(n, support, scaled / scaled.sum())

    @classmethod
    def from_pairs(cls, n: int, pairs: Mapping[tuple[int, ...], float]) -> "DenseDistribution":
        rows = np.array(sorted(pairs), dtype=np.int8).reshape(len(pairs), n)
        w = np.array([pairs[tuple(int(x) for x in row)] for row in rows], dtype=np.float64)
        return cls.from_weights(rows, w, n)

    @cached_property
    def _row_index(self) -> dict[bytes, int]:
        return {row.tobytes(): i for i, row in enumerate(self.support)}

    @property
    def size(self) -> int:
        return int(self.support.shape[0])

    def probability(self, config: Sequence[int] | np.ndarray | SpinConfig) -> float:
        """Mass of one configuration (0.0 when outside the support)."""
        arr = config.array() if isinstance(config, SpinConfig) else np.asarray(config, dtype=np.int8)
        idx = self._row_index.get(np.ascontiguousarray(arr).tobytes())
        return 0.0 if idx is None else float(self.mass[idx])

    def index_of(self, config: np.ndarray) -> int | None:
        return self._row_index.get(np.ascontiguousarray(np.asarray(config, dtype=np.int8)).tobytes())

    def plus_marginals(self) -> np.ndarray:
        """Vector of P[sigma_i = +1]."""
        return self.mass @ (self.support == 1)

    def pair_plus_matrix(self) -> np.ndarray:
        """Matrix of P[sigma_i = +1, sigma_j = +1] (diagonal = marginals)."""
        pos = (self.support == 1).astype(np.float64)
        return (pos * self.mass[:, None]).T @ pos

    def feasible_mask(self, pin: Pinning) -> np.ndarray:
        mask = np.ones(self.size, dtype=bool)
        for v, s in pin.items:
            if not 0 <= v < self.n:
                raise ValueError(f"pinned vertex {v} out of range")
            mask &= self.support[:, v] == s
        return mask

    def expectation(self, values: np.ndarray) -> float:
        return float(self.mass @ np.asarray(values, dtype=np.float64))

    def as_pairs(self) -> dict[tuple[int, ...], float]:
        return {tuple(int(x) for x in row): float(m) for row, m in zip(self.support, self.mass)}


# ---------------------------------------------------------------------------
# Gibbs weights and exact enumeration
# ---------------------------------------------------------------------------


def gibbs_weight(sys: TwoSpinSystem, config: Sequence[int] | np.ndarray | SpinConfig) -> float:
    """Weight beta^{m++} gamma^{m--} prod_{+1} lambda_v with 0^0 = 1."""
    arr = config.array() if isinstance(config, SpinConfig) else np.asarray(config, dtype=np.int8)
    if arr.shape != (sys.n,):
        raise ValueError("configuration length mismatch")
    mpp = 0
    mmm = 0
    for u, v in sys.graph.edges:
        if arr[u] == 1 and arr[v] == 1:
            mpp += 1
        elif arr[u] == -1 and arr[v] == -1:
            mmm += 1
    if sys.beta == 0.0 and mpp > 0:
        return 0.0
    weight = (sys.beta ** mpp if mpp else 1.0) * (sys.gamma ** mmm if mmm else 1.0)
    for v in np.flatnonzero(arr == 1):
        weight *= sys.fields[v]
    return float(weight)


def _independent_plus_sets(graph: Graph) -> Iterable[tuple[int, ...]]:
    """All vertex subsets with no internal edge (hardcore supports)."""
    adj_masks = np.zeros(graph.n, dtype=np.int64)
    for u, v in graph.edges:
        adj_masks[u] |= 1 << v
        adj_masks[v] |= 1 << u

    def rec(start: int, chosen: int, members: tuple[int, ...]):
        yield members
        for v in range(start, graph.n):
            if not (adj_masks[v] & chosen):
                yield from rec(v + 1, chosen | (1 << v), members + (v,))

    yield from rec(0, 0, ())


def _enumerate_hardcore(sys: TwoSpinSystem) -> tuple[np.ndarray, np.ndarray]:
    rows = []
    weights = []
    gamma = sys.gamma
    for plus in _independent_plus_sets(sys.graph):
        cfg = np.full(sys.n, -1, dtype=np.int8)
        w = 1.0
        for v in plus:
            cfg[v] = 1
            w *= sys.fields[v]
        mmm = sum(1 for u, v in sys.graph.edges if cfg[u] == -1 and cfg[v] == -1)
        if mmm:
            w *= gamma ** mmm
        rows.append(cfg)
        weights.append(w)
    return np.array(rows, dtype=np.int8), np.array(weights, dtype=np.float64)


def _enumerate_general(sys: TwoSpinSystem) -> tuple[np.ndarray, np.ndarray]:
    n = sys.n
    total = 1 << n
    support = np.empty((total, n), dtype=np.int8)
    weights = np.empty(total, dtype=np.float64)
    lam = sys.field_array()
    chunk = 1 << 16
    for lo in range(0, total, chunk):
        hi = min(lo + chunk, total)
        codes = np.arange(lo, hi, dtype=np.uint64)
        block = np.where((codes[:, None] >> np.arange(n, dtype=np.uint64)) & 1 == 1, 1, -1).astype(np.int8)
        pos = block == 1
        mpp = np.zeros(hi - lo, dtype=np.int64)
        mmm = np.zeros(hi - lo, dtype=np.int64)
        for u, v in sys.graph.edges:
            both_pos = pos[:, u] & pos[:, v]
            both_neg = ~pos[:, u] & ~pos[:, v]
            mpp += both_pos
            mmm += both_neg
        w = (np.float64(sys.beta) ** mpp) * (np.float64(sys.gamma) ** mmm)
        w *= np.prod(np.where(pos, lam[None, :], 1.0), axis=1)
        support[lo:hi] = block
        weights[lo:hi] = w
    return support, weights


def gibbs_distribution(sys: TwoSpinSystem, limit: int | None = None) -> DenseDistribution:
    """Exact Gibbs distribution by enumeration.

    The vertex-count limit (default 20, overridable via SPINMIX_ENUM_LIMIT or
    the ``limit`` argument) keeps this honest about being a desk-scale tool.
    Hardcore systems enumerate only configurations whose occupied set is
    independent; anything else would just multiply zeros.
    """
    cap = enumeration_limit(limit)
    if sys.n > cap:
        raise EnumerationLimitError(
            f"n={sys.n} exceeds the enumeration limit {cap} "
            f"(raise it via {ENUM_LIMIT_ENV} or the limit argument)"
        )
    if sys.is_hardcore:
        support, weights = _enumerate_hardcore(sys)
    else:
        support, weights = _enumerate_general(sys)
    assert weights.max() > 0.0, "partition function must be positive"
    return DenseDistribution.from_weights(support, weights, sys.n)


# ---------------------------------------------------------------------------
# conditioning, marginal ratios, field reweighting, flips
# ---------------------------------------------------------------------------


def condition(dist: DenseDistribution, pin: Pinning) -> DenseDistribution:
    """Condition on a pinning; the result keeps the full dimension n.

    Pinned coordinates stay in place (original indexing) so downstream
    influence/stability scans can keep referring to vertices by name.
    """
    if len(pin) == 0:
        return dist
    mask = dist.feasible_mask(pin)
    total = float(dist.mass[mask].sum())
    if total <= 0.0:
        raise InfeasiblePinningError(f"pinning {pin.as_dict()} has zero mass")
    return DenseDistribution(dist.n, dist.support[mask], dist.mass[mask] / total)


def marginal_ratio(dist: DenseDistribution, i: int, pin: Pinning | None = None):
    """Odds of +1 at vertex i: mu_i^pin(+1) / mu_i^pin(-1).

    Returns a float, or the tagged ``INFINITY`` when the minus-marginal is
    exactly zero.  Never returns an IEEE infinity.
    """
    target = condition(dist, pin) if pin is not None and len(pin) else dist
    col = target.support[:, i]
    plus = float(target.mass[col == 1].sum())
    minus = float(target.mass[col == -1].sum())
    if minus == 0.0:
        return INFINITY
    return plus / minus


def magnetize(dist: DenseDistribution, fields) -> DenseDistribution:
    """External-field reweighting: mass(sigma) *= prod_{sigma_i=+1} fields_i."""
    lam = np.asarray(fields, dtype=np.float64)
    if lam.ndim == 0:
        lam = np.full(dist.n, float(lam))
    if lam.shape != (dist.n,):
        raise ValueError("need one field per coordinate")
    if np.any(lam <= 0):
        raise ValueError("fields must be > 0")
    factors = np.prod(np.where(dist.support == 1, lam[None, :], 1.0), axis=1)
    return DenseDistribution.from_weights(dist.support, dist.mass * factors, dist.n)


def flip(dist: DenseDistribution, chi) -> DenseDistribution:
    """Push-forward under coordinatewise sign flip: new(sigma) = old(chi*sigma)."""
    chi_arr = np.asarray(chi, dtype=np.int8)
    if chi_arr.ndim == 0:
        chi_arr = np.full(dist.n, int(chi_arr), dtype=np.int8)
    if chi_arr.shape != (dist.n,) or not np.all(np.abs(chi_arr) == 1):
        raise ValueError("chi must be +-1 per coordinate")
    return DenseDistribution(dist.n, dist.support * chi_arr[None, :], dist.mass)


def flip_direction(sys: TwoSpinSystem) -> int:
    """+1 (keep) iff max_v lambda_v <= (gamma/beta)^{Delta/2}, else -1.

    Hardcore systems never flip: (gamma/0)^{Delta/2} is +infinity, handled as
    an explicit branch rather than a float division.
    """
    if sys.beta == 0.0:
        return 1
    threshold = (sys.gamma / sys.beta) ** (sys.graph.max_degree / 2.0)
    return 1 if max(sys.fields) <= threshold else -1


def flip_system(sys: TwoSpinSystem) -> tuple[TwoSpinSystem, int]:
    """The flipped parameter triple alongside the chosen direction.

    chi = +1 keeps (beta, gamma, lambda); chi = -1 swaps beta and gamma and
    inverts every field.  The flipped system always satisfies
    max_v lambda_v <= (gamma/beta)^{Delta/2} when the original fields do not
    straddle the threshold.
    """
    chi = flip_direction(sys)
    if chi == 1:
        return sys, 1
    flipped = TwoSpinSystem(
        sys.graph, sys.gamma, sys.beta, tuple(1.0 / lam for lam in sys.fields)
    )
    return flipped, -1


def min_probability(dist: DenseDistribution) -> float:
    """Smallest mass on the support (mu_min for mixing-time bounds)."""
    return float(dist.mass.min())


def marginal_bound(sys: TwoSpinSystem) -> float:
    """Closed-form lower bound b on every conditional single-site marginal.

    1/b <= (lam + 1/lam) * (1/gamma + gamma + 2)^Delta   for beta = 0
    1/b <= (lam + 1/lam) * (1/beta + 2)^Delta            for beta > 0

    with lam the worst-case field value (the bound is symmetric under
    lam <-> 1/lam, so the max of lam + 1/lam over vertices is what matters).
    Valid under the usual normalization beta <= gamma and max degree >= 1;
    outside it the beta > 0 branch can overshoot the true marginal.
    """
    delta = sys.graph.max_degree
    lam_term = max(lam + 1.0 / lam for lam in sys.fields)
    if sys.beta == 0.0:
        base = 1.0 / sys.gamma + sys.gamma + 2.0
    else:
        base = 1.0 / sys.beta + 2.0
    return 1.0 / (lam_term * base ** delta)
