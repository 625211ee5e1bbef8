"""Glauber dynamics, mixing times, entropy functionals, and tuned chains.

Matrix forms operate on the dense support of a distribution and are meant for
exact small-system analysis; the sampler form delegates its inner loop to
kernels.glauber_chain and scales to long runs.  The modified-log-Sobolev
estimator minimizes the Rayleigh-type ratio

    E_P(f, log f) / Ent[f],    f = exp(u) > 0,

by multi-restart gradient descent; it reports an upper estimate of the true
infimum, never a certified lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import (
    BudgetExhaustedError,
    DenseDistribution,
    Pinning,
    SpinConfig,
    TwoSpinSystem,
    gibbs_weight,
)

__all__ = [
    "MATRIX_LIMIT",
    "TransitionMatrix",
    "RateMatrix",
    "MlsEstimate",
    "GlauberTrace",
    "glauber_matrix",
    "glauber_run",
    "exact_mixing_time",
    "spectrum_nonnegative",
    "dirichlet_form",
    "entropy",
    "mls_estimate",
    "mixing_bound",
    "tuned_rates",
    "q_value",
    "kappa_pair",
]

MATRIX_LIMIT = 4096


def _lock(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic single-site dynamics on an explicit support."""

    support: np.ndarray  # (S, n) int8 rows
    entries: np.ndarray  # (S, S) row-stochastic
    stationary: np.ndarray  # (S,)

    def __post_init__(self):
        _lock(self.support)
        _lock(self.entries)
        _lock(self.stationary)
        rows = self.entries.sum(axis=1)
        if not np.allclose(rows, 1.0, atol=1e-12):
            raise ValueError("rows must sum to 1")

    @property
    def size(self) -> int:
        return self.support.shape[0]

    def index_of(self, spins) -> int:
        key = np.asarray(spins, dtype=np.int8).tobytes()
        for i in range(self.support.shape[0]):
            if self.support[i].tobytes() == key:
                return i
        raise KeyError("configuration not in support")


@dataclass(frozen=True)
class RateMatrix:
    """Continuous-time generator: nonnegative off-diagonal rates."""

    support: np.ndarray  # (S, n) int8
    entries: np.ndarray  # (S, S), diagonal = -sum of off-diagonal row rates
    stationary: np.ndarray  # (S,)
    free: tuple[int, ...]  # vertices the chain may flip

    def __post_init__(self):
        _lock(self.support)
        _lock(self.entries)
        _lock(self.stationary)
        off = self.entries.copy()
        np.fill_diagonal(off, 0.0)
        if off.min() < 0:
            raise ValueError("off-diagonal rates must be nonnegative")

    @property
    def size(self) -> int:
        return self.support.shape[0]


@dataclass(frozen=True)
class MlsEstimate:
    value: float
    minimizing_f: tuple[float, ...]
    restarts_used: int


@dataclass(frozen=True)
class GlauberTrace:
    final: SpinConfig
    plus_frequency: tuple[float, ...]
    steps: int
    burn_in: int
    seed: int


# ---------------------------------------------------------------------------
# matrix form
# ---------------------------------------------------------------------------


def glauber_matrix(dist: DenseDistribution, limit: int = MATRIX_LIMIT) -> TransitionMatrix:
    """Heat-bath single-site chain: pick a uniform vertex, resample its spin.

    P(x, y) = (1/n) * mu(y) / (mu(x) + mu(y)) for y differing from x at one
    vertex; everything else accumulates on the diagonal.
    """
    S = dist.support.shape[0]
    if S > limit:
        raise ValueError(f"support size {S} exceeds matrix limit {limit}")
    n = dist.n
    P = np.zeros((S, S))
    mass = dist.mass
    for i in range(S):
        row_total = 0.0
        x = dist.support[i]
        for v in range(n):
            y = x.copy()
            y[v] = -y[v]
            j = dist.index_of(y)
            if j is None:
                continue
            p = mass[j] / (mass[i] + mass[j]) / n
            P[i, j] = p
            row_total += p
        P[i, i] = 1.0 - row_total
    return TransitionMatrix(dist.support.copy(), P, mass.copy())


def spectrum_nonnegative(P: TransitionMatrix, tol: float = 1e-10) -> bool:
    """Check all eigenvalues >= -tol via the symmetrized similar matrix.

    Reversibility makes D^{1/2} P D^{-1/2} symmetric with the same spectrum.
    This is a hypothesis of the mixing bound, not a theorem, so it is checked.
    """
    root = np.sqrt(P.stationary)
    sym = (root[:, None] * P.entries) / root[None, :]
    sym = 0.5 * (sym + sym.T)
    return bool(np.linalg.eigvalsh(sym).min() >= -tol)


def _max_tv(M: np.ndarray, stationary: np.ndarray) -> float:
    return float(0.5 * np.abs(M - stationary[None, :]).sum(axis=1).max())


def exact_mixing_time(P: TransitionMatrix, eps: float, cap: int = 1 << 20) -> int:
    """Smallest t with worst-start total variation from stationarity <= eps.

    Doubles t until the tolerance is met, then scans linearly from the last
    power that missed it; worst-start TV is nonincreasing in t, so the scan
    is valid.
    """
    if eps >= 1.0:
        return 0
    S = P.size
    ident = np.eye(S)
    if _max_tv(ident, P.stationary) <= eps:
        return 0
    A = P.entries.copy()  # P^t with t = 2^k
    t = 1
    prev = ident
    prev_t = 0
    while _max_tv(A, P.stationary) > eps:
        prev = A
        prev_t = t
        A = A @ A
        t *= 2
        if t > cap:
            raise BudgetExhaustedError(f"mixing time exceeds iteration cap {cap}")
    # answer lies in (prev_t, t]; scan forward from prev
    B = prev
    for step in range(prev_t + 1, t + 1):
        B = B @ P.entries
        if _max_tv(B, P.stationary) <= eps:
            return step
    raise AssertionError("unreachable: doubling certified the endpoint")


# ---------------------------------------------------------------------------
# sampler form
# ---------------------------------------------------------------------------


def glauber_run(sys: TwoSpinSystem, steps: int, seed: int, start: SpinConfig,
                burn_in: int = 0) -> GlauberTrace:
    """Run the heat-bath sampler; reproducible for a fixed seed.

    Each step touches one uniformly chosen vertex and costs O(deg): the
    conditional odds of +1 at v are lam_v * beta^s / gamma^(d-s) with s the
    number of +1 neighbors.
    """
    if steps <= burn_in:
        raise ValueError("steps must exceed burn_in")
    if gibbs_weight(sys, start) == 0.0:
        raise ValueError("start configuration has zero weight")
    n = sys.graph.n
    indptr, indices = sys.graph.csr()
    rng = np.random.default_rng(seed)
    choices = rng.integers(0, n, size=steps, dtype=np.int64)
    draws = rng.random(steps)
    spins = np.array(start.spins, dtype=np.int8)
    plus_steps = np.zeros(n, dtype=np.int64)
    last_touch = np.zeros(n, dtype=np.int64)
    counted = kernels.glauber_chain(
        indptr, indices, float(sys.beta), float(sys.gamma), sys.field_array(),
        spins, choices, draws, burn_in, plus_steps, last_touch)
    freq = tuple(float(c) / counted for c in plus_steps)
    return GlauberTrace(SpinConfig(tuple(int(s) for s in spins)), freq,
                        steps, burn_in, seed)


# ---------------------------------------------------------------------------
# functionals
# ---------------------------------------------------------------------------


def _xlogx(f: np.ndarray) -> np.ndarray:
    out = np.zeros_like(f)
    pos = f > 0
    out[pos] = f[pos] * np.log(f[pos])
    return out


def dirichlet_form(P: TransitionMatrix, f, g) -> float:
    """<f, (I - P) g> with respect to the stationary measure."""
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    return float(np.dot(P.stationary * f, g - P.entries @ g))


def entropy(dist: DenseDistribution, f) -> float:
    """Ent[f] = E[f log f] - E[f] log E[f], with 0 log 0 = 0."""
    f = np.asarray(f, dtype=np.float64)
    if f.min() < 0:
        raise ValueError("entropy requires nonnegative f")
    mean = float(np.dot(dist.mass, f))
    total = float(np.dot(dist.mass, _xlogx(f)))
    if mean == 0.0:
        return 0.0
    return total - mean * math.log(mean)


def _log_f(f: np.ndarray) -> np.ndarray:
    # on the chain's support f should stay positive; guard anyway so that
    # boundary iterates produce finite Dirichlet forms via 0 log 0 = 0
    out = np.full_like(f, -745.0)
    pos = f > 0
    out[pos] = np.log(f[pos])
    return out


def mls_estimate(dist: DenseDistribution, restarts: int = 64, seed: int = 0,
                 max_iter: int = 400) -> MlsEstimate:
    """Upper estimate of the modified log-Sobolev constant of Glauber dynamics.

    Minimizes E_P(f, log f)/Ent[f] over f = exp(u) by gradient descent with
    backtracking from `restarts` random starts; the analytic gradient is
    validated against central finite differences before any descent runs.
    """
    S = dist.support.shape[0]
    if S < 2:
        raise ValueError("the entropy vanishes identically on a single state")
    P = glauber_matrix(dist)
    mu = P.stationary
    Pm = P.entries

    def ratio_and_grad(u: np.ndarray):
        f = np.exp(u)
        IPu = u - Pm @ u
        D = float(np.dot(mu * f, IPu))
        F = float(np.dot(mu, f))
        N = float(np.dot(mu * f, u) - F * math.log(F))
        if N <= 0.0:
            return None
        grad_D = mu * f * IPu + mu * f - (mu * f) @ Pm
        grad_N = mu * f * (u - math.log(F))
        R = D / N
        return R, (grad_D - R * grad_N) / N

    # analytic-gradient spot check against central differences
    rng = np.random.default_rng(seed)
    for _ in range(5):
        u = rng.normal(0.0, 1.0, size=S)
        got = ratio_and_grad(u)
        if got is None:
            continue
        _, grad = got
        fd = np.zeros(S)
        for z in range(S):
            e = np.zeros(S)
            e[z] = 1e-6
            hi = ratio_and_grad(u + e)
            lo = ratio_and_grad(u - e)
            fd[z] = (hi[0] - lo[0]) / 2e-6
        scale = max(1.0, float(np.abs(grad).max()))
        assert np.abs(grad - fd).max() <= 1e-4 * scale, "gradient validation failed"

    # deterministic extreme-direction seeds chase boundary-type minima the
    # random cloud tends to miss; random restarts cover the interior
    starts = []
    picks = range(S) if S <= 32 else rng.choice(S, size=16, replace=False)
    for z in picks:
        for sign in (8.0, -8.0):
            e = np.zeros(S)
            e[z] = sign
            starts.append(e)
    for _ in range(restarts):
        starts.append(rng.normal(0.0, 1.5, size=S))

    best_val = math.inf
    best_u = None
    used = 0
    for u in starts:
        used += 1
        got = ratio_and_grad(u)
        if got is None:
            continue
        val, grad = got
        step = 1.0
        for _ in range(max_iter):
            cand = np.clip(u - step * grad, -30.0, 30.0)
            cand -= math.log(float(np.dot(mu, np.exp(cand))))
            got = ratio_and_grad(cand)
            if got is not None and got[0] < val - 1e-14:
                u, (val, grad) = cand, got
                step = min(step * 1.5, 1e3)
            else:
                step *= 0.5
                if step < 1e-12:
                    break
        if val < best_val:
            best_val, best_u = val, u
    if best_u is None:
        raise ValueError("no restart found positive entropy")
    f = np.exp(best_u)
    f /= float(np.dot(mu, f))
    value = dirichlet_form(P, f, _log_f(f)) / entropy(dist, f)
    return MlsEstimate(float(value), tuple(float(x) for x in f), used)


def mixing_bound(rho: float, mu_min: float, eps: float) -> float:
    """(1/rho) * (log log(1/mu_min) + log(1/(2 eps^2)))."""
    if not 0.0 < mu_min < 1.0:
        raise ValueError("mu_min must lie in (0, 1)")
    if rho <= 0 or eps <= 0:
        raise ValueError("rho and eps must be positive")
    return (math.log(math.log(1.0 / mu_min)) + math.log(1.0 / (2.0 * eps * eps))) / rho


# ---------------------------------------------------------------------------
# tuned chain
# ---------------------------------------------------------------------------


def tuned_rates(dist: DenseDistribution, sys: TwoSpinSystem, theta: float,
                pinning: Pinning | None = None) -> RateMatrix:
    """Field-tuned continuous-time rates on the support of dist.

    dist must be the Gibbs measure of sys with every field multiplied by
    theta (conditioned on `pinning` if given).  Up-flips at vertex i run at
    theta * lam_i * gamma^(-deg_i) * (beta*gamma)^(s_i); down-flips at rate 1.
    The closed form equals the stationary mass ratio, which is verified.
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    pinned = set() if pinning is None else set(dict(pinning.items))
    free = tuple(v for v in range(sys.graph.n) if v not in pinned)
    S = dist.support.shape[0]
    Q = np.zeros((S, S))
    adj = sys.graph.adjacency
    degrees = sys.graph.degrees
    lams = sys.field_array()
    bg = sys.beta * sys.gamma
    for a in range(S):
        x = dist.support[a]
        for i in free:
            y = x.copy()
            y[i] = -y[i]
            b = dist.index_of(y)
            if y[i] == 1:  # up-flip
                s = sum(1 for w in adj[i] if x[w] == 1)
                rate = theta * lams[i] * sys.gamma ** (-degrees[i]) * _pow(bg, s)
                if b is None:
                    if rate != 0.0:
                        raise ValueError("positive up-flip rate into zero mass")
                    continue
                expect = dist.mass[b] / dist.mass[a]
                if not math.isclose(rate, expect, rel_tol=1e-9, abs_tol=1e-15):
                    raise ValueError(
                        "dist is not the theta-magnetized Gibbs measure of sys")
                Q[a, b] = rate
            else:  # down-flip
                if b is None:
                    raise ValueError("down-flip left the support; "
                                     "dist does not match sys")
                Q[a, b] = 1.0
    np.fill_diagonal(Q, 0.0)
    np.fill_diagonal(Q, -Q.sum(axis=1))
    return RateMatrix(dist.support.copy(), Q, dist.mass.copy(), free)


def _pow(base: float, k: int) -> float:
    if k == 0:
        return 1.0  # 0^0 = 1 convention
    return base ** k


class _FlipTable:
    """Index arithmetic for single-vertex flips over a rate matrix support."""

    def __init__(self, Q: RateMatrix):
        self.Q = Q
        self._index = {Q.support[i].tobytes(): i for i in range(Q.size)}
        self.n = Q.support.shape[1]

    def flip(self, a: int | None, i: int) -> int | None:
        if a is None:
            return None
        y = self.Q.support[a].copy()
        y[i] = -y[i]
        return self._index.get(y.tobytes())

    def rate(self, a: int | None, b: int | None) -> float:
        if a is None or b is None:
            return 0.0
        return float(self.Q.entries[a, b])

    def mass(self, a: int | None) -> float:
        return 0.0 if a is None else float(self.Q.stationary[a])


def q_value(table: _FlipTable, a: int | None, i: int, j: int) -> float:
    """q(x, eta_i, eta_j) = T(x, eta_i x) T(x, eta_j x) mu(x); 0 off support."""
    if a is None:
        return 0.0
    return table.rate(a, table.flip(a, i)) * table.rate(a, table.flip(a, j)) \
        * table.mass(a)


def q_star(table: _FlipTable, a: int | None, i: int, j: int) -> float:
    """Minimum of q over the four corners of the (eta_i, eta_j) flip square."""
    ai = table.flip(a, i)
    aj = table.flip(a, j)
    aij = table.flip(ai, j)
    return min(q_value(table, a, i, j), q_value(table, ai, i, j),
               q_value(table, aj, i, j), q_value(table, aij, i, j))


def kappa_pair(Q: RateMatrix) -> tuple[float, float]:
    """Decomposition constants whose sum lower-bounds the tuned chain's MLS.

    Splits state-flip pairs by the current spin (H1: -1, H2: +1) and, for
    each, takes the minimum of

        T(x, fx) - sum_{j != i} (q - q_*)(fx, eta_i, eta_j) / (T(x, fx) mu(x))

    over pairs with positive rate.  All flips are self-inverse, so the
    original statement's second term drops.  An empty side yields +inf
    (a vacuous constraint).
    """
    table = _FlipTable(Q)
    kappas = []
    for target_spin in (-1, 1):
        best = math.inf
        for a in range(Q.size):
            x = Q.support[a]
            for i in Q.free:
                if x[i] != target_spin:
                    continue
                b = table.flip(a, i)
                T = table.rate(a, b)
                if T <= 0.0:
                    continue
                corr = 0.0
                for j in Q.free:
                    if j == i:
                        continue
                    corr += (q_value(table, b, i, j) - q_star(table, b, i, j))
                best = min(best, T - corr / (T * table.mass(a)))
        kappas.append(best)
    return kappas[0], kappas[1]
