"""Influence/correlation matrices and stability falsifiers.

Two families of pairwise-dependence matrices are computed exactly from a
dense distribution: *influence* entries measure how far conditioning one
spin moves another marginal, *correlation* entries are covariance-flavoured
and carry the minus-marginal on the diagonal.  Spectral radii of the
absolute variants drive the spectral-independence scan; conditional odds
drive the marginal-stability scan.

Every checker in this module is a falsifier/estimator: it searches pinnings
(and, in the ``complete_*`` variants, external fields) for the worst witness
it can find and reports it.  A passing report is evidence, never a proof --
certification lives in the uniqueness module's contraction and boundedness
certifiers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    DenseDistribution,
    Pinning,
    condition,
    is_infinite,
    magnetize,
    marginal_ratio,
)

__all__ = [
    "MATRIX_KINDS",
    "InfluenceMatrix",
    "SiReport",
    "MsReport",
    "influence_matrix",
    "spectral_radius",
    "cor_inf_identity_check",
    "homogenize_distribution",
    "homog_spectrum_check",
    "si_check",
    "complete_si_falsify",
    "marginal_stability_check",
    "complete_ms_falsify",
]

MATRIX_KINDS = (
    "absolute_influence",
    "signed_influence",
    "signed_correlation",
    "absolute_correlation",
)

SPECTRAL_DIM_LIMIT = 64
FIELD_FLOOR = 1e-3
SCALAR_GRID_POINTS = 17

_POWER_TOL = 1e-10
_POWER_CAP = 20_000


@dataclass(frozen=True)
class InfluenceMatrix:
    """A pairwise-dependence matrix tagged with the convention that built it.

    ``kind`` is one of ``MATRIX_KINDS``.  Absolute kinds are entrywise
    nonnegative; the signed influence kind has an exactly zero diagonal.
    """

    matrix: np.ndarray
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in MATRIX_KINDS:
            raise ValueError(f"unknown matrix kind {self.kind!r}")
        m = np.array(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        if self.kind.startswith("absolute") and np.any(m < 0.0):
            raise ValueError("absolute kinds are entrywise nonnegative")
        if self.kind == "signed_influence" and np.any(np.diagonal(m) != 0.0):
            raise ValueError("signed influence has a zero diagonal")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return int(self.matrix.shape[0])


def _conditional_plus(dist: DenseDistribution):
    """All single-spin conditionals of the plus-marginal vector at once.

    Returns (given_plus, given_minus, has_plus, has_minus, p_plus, p_minus)
    where given_plus[i, j] = mu_j^{i<-+1}(+1) on rows with has_plus[i] (zero
    elsewhere) and likewise for given_minus.  Feasibility comes from the
    support columns, and each conditional is a ratio of two direct mass
    sums -- never a 1-minus-p subtraction -- so marginals that are exactly
    zero or one stay exact.
    """
    pos = dist.support == 1
    has_plus = pos.any(axis=0)
    has_minus = (~pos).any(axis=0)
    posf = pos.astype(np.float64)
    negf = 1.0 - posf
    p_plus = dist.mass @ posf
    p_minus = dist.mass @ negf
    joint_pp = (posf * dist.mass[:, None]).T @ posf
    joint_mp = (negf * dist.mass[:, None]).T @ posf
    denom_p = np.where(has_plus, p_plus, 1.0)[:, None]
    denom_m = np.where(has_minus, p_minus, 1.0)[:, None]
    given_plus = np.where(has_plus[:, None], joint_pp / denom_p, 0.0)
    given_minus = np.where(has_minus[:, None], joint_mp / denom_m, 0.0)
    return given_plus, given_minus, has_plus, has_minus, p_plus, p_minus


def influence_matrix(dist: DenseDistribution, kind: str) -> InfluenceMatrix:
    """Exact dependence matrix of the requested kind.

    Influence kinds: entry (i, j) compares the plus-marginal at j after
    conditioning spin i to +1 versus -1; rows where i has a single feasible
    spin are zero, and so is the diagonal.  Correlation kinds: entry (i, j)
    compares conditioning i to +1 against the unconditioned marginal, rows
    where +1 is infeasible at i are zero, and the diagonal carries the
    minus-marginal of i.
    """
    if kind not in MATRIX_KINDS:
        raise ValueError(f"unknown matrix kind {kind!r}")
    given_plus, given_minus, has_plus, has_minus, p_plus, p_minus = _conditional_plus(dist)
    if kind in ("signed_influence", "absolute_influence"):
        free = has_plus & has_minus
        m = np.where(free[:, None], given_plus - given_minus, 0.0)
        np.fill_diagonal(m, 0.0)
        if kind == "absolute_influence":
            m = np.abs(m)
        return InfluenceMatrix(m, kind)
    m = np.where(has_plus[:, None], given_plus - p_plus[None, :], 0.0)
    np.fill_diagonal(m, p_minus)
    if kind == "absolute_correlation":
        m = np.abs(m)
    return InfluenceMatrix(m, kind)


def spectral_radius(matrix) -> float:
    """Largest eigenvalue modulus, for matrices of dimension <= 64.

    Entrywise-nonnegative input runs shifted power iteration (on M + I, so
    period-two structure such as bipartite supports cannot stall it) until
    the eigen-residual drops below 1e-10; if the cap is hit first, the dense
    eigensolver takes over.  Signed input goes straight to the dense solve.
    """
    m = matrix.matrix if isinstance(matrix, InfluenceMatrix) else np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    n = m.shape[0]
    if n > SPECTRAL_DIM_LIMIT:
        raise ValueError(f"dimension {n} exceeds the supported limit {SPECTRAL_DIM_LIMIT}")
    if np.any(m < 0.0):
        return float(np.max(np.abs(np.linalg.eigvals(m))))
    shifted = m + np.eye(n)
    v = np.full(n, 1.0 / math.sqrt(n))
    for _ in range(_POWER_CAP):
        w = shifted @ v
        growth = float(np.linalg.norm(w))
        if float(np.linalg.norm(w - growth * v)) <= _POWER_TOL * growth:
            return max(growth - 1.0, 0.0)
        v = w / growth
    return float(np.max(np.abs(np.linalg.eigvals(m))))


def cor_inf_identity_check(dist: DenseDistribution, tol: float = 1e-12) -> bool:
    """Signed influence equals the minus-marginal-rescaled correlation, shifted.

    On the coordinates S where the minus-marginal is positive the identity
    reads  Inf = diag(1/mu_i(-1)) Cor - I  entrywise to ``tol``.  Coordinates
    outside S are excluded per the support reduction, which requires their
    rows and columns to vanish in both matrices; that is checked too.
    """
    inf_m = influence_matrix(dist, "signed_influence").matrix
    cor_m = influence_matrix(dist, "signed_correlation").matrix
    has_minus = (dist.support == -1).any(axis=0)
    q_minus = dist.mass @ (dist.support == -1)
    out = np.flatnonzero(~has_minus)
    for m in (inf_m, cor_m):
        if np.max(np.abs(m[out, :]), initial=0.0) > tol:
            return False
        if np.max(np.abs(m[:, out]), initial=0.0) > tol:
            return False
    idx = np.flatnonzero(has_minus)
    sub_inf = inf_m[np.ix_(idx, idx)]
    sub_cor = cor_m[np.ix_(idx, idx)]
    rebuilt = sub_cor / q_minus[idx][:, None] - np.eye(idx.size)
    return bool(np.max(np.abs(sub_inf - rebuilt), initial=0.0) <= tol)


def homogenize_distribution(dist: DenseDistribution) -> DenseDistribution:
    """Double the coordinates: each configuration sigma maps to (sigma, -sigma).

    The image realizes the set-valued homogenization as a +-1 distribution on
    2n spins -- coordinate n + i is the complement indicator of coordinate i,
    so every support row has exactly n plus spins.
    """
    doubled = np.hstack([dist.support, -dist.support])
    return DenseDistribution(2 * dist.n, doubled, dist.mass)


def _multiset_close(found, expected, tol: float) -> bool:
    """Greedy nearest-neighbour matching of two complex multisets."""
    found = list(np.asarray(found, dtype=complex))
    expected = list(np.asarray(expected, dtype=complex))
    if len(found) != len(expected):
        return False
    for x in expected:
        k = min(range(len(found)), key=lambda j: abs(found[j] - x))
        if abs(found[k] - x) > tol:
            return False
        found.pop(k)
    return True


def homog_spectrum_check(dist: DenseDistribution, tol: float = 1e-7) -> bool:
    """Correlation spectrum of the homogenization vs shifted influence spectrum.

    The signed-correlation matrix of the doubled distribution must have
    eigenvalues {lambda_i + 1} over the signed-influence eigenvalues
    lambda_i of ``dist``, together with n extra zeros.  Verified as complex
    multisets within ``tol``.
    """
    if dist.n > 8:
        raise ValueError("homogenization doubles the dimension; need n <= 8")
    hom = homogenize_distribution(dist)
    cor_eigs = np.linalg.eigvals(influence_matrix(hom, "signed_correlation").matrix)
    inf_eigs = np.linalg.eigvals(influence_matrix(dist, "signed_influence").matrix)
    expected = np.concatenate([inf_eigs + 1.0, np.zeros(dist.n, dtype=complex)])
    return _multiset_close(cor_eigs, expected, tol)


# ---------------------------------------------------------------------------
# spectral-independence scans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SiReport:
    """Worst spectral radius seen over a pinning (and optionally field) scan.

    ``worst_fields`` is None when fields were not varied.  ``samples_checked``
    counts evaluated (pinning, field) combinations; ``skipped`` counts
    infeasible pinnings that were enumerated but carry no mass.  The report
    is an estimate from a falsifier: ``satisfied`` means "no violation was
    found", not "none exists".
    """

    max_spectral_radius: float
    worst_pinning: Pinning
    worst_fields: tuple[float, ...] | None
    samples_checked: int
    skipped: int = 0
    eta: float | None = None

    def __post_init__(self) -> None:
        if self.max_spectral_radius < 0.0:
            raise ValueError("spectral radius is nonnegative")

    @property
    def satisfied(self) -> bool | None:
        if self.eta is None:
            return None
        return self.max_spectral_radius <= self.eta


def _iter_pinnings(n: int):
    """Every partial +-1 assignment on [n], the empty one first."""
    for combo in itertools.product((0, -1, 1), repeat=n):
        yield Pinning(tuple((v, s) for v, s in enumerate(combo) if s != 0))


def _sample_pinning(dist: DenseDistribution, rng: np.random.Generator) -> Pinning:
    """A random pinning that is feasible by construction (cut from a row)."""
    row = dist.support[int(rng.integers(dist.size))]
    k = int(rng.integers(dist.n))
    verts = rng.choice(dist.n, size=k, replace=False)
    return Pinning(tuple((int(v), int(row[v])) for v in verts))


def _scan_pinnings(dist, rng, exhaustive_limit, sample_budget):
    """Max absolute-influence spectral radius over conditioned distributions."""
    best, worst = -1.0, Pinning.empty()
    checked = skipped = 0

    def visit(pin: Pinning) -> None:
        nonlocal best, worst, checked
        rho = spectral_radius(influence_matrix(condition(dist, pin), "absolute_influence"))
        checked += 1
        if rho > best:
            best, worst = rho, pin

    if dist.n <= exhaustive_limit:
        for pin in _iter_pinnings(dist.n):
            if len(pin) and not dist.feasible_mask(pin).any():
                skipped += 1
                continue
            visit(pin)
    else:
        visit(Pinning.empty())
        for _ in range(sample_budget):
            visit(_sample_pinning(dist, rng))
    return best, worst, checked, skipped


def si_check(dist: DenseDistribution, eta: float, budget: int = 256, seed: int = 0) -> SiReport:
    """Scan pinnings of ``dist`` for the largest influence spectral radius.

    Exhaustive over all partial assignments for n <= 8; beyond that,
    ``budget`` feasible pinnings are sampled (plus the empty one).  The
    report records whether the scan stayed within ``eta``.
    """
    if eta <= 0.0:
        raise ValueError("eta must be > 0")
    rng = np.random.default_rng(seed)
    best, worst, checked, skipped = _scan_pinnings(dist, rng, exhaustive_limit=8, sample_budget=budget)
    return SiReport(best, worst, None, checked, skipped, eta=float(eta))


def complete_si_falsify(dist: DenseDistribution, eta: float, eps: float,
                        budget: int = 512, seed: int = 0) -> SiReport:
    """Hunt for a field vector in (0, 1+eps]^n that breaks the radius bound.

    Deterministic scalar-field grid first (geometric, FIELD_FLOOR..1+eps),
    then ``budget`` log-uniform field vectors.  Each candidate field is
    applied by reweighting and scanned over pinnings -- exhaustively for
    n <= 5, sampled above -- so on small instances a reported worst field
    reproduces exactly under ``si_check`` of the reweighted distribution.
    """
    if eta <= 0.0:
        raise ValueError("eta must be > 0")
    if eps < 0.0:
        raise ValueError("eps must be >= 0")
    rng = np.random.default_rng(seed)
    hi = 1.0 + eps
    best, worst_pin = -1.0, Pinning.empty()
    worst_fields = (1.0,) * dist.n
    checked = skipped = 0

    def probe(fields: np.ndarray) -> None:
        nonlocal best, worst_pin, worst_fields, checked, skipped
        mag = magnetize(dist, fields)
        b, w, c, s = _scan_pinnings(mag, rng, exhaustive_limit=5, sample_budget=32)
        checked += c
        skipped += s
        if b > best:
            best, worst_pin = b, w
            worst_fields = tuple(float(x) for x in np.broadcast_to(fields, (dist.n,)))

    for lam in np.geomspace(FIELD_FLOOR, hi, SCALAR_GRID_POINTS):
        probe(np.full(dist.n, float(lam)))
    log_lo, log_hi = math.log(FIELD_FLOOR), math.log(hi)
    for _ in range(budget):
        probe(np.exp(rng.uniform(log_lo, log_hi, size=dist.n)))
    return SiReport(best, worst_pin, worst_fields, checked, skipped, eta=float(eta))


# ---------------------------------------------------------------------------
# marginal-stability scans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MsReport:
    """Worst conditional odds seen by a marginal-stability scan.

    ``max_ratio`` is the largest odds mu_i^sigma(+1)/mu_i^sigma(-1) found and
    ``max_relative_ratio`` the largest degradation against a sub-pinning,
    R_i^sigma / R_i^{sigma_S}; both may be math.inf when a minus-marginal
    vanishes.  Witnesses are (i, sigma) and (i, sigma, sigma_S) pinning
    tuples; ``worst_fields`` (set by the complete falsifier) is the field
    vector behind whichever of the two maxima is larger.
    """

    max_ratio: float
    max_relative_ratio: float
    zeta: float
    worst_ratio_witness: tuple[int, Pinning] | None
    worst_relative_witness: tuple[int, Pinning, Pinning] | None
    worst_fields: tuple[float, ...] | None
    samples_checked: int
    skipped: int

    def __post_init__(self) -> None:
        if self.zeta <= 0.0:
            raise ValueError("zeta must be > 0")

    @property
    def satisfied(self) -> bool:
        return self.max_ratio <= self.zeta and self.max_relative_ratio <= self.zeta


def _as_float_ratio(ratio) -> float:
    return math.inf if is_infinite(ratio) else float(ratio)


def _relative_ratio(ratio, base) -> float | None:
    """R/R_S with the degenerate conventions; None when no constraint binds.

    An infinite numerator over a finite base violates any bound, as does a
    positive numerator over a zero base; matching degeneracies (both zero,
    both infinite) satisfy the bound vacuously and contribute nothing.
    """
    num_inf, base_inf = is_infinite(ratio), is_infinite(base)
    if num_inf and base_inf:
        return None
    if num_inf:
        return math.inf
    if base_inf:
        return None
    if base == 0.0:
        return math.inf if ratio > 0.0 else None
    return float(ratio) / float(base)


def _subsets(items: tuple) -> itertools.chain:
    return itertools.chain.from_iterable(
        itertools.combinations(items, k) for k in range(len(items) + 1)
    )


def _ms_scan(dist, rng, exhaustive_limit, sample_budget):
    """Worst (absolute, relative) conditional odds over i, sigma, and sigma_S.

    Coordinates whose spin is constant in ``dist`` count as already pinned:
    they are excluded from the query quantification but still participate as
    pinned context, matching how conditioned distributions keep their full
    dimension.
    """
    n = dist.n
    pos = dist.support == 1
    free_coords = [i for i in range(n) if pos[:, i].any() and (~pos[:, i]).any()]
    max_ratio, max_rel = 0.0, 0.0
    wit_ratio = wit_rel = None
    checked = skipped = 0

    def consider(i, items, ratio, sub_items, base):
        nonlocal max_ratio, max_rel, wit_ratio, wit_rel
        r = _as_float_ratio(ratio)
        if r > max_ratio:
            max_ratio, wit_ratio = r, (i, Pinning(items))
        rel = _relative_ratio(ratio, base)
        if rel is not None and rel > max_rel:
            max_rel, wit_rel = rel, (i, Pinning(items), Pinning(sub_items))

    if n <= exhaustive_limit:
        for i in free_coords:
            others = [v for v in range(n) if v != i]
            table: dict[tuple, object] = {}
            for combo in itertools.product((0, -1, 1), repeat=n - 1):
                items = tuple((others[k], s) for k, s in enumerate(combo) if s != 0)
                pin = Pinning(items)
                if len(pin) and not dist.feasible_mask(pin).any():
                    table[items] = None
                    skipped += 1
                    continue
                table[items] = marginal_ratio(dist, i, pin)
            for items, ratio in table.items():
                if ratio is None:
                    continue
                checked += 1
                for sub_items in _subsets(items):
                    consider(i, items, ratio, sub_items, table[sub_items])
    else:
        for _ in range(sample_budget):
            i = free_coords[int(rng.integers(len(free_coords)))]
            row = dist.support[int(rng.integers(dist.size))]
            others = np.array([v for v in range(n) if v != i])
            k = int(rng.integers(n))
            verts = rng.choice(others, size=min(k, n - 1), replace=False)
            items = tuple((int(v), int(row[v])) for v in verts)
            sub_items = tuple(it for it in items if rng.random() < 0.5)
            ratio = marginal_ratio(dist, i, Pinning(items))
            base = marginal_ratio(dist, i, Pinning(sub_items))
            checked += 1
            consider(i, items, ratio, sub_items, base)
    return max_ratio, max_rel, wit_ratio, wit_rel, checked, skipped


def marginal_stability_check(dist: DenseDistribution, zeta: float,
                             budget: int = 256, seed: int = 0) -> MsReport:
    """Scan conditional odds of ``dist`` against the bound ``zeta``.

    Exhaustive over every query vertex i, every partial assignment sigma on
    the rest, and every restriction sigma_S, for n <= 6; beyond that,
    ``budget`` random (i, sigma, S) triples cut from support rows.
    """
    if zeta <= 0.0:
        raise ValueError("zeta must be > 0")
    rng = np.random.default_rng(seed)
    max_ratio, max_rel, wit_r, wit_rel, checked, skipped = _ms_scan(
        dist, rng, exhaustive_limit=6, sample_budget=budget)
    return MsReport(max_ratio, max_rel, float(zeta), wit_r, wit_rel, None, checked, skipped)


def complete_ms_falsify(dist: DenseDistribution, zeta: float,
                        budget: int = 512, seed: int = 0) -> MsReport:
    """Hunt for a field vector in (0, 1]^n that breaks the odds bounds.

    Deterministic scalar grid first, then ``budget`` log-uniform field
    vectors over [FIELD_FLOOR, 1]^n; each reweighted distribution is scanned
    exhaustively for n <= 4 and by sampling above.
    """
    if zeta <= 0.0:
        raise ValueError("zeta must be > 0")
    rng = np.random.default_rng(seed)
    agg = dict(max_ratio=0.0, max_rel=0.0, wit_r=None, wit_rel=None,
               fields_r=None, fields_rel=None, checked=0, skipped=0)

    def probe(fields: np.ndarray) -> None:
        mag = magnetize(dist, fields)
        max_ratio, max_rel, wit_r, wit_rel, checked, skipped = _ms_scan(
            mag, rng, exhaustive_limit=4, sample_budget=64)
        agg["checked"] += checked
        agg["skipped"] += skipped
        frozen = tuple(float(x) for x in np.broadcast_to(fields, (dist.n,)))
        if max_ratio > agg["max_ratio"]:
            agg["max_ratio"], agg["wit_r"], agg["fields_r"] = max_ratio, wit_r, frozen
        if max_rel > agg["max_rel"]:
            agg["max_rel"], agg["wit_rel"], agg["fields_rel"] = max_rel, wit_rel, frozen

    for lam in np.geomspace(FIELD_FLOOR, 1.0, SCALAR_GRID_POINTS):
        probe(np.full(dist.n, float(lam)))
    log_lo = math.log(FIELD_FLOOR)
    for _ in range(budget):
        probe(np.exp(rng.uniform(log_lo, 0.0, size=dist.n)))

    binding = agg["fields_r"] if agg["max_ratio"] >= agg["max_rel"] else agg["fields_rel"]
    return MsReport(agg["max_ratio"], agg["max_rel"], float(zeta),
                    agg["wit_r"], agg["wit_rel"], binding,
                    agg["checked"], agg["skipped"])
