"""Structured minimisation of weighted exponential sums.

The objects here are functions

    f(y) = sum_j d_j exp(<u_j, y>),        d_j >= 0,  y in R^D,

with finitely many pairwise-distinct exponent vectors u_j.  Whether the
infimum is attained, positive, or zero is decided entirely by where the
origin sits relative to the convex hull K(I) of the active exponents:
interior (unique minimiser on the span), boundary (infimum equals the
minimum over the face of K(I) whose relative interior contains 0), or
outside (infimum zero, approached along a separating direction).

On top of the exact trichotomy the module computes explicit per-family
constants (C0, c0, c1 and friends) and uses them to build near-minimisers
with certified norm bounds that grow only logarithmically in the requested
accuracy, uniformly in the coefficients.  This uniformity is the point: the
coefficients downstream come from rotation-dependent determinants and can
degenerate freely.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.optimize
import scipy.spatial
from scipy.special import logsumexp

from ._linalg import min_norm_point_hull, null_space, orth_columns
from .config import DEFAULT_CONFIG, Config
from .errors import (
    DegenerateLP,
    DeltaOutOfRange,
    DimensionMismatch,
    InputError,
    NonConvergence,
    NotInterior,
    SubsetBudgetExceeded,
)

TAG_INTERIOR = "InteriorMin"
TAG_BOUNDARY = "BoundaryInf"
TAG_OUTSIDE = "OutsideZero"

MODE_EXACT = "ExactMin"
MODE_SHIFTED = "ShiftedFace"
MODE_PIGEONHOLE = "Pigeonhole"

# max weight below which an index is treated as absent from every convex
# representation of the origin (LP feasibility noise sits well under this)
_SUPPORT_WEIGHT_TOL = 1e-6


@dataclass(frozen=True)
class TrichotomyResult:
    """Position of the origin relative to the hull of a subset of exponents."""

    tag: str
    face: tuple
    separator: Optional[np.ndarray]
    margin: float

    def to_dict(self) -> dict:
        out = {"tag": self.tag, "face": list(self.face), "margin": self.margin}
        if self.separator is not None:
            out["separator"] = self.separator.tolist()
        return out


@dataclass(frozen=True)
class ExpSumConstants:
    """Explicit constants attached to an exponent family.

    C0 bounds the exponent norms (floored at 1); c0 is the largest radius r
    such that span(K(I)) intersected with the r-ball stays inside K(I) for
    every subset with 0 in the relative interior; c1 is the worst separation
    margin over subsets where 0 is not interior.  C1, N and delta0 are the
    derived certificate constants; alpha is the Hoelder exponent of the
    infimum in the coefficients.
    """

    C0: float
    c0: float
    c1: float
    C1: float
    N: float
    delta0: float

    @property
    def alpha(self) -> float:
        if math.isinf(self.N):
            return 0.0
        return 1.0 / (1.0 + self.C0 * self.N)

    def to_dict(self) -> dict:
        return {
            "C0": self.C0,
            "c0": self.c0,
            "c1": self.c1,
            "C1": self.C1,
            "N": self.N,
            "delta0": self.delta0,
            "alpha": self.alpha,
        }


@dataclass(frozen=True)
class NearMinimiserCertificate:
    y: np.ndarray
    value: float
    delta: float
    radius_bound: float
    mode: str

    def to_dict(self) -> dict:
        return {
            "y": self.y.tolist(),
            "value": self.value,
            "delta": self.delta,
            "radius_bound": self.radius_bound,
            "mode": self.mode,
        }


class _HullGeometry:
    """Classification and constants cache for one fixed exponent family.

    Everything in here depends only on the exponent vectors, so instances
    that differ only in their coefficients share one geometry object.
    """

    def __init__(self, exponents: np.ndarray, config: Config):
        self.u = exponents
        self.config = config
        self._classify_cache: dict = {}
        self._span_cache: dict = {}
        self._constants: Optional[ExpSumConstants] = None

    def span(self, idx: tuple) -> np.ndarray:
        basis = self._span_cache.get(idx)
        if basis is None:
            basis = orth_columns(self.u[list(idx)].T)
            self._span_cache[idx] = basis
        return basis

    # -- membership LPs -------------------------------------------------

    def _max_min_weight(self, idx: tuple):
        """max t with sum(lam)=1, lam >= t, sum(lam_j u_j) = 0; None if the
        origin is not in the hull at all."""
        pts = self.u[list(idx)]
        k, dim = pts.shape
        c = np.zeros(k + 1)
        c[-1] = -1.0
        a_eq = np.zeros((dim + 1, k + 1))
        a_eq[:dim, :k] = pts.T
        a_eq[dim, :k] = 1.0
        b_eq = np.zeros(dim + 1)
        b_eq[dim] = 1.0
        a_ub = np.zeros((k, k + 1))
        a_ub[:, :k] = -np.eye(k)
        a_ub[:, k] = 1.0
        bounds = [(0.0, 1.0)] * k + [(None, 1.0)]
        res = scipy.optimize.linprog(
            c, A_ub=a_ub, b_ub=np.zeros(k), A_eq=a_eq, b_eq=b_eq,
            bounds=bounds, method="highs",
        )
        if res.status == 2:
            return None, None
        if res.status != 0:
            raise DegenerateLP(f"membership LP failed with status {res.status}")
        return float(res.x[-1]), res.x[:k]

    def _max_weight(self, idx: tuple, pos: int) -> float:
        """max lam_pos over convex representations of the origin."""
        pts = self.u[list(idx)]
        k, dim = pts.shape
        c = np.zeros(k)
        c[pos] = -1.0
        a_eq = np.vstack([pts.T, np.ones(k)])
        b_eq = np.zeros(dim + 1)
        b_eq[dim] = 1.0
        res = scipy.optimize.linprog(
            c, A_eq=a_eq, b_eq=b_eq, bounds=[(0.0, 1.0)] * k, method="highs"
        )
        if res.status != 0:
            raise DegenerateLP(f"face-support LP failed with status {res.status}")
        return float(res.x[pos])

    def _separator(self, idx: tuple, face: tuple):
        """Unit vector vanishing on the face exponents and uniformly positive
        on the rest; computed from the minimum-norm point of the leftover
        exponents projected to the face span's orthogonal complement."""
        rest = [j for j in idx if j not in face]
        if face:
            comp = null_space(self.u[list(face)])
        else:
            comp = np.eye(self.u.shape[1])
        if comp.shape[1] == 0:
            raise DegenerateLP("face span leaves no room for a separator")
        w = self.u[rest] @ comp
        x_star = min_norm_point_hull(w)
        norm = float(np.linalg.norm(x_star))
        if norm <= self.config.sep_tol:
            raise DegenerateLP(
                "separating direction is numerically zero; origin too close to the hull"
            )
        v = comp @ (x_star / norm)
        margin = float(np.min(self.u[rest] @ v))
        if margin <= self.config.sep_tol:
            raise DegenerateLP(f"separation margin {margin:.3e} below tolerance")
        return v, margin

    def classify(self, idx: tuple) -> TrichotomyResult:
        idx = tuple(sorted(idx))
        if not idx:
            raise InputError("cannot classify the empty subset")
        cached = self._classify_cache.get(idx)
        if cached is not None:
            return cached
        t_star, lam = self._max_min_weight(idx)
        if t_star is None:
            v, margin = self._separator(idx, ())
            result = TrichotomyResult(TAG_OUTSIDE, (), v, margin)
        elif t_star > self.config.sep_tol:
            result = TrichotomyResult(TAG_INTERIOR, idx, None, 0.0)
        else:
            support = {j for j, w in zip(idx, lam) if w > _SUPPORT_WEIGHT_TOL}
            for pos, j in enumerate(idx):
                if j not in support and self._max_weight(idx, pos) > _SUPPORT_WEIGHT_TOL:
                    support.add(j)
            face = tuple(sorted(support))
            if not face or face == idx:
                raise DegenerateLP(
                    "boundary face is degenerate; membership decision ambiguous"
                )
            v, margin = self._separator(idx, face)
            result = TrichotomyResult(TAG_BOUNDARY, face, v, margin)
            if self.classify(face).tag != TAG_INTERIOR:
                raise DegenerateLP("face of a boundary subset failed the interior check")
        self._classify_cache[idx] = result
        return result

    # -- interior radius ------------------------------------------------

    def _interior_radius(self, idx: tuple) -> float:
        """Distance from the origin to the relative boundary of K(idx)."""
        pts = self.u[list(idx)]
        span = orth_columns(pts.T)
        s = span.shape[1]
        if s == 0:
            return math.inf  # hull is {0}; no boundary to hit
        w = pts @ span
        if s == 1:
            return float(min(w.max(), -w.min()))
        try:
            hull = scipy.spatial.ConvexHull(w)
        except scipy.spatial.QhullError:
            hull = scipy.spatial.ConvexHull(w, qhull_options="QJ")
        return float(np.min(-hull.equations[:, -1]))

    # -- constants ------------------------------------------------------

    def constants(self) -> ExpSumConstants:
        if self._constants is not None:
            return self._constants
        size = self.u.shape[0]
        if size > self.config.subset_budget:
            raise SubsetBudgetExceeded(
                f"{size} exponents exceed the subset budget {self.config.subset_budget}"
            )
        norms = np.linalg.norm(self.u, axis=1)
        c_zero = max(1.0, float(norms.max()) if size else 1.0)
        radius = math.inf
        margin = math.inf
        for r in range(1, size + 1):
            for idx in itertools.combinations(range(size), r):
                cls = self.classify(idx)
                if cls.tag == TAG_INTERIOR:
                    radius = min(radius, self._interior_radius(idx))
                else:
                    margin = min(margin, cls.margin)

        def clamp(x: float) -> float:
            return min(max(x, 1e-12), 1.0 - 1e-9)

        c0, c1 = clamp(radius), clamp(margin)
        c_one = 4.0 * c_zero / (c0 * c1)
        base = 16.0 * c_zero**2 / (c0 * c1)
        try:
            n_cert = base ** (size + 1)
        except OverflowError:
            n_cert = math.inf
        self._constants = ExpSumConstants(
            C0=c_zero,
            c0=c0,
            c1=c1,
            C1=c_one,
            N=n_cert,
            delta0=1.0 / (size + 1),
        )
        return self._constants


@dataclass(frozen=True)
class ExpSumInstance:
    """Exponent family plus nonnegative coefficients."""

    dim: int
    exponents: np.ndarray
    coeffs: np.ndarray
    geometry: _HullGeometry = field(compare=False, repr=False, default=None)

    @classmethod
    def create(
        cls,
        dim: int,
        exponents,
        coeffs,
        config: Config = DEFAULT_CONFIG,
    ) -> "ExpSumInstance":
        u = np.ascontiguousarray(np.asarray(exponents, dtype=float))
        d = np.ascontiguousarray(np.asarray(coeffs, dtype=float))
        if u.ndim != 2 or u.shape[1] != dim:
            raise DimensionMismatch(f"exponents must be (J, {dim})")
        if d.shape != (u.shape[0],):
            raise DimensionMismatch("one coefficient per exponent vector required")
        if np.any(d < 0):
            raise InputError("coefficients must be nonnegative")
        if u.shape[0] > 1:
            gaps = np.linalg.norm(u[:, None, :] - u[None, :, :], axis=2)
            np.fill_diagonal(gaps, np.inf)
            if float(gaps.min()) <= config.distinct_tol:
                raise InputError("exponent vectors must be pairwise distinct")
        u.setflags(write=False)
        d.setflags(write=False)
        return cls(dim=int(dim), exponents=u, coeffs=d,
                   geometry=_HullGeometry(u, config))

    @property
    def size(self) -> int:
        return self.exponents.shape[0]

    @property
    def support(self) -> tuple:
        return tuple(int(j) for j in np.nonzero(self.coeffs > 0.0)[0])

    def with_coeffs(self, coeffs) -> "ExpSumInstance":
        d = np.ascontiguousarray(np.asarray(coeffs, dtype=float))
        if d.shape != (self.size,):
            raise DimensionMismatch("coefficient vector has wrong length")
        if np.any(d < 0):
            raise InputError("coefficients must be nonnegative")
        d.setflags(write=False)
        return ExpSumInstance(
            dim=self.dim, exponents=self.exponents, coeffs=d, geometry=self.geometry
        )

    def constants(self) -> ExpSumConstants:
        return self.geometry.constants()

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "exponents": self.exponents.tolist(),
            "coeffs": self.coeffs.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict, config: Config = DEFAULT_CONFIG) -> "ExpSumInstance":
        return cls.create(data["dim"], data["exponents"], data["coeffs"], config)


# ---------------------------------------------------------------------------
# evaluation


def _log_eval(inst: ExpSumInstance, y: np.ndarray, idx=None) -> float:
    """log f(y) restricted to the given indices (support by default)."""
    if idx is None:
        idx = [j for j in range(inst.size) if inst.coeffs[j] > 0.0]
    else:
        idx = [j for j in idx if inst.coeffs[j] > 0.0]
    if not idx:
        return -math.inf
    t = inst.exponents[idx] @ y + np.log(inst.coeffs[idx])
    return float(logsumexp(t))


def evaluate(inst: ExpSumInstance, y) -> float:
    """f(y), computed through log-sum-exp so huge exponents do not overflow."""
    y = np.asarray(y, dtype=float)
    if y.shape != (inst.dim,):
        raise DimensionMismatch(f"point must have shape ({inst.dim},)")
    with np.errstate(over="ignore"):
        return float(np.exp(_log_eval(inst, y)))


def constants(inst: ExpSumInstance) -> ExpSumConstants:
    return inst.constants()


def hull_classify(inst: ExpSumInstance, subset: Sequence[int]) -> TrichotomyResult:
    """Classify the origin against the hull of a subset of exponents.

    Coefficients play no role here; restricting to the positive support is
    the caller's responsibility.
    """
    idx = tuple(sorted(int(j) for j in subset))
    if not idx:
        raise InputError("subset must be nonempty")
    if any(j < 0 or j >= inst.size for j in idx):
        raise InputError("subset index out of range")
    return inst.geometry.classify(idx)


# ---------------------------------------------------------------------------
# interior minimisation


def _newton_span_min(
    inst: ExpSumInstance, idx: tuple, config: Config
) -> tuple[np.ndarray, float]:
    """Newton on log f restricted to the span of the subset's exponents.

    Working with log f keeps iterates overflow-free and well conditioned
    even when coefficients span many orders of magnitude; the gradient
    criterion |grad log f| <= grad_tol is the same as |grad f| <= grad_tol*f.
    """
    pts = inst.exponents[list(idx)]
    d = inst.coeffs[list(idx)]
    span = inst.geometry.span(idx)
    s = span.shape[1]
    if s == 0:
        return np.zeros(inst.dim), float(d.sum())
    w = pts @ span
    log_d = np.log(d)
    z = np.zeros(s)
    t = log_d.copy()

    def lse(vec):
        peak = vec.max()
        return peak + math.log(np.exp(vec - peak).sum())

    log_f = lse(t)
    eye = np.eye(s)
    for _ in range(config.max_newton_iters):
        soft = np.exp(t - t.max())
        soft /= soft.sum()
        grad = w.T @ soft
        if float(np.linalg.norm(grad)) <= config.grad_tol:
            return span @ z, math.exp(log_f)
        weighted = w * soft[:, None]
        hess = w.T @ weighted - np.outer(grad, grad)
        ridge = 1e-13 * max(float(np.trace(hess)) / s, 1e-150)
        try:
            step = -np.linalg.solve(hess + ridge * eye, grad)
        except np.linalg.LinAlgError:
            step = -np.linalg.lstsq(hess + ridge * eye, grad, rcond=None)[0]
        cap = 50.0 + float(np.linalg.norm(z))
        step_norm = float(np.linalg.norm(step))
        if step_norm > cap:
            step *= cap / step_norm
        slope = float(grad @ step)
        # sufficient-decrease cushion at rounding level, else the search
        # stalls once the predicted decrease drops below float resolution
        cushion = 1e-15 * (1.0 + abs(log_f))
        alpha = 1.0
        for _ in range(60):
            t_new = t + alpha * (w @ step)
            log_new = lse(t_new)
            if log_new <= log_f + 0.25 * alpha * slope + cushion:
                break
            alpha *= 0.5
        z = z + alpha * step
        t = t + alpha * (w @ step)
        log_f = lse(t)
    raise NonConvergence("interior Newton did not reach the gradient tolerance")


def minimise_interior(
    inst: ExpSumInstance, subset: Sequence[int], config: Config = DEFAULT_CONFIG
) -> tuple[np.ndarray, float]:
    """Minimise over the span of an interior subset via safeguarded Newton.

    Requires the origin in the relative interior of the subset's hull and
    strictly positive coefficients there; the minimiser restricted to the
    span is unique and satisfies |y| <= (1/c0) log(|I| / Delta) with the
    family constant c0 and Delta the smallest (max-normalised) coefficient.
    """
    idx = tuple(sorted(int(j) for j in subset))
    cls = hull_classify(inst, idx)
    if cls.tag != TAG_INTERIOR:
        raise NotInterior(f"subset classified as {cls.tag}")
    if np.any(inst.coeffs[list(idx)] <= 0.0):
        raise InputError("interior minimisation needs positive coefficients on the subset")
    return _newton_span_min(inst, idx, config)


def infimum(inst: ExpSumInstance, config: Config = DEFAULT_CONFIG) -> tuple[float, bool]:
    """Exact infimum and attainment flag via the hull trichotomy.

    Zero coefficients are dropped first.  Interior: Newton minimum, attained.
    Boundary: the infimum coincides with the face minimum but is approached,
    never attained.  Outside: infimum zero, not attained.  An identically
    zero sum attains its infimum 0 everywhere.
    """
    support = inst.support
    if not support:
        return 0.0, True
    cls = hull_classify(inst, support)
    if cls.tag == TAG_INTERIOR:
        _, val = _newton_span_min(inst, support, config)
        return val, True
    if cls.tag == TAG_OUTSIDE:
        return 0.0, False
    _, val = _newton_span_min(inst, cls.face, config)
    return val, False


# ---------------------------------------------------------------------------
# certified near-minimisers


def _face_shift_point(
    inst: ExpSumInstance,
    idx: tuple,
    norm_coeffs: np.ndarray,
    accuracy: float,
    consts: ExpSumConstants,
    config: Config,
) -> tuple[np.ndarray, bool]:
    """Point within ``accuracy`` of the infimum over the subset ``idx``.

    Interior subsets use the exact Newton minimiser.  Otherwise the face
    minimiser is pushed along the separating direction far enough that the
    off-face terms drop below the accuracy budget; the travel distance is
    s = (1/c1) (log(1/accuracy) + log|J| + (C0/c0) log(|J|/Delta)).
    """
    work = inst.with_coeffs(norm_coeffs)
    cls = hull_classify(work, idx)
    if cls.tag == TAG_INTERIOR:
        y, _ = _newton_span_min(work, idx, config)
        return y, False
    if cls.face:
        y0, _ = _newton_span_min(work, cls.face, config)
    else:
        y0 = np.zeros(inst.dim)
    family = inst.size
    delta_min = float(np.min(norm_coeffs[list(idx)]))
    travel = (
        math.log(1.0 / accuracy)
        + math.log(family)
        + (consts.C0 / consts.c0) * math.log(family / delta_min)
    ) / consts.c1
    return y0 - travel * cls.separator, True


def near_minimise(
    inst: ExpSumInstance, delta: float, config: Config = DEFAULT_CONFIG
) -> NearMinimiserCertificate:
    """Construct y with f(y) <= inf f + delta * max_j d_j and
    |y| <= N log(1/delta).

    Coefficients are max-normalised, split into kept/discarded groups at a
    pigeonholed threshold delta^(N1^k) (N1 = 4 C0 C1) chosen so the two
    groups are separated by an empty magnitude band, and the kept subset is
    near-minimised at accuracy delta^2; the discarded terms stay below the
    budget at the certified point.  No search over the ball is involved; the
    radius bound is a guarantee, not a strategy.
    """
    consts = inst.constants()
    if not 0.0 < delta < consts.delta0:
        raise DeltaOutOfRange(
            f"delta must lie in (0, {consts.delta0}); got {delta}"
        )
    radius_bound = consts.N * math.log(1.0 / delta)
    max_d = float(np.max(inst.coeffs)) if inst.size else 0.0
    if max_d == 0.0:
        return NearMinimiserCertificate(
            y=np.zeros(inst.dim), value=0.0, delta=delta,
            radius_bound=radius_bound, mode=MODE_EXACT,
        )
    norm_coeffs = inst.coeffs / max_d
    with np.errstate(divide="ignore"):
        log_norm = np.log(norm_coeffs)
    log_delta = math.log(delta)
    big_n = 4.0 * consts.C0 * consts.C1
    kept = None
    for k in range(inst.size + 1):
        hi = big_n**k * log_delta
        lo = big_n ** (k + 1) * log_delta
        in_band = (log_norm >= lo) & (log_norm < hi)
        if not np.any(in_band):
            kept = tuple(int(j) for j in np.nonzero(log_norm >= hi)[0])
            break
    if kept is None:  # pigeonhole over |J|+1 bands cannot fail
        raise NonConvergence("no empty coefficient band found")
    y, shifted = _face_shift_point(
        inst, kept, norm_coeffs, delta * delta, consts, config
    )
    discarded_mass = np.any(norm_coeffs[[j for j in range(inst.size) if j not in kept]] > 0.0) \
        if len(kept) < inst.size else False
    if discarded_mass:
        mode = MODE_PIGEONHOLE
    elif shifted:
        mode = MODE_SHIFTED
    else:
        mode = MODE_EXACT
    value = evaluate(inst, y)
    return NearMinimiserCertificate(
        y=y, value=value, delta=delta, radius_bound=radius_bound, mode=mode
    )


# ---------------------------------------------------------------------------
# continuity of the infimum in the coefficients


def holder_check(
    inst: ExpSumInstance,
    other_coeffs,
    coeff_bound: float,
    config: Config = DEFAULT_CONFIG,
) -> tuple[float, float]:
    """|inf(d) - inf(d')| against the certified Hoelder envelope.

    bound = (D + |J| + 2 D |J| / delta0) * ||d - d'||_inf^alpha with
    alpha = 1 / (1 + C0 N); returns (lhs, bound).
    """
    other = inst.with_coeffs(other_coeffs)
    for d in (inst.coeffs, other.coeffs):
        if np.any(d > coeff_bound + 1e-15):
            raise InputError("coefficients exceed the declared bound")
    lhs = abs(infimum(inst, config)[0] - infimum(other, config)[0])
    gap = float(np.max(np.abs(inst.coeffs - other.coeffs)))
    if gap == 0.0:
        return lhs, 0.0
    consts = inst.constants()
    size = inst.size
    envelope = coeff_bound + size + 2.0 * coeff_bound * size / consts.delta0
    return lhs, float(envelope * gap**consts.alpha)


# ---------------------------------------------------------------------------
# brute-force oracle (test instrumentation; structure-free by design)


def oracle_infimum(
    inst: ExpSumInstance,
    radius: float,
    grid: int = 33,
    config: Config = DEFAULT_CONFIG,
) -> float:
    """Upper bound on the infimum from a dense search plus local refinement.

    A sinh-spaced tensor grid inside the ball (dense near the origin, still
    reaching the rim even for astronomically large radii) seeds a
    Nelder-Mead polish of log f.  Never below the true infimum; close to it
    whenever the relevant basin is within the radius.
    """
    if inst.dim > 4:
        raise InputError("grid oracle limited to dimension <= 4")
    if grid < 3 or grid ** inst.dim > 2_000_000:
        raise InputError("grid size out of range")
    pos = list(inst.support)
    if not pos:
        return 0.0
    stretch = max(1.0, math.log1p(radius))
    ticks = np.sinh(stretch * np.linspace(-1.0, 1.0, grid)) / math.sinh(stretch) * radius
    mesh = np.meshgrid(*([ticks] * inst.dim), indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=1)
    points = points[np.linalg.norm(points, axis=1) <= radius + 1e-12]
    logs = logsumexp(
        points @ inst.exponents[pos].T + np.log(inst.coeffs[pos]), axis=1
    )
    best = int(np.argmin(logs))
    best_log = float(logs[best])

    cap = 1e6 * max(1.0, radius)

    def objective(y):
        y = np.asarray(y, dtype=float)
        if not np.all(np.isfinite(y)) or float(np.linalg.norm(y)) > cap:
            return math.inf
        return _log_eval(inst, y, pos)

    res = scipy.optimize.minimize(
        objective,
        points[best],
        method="Nelder-Mead",
        options={
            "xatol": 1e-12,
            "fatol": 1e-14,
            "maxiter": 4000 * inst.dim,
            "maxfev": 4000 * inst.dim,
        },
    )
    best_log = min(best_log, float(res.fun))
    with np.errstate(over="ignore"):
        return float(np.exp(best_log))
