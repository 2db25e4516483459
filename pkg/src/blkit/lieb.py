"""From gaussian tuples to exponential sums, and back to the constant.

Diagonalising each block as A_j = R_j^T X_j R_j and expanding the
denominator determinant over n-element column subsets turns the squared
reciprocal of the gaussian ratio into a weighted exponential sum

    ratio(A)^{-2} = sum_I d_I(R) exp(<1_I - q, y>),

where y collects the log-eigenvalues, q repeats each exponent p_j along its
block, and d_I(R) = (prod_{k in I} q_k) det((v_k)_{k in I})^2 with
v_k = L_j^T R_j^T e_l.  The constant of the inequality is then

    BL^{-2} = inf_R  inf_y  (that sum),

an exact inner problem (expsum) under a small derivative-free outer search
over rotations.  Near-extremising tuples come from certified near-minimisers
of the inner sum mapped back through the diagonalisation.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.special

from . import expsum
from ._linalg import rotation_from_params
from .config import DEFAULT_CONFIG, Config
from .datum import (
    BLDatum,
    FinitenessVerdict,
    TAG_FINITE_NUMERICAL,
    TAG_INCONCLUSIVE,
    ensure_validated,
    kernel_lattice,
    projection_normalize,
    scaling_condition,
    transversality_check,
)
from .errors import (
    DeltaOutOfRange,
    DimensionMismatch,
    ExpansionBudgetExceeded,
    NotFinite,
    NumericalError,
    SingularDenominator,
)
from .gaussian import GaussianTuple, blg, log_blg


@dataclass(frozen=True)
class LiebExpansion:
    """Index data of the determinant-minor expansion for one datum shape."""

    total_dim: int
    ambient_dim: int
    q: np.ndarray
    family: np.ndarray          # (C, n) int array, lexicographic
    u_vectors: np.ndarray       # (C, M)
    index_map: tuple            # k -> (j, l)
    block_slices: tuple

    @property
    def size(self) -> int:
        return self.family.shape[0]


def build_expansion(datum: BLDatum, config: Config = DEFAULT_CONFIG) -> LiebExpansion:
    """Enumerate all n-element subsets of the M block-diagonal coordinates."""
    datum = ensure_validated(datum, config)
    dims = datum.codomain_dims
    total = sum(dims)
    count = comb(total, datum.n)
    if count > config.expansion_budget:
        raise ExpansionBudgetExceeded(
            f"binomial({total},{datum.n}) = {count} exceeds budget {config.expansion_budget}"
        )
    q = np.concatenate([np.full(nj, p) for nj, p in zip(dims, datum.exponents)])
    family = np.array(
        list(itertools.combinations(range(total), datum.n)), dtype=int
    ).reshape(count, datum.n)
    ones = np.zeros((count, total))
    rows = np.repeat(np.arange(count), datum.n)
    ones[rows, family.ravel()] = 1.0
    index_map = []
    slices = []
    start = 0
    for j, nj in enumerate(dims):
        slices.append(slice(start, start + nj))
        index_map.extend((j, l) for l in range(nj))
        start += nj
    return LiebExpansion(
        total_dim=total,
        ambient_dim=datum.n,
        q=q,
        family=family,
        u_vectors=ones - q[None, :],
        index_map=tuple(index_map),
        block_slices=tuple(slices),
    )


@dataclass(frozen=True)
class RotationTuple:
    """Per-block special orthogonal matrices with their skew generators."""

    blocks: tuple
    parameters: tuple

    @classmethod
    def from_parameters(cls, params: Sequence, dims: Sequence[int]) -> "RotationTuple":
        blocks = []
        kept = []
        offset = 0
        params = np.asarray(params, dtype=float)
        for nj in dims:
            k = nj * (nj - 1) // 2
            chunk = params[offset : offset + k]
            offset += k
            blocks.append(rotation_from_params(chunk, nj))
            kept.append(np.array(chunk))
        if offset != params.size:
            raise DimensionMismatch("parameter vector length does not match dims")
        return cls(blocks=tuple(blocks), parameters=tuple(kept))

    @classmethod
    def identity(cls, dims: Sequence[int]) -> "RotationTuple":
        return cls.from_parameters(np.zeros(sum(d * (d - 1) // 2 for d in dims)), dims)

    def validate(self, orth_tol: float = 1e-9) -> "RotationTuple":
        for b in self.blocks:
            if np.max(np.abs(b @ b.T - np.eye(b.shape[0]))) > orth_tol:
                raise NumericalError("rotation block is not orthogonal")
            if np.linalg.det(b) < 0.0:
                raise NumericalError("rotation block has determinant -1")
        return self


def _column_matrix(datum: BLDatum, rot: RotationTuple) -> np.ndarray:
    """n x M matrix whose k-th column is L_j^T R_j^T e_l for k = (j, l)."""
    return np.hstack([mat.T @ r.T for mat, r in zip(datum.maps, rot.blocks)])


def coefficients(
    datum: BLDatum, expansion: LiebExpansion, rot: RotationTuple
) -> np.ndarray:
    """Nonnegative expansion coefficients d_I at a rotation tuple."""
    cols = _column_matrix(datum, rot)
    minors = cols[:, expansion.family].transpose(1, 0, 2)  # (C, n, n)
    dets = np.linalg.det(minors)
    q_prod = np.prod(expansion.q[expansion.family], axis=1)
    return q_prod * dets**2


def blg_via_expansion(
    datum: BLDatum,
    expansion: LiebExpansion,
    rot: RotationTuple,
    y,
    config: Config = DEFAULT_CONFIG,
) -> float:
    """Gaussian ratio evaluated through the minor expansion.

    Agrees with the direct determinant formula at
    A_j = R_j^T diag(exp(y_k), k in block j) R_j; this is an algebraic
    identity, so disagreement beyond roundoff indicates a bug, not a
    tolerance problem.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (expansion.total_dim,):
        raise DimensionMismatch(f"y must have shape ({expansion.total_dim},)")
    d = coefficients(datum, expansion, rot)
    pos = d > 0.0
    if not np.any(pos):
        raise SingularDenominator("all expansion coefficients vanish")
    exponents = expansion.u_vectors[pos] @ y + np.log(d[pos])
    log_sum = float(scipy.special.logsumexp(exponents))
    if log_sum < math.log(config.det_tol):
        raise SingularDenominator("expansion sum not bounded away from zero")
    return float(np.exp(-0.5 * log_sum))


def tuple_from_diagonal(
    expansion: LiebExpansion, rot: RotationTuple, y: np.ndarray
) -> GaussianTuple:
    """Assemble A_j = R_j^T diag(e^{y_k}) R_j from log-eigenvalues."""
    blocks = []
    for r, sl in zip(rot.blocks, expansion.block_slices):
        blocks.append(r.T @ np.diag(np.exp(y[sl])) @ r)
    return GaussianTuple.create(blocks)


# ---------------------------------------------------------------------------
# constant estimation


@dataclass
class _Solution:
    proj_datum: BLDatum
    det_factor: float
    expansion: LiebExpansion
    template: expsum.ExpSumInstance
    rotation: RotationTuple
    params: np.ndarray
    inner_value: float
    inner_attained: bool
    coeffs: np.ndarray
    inv_sqrt_grams: tuple


@dataclass
class BLReport:
    constant: float
    log_constant: float
    finiteness: FinitenessVerdict
    certificate: Optional[dict] = None
    diagnostics: dict = field(default_factory=dict)
    _solution: Optional[_Solution] = None

    def to_dict(self) -> dict:
        finite = math.isfinite(self.constant)
        return {
            "constant": self.constant if finite else None,
            "log_constant": self.log_constant if finite else None,
            "finiteness": self.finiteness.to_dict(),
            "certificate": self.certificate,
            "diagnostics": self.diagnostics,
        }


_TEMPLATE_CACHE: dict = {}


def _template_instance(expansion: LiebExpansion, config: Config) -> expsum.ExpSumInstance:
    """One hull-geometry cache per expansion shape (depends only on dims and

    exponents, not on the maps), shared across data and perturbations."""
    key = (expansion.total_dim, expansion.ambient_dim, tuple(expansion.q), config)
    inst = _TEMPLATE_CACHE.get(key)
    if inst is None:
        inst = expsum.ExpSumInstance.create(
            expansion.total_dim,
            expansion.u_vectors,
            np.ones(expansion.size),
            config,
        )
        _TEMPLATE_CACHE[key] = inst
    return inst


def _infinite_report(verdict: FinitenessVerdict, diagnostics: dict) -> BLReport:
    return BLReport(
        constant=math.inf,
        log_constant=math.inf,
        finiteness=verdict,
        diagnostics=diagnostics,
    )


def bl_constant(datum: BLDatum, config: Config = DEFAULT_CONFIG) -> BLReport:
    """Estimate the constant by exact inner minimisation under a seeded
    multi-start simplex search over the rotation parameters.

    The inner value at the best rotation is a true upper bound for the
    infimum over rotations, so the reported constant is a certified lower
    bound for the constant (up to inner-solver accuracy).
    """
    datum = ensure_validated(datum, config)
    residual = scaling_condition(datum)
    screen = transversality_check(
        datum, kernel_lattice(datum, config.lattice_depth, config), config
    )
    if screen.is_infinite:
        return _infinite_report(screen, {"stage": "algebraic-screen"})

    proj, det_factor = projection_normalize(datum, config)
    expansion = build_expansion(proj, config)
    template = _template_instance(expansion, config)
    dims = proj.codomain_dims
    n_params = sum(d * (d - 1) // 2 for d in dims)

    def inner(params: np.ndarray) -> float:
        rot = RotationTuple.from_parameters(params, dims)
        inst = template.with_coeffs(coefficients(proj, expansion, rot))
        try:
            value, _ = expsum.infimum(inst, config)
        except NumericalError:
            return math.inf
        return value

    rng = np.random.default_rng(config.seed)
    starts = [np.zeros(n_params)]
    for _ in range(max(config.restarts - 1, 0)):
        starts.append(rng.uniform(-0.5 * np.pi, 0.5 * np.pi, size=n_params))

    def run_start(theta0: np.ndarray) -> tuple[np.ndarray, float]:
        start_value = inner(theta0)
        if n_params == 0:
            return theta0, start_value
        res = scipy.optimize.minimize(
            inner,
            theta0,
            method="Nelder-Mead",
            options={
                "xatol": 1e-8,
                "fatol": 1e-12,
                "maxiter": config.simplex_maxiter * max(n_params, 1),
                "maxfev": config.simplex_maxiter * max(n_params, 1),
            },
        )
        # keep the start unless polishing improved it beyond solver noise;
        # exact structured optima (common at the identity) stay structured
        polished = float(res.fun)
        if start_value <= polished + 1e-11 * max(abs(polished), 1e-300):
            return theta0, start_value
        return res.x, polished

    if config.threads > 1 and n_params > 0:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            outcomes = list(pool.map(run_start, starts))
    else:
        outcomes = [run_start(s) for s in starts]

    values = np.array([v for _, v in outcomes])
    v_min = float(values.min())
    # restarts within inner-solver accuracy of the best are ties; prefer the
    # smallest parameter vector so exact structured optima win over noise
    tie_band = 1e-11 * max(abs(v_min), 1e-300)
    best_idx = min(
        (i for i in range(len(outcomes)) if values[i] <= v_min + tie_band),
        key=lambda i: (
            float(np.linalg.norm(outcomes[i][0])),
            tuple(outcomes[i][0]),
        ),
    )
    best_params, best_value = outcomes[best_idx]
    finite_vals = values[np.isfinite(values)]
    if finite_vals.size == 0:
        raise NumericalError("every restart failed numerically")
    spread = float(
        (finite_vals.max() - finite_vals.min()) / max(abs(finite_vals.min()), 1e-300)
    )

    rot = RotationTuple.from_parameters(best_params, dims)
    best_coeffs = coefficients(proj, expansion, rot)
    inst = template.with_coeffs(best_coeffs)
    inner_value, attained = expsum.infimum(inst, config)
    support = inst.support
    tag = expsum.hull_classify(inst, support).tag if support else expsum.TAG_OUTSIDE

    diagnostics = {
        "restart_values": values.tolist(),
        "restart_spread": spread,
        "best_restart": int(best_idx),
        "best_params": best_params.tolist(),
        "inner_value": inner_value,
        "inner_attained": attained,
        "support_classification": tag,
        "det_factor": det_factor,
        "restarts": len(starts),
    }

    degenerate = inner_value < config.pos_tol or tag == expsum.TAG_OUTSIDE
    disagree = spread > config.agreement_tol
    if degenerate:
        verdict = FinitenessVerdict(tag=TAG_INCONCLUSIVE, scaling_residual=residual)
        report = _infinite_report(verdict, diagnostics)
    else:
        log_const = -0.5 * (math.log(inner_value) + math.log(det_factor))
        constant = math.exp(log_const)
        verdict_tag = TAG_INCONCLUSIVE if disagree else TAG_FINITE_NUMERICAL
        verdict = FinitenessVerdict(
            tag=verdict_tag,
            scaling_residual=residual,
            numeric_lower_bound=constant if verdict_tag == TAG_FINITE_NUMERICAL else None,
        )
        report = BLReport(
            constant=constant,
            log_constant=log_const,
            finiteness=verdict,
            diagnostics=diagnostics,
        )
    grams = tuple(
        np.linalg.inv(scipy.linalg.sqrtm(mat @ mat.T).real) for mat in datum.maps
    )
    report._solution = _Solution(
        proj_datum=proj,
        det_factor=det_factor,
        expansion=expansion,
        template=template,
        rotation=rot,
        params=best_params,
        inner_value=inner_value,
        inner_attained=attained,
        coeffs=best_coeffs,
        inv_sqrt_grams=grams,
    )
    return report


def classify_datum(
    datum: BLDatum, config: Config = DEFAULT_CONFIG, numeric: bool = True
) -> FinitenessVerdict:
    """Finiteness pipeline: scaling, kernel-lattice screening, and (optionally)
    the numeric upgrade to Finite-Numerical via the optimiser."""
    datum = ensure_validated(datum, config)
    screen = transversality_check(
        datum, kernel_lattice(datum, config.lattice_depth, config), config
    )
    if screen.is_infinite or not numeric:
        return screen
    return bl_constant(datum, config).finiteness


def near_extremiser(
    datum: BLDatum,
    delta: float,
    config: Config = DEFAULT_CONFIG,
    report: Optional[BLReport] = None,
) -> GaussianTuple:
    """Gaussian tuple achieving at least (1 - delta_eff) of the constant.

    Runs the certified near-minimiser of the inner exponential sum at the
    best rotation found, assembles the corresponding diagonal-plus-rotation
    blocks, and maps them back through the projection normalisation.  The
    multiplicative shortfall delta_eff implied by the additive accuracy is
    reported on the certificate rather than silently identified with delta.
    """
    if report is None:
        report = bl_constant(datum, config)
    if not report.finiteness.is_finite:
        raise NotFinite("near-extremiser requires a Finite-Numerical verdict")
    sol = report._solution
    max_d = float(np.max(sol.coeffs))
    support = np.nonzero(sol.coeffs > 1e-12 * max_d)[0]
    inst = expsum.ExpSumInstance.create(
        sol.expansion.total_dim,
        sol.expansion.u_vectors[support],
        sol.coeffs[support],
        config,
    )
    consts = inst.constants()
    if not 0.0 < delta < consts.delta0:
        raise DeltaOutOfRange(f"delta must lie in (0, {consts.delta0})")
    cert = expsum.near_minimise(inst, delta, config)
    normalized = tuple_from_diagonal(sol.expansion, sol.rotation, cert.y)
    blocks = [
        c_inv @ a @ c_inv for c_inv, a in zip(sol.inv_sqrt_grams, normalized.blocks)
    ]
    tup = GaussianTuple.create(blocks).validate(config)

    value = blg(datum, tup, config)
    shortfall_bound = 1.0 - 1.0 / math.sqrt(
        1.0 + delta * max_d / sol.inner_value
    )
    log_ecc = tup.log_eccentricity()
    ecc_ok = log_ecc <= consts.N * math.log(1.0 / delta) + 1e-12
    report.certificate = {
        **tup.to_dict(),
        "blg": value,
        "log_blg": log_blg(datum, tup, config),
        "delta": delta,
        "delta_eff": 1.0 - value / report.constant,
        "delta_eff_bound": shortfall_bound,
        "eccentricity": tup.eccentricity,
        "eccentricity_within_bound": bool(ecc_ok),
        "radius_bound": cert.radius_bound,
        "mode": cert.mode,
    }
    return tup


def holder_experiment(
    datum: BLDatum,
    radii: Sequence[float],
    config: Config = DEFAULT_CONFIG,
    trials: int = 3,
) -> dict:
    """Empirical continuity table for the squared reciprocal constant.

    For each perturbation radius r the maps are shifted by seeded random
    matrices of tuple norm r and the worst |BL^{-2} difference| / r^alpha is
    recorded, alpha being the certified exponent of the inner infimum.  The
    contract is boundedness of the ratios as r decreases, not a sharp value.
    """
    datum = ensure_validated(datum, config)
    base = bl_constant(datum, config)
    if not base.finiteness.is_finite:
        raise NotFinite("continuity experiment needs a finite base constant")
    sol = base._solution
    support = np.nonzero(sol.coeffs > 1e-14 * np.max(sol.coeffs))[0]
    inst = expsum.ExpSumInstance.create(
        sol.expansion.total_dim,
        sol.expansion.u_vectors[support],
        sol.coeffs[support],
        config,
    )
    alpha = inst.constants().alpha
    base_inv2 = sol.inner_value * sol.det_factor

    rows = []
    for r_idx, radius in enumerate(radii):
        if radius < 0:
            raise ValueError("radii must be nonnegative")
        if radius == 0.0:
            rows.append({"radius": 0.0, "max_diff": 0.0, "ratio": 0.0, "trials": 0})
            continue
        rng = np.random.default_rng(config.seed + 7919 * (r_idx + 1))
        worst = 0.0
        for _ in range(trials):
            bumps = [rng.standard_normal(m.shape) for m in datum.maps]
            scale = max(float(np.linalg.norm(b)) for b in bumps)
            perturbed = BLDatum.create(
                datum.n,
                [m + (radius / scale) * b for m, b in zip(datum.maps, bumps)],
                datum.exponents,
            )
            rep = bl_constant(perturbed, config)
            pert_inv2 = rep._solution.inner_value * rep._solution.det_factor
            worst = max(worst, abs(pert_inv2 - base_inv2))
        rows.append(
            {
                "radius": radius,
                "max_diff": worst,
                "ratio": worst / radius**alpha,
                "trials": trials,
            }
        )
    return {"alpha": alpha, "base_inv_square": base_inv2, "rows": rows}
