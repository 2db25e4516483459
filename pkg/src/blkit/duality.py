"""Intrinsic subspace data, Fourier duality, and sharp-constant applications.

The intrinsic form of the inequality integrates a tensor product over a
subspace H of a product space with exponents q_j >= 1 per factor.  Its
constant relates to the orthocomplement with conjugate exponents through

    BL(H, q) = B_q * BL(H_perp, q'),      B_q = prod_j A_{q_j}^{n_j},

where A_r = (r^{1/r} / r'^{1/r'})^{1/2} is the one-dimensional sharp
constant of the convolution inequality.  Parametrising H by an isometry
makes the subspace constant computable by the main pipeline with
measure factor exactly one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._linalg import null_space, orth_columns
from .config import DEFAULT_CONFIG, Config
from .datum import BLDatum, FinitenessVerdict, Subspace, validate
from .errors import (
    DimensionMismatch,
    ExponentsNotYoung,
    FactorNotSurjective,
    InputError,
    NotFinite,
    RankDeficientParametrization,
)
from .lieb import bl_constant, classify_datum


def conjugate_exponent(q: float) -> float:
    if q == 1.0:
        return math.inf
    if math.isinf(q):
        return 1.0
    if q < 1.0:
        raise InputError(f"exponent {q} below 1")
    return q / (q - 1.0)


def beckner_constant(r: float) -> float:
    """A_r = (r^{1/r} / r'^{1/r'})^{1/2}, with A_1 = A_inf = 1 by limits."""
    if r < 1.0:
        raise InputError(f"exponent {r} below 1")
    if r == 1.0 or math.isinf(r):
        return 1.0
    rc = conjugate_exponent(r)
    return math.sqrt(r ** (1.0 / r) / rc ** (1.0 / rc))


@dataclass(frozen=True)
class SubspaceDatum:
    """Subspace of R^{n_1} x ... x R^{n_m} with one exponent per factor."""

    factors: tuple
    subspace: Subspace
    q: tuple

    @classmethod
    def create(cls, factors: Sequence[int], basis_vectors, q: Sequence[float]) -> "SubspaceDatum":
        factors = tuple(int(n) for n in factors)
        sub = Subspace.from_vectors(basis_vectors, ambient=sum(factors))
        if sub.ambient != sum(factors):
            raise DimensionMismatch("basis vectors do not match the product dimension")
        if sub.dim < 1:
            raise InputError("subspace must have dimension at least 1")
        qt = tuple(float(v) for v in q)
        if len(qt) != len(factors):
            raise DimensionMismatch("one exponent per factor required")
        if any(v < 1.0 for v in qt):
            raise InputError("exponents must be >= 1")
        return cls(factors=factors, subspace=sub, q=qt)

    @property
    def ambient(self) -> int:
        return sum(self.factors)

    def to_dict(self) -> dict:
        return {
            "factors": list(self.factors),
            "H_basis": self.subspace.basis.T.tolist(),
            "q": [None if math.isinf(v) else v for v in self.q],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SubspaceDatum":
        q = [math.inf if v is None else v for v in data["q"]]
        return cls.create(data["factors"], data["H_basis"], q)


def dual_subspace(sub: Subspace) -> Subspace:
    """Orthocomplement within the same ambient space."""
    if sub.dim == 0:
        return Subspace(np.eye(sub.ambient))
    comp = null_space(sub.basis.T)
    return Subspace(comp)


def subspace_datum(sd: SubspaceDatum) -> tuple[BLDatum, float]:
    """Parametrise H isometrically and project to each factor.

    With an isometric parametrisation, integration over the parameter space
    matches Lebesgue measure on H exactly, so the constants of the subspace
    form and of the returned datum (with p_j = 1/q_j) coincide and the
    measure factor is 1.  A factor onto which H projects with deficient rank
    has no surjective map, and the construction is refused.
    """
    basis = orth_columns(sd.subspace.basis)
    maps = []
    start = 0
    for j, nj in enumerate(sd.factors):
        block = basis[start : start + nj, :]
        start += nj
        sv = np.linalg.svd(block, compute_uv=False) if block.size else np.array([0.0])
        if block.shape[0] > block.shape[1] or sv[min(block.shape) - 1] <= 1e-12:
            raise FactorNotSurjective(
                f"factor {j}: projection of the subspace is rank deficient"
            )
        maps.append(block)
    exponents = [0.0 if math.isinf(q) else 1.0 / q for q in sd.q]
    datum = validate(BLDatum.create(sd.subspace.dim, maps, exponents))
    return datum, 1.0


def product_beckner(sd: SubspaceDatum) -> float:
    """B_q = prod_j A_{q_j}^{n_j}."""
    out = 1.0
    for nj, q in zip(sd.factors, sd.q):
        out *= beckner_constant(q) ** nj
    return out


def dualize(sd: SubspaceDatum) -> SubspaceDatum:
    comp = dual_subspace(sd.subspace)
    if comp.dim == 0:
        raise InputError("orthocomplement is zero-dimensional")
    return SubspaceDatum(
        factors=sd.factors,
        subspace=comp,
        q=tuple(conjugate_exponent(q) for q in sd.q),
    )


def duality_check(
    sd: SubspaceDatum, config: Config = DEFAULT_CONFIG
) -> tuple[float, float, float]:
    """Evaluate both sides of BL(H, q) = B_q * BL(H_perp, q').

    Returns (lhs, rhs, B_q); the caller compares against the optimiser-level
    tolerance.  Requires both constants finite.
    """
    dual = dualize(sd)
    lhs_datum, _ = subspace_datum(sd)
    rhs_datum, _ = subspace_datum(dual)
    lhs_report = bl_constant(lhs_datum, config)
    rhs_report = bl_constant(rhs_datum, config)
    if not (lhs_report.finiteness.is_finite and rhs_report.finiteness.is_finite):
        raise NotFinite("duality check requires both constants finite")
    b_q = product_beckner(sd)
    return lhs_report.constant, b_q * rhs_report.constant, b_q


def young_constant(q: Sequence[float], dim: int) -> float:
    """Local sharp constant of the convolution inequality on a dim-dimensional
    group: (A_{q1} A_{q2} A_{q3})^dim.  The reciprocals must sum to 2."""
    q = [float(v) for v in q]
    if len(q) != 3:
        raise ExponentsNotYoung("exactly three exponents required")
    total = sum(0.0 if math.isinf(v) else 1.0 / v for v in q)
    if abs(total - 2.0) > 1e-9:
        raise ExponentsNotYoung(f"sum of reciprocals is {total}, need 2")
    if dim < 1:
        raise InputError("dimension must be positive")
    return float(np.prod([beckner_constant(v) for v in q]) ** dim)


def convolution_datum(
    differentials: Sequence, p: Sequence[float], config: Config = DEFAULT_CONFIG
) -> tuple[Subspace, Subspace, FinitenessVerdict]:
    """Tangent-space datum behind a multilinear convolution estimate.

    Given the differentials dS_j(0) (columns span the tangent space of the
    j-th parametrised surface), the incidence manifold has tangent space
    ker[dS_1 ... dS_m] at the origin, and its normal space is the graph
    {(dS_1^T x, ..., dS_m^T x)}.  Finiteness of the adjoint datum
    (dS^T, p) governs the estimate; the full pipeline decides it.
    """
    mats = [np.asarray(d, dtype=float) for d in differentials]
    if not mats:
        raise InputError("at least one differential required")
    ambient = mats[0].shape[0]
    for j, m in enumerate(mats):
        if m.ndim != 2 or m.shape[0] != ambient:
            raise DimensionMismatch(f"differential {j} has inconsistent row count")
        if np.linalg.matrix_rank(m) < m.shape[1]:
            raise RankDeficientParametrization(
                f"differential {j} does not have full column rank"
            )
    stacked = np.hstack(mats)
    tangent = Subspace(null_space(stacked))
    normal = Subspace(orth_columns(stacked.T))
    adjoint = BLDatum.create(ambient, [m.T for m in mats], p)
    verdict = classify_datum(validate(adjoint, config), config, numeric=True)
    return tangent, normal, verdict
