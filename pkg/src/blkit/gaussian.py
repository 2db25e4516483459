"""Closed-form evaluation of the gaussian ratio and related identities.

For centred gaussian inputs with quadratic forms A_j the multilinear ratio
collapses to

    prod_j det(A_j)^{p_j / 2} / det(sum_j p_j L_j^T A_j L_j)^{1/2},

and the constant of the full inequality is the supremum of this quantity
over positive-definite tuples.  Determinants are computed in log space so
that eccentric tuples (norms polynomial in 1/delta) stay representable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._linalg import as_matrix, logdet_spd
from .config import DEFAULT_CONFIG, Config
from .datum import BLDatum, ensure_validated
from .errors import DimensionMismatch, SingularDenominator


@dataclass(frozen=True)
class GaussianTuple:
    """Tuple of symmetric positive-definite blocks, one per map."""

    blocks: tuple

    @classmethod
    def create(cls, blocks: Sequence) -> "GaussianTuple":
        mats = []
        for b in blocks:
            mat = np.ascontiguousarray(as_matrix(b))
            mat.setflags(write=False)
            mats.append(mat)
        return cls(blocks=tuple(mats))

    @classmethod
    def identity(cls, dims: Sequence[int]) -> "GaussianTuple":
        return cls.create([np.eye(d) for d in dims])

    @property
    def dims(self) -> tuple:
        return tuple(b.shape[0] for b in self.blocks)

    @property
    def eccentricity(self) -> float:
        """max_j max(|A_j|, |A_j^{-1}|) in operator norm."""
        worst = 0.0
        for b in self.blocks:
            eigs = np.linalg.eigvalsh(b)
            worst = max(worst, float(eigs[-1]), 1.0 / float(eigs[0]))
        return worst

    def log_eccentricity(self) -> float:
        worst = -np.inf
        for b in self.blocks:
            eigs = np.linalg.eigvalsh(b)
            worst = max(worst, np.log(float(eigs[-1])), -np.log(float(eigs[0])))
        return float(worst)

    def scale(self, factor: float) -> "GaussianTuple":
        return GaussianTuple.create([factor * b for b in self.blocks])

    def validate(self, config: Config = DEFAULT_CONFIG) -> "GaussianTuple":
        for j, b in enumerate(self.blocks):
            if b.shape[0] != b.shape[1]:
                raise DimensionMismatch(f"block {j} is not square")
            scale = max(float(np.max(np.abs(b))), 1.0)
            if float(np.max(np.abs(b - b.T))) > config.sym_tol * scale:
                raise DimensionMismatch(f"block {j} is not symmetric within tolerance")
            if float(np.linalg.eigvalsh(b)[0]) <= 0.0:
                raise SingularDenominator(f"block {j} is not positive definite")
        return self

    def to_dict(self) -> dict:
        return {"blocks": [b.tolist() for b in self.blocks]}

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianTuple":
        return cls.create(data["blocks"])


def _check_shapes(datum: BLDatum, tup: GaussianTuple) -> None:
    if tup.dims != datum.codomain_dims:
        raise DimensionMismatch(
            f"block sizes {tup.dims} do not match map codomains {datum.codomain_dims}"
        )


def log_blg(
    datum: BLDatum, tup: GaussianTuple, config: Config = DEFAULT_CONFIG
) -> float:
    """log of the gaussian ratio for this datum and tuple."""
    datum = ensure_validated(datum, config)
    _check_shapes(datum, tup)
    log_num = 0.0
    quad_sum = np.zeros((datum.n, datum.n))
    for mat, p, block in zip(datum.maps, datum.exponents, tup.blocks):
        if p > 0.0:
            log_num += p * logdet_spd(block, config.det_tol)
        quad_sum += p * (mat.T @ block @ mat)
    log_den = logdet_spd(quad_sum, config.det_tol)
    return 0.5 * log_num - 0.5 * log_den


def blg(datum: BLDatum, tup: GaussianTuple, config: Config = DEFAULT_CONFIG) -> float:
    """Gaussian ratio; equals the full ratio on the corresponding inputs."""
    return float(np.exp(log_blg(datum, tup, config)))


def scale_invariance_check(
    datum: BLDatum,
    tup: GaussianTuple,
    lam: float,
    config: Config = DEFAULT_CONFIG,
) -> float:
    """Relative deviation of the ratio under A -> lam * A.

    Zero (to rounding) exactly when the scaling identity holds; otherwise the
    deviation is |lam^{(sum p_j n_j - n)/2} - 1|.
    """
    if lam <= 0.0:
        raise ValueError("scaling factor must be positive")
    base = log_blg(datum, tup, config)
    scaled = log_blg(datum, tup.scale(lam), config)
    return float(abs(np.expm1(scaled - base)))


def ball_inequality_check(
    datum: BLDatum,
    tup_a: GaussianTuple,
    tup_b: GaussianTuple,
    config: Config = DEFAULT_CONFIG,
) -> tuple[float, float]:
    """Both sides of the convolution self-similarity inequality for centred
    gaussian pairs.

    lhs = ratio(A) * ratio(B);  rhs = ratio(A + B) * ratio((A^-1 + B^-1)^-1).
    The pointwise product of centred gaussians adds quadratic forms, their
    convolution adds the inverses; centring puts the supremum over shifts at
    the origin.  Contract: lhs <= rhs whenever both sides are finite.
    """
    _check_shapes(datum, tup_a)
    _check_shapes(datum, tup_b)
    pointwise = GaussianTuple.create(
        [a + b for a, b in zip(tup_a.blocks, tup_b.blocks)]
    )
    def harmonic(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        # (A^-1 + B^-1)^-1 = B (A+B)^-1 A, symmetrised against roundoff
        m = b @ np.linalg.solve(a + b, a)
        return 0.5 * (m + m.T)

    convolved = GaussianTuple.create(
        [harmonic(a, b) for a, b in zip(tup_a.blocks, tup_b.blocks)]
    )
    log_lhs = log_blg(datum, tup_a, config) + log_blg(datum, tup_b, config)
    log_rhs = log_blg(datum, pointwise, config) + log_blg(datum, convolved, config)
    return float(np.exp(log_lhs)), float(np.exp(log_rhs))
