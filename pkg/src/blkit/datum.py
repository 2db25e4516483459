"""Brascamp-Lieb data: validation, normal forms, and finiteness screening.

A datum is a family of surjective linear maps ``L_j: R^n -> R^{n_j}`` with
exponents ``p_j in [0, 1]``.  Finiteness of the associated constant requires
the scaling identity ``n = sum_j p_j n_j`` together with the subspace
inequality ``dim V <= sum_j p_j dim(L_j V)`` for every subspace V.  The
subspace condition cannot be decided by sampling finitely many V, so the
verdict type keeps an explicit ``Inconclusive`` state; candidates are drawn
from the lattice generated by the kernels of the maps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from ._linalg import (
    as_matrix,
    null_space,
    orth_columns,
    same_subspace,
    smallest_singular_value,
    subspace_intersection,
    subspace_sum,
)
from .config import DEFAULT_CONFIG, Config
from .errors import DimensionMismatch, ExponentOutOfRange, NotSurjective


@dataclass(frozen=True)
class BLDatum:
    """m linear surjections onto R^{n_j} plus exponents, the optimisation datum."""

    n: int
    maps: tuple
    exponents: tuple
    min_singular_values: Optional[tuple] = field(default=None, compare=False)

    @classmethod
    def create(cls, n: int, maps: Sequence, exponents: Sequence) -> "BLDatum":
        mats = tuple(np.ascontiguousarray(as_matrix(m)) for m in maps)
        for m in mats:
            m.setflags(write=False)
        return cls(n=int(n), maps=mats, exponents=tuple(float(p) for p in exponents))

    @property
    def m(self) -> int:
        return len(self.maps)

    @property
    def codomain_dims(self) -> tuple:
        return tuple(mat.shape[0] for mat in self.maps)

    @property
    def total_dim(self) -> int:
        return sum(self.codomain_dims)

    @property
    def is_validated(self) -> bool:
        return self.min_singular_values is not None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "maps": [m.tolist() for m in self.maps],
            "p": list(self.exponents),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BLDatum":
        return cls.create(data["n"], data["maps"], data["p"])


@dataclass(frozen=True)
class Subspace:
    """Subspace of an ambient space, held as orthonormal basis columns."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.ascontiguousarray(as_matrix(self.basis))
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def from_vectors(cls, vectors: Sequence, ambient: Optional[int] = None) -> "Subspace":
        arr = np.asarray(vectors, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.size == 0:
            return cls(np.zeros((ambient or 0, 0)))
        return cls(orth_columns(arr.T))

    def check_orthonormal(self, tol: float) -> None:
        gram = self.basis.T @ self.basis
        if self.dim and np.max(np.abs(gram - np.eye(self.dim))) > tol:
            raise ValueError("subspace basis is not orthonormal within tolerance")

    def to_dict(self) -> dict:
        return {"basis": self.basis.T.tolist(), "dim": self.dim}


TAG_SCALING_FAILS = "Infinite-ScalingFails"
TAG_SUBSPACE_WITNESS = "Infinite-SubspaceWitness"
TAG_FINITE_NUMERICAL = "Finite-Numerical"
TAG_INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class FinitenessVerdict:
    tag: str
    scaling_residual: float
    witness: Optional[Subspace] = None
    numeric_lower_bound: Optional[float] = None

    def __post_init__(self):
        if (self.tag == TAG_SUBSPACE_WITNESS) != (self.witness is not None):
            raise ValueError("witness must be present exactly for the witness tag")

    @property
    def is_finite(self) -> bool:
        return self.tag == TAG_FINITE_NUMERICAL

    @property
    def is_infinite(self) -> bool:
        return self.tag in (TAG_SCALING_FAILS, TAG_SUBSPACE_WITNESS)

    def to_dict(self) -> dict:
        out = {"tag": self.tag, "scaling_residual": self.scaling_residual}
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.numeric_lower_bound is not None:
            out["numeric_lower_bound"] = self.numeric_lower_bound
        return out


def validate(datum: BLDatum, config: Config = DEFAULT_CONFIG) -> BLDatum:
    """Check all datum invariants; return the datum annotated with the
    smallest singular value of each map."""
    if datum.m < 1:
        raise DimensionMismatch("a datum needs at least one map")
    sigmas = []
    for j, (mat, p) in enumerate(zip(datum.maps, datum.exponents)):
        rows, cols = mat.shape
        if cols != datum.n:
            raise DimensionMismatch(
                f"map {j} has {cols} columns, ambient dimension is {datum.n}"
            )
        if not 1 <= rows <= datum.n:
            raise DimensionMismatch(f"map {j} has {rows} rows, need 1..{datum.n}")
        if not 0.0 <= p <= 1.0:
            raise ExponentOutOfRange(f"p[{j}] = {p} outside [0, 1]")
        smin = smallest_singular_value(mat)
        scale = max(float(np.linalg.norm(mat, 2)), 1.0)
        if smin <= config.rank_tol * scale:
            raise NotSurjective(
                f"map {j}: smallest singular value {smin:.3e} below tolerance"
            )
        sigmas.append(smin)
    if len(datum.exponents) != datum.m:
        raise DimensionMismatch("one exponent per map required")
    return replace(datum, min_singular_values=tuple(sigmas))


def ensure_validated(datum: BLDatum, config: Config = DEFAULT_CONFIG) -> BLDatum:
    return datum if datum.is_validated else validate(datum, config)


def scaling_condition(datum: BLDatum) -> float:
    """Residual n - sum_j p_j n_j; zero is necessary for a finite constant."""
    return float(datum.n - sum(p * nj for p, nj in zip(datum.exponents, datum.codomain_dims)))


def projection_normalize(
    datum: BLDatum, config: Config = DEFAULT_CONFIG
) -> tuple[BLDatum, float]:
    """Replace each L_j by C_j^{-1} L_j with C_j = (L_j L_j^T)^{1/2}.

    Afterwards every map satisfies L_j L_j^T = I.  Returns the determinant
    factor prod_j det(L_j L_j^T)^{p_j} that relates the gaussian functionals
    of the two data:  ratio(L; A)^{-2} = ratio(L'; A')^{-2} * det_factor
    under A_j = C_j^{-1} A'_j C_j^{-1}.
    """
    datum = ensure_validated(datum, config)
    new_maps = []
    log_factor = 0.0
    for mat, p in zip(datum.maps, datum.exponents):
        gram = mat @ mat.T
        eigvals, eigvecs = np.linalg.eigh(gram)
        if eigvals[0] <= config.rank_tol**2 * max(eigvals[-1], 1.0):
            raise NotSurjective("gram matrix is singular; map not surjective")
        inv_sqrt = eigvecs @ np.diag(1.0 / np.sqrt(eigvals)) @ eigvecs.T
        new_maps.append(inv_sqrt @ mat)
        log_factor += p * float(np.sum(np.log(eigvals)))
    normalized = validate(BLDatum.create(datum.n, new_maps, datum.exponents), config)
    return normalized, float(np.exp(log_factor))


def kernel_lattice(
    datum: BLDatum, depth: int, config: Config = DEFAULT_CONFIG
) -> list[Subspace]:
    """Closure of the map kernels under pairwise intersection and sum.

    Alternates the two operations up to ``depth`` rounds and deduplicates by
    comparing orthogonal projectors.  The zero subspace is dropped; the full
    space is always included.
    """
    datum = ensure_validated(datum, config)
    if depth < 1:
        raise ValueError("depth must be >= 1")

    bases: list[np.ndarray] = []

    def add(basis: np.ndarray) -> bool:
        if basis.shape[1] == 0 or basis.shape[1] == datum.n:
            return False
        for known in bases:
            if same_subspace(known, basis, config.dedup_tol):
                return False
        bases.append(basis)
        return True

    for mat in datum.maps:
        add(null_space(mat))

    for _ in range(depth):
        new = []
        for a, b in itertools.combinations(bases, 2):
            new.append(subspace_intersection(a, b))
            new.append(subspace_sum(a, b))
        changed = False
        for basis in new:
            changed |= add(basis)
        if not changed:
            break

    result = [Subspace(b) for b in bases]
    result.append(Subspace(np.eye(datum.n)))
    return result


def transversality_check(
    datum: BLDatum,
    candidates: Sequence[Subspace],
    config: Config = DEFAULT_CONFIG,
) -> FinitenessVerdict:
    """Screen the finiteness conditions on a finite family of subspaces.

    The scaling residual takes priority; a candidate V with
    dim V > sum_j p_j dim(L_j V) certifies an infinite constant.  Passing all
    candidates proves nothing, hence Inconclusive (upgrading to
    Finite-Numerical is the optimiser's job).
    """
    datum = ensure_validated(datum, config)
    residual = scaling_condition(datum)
    if abs(residual) > config.scaling_tol * max(1.0, datum.n):
        return FinitenessVerdict(tag=TAG_SCALING_FAILS, scaling_residual=residual)
    for cand in candidates:
        if cand.ambient != datum.n:
            raise DimensionMismatch("candidate subspace has wrong ambient dimension")
        if cand.dim == 0:
            continue
        weighted = 0.0
        for mat, p in zip(datum.maps, datum.exponents):
            sv = np.linalg.svd(mat @ cand.basis, compute_uv=False)
            # threshold on the scale of the map itself: directions inside the
            # kernel must count as rank zero even though the tiny product has
            # a "largest" singular value of its own
            scale = max(float(np.linalg.norm(mat, 2)), 1.0)
            weighted += p * int(np.sum(sv > config.rank_tol * scale))
        if cand.dim > weighted + config.rank_tol:
            return FinitenessVerdict(
                tag=TAG_SUBSPACE_WITNESS, scaling_residual=residual, witness=cand
            )
    return FinitenessVerdict(tag=TAG_INCONCLUSIVE, scaling_residual=residual)
