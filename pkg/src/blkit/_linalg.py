"""Shared dense linear-algebra helpers.

Everything here assumes desk-scale dimensions (n <= ~10); no sparse paths.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import SingularDenominator


def as_matrix(a, dtype=float) -> np.ndarray:
    m = np.asarray(a, dtype=dtype)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    return m


def logdet_spd(mat: np.ndarray, det_tol: float = 1e-10) -> float:
    """log det of a symmetric positive-definite matrix.

    Cholesky first (fast, certifies positivity); falls back to a symmetric
    eigendecomposition to produce a useful error when the matrix is only
    borderline definite.  Raises SingularDenominator when not PD within
    ``det_tol`` relative to the largest eigenvalue.
    """
    mat = np.asarray(mat, dtype=float)
    try:
        chol = np.linalg.cholesky(mat)
        return 2.0 * float(np.sum(np.log(np.diag(chol))))
    except np.linalg.LinAlgError:
        eigs = np.linalg.eigvalsh(0.5 * (mat + mat.T))
        scale = max(float(eigs[-1]), 0.0)
        if eigs[0] <= det_tol * max(scale, 1.0):
            raise SingularDenominator(
                f"matrix not positive definite: min eigenvalue {eigs[0]:.3e}"
            ) from None
        return float(np.sum(np.log(eigs)))


def smallest_singular_value(mat: np.ndarray) -> float:
    return float(np.linalg.svd(mat, compute_uv=False)[-1])


def orth_columns(mat: np.ndarray, tol_factor: float = 1e-12) -> np.ndarray:
    """Orthonormal basis (as columns) of the column space of ``mat``."""
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    if mat.size == 0:
        return np.zeros((mat.shape[0], 0))
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    if s.size == 0:
        return np.zeros((mat.shape[0], 0))
    rank = int(np.sum(s > tol_factor * max(s[0], 1.0)))
    return u[:, :rank]


def null_space(mat: np.ndarray, tol_factor: float = 1e-12) -> np.ndarray:
    """Orthonormal basis (as columns) of ker(mat)."""
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    _, s, vh = np.linalg.svd(mat)
    scale = max(float(s[0]), 1.0) if s.size else 1.0
    rank = int(np.sum(s > tol_factor * scale))
    return vh[rank:].T.copy()


def subspace_sum(basis_a: np.ndarray, basis_b: np.ndarray) -> np.ndarray:
    return orth_columns(np.hstack([basis_a, basis_b]))


def subspace_intersection(basis_a: np.ndarray, basis_b: np.ndarray) -> np.ndarray:
    """Intersection of two column spans, via the kernel of [A | -B]."""
    da, db = basis_a.shape[1], basis_b.shape[1]
    if da == 0 or db == 0:
        return np.zeros((basis_a.shape[0], 0))
    kern = null_space(np.hstack([basis_a, -basis_b]))
    if kern.shape[1] == 0:
        return np.zeros((basis_a.shape[0], 0))
    return orth_columns(basis_a @ kern[:da])


def projector(basis: np.ndarray) -> np.ndarray:
    return basis @ basis.T


def same_subspace(basis_a: np.ndarray, basis_b: np.ndarray, tol: float) -> bool:
    if basis_a.shape[1] != basis_b.shape[1]:
        return False
    return bool(np.max(np.abs(projector(basis_a) - projector(basis_b))) <= tol)


def skew_from_params(params: np.ndarray, size: int) -> np.ndarray:
    """Pack n(n-1)/2 parameters into a skew-symmetric matrix (upper triangle)."""
    theta = np.zeros((size, size))
    idx = np.triu_indices(size, k=1)
    theta[idx] = params
    return theta - theta.T


def params_from_skew(theta: np.ndarray) -> np.ndarray:
    return theta[np.triu_indices(theta.shape[0], k=1)]


def rotation_from_params(params: np.ndarray, size: int) -> np.ndarray:
    if size == 1:
        return np.ones((1, 1))
    return scipy.linalg.expm(skew_from_params(np.asarray(params, dtype=float), size))


def _affine_min_norm(sub: np.ndarray) -> np.ndarray:
    """Affine coefficients of the least-norm affine combination of rows."""
    k = sub.shape[0]
    kkt = np.zeros((k + 1, k + 1))
    kkt[0, 1:] = 1.0
    kkt[1:, 0] = 1.0
    kkt[1:, 1:] = sub @ sub.T
    rhs = np.zeros(k + 1)
    rhs[0] = 1.0
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    return sol[1:]


def min_norm_point_hull(points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Point of minimum Euclidean norm in the convex hull of ``points`` (rows).

    Wolfe's algorithm: finitely many major cycles, each solving an affine
    least-norm problem on the current corral and restoring feasibility by a
    line search.  Exact up to linear-solve roundoff, which matters because
    the separation margins derived from this point feed certified constants.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    k = pts.shape[0]
    if k == 1:
        return pts[0].copy()
    scale = float(np.max(np.abs(pts))) or 1.0
    start = int(np.argmin(np.einsum("ij,ij->i", pts, pts)))
    corral = [start]
    lam = np.array([1.0])
    x = pts[start].copy()
    for _ in range(8 * k + 16):
        scores = pts @ x
        j_new = int(np.argmin(scores))
        if scores[j_new] >= float(x @ x) - tol * scale**2:
            break
        if j_new not in corral:
            corral.append(j_new)
            lam = np.append(lam, 0.0)
        for _ in range(2 * k + 4):
            sub = pts[corral]
            mu = _affine_min_norm(sub)
            if np.all(mu > 1e-14):
                lam = mu
                break
            shrinking = mu <= 1e-14
            with np.errstate(divide="ignore", invalid="ignore"):
                steps = np.where(shrinking, lam / (lam - mu), np.inf)
            theta = float(np.min(steps[np.isfinite(steps)], initial=1.0))
            theta = min(max(theta, 0.0), 1.0)
            lam = (1.0 - theta) * lam + theta * mu
            keep = lam > 1e-14
            if keep.all():
                lam = np.maximum(lam, 0.0)
                lam /= lam.sum()
                break
            corral = [c for c, kept in zip(corral, keep) if kept]
            lam = lam[keep]
            lam /= lam.sum()
        x = pts[corral].T @ lam
    return x
