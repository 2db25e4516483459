import math

import numpy as np
import pytest

import blkit


# -- reference data -----------------------------------------------------------


def loomis_whitney():
    return blkit.validate(
        blkit.BLDatum.create(
            3,
            [
                [[1, 0, 0], [0, 1, 0]],
                [[1, 0, 0], [0, 0, 1]],
                [[0, 1, 0], [0, 0, 1]],
            ],
            [0.5, 0.5, 0.5],
        )
    )


def young_r1():
    return blkit.validate(
        blkit.BLDatum.create(
            2, [[[1.0, 0.0]], [[0.0, 1.0]], [[1.0, 1.0]]], [0.75, 0.75, 0.5]
        )
    )


def trilinear_hoelder():
    return blkit.validate(
        blkit.BLDatum.create(1, [[[1.0]], [[1.0]], [[1.0]]], [1 / 3, 1 / 3, 1 / 3])
    )


YOUNG_SHARP = blkit.beckner_constant(4 / 3) ** 2 * blkit.beckner_constant(2.0)


@pytest.fixture
def lw():
    return loomis_whitney()


@pytest.fixture
def young():
    return young_r1()


@pytest.fixture
def hoelder():
    return trilinear_hoelder()


def library_data():
    return [
        ("loomis-whitney", loomis_whitney()),
        ("young", young_r1()),
        ("hoelder", trilinear_hoelder()),
    ]


# the two-variable four-term family a e^x + e^-x + e^(x-y) + b e^y
EXAMPLE_EXPONENTS = [[1, 0], [-1, 0], [1, -1], [0, 1]]


def example_instance(a: float, b: float) -> blkit.ExpSumInstance:
    return blkit.ExpSumInstance.create(2, EXAMPLE_EXPONENTS, [a, 1.0, 1.0, b])


# -- independent oracles ------------------------------------------------------


def random_spd(rng: np.random.Generator, dim: int, log_spread: float = 1.0) -> np.ndarray:
    basis = np.linalg.qr(rng.standard_normal((dim, dim)))[0]
    eigs = np.exp(rng.uniform(-log_spread, log_spread, size=dim))
    return basis @ np.diag(eigs) @ basis.T


def random_rotation(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def gauss_hermite_ratio(datum: blkit.BLDatum, tup: blkit.GaussianTuple, points: int = 64) -> float:
    """Full-space integral of the gaussian functional by tensor quadrature.

    Independent of the determinant formula: integrates
    prod_j exp(-pi p_j <A_j L_j x, L_j x>) over R^n with Gauss-Hermite
    nodes rescaled per axis, and divides by the exact input masses
    (mass of exp(-pi <A z, z>) is det(A)^{-1/2}).
    """
    from scipy.special import logsumexp

    n = datum.n
    nodes, weights = np.polynomial.hermite.hermgauss(points)
    scale = 1.0 / math.sqrt(math.pi)
    x_axis = nodes * scale
    logw_axis = np.log(weights) + nodes**2 + math.log(scale)
    mesh = np.meshgrid(*([x_axis] * n), indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    wmesh = np.meshgrid(*([logw_axis] * n), indexing="ij")
    log_w = sum(w.ravel() for w in wmesh)
    expo = np.zeros(pts.shape[0])
    for mat, p, block in zip(datum.maps, datum.exponents, tup.blocks):
        z = pts @ mat.T
        expo -= math.pi * p * np.einsum("ni,ij,nj->n", z, block, z)
    log_num = float(logsumexp(expo + log_w))
    log_den = sum(
        -0.5 * p * float(np.linalg.slogdet(b)[1])
        for p, b in zip(datum.exponents, tup.blocks)
    )
    return math.exp(log_num - log_den)
