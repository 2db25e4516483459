"""Desk-scale verification of the local inequality for perturbed maps.

For C^2 maps B_j whose differentials at a basepoint form a finite-constant
datum, the multilinear functional restricted to a small ball around the
basepoint is controlled by (1 + eps) times the constant of the linearised
datum, for every eps > 0 and small enough ball.  The verifier integrates

    ratio(delta) = int_{|x - x0| <= delta} prod_j f_j^{p_j}(B_j(x)) dx
                   / prod_j (int f_j)^{p_j}

over a shrinking radius schedule for a suite of closed-form gaussian inputs
and reports where the bound (1 + eps) * BL(dB(x0), p) starts to hold.  Maps
are polynomial so differentials are exact; inputs are gaussians so the
denominators are exact; only the numerator is quadratured (over the closed
Euclidean ball, in spherical tensor coordinates).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp
from scipy.stats import qmc

from ._linalg import logdet_spd
from .config import DEFAULT_CONFIG, Config
from .datum import BLDatum, ensure_validated
from .errors import (
    DimensionMismatch,
    ErrorEstimateTooLarge,
    InputError,
    NotFinite,
    QuadratureBudgetExceeded,
)
from .lieb import BLReport, bl_constant, near_extremiser


# ---------------------------------------------------------------------------
# polynomial maps


@dataclass(frozen=True)
class PolyMap:
    """Polynomial map R^n -> R^k given per output coordinate as a list of
    (multi-index, coefficient) monomials."""

    n: int
    outputs: tuple

    @classmethod
    def create(cls, n: int, outputs) -> "PolyMap":
        coords = []
        for coord in outputs:
            monos = []
            for exps, coef in coord:
                exps = tuple(int(e) for e in exps)
                if len(exps) != n or any(e < 0 for e in exps):
                    raise InputError(f"bad multi-index {exps} for n={n}")
                monos.append((exps, float(coef)))
            coords.append(tuple(monos))
        if not coords:
            raise InputError("map needs at least one output coordinate")
        return cls(n=int(n), outputs=tuple(coords))

    @classmethod
    def from_matrix(cls, mat) -> "PolyMap":
        mat = np.asarray(mat, dtype=float)
        rows, cols = mat.shape
        outputs = []
        for r in range(rows):
            monos = []
            for c in range(cols):
                if mat[r, c] != 0.0:
                    exps = tuple(1 if i == c else 0 for i in range(cols))
                    monos.append((exps, float(mat[r, c])))
            if not monos:
                monos.append((tuple([0] * cols), 0.0))
            outputs.append(tuple(monos))
        return cls(n=cols, outputs=tuple(outputs))

    @property
    def out_dim(self) -> int:
        return len(self.outputs)

    @property
    def degree(self) -> int:
        return max(
            (sum(exps) for coord in self.outputs for exps, _ in coord), default=0
        )

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.n:
            raise DimensionMismatch(f"points must have {self.n} columns")
        out = np.zeros((points.shape[0], self.out_dim))
        for o, coord in enumerate(self.outputs):
            acc = np.zeros(points.shape[0])
            for exps, coef in coord:
                term = np.full(points.shape[0], coef)
                for i, e in enumerate(exps):
                    if e:
                        term = term * points[:, i] ** e
                acc += term
            out[:, o] = acc
        return out

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "outputs": [
                [{"exps": list(exps), "coef": coef} for exps, coef in coord]
                for coord in self.outputs
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PolyMap":
        return cls.create(
            data["n"],
            [[(m["exps"], m["coef"]) for m in coord] for coord in data["outputs"]],
        )


def differential(poly: PolyMap, x0) -> np.ndarray:
    """Exact Jacobian at x0 via formal differentiation of the monomials."""
    x0 = np.asarray(x0, dtype=float)
    jac = np.zeros((poly.out_dim, poly.n))
    for o, coord in enumerate(poly.outputs):
        for exps, coef in coord:
            for i, e in enumerate(exps):
                if e == 0:
                    continue
                term = coef * e
                for k, ek in enumerate(exps):
                    power = ek - 1 if k == i else ek
                    if power:
                        term *= x0[k] ** power
                jac[o, i] += term
    return jac


# ---------------------------------------------------------------------------
# closed-form gaussian inputs


@dataclass(frozen=True)
class GaussianInput:
    """Density amp * exp(-pi <Q z, z>) on one factor; integral is exact."""

    quad: np.ndarray
    log_amp: float = 0.0

    @property
    def log_mass(self) -> float:
        return self.log_amp - 0.5 * logdet_spd(self.quad)

    def log_density(self, z: np.ndarray) -> np.ndarray:
        return self.log_amp - math.pi * np.einsum("ni,ij,nj->n", z, self.quad, z)

    @classmethod
    def normalised(cls, quad) -> "GaussianInput":
        quad = np.asarray(quad, dtype=float)
        return cls(quad=quad, log_amp=0.5 * logdet_spd(quad))


def scaled_gaussian_inputs(
    datum: BLDatum,
    delta: float,
    gamma: float,
    config: Config = DEFAULT_CONFIG,
    report: Optional[BLReport] = None,
    accuracy: float = 0.01,
) -> tuple:
    """L1-normalised near-extremising gaussians at covariance scale
    delta^(1+gamma); the canonical localised stress inputs."""
    if (
        report is not None
        and report.certificate is not None
        and report.certificate.get("delta") == accuracy
    ):
        blocks = tuple(np.asarray(b) for b in report.certificate["blocks"])
    else:
        blocks = near_extremiser(datum, accuracy, config, report=report).blocks
    scale = delta ** (1.0 + gamma)
    return tuple(GaussianInput.normalised(b / scale**2) for b in blocks)


# ---------------------------------------------------------------------------
# quadrature over the closed euclidean ball


def _gauss_legendre(n: int, lo: float, hi: float):
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    return mid + half * x, half * w


def _ball_nodes(n: int, radius: float, points: int):
    """Tensor nodes/log-weights in spherical coordinates, exact ball support."""
    if n == 1:
        x, w = _gauss_legendre(points, -radius, radius)
        return x[:, None], np.log(w)
    r, wr = _gauss_legendre(points, 0.0, radius)
    phi = np.arange(2 * points) * (np.pi / points)
    wphi = np.full(phi.size, np.pi / points)
    if n == 2:
        rr, pp = np.meshgrid(r, phi, indexing="ij")
        nodes = np.stack([rr * np.cos(pp), rr * np.sin(pp)], axis=-1).reshape(-1, 2)
        weights = (wr * r)[:, None] * wphi[None, :]
        return nodes, np.log(weights.ravel())
    t, wt = _gauss_legendre(points, -1.0, 1.0)  # t = cos(theta)
    if n == 3:
        rr, tt, pp = np.meshgrid(r, t, phi, indexing="ij")
        st = np.sqrt(np.maximum(1.0 - tt**2, 0.0))
        nodes = np.stack(
            [rr * st * np.cos(pp), rr * st * np.sin(pp), rr * tt], axis=-1
        ).reshape(-1, 3)
        weights = (wr * r**2)[:, None, None] * wt[None, :, None] * wphi[None, None, :]
        return nodes, np.log(weights.ravel())
    if n == 4:
        chi, wchi = _gauss_legendre(points, 0.0, np.pi)
        rr, cc, tt, pp = np.meshgrid(r, chi, t, phi, indexing="ij")
        schi, st = np.sin(cc), np.sqrt(np.maximum(1.0 - tt**2, 0.0))
        nodes = np.stack(
            [
                rr * schi * st * np.cos(pp),
                rr * schi * st * np.sin(pp),
                rr * schi * tt,
                rr * np.cos(cc),
            ],
            axis=-1,
        ).reshape(-1, 4)
        weights = (
            (wr * r**3)[:, None, None, None]
            * (wchi * np.sin(chi) ** 2)[None, :, None, None]
            * wt[None, None, :, None]
            * wphi[None, None, None, :]
        )
        return nodes, np.log(weights.ravel())
    raise InputError("tensor rule limited to dimension <= 4")


def _log_ball_integral_tensor(log_f, center, radius, n, points, budget):
    count = {1: points, 2: 2 * points**2, 3: 2 * points**3, 4: 2 * points**4}[n]
    if count > budget:
        raise QuadratureBudgetExceeded(
            f"{count} nodes exceed the quadrature budget {budget}"
        )
    nodes, logw = _ball_nodes(n, radius, points)
    vals = log_f(nodes + center[None, :])
    return float(logsumexp(vals + logw)), count


def _log_ball_integral_qmc(log_f, center, radius, n, samples, seed):
    sampler = qmc.Sobol(d=n, scramble=True, seed=seed)
    count = int(2 ** math.ceil(math.log2(max(samples, 2))))
    cube = (sampler.random(count) * 2.0 - 1.0) * radius
    inside = np.linalg.norm(cube, axis=1) <= radius
    log_vol = n * math.log(2.0 * radius)
    vals = np.full(count, -np.inf)
    if np.any(inside):
        vals[inside] = log_f(cube[inside] + center[None, :])
    log_mean = float(logsumexp(vals) - math.log(count))
    with np.errstate(over="ignore"):
        dev = np.exp(vals[np.isfinite(vals)])
        err = float(np.std(np.concatenate([dev, np.zeros(count - dev.size)])))
        err /= math.sqrt(count)
    return log_vol + log_mean, math.exp(log_vol) * err, count


@dataclass(frozen=True)
class RatioResult:
    value: float
    error_estimate: float
    nodes: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "nodes": self.nodes,
        }


@dataclass(frozen=True)
class QuadratureSpec:
    points: int = 0          # 0 -> config default
    seed: int = 0
    samples: int = 0

    def to_dict(self) -> dict:
        return {"points": self.points, "seed": self.seed, "samples": self.samples}


@dataclass(frozen=True)
class NonlinearProblem:
    maps: tuple
    exponents: tuple
    x0: np.ndarray
    epsilon: float
    delta_schedule: tuple
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    @classmethod
    def create(
        cls, maps, exponents, x0, epsilon, delta_schedule, quadrature=None
    ) -> "NonlinearProblem":
        maps = tuple(maps)
        x0 = np.asarray(x0, dtype=float)
        sched = tuple(float(d) for d in delta_schedule)
        if any(d <= 0 for d in sched) or any(
            a <= b for a, b in zip(sched, sched[1:])
        ):
            raise InputError("delta schedule must be strictly decreasing and positive")
        if any(pm.n != x0.size for pm in maps):
            raise DimensionMismatch("map input dimensions must match the basepoint")
        return cls(
            maps=maps,
            exponents=tuple(float(p) for p in exponents),
            x0=x0,
            epsilon=float(epsilon),
            delta_schedule=sched,
            quadrature=quadrature or QuadratureSpec(),
        )

    def linear_datum(self, config: Config = DEFAULT_CONFIG) -> BLDatum:
        mats = [differential(pm, self.x0) for pm in self.maps]
        return ensure_validated(
            BLDatum.create(self.x0.size, mats, self.exponents), config
        )

    def to_dict(self) -> dict:
        return {
            "maps": [pm.to_dict() for pm in self.maps],
            "p": list(self.exponents),
            "x0": self.x0.tolist(),
            "epsilon": self.epsilon,
            "delta_schedule": list(self.delta_schedule),
            "quadrature": self.quadrature.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NonlinearProblem":
        quad = data.get("quadrature") or {}
        return cls.create(
            [PolyMap.from_dict(m) for m in data["maps"]],
            data["p"],
            data["x0"],
            data.get("epsilon", 0.05),
            data["delta_schedule"],
            QuadratureSpec(
                points=int(quad.get("points", 0)),
                seed=int(quad.get("seed", 0)),
                samples=int(quad.get("samples", 0)),
            ),
        )


def nonlinear_ratio(
    problem: NonlinearProblem,
    delta: float,
    inputs: Sequence[GaussianInput],
    config: Config = DEFAULT_CONFIG,
) -> RatioResult:
    """Localised functional ratio at radius ``delta`` for one input tuple.

    The denominator is exact (closed-form gaussian masses); the numerator is
    quadratured over the closed ball with an a-posteriori error estimate from
    a coarsened rule.  Deterministic for a fixed configuration.
    """
    if len(inputs) != len(problem.maps):
        raise DimensionMismatch("one gaussian input per map required")
    for pm, gi in zip(problem.maps, inputs):
        if gi.quad.shape[0] != pm.out_dim:
            raise DimensionMismatch("input block size does not match map codomain")
    n = problem.x0.size
    exps = problem.exponents

    def log_integrand(points: np.ndarray) -> np.ndarray:
        total = np.zeros(points.shape[0])
        for pm, gi, p in zip(problem.maps, inputs, exps):
            if p == 0.0:
                continue
            total += p * gi.log_density(pm(points))
        return total

    log_den = sum(p * gi.log_mass for p, gi in zip(exps, inputs))
    if n <= 4:
        points = problem.quadrature.points or config.quad_points
        log_num, nodes = _log_ball_integral_tensor(
            log_integrand, problem.x0, delta, n, points, config.quad_budget
        )
        coarse_pts = max(8, int(0.7 * points))
        log_coarse, _ = _log_ball_integral_tensor(
            log_integrand, problem.x0, delta, n, coarse_pts, config.quad_budget
        )
        value = math.exp(log_num - log_den)
        coarse = math.exp(log_coarse - log_den)
        estimate = 2.0 * abs(value - coarse) + 1e-15 * abs(value)
    else:
        samples = problem.quadrature.samples or config.qmc_samples
        seed = problem.quadrature.seed or config.seed
        log_num, err, nodes = _log_ball_integral_qmc(
            log_integrand, problem.x0, delta, n, samples, seed
        )
        value = math.exp(log_num - log_den)
        estimate = err * math.exp(-log_den)
    if value > 0.0 and estimate > config.estimate_trust * value:
        raise ErrorEstimateTooLarge(
            f"estimate {estimate:.3e} exceeds {config.estimate_trust} of value {value:.3e}"
        )
    return RatioResult(value=value, error_estimate=estimate, nodes=nodes)


def _random_input_suite(
    dims: Sequence[int], delta: float, rng: np.random.Generator, count: int
) -> list:
    """Random mild SPD tuples, narrow relative to the ball so truncation is
    negligible against the full-space gaussian ratio."""
    suite = []
    width = delta / 6.0
    for _ in range(count):
        blocks = []
        for d in dims:
            basis = np.linalg.qr(rng.standard_normal((d, d)))[0]
            eigs = rng.uniform(0.5, 2.0, size=d)
            blocks.append(basis @ np.diag(eigs) @ basis.T / width**2)
        suite.append(tuple(GaussianInput.normalised(b) for b in blocks))
    return suite


def verify_theorem1(
    problem: NonlinearProblem, config: Config = DEFAULT_CONFIG
) -> dict:
    """Ratio table over the radius schedule against (1+eps) * linear constant.

    The input suite mixes the scaled near-extremising gaussians (rebuilt at
    each radius) with seeded random narrow tuples.  PASS means the bound
    holds from some schedule entry onward and the worst ratios do not grow
    beyond the noise tolerance as the radius shrinks.
    """
    lin = problem.linear_datum(config)
    base = bl_constant(lin, config)
    if not base.finiteness.is_finite:
        raise NotFinite("the linearised datum must be Finite-Numerical")
    bound = (1.0 + problem.epsilon) * base.constant
    rng = np.random.default_rng(config.seed + 13)
    dims = lin.codomain_dims

    rows = []
    for delta in problem.delta_schedule:
        suite = [
            (
                "scaled-extremiser",
                scaled_gaussian_inputs(lin, delta, config.gamma, config, report=base),
            )
        ]
        suite += [
            (f"random-{i}", tup)
            for i, tup in enumerate(_random_input_suite(dims, delta, rng, 2))
        ]
        ratios = []
        for label, inputs in suite:
            res = nonlinear_ratio(problem, delta, inputs, config)
            ratios.append(
                {"input": label, **res.to_dict()}
            )
        worst = max(r["value"] for r in ratios)
        rows.append(
            {
                "delta": delta,
                "max_ratio": worst,
                "bound": bound,
                "ok": bool(worst <= bound),
                "ratios": ratios,
            }
        )

    threshold = None
    for i in range(len(rows)):
        if all(r["ok"] for r in rows[i:]):
            threshold = i
            break
    monotone = True
    if threshold is not None:
        tail = [r["max_ratio"] for r in rows[threshold:]]
        monotone = all(
            later <= earlier * (1.0 + config.noise_tol)
            for earlier, later in zip(tail, tail[1:])
        )
    verdict = "PASS" if threshold is not None and monotone else "FAIL"
    return {
        "constant": base.constant,
        "epsilon": problem.epsilon,
        "bound": bound,
        "gamma": config.gamma,
        "rows": rows,
        "threshold_delta": None if threshold is None else rows[threshold]["delta"],
        "monotone_ok": monotone,
        "verdict": verdict,
    }
