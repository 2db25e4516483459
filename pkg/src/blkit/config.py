"""Resolved numerical configuration.

Every tolerance the library uses lives here so that reports can embed the
exact values a result was produced under.  All tolerances are relative to
the natural scale of the quantity they guard unless named ``*_abs``.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Config:
    # linear-algebra tolerances (datum validation, subspaces)
    rank_tol: float = 1e-9
    proj_tol: float = 1e-9
    scaling_tol: float = 1e-9
    dedup_tol: float = 1e-9

    # gaussian functional
    sym_tol: float = 1e-10
    det_tol: float = 1e-10

    # exponential-sum optimisation
    distinct_tol: float = 1e-9
    sep_tol: float = 1e-9
    grad_tol: float = 1e-12
    max_newton_iters: int = 200
    subset_budget: int = 14

    # rotation-space optimisation
    expansion_budget: int = 1_000_000
    restarts: int = 8
    pos_tol: float = 1e-12
    opt_tol: float = 1e-6
    agreement_tol: float = 1e-4
    simplex_maxiter: int = 400

    # finiteness pipeline
    lattice_depth: int = 2

    # nonlinear verifier
    max_degree: int = 3
    quad_points: int = 40
    quad_budget: int = 2_000_000
    qmc_samples: int = 1_000_000
    gamma: float = 0.1
    noise_tol: float = 0.05
    estimate_trust: float = 0.1

    # determinism
    seed: int = 20250810
    threads: int = 1

    def replace(self, **kwargs) -> "Config":
        return dataclasses.replace(self, **kwargs)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


DEFAULT_CONFIG = Config()

ENV_VAR = "BLKIT_CONFIG"


def load_config(path: str | None = None, overrides: dict | None = None) -> Config:
    """Resolve a configuration: defaults, then a JSON file, then overrides.

    The file defaults to the one named by the BLKIT_CONFIG environment
    variable when ``path`` is None.
    """
    data: dict = {}
    if path is None:
        path = os.environ.get(ENV_VAR)
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            data.update(json.load(fh))
    if overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})
    base = DEFAULT_CONFIG.to_dict()
    base.update(data)
    return Config.from_dict(base)
