"""Seeded Monte-Carlo experiment suites over the hypergraph matrix ensembles.

Each ``run_*`` function takes an ExperimentConfig, executes ``trials``
independent trials with per-trial seeds derived from the master seed by
splitmix64, and returns an ExperimentRecord holding the config snapshot, one
summary row per trial, aggregate statistics recomputable from those rows, and
raw eigenvalue arrays for persistence.  Trials may run on a thread pool (the
eigensolver releases the GIL); aggregation is a deterministic fold in trial
order, so records are bit-reproducible for a fixed config.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path

import numpy as np

from .combinatorics import (
    DEFAULT_EDGE_BUDGET,
    ModelParams,
    SamplingBudgetError,
    average_degree,
    derive_seed,
    log_binomial,
    sample_hypergraph,
)
from .gham import (
    adjacency_from_hypergraph,
    gham_from_adjacency,
    laplacian,
    laplacian_tilde,
    sample_surrogate,
)
from .laws import (
    FreeConvolutionLaw,
    GaussianLaw,
    Law,
    SemicircleLaw,
    truncated_moments_bernoulli,
    truncated_moments_gaussian,
)
from .metrics import bl_upper_bound, hausdorff_spectra, ks_distance, w1_distance
from .spectra import EmpiricalMeasure, Scaling, symmetric_eigenvalues

__all__ = [
    "EXPERIMENT_KINDS",
    "ExperimentConfig",
    "ExperimentRecord",
    "RegimeError",
    "run_bulk",
    "run_laplacian_bulk",
    "run_edge_bbp",
    "run_edge_regimes",
    "run_laplacian_edge",
    "run_concentration",
    "run_universality",
    "run_experiment",
    "bbp_edge_limit",
    "universality_bound",
    "assumption_diagnostics",
    "edge_limit_pushforward",
    "recompute_aggregates",
    "persist_record",
]

BERNOULLI = "bernoulli_hypergraph"
SURROGATE = "gaussian_surrogate"

EXPERIMENT_KINDS = (
    "bulk",
    "laplacian_bulk",
    "edge_bbp",
    "edge_regimes",
    "laplacian_edge",
    "concentration",
    "universality",
    "diagnostics",
)


class RegimeError(ValueError):
    """An experiment regime's side condition on (n, r) is violated."""


@dataclass
class ExperimentConfig:
    kind: str
    n: int
    r: int
    p: float = 0.5
    trials: int = 10
    master_seed: int = 0
    ensemble: str = SURROGATE
    matrix: str = "gham"  # gham | laplacian | laplacian_tilde
    scaling: Scaling = Scaling.BY_SQRT_N
    k: int = 1
    regime: str | None = None
    tolerance: float | None = None
    pushforward_draws: int = 100_000
    scale_r_with_n: bool = False
    threads: int = 1
    edge_budget: float = DEFAULT_EDGE_BUDGET
    # explicit constants standing in for "<<" and ">>" side conditions
    side_factor_small: float = 0.2
    side_factor_large: float = 5.0

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.ensemble not in (BERNOULLI, SURROGATE):
            raise ValueError(f"unknown ensemble {self.ensemble!r}")
        if self.matrix not in ("gham", "laplacian", "laplacian_tilde"):
            raise ValueError(f"unknown matrix kind {self.matrix!r}")
        if isinstance(self.scaling, str):
            self.scaling = Scaling(self.scaling)
        self.model_params()  # validates (n, r, p)
        if self.ensemble == BERNOULLI:
            params = self.model_params()
            if params.p > 0:
                expected = math.log(params.num_possible_edges) + math.log(params.p)
                if expected > math.log(self.edge_budget):
                    raise SamplingBudgetError(
                        f"config infeasible: expected edge count exceeds budget "
                        f"{self.edge_budget:g}; use ensemble={SURROGATE!r}"
                    )

    def model_params(self) -> ModelParams:
        return ModelParams(n=self.n, r=self.r, p=self.p)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["scaling"] = self.scaling.value
        return out

    def trial_seed(self, index: int) -> int:
        return derive_seed(self.master_seed, index)


@dataclass
class ExperimentRecord:
    """One experiment run: config snapshot, per-trial rows, aggregates.

    ``data`` holds raw arrays (eigenvalues, pushforward draws) that back the
    pooled aggregates; it is persisted as CSV, not inside the JSON.
    """

    config: dict
    trials: list[dict]
    aggregate: dict
    wall_clock_s: float
    artifacts: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "config": self.config,
            "trials": self.trials,
            "aggregate": self.aggregate,
            "wall_clock_s": self.wall_clock_s,
            "artifacts": self.artifacts,
        }


def _map_trials(cfg: ExperimentConfig, worker):
    """Run worker(index, seed) for every trial; results in trial order."""
    seeds = [cfg.trial_seed(i) for i in range(cfg.trials)]
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(worker, range(cfg.trials), seeds))
    return [worker(i, s) for i, s in zip(range(cfg.trials), seeds)]


def _trial_gham(cfg: ExperimentConfig, seed: int):
    """One draw of the normalised adjacency matrix (plus surrogate components
    when applicable)."""
    params = cfg.model_params()
    if cfg.ensemble == SURROGATE:
        comp, h = sample_surrogate(params, seed)
        return h, comp
    hg = sample_hypergraph(params, seed, max_expected_edges=cfg.edge_budget)
    return gham_from_adjacency(adjacency_from_hypergraph(hg), params), None


def _trial_matrix(cfg: ExperimentConfig, seed: int):
    h, comp = _trial_gham(cfg, seed)
    if cfg.matrix == "laplacian":
        return laplacian(h), comp
    if cfg.matrix == "laplacian_tilde":
        return laplacian_tilde(h, cfg.r), comp
    return h, comp


def _pooled_measure(eigs: np.ndarray) -> EmpiricalMeasure:
    # pooling eigenvalues across equal-size trials IS the average of the
    # per-trial empirical CDFs, with no grid discretisation
    return EmpiricalMeasure(atoms=eigs.ravel())


def _row_stats(rows: list[dict], key: str) -> dict:
    values = np.asarray([row[key] for row in rows], dtype=float)
    out = {f"mean_{key}": float(values.mean())}
    if values.size > 1:
        std = float(values.std(ddof=1))
        out[f"std_{key}"] = std
        out[f"stderr_{key}"] = std / math.sqrt(values.size)
    return out


def recompute_aggregates(record: ExperimentRecord) -> dict:
    """Recompute every mean_/std_/stderr_ aggregate from the per-trial rows.

    Returns the recomputed subset; used to verify that stored aggregates are a
    pure fold of the rows.
    """
    out = {}
    rows = record.trials
    for key in record.aggregate:
        for prefix in ("mean_", "std_", "stderr_"):
            if key.startswith(prefix):
                stat_key = key[len(prefix):]
                if rows and stat_key in rows[0]:
                    out.update(
                        {
                            k: v
                            for k, v in _row_stats(rows, stat_key).items()
                            if k == key
                        }
                    )
    return out


def run_bulk(cfg: ExperimentConfig) -> ExperimentRecord:
    """Bulk spectrum experiment: the ESD of n^{-1/2} H against the semicircle
    law with variance (1 - r/n)^2."""
    t0 = time.perf_counter()
    params = cfg.model_params()
    reference = SemicircleLaw((1.0 - params.size_ratio) ** 2)

    def worker(index: int, seed: int):
        h, _ = _trial_gham(cfg, seed)
        sample = symmetric_eigenvalues(
            h, scaling=Scaling.BY_SQRT_N, ensemble=cfg.ensemble, seed=seed
        )
        measure = EmpiricalMeasure(sample.eigenvalues)
        row = {
            "trial": index,
            "seed": seed,
            "ks": ks_distance(measure, reference),
            "w1": w1_distance(measure, reference),
        }
        return row, sample.eigenvalues

    results = _map_trials(cfg, worker)
    rows = [row for row, _ in results]
    eigs = np.stack([lam for _, lam in results])
    pooled = _pooled_measure(eigs)
    aggregate = {
        "reference": reference.descriptor(),
        "mean_esd_ks": ks_distance(pooled, reference),
        "mean_esd_w1": w1_distance(pooled, reference),
        "mean_esd_bl_upper": bl_upper_bound(pooled, reference),
    }
    aggregate.update(_row_stats(rows, "ks"))
    aggregate.update(_row_stats(rows, "w1"))
    if cfg.tolerance is not None:
        aggregate["tolerance"] = cfg.tolerance
        aggregate["passed"] = bool(aggregate["mean_esd_ks"] < cfg.tolerance)
    return ExperimentRecord(
        config=cfg.to_dict(),
        trials=rows,
        aggregate=aggregate,
        wall_clock_s=time.perf_counter() - t0,
        data={"eigenvalues": eigs},
    )


def _laplacian_reference(cfg: ExperimentConfig) -> Law:
    r, c = cfg.r, cfg.r / cfg.n
    key = (cfg.matrix, cfg.scaling, cfg.regime or "fixed_r")
    if key == ("laplacian", Scaling.BY_SQRT_N, "fixed_r"):
        return FreeConvolutionLaw(GaussianLaw(float(r - 1)), SemicircleLaw(1.0))
    if key == ("laplacian_tilde", Scaling.BY_SQRT_N, "fixed_r"):
        return FreeConvolutionLaw(GaussianLaw(1.0 / (r - 1)), SemicircleLaw(1.0))
    if key == ("laplacian", Scaling.BY_SQRT_NR, "proportional"):
        return FreeConvolutionLaw(GaussianLaw(1.0), GaussianLaw(c))
    if key == ("laplacian_tilde", Scaling.BY_SQRT_N, "proportional"):
        return SemicircleLaw((1.0 - c) ** 2)
    raise RegimeError(
        f"no limiting law for matrix={cfg.matrix}, scaling={cfg.scaling.value}, "
        f"regime={cfg.regime}; supported: (laplacian, by_sqrt_n, fixed_r), "
        f"(laplacian_tilde, by_sqrt_n, fixed_r), (laplacian, by_sqrt_nr, "
        f"proportional), (laplacian_tilde, by_sqrt_n, proportional)"
    )


def run_laplacian_bulk(cfg: ExperimentConfig) -> ExperimentRecord:
    """Bulk spectrum of a Laplacian matrix against its limiting law (a free
    additive convolution for fixed r, a semicircle or Gaussian convolution in
    the proportional regime)."""
    t0 = time.perf_counter()
    if cfg.matrix == "gham":
        raise ValueError("laplacian_bulk needs matrix='laplacian' or 'laplacian_tilde'")
    reference = _laplacian_reference(cfg)

    def worker(index: int, seed: int):
        m, _ = _trial_matrix(cfg, seed)
        sample = symmetric_eigenvalues(
            m, scaling=cfg.scaling, r=cfg.r, ensemble=cfg.ensemble, seed=seed
        )
        measure = EmpiricalMeasure(sample.eigenvalues)
        row = {"trial": index, "seed": seed, "ks": ks_distance(measure, reference)}
        return row, sample.eigenvalues

    results = _map_trials(cfg, worker)
    rows = [row for row, _ in results]
    eigs = np.stack([lam for _, lam in results])
    pooled = _pooled_measure(eigs)
    aggregate = {
        "reference": reference.descriptor(),
        "mean_esd_ks": ks_distance(pooled, reference),
        "mean_esd_w1": w1_distance(pooled, reference),
        "mean_esd_bl_upper": bl_upper_bound(pooled, reference),
    }
    aggregate.update(_row_stats(rows, "ks"))
    if cfg.tolerance is not None:
        aggregate["tolerance"] = cfg.tolerance
        aggregate["passed"] = bool(aggregate["mean_esd_ks"] < cfg.tolerance)
    return ExperimentRecord(
        config=cfg.to_dict(),
        trials=rows,
        aggregate=aggregate,
        wall_clock_s=time.perf_counter() - t0,
        data={"eigenvalues": eigs},
    )


def bbp_edge_limit(r: int) -> float:
    """Limit of lambda_1/sqrt(n) for fixed edge size r: 2 up to r = 3, then
    sqrt(r-2) + 1/sqrt(r-2)."""
    if r <= 3:
        return 2.0
    return math.sqrt(r - 2) + 1.0 / math.sqrt(r - 2)


def run_edge_bbp(cfg: ExperimentConfig) -> ExperimentRecord:
    """Extreme eigenvalues of the surrogate at fixed r: lambda_1/sqrt(n) and
    lambda_n/sqrt(n) against the phase-transition limit at r = 3."""
    t0 = time.perf_counter()
    _require_surrogate(cfg)
    target = bbp_edge_limit(cfg.r)

    def worker(index: int, seed: int):
        h, _ = _trial_gham(cfg, seed)
        lam = np.linalg.eigvalsh(h)
        root_n = math.sqrt(cfg.n)
        row = {
            "trial": index,
            "seed": seed,
            "lambda_max_scaled": float(lam[-1]) / root_n,
            "lambda_min_scaled": float(lam[0]) / root_n,
        }
        return row, lam[::-1]

    results = _map_trials(cfg, worker)
    rows = [row for row, _ in results]
    eigs = np.stack([lam for _, lam in results])
    aggregate = {"target": target}
    aggregate.update(_row_stats(rows, "lambda_max_scaled"))
    aggregate.update(_row_stats(rows, "lambda_min_scaled"))
    aggregate["abs_error_max"] = abs(aggregate["mean_lambda_max_scaled"] - target)
    aggregate["abs_error_min"] = abs(aggregate["mean_lambda_min_scaled"] + target)
    if cfg.tolerance is not None:
        aggregate["tolerance"] = cfg.tolerance
        aggregate["passed"] = bool(
            aggregate["abs_error_max"] < cfg.tolerance
            and aggregate["abs_error_min"] < cfg.tolerance
        )
    return ExperimentRecord(
        config=cfg.to_dict(),
        trials=rows,
        aggregate=aggregate,
        wall_clock_s=time.perf_counter() - t0,
        data={"eigenvalues": eigs},
    )


def edge_limit_pushforward(c: float, draws: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Monte-Carlo sample of the proportional-regime edge limits
    (c/2) z +- sqrt((c^2/4) z^2 + c(1-c)) for standard Gaussian z."""
    if not (0.0 < c < 1.0):
        raise ValueError(f"need 0 < c < 1, got c={c}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(draws)
    half = 0.5 * c * z
    disc = np.sqrt(half * half + c * (1.0 - c))
    return half + disc, half - disc


def run_edge_regimes(cfg: ExperimentConfig) -> ExperimentRecord:
    """Extreme-eigenvalue experiments for the surrogate across growth regimes.

    regime='proportional': lambda_1/n is compared in distribution (two-sample
    KS) against a pushforward Monte-Carlo sample of the limit functional of a
    standard Gaussian; per-trial rows also record the scalar Gaussian U that
    generated the trial.
    regime='sqrt_nr': mean lambda_1/sqrt(nr) against 1 (and the minimum
    against -1).
    regime='secondary': the (1+k)-th eigenvalues scaled by sqrt(n) against
    +-2(1 - r/n), with the observed fluctuation scale reported.
    """
    t0 = time.perf_counter()
    _require_surrogate(cfg)
    regime = cfg.regime or "proportional"
    if regime not in ("proportional", "sqrt_nr", "secondary"):
        raise RegimeError(f"unknown edge regime {regime!r}")
    n, r, k = cfg.n, cfg.r, cfg.k
    c = r / n

    def worker(index: int, seed: int):
        h, comp = _trial_gham(cfg, seed)
        lam = np.linalg.eigvalsh(h)[::-1]  # descending
        row = {"trial": index, "seed": seed, "U": comp.U}
        if regime == "proportional":
            row["lambda_max_over_n"] = float(lam[0]) / n
            row["lambda_min_over_n"] = float(lam[-1]) / n
        elif regime == "sqrt_nr":
            row["lambda_max_scaled"] = float(lam[0]) / math.sqrt(n * r)
            row["lambda_min_scaled"] = float(lam[-1]) / math.sqrt(n * r)
        else:
            row["lambda_sub_max_scaled"] = float(lam[k]) / math.sqrt(n)
            row["lambda_sub_min_scaled"] = float(lam[n - 1 - k]) / math.sqrt(n)
        return row, lam

    results = _map_trials(cfg, worker)
    rows = [row for row, _ in results]
    eigs = np.stack([lam for _, lam in results])
    aggregate: dict = {"regime": regime}
    data = {"eigenvalues": eigs}
    if regime == "proportional":
        push_seed = cfg.trial_seed(cfg.trials)  # disjoint from trial seeds
        push_max, push_min = edge_limit_pushforward(c, cfg.pushforward_draws, push_seed)
        observed_max = EmpiricalMeasure([row["lambda_max_over_n"] for row in rows])
        observed_min = EmpiricalMeasure([row["lambda_min_over_n"] for row in rows])
        aggregate["ks_lambda_max"] = ks_distance(observed_max, EmpiricalMeasure(push_max))
        aggregate["ks_lambda_min"] = ks_distance(observed_min, EmpiricalMeasure(push_min))
        aggregate.update(_row_stats(rows, "lambda_max_over_n"))
        aggregate.update(_row_stats(rows, "lambda_min_over_n"))
        data["pushforward_max"] = push_max
        data["pushforward_min"] = push_min
        if cfg.tolerance is not None:
            aggregate["tolerance"] = cfg.tolerance
            aggregate["passed"] = bool(aggregate["ks_lambda_max"] < cfg.tolerance)
    elif regime == "sqrt_nr":
        aggregate["target"] = 1.0
        aggregate.update(_row_stats(rows, "lambda_max_scaled"))
        aggregate.update(_row_stats(rows, "lambda_min_scaled"))
        aggregate["abs_error_max"] = abs(aggregate["mean_lambda_max_scaled"] - 1.0)
        aggregate["abs_error_min"] = abs(aggregate["mean_lambda_min_scaled"] + 1.0)
        if cfg.tolerance is not None:
            aggregate["tolerance"] = cfg.tolerance
            aggregate["passed"] = bool(
                aggregate["abs_error_max"] < cfg.tolerance
                and aggregate["abs_error_min"] < cfg.tolerance
            )
    else:
        target = 2.0 * (1.0 - c)
        aggregate["target"] = target
        aggregate["k"] = k
        aggregate.update(_row_stats(rows, "lambda_sub_max_scaled"))
        aggregate.update(_row_stats(rows, "lambda_sub_min_scaled"))
        aggregate["abs_error_max"] = abs(aggregate["mean_lambda_sub_max_scaled"] - target)
        aggregate["abs_error_min"] = abs(aggregate["mean_lambda_sub_min_scaled"] + target)
        if cfg.tolerance is not None:
            aggregate["tolerance"] = cfg.tolerance
            aggregate["passed"] = bool(
                aggregate["abs_error_max"] < cfg.tolerance
                and aggregate["abs_error_min"] < cfg.tolerance
            )
    return ExperimentRecord(
        config=cfg.to_dict(),
        trials=rows,
        aggregate=aggregate,
        wall_clock_s=time.perf_counter() - t0,
        data=data,
    )


_LAPLACIAN_EDGE_REGIMES = ("A", "B_i", "B_ii", "C_i", "C_ii")


def _check_laplacian_edge_regime(cfg: ExperimentConfig) -> None:
    n, r = cfg.n, cfg.r
    small, large = cfg.side_factor_small, cfg.side_factor_large
    if cfg.regime == "B_i" and r > small * math.sqrt(math.log(n)):
        raise RegimeError(
            f"regime B_i requires r << sqrt(log n): need r <= "
            f"{small * math.sqrt(math.log(n)):.3g}, got r={r}"
        )
    if cfg.regime == "C_i" and r > small * math.sqrt(n):
        raise RegimeError(
            f"regime C_i requires r << sqrt(n): need r <= {small * math.sqrt(n):.3g}, "
            f"got r={r}"
        )
    if cfg.regime == "C_ii" and r < large * math.sqrt(n * math.log(n)):
        raise RegimeError(
            f"regime C_ii requires r >> sqrt(n log n): need r >= "
            f"{large * math.sqrt(n * math.log(n)):.3g}, got r={r}"
        )


def run_laplacian_edge(cfg: ExperimentConfig) -> ExperimentRecord:
    """Extreme eigenvalues of the Laplacian matrices of the surrogate.

    Regimes (selected by cfg.regime, side conditions validated with explicit
    constants):
      A    -- lambda_k(L) / (n sqrt(2 log n)), centering sqrt(c(1-c))
      B_i  -- (r-1) lambda_1(Ltilde) / (n sqrt(2 log n)), same centering;
              requires r << sqrt(log n)
      B_ii -- lambda_1(Ltilde)/n against the proportional-regime pushforward
      C_i  -- (r-1) lambda_{1+k}(Ltilde) / (n sqrt(2 log n)), same centering;
              requires r << sqrt(n)
      C_ii -- lambda_{1+k}(Ltilde) / sqrt(n), centering 2(1 - c);
              requires r >> sqrt(n log n)
    """
    t0 = time.perf_counter()
    _require_surrogate(cfg)
    if cfg.regime not in _LAPLACIAN_EDGE_REGIMES:
        raise RegimeError(
            f"laplacian_edge regime must be one of {_LAPLACIAN_EDGE_REGIMES}, "
            f"got {cfg.regime!r}"
        )
    _check_laplacian_edge_regime(cfg)
    n, r, k = cfg.n, cfg.r, cfg.k
    c = r / n
    root_2log = math.sqrt(2.0 * math.log(n))
    use_tilde = cfg.regime != "A"

    def worker(index: int, seed: int):
        h, comp = _trial_gham(cfg, seed)
        m = laplacian_tilde(h, r) if use_tilde else laplacian(h)
        lam = np.linalg.eigvalsh(m)[::-1]
        row = {"trial": index, "seed": seed, "U": comp.U}
        if cfg.regime == "A":
            row["stat_max"] = float(lam[k - 1]) / (n * root_2log)
            row["stat_min"] = float(lam[n - k]) / (n * root_2log)
        elif cfg.regime == "B_i":
            row["stat_max"] = (r - 1) * float(lam[0]) / (n * root_2log)
            row["stat_min"] = (r - 1) * float(lam[-1]) / (n * root_2log)
        elif cfg.regime == "B_ii":
            row["stat_max"] = float(lam[0]) / n
            row["stat_min"] = float(lam[-1]) / n
        elif cfg.regime == "C_i":
            row["stat_max"] = (r - 1) * float(lam[k]) / (n * root_2log)
            row["stat_min"] = (r - 1) * float(lam[n - 1 - k]) / (n * root_2log)
        else:  # C_ii
            row["stat_max"] = float(lam[k]) / math.sqrt(n)
            row["stat_min"] = float(lam[n - 1 - k]) / math.sqrt(n)
        return row, lam

    results = _map_trials(cfg, worker)
    rows = [row for row, _ in results]
    eigs = np.stack([lam for _, lam in results])
    aggregate: dict = {"regime": cfg.regime}
    data = {"eigenvalues": eigs}
    aggregate.update(_row_stats(rows, "stat_max"))
    aggregate.update(_row_stats(rows, "stat_min"))
    if cfg.regime == "B_ii":
        push_seed = cfg.trial_seed(cfg.trials)
        push_max, push_min = edge_limit_pushforward(c, cfg.pushforward_draws, push_seed)
        aggregate["ks_stat_max"] = ks_distance(
            EmpiricalMeasure([row["stat_max"] for row in rows]), EmpiricalMeasure(push_max)
        )
        aggregate["ks_stat_min"] = ks_distance(
            EmpiricalMeasure([row["stat_min"] for row in rows]), EmpiricalMeasure(push_min)
        )
        aggregate["note"] = (
            "reference pushforward uses (c/2) z + sqrt((c^2/4) z^2 + c(1-c)), the "
            "same functional as the adjacency edge limit (z^2 under the radical)"
        )
        data["pushforward_max"] = push_max
        data["pushforward_min"] = push_min
        if cfg.tolerance is not None:
            aggregate["tolerance"] = cfg.tolerance
            aggregate["passed"] = bool(aggregate["ks_stat_max"] < cfg.tolerance)
    else:
        target = 2.0 * (1.0 - c) if cfg.regime == "C_ii" else math.sqrt(c * (1.0 - c))
        aggregate["target"] = target
        aggregate["abs_error_max"] = abs(aggregate["mean_stat_max"] - target)
        aggregate["abs_error_min"] = abs(aggregate["mean_stat_min"] + target)
        if cfg.tolerance is not None:
            aggregate["tolerance"] = cfg.tolerance
            aggregate["passed"] = bool(
                aggregate["abs_error_max"] < cfg.tolerance
                and aggregate["abs_error_min"] < cfg.tolerance
            )
    return ExperimentRecord(
        config=cfg.to_dict(),
        trials=rows,
        aggregate=aggregate,
        wall_clock_s=time.perf_counter() - t0,
        data=data,
    )


def run_concentration(cfg: ExperimentConfig) -> ExperimentRecord:
    """Fluctuation-scaling experiment: the per-trial KS distance between each
    ESD and the pooled mean ESD is collected at sizes n and 2n, and the ratio
    of sample standard deviations reported (about 1/2 at fixed r if the
    fluctuation scale is 1/n)."""
    t0 = time.perf_counter()
    sizes = [(cfg.n, cfg.r), (2 * cfg.n, 2 * cfg.r if cfg.scale_r_with_n else cfg.r)]
    rows: list[dict] = []
    stds: list[float | None] = []
    all_eigs: dict[str, np.ndarray] = {}
    for which, (n_size, r_size) in enumerate(sizes):
        sub = ExperimentConfig(
            kind="bulk",
            n=n_size,
            r=r_size,
            p=cfg.p,
            trials=cfg.trials,
            master_seed=derive_seed(cfg.master_seed, which),
            ensemble=cfg.ensemble,
            threads=cfg.threads,
            edge_budget=cfg.edge_budget,
        )

        def worker(index: int, seed: int):
            h, _ = _trial_gham(sub, seed)
            lam = np.linalg.eigvalsh(h)[::-1] / math.sqrt(n_size)
            return lam

        eigs = np.stack(_map_trials(sub, worker))
        pooled = _pooled_measure(eigs)
        ks_values = [ks_distance(EmpiricalMeasure(lam), pooled) for lam in eigs]
        for i, ks in enumerate(ks_values):
            rows.append(
                {"trial": i, "seed": sub.trial_seed(i), "n": n_size, "r": r_size, "ks": ks}
            )
        stds.append(
            float(np.std(ks_values, ddof=1)) if len(ks_values) > 1 else None
        )
        all_eigs[f"eigenvalues_n{n_size}"] = eigs
    aggregate = {
        "std_small": stds[0],
        "std_large": stds[1],
        "ratio": (None if None in stds or stds[0] == 0 else stds[1] / stds[0]),
        "sizes": [list(s) for s in sizes],
    }
    if cfg.tolerance is not None and aggregate["ratio"] is not None:
        aggregate["tolerance"] = cfg.tolerance
        aggregate["passed"] = bool(aggregate["ratio"] < cfg.tolerance)
    return ExperimentRecord(
        config=cfg.to_dict(),
        trials=rows,
        aggregate=aggregate,
        wall_clock_s=time.perf_counter() - t0,
        data=all_eigs,
    )


def run_universality(cfg: ExperimentConfig) -> ExperimentRecord:
    """Bernoulli hypergraph vs Gaussian surrogate at matched (n, r): both mean
    ESDs against the semicircle reference, and the scaled Hausdorff distance
    between paired sorted spectra as a sanity statistic."""
    t0 = time.perf_counter()
    params = cfg.model_params()
    reference = SemicircleLaw((1.0 - params.size_ratio) ** 2)

    def worker(index: int, seed: int):
        hg = sample_hypergraph(params, seed, max_expected_edges=cfg.edge_budget)
        h_bern = gham_from_adjacency(adjacency_from_hypergraph(hg), params)
        lam_bern = np.linalg.eigvalsh(h_bern)[::-1] / math.sqrt(cfg.n)
        # independent surrogate stream, offset past the Bernoulli seeds
        _, h_gauss = sample_surrogate(params, cfg.trial_seed(cfg.trials + index))
        lam_gauss = np.linalg.eigvalsh(h_gauss)[::-1] / math.sqrt(cfg.n)
        row = {
            "trial": index,
            "seed": seed,
            "ks_bernoulli": ks_distance(EmpiricalMeasure(lam_bern), reference),
            "ks_gaussian": ks_distance(EmpiricalMeasure(lam_gauss), reference),
            "hausdorff_scaled": hausdorff_spectra(
                lam_bern * math.sqrt(cfg.n), lam_gauss * math.sqrt(cfg.n)
            )
            / math.sqrt(cfg.n),
        }
        return row, lam_bern, lam_gauss

    results = _map_trials(cfg, worker)
    rows = [row for row, _, _ in results]
    eigs_bern = np.stack([a for _, a, _ in results])
    eigs_gauss = np.stack([b for _, _, b in results])
    ks_bern = ks_distance(_pooled_measure(eigs_bern), reference)
    ks_gauss = ks_distance(_pooled_measure(eigs_gauss), reference)
    aggregate = {
        "reference": reference.descriptor(),
        "mean_esd_ks_bernoulli": ks_bern,
        "mean_esd_ks_gaussian": ks_gauss,
        "ks_difference": abs(ks_bern - ks_gauss),
    }
    aggregate.update(_row_stats(rows, "hausdorff_scaled"))
    if cfg.tolerance is not None:
        aggregate["tolerance"] = cfg.tolerance
        aggregate["passed"] = bool(aggregate["ks_difference"] < cfg.tolerance)
    return ExperimentRecord(
        config=cfg.to_dict(),
        trials=rows,
        aggregate=aggregate,
        wall_clock_s=time.perf_counter() - t0,
        data={"eigenvalues_bernoulli": eigs_bern, "eigenvalues_gaussian": eigs_gauss},
    )


def universality_bound(
    params: ModelParams, z: complex, threshold: float, entry_kind: str = "bernoulli"
) -> float:
    """Numeric resolvent-comparison bound between the given entry distribution
    and Gaussian entries, at spectral parameter z = u + iv:

        4 max(v^-3, v^-4) r^2 (r-1)^2 M / (n^2 N) * [tail second moments]
      + 12 max(v^-6, v^-9/2, v^-4) r^3 (r-1)^3 M / (n^{5/2} N^{3/2})
                                                 * [truncated third moments],

    where the moment brackets sum the entry law's and the Gaussian's truncated
    moments at the given threshold (M identical summands collapse to a single
    factor M).  M/N = n(n-1)/(r(r-1)) exactly, which keeps the evaluation
    finite even when the binomials are astronomical.
    """
    v = complex(z).imag
    if v <= 0:
        raise ValueError(f"need Im z > 0, got z={z}")
    if threshold <= 0:
        raise ValueError(f"need threshold > 0, got {threshold}")
    if entry_kind == "bernoulli":
        m2_y, m3_y = truncated_moments_bernoulli(params.p, threshold)
    elif entry_kind == "gaussian":
        m2_y, m3_y = truncated_moments_gaussian(threshold)
    else:
        raise ValueError(f"unknown entry kind {entry_kind!r}")
    m2_z, m3_z = truncated_moments_gaussian(threshold)
    n, r = params.n, params.r
    # M/(n^2 N) = (n-1)/(n r (r-1)); M/(n^{5/2} N^{3/2}) adds a factor N^{-1/2}/sqrt(n)
    ratio1 = (n - 1) / (n * r * (r - 1))
    ratio2 = ratio1 * math.exp(-0.5 * log_binomial(n - 2, r - 2)) / math.sqrt(n)
    term1 = 4.0 * max(v**-3, v**-4) * (r * (r - 1)) ** 2 * ratio1 * (m2_y + m2_z)
    term2 = (
        12.0
        * max(v**-6, v**-4.5, v**-4)
        * (r * (r - 1)) ** 3
        * ratio2
        * (m3_y + m3_z)
    )
    return term1 + term2


def assumption_diagnostics(params: ModelParams, threshold: float = 1.0) -> dict:
    """Sparsity and tail-condition diagnostics for a model configuration.

    Reports the truncation scales K_n = sqrt(nN)/r^4 and K'_n =
    sqrt(nN)/r^{5/2}, the average degree, and the normalised sparsity ratios
    d_avg/r^7 (adjacency) and d_avg/r^4 (Laplacian) with pass flags against the
    given threshold.  'dense' flags inclusion probabilities >= 1/2.
    """
    n, r = params.n, params.r
    log_nn = math.log(n) + log_binomial(n - 2, r - 2)
    k_n = math.exp(0.5 * log_nn - 4.0 * math.log(r))
    k_n_prime = math.exp(0.5 * log_nn - 2.5 * math.log(r))
    d_avg = average_degree(params)
    ratio_adjacency = d_avg / r**7
    ratio_laplacian = d_avg / r**4
    return {
        "n": n,
        "r": r,
        "p": params.p,
        "k_n": k_n,
        "k_n_prime": k_n_prime,
        "d_avg": d_avg,
        "d_avg_over_r7": ratio_adjacency,
        "d_avg_over_r4": ratio_laplacian,
        "threshold": threshold,
        "adjacency_sparsity_ok": bool(ratio_adjacency >= threshold),
        "laplacian_sparsity_ok": bool(ratio_laplacian >= threshold),
        "dense": bool(params.p >= 0.5),
    }


def _require_surrogate(cfg: ExperimentConfig) -> None:
    if cfg.ensemble != SURROGATE:
        raise ValueError(
            f"{cfg.kind} is defined for the Gaussian surrogate ensemble; "
            f"got ensemble={cfg.ensemble!r}"
        )


_RUNNERS = {
    "bulk": run_bulk,
    "laplacian_bulk": run_laplacian_bulk,
    "edge_bbp": run_edge_bbp,
    "edge_regimes": run_edge_regimes,
    "laplacian_edge": run_laplacian_edge,
    "concentration": run_concentration,
    "universality": run_universality,
}


def run_experiment(cfg: ExperimentConfig) -> ExperimentRecord:
    """Dispatch a config to its runner (diagnostics excepted, which has no
    Monte-Carlo loop and returns a record directly)."""
    if cfg.kind == "diagnostics":
        t0 = time.perf_counter()
        report = assumption_diagnostics(cfg.model_params())
        return ExperimentRecord(
            config=cfg.to_dict(),
            trials=[],
            aggregate=report,
            wall_clock_s=time.perf_counter() - t0,
        )
    return _RUNNERS[cfg.kind](cfg)


def persist_record(
    record: ExperimentRecord, out_dir: str | Path, timestamp: str | None = None
) -> Path:
    """Write a record to <out_dir>/runs/<kind>/<timestamp>-<seed>/ as JSON,
    with eigenvalue and pushforward arrays as CSV side files."""
    stamp = timestamp or datetime.now().strftime("%Y%m%dT%H%M%S")
    kind = record.config["kind"]
    seed = record.config["master_seed"]
    run_dir = Path(out_dir) / "runs" / kind / f"{stamp}-{seed}"
    run_dir.mkdir(parents=True, exist_ok=True)
    for name, array in record.data.items():
        path = run_dir / f"{name}.csv"
        arr = np.asarray(array)
        if arr.ndim == 1:
            np.savetxt(path, arr, delimiter=",", header="value")
        else:
            trial_idx = np.repeat(np.arange(arr.shape[0]), arr.shape[1])
            flat = np.column_stack([trial_idx, np.tile(np.arange(arr.shape[1]), arr.shape[0]), arr.ravel()])
            np.savetxt(path, flat, delimiter=",", header="trial,index,value")
        record.artifacts[name] = str(path)
    (run_dir / "record.json").write_text(json.dumps(record.to_json_dict(), indent=2))
    return run_dir
