"""Missingness-scenario simulators and the replication study harness.

Three mechanisms remove observations from a simulated series of
``n_blocks * block_size`` i.i.d. draws:

- Scenario I: a fixed count of blocks is selected uniformly; inside a
  selected block each observation goes missing independently (MCAR).
- Scenario II: the missingness probability is a linear ramp in the
  global time index with mean ``apm``, by default decreasing (MAR).
- Scenario III: inside each selected block the largest ``c`` values are
  removed, ``c ~ Binomial(block_size, pm)`` conditioned on ``c >= 1``
  (MNAR: exactly the extremes vanish).

The study harness replicates generate/mask/extract/fit until the
requested number of replications converged for every method, discarding
joint failures, and reports per-method return-level means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .estimators import METHODS, FitError, fit
from .formatting import fmt6
from .weights import BlockRecord, CensorStatus

__all__ = [
    "DISTS",
    "SCENARIOS",
    "StudyError",
    "ScenarioConfig",
    "SimSeries",
    "StudyRow",
    "SplitMaxBoundsReport",
    "gen_series",
    "apply_missingness",
    "extract_blocks",
    "true_return_level",
    "run_study",
    "study_rows_to_csv",
    "split_max_bounds_check",
]

DISTS = ("t5", "exp1", "beta25")
SCENARIOS = ("I", "II", "III")


class StudyError(RuntimeError):
    """Replication budget exhausted before enough converged fits."""


@dataclass(frozen=True)
class ScenarioConfig:
    """One cell of the simulation design.

    Exactly the rate fields relevant to the scenario must be set: pbm
    and pm for scenarios I and III, apm (and optionally direction) for
    scenario II.
    """

    scenario: str
    n_blocks: int
    block_size: int
    dist: str
    seed: int = 0
    pbm: float | None = None
    pm: float | None = None
    apm: float | None = None
    direction: str = "decreasing"

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.dist not in DISTS:
            raise ValueError(f"dist must be one of {DISTS}, got {self.dist!r}")
        if self.n_blocks <= 0 or self.block_size <= 0:
            raise ValueError("n_blocks and block_size must be positive")
        if self.direction not in ("decreasing", "increasing"):
            raise ValueError("direction must be 'decreasing' or 'increasing'")
        if self.scenario in ("I", "III"):
            if self.pbm is None or self.pm is None:
                raise ValueError(f"scenario {self.scenario} requires pbm and pm")
            if self.apm is not None:
                raise ValueError(f"scenario {self.scenario} does not take apm")
            if not (0.0 <= self.pbm < 1.0) or not (0.0 <= self.pm < 1.0):
                raise ValueError("pbm and pm must lie in [0, 1)")
            if self.scenario == "III" and self.pm == 0.0 and self.pbm > 0.0:
                raise ValueError("scenario III needs pm > 0 to draw at least one deletion")
        else:
            if self.apm is None:
                raise ValueError("scenario II requires apm")
            if self.pbm is not None or self.pm is not None:
                raise ValueError("scenario II does not take pbm or pm")
            if not (0.0 <= self.apm < 1.0):
                raise ValueError("apm must lie in [0, 1)")


@dataclass(frozen=True)
class SimSeries:
    """A simulated series with its missingness mask and ground truth."""

    values: np.ndarray
    missing_mask: np.ndarray
    true_block_maxima: np.ndarray
    true_delta: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != self.missing_mask.shape:
            raise ValueError("mask length must equal series length")


def gen_series(dist: str, count: int, seed) -> np.ndarray:
    """Draw ``count`` i.i.d. values; deterministic given the seed."""
    if count <= 0:
        raise ValueError("count must be positive")
    rng = np.random.default_rng(seed)
    if dist == "t5":
        return rng.standard_t(5, size=count)
    if dist == "exp1":
        return rng.exponential(1.0, size=count)
    if dist == "beta25":
        return rng.beta(2.0, 5.0, size=count)
    raise ValueError(f"dist must be one of {DISTS}, got {dist!r}")


def _ramp_probability(cfg: ScenarioConfig, n_total: int) -> np.ndarray:
    t = np.arange(n_total, dtype=float)
    if cfg.direction == "decreasing":
        p = 2.0 * cfg.apm * (1.0 - t / n_total)
    else:
        # mirror image of the decreasing ramp over the time axis
        p = 2.0 * cfg.apm * (1.0 - (n_total - 1.0 - t) / n_total)
    return np.clip(p, 0.0, 1.0)


def apply_missingness(values, cfg: ScenarioConfig, rng=None) -> SimSeries:
    """Apply the configured missingness mechanism to a full series."""
    vals = np.ascontiguousarray(values, dtype=float)
    k, n = cfg.n_blocks, cfg.block_size
    if vals.size != k * n:
        raise ValueError(f"series length {vals.size} != n_blocks*block_size = {k * n}")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)

    mask = np.zeros(vals.size, dtype=bool)
    if cfg.scenario == "II":
        mask = rng.random(vals.size) < _ramp_probability(cfg, vals.size)
    else:
        # tiny slack so binary rounding of pbm*k cannot bump the ceiling
        n_sel = math.ceil(cfg.pbm * k - 1e-9)
        selected = np.sort(rng.choice(k, size=n_sel, replace=False))
        if cfg.scenario == "I":
            draws = rng.random((n_sel, n))
            for row, j in enumerate(selected):
                mask[j * n : (j + 1) * n] = draws[row] < cfg.pm
        else:
            for j in selected:
                c = 0
                while c == 0:
                    c = int(rng.binomial(n, cfg.pm))
                block = vals[j * n : (j + 1) * n]
                top = np.argsort(block)[n - c :]
                mask[j * n + top] = True

    by_block = vals.reshape(k, n)
    true_max = by_block.max(axis=1)
    obs = np.where(mask, -np.inf, vals).reshape(k, n)
    obs_max = obs.max(axis=1)
    true_delta = obs_max == true_max
    return SimSeries(
        values=vals,
        missing_mask=mask,
        true_block_maxima=true_max,
        true_delta=true_delta,
    )


def extract_blocks(s: SimSeries, block_size: int, use_true_delta: bool = False):
    """Cut a simulated series into BlockRecords.

    Default labeling marks any block containing missing values as
    status-unknown; ``use_true_delta`` instead attaches the generator's
    ground-truth censoring indicator (for hard-censoring runs where the
    indicator is treated as known).
    """
    n_total = s.values.size
    if n_total % block_size != 0:
        raise ValueError(f"series length {n_total} not divisible by block size {block_size}")
    k = n_total // block_size
    records = []
    for j in range(k):
        sl = slice(j * block_size, (j + 1) * block_size)
        block = s.values[sl]
        masked = s.missing_mask[sl]
        n_miss = int(masked.sum())
        n_obs = block_size - n_miss
        if n_obs == 0:
            records.append(BlockRecord(max=None, n_obs=0, n_miss=n_miss))
            continue
        m = float(block[~masked].max())
        if n_miss == 0:
            status = CensorStatus.COMPLETE
        elif use_true_delta:
            status = CensorStatus.COMPLETE if s.true_delta[j] else CensorStatus.CENSORED
        else:
            status = CensorStatus.UNKNOWN
        records.append(BlockRecord(max=m, n_obs=n_obs, n_miss=n_miss, status=status))
    return records


def true_return_level(dist: str, block_size: int, period: float) -> float:
    """Level z with F(z)^block_size = 1 - 1/period for the base
    distribution F, by quantile inversion."""
    if period <= 1:
        raise ValueError("period must exceed 1")
    p = (1.0 - 1.0 / period) ** (1.0 / block_size)
    if dist == "exp1":
        return float(-np.log1p(-p))
    if dist == "t5":
        return float(stats.t.ppf(p, df=5))
    if dist == "beta25":
        return float(stats.beta.ppf(p, 2.0, 5.0))
    raise ValueError(f"dist must be one of {DISTS}, got {dist!r}")


@dataclass(frozen=True)
class StudyRow:
    """One study-table line: a scenario cell and method with the mean and
    standard deviation of estimated return levels across replications."""

    scenario: str
    dist: str
    n_blocks: int
    block_size: int
    pbm: float | None
    pm: float | None
    apm: float | None
    method: str
    mean_rl: float
    sd_rl: float
    reps: int
    failures: int


STUDY_CSV_HEADER = "scenario,dist,n_blocks,block_size,pbm,pm,apm,method,mean_rl,sd_rl,reps,failures"


def study_rows_to_csv(rows) -> str:
    lines = [STUDY_CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [
                    r.scenario,
                    r.dist,
                    str(r.n_blocks),
                    str(r.block_size),
                    fmt6(r.pbm),
                    fmt6(r.pm),
                    fmt6(r.apm),
                    r.method,
                    fmt6(r.mean_rl),
                    fmt6(r.sd_rl),
                    str(r.reps),
                    str(r.failures),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _attempt_rngs(cfg_seed: int, attempt: int):
    # stated per-replication hash: SeedSequence over (config seed, attempt
    # index), split into independent generator and mask streams, so
    # replications can run in any order with identical results
    ss = np.random.SeedSequence(entropy=(int(cfg_seed), int(attempt)))
    gen_ss, mask_ss = ss.spawn(2)
    return gen_ss, np.random.default_rng(mask_ss)


def run_study(
    grid,
    methods,
    reps: int,
    target_period: float = 50.0,
    use_true_delta: bool = False,
):
    """Replicate each grid cell until ``reps`` replications converged for
    every method, discarding joint failures, and summarize return levels.

    Deterministic given the per-config seeds. Raises StudyError when a
    cell needs more than ``50*reps`` attempts.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    methods = [str(m).lower() for m in methods]
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; expected one of {METHODS}")
    rows = []
    for cfg in grid:
        values_rl: dict[str, list[float]] = {m: [] for m in methods}
        failures = {m: 0 for m in methods}
        successes = 0
        attempts = 0
        max_attempts = 50 * reps
        while successes < reps:
            if attempts >= max_attempts:
                raise StudyError(
                    f"more than {max_attempts} attempts without {reps} converged "
                    f"replications for config {cfg}"
                )
            gen_ss, mask_rng = _attempt_rngs(cfg.seed, attempts)
            attempts += 1
            values = gen_series(cfg.dist, cfg.n_blocks * cfg.block_size, gen_ss)
            sim = apply_missingness(values, cfg, rng=mask_rng)
            records = extract_blocks(sim, cfg.block_size)
            records_hard = (
                extract_blocks(sim, cfg.block_size, use_true_delta=True)
                if use_true_delta
                else records
            )
            pool = values[~sim.missing_mask]
            attempt_rl: dict[str, float] = {}
            ok = True
            for m in methods:
                blocks = records_hard if m == "hard" else records
                try:
                    res = fit(m, blocks, series_pool=pool)
                except (FitError, ValueError):
                    res = None
                if res is None or not res.converged:
                    failures[m] += 1
                    ok = False
                else:
                    attempt_rl[m] = float(res.params.return_level(target_period))
            if ok:
                successes += 1
                for m in methods:
                    values_rl[m].append(attempt_rl[m])
        for m in methods:
            arr = np.array(values_rl[m])
            rows.append(
                StudyRow(
                    scenario=cfg.scenario,
                    dist=cfg.dist,
                    n_blocks=cfg.n_blocks,
                    block_size=cfg.block_size,
                    pbm=cfg.pbm,
                    pm=cfg.pm,
                    apm=cfg.apm,
                    method=m,
                    mean_rl=float(arr.mean()),
                    sd_rl=float(arr.std(ddof=1)) if arr.size > 1 else 0.0,
                    reps=reps,
                    failures=failures[m],
                )
            )
    return rows


@dataclass(frozen=True)
class SplitMaxBoundsReport:
    """Monte Carlo check of the mean/variance bounds relating observed,
    missing, and complete-data maxima of non-negative samples."""

    dist: str
    n_obs: int
    n_miss: int
    trials: int
    e_obs: float
    e_miss: float
    e_full: float
    v_obs: float
    v_full: float
    e2_miss: float
    mean_lower_ok: bool
    mean_upper_ok: bool
    var_lower_ok: bool
    var_upper_ok: bool
    passed: bool


def _var_se(x: np.ndarray) -> float:
    # standard error of the sample variance via the fourth central moment
    n = x.size
    m = x.mean()
    c = x - m
    m4 = np.mean(c**4)
    v = np.mean(c**2)
    return math.sqrt(max(m4 - v**2, 0.0) / n)


def split_max_bounds_check(
    dist: str, n_obs: int, n_miss: int, trials: int, seed: int = 0
) -> SplitMaxBoundsReport:
    """Check by simulation that for non-negative i.i.d. samples split into
    an observed part of size n_obs and a missing part of size n_miss:

    (i)  E max_obs <= E max_full <= E max_obs + E max_miss
    (ii) V max_obs - E max_miss (2 E max_obs + E max_miss)
            <= V max_full <= V max_obs + E(max_miss^2)

    each with a conservative 3-standard-error slack.
    """
    if dist not in ("exp1", "beta25"):
        raise ValueError("bounds require a non-negative distribution (exp1 or beta25)")
    if trials < 10_000:
        raise ValueError("trials must be at least 10^4")
    if n_obs <= 0 or n_miss < 0:
        raise ValueError("need n_obs > 0 and n_miss >= 0")

    rng = np.random.default_rng(seed)
    n_tot = n_obs + n_miss
    max_obs = np.empty(trials)
    max_miss = np.empty(trials)
    max_full = np.empty(trials)
    chunk = max(1, min(trials, 20_000))
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        if dist == "exp1":
            draws = rng.exponential(1.0, size=(m, n_tot))
        else:
            draws = rng.beta(2.0, 5.0, size=(m, n_tot))
        max_obs[done : done + m] = draws[:, :n_obs].max(axis=1)
        if n_miss > 0:
            max_miss[done : done + m] = draws[:, n_obs:].max(axis=1)
        max_full[done : done + m] = draws.max(axis=1)
        done += m
    if n_miss == 0:
        max_miss[:] = 0.0

    e_obs = float(max_obs.mean())
    e_miss = float(max_miss.mean())
    e_full = float(max_full.mean())
    e2_miss = float(np.mean(max_miss**2))
    v_obs = float(max_obs.var(ddof=1))
    v_full = float(max_full.var(ddof=1))

    rt = math.sqrt(trials)
    se_eo = float(max_obs.std(ddof=1)) / rt
    se_em = float(max_miss.std(ddof=1)) / rt
    se_ef = float(max_full.std(ddof=1)) / rt
    se_e2m = float(np.std(max_miss**2, ddof=1)) / rt if n_miss > 0 else 0.0
    se_vo = _var_se(max_obs)
    se_vf = _var_se(max_full)

    mean_lower_ok = e_obs <= e_full + 3.0 * (se_eo + se_ef)
    mean_upper_ok = e_full <= e_obs + e_miss + 3.0 * (se_ef + se_eo + se_em)
    # first-order slack for the product term E_miss (2 E_obs + E_miss)
    prod_se = (2.0 * e_obs + 2.0 * e_miss) * se_em + 2.0 * e_miss * se_eo
    var_lower_ok = v_obs - e_miss * (2.0 * e_obs + e_miss) <= v_full + 3.0 * (
        se_vo + se_vf + prod_se
    )
    var_upper_ok = v_full <= v_obs + e2_miss + 3.0 * (se_vf + se_vo + se_e2m)

    return SplitMaxBoundsReport(
        dist=dist,
        n_obs=n_obs,
        n_miss=n_miss,
        trials=trials,
        e_obs=e_obs,
        e_miss=e_miss,
        e_full=e_full,
        v_obs=v_obs,
        v_full=v_full,
        e2_miss=e2_miss,
        mean_lower_ok=mean_lower_ok,
        mean_upper_ok=mean_upper_ok,
        var_lower_ok=var_lower_ok,
        var_upper_ok=var_upper_ok,
        passed=mean_lower_ok and mean_upper_ok and var_lower_ok and var_upper_ok,
    )
