"""
Verification suite.

Each check draws from its own stream, computes one statistic per row and
compares it with a fixed threshold. Monte-Carlo checks stream samples in
chunks through RunningMoments, so mc_samples can be 10^7 in bounded memory.

Thresholds:
- finite-difference scores: relative error <= 1e-6
- Monte-Carlo means: within 4 standard errors
- variance reduction: >= 5 standard errors where a dimension clips with
  probability >= 0.05, otherwise not larger
- endpoint frequencies: within 3 binomial standard errors
"""

import logging
from functools import partial
from typing import Iterator

import numpy as np
from scipy import integrate

from ..config import ExperimentConfig
from ..envs import BanditEnv, bandit_reward, penalty_bandit_reward_parts, penalty_decomposed_batch
from ..estimators import EstimatorKind, decomposed_terms, per_sample_terms
from ..gauss import inv_mills_lower, std_normal_log_cdf, std_normal_log_sf, std_normal_pdf
from ..policy import (
    ActionBounds,
    GaussianPolicyParams,
    clip_probabilities,
    log_prob,
    log_prob_clipped,
    sample_action,
    sample_clipped,
    score_capg,
    score_pg,
)
from ..utils import RunningMoments, derive_rng, finite_difference, relative_error, z_score
from .base import BaseExperiment, CheckResult, ExperimentResult, run_cells

logger = logging.getLogger(__name__)

CHUNK_SIZE = 1_000_000

FD_TOLERANCE = 1e-6
MEAN_Z = 4.0
REDUCTION_Z = 5.0
FREQUENCY_Z = 3.0
NORMALIZATION_TOLERANCE = 1e-9
COMPLEMENT_TOLERANCE = 1e-12
DECOMPOSITION_TOLERANCE = 0.01
CLIP_PROB_FOR_REDUCTION = 0.05

STRATA = ("interior", "lower", "upper", "mixed")

# (d, mean per dimension, sigma)
UNBIASED_CASES = [
    (1, (0.0,), 0.5),
    (1, (0.0,), 1.0),
    (1, (0.0,), 2.0),
    (1, (1.0,), 0.5),
    (1, (1.0,), 1.0),
    (1, (1.0,), 2.0),
    (3, (0.0, 0.5, 1.0), 1.0),
]

# (mean, sigma) on bounds [-1, 1]
NORMALIZATION_CASES = [(0.5, 1.0), (0.0, 2.0), (1.5, 0.3), (-3.0, 0.5), (0.0, 0.05)]

PENALTY_COEF = 0.1


def _chunks(n: int) -> Iterator[int]:
    remaining = n
    while remaining > 0:
        size = min(CHUNK_SIZE, remaining)
        remaining -= size
        yield size


def _bandit_states(n: int) -> np.ndarray:
    return np.zeros((n, 0))


def _random_params(rng: np.random.Generator, d: int, k: int) -> GaussianPolicyParams:
    return GaussianPolicyParams(
        weights=rng.normal(size=(d, k)),
        bias=rng.normal(size=d),
        log_std=np.log(rng.uniform(0.1, 10.0, size=d)),
    )


def _random_config(rng: np.random.Generator) -> tuple[GaussianPolicyParams, np.ndarray]:
    d = int(rng.integers(1, 4))
    k = int(rng.integers(0, 3))
    return _random_params(rng, d, k), rng.normal(size=k)


def check_score_pg_gradient(cfg: ExperimentConfig, rng: np.random.Generator) -> list[CheckResult]:
    """Analytic conventional score vs central differences of log_prob."""
    worst = 0.0
    for _ in range(cfg.fd_configs):
        params, state = _random_config(rng)
        action = sample_action(params, state, rng)
        analytic = score_pg(params, state, action).flatten()
        numeric = finite_difference(
            lambda flat: float(log_prob(params.with_flat(flat), state, action)), params.flatten()
        )
        worst = max(worst, relative_error(analytic, numeric))
    return [CheckResult.evaluate("score_pg_finite_difference", worst, FD_TOLERANCE)]


def check_score_capg_gradient(cfg: ExperimentConfig, rng: np.random.Generator) -> list[CheckResult]:
    """
    Clipped-action score at a pre-clip action vs central differences of the
    clipped log-density at the clipped action, stratified by branch.
    """
    worst = {stratum: 0.0 for stratum in STRATA}
    for i in range(cfg.fd_configs):
        stratum = STRATA[i % len(STRATA)]
        params, state = _random_config(rng)
        d = params.dim
        mean, std = params.mean(state), params.std
        bounds = ActionBounds(
            mean - std * rng.uniform(0.2, 2.5, size=d),
            mean + std * rng.uniform(0.2, 2.5, size=d),
        )

        if stratum == "mixed":
            branch = rng.integers(0, 3, size=d)
        else:
            branch = np.full(d, STRATA.index(stratum))
        inside = bounds.lower + (bounds.upper - bounds.lower) * rng.uniform(0.05, 0.95, size=d)
        below = bounds.lower - std * rng.exponential(1.0, size=d)
        above = bounds.upper + std * rng.exponential(1.0, size=d)
        action = np.choose(branch, [inside, below, above])
        clipped = np.clip(action, bounds.lower, bounds.upper)

        analytic = score_capg(params, state, action, bounds).flatten()
        numeric = finite_difference(
            lambda flat: float(log_prob_clipped(params.with_flat(flat), state, clipped, bounds)),
            params.flatten(),
        )
        worst[stratum] = max(worst[stratum], relative_error(analytic, numeric))

    return [
        CheckResult.evaluate(f"score_capg_finite_difference_{stratum}", worst[stratum], FD_TOLERANCE)
        for stratum in STRATA
    ]


def check_interior_agreement(cfg: ExperimentConfig, rng: np.random.Generator) -> list[CheckResult]:
    """With bounds far outside the sampled mass both scores coincide exactly."""
    params = GaussianPolicyParams.state_independent([0.0, 0.5, 1.0], 0.0)
    bounds = ActionBounds.symmetric(3, 50.0)
    n = min(cfg.mc_samples, CHUNK_SIZE)
    states = _bandit_states(n)
    actions = sample_action(params, states, rng)
    difference = np.max(np.abs(
        score_capg(params, states, actions, bounds).flatten() - score_pg(params, states, actions).flatten()
    ))
    return [CheckResult.evaluate("capg_equals_pg_interior", difference, 0.0)]


def check_log_cdf_derivative(cfg: ExperimentConfig, rng: np.random.Generator) -> list[CheckResult]:
    """d/dz log Phi(z) equals the lower inverse Mills ratio."""
    zs = np.array([-5.0, -2.0, -1.0, 0.0, 1.0, 2.0])
    analytic = inv_mills_lower(zs)
    numeric = np.array([
        finite_difference(lambda x: float(std_normal_log_cdf(x[0])), [z])[0] for z in zs
    ])
    worst = np.max(np.abs(analytic - numeric) / np.abs(analytic))
    return [CheckResult.evaluate("log_cdf_derivative_is_mills_ratio", worst, FD_TOLERANCE)]


def check_complement_identity(cfg: ExperimentConfig, rng: np.random.Generator) -> list[CheckResult]:
    """Phi(z) + (1 - Phi(z)) = 1 through the log primitives, and exact symmetry."""
    zs = np.linspace(-37.0, 37.0, 7401)
    log_cdf = std_normal_log_cdf(zs)
    log_sf = std_normal_log_sf(zs)
    complement = np.max(np.abs(np.exp(log_cdf) + np.exp(log_sf) - 1.0))
    symmetry = np.max(np.abs(log_cdf - std_normal_log_sf(-zs)))
    return [
        CheckResult.evaluate("log_cdf_log_sf_complement", complement, COMPLEMENT_TOLERANCE),
        CheckResult.evaluate("log_cdf_log_sf_symmetry", symmetry, 0.0),
    ]


def check_normalization(cfg: ExperimentConfig, rng: np.random.Generator) -> list[CheckResult]:
    """Endpoint atoms plus the integrated interior density sum to one."""
    bounds = ActionBounds.symmetric(1)
    lower, upper = float(bounds.lower[0]), float(bounds.upper[0])
    worst = 0.0
    for mean, sigma in NORMALIZATION_CASES:
        params = GaussianPolicyParams.state_independent(mean, np.log(sigma))
        p_lower, p_upper = clip_probabilities(params, np.zeros(0), bounds)
        points = [mean] if lower < mean < upper else None
        interior, _ = integrate.quad(
            lambda x: std_normal_pdf((x - mean) / sigma) / sigma,
            lower,
            upper,
            points=points,
            epsabs=1e-14,
            epsrel=1e-13,
            limit=200,
        )
        worst = max(worst, abs(p_lower[0] + interior + p_upper[0] - 1.0))
    return [CheckResult.evaluate("clipped_distribution_normalization", worst, NORMALIZATION_TOLERANCE)]


def check_tail_score_identities(cfg: ExperimentConfig, rng: np.random.Generator) -> list[CheckResult]:
    """
    Per tail: the mean of the conventional score restricted to the tail equals
    P(tail) times the tail score, and the tail score term has strictly
    smaller variance than the restricted conventional score. The variance gap
    is the mean of 1{tail} * (score^2 - tail_score^2) and must clear zero by
    REDUCTION_Z standard errors.
    """
    params = GaussianPolicyParams.state_independent(0.5, 0.0)
    bounds = ActionBounds.symmetric(1)
    no_state = np.zeros(0)

    tails = {
        "lower": (lambda u: u[:, 0] <= bounds.lower[0], bounds.lower),
        "upper": (lambda u: u[:, 0] >= bounds.upper[0], bounds.upper),
    }
    p_lower, p_upper = clip_probabilities(params, no_state, bounds)
    probabilities = {"lower": p_lower[0], "upper": p_upper[0]}
    tail_scores = {name: score_capg(params, no_state, edge, bounds).flatten() for name, (_, edge) in tails.items()}

    score_moments = {name: RunningMoments() for name in tails}
    gap_moments = {name: RunningMoments() for name in tails}
    for n in _chunks(cfg.mc_samples):
        states = _bandit_states(n)
        u = sample_action(params, states, rng)
        score = score_pg(params, states, u).flatten()
        for name, (mask, _) in tails.items():
            indicator = mask(u).astype(float)
            score_moments[name].update(indicator[:, None] * score)
            # Var(1 * score) - Var(1 * tail_score) = E[1 * (score^2 - tail_score^2)]
            gap_moments[name].update(indicator[:, None] * (score**2 - tail_scores[name] ** 2))

    rows = []
    for name in tails:
        moments = score_moments[name]
        target = probabilities[name] * tail_scores[name]
        z = np.max(np.abs(moments.mean - target) / moments.std_error())
        rows.append(CheckResult.evaluate(f"tail_score_identity_{name}", z, MEAN_Z))

        gap = gap_moments[name]
        with np.errstate(divide="ignore", invalid="ignore"):
            gap_z = np.min(np.where(gap.std_error() > 0, gap.mean / gap.std_error(), -np.inf))
        rows.append(CheckResult.evaluate(f"tail_score_variance_{name}", gap_z, REDUCTION_Z, at_most=False))
    return rows


class _PairedMoments:
    """Streaming means and variance difference of two paired estimators."""

    def __init__(self):
        self.first = RunningMoments()
        self.second = RunningMoments()
        self.squared_difference = RunningMoments()

    def update(self, first: np.ndarray, second: np.ndarray):
        self.first.update(first)
        self.second.update(second)
        self.squared_difference.update(first * first - second * second)

    def mean_z(self) -> np.ndarray:
        """|mean difference| in combined standard errors, per parameter."""
        return z_score(self.first.mean - self.second.mean, self.first.std_error(), self.second.std_error())

    def reduction_z(self) -> np.ndarray:
        """(var first - var second) in standard errors of the difference, per parameter."""
        reduction = self.first.variance() - self.second.variance()
        se = self.squared_difference.std_error()
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(se > 0, reduction / se, np.where(reduction >= 0, np.inf, -np.inf))


def _case_label(d: int, mean: tuple, sigma: float) -> str:
    return f"d{d}_mu{'-'.join(str(m) for m in mean)}_sigma{sigma}"


def check_variance_reduction(cfg: ExperimentConfig, rng: np.random.Generator) -> list[CheckResult]:
    """
    Single-sample PG and CAPG estimates on the bandit: equal means, and
    CAPG variance no larger per parameter, clearly smaller where clipping
    is common. Vector cases report one variance row per dimension.
    """
    n_samples = max(cfg.mc_samples // 10, 2)
    rows = []
    for d, mean, sigma in UNBIASED_CASES:
        params = GaussianPolicyParams.state_independent(mean, np.log(sigma))
        env = BanditEnv(d)
        bounds = env.bounds
        paired = _PairedMoments()
        for n in _chunks(n_samples):
            states = _bandit_states(n)
            u = sample_action(params, states, rng)
            w = bandit_reward(env, u)
            paired.update(
                per_sample_terms(states, u, w, params, bounds, EstimatorKind.PG),
                per_sample_terms(states, u, w, params, bounds, EstimatorKind.CAPG),
            )

        label = _case_label(d, mean, sigma)
        rows.append(CheckResult.evaluate(f"unbiased_{label}", np.max(paired.mean_z()), MEAN_Z))

        p_lower, p_upper = clip_probabilities(params, np.zeros(0), bounds)
        clip_prob = p_lower + p_upper
        # Flat layout is [bias (d), log_std (d)] for state-free policies.
        per_dim = paired.reduction_z().reshape(2, d)
        for i in range(d):
            threshold = REDUCTION_Z if clip_prob[i] >= CLIP_PROB_FOR_REDUCTION else 0.0
            name = f"variance_reduction_{label}" if d == 1 else f"variance_reduction_{label}_dim{i}"
            rows.append(CheckResult.evaluate(name, np.min(per_dim[:, i]), threshold, at_most=False))
    return rows


def check_variance_decomposition(cfg: ExperimentConfig, rng: np.random.Generator) -> list[CheckResult]:
    """
    Total variance of the PG term equals the sum of its lower / interior /
    upper restricted variances minus twice the pairwise products of their
    means (the restricted terms have disjoint support).
    """
    params = GaussianPolicyParams.state_independent(0.5, 0.0)
    env = BanditEnv(1)
    bounds = env.bounds
    moments = RunningMoments()
    for n in _chunks(max(cfg.mc_samples // 10, 2)):
        states = _bandit_states(n)
        u = sample_action(params, states, rng)
        terms = per_sample_terms(states, u, bandit_reward(env, u), params, bounds, EstimatorKind.PG)
        lower = (u <= bounds.lower)
        upper = (u >= bounds.upper)
        interior = ~(lower | upper)
        moments.update(np.stack([terms, lower * terms, interior * terms, upper * terms], axis=1))

    variances = moments.m2 / moments.count
    means = moments.mean
    total = variances[0]
    parts = means[1:]
    cross = parts[0] * parts[1] + parts[0] * parts[2] + parts[1] * parts[2]
    reconstructed = variances[1:].sum(axis=0) - 2.0 * cross
    discrepancy = np.max(np.abs(reconstructed - total) / total)
    return [CheckResult.evaluate("variance_decomposition", discrepancy, DECOMPOSITION_TOLERANCE)]


def check_decomposed_estimator(cfg: ExperimentConfig, rng: np.random.Generator) -> list[CheckResult]:
    """
    Pre-clip penalty bandit: the decomposed estimator matches PG in mean
    and does not increase variance.
    """
    params = GaussianPolicyParams.state_independent(0.0, 0.0)
    bounds = ActionBounds.symmetric(1)
    paired = _PairedMoments()
    for n in _chunks(cfg.mc_samples):
        states = _bandit_states(n)
        u = sample_action(params, states, rng)
        clip_part, penalty_part = penalty_bandit_reward_parts(u, PENALTY_COEF, bounds)
        batch = penalty_decomposed_batch(states, u, PENALTY_COEF, bounds)
        paired.update(
            per_sample_terms(states, u, clip_part + penalty_part, params, None, EstimatorKind.PG),
            decomposed_terms(
                batch.states, batch.actions, batch.immediate_rewards, batch.continuation_weights, params, bounds
            ),
        )
    return [
        CheckResult.evaluate("decomposed_unbiased", np.max(paired.mean_z()), MEAN_Z),
        CheckResult.evaluate("decomposed_variance", np.min(paired.reduction_z()), 0.0, at_most=False),
    ]


def check_endpoint_frequencies(cfg: ExperimentConfig, rng: np.random.Generator) -> list[CheckResult]:
    """Fraction of clipped draws at each endpoint vs its tail probability."""
    params = GaussianPolicyParams.state_independent(0.0, 0.0)
    bounds = ActionBounds.symmetric(1)
    n_samples = max(cfg.mc_samples // 10, 2)
    at_lower = at_upper = 0
    for n in _chunks(n_samples):
        u = sample_clipped(params, _bandit_states(n), bounds, rng)[:, 0]
        at_lower += int(np.count_nonzero(u == bounds.lower[0]))
        at_upper += int(np.count_nonzero(u == bounds.upper[0]))

    p_lower, p_upper = clip_probabilities(params, np.zeros(0), bounds)
    rows = []
    for name, count, p in (("lower", at_lower, p_lower[0]), ("upper", at_upper, p_upper[0])):
        z = abs(count / n_samples - p) / np.sqrt(p * (1.0 - p) / n_samples)
        rows.append(CheckResult.evaluate(f"endpoint_frequency_{name}", z, FREQUENCY_Z))
    return rows


def check_multimodality(cfg: ExperimentConfig, rng: np.random.Generator) -> list[CheckResult]:
    """A wide policy puts more mass on each endpoint than on any narrow interior bin."""
    params = GaussianPolicyParams.state_independent(0.0, np.log(2.0))
    bounds = ActionBounds.symmetric(1)
    n_samples = max(cfg.mc_samples // 10, 2)
    u = sample_clipped(params, _bandit_states(n_samples), bounds, rng)[:, 0]

    endpoint_mass = min(np.mean(u == -1.0), np.mean(u == 1.0))
    interior = u[(u > -1.0) & (u < 1.0)]
    counts, _ = np.histogram(interior, bins=np.linspace(-1.0, 1.0, 201))
    bin_mass = counts.max() / n_samples
    ratio = endpoint_mass / bin_mass if bin_mass > 0 else np.inf
    return [
        CheckResult.evaluate("endpoint_mass", endpoint_mass, 0.25, at_most=False),
        CheckResult.evaluate("endpoint_mass_over_interior_bin", ratio, 1.0, at_most=False),
    ]


CHECKS = [
    check_score_pg_gradient,
    check_score_capg_gradient,
    check_interior_agreement,
    check_log_cdf_derivative,
    check_complement_identity,
    check_normalization,
    check_tail_score_identities,
    check_variance_reduction,
    check_variance_decomposition,
    check_decomposed_estimator,
    check_endpoint_frequencies,
    check_multimodality,
]


def _run_check(cfg: ExperimentConfig, index: int, check) -> list[CheckResult]:
    rng = derive_rng(cfg.master_seed, cfg.seeds[0], "verify", index)
    return check(cfg, rng)


def run_verification(cfg: ExperimentConfig) -> list[CheckResult]:
    """Run every check; rows are in check order."""
    cells = [
        (check.__name__, partial(_run_check, cfg, index, check))
        for index, check in enumerate(CHECKS)
    ]
    logger.info(f"Verification: {len(cells)} check group(s), {cfg.mc_samples} Monte-Carlo samples")
    results = run_cells("verify", cells, cfg.workers)
    return [row for rows in results for row in rows]


class VerifyExperiment(BaseExperiment):
    """Score exactness and Monte-Carlo property checks"""

    name = "verify"
    aliases = ["check"]
    description = "Finite-difference and Monte-Carlo verification of the estimators"
    row_type = CheckResult

    def run(self, cfg: ExperimentConfig) -> list[CheckResult]:
        return run_verification(cfg)

    def result(self, rows: list, path) -> ExperimentResult:
        failed = [row.check for row in rows if not row.ok]
        if failed:
            return ExperimentResult.failure(
                f"verify: {len(failed)} of {len(rows)} check(s) failed: {', '.join(failed)}", path, len(rows)
            )
        return ExperimentResult.ok(f"verify: all {len(rows)} check(s) passed; report at {path}", path, len(rows))
