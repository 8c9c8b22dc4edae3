"""
Tests for the verification suite.
"""

import pytest

from src.config import ExperimentConfig
from src.experiments import CHECKS, VerifyExperiment, run_verification
from src.experiments.verify import (
    REDUCTION_Z,
    check_endpoint_frequencies,
    check_score_capg_gradient,
    check_tail_score_identities,
)
from src.policy import gaussian
from src.utils import derive_rng

EXACT_CHECKS = [
    "score_pg_finite_difference",
    "score_capg_finite_difference_interior",
    "score_capg_finite_difference_lower",
    "score_capg_finite_difference_upper",
    "score_capg_finite_difference_mixed",
    "capg_equals_pg_interior",
    "log_cdf_derivative_is_mills_ratio",
    "log_cdf_log_sf_complement",
    "log_cdf_log_sf_symmetry",
    "clipped_distribution_normalization",
]


@pytest.fixture
def flipped_upper_tail(mocker):
    """Sign error in the upper-tail branch of the clipped-action score"""
    original = gaussian._upper_tail_grad

    def flipped(z_beta, std):
        d_bias, d_log_std = original(z_beta, std)
        return -d_bias, -d_log_std

    mocker.patch.object(gaussian, "_upper_tail_grad", side_effect=flipped)


class TestVerification:
    """Tests for run_verification at small sample sizes"""

    def test_exact_checks_pass(self, small_config):
        rows = run_verification(small_config(experiment="verify"))
        by_name = {row.check: row for row in rows}
        assert len(by_name) == len(rows)
        for name in EXACT_CHECKS:
            assert by_name[name].ok, by_name[name]

    def test_row_names(self, small_config):
        names = [row.check for row in run_verification(small_config(experiment="verify"))]
        assert "unbiased_d1_mu0.0_sigma1.0" in names
        assert "variance_reduction_d3_mu0.0-0.5-1.0_sigma1.0_dim2" in names
        assert "tail_score_identity_upper" in names
        assert "decomposed_unbiased" in names
        assert "endpoint_frequency_lower" in names
        assert "endpoint_mass_over_interior_bin" in names

    def test_every_check_contributes(self, small_config):
        cfg = small_config(experiment="verify")
        for index, check in enumerate(CHECKS):
            rows = check(cfg, derive_rng(cfg.master_seed, 0, "verify", index))
            assert rows, check.__name__

    def test_report_byte_identical(self, small_config, tmp_path):
        experiment = VerifyExperiment()
        a = experiment.execute(small_config(experiment="verify", output_path=str(tmp_path / "a.csv")))
        b = experiment.execute(small_config(experiment="verify", output_path=str(tmp_path / "b.csv"), workers=4))
        assert a.output_path.read_bytes() == b.output_path.read_bytes()
        assert a.output_path.read_text().startswith("check,statistic,threshold,passed\n")

    def test_endpoint_frequencies(self, small_config):
        rows = check_endpoint_frequencies(small_config(mc_samples=1_000_000), derive_rng(0, 0, "verify", 99))
        # wider band than the suite's, to keep this test stable
        assert all(row.statistic < 4.0 for row in rows)

    def test_tail_variance_gap_is_strict(self, small_config):
        rows = check_tail_score_identities(small_config(mc_samples=1_000_000), derive_rng(0, 0, "verify", 98))
        gaps = [row for row in rows if row.check.startswith("tail_score_variance_")]
        assert len(gaps) == 2
        for row in gaps:
            assert row.threshold == REDUCTION_Z > 1.0
            assert row.ok, row

    def test_tail_variance_gap_needs_enough_samples(self, small_config):
        rows = check_tail_score_identities(small_config(mc_samples=2), derive_rng(0, 0, "verify", 98))
        gaps = [row for row in rows if row.check.startswith("tail_score_variance_")]
        assert not any(row.ok for row in gaps)


class TestMutationDetection:
    """A corrupted score must fail verification"""

    def test_score_check_catches_sign_error(self, small_config, flipped_upper_tail):
        rows = check_score_capg_gradient(small_config(), derive_rng(0, 0, "verify", 1))
        by_name = {row.check: row for row in rows}
        assert not by_name["score_capg_finite_difference_upper"].ok
        assert by_name["score_capg_finite_difference_interior"].ok

    def test_suite_fails(self, small_config, flipped_upper_tail):
        result = VerifyExperiment().execute(small_config(experiment="verify"))
        assert result.exit_code == 1
        assert not result.success
        assert "score_capg_finite_difference_upper" in result.text


@pytest.mark.slow
class TestFullVerification:
    """The default-size suite passes on a correct implementation"""

    def test_default_suite_passes(self, tmp_path):
        cfg = ExperimentConfig(experiment="verify", output_path=str(tmp_path / "verify.csv"), workers=4)
        result = VerifyExperiment().execute(cfg)
        assert result.exit_code == 0, result.text
