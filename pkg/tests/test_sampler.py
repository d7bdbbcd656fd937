import numpy as np
import pytest

from lingmat.gauss import GaussParams, predict_moment
from lingmat.invariants import CATALOG, eval_all
from lingmat.matrix_core import PermutationMap, apply_permutation
from lingmat.sampler import (
    SampleSpec,
    iter_matrices,
    mc_records_csv,
    monte_carlo_check,
    sample,
)

from oracles import close

PARAMS = GaussParams(dim=10, lam=1.6, a=0.8, b=2.4, j0=0.7, js=-0.4)


class TestSampleDeterminism:
    def test_same_spec_identical_output(self):
        spec = SampleSpec(params=PARAMS, count=20, seed=123456789)
        e1 = sample(spec)
        e2 = sample(spec)
        for a, b in zip(e1.members, e2.members):
            np.testing.assert_array_equal(a.values, b.values)

    def test_different_seed_differs(self):
        a = sample(SampleSpec(params=PARAMS, count=1, seed=1)).members[0]
        b = sample(SampleSpec(params=PARAMS, count=1, seed=2)).members[0]
        assert not np.array_equal(a.values, b.values)

    def test_streaming_matches_materialized(self):
        spec = SampleSpec(params=PARAMS, count=5, seed=77)
        streamed = list(iter_matrices(spec))
        ens = sample(spec)
        for s, m in zip(streamed, ens.members):
            np.testing.assert_array_equal(s, m.values)

    def test_seed_validation(self):
        with pytest.raises(ValueError, match="64-bit"):
            SampleSpec(params=PARAMS, count=1, seed=-1)
        with pytest.raises(ValueError, match="count"):
            SampleSpec(params=PARAMS, count=0, seed=0)


class TestSampleStatistics:
    def test_diagonal_mean(self):
        # law of large numbers: 1e5 draws at D = 10
        spec = SampleSpec(params=PARAMS, count=10 ** 5, seed=11)
        vals = np.array([np.diag(m).mean() for m in iter_matrices(spec)])
        stderr = vals.std(ddof=1) / np.sqrt(vals.size)
        assert abs(vals.mean() - PARAMS.mean_diag) < 5 * stderr

    def test_symmetric_limit_decorrelates_transpose_pair(self):
        p = GaussParams(dim=6, lam=1.0, a=1.5, b=1.5, j0=0.0, js=0.2)
        spec = SampleSpec(params=p, count=4000, seed=12)
        xy = np.array([(m[0, 1], m[1, 0]) for m in iter_matrices(spec)])
        x = xy[:, 0] - xy[:, 0].mean()
        y = xy[:, 1] - xy[:, 1].mean()
        cov = (x * y).mean()
        stderr = (x * y).std(ddof=1) / np.sqrt(x.size)
        assert abs(cov) < 5 * stderr

    def test_empirical_wick_fourth_moment(self):
        # connected 4th moment of one Gaussian variable is 3 * var^2
        spec = SampleSpec(params=PARAMS, count=20000, seed=13)
        v = np.array([m[2, 2] for m in iter_matrices(spec)])
        c = v - PARAMS.mean_diag
        quart = c ** 4
        stderr = quart.std(ddof=1) / np.sqrt(quart.size)
        assert abs(quart.mean() - 3.0 * PARAMS.var_diag ** 2) < 5 * stderr

    def test_relabeling_leaves_invariants_unchanged(self):
        rng = np.random.default_rng(14)
        ens = sample(SampleSpec(params=PARAMS, count=5, seed=15))
        sigma = PermutationMap(rng.permutation(PARAMS.dim))
        for m in ens.members:
            before = eval_all(m)
            after = eval_all(apply_permutation(m, sigma))
            for tag in CATALOG:
                assert close(before[tag], after[tag], 1e-9)


class TestMonteCarloCheck:
    def test_moments_within_five_stderr_small_run(self):
        spec = SampleSpec(params=PARAMS, count=3000, seed=16)
        records = monte_carlo_check(spec)
        for tag, rec in records.items():
            assert abs(rec.z_score) < 5, (tag, rec)

    def test_zero_source_triangle_mean_near_zero(self):
        p = GaussParams(dim=8, lam=1.0, a=1.0, b=1.0, j0=0.5, js=0.0)
        rec = monte_carlo_check(SampleSpec(params=p, count=3000, seed=17),
                                tags=("Mo32",))["Mo32"]
        assert rec.theory == 0.0
        assert abs(rec.sample_mean) < 5 * rec.sample_stderr

    def test_harness_detects_shifted_theory(self):
        # shifting the theory by 10 standard errors must push |z| beyond 5
        spec = SampleSpec(params=PARAMS, count=2000, seed=18)
        records = monte_carlo_check(spec)
        for rec in records.values():
            shifted_z = (rec.sample_mean - (rec.theory + 10 * rec.sample_stderr)) \
                / rec.sample_stderr
            assert abs(shifted_z) > 5

    def test_records_are_consistent(self):
        spec = SampleSpec(params=PARAMS, count=500, seed=19)
        records = monte_carlo_check(spec, tags=("Md1", "Mo22"))
        for tag, rec in records.items():
            assert rec.theory == predict_moment(PARAMS, tag)
            assert rec.sample_stderr > 0
            assert rec.z_score == pytest.approx(
                (rec.sample_mean - rec.theory) / rec.sample_stderr)

    def test_csv_rendering(self):
        spec = SampleSpec(params=PARAMS, count=100, seed=20)
        text = mc_records_csv(monte_carlo_check(spec, tags=("Md1",)))
        lines = text.strip().split("\n")
        assert lines[0] == "tag,theory,sample_mean,sample_stderr,z_score"
        assert lines[1].startswith("Md1,")
