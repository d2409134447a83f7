"""
Monte Carlo acceptance runs at the simulation-table geometry.

Every test here is marked slow and deselected by default; run with -m slow.
"""

import time

import pytest

from opdad_system.managers.experiment_manager import (
    bench, evaluate, oracle_compare, pilot_calibration, run_trial, sweep, sweep_trend,
)
from opdad_system.models import DetectorConfig, ExperimentConfig, ScenarioConfig, SweepSpec

pytestmark = pytest.mark.slow


def clean_table_scenario():
    return ScenarioConfig(N=0, n_r=0, window=(1, 100))


class TestTrackerConvergence:

    def test_gap_to_the_batch_direction_shrinks(self):
        start = time.perf_counter()
        table = oracle_compare(ScenarioConfig(M=32), blocks=2000, seeds=range(30), every=100)
        elapsed = time.perf_counter() - start
        final = table[table['block'] == 2000].set_index('seed')['gap']
        early = table[table['block'] == 100].set_index('seed')['gap']
        assert len(final) == 30
        assert (final < early).sum() >= 24
        assert final.median() < 0.5
        assert elapsed < 60

    def test_angle_agrees_with_the_batch_direction_under_jamming(self):
        scenario = ScenarioConfig(K=4, N=2, M=16)
        table = oracle_compare(scenario, blocks=2000, seeds=(0, 1, 2), jammed=True, every=500)
        final = table[table['block'] == 2000]['angle_deg']
        assert final.median() < 10.0

    def test_forty_blocks_cover_most_of_the_transient(self):
        scenario = ScenarioConfig(N=4, P_J=5.0)
        table = oracle_compare(scenario, blocks=400, seeds=(0, 1, 2), jammed=True, every=10)
        means = table.groupby('block')['gap'].mean()
        assert means[40] < means[10]
        assert means[40] - means[400] < 0.5 * (means[10] - means[400])


class TestFalseAlarms:

    def test_clean_runs_stay_within_the_false_alarm_budget(self):
        cfg = ExperimentConfig(scenario=clean_table_scenario(), detector=DetectorConfig(epsilon=0.13),
                               trials=500, seed=11, methods=['opdad'], workers=-1)
        (report,) = evaluate(cfg)
        assert report.trials == 500
        assert report.p_fa <= 0.07

    def test_held_out_features_stay_inside_three_sigma(self):
        cfg = ExperimentConfig(scenario=clean_table_scenario(), trials=1, seed=5, methods=['opdad'])
        inside, total = 0, 0
        for trial in range(20):
            events, _ = run_trial(cfg, cfg.seed, trial)
            bootstrap = [e for e in events if e.bootstrap]
            inside += sum(not e.is_jamming for e in bootstrap)
            total += len(bootstrap)
        assert total >= 1000
        assert inside / total >= 0.95

    def test_calibrated_epsilon_is_near_the_shipped_default(self):
        cfg = ExperimentConfig(scenario=ScenarioConfig(), seed=13)
        epsilon = pilot_calibration(cfg, runs=10)
        assert 0.13 / 4 <= epsilon <= 0.13 * 4


class TestDetectionTrends:

    @pytest.fixture
    def base(self):
        return ExperimentConfig(trials=200, seed=17, methods=['opdad'], workers=-1)

    def sweep_over(self, base, param, values):
        base.sweep = SweepSpec(param=param, values=values)
        table = sweep(base)
        assert table['error'].isna().all()
        return table

    def test_miss_probability_falls_with_jammer_power(self, base):
        table = self.sweep_over(base, 'P_J', [-10.0, -5.0, 0.0, 5.0, 10.0])
        assert sweep_trend(table, 'p_miss') <= -0.8

    def test_miss_probability_falls_with_jammer_count(self, base):
        base.scenario = base.scenario.with_updates(P_J=5.0)
        table = self.sweep_over(base, 'N', [1, 2, 3, 4, 5])
        assert sweep_trend(table, 'p_miss') <= -0.8

    def test_miss_probability_and_delay_fall_with_burst_count(self, base):
        base.scenario = base.scenario.with_updates(P_J=5.0)
        table = self.sweep_over(base, 'n_r', [3, 6, 9, 12, 15])
        assert sweep_trend(table, 'p_miss') <= -0.8
        assert sweep_trend(table, 'avg_delay') <= -0.8

    def test_tracker_detects_before_the_energy_detector(self):
        cfg = ExperimentConfig(scenario=ScenarioConfig(P_J=10.0, n_r=15), trials=200, seed=19,
                               methods=['opdad', 'ed'], workers=-1)
        opdad, ed = evaluate(cfg)
        assert opdad.avg_delay < ed.avg_delay


class TestComplexity:

    @pytest.mark.timing
    def test_tracker_time_grows_at_most_linearly(self):
        table, slopes = bench(['opdad', 'sd'], [32, 64, 128, 256, 512], blocks=200, seed=0)
        assert slopes['opdad'] <= 1.3
        assert slopes['opdad'] < slopes['sd']
        for M in (64, 128, 256, 512):
            rows = table[table['M'] == M].set_index('method')['wall_time_per_block']
            assert rows['opdad'] < rows['sd']


def test_constant_jamming_is_detected_at_table_geometry():
    cfg = ExperimentConfig(scenario=ScenarioConfig(schedule_mode='constant', P_J=18.0), trials=50, seed=3,
                           methods=['opdad'], workers=-1)
    (report,) = evaluate(cfg)
    assert report.p_miss <= 0.1
    assert report.avg_delay <= 20
