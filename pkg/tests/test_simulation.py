import os

import numpy as np
import pytest
from scipy import stats

from screenmin.probmodel import AltModel, alt_cdf
from screenmin.screening import HypothesisMix, PairType
from screenmin.simulation import (
    SimConfig,
    SimulationError,
    _uniforms,
    default_workers,
    generate_pmatrix,
    oracle_for,
    run_simulation,
)
from screenmin.thresholds import oracle_threshold

ALPHA = 0.05


def pooled(config, reps):
    return np.stack([generate_pmatrix(config, r).p for r in range(reps)])


def test_uniform_stream():
    u = _uniforms(7, 0, 0, 200_000)
    assert np.all((u > 0) & (u < 1))
    assert stats.kstest(u, "uniform").pvalue > 1e-3
    np.testing.assert_array_equal(u, _uniforms(7, 0, 0, 200_000))
    assert not np.array_equal(u[:10], _uniforms(7, 1, 0, 10))
    assert not np.array_equal(u[:10], _uniforms(8, 0, 0, 10))


def test_null_pvalues_uniform():
    cfg = SimConfig(m=500, mix=HypothesisMix(1, 0, 0), snr1=3.0)
    p = pooled(cfg, 100).ravel()
    assert stats.kstest(p, "uniform").pvalue > 1e-3


def test_alternative_ecdf():
    cfg = SimConfig(m=500, mix=HypothesisMix(0, 0, 1), snr1=3.0)
    p = np.sort(pooled(cfg, 100).ravel())
    ecdf = np.arange(1, len(p) + 1) / len(p)
    model_cdf = np.asarray(alt_cdf(p, AltModel(3.0)))
    assert np.max(np.abs(ecdf - model_cdf)) <= 0.01


def test_layout_and_labels():
    cfg = SimConfig(m=20, mix=HypothesisMix(0.5, 0.3, 0.2), snr1=40.0, snr2=30.0)
    mat = generate_pmatrix(cfg, 0)
    np.testing.assert_array_equal(mat.labels, [0] * 10 + [1] * 6 + [2] * 4)
    # huge shifts make non-null p-values vanish
    assert np.all(mat.p[10:, 0] < 1e-100)
    assert np.all(mat.p[16:, 1] < 1e-100)
    assert np.all(mat.p[:16, 1] > 1e-20)


def test_random_side():
    cfg = SimConfig(m=400, mix=HypothesisMix(0, 1, 0), snr1=40.0, random_side=True)
    mat = generate_pmatrix(cfg, 3)
    small = mat.p < 1e-100
    assert np.all(small.sum(axis=1) == 1)
    assert 120 < small[:, 1].sum() < 280


def test_compound_symmetry():
    cfg = SimConfig(m=50, mix=HypothesisMix(1, 0, 0), snr1=0.0, rho=0.8)
    z = stats.norm.isf(pooled(cfg, 4000))
    corr = np.corrcoef(z[:, :, 0].T)
    off = corr[~np.eye(50, dtype=bool)]
    assert abs(off.mean() - 0.8) <= 0.02
    cross = np.corrcoef(z[:, 0, 0], z[:, 0, 1])[0, 1]
    assert abs(cross) <= 0.06


def test_determinism():
    cfg = SimConfig(m=50, mix=HypothesisMix(0.8, 0.1, 0.1), snr1=2.5, n_reps=200, seed=11)
    a, b = run_simulation(cfg), run_simulation(cfg)
    assert a.estimates == b.estimates and a.oracle_c == b.oracle_c
    other = run_simulation(SimConfig(m=50, mix=HypothesisMix(0.8, 0.1, 0.1), snr1=2.5, n_reps=200, seed=12))
    assert other.estimates != a.estimates


def test_workers_do_not_change_results():
    cfg = SimConfig(m=40, mix=HypothesisMix(0.7, 0.2, 0.1), snr1=2.0, n_reps=101, seed=5)
    assert run_simulation(cfg, workers=1).estimates == run_simulation(cfg, workers=3).estimates


def test_default_workers(monkeypatch):
    monkeypatch.setenv("SCREENMIN_THREADS", "3")
    assert default_workers() == 3
    monkeypatch.delenv("SCREENMIN_THREADS")
    assert default_workers() == 1


def test_estimates_and_rows():
    cfg = SimConfig(m=30, mix=HypothesisMix(0.7, 0.2, 0.1), snr1=3.0, n_reps=50,
                    procedures=("oracle", "fixed", "bonferroni"), fixed_c=0.003)
    res = run_simulation(cfg)
    rows = res.rows()
    assert [r["procedure"] for r in rows] == ["oracle", "fixed", "bonferroni"]
    for r in rows:
        assert 0 <= r["fwer"] <= 1 and 0 <= r["power"] <= 1
        assert r["fwer_se"] == pytest.approx(np.sqrt(r["fwer"] * (1 - r["fwer"]) / 50))
        assert r["m"] == 30 and r["pi2"] == 0.1
    assert res.oracle_c == oracle_threshold(ALPHA, cfg.mix, AltModel(3.0), 30).c


def test_power_zero_without_alternatives():
    res = run_simulation(SimConfig(m=20, mix=HypothesisMix(0.5, 0.5, 0), snr1=2.0, n_reps=20))
    assert all(e.power == 0 and e.power_se == 0 for e in res.estimates.values())


def test_oracle_assumes_first_snr():
    cfg = SimConfig(m=100, mix=HypothesisMix(0.8, 0.1, 0.1), snr1=2.0, snr2=4.0)
    assert oracle_for(cfg) == oracle_threshold(ALPHA, cfg.mix, AltModel(2.0), 100).c


def test_config_validation():
    mix = HypothesisMix(1, 0, 0)
    for kw in (dict(m=0), dict(n_reps=0), dict(rho=1.0), dict(alpha=0.0), dict(seed=-1),
               dict(procedures=("nope",)), dict(procedures=("fixed",)), dict(snr1=-1.0)):
        base = dict(m=5, mix=mix, snr1=1.0)
        base.update(kw)
        with pytest.raises(ValueError):
            SimConfig(**base)


def test_failure_names_replication(monkeypatch):
    import screenmin.simulation as sim

    def boom(*a, **k):
        raise RuntimeError("boom")

    monkeypatch.setattr(sim, "bonferroni_max", boom)
    with pytest.raises(SimulationError) as err:
        run_simulation(SimConfig(m=5, mix=HypothesisMix(1, 0, 0), snr1=1.0, n_reps=3,
                                 procedures=("bonferroni",)))
    assert err.value.rep_index == 0


def test_fwer_violation_reproduced(ten_pair_sim):
    default = ten_pair_sim.estimates["default"]
    ada = ten_pair_sim.estimates["adafilter"]
    assert default.fwer >= 0.052
    assert ada.fwer <= ALPHA + 3 * ada.fwer_se


@pytest.mark.parametrize("pi1", [0.1, 0.4])
def test_dependence_keeps_control(pi1):
    cfg = SimConfig(m=200, mix=HypothesisMix(0.95 - pi1, pi1, 0.05), snr1=3.0, rho=0.8, n_reps=500, seed=4)
    for est in run_simulation(cfg).estimates.values():
        assert est.fwer <= ALPHA + 3 * max(est.fwer_se, np.sqrt(ALPHA * (1 - ALPHA) / 500))


@pytest.mark.parametrize("pi1", [0.1, 0.4])
def test_power_ordering_under_independence(pi1):
    cfg = SimConfig(m=200, mix=HypothesisMix(0.95 - pi1, pi1, 0.05), snr1=3.0, n_reps=1000, seed=6)
    est = run_simulation(cfg).estimates

    def at_least(a, b):
        return est[a].power >= est[b].power - 2 * np.hypot(est[a].power_se, est[b].power_se)

    assert at_least("oracle", "default") and at_least("adafilter", "default")
    assert at_least("default", "bonferroni")


def test_labels_match_pair_types():
    assert [int(t) for t in PairType] == [0, 1, 2]
