import math

import pytest

snl = pytest.importorskip("snl")


@pytest.fixture
def step(data_dir):
    return snl.read_table_csv(str(data_dir / "step_gag84.csv"))


def test_table_round_trip(step):
    assert step.J == 2
    assert step.labels == ["none", "V", "T"]
    assert snl.parse_table_csv(step.to_csv()) == step


def test_parse_error_is_value_error():
    with pytest.raises(ValueError, match="<input>:2:3"):
        snl.parse_table_csv("arm,cat0,cat1,cat2\nP,1,x,2\nV,1,2,3\n")
    with pytest.raises(snl.InputError):
        snl.parse_table_csv("")


def test_profile_and_feasibility():
    p = snl.SnlParams(p_c=[0.5, 0.3, 0.2], p_s=0.4, I_E=0.1, r_c0=0.9, q=[0.4, 0.6])
    r = snl.vaccine_profile(p, [1])
    assert math.isclose(sum(r.p_v), 1.0, abs_tol=1e-12)
    assert math.isclose(r.p_v[0], 0.5 * 0.6, rel_tol=1e-12)
    assert not snl.feasibility_check(0.5, 0.15, 0.9).feasible
    with pytest.raises(snl.InfeasibleError):
        snl.vaccine_profile(snl.SnlParams([0.2, 0.8], 0.1, 0.5, 0.9, [1.0]), [1])


def test_step_lrt_and_fisher(step):
    r = snl.lrt(step, [2], variant="replacement_only", phase="two_phase")
    assert abs(r.statistic - 32.99) < 0.5
    assert r.p_value == pytest.approx(snl.chi2_sf_1df(r.statistic))
    f = snl.fisher_test(step)
    assert 0.0005 <= f.p_value <= 0.0015


def test_bayes_factor_is_seeded(step):
    a = snl.bayes_factor(step, [2], n_mc=500, seed=3)
    b = snl.bayes_factor(step, [2], n_mc=500, seed=3)
    assert a.log_bayes_factor == b.log_bayes_factor
    assert a.mc_se > 0
    m = snl.mbs_bayes_factor(step, [2], n_mc=500)
    assert m.bayes_factor > 1


def test_posterior_grid(step):
    c = snl.ps_posterior(step, [2], variant="replacement_only", grid=11, n_mc=300)
    assert len(c.grid) == 11
    assert 0.0 <= c.argmax <= 1.0


def test_model_scan(step):
    one = snl.model_scan(step, candidates=[[2]], n_mc=300, include_null=False)
    assert len(one) == 1 and one[0].posterior == 1.0
    full = snl.model_scan(step, n_mc=300)
    assert {e.label for e in full} == {"1", "2", "null"}
    assert math.isclose(sum(e.posterior for e in full), 1.0, rel_tol=1e-12)


def test_simulation_grid():
    scen = snl.builtin_scenarios(replicates=3, seed=2)
    assert len(scen) == 11
    t = snl.simulate_dataset(scen[0], 0)
    assert sum(t.placebo) == 1000 and sum(t.vaccine) == 1000
    g = snl.run_grid(scen[:2], ["2phase", "Fisher"], n_mc=200)
    assert g.rows == [s.label for s in scen[:2]]
    assert all(0.0 <= v <= 1.0 for row in g.rejection_rate for v in row)
    with pytest.raises(ValueError):
        snl.run_grid(scen[:1], ["no-such-method"])
