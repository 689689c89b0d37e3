"""End-to-end checks of the python bindings against frozen values."""

import math

import gfmi


def approx(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def test_transforms():
    alpha, beta = gfmi.clarke(1.0, 2.0, 3.0)
    assert approx(alpha, -1.0)
    assert approx(beta, -0.5773502691896257)

    a, b, c = gfmi.inverse_clarke(alpha, beta)
    assert approx(a, alpha)
    assert approx(a + b + c, 0.0, 1e-12)

    d, q = gfmi.park(1.0, 0.0, math.pi / 2.0)
    assert approx(d, 0.0, 1e-12)
    assert approx(q, -1.0)

    x, y = gfmi.inverse_park(d, q, math.pi / 2.0)
    assert approx(x, 1.0)
    assert approx(y, 0.0, 1e-12)


def test_simulate_short_run():
    sc = gfmi.Scenario()
    sc.horizon = 0.02
    sc.events = []

    res = gfmi.simulate(gfmi.SmcGains(), sc, trace=True)
    assert not res.diverged
    assert res.iae > 0.0
    assert len(res.rows) == 401          # 20 ms at 50 us plus the closing tick
    assert res.rows[0].t == 0.0
    assert approx(res.rows[-1].t, 0.02)
    assert res.rows[-1].iae == res.iae   # the trace carries the running cost

    again = gfmi.simulate(gfmi.SmcGains(), sc)
    assert again.iae == res.iae          # bitwise repeatable
    assert len(again.rows) == 0          # no trace requested


def test_simulate_honors_gains():
    sc = gfmi.Scenario()
    sc.horizon = 0.02
    sc.events = []
    stock = gfmi.simulate(gfmi.SmcGains(), sc)
    slack = gfmi.simulate(gfmi.SmcGains(1.0, 1.0, 15.0), sc)
    assert stock.iae != slack.iae


def test_tune_tiny_budget():
    sc = gfmi.Scenario()
    sc.horizon = 0.02
    sc.events = []

    st = gfmi.OptimizerSettings()
    st.pso.swarm_size = 4
    st.pso.max_iterations = 2

    rep = gfmi.tune("pso", sc, seed=3, settings=st)
    assert rep.seed == 3
    assert rep.cost_evaluations == 8
    assert len(rep.best_cost_curve) == 2
    assert rep.best_cost > 0.0
    assert rep.best_cost == min(rep.best_cost_curve)
    assert gfmi.convergence_iteration(rep, 1e9) == 1
    assert gfmi.convergence_iteration(rep, 0.0) is None

    rep2 = gfmi.tune("pso", sc, seed=3, settings=st)
    assert rep2.best_cost == rep.best_cost


def test_minimize_python_cost():
    calls = []

    def sphere(k_cd, k_cq, k_sat):
        calls.append((k_cd, k_cq, k_sat))
        return (k_cd - 3.0) ** 2 + (k_cq - 4.0) ** 2 + (k_sat + 1.0) ** 2

    space = gfmi.SearchSpace()
    space.lower = [-10.0, -10.0, -10.0]
    space.upper = [10.0, 10.0, 10.0]

    st = gfmi.OptimizerSettings()
    st.pso.swarm_size = 5
    st.pso.max_iterations = 4

    rep = gfmi.minimize("pso", sphere, space=space, seed=1, settings=st)
    assert len(calls) == 20
    assert rep.cost_evaluations == 20
    best_seen = min(sphere(*x) for x in calls[:20])
    assert approx(rep.best_cost, best_seen)
    assert all(-10.0 <= v <= 10.0 for x in calls for v in x)


def test_campaign_aggregates():
    sc = gfmi.Scenario()
    sc.horizon = 0.01
    sc.events = []

    st = gfmi.OptimizerSettings()
    st.sa.iterations = 2
    st.sa.moves_per_iteration = 3

    camp = gfmi.campaign("sa", sc, seeds=[1, 2], settings=st)
    assert len(camp.reports) == 2
    assert camp.reports[0].seed == 1
    assert camp.min_best_cost <= camp.mean_best_cost <= camp.max_best_cost
    assert gfmi.median_convergence_iteration(camp, 1e9) == 1


def test_bad_optimizer_name():
    try:
        gfmi.tune("bogus", gfmi.default_scenario())
    except ValueError as e:
        assert "bogus" in str(e)
    else:
        raise AssertionError("expected ValueError")


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
                print(f"{name}: ok")
            except AssertionError as e:
                failures += 1
                print(f"{name}: FAILED {e}")
    raise SystemExit(1 if failures else 0)
