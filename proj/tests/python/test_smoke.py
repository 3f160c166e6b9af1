import math

import pytest

import tiltbound


def test_example_bound():
    model = tiltbound.example_pmf()
    rep = tiltbound.bound(model, tiltbound.ValueFunction.identity(), 4.0)
    assert abs(rep.bound - 0.8829) <= 5e-4
    assert rep.true_tail == pytest.approx(0.35)
    assert rep.tilt.status == tiltbound.TiltStatus.attained


def test_analyze_forms_agree():
    rep = tiltbound.analyze(tiltbound.example_pmf(), tiltbound.ValueFunction.identity(), 5.0)
    for form in (rep.product_form, rep.ratio_form, rep.generalized_form):
        assert form == pytest.approx(rep.bound, rel=1e-10)


def test_gaussian_closed_form():
    g = tiltbound.ContinuousModel.gaussian(0.0, 1.0)
    theta = tiltbound.optimize_theta(g, tiltbound.ValueFunction.identity(), 2.0)
    assert theta.theta_hat == pytest.approx(2.0, abs=1e-9)
    proj = tiltbound.i_projection(g, tiltbound.ValueFunction.identity(), 2.0)
    assert proj.density(2.0) == pytest.approx(1 / math.sqrt(2 * math.pi))


def test_projection_pmf():
    proj = tiltbound.i_projection(tiltbound.example_pmf(), tiltbound.ValueFunction.identity(), 4.0)
    assert abs(proj.pmf.prob[3] - 0.1699) <= 5e-4


def test_below_mean_raises():
    with pytest.raises(tiltbound.BelowMeanError):
        tiltbound.bound(tiltbound.example_pmf(), tiltbound.ValueFunction.identity(), 2.0)
    with pytest.raises(tiltbound.HypothesisError):
        tiltbound.bound(tiltbound.example_pmf(), tiltbound.ValueFunction.identity(), 2.0)


def test_invalid_model_is_input_error():
    with pytest.raises(tiltbound.InputError):
        tiltbound.DiscreteModel([1.0, 2.0], [0.5, 0.6])


def test_ml_and_experiment():
    model = tiltbound.example_pmf()
    v = tiltbound.ValueFunction.identity()
    sample = tiltbound.Sample([5, 40, 20, 15, 10, 7, 2, 1])
    assert tiltbound.ml_estimate(model, v, sample).theta_hat == 0.0
    rows = tiltbound.asymptotic_experiment(model, v, 4.0, [100, 10000])
    assert len(rows) == 2
    assert rows[1].empirical_max_dev < rows[0].empirical_max_dev


def test_report_json():
    import json

    rep = tiltbound.bound(tiltbound.example_pmf(), tiltbound.ValueFunction.identity(), 8.0)
    data = json.loads(rep.to_json())
    assert data["status"] == "infimum-at-infinity"
    assert data["theta_hat"] == "inf"
