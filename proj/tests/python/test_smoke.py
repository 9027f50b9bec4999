"""Smoke tests for the python bindings: fixtures with hand-checked values
plus a small end-to-end explanation run."""

import math

import pytest

import uqexplain as uqx


def test_isotonic_fixture():
    fit = uqx.fit_isotonic([(0.1, 0), (0.3, 1), (0.5, 0), (0.7, 1), (0.9, 1)])
    assert fit(0.1) == pytest.approx(0.0, abs=1e-12)
    assert fit(0.3) == pytest.approx(0.5, abs=1e-12)
    assert fit(0.5) == pytest.approx(0.5, abs=1e-12)
    assert fit(0.9) == pytest.approx(1.0, abs=1e-12)


def test_venn_abers_fixture():
    p = uqx.va_predict([0.1, 0.3, 0.5, 0.7, 0.9], [0, 1, 0, 1, 1], 0.6)
    assert p.low == pytest.approx(1 / 3, abs=1e-12)
    assert p.high == pytest.approx(1.0, abs=1e-12)
    assert p.estimate == pytest.approx(0.6, abs=1e-12)
    assert uqx.regularise(0.2, 0.8) == pytest.approx(0.5, abs=1e-12)


def test_cpd_fixture():
    cpd = uqx.ConformalPredictiveDistribution([-1.0, 0.0, 1.0], 10.0)
    assert cpd.evaluate(9.5) == 0.375
    assert cpd.evaluate(10.0) == 0.5
    assert cpd.median() == 10.0
    assert cpd.interval_two_sided(0.5) == (9.0, 11.0)
    assert cpd.threshold_prob(20.0) == 0.875
    lo, hi = cpd.interval_one_sided(0.25, uqx.IntervalSide.lower_bounded)
    assert lo == 9.0 and math.isinf(hi)


def test_triage_basics():
    assert uqx.categorize(0.1, 0.3, 0.2, 0.6) == uqx.Category.counter_factual
    assert uqx.categorize(0.4, 0.7, 0.55, 0.6) == uqx.Category.semi_potential
    assert uqx.categorize(0.65, 0.85, 0.75, 0.6) == uqx.Category.super_factual
    with pytest.raises(Exception):
        uqx.categorize(0.4, 0.6, 0.5, 0.5)
    assert uqx.rank_score(0.8, 0.1, 0.5) == pytest.approx(0.85, abs=1e-12)
    assert uqx.predicted_class_prob(0.3) == 0.7
    assert uqx.is_ensured(0.08, 0.15)
    assert uqx.feasible(0.5, 1.0)
    assert not uqx.feasible(0.9, 0.5, uqx.IntervalMode.mean)


def test_end_to_end_explanation():
    data = uqx.synth_classification(400, 1)
    parts = uqx.split(data, 80, 10, 2)
    forest = uqx.train_forest(parts.proper_training, uqx.ForestParams(n_trees=20, rng_seed=3))
    explainer = uqx.Explainer(forest, parts.calibration, uqx.ExplanationMode.classification())

    instance = parts.test.rows[0]
    explanation = explainer.explain_alternatives(instance)
    assert explanation.low <= explanation.estimate <= explanation.high
    for rule in explanation.rules:
        assert rule.low <= rule.estimate <= rule.high
        cond = rule.conditions[0]
        assert not cond.covers(instance[cond.feature])
        assert uqx.feasible(rule.estimate, rule.high - rule.low)

    with_conj = explainer.add_conjunctions(explanation)
    assert len(with_conj.rules) >= len(explanation.rules)

    if explanation.estimate != 0.5:
        triaged = uqx.triage_explanation(with_conj, 0.5)
        assert len(triaged) == len(with_conj.rules)
        top = uqx.rank_rules(triaged, 0.0, 3)
        assert len(top) <= 3
        assert all(
            top[i].uncertainty <= top[i + 1].uncertainty for i in range(len(top) - 1)
        )


def test_regression_threshold_mode():
    data = uqx.synth_regression(400, 4)
    parts = uqx.split(data, 80, 5, 5)
    forest = uqx.train_forest(parts.proper_training, uqx.ForestParams(n_trees=15, rng_seed=6))
    explainer = uqx.Explainer(
        forest, parts.calibration, uqx.ExplanationMode.regression_threshold(5.0)
    )
    pred = explainer.calibrated_predict(parts.test.rows[0])
    assert 0.0 <= pred.low <= pred.estimate <= pred.high <= 1.0


def test_external_scores_reject_explaining(tmp_path):
    table = tmp_path / "scores.csv"
    table.write_text("id,score\n0,0.25\n1,0.75\n")
    model = uqx.load_external_scores(str(table), uqx.Task.classification)
    assert model.score_for_id(1) == 0.75
    data = uqx.synth_classification(50, 7)
    with pytest.raises(RuntimeError):
        uqx.Explainer(model, data, uqx.ExplanationMode.classification())
