# -*- coding: utf-8 -*-
"""배정 정책과 A/B 검정 테스트."""
import numpy as np
import pytest
from core.data import Treatment
from core.errors import InsufficientTreatmentError, MissingCovariateError
from core.policy import ABTestDecision, Policy, assign, global_ab_decision, predict, predict_subset
from core.tree import GrowthConfig, fit_tree
from tests.conftest import build_dataset


@pytest.fixture
def stump(eight_rows):
    return fit_tree(eight_rows.all_rows(), GrowthConfig(min_split=2, min_bucket=1, max_depth=1))


def _arms(n_a: int, y_a: int, n_b: int, y_b: int):
    y = [1] * y_a + [0] * (n_a - y_a) + [1] * y_b + [0] * (n_b - y_b)
    t = [0] * n_a + [1] * n_b
    return build_dataset(y=y, t=t, columns={"x": np.zeros(n_a + n_b)}).all_rows()


class TestPredict:
    """트리 경로 따라가기."""

    def test_stump_routes_by_threshold(self, stump):
        assert predict(stump, {"x": 1.7}) is Treatment.A
        assert predict(stump, {"x": 3.0}) is Treatment.B
        assert predict(stump, {"x": 2.5}) is Treatment.A

    def test_root_leaf_is_constant(self, eight_rows):
        tree = fit_tree(eight_rows.all_rows(), GrowthConfig(min_split=2, min_bucket=1, max_depth=0))
        assert {predict(tree, {"x": v}) for v in (-10.0, 0.0, 2.0, 99.0)} == {tree.root.treatment}

    def test_missing_covariate(self, stump):
        with pytest.raises(MissingCovariateError):
            predict(stump, {"z": 1.0})

    def test_subset_matches_row_by_row(self, stump, eight_rows):
        vector = predict_subset(stump, eight_rows)
        assert vector.tolist() == [0, 0, 0, 0, 1, 1, 1, 1]
        assert [Treatment.from_code(v) for v in vector] == [predict(stump, eight_rows.row(i)) for i in range(8)]

    def test_unseen_category_routes_right(self):
        d = build_dataset(
            y=[1, 1, 0, 0, 0, 0, 1, 1],
            t=[0, 0, 1, 1, 0, 0, 1, 1],
            columns={"c": ["u"] * 4 + ["v"] * 4},
        )
        tree = fit_tree(d.all_rows(), GrowthConfig(min_split=2, min_bucket=1, max_depth=1))
        assert tree.root.split is not None
        left_label = tree.category_levels["c"][tree.root.split.level]
        assert predict(tree, {"c": left_label}) is tree.root.left.treatment
        assert predict(tree, {"c": "never-seen"}) is tree.root.right.treatment

        fresh = build_dataset(y=[0, 0], t=[0, 1], columns={"c": ["never-seen", left_label]})
        assert predict_subset(tree, fresh).tolist() == [tree.root.right.treatment.code,
                                                        tree.root.left.treatment.code]

    def test_subset_missing_column(self, stump):
        other = build_dataset(y=[0], t=[0], columns={"z": [1.0]})
        with pytest.raises(MissingCovariateError):
            predict_subset(stump, other)


class TestGlobalABDecision:
    """합동 비율 단측 z 검정."""

    def test_significant_lift_chooses_b(self):
        decision = global_ab_decision(_arms(1000, 500, 1000, 560), alpha=0.05)
        assert decision.z_statistic == pytest.approx(2.688, abs=1e-3)
        assert decision.chosen is Treatment.B
        assert decision.p_value < 0.05

    def test_small_lift_keeps_a(self):
        decision = global_ab_decision(_arms(1000, 500, 1000, 520), alpha=0.05)
        assert decision.z_statistic == pytest.approx(0.894, abs=1e-3)
        assert decision.chosen is Treatment.A

    def test_identical_arms(self):
        decision = global_ab_decision(_arms(50, 20, 50, 20))
        assert decision.z_statistic == 0.0
        assert decision.chosen is Treatment.A

    def test_degenerate_pooled_rate(self):
        for y in (0, 1):
            rows = _arms(10, 10 * y, 10, 10 * y)
            decision = global_ab_decision(rows)
            assert decision.z_statistic == 0.0
            assert decision.chosen is Treatment.A

    def test_critical_value(self):
        decision = global_ab_decision(_arms(100, 50, 100, 50), alpha=0.05)
        assert decision.critical_value == pytest.approx(1.6449, abs=1e-4)

    def test_row_order_does_not_matter(self):
        rows = _arms(40, 10, 40, 25)
        d = rows.parent
        order = np.random.default_rng(0).permutation(d.n_rows)
        shuffled = build_dataset(y=d.outcome[order], t=d.treatment[order], columns={"x": np.zeros(d.n_rows)})
        assert global_ab_decision(rows) == global_ab_decision(shuffled.all_rows())

    def test_empty_arm(self):
        with pytest.raises(InsufficientTreatmentError):
            global_ab_decision(_arms(10, 5, 0, 0))

    def test_report(self):
        report = global_ab_decision(_arms(1000, 500, 1000, 560)).report()
        assert "z=2.688" in report
        assert report.endswith("decision=B")

    def test_is_frozen(self):
        decision = global_ab_decision(_arms(10, 5, 10, 5))
        assert isinstance(decision, ABTestDecision)
        with pytest.raises(AttributeError):
            decision.chosen = Treatment.B


class TestAssign:
    """정책별 배정."""

    def test_random_is_reproducible(self, eight_rows):
        policy = Policy.random(0.5)
        first = assign(policy, eight_rows, seed=123)
        assert first.tolist() == assign(policy, eight_rows, seed=123).tolist()
        assert set(first.tolist()) <= {0, 1}

    def test_random_extremes(self, eight_rows):
        assert assign(Policy.random(0.0), eight_rows, seed=1).tolist() == [0] * 8
        assert assign(Policy.random(1.0), eight_rows, seed=1).tolist() == [1] * 8

    def test_constant(self, make_dataset):
        d = make_dataset(y=[0, 1, 0], t=[0, 1, 0], columns={"x": [1, 2, 3]})
        assert assign(Policy.constant(Treatment.B), d).tolist() == [1, 1, 1]

    def test_tree_policy_on_training_rows(self, stump, eight_rows):
        assert assign(Policy.from_tree(stump), eight_rows.all_rows()).tolist() == [0, 0, 0, 0, 1, 1, 1, 1]

    def test_invalid_probability(self):
        with pytest.raises(ValueError):
            Policy.random(1.5)

    def test_assignments_reproduce_objective(self, stump, eight_rows):
        # 잎마다 배정 처리의 경험적 이익에 잎 크기를 곱한 합은 학습 목적함수와 같음
        assigned = predict_subset(stump, eight_rows)
        total = 0.0
        for leaf in stump.root.leaves():
            n_arm, y_arm = leaf.stats.count(leaf.treatment)
            total += leaf.stats.n * y_arm / n_arm
        assert total == pytest.approx(stump.objective())
        matched = assigned == eight_rows.treatment
        assert int(eight_rows.outcome[matched].sum()) == 4
