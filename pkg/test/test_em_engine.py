"""Unit tests for the EM engine, checked against exhaustive enumeration"""

import itertools
import os
import sys
import unittest
from unittest.mock import patch

import numpy as np

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.annotations import AnnotationRecord, Dataset, Item, Label, group_annotations
from core.baselines import mask_annotators, mask_contexts
from core.classifier import ClassifierSpec
from core.em_engine import (
    FitConfig,
    LatentConfiguration,
    apply_label_prior,
    cold_start_probabilities,
    e_step,
    fit,
    incomplete_data_log_likelihood,
    joint_config_likelihood,
    m_step_alpha,
    m_step_gamma,
    marginal_y,
    predict,
    sample_training_labels,
)
from core.exceptions import ConfigError, LikelihoodError, ModelParameterError, MonotonicityError
from core.noise_model import ModelParameters, TransitionMatrix, uniform_transition
from core.simulator import study_scale_spec, random_transition, simulate

IDENTITY = TransitionMatrix(np.eye(3))


def random_micro_dataset(seed):
    """Up to 3 items, 2 contexts and 2 annotators per context with random parameters"""
    rng = np.random.default_rng(seed)
    n_items = int(rng.integers(1, 4))
    contexts = ["c1", "c2"][: int(rng.integers(1, 3))]
    annotators = ["a1", "a2", "a3"]
    records = []
    for i in range(n_items):
        for context_id in contexts:
            chosen = rng.choice(annotators, size=int(rng.integers(1, 3)), replace=False)
            for annotator_id in chosen:
                records.append(AnnotationRecord(f"i{i}", context_id, str(annotator_id), Label(int(rng.integers(-1, 2)))))
    items = [Item(f"i{i}", rng.normal(size=2)) for i in range(n_items)]
    dataset = Dataset(items, records)
    params = ModelParameters(
        {c: random_transition(rng, 0.3, 0.9) for c in dataset.contexts},
        {a: random_transition(rng, 0.3, 0.9) for a in dataset.annotators},
    )
    item_probs = rng.dirichlet(np.ones(3), size=n_items)
    return dataset, params, item_probs


def brute_joint(dataset, params, item_probs, item_id, y, s):
    """Direct product over the factor list of one configuration"""
    index = group_annotations(dataset)
    row = dataset.item_index[item_id]
    value = item_probs[row][y + 1]
    for context_id, s_c in zip(index.contexts_of(item_id), s):
        value *= params.gamma[context_id][y + 1, s_c + 1]
        for annotator_id, r in index[(item_id, context_id)]:
            value *= params.alpha[annotator_id][s_c + 1, int(r) + 1]
    return value


def brute_posterior(dataset, params, item_probs, item_id):
    """Every configuration's joint likelihood divided by their total"""
    k = len(group_annotations(dataset).contexts_of(item_id))
    table = {}
    for y in (-1, 0, 1):
        for s in itertools.product((-1, 0, 1), repeat=k):
            table[(y,) + s] = brute_joint(dataset, params, item_probs, item_id, y, s)
    total = sum(table.values())
    return {key: value / total for key, value in table.items()}, total


def single_annotation_setup(label=Label.NEG):
    """One item, one context, one annotation, identity matrices"""
    dataset = Dataset([Item("i1", [0.0])], [AnnotationRecord("i1", "c1", "a1", label)])
    params = ModelParameters({"c1": IDENTITY}, {"a1": IDENTITY})
    return dataset, params, np.array([[1.0, 0.0, 0.0]])


class TestJointLikelihood(unittest.TestCase):
    """Test suite for joint_config_likelihood and incomplete_data_log_likelihood"""

    def test_identity_consistent_configuration(self):
        """Test all factors equal 1 for the consistent configuration"""
        dataset, params, probs = single_annotation_setup()
        index = group_annotations(dataset)
        item = dataset.items[0]

        self.assertEqual(
            joint_config_likelihood(item, LatentConfiguration(Label.NEG, (Label.NEG,)), index, params, probs[0]), 1.0
        )
        self.assertEqual(
            joint_config_likelihood(item, LatentConfiguration(Label.NEG, (Label.NEUTRAL,)), index, params, probs[0]), 0.0
        )

    def test_configuration_length_checked(self):
        """Test a configuration must have one context label per context"""
        dataset, params, probs = single_annotation_setup()
        with self.assertRaises(Exception):
            joint_config_likelihood(
                dataset.items[0], LatentConfiguration(Label.NEG, ()), group_annotations(dataset), params, probs[0]
            )

    def test_hand_product_two_contexts(self):
        """Test a term-by-term product with hand-set matrices"""
        g1 = TransitionMatrix([[0.7, 0.2, 0.1], [0.1, 0.8, 0.1], [0.05, 0.15, 0.8]])
        g2 = TransitionMatrix([[0.6, 0.3, 0.1], [0.2, 0.6, 0.2], [0.1, 0.1, 0.8]])
        a1 = TransitionMatrix([[0.9, 0.05, 0.05], [0.1, 0.7, 0.2], [0.0, 0.25, 0.75]])
        a2 = TransitionMatrix([[0.5, 0.25, 0.25], [0.3, 0.4, 0.3], [0.2, 0.2, 0.6]])
        records = [AnnotationRecord("x", "c1", "a1", Label.POS), AnnotationRecord("x", "c2", "a2", Label.NEG)]
        dataset = Dataset([Item("x", [1.0, 2.0])], records)
        params = ModelParameters({"c1": g1, "c2": g2}, {"a1": a1, "a2": a2})
        m = np.array([0.2, 0.3, 0.5])

        config = LatentConfiguration(Label.POS, (Label.NEUTRAL, Label.NEG))
        expected = 0.5 * 0.15 * 0.2 * 0.1 * 0.5

        self.assertAlmostEqual(
            joint_config_likelihood(dataset.items[0], config, group_annotations(dataset), params, m), expected, places=15
        )

    def test_missing_matrix(self):
        """Test a context without gamma is reported"""
        dataset, _, probs = single_annotation_setup()
        params = ModelParameters({}, {"a1": IDENTITY})
        with self.assertRaises(ModelParameterError):
            joint_config_likelihood(
                dataset.items[0], LatentConfiguration(Label.NEG, (Label.NEG,)),
                group_annotations(dataset), params, probs[0],
            )

    def test_single_item_log_likelihood_is_zero(self):
        """Test log(1.0) for the deterministic single item"""
        dataset, params, probs = single_annotation_setup()
        self.assertEqual(incomplete_data_log_likelihood(dataset, params, probs), 0.0)

    def test_identical_items_add(self):
        """Test two identical independent items give twice the single-item value"""
        rng = np.random.default_rng(4)
        params = ModelParameters({"c1": random_transition(rng)}, {"a1": random_transition(rng)})
        m = np.array([0.3, 0.2, 0.5])
        one = Dataset([Item("i1", [0.0])], [AnnotationRecord("i1", "c1", "a1", Label.POS)])
        two = Dataset(
            [Item("i1", [0.0]), Item("i2", [0.0])],
            [AnnotationRecord("i1", "c1", "a1", Label.POS), AnnotationRecord("i2", "c1", "a1", Label.POS)],
        )

        single = incomplete_data_log_likelihood(one, params, m[None, :])
        double = incomplete_data_log_likelihood(two, params, np.vstack([m, m]))

        self.assertAlmostEqual(double, 2 * single, places=12)

    def test_log_likelihood_matches_enumeration(self):
        """Test the log-likelihood equals a log-sum over every configuration"""
        for seed in range(20):
            with self.subTest(seed=seed):
                dataset, params, probs = random_micro_dataset(seed)
                expected = sum(
                    np.log(brute_posterior(dataset, params, probs, item_id)[1]) for item_id in dataset.item_ids
                )
                self.assertAlmostEqual(incomplete_data_log_likelihood(dataset, params, probs), expected, places=10)

    def test_zero_mass_is_an_error(self):
        """Test an impossible item raises instead of returning -inf"""
        dataset, params, probs = single_annotation_setup(Label.POS)
        with self.assertRaises(LikelihoodError):
            incomplete_data_log_likelihood(dataset, params, probs)
        with self.assertRaises(LikelihoodError):
            e_step(dataset, params, probs)


class TestEStep(unittest.TestCase):
    """Test suite for e_step and marginal_y"""

    def test_matches_bayes_enumeration(self):
        """Test posteriors equal brute-force Bayes normalization within 1e-12"""
        for seed in range(50):
            with self.subTest(seed=seed):
                dataset, params, probs = random_micro_dataset(seed)
                posterior = e_step(dataset, params, probs)
                for item_id in dataset.item_ids:
                    expected, _ = brute_posterior(dataset, params, probs, item_id)
                    tau = posterior.tensor(item_id)
                    self.assertEqual(tau.size, len(expected))
                    for key, value in expected.items():
                        self.assertAlmostEqual(tau[tuple(v + 1 for v in key)], value, delta=1e-12)

    def test_deterministic_setup_concentrates(self):
        """Test all mass sits on the consistent configuration"""
        dataset, params, probs = single_annotation_setup()
        posterior = e_step(dataset, params, probs)
        self.assertEqual(posterior.probability("i1", LatentConfiguration(Label.NEG, (Label.NEG,))), 1.0)
        np.testing.assert_array_equal(marginal_y(posterior, "i1"), [1.0, 0.0, 0.0])

    def test_uniform_parameters_give_uniform_posterior(self):
        """Test symmetry: uniform classifier and matrices"""
        records = [
            AnnotationRecord("i1", "c1", "a1", Label.POS),
            AnnotationRecord("i1", "c2", "a2", Label.NEG),
            AnnotationRecord("i1", "c2", "a1", Label.NEUTRAL),
        ]
        dataset = Dataset([Item("i1", [0.0])], records)
        params = ModelParameters({"c1": uniform_transition(), "c2": uniform_transition()},
                                 {"a1": uniform_transition(), "a2": uniform_transition()})

        posterior = e_step(dataset, params, np.full((1, 3), 1 / 3))

        configurations = list(posterior.configurations("i1"))
        self.assertEqual(len(configurations), 27)
        for _, probability in configurations:
            self.assertAlmostEqual(probability, 1 / 27, places=14)
        np.testing.assert_allclose(marginal_y(posterior, "i1"), [1 / 3] * 3, atol=1e-14)

    def test_tables_normalized(self):
        """Test every item's table and marginal sum to 1"""
        dataset, params, probs = random_micro_dataset(7)
        posterior = e_step(dataset, params, probs)
        for item_id in dataset.item_ids:
            self.assertAlmostEqual(posterior.tensor(item_id).sum(), 1.0, delta=1e-9)
            self.assertAlmostEqual(marginal_y(posterior, item_id).sum(), 1.0, delta=1e-9)

    def test_marginal_matches_summation(self):
        """Test marginal_y against config-wise summation"""
        dataset, params, probs = random_micro_dataset(12)
        posterior = e_step(dataset, params, probs)
        for item_id in dataset.item_ids:
            expected = np.zeros(3)
            for config, probability in posterior.configurations(item_id):
                expected[config.y.index] += probability
            np.testing.assert_allclose(marginal_y(posterior, item_id), expected, atol=1e-15)

    def test_unknown_item(self):
        """Test marginal_y of an item outside the table"""
        dataset, params, probs = single_annotation_setup()
        posterior = e_step(dataset, params, probs)
        with self.assertRaises(Exception):
            marginal_y(posterior, "nope")


class TestMSteps(unittest.TestCase):
    """Test suite for m_step_gamma and m_step_alpha"""

    def gamma_oracle(self, dataset, posterior, smoothing):
        index = group_annotations(dataset)
        counts = {c: np.zeros((3, 3)) for c in dataset.contexts}
        for item_id in dataset.item_ids:
            contexts = index.contexts_of(item_id)
            for config, probability in posterior.configurations(item_id):
                for context_id, s in zip(contexts, config.s):
                    counts[context_id][config.y.index, s.index] += probability
        return {c: (n + smoothing) / (n + smoothing).sum(axis=1, keepdims=True) for c, n in counts.items()}

    def alpha_oracle(self, dataset, posterior, smoothing):
        index = group_annotations(dataset)
        counts = {a: np.zeros((3, 3)) for a in dataset.annotators}
        for record in dataset.annotations:
            position = index.contexts_of(record.item_id).index(record.context_id)
            for config, probability in posterior.configurations(record.item_id):
                counts[record.annotator_id][config.s[position].index, record.label.index] += probability
        return {a: (n + smoothing) / (n + smoothing).sum(axis=1, keepdims=True) for a, n in counts.items()}

    def test_gamma_matches_weighted_counts(self):
        """Test m_step_gamma against the count-and-divide oracle within 1e-12"""
        for seed in range(50):
            with self.subTest(seed=seed):
                dataset, params, probs = random_micro_dataset(seed)
                posterior = e_step(dataset, params, probs)
                estimated = m_step_gamma(dataset, posterior, 1e-3)
                for context_id, expected in self.gamma_oracle(dataset, posterior, 1e-3).items():
                    np.testing.assert_allclose(estimated[context_id].rows, expected, atol=1e-12, rtol=0)

    def test_alpha_matches_weighted_counts(self):
        """Test m_step_alpha against the annotation-level oracle within 1e-12"""
        for seed in range(50):
            with self.subTest(seed=seed):
                dataset, params, probs = random_micro_dataset(seed)
                posterior = e_step(dataset, params, probs)
                estimated = m_step_alpha(dataset, posterior, 1e-3)
                for annotator_id, expected in self.alpha_oracle(dataset, posterior, 1e-3).items():
                    np.testing.assert_allclose(estimated[annotator_id].rows, expected, atol=1e-12, rtol=0)

    def test_consistent_posterior_gives_identity(self):
        """Test y = s = r everywhere recovers identity matrices up to smoothing"""
        records = [AnnotationRecord(f"i{v}", "c1", "a1", Label(v)) for v in (-1, 0, 1)]
        dataset = Dataset([Item(f"i{v}", [0.0]) for v in (-1, 0, 1)], records)
        params = ModelParameters({"c1": IDENTITY}, {"a1": IDENTITY})
        posterior = e_step(dataset, params, np.eye(3))

        np.testing.assert_allclose(m_step_gamma(dataset, posterior, 1e-6)["c1"].rows, np.eye(3), atol=1e-5)
        np.testing.assert_allclose(m_step_alpha(dataset, posterior, 1e-6)["a1"].rows, np.eye(3), atol=1e-5)

    def test_uniform_posterior_gives_uniform_gamma(self):
        """Test symmetry of the gamma update"""
        records = [AnnotationRecord("i1", "c1", "a1", Label.POS), AnnotationRecord("i1", "c2", "a1", Label.NEG)]
        dataset = Dataset([Item("i1", [0.0])], records)
        params = ModelParameters({"c1": uniform_transition(), "c2": uniform_transition()}, {"a1": uniform_transition()})
        posterior = e_step(dataset, params, np.full((1, 3), 1 / 3))

        for matrix in m_step_gamma(dataset, posterior, 1e-6).values():
            np.testing.assert_allclose(matrix.rows, np.full((3, 3), 1 / 3), atol=1e-12)

    def test_constant_annotator_column(self):
        """Test an annotator who always writes 0 gets alpha mass on the neutral column"""
        rng = np.random.default_rng(2)
        records = [AnnotationRecord(f"i{i}", c, "lazy", Label.NEUTRAL) for i in range(4) for c in ("c1", "c2")]
        dataset = Dataset([Item(f"i{i}", [0.0]) for i in range(4)], records)
        params = ModelParameters({c: random_transition(rng, 0.4, 0.6) for c in ("c1", "c2")},
                                 {"lazy": random_transition(rng, 0.4, 0.6)})
        posterior = e_step(dataset, params, rng.dirichlet(np.ones(3), size=4))

        alpha = m_step_alpha(dataset, posterior, 1e-6)["lazy"]

        self.assertTrue(np.all(alpha[:, 1] > 0.99))


class TestSamplingAndPrior(unittest.TestCase):
    """Test suite for sample_training_labels and apply_label_prior"""

    def test_point_masses(self):
        """Test point-mass marginals always give the same label"""
        samples = sample_training_labels(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]), 10, rng_seed=99)
        np.testing.assert_array_equal(samples[0], [-1] * 10)
        np.testing.assert_array_equal(samples[1], [0] * 10)

    def test_law_of_large_numbers(self):
        """Test the sampled frequency of -1 under (0.5, 0, 0.5)"""
        samples = sample_training_labels(np.array([[0.5, 0.0, 0.5]]), 200000, rng_seed=1)
        frequency = np.mean(samples == -1)
        self.assertTrue(0.49 <= frequency <= 0.51)
        self.assertFalse(np.any(samples == 0))

    def test_sampling_is_deterministic(self):
        """Test the same seed gives the same draws"""
        marginals = np.random.default_rng(0).dirichlet(np.ones(3), size=5)
        np.testing.assert_array_equal(
            sample_training_labels(marginals, 10, 7), sample_training_labels(marginals, 10, 7)
        )

    def test_label_prior_examples(self):
        """Test the prior applied to uniform, point-mass and with a uniform prior"""
        np.testing.assert_allclose(apply_label_prior([1 / 3] * 3, [0.495, 0.01, 0.495]), [0.495, 0.01, 0.495])
        np.testing.assert_allclose(apply_label_prior([0.2, 0.3, 0.5], [1 / 3] * 3), [0.2, 0.3, 0.5])
        np.testing.assert_allclose(apply_label_prior([0.0, 1.0, 0.0], [0.45, 0.1, 0.45]), [0.0, 1.0, 0.0])

    def test_label_prior_zero_mass(self):
        """Test a product with no mass is an error"""
        with self.assertRaises(LikelihoodError):
            apply_label_prior([0.0, 0.0, 0.0], [1 / 3] * 3)

    def test_cold_start_proportions(self):
        """Test per-context winners smoothed with the prior"""
        records = [
            AnnotationRecord("i1", "c1", "a1", Label.POS),
            AnnotationRecord("i1", "c1", "a2", Label.POS),
            AnnotationRecord("i1", "c2", "a1", Label.POS),
        ]
        dataset = Dataset([Item("i1", [0.0])], records)
        prior = np.array([0.495, 0.01, 0.495])

        probs = cold_start_probabilities(dataset, group_annotations(dataset), prior)

        np.testing.assert_allclose(probs[0], (np.array([0, 0, 2]) + prior) / 3)


class TestFitConfig(unittest.TestCase):
    """Test suite for FitConfig validation"""

    def test_defaults(self):
        """Test the documented defaults"""
        config = FitConfig()
        self.assertEqual(config.samples_per_item, 10)
        self.assertEqual(config.label_prior, (0.495, 0.01, 0.495))
        self.assertEqual(config.max_iterations, 100)

    def test_invalid_values(self):
        """Test invariants on iterations, tolerance and samples"""
        for kwargs in ({"max_iterations": 0}, {"rel_tolerance": 0.0}, {"samples_per_item": 0},
                       {"label_prior": (0.5, 0.5, 0.0)}):
            with self.subTest(kwargs=kwargs):
                with self.assertRaises(ConfigError):
                    FitConfig(**kwargs)


class TestFit(unittest.TestCase):
    """Test suite for the full EM loop on small data"""

    def setUp(self):
        """Set up a small simulated dataset"""
        spec = study_scale_spec(rng_seed=21, n_items=60, n_contexts=3, annotators_per_context=2,
                                n_annotators=6, dimension=4)
        self.dataset, self.truth = simulate(spec)
        self.config = FitConfig(max_iterations=8, rng_seed=5)

    def test_consensus_data(self):
        """Test perfectly agreeing annotators give >= 0.99 posterior on the consensus"""
        labels = [Label((i % 3) - 1) for i in range(24)]
        items = [Item(f"i{i}", np.eye(3)[label.index]) for i, label in enumerate(labels)]
        records = [
            AnnotationRecord(f"i{i}", context_id, annotator_id, label)
            for i, label in enumerate(labels)
            for context_id in ("c1", "c2")
            for annotator_id in ("a1", "a2")
        ]
        dataset = Dataset(items, records)

        result = fit(dataset, ClassifierSpec(), FitConfig(max_iterations=20, label_prior=(1 / 3, 1 / 3, 1 / 3)))

        for i, label in enumerate(labels):
            self.assertGreaterEqual(marginal_y(result.posterior, f"i{i}")[label.index], 0.99)

    def test_trace_is_non_decreasing(self):
        """Test the log-likelihood never drops beyond the slack"""
        result = fit(self.dataset, ClassifierSpec(), self.config)
        for previous, current in zip(result.trace, result.trace[1:]):
            self.assertGreaterEqual(current, previous - 1e-8)
        self.assertTrue(np.all(np.isfinite(result.trace)))

    def test_slack_is_absolute(self):
        """Test a 1e-6 drop fails even when the log-likelihood is large in magnitude"""
        config = FitConfig(max_iterations=2, rng_seed=5)
        with patch("core.em_engine.incomplete_data_log_likelihood", side_effect=[-1000.0, -1000.000001]):
            with self.assertRaises(MonotonicityError):
                fit(self.dataset, ClassifierSpec(), config)

        with patch("core.em_engine.incomplete_data_log_likelihood", side_effect=[-1000.0, -1000.000000001]):
            result = fit(self.dataset, ClassifierSpec(), config)
        self.assertEqual(len(result.trace), 2)

    def test_fit_is_deterministic(self):
        """Test identical configs give bit-identical parameters"""
        first = fit(self.dataset, ClassifierSpec(), self.config)
        second = fit(self.dataset, ClassifierSpec(), self.config)

        self.assertEqual(first.trace, second.trace)
        for key in first.params.gamma:
            np.testing.assert_array_equal(first.params.gamma[key].rows, second.params.gamma[key].rows)
        for key in first.params.alpha:
            np.testing.assert_array_equal(first.params.alpha[key].rows, second.params.alpha[key].rows)
        np.testing.assert_array_equal(first.params.classifier.weights, second.params.classifier.weights)

    def test_permuting_ids_permutes_maps(self):
        """Test renaming contexts and annotators only renames the matrices"""
        renamed = [
            AnnotationRecord(r.item_id, "ctx_" + r.context_id, "who_" + r.annotator_id, r.label)
            for r in self.dataset.annotations
        ]
        other = self.dataset.with_annotations(renamed)
        config = FitConfig(max_iterations=3, rng_seed=5)

        first = fit(self.dataset, ClassifierSpec(), config)
        second = fit(other, ClassifierSpec(), config)

        self.assertEqual(first.trace, second.trace)
        for key, matrix in first.params.gamma.items():
            np.testing.assert_array_equal(matrix.rows, second.params.gamma["ctx_" + key].rows)
        for key, matrix in first.params.alpha.items():
            np.testing.assert_array_equal(matrix.rows, second.params.alpha["who_" + key].rows)

    def test_single_iteration(self):
        """Test max_iterations=1 records exactly one trace entry"""
        result = fit(self.dataset, ClassifierSpec(), FitConfig(max_iterations=1))
        self.assertEqual(result.n_iterations, 1)
        self.assertEqual(len(result.trace), 1)
        self.assertTrue(result.classifier_updates[0])

    def test_gold_labels_are_not_used(self):
        """Test fitting with and without gold labels gives the same result"""
        config = FitConfig(max_iterations=2, rng_seed=1)
        with_gold = fit(self.dataset, ClassifierSpec(), config)
        without_gold = fit(self.dataset.without_gold(), ClassifierSpec(), config)
        self.assertEqual(with_gold.trace, without_gold.trace)

    def test_masked_fits_have_one_matrix(self):
        """Test masked contexts give one gamma and masked annotators one alpha"""
        config = FitConfig(max_iterations=2)
        contexts_masked = fit(mask_contexts(self.dataset), ClassifierSpec(), config)
        annotators_masked = fit(mask_annotators(self.dataset), ClassifierSpec(), config)
        both = fit(mask_annotators(mask_contexts(self.dataset)), ClassifierSpec(), config)

        self.assertEqual((len(contexts_masked.params.gamma), len(contexts_masked.params.alpha)), (1, 6))
        self.assertEqual((len(annotators_masked.params.gamma), len(annotators_masked.params.alpha)), (3, 1))
        self.assertEqual((len(both.params.gamma), len(both.params.alpha)), (1, 1))

    def test_predict_out_of_sample(self):
        """Test fitted predictions are distributions over the three labels"""
        result = fit(self.dataset, ClassifierSpec(), FitConfig(max_iterations=2))
        probs = predict(result.params, np.zeros((4, 4)))
        self.assertEqual(probs.shape, (4, 3))
        np.testing.assert_allclose(probs.sum(axis=1), 1.0)

    def test_fitted_matrices_are_row_stochastic(self):
        """Test every estimated matrix stays valid"""
        result = fit(self.dataset, ClassifierSpec(), FitConfig(max_iterations=3))
        for matrix in list(result.params.gamma.values()) + list(result.params.alpha.values()):
            np.testing.assert_allclose(matrix.rows.sum(axis=1), 1.0, atol=1e-9)


if __name__ == '__main__':
    unittest.main()
