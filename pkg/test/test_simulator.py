"""Unit tests for the synthetic data generator"""

import os
import sys
import tempfile
import unittest

import numpy as np

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.annotations import Label, load_dataset, load_features, load_gold
from core.exceptions import ConfigError, MatrixError
from core.noise_model import TransitionMatrix, load_matrices, uniform_transition
from core.simulator import (
    SimulationSpec,
    study_scale_spec,
    random_transition,
    recovery_error,
    simulate,
    write_simulation,
)

IDENTITY = TransitionMatrix(np.eye(3))


def small_spec(gamma, alpha, n_items=50, distribution=(0.4, 0.2, 0.4), rng_seed=0, **kwargs):
    """One-dimensional SimulationSpec with the given matrix maps"""
    return SimulationSpec(
        n_items=n_items,
        gamma=gamma,
        alpha=alpha,
        annotators_per_context=kwargs.pop("annotators_per_context", 1),
        true_label_distribution=distribution,
        class_means=np.array([[-1.0], [0.0], [1.0]]),
        rng_seed=rng_seed,
        **kwargs,
    )


class TestSimulate(unittest.TestCase):
    """Test suite for simulate"""

    def test_identity_matrices_copy_gold(self):
        """Test noiseless contexts and annotators reproduce the true label"""
        spec = small_spec({"c1": IDENTITY, "c2": IDENTITY}, {"a1": IDENTITY, "a2": IDENTITY}, annotators_per_context=2)
        dataset, params = simulate(spec)
        gold = dataset.gold_labels()

        self.assertEqual(len(dataset.annotations), 50 * 2 * 2)
        for record in dataset.annotations:
            self.assertEqual(record.label, gold[record.item_id])
        self.assertEqual(params.gamma["c1"], IDENTITY)

    def test_uniform_context_spreads_labels(self):
        """Test a uniform gamma gives each label about a third of the time"""
        spec = small_spec({"c1": uniform_transition()}, {"a1": IDENTITY}, n_items=10000, distribution=(1.0, 0.0, 0.0))
        dataset, _ = simulate(spec)

        labels = np.array([int(r.label) for r in dataset.annotations])
        for value in (-1, 0, 1):
            self.assertAlmostEqual(np.mean(labels == value), 1 / 3, delta=0.02)

    def test_annotations_follow_alpha_rows(self):
        """Test annotator labels given the context label match the alpha rows to within 0.02"""
        alpha = TransitionMatrix([[0.7, 0.2, 0.1], [0.15, 0.6, 0.25], [0.05, 0.15, 0.8]])
        spec = small_spec({"c1": IDENTITY}, {"a1": alpha}, n_items=30000, distribution=(1 / 3, 1 / 3, 1 / 3))
        dataset, _ = simulate(spec)
        gold = dataset.gold_labels()

        counts = np.zeros((3, 3))
        for record in dataset.annotations:
            counts[gold[record.item_id].index, record.label.index] += 1
        np.testing.assert_allclose(counts / counts.sum(axis=1, keepdims=True), alpha.rows, atol=0.02)

    def test_round_robin_assignment(self):
        """Test annotators are taken from the pool in turn"""
        alpha = {f"a{k}": IDENTITY for k in range(3)}
        spec = small_spec({"c1": IDENTITY, "c2": IDENTITY}, alpha, n_items=2, annotators_per_context=2)
        dataset, _ = simulate(spec)

        assigned = [r.annotator_id for r in dataset.annotations]
        self.assertEqual(assigned, ["a0", "a1", "a2", "a0", "a1", "a2", "a0", "a1"])

    def test_study_scale_counts(self):
        """Test the study-shaped SimulationSpec gives 10116 annotations"""
        dataset, params = simulate(study_scale_spec(rng_seed=1))

        self.assertEqual(dataset.n_items, 562)
        self.assertEqual(len(dataset.contexts), 6)
        self.assertEqual(len(dataset.annotations), 10116)
        self.assertEqual(len(params.alpha), 30)

    def test_deterministic(self):
        """Test one seed always draws the same dataset"""
        spec = study_scale_spec(rng_seed=7, n_items=30, n_contexts=2, n_annotators=4)
        self.assertEqual(simulate(spec).dataset, simulate(spec).dataset)
        other = study_scale_spec(rng_seed=8, n_items=30, n_contexts=2, n_annotators=4)
        self.assertNotEqual(simulate(spec).dataset, simulate(other).dataset)

    def test_heldout_items(self):
        """Test held-out items come with features and gold but no annotations"""
        result = simulate(study_scale_spec(rng_seed=2, n_items=20, n_contexts=2, n_annotators=4, n_heldout=5))

        self.assertEqual(result.heldout_ids, [f"heldout{i}" for i in range(5)])
        self.assertEqual(result.heldout_features.shape, (5, 10))
        self.assertEqual(set(result.heldout_gold), set(result.heldout_ids))
        self.assertNotIn("heldout0", result.dataset.item_index)

    def test_spec_validation(self):
        """Test impossible settings are rejected"""
        with self.assertRaises(ConfigError):
            small_spec({"c1": IDENTITY}, {"a1": IDENTITY}, annotators_per_context=2)
        with self.assertRaises(ConfigError):
            small_spec({"c1": IDENTITY}, {"a1": IDENTITY}, distribution=(0.5, 0.5, 0.5))
        with self.assertRaises(ConfigError):
            small_spec({"c1": IDENTITY}, {"a1": IDENTITY}, n_items=0)


class TestRecoveryError(unittest.TestCase):
    """Test suite for recovery_error and random_transition"""

    def test_identical_maps(self):
        """Test identical maps have zero error"""
        rng = np.random.default_rng(0)
        maps = {"c1": random_transition(rng), "c2": random_transition(rng)}
        self.assertEqual(recovery_error(maps, dict(maps)), 0.0)

    def test_identity_against_uniform(self):
        """Test identity vs uniform gives 4/9"""
        error = recovery_error({"c1": IDENTITY}, {"c1": uniform_transition()})
        self.assertAlmostEqual(error, 4 / 9)

    def test_key_mismatch(self):
        """Test maps over different keys are rejected"""
        with self.assertRaises(MatrixError):
            recovery_error({"c1": IDENTITY}, {"c2": IDENTITY})

    def test_random_transition_diagonal(self):
        """Test diagonals stay inside the requested band"""
        rng = np.random.default_rng(5)
        for _ in range(20):
            diagonal = np.diag(random_transition(rng, 0.7, 0.95).rows)
            self.assertTrue(np.all((diagonal >= 0.7) & (diagonal <= 0.95)))


class TestWriteSimulation(unittest.TestCase):
    """Test suite for write_simulation"""

    def test_files_reload(self):
        """Test the written files load back as the simulated dataset and truth"""
        result = simulate(study_scale_spec(rng_seed=4, n_items=25, n_contexts=2, n_annotators=5, n_heldout=3))

        with tempfile.TemporaryDirectory() as tmp:
            paths = write_simulation(result, tmp)
            dataset = load_dataset(paths["annotations"], paths["features"], paths["gold"])
            gamma, alpha = load_matrices(paths["truth"])
            heldout_ids, heldout_features = load_features(paths["heldout_features"])
            heldout_gold = load_gold(paths["heldout_gold"])

        self.assertEqual(dataset, result.dataset)
        self.assertEqual(gamma, result.params.gamma)
        self.assertEqual(alpha, result.params.alpha)
        self.assertEqual(heldout_ids, result.heldout_ids)
        np.testing.assert_array_equal(heldout_features, result.heldout_features)
        self.assertEqual(heldout_gold, result.heldout_gold)
        self.assertIsInstance(heldout_gold["heldout0"], Label)


if __name__ == '__main__':
    unittest.main()
