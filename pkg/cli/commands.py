"""Subcommand handlers; each returns a process exit status"""

import logging
import os
import re
from functools import partial
from typing import Callable, Dict, Optional, Tuple

from config import RunConfig
from core.annotations import Dataset, load_dataset, load_features, load_gold
from core.baselines import (
    ALL,
    filter_context,
    mask_annotators,
    mask_contexts,
    per_context_labels,
    train_vote_baseline,
    write_votes,
)
from core.data_validator import AnnotationDataValidator
from core.classifier import ForestModel, dump_model
from core.em_engine import (
    FitResult,
    fit,
    predict,
    read_probability_table,
    write_posteriors,
    write_probability_table,
    write_trace,
)
from core.evaluation import agreement, align_gold, compare, evaluate, write_report
from core.exceptions import ConfigError, DatasetError
from core.noise_model import export_matrices
from core.simulator import study_scale_spec, simulate, write_simulation
from features.ngrams import build_vocabulary, featurize_corpus, write_sparse_features, write_vocabulary

logger = logging.getLogger(__name__)

ARTIFACTS = {
    "matrices": "matrices.txt",
    "posteriors": "posteriors.csv",
    "trace": "trace.txt",
    "classifier": "classifier.txt",
    "predictions": "predictions.csv",
    "summary": "summary.json",
}


def _safe_name(identifier: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", identifier)


def _scope_file_stems(contexts) -> Dict[str, str]:
    """Distinct file-name stems for ALL and every context; ALL keeps its own name"""
    stems = {ALL: ALL}
    taken = {ALL.casefold()}
    for context_id in contexts:
        base = _safe_name(context_id)
        stem, suffix = base, 1
        while stem.casefold() in taken:
            suffix += 1
            stem = f"{base}_{suffix}"
        stems[context_id] = stem
        taken.add(stem.casefold())
    return stems


def _load_training_data(config: RunConfig) -> Dataset:
    # gold labels are never loaded for fitting or aggregation
    config.require_inputs(annotations=config.data.annotations, features=config.data.features)
    return load_dataset(config.data.annotations, config.data.features)


def _write_predictions(config: RunConfig, predictor: Callable, out_dir: str, filename: str) -> Optional[str]:
    if not config.data.predict_features:
        return None
    config.require_inputs(predict_features=config.data.predict_features)
    item_ids, features = load_features(config.data.predict_features)
    probs = predictor(features)
    path = os.path.join(out_dir, filename)
    write_probability_table(path, item_ids, probs)
    logger.info(f"Wrote predictions for {len(item_ids)} held-out items to {path}")
    return path


def run_fit(config: RunConfig, dataset: Dataset, out_dir: str, label_prior=None) -> Tuple[FitResult, Dict[str, str]]:
    """
    Fit a dataset and write every fit artifact into out_dir

    Returns:
        The fit result and name -> path of the written files
    """
    result = fit(dataset, config.classifier, config.fit_config(label_prior))
    paths = {name: os.path.join(out_dir, filename) for name, filename in ARTIFACTS.items()}
    if isinstance(result.params.classifier, ForestModel):
        paths["classifier"] = os.path.join(out_dir, "classifier.joblib")

    export_matrices(result.params, paths["matrices"])
    write_posteriors(result.posterior, paths["posteriors"])
    write_trace(result.trace, paths["trace"])
    dump_model(result.params.classifier, paths["classifier"])
    if _write_predictions(config, partial(predict, result.params), out_dir, ARTIFACTS["predictions"]) is None:
        del paths["predictions"]
    write_report(paths["summary"], {
        "n_items": dataset.n_items,
        "n_contexts": len(dataset.contexts),
        "n_annotators": len(dataset.annotators),
        "n_iterations": result.n_iterations,
        "converged": result.converged,
        "final_log_likelihood": result.trace[-1],
        "classifier_updates": result.classifier_updates,
        "label_prior": list(result.params.label_prior),
    })
    return result, paths


def cmd_fit(config: RunConfig) -> int:
    """Fit the full model"""
    dataset = _load_training_data(config)
    out_dir = config.prepare_output()
    result, _ = run_fit(config, dataset, out_dir)
    logger.info(f"Fit finished after {result.n_iterations} iterations; artifacts in {out_dir}")
    return 0


def cmd_ablate(config: RunConfig) -> int:
    """Fit one ablation with the ablation label prior"""
    variant, context_id = config.ablate.variant, config.ablate.context
    if variant is None:
        raise ConfigError("ablate needs a variant (1, 2 or 3)")

    dataset = _load_training_data(config)
    if variant == 1:
        if not context_id:
            raise ConfigError("ablation variant 1 needs a context")
        transformed = filter_context(dataset, context_id)
        name = f"ablation1_{_safe_name(context_id)}"
    elif variant == 2:
        transformed = mask_contexts(dataset)
        name = "ablation2"
    else:
        transformed = mask_annotators(dataset)
        name = "ablation3"

    out_dir = config.prepare_output(name)
    result, _ = run_fit(config, transformed, out_dir, config.ablate.label_prior)
    logger.info(f"Ablation {variant} finished after {result.n_iterations} iterations; artifacts in {out_dir}")
    return 0


def cmd_simulate(config: RunConfig) -> int:
    """Draw a synthetic dataset and write it with its true matrices"""
    settings = config.simulate
    spec = study_scale_spec(
        rng_seed=config.seed,
        n_items=settings.n_items,
        n_contexts=settings.n_contexts,
        annotators_per_context=settings.annotators_per_context,
        n_annotators=settings.n_annotators,
        dimension=settings.dimension,
        noise_scale=settings.noise_scale,
        n_heldout=settings.n_heldout,
    )
    paths = write_simulation(simulate(spec), config.prepare_output())
    logger.info(f"Simulation files: {', '.join(sorted(paths.values()))}")
    return 0


def cmd_evaluate(config: RunConfig) -> int:
    """Score a prediction file, and compare it with a baseline file when one is configured"""
    settings = config.evaluate
    gold_path = settings.gold or config.data.gold
    config.require_inputs(predictions=settings.predictions, gold=gold_path)
    gold = load_gold(gold_path)

    item_ids, probs = read_probability_table(settings.predictions)
    gold_labels = align_gold(item_ids, gold)
    if settings.baseline:
        config.require_inputs(baseline=settings.baseline)
        baseline_ids, baseline_probs = read_probability_table(settings.baseline)
        if baseline_ids != item_ids:
            raise DatasetError("prediction and baseline files list different items")
        payload = compare(probs, baseline_probs, gold_labels, settings.iterations, config.seed).to_dict()
    else:
        report = evaluate(probs, gold_labels)
        payload = report.to_dict()
        logger.info(f"avg F1 {report.avg_f1:.4f}, log-loss {report.log_loss:.4f} over {report.n_items} items")

    write_report(os.path.join(config.prepare_output(), "evaluation.json"), payload)
    return 0


def cmd_aggregate(config: RunConfig) -> int:
    """Majority votes and agreement per context plus the combined condition"""
    dataset = _load_training_data(config)
    out_dir = config.prepare_output("aggregate")
    stems = _scope_file_stems(dataset.contexts)
    scores: Dict[str, float] = {}
    files: Dict[str, str] = {}
    for scope in list(dataset.contexts) + [ALL]:
        votes = per_context_labels(dataset, scope)
        files[scope] = f"votes_{stems[scope]}.csv"
        write_votes(votes, os.path.join(out_dir, files[scope]))
        scores[scope] = agreement(dataset, scope)
        logger.info(f"{scope}: {len(votes)} items, agreement {scores[scope]:.4f}")

        if config.aggregate.train_baselines and config.data.predict_features:
            baseline = train_vote_baseline(dataset, scope, config.classifier, config.seed)
            _write_predictions(config, baseline.predict_proba, out_dir, f"predictions_{stems[scope]}.csv")

    write_report(os.path.join(out_dir, "agreement.json"), {"agreement": scores, "vote_files": files})
    return 0


def cmd_featurize(config: RunConfig) -> int:
    """Vocabulary and sparse tf-idf features from an item_id,text file"""
    settings = config.featurize
    config.require_inputs(texts=settings.texts)
    frame = AnnotationDataValidator().read_table(settings.texts)
    if list(frame.columns) != ["item_id", "text"]:
        raise DatasetError("expected columns item_id,text", path=settings.texts)

    vocab = build_vocabulary(frame["text"].tolist(), settings.ngram_config())
    matrix = featurize_corpus(vocab, frame["text"].tolist())
    out_dir = config.prepare_output()
    write_vocabulary(vocab, os.path.join(out_dir, "vocabulary.tsv"))
    write_sparse_features(frame["item_id"].tolist(), matrix, os.path.join(out_dir, "features.csv"))
    logger.info(f"Featurized {len(frame)} texts into {len(vocab)} columns")
    return 0


HANDLERS = {
    "fit": cmd_fit,
    "ablate": cmd_ablate,
    "simulate": cmd_simulate,
    "evaluate": cmd_evaluate,
    "aggregate": cmd_aggregate,
    "featurize": cmd_featurize,
}
