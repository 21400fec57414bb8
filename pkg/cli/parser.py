"""Command-line argument parsing"""

import argparse

COMMANDS = {
    "fit": "fit the full model and write matrices, posteriors, trace and classifier",
    "ablate": "fit one ablation (1: single context, 2: contexts masked, 3: annotators masked)",
    "simulate": "draw a synthetic dataset with known parameters",
    "evaluate": "score predictions against gold labels, optionally against a baseline",
    "aggregate": "majority votes and agreement per context and over all contexts",
    "featurize": "build an n-gram vocabulary and tf-idf features from item texts",
}


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--seed", type=int, help="random seed (overrides CONSTANCE_SEED and the config file)")
    common.add_argument("--out", dest="out_dir", help="output directory (overrides CONSTANCE_OUT_DIR)")
    return common


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per batch operation"""
    parser = argparse.ArgumentParser(
        prog="constance",
        description="Aggregate conflicting crowd annotations collected under several contexts",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_flags()

    for name, help_text in COMMANDS.items():
        sub = subparsers.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name == "ablate":
            sub.add_argument("--variant", type=int, choices=(1, 2, 3), help="ablation variant")
            sub.add_argument("--context", help="context kept by variant 1")
    return parser
