import os
import logging
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, Optional, Tuple

from dotenv import load_dotenv

from core.baselines import ABLATION_PRIOR
from core.classifier import ClassifierSpec
from core.em_engine import FitConfig
from core.exceptions import ConfigError
from core.utils import ensure_directory, load_json_file
from features.ngrams import NgramConfig

# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class DataSection:
    """Input files; gold is only read by evaluation"""

    annotations: Optional[str] = None
    features: Optional[str] = None
    gold: Optional[str] = None
    predict_features: Optional[str] = None


@dataclass(frozen=True)
class AblateSection:
    variant: Optional[int] = None
    context: Optional[str] = None
    label_prior: Tuple[float, ...] = ABLATION_PRIOR

    def __post_init__(self):
        object.__setattr__(self, "label_prior", tuple(self.label_prior))
        if self.variant is not None and self.variant not in (1, 2, 3):
            raise ConfigError(f"ablation variant must be 1, 2 or 3, got {self.variant}")


@dataclass(frozen=True)
class SimulateSection:
    """Defaults give the 562-item, 6-context, 3-per-context design"""

    n_items: int = 562
    n_contexts: int = 6
    annotators_per_context: int = 3
    n_annotators: int = 30
    dimension: int = 10
    noise_scale: float = 1.0
    n_heldout: int = 0

    def __post_init__(self):
        if self.n_items < 1 or self.n_contexts < 1 or self.n_annotators < 1 or self.dimension < 1:
            raise ConfigError("simulation sizes must be positive")


@dataclass(frozen=True)
class EvaluateSection:
    predictions: Optional[str] = None
    baseline: Optional[str] = None
    gold: Optional[str] = None
    iterations: int = 1000

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigError("bootstrap iterations must be at least 1")


@dataclass(frozen=True)
class AggregateSection:
    train_baselines: bool = True


@dataclass(frozen=True)
class FeaturizeSection:
    texts: Optional[str] = None
    char_range: Optional[Tuple[int, int]] = (3, 5)
    word_range: Optional[Tuple[int, int]] = (1, 3)
    min_count: int = 10

    def ngram_config(self) -> NgramConfig:
        return NgramConfig(self.char_range, self.word_range, self.min_count)


@dataclass(frozen=True)
class OutputSection:
    out_dir: str = "output"
    log_level: str = "INFO"

    def __post_init__(self):
        if self.log_level.upper() not in LOG_LEVELS:
            raise ConfigError(f"log_level must be one of {', '.join(LOG_LEVELS)}")


SECTIONS = {
    "data": DataSection,
    "fit": FitConfig,
    "classifier": ClassifierSpec,
    "ablate": AblateSection,
    "simulate": SimulateSection,
    "evaluate": EvaluateSection,
    "aggregate": AggregateSection,
    "featurize": FeaturizeSection,
    "output": OutputSection,
}


def _build_section(name: str, values: Any):
    section_cls = SECTIONS[name]
    if not isinstance(values, dict):
        raise ConfigError(f"config section {name!r} must be an object")
    known = {f.name for f in fields(section_cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown keys in section {name!r}: {', '.join(unknown)}")
    converted = {k: tuple(v) if isinstance(v, list) else v for k, v in values.items()}
    try:
        return section_cls(**converted)
    except TypeError as e:
        raise ConfigError(f"section {name!r}: {e}")


@dataclass(frozen=True)
class RunConfig:
    """Settings of one CLI invocation"""

    seed: int = 0
    data: DataSection = field(default_factory=DataSection)
    fit: FitConfig = field(default_factory=FitConfig)
    classifier: ClassifierSpec = field(default_factory=ClassifierSpec)
    ablate: AblateSection = field(default_factory=AblateSection)
    simulate: SimulateSection = field(default_factory=SimulateSection)
    evaluate: EvaluateSection = field(default_factory=EvaluateSection)
    aggregate: AggregateSection = field(default_factory=AggregateSection)
    featurize: FeaturizeSection = field(default_factory=FeaturizeSection)
    output: OutputSection = field(default_factory=OutputSection)

    def __post_init__(self):
        """Validate configuration after initialization"""
        if self.seed < 0:
            raise ConfigError("seed cannot be negative")

    @property
    def out_dir(self) -> str:
        return self.output.out_dir

    @property
    def log_level(self) -> str:
        return self.output.log_level.upper()

    def fit_config(self, label_prior: Optional[Tuple[float, ...]] = None) -> FitConfig:
        """FitConfig with the run seed (and optionally another label prior) applied"""
        changes = {"rng_seed": self.seed}
        if label_prior is not None:
            changes["label_prior"] = label_prior
        return replace(self.fit, **changes)

    def require_inputs(self, **paths: Optional[str]) -> None:
        """
        Check that named input paths are configured and exist

        Raises:
            ConfigError: Naming the first missing setting or file
        """
        for name, path in paths.items():
            if not path:
                raise ConfigError(f"{name} is not configured")
            if not os.path.exists(path):
                raise ConfigError(f"{name} file not found: {path}")

    def prepare_output(self, *parts: str) -> str:
        """Create (and check writability of) the output directory or a subdirectory of it"""
        return ensure_directory(os.path.join(self.out_dir, *parts))

    @classmethod
    def load(cls, path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> "RunConfig":
        """
        Build a config from a JSON file, the environment and command-line overrides

        Command-line flags beat environment variables (CONSTANCE_SEED,
        CONSTANCE_OUT_DIR, LOG_LEVEL), which beat the file, which beats the
        built-in defaults.

        Args:
            path: Optional JSON config file
            overrides: Flag values (seed, out_dir, variant, context); None entries are ignored

        Returns:
            Validated RunConfig

        Raises:
            ConfigError: On unknown keys, bad values or an unreadable file
        """
        raw: Dict[str, Any] = {}
        if path:
            try:
                raw = load_json_file(path)
            except (OSError, ValueError) as e:
                raise ConfigError(f"cannot read config file {path}: {e}")

        unknown = sorted(set(raw) - set(SECTIONS) - {"seed"})
        if unknown:
            raise ConfigError(f"unknown config sections: {', '.join(unknown)}")

        sections = {name: _build_section(name, raw.get(name, {})) for name in SECTIONS}
        seed = raw.get("seed", sections["fit"].rng_seed)

        try:
            if os.getenv("CONSTANCE_SEED"):
                seed = int(os.getenv("CONSTANCE_SEED"))
        except ValueError as e:
            raise ConfigError(f"Invalid numeric value in CONSTANCE_SEED: {e}")
        output = sections["output"]
        if os.getenv("CONSTANCE_OUT_DIR"):
            output = replace(output, out_dir=os.getenv("CONSTANCE_OUT_DIR"))
        if os.getenv("LOG_LEVEL"):
            output = replace(output, log_level=os.getenv("LOG_LEVEL"))

        overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
        if "seed" in overrides:
            seed = int(overrides["seed"])
        if "out_dir" in overrides:
            output = replace(output, out_dir=overrides["out_dir"])
        ablate = sections["ablate"]
        if "variant" in overrides:
            ablate = replace(ablate, variant=int(overrides["variant"]))
        if "context" in overrides:
            ablate = replace(ablate, context=overrides["context"])

        sections.update(output=output, ablate=ablate)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ConfigError(f"seed must be an integer, got {seed!r}")
        config = cls(seed=seed, **sections)
        logger.debug(f"Loaded run config (seed {config.seed}, out_dir {config.out_dir})")
        return config
