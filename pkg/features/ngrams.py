"""Character and word n-gram features with a frequency cutoff and tf-idf weighting"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from sklearn.feature_extraction.text import CountVectorizer, TfidfTransformer

from core.annotations import write_features
from core.decorators import log_execution_time
from core.exceptions import ConfigError, ConStanceError
from core.utils import write_lines

logger = logging.getLogger(__name__)

NgramRange = Optional[Tuple[int, int]]


@dataclass(frozen=True)
class NgramConfig:
    """Which n-grams to extract; a range of None disables that family"""

    char_range: NgramRange = (3, 5)
    word_range: NgramRange = (1, 3)
    min_count: int = 10

    def __post_init__(self):
        for name in ("char_range", "word_range"):
            value = getattr(self, name)
            if value is None:
                continue
            low, high = (int(v) for v in value)
            if low < 1 or high < low:
                raise ConfigError(f"{name} must satisfy 1 <= low <= high, got {value}")
            object.__setattr__(self, name, (low, high))
        if self.char_range is None and self.word_range is None:
            raise ConfigError("at least one of char_range and word_range is required")
        if self.min_count < 1:
            raise ConfigError("min_count must be at least 1")

    def analyze(self, text: str) -> List[str]:
        """All n-gram tokens of a text, with repeats"""
        lowered = text.lower()
        tokens: List[str] = []
        if self.char_range is not None:
            low, high = self.char_range
            for n in range(low, high + 1):
                tokens.extend(lowered[i:i + n] for i in range(len(lowered) - n + 1))
        if self.word_range is not None:
            words = lowered.split()
            low, high = self.word_range
            for n in range(low, high + 1):
                tokens.extend(" ".join(words[i:i + n]) for i in range(len(words) - n + 1))
        return tokens


@dataclass(frozen=True, eq=False)
class Vocabulary:
    """
    Retained tokens, their document frequencies and the corpus size.

    Indices follow lexicographic token order.
    """

    token_index: Dict[str, int]
    document_frequency: Dict[str, int]
    n_documents: int
    config: NgramConfig = field(default_factory=NgramConfig)

    def __len__(self) -> int:
        return len(self.token_index)

    @property
    def tokens(self) -> List[str]:
        return sorted(self.token_index, key=self.token_index.get)

    @cached_property
    def tfidf(self) -> TfidfTransformer:
        """
        Smoothed idf weighting, log((1 + N) / (1 + df)) + 1, fitted on a
        presence matrix rebuilt from the stored document frequencies
        """
        df = np.array([self.document_frequency[token] for token in self.tokens], dtype=int)
        rows = np.concatenate([np.arange(count) for count in df]) if len(df) else np.array([], dtype=int)
        columns = np.repeat(np.arange(len(df)), df)
        presence = sparse.csr_matrix(
            (np.ones(len(columns)), (rows, columns)), shape=(self.n_documents, len(df))
        )
        return TfidfTransformer(norm=None, smooth_idf=True).fit(presence)

    @property
    def idf(self) -> np.ndarray:
        return self.tfidf.idf_


@log_execution_time()
def build_vocabulary(corpus: Sequence[str], config: Optional[NgramConfig] = None) -> Vocabulary:
    """
    Count n-grams over a corpus and keep those occurring at least min_count times

    Args:
        corpus: Documents
        config: N-gram ranges and cutoff

    Returns:
        Vocabulary (possibly empty, which is logged as a warning)

    Raises:
        ConStanceError: If the corpus is empty
    """
    config = config or NgramConfig()
    corpus = list(corpus)
    if not corpus:
        raise ConStanceError("cannot build a vocabulary from an empty corpus")

    vectorizer = CountVectorizer(analyzer=config.analyze)
    try:
        counts = vectorizer.fit_transform(corpus).tocsc()
    except ValueError:
        # raised when no document yields a single token
        counts = None

    token_index: Dict[str, int] = {}
    document_frequency: Dict[str, int] = {}
    if counts is not None:
        totals = np.asarray(counts.sum(axis=0)).ravel()
        df = np.diff(counts.indptr)
        for token, column in sorted(vectorizer.vocabulary_.items()):
            if totals[column] >= config.min_count:
                token_index[token] = len(token_index)
                document_frequency[token] = int(df[column])

    if not token_index:
        logger.warning(f"Vocabulary is empty: no n-gram occurs {config.min_count} or more times")
    else:
        logger.info(f"Built vocabulary of {len(token_index)} tokens from {len(corpus)} documents")
    return Vocabulary(token_index, document_frequency, len(corpus), config)


def featurize_corpus(vocab: Vocabulary, texts: Sequence[str]) -> sparse.csr_matrix:
    """
    Tf-idf rows for many texts: raw count times smoothed idf, unknown tokens ignored

    Args:
        vocab: Built vocabulary
        texts: Documents

    Returns:
        (len(texts), len(vocab)) sparse matrix
    """
    texts = list(texts)
    if len(vocab) == 0:
        return sparse.csr_matrix((len(texts), 0))
    vectorizer = CountVectorizer(analyzer=vocab.config.analyze, vocabulary=vocab.token_index)
    weighted = sparse.csr_matrix(vocab.tfidf.transform(vectorizer.transform(texts).astype(float)))
    weighted.sort_indices()
    return weighted


def featurize(vocab: Vocabulary, text: str) -> sparse.csr_matrix:
    """Tf-idf row vector of one text"""
    return featurize_corpus(vocab, [text])


def _escape(token: str) -> str:
    return token.encode("unicode_escape").decode("ascii")


def _unescape(token: str) -> str:
    return token.encode("ascii").decode("unicode_escape")


def _range_text(value: NgramRange) -> str:
    return "none" if value is None else f"{value[0]} {value[1]}"


def _parse_range(text: str) -> NgramRange:
    return None if text == "none" else tuple(int(v) for v in text.split())


def write_vocabulary(vocab: Vocabulary, path: str) -> None:
    """
    Vocabulary dump: four `#` header lines, then token<TAB>index<TAB>df

    Tokens are written with backslash escapes so tabs and newlines inside
    character n-grams survive.
    """
    lines = [
        f"# n_documents {vocab.n_documents}",
        f"# char_range {_range_text(vocab.config.char_range)}",
        f"# word_range {_range_text(vocab.config.word_range)}",
        f"# min_count {vocab.config.min_count}",
    ]
    for token in vocab.tokens:
        lines.append(f"{_escape(token)}\t{vocab.token_index[token]}\t{vocab.document_frequency[token]}")
    write_lines(path, lines)


def read_vocabulary(path: str) -> Vocabulary:
    """Inverse of write_vocabulary"""
    with open(path, "r", encoding="utf-8") as handle:
        lines = handle.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 4:
        raise ConStanceError(f"{path}: missing vocabulary header")

    header = {}
    for line in lines[:4]:
        if not line.startswith("# "):
            raise ConStanceError(f"{path}: malformed header line {line!r}")
        key, _, value = line[2:].partition(" ")
        header[key] = value
    try:
        config = NgramConfig(
            _parse_range(header["char_range"]),
            _parse_range(header["word_range"]),
            int(header["min_count"]),
        )
        n_documents = int(header["n_documents"])
    except (KeyError, ValueError) as e:
        raise ConStanceError(f"{path}: bad vocabulary header: {e}")

    token_index: Dict[str, int] = {}
    document_frequency: Dict[str, int] = {}
    for line_number, line in enumerate(lines[4:], start=5):
        parts = line.split("\t")
        if len(parts) != 3:
            raise ConStanceError(f"{path}: line {line_number}: expected token, index and df")
        token = _unescape(parts[0])
        token_index[token] = int(parts[1])
        document_frequency[token] = int(parts[2])
    if sorted(token_index.values()) != list(range(len(token_index))):
        raise ConStanceError(f"{path}: token indices are not dense")
    return Vocabulary(token_index, document_frequency, n_documents, config)


def write_sparse_features(item_ids: Sequence[str], matrix, path: str) -> None:
    """Feature rows in the item_id,feature_index,value triplet format"""
    write_features(path, item_ids, sparse.csr_matrix(matrix))
