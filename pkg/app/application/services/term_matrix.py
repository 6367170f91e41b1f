"""Sparse document-term matrices, TF-IDF weighting and sparsity pruning."""

import logging
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import sparse
from sklearn.feature_extraction.text import CountVectorizer

from app.application.services.text_pipeline import TokenStream

logger = logging.getLogger(__name__)


class DtmError(Exception):
    """Raised when a document-term matrix cannot be built or reduced."""

    pass


class Weighting(str, Enum):
    """Cell weighting scheme."""

    RAW_COUNT = "raw_count"
    TFIDF = "tfidf"


@dataclass(frozen=True)
class Vocabulary:
    """Training vocabulary with document frequencies."""

    terms: tuple[str, ...]
    doc_freq: tuple[int, ...]
    n_docs: int

    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.terms)}

    def idf(self) -> np.ndarray:
        """log2(n_docs / doc_freq) per term."""
        return np.log2(self.n_docs / np.asarray(self.doc_freq, dtype=float))


@dataclass(frozen=True)
class DocTermMatrix:
    """Documents x terms, stored as CSR with no explicit zeros."""

    vocab: tuple[str, ...]
    doc_ids: tuple[str, ...]
    matrix: sparse.csr_matrix
    weighting: Weighting
    vocabulary: Vocabulary  # raw document frequencies from the counting pass

    @property
    def n_docs(self) -> int:
        return self.matrix.shape[0]

    def cell(self, doc: int, term: str) -> float:
        """Value at (doc, term), 0 when absent."""
        j = self.vocabulary.index().get(term)
        return 0.0 if j is None else float(self.matrix[doc, j])

    def row(self, doc: int) -> dict[str, float]:
        """Nonzero cells of one document keyed by term."""
        r = self.matrix.getrow(doc)
        return {self.vocab[j]: float(v) for j, v in zip(r.indices, r.data)}

    def triplets(self) -> list[list]:
        """[doc_idx, term_idx, value] for every stored cell, row-major."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [
            [int(coo.row[k]), int(coo.col[k]), _plain(coo.data[k])] for k in order
        ]

    def to_dict(self) -> dict:
        return {
            "vocab": list(self.vocab),
            "doc_ids": list(self.doc_ids),
            "triplets": self.triplets(),
            "weighting": self.weighting.value,
        }


def _plain(value) -> int | float:
    value = float(value)
    return int(value) if value.is_integer() else value


def _identity(tokens):
    return tokens


def build_dtm(docs: Sequence[TokenStream], doc_ids: Sequence[str] | None = None) -> DocTermMatrix:
    """Count stems per document.

    Args:
        docs: Token streams, one per document
        doc_ids: Optional identifiers (defaults to positional indices)

    Returns:
        Raw-count DocTermMatrix with a sorted vocabulary

    Raises:
        DtmError: If there are no documents or no tokens at all
    """
    if not docs:
        raise DtmError("Cannot build a document-term matrix from an empty corpus")
    ids = tuple(doc_ids) if doc_ids is not None else tuple(str(i) for i in range(len(docs)))
    if len(ids) != len(docs):
        raise DtmError(f"Got {len(ids)} ids for {len(docs)} documents")

    vectorizer = CountVectorizer(analyzer=_identity, lowercase=False, dtype=np.int64)
    try:
        matrix = vectorizer.fit_transform([list(d.tokens) for d in docs])
    except ValueError as e:
        raise DtmError(f"No terms to index: {e}") from e

    matrix = sparse.csr_matrix(matrix)
    matrix.eliminate_zeros()
    vocab = tuple(vectorizer.get_feature_names_out().tolist())
    doc_freq = np.asarray((matrix > 0).sum(axis=0)).ravel()

    logger.info(f"Built document-term matrix: {len(ids)} docs x {len(vocab)} terms")
    return DocTermMatrix(
        vocab=vocab,
        doc_ids=ids,
        matrix=matrix,
        weighting=Weighting.RAW_COUNT,
        vocabulary=Vocabulary(
            terms=vocab, doc_freq=tuple(int(x) for x in doc_freq), n_docs=len(ids)
        ),
    )


def tfidf(dtm: DocTermMatrix) -> DocTermMatrix:
    """Reweight raw counts as tf x log2(N / df); cells of ubiquitous terms drop out."""
    if dtm.weighting is not Weighting.RAW_COUNT:
        raise DtmError("TF-IDF expects a raw-count matrix")

    weighted = sparse.csr_matrix(dtm.matrix.astype(float).multiply(dtm.vocabulary.idf()))
    weighted.eliminate_zeros()
    return DocTermMatrix(
        vocab=dtm.vocab,
        doc_ids=dtm.doc_ids,
        matrix=weighted,
        weighting=Weighting.TFIDF,
        vocabulary=dtm.vocabulary,
    )


def prune_sparse(dtm: DocTermMatrix, max_sparsity: float) -> DocTermMatrix:
    """Drop terms whose sparsity reaches max_sparsity.

    A term is kept iff doc_freq / n_docs > 1 - max_sparsity.

    Raises:
        DtmError: If max_sparsity is outside (0, 1) or every term is pruned
    """
    if not 0 < max_sparsity < 1:
        raise DtmError(f"max_sparsity must be in (0, 1), got {max_sparsity}")

    vocabulary = dtm.vocabulary
    doc_freq = np.asarray(vocabulary.doc_freq, dtype=float)
    keep = np.flatnonzero(doc_freq / vocabulary.n_docs > 1 - max_sparsity)
    if keep.size == 0:
        raise DtmError(f"All {len(dtm.vocab)} terms pruned at max_sparsity={max_sparsity}")

    terms = tuple(dtm.vocab[j] for j in keep)
    matrix = sparse.csr_matrix(dtm.matrix[:, keep])
    matrix.eliminate_zeros()
    logger.info(f"Pruned vocabulary {len(dtm.vocab)} -> {len(terms)} terms")
    return DocTermMatrix(
        vocab=terms,
        doc_ids=dtm.doc_ids,
        matrix=matrix,
        weighting=dtm.weighting,
        vocabulary=Vocabulary(
            terms=terms,
            doc_freq=tuple(vocabulary.doc_freq[j] for j in keep),
            n_docs=vocabulary.n_docs,
        ),
    )


def vocabulary_of(dtm: DocTermMatrix) -> Vocabulary:
    """Vocabulary to hand to project for documents scored later."""
    return dtm.vocabulary


def project(
    vocab: Vocabulary, tokens: TokenStream, weighting: Weighting = Weighting.RAW_COUNT
) -> dict[str, float]:
    """Map a token stream onto a fixed vocabulary.

    Out-of-vocabulary tokens are ignored; every vocabulary term is present.
    """
    counts = Counter(tokens.tokens)
    vector = {term: float(counts.get(term, 0)) for term in vocab.terms}
    if weighting is Weighting.TFIDF:
        for term, idf in zip(vocab.terms, vocab.idf()):
            vector[term] *= float(idf)
    return vector


def top_terms(dtm: DocTermMatrix, n: int = 10) -> list[tuple[str, float]]:
    """Most frequent terms across the corpus, ties broken by term."""
    totals = np.asarray(dtm.matrix.sum(axis=0)).ravel()
    ranked = sorted(zip(dtm.vocab, totals), key=lambda kv: (-kv[1], kv[0]))
    return [(term, _plain(total)) for term, total in ranked[:n]]
