"""Repository layer - file-based data access."""

from app.repository.corpus_repository import CorpusRepository
from app.repository.financial_repository import FinancialRepository
from app.repository.lexicon_repository import LexiconRepository
from app.repository.model_repository import ModelRepository

__all__ = ["CorpusRepository", "FinancialRepository", "LexiconRepository", "ModelRepository"]
