"""Use cases - application orchestration."""

from app.application.use_cases.analyze_sentiment import AnalyzeSentimentUseCase
from app.application.use_cases.check_benford import CheckBenfordUseCase
from app.application.use_cases.classify_documents import ClassifyDocumentsUseCase
from app.application.use_cases.ingest_corpus import IngestCorpusUseCase
from app.application.use_cases.predict_poi import PredictPoiUseCase
from app.application.use_cases.render_rules import RenderRulesUseCase
from app.application.use_cases.scan_pii import ScanPiiUseCase
from app.application.use_cases.train_model import TrainModelUseCase

__all__ = [
    "AnalyzeSentimentUseCase",
    "CheckBenfordUseCase",
    "ClassifyDocumentsUseCase",
    "IngestCorpusUseCase",
    "PredictPoiUseCase",
    "RenderRulesUseCase",
    "ScanPiiUseCase",
    "TrainModelUseCase",
]
