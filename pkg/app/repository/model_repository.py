"""Repository for trained model files (key-sorted JSON)."""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Any

from app.application.services.business_rules import RuleSet
from app.application.services.dataset import LearnError
from app.application.services.decision_tree import DecisionTree
from app.application.services.knn import KnnModel
from app.application.services.random_forest import Forest
from app.application.services.term_matrix import Vocabulary, Weighting

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


class ModelFormatError(Exception):
    """Raised when a model file cannot be read."""

    pass


class ModelKind(str, Enum):
    CART = "cart"
    FOREST = "forest"
    KNN = "knn"
    RULESET = "ruleset"


Model = DecisionTree | Forest | KnnModel | RuleSet

_KINDS: dict[ModelKind, type] = {
    ModelKind.CART: DecisionTree,
    ModelKind.FOREST: Forest,
    ModelKind.KNN: KnnModel,
    ModelKind.RULESET: RuleSet,
}


@dataclass
class ModelBundle:
    """A trained model plus what is needed to featurize new inputs."""

    kind: ModelKind
    target: str
    model: Model
    label_names: tuple[str, str] = ("negative", "positive")
    vocabulary: Vocabulary | None = None  # set for document classifiers
    weighting: Weighting = Weighting.RAW_COUNT
    params: dict[str, Any] = field(default_factory=dict)

    @property
    def feature_names(self) -> list[str]:
        if isinstance(self.model, RuleSet):
            return self.model.features
        if isinstance(self.model, KnnModel):
            return list(self.model.train.feature_names)
        return list(self.model.feature_names)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "format_version": FORMAT_VERSION,
            "kind": self.kind.value,
            "target": self.target,
            "label_names": list(self.label_names),
            "weighting": self.weighting.value,
            "params": self.params,
            "model": self.model.to_dict(),
        }
        if self.vocabulary is not None:
            data["vocabulary"] = {
                "terms": list(self.vocabulary.terms),
                "doc_freq": list(self.vocabulary.doc_freq),
                "n_docs": self.vocabulary.n_docs,
            }
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ModelBundle":
        kind = ModelKind(data["kind"])
        vocab = data.get("vocabulary")
        names = data.get("label_names", ("negative", "positive"))
        return cls(
            kind=kind,
            target=str(data.get("target", "")),
            model=_KINDS[kind].from_dict(data["model"]),
            label_names=(str(names[0]), str(names[1])),
            vocabulary=(
                Vocabulary(
                    terms=tuple(vocab["terms"]),
                    doc_freq=tuple(int(d) for d in vocab["doc_freq"]),
                    n_docs=int(vocab["n_docs"]),
                )
                if vocab
                else None
            ),
            weighting=Weighting(data.get("weighting", Weighting.RAW_COUNT.value)),
            params=dict(data.get("params", {})),
        )


class ModelRepository:
    """Reads and writes ModelBundle JSON files."""

    @staticmethod
    def dumps(bundle: ModelBundle) -> str:
        """Deterministic JSON text: sorted keys, fixed indentation."""
        return json.dumps(bundle.to_dict(), sort_keys=True, indent=2) + "\n"

    def save(self, bundle: ModelBundle, stream: IO[str]) -> None:
        stream.write(self.dumps(bundle))

    def load(self, stream: IO[str]) -> ModelBundle:
        """Parse a model file.

        Raises:
            ModelFormatError: If the text is not a model file of a supported version
        """
        try:
            data = json.load(stream)
        except json.JSONDecodeError as e:
            raise ModelFormatError(f"Model file is not valid JSON: {e}") from e
        if not isinstance(data, dict) or data.get("format_version") != FORMAT_VERSION:
            raise ModelFormatError(f"Unsupported model file (expected format {FORMAT_VERSION})")
        try:
            return ModelBundle.from_dict(data)
        except (KeyError, TypeError, ValueError, IndexError, LearnError) as e:
            raise ModelFormatError(f"Malformed model file: {e!r}") from e

    def save_path(self, bundle: ModelBundle, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            self.save(bundle, f)
        logger.info(f"Wrote {bundle.kind.value} model to {path}")

    def load_path(self, path: Path) -> ModelBundle:
        with open(path, encoding="utf-8") as f:
            return self.load(f)
