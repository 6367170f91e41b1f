"""Business-rule sets: extraction from trees, application, text rendering and parsing."""

import logging
import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

from app.application.services.dataset import LabeledDataset, LearnError
from app.application.services.decision_tree import DecisionTree, TreeNode

logger = logging.getLogger(__name__)


class RuleMatchError(LearnError):
    """Raised when no rule matches a vector and the rule set has no default label."""

    pass


LESS = "<"
AT_LEAST = ">="

_RULE_LINE = re.compile(r"^Rule\s+(\d+):\s+when\s+(.+?)\s+then\s+(.+?)\s+\(([01])\)\s*$")
_DEFAULT_LINE = re.compile(r"^Default:\s+(.+?)\s+\(([01])\)\s*$")
_CONDITION = re.compile(r"^(\S+)\s*(<|>=)\s*(\S+)$")
_ALWAYS = "always"


def format_threshold(value: float, currency: bool = False) -> str:
    """Whole numbers print without decimals; currency adds $ and thousands separators."""
    if currency:
        return f"${value:,.0f}" if float(value).is_integer() else f"${value:,.2f}"
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def parse_threshold(text: str) -> tuple[float, bool]:
    """Inverse of format_threshold; returns (value, was_currency)."""
    currency = "$" in text
    try:
        return float(text.replace("$", "").replace(",", "")), currency
    except ValueError as e:
        raise LearnError(f"Bad rule threshold: {text!r}") from e


@dataclass(frozen=True)
class Condition:
    """Atomic test feature < threshold or feature >= threshold."""

    feature: str
    op: str
    threshold: float
    currency: bool = False

    def holds(self, features: Mapping[str, float]) -> bool:
        value = float(features.get(self.feature, 0.0))
        return value < self.threshold if self.op == LESS else value >= self.threshold

    def render(self) -> str:
        return f"{self.feature} {self.op} {format_threshold(self.threshold, self.currency)}"


@dataclass(frozen=True)
class Rule:
    """Conjunction of conditions implying a label."""

    conditions: tuple[Condition, ...]
    label: int

    def matches(self, features: Mapping[str, float]) -> bool:
        return all(c.holds(features) for c in self.conditions)

    @property
    def features(self) -> set[str]:
        return {c.feature for c in self.conditions}


@dataclass(frozen=True)
class RuleSet:
    """Ordered rules evaluated first-match-wins."""

    rules: tuple[Rule, ...]
    default_label: int | None = None
    label_names: tuple[str, str] = ("negative", "positive")

    def apply(self, features: Mapping[str, float]) -> int:
        """Label of the first matching rule, else the default.

        Raises:
            RuleMatchError: If nothing matches and there is no default
        """
        rule = self.first_match(features)
        if rule is not None:
            return rule.label
        if self.default_label is None:
            raise RuleMatchError(f"No rule matches {dict(features)} and no default label is set")
        return self.default_label

    def first_match(self, features: Mapping[str, float]) -> Rule | None:
        return next((r for r in self.rules if r.matches(features)), None)

    def matching(self, features: Mapping[str, float]) -> list[int]:
        """1-based numbers of every rule that fires."""
        return [i for i, r in enumerate(self.rules, start=1) if r.matches(features)]

    def positive_only(self) -> "RuleSet":
        """Only the label-1 rules, with everything else defaulting to 0."""
        return RuleSet(
            rules=tuple(r for r in self.rules if r.label == 1),
            default_label=0,
            label_names=self.label_names,
        )

    @property
    def features(self) -> list[str]:
        return sorted(set().union(*(r.features for r in self.rules)))

    def render(self) -> str:
        """One line per rule: "Rule N: when A < t AND B >= t then name (label)"."""
        lines = []
        for i, rule in enumerate(self.rules, start=1):
            when = " AND ".join(c.render() for c in rule.conditions) or _ALWAYS
            name = self.label_names[rule.label]
            lines.append(f"Rule {i}: when {when} then {name} ({rule.label})")
        if self.default_label is not None:
            lines.append(f"Default: {self.label_names[self.default_label]} ({self.default_label})")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict[str, Any]:
        return {
            "label_names": list(self.label_names),
            "default_label": self.default_label,
            "rules": [
                {
                    "label": r.label,
                    "conditions": [
                        {"feature": c.feature, "op": c.op, "threshold": c.threshold}
                        | ({"currency": True} if c.currency else {})
                        for c in r.conditions
                    ],
                }
                for r in self.rules
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RuleSet":
        rules = tuple(
            Rule(
                conditions=tuple(
                    _condition(
                        c["feature"], c["op"], float(c["threshold"]), bool(c.get("currency"))
                    )
                    for c in r["conditions"]
                ),
                label=_label(r["label"]),
            )
            for r in data["rules"]
        )
        default = data.get("default_label")
        names = data.get("label_names", ("negative", "positive"))
        return cls(
            rules=rules,
            default_label=None if default is None else _label(default),
            label_names=(str(names[0]), str(names[1])),
        )


def _label(value: Any) -> int:
    label = int(value)
    if label not in (0, 1):
        raise LearnError(f"Rule label must be 0 or 1, got {value!r}")
    return label


def _condition(feature: str, op: str, threshold: float, currency: bool = False) -> Condition:
    if op not in (LESS, AT_LEAST):
        raise LearnError(f"Unknown rule operator {op!r}")
    return Condition(feature=feature, op=op, threshold=threshold, currency=currency)


def extract_rules(
    tree: DecisionTree, label_names: tuple[str, str] = ("negative", "positive")
) -> RuleSet:
    """One rule per leaf, conditions in root-to-leaf order.

    Leaves are visited left to right and grouped by label, label 0 first.
    Tree-derived rules are exclusive and exhaustive, so no default is set.
    """
    found: list[Rule] = []

    def walk(node: TreeNode, path: tuple[Condition, ...]) -> None:
        if node.is_leaf:
            found.append(Rule(conditions=path, label=node.label))
            return
        walk(node.left, path + (Condition(node.feature, LESS, node.threshold),))
        walk(node.right, path + (Condition(node.feature, AT_LEAST, node.threshold),))

    walk(tree.root, ())
    ordered = [r for r in found if r.label == 0] + [r for r in found if r.label == 1]
    return RuleSet(rules=tuple(ordered), default_label=None, label_names=label_names)


def apply_ruleset(rs: RuleSet, features: Mapping[str, float]) -> int:
    return rs.apply(features)


def parse_ruleset(text: str) -> RuleSet:
    """Read rules rendered by RuleSet.render back.

    Blank lines and lines starting with '#' are skipped. Rule numbers must run 1..n.

    Raises:
        LearnError: On a line that is not a rule, a default or a comment
    """
    rules: list[Rule] = []
    names: dict[int, str] = {}
    default: int | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if m := _DEFAULT_LINE.match(line):
            default = int(m.group(2))
            names.setdefault(default, m.group(1))
            continue
        m = _RULE_LINE.match(line)
        if m is None:
            raise LearnError(f"Line {lineno}: not a rule: {line!r}")
        if int(m.group(1)) != len(rules) + 1:
            raise LearnError(
                f"Line {lineno}: expected Rule {len(rules) + 1}, got Rule {m.group(1)}"
            )

        conditions = []
        if m.group(2) != _ALWAYS:
            for part in m.group(2).split(" AND "):
                cm = _CONDITION.match(part.strip())
                if cm is None:
                    raise LearnError(f"Line {lineno}: bad condition {part!r}")
                value, currency = parse_threshold(cm.group(3))
                conditions.append(_condition(cm.group(1), cm.group(2), value, currency))

        label = int(m.group(4))
        names.setdefault(label, m.group(3))
        rules.append(Rule(conditions=tuple(conditions), label=label))

    if not rules:
        raise LearnError("No rules found")
    return RuleSet(
        rules=tuple(rules),
        default_label=default,
        label_names=(names.get(0, "negative"), names.get(1, "positive")),
    )


@dataclass
class RuleCoverage:
    """Hits of one rule on a labeled dataset."""

    rule: int
    label: int
    hits: int = 0
    correct: int = 0
    features: list[str] = field(default_factory=list)

    @property
    def accuracy(self) -> float | None:
        return self.correct / self.hits if self.hits else None

    def to_dict(self) -> dict[str, Any]:
        return {
            "rule": self.rule,
            "label": self.label,
            "hits": self.hits,
            "correct": self.correct,
            "accuracy": self.accuracy,
        }


def ruleset_coverage(rs: RuleSet, ds: LabeledDataset) -> list[RuleCoverage]:
    """Per-rule first-match hits and how many of them carry the rule's label."""
    coverage = [
        RuleCoverage(rule=i, label=r.label, features=sorted(r.features))
        for i, r in enumerate(rs.rules, start=1)
    ]
    for i in range(len(ds)):
        features = ds.row_features(i)
        for cov, rule in zip(coverage, rs.rules):
            if rule.matches(features):
                cov.hits += 1
                cov.correct += int(rule.label == int(ds.y[i]))
                break
    return coverage
