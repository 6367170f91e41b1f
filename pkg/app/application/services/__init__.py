"""Services - business logic."""

from app.application.services.benford_analyzer import BenfordAnalyzer
from app.application.services.business_rules import RuleSet
from app.application.services.pii_scanner import PiiScanner

__all__ = ["BenfordAnalyzer", "PiiScanner", "RuleSet"]
