from .correspondence import kb_from_evidence, evidence_from_kb, indistinguishability
from .unraveling import History, UnraveledModel, unravel, last_pmorphism_check
from .search import SatVerdict, bounded_sat, valid_up_to, enumerate_models
from .audit import AuditConfig, AuditReport, axiom_audit
