"""Storage layer for run outputs."""
from storage.file_store import RunStore, read_csv_file
from storage.models import AuditSummary, BalanceSummary, CertificationSummary, StateCheckpoint

__all__ = [
    'RunStore',
    'read_csv_file',
    'AuditSummary',
    'BalanceSummary',
    'CertificationSummary',
    'StateCheckpoint',
]
