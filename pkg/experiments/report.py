"""Study reports and their CSV, JSON and gnuplot emitters."""
import json
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Union

from pydantic import BaseModel, Field

from storage.file_store import RunStore, format_value
from utils.exceptions import StorageError
from utils.logger import setup_logger

logger = setup_logger(__name__)

Cell = Optional[float]


class StudyReport(BaseModel):
    """Table of one study, keyed by the parameter in the first column."""
    study: str
    parameter: str
    columns: List[str]
    rows: List[List[Cell]] = Field(default_factory=list)
    flags: Dict[str, bool] = Field(default_factory=dict)
    metrics: Dict[str, Optional[float]] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)

    def add_row(self, values: Dict[str, Cell]) -> None:
        """Append a row given by column name; missing columns stay empty."""
        unknown = set(values) - set(self.columns)
        if unknown:
            raise ValueError(f"Unknown report columns: {sorted(unknown)}")
        self.rows.append([None if values.get(c) is None else float(values[c]) for c in self.columns])

    def column(self, name: str) -> List[Cell]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    @property
    def passed(self) -> bool:
        return all(self.flags.values())


def strictly_decreasing(values: Sequence[Cell]) -> bool:
    present = [v for v in values if v is not None]
    return all(b < a for a, b in zip(present, present[1:]))


def nonincreasing(values: Sequence[Cell], rel_slack: float = 0.0) -> bool:
    present = [v for v in values if v is not None]
    return all(b <= a * (1.0 + rel_slack) for a, b in zip(present, present[1:]))


def bounded_by_first(values: Sequence[Cell], factor: float = 2.0) -> bool:
    """Every entry at most factor times the first one (the largest parameter)."""
    present = [v for v in values if v is not None]
    if not present:
        return True
    bound = factor * abs(present[0])
    return all(abs(v) <= bound + 1e-14 for v in present)


def emit_report(
    report: StudyReport,
    out_dir: Union[str, Path],
    fmt: Literal['csv', 'json'] = 'csv',
    gnuplot: bool = True,
) -> List[Path]:
    """Write a report as <study>.csv or <study>.json, plus <study>.dat for gnuplot.

    Flags, metrics and notes go to <study>_summary.json alongside the CSV.

    Raises:
        StorageError: On unknown format or I/O failure
    """
    store = RunStore(out_dir)
    files = []
    if fmt == 'csv':
        files.append(store.write_csv(f"{report.study}.csv", report.columns, report.rows))
        files.append(store.save_json(f"{report.study}_summary.json", {
            'study': report.study,
            'parameter': report.parameter,
            'flags': report.flags,
            'metrics': report.metrics,
            'notes': report.notes,
        }))
    elif fmt == 'json':
        files.append(store.save_json(f"{report.study}.json", report.model_dump()))
    else:
        raise StorageError(f"Unknown report format: {fmt}. Must be 'csv' or 'json'")
    if gnuplot:
        files.append(write_gnuplot(report, store))
    logger.info(f"Report {report.study} written to {store.out_dir} ({len(report.rows)} rows)")
    return files


def write_gnuplot(report: StudyReport, store: RunStore) -> Path:
    """Whitespace-separated columns, '#' header, NaN for empty cells."""
    lines = ["# " + " ".join(report.columns)]
    for row in report.rows:
        lines.append(" ".join('NaN' if v is None else format_value(v) for v in row))
    return store.write_text(f"{report.study}.dat", "\n".join(lines) + "\n")


def load_report(path: Union[str, Path]) -> StudyReport:
    """Read a report written with fmt='json'.

    Raises:
        StorageError: If the file is missing or malformed
    """
    path = Path(path)
    try:
        with open(path, 'r') as f:
            return StudyReport.model_validate(json.load(f))
    except FileNotFoundError:
        raise StorageError(f"File not found: {path}")
    except (json.JSONDecodeError, ValueError) as e:
        raise StorageError(f"Invalid report {path}: {e}")
