"""File-based storage for run outputs (JSON summaries, CSV tables, checkpoints)."""
import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

from utils.exceptions import StorageError
from utils.logger import setup_logger

logger = setup_logger(__name__)


def format_value(value: Any) -> str:
    """Exact, locale-free text for one CSV cell (repr round-trips floats)."""
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, 'item'):
        return format_value(value.item())
    return str(value)


def parse_value(text: str) -> Union[float, str, None]:
    if text == '':
        return None
    try:
        return float(text)
    except ValueError:
        return text


class RunStore:
    """Output directory of one run or study."""

    def __init__(self, out_dir: Union[str, Path] = "runs"):
        """Initialize run store.

        Args:
            out_dir: Directory for output files (created if missing)

        Raises:
            StorageError: If the directory cannot be created
        """
        self.out_dir = Path(out_dir)
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise StorageError(f"Cannot create output directory {self.out_dir}: {e}")

    def path(self, filename: str) -> Path:
        return self.out_dir / filename

    def write_text(self, filename: str, text: str) -> Path:
        file_path = self.path(filename)
        temp_path = file_path.with_name(file_path.name + '.tmp')
        try:
            file_path.parent.mkdir(parents=True, exist_ok=True)
            with open(temp_path, 'w', newline='') as f:
                f.write(text)
            temp_path.replace(file_path)
        except OSError as e:
            if temp_path.exists():
                temp_path.unlink()
            raise StorageError(f"Failed to save {filename}: {e}")
        return file_path

    # ------------------------------------------------------------------
    # JSON
    # ------------------------------------------------------------------
    def load_json(self, filename: str) -> Dict[str, Any]:
        """Load JSON file.

        Args:
            filename: Name relative to the output directory

        Returns:
            dict: Loaded data

        Raises:
            StorageError: If the file is missing or not valid JSON
        """
        file_path = self.path(filename)
        try:
            with open(file_path, 'r') as f:
                data = json.load(f)
        except FileNotFoundError:
            raise StorageError(f"File not found: {file_path}")
        except json.JSONDecodeError as e:
            raise StorageError(f"Invalid JSON in {filename}: {e}")
        logger.debug(f"Loaded {filename}")
        return data

    def save_json(self, filename: str, data: Dict[str, Any]) -> Path:
        """Save data to a JSON file atomically (temp file, then rename).

        Raises:
            StorageError: If the file cannot be written or data is not serializable
        """
        try:
            text = json.dumps(data, indent=2, sort_keys=False)
        except (TypeError, ValueError) as e:
            raise StorageError(f"Cannot serialize {filename}: {e}")
        file_path = self.write_text(filename, text + "\n")
        logger.debug(f"Saved {filename}")
        return file_path

    # ------------------------------------------------------------------
    # CSV
    # ------------------------------------------------------------------
    def write_csv(self, filename: str, columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> Path:
        """Write a table with a fixed column order.

        Raises:
            StorageError: If a row does not match the header
        """
        lines = [','.join(columns)]
        for row in rows:
            if len(row) != len(columns):
                raise StorageError(f"{filename}: row has {len(row)} cells, header has {len(columns)}")
            lines.append(','.join(format_value(v) for v in row))
        file_path = self.write_text(filename, "\n".join(lines) + "\n")
        logger.debug(f"Saved {filename}: {len(rows)} rows")
        return file_path

    def read_csv(self, filename: str) -> Tuple[List[str], List[List[Union[float, str]]]]:
        """Read a table written by write_csv.

        Returns:
            tuple: (columns, rows) with numeric cells parsed as floats
        """
        return read_csv_file(self.path(filename))

    # ------------------------------------------------------------------
    # Checkpoints
    # ------------------------------------------------------------------
    def save_checkpoint(self, step: int, data: Dict[str, Any]) -> Path:
        return self.save_json(f"checkpoints/step_{step:06d}.json", data)

    def load_checkpoint(self, step: int) -> Dict[str, Any]:
        return self.load_json(f"checkpoints/step_{step:06d}.json")

    def list_checkpoints(self) -> List[int]:
        folder = self.path("checkpoints")
        if not folder.exists():
            return []
        return sorted(int(p.stem.split('_')[1]) for p in folder.glob("step_*.json"))


def read_csv_file(path: Union[str, Path]) -> Tuple[List[str], List[List[Union[float, str]]]]:
    """Read a CSV table from any path.

    Raises:
        StorageError: If the file is missing or empty
    """
    path = Path(path)
    try:
        with open(path, 'r', newline='') as f:
            reader = csv.reader(f)
            try:
                columns = next(reader)
            except StopIteration:
                raise StorageError(f"Empty CSV file: {path}")
            rows = [[parse_value(cell) for cell in row] for row in reader if row]
    except FileNotFoundError:
        raise StorageError(f"File not found: {path}")
    return columns, rows
