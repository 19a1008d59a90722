import csv
import math
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

import scipy.io

from src.repositories.base_repository import BaseRepository

SIGNIFICANT_DIGITS = 15


def format_number(value: Any) -> str:
    """Floats with 15 significant digits; everything else via str()."""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.{SIGNIFICANT_DIGITS}g}"
    if hasattr(value, "dtype") and getattr(value.dtype, "kind", "") == "f":
        return format_number(float(value))
    return str(value)


class ArtifactRepository(BaseRepository):
    """
    CSV tables, text reports, Matrix Market pencils and eigenfunction dumps.

    Every CSV starts with a single `# generated <timestamp>` line; the rest of
    the file depends only on the run configuration.
    """

    def write_table(self, name: str, columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> Path:
        rows = list(rows)
        with self._open(name) as handle:
            handle.write(f"# generated {datetime.now().isoformat(timespec='seconds')}\n")
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_number(row.get(col, "")) for col in columns])
        self.logger.info(f"Wrote table {self.path_for(name)} ({len(rows)} rows)")
        return self.path_for(name)

    def write_report(self, name: str, lines: List[str]) -> Path:
        with self._open(name) as handle:
            handle.write("\n".join(lines) + "\n")
        self.logger.info(f"Wrote report {self.path_for(name)}")
        return self.path_for(name)

    def write_matrix(self, name: str, matrix, comment: str = "") -> Path:
        path = self.path_for(name)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            scipy.io.mmwrite(str(path), matrix, comment=comment)
        except OSError as e:
            self.logger.error(f"Error writing matrix {path}: {e}")
            raise
        self.logger.debug(f"Wrote matrix {path} shape={matrix.shape}")
        return path

    def write_lines(self, name: str, lines: Iterable[str]) -> Path:
        count = 0
        with self._open(name) as handle:
            for line in lines:
                handle.write(line + "\n")
                count += 1
        self.logger.info(f"Wrote {self.path_for(name)} ({count} lines)")
        return self.path_for(name)
