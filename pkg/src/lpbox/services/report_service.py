import csv
import io
import json
import logging
import time
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Tuple

from lpbox import __version__
from lpbox.core.config import settings
from lpbox.models.data_models import ExperimentConfig, ExperimentReport
from lpbox.utils.archiver import archive_run_directory
from lpbox.utils.file_handler import save_text_file

logger = logging.getLogger(__name__)

CSV_SCHEMA_VERSION = 1


def start_report(config: ExperimentConfig) -> ExperimentReport:
    return ExperimentReport(
        experiment=config.experiment,
        version=__version__,
        seed=config.seed,
        config=config.model_dump(mode="json"),
    )


class Stopwatch:
    """Wall-clock timer for ExperimentReport.wall_clock_seconds."""

    def __init__(self):
        self._start = time.perf_counter()

    def stop(self, report: ExperimentReport) -> ExperimentReport:
        report.wall_clock_seconds = round(time.perf_counter() - self._start, 3)
        return report


def rows_to_csv(rows: List[Dict[str, Any]], generated_at: str) -> str:
    """
    CSV text with two comment lines (schema, generation time) followed by the
    header and the rows. Columns are the union of row keys in first-seen order.
    """
    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    buffer = io.StringIO()
    buffer.write(f"# schema={CSV_SCHEMA_VERSION}\n")
    buffer.write(f"# generated_at={generated_at}\n")
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: _cell(row.get(key)) for key in columns})
    return buffer.getvalue()


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


class ReportService:
    def __init__(self, runs_dir: Path | None = None, archive_dir: Path | None = None):
        self.runs_dir = Path(runs_dir) if runs_dir else settings.runs_dir
        self.archive_dir = Path(archive_dir) if archive_dir else settings.archive_dir

    def run_directory(self, report: ExperimentReport, output_dir: Path | None = None) -> Path:
        if output_dir is not None:
            return Path(output_dir)
        timestamp = report.started_at.strftime("%Y%m%d_%H%M%S")
        return self.runs_dir / f"{report.experiment}_{timestamp}"

    def write_report(self, report: ExperimentReport, output_dir: Path | None = None) -> Tuple[bool, str]:
        """Writes report.json, one CSV per table and fixtures.json (when pins were recorded)."""
        out_dir = self.run_directory(report, output_dir)
        generated_at = datetime.now().isoformat(timespec="seconds")
        try:
            document = report.model_dump(mode="json")
            document["passed"] = report.passed
            save_text_file("report.json", json.dumps(document, indent=2, sort_keys=False) + "\n", out_dir)
            for name, rows in sorted(report.tables.items()):
                save_text_file(f"{name}.csv", rows_to_csv(rows, generated_at), out_dir)
            if report.fixtures:
                save_text_file("fixtures.json", json.dumps(report.fixtures, indent=2) + "\n", out_dir)
        except (OSError, TypeError, ValueError) as e:
            return False, f"Failed to write report to {out_dir}: {e}"
        logger.info(f"Report written to {out_dir}")
        return True, str(out_dir)

    def archive_run(self, run_dir: Path) -> Tuple[bool, str]:
        """Packs a run directory with its manifest into the archive directory."""
        run_dir = Path(run_dir)
        if not run_dir.is_dir():
            return False, f"Run directory not found at {run_dir}."

        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        root = f"lpbox_{run_dir.name}_{timestamp}"
        archive_filepath = self.archive_dir / f"{root}.tar.gz"

        manifest = archive_run_directory(run_dir, archive_filepath, root, __version__)
        if manifest is None:
            return False, "Failed to create the archive file."
        verdict = {True: "passed", False: "failed", None: "no verdict"}[manifest.passed]
        logger.debug(f"Archived {len(manifest.files)} files of {manifest.experiment} ({verdict})")
        return True, f"Successfully created run archive: {archive_filepath.name}"
