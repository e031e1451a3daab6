"""Rich terminal progress display for suite runs."""

import logging
import threading
import time
from pathlib import Path

from rich.console import Console
from rich.progress import (
    BarColumn,
    Progress,
    SpinnerColumn,
    TaskID,
    TextColumn,
    TimeElapsedColumn,
)

from sqc_lab.logging.reporter import CheckRecord

LOG_FILE = "sqclab.log"


class SuiteProgress:
    """Per-check progress on stderr.

    Stays silent when stderr is not a terminal, so piped report output is
    never interleaved with progress output.
    """

    def __init__(self, check_names: list[str], console: Console | None = None) -> None:
        """Initialize the display.

        Args:
            check_names: Checks that will run, in report order.
            console: Console to draw on; defaults to stderr.
        """
        self.check_names = check_names
        self.console = console or Console(stderr=True)
        self.enabled = self.console.is_terminal
        self.start_time = time.time()
        self.finished: dict[str, str] = {}
        self._lock = threading.Lock()

        self.progress = Progress(
            SpinnerColumn(),
            TextColumn("[bold blue]{task.description}"),
            BarColumn(bar_width=40),
            TextColumn("{task.completed}/{task.total}"),
            TimeElapsedColumn(),
            console=self.console,
            transient=False,
            disable=not self.enabled,
        )
        self.overall_task: TaskID | None = None
        self.check_tasks: dict[str, TaskID] = {}

    def start(self) -> None:
        """Start the live display."""
        self.start_time = time.time()
        self.overall_task = self.progress.add_task("Suite", total=len(self.check_names))
        self.progress.start()

    def stop(self) -> None:
        """Stop the live display."""
        self.progress.stop()

    def start_check(self, name: str) -> None:
        with self._lock:
            self.check_tasks[name] = self.progress.add_task(name, total=None)

    def end_check(self, record: CheckRecord) -> None:
        """Mark a check finished and advance the overall bar."""
        with self._lock:
            self.finished[record.name] = record.status
            task = self.check_tasks.get(record.name)
            if task is not None:
                self.progress.update(task, total=1, completed=1, description=f"{record.name} [{record.status}]")
            if self.overall_task is not None:
                self.progress.advance(self.overall_task)

    @property
    def elapsed(self) -> float:
        return time.time() - self.start_time


def create_file_handler(log_dir: Path, level: int = 10) -> logging.FileHandler:
    """Create a file handler for detailed logs.

    Args:
        log_dir: Directory for log files.
        level: Logging level (default DEBUG=10).

    Returns:
        Configured FileHandler writing LOG_FILE.
    """
    log_dir.mkdir(parents=True, exist_ok=True)
    log_file = log_dir / LOG_FILE

    handler = logging.FileHandler(log_file, mode="w")
    handler.setLevel(level)
    handler.setFormatter(
        logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )
    )

    return handler
