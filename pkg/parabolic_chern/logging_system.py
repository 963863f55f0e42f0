"""Logging system module with rich console output and progress tracking."""

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table
from tqdm import tqdm


class ChernLogger:
    """Console reporting and log setup for the parabolic Chern tool.

    Reports go to stdout through ``console``; log records, warnings and
    progress bars go to stderr so that machine output stays parseable.
    """

    def __init__(self, log_dir: Optional[Path] = None, verbose: bool = False):
        """Initialize the logger.

        Args:
            log_dir: Directory for a detailed log file (no file is written when None)
            verbose: Enable debug logging
        """
        self.console = Console()
        self.error_console = Console(stderr=True)
        self.verbose = verbose
        self.log_dir = Path(log_dir) if log_dir is not None else None
        self.log_file: Optional[Path] = None

        self._setup_logging()

    def _setup_logging(self) -> None:
        """Setup logging configuration with rich handler and optional file output."""
        logging.basicConfig(
            level=logging.DEBUG if self.verbose else logging.INFO,
            format="%(message)s",
            datefmt="[%X]",
            handlers=[
                RichHandler(
                    console=self.error_console,
                    show_path=self.verbose,
                    show_time=True,
                    rich_tracebacks=True
                )
            ]
        )

        if self.log_dir is None:
            return

        self.log_dir.mkdir(parents=True, exist_ok=True)
        self.log_file = self.log_dir / f"parabolic_chern_{datetime.now().strftime('%Y%m%d_%H%M%S')}.log"
        file_handler = logging.FileHandler(self.log_file, encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        ))
        logging.getLogger().addHandler(file_handler)

        self.error_console.print(f"[dim]Logs will be saved to: {self.log_file}[/dim]")

    def print_header(self, title: str, subtitle: Optional[str] = None) -> None:
        """Print styled header with title and optional subtitle.

        Args:
            title: Main title text
            subtitle: Optional subtitle text
        """
        header_text = f"[bold blue]{escape(title)}[/bold blue]"
        if subtitle:
            header_text += f"\n[dim]{escape(subtitle)}[/dim]"

        self.console.print(Panel(header_text, border_style="blue", padding=(1, 2)))

    def print_summary(self, data: Dict[str, Any], title: str = "Summary") -> None:
        """Print a two-column key/value table.

        Args:
            data: Rows to display
            title: Table title
        """
        table = Table(title=title, show_header=True, header_style="bold magenta")
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", style="green")

        for key, value in data.items():
            table.add_row(str(key), str(value))

        self.console.print(table)

    def print_table(self, title: str, columns: Sequence[str], rows: List[Sequence[Any]]) -> None:
        """Print a table with arbitrary columns.

        Args:
            title: Table title
            columns: Column headers
            rows: Row values (converted with str)
        """
        table = Table(title=title, show_header=True, header_style="bold yellow")
        for index, column in enumerate(columns):
            table.add_column(column, style="cyan" if index == 0 else "green")
        for row in rows:
            table.add_row(*(str(value) for value in row))
        self.console.print(table)

    def print_machine(self, text: str) -> None:
        """Write machine-readable output verbatim to stdout."""
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        sys.stdout.flush()

    def print_error(self, message: str, exception: Optional[Exception] = None) -> None:
        """Print formatted error message.

        Args:
            message: Error message
            exception: Optional exception object
        """
        error_text = f"[bold red]Error:[/bold red] {escape(message)}"
        if exception and self.verbose:
            error_text += f"\n[dim red]{type(exception).__name__}: {escape(str(exception))}[/dim red]"

        self.error_console.print(error_text)

    def print_warning(self, message: str) -> None:
        """Print formatted warning message."""
        self.error_console.print(f"[bold yellow]Warning:[/bold yellow] {escape(message)}")

    def print_success(self, message: str) -> None:
        """Print formatted success message."""
        self.console.print(f"[bold green]PASS:[/bold green] {escape(message)}")

    def print_failure(self, message: str) -> None:
        """Print formatted failure message."""
        self.console.print(f"[bold red]FAIL:[/bold red] {escape(message)}")

    def create_simple_progress_bar(self, total: int, description: str = "Checking") -> tqdm:
        """Create a tqdm progress bar on stderr.

        Args:
            total: Total number of items
            description: Description for the progress bar

        Returns:
            tqdm progress bar instance
        """
        return tqdm(
            total=total,
            desc=description,
            unit="trial",
            ncols=80,
            file=sys.stderr,
            disable=not self.verbose
        )


def setup_logger(log_dir: Optional[Path] = None, verbose: bool = False) -> ChernLogger:
    """Setup and return a configured logger.

    Args:
        log_dir: Directory to save log files
        verbose: Enable verbose logging

    Returns:
        Configured ChernLogger instance
    """
    return ChernLogger(log_dir=log_dir, verbose=verbose)
