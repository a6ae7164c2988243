"""
Console and logging helpers shared by the CLI and long-running simulations
"""
import logging

from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from config import LOG_LEVEL

# stderr keeps result files and piped stdout free of progress output
console = Console(stderr=True)


def setup_logging(level: str = LOG_LEVEL):
    """Route library loggers through rich at the configured level"""
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, show_path=False)],
        force=True,
    )


def show_agent_working(agent_name: str, action: str):
    """Show which party or adversary is acting"""
    console.print(f"{agent_name}: {action}")


def show_stage(title: str, explanation: str):
    console.print(Panel(explanation, title=title, border_style="blue"))


def show_checks(title: str, checks: list[tuple[str, bool, str]]):
    """Render (name, passed, detail) rows as a table"""
    table = Table(title=title)
    table.add_column("Check")
    table.add_column("Result")
    table.add_column("Detail")
    for name, passed, detail in checks:
        table.add_row(name, "[green]pass[/green]" if passed else "[red]FAIL[/red]", detail)
    console.print(table)
