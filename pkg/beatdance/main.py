from typing import Optional

import typer

from . import commands
from .core.logging import configure_logging

app = typer.Typer(no_args_is_help=True, add_completion=False)
app.registered_commands.extend(commands.router.registered_commands)


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Overrides BEATDANCE_LOG_LEVEL"),
) -> None:
    """Music-driven dance synthesis: data, training, generation and evaluation."""
    configure_logging(log_level)


if __name__ == "__main__":
    app()
