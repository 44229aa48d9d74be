from typing import Optional

import typer

from core.config import configure_logging, settings
from routes.api import cli_router

app = cli_router


@app.callback()
def main(
    log_level: Optional[str] = typer.Option(
        None, "--log-level", help="Nivel de logging (por defecto VSAFE_LOG_LEVEL)"),
):
    """VSafe: co-simulador longitudinal de seguridad con conductor en el lazo"""
    configure_logging(log_level or settings.LOG_LEVEL)


if __name__ == "__main__":
    app(prog_name=settings.APP_NAME.lower())
