import typer

from . import analyze, basic, fis_curve, report, simulate, validate

# Crear aplicación principal de la CLI
cli_router = typer.Typer(no_args_is_help=True, add_completion=False)

# Incluir todos los comandos
for module in (basic, analyze, simulate, report, fis_curve, validate):
    cli_router.registered_commands.extend(module.router.registered_commands)
