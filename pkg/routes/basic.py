import typer
from rich.table import Table

from core.config import get_environment_info
from core.init_data import init_data

from .common import console

router = typer.Typer()


@router.command("info")
def info():
    """Información del entorno y la configuración del proceso"""
    table = Table(title="VSafe")
    table.add_column("Parámetro")
    table.add_column("Valor")
    for key, value in get_environment_info().items():
        table.add_row(key, str(value))
    console.print(table)


@router.command("init")
def init():
    """Escribe los escenarios y la población incluidos si no existen"""
    init_data()
    console.print("✅ Datos inicializados")
