# Comandos de la CLI (un router typer por módulo)
