#!/usr/bin/env python3
"""
Script de configuración para VSafe
Verifica el entorno y escribe los datos incluidos
"""

import sys
from pathlib import Path


def check_python_version():
    """Verifica la versión de Python"""
    if sys.version_info < (3, 10):
        print("❌ Error: Se requiere Python 3.10 o superior")
        sys.exit(1)
    print(f"✅ Python {sys.version_info.major}.{sys.version_info.minor} detectado")


def check_dependencies():
    """Verifica que todas las dependencias estén instaladas"""
    required_packages = {
        "numpy": "numpy", "scipy": "scipy", "pandas": "pandas",
        "pydantic": "pydantic", "pydantic-settings": "pydantic_settings",
        "python-dotenv": "dotenv", "scikit-fuzzy": "skfuzzy",
        "typer": "typer", "rich": "rich", "orjson": "orjson", "joblib": "joblib",
    }

    missing_packages = []
    for package, module in required_packages.items():
        try:
            __import__(module)
        except ImportError:
            missing_packages.append(package)

    if missing_packages:
        print(f"❌ Paquetes faltantes: {', '.join(missing_packages)}")
        print("   Ejecuta: pip install -r requirements.txt")
        return False
    print("✅ Todas las dependencias están instaladas")
    return True


def create_env_file():
    """Crea archivo .env con configuración básica"""
    env_content = """# Configuración de VSafe
VSAFE_THREADS=1
VSAFE_LOG_LEVEL=INFO
VSAFE_OUTPUT_DIR=output
"""
    if not Path(".env").exists():
        with open(".env", "w", encoding="utf-8") as f:
            f.write(env_content)
        print("✅ Archivo .env creado")
    else:
        print("ℹ️  Archivo .env ya existe")


def check_determinism():
    """Ejecuta el escenario corto dos veces y compara los logs"""
    from core.config import settings
    from core.errors import DeterminismError
    from core.event_log import assert_identical, dumps_records
    from models.scenario import ScenarioConfig
    from services.engine import run_scenario

    cfg = ScenarioConfig.from_file(Path(settings.SCENARIOS_DIR) / "smoke.json")
    try:
        assert_identical(dumps_records(run_scenario(cfg)[1]), dumps_records(run_scenario(cfg)[1]))
    except DeterminismError as e:
        print(f"❌ {e}")
        return False
    print("✅ Escenario corto determinista")
    return True


def main():
    """Función principal de configuración"""
    print("🚀 Configurando VSafe...")
    print("=" * 50)

    check_python_version()
    if not check_dependencies():
        sys.exit(1)

    create_env_file()

    from core.init_data import init_data
    init_data()

    deterministic = check_determinism()

    print("\n" + "=" * 50)
    from core.config import print_config_summary
    print_config_summary()
    print(f"   Determinismo: {'✅' if deterministic else '❌'}")
    if deterministic:
        print("\n🎉 ¡Configuración completada exitosamente!")
        print("\nPara simular el escenario de referencia:")
        print("   python main.py simulate --seeds 5 --out output/")
    else:
        print("\n⚠️  El escenario corto no es determinista; revisa los errores arriba")
        sys.exit(1)


if __name__ == "__main__":
    main()
