"""
VSafe - Core Module
===================

Módulo central del sistema que contiene:
- Configuración del proceso (settings)
- Excepciones de dominio
- Persistencia de logs de eventos
- Datos incluidos por defecto
"""

__version__ = "1.0.0"
__author__ = "VSafe Team"
