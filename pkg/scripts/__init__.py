"""
Scripts de mantenimiento del repositorio (regeneración de ficheros golden).
"""
