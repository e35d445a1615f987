import logging

from fastapi import FastAPI, Request, status
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

# Importar configuración
from floerd.core.config import settings
from floerd.core.exceptions import FloerdException
from floerd.core.logging_config import setup_logging
from floerd.schemas.response import APIResponse

# Configurar logging
setup_logging()
logger = logging.getLogger(__name__)

# Importar routers
from floerd.api.v1.routes import knots, metabolizers, obstruction, surgery  # noqa: E402


def create_application() -> FastAPI:
    # Crear aplicación FastAPI
    app = FastAPI(
        title=settings.PROJECT_NAME,
        description="Complejos de Floer de nudos, invariantes d de cirugías y obstrucciones por metabolizadores",
        version="1.0.0",
        docs_url="/api/docs" if settings.ENVIRONMENT != "production" else None,
        redoc_url="/api/redoc" if settings.ENVIRONMENT != "production" else None,
    )

    # Excepciones del dominio
    @app.exception_handler(FloerdException)
    async def floerd_exception_handler(request: Request, exc: FloerdException):
        logger.error(f"{type(exc).__name__} en {request.method} {request.url.path}: {exc.message}")
        body = APIResponse.error(message=exc.message, status_code=exc.status_code, details=exc.to_dict())
        return JSONResponse(status_code=exc.status_code, content=body.to_dict())

    # Manejar excepciones de validación
    @app.exception_handler(RequestValidationError)
    async def validation_exception_handler(request: Request, exc: RequestValidationError):
        logger.error(f"Error de validación: {exc.errors()}")
        body = APIResponse.error(
            message="Error de validación",
            status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
            details={"detail": jsonable_errors(exc)},
        )
        return JSONResponse(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, content=body.to_dict())

    # Ruta raíz
    @app.get("/", tags=["Root"])
    async def root():
        return {
            "message": f"{settings.PROJECT_NAME} API",
            "version": "1.0.0",
            "environment": settings.ENVIRONMENT,
            "docs": "/api/docs" if settings.ENVIRONMENT != "production" else None,
        }

    # Incluir routers
    app.include_router(knots.router, prefix=f"{settings.API_V1_STR}/knots", tags=["Nudos"])
    app.include_router(surgery.router, prefix=f"{settings.API_V1_STR}/surgery", tags=["Cirugía"])
    app.include_router(metabolizers.router, prefix=f"{settings.API_V1_STR}/metabolizers", tags=["Metabolizadores"])
    app.include_router(obstruction.router, prefix=f"{settings.API_V1_STR}/obstruction", tags=["Obstrucción"])

    # Middleware para logging de peticiones
    @app.middleware("http")
    async def log_requests(request: Request, call_next):
        logger.info(f"Inicio de petición: {request.method} {request.url}")
        try:
            response = await call_next(request)
            logger.info(f"Fin de petición: {request.method} {request.url} - {response.status_code}")
            return response
        except Exception:
            logger.exception(f"Error en petición: {request.method} {request.url}")
            raise

    return app


def jsonable_errors(exc: RequestValidationError) -> list:
    return [
        {"loc": list(error.get("loc", ())), "msg": error.get("msg", ""), "type": error.get("type", "")}
        for error in exc.errors()
    ]


# Crear la aplicación
app = create_application()
