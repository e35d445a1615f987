import logging
from typing import Optional

from fastapi import APIRouter, Query
from starlette.concurrency import run_in_threadpool

from floerd.schemas.complex import ComplexDocument, ComplexSummary, HomologyReport, ValidationReport
from floerd.schemas.knots import ConstraintReport
from floerd.schemas.response import APIResponse
from floerd.services.complex_service import ComplexService
from floerd.services.expression_parser import ExpressionParser
from floerd.services.knot_service import KnotService

# Configurar logging
logger = logging.getLogger(__name__)

router = APIRouter()


@router.get("/complex", response_model=APIResponse[ComplexDocument])
async def get_complex(expr: str = Query(..., description="Expresión de nudo, p. ej. 'torus:4,5 + dtref'")):
    """
    Construye el complejo de una expresión de nudo.

    - **expr**: `unknot`, `torus:<p-1>,<p>`, `dtref`, `lp:<p>`, `A + B`, `k*A`
    """
    c = await run_in_threadpool(ExpressionParser.evaluate, expr)
    return APIResponse(
        success=True,
        message=f"Complejo {c.name} con {c.size} generadores",
        data=ComplexService.to_document(c),
    )


@router.get("/summary", response_model=APIResponse[ComplexSummary])
async def get_summary(expr: str = Query(..., description="Expresión de nudo")):
    c = await run_in_threadpool(ExpressionParser.evaluate, expr)
    return APIResponse(success=True, message="Resumen del complejo", data=ComplexService.summary(c))


@router.post("/validate", response_model=APIResponse[ValidationReport])
async def validate_complex(document: ComplexDocument):
    """
    Valida un complejo: ley de grados, filtración, ∂² = 0 y rango 1.
    """
    c = ComplexService.from_document(document)
    report = await run_in_threadpool(ComplexService.validate, c)
    return APIResponse(
        success=True,
        message="Complejo válido" if report.valid else "Complejo no válido",
        data=report,
    )


@router.get("/constraints", response_model=APIResponse[ConstraintReport])
async def get_constraints(expr: str = Query(..., description="Expresión de nudo")):
    """
    Comprueba las cotas de filtración del doble del trébol sobre el complejo de la expresión.
    """
    c = await run_in_threadpool(ExpressionParser.evaluate, expr)
    report = await run_in_threadpool(KnotService.check_double_constraints, c)
    return APIResponse(success=True, message="Cotas comprobadas", data=report)


@router.get("/constraints/torus", response_model=APIResponse[ConstraintReport])
async def get_torus_constraints(p: int = Query(..., ge=3, description="p impar de T(p-1,p)")):
    report = await run_in_threadpool(KnotService.check_staircase_constraints, p)
    return APIResponse(success=True, message="Cotas comprobadas", data=report)


@router.get("/homology", response_model=APIResponse[HomologyReport])
async def get_quotient_homology(
    expr: str = Query(..., description="Expresión de nudo"),
    m: int = Query(0, description="Desplazamiento del cociente C{max(i, j-m) >= 0}"),
    window: Optional[int] = Query(None, ge=1, description="Ventana de truncamiento"),
    tower_only: bool = Query(False, description="Omitir las componentes acíclicas"),
):
    """
    Homología del cociente truncado con dimensiones por grado y fondo de la torre.
    """
    c = await run_in_threadpool(ExpressionParser.evaluate, expr)
    report = await run_in_threadpool(ComplexService.quotient_homology, c, m, window, tower_only)
    return APIResponse(success=True, message="Homología calculada", data=report)
