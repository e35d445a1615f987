import asyncio
import logging
from typing import Optional

from fastapi import APIRouter, Query
from starlette.concurrency import run_in_threadpool

from floerd.schemas.response import APIResponse
from floerd.schemas.surgery import DBarTable, DInvariantResult, TheoremBounds
from floerd.services.expression_parser import ExpressionParser
from floerd.services.surgery_service import SurgeryService

# Configurar logging
logger = logging.getLogger(__name__)

router = APIRouter()


@router.get("/d", response_model=APIResponse[DInvariantResult])
async def get_d_invariant(
    knot: str = Query(..., description="Expresión de nudo"),
    q: int = Query(..., gt=0, description="Coeficiente de cirugía"),
    m: int = Query(0, description="Etiqueta Spin^c"),
    window: Optional[int] = Query(None, ge=1, description="Ventana de truncamiento"),
):
    """
    Calcula d(S³_q(K), s_m) para una cirugía grande.
    """
    c = await run_in_threadpool(ExpressionParser.evaluate, knot)
    result = await run_in_threadpool(SurgeryService.d_invariant, c, q, m, window, c.name)
    return APIResponse(success=True, message=f"d = {result.d}", data=result)


@router.get("/dbar", response_model=APIResponse[DBarTable])
async def get_dbar_table(
    knot: str = Query(..., description="Expresión de nudo"),
    p: int = Query(..., ge=2, description="q = p²"),
    all_m: bool = Query(False, description="Todas las etiquetas en lugar de m = p·k"),
    window: Optional[int] = Query(None, ge=1),
):
    """
    Tabla d̄(s_m) = d(s_m) - d(s_0) para S³_{p²}(K).
    """
    c = await run_in_threadpool(ExpressionParser.evaluate, knot)
    table = await run_in_threadpool(
        asyncio.run, SurgeryService.dbar_table(c, p, knot=c.name, all_m=all_m, window=window)
    )
    return APIResponse(success=True, message="Tabla d̄ calculada", data=table)


@router.get("/bounds", response_model=APIResponse[TheoremBounds])
async def get_theorem_bounds(p: int = Query(..., ge=3, description="Primo congruente con 3 mod 4")):
    """
    Cotas simbólicas de d(s_0) y d(s_p) para S³_{p²}(L_p).
    """
    bounds = await run_in_threadpool(SurgeryService.theorem_bounds, p)
    return APIResponse(success=True, message="Cotas calculadas", data=bounds)
