import asyncio
import logging
from typing import Optional

from fastapi import APIRouter, Query
from starlette.concurrency import run_in_threadpool

from floerd.schemas.report import ObstructionReport
from floerd.schemas.response import APIResponse
from floerd.services.obstruction_service import ObstructionService

# Configurar logging
logger = logging.getLogger(__name__)

router = APIRouter()


@router.get("", response_model=APIResponse[ObstructionReport])
async def get_obstruction(
    p: int = Query(..., ge=3, description="Primo"),
    knot: Optional[str] = Query(None, description="Expresión de nudo; por defecto lp:<p>"),
    bounds_only: bool = Query(False, description="Usar solo las cotas simbólicas"),
    n: int = Query(1, ge=1, description="Rango del grupo de metabolizadores"),
    form: Optional[str] = Query(None, description="Signos de la forma de enlace"),
):
    """
    Informe de obstrucción de extremo a extremo.
    """
    report = await run_in_threadpool(
        asyncio.run, ObstructionService.obstruct(p, knot=knot, bounds_only=bounds_only, n=n, form=form)
    )
    return APIResponse(success=True, message=f"Veredicto: {report.verdict}", data=report)
