import logging
from typing import List, Optional

from fastapi import APIRouter, Query
from starlette.concurrency import run_in_threadpool

from floerd.schemas.metabolizer import MetabolizerSchema, RhoPermutation, SpecialVectorRequest, SpecialVectorResult
from floerd.schemas.response import APIResponse
from floerd.services.metabolizer_service import MetabolizerService

# Configurar logging
logger = logging.getLogger(__name__)

router = APIRouter()


@router.get("", response_model=APIResponse[List[MetabolizerSchema]])
async def list_metabolizers(
    p: int = Query(..., ge=3, description="Primo impar"),
    n: int = Query(1, ge=1, description="Rango"),
    form: Optional[str] = Query(None, description="Signos de la forma, p. ej. '+-'"),
):
    """
    Enumera los metabolizadores de (Z/p²)^n.
    """
    metabolizers = await run_in_threadpool(MetabolizerService.enumerate_metabolizers, p, n, form)
    data = [MetabolizerService.to_schema(m, form) for m in metabolizers]
    return APIResponse(success=True, message=f"{len(data)} metabolizadores", data=data)


@router.post("/special-vector", response_model=APIResponse[SpecialVectorResult])
async def get_special_vector(request: SpecialVectorRequest):
    """
    Vector especial de un subgrupo de orden p^n dado por generadores.
    """
    metabolizer = MetabolizerService.from_generators(request.p, request.generators, request.form)
    result = await run_in_threadpool(MetabolizerService.special_vector, metabolizer)
    return APIResponse(success=True, message="Vector especial calculado", data=result)


@router.get("/rho", response_model=APIResponse[RhoPermutation])
async def get_rho(
    p: int = Query(..., ge=3, description="Primo impar"),
    a: Optional[int] = Query(None, description="Generador de Z_p*; por defecto el menor"),
):
    rho = MetabolizerService.rho_permutation(p, a)
    return APIResponse(success=True, message="Permutación calculada", data=rho)
