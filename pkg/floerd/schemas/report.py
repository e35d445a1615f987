from typing import List

from pydantic import BaseModel, Field
from typing_extensions import Literal

from floerd.schemas.metabolizer import MetabolizerVerdict
from floerd.schemas.surgery import DBarTable

Verdict = Literal["obstructed", "unobstructed", "inconclusive"]
Mode = Literal["computed", "bounds-only"]


class ReportProvenance(BaseModel):
    """Origen de los números del informe."""
    mode: Mode
    generator_count: int = Field(..., description="Generadores del complejo (proyectados en modo de cotas)")
    stability_checked: bool = Field(..., description="Todas las ventanas superaron la comprobación N+1")
    doubled_trefoil_model: str
    notes: List[str] = Field(default_factory=list)


class ObstructionReport(BaseModel):
    """Informe de obstrucción para S³_{p²}(K)."""
    schema_version: int
    knot: str
    p: int
    q: int
    mode: Mode
    theorem_applies: bool = Field(..., description="p es primo, p ≡ 3 mod 4 y el nudo es L_p")
    verdict: Verdict
    table: DBarTable
    metabolizers: List[MetabolizerVerdict]
    provenance: ReportProvenance

    model_config = {
        "arbitrary_types_allowed": True,
        "json_schema_extra": {
            "example": {
                "schema_version": 1,
                "knot": "lp:3",
                "p": 3,
                "q": 9,
                "mode": "computed",
                "theorem_applies": True,
                "verdict": "obstructed",
            }
        },
    }
