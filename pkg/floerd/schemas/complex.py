from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class BasisElementSchema(BaseModel):
    """Generador [x, i, j] con su grado de Maslov."""
    id: str = Field(..., min_length=1, description="Identificador único del generador")
    gr: int = Field(..., description="Grado de Maslov")
    i: int = Field(..., description="Filtración algebraica")
    j: int = Field(..., description="Filtración de Alexander")


class DifferentialEntrySchema(BaseModel):
    """Entrada del diferencial: ∂(src) contiene U^u · dst."""
    src: str = Field(..., description="Generador de origen")
    dst: str = Field(..., description="Generador de destino")
    u: int = Field(..., ge=0, description="Potencia de U")


class ComplexDocument(BaseModel):
    """Documento JSON canónico de un complejo bifiltrado."""
    name: str = Field(..., description="Nombre del complejo")
    basis: List[BasisElementSchema] = Field(default_factory=list)
    diff: List[DifferentialEntrySchema] = Field(default_factory=list)

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "name": "T(2,3)",
                "basis": [
                    {"id": "x1", "gr": 0, "i": 0, "j": 1},
                    {"id": "x0", "gr": -1, "i": 0, "j": 0},
                    {"id": "x-1", "gr": -2, "i": 0, "j": -1},
                ],
                "diff": [
                    {"src": "x0", "dst": "x1", "u": 1},
                    {"src": "x0", "dst": "x-1", "u": 0},
                ],
            }
        }
    )


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: Optional[str] = None
    entry: Optional[DifferentialEntrySchema] = None


class ValidationReport(BaseModel):
    """Resultado de validar un complejo."""
    name: str
    generators: int
    entries: int
    checks: List[CheckResult]
    homology_rank: Optional[int] = Field(None, description="Rango de la homología sobre F2[U,U^-1]")

    @property
    def valid(self) -> bool:
        return all(check.passed for check in self.checks)

    def first_failure(self) -> Optional[CheckResult]:
        return next((check for check in self.checks if not check.passed), None)


class HomologyReport(BaseModel):
    """Homología de un complejo cociente truncado."""
    m: int
    window: int
    reliable_min: int
    reliable_max: int
    dimensions: Dict[int, int]
    tower_bottom: Optional[int] = None
    representative: List[str] = Field(default_factory=list)
    stable: Optional[bool] = None


class ComplexSummary(BaseModel):
    name: str
    generators: int
    entries: int
    genus: int
    filtration_width: int
    components: int
