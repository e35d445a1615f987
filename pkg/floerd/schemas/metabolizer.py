from typing import List, Optional

from pydantic import BaseModel, Field, field_validator
from typing_extensions import Literal

Consistency = Literal["consistent", "inconsistent", "undetermined", "unknown"]


class MetabolizerSchema(BaseModel):
    """Metabolizador de (Z/p²)^n con sus generadores."""
    p: int
    n: int
    form: str = Field(..., description="Signos de la forma de enlace, p. ej. '+-'")
    generators: List[List[int]] = Field(..., description="Generadores módulo p²")
    order: int

    model_config = {
        "json_schema_extra": {
            "example": {"p": 3, "n": 2, "form": "+-", "generators": [[1, 1]], "order": 9}
        }
    }


class SpecialVectorRequest(BaseModel):
    p: int = Field(..., ge=3, description="Primo impar")
    generators: List[List[int]] = Field(..., min_length=1, description="Generadores del subgrupo")
    form: Optional[str] = Field(None, description="Si se da, se exige que el subgrupo sea metabolizador de esta forma")

    @field_validator("generators")
    @classmethod
    def same_length(cls, v: List[List[int]]) -> List[List[int]]:
        if len({len(g) for g in v}) != 1 or not v[0]:
            raise ValueError("Todos los generadores deben tener la misma longitud positiva")
        return v


class SpecialVectorResult(BaseModel):
    """Elemento z con todas las entradas múltiplos de p y al menos n/2 iguales a p."""
    z: List[int]
    permutation: List[int] = Field(..., description="Orden de columnas tras los intercambios")
    p_entries: int = Field(..., description="Número de entradas de z iguales a p")
    unit_rank: int = Field(..., description="Filas con pivote unidad")
    p_rank: int = Field(..., description="Filas con pivote de valuación 1")


class RhoPermutation(BaseModel):
    p: int
    a: int = Field(..., description="Generador de Z_p*")
    permutation: List[int] = Field(..., description="Imagen de j = 1..q")
    orbit: List[int] = Field(..., description="Órbita de 1")


class RelationSpan(BaseModel):
    """Rango del espacio de relaciones, decidido por rango y por mcd."""
    q: int
    relations: int
    rank: int
    full: bool
    gcd: str = Field(..., description="mcd de los f_z con t^q - 1")
    basis: List[List[int]] = Field(default_factory=list, description="Relaciones linealmente independientes")


class RealPartCertificate(BaseModel):
    coefficients: List[int]
    q: int
    dominant_constant: bool = Field(..., description="c_0 > 0 y c_0 >= suma del resto")
    min_real_part: float
    min_modulus: float
    nonvanishing: bool


class MetabolizerVerdict(BaseModel):
    generators: List[List[int]]
    relation_rank: int
    forces_zero: bool
    consistency: Consistency


class AppendixVerdict(BaseModel):
    p: int
    n: int
    form: str
    q: int
    metabolizers: List[MetabolizerVerdict]
    all_force_zero: bool
    obstructed: Optional[bool] = Field(None, description="None si no se dio tabla d̄")
