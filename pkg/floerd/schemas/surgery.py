from fractions import Fraction
from typing import Any, List, Optional

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, WithJsonSchema, model_validator
from typing_extensions import Annotated, Literal


def parse_rational(value: Any) -> Fraction:
    """Acepta Fraction, enteros o cadenas "num/den"."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("A boolean is not a rational number")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Invalid rational {value!r}") from e
    raise ValueError(f"Expected a rational as 'num/den', got {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


# Racionales exactos, serializados siempre como "num/den"
Rational = Annotated[
    Fraction,
    BeforeValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str),
    WithJsonSchema({"type": "string", "pattern": r"^-?\d+/\d+$"}),
]

ValueKind = Literal["exact", "lower_bound", "upper_bound"]
Provenance = Literal["computed", "claimed"]


class SurgeryProblem(BaseModel):
    """Cirugía grande S³_q(K) en la estructura Spin^c s_m."""
    q: int = Field(..., gt=0, description="Coeficiente de cirugía")
    m: int = Field(..., description="Etiqueta Spin^c, |m| <= (q-1)/2")
    genus: int = Field(..., ge=0, description="Género del nudo")

    @model_validator(mode="after")
    def check_large_surgery(self) -> "SurgeryProblem":
        if self.q < 2 * self.genus - 1:
            raise ValueError(f"q = {self.q} is below 2g - 1 = {2 * self.genus - 1}")
        if 2 * abs(self.m) > self.q - 1:
            raise ValueError(f"|m| = {abs(self.m)} exceeds (q-1)/2 for q = {self.q}")
        return self


class DInvariantResult(BaseModel):
    knot: str
    q: int
    m: int
    d: Rational
    tower_bottom: int = Field(..., description="Grado del fondo de la torre en el cociente")
    shift: Rational = Field(..., description="s(q, m)")
    window: int
    stable: bool = Field(True, description="La ventana N+1 reproduce el resultado")
    representative: List[str] = Field(default_factory=list, description="Ciclo que representa el fondo de la torre")

    model_config = ConfigDict(arbitrary_types_allowed=True)


class DBarEntry(BaseModel):
    """Valor d(s_m) y d̄(s_m) = d(s_m) - d(s_0) de una etiqueta."""
    m: int
    d: Rational
    d_kind: ValueKind = "exact"
    tower_bottom: Optional[int] = None
    shift: Rational
    dbar: Rational
    dbar_kind: ValueKind = "exact"
    window: Optional[int] = None
    provenance: Provenance = "computed"

    model_config = ConfigDict(arbitrary_types_allowed=True)

    @property
    def dbar_lower_bound(self) -> Optional[Fraction]:
        """Cota inferior de d̄, None si solo se conoce una cota superior."""
        return self.dbar if self.dbar_kind in ("exact", "lower_bound") else None

    @property
    def dbar_upper_bound(self) -> Optional[Fraction]:
        return self.dbar if self.dbar_kind in ("exact", "upper_bound") else None


class DBarTable(BaseModel):
    knot: str
    p: int
    q: int
    d0: Rational = Field(..., description="d(Y, s_0)")
    d0_kind: ValueKind = "exact"
    entries: List[DBarEntry] = Field(default_factory=list)

    model_config = ConfigDict(arbitrary_types_allowed=True)

    def entry(self, m: int) -> Optional[DBarEntry]:
        return next((e for e in self.entries if e.m == m), None)

    def reduced(self) -> List[DBarEntry]:
        """Entradas m = p·k, k = 1..(p-1)/2, en orden de k."""
        wanted = [self.p * k for k in range(1, (self.p - 1) // 2 + 1)]
        return [e for e in (self.entry(m) for m in wanted) if e is not None]


class TheoremBounds(BaseModel):
    """Cotas simbólicas para S³_{p²}(L_p) sin construir el producto tensorial."""
    p: int
    dp_minimum: int = Field(..., description="Mínimo de i+j sobre cadenas de grado 0")
    special_cycle: List[int] = Field(..., description="Filtración (i, j) del ciclo especial")
    d0_upper: Rational = Field(..., description="Cota superior de d(s_0)")
    dp_value: Rational = Field(..., description="Valor de d(s_p)")
    dbar_lower: Rational = Field(..., description="Cota inferior de d̄(s_p)")
    provenance: Provenance = "claimed"

    model_config = ConfigDict(arbitrary_types_allowed=True)
