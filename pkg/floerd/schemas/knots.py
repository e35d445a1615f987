from typing import Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class AlexanderPoly(BaseModel):
    """Polinomio de Alexander simétrico, normalizado con Δ(1) = 1."""
    coeffs: Dict[int, int] = Field(..., description="Coeficiente a_j por exponente j")

    @field_validator("coeffs")
    @classmethod
    def drop_zero_coefficients(cls, v: Dict[int, int]) -> Dict[int, int]:
        return {int(e): int(a) for e, a in sorted(v.items()) if a}

    @model_validator(mode="after")
    def check_symmetry_and_normalization(self) -> "AlexanderPoly":
        for e, a in self.coeffs.items():
            if self.coeffs.get(-e, 0) != a:
                raise ValueError(f"El polinomio no es simétrico: a_{e} = {a}, a_{-e} = {self.coeffs.get(-e, 0)}")
        if sum(self.coeffs.values()) != 1:
            raise ValueError(f"Δ(1) debe ser 1, es {sum(self.coeffs.values())}")
        return self

    @property
    def exponents(self) -> List[int]:
        return sorted(self.coeffs)

    @property
    def genus(self) -> int:
        return max(self.coeffs) if self.coeffs else 0

    def __str__(self) -> str:
        terms = []
        for e in sorted(self.coeffs, reverse=True):
            a = self.coeffs[e]
            mono = "1" if e == 0 else ("t" if e == 1 else f"t^{e}")
            if e != 0 and abs(a) == 1:
                body = mono
            else:
                body = f"{abs(a)}" if e == 0 else f"{abs(a)}{mono}"
            sign = "-" if a < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


class StaircaseData(BaseModel):
    """Exponentes n_{-k} < ... < n_k y grados δ_s de un nudo L-space."""
    exponents: List[int] = Field(..., description="Exponentes con coeficiente no nulo, crecientes")
    deltas: List[int] = Field(..., description="Grado δ_s de cada exponente")

    @model_validator(mode="after")
    def check_shape(self) -> "StaircaseData":
        n = len(self.exponents)
        if n != len(self.deltas):
            raise ValueError("exponents y deltas deben tener la misma longitud")
        if n % 2 == 0:
            raise ValueError(f"Se esperaba un número impar de exponentes, hay {n}")
        if any(b <= a for a, b in zip(self.exponents, self.exponents[1:])):
            raise ValueError("Los exponentes deben ser estrictamente crecientes")
        if self.exponents != [-e for e in reversed(self.exponents)]:
            raise ValueError("La sucesión de exponentes debe ser simétrica")
        if self.deltas[-1] != 0:
            raise ValueError(f"δ_k debe ser 0, es {self.deltas[-1]}")
        return self

    @property
    def k(self) -> int:
        return len(self.exponents) // 2

    def exponent(self, s: int) -> int:
        """n_s para s en -k..k."""
        return self.exponents[s + self.k]

    def delta(self, s: int) -> int:
        return self.deltas[s + self.k]


class ConstraintCheck(BaseModel):
    bullet: int
    description: str
    passed: bool
    detail: Optional[str] = None
    witness: List[str] = Field(default_factory=list)


class ConstraintReport(BaseModel):
    """Resultado de comprobar las cotas de filtración de un modelo."""
    name: str
    checks: List[ConstraintCheck]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failed_bullets(self) -> List[int]:
        return [check.bullet for check in self.checks if not check.passed]
