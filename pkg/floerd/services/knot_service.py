import itertools
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import sympy as sp

from floerd.core.config import settings
from floerd.core.exceptions import (
    ComplexValidationError,
    InconsistentResultError,
    PreconditionError,
    SizeGuardError,
)
from floerd.models.complex import BasisElement, BifilteredComplex, DifferentialEntry
from floerd.schemas.knots import AlexanderPoly, ConstraintCheck, ConstraintReport, StaircaseData
from floerd.services.complex_service import Chain, ComplexService

logger = logging.getLogger(__name__)

# Número de generadores del modelo del doble del trébol
DOUBLE_SIZE = 15


def is_prime(n: int) -> bool:
    return n >= 2 and bool(sp.isprime(n))


class KnotService:
    """Servicio que construye los complejos modelo de los nudos"""

    # ==============================================
    # POLINOMIOS Y ESCALERAS
    # ==============================================

    @classmethod
    def torus_alexander(cls, p: int) -> AlexanderPoly:
        """
        Polinomio de Alexander de T(p-1, p), simetrizado.

        Args:
            p: Entero impar >= 3

        Returns:
            AlexanderPoly con 2p-3 coeficientes no nulos

        Raises:
            PreconditionError: Si p es par o menor que 3
        """
        if p < 3 or p % 2 == 0:
            raise PreconditionError(f"torus_alexander needs an odd p >= 3, got {p}", p=p)
        t = sp.symbols("t")
        numerator = sp.Poly((t ** ((p - 1) * p) - 1) * (t - 1), t)
        denominator = sp.Poly((t ** (p - 1) - 1) * (t ** p - 1), t)
        quotient, remainder = numerator.div(denominator)
        if not remainder.is_zero:
            raise InconsistentResultError(f"Torus knot quotient for p={p} is not exact")
        g = (p - 2) * (p - 1) // 2
        return AlexanderPoly(coeffs={deg - g: int(a) for (deg,), a in quotient.terms()})

    @classmethod
    def gaps_and_deltas(cls, poly: AlexanderPoly) -> StaircaseData:
        """
        Exponentes y grados δ de la escalera de un nudo L-space.

        δ_{k-2l} = -2 Σ_{j=0}^{2l-1} (-1)^j n_{k-j} y δ_{k-2l-1} = δ_{k-2l-2} + 1.

        Raises:
            PreconditionError: Si el polinomio no tiene forma de nudo L-space
        """
        descending = sorted(poly.coeffs, reverse=True)
        if len(descending) % 2 == 0:
            raise PreconditionError(
                f"Expected an odd number of nonzero coefficients, got {len(descending)}",
                count=len(descending),
            )
        for position, e in enumerate(descending):
            expected = 1 if position % 2 == 0 else -1
            if poly.coeffs[e] != expected:
                raise PreconditionError(
                    f"Coefficient of t^{e} is {poly.coeffs[e]}, expected {expected}: not an L-space knot polynomial",
                    exponent=e,
                )

        k = len(descending) // 2
        deltas_desc = [0] * len(descending)
        for l in range(k + 1):
            deltas_desc[2 * l] = -2 * sum((-1) ** j * descending[j] for j in range(2 * l))
        for l in range(k):
            deltas_desc[2 * l + 1] = deltas_desc[2 * l + 2] + 1
        return StaircaseData(exponents=descending[::-1], deltas=deltas_desc[::-1])

    @classmethod
    def staircase_complex(
        cls, sd: StaircaseData, name: str = "staircase", metadata: Optional[dict] = None
    ) -> BifilteredComplex:
        """
        Complejo escalera: G_s en (0, n_s) con grado δ_s y, para cada índice
        s = k-2l-1, ∂G_s = U^a G_{s+1} + U^b G_{s-1} con exponentes fijados
        por la ley de grados.

        Raises:
            ComplexValidationError: Si algún exponente de U no es entero no negativo
        """
        k = sd.k
        basis = [BasisElement(f"x{s}", sd.delta(s), 0, sd.exponent(s)) for s in range(k, -k - 1, -1)]
        diff: List[DifferentialEntry] = []
        for l in range(k):
            s = k - 2 * l - 1
            for neighbour in (s + 1, s - 1):
                twice = sd.delta(neighbour) - sd.delta(s) + 1
                if twice % 2 or twice < 0:
                    raise ComplexValidationError(
                        f"U exponent ({twice})/2 from x{s} to x{neighbour} is not a nonnegative integer",
                        source=f"x{s}", target=f"x{neighbour}",
                    )
                diff.append(DifferentialEntry(f"x{s}", f"x{neighbour}", twice // 2))
        meta = {"genus": sd.exponents[-1]}
        meta.update(metadata or {})
        c = BifilteredComplex.from_elements(name, basis, diff, metadata=meta)
        ComplexService.ensure_valid(c)
        return c

    @classmethod
    def torus_staircase(cls, p: int) -> BifilteredComplex:
        sd = cls.gaps_and_deltas(cls.torus_alexander(p))
        return cls.staircase_complex(sd, name=f"T({p - 1},{p})")

    @classmethod
    def torus_special_cycle(cls, p: int) -> Tuple[BifilteredComplex, Chain]:
        """
        Ciclo U^{-l(l+1)/2}·x_{k-2l} con l = (p-3)/2, en grado 0 y filtración
        ((p²-4p+3)/8, (p²-1)/8).
        """
        c = cls.torus_staircase(p)
        k, l = p - 2, (p - 3) // 2
        return c, ComplexService.chain(c, [(f"x{k - 2 * l}", l * (l + 1) // 2)])

    # ==============================================
    # DOBLE DEL TRÉBOL
    # ==============================================

    @classmethod
    def _box(cls, prefix: str, i: int, j: int, g: int) -> Tuple[List[BasisElement], List[DifferentialEntry]]:
        b1, b2, b3, b4 = (f"{prefix}{n}" for n in range(1, 5))
        basis = [
            BasisElement(b1, g, i, j),
            BasisElement(b2, g - 1, i - 1, j),
            BasisElement(b3, g - 1, i, j - 1),
            BasisElement(b4, g - 2, i - 1, j - 1),
        ]
        diff = [
            DifferentialEntry(b1, b2, 0),
            DifferentialEntry(b1, b3, 0),
            DifferentialEntry(b2, b4, 0),
            DifferentialEntry(b3, b4, 0),
        ]
        return basis, diff

    @classmethod
    def doubled_trefoil_model(cls) -> BifilteredComplex:
        """Modelo de 15 generadores: escalera del trébol más tres cajas acíclicas."""
        basis = [
            BasisElement("s1", 0, 0, 1),
            BasisElement("s0", -1, 0, 0),
            BasisElement("s-1", -2, 0, -1),
        ]
        diff = [DifferentialEntry("s0", "s1", 1), DifferentialEntry("s0", "s-1", 0)]
        for prefix, corner_grading in (("a", -1), ("b", -2), ("c", -2)):
            box_basis, box_diff = cls._box(prefix, 0, 0, corner_grading)
            basis.extend(box_basis)
            diff.extend(box_diff)
        c = BifilteredComplex.from_elements(
            "D(T(2,3))", basis, diff,
            metadata={"genus": 1, "model": settings.DOUBLED_TREFOIL_MODEL},
        )
        ComplexService.ensure_valid(c)
        return c

    @classmethod
    def doubled_trefoil_cycles(cls) -> Dict[Tuple[int, int], List[Tuple[str, int]]]:
        """Ciclos explícitos de grado 0 en (0,1) y (1,0)."""
        return {(0, 1): [("s1", 0)], (1, 0): [("s-1", 1)]}

    @classmethod
    def check_double_constraints(cls, c: BifilteredComplex) -> ConstraintReport:
        """
        Comprueba las tres cotas del doble del trébol: i+j >= 1 en grado 0,
        i+j >= 2 en grado 1 y ciclos generadores en (0,1) y (1,0).
        """
        ComplexService.ensure_valid(c)
        checks = [
            cls._minimum_check(c, 1, 0, 1),
            cls._minimum_check(c, 2, 1, 2),
        ]
        witnesses, missing = [], []
        for bound in ((0, 1), (1, 0)):
            chain = ComplexService.find_filtered_cycle(c, 0, *bound)
            if chain is None:
                missing.append(bound)
            else:
                witnesses.append(f"{bound}: " + " + ".join(ComplexService.chain_labels(c, chain)))
        checks.append(ConstraintCheck(
            bullet=3,
            description="grading-0 cycles at (0,1) and (1,0) represent the generator",
            passed=not missing,
            detail=f"no generator cycle with filtration <= {missing}" if missing else None,
            witness=witnesses,
        ))
        report = ConstraintReport(name=c.name, checks=checks)
        logger.info(f"Cotas del doble del trébol para {c.name}: {'OK' if report.passed else report.failed_bullets()}")
        return report

    @classmethod
    def check_staircase_constraints(cls, p: int) -> ConstraintReport:
        """Cotas de la escalera de T(p-1,p) por barrido exhaustivo de trasladados."""
        c, chain = cls.torus_special_cycle(p)
        target = ((p * p - 4 * p + 3) // 8, (p * p - 1) // 8)
        checks = [
            cls._minimum_check(c, 1, 0, (p * p - 2 * p + 1) // 4),
            cls._minimum_check(c, 2, 1, (p * p - 1) // 4),
        ]
        explicit = (
            ComplexService.represents_generator(c, chain)
            and ComplexService.chain_grading(c, chain) == 0
            and ComplexService.chain_filtration(c, chain) == target
        )
        searched = ComplexService.find_filtered_cycle(c, 0, *target) is not None
        checks.append(ConstraintCheck(
            bullet=3,
            description=f"generator cycle of grading 0 at {target}",
            passed=explicit and searched,
            detail=None if explicit and searched else f"explicit={explicit}, search={searched}",
            witness=ComplexService.chain_labels(c, chain),
        ))
        return ConstraintReport(name=c.name, checks=checks)

    @classmethod
    def _minimum_check(cls, c: BifilteredComplex, bullet: int, grading: int, bound: int) -> ConstraintCheck:
        found = ComplexService.grading_minimum(c, grading)
        passed = found is None or found >= bound
        return ConstraintCheck(
            bullet=bullet,
            description=f"grading-{grading} translates have i+j >= {bound}",
            passed=passed,
            detail=None if passed else f"minimum i+j in grading {grading} is {found}",
        )

    # ==============================================
    # L_p
    # ==============================================

    @classmethod
    def lp_factor_count(cls, p: int) -> int:
        return (3 * p - 1) // 2

    @classmethod
    def lp_projected_size(cls, p: int) -> int:
        return (2 * p - 3) * DOUBLE_SIZE ** cls.lp_factor_count(p)

    @classmethod
    def check_lp_prime(cls, p: int) -> None:
        if not is_prime(p) or p % 4 != 3:
            raise PreconditionError(f"p must be a prime congruent to 3 mod 4, got {p}", p=p)

    @classmethod
    def lp_complex(cls, p: int, allow_large: bool = False) -> BifilteredComplex:
        """
        Complejo de L_p = T(p-1,p) # (3p-1)/2 · D(T(2,3)).

        Args:
            p: Primo congruente con 3 módulo 4
            allow_large: Permite superar settings.MAX_GENERATORS

        Returns:
            El producto tensorial, con el género (p²+1)/2 en los metadatos

        Raises:
            SizeGuardError: Con el número de generadores proyectado
        """
        cls.check_lp_prime(p)
        projected = cls.lp_projected_size(p)
        if projected > settings.MAX_GENERATORS and not allow_large:
            raise SizeGuardError(
                f"L_{p} would have {projected} generators (limit {settings.MAX_GENERATORS})",
                projected=projected, limit=settings.MAX_GENERATORS,
            )

        logger.info(f"Construyendo L_{p} con {projected} generadores")
        double = cls.doubled_trefoil_model()
        c = cls.torus_staircase(p)
        for _ in range(cls.lp_factor_count(p)):
            c = ComplexService.tensor(c, double, max_generators=max(projected, settings.MAX_GENERATORS))

        genus = (p * p + 1) // 2
        top = int((c.j - c.i).max())
        if top != genus:
            raise InconsistentResultError(
                f"L_{p} has top Alexander grading {top}, expected genus {genus}", top=top, genus=genus
            )
        return c.with_name(
            f"L_{p}",
            metadata={"genus": genus, "model": settings.DOUBLED_TREFOIL_MODEL, "p": p},
        )

    @classmethod
    def tensor_chain(cls, product: BifilteredComplex, factors: Sequence[Sequence[Tuple[str, int]]]) -> Chain:
        """Producto tensorial de cadenas explícitas de los factores."""
        terms = []
        for combination in itertools.product(*factors):
            ident = "|".join(term[0] for term in combination)
            terms.append((ident, sum(term[1] for term in combination)))
        return ComplexService.chain(product, terms)

    @classmethod
    def lp_special_cycle(cls, p: int, lp: BifilteredComplex) -> Chain:
        """
        Ciclo especial: ciclo de la escalera ⊗ p copias del ciclo en (0,1)
        ⊗ (p-1)/2 copias del ciclo en (1,0).
        """
        k, l = p - 2, (p - 3) // 2
        torus = [(f"x{k - 2 * l}", l * (l + 1) // 2)]
        cycles = cls.doubled_trefoil_cycles()
        factors = [torus] + [cycles[(0, 1)]] * p + [cycles[(1, 0)]] * ((p - 1) // 2)
        return cls.tensor_chain(lp, factors)
