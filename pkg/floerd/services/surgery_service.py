import asyncio
import functools
import logging
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Dict, List, Optional

from pydantic import ValidationError

from floerd.core.config import settings
from floerd.core.exceptions import FloerdException, InconsistentResultError, PreconditionError
from floerd.models.complex import BifilteredComplex
from floerd.models.quotient import TruncatedQuotientComplex
from floerd.schemas.surgery import DBarEntry, DBarTable, DInvariantResult, SurgeryProblem, TheoremBounds
from floerd.services.complex_service import ComplexService
from floerd.services.knot_service import KnotService

logger = logging.getLogger(__name__)

# Mínimos de i+j por grado en {-1, 0, 1} para el modelo del doble del trébol
DOUBLE_MINIMA = {-1: 0, 0: 1, 1: 2}


class SurgeryService:
    """Servicio para invariantes d de cirugías grandes"""

    @classmethod
    def grading_shift(cls, q: int, m: int) -> Fraction:
        """
        s(q, m) = (-(2m - q)² + q) / (4q).

        Raises:
            PreconditionError: Si q no es positivo
        """
        if q <= 0:
            raise PreconditionError(f"Surgery coefficient must be positive, got {q}", q=q)
        return Fraction(-(2 * m - q) ** 2 + q, 4 * q)

    @classmethod
    def problem(cls, c: BifilteredComplex, q: int, m: int) -> SurgeryProblem:
        try:
            return SurgeryProblem(q=q, m=m, genus=c.genus)
        except ValidationError as e:
            message = e.errors()[0]["msg"].removeprefix("Value error, ")
            raise PreconditionError(f"{c.name}: {message}", q=q, m=m, genus=c.genus) from e

    @classmethod
    def d_invariant(
        cls,
        c: BifilteredComplex,
        q: int,
        m: int,
        window: Optional[int] = None,
        knot: Optional[str] = None,
        check_stability: bool = True,
    ) -> DInvariantResult:
        """
        d(S³_q(K), s_m) = (grado del fondo de la torre) - s(q, m).

        Args:
            c: Complejo del nudo, validado
            q: Coeficiente de cirugía, q >= 2g - 1
            m: Etiqueta Spin^c, |m| <= (q-1)/2
            window: Ventana explícita; por defecto settings.DEFAULT_WINDOW o la calculada
            knot: Nombre a mostrar; por defecto el del complejo
            check_stability: Recalcula con ventana N+1

        Returns:
            DInvariantResult con d exacto, fondo de la torre y desplazamiento

        Raises:
            PreconditionError: Si no se cumplen las hipótesis de cirugía grande
            WindowTooSmallError: Si la ventana no basta o no es estable
        """
        problem = cls.problem(c, q, m)
        ComplexService.ensure_valid(c)
        if window is None:
            window = settings.DEFAULT_WINDOW
        tq = TruncatedQuotientComplex.build(c, problem.m, window)
        logger.info(f"d({c.name}, q={q}, m={m}): ventana {tq.window}, {tq.size} trasladados")
        try:
            th = ComplexService.truncated_homology(tq, tower_only=True, check_stability=check_stability)
            bottom = th.tower_bottom
        except FloerdException as e:
            logger.error(f"Error al calcular d({c.name}, q={q}, m={m}): {e.message}")
            raise

        shift = cls.grading_shift(q, m)
        d = bottom - shift
        logger.info(f"d({c.name}, q={q}, m={m}) = {bottom} - ({shift}) = {d}")
        return DInvariantResult(
            knot=knot or c.name,
            q=q,
            m=m,
            d=d,
            tower_bottom=bottom,
            shift=shift,
            window=tq.window,
            stable=bool(th.stable) if check_stability else False,
            representative=th.representative_labels(),
        )

    @classmethod
    def labels(cls, p: int, all_m: bool = False) -> List[int]:
        """Etiquetas a calcular: 0 y m = p·k, o todas las m en 0..(p²-1)/2."""
        if all_m:
            return list(range(0, (p * p - 1) // 2 + 1))
        return [0] + [p * k for k in range(1, (p - 1) // 2 + 1)]

    @classmethod
    async def dbar_table(
        cls,
        c: BifilteredComplex,
        p: int,
        knot: Optional[str] = None,
        all_m: bool = False,
        window: Optional[int] = None,
    ) -> DBarTable:
        """
        Tabla de d̄(s_m) = d(s_m) - d(s_0) para q = p².

        Los valores de d se calculan de forma concurrente; con
        settings.MAX_WORKERS > 1 cada uno corre en un hilo del pool.

        Raises:
            PreconditionError: Si p² < 2g - 1
        """
        q = p * p
        ms = cls.labels(p, all_m)
        for m in ms:
            cls.problem(c, q, m)
        # Calentar las cachés del complejo antes de que entren los hilos
        ComplexService.ensure_valid(c)
        ComplexService.component_homology_ranks(c)

        compute = functools.partial(cls.d_invariant, c, q, window=window, knot=knot)
        loop = asyncio.get_running_loop()
        if settings.MAX_WORKERS > 1:
            with ThreadPoolExecutor(max_workers=settings.MAX_WORKERS) as executor:
                results = await asyncio.gather(
                    *(loop.run_in_executor(executor, functools.partial(compute, m=m)) for m in ms)
                )
        else:
            results = [compute(m=m) for m in ms]

        by_m: Dict[int, DInvariantResult] = {r.m: r for r in results}
        d0 = by_m[0].d
        entries = [
            DBarEntry(
                m=m,
                d=by_m[m].d,
                tower_bottom=by_m[m].tower_bottom,
                shift=by_m[m].shift,
                dbar=by_m[m].d - d0,
                window=by_m[m].window,
            )
            for m in ms
        ]
        logger.info(f"Tabla d̄ de {knot or c.name} con p={p}: {[str(e.dbar) for e in entries]}")
        return DBarTable(knot=knot or c.name, p=p, q=q, d0=d0, entries=entries)

    # ==============================================
    # COTAS SIMBÓLICAS
    # ==============================================

    @classmethod
    def torus_minima(cls, p: int) -> Dict[int, int]:
        return {
            -1: (p * p - 9) // 4,
            0: (p * p - 2 * p + 1) // 4,
            1: (p * p - 1) // 4,
        }

    @classmethod
    def _check_minima(cls, c: BifilteredComplex, expected: Dict[int, int]) -> None:
        for grading, value in expected.items():
            found = ComplexService.grading_minimum(c, grading)
            if found != value:
                raise InconsistentResultError(
                    f"{c.name}: minimum of i+j in grading {grading} is {found}, expected {value}",
                    grading=grading, found=found, expected=value,
                )

    @classmethod
    def grading_zero_minimum(cls, factor_minima: List[Dict[int, int]]) -> int:
        """
        Mínimo de i+j sobre cadenas de grado 0 de un producto tensorial,
        por programación dinámica sobre los factores (grados en {-1, 0, 1}).
        """
        best: Dict[int, int] = {0: 0}
        for minima in factor_minima:
            step: Dict[int, int] = {}
            for total, value in best.items():
                for grading, minimum in minima.items():
                    key = total + grading
                    candidate = value + minimum
                    if key not in step or candidate < step[key]:
                        step[key] = candidate
            best = step
        if 0 not in best:
            raise InconsistentResultError("No grading assignment sums to zero")
        return best[0]

    @classmethod
    def theorem_bounds(cls, p: int) -> TheoremBounds:
        """
        Cotas de d(S³_{p²}(L_p), s_0) y d(S³_{p²}(L_p), s_p) sin construir L_p.

        Args:
            p: Primo congruente con 3 módulo 4

        Returns:
            TheoremBounds con d(s_0) <= -p-1 y d(s_p) = -p+1

        Raises:
            PreconditionError: Si p no es primo o no es 3 módulo 4
            InconsistentResultError: Si los modelos no reproducen las fórmulas cerradas
        """
        KnotService.check_lp_prime(p)
        torus_c, torus_cycle = KnotService.torus_special_cycle(p)
        double = KnotService.doubled_trefoil_model()
        torus = cls.torus_minima(p)
        cls._check_minima(torus_c, torus)
        cls._check_minima(double, DOUBLE_MINIMA)

        copies = KnotService.lp_factor_count(p)
        dp_minimum = cls.grading_zero_minimum([torus] + [DOUBLE_MINIMA] * copies)
        if dp_minimum != (p * p + 4 * p - 1) // 4:
            raise InconsistentResultError(
                f"Grading-0 minimum {dp_minimum} differs from (p²+4p-1)/4 for p={p}", found=dp_minimum
            )

        # Ciclo del toro, p copias del ciclo (0,1) y (p-1)/2 copias del ciclo (1,0)
        cycles = KnotService.doubled_trefoil_cycles()
        parts = [
            (1, ComplexService.chain_filtration(torus_c, torus_cycle)),
            (p, ComplexService.chain_filtration(double, ComplexService.chain(double, cycles[(0, 1)]))),
            ((p - 1) // 2, ComplexService.chain_filtration(double, ComplexService.chain(double, cycles[(1, 0)]))),
        ]
        i = sum(count * level[0] for count, level in parts)
        j = sum(count * level[1] for count, level in parts)
        if (i, j) != ((p * p - 1) // 8, (p * p + 8 * p - 1) // 8):
            raise InconsistentResultError(f"Special cycle of L_{p} assembles at {(i, j)}", level=[i, j])

        q = p * p
        k = (dp_minimum + 1) // 2
        d0_upper = -2 * k - cls.grading_shift(q, 0)
        dp_value = -2 * i - cls.grading_shift(q, p)
        logger.info(f"Cotas para p={p}: d(s_0) <= {d0_upper}, d(s_{p}) = {dp_value}")
        return TheoremBounds(
            p=p,
            dp_minimum=dp_minimum,
            special_cycle=[i, j],
            d0_upper=d0_upper,
            dp_value=dp_value,
            dbar_lower=dp_value - d0_upper,
        )

    @classmethod
    def bounds_table(cls, p: int, knot: Optional[str] = None) -> DBarTable:
        """Tabla d̄ en modo de cotas: solo la entrada m = p, con procedencia declarada."""
        bounds = cls.theorem_bounds(p)
        q = p * p
        return DBarTable(
            knot=knot or f"lp:{p}",
            p=p,
            q=q,
            d0=bounds.d0_upper,
            d0_kind="upper_bound",
            entries=[
                DBarEntry(
                    m=0, d=bounds.d0_upper, d_kind="upper_bound", shift=cls.grading_shift(q, 0),
                    dbar=Fraction(0), provenance="claimed",
                ),
                DBarEntry(
                    m=p, d=bounds.dp_value, shift=cls.grading_shift(q, p),
                    dbar=bounds.dbar_lower, dbar_kind="lower_bound", provenance="claimed",
                ),
            ],
        )
