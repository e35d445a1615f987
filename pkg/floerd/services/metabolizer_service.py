import itertools
import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from floerd.core.config import settings
from floerd.core.exceptions import BudgetExceededError, InconsistentResultError, PreconditionError
from floerd.models.metabolizer import LinkingForm, Metabolizer, TorsionGroup, Vector
from floerd.schemas.metabolizer import (
    AppendixVerdict,
    MetabolizerSchema,
    MetabolizerVerdict,
    RealPartCertificate,
    RelationSpan,
    RhoPermutation,
    SpecialVectorResult,
)
from floerd.schemas.surgery import DBarTable

logger = logging.getLogger(__name__)

_t = sp.symbols("t")


def fold(x: int, p: int) -> int:
    """Representante en 1..(p-1)/2 de ±x mod p (0 si x ≡ 0)."""
    x %= p
    return x if x <= (p - 1) // 2 else p - x


class MetabolizerService:
    """Servicio de formas de enlace, metabolizadores y relaciones entre d̄"""

    # ==============================================
    # ENUMERACIÓN
    # ==============================================

    @classmethod
    def check_budget(cls, p: int, n: int) -> None:
        cost = p * p * p ** n
        if n > settings.METABOLIZER_MAX_RANK or cost > settings.METABOLIZER_BUDGET:
            raise BudgetExceededError(
                f"Enumerating metabolizers of (Z/{p * p})^{n} exceeds the budget "
                f"(p²·p^n = {cost}, limit {settings.METABOLIZER_BUDGET}, max rank {settings.METABOLIZER_MAX_RANK})",
                cost=cost, budget=settings.METABOLIZER_BUDGET,
            )

    @classmethod
    def enumerate_metabolizers(cls, p: int, n: int, form: Optional[str] = None) -> List[Metabolizer]:
        """
        Todos los subgrupos de orden p^n de (Z/p²)^n donde la forma se anula.

        Recorre las bases de Hermite triangulares superiores del retículo
        M + p²Z^n, fila a fila desde la última, descartando bases parciales
        no isótropas.

        Args:
            p: Primo impar
            n: Rango, n <= settings.METABOLIZER_MAX_RANK
            form: Signos de la forma diagonal, p. ej. "+-"; por defecto todos +

        Returns:
            Metabolizadores ordenados lexicográficamente por su base

        Raises:
            BudgetExceededError: Si p²·p^n supera el presupuesto
        """
        cls.check_budget(p, n)
        group = TorsionGroup(p, n)
        linking = LinkingForm.parse(group, form)
        modulus = group.modulus
        found: List[Metabolizer] = []

        def extend(i: int, rows: List[Vector], exponents: int) -> None:
            if i < 0:
                if exponents == n and cls._contains_multiples(rows, modulus):
                    found.append(Metabolizer(group, rows, hnf=rows))
                return
            for e in range(3):
                if exponents + e > n or exponents + e + 2 * i < n:
                    continue
                d = p ** e
                # Las entradas sobre un pivote d_j recorren 0..d_j-1; rows[k] es la fila i+1+k
                tails = itertools.product(*(range(row[i + 1 + k]) for k, row in enumerate(rows)))
                for tail in tails:
                    row = (0,) * i + (d,) + tuple(tail)
                    if all(linking.pairing(row, other) == 0 for other in [row] + rows):
                        extend(i - 1, [row] + rows, exponents + e)

        extend(n - 1, [], 0)
        found.sort(key=Metabolizer.sort_key)
        logger.info(f"Metabolizadores de (Z/{modulus})^{n} con forma {linking.label}: {len(found)}")
        return found

    @classmethod
    def _contains_multiples(cls, rows: Sequence[Vector], modulus: int) -> bool:
        """Si p²·e_k está en el retículo de las filas triangulares para todo k."""
        n = len(rows)
        for k in range(n):
            x: List[int] = []
            for j in range(n):
                rest = (modulus if j == k else 0) - sum(x[i] * rows[i][j] for i in range(j))
                if rest % rows[j][j]:
                    return False
                x.append(rest // rows[j][j])
        return True

    @classmethod
    def from_generators(
        cls, p: int, generators: Sequence[Sequence[int]], form: Optional[str] = None
    ) -> Metabolizer:
        """
        Subgrupo generado por ``generators``.

        Con ``form`` se comprueba además que sea un metabolizador: λ se anula
        sobre los generadores y |M| = p^n.

        Raises:
            PreconditionError: Si faltan generadores, sus longitudes difieren o
                no forman un metabolizador de la forma dada
        """
        if not generators:
            raise PreconditionError("At least one generator is required")
        if len({len(g) for g in generators}) != 1:
            raise PreconditionError("All generators must have the same length")
        group = TorsionGroup(p, len(generators[0]))
        metabolizer = Metabolizer(group, generators)
        if form is not None:
            linking = LinkingForm.parse(group, form)
            if not linking.vanishes_on(metabolizer.generators):
                raise PreconditionError(
                    f"The linking form {linking.label} does not vanish on the subgroup", form=linking.label,
                )
            if metabolizer.order != group.metabolizer_order:
                raise PreconditionError(
                    f"Subgroup has order {metabolizer.order}, a metabolizer has order {group.metabolizer_order}",
                    order=metabolizer.order,
                )
        return metabolizer

    @classmethod
    def to_schema(cls, metabolizer: Metabolizer, form: Optional[str] = None) -> MetabolizerSchema:
        return MetabolizerSchema(
            p=metabolizer.p,
            n=metabolizer.n,
            form=LinkingForm.parse(metabolizer.group, form).label,
            generators=[list(g) for g in metabolizer.generators],
            order=metabolizer.order,
        )

    # ==============================================
    # VECTOR ESPECIAL
    # ==============================================

    @classmethod
    def special_vector(cls, metabolizer: Metabolizer) -> SpecialVectorResult:
        """
        Elemento z de M con todas las entradas múltiplos de p y al menos
        n/2 entradas iguales a p.

        Gauss-Jordan sobre Z/p²: primero pivotes unidad, después pivotes de
        valuación 1 (trabajando sobre F_p). Con U filas unidad y V filas de
        valuación 1 se tiene |M| = p^{2U+V}, y
        z = Σ p·(fila unidad) + Σ c_k·(fila k) con c_k ≡ 1 - Σ_i u_{i,k} (mod p).

        Raises:
            PreconditionError: Si |M| != p^n
        """
        p, n = metabolizer.p, metabolizer.n
        modulus = p * p
        rows = [list(g) for g in metabolizer.generators]
        perm = list(range(n))

        def swap_columns(a: int, b: int) -> None:
            if a != b:
                perm[a], perm[b] = perm[b], perm[a]
                for row in rows:
                    row[a], row[b] = row[b], row[a]

        # Pivotes unidad
        units = 0
        while True:
            pivot = next(
                ((r, c) for c in range(units, n) for r in range(units, len(rows)) if rows[r][c] % p),
                None,
            )
            if pivot is None:
                break
            r, c = pivot
            rows[units], rows[r] = rows[r], rows[units]
            swap_columns(units, c)
            inverse = pow(rows[units][units], -1, modulus)
            rows[units] = [x * inverse % modulus for x in rows[units]]
            for k in range(len(rows)):
                if k != units and rows[k][units]:
                    factor = rows[k][units]
                    rows[k] = [(x - factor * y) % modulus for x, y in zip(rows[k], rows[units])]
            units += 1

        # El resto de filas son p·(vector sobre F_p) en las columnas >= units
        reduced = [[x // p % p for x in row] for row in rows[units:]]
        level = 0
        while True:
            pivot = next(
                ((r, c) for c in range(units + level, n) for r in range(level, len(reduced)) if reduced[r][c]),
                None,
            )
            if pivot is None:
                break
            r, c = pivot
            reduced[level], reduced[r] = reduced[r], reduced[level]
            col = units + level
            if c != col:
                perm[col], perm[c] = perm[c], perm[col]
                for row in rows[:units] + reduced:
                    row[col], row[c] = row[c], row[col]
            inverse = pow(reduced[level][col], -1, p)
            reduced[level] = [x * inverse % p for x in reduced[level]]
            for k in range(len(reduced)):
                if k != level and reduced[k][col]:
                    factor = reduced[k][col]
                    reduced[k] = [(x - factor * y) % p for x, y in zip(reduced[k], reduced[level])]
            level += 1

        if 2 * units + level != n:
            raise PreconditionError(
                f"Subgroup has order p^{2 * units + level}, expected p^{n}",
                order_exponent=2 * units + level, n=n,
            )

        z = [0] * n
        for row in rows[:units]:
            z = [(a + p * x) % modulus for a, x in zip(z, row)]
        for k, row in enumerate(reduced[:level]):
            col = units + k
            c = (1 - sum(unit_row[col] for unit_row in rows[:units])) % p
            z = [(a + c * p * x) % modulus for a, x in zip(z, row)]

        # Volver a las coordenadas originales
        original = [0] * n
        for position, column in enumerate(perm):
            original[column] = z[position]
        if not metabolizer.contains(original) or any(x % p for x in original):
            raise InconsistentResultError(f"Special vector {original} is not a valid element of the subgroup")
        p_entries = sum(1 for x in original if x == p)
        if 2 * p_entries < n:
            raise InconsistentResultError(f"Special vector {original} has only {p_entries} entries equal to p")
        return SpecialVectorResult(z=original, permutation=perm, p_entries=p_entries, unit_rank=units, p_rank=level)

    # ==============================================
    # ψ, ρ Y RELACIONES
    # ==============================================

    @classmethod
    def psi(cls, m: Sequence[int], p: int) -> List[int]:
        """
        α_j = número de coordenadas m_i ≡ ±j (mod p), j = 1..(p-1)/2, para m = p·(m_1, ..., m_n).

        Raises:
            PreconditionError: Si alguna coordenada no es múltiplo de p
        """
        q = (p - 1) // 2
        alpha = [0] * q
        for x in m:
            if x % p:
                raise PreconditionError(f"Element {list(m)} is not killed by p", element=list(m))
            j = fold(x // p, p)
            if j:
                alpha[j - 1] += 1
        return alpha

    @classmethod
    def primitive_root(cls, p: int) -> int:
        if not sp.isprime(p) or p < 3:
            raise PreconditionError(f"p must be an odd prime, got {p}", p=p)
        return int(sp.primitive_root(p))

    @classmethod
    def rho_permutation(cls, p: int, a: Optional[int] = None) -> RhoPermutation:
        """
        Permutación j -> ±(a·j) de {1..q} inducida por un generador a de Z_p*.

        Raises:
            PreconditionError: Si a no genera Z_p*
        """
        if a is None:
            a = cls.primitive_root(p)
        elif not sp.isprime(p) or a % p == 0 or sp.n_order(a, p) != p - 1:
            raise PreconditionError(f"{a} does not generate the units modulo {p}", p=p, a=a)
        q = (p - 1) // 2
        permutation = [fold(a * j, p) for j in range(1, q + 1)]
        orbit = [1]
        while len(orbit) < q:
            orbit.append(permutation[orbit[-1] - 1])
        return RhoPermutation(p=p, a=a, permutation=permutation, orbit=orbit)

    @classmethod
    def apply_rho(cls, alpha: Sequence[int], rho: RhoPermutation) -> List[int]:
        """(ρα)_{ρ(j)} = α_j."""
        image = [0] * len(alpha)
        for j, value in enumerate(alpha):
            image[rho.permutation[j] - 1] = value
        return image

    @classmethod
    def group_ring_coefficients(cls, alpha: Sequence[int], rho: RhoPermutation) -> List[int]:
        """f(t) = Σ α_{orbit[i]} t^i, coeficientes de grado creciente."""
        return [alpha[j - 1] for j in rho.orbit]

    @classmethod
    def relation_vectors(cls, metabolizer: Metabolizer, rho: Optional[RhoPermutation] = None) -> List[List[int]]:
        """ρ-órbitas de ψ(z) para z especial y todos los z de M_p, sin repetir ni el vector nulo."""
        p = metabolizer.p
        rho = rho or cls.rho_permutation(p)
        seeds = [cls.special_vector(metabolizer).z] + [list(v) for v in metabolizer.p_torsion()]
        relations: Dict[Tuple[int, ...], None] = {}
        for z in seeds:
            for alpha in cls.orbit_relations(cls.psi(z, p), rho):
                relations.setdefault(tuple(alpha), None)
        return [list(r) for r in relations]

    @classmethod
    def orbit_relations(cls, alpha: Sequence[int], rho: RhoPermutation) -> List[List[int]]:
        """α, ρ(α), ..., ρ^{q-1}(α) sin repetir ni el vector nulo."""
        seen: Dict[Tuple[int, ...], None] = {}
        current = list(alpha)
        for _ in range(len(current)):
            if any(current):
                seen.setdefault(tuple(current), None)
            current = cls.apply_rho(current, rho)
        return [list(r) for r in seen]

    @classmethod
    def _gcd_with_cyclic(cls, polynomials: Sequence[Sequence[int]], q: int) -> sp.Poly:
        g = sp.Poly(_t ** q - 1, _t, domain=sp.QQ)
        for coeffs in polynomials:
            f = sp.Poly(list(reversed(list(coeffs))), _t, domain=sp.QQ)
            if not f.is_zero:
                g = g.gcd(f)
        return g.monic()

    @classmethod
    def relation_span_is_full(cls, metabolizer: Metabolizer, rho: Optional[RhoPermutation] = None) -> RelationSpan:
        """
        Decide si las relaciones generan Q^q, por rango sobre Q y por el
        criterio mcd(f_z, t^q - 1) = 1 en Q[t].

        Raises:
            InconsistentResultError: Si los dos criterios no coinciden
        """
        p = metabolizer.p
        rho = rho or cls.rho_permutation(p)
        relations = cls.relation_vectors(metabolizer, rho)
        return cls.relation_span(relations, rho)

    @classmethod
    def relation_span(cls, relations: List[List[int]], rho: RhoPermutation) -> RelationSpan:
        """Rango sobre Q de las relaciones y mcd de sus polinomios con t^q - 1."""
        q = len(rho.permutation)
        if relations:
            matrix = sp.Matrix(relations)
            rank = matrix.rank()
            _, pivots = matrix.T.rref()
            basis = [relations[k] for k in pivots]
        else:
            rank, basis = 0, []
        g = cls._gcd_with_cyclic([cls.group_ring_coefficients(r, rho) for r in relations], q)
        if rank != q - g.degree():
            logger.error(f"Rango {rank} y mcd {g.as_expr()} no coinciden para q={q}")
            raise InconsistentResultError(
                f"Relation rank {rank} disagrees with gcd {g.as_expr()} of degree {g.degree()}",
                rank=rank, gcd=str(g.as_expr()),
            )
        return RelationSpan(
            q=q, relations=len(relations), rank=rank, full=rank == q, gcd=str(g.as_expr()), basis=basis
        )

    @classmethod
    def polynomial_coprimality(cls, coefficients: Sequence[int], q: int) -> Tuple[bool, str]:
        """mcd(f, t^q - 1) en Q[t] para f dado por coeficientes de grado creciente."""
        g = cls._gcd_with_cyclic([coefficients], q)
        return g.degree() == 0, str(g.as_expr())

    @classmethod
    def real_part_certificate(cls, coefficients: Sequence[int], q: int) -> RealPartCertificate:
        """
        Evalúa f en las raíces q-ésimas de la unidad no triviales. Si c_0 > 0
        domina la suma del resto de coeficientes (no negativos) y q es impar,
        Re f(ω) > 0 en todas ellas.
        """
        coeffs = list(coefficients) + [0] * max(0, q - len(coefficients))
        roots = np.exp(2j * np.pi * np.arange(1, q) / q)
        values = np.polynomial.polynomial.polyval(roots, np.array(coeffs, dtype=float))
        rest = coeffs[1:]
        dominant = coeffs[0] > 0 and all(c >= 0 for c in rest) and coeffs[0] >= sum(rest)
        modulus = np.abs(values)
        return RealPartCertificate(
            coefficients=list(coefficients),
            q=q,
            dominant_constant=dominant,
            min_real_part=float(values.real.min()) if len(values) else float(coeffs[0]),
            min_modulus=float(modulus.min()) if len(values) else float(abs(coeffs[0])),
            nonvanishing=bool((modulus > 1e-9).all()),
        )

    # ==============================================
    # VEREDICTO
    # ==============================================

    @classmethod
    def dbar_values(cls, table: DBarTable) -> List[Optional[Tuple[Optional[Fraction], Optional[Fraction], bool]]]:
        """(cota inferior, cota superior, exacto) de d̄_j = d̄(s_{pj}) para j = 1..q."""
        q = (table.p - 1) // 2
        reduced = {e.m: e for e in table.reduced()}
        values = []
        for j in range(1, q + 1):
            entry = reduced.get(table.p * j)
            if entry is None:
                values.append(None)
                continue
            values.append((entry.dbar_lower_bound, entry.dbar_upper_bound, entry.dbar_kind == "exact"))
        return values

    @classmethod
    def relation_status(cls, alpha: Sequence[int], values) -> str:
        """violated, satisfied o undetermined para Σ α_j d̄_j = 0."""
        involved = [(a, values[j]) for j, a in enumerate(alpha) if a]
        if any(v is None for _, v in involved):
            return "undetermined"
        if all(v[0] is not None for _, v in involved) and sum(a * v[0] for a, v in involved) > 0:
            return "violated"
        if all(v[1] is not None for _, v in involved) and sum(a * v[1] for a, v in involved) < 0:
            return "violated"
        if all(v[2] for _, v in involved) and sum(a * v[0] for a, v in involved) == 0:
            return "satisfied"
        return "undetermined"

    @classmethod
    def consistency(cls, relations: List[List[int]], forces_zero: bool, table: Optional[DBarTable]) -> str:
        if table is None:
            return "unknown"
        values = cls.dbar_values(table)
        statuses = [cls.relation_status(r, values) for r in relations]
        nonzero = any(
            v is not None and ((v[0] is not None and v[0] > 0) or (v[1] is not None and v[1] < 0))
            for v in values
        )
        if "violated" in statuses or (forces_zero and nonzero):
            return "inconsistent"
        if all(s == "satisfied" for s in statuses):
            return "consistent"
        return "undetermined"

    @classmethod
    def verify_appendix_theorem(
        cls,
        p: int,
        n: int,
        form: Optional[str] = None,
        dbar: Optional[DBarTable] = None,
        a: Optional[int] = None,
    ) -> AppendixVerdict:
        """
        Relaciones Σ α_j d̄_j = 0 impuestas por cada metabolizador y su
        compatibilidad con una tabla d̄.

        Returns:
            AppendixVerdict; obstructed es True si ningún metabolizador es
            compatible y algún d̄ es no nulo

        Raises:
            BudgetExceededError: Si la enumeración supera el presupuesto
        """
        if dbar is not None and dbar.p != p:
            raise PreconditionError(f"d̄ table is for p={dbar.p}, expected {p}", table_p=dbar.p, p=p)
        metabolizers = cls.enumerate_metabolizers(p, n, form)
        rho = cls.rho_permutation(p, a)
        q = (p - 1) // 2
        verdicts = []
        for metabolizer in metabolizers:
            relations = cls.relation_vectors(metabolizer, rho)
            span = cls.relation_span(relations, rho)
            verdicts.append(MetabolizerVerdict(
                generators=[list(g) for g in metabolizer.generators],
                relation_rank=span.rank,
                forces_zero=span.full,
                consistency=cls.consistency(relations, span.full, dbar),
            ))

        obstructed = None
        if dbar is not None:
            nonzero = any(
                v is not None and ((v[0] is not None and v[0] > 0) or (v[1] is not None and v[1] < 0))
                for v in cls.dbar_values(dbar)
            )
            obstructed = nonzero and all(v.consistency == "inconsistent" for v in verdicts)
        label = LinkingForm.parse(TorsionGroup(p, n), form).label
        logger.info(f"Verificación p={p}, n={n}, forma {label}: {len(verdicts)} metabolizadores, obstruido={obstructed}")
        return AppendixVerdict(
            p=p, n=n, form=label, q=q, metabolizers=verdicts,
            all_force_zero=all(v.forces_zero for v in verdicts),
            obstructed=obstructed,
        )
