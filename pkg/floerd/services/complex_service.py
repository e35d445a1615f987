import json
import logging
from collections import Counter
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from floerd.core.config import settings
from floerd.core.exceptions import (
    ComplexValidationError,
    ReportIOError,
    SizeGuardError,
    WindowTooSmallError,
)
from floerd.models.complex import BifilteredComplex, Translate, translate_label
from floerd.models.quotient import TruncatedHomology, TruncatedQuotientComplex
from floerd.schemas.complex import (
    BasisElementSchema,
    CheckResult,
    ComplexDocument,
    ComplexSummary,
    DifferentialEntrySchema,
    HomologyReport,
    ValidationReport,
)
from floerd.services.gf2 import EchelonBasis, gf2_kernel, gf2_rank
from floerd.services.homology_engine import compute_truncated_homology

logger = logging.getLogger(__name__)

Chain = List[Translate]


class ComplexService:
    """Servicio para construir, validar y operar complejos bifiltrados"""

    # ==============================================
    # CONSTRUCCIÓN
    # ==============================================

    @classmethod
    def unknot(cls) -> BifilteredComplex:
        return BifilteredComplex("unknot", ["u"], [0], [0], [0], metadata={"genus": 0})

    @classmethod
    def tensor(
        cls,
        a: BifilteredComplex,
        b: BifilteredComplex,
        name: Optional[str] = None,
        max_generators: Optional[int] = None,
    ) -> BifilteredComplex:
        """
        Producto tensorial filtrado (suma conexa de nudos).

        Args:
            a: Primer factor
            b: Segundo factor
            name: Nombre del resultado (por defecto "a # b")
            max_generators: Límite de generadores; por defecto settings.MAX_GENERATORS

        Returns:
            Complejo con base de pares "x|y" y diferencial de Leibniz sobre F2

        Raises:
            SizeGuardError: Si el producto supera el límite de generadores
        """
        na, nb = a.size, b.size
        limit = settings.MAX_GENERATORS if max_generators is None else max_generators
        if na * nb > limit:
            raise SizeGuardError(
                f"Tensor product of {a.name!r} and {b.name!r} would have {na * nb} generators (limit {limit})",
                projected=na * nb, limit=limit,
            )

        ids = [f"{x}|{y}" for x in a.ids for y in b.ids]
        ya, xb = np.arange(nb), np.arange(na)
        src = np.concatenate(((a.src[:, None] * nb + ya).ravel(), (xb[:, None] * nb + b.src).ravel()))
        dst = np.concatenate(((a.dst[:, None] * nb + ya).ravel(), (xb[:, None] * nb + b.dst).ravel()))
        upower = np.concatenate((np.repeat(a.upower, nb), np.tile(b.upower, na)))

        return BifilteredComplex(
            name or f"{a.name} # {b.name}",
            ids,
            np.add.outer(a.gr, b.gr).ravel(),
            np.add.outer(a.i, b.i).ravel(),
            np.add.outer(a.j, b.j).ravel(),
            src, dst, upower,
            metadata={"genus": a.genus + b.genus},
        )

    @classmethod
    def tensor_power(cls, c: BifilteredComplex, k: int, max_generators: Optional[int] = None) -> BifilteredComplex:
        if k < 0:
            raise ComplexValidationError(f"Negative tensor power {k}", power=k)
        if k == 0:
            return cls.unknot()
        result = c
        for _ in range(k - 1):
            result = cls.tensor(result, c, max_generators=max_generators)
        return result

    @classmethod
    def transpose(cls, c: BifilteredComplex) -> BifilteredComplex:
        """Intercambia los papeles de i y j."""
        name = c.name[:-2] if c.name.endswith("^T") else f"{c.name}^T"
        return BifilteredComplex(
            name, c.ids, c.gr, c.j, c.i, c.src, c.dst, c.upower, metadata=c.metadata
        )

    # ==============================================
    # VALIDACIÓN
    # ==============================================

    @classmethod
    def validate(cls, c: BifilteredComplex) -> ValidationReport:
        """
        Valida un complejo: ley de grados, caída estricta de filtración,
        entradas sin duplicar, ∂² = 0 y homología de rango 1.

        Returns:
            ValidationReport con el primer incumplimiento de cada chequeo
        """
        checks: List[CheckResult] = []

        def entry(k: int) -> DifferentialEntrySchema:
            return DifferentialEntrySchema(
                src=c.ids[int(c.src[k])], dst=c.ids[int(c.dst[k])], u=int(c.upower[k])
            )

        def check(name: str, bad: np.ndarray, message: str) -> bool:
            if len(bad):
                e = entry(int(bad[0]))
                checks.append(CheckResult(
                    name=name, passed=False,
                    detail=f"{message}: {e.src} -> U^{e.u}*{e.dst}", entry=e,
                ))
                return False
            checks.append(CheckResult(name=name, passed=True))
            return True

        graded = check(
            "grading_law",
            np.nonzero(c.gr[c.dst] - 2 * c.upower != c.gr[c.src] - 1)[0],
            "entry violates gr(target) - 2u = gr(source) - 1",
        )

        it, jt = c.i[c.dst] - c.upower, c.j[c.dst] - c.upower
        below = (it <= c.i[c.src]) & (jt <= c.j[c.src])
        level = (it == c.i[c.src]) & (jt == c.j[c.src])
        check("filtration_drop", np.nonzero(~below | level)[0], "entry does not strictly lower the filtration")

        if c.n_entries > 1:
            same = (c.src[1:] == c.src[:-1]) & (c.dst[1:] == c.dst[:-1]) & (c.upower[1:] == c.upower[:-1])
            duplicates = np.nonzero(same)[0] + 1
        else:
            duplicates = np.zeros(0, dtype=np.int64)
        check("unique_entries", duplicates, "duplicate entry")

        violation = cls._d_squared_violation(c, graded)
        if violation is None:
            checks.append(CheckResult(name="d_squared_zero", passed=True))
        else:
            checks.append(CheckResult(
                name="d_squared_zero", passed=False,
                detail=f"∂²({violation.src}) contains U^{violation.u}*{violation.dst}",
                entry=violation,
            ))

        rank = cls.homology_rank(c) if violation is None else None
        checks.append(CheckResult(
            name="rank_one_homology",
            passed=rank == 1,
            detail=None if rank == 1 else f"homology rank over F2[U,U^-1] is {rank}",
        ))

        report = ValidationReport(
            name=c.name, generators=c.size, entries=c.n_entries, checks=checks, homology_rank=rank
        )
        if not report.valid:
            logger.info(f"Complejo {c.name!r} no válido: {report.first_failure().detail}")
        return report

    @classmethod
    def ensure_valid(cls, c: BifilteredComplex) -> ValidationReport:
        """Valida y lanza ComplexValidationError con el primer chequeo fallido."""
        report = c.cached("validation", lambda: cls.validate(c))
        failure = report.first_failure()
        if failure is not None:
            raise ComplexValidationError(
                f"{c.name}: {failure.name} failed ({failure.detail})",
                check=failure.name,
                entry=failure.entry.model_dump() if failure.entry else None,
            )
        return report

    @classmethod
    def _d_squared_violation(cls, c: BifilteredComplex, graded: bool) -> Optional[DifferentialEntrySchema]:
        if c.n_entries == 0:
            return None
        if graded:
            # Con la ley de grados la potencia de U de una composición la fijan sus extremos.
            square = c.adjacency() @ c.adjacency()
            square.data %= 2
            square.eliminate_zeros()
            if square.nnz == 0:
                return None
            coo = square.tocoo()
            k = np.lexsort((coo.row, coo.col))[0]
            s, t = int(coo.col[k]), int(coo.row[k])
            u = (int(c.gr[t]) - int(c.gr[s]) + 2) // 2
            return DifferentialEntrySchema(src=c.ids[s], dst=c.ids[t], u=u)

        parity: Counter = Counter()
        for s, mid, u1 in zip(c.src.tolist(), c.dst.tolist(), c.upower.tolist()):
            for t, u2 in c.outgoing(mid):
                parity[(s, t, u1 + u2)] ^= 1
        odd = sorted(key for key, value in parity.items() if value)
        if not odd:
            return None
        s, t, u = odd[0]
        return DifferentialEntrySchema(src=c.ids[s], dst=c.ids[t], u=u)

    @classmethod
    def component_homology_ranks(cls, c: BifilteredComplex) -> List[int]:
        """Rango de la homología (U = 1) de cada componente conexa."""

        def compute() -> List[int]:
            labels = c.component_labels()
            ranks = []
            for members in c.components():
                local = {int(g): k for k, g in enumerate(members)}
                columns = []
                for g in members:
                    col = 0
                    for y, _ in c.outgoing(int(g)):
                        col ^= 1 << local[y]
                    columns.append(col)
                ranks.append(len(members) - 2 * gf2_rank(columns))
            logger.debug(f"{c.name}: {len(ranks)} componentes, {int(np.count_nonzero(ranks))} no acíclicas")
            return ranks

        return c.cached("component_ranks", compute)

    @classmethod
    def homology_rank(cls, c: BifilteredComplex) -> int:
        """Rango de H(C) sobre F2[U,U^-1], calculado en U = 1."""
        return sum(cls.component_homology_ranks(c))

    # ==============================================
    # HOMOLOGÍA TRUNCADA
    # ==============================================

    @classmethod
    def truncated_homology(
        cls,
        tq: TruncatedQuotientComplex,
        tower_only: bool = False,
        check_stability: bool = True,
    ) -> TruncatedHomology:
        """
        Homología del cociente truncado por grados, con la acción de U.

        Args:
            tq: Cociente truncado C{max(i, j-m) >= 0}
            tower_only: Si es True solo se consideran componentes con homología
            check_stability: Recalcula con ventana N+1 y compara

        Returns:
            TruncatedHomology con dimensiones, matrices de U y torres

        Raises:
            WindowTooSmallError: Si la ventana no cubre el rango estable o la
                comprobación N -> N+1 falla
        """
        result = cls._window_homology(tq, tower_only)
        if check_stability:
            wider = cls._window_homology(tq.with_window(tq.window + 1), tower_only)
            lo, hi = result.reliable
            same_dims = all(
                result.dimensions.get(h, 0) == wider.dimensions.get(h, 0) for h in range(lo, hi + 1)
            )
            same_towers = [t.bottom_grading for t in result.towers] == [t.bottom_grading for t in wider.towers]
            if not (same_dims and same_towers):
                logger.error(f"Inestabilidad de ventana para {tq.complex.name} m={tq.m} N={tq.window}")
                raise WindowTooSmallError(
                    f"Homology of {tq.complex.name!r} at m={tq.m} changes between windows "
                    f"{tq.window} and {tq.window + 1}",
                    window=tq.window, m=tq.m,
                )
            result.stable = True
        return result

    @classmethod
    def _window_homology(cls, tq: TruncatedQuotientComplex, tower_only: bool) -> TruncatedHomology:
        c = tq.complex
        components = c.components()
        ranks = cls.component_homology_ranks(c)
        keep = [k for k, r in enumerate(ranks) if r or not tower_only]
        return compute_truncated_homology(
            tq,
            [components[k] for k in keep],
            carries_homology=[ranks[k] > 0 for k in keep],
        )

    @classmethod
    def homology_report(cls, th: TruncatedHomology) -> HomologyReport:
        lo, hi = th.reliable
        single = len(th.towers) == 1
        return HomologyReport(
            m=th.quotient.m,
            window=th.window,
            reliable_min=lo,
            reliable_max=hi,
            dimensions={h: d for h, d in th.dimensions.items()},
            tower_bottom=th.tower_bottom if single else None,
            representative=th.representative_labels() if single else [],
            stable=th.stable,
        )

    @classmethod
    def quotient_homology(
        cls,
        c: BifilteredComplex,
        m: int,
        window: Optional[int] = None,
        tower_only: bool = False,
    ) -> HomologyReport:
        """
        Informe de la homología de C{max(i, j-m) >= 0} truncado a la ventana.

        Raises:
            ComplexValidationError: Si el complejo no es válido
            WindowTooSmallError: Si la ventana no basta o no es estable
        """
        cls.ensure_valid(c)
        tq = TruncatedQuotientComplex.build(c, m, window if window is not None else settings.DEFAULT_WINDOW)
        logger.info(f"Homología de {c.name} con m={m}: ventana {tq.window}")
        return cls.homology_report(cls.truncated_homology(tq, tower_only=tower_only))

    # ==============================================
    # CADENAS
    # ==============================================

    @classmethod
    def chain(cls, c: BifilteredComplex, terms: Iterable[Tuple[str, int]]) -> Chain:
        """Cadena a partir de pares (id, t) que representan U^{-t}·id (mod 2)."""
        parity: Counter = Counter()
        for ident, t in terms:
            parity[(c.index_of(ident), int(t))] ^= 1
        return sorted(key for key, value in parity.items() if value)

    @classmethod
    def chain_labels(cls, c: BifilteredComplex, chain: Chain) -> List[str]:
        return [translate_label(c.ids[x], t) for x, t in chain]

    @classmethod
    def differential_of(cls, c: BifilteredComplex, chain: Chain) -> Chain:
        parity: Counter = Counter()
        for x, t in chain:
            for y, u in c.outgoing(x):
                parity[(y, t - u)] ^= 1
        return sorted(key for key, value in parity.items() if value)

    @classmethod
    def is_cycle(cls, c: BifilteredComplex, chain: Chain) -> bool:
        return not cls.differential_of(c, chain)

    @classmethod
    def chain_grading(cls, c: BifilteredComplex, chain: Chain) -> Optional[int]:
        """Grado de una cadena homogénea, None si no es homogénea o está vacía."""
        gradings = {int(c.gr[x]) + 2 * t for x, t in chain}
        return gradings.pop() if len(gradings) == 1 else None

    @classmethod
    def chain_filtration(cls, c: BifilteredComplex, chain: Chain) -> Tuple[int, int]:
        """Nivel de filtración (máximo componente a componente) de una cadena."""
        if not chain:
            raise ComplexValidationError("The empty chain has no filtration level")
        return (
            max(int(c.i[x]) + t for x, t in chain),
            max(int(c.j[x]) + t for x, t in chain),
        )

    @classmethod
    def represents_generator(cls, c: BifilteredComplex, chain: Chain) -> bool:
        """
        Indica si la cadena es un ciclo homogéneo que no es borde, es decir,
        representa el generador de H(C) para complejos de rango 1.
        """
        if not chain or cls.chain_grading(c, chain) is None or not cls.is_cycle(c, chain):
            return False
        labels = c.component_labels()
        components = c.components()
        touched: Dict[int, List[int]] = {}
        for x, _ in chain:
            touched.setdefault(int(labels[x]), []).append(x)
        for label, xs in touched.items():
            members = components[label]
            local = {int(g): k for k, g in enumerate(members)}
            image = EchelonBasis()
            for g in members:
                col = 0
                for y, _ in c.outgoing(int(g)):
                    col ^= 1 << local[y]
                image.add(col)
            vec = 0
            for x in xs:
                vec ^= 1 << local[x]
            if not image.contains(vec):
                return True
        return False

    @classmethod
    def find_filtered_cycle(
        cls, c: BifilteredComplex, grading: int, i_max: int, j_max: int
    ) -> Optional[Chain]:
        """
        Busca un ciclo de grado ``grading`` con filtración <= (i_max, j_max)
        que no sea borde.

        Returns:
            La cadena encontrada, o None si no existe
        """
        ranks = cls.component_homology_ranks(c)
        for members, rank in zip(c.components(), ranks):
            if not rank:
                continue
            local = {int(g): k for k, g in enumerate(members)}
            candidates: Chain = []
            for g in members:
                g = int(g)
                if (grading - int(c.gr[g])) % 2:
                    continue
                t = (grading - int(c.gr[g])) // 2
                if int(c.i[g]) + t <= i_max and int(c.j[g]) + t <= j_max:
                    candidates.append((g, t))
            if not candidates:
                continue

            # En un grado fijo cada generador tiene un solo trasladado; los índices locales indexan los estratos.
            def column(g: int) -> int:
                col = 0
                for y, _ in c.outgoing(g):
                    col ^= 1 << local[y]
                return col

            kernel, _ = gf2_kernel([column(g) for g, _ in candidates])
            boundaries = EchelonBasis()
            for g in members:
                if (grading + 1 - int(c.gr[g])) % 2 == 0:
                    boundaries.add(column(int(g)))
            for tag in kernel:
                vec = 0
                chain: Chain = []
                for k, (g, t) in enumerate(candidates):
                    if tag >> k & 1:
                        vec ^= 1 << local[g]
                        chain.append((g, t))
                if not boundaries.contains(vec):
                    return sorted(chain)
        return None

    @classmethod
    def grading_minimum(cls, c: BifilteredComplex, grading: int) -> Optional[int]:
        """Mínimo de i+j sobre los trasladados de grado ``grading`` (barrido exhaustivo)."""
        mask = (grading - c.gr) % 2 == 0
        if not mask.any():
            return None
        return int((c.i[mask] + c.j[mask] + grading - c.gr[mask]).min())

    @classmethod
    def associated_graded_ranks(cls, c: BifilteredComplex) -> Dict[int, Dict[int, int]]:
        """Cuenta los trasladados sobre la recta i = 0 por (j, grado)."""
        j = (c.j - c.i).tolist()
        gr = (c.gr - 2 * c.i).tolist()
        table: Dict[int, Dict[int, int]] = {}
        for a, g in zip(j, gr):
            row = table.setdefault(a, {})
            row[g] = row.get(g, 0) + 1
        return {a: dict(sorted(table[a].items(), reverse=True)) for a in sorted(table, reverse=True)}

    @classmethod
    def summary(cls, c: BifilteredComplex) -> ComplexSummary:
        return ComplexSummary(
            name=c.name,
            generators=c.size,
            entries=c.n_entries,
            genus=c.genus,
            filtration_width=c.filtration_width,
            components=len(c.components()),
        )

    # ==============================================
    # SERIALIZACIÓN
    # ==============================================

    @classmethod
    def to_document(cls, c: BifilteredComplex) -> ComplexDocument:
        return ComplexDocument(
            name=c.name,
            basis=[BasisElementSchema(id=b.id, gr=b.gr, i=b.i, j=b.j) for b in c.basis],
            diff=[DifferentialEntrySchema(src=e.source, dst=e.target, u=e.upower) for e in c.diff],
        )

    @classmethod
    def from_document(cls, doc: ComplexDocument) -> BifilteredComplex:
        return BifilteredComplex.from_elements(
            doc.name,
            [(b.id, b.gr, b.i, b.j) for b in doc.basis],
            [(e.src, e.dst, e.u) for e in doc.diff],
        )

    @classmethod
    def dumps(cls, c: BifilteredComplex) -> str:
        """JSON canónico: base en orden almacenado, diferencial ordenado."""
        return json.dumps(cls.to_document(c).model_dump(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> BifilteredComplex:
        try:
            doc = ComplexDocument.model_validate_json(text)
        except ValidationError as e:
            raise ComplexValidationError(f"Malformed complex document: {e.errors()[0]['msg']}") from e
        return cls.from_document(doc)

    @classmethod
    def read(cls, path: Union[str, Path]) -> BifilteredComplex:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            logger.error(f"No se pudo leer {path}: {e}")
            raise ReportIOError(f"Cannot read {path}: {e.strerror or e}", path=str(path)) from e
        return cls.loads(text)

    @classmethod
    def write(cls, c: BifilteredComplex, path: Union[str, Path]) -> None:
        try:
            Path(path).write_text(cls.dumps(c), encoding="utf-8")
        except OSError as e:
            logger.error(f"No se pudo escribir {path}: {e}")
            raise ReportIOError(f"Cannot write {path}: {e.strerror or e}", path=str(path)) from e
