import json
import logging
from pathlib import Path
from typing import Optional, Union

from floerd.core.config import settings
from floerd.core.exceptions import PreconditionError, ReportIOError
from floerd.schemas.report import ObstructionReport, ReportProvenance
from floerd.schemas.surgery import DBarTable, format_rational
from floerd.services.expression_parser import Atom, ExpressionParser
from floerd.services.knot_service import KnotService, is_prime
from floerd.services.metabolizer_service import MetabolizerService
from floerd.services.surgery_service import SurgeryService

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "text")


class ObstructionService:
    """Servicio que ensambla el informe de obstrucción de extremo a extremo"""

    @classmethod
    def theorem_applies(cls, p: int, knot: str) -> bool:
        return is_prime(p) and p % 4 == 3 and knot == f"lp:{p}"

    @classmethod
    async def obstruct(
        cls,
        p: int,
        knot: Optional[str] = None,
        bounds_only: bool = False,
        window: Optional[int] = None,
        n: int = 1,
        form: Optional[str] = None,
    ) -> ObstructionReport:
        """
        Tabla d̄ de S³_{p²}(K) más la comprobación de metabolizadores.

        Args:
            p: Primo; L_p necesita p ≡ 3 mod 4
            knot: Expresión de nudo, por defecto "lp:<p>"
            bounds_only: Usa las cotas simbólicas en lugar de calcular
            window: Ventana explícita para los cocientes truncados
            n: Rango del grupo de los metabolizadores
            form: Signos de la forma de enlace

        Returns:
            ObstructionReport con veredicto y procedencia

        Raises:
            PreconditionError: Si el modo de cotas se pide para otro nudo
        """
        node = ExpressionParser.parse(knot or f"lp:{p}")
        label = ExpressionParser.format(node)
        lp_knot = isinstance(node, Atom) and node.kind == "lp"
        if lp_knot and node.args[0] != p:
            raise PreconditionError(f"{label} does not match p={p}", knot=label, p=p)

        notes = []
        if lp_knot and not bounds_only and p >= 7:
            logger.info(f"L_{p} no es materializable; se pasa al modo de cotas")
            notes.append(f"L_{p} has {KnotService.lp_projected_size(p)} generators; switched to bounds-only mode")
            bounds_only = True
        if bounds_only and not lp_knot:
            raise PreconditionError("Bounds-only mode is only available for lp:<p>", knot=label)

        if bounds_only:
            table = SurgeryService.bounds_table(p, knot=label)
            generator_count = KnotService.lp_projected_size(p)
            stability = False
            notes.append("d(s_0) is an upper bound and d(s_p) a claimed value from the filtration bounds")
        else:
            c = ExpressionParser.evaluate(label)
            table = await SurgeryService.dbar_table(c, p, knot=label, window=window)
            generator_count = c.size
            stability = True
        if not cls.theorem_applies(p, label):
            notes.append("control run: the obstruction criterion is evaluated but does not certify the theorem")

        appendix = MetabolizerService.verify_appendix_theorem(p, n, form, table)
        if appendix.obstructed:
            verdict = "obstructed"
        elif any(v.consistency == "consistent" for v in appendix.metabolizers):
            verdict = "unobstructed"
        else:
            verdict = "inconclusive"

        logger.info(f"Informe para {label}, p={p}: {verdict}")
        return ObstructionReport(
            schema_version=settings.REPORT_SCHEMA_VERSION,
            knot=label,
            p=p,
            q=p * p,
            mode="bounds-only" if bounds_only else "computed",
            theorem_applies=cls.theorem_applies(p, label),
            verdict=verdict,
            table=table,
            metabolizers=appendix.metabolizers,
            provenance=ReportProvenance(
                mode="bounds-only" if bounds_only else "computed",
                generator_count=generator_count,
                stability_checked=stability,
                doubled_trefoil_model=settings.DOUBLED_TREFOIL_MODEL,
                notes=notes,
            ),
        )

    # ==============================================
    # SALIDA
    # ==============================================

    @classmethod
    def render_table(cls, table: DBarTable, fmt: str) -> str:
        """Tabla d̄ en json, csv (m,d,dbar) o texto."""
        if fmt == "json":
            return json.dumps(table.model_dump(mode="json"), indent=2) + "\n"
        if fmt == "csv":
            lines = ["m,d,dbar"]
            lines += [f"{e.m},{format_rational(e.d)},{format_rational(e.dbar)}" for e in table.entries]
            return "\n".join(lines) + "\n"
        if fmt == "text":
            return "\n".join(cls._text_lines(table)) + "\n"
        raise PreconditionError(f"Unknown format {fmt!r}; expected one of {', '.join(FORMATS)}", format=fmt)

    @classmethod
    def _text_lines(cls, table: DBarTable):
        manifold = f"S^3_{{{table.q}}}({table.knot})"
        for e in table.entries:
            if e.tower_bottom is not None:
                yield f"d({manifold}, s_{{{e.m}}}) = {e.tower_bottom} - ({e.shift}) = {e.d}"
            else:
                relation = {"exact": "=", "lower_bound": ">=", "upper_bound": "<="}[e.d_kind]
                yield f"d({manifold}, s_{{{e.m}}}) {relation} {e.d} ({e.provenance})"
        for e in table.entries:
            if e.m:
                relation = {"exact": "=", "lower_bound": ">=", "upper_bound": "<="}[e.dbar_kind]
                yield f"dbar(s_{{{e.m}}}) {relation} {e.dbar}"

    @classmethod
    def render(cls, report: ObstructionReport, fmt: str) -> str:
        """Informe completo; csv y texto reutilizan la tabla."""
        if fmt == "json":
            return json.dumps(report.model_dump(mode="json"), indent=2) + "\n"
        if fmt == "text":
            lines = list(cls._text_lines(report.table))
            lines.append(f"verdict: {report.verdict}")
            return "\n".join(lines) + "\n"
        return cls.render_table(report.table, fmt)

    @classmethod
    def emit(
        cls,
        report: Union[ObstructionReport, DBarTable],
        fmt: str = "json",
        path: Optional[Union[str, Path]] = None,
    ) -> str:
        """
        Serializa un informe o una tabla y, si se da ``path``, lo escribe.

        Raises:
            ReportIOError: Si no se puede escribir el fichero
        """
        text = cls.render(report, fmt) if isinstance(report, ObstructionReport) else cls.render_table(report, fmt)
        if path is not None:
            try:
                Path(path).write_text(text, encoding="utf-8")
            except OSError as e:
                logger.error(f"No se pudo escribir {path}: {e}")
                raise ReportIOError(f"Cannot write {path}: {e.strerror or e}", path=str(path)) from e
        return text

    @classmethod
    def read_table(cls, path: Union[str, Path]) -> DBarTable:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            logger.error(f"No se pudo leer {path}: {e}")
            raise ReportIOError(f"Cannot read {path}: {e.strerror or e}", path=str(path)) from e
        try:
            data = json.loads(text)
            # Acepta una tabla suelta o un informe completo
            return DBarTable.model_validate(data.get("table", data) if isinstance(data, dict) else data)
        except ValueError as e:
            raise PreconditionError(f"Malformed d̄ table in {path}: {e}", path=str(path)) from e
