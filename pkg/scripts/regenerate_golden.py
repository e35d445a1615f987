"""
Regenera los ficheros de tests/golden a partir de los servicios.

Uso:
    python -m scripts.regenerate_golden          # complejos pequeños y control T(4,5)
    python -m scripts.regenerate_golden --slow   # además el informe de L_3 (151875 generadores)
"""
import argparse
import asyncio
import logging
from pathlib import Path

from floerd.core.logging_config import setup_logging
from floerd.services.complex_service import ComplexService
from floerd.services.knot_service import KnotService
from floerd.services.obstruction_service import ObstructionService

logger = logging.getLogger(__name__)

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"


async def regenerate(slow: bool) -> None:
    GOLDEN.mkdir(parents=True, exist_ok=True)

    ComplexService.write(KnotService.torus_staircase(3), GOLDEN / "trefoil.json")
    logger.info("✅ trefoil.json")

    control = await ObstructionService.obstruct(5, knot="torus:4,5")
    ObstructionService.emit(control, "csv", GOLDEN / "t45_control.csv")
    ObstructionService.emit(control, "text", GOLDEN / "t45_control.txt")
    logger.info(f"✅ t45_control.csv / t45_control.txt (veredicto: {control.verdict})")

    if slow:
        report = await ObstructionService.obstruct(3)
        ObstructionService.emit(report, "json", GOLDEN / "p3_report.json")
        logger.info(f"✅ p3_report.json (veredicto: {report.verdict})")
    else:
        logger.warning("⚠️  p3_report.json no se ha regenerado; usa --slow")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--slow", action="store_true", help="regenerar también el informe de L_3")
    args = parser.parse_args()
    setup_logging()
    asyncio.run(regenerate(args.slow))
