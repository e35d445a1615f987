"""End-to-end run on S^3_9(L_3), where every number is computed from the complex."""
import asyncio
import json

import pytest

from floerd.services.complex_service import ComplexService
from floerd.services.knot_service import KnotService
from floerd.services.obstruction_service import ObstructionService
from floerd.services.surgery_service import SurgeryService

pytestmark = pytest.mark.slow


def test_lp3_is_a_valid_knot_complex(lp3):
    assert lp3.size == 151875
    assert lp3.genus == 5
    report = ComplexService.validate(lp3)
    assert report.valid
    assert report.homology_rank == 1


def test_lp3_has_one_nonacyclic_summand(lp3):
    ranks = ComplexService.component_homology_ranks(lp3)
    alive = [members for members, rank in zip(lp3.components(), ranks) if rank]
    assert len(alive) == 1
    assert len(alive[0]) == 243
    summand = lp3.restrict(alive[0])
    assert ComplexService.validate(summand).valid


def test_lp3_special_cycle(lp3):
    chain = KnotService.lp_special_cycle(3, lp3)
    assert ComplexService.chain_labels(lp3, chain) == ["U^-1*x1|s1|s1|s1|s-1"]
    assert ComplexService.chain_grading(lp3, chain) == 0
    assert ComplexService.chain_filtration(lp3, chain) == (1, 4)
    assert ComplexService.represents_generator(lp3, chain)


def test_lp3_d_invariants(lp3):
    d0 = SurgeryService.d_invariant(lp3, 9, 0)
    d3 = SurgeryService.d_invariant(lp3, 9, 3)
    assert (d0.d, d0.tower_bottom, d0.window) == (-4, -6, 16)
    assert (d3.d, d3.tower_bottom, d3.window) == (-2, -2, 16)
    bounds = SurgeryService.theorem_bounds(3)
    assert d0.d <= bounds.d0_upper
    assert d3.d == bounds.dp_value
    assert d3.d - d0.d >= bounds.dbar_lower


def test_lp3_report(golden):
    report = asyncio.run(ObstructionService.obstruct(3))
    text = ObstructionService.render(report, "json")
    assert json.loads(text)["verdict"] == "obstructed"
    assert text == golden("p3_report.json")
