from fractions import Fraction

import numpy as np
import pytest

from floerd.core.exceptions import BudgetExceededError, PreconditionError
from floerd.models.metabolizer import LinkingForm, Metabolizer, TorsionGroup
from floerd.schemas.surgery import DBarEntry, DBarTable
from floerd.services.metabolizer_service import MetabolizerService, fold


def generators(metabolizers):
    return [[list(g) for g in m.generators] for m in metabolizers]


def table(p, dbar):
    """d̄ table with exact values d̄(s_{p·j}) = dbar[j-1]."""
    entries = [DBarEntry(m=0, d=Fraction(0), shift=Fraction(0), dbar=Fraction(0))]
    entries += [
        DBarEntry(m=p * j, d=Fraction(v), shift=Fraction(0), dbar=Fraction(v))
        for j, v in enumerate(dbar, start=1)
    ]
    return DBarTable(knot="test", p=p, q=p * p, d0=Fraction(0), entries=entries)


# ==============================================
# GRUPOS Y FORMAS
# ==============================================

def test_torsion_group():
    group = TorsionGroup(3, 2)
    assert (group.modulus, group.order, group.metabolizer_order) == (9, 81, 9)
    assert group.reduce([10, -1]) == (1, 8)
    with pytest.raises(PreconditionError):
        group.reduce([1])
    with pytest.raises(PreconditionError):
        TorsionGroup(4, 1)


def test_linking_form():
    group = TorsionGroup(3, 2)
    form = LinkingForm.parse(group, "+-")
    assert form.label == "+-"
    assert form.pairing((1, 1), (1, 1)) == 0
    assert form.pairing((1, 0), (1, 0)) == 1
    assert form.pairing((1, 0), (0, 2)) == 0
    assert form.vanishes_on([(1, 1)])
    assert not LinkingForm.parse(group, "++").vanishes_on([(1, 1)])
    with pytest.raises(PreconditionError):
        LinkingForm.parse(group, "+*")


def test_metabolizer_elements():
    m = Metabolizer(TorsionGroup(3, 2), [(1, 1), (0, 0)])
    assert m.generators == ((1, 1),)
    assert m.order == 9
    assert m.contains((4, 4))
    assert not m.contains((1, 2))
    assert m.p_torsion() == [(0, 0), (3, 3), (6, 6)]


# ==============================================
# ENUMERACIÓN
# ==============================================

def test_p3_rank_one():
    assert generators(MetabolizerService.enumerate_metabolizers(3, 1)) == [[[3]]]


def test_p3_rank_two_positive_form():
    assert generators(MetabolizerService.enumerate_metabolizers(3, 2, "++")) == [[[3, 0], [0, 3]]]


def test_p3_rank_two_split_form():
    found = MetabolizerService.enumerate_metabolizers(3, 2, "+-")
    assert [m.hnf for m in found] == [((1, 1), (0, 9)), ((1, 8), (0, 9)), ((3, 0), (0, 3))]
    assert generators(found) == [[[1, 1]], [[1, 8]], [[3, 0], [0, 3]]]


@pytest.mark.parametrize("p, n, form, count", [(7, 1, None, 1), (7, 2, "++", 1), (7, 2, "+-", 3), (5, 1, None, 1)])
def test_counts(p, n, form, count):
    assert len(MetabolizerService.enumerate_metabolizers(p, n, form)) == count


@pytest.mark.parametrize("form", ["+", "++", "+-", "--"])
def test_enumerated_subgroups_are_metabolizers(form):
    p, n = 3, len(form)
    linking = LinkingForm.parse(TorsionGroup(p, n), form)
    for m in MetabolizerService.enumerate_metabolizers(p, n, form):
        elements = m.elements()
        assert len(elements) == p ** n == m.order
        assert linking.vanishes_on(list(elements))


def test_budget(small_settings):
    with pytest.raises(BudgetExceededError):
        MetabolizerService.enumerate_metabolizers(7, 2)


def test_rank_limit():
    with pytest.raises(BudgetExceededError):
        MetabolizerService.enumerate_metabolizers(3, 4)


# ==============================================
# VECTOR ESPECIAL
# ==============================================

def test_special_vector_of_the_diagonal():
    result = MetabolizerService.special_vector(MetabolizerService.from_generators(3, [[3, 0], [0, 3]]))
    assert result.z == [3, 3]
    assert result.p_entries == 2
    assert (result.unit_rank, result.p_rank) == (0, 2)


def test_special_vector_of_a_cyclic_subgroup():
    result = MetabolizerService.special_vector(MetabolizerService.from_generators(3, [[1, 3]]))
    assert result.z == [3, 0]
    assert (result.unit_rank, result.p_rank) == (1, 0)


@pytest.mark.parametrize("p, n, form", [(3, 1, None), (3, 2, "++"), (3, 2, "+-"), (7, 1, None), (7, 2, "+-"), (3, 3, "++-")])
def test_special_vector_properties(p, n, form):
    for m in MetabolizerService.enumerate_metabolizers(p, n, form):
        result = MetabolizerService.special_vector(m)
        assert m.contains(result.z)
        assert all(x % p == 0 for x in result.z)
        assert 2 * result.p_entries >= n
        assert 2 * result.unit_rank + result.p_rank == n


@pytest.mark.parametrize("generators, form", [([[1, 1]], "+-"), ([[3, 0], [0, 3]], "++"), ([[1, 8]], "+-")])
def test_from_generators_accepts_metabolizers(generators, form):
    m = MetabolizerService.from_generators(3, generators, form)
    assert m.order == m.group.metabolizer_order


@pytest.mark.parametrize("generators, form", [([[1, 0]], "++"), ([[3, 0]], "++"), ([[1, 1]], "++")])
def test_from_generators_rejects_other_subgroups(generators, form):
    with pytest.raises(PreconditionError):
        MetabolizerService.from_generators(3, generators, form)


def test_special_vector_needs_order_p_to_the_n():
    with pytest.raises(PreconditionError):
        MetabolizerService.special_vector(MetabolizerService.from_generators(3, [[3, 0]]))


# ==============================================
# ψ Y ρ
# ==============================================

def test_fold():
    assert [fold(x, 7) for x in range(7)] == [0, 1, 2, 3, 3, 2, 1]


def test_psi():
    m = [31 * x for x in (1, 1, 1, 1, 13, 13, 27, 0)]
    alpha = MetabolizerService.psi(m, 31)
    assert len(alpha) == 15
    assert (alpha[0], alpha[3], alpha[12]) == (4, 1, 2)
    assert sum(alpha) == 7
    assert MetabolizerService.psi([3, 6], 3) == [2]
    with pytest.raises(PreconditionError):
        MetabolizerService.psi([1, 3], 3)


@pytest.mark.parametrize(
    "p, a, orbit",
    [
        (23, 5, [1, 5, 2, 10, 4, 3, 8, 6, 7, 11, 9]),
        (31, 3, [1, 3, 9, 4, 12, 5, 15, 14, 11, 2, 6, 13, 8, 7, 10]),
        (7, 3, [1, 3, 2]),
    ],
)
def test_rho_orbits(p, a, orbit):
    rho = MetabolizerService.rho_permutation(p, a)
    assert rho.orbit == orbit
    assert sorted(rho.orbit) == list(range(1, (p - 1) // 2 + 1))


def test_rho_defaults_to_the_least_primitive_root():
    assert MetabolizerService.rho_permutation(23).a == 5
    assert MetabolizerService.rho_permutation(31).a == 3
    assert MetabolizerService.rho_permutation(7).permutation == [3, 1, 2]


def test_rho_needs_a_generator():
    with pytest.raises(PreconditionError):
        MetabolizerService.rho_permutation(7, 2)


@pytest.mark.parametrize("p", [7, 11, 23])
def test_psi_is_rho_equivariant(p):
    rng = np.random.default_rng(p)
    rho = MetabolizerService.rho_permutation(p)
    for _ in range(20):
        m = [p * int(x) for x in rng.integers(0, p, size=6)]
        am = [rho.a * x % (p * p) for x in m]
        assert MetabolizerService.psi(am, p) == MetabolizerService.apply_rho(MetabolizerService.psi(m, p), rho)


# ==============================================
# RELACIONES
# ==============================================

def test_coprimality_of_the_relation_polynomial():
    coeffs = [4, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 2]
    assert MetabolizerService.polynomial_coprimality(coeffs, 15) == (True, "1")
    printed = [4, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 1]
    assert MetabolizerService.polynomial_coprimality(printed, 15)[0]


def test_non_coprime_polynomial():
    assert MetabolizerService.polynomial_coprimality([1, 1, 1], 3) == (False, "t**2 + t + 1")


def test_real_part_certificate():
    certificate = MetabolizerService.real_part_certificate([4, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 2], 15)
    assert certificate.dominant_constant
    assert certificate.nonvanishing
    assert certificate.min_real_part > 0


def test_p31_relations_span_everything():
    rho = MetabolizerService.rho_permutation(31)
    alpha = MetabolizerService.psi([31 * x for x in (1, 1, 1, 1, 13, 13, 27, 0)], 31)
    assert MetabolizerService.group_ring_coefficients(alpha, rho) == [4, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0]
    relations = MetabolizerService.orbit_relations(alpha, rho)
    assert len(relations) == 15
    span = MetabolizerService.relation_span(relations, rho)
    assert span.full and span.rank == 15 and span.gcd == "1"
    assert len(span.basis) == 15


def test_relation_span_of_a_metabolizer():
    m = MetabolizerService.enumerate_metabolizers(7, 1)[0]
    span = MetabolizerService.relation_span_is_full(m)
    assert (span.q, span.rank, span.full) == (3, 3, True)


# ==============================================
# VEREDICTO
# ==============================================

def test_all_small_metabolizers_force_zero():
    for n, form in [(1, None), (2, "++"), (2, "+-")]:
        verdict = MetabolizerService.verify_appendix_theorem(3, n, form)
        assert verdict.all_force_zero
        assert verdict.obstructed is None
        assert all(v.consistency == "unknown" for v in verdict.metabolizers)


def test_zero_table_is_consistent():
    verdict = MetabolizerService.verify_appendix_theorem(5, 1, dbar=table(5, [0, 0]))
    assert [v.consistency for v in verdict.metabolizers] == ["consistent"]
    assert verdict.obstructed is False


def test_nonzero_table_is_obstructed():
    verdict = MetabolizerService.verify_appendix_theorem(3, 1, dbar=table(3, [2]))
    assert [(v.generators, v.relation_rank, v.forces_zero, v.consistency) for v in verdict.metabolizers] == [
        ([[3]], 1, True, "inconsistent")
    ]
    assert verdict.obstructed is True


def test_lower_bound_alone_decides_the_relation():
    p = 7
    bounds = DBarTable(
        knot="lp:7", p=p, q=49, d0=Fraction(-8), d0_kind="upper_bound",
        entries=[DBarEntry(m=7, d=Fraction(-6), shift=Fraction(-6), dbar=Fraction(2), dbar_kind="lower_bound")],
    )
    values = MetabolizerService.dbar_values(bounds)
    assert values == [(Fraction(2), None, False), None, None]
    assert MetabolizerService.relation_status([1, 0, 0], values) == "violated"
    assert MetabolizerService.relation_status([0, 1, 0], values) == "undetermined"
    assert MetabolizerService.verify_appendix_theorem(p, 1, dbar=bounds).obstructed is True



def test_dbar_values_read_only_multiples_of_p():
    full = table(3, [1])
    full.entries.insert(1, DBarEntry(m=2, d=Fraction(5), shift=Fraction(0), dbar=Fraction(5)))
    assert MetabolizerService.dbar_values(full) == [(Fraction(1), Fraction(1), True)]


def test_table_for_another_prime_is_rejected():
    with pytest.raises(PreconditionError):
        MetabolizerService.verify_appendix_theorem(5, 1, dbar=table(3, [0]))
