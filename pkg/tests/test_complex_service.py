import numpy as np
import pytest

from floerd.core.exceptions import ComplexValidationError, PreconditionError, SizeGuardError, WindowTooSmallError
from floerd.models.complex import BifilteredComplex
from floerd.models.quotient import TruncatedQuotientComplex
from floerd.services.complex_service import ComplexService


def check(report, name):
    return next(c for c in report.checks if c.name == name)


# ==============================================
# VALIDACIÓN
# ==============================================

def test_staircases_and_double_are_valid(trefoil, t45, double, unknot):
    for c in (trefoil, t45, double, unknot):
        report = ComplexService.validate(c)
        assert report.valid, report.first_failure()
        assert report.homology_rank == 1


def test_negative_u_power_is_rejected_on_construction():
    with pytest.raises(ComplexValidationError):
        BifilteredComplex.from_elements(
            "bad", [("a", 0, 0, 0), ("b", -1, 0, -1)], [("a", "b", -1)]
        )


def test_unknown_target_is_rejected():
    with pytest.raises(ComplexValidationError):
        BifilteredComplex.from_elements("bad", [("a", 0, 0, 0)], [("a", "z", 0)])


def test_duplicate_ids_are_rejected():
    with pytest.raises(ComplexValidationError):
        BifilteredComplex("bad", ["a", "a"], [0, 0], [0, 0], [0, 0])


def test_grading_law_violation_names_the_entry(trefoil):
    basis = list(trefoil.basis)
    basis[2] = basis[2]._replace(gr=-4)
    c = BifilteredComplex.from_elements("broken", basis, trefoil.diff)
    report = ComplexService.validate(c)
    failure = report.first_failure()
    assert failure.name == "grading_law"
    assert (failure.entry.src, failure.entry.dst, failure.entry.u) == ("x0", "x-1", 0)


def test_filtration_must_drop_strictly():
    c = BifilteredComplex.from_elements(
        "flat", [("a", 0, 0, 0), ("b", -1, 0, 0)], [("a", "b", 0)]
    )
    assert check(ComplexService.validate(c), "filtration_drop").passed is False


def test_d_squared_violation_is_reported():
    c = BifilteredComplex.from_elements(
        "chain",
        [("a", 0, 0, 0), ("b", -1, 0, -1), ("c", -2, 0, -2)],
        [("a", "b", 0), ("b", "c", 0)],
    )
    report = ComplexService.validate(c)
    square = check(report, "d_squared_zero")
    assert not square.passed
    assert (square.entry.src, square.entry.dst, square.entry.u) == ("a", "c", 0)
    assert report.homology_rank is None
    assert report.first_failure().name == "d_squared_zero"


def test_dropping_one_staircase_arrow_keeps_rank_one(trefoil):
    kept = [e for e in trefoil.diff if e.target != "x1"]
    c = BifilteredComplex.from_elements("half", trefoil.basis, kept)
    assert ComplexService.validate(c).valid


def test_dropping_both_arrows_breaks_rank_one(trefoil):
    c = BifilteredComplex.from_elements("bare", trefoil.basis, [])
    report = ComplexService.validate(c)
    assert report.homology_rank == 3
    assert report.first_failure().name == "rank_one_homology"


def test_ensure_valid_raises_with_check_name():
    c = BifilteredComplex.from_elements("bare", [("a", 0, 0, 0), ("b", 0, 0, 1)])
    with pytest.raises(ComplexValidationError) as excinfo:
        ComplexService.ensure_valid(c)
    assert excinfo.value.extra["check"] == "rank_one_homology"


# ==============================================
# OPERACIONES
# ==============================================

def test_tensor_with_unknot_keeps_the_complex(trefoil, unknot):
    product = ComplexService.tensor(unknot, trefoil)
    assert product.size == trefoil.size
    assert product.gr.tolist() == trefoil.gr.tolist()
    assert product.i.tolist() == trefoil.i.tolist()
    assert product.j.tolist() == trefoil.j.tolist()
    assert [tuple(e) for e in product.diff] == [(f"u|{e.source}", f"u|{e.target}", e.upower) for e in trefoil.diff]


def test_tensor_is_associative(trefoil, double, unknot):
    left = ComplexService.tensor(ComplexService.tensor(trefoil, double), unknot)
    right = ComplexService.tensor(trefoil, ComplexService.tensor(double, unknot))
    assert left == right


def test_tensor_of_valid_complexes_is_valid(trefoil, t45):
    product = ComplexService.tensor(trefoil, t45)
    assert product.size == 21
    assert product.genus == 7
    assert ComplexService.validate(product).valid


def test_tensor_respects_generator_limit(t45):
    with pytest.raises(SizeGuardError) as excinfo:
        ComplexService.tensor(t45, t45, max_generators=40)
    assert excinfo.value.extra["projected"] == 49


def test_tensor_power(trefoil, unknot):
    assert ComplexService.tensor_power(trefoil, 0) == unknot
    assert ComplexService.tensor_power(trefoil, 3).size == 27
    with pytest.raises(ComplexValidationError):
        ComplexService.tensor_power(trefoil, -1)


def test_transpose_is_an_involution(t45, double):
    for c in (t45, double):
        twice = ComplexService.transpose(ComplexService.transpose(c))
        assert twice == c
        assert twice.name == c.name
    assert ComplexService.transpose(t45).name == "T(4,5)^T"


def test_tensor_of_two_trefoils(trefoil):
    product = ComplexService.tensor(trefoil, trefoil)
    report = ComplexService.validate(product)
    assert product.size == 9
    assert product.genus == 2
    assert report.valid
    assert report.homology_rank == 1


def factor(request, name):
    if name == "double^T":
        return ComplexService.transpose(request.getfixturevalue("double"))
    return request.getfixturevalue(name)


@pytest.mark.parametrize("left, right", [
    ("trefoil", "trefoil"),
    ("trefoil", "double"),
    ("t45", "double"),
    ("double", "double^T"),
])
def test_transpose_commutes_with_tensor(request, left, right):
    a, b = factor(request, left), factor(request, right)
    assert ComplexService.transpose(ComplexService.tensor(a, b)) == ComplexService.tensor(
        ComplexService.transpose(a), ComplexService.transpose(b)
    )


@pytest.mark.parametrize("seed", range(8))
def test_random_tensor_products_are_valid(request, seed):
    rng = np.random.default_rng(seed)
    names = [str(n) for n in rng.choice(["unknot", "trefoil", "t45", "double", "double^T"], size=int(rng.integers(2, 4)))]
    product = factor(request, names[0])
    for name in names[1:]:
        product = ComplexService.tensor(product, factor(request, name))
    report = ComplexService.validate(product)
    assert check(report, "d_squared_zero").passed
    assert report.homology_rank == 1
    assert report.valid


def test_associated_graded_of_the_double(double):
    assert ComplexService.associated_graded_ranks(double) == {
        1: {0: 2, -1: 2},
        0: {-1: 3, -2: 4},
        -1: {-2: 2, -3: 2},
    }


def test_components_and_restriction(double):
    ranks = ComplexService.component_homology_ranks(double)
    assert sorted(ranks) == [0, 0, 0, 1]
    staircase = double.components()[ranks.index(1)]
    restricted = double.restrict(staircase, name="staircase")
    assert restricted.ids == ("s1", "s0", "s-1")
    assert ComplexService.validate(restricted).valid


# ==============================================
# CADENAS
# ==============================================

def test_top_translate_of_t45(t45):
    chain = ComplexService.chain(t45, [("x3", -3)])
    assert ComplexService.chain_grading(t45, chain) == -6
    assert ComplexService.chain_filtration(t45, chain) == (-3, 3)


def test_special_cycle_of_t45(t45):
    chain = ComplexService.chain(t45, [("x1", 1)])
    assert ComplexService.is_cycle(t45, chain)
    assert ComplexService.chain_grading(t45, chain) == 0
    assert ComplexService.chain_filtration(t45, chain) == (1, 3)
    assert ComplexService.represents_generator(t45, chain)


def test_boundary_does_not_represent_the_generator(trefoil):
    boundary = ComplexService.differential_of(trefoil, ComplexService.chain(trefoil, [("x0", 0)]))
    assert ComplexService.chain_labels(trefoil, boundary) == ["U^1*x1", "x-1"]
    assert ComplexService.is_cycle(trefoil, boundary)
    assert not ComplexService.represents_generator(trefoil, boundary)


def test_chain_terms_cancel_mod_two(trefoil):
    assert ComplexService.chain(trefoil, [("x1", 0), ("x1", 0)]) == []
    with pytest.raises(ComplexValidationError):
        ComplexService.chain_filtration(trefoil, [])


def test_find_filtered_cycle(trefoil):
    assert ComplexService.find_filtered_cycle(trefoil, 0, 0, 1) is not None
    assert ComplexService.find_filtered_cycle(trefoil, 0, 1, 0) is not None
    assert ComplexService.find_filtered_cycle(trefoil, 0, 0, 0) is None


def test_grading_minimum(trefoil):
    assert ComplexService.grading_minimum(trefoil, 0) == 1
    assert ComplexService.grading_minimum(trefoil, 1) == 2
    assert ComplexService.grading_minimum(trefoil, -1) == 0


# ==============================================
# HOMOLOGÍA TRUNCADA
# ==============================================

def test_unknot_quotient_homology(unknot):
    tq = TruncatedQuotientComplex.build(unknot, 0, window=4)
    th = ComplexService.truncated_homology(tq)
    assert th.reliable == (0, 5)
    assert th.dimensions == {0: 1, 1: 0, 2: 1, 3: 0, 4: 1, 5: 0}
    assert th.u_action[2].toarray().tolist() == [[1]]
    assert th.tower_bottom == 0
    assert th.stable is True
    assert th.represents_bottom(list(th.tower.representative))


def test_default_window_of_t45(t45):
    assert TruncatedQuotientComplex.default_window(t45, 0) == 14
    assert TruncatedQuotientComplex.default_window(t45, 5) == 14


def test_window_below_width_is_a_precondition_error(unknot, t45):
    with pytest.raises(PreconditionError):
        TruncatedQuotientComplex(unknot, 0, 1)
    with pytest.raises(PreconditionError):
        TruncatedQuotientComplex(t45, 0, 13)


def test_window_without_stable_range_is_too_small(unknot):
    tq = TruncatedQuotientComplex(unknot, 0, 2)
    with pytest.raises(WindowTooSmallError):
        ComplexService.truncated_homology(tq)


def test_homology_report(t45):
    th = ComplexService.truncated_homology(TruncatedQuotientComplex.build(t45, 0), tower_only=True)
    report = ComplexService.homology_report(th)
    assert report.tower_bottom == -6
    assert report.window == 14
    assert report.representative


@pytest.mark.parametrize("m, terms, bottom", [
    (0, [("x-1", 0)], -6),
    (0, [("x1", -2)], -6),
    (0, [("x3", -3)], -6),
    (5, [("x-1", 2)], -2),
    (5, [("x3", -1)], -2),
])
def test_t45_bottom_class_representatives(t45, m, terms, bottom):
    th = ComplexService.truncated_homology(TruncatedQuotientComplex.build(t45, m))
    assert th.tower_bottom == bottom
    assert th.represents_bottom(ComplexService.chain(t45, terms))


def test_t45_chains_off_the_bottom_class(t45):
    th = ComplexService.truncated_homology(TruncatedQuotientComplex.build(t45, 5))
    # grading -6 lies below the tower bottom at m = 5
    assert not th.represents_bottom(ComplexService.chain(t45, [("x-1", 0)]))
    # boundary of U^{-2}·x0
    assert not th.represents_bottom(ComplexService.chain(t45, [("x1", 0), ("x-1", 2)]))
    # not a cycle
    assert not th.represents_bottom(ComplexService.chain(t45, [("x2", 0)]))


def test_quotient_homology_of_the_double(double):
    report = ComplexService.quotient_homology(double, 0)
    assert report.tower_bottom == -2
    assert report.stable
    assert report.representative


# ==============================================
# SERIALIZACIÓN
# ==============================================

def test_canonical_json_matches_fixture(trefoil, golden):
    assert ComplexService.dumps(trefoil) == golden("trefoil.json")


def test_json_round_trip_is_stable(double):
    text = ComplexService.dumps(double)
    assert ComplexService.dumps(ComplexService.loads(text)) == text
    assert ComplexService.loads(text) == double


def test_malformed_document():
    with pytest.raises(ComplexValidationError):
        ComplexService.loads('{"name": "x", "basis": [{"id": "a"}]}')
    with pytest.raises(ComplexValidationError):
        ComplexService.loads('{"name": "x", "basis": [], "diff": [{"src": "a", "dst": "b", "u": 0}]}')


def test_read_write(tmp_path, trefoil):
    path = tmp_path / "trefoil.json"
    ComplexService.write(trefoil, path)
    assert ComplexService.read(path) == trefoil
