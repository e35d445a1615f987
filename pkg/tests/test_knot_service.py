import pytest
from pydantic import ValidationError

from floerd.core.exceptions import ComplexValidationError, PreconditionError, SizeGuardError
from floerd.schemas.knots import AlexanderPoly, StaircaseData
from floerd.services.complex_service import ComplexService
from floerd.services.knot_service import KnotService, is_prime


def test_is_prime():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]


# ==============================================
# POLINOMIOS Y ESCALERAS
# ==============================================

def test_trefoil_alexander():
    assert str(KnotService.torus_alexander(3)) == "t - 1 + t^-1"


def test_t45_alexander_and_staircase():
    poly = KnotService.torus_alexander(5)
    assert poly.coeffs == {-6: 1, -5: -1, -2: 1, 0: -1, 2: 1, 5: -1, 6: 1}
    sd = KnotService.gaps_and_deltas(poly)
    assert sd.exponents == [-6, -5, -2, 0, 2, 5, 6]
    assert sd.deltas == [-12, -11, -6, -5, -2, -1, 0]


@pytest.mark.parametrize("p", [3, 5, 7, 9, 11, 13])
def test_torus_polynomial_shape(p):
    poly = KnotService.torus_alexander(p)
    g = (p - 1) * (p - 2) // 2
    assert len(poly.coeffs) == 2 * p - 3
    assert set(poly.coeffs.values()) == {1, -1}
    assert poly.genus == g

    sd = KnotService.gaps_and_deltas(poly)
    k = p - 2
    for l in range(k + 1):
        assert sd.exponent(k - 2 * l) == g - l * (p - 1)
        assert sd.delta(k - 2 * l) == -l * (l + 1)
    for l in range(k):
        assert sd.exponent(k - 2 * l - 1) == g - l * p - 1
        assert sd.delta(k - 2 * l - 1) == sd.delta(k - 2 * l - 2) + 1


@pytest.mark.parametrize("p", [1, 4, 6])
def test_torus_alexander_needs_odd_p(p):
    with pytest.raises(PreconditionError):
        KnotService.torus_alexander(p)


def test_alexander_poly_must_be_symmetric_and_normalized():
    with pytest.raises(ValidationError):
        AlexanderPoly(coeffs={-1: 1, 0: -1, 2: 1})
    with pytest.raises(ValidationError):
        AlexanderPoly(coeffs={-1: 1, 0: 1, 1: 1})


def test_non_l_space_polynomial_is_rejected():
    # -t + 3 - t^-1 is symmetric with Δ(1) = 1 but the top coefficient is -1
    with pytest.raises(PreconditionError):
        KnotService.gaps_and_deltas(AlexanderPoly(coeffs={-1: -1, 0: 3, 1: -1}))


def test_staircase_with_non_integral_u_power():
    sd = StaircaseData(exponents=[-1, 0, 1], deltas=[-1, -1, 0])
    with pytest.raises(ComplexValidationError):
        KnotService.staircase_complex(sd)


def test_torus_staircase_layout(t45):
    assert t45.name == "T(4,5)"
    assert t45.ids == ("x3", "x2", "x1", "x0", "x-1", "x-2", "x-3")
    assert t45.genus == 6
    assert [tuple(e) for e in t45.diff] == [
        ("x2", "x3", 1), ("x2", "x1", 0),
        ("x0", "x1", 2), ("x0", "x-1", 0),
        ("x-2", "x-1", 3), ("x-2", "x-3", 0),
    ]


# ==============================================
# COTAS DE FILTRACIÓN
# ==============================================

def test_double_model(double):
    assert double.size == 15
    assert double.genus == 1
    assert double.metadata["model"] == "staircase+3boxes/v1"
    assert ComplexService.homology_rank(double) == 1


def test_double_minima(double):
    assert ComplexService.grading_minimum(double, 0) == 1
    assert ComplexService.grading_minimum(double, 1) == 2
    assert ComplexService.grading_minimum(double, -1) == 0


def test_double_constraints_pass(double):
    report = KnotService.check_double_constraints(double)
    assert report.passed
    assert len(report.checks[2].witness) == 2


def test_double_constraints_hold_for_the_transpose(double):
    assert KnotService.check_double_constraints(ComplexService.transpose(double)).passed


def test_trefoil_meets_the_double_constraints(trefoil):
    assert KnotService.check_double_constraints(trefoil).passed


def test_unknot_fails_only_the_grading_zero_bound(unknot):
    report = KnotService.check_double_constraints(unknot)
    assert report.failed_bullets() == [1]


def test_explicit_double_cycles(double):
    for (i, j), terms in KnotService.doubled_trefoil_cycles().items():
        chain = ComplexService.chain(double, terms)
        assert ComplexService.represents_generator(double, chain)
        assert ComplexService.chain_grading(double, chain) == 0
        assert ComplexService.chain_filtration(double, chain) == (i, j)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_staircase_constraints(p):
    report = KnotService.check_staircase_constraints(p)
    assert report.passed, report.failed_bullets()


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_torus_special_cycle(p):
    c, chain = KnotService.torus_special_cycle(p)
    assert ComplexService.chain_grading(c, chain) == 0
    assert ComplexService.chain_filtration(c, chain) == ((p * p - 4 * p + 3) // 8, (p * p - 1) // 8)
    assert ComplexService.represents_generator(c, chain)


# ==============================================
# L_p
# ==============================================

def test_lp_sizes():
    assert KnotService.lp_factor_count(3) == 4
    assert KnotService.lp_projected_size(3) == 151875
    assert KnotService.lp_projected_size(7) == 11 * 15 ** 10


@pytest.mark.parametrize("p", [5, 9, 13])
def test_lp_needs_prime_three_mod_four(p):
    with pytest.raises(PreconditionError):
        KnotService.lp_complex(p)


def test_lp7_is_refused_with_projected_size():
    with pytest.raises(SizeGuardError) as excinfo:
        KnotService.lp_complex(7)
    assert excinfo.value.extra["projected"] == 11 * 15 ** 10


def test_lp3_respects_a_lower_limit(small_settings):
    with pytest.raises(SizeGuardError):
        KnotService.lp_complex(3)


def test_tensor_chain_of_single_terms(trefoil, double):
    product = ComplexService.tensor(trefoil, double)
    chain = KnotService.tensor_chain(product, [[("x1", 0)], [("s-1", 1)]])
    assert ComplexService.chain_labels(product, chain) == ["U^-1*x1|s-1"]
    assert ComplexService.chain_filtration(product, chain) == (1, 1)
