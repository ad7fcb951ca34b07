import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qduality.duality import (
    AlphaCrossCheckError,
    BetaTable,
    DegenerateParametersError,
    QParams,
    admissible_radius,
    alpha_coeff,
    alpha_double_sum,
    alpha_phi_sum,
    beta_table,
    gamma_coeff,
    identity_residual,
    lhs_eval,
    prop1_check,
    random_exponents,
    rhs_eval,
    sample_admissible_z,
)
from qduality.golden import COMPLEX_TRIPLE, GOLDEN_CASES, REAL_TRIPLE, golden_check
from qduality.oracle import contour_coefficients
from qduality.report import PASS


def rel(x, y):
    scale = max(abs(x), abs(y))
    return abs(x - y) / scale if scale else 0.0


def draw(seed, r=3, q=0.5, bound=3, t=None):
    rng = np.random.default_rng(seed)
    a = random_exponents(rng, r)
    b = random_exponents(rng, r, spacing=0.0, avoid=a)
    m = rng.integers(-bound, bound + 1, r).tolist()
    n = rng.integers(-bound, bound + 1, r).tolist()
    t = int(rng.integers(-bound, bound + 1)) if t is None else t
    return QParams(a, b, m, n, t, q)


EXAMPLE = QParams([0.17, 0.59, 1.13], [0.23, 0.71, 1.37], [0, 1, 1], [0, 0, 1], 1, 0.3)


def test_integer_spaced_exponents_are_rejected():
    with pytest.raises(DegenerateParametersError):
        QParams([0.2, 1.2], [0.3, 0.4], [0, 0], [0, 0], 0, 0.5)
    with pytest.raises(ValueError):
        QParams([0.2], [0.3], [0], [0], 0, 0.5)
    with pytest.raises(ValueError):
        QParams([0.2, 0.5], [0.3], [0], [0, 0], 0, 0.5)


def test_derived_indices():
    p = QParams([0.1, 0.4], [0.2, 0.3], [2, -1], [1, 3], 2, 0.5)
    assert (p.M, p.N, p.m_min, p.n_max, p.t_plus) == (1, 4, -1, 3, 2)
    assert p.p_index == 1 - 4 - 2 - 2 + 1
    assert p.p == -1
    assert p.k_range == (-3, -1 + 2 + 1)
    w = p.qp(2 + 2 - 1 + 0.5 - 0.5)
    assert abs(p.W - w) < 1e-15


def test_gamma_vanishes_outside_its_range():
    k = 1
    for i in range(3):
        top = k + EXAMPLE.n[i]
        assert gamma_coeff(EXAMPLE, i, -1, k) == 0
        assert gamma_coeff(EXAMPLE, i, top + 1, k) == 0
        assert gamma_coeff(EXAMPLE, i, top, k) != 0


@pytest.mark.parametrize("seed", range(8))
def test_alpha_two_routes_agree(seed):
    params = draw(seed)
    for k in range(params.k_range[0], params.k_range[1] + 1):
        if k < -params.m_min:
            continue
        double, scale = alpha_double_sum(params, k)
        assert abs(double - alpha_phi_sum(params, k)) <= 1e-11 * max(scale, 1e-300)


@pytest.mark.parametrize("seed", range(6))
def test_alpha_are_taylor_coefficients_of_the_lhs(seed):
    params = draw(seed, r=2)
    radius = 0.5 * admissible_radius(params)
    ks = list(range(-params.n_max, -params.n_max + 4))
    coeffs = contour_coefficients(lambda z: lhs_eval(params, z), radius, ks, nodes=64)
    for k, c in zip(ks, coeffs):
        a = alpha_coeff(params, k, check=False)
        scale = max(abs(x) * radius ** (j - k) for j, x in zip(ks, coeffs))
        assert abs(a - c) <= 1e-10 * scale


@pytest.mark.parametrize("seed", range(8))
def test_rhs_numerator_is_a_laurent_polynomial(seed):
    params = draw(seed, r=2)
    radius = 0.5 * admissible_radius(params)
    k_lo, k_hi = params.k_range

    def numerator(z):
        return lhs_eval(params, z) * params.rhs_denominator(z)

    ks = list(range(k_lo - 2, k_hi + 3))
    coeffs = dict(zip(ks, contour_coefficients(numerator, radius, ks, nodes=64)))
    table = beta_table(params)
    size = max(abs(table[k]) * radius**k for k in table)
    for k in ks:
        want = table[k] if k_lo <= k <= k_hi else 0
        assert abs(coeffs[k] - want) * radius**k <= 1e-9 * size


@pytest.mark.parametrize("seed", range(10))
def test_literal_and_gauss_denominators_agree(seed):
    params = draw(seed)
    literal = beta_table(params, literal=True)
    gauss = beta_table(params, dps=None)
    extended = beta_table(params)
    size = max(abs(v) for _, v in extended.items())
    for k in extended:
        assert abs(literal[k] - gauss[k]) <= 1e-10 * size
        assert abs(extended[k] - gauss[k]) <= 1e-10 * size


def test_literal_denominators_need_square_parameters():
    from qduality.confluent import ConfluentParams

    with pytest.raises(TypeError):
        beta_table(ConfluentParams([0.1, 0.4], [0.2], [0], [0, 0], 0, 0.5), literal=True)


@pytest.mark.parametrize("seed", range(20))
def test_identity_on_random_cases(seed):
    params = draw(seed, r=2 + seed % 3, q=(0.2, 0.5)[seed % 2])
    zs = sample_admissible_z(params, np.random.default_rng(seed), 4)
    rec = identity_residual(params, zs, 1e-8).records[0]
    assert rec.status == PASS, rec


@given(t=st.integers(-3, 3), seed=st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_identity_holds_for_every_shift(t, seed):
    params = draw(seed, r=2, t=t)
    zs = sample_admissible_z(params, np.random.default_rng(seed), 2)
    assert identity_residual(params, zs, 1e-8).records[0].status == PASS


@pytest.mark.parametrize("case", GOLDEN_CASES, ids=lambda c: c.name)
@pytest.mark.parametrize("triple", [REAL_TRIPLE, COMPLEX_TRIPLE], ids=["real", "complex"])
def test_closed_forms(case, triple):
    rec = golden_check(case, *triple)
    assert rec.status == PASS and rec.max_residual < 1e-12


@given(
    a=st.lists(st.floats(0.05, 0.95), min_size=3, max_size=3, unique=True),
    b=st.lists(st.floats(0.05, 1.95), min_size=3, max_size=3),
    q=st.floats(0.2, 0.6),
)
@settings(max_examples=30, deadline=None)
def test_closed_forms_for_random_exponents(a, b, q):
    if min(abs(x - y) for i, x in enumerate(a) for y in a[i + 1 :]) < 0.05:
        return
    if min(abs((x - y) - round(x - y)) for x in a for y in b) < 0.05:
        return
    for case in GOLDEN_CASES:
        assert golden_check(case, a, b, q=q).status == PASS


def test_closed_form_coefficient_at_minus_one():
    table = beta_table(GOLDEN_CASES[2].params(*REAL_TRIPLE))
    p = GOLDEN_CASES[2].params(*REAL_TRIPLE)
    assert (table.k_lo, table.k_hi) == (-1, -1)
    assert rel(table[-1], p.qp(p.a[2]) / (1 - p.qp(p.a[2] - p.b[0]))) < 1e-14


def test_beta_table_access():
    table = BetaTable(-1, 1, {-1: 1j, 0: 2, 1: 3})
    assert len(table) == 3 and list(table) == [-1, 0, 1]
    assert table.total() == 5 + 1j
    assert table.evaluate(2) == 1j / 2 + 2 + 6
    with pytest.raises(KeyError):
        table[2]
    assert table.to_dict()["coeffs"]["-1"] == [0.0, 1.0]


def test_rhs_rejects_origin_and_poles():
    with pytest.raises(ValueError):
        rhs_eval(EXAMPLE, 0)
    with pytest.raises(ZeroDivisionError):
        rhs_eval(EXAMPLE, 1.0)  # (z;q)_1 vanishes


def test_samples_stay_inside_small_disks():
    # |W| is huge here, so the disk is tiny and sits close to 1/W
    params = QParams([0.1, 0.55], [1.9, 1.8], [3, 3], [-3, -3], -3, 0.2)
    assert abs(params.W) > 30
    zs = sample_admissible_z(params, np.random.default_rng(1), 5)
    radius = admissible_radius(params)
    assert len(zs) == 5 and all(abs(z) <= radius for z in zs)


def test_summation_at_one():
    cases = [draw(seed, r=2) for seed in range(60)]
    cases = [p for p in cases if abs(p.W) < 1][:8]
    assert cases
    for params in cases:
        assert prop1_check(params).records[0].status == PASS
    big = next(p for p in (draw(s, r=2) for s in range(100)) if abs(p.W) > 1)
    with pytest.raises(ValueError):
        prop1_check(big)


def test_cross_check_raises_on_disagreement(monkeypatch):
    import qduality.duality as duality

    monkeypatch.setattr(duality, "alpha_phi_sum", lambda params, k: 1e6)
    with pytest.raises(AlphaCrossCheckError):
        alpha_coeff(EXAMPLE, 0)
    assert alpha_coeff(EXAMPLE, 0, check=False) != 1e6


@pytest.mark.parametrize("seed", range(4))
def test_extended_precision_agrees_with_double(seed):
    from qduality.extended import beta_total_mp, lhs_eval_mp

    params = draw(seed)
    z = 0.5 * admissible_radius(params) * (0.6 + 0.8j)
    assert rel(complex(lhs_eval_mp(params, z, dps=40)), lhs_eval(params, z)) < 1e-10
    table = beta_table(params)
    assert abs(beta_total_mp(params) - table.total()) <= 1e-12 * sum(abs(v) for _, v in table.items())
