import numpy as np
import pytest

from qduality.duality import QParams, admissible_radius, alpha_double_sum, beta_table, gamma_coeff
from qduality.golden import GOLDEN_CASES, REAL_TRIPLE
from qduality.oracle import (
    CONTOUR_NODES,
    Fk_eval,
    RationalFk,
    SamplingError,
    alpha_identity_check,
    alpha_identity_sides,
    c_minus1,
    closure_residual,
    contour_coefficients,
    fhat_coefficients,
    fhat_eval,
    fk_eval,
    inner_radius,
    outer_radius,
    p_recurrence,
    q_recurrence,
    recover_beta_by_sampling,
    residue_at_pole,
    residue_at_zero,
    residue_sum,
)
from qduality.report import PASS
from test_duality import draw

SEEDS = range(12)
FAR = 1e4


def case(seed):
    params = draw(seed, q=(0.2, 0.5)[seed % 2])
    return params, -params.m_min + seed % 3


@pytest.mark.parametrize("seed", SEEDS)
def test_residues_are_gamma_coefficients(seed):
    params, k = case(seed)
    fk = RationalFk(params, k)
    for i, j, _ in fk.poles:
        want = gamma_coeff(params, i, j, k)
        assert abs(residue_at_pole(fk, i, j) - want) <= 1e-11 * abs(want)


@pytest.mark.parametrize("seed", range(4))
def test_residue_by_small_circle(seed):
    params, k = case(seed)
    fk = RationalFk(params, k)
    q = abs(params.q)
    for i, j, z0 in fk.poles[:3]:
        radius = 0.1 * abs(z0) * min(1 - q, 0.5)
        got = contour_coefficients(lambda w: Fk_eval(fk, z0 + w), radius, [-1], nodes=128)[0]
        assert abs(got - residue_at_pole(fk, i, j)) <= 1e-9 * abs(got)


def test_residue_outside_the_pole_set():
    params, k = case(0)
    fk = RationalFk(params, k)
    with pytest.raises(ValueError):
        residue_at_pole(fk, 0, k + params.n[0] + 1)
    with pytest.raises(IndexError):
        residue_at_pole(fk, params.r, 0)


@pytest.mark.parametrize("seed", SEEDS)
def test_residue_theorem_closes(seed):
    params, k = case(seed)
    assert closure_residual(params, k) <= 1e-10
    fk = RationalFk(params, k)
    # the same statement, written out
    total = residue_sum(fk)
    assert abs(total - (c_minus1(params, k) - residue_at_zero(params, k))) <= 1e-9 * max(
        sum(abs(residue_at_pole(fk, i, j)) for i, j, _ in fk.poles), 1e-300
    )


@pytest.mark.parametrize("seed", SEEDS)
def test_log_derivative_recurrence_matches_direct_expansion(seed):
    params, k = case(seed)
    direct = fhat_coefficients(params, k, 4)
    recurrence = q_recurrence(params, k, 4)
    assert direct[0] == 1
    for s in range(5):
        assert abs(direct[s] - recurrence[s]) <= 1e-9 * max(abs(direct[s]), 1.0)


@pytest.mark.parametrize("seed", SEEDS)
def test_expansion_at_infinity_by_contour(seed):
    params, k = case(seed)
    radius = max(FAR, outer_radius(params, k))
    want = fhat_coefficients(params, k, 3)
    got = contour_coefficients(lambda z: fhat_eval(params, k, z), radius, [0, -1, -2, -3])
    for s, (g, w) in enumerate(zip(got, want)):
        # z^s fhat(z) carries a rounding error of about eps * radius^s
        floor = 1e-15 * radius**s
        assert abs(g - w) <= 1e-5 * abs(w) + floor


@pytest.mark.parametrize("seed", SEEDS)
def test_z_minus_one_coefficient_by_contour(seed):
    params, k = case(seed)
    fk = RationalFk(params, k)
    radius = max(FAR, outer_radius(params, k))
    got = contour_coefficients(lambda z: Fk_eval(fk, z), radius, [-1])[0]
    size = radius * max(abs(Fk_eval(fk, radius * np.exp(2j * np.pi * x / 7))) for x in range(7))
    assert abs(got - c_minus1(params, k)) <= 1e-8 * abs(c_minus1(params, k)) + 1e-13 * size


def test_z_minus_one_coefficient_vanishes_for_fast_decay():
    params = QParams([0.1, 0.4], [0.2, 0.3], [0, 0], [2, 2], 1, 0.5)
    assert params.p_index < 0
    assert c_minus1(params, 0) == 0


@pytest.mark.parametrize("seed", SEEDS)
def test_expansion_at_zero(seed):
    params, k = case(seed)
    fk = RationalFk(params, k)
    ps = p_recurrence(params, k, 3)
    minus_f = lambda z: -fk_eval(fk, z)
    assert abs(ps[0] - minus_f(0)) <= 1e-14 * abs(ps[0])
    h = 1e-4 * inner_radius(params, k)
    slope = (minus_f(h) - minus_f(-h)) / (2 * h)
    assert abs(slope - ps[1]) <= 1e-7 * abs(ps[1])
    # the remainder after three terms shrinks like z^4
    x = inner_radius(params, k)
    rem = [abs(minus_f(z) - sum(ps[s] * z**s for s in range(4))) / abs(z) ** 4 for z in (x, x / 2, x / 4)]
    assert rem[2] <= 1.2 * rem[1] <= 1.44 * rem[0]


def test_residue_at_zero_vanishes_without_shift():
    params, k = case(0)
    if params.t > 0:
        params = QParams(params.a, params.b, params.m, params.n, 0, params.q)
    assert residue_at_zero(params, k) == 0


@pytest.mark.parametrize("seed", SEEDS)
def test_alpha_identity(seed):
    params, k = case(seed)
    lhs, rhs = alpha_identity_sides(params, k)
    _, scale = alpha_double_sum(params, k)
    assert abs(lhs - rhs) <= 1e-8 * max(abs(lhs), abs(rhs), 1e-3 * scale)
    assert alpha_identity_check(params, k).records[0].status == PASS


def test_alpha_identity_needs_large_k():
    params, _ = case(0)
    with pytest.raises(ValueError):
        alpha_identity_sides(params, -params.m_min - 1)


@pytest.mark.parametrize("seed", range(8))
def test_sampling_recovers_beta(seed):
    params, _ = case(seed)
    table = beta_table(params)
    sampled = recover_beta_by_sampling(params, rng=np.random.default_rng(seed))
    for k, want in table.items():
        assert abs(sampled[k] - want) <= 1e-7 * max(abs(want), abs(sampled[k]), 1e-300)


@pytest.mark.parametrize("seed", range(6))
def test_disjoint_sample_sets_agree(seed):
    params, _ = case(seed)
    first = recover_beta_by_sampling(params, rng=np.random.default_rng(1000 + seed))
    second = recover_beta_by_sampling(params, rng=np.random.default_rng(2000 + seed), radius=0.7 * admissible_radius(params))
    for k, x in first.items():
        assert abs(x - second[k]) <= 1e-7 * max(abs(x), abs(second[k]), 1e-300)


def test_single_coefficient_case():
    example = GOLDEN_CASES[2]
    params = example.params(*REAL_TRIPLE)
    assert params.k_range == (-1, -1)
    sampled = recover_beta_by_sampling(params)
    want = params.qp(params.a[2]) / (1 - params.qp(params.a[2] - params.b[0]))
    assert len(sampled) == 1
    assert abs(sampled[-1] - want) <= 1e-12 * abs(want)


def test_sampling_reports_an_impossible_fit():
    params, _ = case(1)
    with pytest.raises(SamplingError):
        recover_beta_by_sampling(params, tol=0.0, attempts=2)


def test_contour_nodes_default():
    coeffs = contour_coefficients(lambda z: 3 + 2 / z + z**2, 2.0, [-1, 0, 1, 2])
    assert CONTOUR_NODES == 256
    assert np.allclose(coeffs, [2, 3, 0, 1], atol=1e-14)
