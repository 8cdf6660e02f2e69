import numpy as np
import pytest

from tsketch.concentration import (
    hanson_wright_tail,
    measure_sup_embedding_error,
    sample_unit_sphere_subspace,
)
from tsketch.distributions import effective_entry_bound, gaussian, rademacher
from tsketch.sketch import SketchSpec, apply, max_xi_inf_norm, sample_sketch


def gr_spec(m, n1, n2, q, seed=0):
    return SketchSpec(m=m, n1=n1, n2=n2, q=q, dist1=gaussian(), dist2=rademacher(), seed=seed)


# --- measure_sup_embedding_error ---


def test_empty_set_reports_zero():
    rep = measure_sup_embedding_error(gr_spec(10, 4, 4, 0.5), np.zeros((0, 16)), seed=1)
    assert rep.sup_error == 0.0 and rep.set_size == 0


def test_non_unit_vector_rejected():
    bad = np.zeros((1, 16))
    bad[0, 0] = 1.1
    with pytest.raises(ValueError):
        measure_sup_embedding_error(gr_spec(10, 4, 4, 0.5), bad, seed=1)


def test_single_basis_vector_unbiased():
    # E ||S e1||^2 = 1: the signed error averaged over 1e3 sketches (m=100)
    # lies within +-0.05 (measured -0.003 for this seed range).
    e1 = np.zeros(64)
    e1[0] = 1.0
    signed = []
    for seed in range(1000):
        sy = apply(sample_sketch(gr_spec(100, 8, 8, 1.0, seed)), e1)
        signed.append(sy @ sy - 1.0)
    assert abs(np.mean(signed)) < 0.05


def test_sup_error_is_max_over_set():
    Y = sample_unit_sphere_subspace(np.random.default_rng(0).standard_normal((36, 4)), 50, seed=2)
    spec = gr_spec(40, 6, 6, 0.5)
    rep_all = measure_sup_embedding_error(spec, Y, seed=9)
    rep_half = measure_sup_embedding_error(spec, Y[:25], seed=9)
    assert rep_all.sup_error >= rep_half.sup_error  # superset dominates
    # per-vector errors never exceed the reported sup
    from dataclasses import replace

    from tsketch.sketch import sketch_matrix

    sk = sample_sketch(replace(spec, seed=9))

    errs = np.abs((sketch_matrix(sk, Y.T) ** 2).sum(axis=0) - 1.0)
    assert rep_all.sup_error == pytest.approx(errs.max())


def test_median_sup_error_halves_when_m_doubles():
    # 1/sqrt(m) decay: doubling m shrinks the median sup error by a factor
    # inside [1.2, 3.5] (measured ~1.38 over 200 repetitions).
    A = np.random.default_rng(3).standard_normal((256, 10))
    Y = sample_unit_sphere_subspace(A, 200, seed=5)
    medians = {}
    for m in (100, 200):
        sups = [
            measure_sup_embedding_error(gr_spec(m, 16, 16, 0.2), Y, seed=rep * 7 + 1).sup_error
            for rep in range(200)
        ]
        medians[m] = np.median(sups)
    factor = medians[100] / medians[200]
    assert 1.2 <= factor <= 3.5


def test_realized_m_respects_analytic_bound():
    for q in (0.2, 0.5, 1.0):
        spec = gr_spec(50, 8, 8, q, seed=4)
        sk = sample_sketch(spec)
        bound = effective_entry_bound(rademacher(), q)
        assert max_xi_inf_norm(sk) <= bound + 1e-12


def test_tensor_comparable_to_dense_gaussian_baseline():
    # A trivial n2=1, q=1 spec is exactly a dense Gaussian/sqrt(m) operator
    # (the Rademacher sign folds into the Gaussian); median sup errors over
    # a subspace set agree within factor 3 at matched m.
    rng = np.random.default_rng(9)
    Y = sample_unit_sphere_subspace(rng.standard_normal((256, 10)), 300, seed=9)
    tensor, dense = [], []
    for rep in range(100):
        tensor.append(
            measure_sup_embedding_error(gr_spec(200, 16, 16, 0.2), Y, seed=rep).sup_error
        )
        dense.append(
            measure_sup_embedding_error(gr_spec(200, 256, 1, 1.0), Y, seed=rep).sup_error
        )
    ratio = np.median(tensor) / np.median(dense)
    assert 1.0 / 3.0 <= ratio <= 3.0


# --- sample_unit_sphere_subspace ---


def test_subspace_samples_unit_and_in_range():
    A = np.random.default_rng(1).standard_normal((40, 6))
    Y = sample_unit_sphere_subspace(A, 100, seed=3)
    np.testing.assert_allclose(np.linalg.norm(Y, axis=1), 1.0, atol=1e-12)
    Q, _ = np.linalg.qr(A)
    resid = Y - (Y @ Q) @ Q.T
    assert np.abs(resid).max() < 1e-10


def test_rank_one_subspace_gives_signed_direction():
    A = np.outer(np.arange(1.0, 9.0), [2.0])  # rank-1, 8 x 1
    u = A[:, 0] / np.linalg.norm(A[:, 0])
    Y = sample_unit_sphere_subspace(A, 25, seed=8)
    aligned = np.abs(Y @ u)
    np.testing.assert_allclose(aligned, 1.0, atol=1e-12)


def test_zero_matrix_rejected():
    with pytest.raises(ValueError):
        sample_unit_sphere_subspace(np.zeros((10, 2)), 5, seed=0)


# --- hanson_wright_tail ---


def test_q_one_rademacher_identity_never_exceeds():
    curve = hanson_wright_tail(
        16, 20, 1.0, "identity", 500, np.array([0.01, 0.1, 1.0]), seed=3
    )
    np.testing.assert_array_equal(curve.empirical_exceed_prob, np.zeros(3))


def test_exceedance_monotone_in_threshold():
    curve = hanson_wright_tail(
        32, 50, 0.2, "identity", 2000, np.array([0.05, 0.1, 0.2, 0.4]), seed=5
    )
    assert np.all(np.diff(curve.empirical_exceed_prob) <= 0)
    assert curve.n_trials == 2000


def test_random_psd_centering():
    # mean of W should approach 0: check the statistic is centered by
    # comparing exceedance at a generous threshold to exceedance at tiny t
    curve = hanson_wright_tail(
        12, 30, 0.5, "random_psd", 2000, np.array([0.001, 2.0]), seed=6
    )
    assert curve.empirical_exceed_prob[0] > 0.5  # tiny threshold almost always exceeded
    assert curve.empirical_exceed_prob[1] < 0.05  # generous threshold rarely


def test_doubling_m_sharpens_tail():
    # -log(exceedance) grows by a factor in [1.4, 2.8] per doubling of m
    # at fixed t in the sub-Gaussian regime (measured ~1.5-1.7).
    t = np.array([0.2])
    probs = {}
    for i, m in enumerate((50, 100, 200)):
        curve = hanson_wright_tail(32, m, 0.2, "identity", 10_000, t, seed=1000 + i)
        probs[m] = curve.empirical_exceed_prob[0]
    assert min(probs.values()) > 0.001
    r1 = np.log(probs[100]) / np.log(probs[50])
    r2 = np.log(probs[200]) / np.log(probs[100])
    assert 1.4 <= r1 <= 2.8
    assert 1.4 <= r2 <= 2.8


def test_parameter_validation():
    with pytest.raises(ValueError):
        hanson_wright_tail(8, 10, 0.5, "diagonal", 500, np.array([0.1]), seed=0)
    with pytest.raises(ValueError):
        hanson_wright_tail(8, 10, 0.5, "identity", 50, np.array([0.1]), seed=0)
    with pytest.raises(ValueError):
        hanson_wright_tail(8, 10, 0.5, "identity", 500, np.array([0.2, 0.1]), seed=0)
    with pytest.raises(ValueError):
        hanson_wright_tail(8, 10, 1.5, "identity", 500, np.array([0.1]), seed=0)
