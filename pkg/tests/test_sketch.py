import time

import numpy as np
import pytest

from tsketch.distributions import gaussian, rademacher
from tsketch.sketch import (
    ResourceLimitError,
    SketchSpec,
    apply,
    apply_kron_column,
    densify,
    load_sketch_arrays,
    max_xi_inf_norm,
    sample_sketch,
    save_sketch,
    sketch_matrix,
)


def gr_spec(m, n1, n2, q, seed):
    return SketchSpec(m=m, n1=n1, n2=n2, q=q, dist1=gaussian(), dist2=rademacher(), seed=seed)


def test_spec_validation():
    with pytest.raises(ValueError):
        gr_spec(0, 4, 4, 0.5, 1)
    with pytest.raises(ValueError):
        gr_spec(4, 4, 4, 0.0, 1)
    with pytest.raises(ValueError):
        gr_spec(4, 4, 4, 1.5, 1)


def test_q_one_rademacher_pair_entries():
    spec = SketchSpec(m=3, n1=2, n2=2, q=1.0, dist1=rademacher(), dist2=rademacher(), seed=5)
    S = densify(sample_sketch(spec))
    assert np.all(np.isin(S, [-1 / np.sqrt(3), 1 / np.sqrt(3)]))


def test_determinism_bit_identical():
    spec = gr_spec(40, 16, 8, 0.3, 999)
    a, b = sample_sketch(spec), sample_sketch(spec)
    assert np.array_equal(a.eta, b.eta) and np.array_equal(a.xi, b.xi)


def test_expected_nonzero_fraction_is_q_squared():
    # Nonzero fraction of the densified operator is q^2 in expectation.
    # At m=400, n1=n2=64, q=0.2 the fraction's std is ~7e-4 (product of
    # independent Binomial(64, 0.2) row counts), so +-0.005 is ~7 sigma.
    sk = sample_sketch(gr_spec(400, 64, 64, 0.2, 11))
    frac = np.count_nonzero(densify(sk)) / (400 * 64 * 64)
    assert abs(frac - 0.04) < 0.005


def test_swap_puts_bounded_law_on_xi():
    spec = SketchSpec(m=50, n1=8, n2=8, q=1.0, dist1=rademacher(), dist2=gaussian(), seed=3)
    sk = sample_sketch(spec)
    assert sk.swapped and not sk.unbounded_pair
    assert np.all(np.abs(sk.xi) == 1.0)


def test_unbounded_pair_flagged_but_sampled():
    spec = SketchSpec(m=10, n1=4, n2=4, q=0.5, dist1=gaussian(), dist2=gaussian(), seed=1)
    sk = sample_sketch(spec)
    assert sk.unbounded_pair and not sk.swapped
    assert sk.eta.shape == (10, 4)


def test_apply_zero_vector():
    sk = sample_sketch(gr_spec(20, 6, 5, 0.5, 2))
    assert np.array_equal(apply(sk, np.zeros(30)), np.zeros(20))


def test_apply_shape_errors():
    sk = sample_sketch(gr_spec(20, 6, 5, 0.5, 2))
    with pytest.raises(ValueError):
        apply(sk, np.zeros(29))
    with pytest.raises(ValueError):
        apply_kron_column(sk, np.zeros(5), np.zeros(5))
    with pytest.raises(ValueError):
        sketch_matrix(sk, np.zeros((29, 3)))


def test_apply_matches_dense_oracle():
    rng = np.random.default_rng(0)
    worst = 0.0
    for trial in range(100):
        m = int(rng.integers(1, 60))
        n1 = int(rng.integers(1, 20))
        n2 = int(rng.integers(1, 20))
        q = float(rng.uniform(0.05, 1.0))
        sk = sample_sketch(gr_spec(m, n1, n2, q, trial))
        y = rng.standard_normal(n1 * n2)
        err = np.linalg.norm(apply(sk, y) - densify(sk) @ y)
        worst = max(worst, err / max(np.linalg.norm(y), 1e-300))
    assert worst < 1e-12


def test_kron_column_extracts_coordinates():
    sk = sample_sketch(gr_spec(30, 7, 9, 1.0, 8))
    f = np.zeros(7)
    f[0] = 1.0
    g = np.zeros(9)
    g[0] = 1.0
    np.testing.assert_allclose(
        apply_kron_column(sk, f, g), sk.eta[:, 0] * sk.xi[:, 0] / np.sqrt(30)
    )


def test_kron_column_matches_generic_apply():
    rng = np.random.default_rng(14)
    sk = sample_sketch(gr_spec(100, 32, 32, 0.4, 21))
    for _ in range(20):
        f = rng.standard_normal(32)
        g = rng.standard_normal(32)
        fast = apply_kron_column(sk, f, g)
        slow = apply(sk, np.kron(f, g))
        assert np.linalg.norm(fast - slow) <= 1e-12 * max(np.linalg.norm(slow), 1.0)


def test_kron_column_bilinearity():
    rng = np.random.default_rng(31)
    sk = sample_sketch(gr_spec(25, 12, 10, 0.6, 77))
    f, g = rng.standard_normal(12), rng.standard_normal(10)
    for a in (-2.5, 0.0, 0.125, 3.0):
        np.testing.assert_allclose(
            apply_kron_column(sk, a * f, g), a * apply_kron_column(sk, f, g), atol=1e-13
        )


def test_sketch_matrix_empty_and_single_column():
    sk = sample_sketch(gr_spec(15, 6, 4, 0.5, 9))
    assert sketch_matrix(sk, np.zeros((24, 0))).shape == (15, 0)
    f, g = np.arange(6.0), np.arange(4.0) + 1.0
    col = np.kron(f, g).reshape(-1, 1)
    np.testing.assert_allclose(
        sketch_matrix(sk, col)[:, 0], apply_kron_column(sk, f, g), atol=1e-12
    )


def test_sketch_matrix_fast_path_matches_generic():
    rng = np.random.default_rng(5)
    p = 15
    F = rng.standard_normal((64, p))
    G = rng.standard_normal((64, p))
    A = np.einsum("ij,kj->ikj", F, G).reshape(64 * 64, p)
    sk = sample_sketch(gr_spec(80, 64, 64, 0.3, 13))
    fast = sketch_matrix(sk, A, kron_factors=(F, G))
    slow = sketch_matrix(sk, A)
    err = np.linalg.norm(fast - slow) / np.linalg.norm(slow)
    assert err < 1e-12


def test_isotropy_of_sketched_norm():
    # E ||S y||^2 = ||y||^2: average over 1e4 independent sketches, m=20.
    n1 = n2 = 8
    y = np.random.default_rng(5).standard_normal(n1 * n2)
    y /= np.linalg.norm(y)
    for q in (0.2, 1.0):
        total = 0.0
        for seed in range(10_000):
            sy = apply(sample_sketch(gr_spec(20, n1, n2, q, seed)), y)
            total += sy @ sy
        assert abs(total / 10_000 - 1.0) < 0.05


def test_densify_trivial_rows():
    spec = SketchSpec(m=2, n1=1, n2=1, q=1.0, dist1=rademacher(), dist2=rademacher(), seed=0)
    sk = sample_sketch(spec)
    expected = (sk.eta[:, 0] * sk.xi[:, 0] / np.sqrt(2)).reshape(2, 1)
    np.testing.assert_allclose(densify(sk), expected)


def test_densify_budget_guard():
    sk = sample_sketch(gr_spec(100, 64, 64, 0.5, 4))
    with pytest.raises(ResourceLimitError):
        densify(sk, max_entries=1000)


def test_max_xi_inf_norm_forced_rademacher():
    sk = sample_sketch(gr_spec(200, 8, 64, 0.25, 6))
    assert np.count_nonzero(sk.xi) > 0
    assert max_xi_inf_norm(sk) == 2.0


def test_max_xi_inf_norm_gaussian_band():
    # Order-statistics oracle: the max of 10^4 * 64 |N(0,1)| draws lies in
    # [3.5, 5.5] about 97% of the time (P(|N|>5.5) ~ 3.8e-8 per draw gives
    # ~2.4% mass above); all 20 of these fixed seeds land inside.
    spec = lambda seed: SketchSpec(
        m=10_000, n1=2, n2=64, q=1.0, dist1=gaussian(), dist2=gaussian(), seed=seed
    )
    inside = sum(3.5 <= max_xi_inf_norm(sample_sketch(spec(s))) <= 5.5 for s in range(20))
    assert inside == 20


def test_fast_path_wall_clock_advantage():
    # n1=n2=256, m=500, 100 kron columns: the factored path must beat the
    # densified multiply by 10x (the flop ratio predicts ~128x).
    rng = np.random.default_rng(44)
    p = 100
    F = rng.standard_normal((256, p))
    G = rng.standard_normal((256, p))
    A = np.einsum("ij,kj->ikj", F, G).reshape(256 * 256, p)
    sk = sample_sketch(gr_spec(500, 256, 256, 0.2, 3))
    t0 = time.perf_counter()
    fast = sketch_matrix(sk, A, kron_factors=(F, G))
    t_fast = time.perf_counter() - t0
    S = densify(sk)
    t0 = time.perf_counter()
    slow = S @ A
    t_slow = time.perf_counter() - t0
    np.testing.assert_allclose(fast, slow, atol=1e-9)
    assert t_slow > 10.0 * t_fast, f"fast {t_fast:.4f}s vs dense {t_slow:.4f}s"


def test_binary_dump_round_trip(tmp_path):
    sk = sample_sketch(gr_spec(12, 5, 7, 0.4, 88))
    path = tmp_path / "sketch.tsk"
    save_sketch(sk, str(path))
    m, n1, n2, q, eta, xi = load_sketch_arrays(str(path))
    assert (m, n1, n2, q) == (12, 5, 7, 0.4)
    assert np.array_equal(eta, sk.eta) and np.array_equal(xi, sk.xi)
