
import numpy as np
import pytest

import expwalk as ew
from expwalk.errors import InvalidParameterError
from oracles import dense_power_apply


def test_k4_spectrum(k4_spectrum):
    assert np.allclose(k4_spectrum.eigenvalues, [1, -1 / 3, -1 / 3, -1 / 3], atol=1e-12)
    assert abs(k4_spectrum.lambda_star - 1 / 3) < 1e-12


@pytest.mark.parametrize("n", range(3, 9))
def test_complete_graph_spectra(n):
    s = ew.spectrum(ew.build_complete(n))
    expected = np.array([1.0] + [-1.0 / (n - 1)] * (n - 1))
    assert np.abs(s.eigenvalues - expected).max() < 1e-12


def test_cycle4_spectrum():
    s = ew.spectrum(ew.build_cycle(4))
    # eigenvalues cos(2 pi k / 4) = {1, 0, 0, -1}
    assert np.allclose(sorted(s.eigenvalues), [-1, 0, 0, 1], atol=1e-12)
    assert abs(s.lambda_star - 1.0) < 1e-12
    assert not ew.is_expander(s, 0.99)


def test_expander_comparisons(k4_spectrum):
    assert ew.lambda_star(k4_spectrum) == k4_spectrum.lambda_star
    assert ew.is_expander(k4_spectrum, 0.5)
    assert not ew.is_expander(k4_spectrum, 0.2)


def test_trace_is_zero(k4_spectrum, s16):
    for s in (k4_spectrum, s16):
        assert abs(s.eigenvalues.sum()) < 1e-9  # no self-loops


def test_spectrum_invariants(s16, g16):
    n = s16.n
    gram = s16.eigenvectors.T @ s16.eigenvectors / n
    assert np.abs(gram - np.eye(n)).max() < 1e-10
    resid = g16.transition() @ s16.eigenvectors - s16.eigenvectors * s16.eigenvalues
    assert np.abs(resid).max() < 1e-10
    assert np.abs(s16.eigenvectors[:, 0] - 1.0).max() < 1e-10


def test_spectrum_deterministic(g16):
    a = ew.spectrum(g16)
    b = ew.spectrum(g16)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


@pytest.mark.parametrize("builder", [lambda: ew.build_complete(4), lambda: ew.build_cycle(5), lambda: ew.build_random_regular(8, 3, seed=2)])
def test_spectral_apply_matches_dense_powers(builder):
    g = builder()
    s = ew.spectrum(g)
    p = g.transition()
    rng = np.random.Generator(np.random.Philox(5))
    for t in (0, 1, 2, 3, 7, 16, 33, 64):
        f = rng.normal(size=g.n)
        got = ew.spectral_apply(s, f, t)
        want = dense_power_apply(p, f, t)
        assert np.abs(got - want).max() < 1e-9


def test_spectral_apply_edge_cases(k4, k4_spectrum):
    f = np.array([2.0, -1.0, 0.5, 3.0])
    assert np.allclose(ew.spectral_apply(k4_spectrum, f, 0), f, atol=1e-10)
    ones = np.ones(4)
    for t in (1, 5, 50):
        assert np.allclose(ew.spectral_apply(k4_spectrum, ones, t), ones, atol=1e-10)
    # P^2(a, .) through the eigenbasis; P^2(a,a) = (9 + 3) / 36 = 1/3
    indicator = np.array([1.0, 0, 0, 0])
    assert abs(ew.spectral_apply(k4_spectrum, indicator, 2)[0] - 1 / 3) < 1e-12
    with pytest.raises(InvalidParameterError):
        ew.spectral_apply(k4_spectrum, np.ones(5), 1)


def test_return_probability_k4(k4, k4_spectrum):
    assert abs(ew.return_to_set_probability(k4, [0, 1], 0, k4_spectrum) - 1.0) < 1e-12
    assert abs(ew.return_to_set_probability(k4, [0, 1], 1, k4_spectrum) - 1 / 3) < 1e-12
    for k in (0, 3, 10):
        assert abs(ew.return_to_set_probability(k4, range(4), k, k4_spectrum) - 1.0) < 1e-12


def test_return_probability_matches_direct(g16, s16, k4, k4_spectrum):
    rng = np.random.Generator(np.random.Philox(3))
    for g, s in ((k4, k4_spectrum), (g16, s16)):
        for _ in range(100):
            size = int(rng.integers(1, g.n + 1))
            subset = rng.permutation(g.n)[:size]
            direct = subset_direct = None
            for k in (0, 1, 2, 5, 17, 64, 128):
                got = ew.return_to_set_probability(g, subset, k, s)
                want = ew.return_to_set_direct(g, subset, k)
                assert abs(got - want) < 1e-10


def test_return_probability_empty_set(k4):
    with pytest.raises(InvalidParameterError):
        ew.return_to_set_probability(k4, [], 1)


def test_mixing_lemma_k4_tight(k4, k4_spectrum):
    rep = ew.mixing_lemma_check(k4, [0], [1, 2, 3], k4_spectrum)
    assert abs(rep.lhs - 3 / 4) < 1e-12
    assert abs(rep.rhs - 3 / 4) < 1e-12
    assert rep.holds


def test_mixing_lemma_degenerate_sets(k4, k4_spectrum):
    rep = ew.mixing_lemma_check(k4, [], [0, 1], k4_spectrum)
    assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.holds
    every = ew.mixing_lemma_check(k4, range(4), range(4), k4_spectrum)
    assert every.lhs < 1e-9  # |E(V,V)| = d n exactly
    assert every.holds


def test_mixing_exhaustive_small_graph():
    g = ew.build_random_regular(6, 3, seed=4)
    s = ew.spectrum(g)
    subsets = [[v for v in range(6) if mask >> v & 1] for mask in range(64)]
    for f1 in subsets:
        rep = ew.mixing_corollary_check(g, f1, s)
        assert rep.holds
    for f1 in subsets[::5]:
        for f2 in subsets[::7]:
            assert ew.mixing_lemma_check(g, f1, f2, s).holds
