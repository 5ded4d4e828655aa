import numpy as np
import pytest

from ldsforge.codebook import CodebookSet, builtin_s1, builtin_s2, expand, qpsk
from ldsforge.detector import DetectionProblem, MpaEngine, map_detect, mpa_detect
from ldsforge.errors import ValidationError
from ldsforge.metrics import enumerate_superimposed, message_tuples


def single_resource_books(rng, j=3, m=2):
    # every user rides the same resource: the factor graph is a star and
    # one message-passing sweep is exact
    mats = [rng.standard_normal((1, m)) + 1j * rng.standard_normal((1, m))
            for _ in range(j)]
    labels = tuple(format(i, "01b") for i in range(m)) if m == 2 else None
    return CodebookSet(mats, labels=labels)


def brute_marginals(books, y, h, n0):
    sset = enumerate_superimposed(books)
    r = y[None, :] - h[None, :] * sset.vectors
    logw = -(r.real ** 2 + r.imag ** 2).sum(axis=1) / n0
    w = np.exp(logw - logw.max())
    post = np.zeros((books.J, books.M))
    for idx, msg in enumerate(sset.messages):
        for j, m in enumerate(msg):
            post[j, m] += w[idx]
    return post / post.sum(axis=1, keepdims=True)


def test_single_resource_mpa_is_exact():
    rng = np.random.default_rng(3)
    books = single_resource_books(rng)
    y = rng.standard_normal(1) + 1j * rng.standard_normal(1)
    h = rng.standard_normal(1) + 1j * rng.standard_normal(1)
    n0 = 0.8
    want = brute_marginals(books, y, h, n0)
    engine = MpaEngine(books)
    for iters in (1, 3):
        got = np.exp(engine.log_posteriors(y[None, :], h[None, :], n0, iters)[0])
        assert np.allclose(got, want, atol=1e-12)


def test_posteriors_normalized():
    rng = np.random.default_rng(5)
    books = expand(builtin_s2(), qpsk())
    y = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    h = np.ones(4, dtype=complex)
    post = mpa_detect(DetectionProblem(y, h, books, 0.5), iters=4)
    assert np.allclose(post.probabilities.sum(axis=1), 1.0, atol=1e-12)
    assert post.probabilities.min() >= 0
    assert post.symbols.shape == (6,)
    assert post.bits.shape == (12,)


def test_map_noiseless_recovery():
    rng = np.random.default_rng(9)
    books = expand(builtin_s1(), qpsk())
    truth = tuple(rng.integers(0, 4, size=6).tolist())
    x = np.zeros(4, dtype=complex)
    for j, m in enumerate(truth):
        x += books.books[j][:, m]
    h = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    assert map_detect(DetectionProblem(h * x, h, books, 1e-3)) == truth


def test_mpa_noiseless_recovery():
    rng = np.random.default_rng(13)
    books = expand(builtin_s2(), qpsk())
    truth = np.array([2, 0, 3, 1, 1, 2])
    x = np.zeros(4, dtype=complex)
    for j, m in enumerate(truth):
        x += books.books[j][:, m]
    post = mpa_detect(DetectionProblem(x, np.ones(4), books, 1e-4), iters=8)
    assert np.array_equal(post.symbols, truth)
    want_bits = np.concatenate(
        [[int(c) for c in books.labels[m]] for m in truth])
    assert np.array_equal(post.bits, want_bits)


def test_map_ties_break_lexicographically():
    # the two-user books where user 2 cancels user 1, so messages (0,0)
    # and (1,1) produce the same received point
    x1 = np.array([[0.0, 1.0]])
    x2 = np.array([[0.0, -1.0]])
    books = CodebookSet([x1, x2], labels=("0", "1"))
    got = map_detect(DetectionProblem([0.0], [1.0], books, 1.0))
    assert got == (0, 0)


def test_irregular_graph_rejected():
    x1 = np.array([[1.0, -1.0], [1.0, -1.0]])
    x2 = np.array([[1.0, -1.0], [0.0, 0.0]])
    with pytest.raises(ValidationError):
        MpaEngine(CodebookSet([x1, x2], labels=("0", "1")))


def test_bad_arguments_rejected():
    books = expand(builtin_s2(), qpsk())
    engine = MpaEngine(books)
    y = np.zeros((1, 4), dtype=complex)
    h = np.ones((1, 4), dtype=complex)
    with pytest.raises(ValidationError):
        engine.log_posteriors(y, h, 0.5, iters=0)
    with pytest.raises(ValidationError):
        engine.log_posteriors(y, h, -1.0, iters=4)
    with pytest.raises(ValidationError):
        DetectionProblem(np.zeros(3), np.ones(4), books, 0.5)
    with pytest.raises(ValidationError):
        DetectionProblem(np.zeros(4), np.ones(3), books, 0.5)
    with pytest.raises(ValidationError):
        DetectionProblem(np.zeros(4), np.ones(4), books, 0.0)


def test_max_log_agrees_on_easy_problem():
    rng = np.random.default_rng(21)
    books = expand(builtin_s2(), qpsk())
    truth = np.array([0, 3, 2, 2, 1, 0])
    x = np.zeros(4, dtype=complex)
    for j, m in enumerate(truth):
        x += books.books[j][:, m]
    y = x + 0.01 * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
    p = DetectionProblem(y, np.ones(4), books, 0.05)
    exact = mpa_detect(p, iters=6)
    approx = mpa_detect(p, iters=6, max_log=True)
    assert np.array_equal(exact.symbols, approx.symbols)
    assert np.array_equal(exact.symbols, truth)


def test_common_phase_invariance():
    rng = np.random.default_rng(31)
    books = expand(builtin_s2(), qpsk())
    engine = MpaEngine(books)
    y = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
    h = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
    rot = np.exp(0.7j)
    a = engine.log_posteriors(y, h, 0.4, iters=5)
    b = engine.log_posteriors(rot * y, rot * h, 0.4, iters=5)
    assert np.allclose(a, b, atol=1e-10)


def test_batch_matches_single_blocks():
    rng = np.random.default_rng(41)
    books = expand(builtin_s2(), qpsk())
    engine = MpaEngine(books)
    y = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    h = np.ones((3, 4), dtype=complex)
    batch = engine.log_posteriors(y, h, 0.6, iters=4)
    for b in range(3):
        one = engine.log_posteriors(y[b:b + 1], h[b:b + 1], 0.6, iters=4)[0]
        assert np.allclose(batch[b], one, rtol=0, atol=1e-13)


def test_map_scans_in_message_order():
    books = expand(builtin_s2(), qpsk())
    sset = enumerate_superimposed(books)
    assert np.array_equal(sset.messages, message_tuples(books.J, books.M))
