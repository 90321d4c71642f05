import math
from itertools import product

import numpy as np
import pytest

from lfhunt.diophantine import (DiophantineInstance, chen_bound,
                                lambda_exact, lambda_lower_bound,
                                nearest_int_dist, objective, search_t)

TWO_PI = 2.0 * math.pi


def test_nearest_int_dist_cases():
    assert abs(nearest_int_dist(2.3) - 0.3) <= 1e-12
    assert nearest_int_dist(-0.5) == 0.5
    assert nearest_int_dist(7.0) == 0.0
    assert nearest_int_dist(0.49999) <= 0.5


def _inst(lambdas, alphas, deltas, t_range=(0.0, 10.0), box=1):
    return DiophantineInstance(lambdas=np.asarray(lambdas, float),
                               alphas=np.asarray(alphas, float),
                               deltas=np.asarray(deltas, float),
                               t_range=t_range, box_size=box)


def test_objective_cases():
    inst = _inst([1.0], [0.0], [1.0])
    assert objective(inst, 0.0) == 0.0
    inst = _inst([1.0], [0.5], [1.0])
    assert objective(inst, 0.0) == 0.25
    lam = (math.log(2) / TWO_PI, math.log(3) / TWO_PI)
    inst = _inst(lam, [0.0, 0.0], [1.0, 1.0])
    t = 12.875
    brute = sum(nearest_int_dist(l * t) ** 2 for l in lam)
    assert abs(objective(inst, t) - brute) <= 1e-14


def test_objective_range_property():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(1, 5))
        inst = _inst(rng.uniform(0.01, 2, n), rng.random(n),
                     rng.uniform(0.1, 3, n))
        t = float(rng.uniform(-50, 50))
        val = objective(inst, t)
        assert 0.0 <= val <= inst.delta_total / 4 + 1e-12


def test_lambda_lower_bound_values():
    assert abs(lambda_lower_bound([2], 1) - math.log(1.5)) <= 1e-15
    assert abs(lambda_lower_bound([2, 3], 1) - math.log(7 / 6)) <= 1e-15
    assert lambda_lower_bound([2], 0) == math.inf
    assert lambda_lower_bound([], 2) == math.inf


def test_lambda_exact_small_cases():
    # {2}: min over u in {-1, 1} of |u log 2|
    assert abs(lambda_exact([2], 1) - math.log(2)) <= 1e-15
    # {2, 3}: min(log 2, log 3, log 3/2, log 6) = log(3/2)
    assert abs(lambda_exact([2, 3], 1) - math.log(1.5)) <= 1e-15
    assert lambda_exact([2], 0) == math.inf


def test_lambda_exact_matches_float_enumeration():
    rng = np.random.default_rng(9)
    small_primes = [2, 3, 5, 7, 11, 13, 17]
    for _ in range(20):
        n = int(rng.integers(1, 5))
        primes = sorted(rng.choice(small_primes, size=n, replace=False))
        box = int(rng.integers(1, 3))
        got = lambda_exact(primes, box)
        best = math.inf
        for u in product(range(-box, box + 1), repeat=n):
            s = sum(ui * math.log(p) for ui, p in zip(u, primes))
            if abs(s) > 1e-9:
                best = min(best, abs(s))
        assert abs(got - best) <= 1e-12 * max(1.0, best)


def test_lambda_exact_dominates_product_bound():
    rng = np.random.default_rng(13)
    small_primes = [2, 3, 5, 7, 11, 13, 17, 19]
    for _ in range(20):
        n = int(rng.integers(1, 6))
        primes = sorted(rng.choice(small_primes, size=n, replace=False))
        box = int(rng.integers(1, 4))
        assert lambda_exact(primes, box) >= lambda_lower_bound(primes, box)


def test_lambda_exact_box_guard():
    with pytest.raises(ValueError, match="too large"):
        lambda_exact([2, 3, 5, 7, 11, 13, 17, 19, 23, 29], 3)


def test_lambda_lower_bound_overflow_guard():
    with pytest.raises(OverflowError):
        lambda_lower_bound([int(p) for p in range(1000, 2000) if p % 97 == 0]
                           * 200, 3)


def test_chen_bound_single_frequency_limit():
    inst = _inst([math.log(2) / TWO_PI], [0.0], [1.0],
                 t_range=(0.0, 1e12), box=1)
    gap = lambda_exact([2], 1) / TWO_PI
    cert = chen_bound(inst, gap, search=False)
    assert abs(cert.bound - 0.125) <= 1e-9
    assert cert.delta_total == 1.0


def test_chen_bound_scales_linearly_in_weights():
    lam = [math.log(2) / TWO_PI, math.log(5) / TWO_PI]
    gap = lambda_exact([2, 5], 2) / TWO_PI
    a = chen_bound(_inst(lam, [0.3, 0.7], [1.0, 0.5], (0.0, 500.0), 2), gap,
                   search=False)
    b = chen_bound(_inst(lam, [0.3, 0.7], [2.0, 1.0], (0.0, 500.0), 2), gap,
                   search=False)
    assert abs(b.bound - 2.0 * a.bound) <= 1e-12


def test_chen_bound_requires_positive_gap():
    inst = _inst([0.5], [0.0], [1.0])
    with pytest.raises(ValueError, match="positive"):
        chen_bound(inst, 0.0)


def test_chen_certificate_holds_on_small_window():
    lam = [math.log(2) / TWO_PI, math.log(3) / TWO_PI]
    inst = _inst(lam, [0.25, 0.75], [1.0, 1.0], (0.0, 1e4), 1)
    gap = lambda_exact([2, 3], 1) / TWO_PI
    cert = chen_bound(inst, gap)
    assert cert.achieved <= cert.bound + 1e-9 * cert.delta_total
    # independent fine-grid oracle
    ts = np.arange(0.0, 1e4, 1e-3 / max(lam))
    measured = float(np.min(objective(inst, ts)))
    assert measured <= cert.bound
    assert cert.achieved <= measured + 1e-9


def test_search_exact_alignment():
    lam = math.log(2) / TWO_PI
    inst = _inst([lam], [0.5], [1.0], (0.0, 4 * math.pi / math.log(2)), 1)
    t, val = search_t(inst, grid_step=0.05 / lam)
    assert val <= 1e-12
    assert abs(t - math.pi / math.log(2)) <= 1e-3


def test_search_zero_alignment_prefers_smaller_t():
    lam = math.log(2) / TWO_PI
    inst = _inst([lam], [0.0], [1.0], (0.0, 50.0), 1)
    t, val = search_t(inst, grid_step=0.05 / lam)
    assert t == 0.0 and val == 0.0


def test_search_monotone_refinement():
    rng = np.random.default_rng(21)
    for _ in range(10):
        n = int(rng.integers(1, 4))
        lam = rng.uniform(0.05, 0.8, n)
        inst = _inst(lam, rng.random(n), rng.uniform(0.2, 2, n),
                     (0.0, 200.0), 1)
        step = 0.05 / float(np.max(lam))
        t, val = search_t(inst, grid_step=step)
        coarse = np.min(objective(inst, np.arange(0.0, 200.0, step)))
        assert val <= coarse + 1e-15


def test_search_guards():
    inst = _inst([1.0], [0.0], [1.0], (0.0, 10.0), 1)
    with pytest.raises(ValueError, match="grid_step"):
        search_t(inst, grid_step=10.0)
    with pytest.raises(ValueError, match="empty range"):
        _inst([1.0], [0.0], [1.0], (5.0, 5.0), 1)


def test_instance_validation():
    with pytest.raises(ValueError, match="positive"):
        _inst([1.0], [0.0], [0.0])
    with pytest.raises(ValueError, match="aligned"):
        DiophantineInstance(lambdas=np.array([1.0]), alphas=np.array([0.0, 1.0]),
                            deltas=np.array([1.0]), t_range=(0.0, 1.0),
                            box_size=1)


def test_from_primes_construction():
    inst = DiophantineInstance.from_primes([2, 3, 5], [0.1, 0.2, 0.3], 0.75,
                                           (10.0, 20.0), 2)
    assert np.allclose(inst.lambdas,
                       [math.log(p) / TWO_PI for p in (2, 3, 5)])
    assert np.allclose(inst.deltas, [p ** -0.75 for p in (2, 3, 5)])
    assert inst.box_size == 2
