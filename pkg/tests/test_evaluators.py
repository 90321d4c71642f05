import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from lfhunt.catalog import builtin_dirichlet, builtin_zeta, chi3, chi4
from lfhunt.evaluators import (dirichlet_l, euler_product_log, grid_heights,
                               hurwitz_zeta, log_l_branch, log_l_point,
                               value_at, values_on_grid, zeta)

from oracles import (catalan_via_series, em_zeta_oracle, leibniz_pi_over_4,
                     pi3_over_32_series, zeta_real_via_eta)


def test_zeta_at_two():
    assert abs(zeta(2.0) - math.pi ** 2 / 6) <= 1e-13


def test_zeta_inside_strip_against_eta_oracle():
    oracle = zeta_real_via_eta(0.75)
    assert abs(oracle - (-3.4412853869452229)) < 1e-12
    assert abs(zeta(0.75) - oracle) <= 1e-11


def test_zeta_high_point_against_doubled_em_oracle():
    s = 0.75 + 100j
    oracle = em_zeta_oracle(s, doubling=2.0, order=14)
    assert abs(zeta(s) - oracle) <= 1e-8
    with mp.workdps(30):
        assert abs(zeta(s) - complex(mp.zeta(mp.mpc(0.75, 100)))) <= 1e-8


def test_zeta_truncation_bound_is_honest():
    # spot checks against a high-precision oracle; roundoff stays below the
    # truncation bound at these heights
    for s in (0.6 + 37.5j, 0.75 + 1234.5j, 2.5 + 9.25j, 0.4 + 400j):
        val, bound = value_at(builtin_zeta(), s, tol=1e-9)
        with mp.workdps(40):
            exact = complex(mp.zeta(mp.mpc(s.real, s.imag)))
        assert abs(val - exact) <= bound + 1e-12


def test_zeta_guards():
    with pytest.raises(ValueError, match="near pole"):
        zeta(1.0 + 1e-9j)
    with pytest.raises(ValueError, match="Re s"):
        zeta(0.2 + 5j)


def test_hurwitz_reduction_to_zeta():
    assert abs(hurwitz_zeta(2.0, 1.0) - zeta(2.0)) <= 1e-13


def test_hurwitz_half_values():
    # sum over (n + 1/2)^(-2) = 4 * sum over odd m of m^(-2) = pi^2 / 2
    assert abs(hurwitz_zeta(2.0, 0.5) - math.pi ** 2 / 2) <= 1e-12
    # (2^s - 1) zeta(s) identity at s = 3, cross-checked by direct series
    direct = sum((n + 0.5) ** -3 for n in range(200_000)) \
        + 0.5 * 200_000.5 ** -2  # integral tail to first order
    assert abs(hurwitz_zeta(3.0, 0.5) - 7 * 1.2020569031595943) <= 1e-12
    assert abs(hurwitz_zeta(3.0, 0.5) - direct) <= 1e-7


def test_hurwitz_guards():
    with pytest.raises(ValueError, match="offset"):
        hurwitz_zeta(2.0, 0.0)
    with pytest.raises(ValueError, match="offset"):
        hurwitz_zeta(2.0, 1.5)
    with pytest.raises(ValueError, match="near pole"):
        hurwitz_zeta(1.0, 0.5)


def test_dirichlet_l_classical_values():
    chi = chi4()
    assert abs(dirichlet_l(2.0, chi) - catalan_via_series()) <= 1e-9
    assert abs(dirichlet_l(2.0, chi) - 0.9159655941772190) <= 1e-9
    # the regularized Hurwitz route admits s = 1 exactly
    assert abs(dirichlet_l(1.0, chi) - leibniz_pi_over_4()) <= 1e-9
    assert abs(dirichlet_l(1.0, chi) - math.pi / 4) <= 1e-9
    assert abs(dirichlet_l(3.0, chi) - pi3_over_32_series()) <= 1e-9
    assert abs(dirichlet_l(3.0, chi) - math.pi ** 3 / 32) <= 1e-9


def test_dirichlet_l_rejects_imprimitive():
    from lfhunt.catalog import DirichletCharacter
    principal = DirichletCharacter(4, (0, 1, 0, 1))
    with pytest.raises(ValueError, match="imprimitive"):
        dirichlet_l(2.0, principal)


def test_conjugation_symmetry_random_points():
    rng = np.random.default_rng(3)
    z = builtin_zeta()
    l4 = builtin_dirichlet(chi4())
    for _ in range(100):
        sigma = rng.uniform(0.55, 3.0)
        t = rng.uniform(-1e4, 1e4)
        s = complex(sigma, t)
        for spec in (z, l4):
            v_plus, _ = value_at(spec, s)
            v_minus, _ = value_at(spec, s.conjugate())
            assert abs(v_minus - v_plus.conjugate()) <= 1e-10


def test_euler_product_consistency_at_sigma_3():
    for spec in (builtin_zeta(), builtin_dirichlet(chi4()),
                 builtin_dirichlet(chi3())):
        for t in (0.0, 17.25):
            s = complex(3.0, t)
            v, _ = value_at(spec, s)
            ep = euler_product_log(spec, s, prime_limit=1e5)
            assert abs(cmath.exp(ep) - v) <= 1e-6
    # convergence in the truncation limit
    z = builtin_zeta()
    errs = [abs(cmath.exp(euler_product_log(z, 3.0 + 0j, prime_limit=p))
                - zeta(3.0)) for p in (10.0, 100.0, 1e4)]
    assert errs[0] > errs[1] > errs[2]


def test_branch_at_zero_height_crosses_pole_detour():
    z = builtin_zeta()
    pt = log_l_point(z, 0.75, 0.0)
    # zeta(0.75) is negative real; the continued branch lands at +-i*pi
    assert abs(abs(pt.log_value.imag) - math.pi) <= 1e-9
    assert abs(pt.log_value.real - math.log(3.4412853869452229)) <= 1e-9
    assert abs(cmath.exp(pt.log_value) - pt.value) <= 1e-9 * abs(pt.value)


def test_branch_anchor_value():
    z = builtin_zeta()
    pts = log_l_branch(z, 3.0, [0.0])
    assert abs(pts[0].log_value - 0.18403417539149142) <= 1e-9


def test_branch_exp_consistency_along_grid():
    z = builtin_zeta()
    grid = list(np.linspace(1000.0, 1004.0, 41))
    pts = log_l_branch(z, 0.75, grid)
    for pt in pts:
        assert abs(cmath.exp(pt.log_value) - pt.value) <= 1e-9 * max(
            abs(pt.value), 1e-12)
    # neighboring branch values stay within the winding guard
    for a, b in zip(pts, pts[1:]):
        assert abs(b.log_value - a.log_value) < 3.2  # pi with refinement slack


def test_branch_forward_backward_return():
    z = builtin_zeta()
    grid = list(np.linspace(500.0, 502.0, 21))
    pts = log_l_branch(z, 0.8, grid)
    # walk back along the reversed path with principal-log stitching
    log_back = pts[-1].log_value
    for prev, cur in zip(pts[::-1], pts[::-1][1:]):
        log_back += cmath.log(cur.value / prev.value)
    assert abs(log_back - pts[0].log_value) <= 1e-9


def test_branch_matches_mpmath_at_moderate_height():
    z = builtin_zeta()
    pts = log_l_branch(z, 0.75, [50.0])
    with mp.workdps(40):
        # mpmath tracks the standard branch continued from large sigma
        exact = complex(mp.log(mp.zeta(mp.mpc(0.75, 50))))
    assert abs(pts[0].log_value - exact) <= 1e-8


def test_branch_requires_ascending_grid():
    z = builtin_zeta()
    with pytest.raises(ValueError, match="ascending"):
        log_l_branch(z, 0.75, [2.0, 1.0])
    with pytest.raises(ValueError, match="empty"):
        log_l_branch(z, 0.75, [])


def test_values_on_grid_matches_point_evaluations():
    z = builtin_zeta()
    l4 = builtin_dirichlet(chi4())
    t0, dt, count = 5000.0, 0.01, 64
    for spec in (z, l4):
        table = values_on_grid(spec, 0.75, t0, dt, count, tol=1e-10)
        for t in grid_heights(t0, dt, count)[::9]:
            direct, _ = value_at(spec, complex(0.75, t), tol=1e-12)
            grid_val, bound = table[t]
            assert abs(grid_val - direct) <= bound + 1e-10


def test_euler_product_backend_is_flagged_estimate(tmp_path):
    from lfhunt.catalog import ingest_coefficients, write_coefficients
    path = tmp_path / "z.coeffs"
    write_coefficients(builtin_zeta(), path, 5000)
    spec = ingest_coefficients(path)
    v, bound = value_at(spec, 3.0 + 0j)
    assert math.isinf(bound)
    assert abs(v - zeta(3.0)) <= 1e-3     # decent estimate at sigma = 3
    pts = log_l_branch(spec, 0.75, [10.0, 10.5])
    assert all(math.isinf(p.abs_err_bound) for p in pts)
