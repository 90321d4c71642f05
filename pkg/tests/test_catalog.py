import pytest

from lfhunt.catalog import (DirichletCharacter, builtin_dirichlet, builtin_zeta,
                            chi3, chi4, ingest_coefficients, ssoc_csv,
                            ssoc_diagnostic, write_coefficients)
from lfhunt.errors import CoverageError
from lfhunt.primes import sieve_primes

from oracles import mp_log_integral, naive_primes


def test_chi4_values():
    chi = chi4()
    assert chi.primitive
    assert chi(3) == -1
    assert chi(2) == 0
    assert chi(5) == 1
    for p in naive_primes(1000):
        assert abs(chi(p)) <= 1


def test_character_rejects_bad_tables():
    with pytest.raises(ValueError, match="vanish"):
        DirichletCharacter(4, (0, 1, 1, -1))
    with pytest.raises(ValueError, match="multiplicative"):
        DirichletCharacter(5, (0, 1, 1j, -1j, 1))  # chi(2)^2 should be chi(4)


def test_principal_and_induced_characters_are_imprimitive():
    principal4 = DirichletCharacter(4, (0, 1, 0, 1))
    assert not principal4.primitive
    # the character mod 9 induced from the quadratic character mod 3
    induced9 = DirichletCharacter(9, (0, 1, -1, 0, 1, -1, 0, 1, -1))
    assert not induced9.primitive
    for chi in (principal4, induced9):
        with pytest.raises(ValueError, match="imprimitive character"):
            builtin_dirichlet(chi)


def test_builtin_zeta_fields():
    z = builtin_zeta()
    assert z.coeff(2) == 1
    assert z.kappa == 1.0
    assert z.degree_bound == 1
    assert z.roots(97) == (1.0 + 0.0j,)
    assert z.covers(1e12)
    assert z.pole_order == 1


def test_builtin_dirichlet_fields():
    spec = builtin_dirichlet(chi4())
    assert spec.coeff(3) == -1
    assert spec.coeff(2) == 0
    assert spec.degree_bound == 1 and spec.kappa == 1.0
    assert spec.certified_backend
    for p in naive_primes(500):
        assert abs(spec.coeff(p)) <= spec.degree_bound + 1e-12


def test_coefficient_file_round_trip_zeta(tmp_path):
    path = tmp_path / "zeta.coeffs"
    write_coefficients(builtin_zeta(), path, 10_000)
    spec = ingest_coefficients(path)
    assert spec.degree_bound == 1
    assert spec.kappa == 1.0
    for p in sieve_primes(10_000):
        assert spec.coeff(int(p)) == 1.0
    assert not spec.covers(10_007)
    with pytest.raises(CoverageError, match="coverage insufficient"):
        spec.coeff(10_007)
    assert not spec.certified_backend


def test_coefficient_file_round_trip_chi4(tmp_path):
    path = tmp_path / "chi4.coeffs"
    reference = builtin_dirichlet(chi4())
    write_coefficients(reference, path, 2000)
    spec = ingest_coefficients(path)
    for p in sieve_primes(2000):
        assert spec.coeff(int(p)) == reference.coeff(int(p))
        assert spec.roots(int(p)) == reference.roots(int(p))


def test_ingest_rejects_ramanujan_violation(tmp_path):
    path = tmp_path / "bad.coeffs"
    path.write_text(
        "name = bad\ndegree = 1\nkappa = 1.0\nprime_limit = 3\n"
        "2 1.5 0.0\n3 1.0 0.0\n")
    with pytest.raises(ValueError, match="Ramanujan bound violated"):
        ingest_coefficients(path)


def test_ingest_rejects_gaps(tmp_path):
    path = tmp_path / "gap.coeffs"
    path.write_text(
        "name = gap\ndegree = 1\nkappa = 1.0\nprime_limit = 10\n"
        "2 1.0 0.0\n3 1.0 0.0\n7 1.0 0.0\n")
    with pytest.raises(CoverageError, match="coverage insufficient"):
        ingest_coefficients(path)


def test_ingest_rejects_unknown_header(tmp_path):
    path = tmp_path / "hdr.coeffs"
    path.write_text("name = x\nflavor = odd\n")
    with pytest.raises(ValueError, match="unknown header key"):
        ingest_coefficients(path)


def test_ingest_warns_on_kappa_mismatch(tmp_path):
    path = tmp_path / "badkappa.coeffs"
    write_coefficients(builtin_zeta(), path, 2000)
    text = path.read_text().replace("kappa = 1.0", "kappa = 3.0")
    path.write_text(text)
    with pytest.warns(UserWarning, match="differs from the empirical"):
        ingest_coefficients(path)


def test_ingest_coeffs_mode(tmp_path):
    path = tmp_path / "c.coeffs"
    path.write_text(
        "name = coeffs_only\ndegree = 2\nkappa = 1.0\nprime_limit = 10\n"
        "mode = coeffs\n"
        "2 1.5 0.0\n3 -0.5 0.25\n5 0.0 0.0\n7 2.0 0.0\n")
    spec = ingest_coefficients(path)
    assert spec.coeff(2) == 1.5
    assert spec.coeff(3) == complex(-0.5, 0.25)
    assert spec.degree_bound == 2
    with pytest.raises(CoverageError, match="no Euler roots"):
        spec.roots(2)


def test_ingest_coeffs_mode_degree_bound(tmp_path):
    path = tmp_path / "c.coeffs"
    path.write_text(
        "name = toolarge\ndegree = 2\nkappa = 1.0\nprime_limit = 3\n"
        "mode = coeffs\n2 2.5 0.0\n3 0.0 0.0\n")
    with pytest.raises(ValueError, match="Ramanujan bound violated"):
        ingest_coefficients(path)


def test_ssoc_zeta_diagonal_small():
    z = builtin_zeta()
    rows = ssoc_diagnostic(z, z, 100.0, [2.0, 100.0])
    assert rows[0].s_value == 1.0 + 0.0j          # single prime p = 2
    assert rows[1].s_value == 25.0 + 0.0j         # pi(100) = 25
    assert len(naive_primes(100)) == 25
    assert abs(rows[1].predicted - mp_log_integral(100)) <= 1e-9


def test_ssoc_off_diagonal_zeta_chi4():
    z = builtin_zeta()
    l4 = builtin_dirichlet(chi4())
    rows = ssoc_diagnostic(z, l4, 100.0, [100.0])
    brute = sum(complex(chi4()(p)).conjugate() for p in naive_primes(100))
    assert rows[0].s_value == brute
    assert rows[0].s_value == -2.0 + 0.0j
    assert rows[0].predicted == 0.0


def test_ssoc_normalized_residuals_bounded():
    z = builtin_zeta()
    l4 = builtin_dirichlet(chi4())
    checkpoints = [1e3, 1e4, 1e5]
    for a, b in ((z, z), (z, l4)):
        rows = ssoc_diagnostic(a, b, 1e5, checkpoints)
        for row in rows:
            assert row.normalized_residual <= 5.0


def test_ssoc_rejects_uncovered_range(tmp_path):
    path = tmp_path / "short.coeffs"
    write_coefficients(builtin_zeta(), path, 50)
    spec = ingest_coefficients(path)
    with pytest.raises(CoverageError):
        ssoc_diagnostic(spec, spec, 1000.0, [1000.0])


def test_ssoc_csv_columns():
    z = builtin_zeta()
    rows = ssoc_diagnostic(z, z, 100.0, [10.0, 100.0])
    text = ssoc_csv(rows)
    header = text.splitlines()[0].split(",")
    assert header == ["x", "S_re", "S_im", "predicted", "residual",
                      "normalized_residual"]
    assert len(text.splitlines()) == 3


def test_spec_invariants_on_builtin_coeffs():
    for spec in (builtin_zeta(), builtin_dirichlet(chi4()),
                 builtin_dirichlet(chi3())):
        for p in naive_primes(300):
            roots = spec.roots(p)
            assert len(roots) == spec.degree_bound
            assert all(abs(nu) <= 1.0 + 1e-12 for nu in roots)
            assert abs(spec.coeff(p) - sum(roots)) <= 1e-12
