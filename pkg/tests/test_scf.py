import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bhetoscf.basis import BasisSpec
from bhetoscf.errors import ConvergenceError, DegenerateBasisError, DomainError
from bhetoscf.integrals import IntegralTables, assemble_tables, build_basis, tables_for
from bhetoscf.scf import (
    AtomSystem,
    ScfSettings,
    build_fock,
    canonical_orthogonalizer,
    coulomb_exchange,
    double_zeta_energy,
    energy_decomposition,
    one_electron_spectrum,
    scf_solve,
    single_zeta_energy,
    solve_basis,
    symmetric_eigensolve,
)

HF_LIMIT_HE = -2.861679995612238878

HE_DZ = [(0.98207, 2.85100), (1.01316, 1.45434)]
LI_DZ = [(0.98393, 4.51797), (1.00735, 2.45011)]


def check_identities(res):
    assert abs(res.e_total - (res.t_kin + res.v_ne + res.v_ee)) <= 1e-12 * abs(res.e_total)
    assert abs(res.e_total - (2 * res.e_one + res.e_coulomb)) <= 1e-12 * abs(res.e_total)
    assert res.virial_ratio == pytest.approx(-(res.v_ne + res.v_ee) / res.t_kin, rel=1e-15)


class TestLinearAlgebra:
    def test_orthogonalizer_identity(self):
        assert np.allclose(canonical_orthogonalizer(np.eye(3)) @ np.ones(3), np.ones(3))
        X = canonical_orthogonalizer(np.eye(3))
        assert np.allclose(np.abs(X), np.eye(3)[:, np.argmax(np.abs(X), axis=0)])

    def test_orthogonalizer_two_by_two(self):
        S = np.array([[1.0, 0.866], [0.866, 1.0]])
        X = canonical_orthogonalizer(S)
        assert np.abs(X.T @ S @ X - np.eye(2)).max() < 1e-13

    def test_orthogonalizer_drops_duplicate(self):
        tab = assemble_tables(build_basis(BasisSpec.double_zeta([(1.0, 1.5), (1.0, 1.5)])), 2.0)
        assert canonical_orthogonalizer(tab.S).shape == (2, 1)

    def test_orthogonalizer_all_dropped(self):
        with pytest.raises(DegenerateBasisError):
            canonical_orthogonalizer(np.full((2, 2), 1e-12))

    def test_eigensolve(self):
        w, v = symmetric_eigensolve(np.diag([2.0, -3.0]))
        assert np.array_equal(w, [-3.0, 2.0])
        w, _ = symmetric_eigensolve([[0.0, 1.0], [1.0, 0.0]])
        assert np.allclose(w, [-1.0, 1.0])
        with pytest.raises(DomainError):
            symmetric_eigensolve(np.ones(3))

    def test_fock_with_empty_density(self):
        tab = tables_for(BasisSpec.single_zeta(3, 1.0, 1.7), 2.0)
        F = build_fock(tab.h, np.zeros((3, 3)), tab.eri)
        assert np.allclose(F, tab.h, rtol=0, atol=1e-15)
        with pytest.raises(DomainError):
            build_fock(tab.h, np.zeros((2, 2)), tab.eri)

    def test_closed_shell_fock_is_half_coulomb(self):
        # one doubly occupied orbital: K(P) = J(P) on that orbital, so F c = (h + J/2) c
        tab = tables_for(BasisSpec.single_zeta(4, 0.98, 1.9), 2.0)
        res = scf_solve(AtomSystem(2.0), tab)
        J, K = coulomb_exchange(res.density, tab.eri)
        c = res.coefficients[:, 0]
        assert np.allclose(J @ c, K @ c, atol=1e-12)


class TestSolve:
    def test_single_function_closed_form(self):
        res = single_zeta_energy(2.0, 1, 1.0, 1.6875)
        assert res.converged and res.iterations == 1
        assert res.e_total == pytest.approx(-2.84765625, abs=1e-13)
        zeta = 1.6875
        assert res.e_total == pytest.approx(2 * (zeta**2 / 2 - 2 * zeta) + 5 * zeta / 8, abs=1e-14)
        assert res.virial_ratio == pytest.approx(2.0, abs=1e-14)
        check_identities(res)

    def test_fractional_single_function(self):
        res = single_zeta_energy(2.0, 1, 0.9550574100, 1.6117247267)
        assert res.e_total == pytest.approx(-2.854208497026459, abs=1e-12)

    def test_carbon_single_function(self):
        res = single_zeta_energy(6.0, 1, 1.0, 5.6875)
        assert res.e_total == pytest.approx(-32.34765625, abs=1e-12)

    def test_double_zeta_virials(self):
        he = double_zeta_energy(2.0, HE_DZ)
        assert he.virial_ratio == pytest.approx(2.000000335764544, abs=1e-6)
        li = double_zeta_energy(3.0, LI_DZ)
        assert li.virial_ratio == pytest.approx(1.999999139644960, abs=1e-6)
        check_identities(he)
        check_identities(li)

    def test_q13_integer(self):
        res = single_zeta_energy(2.0, 13, 1.0, 2.6089940744)
        # 30-digit reference computed independently at this exponent
        assert res.e_total == pytest.approx(-2.861679995536816455, abs=1e-11)

    def test_q13_free(self):
        res = single_zeta_energy(2.0, 13, 1.0000057480, 2.6089959701)
        assert res.e_total == pytest.approx(-2.861679995547598355, abs=1e-11)

    def test_orbital_sign_convention(self):
        res = single_zeta_energy(2.0, 5, 1.0, 1.9665442246)
        c = res.coefficients[:, 0]
        assert c[np.argmax(np.abs(c))] > 0
        assert res.orbital_energy == res.eigenvalues[0]

    def test_max_iter_exhausted(self):
        res = single_zeta_energy(2.0, 5, 1.0, 1.9665442246, settings=ScfSettings(max_iter=1))
        assert not res.converged and res.iterations == 1

    def test_damping_reaches_same_energy(self):
        spec = BasisSpec.single_zeta(7, 1.0003669189, 1.8074534011)
        plain = solve_basis(spec, 2.0)
        damped = solve_basis(spec, 2.0, ScfSettings(damping=0.3))
        assert plain.converged and damped.converged
        assert damped.e_total == pytest.approx(plain.e_total, abs=1e-13)

    @settings(max_examples=15)
    @given(
        st.integers(min_value=1, max_value=9),
        st.floats(min_value=0.7, max_value=1.3),
        st.floats(min_value=1.0, max_value=3.5),
    )
    def test_alpha_invariance(self, q, nu, zeta):
        e0 = single_zeta_energy(2.0, q, nu, zeta, alpha=0.0).e_total
        e1 = single_zeta_energy(2.0, q, nu, zeta, alpha=1.0).e_total
        assert abs(e0 - e1) <= 1e-10

    @settings(max_examples=20)
    @given(
        st.integers(min_value=1, max_value=13),
        st.floats(min_value=0.6, max_value=1.4),
        st.floats(min_value=0.5, max_value=5.0),
    )
    def test_variational_bound_and_identities(self, q, nu, zeta):
        res = single_zeta_energy(2.0, q, nu, zeta)
        assert res.converged
        assert res.e_total >= HF_LIMIT_HE - 1e-12
        check_identities(res)

    def test_wrong_charge(self):
        tab = tables_for(BasisSpec.single_zeta(1, 1.0, 1.0), 2.0)
        with pytest.raises(DomainError):
            scf_solve(AtomSystem(3.0), tab)


class TestSpectrum:
    def test_hydrogenic_single(self):
        for Z in (1.0, 2.0, 5.0):
            tab = tables_for(BasisSpec.single_zeta(1, 1.0, Z), Z)
            assert one_electron_spectrum(tab)[0] == pytest.approx(-Z * Z / 2, rel=1e-14)

    def test_hydrogen_in_span(self):
        tab = tables_for(BasisSpec.single_zeta(10, 1.0, 1.0), 1.0)
        assert one_electron_spectrum(tab)[0] == pytest.approx(-0.5, abs=1e-10)

    @pytest.mark.parametrize(
        "nu, zeta, gap",
        # gaps from a 50-digit Rayleigh-Ritz over the monomials r^(nu-1+k) e^(-zeta r)
        [(0.9, 0.7, 1.5292439093867859e-3), (1.0, 0.7, 8.7948983975039e-14)],
    )
    def test_hydrogen_off_span(self, nu, zeta, gap):
        tab = tables_for(BasisSpec.single_zeta(10, nu, zeta), 1.0)
        e = one_electron_spectrum(tab)[0]
        assert e >= -0.5 - 1e-14
        assert e + 0.5 == pytest.approx(gap, abs=1e-13)


class TestValidation:
    def test_settings(self):
        for kwargs in ({"max_iter": 0}, {"tol_energy": 0.0}, {"damping": 1.0}, {"lindep_threshold": -1}):
            with pytest.raises(ValueError):
                ScfSettings(**kwargs)

    def test_system(self):
        with pytest.raises(DomainError):
            AtomSystem(0.0)
        with pytest.raises(DomainError):
            AtomSystem(2.0, n_electrons=3)

    def test_eigensolver_budget(self, monkeypatch):
        from bhetoscf import scf

        monkeypatch.setattr(scf.kernels, "jacobi_eigh", lambda a: (np.zeros(len(a)), np.eye(len(a)), -1))
        with pytest.raises(ConvergenceError):
            symmetric_eigensolve(np.eye(2))

    def test_decomposition_dict(self):
        tab = tables_for(BasisSpec.single_zeta(1, 1.0, 1.6875), 2.0)
        P = np.array([[2.0]])
        parts = energy_decomposition(P, tab)
        assert set(parts) == {"t_kin", "v_ne", "v_ee", "virial_ratio"}
        assert parts["v_ee"] == pytest.approx(5 * 1.6875 / 8)
        assert isinstance(tab, IntegralTables)
