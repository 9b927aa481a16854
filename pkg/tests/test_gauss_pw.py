"""Hermite-Gaussian momentum machinery, certified cutoffs, axis trains.

Every derived quantity is checked against an oracle built from a different
route: coefficient tables, trapezoid quadrature, brute-force lattice sums,
or a dense reference state.
"""

import math

import numpy as np
import pytest

from ttprep import tt_core
from ttprep.gauss_pw import (MAX_ANGULAR_MOMENTUM, MAX_HERMITE_ORDER,
                             MONOMIAL_DEGREE_MAX, ChebyshevInterpolant,
                             PlaneWaveGrid, PrimitiveGaussian, Projection1D,
                             ProjectionError, chebyshev_fit, choose_cutoff,
                             choose_degree, h_coeffs, hermite_gaussian,
                             hermite_poly, primitive_1d_mps, primitive_3d_mps,
                             projection_normalization, pw_overlap)
from ttprep.tt_core import CapacityError

from conftest import dense, trace_distance_nonunit

# physicists' Hermite polynomials, straight from the printed table
HERMITE_TABLE = {
    0: [1.0],
    1: [0.0, 2.0],
    2: [-2.0, 0.0, 4.0],
    3: [0.0, -12.0, 0.0, 8.0],
    4: [12.0, 0.0, -48.0, 0.0, 16.0],
    5: [0.0, 120.0, 0.0, -160.0, 0.0, 32.0],
}


def psi_ref(n, x):
    """Hermite function from the table, valid for n <= 5."""
    h = np.polynomial.polynomial.polyval(x, HERMITE_TABLE[n])
    norm = math.pi ** 0.25 * math.sqrt(2.0 ** n * math.factorial(n))
    return h * np.exp(-np.asarray(x, dtype=float) ** 2 / 2.0) / norm


def overlap_quadrature(gamma, l, a, k, L, n_pts=4000, half=12.0):
    """Trapezoid value of (1/sqrt(L)) int g(x-a) exp(ikx) dx."""
    c = (2.0 ** l * (2.0 * gamma) ** (l / 2 + 0.25)
         * math.sqrt(math.factorial(l))
         / (math.pi ** 0.25 * math.sqrt(math.factorial(2 * l))))
    x = np.linspace(a - half, a + half, n_pts)
    g = c * (x - a) ** l * np.exp(-gamma * (x - a) ** 2)
    f = g * np.exp(1j * k * x) / math.sqrt(L)
    return complex(np.trapezoid(f, x))


class TestHermite:
    def test_poly_matches_table(self):
        x = np.linspace(-3.0, 3.0, 11)
        for n, coeffs in HERMITE_TABLE.items():
            want = np.polynomial.polynomial.polyval(x, coeffs)
            got = hermite_poly(n, x)
            assert np.abs(got - want).max() < 1e-10 * max(
                1.0, np.abs(want).max())

    def test_h5_spot_value(self):
        assert hermite_poly(5, 0.7) == pytest.approx(34.49824, abs=1e-10)

    def test_gaussian_quadrature_norm(self):
        x = np.linspace(-12.0, 12.0, 2000)
        p3 = hermite_gaussian(3, x)
        assert abs(np.trapezoid(p3 * p3, x) - 1.0) < 1e-8
        assert abs(np.trapezoid(p3 * hermite_gaussian(1, x), x)) < 1e-8

    def test_gaussian_matches_table(self):
        x = np.linspace(-4.0, 4.0, 17)
        for n in range(6):
            assert np.abs(hermite_gaussian(n, x) - psi_ref(n, x)).max() < 1e-12

    def test_amplitude_bound(self):
        # sup_x |psi_n(x)| <= pi^(-1/4) for every order
        x = np.linspace(-15.0, 15.0, 4001)
        for n in (0, 5, 17, MAX_HERMITE_ORDER):
            assert np.abs(hermite_gaussian(n, x)).max() <= (
                math.pi ** -0.25 + 1e-12)

    def test_order_guard(self):
        with pytest.raises(ValueError):
            hermite_poly(MAX_HERMITE_ORDER + 1, 0.0)
        with pytest.raises(ValueError):
            hermite_gaussian(-1, 0.0)


class TestHermiteExpansion:
    def test_monomial_reconstruction(self):
        l = 4
        exp = h_coeffs(l)
        x = np.linspace(-3.5, 3.5, 20)
        target = (x ** l * np.exp(-x ** 2 / 2.0)
                  / math.sqrt(math.sqrt(math.pi) * math.factorial(2 * l)
                              / (4.0 ** l * math.factorial(l))))
        got = sum(exp.h[n] * hermite_gaussian(n, x) for n in range(l + 1))
        assert np.abs(got - target).max() < 1e-10

    def test_unit_norm_and_parity(self):
        for l in range(MAX_ANGULAR_MOMENTUM + 1):
            h = h_coeffs(l).h
            assert abs(np.sum(h * h) - 1.0) < 1e-12
            for n in range(l + 1):
                if (l - n) % 2 == 1:
                    assert h[n] == 0.0

    def test_guard(self):
        with pytest.raises(ValueError):
            h_coeffs(MAX_ANGULAR_MOMENTUM + 1)


class TestPwOverlap:
    def test_s_type_closed_form(self):
        got = pw_overlap(1.0, 0, 0.0, 0.0, 10.0)
        want = (2.0 * math.pi) ** 0.25 / math.sqrt(10.0)
        assert got == pytest.approx(want, abs=1e-12)

    @pytest.mark.parametrize("gamma,l,a", [
        (1.0, 0, 0.0), (0.6, 1, 0.0), (1.7, 2, 1.2), (1.0, 3, -0.8),
    ])
    def test_quadrature_agreement(self, gamma, l, a):
        for k in (0.0, 0.7, -1.9, 3.3):
            got = pw_overlap(gamma, l, a, k, 10.0)
            want = overlap_quadrature(gamma, l, a, k, 10.0)
            assert abs(got - want) < 1e-8

    def test_odd_symmetry_zero(self):
        assert abs(pw_overlap(1.0, 1, 0.0, 0.0, 10.0)) < 1e-15

    def test_translation_is_pure_phase(self):
        k = np.linspace(-4.0, 4.0, 9)
        base = pw_overlap(0.9, 2, 0.0, k, 12.0)
        shifted = pw_overlap(0.9, 2, 3.0, k, 12.0)
        assert np.abs(shifted - np.exp(1j * k * 3.0) * base).max() < 1e-12

    def test_array_shape_and_scalar(self):
        k = np.linspace(-2, 2, 5).reshape(5, 1)
        out = pw_overlap(1.0, 0, 0.0, k, 10.0)
        assert out.shape == (5, 1)
        assert isinstance(pw_overlap(1.0, 0, 0.0, 0.3, 10.0), complex)

    def test_domain_guards(self):
        with pytest.raises(ValueError):
            pw_overlap(0.0, 0, 0.0, 0.0, 10.0)
        with pytest.raises(ValueError):
            pw_overlap(1.0, 0, 0.0, 0.0, 0.0)


class TestCutoffAndDegree:
    def test_cutoff_regression(self):
        assert choose_cutoff(1.0, 0, 30.0, 1e-2) == pytest.approx(
            10.775893433304358, rel=1e-12)

    def test_cutoff_formula_retype(self):
        gamma, l, L, eps = 2.0, 3, 25.0, 1e-3
        bracket = (2.0 * math.log(2.0 / eps) + math.log(45.0)
                   + math.log(1.0 + 2.0 * math.sqrt(math.pi)
                              / (L * math.sqrt(gamma)))
                   + l * math.log(4.0 * l))
        want = 2.0 * math.sqrt(2.0 * gamma) * math.sqrt(bracket)
        assert choose_cutoff(gamma, l, L, eps) == pytest.approx(
            want, rel=1e-14)

    def test_quadrupled_width_nearly_doubles_cutoff(self):
        r30 = choose_cutoff(4.0, 0, 30.0, 1e-2) / choose_cutoff(
            1.0, 0, 30.0, 1e-2)
        assert r30 == pytest.approx(1.9962565419157643, rel=1e-12)
        assert abs(r30 - 2.0) < 0.02
        # the width-dependent term dies off as the cell grows
        r_big = choose_cutoff(4.0, 0, 1e9, 1e-2) / choose_cutoff(
            1.0, 0, 1e9, 1e-2)
        assert abs(r_big - 2.0) < 1e-6

    def test_cutoff_monotone_in_eps(self):
        ks = [choose_cutoff(1.0, 0, 30.0, e) for e in (1e-1, 1e-2, 1e-3)]
        assert ks[0] < ks[1] < ks[2]

    def test_degree_at_matched_cutoff(self):
        for gamma in (0.5, 1.0, 4.0):
            assert choose_degree(math.sqrt(2.0 * gamma), gamma) == 8

    def test_degree_formula(self):
        assert choose_degree(3.0, 1.0) == math.ceil(math.e ** 2 * 9.0 / 2.0)

    def test_degree_quadruples_when_cutoff_doubles(self):
        for k in (2.0, 5.0, 11.0):
            m = choose_degree(k, 1.0)
            m2 = choose_degree(2.0 * k, 1.0)
            assert 4 * m - 3 <= m2 <= 4 * m

    def test_degree_at_least_two_for_certified_cutoffs(self):
        for gamma in (0.25, 1.0, 4.0):
            for l in (0, 1, 2):
                for eps in (1e-2, 1e-3):
                    k = choose_cutoff(gamma, l, 30.0, eps)
                    assert choose_degree(k, gamma) >= 2

    def test_guards(self):
        with pytest.raises(ValueError):
            choose_cutoff(1.0, 0, 30.0, 1.5)
        with pytest.raises(ValueError):
            choose_degree(0.0, 1.0)


class TestChebyshev:
    def test_nodes_match_first_kind_family(self):
        m = 9
        interp = ChebyshevInterpolant.fit(lambda t: t, 2.0, m)
        i = np.arange(m)
        want = 2.0 * np.cos((2.0 * i + 1.0) * math.pi / (2.0 * m + 2.0))
        assert np.abs(interp.nodes - want).max() < 1e-14

    def test_exact_at_nodes(self):
        interp = ChebyshevInterpolant.fit(
            lambda t: math.sin(t) + t ** 2, 3.0, 12)
        got = interp(interp.nodes)
        assert np.abs(got - interp.values).max() < 1e-14

    def test_reproduces_low_degree_polynomials(self):
        # degree m-1 interpolation is exact on degree <= m-1 inputs
        interp = ChebyshevInterpolant.fit(
            lambda t: 2.0 * t ** 3 - t + 0.5, 2.0, 4)
        x = np.linspace(-2.0, 2.0, 41)
        want = 2.0 * x ** 3 - x + 0.5
        assert np.abs(interp(x) - want).max() < 1e-12

    def test_certified_scan_small_m(self):
        # n=0, C=2: the node-count condition asks for m >= 18.63
        m, c = 19, 2.0
        interp = ChebyshevInterpolant.fit(
            lambda t: hermite_gaussian(0, t), c, m)
        x = np.linspace(-c, c, 2001)
        err = np.abs(interp(x) - hermite_gaussian(0, x)).max()
        assert err <= 0.5 ** (m / 2.0)

    def test_monomial_fit_float64_path(self):
        m, c = 19, 2.0
        p = chebyshev_fit(0, c, m)
        assert p.degree == m - 1
        x = np.linspace(-c, c, 2001)
        err = np.abs(np.real(p(x)) - hermite_gaussian(0, x)).max()
        assert err <= 0.5 ** (m / 2.0)

    def test_monomial_fit_extended_path(self):
        # degree 31 exceeds the float64 guard and runs in 60-digit arithmetic
        m, c = 32, 2.0
        p = chebyshev_fit(0, c, m)
        x = np.linspace(-c, c, 1001)
        err = np.abs(np.real(p(x)) - hermite_gaussian(0, x)).max()
        assert err <= 0.5 ** (m / 2.0)

    def test_wide_window_scan(self):
        p = chebyshev_fit(0, 4.0, 40)
        x = np.linspace(-4.0, 4.0, 2001)
        assert np.abs(np.real(p(x)) - hermite_gaussian(0, x)).max() < 1e-6

    def test_interpolation_property(self):
        m, c, n = 24, 3.0, 2
        p = chebyshev_fit(n, c, m)
        i = np.arange(m)
        nodes = c * np.cos((2.0 * i + 1.0) * math.pi / (2.0 * m + 2.0))
        assert np.abs(np.real(p(nodes))
                      - hermite_gaussian(n, nodes)).max() < 1e-10

    def test_excited_state_certified_scan(self):
        # n=2 on [-3,3]: both node-count conditions hold at m=47 for 1e-3
        n, c, m = 2, 3.0, 47
        ec = math.e * c / math.sqrt(2.0)
        assert m >= ec * (ec + math.sqrt(2.0 * n + 1.0))
        assert m >= 2.0 * math.log(1e3) / math.log(2.0)
        p = chebyshev_fit(n, c, m)
        x = np.linspace(-c, c, 2001)
        assert np.abs(np.real(p(x)) - hermite_gaussian(n, x)).max() <= 1e-3

    def test_guards(self):
        with pytest.raises(ValueError):
            chebyshev_fit(0, 2.0, MONOMIAL_DEGREE_MAX + 2)
        with pytest.raises(ValueError):
            ChebyshevInterpolant.fit(lambda t: t, -1.0, 5)
        with pytest.raises(ValueError):
            ChebyshevInterpolant.fit(lambda t: t, 1.0, 0)


def lattice_weights(gamma, l, L, i_max):
    dk = 2.0 * math.pi / L
    idx = np.arange(-i_max, i_max + 1)
    return idx, np.abs(pw_overlap(gamma, l, 0.0, idx * dk, L)) ** 2


def whole_line_reference(gamma, l, a, grid):
    """Dense unit-or-less reference over the grid's axis codewords.

    Normalizes by the whole-line lattice weight, so weight the grid cannot
    represent shows up as missing norm and is charged to the distance.
    """
    dk = grid.dk
    i_far = int(math.ceil((grid.K + 14.0 * math.sqrt(2.0 * gamma)) / dk))
    idx, w = lattice_weights(gamma, l, grid.L, i_far)
    total = float(np.sum(w))
    sgrid = grid.axis_grid()
    ref = np.zeros(2 ** sgrid.n_sites, dtype=complex)
    for i in sgrid.index_values():
        ref[sgrid.dense_index(int(i))] = pw_overlap(
            gamma, l, a, int(i) * dk, grid.L)
    return ref / math.sqrt(total)


class TestProjection1D:
    def test_n_t_window_validation(self):
        with pytest.raises(ValueError):
            Projection1D(k_values=np.zeros(1), coeffs=np.ones(1),
                         n_tilde=1.0, n_t=0.0, cutoff=1.0, degree=3)
        with pytest.raises(ValueError):
            Projection1D(k_values=np.zeros(1), coeffs=np.ones(1),
                         n_tilde=1.0, n_t=1.2, cutoff=1.0, degree=3)

    @pytest.mark.parametrize("gamma,l,eps", [
        (1.0, 0, 1e-2), (0.25, 2, 1e-3), (4.0, 1, 1e-2),
    ])
    def test_certified_tail_and_norm(self, gamma, l, eps):
        L = 30.0
        grid = PlaneWaveGrid(L=L, K=choose_cutoff(gamma, l, L, eps))
        _, proj = primitive_1d_mps(gamma, l, 0.0, grid, eps)

        # independent lattice sums
        dk = grid.dk
        i_cut = int(round(proj.cutoff / dk))
        i_far = int(math.ceil((proj.cutoff + 14.0 * math.sqrt(
            2.0 * gamma)) / dk))
        idx, w = lattice_weights(gamma, l, L, i_far)
        total = float(np.sum(w))
        inside = float(np.sum(w[np.abs(idx) <= i_cut]))

        assert proj.n_tilde == pytest.approx(math.sqrt(total), rel=1e-10)
        assert proj.n_tilde >= 2.0 / 3.0
        n_t_ref = min(math.sqrt(inside) / math.sqrt(total), 1.0)
        assert proj.n_t == pytest.approx(n_t_ref, rel=1e-10)

        # discarded momentum weight within the certified budget
        tail = 1.0 - inside / total
        assert tail <= eps ** 2 + 1e-15
        assert 1.0 - eps <= proj.n_t <= 1.0 + 1e-12

        # the kept cutoff satisfies the certified-momentum inequality
        # rebuilt here from scratch (log 20 variant with the measured norm)
        bracket = (2.0 * math.log(1.0 / eps) + math.log(20.0)
                   + math.log(1.0 + 2.0 * math.sqrt(math.pi)
                              / (L * math.sqrt(gamma)))
                   - math.log(proj.n_tilde ** 2)
                   + (l * math.log(4.0 * l) if l else 0.0))
        assert proj.cutoff >= 2.0 * math.sqrt(2.0 * gamma) * math.sqrt(
            bracket)


class TestPrimitive1D:
    @pytest.mark.parametrize("gamma,l,a,eps", [
        (1.0, 0, 0.0, 1e-3), (1.0, 0, 0.7, 1e-3), (1.0, 1, 0.0, 1e-2),
        (0.25, 2, -1.3, 1e-2),
    ])
    def test_trace_distance_within_budget(self, gamma, l, a, eps):
        L = 30.0
        grid = PlaneWaveGrid(L=L, K=choose_cutoff(gamma, l, L, eps))
        tt, proj = primitive_1d_mps(gamma, l, a, grid, eps)
        assert abs(tt_core.norm(tt) - 1.0) < 1e-10
        ref = whole_line_reference(gamma, l, a, grid)
        assert trace_distance_nonunit(ref, dense(tt)) <= eps
        assert tt_core.max_bond_dim(tt) <= 2 * (proj.degree + 1) + 3

    def test_translation_bond_growth_is_bounded(self):
        gamma, l, eps, L = 1.0, 0, 1e-3, 30.0
        grid = PlaneWaveGrid(L=L, K=choose_cutoff(gamma, l, L, eps))
        t0, proj = primitive_1d_mps(gamma, l, 0.0, grid, eps)
        t1, _ = primitive_1d_mps(gamma, l, 0.7, grid, eps)
        assert tt_core.max_bond_dim(t1) <= 2 * tt_core.max_bond_dim(t0)
        assert tt_core.max_bond_dim(t1) <= 2 * (proj.degree + 1) + 3

    def test_capacity_guard(self):
        grid = PlaneWaveGrid(L=30.0, K=900.0)
        assert grid.qubits_per_axis > 12
        with pytest.raises(CapacityError):
            primitive_1d_mps(1.0, 0, 0.0, grid, 1e-2)

    def test_tiny_cell_rejected(self):
        # L = 0.5 puts every lattice point outside psi_1's support
        with pytest.raises(ProjectionError):
            primitive_1d_mps(1.0, 1, 0.0, PlaneWaveGrid(L=0.5, K=13.0), 1e-2)

    def test_eps_guard(self):
        grid = PlaneWaveGrid(L=30.0, K=11.0)
        with pytest.raises(ValueError):
            primitive_1d_mps(1.0, 0, 0.0, grid, 0.0)


class TestPrimitive3D:
    def test_s_type_norm_and_distance(self):
        gamma, eps, L = 1.0, 1e-2, 12.0
        k = choose_cutoff(gamma, 0, L, eps / math.sqrt(3.0))
        grid = PlaneWaveGrid(L=L, K=k)
        g = PrimitiveGaussian(center=(0.0, 0.0, 0.0), gamma=gamma,
                              ang=(0, 0, 0))
        tt = primitive_3d_mps(g, grid, eps)
        assert len(tt.cores) == 3 * grid.qubits_per_axis
        assert abs(tt_core.norm(tt) - 1.0) < 1e-10

        axis_ref = whole_line_reference(gamma, 0, 0.0, grid)
        ref = np.kron(np.kron(axis_ref, axis_ref), axis_ref)
        assert trace_distance_nonunit(ref, dense(tt)) <= eps

    def test_p_type_distance(self):
        gamma, eps, L = 1.0, 1e-2, 12.0
        k = choose_cutoff(gamma, 1, L, eps / math.sqrt(3.0))
        grid = PlaneWaveGrid(L=L, K=k)
        g = PrimitiveGaussian(center=(0.4, 0.0, -0.2), gamma=gamma,
                              ang=(1, 0, 0))
        tt = primitive_3d_mps(g, grid, eps)
        rx = whole_line_reference(gamma, 1, 0.4, grid)
        ry = whole_line_reference(gamma, 0, 0.0, grid)
        rz = whole_line_reference(gamma, 0, -0.2, grid)
        ref = np.kron(np.kron(rx, ry), rz)
        assert trace_distance_nonunit(ref, dense(tt)) <= eps

    def test_connecting_bonds_are_one(self):
        gamma, eps, L = 1.0, 1e-1, 12.0
        grid = PlaneWaveGrid(L=L, K=choose_cutoff(gamma, 0, L, eps / 2.0))
        g = PrimitiveGaussian(center=(0.0, 0.0, 0.0), gamma=gamma,
                              ang=(0, 0, 0))
        tt = primitive_3d_mps(g, grid, eps)
        q = grid.qubits_per_axis
        assert tt.bond_dims[q - 1] == 1
        assert tt.bond_dims[2 * q - 1] == 1

    def test_symmetric_primitive_has_identical_axis_profiles(self):
        gamma, eps, L = 1.0, 1e-2, 12.0
        grid = PlaneWaveGrid(L=L, K=choose_cutoff(gamma, 0, L,
                                                  eps / math.sqrt(3.0)))
        g = PrimitiveGaussian(center=(0.0, 0.0, 0.0), gamma=gamma,
                              ang=(0, 0, 0))
        tt = primitive_3d_mps(g, grid, eps)
        q = grid.qubits_per_axis
        axis_x = tt.bond_dims[:q - 1]
        axis_y = tt.bond_dims[q:2 * q - 1]
        axis_z = tt.bond_dims[2 * q:]
        assert axis_x == axis_y == axis_z


class TestPlaneWaveGrid:
    def test_counts(self):
        grid = PlaneWaveGrid(L=30.0, K=3.0)
        assert grid.dk == pytest.approx(2.0 * math.pi / 30.0, rel=1e-15)
        assert grid.half_points == math.floor(3.0 * 30.0 / (2.0 * math.pi))
        assert grid.points_per_axis == 2 * grid.half_points + 1
        assert grid.points_per_axis % 2 == 1
        assert grid.qubits_per_axis == math.ceil(
            math.log2(grid.points_per_axis))
        assert grid.n_total == grid.points_per_axis ** 3

    def test_energy_cutoff_form(self):
        grid = PlaneWaveGrid.from_energy_cutoff(30.0, 2.0)
        assert grid.K == pytest.approx(2.0, rel=1e-15)
        assert grid == PlaneWaveGrid(L=30.0, K=grid.K)

    def test_axis_grid_layout(self):
        grid = PlaneWaveGrid(L=30.0, K=3.0)
        sg = grid.axis_grid()
        assert sg.n_points == grid.points_per_axis
        assert sg.a == pytest.approx(grid.half_points * grid.dk, rel=1e-15)
        assert sg.spacing == pytest.approx(grid.dk, rel=1e-12)

    def test_guards(self):
        with pytest.raises(ValueError):
            PlaneWaveGrid(L=-1.0, K=2.0)
        with pytest.raises(ValueError):
            PlaneWaveGrid(L=30.0, K=0.05)  # resolves no nonzero momentum
        with pytest.raises(ValueError):
            PlaneWaveGrid.from_energy_cutoff(30.0, 0.0)


class TestPrimitiveGaussian:
    def test_axis_norm_quadrature(self):
        g = PrimitiveGaussian(center=(0.0, 0.0, 0.0), gamma=0.8,
                              ang=(0, 2, 5))
        x = np.linspace(-14.0, 14.0, 20001)
        for axis in range(3):
            l = g.ang[axis]
            f = g.axis_norm_const(axis) * x ** l * np.exp(-g.gamma * x ** 2)
            assert abs(np.trapezoid(f * f, x) - 1.0) < 1e-10

    def test_validation(self):
        with pytest.raises(ValueError):
            PrimitiveGaussian(center=(0.0, 0.0), gamma=1.0, ang=(0, 0, 0))
        with pytest.raises(ValueError):
            PrimitiveGaussian(center=(0.0, 0.0, 0.0), gamma=-1.0,
                              ang=(0, 0, 0))
        with pytest.raises(ValueError):
            PrimitiveGaussian(center=(0.0, 0.0, 0.0), gamma=1.0,
                              ang=(0, 0, MAX_ANGULAR_MOMENTUM + 1))


def test_projection_normalization_near_one_for_wide_cell():
    # dense lattice: the Riemann sum of the spectral density is the norm
    assert projection_normalization(1.0, 0, 30.0) == pytest.approx(
        1.0, abs=1e-4)
