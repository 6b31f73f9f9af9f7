import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grreduce.errors import NotDecomposable, StepTooSmall
from grreduce.moment import hamiltonian_field
from grreduce.plucker import (
    FORM_SCALE,
    PluckerLine,
    PluckerTangent,
    dimension_from_length,
    gauge_project,
    line_from_plucker,
    line_tangent,
    minors,
    pair_list,
    plucker_from_line,
    plucker_residual,
    relation_differential_residual,
    symplectic_form,
    tangent_from_curve,
)
from grreduce.projective import ProjectiveSubspace, random_line

from oracles import minors_loop

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(min_value=2, max_value=6)

CORRUPT = np.array([1, 0, 0, 0, 0, 1]) / np.sqrt(2)


def span(*cols):
    return ProjectiveSubspace.from_basis(np.array(cols, dtype=complex).T)


def random_tangent(w, rng):
    xi = rng.standard_normal(w.w.size) + 1j * rng.standard_normal(w.w.size)
    return gauge_project(w, xi)


def test_pair_order_lexicographic():
    assert pair_list(3) == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


@pytest.mark.parametrize("n", range(1, 9))
def test_dimension_from_length_inverts(n):
    assert dimension_from_length(len(pair_list(n))) == n


def test_dimension_from_length_rejects():
    with pytest.raises(ValueError):
        dimension_from_length(5)


class TestFromLine:
    def test_coordinate_line(self):
        w = plucker_from_line(span([1, 0, 0, 0], [0, 1, 0, 0]))
        expected = np.zeros(6)
        expected[0] = 1
        assert abs(abs(np.vdot(expected, w.w)) - 1) < 1e-15

    def test_hand_minors(self):
        u, v = np.array([1, 0, 1, 0]), np.array([0, 1, 0, 1])
        oracle = minors_loop(u, v)
        assert np.array_equal(oracle.real, [1, 0, 1, -1, 0, 1])
        w = plucker_from_line(span(u, v))
        assert abs(abs(np.vdot(oracle / np.linalg.norm(oracle), w.w)) - 1) < 1e-14

    def test_swap_basis_flips_sign(self):
        u, v = np.array([1, 2j, 0, 1]), np.array([0, 1, 3, 1j])
        assert np.allclose(minors(u, v), -minors(v, u))
        a, b = PluckerLine(minors(u, v)), PluckerLine(minors(v, u))
        assert abs(a.overlap(b) - 1) < 1e-15

    @given(dims, seeds)
    def test_matches_loop_oracle(self, n, seed):
        rng = np.random.default_rng(seed)
        u = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
        v = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
        assert np.allclose(minors(u, v), minors_loop(u, v), atol=1e-13)

    @given(dims, seeds)
    def test_outputs_satisfy_relations(self, n, seed):
        assert plucker_residual(plucker_from_line(random_line(n, seed))) < 1e-12

    def test_coord_antisymmetric(self):
        w = plucker_from_line(random_line(4, 1))
        assert w.coord(3, 1) == -w.coord(1, 3)
        assert w.coord(2, 2) == 0

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            PluckerLine(np.zeros(6))


class TestToLine:
    def test_coordinate_line(self):
        w = np.zeros(6)
        w[0] = 1
        assert line_from_plucker(w).same_as(span([1, 0, 0, 0], [0, 1, 0, 0]))

    def test_round_trip(self):
        rng = np.random.default_rng(7)
        worst = 0.0
        for n in (3, 4, 5, 6):
            for _ in range(250):
                line = random_line(n, rng)
                worst = max(worst, line_from_plucker(plucker_from_line(line)).angle(line))
        assert worst < 1e-9

    def test_not_decomposable(self):
        with pytest.raises(NotDecomposable):
            line_from_plucker(PluckerLine(CORRUPT))


class TestResidual:
    def test_hand_example(self):
        assert plucker_residual(np.array([1, 0, 1, -1, 0, 1])) < 1e-15

    def test_corrupt(self):
        assert abs(plucker_residual(CORRUPT) - 0.5) < 1e-15

    def test_small_n_has_no_relations(self):
        assert plucker_residual(np.array([1, 2, 3])) == 0.0


class TestForm:
    @given(dims, seeds)
    def test_antisymmetric(self, n, seed):
        rng = np.random.default_rng(seed)
        w = plucker_from_line(random_line(n, rng))
        a, b = random_tangent(w, rng), random_tangent(w, rng)
        assert abs(symplectic_form(w, a, a)) < 1e-15
        assert abs(symplectic_form(w, a, b) + symplectic_form(w, b, a)) < 1e-14

    @given(dims, seeds)
    def test_complex_structure_pairing(self, n, seed):
        # The scale is fixed by the Hamiltonian convention of the torus flows;
        # with it the pairing of a and i*a is FORM_SCALE * |a|^2, negative.
        rng = np.random.default_rng(seed)
        w = plucker_from_line(random_line(n, rng))
        a = random_tangent(w, rng)
        val = symplectic_form(w, a, a.rotate())
        assert abs(val - FORM_SCALE * a.norm**2) < 1e-12 * a.norm**2
        assert abs(val) > 0.1 * a.norm**2

    def test_gauge_component_ignored(self):
        rng = np.random.default_rng(1)
        w = plucker_from_line(random_line(3, rng))
        a, b = random_tangent(w, rng), random_tangent(w, rng)
        shifted = PluckerTangent(a.xi + (0.3 + 2j) * w.w)
        assert abs(symplectic_form(w, shifted, b) - symplectic_form(w, a, b)) < 1e-14

    def test_hamiltonian_identity_fixes_scale(self):
        # omega(X_0, Y) = d mu_0(Y), with d mu_0 from a central difference.
        rng = np.random.default_rng(5)
        line = random_line(3, rng)
        du, dv = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
        w, y = line_tangent(line, du, dv)
        u, v = line.basis[:, 0], line.basis[:, 1]
        h = 1e-5

        def mu0(t):
            m = minors(u + t * du, v + t * dv)
            return (np.sum(np.abs(m[:3]) ** 2)) / np.sum(np.abs(m) ** 2)

        fd = (mu0(h) - mu0(-h)) / (2 * h)
        x = hamiltonian_field(w, 0)
        assert abs(symplectic_form(w, x, y) - fd) < 1e-8


class TestTangent:
    def test_constant_family(self):
        line = random_line(3, 2)
        _, t = tangent_from_curve(lambda t: line, 0.0, 1e-4)
        assert t.norm < 1e-10

    @staticmethod
    def _analytic(t0):
        # w(t) = (1, 0, 0, -t, 0, 0) / sqrt(1 + t^2); derivative of the unit vector.
        s = 1 + t0**2
        d = np.zeros(6, dtype=complex)
        d[0] = -t0 / s**1.5
        d[3] = -1 / s**0.5 + t0**2 / s**1.5
        return d

    def _error(self, h, t0=0.3):
        family = lambda t: span([1, 0, t, 0], [0, 1, 0, 0])
        w, tan = tangent_from_curve(family, t0, h)
        exact = gauge_project(w, self._analytic(t0)).xi
        return np.linalg.norm(tan.xi - exact), tan

    def test_matches_analytic_minor_derivative(self):
        err, tan = self._error(1e-4)
        assert err < 1e-8
        support = np.abs(tan.xi) > 1e-12
        assert set(np.flatnonzero(support)) <= {0, 3}

    def test_second_order(self):
        e1, _ = self._error(1e-2)
        e2, _ = self._error(5e-3)
        assert 3.5 < e1 / e2 < 4.5

    def test_step_too_small(self):
        with pytest.raises(StepTooSmall):
            tangent_from_curve(lambda t: random_line(3, 1), 0.0, 1e-9)

    def test_exact_tangent_satisfies_linearized_relations(self):
        rng = np.random.default_rng(3)
        line = random_line(5, rng)
        du, dv = rng.standard_normal((2, 6)) + 1j * rng.standard_normal((2, 6))
        w, t = line_tangent(line, du, dv)
        assert relation_differential_residual(w, t) < 1e-13
