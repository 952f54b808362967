import numpy as np
import pytest

from laxkit import lattice as lat
from laxkit.laurent import LaurentSeries
from laxkit.rmatrix import r_matrix


def random_spectral_pair(rng, min_sep=0.1):
    while True:
        lam = complex(rng.normal(), rng.normal())
        mu = complex(rng.normal(), rng.normal())
        if abs(np.sinh(lam - mu)) > min_sep:
            return lam, mu


def zero_amplitude_state(n, v=None):
    z = np.zeros(n, dtype=complex)
    vv = np.ones(n, dtype=complex) if v is None else np.asarray(v, dtype=complex)
    return lat.LatticeState(z, z.copy(), vv)


class TestBuildLax:
    def test_zero_amplitude_site(self):
        s = zero_amplitude_state(3)
        m = lat.build_lax(s, 2)
        assert m[0, 0].coeffs == {1: 1.0, -1: -1.0}
        assert m[0, 1].is_zero()
        assert m[1, 0].is_zero()
        assert m[1, 1].coeffs == {-1: -1.0}

    def test_offdiagonal_entries_u_independent(self):
        rng = np.random.default_rng(10)
        for _ in range(10):
            s = lat.random_state(4, rng)
            m = lat.build_lax(s, 3)
            assert set(m[0, 1].coeffs) <= {0}
            assert set(m[1, 0].coeffs) <= {0}

    def test_determinant_matches_hand_expansion(self):
        rng = np.random.default_rng(11)
        s = lat.random_state(4, rng)
        j = 2
        a, abar, v = s.site(j)
        det = lat.build_lax(s, j).det
        # (u v - u^-1 v^-1)(-u^-1 v) - abar a = -v^2 - abar a + u^-2
        hand = LaurentSeries({0: -v * v - abar * a, -2: 1.0})
        for e in set(det.coeffs) | set(hand.coeffs):
            assert abs(det.coefficient(e) - hand.coefficient(e)) < 1e-14

    def test_singular_state_rejected(self):
        with pytest.raises(lat.SingularStateError):
            lat.LatticeState(np.zeros(2), np.zeros(2), np.array([1.0, 0.0]))


class TestMonodromy:
    def test_single_site(self):
        rng = np.random.default_rng(12)
        s = lat.random_state(1, rng)
        t = lat.monodromy(s)
        m = lat.build_lax(s, 1)
        for i in range(2):
            for j in range(2):
                assert t[i, j].coeffs == m[i, j].coeffs

    def test_zero_amplitude_closed_form(self):
        # all v = 1, a = abar = 0: tr T = (u - u^-1)^N + (-1)^N u^-N
        for n in (2, 3, 5):
            s = zero_amplitude_state(n)
            tr = lat.monodromy(s).trace
            expect = LaurentSeries({1: 1.0, -1: -1.0})
            acc = LaurentSeries.one()
            for _ in range(n):
                acc = acc * expect
            acc = acc + LaurentSeries({-n: (-1.0) ** n})
            for e in set(tr.coeffs) | set(acc.coeffs):
                assert abs(tr.coefficient(e) - acc.coefficient(e)) < 1e-13

    def test_leading_coefficient_is_product_of_v(self):
        rng = np.random.default_rng(13)
        for n in (2, 4, 6):
            s = lat.random_state(n, rng)
            tr = lat.monodromy(s).trace
            assert tr.degree == n
            assert abs(tr.coefficient(n) - np.prod(s.v)) < 1e-12 * abs(np.prod(s.v))

    def test_degree_span(self):
        rng = np.random.default_rng(14)
        s = lat.random_state(5, rng)
        t = lat.monodromy(s)
        exps = [e for i in range(2) for j in range(2) for e in t[i, j].coeffs]
        assert max(exps) == 5 and min(exps) == -5


class TestCharges:
    def test_zero_amplitude_values(self):
        for n in (2, 4):
            s = zero_amplitude_state(n)
            c0, c1, c2 = lat.charges_closed_form(s)
            assert abs(c0) < 1e-14
            assert c1 == 0
            assert abs(c2 + n) < 1e-14

    def test_order1_vanishes_on_trace(self):
        rng = np.random.default_rng(15)
        for _ in range(100):
            n = int(rng.integers(2, 7))
            s = lat.random_state(n, rng)
            _, cs = lat.charges_from_trace(s)
            c0 = cs[0]
            assert abs(cs[1]) <= 1e-12 * max(1.0, abs(c0))

    def test_order2_matches_closed_form(self):
        rng = np.random.default_rng(16)
        for n in range(2, 7):
            for _ in range(10):
                s = lat.random_state(n, rng)
                _, _, c2 = lat.charges_closed_form(s)
                _, cs = lat.charges_from_trace(s)
                assert abs(cs[2] - c2) <= 1e-12 * max(1.0, abs(c2))

    def test_order0_matches_product_through_exp(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            s = lat.random_state(4, rng)
            _, cs = lat.charges_from_trace(s)
            prod = np.prod(s.v)
            assert abs(np.exp(cs[0]) - prod) <= 1e-12 * abs(prod)

    def test_depth_validation(self):
        s = zero_amplitude_state(2)
        with pytest.raises(ValueError):
            lat.charges_from_trace(s, depth=1)


class TestPoissonBracket:
    def test_cross_site_vanishes(self):
        rng = np.random.default_rng(18)
        s = lat.random_state(4, rng)
        assert lat.poisson_bracket(("a", 1), ("a", 2), s) == 0
        assert lat.poisson_bracket(("a", 1), ("v", 3), s) == 0

    def test_table_value(self):
        s = zero_amplitude_state(3, v=[1.0, 1.0, 2.0])
        s = s.replace(a=np.array([0, 0, 0.7j]), a_bar=np.array([0, 0, 0.2]))
        assert abs(lat.poisson_bracket(("a", 3), ("a_bar", 3), s) - (-8.0)) < 1e-14

    def test_antisymmetry(self):
        rng = np.random.default_rng(19)
        s = lat.random_state(3, rng)
        for f in lat.FIELD_NAMES:
            for g in lat.FIELD_NAMES:
                lhs = lat.poisson_bracket((f, 1), (g, 1), s)
                rhs = lat.poisson_bracket((g, 1), (f, 1), s)
                assert abs(lhs + rhs) < 1e-14

    def test_unknown_field_rejected(self):
        s = zero_amplitude_state(2)
        with pytest.raises(ValueError):
            lat.poisson_bracket(("q", 1), ("v", 1), s)

    def test_jacobi_identity(self):
        # Composite brackets evaluated via the Leibniz rule on the table.
        rng = np.random.default_rng(20)

        def grad(name, a, abar, v):
            return {
                "a": {"a": 1.0},
                "a_bar": {"a_bar": 1.0},
                "v": {"v": 1.0},
                "av": {"a": v, "v": a},
                "abar_v": {"a_bar": v, "v": abar},
                "v2": {"v": 2.0 * v},
            }[name]

        def value(name, a, abar, v):
            return {
                "a": a, "a_bar": abar, "v": v,
                "av": a * v, "abar_v": abar * v, "v2": v * v,
            }[name]

        def bracket(fname, gname, a, abar, v):
            table = {k: r(a, abar, v) for k, r in lat._TABLE_RULES.items()}
            out = 0.0j
            for fa, fc in grad(fname, a, abar, v).items():
                for ga, gc in grad(gname, a, abar, v).items():
                    out += fc * gc * table.get((fa, ga), 0.0)
            return out

        # {f, {g, h}} with inner brackets given by the table composites
        inner = {("a", "v"): ("av", 1.0), ("v", "a"): ("av", -1.0),
                 ("a_bar", "v"): ("abar_v", -1.0), ("v", "a_bar"): ("abar_v", 1.0),
                 ("a", "a_bar"): ("v2", -2.0), ("a_bar", "a"): ("v2", 2.0)}

        for _ in range(20):
            s = lat.random_state(2, rng)
            a, abar, v = s.site(1)
            for f in ("a", "a_bar", "v"):
                for g in ("a", "a_bar", "v"):
                    for h in ("a", "a_bar", "v"):
                        total = 0.0j
                        for x, y, zz in ((f, g, h), (g, h, f), (h, f, g)):
                            comp = inner.get((y, zz))
                            if comp is not None:
                                name, scale = comp
                                total += scale * bracket(x, name, a, abar, v)
                        assert abs(total) < 1e-12


class TestQuadraticAlgebra:
    def test_residual_small_on_random_samples(self):
        rng = np.random.default_rng(21)
        worst = 0.0
        for _ in range(100):
            s = lat.random_state(int(rng.integers(2, 6)), rng)
            lam, mu = random_spectral_pair(rng)
            j = int(rng.integers(1, s.N + 1))
            worst = max(worst, lat.check_quadratic_algebra(s, lam, mu, j))
        assert worst <= 1e-10

    def test_ultralocality(self):
        rng = np.random.default_rng(22)
        s = lat.random_state(4, rng)
        # cross-site elementary brackets all vanish, so the bracket side is
        # identically zero off-site
        for f in lat.FIELD_NAMES:
            for g in lat.FIELD_NAMES:
                assert lat.poisson_bracket((f, 2), (g, 3), s) == 0

    def test_r_matrix_structure(self):
        d = 0.7 - 0.4j
        r = r_matrix(d)
        s, c = np.sinh(d), np.cosh(d)
        expect = np.array(
            [[c, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, c]], dtype=complex
        ) / s
        assert np.max(np.abs(r - expect)) < 1e-14

    def test_r_matrix_pole_rejected(self):
        with pytest.raises(ValueError):
            r_matrix(0.0)


class TestBulkEom:
    def test_zero_amplitude_fixed_point(self):
        s = zero_amplitude_state(4)
        d = lat.bulk_eom(s)
        assert d.max_abs() == 0.0

    def test_charge_conserved_along_flow(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            s = lat.random_state(5, rng)
            d = lat.bulk_eom(s)
            g = lat.charge2_gradient(s)
            der = np.sum(g[0] * d.a) + np.sum(g[1] * d.a_bar) + np.sum(g[2] * d.v)
            assert abs(der) <= 1e-10

    def test_matches_bracket_flow(self):
        rng = np.random.default_rng(24)
        for _ in range(20):
            s = lat.random_state(4, rng)
            d = lat.bulk_eom(s)
            bf = lat.bracket_flow(s)
            for got, want in ((bf.a, d.a), (bf.a_bar, d.a_bar), (bf.v, d.v)):
                assert np.max(np.abs(got - want)) <= 1e-12

    def test_flow_sign_is_calibrated(self):
        assert lat.flow_sign() in (-1, 1)


class TestTimeLax:
    def test_order0_field_free(self):
        assert np.array_equal(lat.time_lax_order0(), np.diag([1.0 + 0j, 0.0]))

    def test_zero_amplitude_order2(self):
        s = zero_amplitude_state(3)
        mu = 0.4 + 0.2j
        m = lat.time_lax_order2(s, 2, mu)
        expect = np.diag([2.0 * np.exp(2 * mu), 0.0])
        assert np.max(np.abs(m - expect)) < 1e-14

    def test_trace_is_field_independent(self):
        rng = np.random.default_rng(25)
        mu = -0.3 + 0.65j
        for _ in range(10):
            s = lat.random_state(4, rng)
            m = lat.time_lax_order2(s, 3, mu)
            assert abs(np.trace(m) - 2.0 * np.exp(2 * mu)) < 1e-12


class TestTimeLaxFromRMatrix:
    def test_order0_proportional_to_projector(self):
        rng = np.random.default_rng(26)
        s = lat.random_state(4, rng)
        mats = lat.time_lax_from_rmatrix(s, 2, 0.3 - 0.2j, depth=2)
        expect = np.diag([1.0 + 0j, 0.0])
        assert np.max(np.abs(mats[0] - expect)) < 1e-11

    def test_order1_vanishes(self):
        rng = np.random.default_rng(27)
        s = lat.random_state(3, rng)
        mats = lat.time_lax_from_rmatrix(s, 1, 0.1 + 0.4j, depth=2)
        assert np.max(np.abs(mats[1])) < 1e-11

    def test_order2_matches_printed_form(self):
        rng = np.random.default_rng(28)
        for _ in range(10):
            n = int(rng.integers(2, 6))
            s = lat.random_state(n, rng)
            j = int(rng.integers(1, n + 1))
            mu = complex(0.5 * rng.normal(), 0.5 * rng.normal())
            mats = lat.time_lax_from_rmatrix(s, j, mu, depth=2)
            printed = lat.time_lax_order2(s, j, mu)
            assert np.max(np.abs(mats[2] - printed)) <= 1e-10 * max(1.0, np.max(np.abs(printed)))

    def test_normalization_constant_is_stable(self):
        k = lat.time_lax_normalization()
        assert abs(k - lat.time_lax_normalization()) == 0.0

    def test_deeper_expansion_keeps_low_orders(self):
        rng = np.random.default_rng(34)
        s = lat.random_state(4, rng)
        mu = 0.2 + 0.3j
        shallow = lat.time_lax_from_rmatrix(s, 2, mu, depth=2)
        deep = lat.time_lax_from_rmatrix(s, 2, mu, depth=4)
        for m in range(3):
            assert np.max(np.abs(shallow[m] - deep[m])) < 1e-12
        assert len(deep) == 5

    def test_depth_validation(self):
        rng = np.random.default_rng(35)
        s = lat.random_state(3, rng)
        with pytest.raises(ValueError):
            lat.time_lax_from_rmatrix(s, 1, 0.2, depth=1)


class TestOrderZeroFlow:
    def test_projector_generates_order0_charge_flow(self):
        # the order-0 time-Lax is the constant projector; its commutator
        # with L matches the flow generated by the order-0 charge
        rng = np.random.default_rng(33)
        s = lat.random_state(5, rng)
        sign = lat.flow_sign()
        proj = lat.time_lax_order0()
        u = 1.3 - 0.4j
        for j in range(1, s.N + 1):
            lj = lat.lax_value(s, j, u)
            comm = proj @ lj - lj @ proj
            # bracket flow of sum_j log v_j: only a and abar move
            i = j - 1
            da = sign * s.a[i]          # {a_j, log v_j} = a_j
            dabar = sign * (-s.a_bar[i])
            expect = np.array([[0.0, dabar], [da, 0.0]], dtype=complex)
            assert np.max(np.abs(comm - expect)) < 1e-14


class TestZeroCurvature:
    def test_residual_small_on_random_samples(self):
        rng = np.random.default_rng(29)
        worst = 0.0
        for _ in range(100):
            s = lat.random_state(int(rng.integers(2, 7)), rng)
            mu = complex(0.5 * rng.normal(), 0.5 * rng.normal())
            j = int(rng.integers(1, s.N + 1))
            worst = max(worst, lat.zero_curvature_residual(s, j, mu))
        assert worst <= 1e-10

    def test_exact_zero_at_fixed_point(self):
        s = zero_amplitude_state(4)
        assert lat.zero_curvature_residual(s, 2, 0.3) == 0.0

    def test_mu_sweep(self):
        rng = np.random.default_rng(30)
        s = lat.random_state(5, rng)
        for mu in (0.0, 1.0, -1.0, 0.5j, -0.5j):
            assert lat.zero_curvature_residual(s, 3, mu) <= 1e-10


class TestIntegrate:
    def test_fixed_point_stays_constant(self):
        s = zero_amplitude_state(4)
        traj = lat.integrate(s, dt=0.05, t_end=1.0)
        assert traj.drift("2") < 1e-14
        assert traj.drift("0") < 1e-14
        final = traj.states[-1]
        assert np.max(np.abs(final.a)) < 1e-14

    def test_fourth_order_charge_drift(self):
        rng = np.random.default_rng(31)
        s = lat.random_state(6, rng, amplitude=0.3)
        d1 = lat.integrate(s, dt=2e-2, t_end=2.0).drift("2")
        d2 = lat.integrate(s, dt=1e-2, t_end=2.0).drift("2")
        ratio = d1 / d2
        assert 12.0 <= ratio <= 20.0

    def test_trace_drift_tracks_charge_drift(self):
        rng = np.random.default_rng(31)
        s = lat.random_state(6, rng, amplitude=0.3)
        t1 = lat.integrate(s, dt=2e-2, t_end=2.0)
        t2 = lat.integrate(s, dt=1e-2, t_end=2.0)
        ratio = t1.trace_drift(2.0) / t2.trace_drift(2.0)
        assert 10.0 <= ratio <= 24.0

    def test_both_charges_conserved_in_involution(self):
        # the order-0 and order-2 charges are simultaneously conserved along
        # the same flow, both at integrator order
        rng = np.random.default_rng(31)
        s = lat.random_state(6, rng, amplitude=0.3)
        traj = lat.integrate(s, dt=1e-2, t_end=2.0)
        assert traj.drift("0") < 1e-6
        assert traj.drift("2") < 1e-4
        r0 = lat.integrate(s, dt=2e-2, t_end=2.0).drift("0") / traj.drift("0")
        assert 10.0 <= r0 <= 24.0

    def test_invalid_dt_rejected(self):
        s = zero_amplitude_state(3)
        with pytest.raises(ValueError):
            lat.integrate(s, dt=0.5, t_end=0.1)
