import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discrete_connections import omega_mu
from discrete_connections.complex import (Chain, Cochain, Region, Simplex, boundary, coboundary,
                                          integrate, is_degenerate_chain, is_small, pushforward,
                                          zero_cochain)
from discrete_connections.errors import DomainError, NotSmallError
from discrete_connections.group import GroupDescriptor, exp

CIRCLE = GroupDescriptor.circle()
R = GroupDescriptor.vector(1)

v0, v1, v2 = (0.0,), (1.0,), (2.0,)


def real_cochain0(f):
    return Cochain(0, R, lambda T: R.element([f(T.vertices[0][0])]))


def real_cochain1(f):
    return Cochain(1, R, lambda T: R.element([f(T.vertices[0][0], T.vertices[1][0])]))


class TestChain:
    def test_merges_and_cancels(self):
        c = Chain(1, [((v0, v1), 2), ((v0, v1), -2), ((v1, v2), 1)])
        assert c == Chain.of(v1, v2)

    def test_arithmetic(self):
        a, b = Chain.of(v0, v1), Chain.of(v1, v2)
        assert (a + b) - b == a
        assert (-a)[Simplex((v0, v1))] == -1
        assert 3 * a == a + a + a
        assert (a - a).is_zero()

    def test_integer_coefficients_only(self):
        with pytest.raises(TypeError):
            Chain(1, [((v0, v1), 0.5)])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            Chain.of(v0, v1) + Chain.of(v0, v1, v2)

    def test_json_round_trip(self):
        c = Chain(2, [((v0, v1, v2), 3), ((v2, v1, v0), -1)])
        data = c.to_json()
        assert {"coeff": 3, "vertices": [[0.0], [1.0], [2.0]]} in data
        assert Chain.from_json(data) == c

    def test_hashable(self):
        assert len({Chain.of(v0, v1), Chain.of(v0, v1)}) == 1


class TestBoundary:
    def test_triangle(self):
        expected = Chain(1, [((v1, v2), 1), ((v0, v2), -1), ((v0, v1), 1)])
        assert boundary(Chain.of(v0, v1, v2)) == expected

    def test_degenerate_edge(self):
        assert boundary(Chain.of(v1, v1)).is_zero()

    def test_edge(self):
        assert boundary(Chain.of(v0, v1)) == Chain.of(v1) - Chain.of(v0)

    def test_boundary_of_boundary(self):
        assert boundary(boundary(Chain.of(v0, v1, v2))).is_zero()

    def test_zero_chain_rejected(self):
        with pytest.raises(ValueError):
            boundary(Chain.of(v0))

    def test_degenerate_predicate(self):
        assert is_degenerate_chain(Chain.of(v1, v1) - Chain.of(v2, v2))
        assert not is_degenerate_chain(Chain.of(v1, v2))


class TestCoboundary:
    def test_zero_cochain(self):
        alpha0 = real_cochain0(lambda x: x ** 3)
        value = coboundary(alpha0)(Simplex(((2.0,), (3.0,))))
        assert value.coords == (27.0 - 8.0,)

    def test_one_cochain(self):
        f = lambda a, b: a * a + 3 * b  # noqa: E731
        value = coboundary(real_cochain1(f))(Simplex((v0, v1, v2)))
        assert value.coords[0] == pytest.approx(f(1, 2) - f(0, 2) + f(0, 1))

    def test_dd_is_identity(self):
        alpha0 = Cochain(0, CIRCLE, lambda T: CIRCLE.element([math.sin(5 * T.vertices[0][0])]))
        dd = coboundary(coboundary(alpha0))
        assert dd(Simplex(((0.3,), (1.7,), (2.2,)))).is_identity()

    def test_unsupported_dimension(self):
        with pytest.raises(ValueError):
            coboundary(zero_cochain(2, CIRCLE))


class TestIntegrate:
    def test_local_form_of_omega2(self):
        A = omega_mu(2)
        assert integrate(A.local_cochain(), Chain.of((1.0,), (2.0,))).coords == (1.0,)

    def test_empty_chain(self):
        assert integrate(omega_mu(2).local_cochain(), Chain.zero(1)).is_identity()

    def test_multiples(self):
        A = omega_mu(2).local_cochain()
        c = 2 * Chain.of((1.0,), (1.5,))
        assert integrate(A, c).isclose(A(Simplex(((1.0,), (1.5,)))) ** 2)

    def test_negation_inverts(self):
        A = omega_mu(2).local_cochain()
        c = Chain.of((1.0,), (1.5,)) + Chain.of((2.0,), (4.0,))
        assert (integrate(A, c) * integrate(A, -c)).is_identity()

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            integrate(omega_mu(2).local_cochain(), Chain.of(v0, v1, v2))

    def test_not_small_names_simplex(self):
        la = omega_mu(2).log_cochain()
        with pytest.raises(NotSmallError) as info:
            la(Chain.of((1.0,), (3.0,)))
        assert info.value.simplex == Simplex(((1.0,), (3.0,)))

    def test_algebra_cochains_add(self):
        la = omega_mu(2).log_cochain()
        c = Chain.of((1.0,), (1.5,)) + Chain.of((1.5,), (2.0,))
        assert integrate(la, c).coords[0] == pytest.approx(0.5)


class TestSmallness:
    def test_full_region(self):
        assert is_small(Simplex(((0.0,), (100.0,), (-3.0,))), Region.full())

    def test_w_region_of_omega2(self):
        W = omega_mu(2).w_region
        assert is_small(Simplex(((1.0,), (1.5,))), W)
        assert not is_small(Simplex(((1.0,), (3.0,))), W)

    def test_vertices_are_small(self):
        assert is_small(Simplex(((1.0,),)), Region(lambda a, b: False))

    def test_default_checks_ordered_pairs(self):
        R_ = Region(lambda a, b: a[0] <= b[0])
        T = Simplex(((0.0,), (1.0,), (2.0,)))
        assert is_small(T, R_)
        assert not is_small(T, R_, all_pairs=True)


class TestPushforward:
    def test_exp_of_log_form(self):
        A = omega_mu(2)
        pushed = pushforward(exp, A.log_cochain(), algebra=False)
        T = Simplex(((1.0,), (1.5,)))
        assert pushed(T).isclose(A.local_cochain()(T))

    def test_identity(self):
        A = omega_mu(2).local_cochain()
        T = Simplex(((1.0,), (2.0,)))
        assert pushforward(lambda g: g, A)(T) == A(T)

    def test_zero_goes_to_identity(self):
        z = zero_cochain(1, CIRCLE, algebra=True)
        assert pushforward(exp, z, algebra=False)(Simplex((v0, v1))).is_identity()

    def test_commutes_with_coboundary(self):
        A = omega_mu(2)
        T = Simplex(((1.0,), (1.4,), (1.9,)))
        lhs = pushforward(exp, coboundary(A.log_cochain()), algebra=False)(T)
        rhs = coboundary(pushforward(exp, A.log_cochain(), algebra=False))(T)
        assert lhs.isclose(rhs)


def test_cochain_sum_is_pointwise_product():
    A, B = omega_mu(2).local_cochain(), omega_mu(3).local_cochain()
    T = Simplex(((1.0,), (2.5,)))
    assert (A + B)(T).isclose(A(T) * B(T))
    assert (-A)(T).isclose(A(T).inverse())


points = st.tuples(st.floats(0.01, 10)).map(lambda t: (round(t[0], 3),))


@settings(max_examples=1000)
@given(st.lists(st.tuples(points, points, points, st.integers(-4, 4)), min_size=1, max_size=5))
def test_boundary_squared_vanishes(terms):
    c = Chain(2, [((a, b, d), n) for a, b, d, n in terms])
    assert boundary(boundary(c)).is_zero()


@settings(max_examples=300)
@given(points, points, points)
def test_stokes_for_omega2(a, b, d):
    A = omega_mu(2).local_cochain()
    T = Chain.of(a, b, d)
    assert integrate(A, boundary(T)).distance(integrate(coboundary(A), T)) < 1e-9


@settings(max_examples=300)
@given(st.lists(st.tuples(points, points, st.integers(-3, 3)), max_size=4),
       st.lists(st.tuples(points, points, st.integers(-3, 3)), max_size=4))
def test_pairing_is_a_homomorphism(t1, t2):
    A = omega_mu(3).local_cochain()
    c1 = Chain(1, [((a, b), n) for a, b, n in t1])
    c2 = Chain(1, [((a, b), n) for a, b, n in t2])
    assert integrate(A, c1 + c2).distance(integrate(A, c1) * integrate(A, c2)) < 1e-9


@given(points, points, points)
def test_smallness_is_hereditary(a, b, d):
    W = omega_mu(2).w_region
    T = Simplex((a, b, d))
    if is_small(T, W):
        assert all(is_small(T.face(k), W) for k in range(3))
