from math import factorial, prod

import pytest

from bundlesym.diffop import (
    DiffOp,
    OperatorError,
    Section,
    apply,
    commutator,
    compose,
    d_order,
    gamma,
    is_in_Pk,
    p_order,
    p_order_oracle,
)
from bundlesym.harness.gen import Gen, GenConfig
from bundlesym.harness.suites import exhaustive_family
from bundlesym.matalg import MatPoly, mat_comm
from bundlesym.poly import Poly, monomials_up_to
from conftest import M, P

ID = MatPoly.identity(2, 2)
E12 = MatPoly.unit(2, 2, 0, 1)


def d(*alpha, coeff=None, n=2):
    return DiffOp.partial(alpha, n, coeff)


def S(*texts):
    return Section([P(t) for t in texts])


class TestApply:
    def test_gamma_examples(self):
        assert gamma(Poly.one(2), 2) == DiffOp.identity(2, 2)
        assert apply(gamma(P("x1"), 2), S("1", "0")) == S("x1", "0")

    def test_partial(self):
        assert apply(d(1, 0), S("x1^2", "0")) == S("2 x1", "0")

    def test_gamma_scales(self, gen):
        u, s = gen.poly(), gen.section()
        assert apply(gamma(u, 2), s) == s.scale(u)

    def test_matrix_partial(self):
        assert apply(d(1, 0, coeff=E12), S("0", "x1")) == S("1", "0")

    def test_shape_mismatch(self):
        with pytest.raises(OperatorError):
            apply(d(1, 0), Section([P("x1")] * 3))


class TestCompose:
    def test_leibniz_one_variable(self):
        x1 = gamma(P("x1"), 2)
        assert compose(d(1, 0), x1) == compose(x1, d(1, 0)) + DiffOp.identity(2, 2)

    def test_gamma_product(self, gen):
        u, v = gen.poly(), gen.poly()
        assert compose(gamma(u, 2), gamma(v, 2)) == gamma(u * v, 2)

    def test_binomial_weights(self):
        # d1^2 o x1^2 = x1^2 d1^2 + 4 x1 d1 + 2
        lhs = compose(d(2, 0), gamma(P("x1^2"), 2))
        rhs = DiffOp(2, 2, {(2, 0): MatPoly.scalar(P("x1^2"), 2), (1, 0): MatPoly.scalar(P("4 x1"), 2), (0, 0): ID.scale(2)})
        assert lhs == rhs

    @pytest.mark.parametrize("n", [2, 3])
    def test_matches_action(self, n):
        g = Gen(GenConfig(n=n, seed=5, max_order=2), seed=5)
        for _ in range(15):
            a, b = g.diffop(), g.diffop()
            assert compose(a, b) == DiffOp(a.m, a.n, compose_by_action(a, b))

    def test_associative(self, gen):
        a, b, c = (gen.diffop(max_order=2) for _ in range(3))
        assert compose(compose(a, b), c) == compose(a, compose(b, c))


def compose_by_action(a, b):
    """Coefficients of ``a o b`` solved from its action on monomials.

    ``(a o b)(x^g e_j)`` determines the coefficients order by order: the
    ``d^g`` coefficient's column ``j`` equals ``(value - lower terms) / g!``.
    """
    m, n = a.m, a.n
    r = (d_order(a) if a else 0) + (d_order(b) if b else 0)
    coeffs = {}
    for exps in sorted(monomials_up_to(m, r), key=sum):
        u = Poly.monomial(exps)
        cols = []
        for j in range(n):
            s = Section([u if i == j else Poly.zero(m) for i in range(n)])
            target = apply(a, apply(b, s))
            partial = apply(DiffOp(m, n, coeffs), s)
            diff = [t - p for t, p in zip(target.components, partial.components)]
            w = prod(factorial(e) for e in exps)
            cols.append([x / w for x in diff])
        rows = [[cols[j][i] for j in range(n)] for i in range(n)]
        coeffs[exps] = MatPoly(rows)
    return coeffs


class TestCommutator:
    def test_examples(self, gen):
        assert commutator(d(1, 0), gamma(P("x1"), 2)) == DiffOp.identity(2, 2)
        u, v = gen.poly(), gen.poly()
        assert commutator(gamma(u, 2), gamma(v, 2)).is_zero()
        a, b = gen.matrix(constant=True), gen.matrix(constant=True)
        assert commutator(DiffOp.multiplication(a), DiffOp.multiplication(b)) == DiffOp.multiplication(mat_comm(a, b))

    def test_jacobi(self, gen):
        a, b, c = (gen.diffop(max_order=1) for _ in range(3))
        total = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b))
        assert total.is_zero()


class TestOrders:
    def test_d_order(self):
        assert d_order(gamma(P("x1 + 1"), 2)) == 0
        assert d_order(d(1, 0, coeff=E12)) == 1
        assert d_order(d(1, 1) + d(1, 0)) == 2
        with pytest.raises(OperatorError):
            d_order(DiffOp.zero(2, 2))

    def test_p_order(self):
        assert p_order(gamma(P("x2"), 2)) == 0
        assert p_order(DiffOp.multiplication(M([[1, 2], [0, 3]]))) == 1
        assert p_order(d(1, 0, coeff=E12)) == 2
        assert p_order(d(1, 1) + d(1, 0, coeff=E12)) == 2

    def test_membership(self):
        assert is_in_Pk(d(1, 1), 2) and not is_in_Pk(d(1, 1), 1)
        t = d(1, 0, coeff=E12)
        assert is_in_Pk(t, 2) and not is_in_Pk(t, 1)
        assert is_in_Pk(gamma(P("x1"), 2), 0)
        with pytest.raises(OperatorError):
            is_in_Pk(t, -1)

    def test_oracle_confirms_e12_d1(self):
        t = d(1, 0, coeff=E12)
        c = commutator(t, gamma(P("x1"), 2))
        assert p_order_oracle(c, 1) and not p_order_oracle(c, 0)
        assert p_order_oracle(t, 2) and not p_order_oracle(t, 1)

    def test_oracle_on_gamma(self):
        assert p_order_oracle(gamma(P("x1 x2"), 2), 0)
        assert p_order_oracle(DiffOp.zero(2, 2), 0)

    def test_exhaustive_family(self):
        family = exhaustive_family()
        assert len(family) == 24
        for t in family:
            for k in range(4):
                assert is_in_Pk(t, k) == p_order_oracle(t, k), (t, k)
