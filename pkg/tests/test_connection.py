import pytest

from bundlesym.connection import (
    Connection,
    SplitPair,
    SplittingError,
    VectField,
    ad_nilpotency_check,
    bracket_star,
    covariant_endo,
    curvature,
    curvature_components,
    lambda_decompose,
    mu,
    mu_inverse,
    nabla,
    nil_falsification,
    section_map,
    section_of_symbol,
    trace_decompose,
)
from bundlesym.diffop import DiffOp, commutator, gamma
from bundlesym.harness.gen import Gen, GenConfig
from bundlesym.matalg import MatPoly, mat_comm
from bundlesym.poly import Poly
from bundlesym.symbols import SymbolElem, sigma_pson
from conftest import M, P

Z = MatPoly.zero(2, 2)
J = M([[0, 1], [-1, 0]])
E12 = MatPoly.unit(2, 2, 0, 1)
E21 = MatPoly.unit(2, 2, 1, 0)
FLAT = Connection.flat(2, 2)
D1 = VectField.coordinate(2, 1)
D2 = VectField.coordinate(2, 2)


@pytest.fixture
def twisted():
    return Connection([Z, J.scale(P("x1"))])


class TestBasics:
    def test_metric_flag(self, twisted):
        assert twisted.metric and FLAT.metric
        assert not Connection([E12, Z]).metric

    def test_nabla(self):
        assert nabla(FLAT, D1) == DiffOp.partial((1, 0), 2)
        assert nabla(FLAT, VectField.zero(2)).is_zero()

    def test_nabla_applies_gamma(self, twisted):
        assert nabla(twisted, D2) == DiffOp.partial((0, 1), 2) + DiffOp.multiplication(J.scale(P("x1")))

    def test_lambda_decompose(self, gen):
        assert lambda_decompose(DiffOp.partial((1, 0), 2), FLAT) == SplitPair(D1, Z)
        c = gen.connection()
        u = gen.poly()
        assert lambda_decompose(gamma(u, 2), c) == SplitPair(VectField.zero(2), MatPoly.scalar(u, 2))
        with pytest.raises(SplittingError):
            lambda_decompose(DiffOp.partial((1, 0), 2, E12), c)

    def test_vector_field_bracket(self):
        X = VectField((P("x2"), Poly.zero(2)))
        Y = VectField((Poly.zero(2), P("x1")))
        assert X.bracket(Y) == VectField((-P("x1"), P("x2")))


class TestCurvature:
    def test_example(self, twisted):
        assert curvature(twisted, D1, D2) == J
        assert curvature_components(twisted, D1, D2) == J

    def test_flat(self, gen):
        X, Y = gen.vectfield(), gen.vectfield()
        assert curvature(FLAT, X, Y).is_zero()

    @pytest.mark.parametrize("n", [2, 3])
    def test_routes_agree_and_trace_free(self, n):
        g = Gen(GenConfig(n=n, seed=31), seed=31)
        for _ in range(10):
            c = g.connection()
            X, Y = g.vectfield(), g.vectfield()
            r = curvature(c, X, Y)
            assert r == curvature_components(c, X, Y)
            assert r.trace().is_zero()

    def test_non_metric_has_trace(self):
        c = Connection([Z, MatPoly.scalar(P("x1"), 2)])
        assert curvature(c, D1, D2).trace() == P("2")


class TestBracketStar:
    def test_specializations(self, gen):
        c = gen.connection()
        X, Y = gen.vectfield(), gen.vectfield()
        zero = SplitPair(X, Z), SplitPair(Y, Z)
        assert bracket_star(*zero, c) == SplitPair(X.bracket(Y), curvature(c, X, Y))
        a, b = gen.matrix(), gen.matrix()
        O = VectField.zero(2)
        assert bracket_star(SplitPair(O, a), SplitPair(O, b), c) == SplitPair(O, mat_comm(a, b))

    @pytest.mark.parametrize("metric", [True, False])
    def test_matches_operator_commutator(self, metric):
        g = Gen(GenConfig(seed=32), seed=32)
        for _ in range(15):
            c = g.connection(metric=metric)
            p, q = g.pair(trace_free=False), g.pair(trace_free=False)
            op = commutator(nabla(c, p.X) + DiffOp.multiplication(p.A), nabla(c, q.X) + DiffOp.multiplication(q.A))
            assert bracket_star(p, q, c) == lambda_decompose(op, c)

    def test_preserves_trace_free(self, gen):
        c = gen.connection()
        p, q = gen.pair(), gen.pair()
        assert bracket_star(p, q, c).A.trace().is_zero()

    def test_covariant_endo(self, twisted):
        assert covariant_endo(twisted, D2, E12) == mat_comm(J, E12).scale(P("x1"))


class TestSplitting:
    def test_section_of_order_zero(self, gen):
        a = gen.traceless()
        c = gen.connection()
        assert section_map(SplitPair(VectField.zero(2), a), c) == DiffOp.multiplication(a)

    def test_section_is_right_inverse(self, gen):
        for _ in range(15):
            c = gen.connection()
            p = gen.pair()
            s = mu(p, c)
            assert sigma_pson(section_of_symbol(s, c)) == s or s.is_zero()
            assert mu_inverse(mu(p, c), c) == p

    def test_symbol_of_section(self, gen):
        c = gen.connection()
        p = gen.pair(nonzero_field=True)
        s = sigma_pson(section_map(p, c))
        scalar = {tuple(int(j == i) for j in range(2)): x for i, x in enumerate(p.X.components)}
        assert s == SymbolElem(2, 2, 1, scalar, {(0, 0): p.A + c.contract(p.X)})

    def test_homomorphism(self, gen):
        for _ in range(10):
            c = gen.connection()
            p, q = gen.pair(), gen.pair()
            lhs = section_map(bracket_star(p, q, c), c)
            rhs = commutator(section_map(p, c), section_map(q, c))
            assert lhs == rhs

    def test_preconditions(self, gen):
        with pytest.raises(SplittingError):
            section_map(gen.pair(), Connection([E12, Z]))
        with pytest.raises(SplittingError):
            section_map(SplitPair(D1, MatPoly.identity(2, 2)), FLAT)
        with pytest.raises(SplittingError):
            mu_inverse(SymbolElem.zero(2, 2, 1), Connection([E12, Z]))


class TestTraceDecompose:
    def test_examples(self, twisted):
        X = VectField((P("x2"), Poly.one(2)))
        t = nabla(twisted, X) + DiffOp.multiplication(M([[3, 0], [0, 1]]))
        adjusted, u = trace_decompose(t, twisted)
        assert adjusted == nabla(twisted, X) + DiffOp.multiplication(M([[1, 0], [0, -1]]))
        assert u == P("2")

    def test_pure_scalar(self, gen):
        u = gen.poly(nonzero=True)
        adjusted, v = trace_decompose(gamma(u, 2), gen.connection())
        assert adjusted.is_zero() and v == u

    def test_independent_of_connection(self, gen):
        for _ in range(10):
            t = gen.diffop(("in_Pk", 1))
            c1, c2 = gen.connection(), gen.connection()
            assert trace_decompose(t, c1) == trace_decompose(t, c2)


class TestNilpotency:
    def test_constant_e12(self):
        targets = [SplitPair(D2, E21)]
        r = ad_nilpotency_check(E12, targets, FLAT)
        assert r is not None and r <= 3

    def test_zero(self):
        assert ad_nilpotency_check(Z, [SplitPair(D1, E12)], FLAT) == 1

    def test_polynomial_upper_n3(self):
        g = Gen(GenConfig(n=3, seed=41), seed=41)
        a = g.strictly_upper(constant=False)
        c = Connection.flat(2, 3)
        assert ad_nilpotency_check(a, [g.pair() for _ in range(3)], c, r_max=8) is not None

    def test_rejects_non_nilpotent(self):
        with pytest.raises(SplittingError):
            ad_nilpotency_check(M([[1, 0], [0, -1]]), [], FLAT)

    @pytest.mark.parametrize("X", [D1, VectField((Poly.zero(2), P("x1")))])
    def test_falsification(self, X):
        w = nil_falsification(SplitPair(X, Z), r_max=6)
        assert w.confirmed and len(w.iterates) == 6
        assert all(not z.is_zero() for z in w.iterates)
        assert X.apply(w.u)

    def test_falsification_needs_field(self):
        with pytest.raises(SplittingError):
            nil_falsification(SplitPair(VectField.zero(2), E12))
