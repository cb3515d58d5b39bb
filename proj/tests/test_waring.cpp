#include <doctest.h>

#include <random>

#include "bwr/waring.hpp"

using namespace bwr;

namespace {

Poly P(const char* s, int n) { return parse_poly(s, n); }
LinearForm F(const char* s, int n) {
    LinearForm l = LinearForm::from_poly(parse_poly(s, n));
    l.c.resize(n);
    return l;
}

WaringDecomposition random_exact(std::mt19937& g, int n, int d, int r) { return random_exact_decomposition(g, n, d, r); }

}  // namespace

TEST_CASE("elementary symmetric and power sums") {
    std::vector<LinearForm> xy = {F("x0", 2), F("x1", 2)};
    CHECK(elementary_symmetric(xy, 0, 2) == P("1", 2));
    CHECK(elementary_symmetric(xy, 1, 2) == P("x0+x1", 2));
    CHECK(elementary_symmetric(xy, 2, 2) == P("x0*x1", 2));
    CHECK(elementary_symmetric({F("x0", 2), F("-x0", 2), F("x1", 2)}, 2, 2) == P("-x0^2", 2));
    CHECK(power_sum(xy, 2, 2) == P("x0^2+x1^2", 2));
    CHECK(power_sum({F("x0", 1), F("-x0", 1)}, 3, 1).is_zero());
    CHECK(power_sum({F("x0", 1), F("zeta3*x0", 1), F("zeta3^2*x0", 1)}, 3, 1) == P("3*x0^3", 1));
}

TEST_CASE("newton identities") {
    CHECK(newton_identity_check({F("x0", 2), F("x1", 2)}, 1, 2));
    CHECK(newton_identity_check({F("x0", 3), F("x1", 3), F("x2", 3)}, 3, 3));
    std::mt19937 g(5);
    std::uniform_int_distribution<int> c(-2, 2), e(-1, 1), z(0, 5);
    for (int it = 0; it < 5; ++it) {
        std::vector<LinearForm> f;
        for (int i = 0; i < 4; ++i) {
            LinearForm l(3);
            for (int j = 0; j < 3; ++j) l.c[j] = Laurent(Cyclo::zeta(6, z(g)) * Cyclo(c(g)), e(g));
            f.push_back(l);
        }
        for (int k = 1; k <= 4; ++k) CHECK(newton_identity_check(f, k, 3));
    }
}

TEST_CASE("scale roots") {
    CHECK(scale_root(Laurent(8), 3).pow(3) == Laurent(8));
    CHECK(scale_root(Laurent(-1), 2).pow(2) == Laurent(-1));
    CHECK(scale_root(Laurent(Cyclo(Q(1, 4)), -2), 2).pow(2) == Laurent(Cyclo(Q(1, 4)), -2));
    Laurent z(Cyclo::zeta(3) * Cyclo(Q(-27)), 6);
    CHECK(scale_root(z, 3).pow(3) == z);
    CHECK_THROWS_AS(scale_root(Laurent(2), 2), DomainError);
    CHECK_THROWS_AS(scale_root(Laurent::eps(1), 2), DomainError);
    CHECK_THROWS_AS(scale_root(Laurent(1) + Laurent::eps(1), 2), DomainError);
}

TEST_CASE("kumar build from x^d") {
    WaringDecomposition w;
    w.d = 4;
    w.nvars = 1;
    w.add(Laurent(1), F("x0", 1));
    KumarExpr k = kumar_build(w, false);
    CHECK(k.forms.size() == 4);
    CHECK(k.expand() == P("x0^4", 1));
}

TEST_CASE("kumar roundtrip x^2+y^2") {
    WaringDecomposition w;
    w.d = 2;
    w.nvars = 2;
    w.add(Laurent(1), F("x0", 2));
    w.add(Laurent(1), F("x1", 2));
    KumarExpr k = kumar_build(w, true);
    CHECK(k.forms.size() == 4);
    CHECK(equiv_mod_eps(k.expand(), P("x0^2+x1^2", 2)));
    CHECK(classify_kumar(k) == Regime::Minus);
    KumarInverse inv = kumar_invert(k, 2);
    REQUIRE_FALSE(inv.is_product);
    CHECK(inv.dec.size() <= 4);
    CHECK(inv.limit() == P("x0^2+x1^2", 2));
}

TEST_CASE("kumar build of empty decomposition") {
    WaringDecomposition w;
    w.d = 3;
    w.nvars = 2;
    KumarExpr k = kumar_build(w, true);
    CHECK(k.forms.empty());
    CHECK(k.expand().is_zero());
}

TEST_CASE("kumar product build and plus regime") {
    CHECK(kumar_product_build({F("x0", 1)}).expand() == P("x0", 1));
    CHECK(limit(kumar_product_build({F("x0", 2), F("x1", 2)}).expand()) == P("x0*x1", 2));
    CHECK(limit(kumar_product_build({F("x0", 1), F("x0", 1), F("x0", 1)}).expand()) == P("x0^3", 1));
    KumarExpr k = kumar_product_build({F("x0", 3), F("x1", 3), F("x2", 3)});
    CHECK(classify_kumar(k) == Regime::Plus);
    KumarInverse inv = kumar_invert(k, 3);
    REQUIRE(inv.is_product);
    CHECK(inv.prod.factors.size() == 3);
    CHECK(inv.prod.factors[0] == F("x0", 3));
    CHECK(inv.prod.factors[2] == F("x2", 3));
    CHECK(inv.limit() == P("x0*x1*x2", 3));
    CHECK_THROWS_AS(kumar_product_build({F("x0", 1), LinearForm(1)}), DomainError);
}

TEST_CASE("classify kumar") {
    KumarExpr k;
    k.alpha = Laurent::eps(2);
    CHECK(classify_kumar(k) == Regime::Plus);
    k.alpha = Laurent(3);
    CHECK(classify_kumar(k) == Regime::Equal);
    k.alpha = Laurent::eps(-1) + Laurent(1);
    CHECK(classify_kumar(k) == Regime::Minus);
    k.alpha = Laurent();
    CHECK_THROWS_AS(classify_kumar(k), DomainError);
}

TEST_CASE("equal regime with vanishing e1 e2") {
    // forms x, zeta3 x, zeta3^2 x : e1 = e2 = 0, e3 = x^3
    KumarExpr k;
    k.nvars = 1;
    k.alpha = Laurent(1);
    k.forms = {F("x0", 1), F("zeta3*x0", 1), F("zeta3^2*x0", 1)};
    CHECK(k.expand() == P("x0^3", 1));
    KumarInverse inv = kumar_invert(k, 3);
    REQUIRE_FALSE(inv.is_product);
    CHECK_FALSE(inv.dec.is_border());
    CHECK(inv.dec.expand() == P("x0^3", 1));
    // homogeneity filter e_3 = (-1)^2 l_3^3 with l_3 = zeta3^2 x
    CHECK(elementary_symmetric(k.forms, 3, 1) == k.forms[2].to_poly().pow(3));
}

TEST_CASE("linear approximation shape gives exact output") {
    WaringDecomposition w;
    w.d = 3;
    w.nvars = 2;
    w.add(Laurent(1), F("x0+x1", 2));
    w.add(Laurent(8), F("x0-x1", 2));
    KumarExpr k = kumar_build(w, false);
    KumarInverse inv = kumar_invert(k, 3);
    REQUIRE_FALSE(inv.is_product);
    CHECK_FALSE(inv.dec.is_border());
    CHECK(inv.dec.expand() == w.expand());
}

TEST_CASE("kumar invert rejects stray degrees") {
    KumarExpr k;
    k.nvars = 2;
    k.alpha = Laurent(1);
    k.forms = {F("x0", 2), F("x1", 2)};
    try {
        kumar_invert(k, 2);
        FAIL("expected error");
    } catch (const DomainError& e) {
        CHECK(e.name == "NotHomogeneousLimit");
    }
}

TEST_CASE("kumar roundtrip on random decompositions") {
    std::mt19937 g(17);
    for (int it = 0; it < 10; ++it) {
        int n = 1 + it % 3, d = 2 + it % 3, r = 1 + it % 3;
        WaringDecomposition w = random_exact(g, n, d, r);
        KumarExpr k = kumar_build(w, true);
        CHECK((int)k.forms.size() == d * r);
        CHECK(limit(k.expand()) == w.expand());
        KumarInverse inv = kumar_invert(k, d);
        CHECK(inv.limit() == w.expand());
        CHECK((int)inv.dec.size() <= d * r);
    }
}

TEST_CASE("sandwich on sums of powers") {
    for (int r = 1; r <= 3; ++r) {
        WaringDecomposition w;
        w.d = 3;
        w.nvars = r;
        for (int i = 0; i < r; ++i) w.add(Laurent(1), LinearForm::var(r, i));
        KumarExpr k = kumar_build(w, true);
        CHECK((int)k.forms.size() == 3 * r);
        KumarInverse inv = kumar_invert(k, 3);
        CHECK((int)inv.dec.size() >= r);
        CHECK((int)inv.dec.size() <= 3 * r);
        CHECK(inv.limit() == w.expand());
    }
}

TEST_CASE("monomial power decompositions") {
    auto w = monomial_power_decomposition(1, 1);
    CHECK(w.size() == 2);
    CHECK(w.expand() == P("x0*x1", 2));
    CHECK(monomial_power_decomposition(0, 3).size() == 1);
    CHECK(monomial_power_decomposition(0, 3).expand() == P("x1^3", 2));
    auto v = monomial_power_decomposition(1, 2);
    CHECK(v.size() == 3);
    CHECK(v.expand() == P("x0*x1^2", 2));
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; b <= 4; ++b) {
            if (a + b == 0) continue;
            auto u = monomial_power_decomposition(a, b);
            CHECK(u.expand() == Poly::monomial(2, Monomial({a, b}), Laurent(1)));
            CHECK((int)u.size() == (a && b ? std::max(a, b) + 1 : 1));
        }
}

TEST_CASE("monomial border decompositions") {
    CHECK(monomial_border_decomposition(0, 4).size() == 1);
    CHECK_FALSE(monomial_border_decomposition(0, 4).is_border());
    auto w = monomial_border_decomposition(1, 3);
    CHECK(w.size() == 2);
    CHECK(limit(w.expand()) == P("x0*x1^3", 2));
    auto v = monomial_border_decomposition(2, 2);
    CHECK(v.size() == 3);
    CHECK(limit(v.expand()) == P("x0^2*x1^2", 2));
    CHECK(limit(monomial_border_decomposition(3, 1).expand()) == P("x0^3*x1", 2));
}

TEST_CASE("essential variables") {
    CHECK(essential_variables(P("x0*x1*x2", 3)) == 3);
    CHECK(essential_variables(P("(x0+x1)^3", 2)) == 1);
    CHECK(essential_variables(P("x0*x1*x2+x3^3", 4)) == 4);
    std::vector<LinearForm> m = {F("x0+x1", 3), F("x1-x2", 3), F("x0+x2+x1", 3)};
    Poly f = P("x0*x1*x2+x0^3", 3);
    CHECK(essential_variables(substitute_linear(f, m)) == essential_variables(f));
}

TEST_CASE("gad of the high degree example") {
    for (int d : {5, 6}) {
        WaringDecomposition w = high_degree_example(d);
        REQUIRE(w.size() == 6);
        Poly f = P("x0^5*x2+x1^5*x3+2*(x0+x1)^5*x4", 5);
        if (d == 5) f = P("x0^4*x2+x1^4*x3+2*(x0+x1)^4*x4", 5);
        CHECK(limit(w.expand()) == f);
        GAD g = gad_from_border(w);
        REQUIRE(g.summands.size() == 3);
        CHECK(g.expand() == f);
        for (auto& s : g.summands) CHECK(s.r == 2);
        CHECK(g.summands[0].ell == F("x0", 5));
        CHECK(g.summands[2].ell == F("x0+x1", 5));
        CHECK(g.summands[2].g == P("2*x4", 5));
        CHECK(classify_bwr_normal_form(GAD{d, 5, {g.summands[0]}}) == "l1^(d-1)*l2");
    }
}

TEST_CASE("gad of an exact power") {
    WaringDecomposition w;
    w.d = 3;
    w.nvars = 2;
    w.add(Laurent(2), F("x0+x1", 2));
    GAD g = gad_from_border(w);
    REQUIRE(g.summands.size() == 1);
    CHECK(g.summands[0].r == 1);
    CHECK(g.expand() == P("2*(x0+x1)^3", 2));
}

TEST_CASE("wild form is rejected") {
    // x0 x1 y0 y1 y2, degree 3, five summands
    WaringDecomposition w;
    w.d = 3;
    w.nvars = 5;
    Laurent s(Cyclo(Q(1, 9)), -1);
    auto e = Laurent::eps();
    w.add(s * Laurent(3), F("x0", 5) + F("x2", 5).scale(e));
    w.add(s * Laurent(3), F("x1", 5) + F("x3", 5).scale(e));
    w.add(s * Laurent(6), F("x0+x1", 5) + F("x4", 5).scale(e));
    w.add(-s, F("x0+2*x1", 5));
    w.add(-s, F("2*x0+x1", 5));
    CHECK(limit(w.expand()) == P("x0^2*x2+x1^2*x3+2*(x0+x1)^2*x4", 5));
    try {
        gad_from_border(w);
        FAIL("expected error");
    } catch (const DomainError& err) {
        CHECK(err.name == "DegreeTooLow");
    }
    CHECK_THROWS_AS(deborder_waring(w), DomainError);
}

TEST_CASE("deborder") {
    WaringDecomposition p;
    p.d = 4;
    p.nvars = 2;
    p.add(Laurent(1), F("x0-x1", 2));
    CHECK(deborder_waring(p).size() == 1);
    CHECK(deborder_waring(p).expand() == p.expand());

    WaringDecomposition m = monomial_border_decomposition(1, 4);
    WaringDecomposition e = deborder_waring(m);
    CHECK_FALSE(e.is_border());
    CHECK(e.expand() == P("x0*x1^4", 2));
    CHECK(e.size() <= 2 * 5);

    WaringDecomposition h = high_degree_example(5);
    WaringDecomposition eh = deborder_waring(h);
    CHECK_FALSE(eh.is_border());
    CHECK(eh.expand() == limit(h.expand()));
    CHECK(eh.size() <= 1260);

    WaringDecomposition q = monomial_border_decomposition(2, 3);
    WaringDecomposition eq = deborder_waring(q);
    CHECK(eq.expand() == P("x0^2*x1^3", 2));
    CHECK(eq.size() <= 5 * 6);
}

TEST_CASE("normal forms") {
    GAD a{5, 2, {{F("x0", 2), P("1", 2), 1}, {F("x1", 2), P("3", 2), 1}}};
    CHECK(classify_bwr_normal_form(a) == "l1^d+l2^d");
    GAD b{5, 2, {{F("x0", 2), P("x1", 2), 2}}};
    CHECK(classify_bwr_normal_form(b) == "l1^(d-1)*l2");
    GAD c{5, 3, {{F("x0", 3), P("x0*x1+x2^2", 3), 3}}};
    CHECK(classify_bwr_normal_form(c) == "l1^(d-1)*l2+l1^(d-2)*l3^2");
    GAD c2{5, 3, {{F("x0", 3), P("x1*x2", 3), 3}}};
    CHECK_THROWS_AS(classify_bwr_normal_form(c2), DomainError);
    GAD d{5, 3, {{F("x0", 3), P("1", 3), 1}, {F("x1", 3), P("x2", 3), 2}}};
    CHECK(classify_bwr_normal_form(d) == "l1^d+l2^(d-1)*l3");
    GAD e{5, 3, {{F("x0", 3), P("1", 3), 1}, {F("x1", 3), P("1", 3), 1}, {F("x2", 3), P("1", 3), 1}}};
    CHECK(classify_bwr_normal_form(e) == "l1^d+l2^d+l3^d");
    GAD big{5, 2, {{F("x0", 2), P("x1^3", 2), 4}}};
    CHECK_THROWS_AS(classify_bwr_normal_form(big), DomainError);
}

TEST_CASE("two product extraction") {
    // a = (x, y), b = (x, y + eps z), alpha = beta = 1, M = 2 -> limit -z
    std::vector<LinearForm> a = {F("x0", 3), F("x1", 3)};
    std::vector<LinearForm> b = {F("x0", 3), F("x1", 3) + F("x2", 3).scale(Laurent::eps())};
    CHECK(two_product_border_extract(a, a, 2, Laurent(1), Laurent(1), 2).terms.empty());
    SigmaLambdaSigma s = two_product_border_extract(a, b, 2, Laurent(1), Laurent(1), 2);
    Laurent inv = Laurent::eps(-2);
    Poly direct = ((Poly::constant(3, Laurent(1)) + a[0].to_poly().scale(Laurent::eps())) *
                       (Poly::constant(3, Laurent(1)) + a[1].to_poly().scale(Laurent::eps())) -
                   (Poly::constant(3, Laurent(1)) + b[0].to_poly().scale(Laurent::eps())) *
                       (Poly::constant(3, Laurent(1)) + b[1].to_poly().scale(Laurent::eps())))
                      .scale(inv);
    CHECK(limit(s.expand()) == limit(direct));
    CHECK(limit(s.expand()) == P("-x2", 3));
    // scalar difference only
    SigmaLambdaSigma t = two_product_border_extract(a, a, 1, Laurent(1) + Laurent::eps(), Laurent(1), 2);
    CHECK(limit(t.expand()) == P("1", 3));
    // congruence violation
    std::vector<LinearForm> c = {F("x0", 3), F("x2", 3)};
    try {
        two_product_border_extract(a, c, 2, Laurent(1), Laurent(1), 2);
        FAIL("expected error");
    } catch (const DomainError& e) {
        CHECK(e.name == "CongruenceViolation");
    }
}

TEST_CASE("interpolation") {
    // f = x0 * x1 : slices at x0 = 0, 1
    std::vector<Slice> sl;
    for (int g : {0, 1}) {
        SigmaLambdaSigma s;
        s.nvars = 2;
        if (g) s.terms.push_back({Laurent(g), F("x1", 2), Laurent(), 1});
        sl.push_back({Q(g), s});
    }
    CHECK(limit(interpolate_decompositions(sl, 0, 1).expand()) == P("x0*x1", 2));
    // f = x0^2 + x1^2
    std::vector<Slice> sq;
    for (int g : {0, 1, 2}) {
        SigmaLambdaSigma s;
        s.nvars = 2;
        s.terms.push_back({Laurent(1), F("x1", 2), Laurent(), 2});
        s.terms.push_back({Laurent(g * g), LinearForm(2), Laurent(1), 0});
        sq.push_back({Q(g), s});
    }
    SigmaLambdaSigma out = interpolate_decompositions(sq, 0, 2);
    CHECK(limit(out.expand()) == P("x0^2+x1^2", 2));
    CHECK(out.max_exponent() <= 2 + 2);
    // independent of the variable
    std::vector<Slice> ind;
    for (int g : {0, 1}) {
        SigmaLambdaSigma s;
        s.nvars = 2;
        s.terms.push_back({Laurent(1), F("x1", 2), Laurent(), 3});
        ind.push_back({Q(g), s});
    }
    CHECK(interpolate_decompositions(ind, 0, 1).terms.size() == 1);
    ind[1].gamma = 0;
    CHECK_THROWS_AS(interpolate_decompositions(ind, 0, 1), DomainError);
}

TEST_CASE("restricted binomial de-bordering") {
    // eps-free -> exact
    RBResult r = rb_deborder({F("x0", 2), F("x1", 2)}, {F("x0+x1", 2), F("x0+x1", 2)}, 1);
    CHECK(r.exact);
    CHECK(r.limit() == P("x0*x1+(x0+x1)^2", 2));
    // both products vanish individually
    auto e = Laurent::eps();
    RBResult z = rb_deborder({F("x0", 2).scale(e), F("x1", 2)}, {F("x0", 2).scale(e), F("x0", 2)}, 1);
    CHECK(z.exact);
    CHECK(z.limit().is_zero());
    // x0^(d-1) x1 from eps^-1 (x0 + eps x1)^d - eps^-1 x0^d split into linear factors, d = 2
    auto ie = Laurent::eps(-1);
    std::vector<LinearForm> lf = {F("x0", 2).scale(ie) + F("x1", 2), F("x0", 2) + F("x1", 2).scale(e)};
    std::vector<LinearForm> lfr = {F("-x0", 2).scale(ie), F("x0", 2)};
    Poly direct = lf[0].to_poly() * lf[1].to_poly() + lfr[0].to_poly() * lfr[1].to_poly();
    RBResult b = rb_deborder(lf, lfr, 1);
    REQUIRE_FALSE(b.exact);
    CHECK(limit(b.sls.expand()) == limit(direct));
    CHECK(limit(direct) == P("2*x0*x1", 2));
    // three factors, rank two on the second side
    std::vector<LinearForm> lf3 = {F("x0", 3).scale(ie) + F("x1", 3), F("x0", 3) + F("x2", 3).scale(e), F("x0+x1", 3)};
    std::vector<LinearForm> lfr3 = {F("-x0", 3).scale(ie), F("x0", 3), F("x0+x1", 3)};
    RBResult b3 = rb_deborder(lf3, lfr3, 2);
    REQUIRE_FALSE(b3.exact);
    CHECK(limit(b3.sls.expand()) == P("x0*(x1+x2)*(x0+x1)", 3));
    // rank violation
    CHECK_THROWS_AS(rb_deborder({F("x0", 2), F("x1", 2)}, {F("x0", 2), F("x1", 2)}, 1), DomainError);
}

TEST_CASE("json round trips") {
    WaringDecomposition w = high_degree_example(5);
    WaringDecomposition w2 = waring_from_json(json::parse(to_json(w).dump()));
    CHECK(w2.expand() == w.expand());
    KumarExpr k = kumar_build(monomial_power_decomposition(1, 1), true);
    CHECK(kumar_from_json(to_json(k)).expand() == k.expand());
    GAD g = gad_from_border(w);
    CHECK(gad_from_json(to_json(g)).expand() == g.expand());
}
