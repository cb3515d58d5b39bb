#include <doctest.h>

#include <set>

#include "bwr/symrep.hpp"

using namespace bwr;

TEST_CASE("pieri order") {
    CHECK(pieri_precedes({2, 1}, {3, 1}));
    CHECK_FALSE(pieri_precedes({1, 1}, {3, 3}));
    CHECK(pieri_precedes({4, 2}, {4, 2}));
    CHECK(pieri_precedes({}, {3}));
    CHECK_FALSE(pieri_precedes({}, {1, 1}));
    CHECK_FALSE(pieri_precedes({3}, {2, 1}));
}

TEST_CASE("partition helpers") {
    CHECK(transpose({3, 1}) == Partition{2, 1, 1});
    CHECK(frequency({3, 3, 2}, 4) == std::vector<int>{0, 1, 2, 0});
    CHECK(partitions_of(5, 5, 5).size() == 7);
    CHECK(partitions_of(6, 2, 6).size() == 4);
    CHECK(parse_partition("(8,8,4,4,0)") == Partition{8, 8, 4, 4});
    CHECK(partition_str({7, 7, 5, 5}, 5) == "(7,7,5,5,0)");
    CHECK_THROWS_AS(make_partition({1, 2}), DomainError);
}

TEST_CASE("characters") {
    SymrepContext ctx;
    for (auto& nu : partitions_of(5, 5, 5)) CHECK(ctx.mn_character({5}, nu) == 1);
    for (auto& nu : partitions_of(5, 5, 5)) {
        int odd = 0;
        for (int x : nu) odd += (x - 1);
        CHECK(ctx.mn_character({1, 1, 1, 1, 1}, nu) == (odd % 2 ? -1 : 1));
    }
    CHECK(ctx.mn_character({2, 1}, {1, 1, 1}) == 2);
    CHECK(ctx.mn_character({2, 1}, {3}) == -1);
    CHECK(ctx.mn_character({3, 2, 1}, {1, 1, 1, 1, 1, 1}) == 16);
    CHECK_THROWS_AS(ctx.mn_character({2}, {1}), DomainError);
}

TEST_CASE("character orthogonality") {
    SymrepContext ctx;
    for (int n = 1; n <= 6; ++n) {
        auto ps = partitions_of(n, n, n);
        Q fact = factorial(n);
        for (auto& a : ps)
            for (auto& b : ps) {
                // sum over classes: chi^a chi^b |class| = n! [a == b]
                Q s = 0;
                for (auto& nu : ps) {
                    Q z = 1;
                    std::map<int, int> m;
                    for (int x : nu) ++m[x];
                    for (auto [i, k] : m) {
                        for (int t = 0; t < k; ++t) z *= i;
                        z *= factorial(k);
                    }
                    s += Q(ctx.mn_character(a, nu) * ctx.mn_character(b, nu)) * fact / z;
                }
                CHECK(s == (a == b ? fact : Q(0)));
            }
        // column orthogonality
        for (auto& nu : ps)
            for (auto& om : ps) {
                long s = 0;
                for (auto& lam : ps) s += ctx.mn_character(lam, nu) * ctx.mn_character(lam, om);
                if (nu != om) CHECK(s == 0);
            }
    }
}

TEST_CASE("plethysm spot values") {
    SymrepContext ctx;
    CHECK(ctx.plethysm_coeff({6}, 2, 3) == 1);
    CHECK(ctx.plethysm_coeff({5, 1}, 2, 3) == 0);
    CHECK(ctx.plethysm_coeff({4, 2}, 2, 3) == 1);
    CHECK(ctx.plethysm_coeff({2, 2}, 2, 2) == 1);
    CHECK(ctx.plethysm_coeff({3, 1}, 2, 2) == 0);
    CHECK(ctx.plethysm_coeff({5, 5, 5, 3, 3}, 7, 3) == 1);
    CHECK(ctx.plethysm_coeff({8, 8, 4, 4}, 8, 3) == 2);
    for (int n = 1; n <= 5; ++n)
        for (int m = 1; m <= 5; ++m) {
            CHECK(ctx.plethysm_coeff({n * m}, n, m) == 1);
            if (n * m >= 2) CHECK(ctx.plethysm_coeff({n * m - 1, 1}, n, m) == 0);
        }
    CHECK_THROWS_AS(ctx.plethysm_coeff({3}, 2, 2), DomainError);
}

TEST_CASE("plethysm of degree one") {
    SymrepContext ctx;
    for (int delta = 1; delta <= 5; ++delta)
        for (auto& mu : partitions_of(delta, delta, delta))
            CHECK(ctx.plethysm_coeff(mu, 1, delta) == (mu.size() == 1 ? 1 : 0));
}

TEST_CASE("plethysm dimension bookkeeping") {
    SymrepContext ctx;
    for (int n = 2; n <= 3; ++n)
        for (int d = 1; d <= 3; ++d)
            for (int delta = 1; delta <= 3; ++delta) {
                Q total = 0;
                for (auto& mu : partitions_of(d * delta, n, d * delta))
                    total += Q(ctx.plethysm_coeff(mu, d, delta)) * weyl_dimension(mu, n);
                Q inner = binomial(n - 1 + delta, delta);
                Q expect = binomial(inner.get_num().get_si() + d - 1, d);
                CHECK(total == expect);
            }
}

TEST_CASE("table agrees with single coefficients") {
    SymrepContext ctx, other;
    const auto& t = ctx.plethysm_table(4, 3, 3);
    for (auto& mu : partitions_of(12, 3, 12)) {
        auto it = t.find(mu);
        CHECK((it == t.end() ? 0 : it->second) == other.plethysm_coeff(mu, 4, 3));
    }
}

TEST_CASE("column stripping on small analogues") {
    SymrepContext ctx;
    // d rows, even number of columns
    for (int d : {2, 3})
        for (int cols : {2, 4})
            for (int i = 1; i <= 3; ++i)
                for (auto& nu : partitions_of(d * i, d, d * i)) {
                    Partition big(d, cols);
                    for (size_t k = 0; k < nu.size(); ++k) big[k] += nu[k];
                    CHECK(ctx.plethysm_coeff(big, d, i + cols) == ctx.plethysm_coeff(nu, d, i));
                }
}

TEST_CASE("littlewood richardson") {
    CHECK(lr_coeff({3, 1}, {3, 1}, {}) == 1);
    CHECK(lr_coeff({2, 1}, {1}, {1, 1}) == 1);
    CHECK(lr_coeff({2, 1}, {1}, {2}) == 1);
    CHECK(lr_coeff({3, 2, 1}, {2, 1}, {2, 1}) == 2);
    CHECK(lr_coeff({4, 2}, {2, 1}, {2, 1}) == 1);
    CHECK(lr_coeff({2, 2}, {2}, {1, 1}) == 0);
    // single rows: multi LR equals Kostka numbers
    for (auto& lam : partitions_of(6, 3, 6))
        for (auto& content : std::vector<std::vector<int>>{{3, 2, 1}, {2, 2, 2}, {4, 2}, {1, 4, 1}}) {
            std::vector<Partition> rows;
            for (int c : content)
                if (c) rows.push_back({c});
            CHECK(multi_lr_coeff(lam, rows) == kostka_number(lam, content));
        }
    for (int d = 3; d <= 5; ++d) CHECK(multi_lr_coeff({5 * d - 1, 1}, {{2 * d}, {3 * d}}) == 1);
    CHECK(multi_lr_coeff({5 * 3 - 1, 1}, {{15}}) == 0);
}

TEST_CASE("orbit multiplicities") {
    SymrepContext ctx;
    CHECK(ctx.orbit_mult_P11({3}, 3, 1) == 2);
    CHECK(ctx.orbit_mult_P11({8, 8, 4, 4}, 3, 8) == 1);
    CHECK(ctx.orbit_mult_P11({10, 6, 4, 4}, 3, 8) == 3);
    CHECK_THROWS_AS(ctx.orbit_mult_P11({3, 1, 1, 1, 1}, 3, 1), DomainError);
    CHECK(ctx.orbit_mult_powersum({14, 1}, 3, 5, 4) == 5);
    for (int d = 2; d <= 4; ++d) {
        for (int m = 1; m <= 3; ++m) CHECK(ctx.orbit_mult_powersum({d}, d, 1, m) == 1);
        for (int m = 2; m <= 3; ++m) CHECK(ctx.orbit_mult_powersum({2 * d}, d, 2, m) == 2);
    }
}

TEST_CASE("scan small degrees is empty for d = 3") {
    SymrepContext ctx;
    for (int D = 1; D <= 5; ++D) CHECK(ctx.obstruction_scan(3, D).empty());
}

TEST_CASE("obstruction bounds") {
    SymrepContext ctx;
    auto r = ctx.reduced_obstruction_check(3);
    CHECK(r.first == 4);
    CHECK(r.second == 5);
    CHECK_THROWS_AS(ctx.reduced_obstruction_check(2), DomainError);
}

TEST_CASE("stabilizer") {
    for (int d : {2, 3})
        for (int r : {1, 2, 3})
            for (int s : {0, 1, 2, 3})
                for (auto& g : stabilizer_generators(d, r, s)) CHECK(verify_stabilizer(g.m, d, r, s));
    auto gens = stabilizer_generators(3, 2, 1);
    std::set<std::string> names;
    for (auto& g : gens) names.insert(g.name);
    CHECK(names.count("block-swap"));
    CHECK(names.count("y-root-scaling"));
    // generic diagonal fails
    CMatrix m(7, std::vector<Cyclo>(7, Cyclo(0)));
    for (int i = 0; i < 7; ++i) m[i][i] = Cyclo(1);
    m[0][0] = Cyclo(2);
    CHECK_FALSE(verify_stabilizer(m, 3, 2, 1));
}

TEST_CASE("characterization") {
    auto c = characterize_by_stabilizer(p_rs(3, 2, 2), 3, 2, 2);
    CHECK(c.alpha == Laurent(1));
    CHECK(c.beta == Laurent(1));
    auto c2 = characterize_by_stabilizer(p_rs(3, 2, 0).with_nvars(8).scale(Laurent(2)), 3, 2, 2);
    CHECK(c2.alpha == Laurent(2));
    CHECK(c2.beta.is_zero());
    Poly x = Poly::monomial(7, Monomial({3}), Laurent(1));
    try {
        characterize_by_stabilizer(x, 3, 2, 1);
        FAIL("expected error");
    } catch (const DomainError& e) {
        CHECK(e.name == "NotInvariant");
        CHECK(std::string(e.what()) == "torus");
    }
}

TEST_CASE("scan d = 3 delta = 8") {
    SymrepContext ctx;
    auto s = ctx.obstruction_scan(3, 8);
    REQUIRE(s.size() == 2);
    CHECK(s[0].lam == Partition{8, 8, 4, 4});
    CHECK(s[0].a == 2);
    CHECK(s[0].b == 1);
    CHECK(s[1].lam == Partition{10, 6, 4, 4});
    CHECK(s[1].a == 4);
    CHECK(s[1].b == 3);
    // orbit side collects every delta <= D, so it may exceed the ambient coefficient
    CHECK(ctx.orbit_mult_P11({3}, 3, 1) > ctx.plethysm_coeff({3}, 1, 3));
}
