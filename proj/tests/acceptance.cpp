#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "bwr/circuitc.hpp"
#include "bwr/latin.hpp"
#include "bwr/symrep.hpp"
#include "bwr/waring.hpp"

using namespace bwr;

namespace {

struct Outcome {
    bool ok = true;
    std::ostringstream note;
    void need(bool c, const std::string& what) {
        if (!c && ok) note << what;
        ok = ok && c;
    }
};

bool same_rows(const std::vector<ScanEntry>& got, const std::vector<ScanEntry>& want) {
    if (got.size() != want.size()) return false;
    for (size_t i = 0; i < got.size(); ++i)
        if (got[i].lam != want[i].lam || got[i].a != want[i].a || got[i].b != want[i].b) return false;
    return true;
}

LinearForm lf(int n, std::initializer_list<std::pair<int, long>> cs) {
    LinearForm l(n);
    for (auto [i, c] : cs) l.c[i] += Laurent(c);
    return l;
}

void c1(Outcome& o) {
    SymrepContext ctx;
    for (int D = 1; D <= 7; ++D) o.need(ctx.obstruction_scan(3, D).empty(), "scan 3 " + std::to_string(D) + " not empty");
    o.need(same_rows(ctx.obstruction_scan(3, 8), {{{8, 8, 4, 4}, 2, 1}, {{10, 6, 4, 4}, 4, 3}}), "scan 3 8 differs");
}

void c2(Outcome& o) {
    SymrepContext ctx;
    o.need(same_rows(ctx.obstruction_scan(4, 6), {{{6, 6, 4, 4, 4}, 1, 0},
                                                  {{7, 7, 5, 5}, 1, 0},
                                                  {{7, 7, 7, 3}, 1, 0},
                                                  {{8, 5, 5, 3, 3}, 1, 0}}),
           "scan 4 6 differs");
}

void c3(Outcome& o) {
    SymrepContext ctx;
    o.need(ctx.plethysm_coeff({5, 5, 5, 3, 3}, 7, 3) == 1, "a_(5,5,5,3,3)(7,3) != 1");
    for (int n = 1; n <= 5; ++n)
        for (int m = 1; m <= 5; ++m) {
            o.need(ctx.plethysm_coeff({n * m}, n, m) == 1, "a_(nm) != 1");
            if (n * m >= 2) o.need(ctx.plethysm_coeff({n * m - 1, 1}, n, m) == 0, "a_(nm-1,1) != 0");
        }
}

void c4(Outcome& o) {
    for (int d : {3, 4, 5}) {
        SymrepContext ctx;
        auto r = ctx.reduced_obstruction_check(d);
        o.need(r.first == 4 && r.second == 5, "d = " + std::to_string(d) + " gives (" + std::to_string(r.first) + ", " +
                                                  std::to_string(r.second) + ")");
    }
}

void c5(Outcome& o) {
    std::mt19937 rng(1001);
    for (int t = 0; t < 100; ++t) {
        int n = 1 + (int)(rng() % 4), d = 2 + (int)(rng() % 4), r = 1 + (int)(rng() % 4);
        WaringDecomposition w = random_exact_decomposition(rng, n, d, r);
        KumarExpr k = kumar_build(w, true);
        KumarInverse inv = kumar_invert(k, d);
        o.need(!inv.is_product, "product output");
        o.need(inv.limit() == w.expand(), "limit differs");
        o.need((int)inv.dec.size() <= d * r, "too many summands");
    }
}

void c6(Outcome& o) {
    GAD g = gad_from_border(high_degree_example(5));
    o.need(g.summands.size() == 3, "summand count");
    if (g.summands.size() == 3) {
        int n = 5;
        Poly x2 = Poly::var(n, 2), x3 = Poly::var(n, 3), x4 = Poly::var(n, 4);
        o.need(g.summands[0].ell == lf(n, {{0, 1}}) && g.summands[0].g == x2, "first summand");
        o.need(g.summands[1].ell == lf(n, {{1, 1}}) && g.summands[1].g == x3, "second summand");
        o.need(g.summands[2].ell == lf(n, {{0, 1}, {1, 1}}) && g.summands[2].g == x4.scale(Laurent(2)), "third summand");
        for (auto& s : g.summands) o.need(g.d - s.r + 1 == 4, "power is not 4");
    }
    std::string name;
    try {
        gad_from_border(wild_form_example());
    } catch (const DomainError& e) {
        name = e.name;
    }
    o.need(name == "DegreeTooLow", "wild form gave '" + name + "'");
}

void c7(Outcome& o) {
    std::mt19937 rng(2002);
    for (int t = 0; t < 50; ++t) {
        int r = 1 + (int)(rng() % 4), n = 1 + (int)(rng() % 4);
        int d = std::max(2, r - 1) + (int)(rng() % 3);
        WaringDecomposition w = random_border_decomposition(rng, n, d, r);
        Poly f = limit(w.expand());
        WaringDecomposition e = deborder_waring(w);
        long bound = d * binomial(2 * r - 2, r - 1).get_num().get_si();
        o.need(!e.is_border(), "border output");
        o.need(e.expand() == f, "expansion differs");
        o.need((long)e.size() <= bound, "size bound");
    }
}

void c8(Outcome& o) {
    std::mt19937 rng(3003);
    for (int t = 0; t < 100; ++t) {
        Circuit f = random_ihl_formula(rng, 1 + (int)(rng() % 4), 1 + t % 4);
        MatrixProgram p = ben_or_cleve(f, 0, 1);
        o.need(check_ben_or_cleve(p, eval(f)[0]), "expansion differs");
        o.need((double)p.factors.size() <= std::pow(4.0, arity2_depth(f)), "factor bound");
    }
}

void c9(Outcome& o) {
    std::mt19937 rng(4004);
    for (int t = 0; t < 30; ++t) {
        int d = t % 2 ? 5 : 3;
        Circuit c = random_arity3_formula(rng, 3, d, 8);
        ContinuantResult r = continuant_compile(c, d);
        o.need(equiv_mod_eps(continuant_eval(r.forms, d, c.nvars), eval(c)[0]), "odd case differs");
    }
    for (int t = 0; t < 10; ++t) {
        int d = t % 2 ? 4 : 2;
        Circuit h = random_homogeneous_formula(rng, 3, d);
        Poly f = eval(h)[0];
        ContinuantResult r = continuant_compile(to_arity3(h), d);
        o.need(equiv_mod_eps(continuant_eval(r.forms, d, h.nvars), f), "even case differs");
    }
}

void c10(Outcome& o) {
    std::mt19937 rng(5005);
    for (int t = 0; t < 100; ++t) {
        Circuit f = random_arity3_formula(rng, 3, 3 + 2 * (t % 4), 60);
        Circuit b = brent_arity3(f);
        o.need(eval(b)[0] == eval(f)[0], "brent changed the polynomial");
        o.need(b.depth() <= brent_depth_bound(f.size()), "brent depth bound");
    }
    for (int t = 0; t < 100; ++t) {
        Circuit c = random_arity3_circuit(rng, 3, 8 + t % 12);
        Poly f = eval(c)[0];
        Circuit v = vsbr_arity3(c);
        o.need(eval(v)[0] == f, "vsbr changed the polynomial");
        if (!f.is_zero()) o.need(v.mult_depth() <= vsbr_mult_depth_bound(f.degree()), "vsbr mult-depth bound");
        auto dg = gate_degrees(v);
        for (int i = 0; i < v.size(); ++i)
            if (v.gates[i].kind == GateKind::Mul3)
                for (int x : v.gates[i].ch) o.need(3 * dg[x] <= 2 * dg[i] + 2, "product child degree");
    }
}

void c11(Outcome& o) {
    o.need(alon_tarsi_difference(3) == 0, "AT(3)");
    o.need(alon_tarsi_difference(5) == 0, "AT(5)");
    long at2 = alon_tarsi_difference(2), at4 = alon_tarsi_difference(4);
    Cyclo v2 = fundamental_invariant_eval(row_tableau(3, 2), fundamental_point(2));
    Cyclo v4 = fundamental_invariant_eval(row_tableau(5, 4), fundamental_point(4));
    o.need(v2 == Cyclo(Q(3 * at2)), "d = 2 gives " + v2.str());
    o.need(v4 == Cyclo(Q(5 * at4)), "d = 4 gives " + v4.str());
    o.need(at4 != 0, "AT(4) vanished");
}

void c12(Outcome& o) {
    std::mt19937 rng(6006);
    std::uniform_int_distribution<int> c(-2, 2), e(-2, 2), z(0, 5);
    auto random_scalar = [&] { return Laurent(Cyclo::zeta(6, z(rng)) * Cyclo((long)c(rng)), e(rng)); };
    for (int t = 0; t < 20; ++t) {
        int n = 1 + t % 3, m = 1 + t % 5;
        std::vector<LinearForm> fs;
        for (int i = 0; i < m; ++i) {
            LinearForm l(n);
            for (int j = 0; j < n; ++j) l.c[j] = random_scalar() + random_scalar();
            fs.push_back(l);
        }
        for (int k = 1; k <= 5; ++k) o.need(newton_identity_check(fs, k, n), "newton identity");
    }
    // zeta_d multiples of one form: e_j vanishes below d and e_d = (-1)^(d-1) l^d
    for (int t = 0; t < 20; ++t) {
        int d = std::vector<int>{2, 3, 6}[t % 3], n = 1 + t % 3;
        LinearForm l(n);
        while (l.is_zero())
            for (int j = 0; j < n; ++j) l.c[j] = random_scalar();
        std::vector<LinearForm> fs;
        for (int i = 1; i <= d; ++i) fs.push_back(l.scale(Laurent(Cyclo::zeta(6, (6 / d) * i))));
        std::shuffle(fs.begin(), fs.end(), rng);
        for (int j = 1; j < d; ++j) o.need(elementary_symmetric(fs, j, n).is_zero(), "e_j did not vanish");
        Poly top = fs.back().to_poly().with_nvars(n).pow(d).scale(Laurent(d % 2 ? 1 : -1));
        o.need(elementary_symmetric(fs, d, n) == top, "e_d filter");
    }
}

}  // namespace

int main() {
    std::vector<std::pair<std::string, std::function<void(Outcome&)>>> cs = {
        {"scan d=3: empty for delta<=7, delta=8 rows", c1},
        {"scan d=4 delta=6 rows", c2},
        {"plethysm spot values", c3},
        {"reduced obstruction (4,5) for d=3,4,5", c4},
        {"kumar build/invert roundtrip x100", c5},
        {"gad on the d=5 example, wild form rejected", c6},
        {"deborder equality and bound x50", c7},
        {"ben-or cleve exactness x100", c8},
        {"continuant compilation 30 odd + 10 even", c9},
        {"brent and vsbr semantics and bounds x100", c10},
        {"alon-tarsi and fundamental invariant", c11},
        {"newton identities and e_d filter over Q(zeta6)[eps]", c12},
    };
    int failed = 0;
    for (size_t i = 0; i < cs.size(); ++i) {
        Outcome o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            cs[i].second(o);
        } catch (const std::exception& e) {
            o.ok = false;
            o.note << "exception: " << e.what();
        }
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (o.ok ? "PASS" : "FAIL") << " " << i + 1 << " " << cs[i].first;
        if (!o.ok) std::cout << " (" << o.note.str() << ")";
        std::printf(" [%.1fs]\n", s);
        std::cout.flush();
        failed += !o.ok;
    }
    return failed ? 1 : 0;
}
