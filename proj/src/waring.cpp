#include "bwr/waring.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace bwr {

namespace {

const int NO_CUTOFF = 1 << 29;

int pole_order(const Laurent& s) { return s.is_zero() ? 0 : std::max(0, -s.min_exp()); }

int pole_order(const LinearForm& l) {
    int p = 0;
    for (auto& c : l.c) p = std::max(p, pole_order(c));
    return p;
}

Poly affine_poly(const LinearForm& l, const Laurent& c, int n) {
    Poly p = l.to_poly().with_nvars(n);
    if (!c.is_zero()) p += Poly::constant(n, c);
    return p;
}

// E[j] = e_j(forms) for j <= maxdeg; cutoff(i) bounds eps exponents kept after form i
std::vector<Poly> esym_table(const std::vector<LinearForm>& forms, int nvars, int maxdeg,
                             const std::function<int(size_t)>& cutoff) {
    std::vector<Poly> E(maxdeg + 1, Poly(nvars));
    E[0] = Poly::constant(nvars, Laurent(1));
    for (size_t i = 0; i < forms.size(); ++i) {
        Poly l = forms[i].to_poly().with_nvars(nvars);
        int cut = cutoff(i);
        int top = std::min<int>(maxdeg, (int)i + 1);
        for (int j = top; j >= 1; --j) {
            if (E[j - 1].is_zero()) continue;
            E[j] += E[j - 1].mul_trunc(l, maxdeg, cut);
        }
    }
    return E;
}

bool proportional(const LinearForm& a, const LinearForm& b) {
    int n = std::max(a.nvars(), b.nvars());
    auto at = [](const LinearForm& l, int i) { return i < l.nvars() ? l.c[i] : Laurent(); };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (at(a, i) * at(b, j) != at(a, j) * at(b, i)) return false;
    return true;
}

// ratio c with a = c*b, for proportional eps-free nonzero forms
Cyclo ratio(const LinearForm& a, const LinearForm& b) {
    for (int i = 0; i < b.nvars(); ++i)
        if (!b.c[i].is_zero()) return a.c[i].constant() / b.c[i].constant();
    throw DomainError("ZeroForm", "ratio against zero form");
}

LinearForm normalize_first(const LinearForm& l) {
    for (auto& c : l.c)
        if (!c.is_zero()) return l.scale(Laurent(c.constant().inverse()));
    throw DomainError("ZeroForm", "cannot normalize zero form");
}

// p / l^e for an eps-free form l with a unit pivot
Poly divide_by_form_power(const Poly& p, const LinearForm& l, int e) {
    if (e == 0) return p;
    int n = p.nvars();
    int piv = 0;
    while (l.c[piv].is_zero()) ++piv;
    Cyclo cp = l.c[piv].constant();
    // y_piv = l(x): x_piv = (y_piv - sum_{i != piv} c_i x_i) / c_piv
    std::vector<LinearForm> fwd(n), back(n);
    for (int i = 0; i < n; ++i) {
        fwd[i] = LinearForm::var(n, i);
        back[i] = LinearForm::var(n, i);
    }
    LinearForm xp(n);
    xp.c[piv] = Laurent(cp.inverse());
    for (int i = 0; i < n; ++i)
        if (i != piv && i < l.nvars() && !l.c[i].is_zero()) xp.c[i] = -(l.c[i] * Laurent(cp.inverse()));
    fwd[piv] = xp;
    LinearForm lp(n);
    for (int i = 0; i < l.nvars(); ++i) lp.c[i] = l.c[i];
    back[piv] = lp;
    Poly q = substitute_linear(p, fwd);
    Poly r(n);
    for (auto& [m, c] : q.terms()) {
        if (m[piv] < e) throw DomainError("LocalLimitFailure", "class limit is not divisible by its base power");
        std::vector<int> ex = m.e;
        ex[piv] -= e;
        r.add_term(Monomial(ex), c);
    }
    return substitute_linear(r, back);
}

std::vector<Cyclo> coeff_vector(const Poly& p, const std::vector<Monomial>& basis) {
    std::vector<Cyclo> v;
    v.reserve(basis.size());
    for (auto& m : basis) v.push_back(p.coeff(m).constant());
    return v;
}

void monomials_of_degree(int n, int d, std::vector<int>& cur, std::vector<Monomial>& out) {
    if ((int)cur.size() == n - 1) {
        cur.push_back(d);
        out.push_back(Monomial(cur));
        cur.pop_back();
        return;
    }
    for (int k = d; k >= 0; --k) {
        cur.push_back(k);
        monomials_of_degree(n, d - k, cur, out);
        cur.pop_back();
    }
}

std::vector<Monomial> all_monomials(int n, int d) {
    std::vector<Monomial> out;
    std::vector<int> cur;
    if (n == 0) return out;
    monomials_of_degree(n, d, cur, out);
    return out;
}

// Incremental row echelon basis for greedy independence tests.
struct Echelon {
    std::vector<std::vector<Cyclo>> rows;
    std::vector<int> lead;
    bool add(std::vector<Cyclo> v) {
        for (size_t b = 0; b < rows.size(); ++b) {
            Cyclo f = v[lead[b]];
            if (f.is_zero()) continue;
            for (size_t k = 0; k < v.size(); ++k)
                if (!rows[b][k].is_zero()) v[k] -= f * rows[b][k];
        }
        int c = 0;
        while (c < (int)v.size() && v[c].is_zero()) ++c;
        if (c == (int)v.size()) return false;
        Cyclo inv = v[c].inverse();
        for (auto& x : v) x *= inv;
        rows.push_back(v);
        lead.push_back(c);
        return true;
    }
};

Laurent series_inverse(const Laurent& u, int order) {
    // u has min exponent 0 and a nonzero constant; result mod eps^order
    Cyclo u0inv = u.coeff(0).inverse();
    std::vector<Cyclo> inv(order, Cyclo(0));
    if (order > 0) inv[0] = u0inv;
    for (int k = 1; k < order; ++k) {
        Cyclo s(0);
        for (int i = 1; i <= k; ++i) {
            Cyclo ui = u.coeff(i);
            if (!ui.is_zero()) s += ui * inv[k - i];
        }
        inv[k] = -(s * u0inv);
    }
    Laurent r;
    for (int k = 0; k < order; ++k) r += Laurent(inv[k], k);
    return r;
}

bool is_rational_perfect_power(const Q& q, int d, Q& root) {
    mpz_class a = q.get_num(), b = q.get_den();
    mpz_class ra, rb;
    if (a < 0) return false;
    if (!mpz_root(ra.get_mpz_t(), a.get_mpz_t(), d)) return false;
    if (!mpz_root(rb.get_mpz_t(), b.get_mpz_t(), d)) return false;
    root = Q(ra, rb);
    root.canonicalize();
    return true;
}

}  // namespace

// ---------------- value types

Poly WaringDecomposition::expand() const {
    Poly r(nvars);
    for (size_t i = 0; i < forms.size(); ++i) {
        if (scales[i].is_zero()) continue;
        r += forms[i].to_poly().with_nvars(nvars).pow(d).scale(scales[i]);
    }
    return r;
}

bool WaringDecomposition::is_border() const {
    for (auto& s : scales)
        if (!s.is_constant()) return true;
    for (auto& l : forms)
        if (!l.is_eps_free()) return true;
    return false;
}

Poly KumarExpr::expand() const {
    int m = (int)forms.size();
    auto E = esym_table(forms, nvars, m, [](size_t) { return NO_CUTOFF; });
    Poly r(nvars);
    for (int j = 1; j <= m; ++j) r += E[j];
    return r.scale(alpha);
}

std::vector<Poly> KumarExpr::parts_mod_eps(int maxdeg) const {
    int a = alpha.is_zero() ? 0 : alpha.min_exp();
    int v = 0;
    for (auto& l : forms)
        if (!l.is_zero()) v = std::min(v, l.min_eps());
    size_t m = forms.size();
    auto E = esym_table(forms, nvars, maxdeg, [&](size_t i) { return 1 - a - v * (int)(m - i - 1); });
    std::vector<Poly> out(maxdeg + 1, Poly(nvars));
    for (int j = 1; j <= maxdeg; ++j) out[j] = E[j].scale(alpha).truncate_eps(1);
    return out;
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Plus: return "Plus";
        case Regime::Equal: return "Equal";
        default: return "Minus";
    }
}

Poly ProductForm::expand() const {
    Poly r = Poly::constant(nvars, scale);
    for (auto& l : factors) r = r * l.to_poly().with_nvars(nvars);
    return r;
}

Poly KumarInverse::limit() const { return is_product ? bwr::limit(prod.expand()) : bwr::limit(dec.expand()); }

Poly GAD::expand() const {
    Poly r(nvars);
    for (auto& s : summands) r += s.ell.to_poly().with_nvars(nvars).pow(d - s.r + 1) * s.g.with_nvars(nvars);
    return r;
}

Poly SigmaLambdaSigma::expand() const {
    Poly r(nvars);
    for (auto& t : terms) r += affine_poly(t.form, t.constant, nvars).pow(t.exponent).scale(t.scale);
    return r;
}

int SigmaLambdaSigma::max_exponent() const {
    int e = 0;
    for (auto& t : terms) e = std::max(e, t.exponent);
    return e;
}

Poly ExactRB::expand() const {
    Poly r(nvars);
    if (has_first) {
        Poly p = Poly::constant(nvars, Laurent(1));
        for (auto& l : first) p = p * l.to_poly().with_nvars(nvars);
        r += p;
    }
    if (has_second) {
        Poly p = Poly::constant(nvars, Laurent(1));
        for (auto& l : second) p = p * l.to_poly().with_nvars(nvars);
        r += p;
    }
    return r;
}

Poly RBResult::limit() const { return exact ? rb.expand() : bwr::limit(sls.expand()); }

// ---------------- symmetric functions of forms

Poly elementary_symmetric(const std::vector<LinearForm>& forms, int k, int nvars) {
    if (k < 0 || k > (int)forms.size()) return Poly(nvars);
    return esym_table(forms, nvars, k, [](size_t) { return NO_CUTOFF; })[k];
}

Poly power_sum(const std::vector<LinearForm>& forms, int k, int nvars) {
    Poly r(nvars);
    for (auto& l : forms) r += l.to_poly().with_nvars(nvars).pow(k);
    return r;
}

bool newton_identity_check(const std::vector<LinearForm>& forms, int k, int nvars) {
    auto E = esym_table(forms, nvars, k, [](size_t) { return NO_CUTOFF; });
    Poly rhs(nvars);
    for (int i = 1; i <= k; ++i) {
        Poly t = E[k - i] * power_sum(forms, i, nvars);
        if (i % 2 == 0) t = -t;
        rhs += t;
    }
    return E[k].scale(Laurent(k)) == rhs;
}

// ---------------- Kumar expressions

Laurent scale_root(const Laurent& s, int d) {
    if (s.terms().size() != 1) throw DomainError("NonRepresentableScale", "scale " + s.str() + " is not a single eps-term");
    auto [k, c] = *s.terms().begin();
    if (k % d != 0) throw DomainError("NonRepresentableScale", "eps exponent of " + s.str() + " not divisible by d");
    int N = c.order();
    for (int j = 0; j < N; ++j) {
        Cyclo t = c * Cyclo::zeta(N, -j);
        if (!t.is_rational()) continue;
        Q q = t.rational(), root;
        Cyclo unit = Cyclo::zeta(N * d, j);
        if (q < 0) {
            unit *= Cyclo::zeta(2 * d, 1);
            q = -q;
        }
        if (!is_rational_perfect_power(q, d, root)) break;
        return Laurent(unit * Cyclo(root), k / d);
    }
    throw DomainError("NonRepresentableScale", "scale " + s.str() + " has no d-th root in a cyclotomic field");
}

KumarExpr kumar_build(const WaringDecomposition& dec, bool border) {
    int d = dec.d;
    if (d < 1) throw DomainError("DegreeMismatch", "degree must be positive");
    int w = 1;
    if (border) {
        int P = 0;
        for (size_t i = 0; i < dec.forms.size(); ++i) {
            if (dec.scales[i].is_zero() || dec.forms[i].is_zero()) continue;
            P = std::max(P, -(dec.scales[i].min_exp() + d * dec.forms[i].min_eps()));
        }
        w = std::max(1, 2 * P / d + 1);
    }
    KumarExpr k;
    k.nvars = dec.nvars;
    k.alpha = Laurent(Cyclo(-1), -w * d);
    for (size_t i = 0; i < dec.forms.size(); ++i) {
        if (dec.scales[i].is_zero() || dec.forms[i].is_zero()) continue;
        Laurent c = scale_root(dec.scales[i], d);
        for (int j = 0; j < d; ++j)
            k.forms.push_back(dec.forms[i].scale(Laurent(-Cyclo::zeta(d, j), w) * c));
    }
    return k;
}

KumarExpr kumar_product_build(const std::vector<LinearForm>& forms) {
    KumarExpr k;
    k.nvars = forms.empty() ? 0 : forms[0].nvars();
    k.alpha = Laurent::eps((int)forms.size());
    for (auto& l : forms) {
        if (l.is_zero()) throw DomainError("ZeroForm", "product factor is zero");
        k.forms.push_back(l.scale(Laurent::eps(-1)));
    }
    return k;
}

Regime classify_kumar(const KumarExpr& e) {
    if (e.alpha.is_zero()) throw DomainError("ZeroAlpha", "alpha is zero");
    int m = e.alpha.min_exp();
    return m > 0 ? Regime::Plus : m == 0 ? Regime::Equal : Regime::Minus;
}

KumarInverse kumar_invert(const KumarExpr& e, int d) {
    Regime reg = classify_kumar(e);
    int m = (int)e.forms.size();
    int top = std::max(m, d);
    auto parts = e.parts_mod_eps(top);
    for (int j = 1; j <= top; ++j) {
        if (j == d || parts[j].is_zero()) continue;
        if (parts[j].min_eps() <= 0) {
            Poly res = parts[j].truncate_eps(1);
            throw DomainError("NotHomogeneousLimit",
                              "degree " + std::to_string(j) + " part does not vanish: " + res.str());
        }
    }
    Poly f = limit(parts[d]);
    KumarInverse out;
    if (reg == Regime::Plus) {
        int N = e.alpha.min_exp();
        Cyclo gamma = e.alpha.coeff(N);
        int S = N;
        ProductForm pf;
        pf.nvars = e.nvars;
        bool ok = true;
        for (auto& l : e.forms) {
            int v = std::min(0, l.min_eps());
            S += v;
            if (v < 0) {
                pf.factors.push_back(l.lowest());
            } else {
                for (auto& c : l.c)
                    if (!c.coeff(0).is_zero()) ok = false;
            }
        }
        if (S > 0) {
            pf.scale = Laurent();
            pf.factors.clear();
        } else {
            pf.scale = Laurent(gamma);
            if (S < 0 || (int)pf.factors.size() != d) ok = false;
        }
        if (!ok || pf.expand() != f)
            throw DomainError("ProductReadoffFailure", "limit is not the product of the lowest pole factors");
        out.is_product = true;
        out.prod = pf;
        return out;
    }
    WaringDecomposition w;
    w.d = d;
    w.nvars = e.nvars;
    Laurent base = e.alpha * Laurent(Q(d % 2 == 1 ? 1 : -1, d));
    for (auto& l : e.forms) {
        if (l.is_zero()) continue;
        // pull a pure eps power out of the form
        int lo = l.min_eps(), hi = lo;
        for (auto& c : l.c)
            if (!c.is_zero()) hi = std::max(hi, c.max_exp());
        if (lo == hi)
            w.add(base * Laurent::eps(lo * d), l.scale(Laurent::eps(-lo)));
        else
            w.add(base, l);
    }
    if (limit(w.expand()) != f) throw DomainError("NewtonMismatch", "power-sum readout differs from the limit");
    out.dec = w;
    return out;
}

// ---------------- restricted binomial machinery

SigmaLambdaSigma two_product_border_extract(const std::vector<LinearForm>& a, const std::vector<LinearForm>& b, int M,
                                            const Laurent& alpha, const Laurent& beta, int d) {
    if (M < 1) throw DomainError("InvalidExponent", "M must be at least 1");
    int n = 0;
    for (auto& l : a) n = std::max(n, l.nvars());
    for (auto& l : b) n = std::max(n, l.nvars());
    for (auto* side : {&a, &b})
        for (auto& l : *side)
            if (pole_order(l) > 0) throw DomainError("PoleInput", "form " + l.str() + " has a pole at eps=0");
    if (pole_order(alpha) > 0 || pole_order(beta) > 0) throw DomainError("PoleInput", "scalar with a pole");
    SigmaLambdaSigma out;
    out.nvars = n;
    Cyclo a0 = alpha.coeff(0);
    if (a0.is_zero() || a0 != beta.coeff(0)) throw DomainError("ScaleMismatch", "alpha and beta must agree and be nonzero at eps=0");
    if (a == b && alpha == beta) return out;
    Laurent diff = alpha - beta;
    if (!diff.is_zero() && diff.min_exp() < M) throw DomainError("DivergentLimit", "eps^-M (alpha - beta) diverges");
    Cyclo f0 = diff.coeff(M);
    if (!f0.is_zero()) out.terms.push_back({Laurent(f0), LinearForm(n), Laurent(1), 0});
    auto cut = [&](size_t) { return M; };
    auto Ea = esym_table(a, n, M, cut), Eb = esym_table(b, n, M, cut);
    for (int j = 1; j < M; ++j) {
        Poly dj = Ea[j] - Eb[j];
        if (dj.is_zero()) continue;
        if (dj.min_eps() < M - j) throw DomainError("CongruenceViolation", "e_" + std::to_string(j) + "(a) and e_" +
                                                                              std::to_string(j) + "(b) differ below eps^" +
                                                                              std::to_string(M - j));
        if (j > d && !dj.eps_coeff(M - j).is_zero())
            throw DomainError("DegreeMismatch", "degree " + std::to_string(j) + " part survives");
    }
    for (int j = 1; j <= std::min(d, M); ++j) {
        Laurent c(a0 * Cyclo(Q(j % 2 == 1 ? 1 : -1, j)), j - M);
        for (auto& l : a) out.terms.push_back({c, l, Laurent(), j});
        for (auto& l : b) out.terms.push_back({-c, l, Laurent(), j});
    }
    return out;
}

WaringDecomposition monomial_power_decomposition(int a, int b) {
    WaringDecomposition w;
    w.d = a + b;
    w.nvars = 2;
    if (a == 0 || b == 0) {
        w.add(Laurent(1), LinearForm::var(2, a == 0 ? 1 : 0));
        return w;
    }
    int big = a >= b ? 0 : 1, hi = std::max(a, b), n = a + b;
    Cyclo norm = Cyclo(Q(1) / (Q(hi + 1) * binomial(n, hi)));
    for (int k = 0; k <= hi; ++k) {
        Cyclo z = Cyclo::zeta(hi + 1, k);
        LinearForm l(2);
        l.c[big] = Laurent(z);
        l.c[1 - big] = Laurent(1);
        w.add(Laurent(z * norm), l);
    }
    return w;
}

WaringDecomposition monomial_border_decomposition(int a, int b) {
    WaringDecomposition w;
    w.d = a + b;
    w.nvars = 2;
    if (a == 0 || b == 0) {
        w.add(Laurent(1), LinearForm::var(2, a == 0 ? 1 : 0));
        return w;
    }
    // eps goes with the variable of smaller exponent
    int small = a <= b ? 0 : 1, lo = std::min(a, b), n = a + b;
    Q norm = Q(1) / (binomial(n, lo) * factorial(lo));
    for (int k = 0; k <= lo; ++k) {
        Q c = norm * binomial(lo, k) * ((lo - k) % 2 ? -1 : 1);
        LinearForm l(2);
        l.c[1 - small] = Laurent(1);
        l.c[small] = Laurent(Cyclo(Q(k)), 1);
        w.add(Laurent(Cyclo(c), -lo), l);
    }
    return w;
}

int essential_variables(const Poly& f) {
    int n = f.nvars();
    std::vector<Poly> parts;
    std::set<Monomial> mons;
    for (int i = 0; i < n; ++i) {
        parts.push_back(f.partial(i));
        for (auto& [m, c] : parts.back().terms()) mons.insert(m);
    }
    std::vector<Monomial> basis(mons.begin(), mons.end());
    CMatrix M;
    for (auto& p : parts) M.push_back(coeff_vector(p, basis));
    return matrix_rank(M);
}

// ---------------- generalized additive decompositions

GAD gad_from_border(const WaringDecomposition& dec) {
    int d = dec.d, n = dec.nvars;
    int r = (int)dec.size();
    if (d < r - 1)
        throw DomainError("DegreeTooLow", "d = " + std::to_string(d) + " < r - 1 = " + std::to_string(r - 1));
    Poly target = limit(dec.expand());
    std::vector<LinearForm> base;
    std::vector<std::vector<int>> cls;
    for (int i = 0; i < r; ++i) {
        if (dec.scales[i].is_zero() || dec.forms[i].is_zero()) continue;
        LinearForm low = dec.forms[i].lowest();
        size_t k = 0;
        while (k < base.size() && !proportional(base[k], low)) ++k;
        if (k == base.size()) {
            base.push_back(low);
            cls.emplace_back();
        }
        cls[k].push_back(i);
    }
    GAD g;
    g.d = d;
    g.nvars = n;
    for (size_t k = 0; k < base.size(); ++k) {
        Poly S(n);
        for (int i : cls[k]) S += dec.forms[i].to_poly().with_nvars(n).pow(d).scale(dec.scales[i]);
        if (S.is_zero()) continue;
        int q = S.min_eps();
        if (q > 0) continue;
        if (q < 0)
            throw DomainError("CrossClassCancellation",
                              "class of " + base[k].str() + " has a pole of order " + std::to_string(-q));
        Poly fk = S.eps_coeff(0);
        int rk = (int)cls[k].size();
        LinearForm ell = normalize_first(base[k]);
        g.summands.push_back({ell, divide_by_form_power(fk, ell, d - rk + 1), rk});
    }
    if (g.expand() != target) throw DomainError("CrossClassCancellation", "class limits do not add up to the limit");
    return g;
}

WaringDecomposition deborder_waring(const WaringDecomposition& dec) {
    GAD G = gad_from_border(dec);
    int d = dec.d, n = dec.nvars;
    long R = std::max<long>(2, (long)dec.size());
    WaringDecomposition out;
    out.d = d;
    out.nvars = n;
    for (auto& s : G.summands) {
        int a = d - s.r + 1, t = s.r - 1;
        if (t == 0) {
            out.add(s.g.coeff(Monomial()), s.ell);
            continue;
        }
        // coordinates g actually depends on: column space of the partials matrix
        std::vector<Monomial> pm = all_monomials(n, t - 1);
        CMatrix cols(pm.size(), std::vector<Cyclo>(n, Cyclo(0)));
        for (int i = 0; i < n; ++i) {
            Poly p = s.g.partial(i);
            for (size_t j = 0; j < pm.size(); ++j) cols[j][i] = p.coeff(pm[j]).constant();
        }
        std::vector<std::vector<Cyclo>> psi;
        for (int j : independent_rows(cols)) psi.push_back(cols[j]);
        int e = (int)psi.size();
        std::vector<Monomial> tm = all_monomials(n, t);
        long need = (long)binomial(e + t - 1, t).get_num().get_si();
        std::vector<LinearForm> cand;
        Echelon ech;
        std::vector<int> digits(e, -R);
        while ((long)cand.size() < need) {
            bool zero = std::all_of(digits.begin(), digits.end(), [](int x) { return x == 0; });
            if (!zero) {
                LinearForm L(n);
                for (int j = 0; j < e; ++j)
                    for (int i = 0; i < n; ++i)
                        if (digits[j] && !psi[j][i].is_zero()) L.c[i] += Laurent(psi[j][i] * Cyclo(digits[j]));
                if (ech.add(coeff_vector(L.to_poly().pow(t), tm))) cand.push_back(L);
            }
            int p = e - 1;
            while (p >= 0 && digits[p] == R) digits[p--] = -R;
            if (p < 0) break;
            ++digits[p];
        }
        if ((long)cand.size() < need) throw DomainError("SpanningSetFailure", "candidate powers do not span");
        CMatrix A(tm.size(), std::vector<Cyclo>(cand.size(), Cyclo(0)));
        for (size_t j = 0; j < cand.size(); ++j) {
            auto v = coeff_vector(cand[j].to_poly().pow(t), tm);
            for (size_t i = 0; i < tm.size(); ++i) A[i][j] = v[i];
        }
        std::vector<Cyclo> lam;
        if (!solve_linear(A, coeff_vector(s.g, tm), lam))
            throw DomainError("SpanningSetFailure", "g is not in the span of the candidate powers");
        for (size_t j = 0; j < cand.size(); ++j) {
            if (lam[j].is_zero()) continue;
            const LinearForm& L = cand[j];
            if (a == 0) {
                out.add(Laurent(lam[j]), L);
                continue;
            }
            if (proportional(L, s.ell)) {
                Cyclo c = ratio(L, s.ell);
                out.add(Laurent(lam[j] * c.pow(t)), s.ell);
                continue;
            }
            WaringDecomposition mp = monomial_power_decomposition(a, t);
            for (size_t q = 0; q < mp.size(); ++q) {
                LinearForm f = s.ell.scale(mp.forms[q].c[0]) + L.scale(mp.forms[q].c[1]);
                out.add(mp.scales[q] * Laurent(lam[j]), f);
            }
        }
    }
    return out;
}

// ---------------- interpolation and restricted binomials

SigmaLambdaSigma interpolate_decompositions(const std::vector<Slice>& slices, int var, int d) {
    if ((int)slices.size() < d + 1) throw DomainError("TooFewNodes", "need d+1 slices");
    std::set<Q> seen;
    for (auto& s : slices)
        if (!seen.insert(s.gamma).second) throw DomainError("DuplicateNodes", "repeated node " + rational_str(s.gamma));
    int n = slices[0].dec.nvars;
    SigmaLambdaSigma out;
    out.nvars = n;
    {
        Poly first = limit(slices[0].dec.expand());
        bool same = true;
        for (int i = 1; i <= d && same; ++i) same = limit(slices[i].dec.expand()) == first;
        if (same) return slices[0].dec;
    }
    CMatrix V(d + 1, std::vector<Cyclo>(d + 1));
    for (int i = 0; i <= d; ++i) {
        Q p = 1;
        for (int j = 0; j <= d; ++j) {
            V[i][j] = Cyclo(p);
            p *= slices[i].gamma;
        }
    }
    CMatrix W = matrix_inverse(V);
    LinearForm xv = LinearForm::var(n, var);
    for (int j = 0; j <= d; ++j) {
        for (int i = 0; i <= d; ++i) {
            if (W[j][i].is_zero()) continue;
            for (auto& t : slices[i].dec.terms) {
                Laurent s = t.scale * Laurent(W[j][i]);
                if (j == 0) {
                    out.terms.push_back({s, t.form, t.constant, t.exponent});
                    continue;
                }
                int e = t.exponent;
                if (e == 0 || (t.form.is_zero() && t.constant.is_zero())) {
                    if (e == 0) out.terms.push_back({s, xv, Laurent(), j});
                    continue;
                }
                if (t.form.is_zero()) {
                    out.terms.push_back({s * t.constant.pow(e), xv, Laurent(), j});
                    continue;
                }
                int tot = j + e;
                int K = pole_order(s) + std::max(pole_order(t.form), pole_order(t.constant)) * tot + 1;
                int lo = std::min(j, e);
                Q norm = Q(1) / (binomial(tot, lo) * factorial(lo));
                for (int k = 0; k <= lo; ++k) {
                    Q c = norm * binomial(lo, k) * ((lo - k) % 2 ? -1 : 1);
                    Laurent sc = s * Laurent(Cyclo(c), -K * lo);
                    Laurent kk(Cyclo(Q(k)), K);
                    if (j <= e)
                        out.terms.push_back({sc, t.form + xv.scale(kk), t.constant, tot});
                    else
                        out.terms.push_back({sc, xv + t.form.scale(kk), t.constant * kk, tot});
                }
            }
        }
    }
    return out;
}

RBResult rb_deborder(std::vector<LinearForm> lf, std::vector<LinearForm> lfr, int k) {
    int d = (int)lf.size();
    if ((int)lfr.size() != d || d == 0) throw DomainError("ArityMismatch", "both products need the same positive length");
    int n = 0;
    for (auto* side : {&lf, &lfr})
        for (auto& l : *side) n = std::max(n, l.nvars());
    for (auto* side : {&lf, &lfr})
        for (auto& l : *side) l.c.resize(n);
    for (auto* side : {&lf, &lfr})
        for (auto& l : *side)
            if (l.is_zero()) throw DomainError("ZeroForm", "zero factor");
    int grank = 0;
    for (int at : {2, 3, 5, 7}) {
        CMatrix m;
        for (auto& l : lfr) {
            std::vector<Cyclo> row;
            for (int i = 0; i < n; ++i) row.push_back(eval_eps(l.c[i], Q(at)));
            m.push_back(row);
        }
        grank = std::max(grank, matrix_rank(m));
    }
    if (grank > k) throw DomainError("RankViolation", "rank " + std::to_string(grank) + " exceeds " + std::to_string(k));
    std::vector<LinearForm> L, Lp;
    int p = 0, pp = 0;
    for (auto& l : lf) {
        int e = l.min_eps();
        p += e;
        L.push_back(l.scale(Laurent::eps(-e)));
    }
    for (auto& l : lfr) {
        int e = l.min_eps();
        pp += e;
        Lp.push_back(l.scale(Laurent::eps(-e)));
    }
    RBResult res;
    if (p >= 0 && pp >= 0) {
        res.exact = true;
        res.rb.nvars = n;
        res.rb.has_first = p == 0;
        res.rb.has_second = pp == 0;
        for (auto& l : L) res.rb.first.push_back(l.lowest());
        for (auto& l : Lp) res.rb.second.push_back(l.lowest());
        return res;
    }
    if (p != pp) throw DomainError("DivergentLimit", "the two products have different pole orders");
    int M = -p;
    // f ~ eps^-M (prod L - prod L''), L''_1 = -L'_1
    Lp[0] = Lp[0].scale(Laurent(-1));
    std::vector<LinearForm> L0, Lp0;
    for (auto& l : L) L0.push_back(l.lowest());
    for (auto& l : Lp) Lp0.push_back(l.lowest());
    std::vector<LinearForm> matched(d);
    std::vector<bool> used(d, false);
    Cyclo kappa(1);
    for (int i = 0; i < d; ++i) {
        int j = 0;
        while (j < d && (used[j] || !proportional(Lp0[j], L0[i]))) ++j;
        if (j == d) throw DomainError("FactorMatchFailure", "no partner for lowest factor " + L0[i].str());
        used[j] = true;
        Cyclo c = ratio(L0[i], Lp0[j]);
        matched[i] = Lp[j].scale(Laurent(c));
        kappa *= c;
    }
    if (kappa != Cyclo(1)) throw DomainError("DivergentLimit", "lowest terms of the two products do not cancel");
    Lp = matched;
    // change of variables sending independent lowest forms to coordinates
    CMatrix rows;
    for (auto& l : L0) {
        std::vector<Cyclo> v;
        for (int i = 0; i < n; ++i) v.push_back(l.c[i].constant());
        rows.push_back(v);
    }
    std::vector<int> ind = independent_rows(rows);
    int r = (int)ind.size();
    CMatrix B;
    for (int i : ind) B.push_back(rows[i]);
    for (int t = 0; t < n && (int)B.size() < n; ++t) {
        CMatrix trial = B;
        std::vector<Cyclo> u(n, Cyclo(0));
        u[t] = Cyclo(1);
        trial.push_back(u);
        if (matrix_rank(trial) == (int)trial.size()) B = trial;
    }
    CMatrix A = matrix_inverse(B);
    auto transform = [&](const LinearForm& l) {
        LinearForm o(n);
        for (int t = 0; t < n; ++t)
            for (int s = 0; s < n; ++s)
                if (!l.c[s].is_zero() && !A[s][t].is_zero()) o.c[t] += l.c[s] * Laurent(A[s][t]);
        return o;
    };
    std::vector<LinearForm> TL, TLp;
    for (auto& l : L) TL.push_back(transform(l));
    for (auto& l : Lp) TLp.push_back(transform(l));
    // grid of node values avoiding zeros of the lowest forms
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    std::vector<std::vector<Q>> grid(r, std::vector<Q>(d + 1));
    long total = 1;
    for (int i = 0; i < r; ++i) total *= d + 1;
    for (int shift = 0;; ++shift) {
        for (int i = 0; i < r; ++i)
            for (int j = 0; j <= d; ++j) grid[i][j] = r == 1 ? Q(j + shift) : Q(j + 1 + shift * primes[i % 12] + i * (d + 1));
        bool ok = true;
        for (long idx = 0; idx < total && ok; ++idx) {
            long rest = idx;
            std::vector<Q> pt(r);
            for (int i = r - 1; i >= 0; --i) {
                pt[i] = grid[i][rest % (d + 1)];
                rest /= d + 1;
            }
            for (auto& l : TL) {
                Cyclo v(0);
                for (int i = 0; i < r; ++i) v += l.c[i].coeff(0) * Cyclo(pt[i]);
                if (v.is_zero()) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) break;
        if (shift > 1000) throw DomainError("GridFailure", "no nonvanishing grid found");
    }
    auto split = [&](const LinearForm& l, const std::vector<Q>& pt, Laurent& a0, LinearForm& lin) {
        a0 = Laurent();
        for (int i = 0; i < r; ++i) a0 += l.c[i] * Laurent(Cyclo(pt[i]));
        lin = LinearForm(n);
        for (int t = r; t < n; ++t) {
            if (l.c[t].is_zero()) continue;
            if (l.c[t].min_exp() < 1) throw DomainError("FactorMatchFailure", "linear part not divisible by eps");
            lin.c[t] = l.c[t].shift(-1);
        }
    };
    std::map<std::vector<int>, SigmaLambdaSigma> level;
    for (long idx = 0; idx < total; ++idx) {
        long rest = idx;
        std::vector<int> key(r);
        std::vector<Q> pt(r);
        for (int i = r - 1; i >= 0; --i) {
            key[i] = rest % (d + 1);
            pt[i] = grid[i][key[i]];
            rest /= d + 1;
        }
        Laurent alpha(1), beta(1);
        std::vector<LinearForm> a, b;
        for (int side = 0; side < 2; ++side) {
            for (auto& l : side == 0 ? TL : TLp) {
                Laurent a0;
                LinearForm lin;
                split(l, pt, a0, lin);
                Laurent inv = series_inverse(a0, M + 1);
                LinearForm q(n);
                for (int t = 0; t < n; ++t)
                    if (!lin.c[t].is_zero()) q.c[t] = lin.c[t].mul_trunc(inv, M + 1);
                (side == 0 ? alpha : beta) *= a0;
                (side == 0 ? a : b).push_back(q);
            }
        }
        level[key] = two_product_border_extract(a, b, M, alpha, beta, d);
        level[key].nvars = n;
    }
    for (int v = r - 1; v >= 0; --v) {
        std::map<std::vector<int>, std::vector<Slice>> groups;
        for (auto& [key, sls] : level) {
            std::vector<int> prefix(key.begin(), key.begin() + v);
            groups[prefix].push_back({grid[v][key[v]], sls});
        }
        std::map<std::vector<int>, SigmaLambdaSigma> next;
        for (auto& [prefix, sl] : groups) next[prefix] = interpolate_decompositions(sl, v, d);
        level = std::move(next);
    }
    SigmaLambdaSigma g = level.begin()->second;
    // back to the original coordinates: y = B x
    for (auto& t : g.terms) {
        LinearForm o(n);
        for (int s = 0; s < n; ++s)
            for (int u = 0; u < n; ++u)
                if (!t.form.c[u].is_zero() && !B[u][s].is_zero()) o.c[s] += t.form.c[u] * Laurent(B[u][s]);
        t.form = o;
    }
    res.exact = false;
    res.sls = g;
    return res;
}

// ---------------- normal forms

std::string classify_bwr_normal_form(const GAD& g) {
    std::vector<int> part;
    int R = 0;
    for (auto& s : g.summands) {
        part.push_back(s.r);
        R += s.r;
    }
    std::sort(part.rbegin(), part.rend());
    if (R == 2) return part.size() == 2 ? "l1^d+l2^d" : "l1^(d-1)*l2";
    if (R != 3) throw DomainError("UnsupportedRank", "border rank " + std::to_string(R) + " not in {2,3}");
    if (part.size() == 3) return "l1^d+l2^d+l3^d";
    if (part.size() == 2) return "l1^d+l2^(d-1)*l3";
    // quadratic g restricted to ell = 0 must have rank at most one
    const auto& s = g.summands[0];
    int n = g.nvars;
    LinearForm ell = normalize_first(s.ell);
    int piv = 0;
    while (ell.c[piv].is_zero()) ++piv;
    std::vector<LinearForm> sub(n);
    for (int i = 0; i < n; ++i) sub[i] = LinearForm::var(n, i);
    LinearForm xp(n);
    for (int i = 0; i < n; ++i)
        if (i != piv && i < ell.nvars()) xp.c[i] = -ell.c[i];
    sub[piv] = xp;
    Poly q = substitute_linear(s.g.with_nvars(n), sub);
    CMatrix H(n, std::vector<Cyclo>(n, Cyclo(0)));
    for (auto& [m, c] : q.terms()) {
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < m[i]; ++k) idx.push_back(i);
        if (idx.size() != 2) throw DomainError("NormalFormMismatch", "g is not quadratic");
        if (idx[0] == idx[1])
            H[idx[0]][idx[0]] += c.constant();
        else {
            H[idx[0]][idx[1]] += c.constant() * Cyclo(Q(1, 2));
            H[idx[1]][idx[0]] += c.constant() * Cyclo(Q(1, 2));
        }
    }
    if (matrix_rank(H) > 1) throw DomainError("NormalFormMismatch", "quadratic part off the base form has rank > 1");
    return "l1^(d-1)*l2+l1^(d-2)*l3^2";
}

// ---------------- JSON

json to_json(const WaringDecomposition& w) {
    json f = json::array(), s = json::array();
    for (auto& l : w.forms) f.push_back(to_json(l));
    for (auto& c : w.scales) s.push_back(to_json(c));
    return json{{"type", "waring"}, {"d", w.d}, {"nvars", w.nvars}, {"forms", f}, {"scales", s}};
}

json to_json(const KumarExpr& k) {
    json f = json::array();
    for (auto& l : k.forms) f.push_back(to_json(l));
    return json{{"type", "kumar"}, {"nvars", k.nvars}, {"alpha", to_json(k.alpha)}, {"forms", f}};
}

json to_json(const ProductForm& p) {
    json f = json::array();
    for (auto& l : p.factors) f.push_back(to_json(l));
    return json{{"type", "product"}, {"nvars", p.nvars}, {"scale", to_json(p.scale)}, {"factors", f}};
}

json to_json(const GAD& g) {
    json s = json::array();
    for (auto& t : g.summands) s.push_back(json{{"ell", to_json(t.ell)}, {"g", to_json(t.g)}, {"r", t.r}});
    return json{{"type", "gad"}, {"d", g.d}, {"nvars", g.nvars}, {"summands", s}};
}

json to_json(const SigmaLambdaSigma& s) {
    json t = json::array();
    for (auto& x : s.terms)
        t.push_back(json{{"scale", to_json(x.scale)},
                         {"form", to_json(x.form)},
                         {"constant", to_json(x.constant)},
                         {"exponent", x.exponent}});
    return json{{"type", "sls"}, {"nvars", s.nvars}, {"terms", t}};
}

json to_json(const ExactRB& r) {
    json a = json::array(), b = json::array();
    for (auto& l : r.first) a.push_back(to_json(l));
    for (auto& l : r.second) b.push_back(to_json(l));
    return json{{"type", "exact-rb"}, {"nvars", r.nvars}, {"has_first", r.has_first}, {"has_second", r.has_second},
                {"first", a}, {"second", b}};
}

namespace {
LinearForm sized_form(const json& j, int n) {
    LinearForm l = form_from_json(j);
    l.c.resize(std::max(n, l.nvars()));
    return l;
}
}  // namespace

WaringDecomposition waring_from_json(const json& j) {
    WaringDecomposition w;
    w.d = j.at("d").get<int>();
    w.nvars = j.at("nvars").get<int>();
    for (auto& f : j.at("forms")) w.forms.push_back(sized_form(f, w.nvars));
    if (j.contains("scales"))
        for (auto& s : j.at("scales")) w.scales.push_back(laurent_from_json(s));
    else
        w.scales.assign(w.forms.size(), Laurent(1));
    if (w.scales.size() != w.forms.size()) throw DomainError("ParseError", "forms and scales differ in length");
    return w;
}

KumarExpr kumar_from_json(const json& j) {
    KumarExpr k;
    k.nvars = j.at("nvars").get<int>();
    k.alpha = laurent_from_json(j.at("alpha"));
    for (auto& f : j.at("forms")) k.forms.push_back(sized_form(f, k.nvars));
    return k;
}

GAD gad_from_json(const json& j) {
    GAD g;
    g.d = j.at("d").get<int>();
    g.nvars = j.at("nvars").get<int>();
    for (auto& s : j.at("summands"))
        g.summands.push_back({sized_form(s.at("ell"), g.nvars), poly_from_json(s.at("g")).with_nvars(g.nvars),
                              s.at("r").get<int>()});
    return g;
}

SigmaLambdaSigma sls_from_json(const json& j) {
    SigmaLambdaSigma s;
    s.nvars = j.at("nvars").get<int>();
    for (auto& t : j.at("terms"))
        s.terms.push_back({laurent_from_json(t.at("scale")), sized_form(t.at("form"), s.nvars),
                           laurent_from_json(t.at("constant")), t.at("exponent").get<int>()});
    return s;
}

// ---------------- examples and random instances

namespace {

LinearForm unit_form(int n, std::initializer_list<std::pair<int, long>> cs) {
    LinearForm l(n);
    for (auto [i, c] : cs) l.c[i] += Laurent(c);
    return l;
}

LinearForm random_int_form(std::mt19937& rng, int n) {
    std::uniform_int_distribution<int> c(-2, 2);
    LinearForm l(n);
    while (l.is_zero())
        for (int i = 0; i < n; ++i) l.c[i] = Laurent((long)c(rng));
    return l;
}

}  // namespace

WaringDecomposition high_degree_example(int d) {
    WaringDecomposition w;
    w.d = d;
    w.nvars = 5;
    Laurent s(Cyclo(Q(1, d)), -1), e = Laurent::eps();
    LinearForm x0 = unit_form(5, {{0, 1}}), x1 = unit_form(5, {{1, 1}}), x01 = unit_form(5, {{0, 1}, {1, 1}});
    w.add(s, x0 + unit_form(5, {{2, 1}}).scale(e));
    w.add(-s, x0);
    w.add(s, x1 + unit_form(5, {{3, 1}}).scale(e));
    w.add(-s, x1);
    w.add(s * Laurent(2), x01 + unit_form(5, {{4, 1}}).scale(e));
    w.add(-s * Laurent(2), x01);
    return w;
}

WaringDecomposition wild_form_example() {
    WaringDecomposition w;
    w.d = 3;
    w.nvars = 5;
    Laurent s(Cyclo(Q(1, 9)), -1), e = Laurent::eps();
    w.add(s * Laurent(3), unit_form(5, {{0, 1}}) + unit_form(5, {{2, 1}}).scale(e));
    w.add(s * Laurent(3), unit_form(5, {{1, 1}}) + unit_form(5, {{3, 1}}).scale(e));
    w.add(s * Laurent(6), unit_form(5, {{0, 1}, {1, 1}}) + unit_form(5, {{4, 1}}).scale(e));
    w.add(-s, unit_form(5, {{0, 1}, {1, 2}}));
    w.add(-s, unit_form(5, {{0, 2}, {1, 1}}));
    return w;
}

WaringDecomposition random_exact_decomposition(std::mt19937& rng, int nvars, int d, int r) {
    std::uniform_int_distribution<int> s(0, 3);
    const long sc[] = {1, -1, 2, -3};
    WaringDecomposition w;
    w.d = d;
    w.nvars = nvars;
    while ((int)w.size() < r) {
        LinearForm l = random_int_form(rng, nvars);
        long k = sc[s(rng)], p = 1;
        for (int i = 0; i < d; ++i) p *= k;
        w.add(Laurent(p), l);
    }
    return w;
}

WaringDecomposition random_border_decomposition(std::mt19937& rng, int nvars, int d, int r) {
    WaringDecomposition w;
    w.d = d;
    w.nvars = nvars;
    std::vector<LinearForm> bases;
    int left = r;
    while (left > 0) {
        int rk = 1 + (int)(rng() % left);
        LinearForm l = random_int_form(rng, nvars);
        bool fresh = true;
        for (auto& b : bases) {
            CMatrix m{std::vector<Cyclo>(nvars), std::vector<Cyclo>(nvars)};
            for (int i = 0; i < nvars; ++i) {
                m[0][i] = b.c[i].constant();
                m[1][i] = l.c[i].constant();
            }
            if (matrix_rank(m) < 2) fresh = false;
        }
        if (!fresh) {
            if (nvars == 1 && !bases.empty()) rk = left;  // only one direction exists
            else continue;
        } else {
            bases.push_back(l);
        }
        LinearForm base = fresh ? l : bases[0];
        LinearForm m = random_int_form(rng, nvars);
        std::vector<long> t;
        while ((int)t.size() < rk) {
            long x = (long)(rng() % 9) - 4;
            if (std::find(t.begin(), t.end(), x) == t.end()) t.push_back(x);
        }
        Q lam((long)(rng() % 3) + 1);
        for (int j = 0; j < rk; ++j) {
            Q wj = lam;
            for (int i = 0; i < rk; ++i)
                if (i != j) wj /= Q(t[j] - t[i]);
            w.add(Laurent(Cyclo(wj), -(rk - 1)), base + m.scale(Laurent(Cyclo(Q(t[j])), 1)));
        }
        left -= rk;
    }
    return w;
}

}  // namespace bwr
