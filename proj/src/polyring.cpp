#include "bwr/polyring.hpp"

#include <cctype>
#include <mutex>
#include <numeric>
#include <sstream>

namespace bwr {

Q parse_rational(const std::string& s) {
    Q q;
    if (q.set_str(s, 10) != 0) throw DomainError("ParseError", "bad rational: " + s);
    q.canonicalize();
    return q;
}

std::string rational_str(const Q& q) { return q.get_str(); }

namespace {

using QPoly = std::vector<Q>;

void strip(QPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

QPoly poly_divexact(QPoly a, const QPoly& b) {
    strip(a);
    int db = (int)b.size() - 1;
    if ((int)a.size() - 1 < db) return {};
    QPoly q(a.size() - db, 0);
    for (int i = (int)a.size() - 1; i >= db; --i) {
        Q c = a[i] / b[db];
        q[i - db] = c;
        if (c == 0) continue;
        for (int j = 0; j <= db; ++j) a[i - db + j] -= c * b[j];
    }
    return q;
}

std::mutex phi_mu;
std::map<int, QPoly> phi_cache;

void reduce_mod(QPoly& p, int N) {
    const QPoly& phi = cyclotomic_poly(N);
    int k = (int)phi.size() - 1;
    for (int i = (int)p.size() - 1; i >= k; --i) {
        if (p[i] == 0) continue;
        Q c = p[i];
        for (int j = 0; j <= k; ++j) p[i - k + j] -= c * phi[j];
    }
    p.resize(k, Q(0));
}

}  // namespace

const std::vector<Q>& cyclotomic_poly(int N) {
    if (N < 1) throw DomainError("InvalidOrder", "cyclotomic order must be positive");
    {
        std::lock_guard<std::mutex> g(phi_mu);
        auto it = phi_cache.find(N);
        if (it != phi_cache.end()) return it->second;
    }
    QPoly num(N + 1, 0);
    num[0] = -1;
    num[N] = 1;
    for (int d = 1; d < N; ++d)
        if (N % d == 0) num = poly_divexact(num, cyclotomic_poly(d));
    std::lock_guard<std::mutex> g(phi_mu);
    return phi_cache.emplace(N, num).first->second;
}

int cyclotomic_degree(int N) {
    int r = N, m = N;
    for (int p = 2; p * p <= m; ++p)
        if (m % p == 0) {
            while (m % p == 0) m /= p;
            r -= r / p;
        }
    if (m > 1) r -= r / m;
    return r;
}

// ---------------- Cyclo

Cyclo Cyclo::from_coords(int N, std::vector<Q> coords) {
    Cyclo z;
    z.n_ = N;
    z.c_ = std::move(coords);
    if ((int)z.c_.size() > cyclotomic_degree(N)) reduce_mod(z.c_, N);
    z.c_.resize(cyclotomic_degree(N), Q(0));
    z.canon();
    return z;
}

Cyclo Cyclo::zeta(int N, long k) {
    long e = ((k % N) + N) % N;
    std::vector<Q> c(e + 1, Q(0));
    c[e] = 1;
    return from_coords(N, std::move(c));
}

void Cyclo::canon() {
    if (n_ == 1) return;
    for (size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return;
    n_ = 1;
    c_.resize(1);
}

bool Cyclo::is_zero() const {
    for (auto& q : c_)
        if (q != 0) return false;
    return true;
}

const Q& Cyclo::rational() const {
    if (n_ != 1) throw DomainError("NotRational", "cyclotomic value is not rational");
    return c_[0];
}

Cyclo Cyclo::lift(int M) const {
    if (M == n_) return *this;
    if (M % n_ != 0) throw DomainError("InvalidOrder", "lift target must be a multiple");
    int s = M / n_;
    QPoly p((c_.size() - 1) * s + 1, 0);
    for (size_t i = 0; i < c_.size(); ++i) p[i * s] = c_[i];
    Cyclo z;
    z.n_ = M;
    if ((int)p.size() > cyclotomic_degree(M)) reduce_mod(p, M);
    p.resize(cyclotomic_degree(M), Q(0));
    z.c_ = std::move(p);
    return z;
}

static int lcm_int(int a, int b) { return a / std::gcd(a, b) * b; }

Cyclo operator+(const Cyclo& a, const Cyclo& b) {
    if (a.n_ == 1 && b.n_ == 1) return Cyclo(a.c_[0] + b.c_[0]);
    int M = lcm_int(a.n_, b.n_);
    Cyclo x = a.lift(M), y = b.lift(M);
    for (size_t i = 0; i < x.c_.size(); ++i) x.c_[i] += y.c_[i];
    x.canon();
    return x;
}

Cyclo Cyclo::operator-() const {
    Cyclo z = *this;
    for (auto& q : z.c_) q = -q;
    return z;
}

Cyclo operator-(const Cyclo& a, const Cyclo& b) { return a + (-b); }

Cyclo operator*(const Cyclo& a, const Cyclo& b) {
    if (a.n_ == 1 && b.n_ == 1) return Cyclo(a.c_[0] * b.c_[0]);
    if (a.n_ == 1 || b.n_ == 1) {
        const Cyclo& s = a.n_ == 1 ? a : b;
        Cyclo z = a.n_ == 1 ? b : a;
        if (s.c_[0] == 0) return Cyclo();
        for (auto& q : z.c_) q *= s.c_[0];
        return z;
    }
    int M = lcm_int(a.n_, b.n_);
    Cyclo x = a.lift(M), y = b.lift(M);
    QPoly p(x.c_.size() + y.c_.size() - 1, 0);
    for (size_t i = 0; i < x.c_.size(); ++i) {
        if (x.c_[i] == 0) continue;
        for (size_t j = 0; j < y.c_.size(); ++j)
            if (y.c_[j] != 0) p[i + j] += x.c_[i] * y.c_[j];
    }
    reduce_mod(p, M);
    Cyclo z;
    z.n_ = M;
    z.c_ = std::move(p);
    z.canon();
    return z;
}

bool operator==(const Cyclo& a, const Cyclo& b) {
    if (a.n_ == b.n_) return a.c_ == b.c_;
    int M = lcm_int(a.n_, b.n_);
    return a.lift(M).c_ == b.lift(M).c_;
}

Cyclo Cyclo::inverse() const {
    if (is_zero()) throw DomainError("DivisionByZero", "inverse of zero");
    if (n_ == 1) return Cyclo(1 / c_[0]);
    int k = (int)c_.size();
    // column j of the matrix is this * t^j
    std::vector<std::vector<Q>> m(k, std::vector<Q>(k + 1, 0));
    for (int j = 0; j < k; ++j) {
        Cyclo col = *this * zeta(n_, j);
        Cyclo cl = col.lift(n_);
        for (int i = 0; i < k; ++i) m[i][j] = cl.c_[i];
    }
    m[0][k] = 1;
    for (int c = 0, r = 0; c < k; ++c, ++r) {
        int p = r;
        while (m[p][c] == 0) ++p;
        std::swap(m[p], m[r]);
        for (int i = 0; i < k; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Q f = m[i][c] / m[r][c];
            for (int j = c; j <= k; ++j) m[i][j] -= f * m[r][j];
        }
    }
    std::vector<Q> x(k);
    for (int i = 0; i < k; ++i) x[i] = m[i][k] / m[i][i];
    return from_coords(n_, x);
}

Cyclo Cyclo::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    Cyclo r(1), b = *this;
    while (e) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

std::string Cyclo::str() const {
    if (n_ == 1) return c_[0].get_str();
    std::ostringstream os;
    bool first = true;
    os << "(";
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        if (!first) os << (c_[i] > 0 ? "+" : "");
        first = false;
        os << c_[i].get_str();
        if (i) os << "*zeta" << n_ << (i > 1 ? "^" + std::to_string(i) : "");
    }
    os << ")";
    return os.str();
}

// ---------------- Laurent

bool Laurent::is_rational() const {
    for (auto& [e, c] : t_)
        if (!c.is_rational()) return false;
    return true;
}

int Laurent::min_exp() const {
    if (t_.empty()) throw DomainError("ZeroScalar", "min_exp of zero");
    return t_.begin()->first;
}

int Laurent::max_exp() const {
    if (t_.empty()) throw DomainError("ZeroScalar", "max_exp of zero");
    return t_.rbegin()->first;
}

Cyclo Laurent::coeff(int e) const {
    auto it = t_.find(e);
    return it == t_.end() ? Cyclo() : it->second;
}

int Laurent::order() const {
    int N = 1;
    for (auto& [e, c] : t_) N = lcm_int(N, c.order());
    return N;
}

Laurent Laurent::shift(int k) const {
    Laurent r;
    for (auto& [e, c] : t_) r.t_.emplace_hint(r.t_.end(), e + k, c);
    return r;
}

Laurent Laurent::subst_eps_power(int k) const {
    if (k < 1) throw DomainError("InvalidExponent", "eps power must be positive");
    Laurent r;
    for (auto& [e, c] : t_) r.t_.emplace_hint(r.t_.end(), e * k, c);
    return r;
}

Laurent Laurent::truncate(int cutoff) const {
    Laurent r;
    for (auto& [e, c] : t_)
        if (e < cutoff) r.t_.emplace_hint(r.t_.end(), e, c);
    return r;
}

Laurent Laurent::inverse_unit() const {
    if (t_.size() != 1) throw DomainError("NotUnit", "only single-term scalars are inverted");
    return Laurent(t_.begin()->second.inverse(), -t_.begin()->first);
}

Laurent Laurent::pow(long e) const {
    if (e < 0) return inverse_unit().pow(-e);
    Laurent r(1), b = *this;
    while (e) {
        if (e & 1) r *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return r;
}

Laurent Laurent::operator-() const {
    Laurent r = *this;
    for (auto& [e, c] : r.t_) c = -c;
    return r;
}

Laurent& Laurent::operator+=(const Laurent& b) {
    for (auto& [e, c] : b.t_) {
        auto it = t_.find(e);
        if (it == t_.end()) {
            t_.emplace(e, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) t_.erase(it);
        }
    }
    return *this;
}

Laurent operator+(const Laurent& a, const Laurent& b) {
    Laurent r = a;
    r += b;
    return r;
}

Laurent operator-(const Laurent& a, const Laurent& b) {
    Laurent r = a;
    r += -b;
    return r;
}

Laurent operator*(const Laurent& a, const Laurent& b) {
    Laurent r;
    for (auto& [e1, c1] : a.t_)
        for (auto& [e2, c2] : b.t_) r += Laurent(c1 * c2, e1 + e2);
    return r;
}

Laurent Laurent::mul_trunc(const Laurent& b, int cutoff) const {
    Laurent r;
    for (auto& [e1, c1] : t_)
        for (auto& [e2, c2] : b.t_) {
            if (e1 + e2 >= cutoff) break;
            r += Laurent(c1 * c2, e1 + e2);
        }
    return r;
}

bool operator==(const Laurent& a, const Laurent& b) {
    if (a.t_.size() != b.t_.size()) return false;
    auto i = a.t_.begin();
    auto j = b.t_.begin();
    for (; i != a.t_.end(); ++i, ++j)
        if (i->first != j->first || !(i->second == j->second)) return false;
    return true;
}

std::string Laurent::str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [e, c] : t_) {
        if (!first) os << " + ";
        first = false;
        os << c.str();
        if (e) os << "*eps^" << e;
    }
    return t_.size() > 1 ? "(" + os.str() + ")" : os.str();
}

// ---------------- Monomial / Poly

int Monomial::degree() const {
    int s = 0;
    for (int x : e) s += x;
    return s;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial m;
    m.e.resize(std::max(a.e.size(), b.e.size()), 0);
    for (size_t i = 0; i < a.e.size(); ++i) m.e[i] += a.e[i];
    for (size_t i = 0; i < b.e.size(); ++i) m.e[i] += b.e[i];
    return m;
}

Poly Poly::constant(int nvars, const Laurent& c) {
    Poly p(nvars);
    p.add_term(Monomial(), c);
    return p;
}

Poly Poly::var(int nvars, int i, const Laurent& c) {
    std::vector<int> e(i + 1, 0);
    e[i] = 1;
    return monomial(nvars, Monomial(e), c);
}

Poly Poly::monomial(int nvars, const Monomial& m, const Laurent& c) {
    Poly p(nvars);
    p.add_term(m, c);
    return p;
}

Laurent Poly::coeff(const Monomial& m) const {
    auto it = t_.find(m);
    return it == t_.end() ? Laurent() : it->second;
}

void Poly::add_term(const Monomial& m, const Laurent& c) {
    if (c.is_zero()) return;
    if ((int)m.e.size() > n_) throw DomainError("ArityMismatch", "monomial exceeds nvars");
    auto it = t_.find(m);
    if (it == t_.end()) {
        t_.emplace(m, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) t_.erase(it);
    }
}

Poly Poly::with_nvars(int n) const {
    Poly p = *this;
    for (auto& [m, c] : t_)
        if ((int)m.e.size() > n) throw DomainError("ArityMismatch", "polynomial uses more variables");
    p.n_ = n;
    return p;
}

int Poly::degree() const {
    if (t_.empty()) return ANY_DEGREE;
    int d = 0;
    for (auto& [m, c] : t_) d = std::max(d, m.degree());
    return d;
}

int Poly::min_degree() const {
    if (t_.empty()) return ANY_DEGREE;
    int d = 1 << 30;
    for (auto& [m, c] : t_) d = std::min(d, m.degree());
    return d;
}

bool Poly::is_homogeneous() const { return degree() == min_degree(); }

Poly Poly::homogeneous_part(int j) const {
    Poly p(n_);
    for (auto& [m, c] : t_)
        if (m.degree() == j) p.t_.emplace_hint(p.t_.end(), m, c);
    return p;
}

Poly Poly::truncate_degree(int maxdeg) const {
    Poly p(n_);
    for (auto& [m, c] : t_)
        if (m.degree() <= maxdeg) p.t_.emplace_hint(p.t_.end(), m, c);
    return p;
}

bool Poly::is_eps_free() const {
    for (auto& [m, c] : t_)
        if (!c.is_constant()) return false;
    return true;
}

int Poly::min_eps() const {
    if (t_.empty()) throw DomainError("ZeroPoly", "min_eps of zero polynomial");
    int r = 1 << 30;
    for (auto& [m, c] : t_) r = std::min(r, c.min_exp());
    return r;
}

int Poly::max_eps() const {
    if (t_.empty()) throw DomainError("ZeroPoly", "max_eps of zero polynomial");
    int r = -(1 << 30);
    for (auto& [m, c] : t_) r = std::max(r, c.max_exp());
    return r;
}

Poly Poly::eps_coeff(int e) const {
    Poly p(n_);
    for (auto& [m, c] : t_) {
        Cyclo v = c.coeff(e);
        if (!v.is_zero()) p.t_.emplace_hint(p.t_.end(), m, Laurent(v));
    }
    return p;
}

Poly Poly::shift_eps(int k) const {
    Poly p(n_);
    for (auto& [m, c] : t_) p.t_.emplace_hint(p.t_.end(), m, c.shift(k));
    return p;
}

Poly Poly::subst_eps_power(int k) const {
    Poly p(n_);
    for (auto& [m, c] : t_) p.t_.emplace_hint(p.t_.end(), m, c.subst_eps_power(k));
    return p;
}

Poly Poly::truncate_eps(int cutoff) const {
    Poly p(n_);
    for (auto& [m, c] : t_) {
        Laurent s = c.truncate(cutoff);
        if (!s.is_zero()) p.t_.emplace_hint(p.t_.end(), m, s);
    }
    return p;
}

Poly Poly::partial(int i) const {
    Poly p(n_);
    for (auto& [m, c] : t_) {
        int k = m[i];
        if (!k) continue;
        Monomial mm = m;
        mm.e[i] -= 1;
        mm.trim();
        p.add_term(mm, c * Laurent(k));
    }
    return p;
}

Poly Poly::pow(int e) const {
    Poly r = constant(n_, Laurent(1)), b = *this;
    while (e) {
        if (e & 1) r *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return r;
}

Poly Poly::scale(const Laurent& s) const {
    Poly p(n_);
    if (s.is_zero()) return p;
    for (auto& [m, c] : t_) p.add_term(m, c * s);
    return p;
}

Poly Poly::operator-() const {
    Poly p = *this;
    for (auto& [m, c] : p.t_) c = -c;
    return p;
}

Poly& Poly::operator+=(const Poly& b) {
    n_ = std::max(n_, b.n_);
    for (auto& [m, c] : b.t_) add_term(m, c);
    return *this;
}

Poly operator+(const Poly& a, const Poly& b) {
    Poly r = a;
    r += b;
    return r;
}

Poly operator-(const Poly& a, const Poly& b) {
    Poly r = a;
    r += -b;
    return r;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly r(std::max(a.n_, b.n_));
    for (auto& [m1, c1] : a.t_)
        for (auto& [m2, c2] : b.t_) r.add_term(m1 * m2, c1 * c2);
    return r;
}

Poly Poly::mul_trunc(const Poly& b, int maxdeg, int eps_cutoff) const {
    Poly r(std::max(n_, b.n_));
    for (auto& [m1, c1] : t_) {
        int d1 = m1.degree();
        for (auto& [m2, c2] : b.t_) {
            if (d1 + m2.degree() > maxdeg) continue;
            r.add_term(m1 * m2, c1.mul_trunc(c2, eps_cutoff));
        }
    }
    return r;
}

Laurent Poly::eval_laurent(const std::vector<Laurent>& pt) const {
    Laurent s;
    for (auto& [m, c] : t_) {
        Laurent v = c;
        for (size_t i = 0; i < m.e.size(); ++i)
            if (m.e[i]) v *= pt.at(i).pow(m.e[i]);
        s += v;
    }
    return s;
}

bool operator==(const Poly& a, const Poly& b) { return a.t_ == b.t_; }

std::string Poly::str() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [m, c] : t_) {
        if (!first) os << " + ";
        first = false;
        os << c.str();
        for (size_t i = 0; i < m.e.size(); ++i)
            if (m.e[i]) os << "*x" << i << (m.e[i] > 1 ? "^" + std::to_string(m.e[i]) : "");
    }
    return os.str();
}

// ---------------- LinearForm

LinearForm LinearForm::var(int n, int i, const Laurent& s) {
    LinearForm l(n);
    l.c[i] = s;
    return l;
}

LinearForm LinearForm::from_poly(const Poly& p) {
    LinearForm l(p.nvars());
    for (auto& [m, c] : p.terms()) {
        if (m.degree() != 1) throw DomainError("NotLinear", "polynomial is not a linear form");
        l.c[m.e.size() - 1] = c;
    }
    return l;
}

LinearForm LinearForm::from_ints(const std::vector<long>& v) {
    LinearForm l((int)v.size());
    for (size_t i = 0; i < v.size(); ++i) l.c[i] = Laurent(v[i]);
    return l;
}

bool LinearForm::is_zero() const {
    for (auto& s : c)
        if (!s.is_zero()) return false;
    return true;
}

bool LinearForm::is_eps_free() const {
    for (auto& s : c)
        if (!s.is_constant()) return false;
    return true;
}

int LinearForm::min_eps() const {
    int r = 1 << 30;
    for (auto& s : c)
        if (!s.is_zero()) r = std::min(r, s.min_exp());
    if (r == 1 << 30) throw DomainError("ZeroForm", "min_eps of zero form");
    return r;
}

Poly LinearForm::to_poly() const {
    Poly p(nvars());
    for (int i = 0; i < nvars(); ++i)
        if (!c[i].is_zero()) p += Poly::var(nvars(), i, c[i]);
    return p;
}

LinearForm LinearForm::scale(const Laurent& s) const {
    LinearForm l = *this;
    for (auto& x : l.c) x = x * s;
    return l;
}

LinearForm LinearForm::subst_eps_power(int k) const {
    LinearForm l = *this;
    for (auto& x : l.c) x = x.subst_eps_power(k);
    return l;
}

LinearForm LinearForm::lowest() const {
    int e = min_eps();
    LinearForm l(nvars());
    for (int i = 0; i < nvars(); ++i) l.c[i] = Laurent(c[i].coeff(e));
    return l;
}

LinearForm operator+(const LinearForm& a, const LinearForm& b) {
    LinearForm l(std::max(a.nvars(), b.nvars()));
    for (int i = 0; i < a.nvars(); ++i) l.c[i] += a.c[i];
    for (int i = 0; i < b.nvars(); ++i) l.c[i] += b.c[i];
    return l;
}

LinearForm operator-(const LinearForm& a, const LinearForm& b) { return a + b.scale(Laurent(-1)); }

std::string LinearForm::str() const { return to_poly().str(); }

// ---------------- linear algebra

namespace {

// Gaussian elimination in place; returns pivot columns.
std::vector<int> row_reduce(CMatrix& m, int ncols) {
    std::vector<int> piv;
    size_t r = 0;
    for (int c = 0; c < ncols && r < m.size(); ++c) {
        size_t p = r;
        while (p < m.size() && m[p][c].is_zero()) ++p;
        if (p == m.size()) continue;
        std::swap(m[p], m[r]);
        Cyclo inv = m[r][c].inverse();
        for (int k = c; k < (int)m[r].size(); ++k) m[r][k] *= inv;
        for (size_t i = 0; i < m.size(); ++i) {
            if (i == r || m[i][c].is_zero()) continue;
            Cyclo f = m[i][c];
            for (int k = c; k < (int)m[i].size(); ++k)
                if (!m[r][k].is_zero()) m[i][k] -= f * m[r][k];
        }
        piv.push_back(c);
        ++r;
    }
    return piv;
}

}  // namespace

int matrix_rank(CMatrix m) {
    if (m.empty()) return 0;
    return (int)row_reduce(m, (int)m[0].size()).size();
}

std::vector<int> independent_rows(const CMatrix& rows) {
    std::vector<int> keep;
    CMatrix basis;  // reduced rows with leading ones
    std::vector<int> lead;
    for (size_t i = 0; i < rows.size(); ++i) {
        std::vector<Cyclo> v = rows[i];
        for (size_t b = 0; b < basis.size(); ++b) {
            Cyclo f = v[lead[b]];
            if (f.is_zero()) continue;
            for (size_t k = 0; k < v.size(); ++k)
                if (!basis[b][k].is_zero()) v[k] -= f * basis[b][k];
        }
        int c = 0;
        while (c < (int)v.size() && v[c].is_zero()) ++c;
        if (c == (int)v.size()) continue;
        Cyclo inv = v[c].inverse();
        for (auto& x : v) x *= inv;
        for (size_t b = 0; b < basis.size(); ++b) {
            Cyclo f = basis[b][c];
            if (f.is_zero()) continue;
            for (size_t k = 0; k < v.size(); ++k)
                if (!v[k].is_zero()) basis[b][k] -= f * v[k];
        }
        basis.push_back(v);
        lead.push_back(c);
        keep.push_back((int)i);
    }
    return keep;
}

bool solve_linear(const CMatrix& A, const std::vector<Cyclo>& b, std::vector<Cyclo>& x) {
    int n = A.empty() ? 0 : (int)A[0].size();
    CMatrix m = A;
    for (size_t i = 0; i < m.size(); ++i) m[i].push_back(b[i]);
    auto piv = row_reduce(m, n + 1);
    if (!piv.empty() && piv.back() == n) return false;
    x.assign(n, Cyclo(0));
    for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = m[r][n];
    return true;
}

CMatrix matrix_inverse(const CMatrix& a) {
    int n = (int)a.size();
    CMatrix m = a;
    for (int i = 0; i < n; ++i) {
        m[i].resize(2 * n, Cyclo(0));
        m[i][n + i] = Cyclo(1);
    }
    auto piv = row_reduce(m, n);
    if ((int)piv.size() != n) throw DomainError("Singular", "matrix is not invertible");
    CMatrix r(n);
    for (int i = 0; i < n; ++i) r[i].assign(m[i].begin() + n, m[i].end());
    return r;
}

Cyclo eval_eps(const Laurent& s, const Q& at) {
    Cyclo r(0);
    for (auto& [e, c] : s.terms()) {
        Q p = 1;
        mpz_class num, den;
        mpz_pow_ui(num.get_mpz_t(), at.get_num_mpz_t(), std::abs(e));
        mpz_pow_ui(den.get_mpz_t(), at.get_den_mpz_t(), std::abs(e));
        p = e >= 0 ? Q(num, den) : Q(den, num);
        p.canonicalize();
        r += c * Cyclo(p);
    }
    return r;
}

// ---------------- free functions

Poly limit(const Poly& p) {
    Poly r(p.nvars());
    for (auto& [m, c] : p.terms()) {
        if (c.min_exp() < 0) {
            std::ostringstream os;
            os << "pole of order " << -c.min_exp() << " at monomial " << Poly::monomial(p.nvars(), m, Laurent(1)).str();
            throw DomainError("DivergentLimit", os.str());
        }
        Cyclo v = c.coeff(0);
        if (!v.is_zero()) r.add_term(m, Laurent(v));
    }
    return r;
}

bool equiv_mod_eps(const Poly& p, const Poly& q) {
    try {
        return limit(p) == limit(q);
    } catch (const DomainError&) {
        return false;
    }
}

Poly substitute(const Poly& p, const std::vector<Poly>& images, int target_nvars) {
    if ((int)images.size() != p.nvars()) throw DomainError("ArityMismatch", "substitution map length differs from nvars");
    std::vector<std::vector<Poly>> pw(images.size());
    auto power = [&](size_t i, int e) -> const Poly& {
        auto& v = pw[i];
        if (v.empty()) v.push_back(Poly::constant(target_nvars, Laurent(1)));
        while ((int)v.size() <= e) v.push_back(v.back() * images[i]);
        return v[e];
    };
    Poly r(target_nvars);
    for (auto& [m, c] : p.terms()) {
        Poly t = Poly::constant(target_nvars, c);
        for (size_t i = 0; i < m.e.size(); ++i)
            if (m.e[i]) t = t * power(i, m.e[i]);
        r += t;
    }
    return r.with_nvars(target_nvars);
}

Poly substitute_linear(const Poly& p, const std::vector<LinearForm>& map) {
    if ((int)map.size() != p.nvars()) throw DomainError("ArityMismatch", "substitution map length differs from nvars");
    int n = map.empty() ? 0 : map[0].nvars();
    std::vector<Poly> img;
    for (auto& l : map) {
        if (l.nvars() != n) throw DomainError("ArityMismatch", "forms of different arity");
        img.push_back(l.to_poly());
    }
    return substitute(p, img, n);
}

Laurent substitute_eps_power(const Laurent& s, int k) { return s.subst_eps_power(k); }
Poly substitute_eps_power(const Poly& p, int k) { return p.subst_eps_power(k); }

Q binomial(long n, long k) {
    if (k < 0 || k > n) return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return Q(r);
}

Q factorial(long n) {
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), n);
    return Q(r);
}

// ---------------- parser

namespace {

struct Parser {
    const std::string& s;
    size_t i = 0;
    int n;
    Parser(const std::string& str, int nv) : s(str), n(nv) {}

    void ws() {
        while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
    }
    bool eat(char c) {
        ws();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& m) {
        throw DomainError("ParseError", m + " at position " + std::to_string(i) + " in '" + s + "'");
    }
    long integer() {
        ws();
        size_t st = i;
        if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
        while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
        if (st == i) fail("expected integer");
        return std::stol(s.substr(st, i - st));
    }
    Poly expr() {
        Poly r(n);
        bool neg = eat('-');
        if (!neg) eat('+');
        Poly t = term();
        r += neg ? -t : t;
        while (true) {
            if (eat('+'))
                r += term();
            else if (eat('-'))
                r -= term();
            else
                break;
        }
        return r;
    }
    Poly term() {
        Poly r = factor();
        while (true) {
            if (eat('*')) {
                r = r * factor();
            } else if (eat('/')) {
                Poly d = factor();
                if (d.terms().size() != 1 || !d.terms().begin()->first.e.empty())
                    fail("division only by scalars");
                r = r.scale(d.terms().begin()->second.inverse_unit());
            } else {
                break;
            }
        }
        return r;
    }
    Poly factor() {
        Poly a = atom();
        if (eat('^')) {
            long e = integer();
            if (e < 0) {
                if (a.terms().size() != 1 || !a.terms().begin()->first.e.empty()) fail("negative power of non-scalar");
                return Poly::constant(n, a.terms().begin()->second.pow(e));
            }
            return a.pow((int)e);
        }
        return a;
    }
    Poly atom() {
        ws();
        if (eat('(')) {
            Poly r = expr();
            if (!eat(')')) fail("expected )");
            return r;
        }
        if (i < s.size() && std::isdigit((unsigned char)s[i])) {
            size_t st = i;
            while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
            return Poly::constant(n, Laurent(parse_rational(s.substr(st, i - st))));
        }
        if (s.compare(i, 3, "eps") == 0) {
            i += 3;
            return Poly::constant(n, Laurent::eps(1));
        }
        if (s.compare(i, 4, "zeta") == 0) {
            i += 4;
            long N = integer();
            return Poly::constant(n, Laurent(Cyclo::zeta((int)N)));
        }
        if (i < s.size() && s[i] == 'x') {
            ++i;
            long k = integer();
            if (k < 0 || k >= n) fail("variable index out of range");
            return Poly::var(n, (int)k);
        }
        fail("unexpected token");
    }
};

}  // namespace

Poly parse_poly(const std::string& s, int nvars) {
    Parser p(s, nvars);
    Poly r = p.expr();
    p.ws();
    if (p.i != s.size()) p.fail("trailing input");
    return r;
}

// ---------------- JSON

json to_json(const Laurent& s) {
    int N = s.order();
    json terms = json::array();
    for (auto& [e, c] : s.terms()) {
        json co = json::array();
        Cyclo l = c.lift(N);
        for (auto& q : l.coords()) co.push_back(q.get_str());
        terms.push_back(json::array({e, co}));
    }
    return json{{"N", N}, {"terms", terms}};
}

json to_json(const Cyclo& c) { return to_json(Laurent(c)); }

static Q q_from_json(const json& j) {
    if (j.is_number_integer()) return Q(j.get<long>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw DomainError("ParseError", "rational must be a string or integer");
}

Laurent laurent_from_json(const json& j) {
    if (j.is_number_integer() || j.is_string()) return Laurent(q_from_json(j));
    int N = j.at("N").get<int>();
    Laurent r;
    for (auto& t : j.at("terms")) {
        std::vector<Q> co;
        for (auto& q : t.at(1)) co.push_back(q_from_json(q));
        r += Laurent(Cyclo::from_coords(N, co), t.at(0).get<int>());
    }
    return r;
}

json to_json(const Poly& p) {
    json terms = json::array();
    for (auto& [m, c] : p.terms()) {
        std::vector<int> e = m.e;
        e.resize(p.nvars(), 0);
        terms.push_back(json::array({e, to_json(c)}));
    }
    return json{{"nvars", p.nvars()}, {"terms", terms}};
}

Poly poly_from_json(const json& j) {
    if (j.is_string()) throw DomainError("ParseError", "polynomial JSON must be an object");
    int n = j.at("nvars").get<int>();
    Poly p(n);
    for (auto& t : j.at("terms")) p.add_term(Monomial(t.at(0).get<std::vector<int>>()), laurent_from_json(t.at(1)));
    return p;
}

json to_json(const LinearForm& l) {
    json a = json::array();
    for (auto& c : l.c) a.push_back(to_json(c));
    return a;
}

LinearForm form_from_json(const json& j) {
    LinearForm l;
    for (auto& c : j) l.c.push_back(laurent_from_json(c));
    return l;
}

}  // namespace bwr
