#pragma once

#include <gmpxx.h>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace bwr {

using Q = mpq_class;
using json = nlohmann::json;

struct DomainError : std::runtime_error {
    std::string name;
    DomainError(std::string n, const std::string& what) : std::runtime_error(what), name(std::move(n)) {}
};

Q parse_rational(const std::string& s);
std::string rational_str(const Q& q);

// Element of Q[t]/Phi_N(t), t = zeta_N.  Rational values are always stored with N = 1.
class Cyclo {
   public:
    Cyclo() : n_(1), c_(1) {}
    Cyclo(const Q& q) : n_(1), c_{q} {}
    Cyclo(long v) : n_(1), c_{Q(v)} {}
    static Cyclo zeta(int N, long k = 1);
    static Cyclo from_coords(int N, std::vector<Q> coords);

    int order() const { return n_; }
    const std::vector<Q>& coords() const { return c_; }
    bool is_zero() const;
    bool is_rational() const { return n_ == 1; }
    const Q& rational() const;
    Cyclo lift(int M) const;
    Cyclo inverse() const;
    Cyclo pow(long e) const;

    Cyclo operator-() const;
    friend Cyclo operator+(const Cyclo& a, const Cyclo& b);
    friend Cyclo operator-(const Cyclo& a, const Cyclo& b);
    friend Cyclo operator*(const Cyclo& a, const Cyclo& b);
    friend Cyclo operator/(const Cyclo& a, const Cyclo& b) { return a * b.inverse(); }
    Cyclo& operator+=(const Cyclo& b) { return *this = *this + b; }
    Cyclo& operator-=(const Cyclo& b) { return *this = *this - b; }
    Cyclo& operator*=(const Cyclo& b) { return *this = *this * b; }
    friend bool operator==(const Cyclo& a, const Cyclo& b);
    friend bool operator!=(const Cyclo& a, const Cyclo& b) { return !(a == b); }
    std::string str() const;

   private:
    void canon();
    int n_;
    std::vector<Q> c_;
};

int cyclotomic_degree(int N);
const std::vector<Q>& cyclotomic_poly(int N);

// Finite Laurent polynomial in eps with cyclotomic coefficients.
class Laurent {
   public:
    Laurent() = default;
    Laurent(const Cyclo& c, int e = 0) {
        if (!c.is_zero()) t_[e] = c;
    }
    Laurent(const Q& q) : Laurent(Cyclo(q)) {}
    Laurent(long v) : Laurent(Cyclo(v)) {}
    static Laurent eps(int e = 1) { return Laurent(Cyclo(1), e); }

    const std::map<int, Cyclo>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first == 0); }
    bool is_rational() const;
    int min_exp() const;
    int max_exp() const;
    Cyclo coeff(int e) const;
    Cyclo constant() const { return coeff(0); }
    int order() const;

    Laurent shift(int k) const;
    Laurent subst_eps_power(int k) const;
    Laurent truncate(int cutoff) const;  // keep exponents < cutoff
    Laurent pow(long e) const;
    Laurent mul_trunc(const Laurent& b, int cutoff) const;
    Laurent inverse_unit() const;  // single-term only

    Laurent operator-() const;
    friend Laurent operator+(const Laurent& a, const Laurent& b);
    friend Laurent operator-(const Laurent& a, const Laurent& b);
    friend Laurent operator*(const Laurent& a, const Laurent& b);
    Laurent& operator+=(const Laurent& b);
    Laurent& operator-=(const Laurent& b) { return *this += -b; }
    Laurent& operator*=(const Laurent& b) { return *this = *this * b; }
    friend bool operator==(const Laurent& a, const Laurent& b);
    friend bool operator!=(const Laurent& a, const Laurent& b) { return !(a == b); }
    std::string str() const;

   private:
    std::map<int, Cyclo> t_;
};

struct Monomial {
    std::vector<int> e;
    Monomial() = default;
    explicit Monomial(std::vector<int> v) : e(std::move(v)) { trim(); }
    void trim() {
        while (!e.empty() && e.back() == 0) e.pop_back();
    }
    int operator[](size_t i) const { return i < e.size() ? e[i] : 0; }
    int degree() const;
    friend Monomial operator*(const Monomial& a, const Monomial& b);
    friend bool operator<(const Monomial& a, const Monomial& b) { return a.e < b.e; }
    friend bool operator==(const Monomial& a, const Monomial& b) { return a.e == b.e; }
};

inline constexpr int ANY_DEGREE = -1;

class LinearForm;

class Poly {
   public:
    using Terms = std::map<Monomial, Laurent>;
    Poly() : n_(0) {}
    explicit Poly(int nvars) : n_(nvars) {}
    static Poly constant(int nvars, const Laurent& c);
    static Poly var(int nvars, int i, const Laurent& c = Laurent(1));
    static Poly monomial(int nvars, const Monomial& m, const Laurent& c);

    int nvars() const { return n_; }
    const Terms& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    Laurent coeff(const Monomial& m) const;
    void add_term(const Monomial& m, const Laurent& c);
    Poly with_nvars(int n) const;

    int degree() const;  // total degree, ANY_DEGREE for zero
    int min_degree() const;
    bool is_homogeneous() const;
    Poly homogeneous_part(int j) const;
    Poly truncate_degree(int maxdeg) const;
    bool is_eps_free() const;
    int min_eps() const;  // over all coefficients; requires nonzero
    int max_eps() const;
    Poly eps_coeff(int e) const;
    Poly shift_eps(int k) const;
    Poly subst_eps_power(int k) const;
    Poly truncate_eps(int cutoff) const;
    Poly partial(int i) const;
    Poly pow(int e) const;
    Poly scale(const Laurent& s) const;
    Poly mul_trunc(const Poly& b, int maxdeg, int eps_cutoff) const;
    Laurent eval_laurent(const std::vector<Laurent>& pt) const;

    Poly operator-() const;
    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly& operator+=(const Poly& b);
    Poly& operator-=(const Poly& b) { return *this += -b; }
    Poly& operator*=(const Poly& b) { return *this = *this * b; }
    friend bool operator==(const Poly& a, const Poly& b);
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }
    std::string str() const;

   private:
    int n_;
    Terms t_;
};

class LinearForm {
   public:
    std::vector<Laurent> c;
    LinearForm() = default;
    explicit LinearForm(int n) : c(n) {}
    explicit LinearForm(std::vector<Laurent> v) : c(std::move(v)) {}
    static LinearForm var(int n, int i, const Laurent& s = Laurent(1));
    static LinearForm from_poly(const Poly& p);
    static LinearForm from_ints(const std::vector<long>& v);
    int nvars() const { return (int)c.size(); }
    bool is_zero() const;
    bool is_eps_free() const;
    int min_eps() const;
    Poly to_poly() const;
    LinearForm scale(const Laurent& s) const;
    LinearForm subst_eps_power(int k) const;
    LinearForm lowest() const;  // coefficient vector at the minimal eps exponent
    friend LinearForm operator+(const LinearForm& a, const LinearForm& b);
    friend LinearForm operator-(const LinearForm& a, const LinearForm& b);
    friend bool operator==(const LinearForm& a, const LinearForm& b) { return a.c == b.c; }
    std::string str() const;
};

Poly limit(const Poly& p);
bool equiv_mod_eps(const Poly& p, const Poly& q);
Poly substitute_linear(const Poly& p, const std::vector<LinearForm>& map);
Poly substitute(const Poly& p, const std::vector<Poly>& images, int target_nvars);
Laurent substitute_eps_power(const Laurent& s, int k);
Poly substitute_eps_power(const Poly& p, int k);
Q binomial(long n, long k);
Q factorial(long n);

// Polynomial from a compact text such as "x0^2*x1 - 3/2*x2"; variables x0..x{n-1}.
Poly parse_poly(const std::string& s, int nvars);

// Dense linear algebra over Q(zeta_N).
using CMatrix = std::vector<std::vector<Cyclo>>;
int matrix_rank(CMatrix m);
std::vector<int> independent_rows(const CMatrix& rows);  // greedy, in order
bool solve_linear(const CMatrix& A, const std::vector<Cyclo>& b, std::vector<Cyclo>& x);
CMatrix matrix_inverse(const CMatrix& m);
Cyclo eval_eps(const Laurent& s, const Q& at);

json to_json(const Cyclo& c);
json to_json(const Laurent& s);
json to_json(const Poly& p);
json to_json(const LinearForm& l);
Laurent laurent_from_json(const json& j);
Poly poly_from_json(const json& j);
LinearForm form_from_json(const json& j);

}  // namespace bwr
