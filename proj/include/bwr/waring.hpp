#pragma once

#include <random>

#include "bwr/polyring.hpp"

namespace bwr {

// f = sum scales[i] * forms[i]^d
struct WaringDecomposition {
    int d = 0;
    int nvars = 0;
    std::vector<LinearForm> forms;
    std::vector<Laurent> scales;

    Poly expand() const;
    bool is_border() const;
    size_t size() const { return forms.size(); }
    void add(const Laurent& s, const LinearForm& l) {
        scales.push_back(s);
        forms.push_back(l);
    }
};

// alpha * (prod (1 + forms[i]) - 1)
struct KumarExpr {
    int nvars = 0;
    Laurent alpha;
    std::vector<LinearForm> forms;

    Poly expand() const;
    // homogeneous parts alpha*e_j for j = 0..maxdeg, exact up to eps^0 (inclusive)
    std::vector<Poly> parts_mod_eps(int maxdeg) const;
};

enum class Regime { Plus, Equal, Minus };
const char* regime_name(Regime r);

// scale * prod factors
struct ProductForm {
    int nvars = 0;
    Laurent scale;
    std::vector<LinearForm> factors;
    Poly expand() const;
};

struct KumarInverse {
    bool is_product = false;
    WaringDecomposition dec;
    ProductForm prod;
    Poly limit() const;
};

struct GADSummand {
    LinearForm ell;
    Poly g;
    int r = 1;
};

struct GAD {
    int d = 0;
    int nvars = 0;
    std::vector<GADSummand> summands;
    Poly expand() const;
};

// sum scale * (form + constant)^exponent
struct SLSTerm {
    Laurent scale;
    LinearForm form;
    Laurent constant;
    int exponent = 0;
};

struct SigmaLambdaSigma {
    int nvars = 0;
    std::vector<SLSTerm> terms;
    Poly expand() const;
    int max_exponent() const;
};

// lim prod first + lim prod second, each side may be absent (tends to zero)
struct ExactRB {
    int nvars = 0;
    bool has_first = false, has_second = false;
    std::vector<LinearForm> first, second;
    Poly expand() const;
};

struct RBResult {
    bool exact = false;
    ExactRB rb;
    SigmaLambdaSigma sls;
    Poly limit() const;
};

Poly elementary_symmetric(const std::vector<LinearForm>& forms, int k, int nvars);
Poly power_sum(const std::vector<LinearForm>& forms, int k, int nvars);
bool newton_identity_check(const std::vector<LinearForm>& forms, int k, int nvars);

// d-th root of a single-term scale, or NonRepresentableScale
Laurent scale_root(const Laurent& s, int d);

KumarExpr kumar_build(const WaringDecomposition& dec, bool border);
KumarExpr kumar_product_build(const std::vector<LinearForm>& forms);
Regime classify_kumar(const KumarExpr& e);
KumarInverse kumar_invert(const KumarExpr& e, int d);

SigmaLambdaSigma two_product_border_extract(const std::vector<LinearForm>& a, const std::vector<LinearForm>& b, int M,
                                            const Laurent& alpha, const Laurent& beta, int d);
WaringDecomposition monomial_power_decomposition(int a, int b);
WaringDecomposition monomial_border_decomposition(int a, int b);
int essential_variables(const Poly& f);
GAD gad_from_border(const WaringDecomposition& dec);
WaringDecomposition deborder_waring(const WaringDecomposition& dec);

struct Slice {
    Q gamma;
    SigmaLambdaSigma dec;
};
SigmaLambdaSigma interpolate_decompositions(const std::vector<Slice>& slices, int var, int d);
RBResult rb_deborder(std::vector<LinearForm> lf, std::vector<LinearForm> lfr, int k);

std::string classify_bwr_normal_form(const GAD& g);

// x0^(d-1) x2 + x1^(d-1) x3 + 2 (x0+x1)^(d-1) x4 as a border sum of six powers
WaringDecomposition high_degree_example(int d);
// limit x0^2 x2 + x1^2 x3 + 2 (x0+x1)^2 x4, five cubes
WaringDecomposition wild_form_example();
WaringDecomposition random_exact_decomposition(std::mt19937& rng, int nvars, int d, int r);
// classes of (l + t_j eps m)^d with divided-difference weights, total size r
WaringDecomposition random_border_decomposition(std::mt19937& rng, int nvars, int d, int r);

json to_json(const WaringDecomposition& w);
json to_json(const KumarExpr& k);
json to_json(const ProductForm& p);
json to_json(const GAD& g);
json to_json(const SigmaLambdaSigma& s);
json to_json(const ExactRB& r);
WaringDecomposition waring_from_json(const json& j);
KumarExpr kumar_from_json(const json& j);
GAD gad_from_json(const json& j);
SigmaLambdaSigma sls_from_json(const json& j);

}  // namespace bwr
