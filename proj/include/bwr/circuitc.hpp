#pragma once

#include <random>
#include <vector>

#include "bwr/polyring.hpp"

namespace bwr {

enum class GateKind { Input, Add, Mul2, Mul3, NegCube };

struct Gate {
    GateKind kind = GateKind::Input;
    LinearForm form;   // Input only
    Laurent constant;  // Input only
    std::vector<int> ch;
    std::vector<Laurent> sc;  // one per child
};

// Gates are topologically ordered.  Output -1 stands for the zero polynomial.
struct Circuit {
    int nvars = 0;
    std::vector<Gate> gates;
    std::vector<int> outputs;

    Circuit() = default;
    explicit Circuit(int n) : nvars(n) {}
    int input(const LinearForm& l, const Laurent& c = Laurent());
    int add(int a, int b, const Laurent& sa = Laurent(1), const Laurent& sb = Laurent(1));
    int mul2(int a, int b, const Laurent& sa = Laurent(1), const Laurent& sb = Laurent(1));
    int mul3(int a, int b, int c, const Laurent& sa = Laurent(1), const Laurent& sb = Laurent(1),
             const Laurent& sc = Laurent(1));
    int negcube(int a, const Laurent& s = Laurent(1));

    int size() const { return (int)gates.size(); }
    int depth() const;       // longest output-to-input path
    int mult_depth() const;  // products on the worst path
};

void validate(const Circuit& c);
std::vector<Poly> eval(const Circuit& c);
std::vector<int> gate_degrees(const Circuit& c);  // syntactic, -1 on inhomogeneous adds
bool is_formula(const Circuit& c);
bool is_ihl(const Circuit& c);
bool is_arity3(const Circuit& c);  // only Input, Add, Mul3
bool has_unit_scales(const Circuit& c);
Circuit prune(const Circuit& c);
// one tree per output, scalars pushed down to the inputs where possible
Circuit unfold(const Circuit& c);
// "x0*x1 + 2*(x2 - 1)", products of three factors become Mul3, ncube(e) = -e^3
Circuit parse_formula(const std::string& s, int nvars);

json to_json(const Circuit& c);
Circuit circuit_from_json(const json& j);

// f - f(0) with no constant inputs
Circuit ihl_homogenize(const Circuit& c, bool formula = false);

// odd degree: one output equal to f; even degree: output i is df/dx_i
Circuit to_arity3(const Circuit& f);

Circuit brent_arity3(const Circuit& f);
int brent_depth_bound(int size);

Circuit vsbr_arity3(const Circuit& c);
int vsbr_mult_depth_bound(int degree);
// [u:v] with the dummy variable z = x_{nvars}
Poly vsbr_bracket(const Circuit& c, int u, int v);

using LMatrix = std::vector<std::vector<LinearForm>>;
using PMatrix = std::vector<std::vector<Poly>>;

struct MatrixProgram {
    int dim = 3;
    int nvars = 0;
    std::vector<LMatrix> factors;
    Laurent alpha = Laurent(1);
    int pi = 0, pj = 1;  // 0-based
    bool trace = false;
    std::vector<int> blocks;  // factor counts per product block (trace programs)
};

// alpha * ((id + A_1) ... (id + A_r) - id)
PMatrix expand_program(const MatrixProgram& p);
int arity2_depth(const Circuit& f);
MatrixProgram ben_or_cleve(const Circuit& f, int i, int j);
bool check_ben_or_cleve(const MatrixProgram& p, const Poly& f);

MatrixProgram ben_or_cleve_trace(const Circuit& f);
struct TraceReport {
    bool entry_ok = false;   // (1,1) entry is f mod eps
    bool trace_ok = false;   // trace is f mod eps
    bool blocks_ok = false;  // each block is id + eps^2 h g E11 mod eps^3
    bool commutator_ok = false;  // each block is id + eps^2 h g (E11 - E22) mod eps^3
    Poly entry_limit;
    Poly trace_limit;
};
TraceReport check_trace_program(const MatrixProgram& p, const Circuit& f);

json to_json(const MatrixProgram& p);
MatrixProgram program_from_json(const json& j);

Poly c_poly(int n, int d);
Poly c_poly_enum(int n, int d);
PMatrix nc_elementary(const std::vector<PMatrix>& xs, int d);
// C_{r,d}(l_1, ..., l_r)
Poly continuant_eval(const std::vector<LinearForm>& ls, int d, int nvars);

struct ContinuantResult {
    int d = 0;
    int r = 0;
    int precision = 0;  // eps exponent used in the cube gadgets
    std::vector<LinearForm> forms;
    Poly target;
    Poly value;
    bool ok = false;
};
ContinuantResult continuant_compile(const Circuit& c, int d);

// random instances
Circuit random_ihl_formula(std::mt19937& rng, int nvars, int depth);
Circuit random_homogeneous_formula(std::mt19937& rng, int nvars, int degree);
Circuit random_arity3_formula(std::mt19937& rng, int nvars, int degree, int maxgates);
Circuit random_arity3_circuit(std::mt19937& rng, int nvars, int gates);

}  // namespace bwr
