#include "bwr/circuitc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <tuple>

namespace bwr {

// ---------------- circuit basics

int Circuit::input(const LinearForm& l, const Laurent& c) {
    Gate g;
    g.kind = GateKind::Input;
    g.form = l;
    g.form.c.resize(std::max(nvars, l.nvars()));
    g.constant = c;
    gates.push_back(g);
    return size() - 1;
}

int Circuit::add(int a, int b, const Laurent& sa, const Laurent& sb) {
    gates.push_back(Gate{GateKind::Add, {}, {}, {a, b}, {sa, sb}});
    return size() - 1;
}

int Circuit::mul2(int a, int b, const Laurent& sa, const Laurent& sb) {
    gates.push_back(Gate{GateKind::Mul2, {}, {}, {a, b}, {sa, sb}});
    return size() - 1;
}

int Circuit::mul3(int a, int b, int c, const Laurent& sa, const Laurent& sb, const Laurent& sc) {
    gates.push_back(Gate{GateKind::Mul3, {}, {}, {a, b, c}, {sa, sb, sc}});
    return size() - 1;
}

int Circuit::negcube(int a, const Laurent& s) {
    gates.push_back(Gate{GateKind::NegCube, {}, {}, {a}, {s}});
    return size() - 1;
}

static int arity(GateKind k) {
    switch (k) {
        case GateKind::Input: return 0;
        case GateKind::Add:
        case GateKind::Mul2: return 2;
        case GateKind::Mul3: return 3;
        case GateKind::NegCube: return 1;
    }
    return 0;
}

static bool is_product(GateKind k) { return k == GateKind::Mul2 || k == GateKind::Mul3 || k == GateKind::NegCube; }

void validate(const Circuit& c) {
    for (int i = 0; i < c.size(); ++i) {
        auto& g = c.gates[i];
        if ((int)g.ch.size() != arity(g.kind) || g.sc.size() != g.ch.size())
            throw DomainError("MalformedCircuit", "gate " + std::to_string(i) + " has the wrong arity");
        for (int x : g.ch)
            if (x < 0 || x >= i)
                throw DomainError("MalformedCircuit", "gate " + std::to_string(i) + " refers forward or out of range");
        if (g.kind == GateKind::Input && g.form.nvars() > c.nvars)
            throw DomainError("MalformedCircuit", "input form has too many variables");
    }
    for (int o : c.outputs)
        if (o < -1 || o >= c.size()) throw DomainError("MalformedCircuit", "output out of range");
}

int Circuit::depth() const {
    std::vector<int> d(size(), 0);
    for (int i = 0; i < size(); ++i)
        for (int x : gates[i].ch) d[i] = std::max(d[i], d[x] + 1);
    int r = 0;
    for (int o : outputs)
        if (o >= 0) r = std::max(r, d[o]);
    return r;
}

int Circuit::mult_depth() const {
    std::vector<int> d(size(), 0);
    for (int i = 0; i < size(); ++i) {
        for (int x : gates[i].ch) d[i] = std::max(d[i], d[x]);
        if (is_product(gates[i].kind)) d[i] += 1;
    }
    int r = 0;
    for (int o : outputs)
        if (o >= 0) r = std::max(r, d[o]);
    return r;
}

std::vector<Poly> eval(const Circuit& c) {
    validate(c);
    std::vector<Poly> v(c.size());
    for (int i = 0; i < c.size(); ++i) {
        auto& g = c.gates[i];
        switch (g.kind) {
            case GateKind::Input:
                v[i] = g.form.to_poly().with_nvars(c.nvars) + Poly::constant(c.nvars, g.constant);
                break;
            case GateKind::Add: v[i] = v[g.ch[0]].scale(g.sc[0]) + v[g.ch[1]].scale(g.sc[1]); break;
            case GateKind::Mul2: v[i] = v[g.ch[0]].scale(g.sc[0]) * v[g.ch[1]].scale(g.sc[1]); break;
            case GateKind::Mul3:
                v[i] = v[g.ch[0]].scale(g.sc[0]) * v[g.ch[1]].scale(g.sc[1]) * v[g.ch[2]].scale(g.sc[2]);
                break;
            case GateKind::NegCube: v[i] = -v[g.ch[0]].scale(g.sc[0]).pow(3); break;
        }
    }
    std::vector<Poly> out;
    for (int o : c.outputs) out.push_back(o < 0 ? Poly(c.nvars) : v[o]);
    return out;
}

std::vector<int> gate_degrees(const Circuit& c) {
    std::vector<int> d(c.size(), 0);
    for (int i = 0; i < c.size(); ++i) {
        auto& g = c.gates[i];
        switch (g.kind) {
            case GateKind::Input: d[i] = 1; break;
            case GateKind::Add: d[i] = (d[g.ch[0]] == d[g.ch[1]]) ? d[g.ch[0]] : -1; break;
            case GateKind::Mul2:
            case GateKind::Mul3:
                d[i] = 0;
                for (int x : g.ch) d[i] = (d[i] < 0 || d[x] < 0) ? -1 : d[i] + d[x];
                break;
            case GateKind::NegCube: d[i] = d[g.ch[0]] < 0 ? -1 : 3 * d[g.ch[0]]; break;
        }
    }
    return d;
}

bool is_formula(const Circuit& c) {
    std::vector<int> out(c.size(), 0);
    for (auto& g : c.gates)
        for (int x : g.ch) ++out[x];
    for (int o : c.outputs)
        if (o >= 0) ++out[o];
    for (int x : out)
        if (x > 1) return false;
    return true;
}

bool is_ihl(const Circuit& c) {
    for (auto& g : c.gates)
        if (g.kind == GateKind::Input && (!g.constant.is_zero() || g.form.is_zero())) return false;
    return true;
}

bool is_arity3(const Circuit& c) {
    for (auto& g : c.gates)
        if (g.kind != GateKind::Input && g.kind != GateKind::Add && g.kind != GateKind::Mul3) return false;
    return true;
}

bool has_unit_scales(const Circuit& c) {
    for (auto& g : c.gates)
        for (auto& s : g.sc)
            if (s != Laurent(1)) return false;
    return true;
}

Circuit prune(const Circuit& c) {
    std::vector<bool> live(c.size(), false);
    for (int o : c.outputs)
        if (o >= 0) live[o] = true;
    for (int i = c.size() - 1; i >= 0; --i)
        if (live[i])
            for (int x : c.gates[i].ch) live[x] = true;
    Circuit r(c.nvars);
    std::vector<int> id(c.size(), -1);
    for (int i = 0; i < c.size(); ++i) {
        if (!live[i]) continue;
        Gate g = c.gates[i];
        for (int& x : g.ch) x = id[x];
        r.gates.push_back(g);
        id[i] = r.size() - 1;
    }
    for (int o : c.outputs) r.outputs.push_back(o < 0 ? -1 : id[o]);
    return r;
}

// ---------------- trees

namespace {

struct Node;
using NP = std::shared_ptr<const Node>;

struct Node {
    GateKind kind = GateKind::Input;
    LinearForm form;
    Laurent constant;
    std::vector<NP> ch;
    std::vector<Laurent> sc;
    int size = 1;
};

NP mk_leaf(const LinearForm& f, const Laurent& c = Laurent()) {
    auto n = std::make_shared<Node>();
    n->form = f;
    n->constant = c;
    return n;
}

NP mk(GateKind k, std::vector<NP> ch, std::vector<Laurent> sc = {}) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    if (sc.empty()) sc.assign(ch.size(), Laurent(1));
    n->sc = std::move(sc);
    n->size = 1;
    for (auto& x : ch) n->size += x->size;
    n->ch = std::move(ch);
    return n;
}

// multiply by c, pushing scalars down to the inputs; edge scales are cleared
NP push(const NP& n, const Laurent& c) {
    if (!n) return nullptr;
    if (c.is_zero()) return nullptr;
    switch (n->kind) {
        case GateKind::Input: {
            LinearForm f = n->form.scale(c);
            Laurent k = n->constant * c;
            if (f.is_zero() && k.is_zero()) return nullptr;
            return mk_leaf(f, k);
        }
        case GateKind::Add: {
            NP a = push(n->ch[0], c * n->sc[0]), b = push(n->ch[1], c * n->sc[1]);
            if (!a) return b;
            if (!b) return a;
            return mk(GateKind::Add, {a, b});
        }
        case GateKind::Mul2:
        case GateKind::Mul3: {
            std::vector<NP> ch;
            for (size_t i = 0; i < n->ch.size(); ++i) {
                NP x = push(n->ch[i], i == 0 ? c * n->sc[i] : n->sc[i]);
                if (!x) return nullptr;
                ch.push_back(x);
            }
            return mk(n->kind, ch);
        }
        case GateKind::NegCube: {
            Laurent s = n->sc[0];
            if (c == Laurent(-1)) s = -s;
            else if (c != Laurent(1)) throw DomainError("UnsupportedScale", "cannot move a scalar into a cube");
            NP x = push(n->ch[0], s);
            if (!x) return nullptr;
            return mk(GateKind::NegCube, {x});
        }
    }
    return nullptr;
}

NP sadd(const NP& a, const NP& b, const Laurent& sa = Laurent(1), const Laurent& sb = Laurent(1)) {
    if (!a && !b) return nullptr;
    if (!a) return sb == Laurent(1) ? b : push(b, sb);
    if (!b) return sa == Laurent(1) ? a : push(a, sa);
    return mk(GateKind::Add, {a, b}, {sa, sb});
}

NP smul(GateKind k, std::vector<NP> ch, std::vector<Laurent> sc = {}) {
    for (auto& x : ch)
        if (!x) return nullptr;
    return mk(k, std::move(ch), std::move(sc));
}

NP from_circuit(const Circuit& c, int out, std::vector<NP>& memo) {
    if (out < 0) return nullptr;
    if (memo[out]) return memo[out];
    auto& g = c.gates[out];
    NP r;
    if (g.kind == GateKind::Input) {
        if (g.form.is_zero() && g.constant.is_zero()) return nullptr;
        r = mk_leaf(g.form, g.constant);
    } else {
        std::vector<NP> ch;
        for (int x : g.ch) ch.push_back(from_circuit(c, x, memo));
        bool anynull = false;
        for (auto& x : ch) anynull |= !x;
        if (anynull) {
            if (g.kind == GateKind::Add) r = sadd(ch[0], ch[1], g.sc[0], g.sc[1]);
            else r = nullptr;
        } else {
            r = mk(g.kind, ch, g.sc);
        }
    }
    memo[out] = r;
    return r;
}

NP tree_of(const Circuit& c, int out) {
    std::vector<NP> memo(c.size());
    return from_circuit(c, out, memo);
}

int emit(const NP& n, Circuit& c) {
    if (n->kind == GateKind::Input) return c.input(n->form, n->constant);
    std::vector<int> ch;
    for (auto& x : n->ch) ch.push_back(emit(x, c));
    Gate g;
    g.kind = n->kind;
    g.ch = ch;
    g.sc = n->sc;
    c.gates.push_back(g);
    return c.size() - 1;
}

Circuit tree_circuit(int nvars, const std::vector<NP>& roots) {
    Circuit c(nvars);
    for (auto& r : roots) c.outputs.push_back(r ? emit(r, c) : -1);
    return c;
}

int tree_depth(const NP& n) {
    int d = 0;
    for (auto& x : n->ch) d = std::max(d, tree_depth(x) + 1);
    return d;
}

}  // namespace

Circuit unfold(const Circuit& c) {
    validate(c);
    std::vector<NP> roots;
    for (int o : c.outputs) roots.push_back(push(tree_of(c, o), Laurent(1)));
    return tree_circuit(c.nvars, roots);
}

// ---------------- parser

namespace {

struct Parser {
    const std::string& s;
    size_t i = 0;
    int n;
    Circuit& c;

    void ws() {
        while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
    }
    bool eat(char ch) {
        ws();
        if (i < s.size() && s[i] == ch) {
            ++i;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& m) { throw DomainError("ParseError", m + " at position " + std::to_string(i)); }

    // a term is (gate, scale); gate -1 means the pure scalar
    using T = std::pair<int, Laurent>;

    int gate_of(const T& t) {
        if (t.first < 0) return c.input(LinearForm(n), t.second);
        if (t.second == Laurent(1)) return t.first;
        auto& g = c.gates[t.first];
        if (g.kind == GateKind::Input) return c.input(g.form.scale(t.second), g.constant * t.second);
        return c.add(t.first, t.first, t.second * Laurent(Q(1, 2)), t.second * Laurent(Q(1, 2)));
    }

    T expr() {
        std::vector<T> terms;
        bool neg = false;
        if (eat('-')) neg = true;
        else eat('+');
        for (;;) {
            T t = term();
            if (neg) t.second = -t.second;
            terms.push_back(t);
            if (eat('+')) neg = false;
            else if (eat('-')) neg = true;
            else break;
        }
        T acc = terms[0];
        for (size_t k = 1; k < terms.size(); ++k) {
            T t = terms[k];
            if (acc.first < 0 && t.first < 0) {
                acc.second += t.second;
                continue;
            }
            int a = acc.first < 0 ? gate_of(acc) : acc.first;
            int b = t.first < 0 ? gate_of(t) : t.first;
            Laurent sa = acc.first < 0 ? Laurent(1) : acc.second;
            Laurent sb = t.first < 0 ? Laurent(1) : t.second;
            acc = {c.add(a, b, sa, sb), Laurent(1)};
        }
        return acc;
    }

    T term() {
        Laurent scal(1);
        std::vector<int> fs;
        for (;;) {
            T f = factor();
            scal *= f.second;
            if (f.first >= 0) fs.push_back(f.first);
            if (!eat('*')) break;
        }
        if (fs.empty()) return {-1, scal};
        int g;
        if (fs.size() == 1) g = fs[0];
        else if (fs.size() == 3) g = c.mul3(fs[0], fs[1], fs[2]);
        else {
            g = c.mul2(fs[0], fs[1]);
            for (size_t k = 2; k < fs.size(); ++k) g = c.mul2(g, fs[k]);
        }
        return {g, scal};
    }

    T factor() {
        ws();
        if (eat('(')) {
            T t = expr();
            if (!eat(')')) fail("expected )");
            return t;
        }
        if (eat('-')) {
            T t = factor();
            t.second = -t.second;
            return t;
        }
        if (s.compare(i, 6, "ncube(") == 0) {
            i += 6;
            T t = expr();
            if (!eat(')')) fail("expected )");
            int g = c.negcube(gate_of({t.first, Laurent(1)}), t.second);
            if (t.first < 0) fail("cube of a constant");
            return {g, Laurent(1)};
        }
        if (i < s.size() && (s[i] == 'x' || s[i] == 'z')) {
            ++i;
            size_t j = i;
            while (i < s.size() && std::isdigit((unsigned char)s[i])) ++i;
            if (j == i) fail("expected variable index");
            int v = std::stoi(s.substr(j, i - j));
            if (v >= n) fail("variable out of range");
            return {c.input(LinearForm::var(n, v)), Laurent(1)};
        }
        size_t j = i;
        while (i < s.size() && (std::isdigit((unsigned char)s[i]) || s[i] == '/')) ++i;
        if (j == i) fail("unexpected character");
        return {-1, Laurent(parse_rational(s.substr(j, i - j)))};
    }
};

}  // namespace

Circuit parse_formula(const std::string& s, int nvars) {
    Circuit c(nvars);
    Parser p{s, 0, nvars, c};
    auto t = p.expr();
    p.ws();
    if (p.i != s.size()) p.fail("trailing input");
    c.outputs.push_back(p.gate_of(t));
    return prune(c);
}

// ---------------- JSON

static const char* kind_name(GateKind k) {
    switch (k) {
        case GateKind::Input: return "input";
        case GateKind::Add: return "add";
        case GateKind::Mul2: return "mul2";
        case GateKind::Mul3: return "mul3";
        case GateKind::NegCube: return "negcube";
    }
    return "";
}

json to_json(const Circuit& c) {
    json gs = json::array();
    for (auto& g : c.gates) {
        json j;
        j["kind"] = kind_name(g.kind);
        if (g.kind == GateKind::Input) {
            j["form"] = to_json(g.form);
            if (!g.constant.is_zero()) j["constant"] = to_json(g.constant);
        } else {
            j["children"] = g.ch;
            json s = json::array();
            for (auto& x : g.sc) s.push_back(to_json(x));
            j["scales"] = s;
        }
        gs.push_back(j);
    }
    return json{{"nvars", c.nvars}, {"gates", gs}, {"outputs", c.outputs}};
}

Circuit circuit_from_json(const json& j) {
    Circuit c(j.at("nvars").get<int>());
    for (auto& g : j.at("gates")) {
        Gate x;
        std::string k = g.at("kind").get<std::string>();
        if (k == "input") x.kind = GateKind::Input;
        else if (k == "add") x.kind = GateKind::Add;
        else if (k == "mul2") x.kind = GateKind::Mul2;
        else if (k == "mul3") x.kind = GateKind::Mul3;
        else if (k == "negcube") x.kind = GateKind::NegCube;
        else throw DomainError("MalformedCircuit", "unknown gate kind " + k);
        if (x.kind == GateKind::Input) {
            x.form = form_from_json(g.at("form"));
            x.form.c.resize(std::max(c.nvars, x.form.nvars()));
            if (g.contains("constant")) x.constant = laurent_from_json(g["constant"]);
        } else {
            x.ch = g.at("children").get<std::vector<int>>();
            if (g.contains("scales"))
                for (auto& s : g["scales"]) x.sc.push_back(laurent_from_json(s));
            else
                x.sc.assign(x.ch.size(), Laurent(1));
        }
        c.gates.push_back(x);
    }
    c.outputs = j.at("outputs").get<std::vector<int>>();
    validate(c);
    return c;
}

// ---------------- input homogenization

namespace {

using Term = std::pair<int, Laurent>;  // gate (or -1 for zero) times scalar

Term lin(Circuit& out, std::vector<Term> ts) {
    std::vector<Term> t;
    for (auto& x : ts)
        if (x.first >= 0 && !x.second.is_zero()) t.push_back(x);
    if (t.empty()) return {-1, Laurent()};
    while (t.size() > 1) {
        std::vector<Term> nx;
        for (size_t k = 0; k + 1 < t.size(); k += 2)
            nx.push_back({out.add(t[k].first, t[k + 1].first, t[k].second, t[k + 1].second), Laurent(1)});
        if (t.size() % 2) nx.push_back(t.back());
        t = nx;
    }
    return t[0];
}

int scale_gate(Circuit& out, int g, const Laurent& s) {
    if (s == Laurent(1)) return g;
    Gate x = out.gates[g];
    switch (x.kind) {
        case GateKind::Input:
            x.form = x.form.scale(s);
            x.constant = x.constant * s;
            break;
        case GateKind::Add:
            for (auto& e : x.sc) e = e * s;
            break;
        case GateKind::Mul2:
        case GateKind::Mul3: x.sc[0] = x.sc[0] * s; break;
        case GateKind::NegCube: return out.add(g, g, s * Laurent(Q(1, 2)), s * Laurent(Q(1, 2)));
    }
    out.gates.push_back(x);
    return out.size() - 1;
}

int materialize(Circuit& out, const Term& t) {
    if (t.first < 0) return -1;
    return scale_gate(out, t.first, t.second);
}

}  // namespace

Circuit ihl_homogenize(const Circuit& c, bool formula) {
    validate(c);
    Circuit out(c.nvars);
    std::vector<Laurent> cst(c.size());
    std::vector<Term> hat(c.size());
    for (int i = 0; i < c.size(); ++i) {
        auto& g = c.gates[i];
        switch (g.kind) {
            case GateKind::Input:
                cst[i] = g.constant;
                hat[i] = g.form.is_zero() ? Term{-1, Laurent()} : Term{out.input(g.form), Laurent(1)};
                break;
            case GateKind::Add: {
                int a = g.ch[0], b = g.ch[1];
                cst[i] = g.sc[0] * cst[a] + g.sc[1] * cst[b];
                hat[i] = lin(out, {{hat[a].first, g.sc[0] * hat[a].second}, {hat[b].first, g.sc[1] * hat[b].second}});
                break;
            }
            case GateKind::Mul2:
            case GateKind::Mul3: {
                size_t k = g.ch.size();
                std::vector<Laurent> cv(k);
                std::vector<Term> hv(k);
                Laurent prod(1);
                for (size_t t = 0; t < k; ++t) {
                    cv[t] = g.sc[t] * cst[g.ch[t]];
                    hv[t] = {hat[g.ch[t]].first, g.sc[t] * hat[g.ch[t]].second};
                    prod = prod * cv[t];
                }
                cst[i] = prod;
                std::vector<Term> terms;
                for (unsigned mask = 1; mask < (1u << k); ++mask) {
                    Laurent coef(1);
                    std::vector<int> ids;
                    std::vector<Laurent> ss;
                    bool dead = false;
                    for (size_t t = 0; t < k; ++t) {
                        if (mask & (1u << t)) {
                            if (hv[t].first < 0) dead = true;
                            ids.push_back(hv[t].first);
                            ss.push_back(hv[t].second);
                        } else {
                            coef = coef * cv[t];
                        }
                    }
                    if (dead || coef.is_zero()) continue;
                    int id;
                    if (ids.size() == 1) {
                        terms.push_back({ids[0], coef * ss[0]});
                        continue;
                    }
                    if (ids.size() == 2) id = out.mul2(ids[0], ids[1], ss[0], ss[1]);
                    else id = out.mul3(ids[0], ids[1], ids[2], ss[0], ss[1], ss[2]);
                    terms.push_back({id, coef});
                }
                hat[i] = lin(out, terms);
                break;
            }
            case GateKind::NegCube: {
                Laurent cc = g.sc[0] * cst[g.ch[0]];
                Term h = {hat[g.ch[0]].first, g.sc[0] * hat[g.ch[0]].second};
                cst[i] = -(cc * cc * cc);
                if (h.first < 0) {
                    hat[i] = {-1, Laurent()};
                    break;
                }
                std::vector<Term> terms;
                terms.push_back({out.negcube(h.first, h.second), Laurent(1)});
                if (!cc.is_zero()) {
                    terms.push_back({out.mul2(h.first, h.first, h.second, h.second), Laurent(-3) * cc});
                    terms.push_back({h.first, Laurent(-3) * cc * cc * h.second});
                }
                hat[i] = lin(out, terms);
                break;
            }
        }
    }
    for (int o : c.outputs) out.outputs.push_back(o < 0 ? -1 : materialize(out, hat[o]));
    out = prune(out);
    if (formula) out = unfold(out);
    return out;
}

// ---------------- arity 3 conversion

namespace {

NP expand_to_binary(const NP& n) {
    if (!n || n->kind == GateKind::Input) return n;
    std::vector<NP> ch;
    for (auto& x : n->ch) ch.push_back(expand_to_binary(x));
    switch (n->kind) {
        case GateKind::Mul3:
            return mk(GateKind::Mul2, {mk(GateKind::Mul2, {ch[0], ch[1]}, {n->sc[0], n->sc[1]}), ch[2]}, {Laurent(1), n->sc[2]});
        case GateKind::NegCube: {
            Laurent s = n->sc[0];
            return mk(GateKind::Mul2, {mk(GateKind::Mul2, {ch[0], ch[0]}, {-s, s}), ch[0]}, {Laurent(1), s});
        }
        default: return mk(n->kind, ch, n->sc);
    }
}

int parity(const NP& n, std::map<const Node*, int>& memo) {
    auto it = memo.find(n.get());
    if (it != memo.end()) return it->second;
    int p;
    if (n->kind == GateKind::Input) p = 1;
    else if (n->kind == GateKind::Add) p = parity(n->ch[0], memo);
    else {
        p = 0;
        for (auto& x : n->ch) p += parity(x, memo);
        p %= 2;
    }
    return memo[n.get()] = p;
}

std::pair<NP, NP> parity_split(const NP& n, std::map<const Node*, std::pair<NP, NP>>& memo) {
    auto it = memo.find(n.get());
    if (it != memo.end()) return it->second;
    std::pair<NP, NP> r;
    if (n->kind == GateKind::Input) {
        if (!n->constant.is_zero()) throw DomainError("NotIHL", "constant input");
        r = {nullptr, n};
    } else if (n->kind == GateKind::Add) {
        auto a = parity_split(n->ch[0], memo), b = parity_split(n->ch[1], memo);
        r = {sadd(a.first, b.first, n->sc[0], n->sc[1]), sadd(a.second, b.second, n->sc[0], n->sc[1])};
    } else {
        auto a = parity_split(n->ch[0], memo), b = parity_split(n->ch[1], memo);
        auto m = [&](const NP& x, const NP& y) { return smul(GateKind::Mul2, {x, y}, n->sc); };
        r = {sadd(m(a.first, b.first), m(a.second, b.second)), sadd(m(a.first, b.second), m(a.second, b.first))};
    }
    return memo[n.get()] = r;
}

struct Arity3Conv {
    Circuit& out;
    std::map<const Node*, int> par;

    // odd nodes compute their value, even nodes compute zsub times their value
    int conv(const NP& n, int zsub) {
        switch (n->kind) {
            case GateKind::Input: return out.input(n->form);
            case GateKind::Add: return out.add(conv(n->ch[0], zsub), conv(n->ch[1], zsub));
            case GateKind::Mul2: {
                const NP &a = n->ch[0], &b = n->ch[1];
                int pa = parity(a, par), pb = parity(b, par);
                if (pa && pb) {
                    if (zsub < 0) throw std::logic_error("dummy variable left unsubstituted");
                    return out.mul3(zsub, conv(a, -1), conv(b, -1));
                }
                if (pa) return conv(b, conv(a, -1));
                if (pb) return conv(a, conv(b, -1));
                return conv(b, conv(a, zsub));
            }
            default: throw std::logic_error("unexpected gate in arity 3 conversion");
        }
    }
};

NP derivative(const NP& n, int i) {
    if (!n) return nullptr;
    switch (n->kind) {
        case GateKind::Input: {
            Laurent c = i < n->form.nvars() ? n->form.c[i] : Laurent();
            if (c.is_zero()) return nullptr;
            return mk_leaf(LinearForm(n->form.nvars()), c);
        }
        case GateKind::Add: return sadd(derivative(n->ch[0], i), derivative(n->ch[1], i), n->sc[0], n->sc[1]);
        case GateKind::Mul2: {
            NP da = derivative(n->ch[0], i), db = derivative(n->ch[1], i);
            return sadd(smul(GateKind::Mul2, {da, n->ch[1]}, n->sc), smul(GateKind::Mul2, {n->ch[0], db}, n->sc));
        }
        default: throw std::logic_error("derivative expects a binary tree");
    }
}

int odd_route(const NP& t, Circuit& out) {
    std::map<const Node*, std::pair<NP, NP>> memo;
    NP odd = push(parity_split(t, memo).second, Laurent(1));
    if (!odd) return -1;
    Arity3Conv cv{out, {}};
    return cv.conv(odd, -1);
}

}  // namespace

Circuit to_arity3(const Circuit& f) {
    validate(f);
    if (f.outputs.size() != 1) throw DomainError("ArityMismatch", "expected a single output");
    if (!is_ihl(f)) throw DomainError("NotIHL", "input has a constant leaf");
    Poly p = eval(f)[0];
    if (!p.is_homogeneous()) throw DomainError("NonHomogeneous", "input polynomial is not homogeneous");
    Circuit out(f.nvars);
    NP t = push(expand_to_binary(tree_of(f, f.outputs[0])), Laurent(1));
    if (!t || p.is_zero()) {
        int sd = f.outputs[0] < 0 ? -1 : gate_degrees(f)[f.outputs[0]];
        out.outputs.assign(sd > 0 && sd % 2 == 0 ? f.nvars : 1, -1);
        return out;
    }
    int d = p.degree();
    if (d % 2) {
        out.outputs.push_back(odd_route(t, out));
    } else {
        for (int i = 0; i < f.nvars; ++i) {
            NP dt = derivative(t, i);
            if (!dt) {
                out.outputs.push_back(-1);
                continue;
            }
            Circuit dc = tree_circuit(f.nvars, {dt});
            Circuit h = ihl_homogenize(dc, true);
            NP ht = push(expand_to_binary(tree_of(h, h.outputs[0])), Laurent(1));
            out.outputs.push_back(ht ? odd_route(ht, out) : -1);
        }
    }
    return prune(out);
}

// ---------------- Brent over the arity 3 basis

namespace {

NP replace_path(const NP& n, const std::vector<int>& idx, size_t pos, size_t k, const NP& repl) {
    if (pos == k) return repl;
    int ci = idx[pos];
    NP nc = replace_path(n->ch[ci], idx, pos + 1, k, repl);
    if (!nc) {
        if (n->kind == GateKind::Add) return n->sc[1 - ci] == Laurent(1) ? n->ch[1 - ci] : push(n->ch[1 - ci], n->sc[1 - ci]);
        return nullptr;
    }
    std::vector<NP> ch = n->ch;
    ch[ci] = nc;
    return mk(n->kind, ch, n->sc);
}

NP brent(const NP& t) {
    if (!t || t->size <= 4) return t;
    int s = t->size;
    std::vector<int> idx;
    std::vector<NP> nodes{t};
    NP cur = t;
    while (3 * cur->size > 2 * s) {
        int best = 0;
        for (size_t k = 1; k < cur->ch.size(); ++k)
            if (cur->ch[k]->size > cur->ch[best]->size) best = (int)k;
        idx.push_back(best);
        cur = cur->ch[best];
        nodes.push_back(cur);
    }
    size_t k = idx.size();
    NP v = nodes.back();
    int ip = -1;
    for (int i = (int)k - 1; i >= 0; --i)
        if (nodes[i]->kind == GateKind::Mul3) {
            ip = i;
            break;
        }
    NP F00 = replace_path(t, idx, 0, k, nullptr);
    if (ip < 0) return sadd(brent(v), brent(F00));
    NP p = nodes[ip];
    int wi = idx[ip];
    std::vector<int> others;
    for (int c = 0; c < 3; ++c)
        if (c != wi) others.push_back(c);
    if (p->ch[others[1]]->size > p->ch[others[0]]->size) std::swap(others[0], others[1]);
    NP x = p->ch[others[0]], y = p->ch[others[1]];
    NP newp;
    if ((size_t)ip + 1 == k) {
        newp = y;
    } else {
        std::vector<int> sub(idx.begin() + ip + 1, idx.end());
        NP H = replace_path(nodes[ip + 1], sub, 0, sub.size(), nullptr);
        newp = sadd(smul(GateKind::Mul3, {H, x, y}), y);
    }
    NP F11 = replace_path(t, idx, 0, ip, newp);
    NP b00 = brent(F00), b11 = brent(F11);
    NP diff = sadd(b11, push(b00, Laurent(-1)));
    NP core = smul(GateKind::Mul3, {diff, brent(v), brent(x)});
    return sadd(core, b00);
}

}  // namespace

Circuit brent_arity3(const Circuit& f) {
    validate(f);
    if (f.outputs.size() != 1) throw DomainError("ArityMismatch", "expected a single output");
    if (!is_arity3(f)) throw DomainError("NotArity3", "only inputs, additions and arity 3 products are allowed");
    if (!is_ihl(f)) throw DomainError("NotIHL", "input has a constant leaf");
    if (!is_formula(f)) throw DomainError("NotFormula", "a gate is used twice");
    NP t = push(tree_of(f, f.outputs[0]), Laurent(1));
    return tree_circuit(f.nvars, {brent(t)});
}

int brent_depth_bound(int size) {
    int d = 1;
    for (; size > 4; size = 2 * size / 3) d += 2;
    return d;
}

// ---------------- VSBR over the arity 3 basis

namespace {

struct Vsbr {
    const Circuit& c;
    Circuit out;
    std::vector<int> deg;
    std::vector<std::vector<bool>> below;  // below[u][v]: v is in the subcircuit of u
    std::vector<LinearForm> linear;        // value of degree one gates
    std::map<int, Term> gmemo;
    std::map<int, std::vector<int>> frontier;
    std::map<std::tuple<int, int, int>, std::vector<Term>> dmemo;
    std::map<std::pair<int, int>, Laurent> cmemo;

    explicit Vsbr(const Circuit& cc) : c(cc), out(cc.nvars) {
        deg = gate_degrees(c);
        int n = c.size();
        below.assign(n, std::vector<bool>(n, false));
        linear.assign(n, LinearForm(c.nvars));
        for (int i = 0; i < n; ++i) {
            below[i][i] = true;
            for (int x : c.gates[i].ch)
                for (int j = 0; j <= x; ++j)
                    if (below[x][j]) below[i][j] = true;
            auto& g = c.gates[i];
            if (g.kind == GateKind::Input) linear[i] = g.form;
            else if (g.kind == GateKind::Add && deg[i] == 1)
                linear[i] = linear[g.ch[0]].scale(g.sc[0]) + linear[g.ch[1]].scale(g.sc[1]);
        }
    }

    // children of a product: w1 highest degree, w3 lowest of the other two
    std::array<int, 3> order(int w) const {
        auto& ch = c.gates[w].ch;
        int a = 0;
        for (int k = 1; k < 3; ++k)
            if (deg[ch[k]] > deg[ch[a]]) a = k;
        int b = (a + 1) % 3, d = (a + 2) % 3;
        if (deg[ch[b]] < deg[ch[d]]) std::swap(b, d);
        return {a, b, d};  // positions of w1, w2, w3
    }

    Laurent scale_prod(int w) const {
        auto& s = c.gates[w].sc;
        return s[0] * s[1] * s[2];
    }

    const std::vector<int>& F(int m) {
        auto it = frontier.find(m);
        if (it != frontier.end()) return it->second;
        std::vector<int> r;
        for (int w = 0; w < c.size(); ++w) {
            auto& g = c.gates[w];
            if (g.kind != GateKind::Mul3 || deg[w] <= m) continue;
            bool ok = true;
            for (int x : g.ch) ok = ok && deg[x] <= m;
            if (ok) r.push_back(w);
        }
        return frontier[m] = r;
    }

    Term mat(const std::vector<Term>& s) { return lin(out, s); }

    Term G(int u) {
        auto it = gmemo.find(u);
        if (it != gmemo.end()) return it->second;
        Term r{-1, Laurent()};
        if (deg[u] == 1) {
            if (!linear[u].is_zero()) r = {out.input(linear[u]), Laurent(1)};
        } else {
            int m = (2 * deg[u] + 2) / 3;
            std::vector<Term> terms;
            for (int w : F(m)) {
                if (!below[u][w]) continue;
                auto o = order(w);
                auto& ch = c.gates[w].ch;
                Term g3 = G(ch[o[2]]);
                if (g3.first < 0) continue;
                Term a = mat(D(u, w, materialize(out, g3)));
                Term g2 = G(ch[o[1]]), g1 = G(ch[o[0]]);
                if (a.first < 0 || g2.first < 0 || g1.first < 0) continue;
                int id = out.mul3(a.first, g2.first, g1.first, a.second * scale_prod(w), g2.second, g1.second);
                terms.push_back({id, Laurent(1)});
            }
            r = mat(terms);
        }
        return gmemo[u] = r;
    }

    Laurent coef(int u, int v) {
        if (u == v) return Laurent(1);
        auto key = std::make_pair(u, v);
        auto it = cmemo.find(key);
        if (it != cmemo.end()) return it->second;
        Laurent r;
        auto& g = c.gates[u];
        if (g.kind == GateKind::Add) r = g.sc[0] * coef(g.ch[0], v) + g.sc[1] * coef(g.ch[1], v);
        return cmemo[key] = r;
    }

    // [u:v] with z replaced by gate C
    std::vector<Term> D(int u, int v, int C) {
        if (!below[u][v]) return {};
        if (u == v) return {{C, Laurent(1)}};
        if (deg[u] < deg[v]) return {};
        if (deg[u] == deg[v]) {
            Laurent k = coef(u, v);
            if (k.is_zero()) return {};
            return {{C, k}};
        }
        auto key = std::make_tuple(u, v, C);
        auto it = dmemo.find(key);
        if (it != dmemo.end()) return it->second;
        int m = (deg[u] + deg[v]) / 2;
        std::vector<Term> terms;
        for (int w : F(m)) {
            if (!below[u][w]) continue;
            auto o = order(w);
            auto& ch = c.gates[w].ch;
            if (!below[ch[o[0]]][v]) continue;
            Term g3 = G(ch[o[2]]);
            if (g3.first < 0) continue;
            Term a = mat(D(u, w, materialize(out, g3)));
            Term b = mat(D(ch[o[0]], v, C));
            Term g2 = G(ch[o[1]]);
            if (a.first < 0 || b.first < 0 || g2.first < 0) continue;
            int id = out.mul3(a.first, b.first, g2.first, a.second * scale_prod(w), b.second, g2.second);
            terms.push_back({id, Laurent(1)});
        }
        return dmemo[key] = terms;
    }
};

}  // namespace

Circuit vsbr_arity3(const Circuit& c) {
    validate(c);
    if (c.outputs.size() != 1) throw DomainError("ArityMismatch", "expected a single output");
    if (!is_arity3(c)) throw DomainError("NotArity3", "only inputs, additions and arity 3 products are allowed");
    if (!is_ihl(c)) throw DomainError("NotIHL", "input has a constant leaf");
    auto deg = gate_degrees(c);
    for (int x : deg)
        if (x < 0) throw DomainError("NonHomogeneous", "an addition joins different degrees");
    Vsbr v(c);
    int o = c.outputs[0];
    if (o < 0) {
        v.out.outputs.push_back(-1);
        return v.out;
    }
    v.out.outputs.push_back(materialize(v.out, v.G(o)));
    return prune(v.out);
}

int vsbr_mult_depth_bound(int degree) {
    if (degree <= 1) return 0;
    return 2 * (int)std::ceil(std::log((double)degree) / std::log(1.5)) + 1;
}

Poly vsbr_bracket(const Circuit& c, int u, int v) {
    validate(c);
    auto deg = gate_degrees(c);
    Circuit all = c;
    all.outputs.clear();
    for (int i = 0; i < c.size(); ++i) all.outputs.push_back(i);
    auto val = eval(all);
    int n = c.nvars + 1;
    std::function<Poly(int)> rec = [&](int x) -> Poly {
        if (x == v) return Poly::var(n, c.nvars);
        auto& g = c.gates[x];
        switch (g.kind) {
            case GateKind::Input: return Poly(n);
            case GateKind::Add: return rec(g.ch[0]).scale(g.sc[0]) + rec(g.ch[1]).scale(g.sc[1]);
            case GateKind::Mul3: {
                int a = 0;
                for (int k = 1; k < 3; ++k)
                    if (deg[g.ch[k]] > deg[g.ch[a]]) a = k;
                Poly r = rec(g.ch[a]).scale(g.sc[0] * g.sc[1] * g.sc[2]);
                for (int k = 0; k < 3; ++k)
                    if (k != a) r = r * val[g.ch[k]].with_nvars(n);
                return r;
            }
            default: throw DomainError("NotArity3", "bracket needs an arity 3 circuit");
        }
    };
    return rec(u);
}

// ---------------- Ben-Or and Cleve

namespace {

NP binary_tree(const Circuit& f) {
    validate(f);
    if (f.outputs.size() != 1) throw DomainError("ArityMismatch", "expected a single output");
    if (!is_ihl(f)) throw DomainError("NotIHL", "input has a constant leaf");
    return push(expand_to_binary(tree_of(f, f.outputs[0])), Laurent(1));
}

LMatrix single(int dim, int nvars, int i, int j, const LinearForm& l) {
    LMatrix m(dim, std::vector<LinearForm>(dim, LinearForm(nvars)));
    m[i][j] = l;
    m[i][j].c.resize(nvars);
    return m;
}

void boc(const NP& n, int i, int j, int sign, int nvars, std::vector<LMatrix>& out) {
    switch (n->kind) {
        case GateKind::Input: out.push_back(single(3, nvars, i, j, n->form.scale(Laurent(sign)))); return;
        case GateKind::Add:
            boc(n->ch[0], i, j, sign, nvars, out);
            boc(n->ch[1], i, j, sign, nvars, out);
            return;
        case GateKind::Mul2: {
            int k = 3 - i - j;
            const NP &f = n->ch[0], &g = n->ch[1];
            if (sign > 0) {
                boc(f, i, k, 1, nvars, out);
                boc(g, k, j, 1, nvars, out);
                boc(f, i, k, -1, nvars, out);
                boc(g, k, j, -1, nvars, out);
            } else {
                boc(f, i, k, -1, nvars, out);
                boc(g, k, j, 1, nvars, out);
                boc(f, i, k, 1, nvars, out);
                boc(g, k, j, -1, nvars, out);
            }
            return;
        }
        default: throw std::logic_error("unexpected gate in matrix compilation");
    }
}

PMatrix product(int dim, int nvars, const std::vector<LMatrix>& fs, size_t from, size_t to) {
    PMatrix m(dim, std::vector<Poly>(dim, Poly(nvars)));
    for (int k = 0; k < dim; ++k) m[k][k] = Poly::constant(nvars, Laurent(1));
    for (size_t t = from; t < to; ++t) {
        auto& A = fs[t];
        PMatrix nx = m;
        for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) {
                if (A[a][b].is_zero()) continue;
                Poly l = A[a][b].to_poly().with_nvars(nvars);
                for (int r = 0; r < dim; ++r)
                    if (!m[r][a].is_zero()) nx[r][b] += m[r][a] * l;
            }
        m = nx;
    }
    return m;
}

void product_terms(const NP& n, std::vector<NP>& out) {
    if (n->kind == GateKind::Add) {
        product_terms(n->ch[0], out);
        product_terms(n->ch[1], out);
    } else if (n->kind == GateKind::Mul2) {
        out.push_back(n);
    } else {
        throw DomainError("NotProductSum", "a top-level summand is not a product");
    }
}

Poly tree_value(const NP& n, int nvars) { return eval(tree_circuit(nvars, {n}))[0]; }

}  // namespace

int arity2_depth(const Circuit& f) {
    NP t = binary_tree(f);
    return t ? tree_depth(t) : 0;
}

PMatrix expand_program(const MatrixProgram& p) {
    PMatrix m = product(p.dim, p.nvars, p.factors, 0, p.factors.size());
    for (int k = 0; k < p.dim; ++k) m[k][k] -= Poly::constant(p.nvars, Laurent(1));
    for (auto& row : m)
        for (auto& x : row) x = x.scale(p.alpha);
    return m;
}

MatrixProgram ben_or_cleve(const Circuit& f, int i, int j) {
    if (i == j || i < 0 || j < 0 || i > 2 || j > 2) throw DomainError("BadPosition", "need an off-diagonal position");
    NP t = binary_tree(f);
    MatrixProgram p;
    p.nvars = f.nvars;
    p.pi = i;
    p.pj = j;
    if (t) boc(t, i, j, 1, f.nvars, p.factors);
    return p;
}

bool check_ben_or_cleve(const MatrixProgram& p, const Poly& f) {
    PMatrix m = expand_program(p);
    for (int a = 0; a < p.dim; ++a)
        for (int b = 0; b < p.dim; ++b) {
            Poly want = (a == p.pi && b == p.pj) ? f.with_nvars(p.nvars) : Poly(p.nvars);
            if (m[a][b] != want) return false;
        }
    return true;
}

MatrixProgram ben_or_cleve_trace(const Circuit& f) {
    NP t = binary_tree(f);
    MatrixProgram p;
    p.nvars = f.nvars;
    p.trace = true;
    p.pi = p.pj = 0;
    p.alpha = Laurent::eps(-2);
    if (!t) return p;
    std::vector<NP> terms;
    product_terms(t, terms);
    for (auto& term : terms) {
        NP g = push(term->ch[0], term->sc[0] * Laurent::eps(1));
        NP h = push(term->ch[1], term->sc[1] * Laurent::eps(1));
        size_t before = p.factors.size();
        boc(g, 0, 1, 1, f.nvars, p.factors);
        boc(h, 1, 0, 1, f.nvars, p.factors);
        boc(g, 0, 1, -1, f.nvars, p.factors);
        boc(h, 1, 0, -1, f.nvars, p.factors);
        p.blocks.push_back((int)(p.factors.size() - before));
    }
    return p;
}

TraceReport check_trace_program(const MatrixProgram& p, const Circuit& f) {
    TraceReport r;
    Poly fv = eval(f)[0].with_nvars(p.nvars);
    PMatrix m = expand_program(p);
    r.entry_ok = equiv_mod_eps(m[0][0], fv);
    Poly tr(p.nvars);
    for (int k = 0; k < p.dim; ++k) tr += m[k][k];
    r.trace_ok = equiv_mod_eps(tr, fv);
    auto safe_limit = [&](const Poly& x) {
        try {
            return limit(x);
        } catch (const DomainError&) {
            return Poly(p.nvars);
        }
    };
    r.entry_limit = safe_limit(m[0][0]);
    r.trace_limit = safe_limit(tr);
    NP t = binary_tree(f);
    r.blocks_ok = r.commutator_ok = true;
    if (!t) return r;
    std::vector<NP> terms;
    product_terms(t, terms);
    if (terms.size() != p.blocks.size()) {
        r.blocks_ok = r.commutator_ok = false;
        return r;
    }
    size_t at = 0;
    for (size_t a = 0; a < terms.size(); ++a) {
        Poly g = tree_value(terms[a]->ch[0], p.nvars).scale(terms[a]->sc[0]);
        Poly h = tree_value(terms[a]->ch[1], p.nvars).scale(terms[a]->sc[1]);
        PMatrix M = product(p.dim, p.nvars, p.factors, at, at + p.blocks[a]);
        at += p.blocks[a];
        for (int x = 0; x < p.dim; ++x)
            for (int y = 0; y < p.dim; ++y) {
                Poly e = M[x][y];
                if (x == y) e -= Poly::constant(p.nvars, Laurent(1));
                if (x == 0 && y == 0) e -= (g * h).scale(Laurent::eps(2));
                if (!e.is_zero() && e.min_eps() < 3) r.blocks_ok = false;
                if (x == 1 && y == 1) e += (g * h).scale(Laurent::eps(2));
                if (!e.is_zero() && e.min_eps() < 3) r.commutator_ok = false;
            }
    }
    return r;
}

json to_json(const MatrixProgram& p) {
    json fs = json::array();
    for (auto& A : p.factors) {
        json rows = json::array();
        for (auto& row : A) {
            json jr = json::array();
            for (auto& l : row) jr.push_back(to_json(l));
            rows.push_back(jr);
        }
        fs.push_back(rows);
    }
    json j{{"dim", p.dim}, {"nvars", p.nvars}, {"alpha", to_json(p.alpha)}, {"factors", fs}};
    if (p.trace) j["position"] = "trace";
    else j["position"] = {p.pi, p.pj};
    if (!p.blocks.empty()) j["blocks"] = p.blocks;
    return j;
}

MatrixProgram program_from_json(const json& j) {
    MatrixProgram p;
    p.dim = j.at("dim").get<int>();
    p.nvars = j.at("nvars").get<int>();
    p.alpha = laurent_from_json(j.at("alpha"));
    if (j.at("position").is_string()) {
        p.trace = true;
    } else {
        p.pi = j["position"][0].get<int>();
        p.pj = j["position"][1].get<int>();
    }
    for (auto& A : j.at("factors")) {
        LMatrix m;
        for (auto& row : A) {
            std::vector<LinearForm> r;
            for (auto& l : row) {
                LinearForm x = form_from_json(l);
                x.c.resize(p.nvars);
                r.push_back(x);
            }
            m.push_back(r);
        }
        if ((int)m.size() != p.dim) throw DomainError("MalformedProgram", "factor has the wrong dimension");
        p.factors.push_back(m);
    }
    if (j.contains("blocks")) p.blocks = j["blocks"].get<std::vector<int>>();
    return p;
}

// ---------------- parity-alternating polynomials

Poly continuant_eval(const std::vector<LinearForm>& ls, int d, int nvars) {
    Poly one = Poly::constant(nvars, Laurent(1));
    Poly m00 = one, m01(nvars), m10(nvars), m11 = one;
    for (size_t i = 0; i < ls.size(); ++i) {
        Poly l = ls[i].to_poly().with_nvars(nvars);
        if (l.is_zero()) continue;
        if (i % 2 == 0) {
            m01 += (m00 * l).truncate_degree(d);
            m11 += (m10 * l).truncate_degree(d);
        } else {
            m00 += (m01 * l).truncate_degree(d);
            m10 += (m11 * l).truncate_degree(d);
        }
    }
    return (m00 + m01).homogeneous_part(d);
}

Poly c_poly(int n, int d) {
    if (n < 1 || d < 1) throw DomainError("OutOfRange", "n and d must be positive");
    std::vector<LinearForm> xs;
    for (int i = 0; i < n; ++i) xs.push_back(LinearForm::var(n, i));
    return continuant_eval(xs, d, n);
}

Poly c_poly_enum(int n, int d) {
    if (n < 1 || d < 1) throw DomainError("OutOfRange", "n and d must be positive");
    Poly r(n);
    std::vector<int> seq;
    std::function<void(int)> rec = [&](int next) {
        if ((int)seq.size() == d) {
            std::vector<int> e(n, 0);
            for (int i : seq) e[i - 1] += 1;
            r.add_term(Monomial(e), Laurent(1));
            return;
        }
        for (int i = next; i <= n; ++i) {
            bool want_odd = seq.size() % 2 == 0;
            if ((i % 2 == 1) != want_odd) continue;
            seq.push_back(i);
            rec(i + 1);
            seq.pop_back();
        }
    };
    rec(1);
    return r;
}

PMatrix nc_elementary(const std::vector<PMatrix>& xs, int d) {
    if (xs.empty()) throw DomainError("ArityMismatch", "no matrices");
    size_t dim = xs[0].size();
    int nv = 0;
    for (auto& X : xs) {
        if (X.size() != dim) throw DomainError("DimensionMismatch", "matrices differ in size");
        for (auto& row : X) {
            if (row.size() != dim) throw DomainError("DimensionMismatch", "matrix is not square");
            for (auto& p : row) nv = std::max(nv, p.nvars());
        }
    }
    auto zero = [&] { return PMatrix(dim, std::vector<Poly>(dim, Poly(nv))); };
    // e[k] = elementary sum of length k over the prefix processed so far
    std::vector<PMatrix> e(d + 1, zero());
    for (size_t k = 0; k < dim; ++k) e[0][k][k] = Poly::constant(nv, Laurent(1));
    for (auto& X : xs) {
        for (int k = d; k >= 1; --k) {
            PMatrix add = zero();
            for (size_t a = 0; a < dim; ++a)
                for (size_t b = 0; b < dim; ++b)
                    for (size_t c = 0; c < dim; ++c)
                        if (!e[k - 1][a][c].is_zero() && !X[c][b].is_zero())
                            add[a][b] += e[k - 1][a][c] * X[c][b].with_nvars(nv);
            for (size_t a = 0; a < dim; ++a)
                for (size_t b = 0; b < dim; ++b) e[k][a][b] += add[a][b];
        }
    }
    return e[d];
}

// ---------------- continuant compilation

namespace {

// sums and negative cubes only
struct Ex {
    int kind = 0;  // 0 input, 1 sum, 2 negative cube
    LinearForm form;
    std::vector<std::pair<std::shared_ptr<const Ex>, Laurent>> terms;
};
using EP = std::shared_ptr<const Ex>;

EP ex_of(const Circuit& c, int g, std::map<int, EP>& memo) {
    auto it = memo.find(g);
    if (it != memo.end()) return it->second;
    auto& x = c.gates[g];
    auto e = std::make_shared<Ex>();
    switch (x.kind) {
        case GateKind::Input:
            if (!x.constant.is_zero() || x.form.is_zero()) throw DomainError("NotIHL", "input is not a nonzero linear form");
            e->form = x.form;
            e->form.c.resize(c.nvars);
            break;
        case GateKind::Add:
            e->kind = 1;
            e->terms = {{ex_of(c, x.ch[0], memo), x.sc[0]}, {ex_of(c, x.ch[1], memo), x.sc[1]}};
            break;
        case GateKind::NegCube:
            e->kind = 2;
            e->terms = {{ex_of(c, x.ch[0], memo), x.sc[0]}};
            break;
        case GateKind::Mul3: {
            // 24xyz = (x+y+z)^3 - (x+y-z)^3 - (x-y+z)^3 + (x-y-z)^3, and t^3 = -ncube(t)
            EP a = ex_of(c, x.ch[0], memo), b = ex_of(c, x.ch[1], memo), z = ex_of(c, x.ch[2], memo);
            Laurent s = x.sc[0] * x.sc[1] * x.sc[2];
            e->kind = 1;
            const int sg[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
            const long coef[4] = {-1, 1, 1, -1};
            for (int k = 0; k < 4; ++k) {
                auto t = std::make_shared<Ex>();
                t->kind = 1;
                t->terms = {{a, Laurent(1)}, {b, Laurent(sg[k][0])}, {z, Laurent(sg[k][1])}};
                auto cube = std::make_shared<Ex>();
                cube->kind = 2;
                cube->terms = {{t, Laurent(1)}};
                e->terms.push_back({cube, s * Laurent(Q(coef[k], 24))});
            }
            break;
        }
        case GateKind::Mul2: throw DomainError("NotArity3", "binary products are not allowed");
    }
    memo[g] = e;
    return e;
}

void merge(std::vector<LinearForm>& acc, const std::vector<LinearForm>& l) {
    if (l.empty()) return;
    if (acc.empty()) {
        acc = l;
        return;
    }
    acc.back() = acc.back() + l.front();
    acc.insert(acc.end(), l.begin() + 1, l.end());
}

struct CBuild {
    int K;
    // forms l with prod (id + l_i E_{odd/even}) - id ~ alpha f E_odd, eps currently at power s
    std::vector<LinearForm> build(const EP& e, const Laurent& alpha, int s) {
        switch (e->kind) {
            case 0: return {e->form.scale(alpha)};
            case 1: {
                std::vector<LinearForm> acc;
                for (auto& [t, sc] : e->terms) merge(acc, build(t, alpha * sc, s));
                return acc;
            }
            default: {
                auto& [t, sc] = e->terms[0];
                auto A = build(t, sc * Laurent::eps(-s), s * K);
                auto B = build(t, -(sc * Laurent::eps(-s)), s * K);
                auto C = build(t, sc * Laurent::eps(2 * s) * alpha, 3 * s);
                std::vector<LinearForm> r = A;
                r.insert(r.end(), C.rbegin(), C.rend());
                r.insert(r.end(), B.begin(), B.end());
                return r;
            }
        }
    }
};

}  // namespace

ContinuantResult continuant_compile(const Circuit& c, int d) {
    validate(c);
    if (d < 1) throw DomainError("DegreeMismatch", "degree must be positive");
    auto vals = eval(c);
    ContinuantResult res;
    res.d = d;
    std::map<int, EP> memo;
    if (d % 2) {
        if (c.outputs.size() != 1) throw DomainError("ArityMismatch", "odd degree needs a single output");
        Poly f = vals[0];
        if (!f.is_homogeneous()) throw DomainError("NonHomogeneous", "output is not homogeneous");
        if (!f.is_zero() && f.degree() != d) throw DomainError("DegreeMismatch", "output degree differs from d");
        res.target = f;
        if (c.outputs[0] < 0) {
            res.ok = true;
            res.value = Poly(c.nvars);
            return res;
        }
        EP root = ex_of(c, c.outputs[0], memo);
        for (int K = 2; K <= 10; ++K) {
            CBuild b{K};
            auto forms = b.build(root, Laurent(1), 1);
            Poly v = continuant_eval(forms, d, c.nvars);
            if (equiv_mod_eps(v, f)) {
                res.precision = K;
                res.forms = forms;
                res.r = (int)forms.size();
                res.value = v;
                res.ok = true;
                return res;
            }
        }
        throw DomainError("PrecisionFailure", "no gadget exponent up to 10 reproduced the output");
    }
    if ((int)c.outputs.size() != c.nvars) throw DomainError("ArityMismatch", "even degree needs one output per variable");
    Poly f(c.nvars);
    for (int i = 0; i < c.nvars; ++i) {
        if (!vals[i].is_homogeneous()) throw DomainError("NonHomogeneous", "partial derivative is not homogeneous");
        if (!vals[i].is_zero() && vals[i].degree() != d - 1) throw DomainError("DegreeMismatch", "partial has the wrong degree");
        f += Poly::var(c.nvars, i) * vals[i];
    }
    f = f.scale(Laurent(Q(1, d)));
    for (int i = 0; i < c.nvars; ++i)
        if (f.partial(i) != vals[i]) throw DomainError("InconsistentPartials", "outputs are not the gradient of one polynomial");
    res.target = f;
    for (int K = 2; K <= 10; ++K) {
        CBuild b{K};
        std::vector<LinearForm> forms;
        for (int i = 0; i < c.nvars; ++i) {
            if (c.outputs[i] < 0) continue;
            EP e = ex_of(c, c.outputs[i], memo);
            Laurent inv_d(Q(1, d));
            auto P = b.build(e, Laurent::eps(1) * inv_d, 3);
            auto M = b.build(e, -(Laurent::eps(1) * inv_d), 3);
            forms.push_back(LinearForm::var(c.nvars, i, -Laurent::eps(1)));
            forms.insert(forms.end(), M.rbegin(), M.rend());
            forms.push_back(LinearForm::var(c.nvars, i, Laurent::eps(1)));
            forms.insert(forms.end(), P.rbegin(), P.rend());
        }
        for (auto& l : forms) l = l.subst_eps_power(d / 2).scale(Laurent::eps(-1));
        Poly v = continuant_eval(forms, d, c.nvars);
        if (equiv_mod_eps(v, f)) {
            res.precision = K;
            res.forms = forms;
            res.r = (int)forms.size();
            res.value = v;
            res.ok = true;
            return res;
        }
    }
    throw DomainError("PrecisionFailure", "no gadget exponent up to 10 reproduced the output");
}

// ---------------- random instances

namespace {

LinearForm random_form(std::mt19937& rng, int n) {
    std::uniform_int_distribution<int> coef(-2, 2), var(0, n - 1);
    LinearForm l(n);
    while (l.is_zero()) {
        int k = 1 + (int)(rng() % 2);
        for (int t = 0; t < k; ++t) l.c[var(rng)] += Laurent((long)coef(rng));
    }
    return l;
}

}  // namespace

Circuit random_ihl_formula(std::mt19937& rng, int nvars, int depth) {
    Circuit c(nvars);
    std::function<int(int)> rec = [&](int dep) -> int {
        if (dep == 0 || rng() % 10 < 2) return c.input(random_form(rng, nvars));
        int a = rec(dep - 1), b = rec(dep - 1);
        return rng() % 2 ? c.add(a, b) : c.mul2(a, b);
    };
    c.outputs.push_back(rec(depth));
    return c;
}

Circuit random_homogeneous_formula(std::mt19937& rng, int nvars, int degree) {
    Circuit c(nvars);
    std::function<int(int, int)> rec = [&](int deg, int budget) -> int {
        if (deg == 1) {
            if (budget > 0 && rng() % 4 == 0) return c.add(rec(1, 0), rec(1, 0));
            return c.input(random_form(rng, nvars));
        }
        if (budget > 0 && rng() % 4 == 0) return c.add(rec(deg, budget - 1), rec(deg, budget - 1));
        int a = 1 + (int)(rng() % (deg - 1));
        return c.mul2(rec(a, budget - 1), rec(deg - a, budget - 1));
    };
    c.outputs.push_back(rec(degree, 2));
    return c;
}

Circuit random_arity3_formula(std::mt19937& rng, int nvars, int degree, int maxgates) {
    if (degree % 2 == 0) throw DomainError("DegreeMismatch", "arity 3 formulas have odd degree");
    for (;;) {
        Circuit c(nvars);
        std::function<int(int)> rec = [&](int deg) -> int {
            if (deg == 1) {
                if (rng() % 5 == 0) return c.add(c.input(random_form(rng, nvars)), c.input(random_form(rng, nvars)));
                return c.input(random_form(rng, nvars));
            }
            if (rng() % 6 == 0) return c.add(rec(deg), rec(deg));
            // split deg into three odd parts
            std::vector<int> parts{1, 1, 1};
            int rest = deg - 3;
            while (rest > 0) {
                parts[rng() % 3] += 2;
                rest -= 2;
            }
            int a = rec(parts[0]), b = rec(parts[1]), z = rec(parts[2]);
            return c.mul3(a, b, z);
        };
        c.outputs.push_back(rec(degree));
        if (c.size() <= maxgates) return c;
    }
}

Circuit random_arity3_circuit(std::mt19937& rng, int nvars, int gates) {
    Circuit c(nvars);
    for (int i = 0; i < nvars; ++i) c.input(random_form(rng, nvars));
    std::vector<int> deg(nvars, 1);
    while (c.size() < gates) {
        int n = c.size();
        int a = n - 1;
        std::vector<int> same;
        for (int b = 0; b < n - 1; ++b)
            if (deg[b] == deg[a]) same.push_back(b);
        if (!same.empty() && rng() % 3 == 0) {
            int b = same[rng() % same.size()];
            c.add(a, b, Laurent((long)(rng() % 3) + 1), Laurent(1));
            deg.push_back(deg[a]);
            continue;
        }
        int b = rng() % n, z = rng() % n;
        if (deg[a] + deg[b] + deg[z] > 27) {
            b = rng() % nvars;
            z = rng() % nvars;
        }
        if (deg[a] + deg[b] + deg[z] > 27) a = rng() % nvars;
        c.mul3(a, b, z);
        deg.push_back(deg[a] + deg[b] + deg[z]);
    }
    c.outputs.push_back(c.size() - 1);
    return prune(c);
}

}  // namespace bwr
