#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bwr/circuitc.hpp"
#include "bwr/latin.hpp"
#include "bwr/symrep.hpp"
#include "bwr/waring.hpp"

using namespace bwr;
namespace fs = std::filesystem;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Opts {
    bool as_json = false;
    std::string out;
};

std::string slurp(const std::string& path) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const std::string& path) {
    try {
        return json::parse(slurp(path));
    } catch (const json::parse_error& e) {
        throw IoError(path + ": " + e.what());
    }
}

void emit(const Opts& o, const std::string& text) {
    if (o.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream f(o.out);
    if (!f) throw IoError("cannot write " + o.out);
    f << text;
    if (!text.empty() && text.back() != '\n') f << "\n";
}

void emit(const Opts& o, const json& j, const std::string& text) { emit(o, o.as_json ? j.dump(2) : text); }

// circuits come from a JSON file or a formula string
struct CircuitSource {
    std::string in, formula;
    int nvars = 0;
    void add(CLI::App* c) {
        c->add_option("--in", in, "circuit JSON file, - for stdin");
        c->add_option("--formula", formula, "formula text such as \"x0*x1 + 2*x2\"");
        c->add_option("--nvars", nvars, "variable count for --formula");
    }
    Circuit load() const {
        if (!formula.empty()) {
            int n = nvars;
            if (n <= 0) {
                // smallest count covering every x<i> mentioned
                for (size_t i = 0; i < formula.size(); ++i)
                    if (formula[i] == 'x') n = std::max(n, std::atoi(formula.c_str() + i + 1) + 1);
            }
            return parse_formula(formula, n);
        }
        if (in.empty()) throw IoError("need --in or --formula");
        return circuit_from_json(read_json(in));
    }
};

std::string circuit_text(const Circuit& c) {
    std::ostringstream os;
    os << "gates " << c.size() << " depth " << c.depth() << " mult_depth " << c.mult_depth() << "\n";
    for (auto& p : eval(c)) os << p.str() << "\n";
    return os.str();
}

json circuit_report(const Circuit& c) {
    json j = to_json(c);
    j["size"] = c.size();
    j["depth"] = c.depth();
    j["mult_depth"] = c.mult_depth();
    return j;
}

fs::path cache_dir() {
    const char* e = std::getenv("BWR_CACHE_DIR");
    if (!e || !*e) return {};
    fs::path p(e);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create cache directory " + p.string());
    return p;
}

std::string scan_tsv(const std::vector<ScanEntry>& es, bool appendix) {
    std::ostringstream os;
    if (appendix) {
        for (auto& e : es) os << partition_str(e.lam) << "_{" << e.a << ">" << e.b << "}\n";
        return os.str();
    }
    os << "lambda\ta\tb\n";
    for (auto& e : es) os << partition_str(e.lam) << "\t" << e.a << "\t" << e.b << "\n";
    return os.str();
}

json scan_json(int d, int D, const std::vector<ScanEntry>& es) {
    json rows = json::array();
    for (auto& e : es) rows.push_back({{"lambda", e.lam}, {"a", e.a}, {"b", e.b}});
    return json{{"d", d}, {"delta", D}, {"rows", rows}};
}

std::vector<ScanEntry> cached_scan(int d, int D) {
    fs::path dir = cache_dir();
    fs::path file = dir.empty() ? fs::path() : dir / ("scan-" + std::to_string(d) + "-" + std::to_string(D) + ".json");
    if (!file.empty() && fs::exists(file)) {
        std::vector<ScanEntry> es;
        for (auto& r : read_json(file.string()).at("rows"))
            es.push_back({r.at("lambda").get<Partition>(), r.at("a").get<long>(), r.at("b").get<long>()});
        return es;
    }
    SymrepContext ctx;
    auto es = ctx.obstruction_scan(d, D);
    if (!file.empty()) {
        std::ofstream f(file);
        if (!f) throw IoError("cannot write " + file.string());
        f << scan_json(d, D, es).dump() << "\n";
    }
    return es;
}

std::string decomposition_text(const WaringDecomposition& w) {
    std::ostringstream os;
    os << "summands " << w.size() << (w.is_border() ? " border" : " exact") << "\n";
    for (size_t i = 0; i < w.size(); ++i) os << w.scales[i].str() << " * (" << w.forms[i].str() << ")^" << w.d << "\n";
    return os.str();
}

std::string gad_text(const GAD& g) {
    std::ostringstream os;
    for (auto& s : g.summands) os << "(" << s.ell.str() << ")^" << g.d - s.r + 1 << " * (" << s.g.str() << ")\n";
    return os.str();
}

// verify: each item is {"relation", "input", "output"}
struct Verdict {
    bool ok;
    std::string residual;
};

Verdict check_item(const json& item) {
    std::string rel = item.at("relation").get<std::string>();
    const json& in = item.at("input");
    const json& out = item.at("output");
    auto diff = [](const Poly& a, const Poly& b) { return Verdict{a == b, (a - b).str()}; };
    if (rel == "eval-equality") {
        auto a = eval(circuit_from_json(in)), b = eval(circuit_from_json(out));
        if (a.size() != b.size()) return {false, "output counts differ"};
        for (size_t i = 0; i < a.size(); ++i) {
            auto v = diff(a[i], b[i]);
            if (!v.ok) return v;
        }
        return {true, "0"};
    }
    if (rel == "boc" || rel == "matrix-identity") {
        Circuit f = circuit_from_json(in);
        MatrixProgram p = program_from_json(out);
        Poly fv = eval(f)[0].with_nvars(p.nvars);
        PMatrix m = expand_program(p);
        for (int a = 0; a < p.dim; ++a)
            for (int b = 0; b < p.dim; ++b) {
                Poly want = (a == p.pi && b == p.pj) ? fv : Poly(p.nvars);
                if (m[a][b] != want)
                    return {false, "entry (" + std::to_string(a + 1) + "," + std::to_string(b + 1) + "): " + (m[a][b] - want).str()};
            }
        return {true, "0"};
    }
    if (rel == "equiv-mod-eps") {
        Circuit f = circuit_from_json(in);
        Poly fv = eval(f)[0];
        std::vector<LinearForm> ls;
        for (auto& l : out.at("forms")) {
            LinearForm x = form_from_json(l);
            x.c.resize(f.nvars);
            ls.push_back(x);
        }
        Poly v = continuant_eval(ls, out.at("d").get<int>(), f.nvars);
        bool ok = equiv_mod_eps(v, fv);
        std::string res;
        try {
            res = (limit(v) - fv).str();
        } catch (const DomainError& e) {
            res = e.what();
        }
        return {ok, res};
    }
    if (rel == "limit-equal") {
        KumarExpr k = kumar_from_json(in);
        WaringDecomposition w = waring_from_json(out);
        return diff(limit(w.expand()), limit(k.expand()));
    }
    throw DomainError("UnknownRelation", "unknown relation " + rel);
}

int run(int argc, char** argv) {
    CLI::App app{"border Waring rank and circuit toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Opts o;
    app.add_flag("--json", o.as_json, "structured output");
    app.add_option("-o,--out", o.out, "write output to a file");

    // ---- symrep
    std::string part;
    int a1 = 0, a2 = 0, a3 = 0;
    bool appendix = false;
    auto* pl = app.add_subcommand("plethysm", "multiplicity of S_mu in Sym^outer(Sym^inner)");
    pl->add_option("mu", part)->required();
    pl->add_option("outer", a1)->required();
    pl->add_option("inner", a2)->required();
    pl->callback([&] {
        SymrepContext ctx;
        long v = ctx.plethysm_coeff(parse_partition(part), a1, a2);
        emit(o, json{{"mu", parse_partition(part)}, {"outer", a1}, {"inner", a2}, {"value", v}}, std::to_string(v));
    });

    auto* om = app.add_subcommand("orbit-mult", "multiplicity in the orbit coordinate ring of P11");
    om->add_option("lambda", part)->required();
    om->add_option("d", a1)->required();
    om->add_option("D", a2)->required();
    om->callback([&] {
        SymrepContext ctx;
        long v = ctx.orbit_mult_P11(parse_partition(part), a1, a2);
        emit(o, json{{"lambda", parse_partition(part)}, {"d", a1}, {"D", a2}, {"value", v}}, std::to_string(v));
    });

    auto* pm = app.add_subcommand("powersum-mult", "orbit multiplicity for the power sum");
    pm->add_option("kappa", part)->required();
    pm->add_option("d", a1)->required();
    pm->add_option("D", a2)->required();
    pm->add_option("m", a3)->required();
    pm->callback([&] {
        SymrepContext ctx;
        long v = ctx.orbit_mult_powersum(parse_partition(part), a1, a2, a3);
        emit(o, json{{"kappa", parse_partition(part)}, {"d", a1}, {"D", a2}, {"m", a3}, {"value", v}}, std::to_string(v));
    });

    auto* sc = app.add_subcommand("scan", "partitions with a > b");
    sc->add_option("d", a1)->required();
    sc->add_option("delta", a2)->required();
    sc->add_flag("--appendix", appendix, "print lambda_{a>b}");
    sc->callback([&] {
        auto es = cached_scan(a1, a2);
        emit(o, scan_json(a1, a2, es), scan_tsv(es, appendix));
    });

    auto* ob = app.add_subcommand("obstruction-check", "reduced multiplicities for (d^2 - 1, ...)");
    ob->add_option("d", a1)->required();
    ob->callback([&] {
        SymrepContext ctx;
        auto [x, y] = ctx.reduced_obstruction_check(a1);
        emit(o, json{{"d", a1}, {"orbit", x}, {"ambient", y}, {"obstruction", x < y}},
             std::to_string(x) + " " + std::to_string(y) + (x < y ? " obstruction" : ""));
    });

    // ---- waring
    std::string in;
    bool border = false;
    int deg = 0;
    auto* kb = app.add_subcommand("kumar-build", "Waring decomposition to a product expression");
    kb->add_option("--in", in, "decomposition JSON")->required();
    kb->add_flag("--border", border, "use the border construction");
    kb->callback([&] {
        KumarExpr k = kumar_build(waring_from_json(read_json(in)), border);
        emit(o, to_json(k),
             "forms " + std::to_string(k.forms.size()) + " alpha " + k.alpha.str() + " regime " +
                 regime_name(classify_kumar(k)) + "\n");
    });

    auto* ki = app.add_subcommand("kumar-invert", "product expression to a Waring decomposition");
    ki->add_option("--in", in, "product expression JSON")->required();
    ki->add_option("d", deg)->required();
    ki->callback([&] {
        KumarInverse r = kumar_invert(kumar_from_json(read_json(in)), deg);
        if (r.is_product) emit(o, json{{"product", to_json(r.prod)}}, "product " + r.prod.expand().str());
        else emit(o, to_json(r.dec), decomposition_text(r.dec));
    });

    auto* gd = app.add_subcommand("gad", "generalized additive decomposition of a border limit");
    gd->add_option("--in", in, "decomposition JSON")->required();
    gd->callback([&] {
        GAD g = gad_from_border(waring_from_json(read_json(in)));
        emit(o, to_json(g), gad_text(g));
    });

    auto* db = app.add_subcommand("deborder", "exact decomposition of a border limit");
    db->add_option("--in", in, "decomposition JSON")->required();
    db->callback([&] {
        WaringDecomposition w = deborder_waring(waring_from_json(read_json(in)));
        emit(o, to_json(w), decomposition_text(w));
    });

    auto* rb = app.add_subcommand("rb-deborder", "restricted binomial extraction");
    rb->add_option("--in", in, "JSON {\"lf\": [...], \"lfr\": [...], \"k\": k}")->required();
    rb->callback([&] {
        json j = read_json(in);
        std::vector<LinearForm> lf, lfr;
        for (auto& x : j.at("lf")) lf.push_back(form_from_json(x));
        for (auto& x : j.at("lfr")) lfr.push_back(form_from_json(x));
        RBResult r = rb_deborder(lf, lfr, j.at("k").get<int>());
        json out{{"exact", r.exact}, {"limit", to_json(r.limit())}};
        if (r.exact) out["rb"] = to_json(r.rb);
        else out["sls"] = to_json(r.sls);
        emit(o, out, std::string(r.exact ? "exact " : "sls ") + r.limit().str());
    });

    std::string poly;
    int nv = 0;
    auto* ev = app.add_subcommand("essential-vars", "number of essential variables");
    ev->add_option("poly", poly)->required();
    ev->add_option("--nvars", nv);
    ev->callback([&] {
        int n = nv;
        if (n <= 0)
            for (size_t i = 0; i < poly.size(); ++i)
                if (poly[i] == 'x') n = std::max(n, std::atoi(poly.c_str() + i + 1) + 1);
        int v = essential_variables(parse_poly(poly, n));
        emit(o, json{{"value", v}}, std::to_string(v));
    });

    // ---- circuitc
    CircuitSource src;
    bool formula_mode = false;
    auto* ih = app.add_subcommand("ihl", "remove constant inputs");
    src.add(ih);
    ih->add_flag("--formula-mode", formula_mode, "push constants into leaves and return a formula");
    ih->callback([&] {
        Circuit c = ihl_homogenize(src.load(), formula_mode);
        emit(o, circuit_report(c), circuit_text(c));
    });

    auto* a3c = app.add_subcommand("arity3", "homogeneous formula to inputs, additions and arity 3 products");
    src.add(a3c);
    a3c->callback([&] {
        Circuit c = to_arity3(src.load());
        emit(o, circuit_report(c), circuit_text(c));
    });

    auto* br = app.add_subcommand("brent", "depth reduction of an arity 3 formula");
    src.add(br);
    br->callback([&] {
        Circuit f = src.load();
        Circuit c = brent_arity3(f);
        json j = circuit_report(c);
        j["bound"] = brent_depth_bound(f.size());
        emit(o, j, circuit_text(c) + "bound " + std::to_string(brent_depth_bound(f.size())) + "\n");
    });

    auto* vs = app.add_subcommand("vsbr", "depth reduction of an arity 3 circuit");
    src.add(vs);
    vs->callback([&] {
        Circuit c = vsbr_arity3(src.load());
        Poly f = eval(c)[0];
        int b = f.is_zero() ? 0 : vsbr_mult_depth_bound(f.degree());
        json j = circuit_report(c);
        j["bound"] = b;
        emit(o, j, circuit_text(c) + "bound " + std::to_string(b) + "\n");
    });

    std::vector<int> pos{1, 2};
    auto* bc = app.add_subcommand("boc", "3x3 matrix program with f at one position");
    src.add(bc);
    bc->add_option("--pos", pos, "1-based position i j")->expected(2);
    bc->callback([&] {
        Circuit f = src.load();
        MatrixProgram p = ben_or_cleve(f, pos[0] - 1, pos[1] - 1);
        bool ok = check_ben_or_cleve(p, eval(f)[0]);
        json j = to_json(p);
        j["verified"] = ok;
        emit(o, j, "factors " + std::to_string(p.factors.size()) + (ok ? " verified" : " FAILED"));
    });

    auto* bt = app.add_subcommand("boc-trace", "eps matrix program for a sum of products");
    src.add(bt);
    bt->callback([&] {
        Circuit f = src.load();
        MatrixProgram p = ben_or_cleve_trace(f);
        TraceReport r = check_trace_program(p, f);
        json j = to_json(p);
        j["entry_ok"] = r.entry_ok;
        j["trace_ok"] = r.trace_ok;
        j["blocks_ok"] = r.blocks_ok;
        j["commutator_ok"] = r.commutator_ok;
        j["entry_limit"] = to_json(r.entry_limit);
        j["trace_limit"] = to_json(r.trace_limit);
        std::ostringstream os;
        os << "factors " << p.factors.size() << "\n"
           << "entry (1,1) limit " << r.entry_limit.str() << (r.entry_ok ? " ok" : " MISMATCH") << "\n"
           << "trace limit " << r.trace_limit.str() << (r.trace_ok ? " ok" : " MISMATCH") << "\n";
        emit(o, j, os.str());
    });

    int d_opt = 0;
    auto* cc = app.add_subcommand("continuant-compile", "linear forms l with C_{r,d}(l) = f mod eps");
    src.add(cc);
    cc->add_option("-d,--degree", d_opt, "degree (default: from the output)");
    cc->callback([&] {
        Circuit f = src.load();
        int d = d_opt;
        if (d <= 0) {
            Poly v = eval(f)[0];
            d = f.outputs.size() == 1 ? v.degree() : v.degree() + 1;
        }
        ContinuantResult r = continuant_compile(f, d);
        json forms = json::array();
        for (auto& l : r.forms) forms.push_back(to_json(l));
        json j{{"d", r.d}, {"r", r.r}, {"precision", r.precision}, {"forms", forms}, {"ok", r.ok},
               {"target", to_json(r.target)}};
        emit(o, j, "r " + std::to_string(r.r) + " precision " + std::to_string(r.precision) + (r.ok ? " ok" : " FAILED"));
    });

    auto* cp = app.add_subcommand("cpoly", "parity alternating elementary symmetric polynomial");
    cp->add_option("n", a1)->required();
    cp->add_option("d", a2)->required();
    cp->callback([&] {
        Poly p = c_poly(a1, a2);
        json j = to_json(p);
        j["term_count"] = p.terms().size();
        emit(o, j, p.str());
    });

    // ---- latin
    auto* at = app.add_subcommand("alon-tarsi", "even minus odd Latin squares");
    at->add_option("n", a1)->required();
    at->callback([&] {
        long v = alon_tarsi_difference(a1);
        emit(o, json{{"n", a1}, {"value", v}}, std::to_string(v));
    });

    auto* fi = app.add_subcommand("fund-inv", "fundamental invariant at the Latin square point");
    fi->add_option("d", a1)->required();
    fi->callback([&] {
        FundamentalCheck r = alon_tarsi_fundamental_check(a1);
        json j{{"d", a1}, {"value", r.value.str()}, {"alon_tarsi", r.at}, {"identity", r.identity},
               {"parts_equal", r.parts_equal}, {"nonzero", r.nonzero}};
        emit(o, j, r.value.str());
    });

    // ---- verify
    auto* vf = app.add_subcommand("verify", "recheck a bundle of claimed results");
    vf->add_option("bundle", in)->required();
    int failures = 0;
    vf->callback([&] {
        json b = read_json(in);
        json items = b.is_array() ? b : b.at("items");
        json rep = json::array();
        std::ostringstream os;
        int k = 0;
        for (auto& item : items) {
            Verdict v = check_item(item);
            std::string name = item.value("name", "item " + std::to_string(k));
            rep.push_back({{"name", name}, {"relation", item.at("relation")}, {"pass", v.ok}, {"residual", v.residual}});
            os << (v.ok ? "pass " : "FAIL ") << name;
            if (!v.ok) os << " residual " << v.residual;
            os << "\n";
            if (!v.ok) ++failures;
            ++k;
        }
        emit(o, json{{"items", rep}, {"failures", failures}}, os.str());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (failures) {
        std::cerr << "VerificationFailed: " << failures << " item(s) failed\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const DomainError& e) {
        std::cerr << e.name << ": " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "IoError: " << e.what() << "\n";
        return 1;
    } catch (const json::exception& e) {
        std::cerr << "IoError: malformed input: " << e.what() << "\n";
        return 1;
    }
}
