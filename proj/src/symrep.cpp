#include "bwr/symrep.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <tuple>

namespace bwr {

// ---------------- partitions

Partition make_partition(std::vector<int> parts) {
    while (!parts.empty() && parts.back() == 0) parts.pop_back();
    for (size_t i = 0; i < parts.size(); ++i) {
        if (parts[i] < 0 || (i && parts[i] > parts[i - 1]))
            throw DomainError("InvalidPartition", "parts must be nonincreasing and nonnegative");
    }
    return parts;
}

int psize(const Partition& p) { return std::accumulate(p.begin(), p.end(), 0); }

Partition transpose(const Partition& p) {
    Partition t(p.empty() ? 0 : p[0], 0);
    for (int r : p)
        for (int c = 0; c < r; ++c) ++t[c];
    return t;
}

std::vector<int> frequency(const Partition& p, int m) {
    std::vector<int> f(m, 0);
    for (int x : p) {
        if (x > m) throw DomainError("InvalidPartition", "part exceeds frequency range");
        ++f[x - 1];
    }
    return f;
}

bool contains(const Partition& big, const Partition& small) {
    if (small.size() > big.size()) return false;
    for (size_t i = 0; i < small.size(); ++i)
        if (small[i] > big[i]) return false;
    return true;
}

std::string partition_str(const Partition& p, int pad) {
    std::ostringstream os;
    os << '(';
    int n = std::max<int>(pad, (int)p.size());
    for (int i = 0; i < n; ++i) os << (i ? "," : "") << (i < (int)p.size() ? p[i] : 0);
    os << ')';
    return os.str();
}

Partition parse_partition(const std::string& s) {
    std::vector<int> v;
    std::string cur;
    for (char c : s) {
        if (isdigit((unsigned char)c))
            cur += c;
        else if (!cur.empty()) {
            v.push_back(std::stoi(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) v.push_back(std::stoi(cur));
    return make_partition(v);
}

std::vector<Partition> partitions_of(int n, int maxlen, int maxpart) {
    std::vector<Partition> out;
    Partition cur;
    std::function<void(int, int)> rec = [&](int left, int top) {
        if (left == 0) {
            out.push_back(cur);
            return;
        }
        if ((int)cur.size() == maxlen) return;
        for (int k = std::min(left, top); k >= 1; --k) {
            cur.push_back(k);
            rec(left - k, k);
            cur.pop_back();
        }
    };
    if (n >= 0) rec(n, maxpart);
    return out;
}

bool pieri_precedes(const Partition& mu, const Partition& lam) {
    if (!contains(lam, mu)) return false;
    for (size_t i = 0; i < mu.size(); ++i) {
        int next = i + 1 < lam.size() ? lam[i + 1] : 0;
        if (mu[i] < next) return false;
    }
    // rows of lam below mu's length must also satisfy lam[i+1] <= 0
    if (lam.size() > mu.size() + 1) return false;
    return true;
}

// ---------------- tableau counts

long lr_coeff(const Partition& lam, const Partition& mu, const Partition& nu) {
    if (psize(lam) != psize(mu) + psize(nu)) throw DomainError("SizeMismatch", "|lam| != |mu| + |nu|");
    if (!contains(lam, mu)) return 0;
    int R = (int)lam.size(), k = (int)nu.size();
    auto mu_at = [&](int r) { return r < (int)mu.size() ? mu[r] : 0; };
    std::vector<std::vector<int>> T(R);
    for (int r = 0; r < R; ++r) T[r].assign(lam[r], 0);
    std::vector<int> cnt(k + 1, 0);
    std::vector<std::pair<int, int>> cells;
    for (int r = 0; r < R; ++r)
        for (int c = lam[r] - 1; c >= mu_at(r); --c) cells.push_back({r, c});
    long total = 0;
    std::function<void(size_t)> rec = [&](size_t idx) {
        if (idx == cells.size()) {
            ++total;
            return;
        }
        auto [r, c] = cells[idx];
        int hi = k;
        if (c + 1 < lam[r]) hi = std::min(hi, T[r][c + 1]);
        hi = std::min(hi, r + 1);
        int lo = 1;
        if (r > 0 && c >= mu_at(r - 1)) lo = T[r - 1][c] + 1;
        for (int v = lo; v <= hi; ++v) {
            if (cnt[v] >= nu[v - 1]) continue;
            if (v > 1 && cnt[v - 1] <= cnt[v]) continue;
            ++cnt[v];
            T[r][c] = v;
            rec(idx + 1);
            --cnt[v];
        }
        T[r][c] = 0;
    };
    rec(0);
    return total;
}

long multi_lr_coeff(const Partition& kappa, const std::vector<Partition>& mus) {
    int tot = 0;
    for (auto& m : mus) tot += psize(m);
    if (tot != psize(kappa)) throw DomainError("SizeMismatch", "contents do not add up to |kappa|");
    std::map<Partition, long> cur{{Partition{}, 1}};
    int sz = 0;
    for (auto& m : mus) {
        sz += psize(m);
        std::map<Partition, long> next;
        auto shapes = partitions_of(sz, (int)kappa.size(), kappa.empty() ? 0 : kappa[0]);
        for (auto& lam : shapes) {
            if (!contains(kappa, lam)) continue;
            long v = 0;
            for (auto& [a, c] : cur)
                if (contains(lam, a)) v += c * lr_coeff(lam, a, m);
            if (v) next[lam] = v;
        }
        cur = std::move(next);
    }
    auto it = cur.find(kappa);
    return it == cur.end() ? 0 : it->second;
}

long kostka_number(const Partition& lam, const std::vector<int>& content) {
    int tot = std::accumulate(content.begin(), content.end(), 0);
    if (tot != psize(lam)) throw DomainError("SizeMismatch", "content does not match shape");
    // peel off the largest entry as a horizontal strip
    std::function<long(const Partition&, int)> rec = [&](const Partition& sh, int k) -> long {
        if (k == 0) return sh.empty() ? 1 : 0;
        int want = content[k - 1];
        long total = 0;
        Partition mu(sh.size());
        std::function<void(size_t, int)> pick = [&](size_t i, int left) {
            if (i == sh.size()) {
                if (left == 0) total += rec(make_partition(mu), k - 1);
                return;
            }
            int lo = i + 1 < sh.size() ? sh[i + 1] : 0;
            for (int v = sh[i]; v >= lo; --v) {
                if (sh[i] - v > left) break;
                mu[i] = v;
                pick(i + 1, left - (sh[i] - v));
            }
        };
        pick(0, want);
        return total;
    };
    return rec(lam, (int)content.size());
}

Q weyl_dimension(const Partition& mu, int n) {
    if ((int)mu.size() > n) return 0;
    std::vector<int> m(n, 0);
    for (size_t i = 0; i < mu.size(); ++i) m[i] = mu[i];
    Q r = 1;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) r *= Q(m[i] - m[j] + j - i, j - i);
    r.canonicalize();
    return r;
}

// ---------------- power sums and Schur conversion

namespace {

Q z_of(const Partition& nu) {
    Q z = 1;
    std::map<int, int> m;
    for (int x : nu) ++m[x];
    for (auto [i, k] : m) {
        for (int t = 0; t < k; ++t) z *= i;
        z *= factorial(k);
    }
    return z;
}

Partition merge(const Partition& a, const Partition& b) {
    Partition r(a);
    r.insert(r.end(), b.begin(), b.end());
    std::sort(r.rbegin(), r.rend());
    return r;
}

SymVec pmul(const SymVec& a, const SymVec& b) {
    SymVec r;
    for (auto& [x, c] : a)
        for (auto& [y, e] : b) r[merge(x, y)] += c * e;
    for (auto it = r.begin(); it != r.end();)
        it = it->second == 0 ? r.erase(it) : std::next(it);
    return r;
}

// add border strips of size k to every shape, at most N rows
void add_strips(const SymVec& in, int k, int N, const Partition& bound, SymVec& out) {
    std::vector<int> beta(N);
    for (auto& [mu, c] : in) {
        if ((int)mu.size() > N) continue;
        for (int i = 0; i < N; ++i) beta[i] = (i < (int)mu.size() ? mu[i] : 0) + (N - 1 - i);
        for (int i = 0; i < N; ++i) {
            int t = beta[i] + k;
            bool clash = false;
            int between = 0;
            for (int j = 0; j < i; ++j) {
                if (beta[j] == t) clash = true;
                if (beta[j] < t) ++between;
            }
            if (clash) continue;
            std::vector<int> nb(beta);
            nb[i] = t;
            std::sort(nb.rbegin(), nb.rend());
            Partition lam(N);
            for (int j = 0; j < N; ++j) lam[j] = nb[j] - (N - 1 - j);
            while (!lam.empty() && lam.back() == 0) lam.pop_back();
            if (!bound.empty() && !contains(bound, lam)) continue;
            Q& slot = out[lam];
            if (between % 2)
                slot -= c;
            else
                slot += c;
        }
    }
}

}  // namespace

SymVec powersum_to_schur(const SymVec& f, int maxrows, const Partition& bound) {
    int N = maxrows;
    if (!bound.empty()) N = std::min<int>(N, (int)bound.size());
    std::vector<std::pair<Partition, Q>> terms(f.begin(), f.end());
    std::sort(terms.begin(), terms.end(), [](auto& a, auto& b) { return a.first < b.first; });
    std::function<SymVec(size_t, size_t, size_t)> rec = [&](size_t lo, size_t hi, size_t pos) {
        SymVec res;
        size_t i = lo;
        while (i < hi) {
            if (terms[i].first.size() == pos) {
                res[Partition{}] += terms[i].second;
                ++i;
                continue;
            }
            int k = terms[i].first[pos];
            size_t j = i;
            while (j < hi && terms[j].first.size() > pos && terms[j].first[pos] == k) ++j;
            SymVec inner = rec(i, j, pos + 1);
            add_strips(inner, k, N, bound, res);
            i = j;
        }
        for (auto it = res.begin(); it != res.end();)
            it = it->second == 0 ? res.erase(it) : std::next(it);
        return res;
    };
    if (N == 0) {
        SymVec r;
        auto it = f.find(Partition{});
        if (it != f.end()) r[Partition{}] = it->second;
        return r;
    }
    return rec(0, terms.size(), 0);
}

SymVec plethysm_powersum(int outer, int inner) {
    // P_k = p_k[h_inner], H_n = (1/n) sum_k P_k H_{n-k}
    std::vector<SymVec> P(outer + 1), H(outer + 1);
    auto nus = partitions_of(inner, inner, inner);
    for (int k = 1; k <= outer; ++k) {
        for (auto& nu : nus) {
            Partition kn(nu);
            for (int& x : kn) x *= k;
            P[k][kn] += Q(1) / z_of(nu);
        }
    }
    H[0][Partition{}] = 1;
    for (int n = 1; n <= outer; ++n) {
        SymVec acc;
        for (int k = 1; k <= n; ++k)
            for (auto& [x, c] : pmul(P[k], H[n - k])) acc[x] += c;
        for (auto it = acc.begin(); it != acc.end();) {
            it->second /= n;
            it = it->second == 0 ? acc.erase(it) : std::next(it);
        }
        H[n] = std::move(acc);
    }
    return H[outer];
}

namespace {
long to_long(const Q& q, const char* what) {
    if (q.get_den() != 1 || !q.get_num().fits_slong_p())
        throw std::logic_error(std::string("non-integral ") + what);
    return q.get_num().get_si();
}
}  // namespace

// ---------------- context

const SymVec& SymrepContext::powersum(int outer, int inner) {
    auto key = std::make_pair(outer, inner);
    auto it = ps_.find(key);
    if (it == ps_.end()) it = ps_.emplace(key, plethysm_powersum(outer, inner)).first;
    return it->second;
}

long SymrepContext::mn_character(const Partition& lam, const Partition& nu) {
    if (psize(lam) != psize(nu)) throw DomainError("SizeMismatch", "|lam| != |nu|");
    auto key = std::make_pair(lam, nu);
    auto it = mn_.find(key);
    if (it != mn_.end()) return it->second;
    long v = 0;
    if (lam.empty())
        v = 1;
    else {
        SymVec s = powersum_to_schur(SymVec{{nu, Q(1)}}, (int)lam.size(), lam);
        auto f = s.find(lam);
        if (f != s.end()) v = to_long(f->second, "character");
    }
    mn_[key] = v;
    return v;
}

long SymrepContext::plethysm_coeff(const Partition& mu, int outer, int inner) {
    if (outer < 0 || inner < 0 || psize(mu) != outer * inner)
        throw DomainError("SizeMismatch", "|mu| must equal outer*inner");
    auto key = std::make_tuple(mu, outer, inner);
    auto it = pleth_.find(key);
    if (it != pleth_.end()) return it->second;
    long v = 0;
    if (mu.empty())
        v = 1;
    else {
        SymVec s = powersum_to_schur(powersum(outer, inner), (int)mu.size(), mu);
        auto f = s.find(mu);
        if (f != s.end()) v = to_long(f->second, "plethysm coefficient");
    }
    pleth_[key] = v;
    return v;
}

const std::map<Partition, long>& SymrepContext::plethysm_table(int outer, int inner, int maxrows) {
    auto key = std::make_tuple(outer, inner, maxrows);
    auto it = tables_.find(key);
    if (it != tables_.end()) return it->second;
    std::map<Partition, long> t;
    for (auto& [lam, c] : powersum_to_schur(powersum(outer, inner), maxrows)) {
        long v = to_long(c, "plethysm coefficient");
        if (v) t[lam] = v;
    }
    return tables_[key] = std::move(t);
}

long SymrepContext::orbit_mult_P11(const Partition& lam, int d, int D) {
    if (psize(lam) != d * D) throw DomainError("ConstraintViolation", "|lam| must equal d*D");
    if ((int)lam.size() > d + 1) throw DomainError("ConstraintViolation", "lam has more than d+1 rows");
    long total = 0;
    Partition mu(d, 0);
    std::function<void(int)> rec = [&](int i) {
        if (i == d) {
            Partition m = make_partition(mu);
            int sz = psize(m);
            if (sz % d == 0 && sz / d <= D && pieri_precedes(m, lam)) total += plethysm_coeff(m, d, sz / d);
            return;
        }
        int hi = i < (int)lam.size() ? lam[i] : 0;
        int lo = i + 1 < (int)lam.size() ? lam[i + 1] : 0;
        for (int v = hi; v >= lo; --v) {
            mu[i] = v;
            rec(i + 1);
        }
    };
    rec(0);
    return total;
}

long SymrepContext::powersum_term(const Partition& kappa, const Partition& rho, int d) {
    int D = psize(rho);
    auto f = frequency(rho, std::max(D, 1));
    std::vector<int> idx;
    std::vector<std::vector<std::pair<Partition, long>>> cand;
    for (int i = 1; i <= D; ++i) {
        if (!f[i - 1]) continue;
        idx.push_back(i);
        std::vector<std::pair<Partition, long>> c;
        int sz = d * i * f[i - 1];
        for (auto& mu : partitions_of(sz, (int)kappa.size(), kappa.empty() ? 0 : kappa[0])) {
            if (!contains(kappa, mu)) continue;
            long a = plethysm_coeff(mu, f[i - 1], i * d);
            if (a) c.push_back({mu, a});
        }
        cand.push_back(c);
    }
    long total = 0;
    std::vector<Partition> pick(idx.size());
    std::function<void(size_t, long)> rec = [&](size_t j, long w) {
        if (j == idx.size()) {
            total += w * multi_lr_coeff(kappa, pick);
            return;
        }
        for (auto& [mu, a] : cand[j]) {
            pick[j] = mu;
            rec(j + 1, w * a);
        }
    };
    rec(0, 1);
    return total;
}

long SymrepContext::orbit_mult_powersum(const Partition& kappa, int d, int D, int m) {
    if (psize(kappa) != d * D) throw DomainError("ConstraintViolation", "|kappa| must equal d*D");
    if ((int)kappa.size() > m) return 0;
    long total = 0;
    for (auto& rho : partitions_of(D, m, D)) total += powersum_term(kappa, rho, d);
    return total;
}

std::vector<ScanEntry> SymrepContext::obstruction_scan(int d, int D) {
    std::vector<ScanEntry> out;
    const auto& tab = plethysm_table(D, d, d + 1);
    for (auto& [lam, a] : tab) {
        long b = orbit_mult_P11(lam, d, D);
        if (a > b) out.push_back({lam, a, b});
    }
    std::sort(out.begin(), out.end(), [](auto& x, auto& y) { return x.lam < y.lam; });
    return out;
}

std::pair<long, long> SymrepContext::reduced_obstruction_check(int d) {
    if (d < 3) throw DomainError("ConstraintViolation", "d must be at least 3");
    int w = 10 * d;
    Partition kappa{5 * d - 1, 1};
    Partition lam(d + 1, w);
    lam[0] += kappa[0];
    lam[1] += kappa[1];
    // mu <= lam with at most d rows and d | |mu|; mu contains the d x 10d block
    long upper = 0;
    Partition mu(d, 0);
    std::function<void(int)> rec = [&](int i) {
        if (i == d) {
            Partition m = make_partition(mu);
            int sz = psize(m);
            if (sz % d || !pieri_precedes(m, lam)) return;
            if ((int)m.size() == d && m[d - 1] >= w) {
                Partition nu(m);
                for (int& x : nu) x -= w;
                nu = make_partition(nu);
                upper += plethysm_coeff(nu, d, psize(nu) / d);
            } else {
                upper += plethysm_coeff(m, d, sz / d);
            }
            return;
        }
        for (int v = lam[i]; v >= lam[i + 1]; --v) {
            mu[i] = v;
            rec(i + 1);
        }
    };
    rec(0);
    long lower = orbit_mult_powersum(kappa, d, 5, d + 1);
    Partition ones(5, 1);
    if ((int)ones.size() > d + 1 && powersum_term(kappa, ones, d) != 0)
        throw std::logic_error("excluded frequency class contributes");
    return {upper, lower};
}

// ---------------- stabilizer

Poly p_rs(int d, int r, int s) {
    int n = r * d + s;
    Poly f(n);
    for (int i = 0; i < r; ++i) {
        std::vector<int> e(n, 0);
        for (int j = 0; j < d; ++j) e[i * d + j] = 1;
        f.add_term(Monomial(e), Laurent(1));
    }
    for (int k = 0; k < s; ++k) {
        std::vector<int> e(n, 0);
        e[r * d + k] = d;
        f.add_term(Monomial(e), Laurent(1));
    }
    return f;
}

namespace {
CMatrix identity(int n) {
    CMatrix m(n, std::vector<Cyclo>(n, Cyclo(0)));
    for (int i = 0; i < n; ++i) m[i][i] = Cyclo(1);
    return m;
}
CMatrix permutation(int n, const std::vector<int>& to) {
    // variable i goes to variable to[i]
    CMatrix m(n, std::vector<Cyclo>(n, Cyclo(0)));
    for (int i = 0; i < n; ++i) m[i][to[i]] = Cyclo(1);
    return m;
}
}  // namespace

std::vector<Generator> stabilizer_generators(int d, int r, int s) {
    int n = r * d + s;
    std::vector<Generator> g;
    std::vector<int> id(n);
    std::iota(id.begin(), id.end(), 0);
    if (r >= 1 && d >= 2) {
        CMatrix t = identity(n);
        t[0][0] = Cyclo(2);
        t[1][1] = Cyclo(Q(1, 2));
        g.push_back({"torus", t});
        auto p = id;
        std::swap(p[0], p[1]);
        g.push_back({"block-transposition", permutation(n, p)});
        if (d >= 3) {
            auto c = id;
            for (int j = 0; j < d; ++j) c[j] = (j + 1) % d;
            g.push_back({"block-cycle", permutation(n, c)});
        }
    }
    if (r >= 2) {
        auto p = id;
        for (int j = 0; j < d; ++j) std::swap(p[j], p[d + j]);
        g.push_back({"block-swap", permutation(n, p)});
        if (r >= 3) {
            auto c = id;
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < d; ++j) c[i * d + j] = ((i + 1) % r) * d + j;
            g.push_back({"blocks-cycle", permutation(n, c)});
        }
    }
    if (s >= 1) {
        CMatrix z = identity(n);
        z[r * d][r * d] = Cyclo::zeta(d);
        g.push_back({"y-root-scaling", z});
    }
    if (s >= 2) {
        auto p = id;
        std::swap(p[r * d], p[r * d + 1]);
        g.push_back({"y-swap", permutation(n, p)});
        if (s >= 3) {
            auto c = id;
            for (int k = 0; k < s; ++k) c[r * d + k] = r * d + (k + 1) % s;
            g.push_back({"y-cycle", permutation(n, c)});
        }
    }
    return g;
}

bool fixes(const CMatrix& g, const Poly& f) {
    int n = (int)g.size();
    std::vector<LinearForm> map;
    for (int i = 0; i < n; ++i) {
        LinearForm l(n);
        for (int j = 0; j < n; ++j) l.c[j] = Laurent(g[i][j]);
        map.push_back(l);
    }
    return substitute_linear(f.with_nvars(n), map) == f.with_nvars(n);
}

bool verify_stabilizer(const CMatrix& g, int d, int r, int s) { return fixes(g, p_rs(d, r, s)); }

Characterization characterize_by_stabilizer(const Poly& f, int d, int r, int s) {
    int n = r * d + s;
    for (auto& g : stabilizer_generators(d, r, s))
        if (!fixes(g.m, f)) throw DomainError("NotInvariant", g.name);
    Characterization c;
    if (r >= 1) {
        std::vector<int> e(n, 0);
        for (int j = 0; j < d; ++j) e[j] = 1;
        c.alpha = f.coeff(Monomial(e));
    }
    if (s >= 1) {
        std::vector<int> e(n, 0);
        e[r * d] = d;
        c.beta = f.coeff(Monomial(e));
    }
    Poly model = p_rs(d, r, 0).with_nvars(n).scale(c.alpha);
    Poly ys = p_rs(d, r, s) - p_rs(d, r, 0).with_nvars(n);
    model += ys.scale(c.beta);
    if (model != f.with_nvars(n)) throw DomainError("NotInvariant", "two-parameter form");
    return c;
}

}  // namespace bwr
