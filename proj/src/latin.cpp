#include "bwr/latin.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace bwr {

// ---------------- Latin squares

bool is_latin(const LatinSquare& L) {
    int n = L.n;
    if ((int)L.grid.size() != n) return false;
    for (int i = 0; i < n; ++i) {
        if ((int)L.grid[i].size() != n) return false;
        std::vector<bool> row(n + 1, false), col(n + 1, false);
        for (int j = 0; j < n; ++j) {
            int a = L.grid[i][j], b = L.grid[j].size() == (size_t)n ? L.grid[j][i] : 0;
            if (a < 1 || a > n || row[a]) return false;
            if (b < 1 || b > n || col[b]) return false;
            row[a] = col[b] = true;
        }
    }
    return true;
}

int permutation_sign(const std::vector<int>& p) {
    int inv = 0;
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j]) ++inv;
    return inv % 2 ? -1 : 1;
}

int column_sign(const LatinSquare& L) {
    if (!is_latin(L)) throw DomainError("InvalidSquare", "not a Latin square");
    int s = 1;
    std::vector<int> col(L.n);
    for (int c = 0; c < L.n; ++c) {
        for (int r = 0; r < L.n; ++r) col[r] = L.grid[r][c];
        s *= permutation_sign(col);
    }
    return s;
}

void for_each_latin(int n, const std::function<void(const LatinSquare&)>& f) {
    LatinSquare L;
    L.n = n;
    L.grid.assign(n, std::vector<int>(n, 0));
    std::vector<unsigned> rowmask(n, 0), colmask(n, 0);
    std::function<void(int)> rec = [&](int cell) {
        if (cell == n * n) {
            f(L);
            return;
        }
        int r = cell / n, c = cell % n;
        for (int v = 1; v <= n; ++v) {
            unsigned bit = 1u << v;
            if ((rowmask[r] & bit) || (colmask[c] & bit)) continue;
            rowmask[r] |= bit;
            colmask[c] |= bit;
            L.grid[r][c] = v;
            rec(cell + 1);
            rowmask[r] &= ~bit;
            colmask[c] &= ~bit;
        }
        L.grid[r][c] = 0;
    };
    if (n >= 1) rec(0);
}

long count_latin(int n) {
    long k = 0;
    for_each_latin(n, [&](const LatinSquare&) { ++k; });
    return k;
}

long alon_tarsi_difference(int n) {
    if (n < 1) throw DomainError("InvalidOrder", "n must be positive");
    if (n > 5) throw DomainError("TooLarge", "exhaustive enumeration only up to n = 5");
    long s = 0;
    for_each_latin(n, [&](const LatinSquare& L) {
        int sg = 1;
        std::vector<int> col(n);
        for (int c = 0; c < n; ++c) {
            for (int r = 0; r < n; ++r) col[r] = L.grid[r][c];
            sg *= permutation_sign(col);
        }
        s += sg;
    });
    return s;
}

// ---------------- fundamental invariant

Tableau row_tableau(int rows, int cols) {
    Tableau T;
    T.shape.assign(rows, cols);
    for (int i = 0; i < rows; ++i) T.rows.push_back(std::vector<int>(cols, i + 1));
    return T;
}

TensorPoint fundamental_point(int d) {
    TensorPoint p;
    p.nvars = d + 1;
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        std::vector<LinearForm> s;
        for (int k = 0; k < d; ++k) s.push_back(LinearForm::var(d + 1, perm[k]));
        p.summands.push_back(s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    p.summands.push_back(std::vector<LinearForm>(d, LinearForm::var(d + 1, d)));
    return p;
}

namespace {

Cyclo det(CMatrix a) {
    int n = (int)a.size();
    Cyclo r(1);
    for (int c = 0; c < n; ++c) {
        int p = c;
        while (p < n && a[p][c].is_zero()) ++p;
        if (p == n) return Cyclo(0);
        if (p != c) {
            std::swap(a[p], a[c]);
            r = -r;
        }
        r *= a[c][c];
        Cyclo inv = a[c][c].inverse();
        for (int i = c + 1; i < n; ++i) {
            if (a[i][c].is_zero()) continue;
            Cyclo f = a[i][c] * inv;
            for (int j = c; j < n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    return r;
}

struct Engine {
    int m = 0, d = 0, ncols = 0;
    std::vector<int> colLen;
    std::vector<std::vector<std::pair<int, int>>> blocks;  // boxes (row, col)
    std::vector<std::vector<Cyclo>> forms;                 // distinct coordinate vectors
    struct Option {
        std::vector<int> ids;
        bool special;
        long count;
    };
    std::vector<std::vector<Option>> options;
    // per column, the form ids placed by row
    std::vector<std::vector<int>> placed;

    Engine(const Tableau& T, const TensorPoint& p, int special) {
        m = p.nvars;
        d = p.order();
        if ((int)T.rows.size() != (int)T.shape.size()) throw DomainError("ContentMismatch", "rows do not match shape");
        ncols = T.shape.empty() ? 0 : T.shape[0];
        colLen = transpose(T.shape);
        std::map<int, std::vector<std::pair<int, int>>> byval;
        for (size_t r = 0; r < T.rows.size(); ++r) {
            if ((int)T.rows[r].size() != T.shape[r]) throw DomainError("ContentMismatch", "row length differs from shape");
            for (int c = 0; c < T.shape[r]; ++c) byval[T.rows[r][c]].push_back({(int)r, c});
        }
        for (auto& [v, boxes] : byval) {
            if ((int)boxes.size() != d)
                throw DomainError("ContentMismatch", "each entry must occur exactly d times");
            blocks.push_back(boxes);
        }
        std::vector<std::vector<int>> sid(p.summands.size());
        for (size_t i = 0; i < p.summands.size(); ++i) {
            if ((int)p.summands[i].size() != d) throw DomainError("ContentMismatch", "summands differ in order");
            for (auto& l : p.summands[i]) {
                std::vector<Cyclo> v(m, Cyclo(0));
                for (int k = 0; k < std::min(m, l.nvars()); ++k) v[k] = l.c[k].constant();
                size_t id = std::find(forms.begin(), forms.end(), v) - forms.begin();
                if (id == forms.size()) forms.push_back(v);
                sid[i].push_back((int)id);
            }
        }
        std::map<std::pair<std::vector<int>, bool>, long> opt;
        std::vector<int> sigma(d);
        for (size_t i = 0; i < sid.size(); ++i) {
            std::iota(sigma.begin(), sigma.end(), 0);
            do {
                std::vector<int> ids(d);
                for (int k = 0; k < d; ++k) ids[k] = sid[i][sigma[k]];
                ++opt[{ids, (int)i == special}];
            } while (std::next_permutation(sigma.begin(), sigma.end()));
        }
        std::vector<Option> base;
        for (auto& [k, c] : opt) base.push_back({k.first, k.second, c});
        options.assign(blocks.size(), base);
        placed.assign(ncols, std::vector<int>());
        for (int c = 0; c < ncols; ++c) placed[c].assign(colLen[c], -1);
    }

    CMatrix column_matrix(int c, bool partial) const {
        int h = colLen[c];
        CMatrix a;
        for (int r = 0; r < h; ++r) {
            if (placed[c][r] < 0) {
                if (partial) continue;
                return {};
            }
            std::vector<Cyclo> row;
            for (int k = 0; k < h; ++k) row.push_back(k < m ? forms[placed[c][r]][k] : Cyclo(0));
            a.push_back(row);
        }
        return a;
    }

    bool column_ok(int c) const {
        if (colLen[c] > m) return false;
        CMatrix a = column_matrix(c, true);
        return matrix_rank(a) == (int)a.size();
    }

    // want[b]: 1 block must use the special summand, 0 must not, -1 any
    Cyclo run(const std::vector<int>& want) {
        Cyclo total(0);
        std::function<void(size_t, Q)> rec = [&](size_t b, Q w) {
            if (b == blocks.size()) {
                Cyclo prod(w);
                for (int c = 0; c < ncols; ++c) {
                    prod *= det(column_matrix(c, false));
                    if (prod.is_zero()) return;
                }
                total += prod;
                return;
            }
            for (auto& o : options[b]) {
                if (want[b] == 1 && !o.special) continue;
                if (want[b] == 0 && o.special) continue;
                bool ok = true;
                for (int k = 0; k < d; ++k) {
                    auto [r, c] = blocks[b][k];
                    placed[c][r] = o.ids[k];
                }
                for (int k = 0; k < d && ok; ++k) ok = column_ok(blocks[b][k].second);
                if (ok) rec(b + 1, w * o.count);
                for (int k = 0; k < d; ++k) {
                    auto [r, c] = blocks[b][k];
                    placed[c][r] = -1;
                }
            }
        };
        rec(0, Q(1));
        return total;
    }
};

}  // namespace

Cyclo placement_sum(const Tableau& T, const TensorPoint& p) {
    Engine e(T, p, -1);
    return e.run(std::vector<int>(e.blocks.size(), -1));
}

std::vector<Cyclo> placement_sum_by_block(const Tableau& T, const TensorPoint& p, int s) {
    Engine e(T, p, s);
    std::vector<Cyclo> out;
    for (size_t b = 0; b < e.blocks.size(); ++b) {
        std::vector<int> want(e.blocks.size(), 0);
        want[b] = 1;
        out.push_back(e.run(want));
    }
    return out;
}

Cyclo fundamental_invariant_eval(const Tableau& T, const TensorPoint& p) {
    Engine e(T, p, -1);
    Cyclo v = e.run(std::vector<int>(e.blocks.size(), -1));
    Q norm = 1;
    for (size_t b = 0; b < e.blocks.size(); ++b) norm *= factorial(e.d);
    return v * Cyclo(Q(1) / norm);
}

FundamentalCheck alon_tarsi_fundamental_check(int d) {
    if (d != 2 && d != 4) throw DomainError("OutOfRange", "d must be 2 or 4");
    Tableau T = row_tableau(d + 1, d);
    TensorPoint p = fundamental_point(d);
    FundamentalCheck r;
    r.value = fundamental_invariant_eval(T, p);
    r.at = alon_tarsi_difference(d);
    r.identity = r.value == Cyclo(Q(r.at * (d + 1)));
    auto parts = placement_sum_by_block(T, p, (int)p.summands.size() - 1);
    Cyclo sum(0);
    r.parts_equal = true;
    for (auto& x : parts) {
        if (x != parts[0]) r.parts_equal = false;
        sum += x;
    }
    r.parts_equal = r.parts_equal && sum == placement_sum(T, p);
    r.nonzero = !r.value.is_zero();
    return r;
}

}  // namespace bwr
