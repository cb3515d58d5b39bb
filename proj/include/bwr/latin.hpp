#pragma once

#include <functional>
#include <vector>

#include "bwr/polyring.hpp"
#include "bwr/symrep.hpp"

namespace bwr {

struct LatinSquare {
    int n = 0;
    std::vector<std::vector<int>> grid;  // entries 1..n
};

bool is_latin(const LatinSquare& L);
int permutation_sign(const std::vector<int>& p);  // p is a permutation of 0..n-1 or 1..n
int column_sign(const LatinSquare& L);
void for_each_latin(int n, const std::function<void(const LatinSquare&)>& f);
long count_latin(int n);
long alon_tarsi_difference(int n);

struct Tableau {
    Partition shape;
    std::vector<std::vector<int>> rows;  // rows[i].size() == shape[i]
};
// n x d rectangle with entry i in row i
Tableau row_tableau(int rows, int cols);

// sum_i l_{i,1} (x) ... (x) l_{i,d}
struct TensorPoint {
    int nvars = 0;
    std::vector<std::vector<LinearForm>> summands;
    int order() const { return summands.empty() ? 0 : (int)summands[0].size(); }
};
// x_1...x_d as the sum of its d! orderings plus x_{d+1}^{(x)d}
TensorPoint fundamental_point(int d);

// literal sum over proper placements of the column determinant products
Cyclo placement_sum(const Tableau& T, const TensorPoint& p);
// same sum restricted to placements where block b is the only block using summand s, for each b
std::vector<Cyclo> placement_sum_by_block(const Tableau& T, const TensorPoint& p, int s);
// placement sum divided by (d!)^blocks, one count per filling of a block
Cyclo fundamental_invariant_eval(const Tableau& T, const TensorPoint& p);

struct FundamentalCheck {
    Cyclo value;
    long at = 0;
    bool identity = false;  // value == (d+1) * at
    bool parts_equal = false;
    bool nonzero = false;
};
FundamentalCheck alon_tarsi_fundamental_check(int d);

}  // namespace bwr
