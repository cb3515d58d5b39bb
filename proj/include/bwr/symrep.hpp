#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bwr/polyring.hpp"

namespace bwr {

// nonincreasing positive parts
using Partition = std::vector<int>;

Partition make_partition(std::vector<int> parts);  // drops trailing zeros, checks order
int psize(const Partition& p);
Partition transpose(const Partition& p);
std::vector<int> frequency(const Partition& p, int m);  // freq[i] = #parts equal to i+1
bool contains(const Partition& big, const Partition& small);
std::string partition_str(const Partition& p, int pad = 0);
Partition parse_partition(const std::string& s);
// all partitions of n with at most maxlen parts, each at most maxpart, in lex-decreasing order
std::vector<Partition> partitions_of(int n, int maxlen, int maxpart);

bool pieri_precedes(const Partition& mu, const Partition& lam);

long lr_coeff(const Partition& lam, const Partition& mu, const Partition& nu);
long multi_lr_coeff(const Partition& kappa, const std::vector<Partition>& mus);
long kostka_number(const Partition& lam, const std::vector<int>& content);
Q weyl_dimension(const Partition& mu, int n);

using SymVec = std::map<Partition, Q>;

// Schur expansion of a power-sum combination, keeping shapes with <= maxrows rows
// (and inside bound when bound is nonempty).
SymVec powersum_to_schur(const SymVec& f, int maxrows, const Partition& bound = {});
// h_outer[h_inner] in the power-sum basis
SymVec plethysm_powersum(int outer, int inner);

struct ScanEntry {
    Partition lam;
    long a = 0, b = 0;
};

// Caches live in the context; separate contexts share nothing.
class SymrepContext {
   public:
    long mn_character(const Partition& lam, const Partition& nu);
    // a_mu(outer, inner): multiplicity of S_mu in Sym^outer(Sym^inner)
    long plethysm_coeff(const Partition& mu, int outer, int inner);
    const std::map<Partition, long>& plethysm_table(int outer, int inner, int maxrows);
    long orbit_mult_P11(const Partition& lam, int d, int D);
    long powersum_term(const Partition& kappa, const Partition& rho, int d);
    long orbit_mult_powersum(const Partition& kappa, int d, int D, int m);
    std::vector<ScanEntry> obstruction_scan(int d, int D);
    std::pair<long, long> reduced_obstruction_check(int d);

   private:
    std::map<std::pair<Partition, Partition>, long> mn_;
    std::map<std::tuple<Partition, int, int>, long> pleth_;
    std::map<std::tuple<int, int, int>, std::map<Partition, long>> tables_;
    std::map<std::pair<int, int>, SymVec> ps_;
    const SymVec& powersum(int outer, int inner);
};

// P^{[d]}_{r,s} = sum_i prod_j x_ij + sum_k y_k^d; x_ij at (i-1)d+(j-1), y_k at rd+k-1
Poly p_rs(int d, int r, int s);

struct Generator {
    std::string name;
    CMatrix m;  // variable i maps to sum_j m[i][j] x_j
};
std::vector<Generator> stabilizer_generators(int d, int r, int s);
bool verify_stabilizer(const CMatrix& g, int d, int r, int s);
bool fixes(const CMatrix& g, const Poly& f);

struct Characterization {
    Laurent alpha, beta;
};
// throws DomainError NotInvariant naming the witness generator
Characterization characterize_by_stabilizer(const Poly& f, int d, int r, int s);

}  // namespace bwr
