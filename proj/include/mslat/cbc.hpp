#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mslat/korobov.hpp"

namespace mslat {

/// Rank-1 lattice {frac(n g / N) : n = 0..N-1} with prime N.
struct Lattice {
  std::int64_t N = 1;
  std::vector<std::int64_t> g;

  int dim() const { return static_cast<int>(g.size()); }
  /// Throws std::invalid_argument unless N is prime and 1 <= g_j <= N-1.
  void validate() const;
  /// Node n, coordinate j, as an exact residue n g_j mod N.
  std::int64_t residue(std::int64_t n, int j) const;
};

/// Even Bernoulli polynomials B_2, B_4, B_6.
double bernoulli_even(int order, double x);

/// Squared worst-case integration error of the lattice (g_1..g_s) in the
/// Korobov space with integer smoothness alpha_int in {1,2,3}:
///   -1 + (1/N) sum_n prod_j (1 + gamma_j^2 c_alpha B_{2 alpha}({n g_j / N})).
double worst_case_P(int alpha_int, std::span<const double> gamma, std::int64_t N,
                    std::span<const std::int64_t> g);

enum class CbcMethod {
  automatic,  ///< naive up to N = 20011, fast beyond
  naive,      ///< O(N) per candidate
  fast,       ///< circulant structure over the multiplicative group, O(N log N) per component
};

/// Component-by-component generating vector. Non-integer alpha is handled by
/// running the integer-alpha search with floor(alpha) and weights
/// gamma^{floor(alpha)/alpha}. Ties go to the smallest candidate.
Lattice cbc_construct(const SpaceParams& params, std::int64_t N,
                      CbcMethod method = CbcMethod::automatic);

/// True iff k = 0 is the only member of A with k.g = 0 mod N.
bool validate_zero_fiber(const Lattice& lattice, const IndexSet& A);

/// k.g mod N in [0, N), accumulated in 128 bits.
std::int64_t lattice_residue(const Lattice& lattice, FrequencyView k);

}  // namespace mslat
