#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mslat {

/// Parameters of the weighted Korobov space: dimension, smoothness and
/// product weights. Only the first d weights are ever read.
struct SpaceParams {
  int d = 1;
  double alpha = 1.0;
  std::vector<double> gamma;

  SpaceParams() = default;
  SpaceParams(int dim, double smoothness, std::vector<double> weights);

  /// Throws std::invalid_argument unless d >= 1, alpha > 1/2,
  /// gamma.size() == d and 0 < gamma_j <= 1.
  void validate() const;

  /// gamma_j = 2^{-decay (j-1)} for j = 1..d.
  static SpaceParams with_power_weights(int d, double alpha, double decay);
};

using FrequencyView = std::span<const std::int32_t>;
using Frequency = std::vector<std::int32_t>;

/// r_{alpha,gamma}(k) = prod_j max{1, |k_j|^alpha / gamma_j}.
double weight_r(const SpaceParams& params, FrequencyView k);

/// Hyperbolic cross {k : r(k) < M}, stored row-major (size() x d),
/// lexicographically ordered on (k_1, ..., k_d).
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(SpaceParams params, double M, std::vector<std::int32_t> flat);

  std::size_t size() const { return dim_ == 0 ? 0 : flat_.size() / dim_; }
  bool empty() const { return flat_.empty(); }
  int dim() const { return static_cast<int>(dim_); }
  double threshold() const { return M_; }
  const SpaceParams& params() const { return params_; }

  FrequencyView operator[](std::size_t i) const {
    return {flat_.data() + i * dim_, dim_};
  }
  const std::vector<std::int32_t>& flat() const { return flat_; }

  /// Position of k in the set, or -1. Binary search on the lexicographic order.
  std::ptrdiff_t find(FrequencyView k) const;

  /// Largest |k_j| over the set, per coordinate.
  std::vector<std::int32_t> max_abs() const;

 private:
  SpaceParams params_;
  double M_ = 0.0;
  std::size_t dim_ = 0;
  std::vector<std::int32_t> flat_;
};

IndexSet build_index_set(const SpaceParams& params, double M);

/// |{k : r(k) < M}| without materialising the set.
std::size_t index_set_size(const SpaceParams& params, double M);

enum class MSelection { bisection, theoretical };

/// Truncation threshold for a lattice of N points.
///
/// theoretical: sup over lambda in (1/alpha, 2] of
///   ((N/2) prod_j (1 + 2 gamma_j^lambda zeta(alpha lambda))^{-1})^{1/lambda},
///   maximised on a uniform grid of 2048 points.
/// bisection: the largest M (to 1e-9) with |A(M)| <= N, bracket [1, N^alpha + 1].
double select_M(const SpaceParams& params, std::int64_t N, MSelection mode);

}  // namespace mslat
