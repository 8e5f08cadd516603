#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mslat/cbc.hpp"
#include "mslat/korobov.hpp"

namespace mslat {

/// Frequencies of A grouped by their residue k.g mod N.
struct FiberPartition {
  std::vector<std::int64_t> residues;          ///< one per fiber, ascending
  std::vector<std::vector<std::size_t>> fibers;  ///< indices into the IndexSet, ascending
  std::size_t R = 0;                           ///< largest fiber
  bool zero_fiber_trivial = true;              ///< A meets the dual lattice only in 0

  std::size_t J() const { return fibers.size(); }
  /// Lexicographically smallest member of fiber j (an index into the IndexSet).
  std::size_t representative(std::size_t j) const { return fibers[j].front(); }
};

FiberPartition partition_fibers(const IndexSet& A, const Lattice& lattice);

/// Nonzero in-fiber differences, one representative per {h, -h} pair
/// (first nonzero entry positive), sorted lexicographically.
class DifferenceSet {
 public:
  DifferenceSet() = default;
  DifferenceSet(int d, std::vector<std::int64_t> flat);

  std::size_t size() const { return d_ == 0 ? 0 : flat_.size() / d_; }
  bool empty() const { return flat_.empty(); }
  int dim() const { return d_; }
  std::span<const std::int64_t> operator[](std::size_t i) const {
    return {flat_.data() + i * d_, static_cast<std::size_t>(d_)};
  }
  const std::vector<std::int64_t>& flat() const { return flat_; }

 private:
  int d_ = 0;
  std::vector<std::int64_t> flat_;
};

/// C_alpha from the pairwise bound |a - b|^alpha <= C_alpha (|a|^alpha + |b|^alpha).
double difference_constant(double alpha);

/// All pairwise in-fiber differences. Throws std::logic_error if a component
/// violates max_j |h_j| < (2 C_alpha M)^{1/alpha}.
DifferenceSet difference_set(const IndexSet& A, const FiberPartition& part);

/// Upper bound on the maximum fiber length valid for the theoretical choice of M:
///   min{ 2 (1 + m/2)^d / m,  2 M^{1/alpha} / m * prod_j (1 + gamma_j^{1/alpha} m) }
/// with 2^{m-1} < M^{1/alpha} <= 2^m.
double fiber_length_bound(const SpaceParams& params, double M);

}  // namespace mslat
