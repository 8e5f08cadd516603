#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mslat/fibers.hpp"
#include "mslat/korobov.hpp"

namespace mslat {

enum class ShiftStrategy { trivial, polynomial, single_lattice, multi_lattice, crt_bound, probabilistic };

std::string to_string(ShiftStrategy s);

/// p points a_s / p with integer numerators a_s in [0, p)^d.
struct RationalBlock {
  std::int64_t p = 1;
  std::vector<std::int64_t> numerators;  // p x d, row-major
};

/// Shift points y_0..y_{S-1} in [0,1)^d. Deterministic strategies keep their
/// exact rational form in `blocks` so phases h.y_s can be reduced mod p.
struct ShiftSet {
  int d = 0;
  std::size_t S = 0;
  std::vector<double> points;  // S x d
  ShiftStrategy strategy = ShiftStrategy::trivial;
  std::vector<std::int64_t> primes;
  std::vector<std::int64_t> z;
  std::uint64_t seed = 0;
  std::vector<RationalBlock> blocks;
  double achieved_ratio = 0.0;

  std::span<const double> point(std::size_t s) const {
    return {points.data() + s * d, static_cast<std::size_t>(d)};
  }
  bool rational() const { return !blocks.empty(); }
};

/// Evaluates exp(2 pi i k.y_s) for every shift, reducing rational phases mod p
/// against precomputed roots of unity.
class PhaseTable {
 public:
  explicit PhaseTable(const ShiftSet& Y);
  template <class Int>
  void phases(std::span<const Int> k, std::span<std::complex<double>> out) const;

 private:
  const ShiftSet* Y_;
  std::vector<std::vector<std::complex<double>>> roots_;
};

/// The trivial set S = 1, y = 0.
ShiftSet trivial_shifts(int d);

/// Integer projection direction with h.z != 0 for every h in H.
struct ProjectionVector {
  std::vector<std::int64_t> z;
};

/// Symmetric component-by-component construction: rows are grouped by their
/// rightmost nonzero column j, and z_j is the first of 0, 1, -1, 2, -2, ...
/// avoiding every -C_i / h_{i,j} that is an integer.
ProjectionVector construct_z(const DifferenceSet& H);

/// |h.z| for every row of H; throws std::overflow_error beyond 127 bits.
std::vector<unsigned __int128> projections(const DifferenceSet& H, const ProjectionVector& z);

/// max_h |sum_s exp(2 pi i h.y_s)| / S (0 for empty H).
double exp_sum_ratio(const ShiftSet& Y, const DifferenceSet& H);

/// {(s, s^2, ..., s^d) / p mod 1 : s = 0..p-1}.
ShiftSet polynomial_shifts(std::int64_t p, int d);

/// {frac(s z / p) : s = 0..p-1}; one block per prime, S = sum p_j.
ShiftSet lattice_shifts(std::span<const std::int64_t> primes, const ProjectionVector& z, ShiftStrategy tag);

/// floor((gamma_1 M)^{1/alpha}) floor((gamma_2 M)^{1/alpha}) / N.
double capacity_lower_bound(const SpaceParams& params, double M, std::int64_t N);

struct CrtSequence {
  double p1_bound = 0;              // 2 (R-1) ln V / (c t)
  std::vector<std::int64_t> primes;  // k consecutive primes from next_prime(ceil(p1_bound))
  std::int64_t total() const;
};

inline constexpr double kRosserConstant = 0.32;

/// Consecutive primes guaranteeing the exponential-sum threshold by the CRT argument.
CrtSequence crt_sequence(std::int64_t R, unsigned __int128 V, double t);

struct ProbabilisticCounts {
  std::int64_t S_new = 0;  ///< ceil(2 K R ln N / t^2), shared shifts per fiber
  std::int64_t S_old = 0;  ///< ceil(2 K R ln N), frequency-dependent shifts per frequency
};

ProbabilisticCounts probabilistic_counts(std::int64_t R, std::int64_t N, double K, double t);

/// K with N^{1-K} = failure.
double success_K(std::int64_t N, double failure = 0.01);

/// Total shifts of the frequency-dependent baseline: R * ceil(2 K R ln N) with
/// K chosen so that N^{1-K} R^2 = failure.
std::int64_t standard_probabilistic_total(std::int64_t R, std::int64_t N, double failure = 0.01);

/// S_new i.i.d. uniform points from a seeded mt19937_64 (53-bit mantissas).
ShiftSet probabilistic_shifts(std::int64_t R, std::int64_t N, double K, double t, std::uint64_t seed, int d);

/// Smallest prime p >= next_prime(R), p < cap, whose polynomial set meets the threshold.
std::optional<ShiftSet> search_polynomial(const DifferenceSet& H, std::int64_t R, double t, int d,
                                          std::int64_t cap);

/// Smallest prime p >= max(next_prime(R), p_min), p < cap, with p not dividing any X_h.
std::optional<ShiftSet> search_single_lattice(const DifferenceSet& H, const ProjectionVector& z,
                                              std::int64_t R, double p_min, std::int64_t cap);

struct BadPrimeCheck {
  bool checked = false;
  bool passed = true;
  std::int64_t worst_m = 0;   // largest per-h count of dividing primes
  double log_bound = 0;       // ln V / ln p_1
};

struct GreedyResult {
  std::vector<std::int64_t> primes;
  std::int64_t S = 0;
  BadPrimeCheck bad_primes;
};

/// Accumulates consecutive primes from next_prime(R) until
/// max_h (sum of p dividing X_h) / S <= t / (R-1); gives up once S reaches cap.
std::optional<GreedyResult> greedy_multi_lattice(const DifferenceSet& H, const ProjectionVector& z,
                                                 std::int64_t R, double t, std::int64_t cap);

/// Exact integer form of the bad-prime bound: p_1^m <= V for every h.
BadPrimeCheck check_bad_primes(std::span<const unsigned __int128> X, std::span<const std::int64_t> primes);

struct AdaptiveResult {
  ShiftSet shifts;
  ProjectionVector z;
  unsigned __int128 V = 0;
  CrtSequence crt;
  double p_min = 0;
  bool greedy_found = false;
  GreedyResult greedy;
  std::int64_t last_prime_tested = 0;
};

/// Adaptive deterministic construction: polynomial, single-lattice and greedy
/// multi-lattice candidates are tried prime by prime below the CRT budget.
AdaptiveResult adaptive_search(const DifferenceSet& H, std::int64_t R, double t, std::int64_t N, double M,
                               const SpaceParams& params);

inline ShiftSet adaptive_shifts(const DifferenceSet& H, std::int64_t R, double t, std::int64_t N, double M,
                                const SpaceParams& params) {
  return adaptive_search(H, R, t, N, M, params).shifts;
}

}  // namespace mslat
