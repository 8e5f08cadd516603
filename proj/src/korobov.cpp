#include "mslat/korobov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mslat {

SpaceParams::SpaceParams(int dim, double smoothness, std::vector<double> weights)
    : d(dim), alpha(smoothness), gamma(std::move(weights)) {
  validate();
}

void SpaceParams::validate() const {
  if (d < 1) throw std::invalid_argument("SpaceParams: d must be >= 1");
  if (!(alpha > 0.5)) throw std::invalid_argument("SpaceParams: alpha must exceed 1/2");
  if (gamma.size() != static_cast<std::size_t>(d))
    throw std::invalid_argument("SpaceParams: expected " + std::to_string(d) + " weights, got " +
                                std::to_string(gamma.size()));
  for (double g : gamma)
    if (!(g > 0.0 && g <= 1.0))
      throw std::invalid_argument("SpaceParams: weights must lie in (0, 1]");
}

SpaceParams SpaceParams::with_power_weights(int d, double alpha, double decay) {
  std::vector<double> w(static_cast<std::size_t>(std::max(d, 0)));
  for (int j = 0; j < d; ++j) w[j] = std::exp2(-decay * j);
  return SpaceParams(d, alpha, std::move(w));
}

namespace {

inline double factor(double alpha, double gamma, std::int64_t k) {
  if (k == 0) return 1.0;
  return std::max(1.0, std::pow(static_cast<double>(k < 0 ? -k : k), alpha) / gamma);
}

// Depth-first enumeration of {k : r(k) < M} in lexicographic order. The running
// product is formed left to right exactly as weight_r does, so membership agrees
// bit for bit with a brute-force test.
class CrossWalker {
 public:
  CrossWalker(const SpaceParams& p, double M) : p_(p), M_(M), k_(p.d, 0), tail_min_(p.d + 1) {
    tail_min_[p.d] = std::numeric_limits<double>::infinity();
    for (int j = p.d - 1; j >= 0; --j)
      tail_min_[j] = std::min(tail_min_[j + 1], factor(p.alpha, p.gamma[j], 1));
  }

  // visit returns false to abort the enumeration
  template <class Visit>
  void run(Visit&& visit) {
    stop_ = false;
    if (!(M_ > 1.0)) return;
    walk(0, 1.0, visit);
  }

 private:
  template <class Visit>
  void walk(int j, double prod, Visit& visit) {
    if (j == p_.d) {
      stop_ = !visit(k_);
      return;
    }
    if (!(prod * tail_min_[j] < M_)) {
      // no nonzero coordinate fits anywhere to the right
      std::fill(k_.begin() + j, k_.end(), 0);
      stop_ = !visit(k_);
      return;
    }
    std::int64_t kmax = 0;
    while (prod * factor(p_.alpha, p_.gamma[j], kmax + 1) < M_) ++kmax;
    for (std::int64_t k = -kmax; k <= kmax && !stop_; ++k) {
      k_[j] = static_cast<std::int32_t>(k);
      walk(j + 1, prod * factor(p_.alpha, p_.gamma[j], k), visit);
    }
  }

  const SpaceParams& p_;
  double M_;
  std::vector<std::int32_t> k_;
  std::vector<double> tail_min_;
  bool stop_ = false;
};

// |A_M| if it is at most cap, otherwise some value > cap
std::size_t capped_size(const SpaceParams& p, double M, std::size_t cap) {
  std::size_t n = 0;
  CrossWalker(p, M).run([&](const std::vector<std::int32_t>&) { return ++n <= cap; });
  return n;
}

}  // namespace

double weight_r(const SpaceParams& params, FrequencyView k) {
  if (k.size() != static_cast<std::size_t>(params.d))
    throw std::invalid_argument("weight_r: frequency has length " + std::to_string(k.size()) +
                                ", expected " + std::to_string(params.d));
  double r = 1.0;
  for (int j = 0; j < params.d; ++j) r *= factor(params.alpha, params.gamma[j], k[j]);
  return r;
}

IndexSet::IndexSet(SpaceParams params, double M, std::vector<std::int32_t> flat)
    : params_(std::move(params)), M_(M), dim_(params_.d), flat_(std::move(flat)) {}

std::ptrdiff_t IndexSet::find(FrequencyView k) const {
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const auto row = (*this)[mid];
    if (std::lexicographical_compare(row.begin(), row.end(), k.begin(), k.end()))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < size() && std::equal(k.begin(), k.end(), (*this)[lo].begin()))
    return static_cast<std::ptrdiff_t>(lo);
  return -1;
}

std::vector<std::int32_t> IndexSet::max_abs() const {
  std::vector<std::int32_t> m(dim_, 0);
  for (std::size_t i = 0; i < size(); ++i) {
    auto row = (*this)[i];
    for (std::size_t j = 0; j < dim_; ++j) m[j] = std::max(m[j], std::abs(row[j]));
  }
  return m;
}

IndexSet build_index_set(const SpaceParams& params, double M) {
  params.validate();
  std::vector<std::int32_t> flat;
  CrossWalker(params, M).run([&](const std::vector<std::int32_t>& k) {
    flat.insert(flat.end(), k.begin(), k.end());
    return true;
  });
  return IndexSet(params, M, std::move(flat));
}

std::size_t index_set_size(const SpaceParams& params, double M) {
  params.validate();
  std::size_t n = 0;
  CrossWalker(params, M).run([&](const std::vector<std::int32_t>&) {
    ++n;
    return true;
  });
  return n;
}

namespace {

double theoretical_M(const SpaceParams& p, std::int64_t N) {
  constexpr int grid = 2048;
  const double lo = 1.0 / p.alpha + 1e-6;
  const double hi = 2.0;
  double best = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double lambda = lo + (hi - lo) * i / (grid - 1);
    const double zeta = std::riemann_zeta(p.alpha * lambda);
    double log_val = std::log(0.5 * static_cast<double>(N));
    for (double g : p.gamma) log_val -= std::log1p(2.0 * std::pow(g, lambda) * zeta);
    best = std::max(best, std::exp(log_val / lambda));
  }
  return best;
}

double bisect_M(const SpaceParams& p, std::int64_t N) {
  double lo = 1.0;
  double hi = std::pow(static_cast<double>(N), p.alpha) + 1.0;
  const auto target = static_cast<std::size_t>(N);
  if (capped_size(p, hi, target) <= target) return hi;
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // floating spacing exhausted
    if (capped_size(p, mid, target) <= target)
      lo = mid;
    else
      hi = mid;
  }
  if (capped_size(p, lo, target) > target)
    throw std::logic_error("select_M: bisection failed to certify |A| <= N");
  return lo;
}

}  // namespace

double select_M(const SpaceParams& params, std::int64_t N, MSelection mode) {
  params.validate();
  if (N < 2) throw std::invalid_argument("select_M: N must be >= 2");
  return mode == MSelection::theoretical ? theoretical_M(params, N) : bisect_M(params, N);
}

}  // namespace mslat
