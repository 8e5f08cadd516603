#include "mslat/shifts.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mslat/primes.hpp"

namespace mslat {

std::string to_string(ShiftStrategy s) {
  switch (s) {
    case ShiftStrategy::trivial: return "trivial";
    case ShiftStrategy::polynomial: return "polynomial";
    case ShiftStrategy::single_lattice: return "single_lattice";
    case ShiftStrategy::multi_lattice: return "multi_lattice";
    case ShiftStrategy::crt_bound: return "crt_bound";
    case ShiftStrategy::probabilistic: return "probabilistic";
  }
  return "unknown";
}

namespace {

std::vector<std::complex<double>> roots_of_unity(std::int64_t p) {
  std::vector<std::complex<double>> r(static_cast<std::size_t>(p));
  for (std::int64_t k = 0; k < p; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(p);
    r[k] = {std::cos(a), std::sin(a)};
  }
  return r;
}

inline std::int64_t mod_p(std::int64_t v, std::int64_t p) {
  const std::int64_t r = v % p;
  return r < 0 ? r + p : r;
}

void finish_points(ShiftSet& Y) {
  Y.S = 0;
  for (const auto& b : Y.blocks) Y.S += static_cast<std::size_t>(b.p);
  Y.points.clear();
  Y.points.reserve(Y.S * Y.d);
  for (const auto& b : Y.blocks)
    for (auto a : b.numerators) Y.points.push_back(static_cast<double>(a) / static_cast<double>(b.p));
}

RationalBlock lattice_block(std::int64_t p, const std::vector<std::int64_t>& z) {
  RationalBlock b{p, {}};
  const auto d = z.size();
  b.numerators.resize(static_cast<std::size_t>(p) * d);
  std::vector<std::int64_t> zr(d);
  for (std::size_t j = 0; j < d; ++j) zr[j] = mod_p(z[j], p);
  for (std::int64_t s = 0; s < p; ++s)
    for (std::size_t j = 0; j < d; ++j) b.numerators[s * d + j] = s * zr[j] % p;
  return b;
}

}  // namespace

PhaseTable::PhaseTable(const ShiftSet& Y) : Y_(&Y) {
  for (const auto& b : Y.blocks) roots_.push_back(roots_of_unity(b.p));
}

template <class Int>
void PhaseTable::phases(std::span<const Int> k, std::span<std::complex<double>> out) const {
  const ShiftSet& Y = *Y_;
  const auto d = static_cast<std::size_t>(Y.d);
  if (k.size() != d || out.size() != Y.S) throw std::invalid_argument("PhaseTable: size mismatch");
  if (!Y.rational()) {
    for (std::size_t s = 0; s < Y.S; ++s) {
      double x = 0.0;
      for (std::size_t j = 0; j < d; ++j) x += static_cast<double>(k[j]) * Y.points[s * d + j];
      x -= std::floor(x);
      const double a = 2.0 * std::numbers::pi * x;
      out[s] = {std::cos(a), std::sin(a)};
    }
    return;
  }
  std::size_t s = 0;
  std::vector<std::int64_t> kr(d);
  for (std::size_t bi = 0; bi < Y.blocks.size(); ++bi) {
    const auto& b = Y.blocks[bi];
    for (std::size_t j = 0; j < d; ++j) kr[j] = mod_p(static_cast<std::int64_t>(k[j]), b.p);
    for (std::int64_t i = 0; i < b.p; ++i, ++s) {
      std::int64_t idx = 0;
      const std::int64_t* a = b.numerators.data() + i * d;
      for (std::size_t j = 0; j < d; ++j) idx = (idx + kr[j] * a[j]) % b.p;
      out[s] = roots_[bi][idx];
    }
  }
}

template void PhaseTable::phases<std::int32_t>(std::span<const std::int32_t>, std::span<std::complex<double>>) const;
template void PhaseTable::phases<std::int64_t>(std::span<const std::int64_t>, std::span<std::complex<double>>) const;

ShiftSet trivial_shifts(int d) {
  ShiftSet Y;
  Y.d = d;
  Y.strategy = ShiftStrategy::trivial;
  Y.blocks.push_back({1, std::vector<std::int64_t>(static_cast<std::size_t>(d), 0)});
  finish_points(Y);
  Y.achieved_ratio = 0.0;
  return Y;
}

ProjectionVector construct_z(const DifferenceSet& H) {
  const int d = H.dim();
  std::vector<std::vector<std::size_t>> active(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < H.size(); ++i) {
    const auto h = H[i];
    int last = -1;
    for (int j = 0; j < d; ++j)
      if (h[j] != 0) last = j;
    if (last < 0) throw std::invalid_argument("construct_z: H contains a zero row");
    active[last].push_back(i);
  }
  ProjectionVector out{std::vector<std::int64_t>(static_cast<std::size_t>(d), 0)};
  auto& z = out.z;
  std::vector<__int128> forbidden;
  for (int j = 0; j < d; ++j) {
    forbidden.clear();
    for (std::size_t i : active[j]) {
      const auto h = H[i];
      __int128 C = 0;
      for (int l = 0; l < j; ++l) C += static_cast<__int128>(h[l]) * z[l];
      if (C % h[j] == 0) forbidden.push_back(-C / h[j]);
    }
    std::sort(forbidden.begin(), forbidden.end());
    const auto reach = static_cast<std::int64_t>((active[j].size() + 1) / 2);
    bool found = false;
    for (std::int64_t m = 0; m <= reach && !found; ++m) {
      for (std::int64_t cand : {m, -m}) {
        if (m == 0 && cand != 0) continue;
        if (!std::binary_search(forbidden.begin(), forbidden.end(), static_cast<__int128>(cand))) {
          z[j] = cand;
          found = true;
          break;
        }
        if (m == 0) break;
      }
    }
    if (!found) throw std::logic_error("construct_z: candidate range exhausted");
  }
  return out;
}

std::vector<unsigned __int128> projections(const DifferenceSet& H, const ProjectionVector& z) {
  const int d = H.dim();
  std::vector<unsigned __int128> X(H.size());
  for (std::size_t i = 0; i < H.size(); ++i) {
    const auto h = H[i];
    __int128 acc = 0;
    for (int j = 0; j < d; ++j) {
      __int128 term;
      if (__builtin_mul_overflow(static_cast<__int128>(h[j]), static_cast<__int128>(z.z[j]), &term) ||
          __builtin_add_overflow(acc, term, &acc))
        throw std::overflow_error("projections: h.z exceeds 127 bits");
    }
    X[i] = static_cast<unsigned __int128>(acc < 0 ? -acc : acc);
  }
  return X;
}

double exp_sum_ratio(const ShiftSet& Y, const DifferenceSet& H) {
  if (H.empty() || Y.S == 0) return 0.0;
  PhaseTable table(Y);
  std::vector<std::complex<double>> ph(Y.S);
  double worst = 0.0;
  for (std::size_t i = 0; i < H.size(); ++i) {
    table.phases<std::int64_t>(H[i], ph);
    std::complex<double> acc{};
    for (const auto& v : ph) acc += v;
    worst = std::max(worst, std::abs(acc));
  }
  return worst / static_cast<double>(Y.S);
}

ShiftSet polynomial_shifts(std::int64_t p, int d) {
  if (p < 2 || !is_prime(static_cast<std::uint64_t>(p)))
    throw std::invalid_argument("polynomial_shifts: p must be prime");
  ShiftSet Y;
  Y.d = d;
  Y.strategy = ShiftStrategy::polynomial;
  Y.primes = {p};
  RationalBlock b{p, std::vector<std::int64_t>(static_cast<std::size_t>(p) * d)};
  for (std::int64_t s = 0; s < p; ++s) {
    std::int64_t pw = 1;
    for (int i = 0; i < d; ++i) {
      pw = pw * s % p;
      b.numerators[s * d + i] = pw;
    }
  }
  Y.blocks.push_back(std::move(b));
  finish_points(Y);
  return Y;
}

ShiftSet lattice_shifts(std::span<const std::int64_t> primes, const ProjectionVector& z, ShiftStrategy tag) {
  ShiftSet Y;
  Y.d = static_cast<int>(z.z.size());
  Y.strategy = tag;
  Y.z = z.z;
  Y.primes.assign(primes.begin(), primes.end());
  for (auto p : primes) Y.blocks.push_back(lattice_block(p, z.z));
  finish_points(Y);
  return Y;
}

double capacity_lower_bound(const SpaceParams& params, double M, std::int64_t N) {
  if (params.d < 2) throw std::invalid_argument("capacity_lower_bound: needs d >= 2");
  if (M <= 0) return 0.0;
  const double a = std::floor(std::pow(params.gamma[0] * M, 1.0 / params.alpha));
  const double b = std::floor(std::pow(params.gamma[1] * M, 1.0 / params.alpha));
  return a * b / static_cast<double>(N);
}

std::int64_t CrtSequence::total() const {
  std::int64_t s = 0;
  for (auto p : primes) s += p;
  return s;
}

CrtSequence crt_sequence(std::int64_t R, unsigned __int128 V, double t) {
  if (V < 2) throw std::invalid_argument("crt_sequence: V must be >= 2");
  if (R < 2) throw std::invalid_argument("crt_sequence: R must be >= 2");
  const double lnV = std::log(static_cast<double>(V));
  CrtSequence seq;
  seq.p1_bound = 2.0 * static_cast<double>(R - 1) * lnV / (kRosserConstant * t);
  const auto p1 = static_cast<std::int64_t>(next_prime(static_cast<std::uint64_t>(std::ceil(seq.p1_bound))));
  const auto k = static_cast<std::int64_t>(std::ceil(2.0 * static_cast<double>(R - 1) * lnV /
                                                     (t * std::log(static_cast<double>(p1)))));
  std::int64_t p = p1;
  for (std::int64_t i = 0; i < k; ++i) {
    seq.primes.push_back(p);
    p = static_cast<std::int64_t>(next_prime(static_cast<std::uint64_t>(p + 1)));
  }
  if (!seq.primes.empty() && seq.primes.back() > 2 * p1)
    throw std::logic_error("crt_sequence: p_k exceeds 2 p_1");
  return seq;
}

ProbabilisticCounts probabilistic_counts(std::int64_t R, std::int64_t N, double K, double t) {
  if (R < 1) throw std::invalid_argument("probabilistic_counts: R must be >= 1");
  const double base = 2.0 * K * static_cast<double>(R) * std::log(static_cast<double>(N));
  return {static_cast<std::int64_t>(std::ceil(base / (t * t))), static_cast<std::int64_t>(std::ceil(base))};
}

double success_K(std::int64_t N, double failure) {
  return 1.0 - std::log(failure) / std::log(static_cast<double>(N));
}

std::int64_t standard_probabilistic_total(std::int64_t R, std::int64_t N, double failure) {
  const double r = static_cast<double>(R);
  const double K = 1.0 - std::log(failure / (r * r)) / std::log(static_cast<double>(N));
  const auto per_frequency =
      static_cast<std::int64_t>(std::ceil(2.0 * K * r * std::log(static_cast<double>(N))));
  return R * per_frequency;
}

ShiftSet probabilistic_shifts(std::int64_t R, std::int64_t N, double K, double t, std::uint64_t seed, int d) {
  ShiftSet Y;
  Y.d = d;
  Y.strategy = ShiftStrategy::probabilistic;
  Y.seed = seed;
  Y.S = static_cast<std::size_t>(probabilistic_counts(R, N, K, t).S_new);
  std::mt19937_64 rng(seed);
  Y.points.resize(Y.S * d);
  for (auto& x : Y.points) x = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  Y.achieved_ratio = std::nan("");
  return Y;
}

namespace {

// Polynomial acceptance test with early exit on the first offending h.
bool polynomial_accepts(const DifferenceSet& H, std::int64_t p, int d, double limit,
                        const std::vector<std::complex<double>>& roots) {
  std::vector<std::int64_t> hr(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < H.size(); ++i) {
    const auto h = H[i];
    bool all_zero = true;
    for (int j = 0; j < d; ++j) {
      hr[j] = mod_p(h[j], p);
      all_zero = all_zero && hr[j] == 0;
    }
    if (all_zero) return false;  // the sum equals p
    std::complex<double> acc{};
    for (std::int64_t s = 0; s < p; ++s) {
      std::int64_t v = 0;
      for (int j = d - 1; j >= 0; --j) v = (v + hr[j]) * s % p;
      acc += roots[v];
    }
    if (std::abs(acc) > limit) return false;
  }
  return true;
}

bool lattice_accepts(const std::vector<unsigned __int128>& X, std::int64_t p) {
  const auto up = static_cast<unsigned __int128>(p);
  for (auto x : X)
    if (x % up == 0) return false;
  return true;
}

double threshold(std::int64_t R, double t) { return t / static_cast<double>(R - 1); }

void verify(ShiftSet& Y, const DifferenceSet& H, std::int64_t R, double t) {
  Y.achieved_ratio = exp_sum_ratio(Y, H);
  if (R >= 2 && Y.achieved_ratio > threshold(R, t) * (1.0 + 1e-12) + 1e-12)
    throw std::logic_error("shift set failed exponential-sum re-verification (" + to_string(Y.strategy) + ")");
}

}  // namespace

BadPrimeCheck check_bad_primes(std::span<const unsigned __int128> X, std::span<const std::int64_t> primes) {
  BadPrimeCheck c;
  if (primes.empty() || X.empty()) return c;
  c.checked = true;
  const auto p1 = static_cast<unsigned __int128>(*std::min_element(primes.begin(), primes.end()));
  unsigned __int128 V = 0;
  for (auto x : X) V = std::max(V, x);
  c.log_bound = std::log(static_cast<double>(V)) / std::log(static_cast<double>(p1));
  for (auto x : X) {
    std::int64_t m = 0;
    for (auto p : primes)
      if (x % static_cast<unsigned __int128>(p) == 0) ++m;
    c.worst_m = std::max(c.worst_m, m);
    unsigned __int128 pw = 1;
    for (std::int64_t i = 0; i < m && pw <= V; ++i) pw *= p1;
    if (pw > V) c.passed = false;
  }
  return c;
}

std::optional<ShiftSet> search_polynomial(const DifferenceSet& H, std::int64_t R, double t, int d,
                                          std::int64_t cap) {
  for (auto p = static_cast<std::int64_t>(next_prime(static_cast<std::uint64_t>(R))); p < cap;
       p = static_cast<std::int64_t>(next_prime(static_cast<std::uint64_t>(p + 1)))) {
    const auto roots = roots_of_unity(p);
    if (polynomial_accepts(H, p, d, threshold(R, t) * static_cast<double>(p), roots)) {
      ShiftSet Y = polynomial_shifts(p, d);
      verify(Y, H, R, t);
      return Y;
    }
  }
  return std::nullopt;
}

std::optional<ShiftSet> search_single_lattice(const DifferenceSet& H, const ProjectionVector& z,
                                              std::int64_t R, double p_min, std::int64_t cap) {
  const auto X = projections(H, z);
  auto p = static_cast<std::int64_t>(next_prime(static_cast<std::uint64_t>(R)));
  if (static_cast<double>(p) < p_min)
    p = static_cast<std::int64_t>(next_prime(static_cast<std::uint64_t>(std::ceil(p_min))));
  for (; p < cap; p = static_cast<std::int64_t>(next_prime(static_cast<std::uint64_t>(p + 1)))) {
    if (lattice_accepts(X, p)) {
      const std::int64_t one[] = {p};
      ShiftSet Y = lattice_shifts(one, z, ShiftStrategy::single_lattice);
      Y.achieved_ratio = exp_sum_ratio(Y, H);
      return Y;
    }
  }
  return std::nullopt;
}

std::optional<GreedyResult> greedy_multi_lattice(const DifferenceSet& H, const ProjectionVector& z,
                                                 std::int64_t R, double t, std::int64_t cap) {
  const auto X = projections(H, z);
  std::vector<std::int64_t> hits(X.size(), 0);
  GreedyResult g;
  std::int64_t worst = 0;
  for (auto p = static_cast<std::int64_t>(next_prime(static_cast<std::uint64_t>(R))); g.S < cap;
       p = static_cast<std::int64_t>(next_prime(static_cast<std::uint64_t>(p + 1)))) {
    g.primes.push_back(p);
    g.S += p;
    const auto up = static_cast<unsigned __int128>(p);
    for (std::size_t i = 0; i < X.size(); ++i)
      if (X[i] % up == 0) worst = std::max(worst, hits[i] += p);
    if (static_cast<double>(worst) / static_cast<double>(g.S) <= threshold(R, t)) {
      g.bad_primes = check_bad_primes(X, g.primes);
      return g;
    }
  }
  return std::nullopt;
}

AdaptiveResult adaptive_search(const DifferenceSet& H, std::int64_t R, double t, std::int64_t N, double M,
                               const SpaceParams& params) {
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("adaptive_search: t must lie in (0, 1)");
  AdaptiveResult out;
  const int d = params.d;
  if (R <= 1 || H.empty()) {
    out.shifts = trivial_shifts(d);
    return out;
  }

  out.z = construct_z(H);
  const auto X = projections(H, out.z);
  for (auto x : X) out.V = std::max(out.V, x);
  out.crt = crt_sequence(R, std::max<unsigned __int128>(out.V, 2), t);

  std::int64_t S_best = out.crt.total();
  ShiftSet Y_best = lattice_shifts(out.crt.primes, out.z, ShiftStrategy::crt_bound);
  out.p_min = capacity_lower_bound(params, M, N);

  const double limit = threshold(R, t);
  std::vector<std::int64_t> hits(X.size(), 0);
  std::int64_t worst_hits = 0;
  std::int64_t S_greedy = 0;

  for (auto p = static_cast<std::int64_t>(next_prime(static_cast<std::uint64_t>(R))); p < S_best;
       p = static_cast<std::int64_t>(next_prime(static_cast<std::uint64_t>(p + 1)))) {
    out.last_prime_tested = p;
    // A: polynomial curve
    if (polynomial_accepts(H, p, d, limit * static_cast<double>(p), roots_of_unity(p))) {
      S_best = p;
      Y_best = polynomial_shifts(p, d);
      break;
    }
    // B: single lattice, pruned by the capacity bound
    if (static_cast<double>(p) >= out.p_min && lattice_accepts(X, p)) {
      S_best = p;
      const std::int64_t one[] = {p};
      Y_best = lattice_shifts(one, out.z, ShiftStrategy::single_lattice);
      break;
    }
    // C: greedy multi-lattice accumulation
    if (!out.greedy_found) {
      out.greedy.primes.push_back(p);
      S_greedy += p;
      const auto up = static_cast<unsigned __int128>(p);
      for (std::size_t i = 0; i < X.size(); ++i)
        if (X[i] % up == 0) worst_hits = std::max(worst_hits, hits[i] += p);
      if (static_cast<double>(worst_hits) / static_cast<double>(S_greedy) <= limit) {
        out.greedy_found = true;
        out.greedy.S = S_greedy;
        out.greedy.bad_primes = check_bad_primes(X, out.greedy.primes);
        if (S_greedy < S_best) {
          S_best = S_greedy;
          Y_best = lattice_shifts(out.greedy.primes, out.z, ShiftStrategy::multi_lattice);
        }
      }
    }
  }
  if (!out.greedy_found) out.greedy.S = S_greedy;
  verify(Y_best, H, R, t);
  out.shifts = std::move(Y_best);
  return out;
}

}  // namespace mslat
