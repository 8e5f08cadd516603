#include "mslat/cbc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mslat/dft.hpp"
#include "mslat/primes.hpp"

namespace mslat {

void Lattice::validate() const {
  if (N < 2 || !is_prime(static_cast<std::uint64_t>(N)))
    throw std::invalid_argument("Lattice: N = " + std::to_string(N) + " is not prime");
  for (auto gj : g)
    if (gj < 1 || gj > N - 1) throw std::invalid_argument("Lattice: g_j must lie in {1, ..., N-1}");
}

std::int64_t Lattice::residue(std::int64_t n, int j) const {
  return static_cast<std::int64_t>(static_cast<__int128>(n) * g[j] % N);
}

std::int64_t lattice_residue(const Lattice& lattice, FrequencyView k) {
  if (k.size() != lattice.g.size()) throw std::invalid_argument("lattice_residue: dimension mismatch");
  __int128 acc = 0;
  for (std::size_t j = 0; j < k.size(); ++j) acc += static_cast<__int128>(k[j]) * lattice.g[j];
  auto r = static_cast<std::int64_t>(acc % lattice.N);
  return r < 0 ? r + lattice.N : r;
}

double bernoulli_even(int order, double x) {
  if (x < 0.0 || x > 1.0) throw std::domain_error("bernoulli_even: x must lie in [0, 1]");
  const double x2 = x * x;
  switch (order) {
    case 2: return x2 - x + 1.0 / 6.0;
    case 4: return x2 * x2 - 2.0 * x2 * x + x2 - 1.0 / 30.0;
    case 6: return x2 * x2 * x2 - 3.0 * x2 * x2 * x + 2.5 * x2 * x2 - 0.5 * x2 + 1.0 / 42.0;
    default: throw std::invalid_argument("bernoulli_even: order must be 2, 4 or 6");
  }
}

namespace {

double bernoulli_scale(int alpha_int) {
  // (-1)^{alpha+1} (2 pi)^{2 alpha} / (2 alpha)!
  double fact = 1.0;
  for (int i = 2; i <= 2 * alpha_int; ++i) fact *= i;
  const double sign = (alpha_int % 2 == 1) ? 1.0 : -1.0;
  return sign * std::pow(2.0 * std::numbers::pi, 2 * alpha_int) / fact;
}

// omega[m] = c_alpha B_{2 alpha}(m / N), mirrored so that omega[m] == omega[N - m] bitwise.
std::vector<double> kernel_table(int alpha_int, std::int64_t N) {
  if (alpha_int < 1 || alpha_int > 3)
    throw std::invalid_argument("worst-case error: integer smoothness must be 1, 2 or 3");
  const double c = bernoulli_scale(alpha_int);
  std::vector<double> omega(static_cast<std::size_t>(N));
  for (std::int64_t m = 0; m <= N / 2; ++m) {
    omega[m] = c * bernoulli_even(2 * alpha_int, static_cast<double>(m) / static_cast<double>(N));
    if (m != 0) omega[N - m] = omega[m];
  }
  return omega;
}

}  // namespace

double worst_case_P(int alpha_int, std::span<const double> gamma, std::int64_t N,
                    std::span<const std::int64_t> g) {
  if (N < 2) throw std::invalid_argument("worst_case_P: N must be >= 2");
  if (gamma.size() < g.size()) throw std::invalid_argument("worst_case_P: too few weights");
  const auto omega = kernel_table(alpha_int, N);
  double sum = 0.0;
  for (std::int64_t n = 0; n < N; ++n) {
    double prod = 1.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const auto m = static_cast<std::int64_t>(static_cast<__int128>(n) * g[j] % N);
      prod *= 1.0 + gamma[j] * gamma[j] * omega[m];
    }
    sum += prod;
  }
  return -1.0 + sum / static_cast<double>(N);
}

namespace {

// Value of sum_n prod[n] * omega[n c mod N] for c = 1..(N-1)/2 (the rest mirror).
std::vector<double> candidate_sums_naive(const std::vector<double>& prod, const std::vector<double>& omega,
                                         std::int64_t N) {
  const std::int64_t half = (N - 1) / 2;
  std::vector<double> out(static_cast<std::size_t>(half + 1), 0.0);
  for (std::int64_t c = 1; c <= half; ++c) {
    double acc = 0.0;
    std::int64_t idx = 0;
    for (std::int64_t n = 0; n < N; ++n) {
      acc += prod[n] * omega[idx];
      idx += c;
      if (idx >= N) idx -= N;
    }
    out[c] = acc;
  }
  return out;
}

// Same quantity through the circulant structure: with c = rho^i and n = rho^{-j},
// n c = rho^{i-j}, so the sums over n != 0 are a cyclic convolution of length N-1.
std::vector<double> candidate_sums_fast(const std::vector<double>& prod, const std::vector<double>& omega,
                                        std::int64_t N) {
  const auto uN = static_cast<std::uint64_t>(N);
  const std::uint64_t rho = primitive_root(uN);
  const std::uint64_t rho_inv = pow_mod(rho, uN - 2, uN);
  const std::size_t L = uN - 1;
  std::vector<double> w(L), a(L);
  std::vector<std::uint64_t> index_of(uN, 0);  // c -> i with rho^i = c
  std::uint64_t pw = 1, pinv = 1;
  for (std::size_t k = 0; k < L; ++k) {
    w[k] = omega[pw];
    a[k] = prod[pinv];
    index_of[pw] = k;
    pw = mul_mod(pw, rho, uN);
    pinv = mul_mod(pinv, rho_inv, uN);
  }
  const auto conv = cyclic_convolution(w, a);
  const std::int64_t half = (N - 1) / 2;
  std::vector<double> out(static_cast<std::size_t>(half + 1), 0.0);
  for (std::int64_t c = 1; c <= half; ++c) out[c] = prod[0] * omega[0] + conv[index_of[c]];
  return out;
}

}  // namespace

Lattice cbc_construct(const SpaceParams& params, std::int64_t N, CbcMethod method) {
  params.validate();
  if (N < 2 || !is_prime(static_cast<std::uint64_t>(N)))
    throw std::invalid_argument("cbc_construct: N = " + std::to_string(N) + " is not prime");
  if (params.d == 1 || N == 2) return Lattice{N, std::vector<std::int64_t>(static_cast<std::size_t>(params.d), 1)};
  const int alpha_int = static_cast<int>(std::floor(params.alpha));
  if (alpha_int < 1 || alpha_int > 3)
    throw std::invalid_argument("cbc_construct: floor(alpha) must be 1, 2 or 3");
  const double lambda = alpha_int / params.alpha;
  std::vector<double> gamma(params.gamma.size());
  for (std::size_t j = 0; j < gamma.size(); ++j) gamma[j] = std::pow(params.gamma[j], lambda);

  Lattice lat{N, {1}};
  const bool fast = method == CbcMethod::fast || (method == CbcMethod::automatic && N > 20011);
  const auto omega = kernel_table(alpha_int, N);

  std::vector<double> prod(static_cast<std::size_t>(N));
  for (std::int64_t n = 0; n < N; ++n) prod[n] = 1.0 + gamma[0] * gamma[0] * omega[n];  // g_1 = 1

  for (int s = 1; s < params.d; ++s) {
    const double g2 = gamma[s] * gamma[s];
    const auto sums = fast ? candidate_sums_fast(prod, omega, N) : candidate_sums_naive(prod, omega, N);
    std::int64_t best = 1;
    for (std::int64_t c = 2; c < static_cast<std::int64_t>(sums.size()); ++c)
      if (g2 * sums[c] < g2 * sums[best]) best = c;
    lat.g.push_back(best);
    std::int64_t idx = 0;
    for (std::int64_t n = 0; n < N; ++n) {
      prod[n] *= 1.0 + g2 * omega[idx];
      idx += best;
      if (idx >= N) idx -= N;
    }
  }
  return lat;
}

bool validate_zero_fiber(const Lattice& lattice, const IndexSet& A) {
  for (std::size_t i = 0; i < A.size(); ++i) {
    const auto k = A[i];
    bool zero = true;
    for (auto kj : k) zero = zero && kj == 0;
    if (!zero && lattice_residue(lattice, k) == 0) return false;
  }
  return true;
}

}  // namespace mslat
