#include "mslat/cosine_pde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mslat {

std::vector<double> tent(std::span<const double> z) {
  std::vector<double> out(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (!(z[j] >= 0.0 && z[j] <= 1.0)) throw std::domain_error("tent: coordinate outside [0,1]");
    out[j] = 1.0 - std::abs(2.0 * z[j] - 1.0);
  }
  return out;
}

double CosineApprox::coefficient(FrequencyView k) const {
  // freqs is lexicographic, inherited from the parent index set
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const auto f = freq(mid);
    if (std::lexicographical_compare(f.begin(), f.end(), k.begin(), k.end())) lo = mid + 1;
    else hi = mid;
  }
  if (lo < size() && std::ranges::equal(freq(lo), k)) return coeffs[lo];
  return 0.0;
}

CosineApprox fourier_to_cosine(const SpectralApprox& F) {
  const IndexSet& A = F.A;
  const int d = A.dim();
  CosineApprox C;
  C.d = d;
  if (A.empty()) return C;

  double cmax = 0.0;
  for (const auto& c : F.coeffs) cmax = std::max(cmax, std::abs(c));

  std::vector<std::int32_t> h(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < A.size(); ++i) {
    const auto k = A[i];
    for (int j = 0; j < d; ++j) {
      if (k[j] == 0) continue;
      std::copy(k.begin(), k.end(), h.begin());
      h[j] = -h[j];
      if (A.find(h) < 0) throw std::invalid_argument("fourier_to_cosine: index set is not sign-symmetric");
    }
  }

  std::vector<int> nz;
  for (std::size_t i = 0; i < A.size(); ++i) {
    const auto k = A[i];
    if (std::any_of(k.begin(), k.end(), [](std::int32_t v) { return v < 0; })) continue;
    nz.clear();
    for (int j = 0; j < d; ++j)
      if (k[j] != 0) nz.push_back(j);
    cplx sum{};
    const std::size_t patterns = std::size_t{1} << nz.size();
    for (std::size_t mask = 0; mask < patterns; ++mask) {
      std::copy(k.begin(), k.end(), h.begin());
      for (std::size_t b = 0; b < nz.size(); ++b)
        if (mask >> b & 1U) h[nz[b]] = -h[nz[b]];
      const auto pos = A.find(h);
      if (pos >= 0) sum += F.coeffs[static_cast<std::size_t>(pos)];
    }
    const double scale = std::pow(2.0, -0.5 * static_cast<double>(nz.size()));
    if (std::abs(sum.imag()) * scale > 1e-10 * std::max(cmax, 1e-300) && cmax > 0)
      throw std::runtime_error("fourier_to_cosine: coefficients are not real");
    C.freqs.insert(C.freqs.end(), k.begin(), k.end());
    C.coeffs.push_back(sum.real() * scale);
  }
  return C;
}

NonperiodicResult approximate_nonperiodic(const RealFn& f, const Lattice& lattice, const IndexSet& A,
                                          const FiberPartition& part, const ShiftSet& Y,
                                          std::span<const double> delta, DftPath path) {
  const SampleFn g = [&f](std::span<const double> z) { return cplx{f(tent(z)), 0.0}; };
  NonperiodicResult out{approximate(g, lattice, A, part, Y, delta, path), {}};
  out.cosine = fourier_to_cosine(out.periodic);
  return out;
}

std::vector<double> evaluate_cosine_many(const CosineApprox& C, std::span<const double> points) {
  const auto ud = static_cast<std::size_t>(C.d);
  if (ud == 0) return {};
  if (points.size() % ud != 0) throw std::invalid_argument("evaluate_cosine_many: ragged point array");
  std::vector<std::int32_t> kmax(ud, 0);
  for (std::size_t i = 0; i < C.size(); ++i)
    for (std::size_t j = 0; j < ud; ++j) kmax[j] = std::max(kmax[j], C.freq(i)[j]);
  std::vector<std::size_t> offset(ud + 1, 0);
  for (std::size_t j = 0; j < ud; ++j) offset[j + 1] = offset[j] + static_cast<std::size_t>(kmax[j]) + 1;
  std::vector<double> table(offset[ud]);

  const std::size_t npts = points.size() / ud;
  std::vector<double> out(npts);
  for (std::size_t q = 0; q < npts; ++q) {
    for (std::size_t j = 0; j < ud; ++j) {
      const double xj = points[q * ud + j];
      table[offset[j]] = 1.0;
      for (std::int32_t k = 1; k <= kmax[j]; ++k)
        table[offset[j] + k] = std::numbers::sqrt2 * std::cos(std::numbers::pi * k * xj);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < C.size(); ++i) {
      const auto k = C.freq(i);
      double term = C.coeffs[i];
      for (std::size_t j = 0; j < ud; ++j) term *= table[offset[j] + k[j]];
      acc += term;
    }
    out[q] = acc;
  }
  return out;
}

double evaluate_cosine(const CosineApprox& C, std::span<const double> x) {
  if (C.d == 0) return 0.0;
  return evaluate_cosine_many(C, x).at(0);
}

cplx sign_average(const SpectralApprox& g, std::span<const double> z) {
  const auto d = z.size();
  const std::size_t patterns = std::size_t{1} << d;
  std::vector<double> pts(patterns * d);
  for (std::size_t mask = 0; mask < patterns; ++mask)
    for (std::size_t j = 0; j < d; ++j) {
      double v = z[j];
      if (mask >> j & 1U) v = v == 0.0 ? 0.0 : 1.0 - v;
      pts[mask * d + j] = v;
    }
  cplx acc{};
  for (const auto& v : evaluate_many(g, pts)) acc += v;
  return acc / static_cast<double>(patterns);
}

PoissonSolution poisson_from_source(const CosineApprox& source, double mean_u) {
  PoissonSolution u;
  u.mean = mean_u;
  u.modes.d = source.d;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const auto k = source.freq(i);
    double sq = 0.0;
    for (auto v : k) sq += static_cast<double>(v) * v;
    if (sq == 0.0) {
      u.compatibility_residual = source.coeffs[i];
      continue;
    }
    const double lambda = pi2 * sq;
    u.modes.freqs.insert(u.modes.freqs.end(), k.begin(), k.end());
    u.modes.coeffs.push_back(-source.coeffs[i] / lambda);
    u.eigenvalues.push_back(lambda);
  }
  return u;
}

PoissonSolution poisson_solve(const RealFn& f, double mean_u, const Lattice& lattice, const IndexSet& A,
                              const FiberPartition& part, const ShiftSet& Y, std::span<const double> delta) {
  return poisson_from_source(approximate_nonperiodic(f, lattice, A, part, Y, delta).cosine, mean_u);
}

std::vector<double> evaluate_poisson_many(const PoissonSolution& u, std::span<const double> points) {
  const auto d = static_cast<std::size_t>(u.modes.d);
  if (d == 0) return {};
  auto out = evaluate_cosine_many(u.modes, points);
  for (auto& v : out) v += u.mean;
  return out;
}

double evaluate_poisson(const PoissonSolution& u, std::span<const double> x) {
  return evaluate_poisson_many(u, x).at(0);
}

}  // namespace mslat
