#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mslat/reconstruct.hpp"

namespace mslat {

/// Real function on [0,1]^d.
using RealFn = std::function<double(std::span<const double>)>;

/// psi(z) = 1 - |2z - 1| componentwise. Throws std::domain_error outside [0,1].
std::vector<double> tent(std::span<const double> z);

/// Half-period cosine expansion sum_k c_k phi_k(x) over nonnegative k, with
/// phi_k(x) = sqrt(2)^{|k|_0} prod_j cos(pi k_j x_j).
struct CosineApprox {
  int d = 0;
  std::vector<std::int32_t> freqs;  // size() x d, nonnegative
  std::vector<double> coeffs;

  std::size_t size() const { return coeffs.size(); }
  FrequencyView freq(std::size_t i) const { return {freqs.data() + i * d, static_cast<std::size_t>(d)}; }
  double coefficient(FrequencyView k) const;
};

/// c_k = 2^{-|k|_0 / 2} sum_{|h| = k, h in A} c_h. Throws std::invalid_argument if
/// A is not closed under sign flips and std::runtime_error if the discarded
/// imaginary part exceeds 1e-10 of the largest coefficient.
CosineApprox fourier_to_cosine(const SpectralApprox& F);

struct NonperiodicResult {
  SpectralApprox periodic;  // approximation of g = f o psi
  CosineApprox cosine;
};

/// Runs the periodic pipeline on g(z) = f(psi(z)) and maps to cosine coefficients.
NonperiodicResult approximate_nonperiodic(const RealFn& f, const Lattice& lattice, const IndexSet& A,
                                          const FiberPartition& part, const ShiftSet& Y,
                                          std::span<const double> delta, DftPath path = DftPath::fft);

double evaluate_cosine(const CosineApprox& C, std::span<const double> x);
std::vector<double> evaluate_cosine_many(const CosineApprox& C, std::span<const double> points);

/// (1/2^d) sum over sign patterns sigma of g~(sigma(z)).
cplx sign_average(const SpectralApprox& g, std::span<const double> z);

/// Neumann Poisson solution  u = mean - sum_{k != 0} c_k / lambda_k phi_k,
/// lambda_k = pi^2 |k|^2.
struct PoissonSolution {
  double mean = 0;
  CosineApprox modes;            // -c_k / lambda_k, k != 0
  std::vector<double> eigenvalues;
  double compatibility_residual = 0;  // discarded c_0 of the source
};

PoissonSolution poisson_from_source(const CosineApprox& source, double mean_u);

PoissonSolution poisson_solve(const RealFn& f, double mean_u, const Lattice& lattice, const IndexSet& A,
                              const FiberPartition& part, const ShiftSet& Y, std::span<const double> delta);

double evaluate_poisson(const PoissonSolution& u, std::span<const double> x);
std::vector<double> evaluate_poisson_many(const PoissonSolution& u, std::span<const double> points);

}  // namespace mslat
