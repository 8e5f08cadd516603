#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "mslat/cbc.hpp"
#include "mslat/fibers.hpp"
#include "mslat/korobov.hpp"
#include "mslat/shifts.hpp"

namespace mslat {

using cplx = std::complex<double>;

/// Point evaluator on [0,1)^d. Called sequentially; it need not be thread-safe.
using SampleFn = std::function<cplx(std::span<const double>)>;

enum class DftPath { fft, direct };

/// b_s[r_j] = (1/N) sum_n f(frac(n g / N + y_s + delta)) exp(-2 pi i n r_j / N),
/// stored row-major as S x J.
struct Observables {
  std::size_t S = 0, J = 0;
  std::vector<cplx> b;
  cplx operator()(std::size_t s, std::size_t j) const { return b[s * J + j]; }
};

Observables observables(const SampleFn& f, const Lattice& lattice, const FiberPartition& part,
                        const ShiftSet& Y, std::span<const double> delta, DftPath path = DftPath::fft);

/// Least-squares coefficients of one fiber: D(-delta) (B^H B)^{-1} B^H b with
/// B_{s,m} = exp(2 pi i l_m . y_s). Throws std::runtime_error if B^H B is
/// numerically singular.
std::vector<cplx> solve_fiber(std::span<const FrequencyView> fiber, const ShiftSet& Y,
                              std::span<const double> delta, std::span<const cplx> b_col);

/// Trigonometric polynomial sum_k c_k exp(2 pi i k.x) over an index set.
struct SpectralApprox {
  IndexSet A;
  std::vector<cplx> coeffs;  // aligned with A
  Lattice lattice;
  std::size_t S = 0;
  ShiftStrategy strategy = ShiftStrategy::trivial;
  std::vector<double> delta;

  cplx coefficient(FrequencyView k) const;
};

SpectralApprox approximate(const SampleFn& f, const Lattice& lattice, const IndexSet& A,
                           const FiberPartition& part, const ShiftSet& Y, std::span<const double> delta,
                           DftPath path = DftPath::fft);

cplx evaluate(const SpectralApprox& approx, std::span<const double> x);

/// Batched evaluation with per-coordinate exponential tables.
std::vector<cplx> evaluate_many(const SpectralApprox& approx, std::span<const double> points);

struct FiberGram {
  std::size_t v = 0;
  double lambda_min = 0, lambda_max = 0, kappa = 1;
};

struct GramDiagnostics {
  std::vector<FiberGram> fibers;
  double max_kappa = 1;
};

/// Extremal eigenvalues of G_j = B_j^H B_j for every fiber.
GramDiagnostics gram_diagnostics(const IndexSet& A, const FiberPartition& part, const ShiftSet& Y);

/// ||(B^H B)^{-1} B^H a_k||^2 for an out-of-set frequency k aliasing into the fiber.
double aliasing_amplification(std::span<const FrequencyView> fiber, const ShiftSet& Y, FrequencyView k);

}  // namespace mslat
