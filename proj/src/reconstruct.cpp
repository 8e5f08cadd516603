#include "mslat/reconstruct.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <optional>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mslat/dft.hpp"

namespace mslat {

namespace {

using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;

inline cplx expi(double turns) {
  const double a = 2.0 * std::numbers::pi * turns;
  return {std::cos(a), std::sin(a)};
}

std::vector<double> zero_delta_if_empty(std::span<const double> delta, int d) {
  if (delta.empty()) return std::vector<double>(static_cast<std::size_t>(d), 0.0);
  if (delta.size() != static_cast<std::size_t>(d)) throw std::invalid_argument("delta has wrong dimension");
  return {delta.begin(), delta.end()};
}

MatrixXcd system_matrix(std::span<const FrequencyView> fiber, const ShiftSet& Y) {
  PhaseTable table(Y);
  MatrixXcd B(static_cast<Eigen::Index>(Y.S), static_cast<Eigen::Index>(fiber.size()));
  std::vector<cplx> ph(Y.S);
  for (std::size_t m = 0; m < fiber.size(); ++m) {
    table.phases<std::int32_t>(fiber[m], ph);
    for (std::size_t s = 0; s < Y.S; ++s) B(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(m)) = ph[s];
  }
  return B;
}

MatrixXcd gram(const MatrixXcd& B) {
  MatrixXcd G = B.adjoint() * B;
  const double S = static_cast<double>(B.rows());
  for (Eigen::Index i = 0; i < G.rows(); ++i) G(i, i) = S;  // |e^{i theta}|^2 summed S times
  return G;
}

}  // namespace

Observables observables(const SampleFn& f, const Lattice& lattice, const FiberPartition& part,
                        const ShiftSet& Y, std::span<const double> delta_in, DftPath path) {
  const int d = lattice.dim();
  const auto delta = zero_delta_if_empty(delta_in, d);
  const auto N = static_cast<std::size_t>(lattice.N);
  Observables out;
  out.S = Y.S;
  out.J = part.J();
  out.b.resize(out.S * out.J);

  std::optional<Dft> plan;
  if (path == DftPath::fft) plan.emplace(N);
  std::vector<cplx> roots;
  if (path == DftPath::direct) {
    roots.resize(N);
    for (std::size_t k = 0; k < N; ++k) roots[k] = expi(-static_cast<double>(k) / static_cast<double>(N));
  }

  std::vector<double> x(static_cast<std::size_t>(d));
  std::vector<cplx> samples(N);
  const double invN = 1.0 / static_cast<double>(N);
  for (std::size_t s = 0; s < Y.S; ++s) {
    const auto y = Y.point(s);
    for (std::size_t n = 0; n < N; ++n) {
      for (int j = 0; j < d; ++j) {
        double v = static_cast<double>(lattice.residue(static_cast<std::int64_t>(n), j)) * invN + y[j] + delta[j];
        v -= std::floor(v);
        x[j] = v;
      }
      samples[n] = f(x);
    }
    if (path == DftPath::fft) {
      plan->forward(samples);
      for (std::size_t j = 0; j < out.J; ++j) out.b[s * out.J + j] = samples[part.residues[j]] * invN;
    } else {
      for (std::size_t j = 0; j < out.J; ++j) {
        const auto r = static_cast<std::size_t>(part.residues[j]);
        cplx acc{};
        std::size_t idx = 0;
        for (std::size_t n = 0; n < N; ++n) {
          acc += samples[n] * roots[idx];
          idx += r;
          if (idx >= N) idx -= N;
        }
        out.b[s * out.J + j] = acc * invN;
      }
    }
  }
  return out;
}

std::vector<cplx> solve_fiber(std::span<const FrequencyView> fiber, const ShiftSet& Y,
                              std::span<const double> delta_in, std::span<const cplx> b_col) {
  const int d = Y.d;
  const auto delta = zero_delta_if_empty(delta_in, d);
  const std::size_t v = fiber.size();
  if (v > Y.S) throw std::invalid_argument("solve_fiber: fiber longer than the shift count");
  if (b_col.size() != Y.S) throw std::invalid_argument("solve_fiber: observation length mismatch");

  const MatrixXcd B = system_matrix(fiber, Y);
  const MatrixXcd G = gram(B);
  VectorXcd b(static_cast<Eigen::Index>(Y.S));
  for (std::size_t s = 0; s < Y.S; ++s) b(static_cast<Eigen::Index>(s)) = b_col[s];
  const VectorXcd rhs = B.adjoint() * b;

  Eigen::LLT<MatrixXcd> llt(G);
  if (llt.info() != Eigen::Success) throw std::runtime_error("solve_fiber: Gram matrix is numerically singular");
  const auto L = llt.matrixLLT();
  for (Eigen::Index i = 0; i < L.rows(); ++i)
    if (std::norm(L(i, i)) < 1e-12 * static_cast<double>(Y.S))
      throw std::runtime_error("solve_fiber: Gram matrix is numerically singular");
  const VectorXcd x = llt.solve(rhs);

  std::vector<cplx> out(v);
  for (std::size_t m = 0; m < v; ++m) {
    double turns = 0.0;
    for (int j = 0; j < d; ++j) turns += static_cast<double>(fiber[m][j]) * delta[j];
    out[m] = x(static_cast<Eigen::Index>(m)) * expi(-turns);
  }
  return out;
}

cplx SpectralApprox::coefficient(FrequencyView k) const {
  const auto i = A.find(k);
  return i < 0 ? cplx{} : coeffs[static_cast<std::size_t>(i)];
}

SpectralApprox approximate(const SampleFn& f, const Lattice& lattice, const IndexSet& A,
                           const FiberPartition& part, const ShiftSet& Y, std::span<const double> delta_in,
                           DftPath path) {
  const auto delta = zero_delta_if_empty(delta_in, lattice.dim());
  SpectralApprox approx{A, std::vector<cplx>(A.size()), lattice, Y.S, Y.strategy, delta};
  const Observables obs = observables(f, lattice, part, Y, delta, path);
  std::vector<FrequencyView> freqs;
  std::vector<cplx> col(Y.S);
  for (std::size_t j = 0; j < part.J(); ++j) {
    freqs.clear();
    for (auto idx : part.fibers[j]) freqs.push_back(A[idx]);
    for (std::size_t s = 0; s < Y.S; ++s) col[s] = obs(s, j);
    const auto x = solve_fiber(freqs, Y, delta, col);
    for (std::size_t m = 0; m < freqs.size(); ++m) approx.coeffs[part.fibers[j][m]] = x[m];
  }
  return approx;
}

std::vector<cplx> evaluate_many(const SpectralApprox& approx, std::span<const double> points) {
  const IndexSet& A = approx.A;
  const int d = A.dim();
  if (A.empty()) return std::vector<cplx>(d == 0 ? 0 : points.size() / static_cast<std::size_t>(d), cplx{});
  const auto ud = static_cast<std::size_t>(d);
  if (points.size() % ud != 0) throw std::invalid_argument("evaluate_many: ragged point array");
  const auto kmax = A.max_abs();
  std::vector<std::size_t> offset(ud + 1, 0);
  for (std::size_t j = 0; j < ud; ++j) offset[j + 1] = offset[j] + 2 * static_cast<std::size_t>(kmax[j]) + 1;
  std::vector<cplx> table(offset[ud]);

  const std::size_t npts = points.size() / ud;
  std::vector<cplx> out(npts);
  for (std::size_t q = 0; q < npts; ++q) {
    for (std::size_t j = 0; j < ud; ++j) {
      const double xj = points[q * ud + j];
      const auto K = static_cast<std::int64_t>(kmax[j]);
      cplx* row = table.data() + offset[j] + K;  // row[k] = e^{2 pi i k x_j}
      for (std::int64_t k = 0; k <= K; ++k) {
        const double t = static_cast<double>(k) * xj;
        row[k] = expi(t - std::floor(t));
        row[-k] = std::conj(row[k]);
      }
    }
    cplx acc{};
    for (std::size_t i = 0; i < A.size(); ++i) {
      const auto k = A[i];
      cplx term = approx.coeffs[i];
      for (std::size_t j = 0; j < ud; ++j) term *= table[offset[j] + kmax[j] + k[j]];
      acc += term;
    }
    out[q] = acc;
  }
  return out;
}

cplx evaluate(const SpectralApprox& approx, std::span<const double> x) { return evaluate_many(approx, x).at(0); }

GramDiagnostics gram_diagnostics(const IndexSet& A, const FiberPartition& part, const ShiftSet& Y) {
  GramDiagnostics diag;
  std::vector<FrequencyView> freqs;
  for (const auto& fiber : part.fibers) {
    FiberGram fg;
    fg.v = fiber.size();
    if (fg.v == 1) {
      fg.lambda_min = fg.lambda_max = static_cast<double>(Y.S);
    } else {
      freqs.clear();
      for (auto idx : fiber) freqs.push_back(A[idx]);
      const MatrixXcd G = gram(system_matrix(freqs, Y));
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(G, Eigen::EigenvaluesOnly);
      fg.lambda_min = es.eigenvalues().minCoeff();
      fg.lambda_max = es.eigenvalues().maxCoeff();
    }
    fg.kappa = fg.lambda_min > 0 ? fg.lambda_max / fg.lambda_min : std::numeric_limits<double>::infinity();
    diag.max_kappa = std::max(diag.max_kappa, fg.kappa);
    diag.fibers.push_back(fg);
  }
  return diag;
}

double aliasing_amplification(std::span<const FrequencyView> fiber, const ShiftSet& Y, FrequencyView k) {
  const MatrixXcd B = system_matrix(fiber, Y);
  const FrequencyView one[] = {k};
  const MatrixXcd a = system_matrix(one, Y);
  const VectorXcd e = gram(B).llt().solve(B.adjoint() * a.col(0));
  return e.squaredNorm();
}

}  // namespace mslat
