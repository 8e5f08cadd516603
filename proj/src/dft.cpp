#include "mslat/dft.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <mutex>
#include <stdexcept>

namespace mslat {

namespace {

// exp(sign * 2 pi i num / den) with num reduced exactly beforehand.
inline cplx unit_root(std::size_t num, std::size_t den, int sign) {
  const double a = 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(den);
  return {std::cos(a), sign * std::sin(a)};
}

}  // namespace

namespace {

// planner calls are not thread-safe in FFTW; execution with new-array calls is
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

struct Dft::Plans {
  fftw_plan fwd = nullptr, bwd = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

Dft::Dft(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("Dft: length must be positive");
  auto plans = std::make_shared<Plans>();
  std::vector<cplx> scratch(n);
  const int len = static_cast<int>(n);
  // FFTW_UNALIGNED: plans are executed on arbitrary caller buffers
  constexpr unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  {
    std::lock_guard lock(planner_mutex());
    plans->fwd = fftw_plan_dft_1d(len, as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_FORWARD, flags);
    plans->bwd = fftw_plan_dft_1d(len, as_fftw(scratch.data()), as_fftw(scratch.data()), FFTW_BACKWARD, flags);
  }
  if (!plans->fwd || !plans->bwd) throw std::runtime_error("Dft: FFTW planning failed");
  plans_ = std::move(plans);
}

void Dft::transform(std::span<cplx> data, bool forward) const {
  if (data.size() != n_) throw std::invalid_argument("Dft: length mismatch");
  fftw_execute_dft(forward ? plans_->fwd : plans_->bwd, as_fftw(data.data()), as_fftw(data.data()));
}

std::vector<cplx> direct_dft(std::span<const cplx> x, int sign) {
  const std::size_t n = x.size();
  std::vector<cplx> roots(n);
  for (std::size_t k = 0; k < n; ++k) roots[k] = unit_root(k, n, sign);
  std::vector<cplx> out(n, cplx{});
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc{};
    std::size_t idx = 0;
    for (std::size_t m = 0; m < n; ++m) {
      acc += x[m] * roots[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    out[k] = acc;
  }
  return out;
}

std::vector<double> cyclic_convolution(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cyclic_convolution: length mismatch");
  const std::size_t n = a.size();
  Dft plan(n);
  std::vector<cplx> fa(a.begin(), a.end()), fb(b.begin(), b.end());
  plan.forward(fa);
  plan.forward(fb);
  for (std::size_t k = 0; k < n; ++k) fa[k] *= fb[k];
  plan.backward(fa);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = fa[k].real() / static_cast<double>(n);
  return out;
}

}  // namespace mslat
