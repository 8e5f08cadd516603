#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace mslat {

using cplx = std::complex<double>;

/// Unnormalised DFT of arbitrary length n:
///   X[k] = sum_m x[m] exp(sign * 2 pi i m k / n),  sign = -1 forward, +1 backward.
/// Thin wrapper over a pair of in-place FFTW plans (prime lengths included).
/// Copies share the plans; forward/backward may run concurrently.
class Dft {
 public:
  explicit Dft(std::size_t n);

  std::size_t size() const { return n_; }
  void forward(std::span<cplx> data) const { transform(data, true); }
  void backward(std::span<cplx> data) const { transform(data, false); }

 private:
  struct Plans;
  void transform(std::span<cplx> data, bool forward) const;

  std::size_t n_;
  std::shared_ptr<const Plans> plans_;
};

/// O(n^2) reference DFT with exact integer phase reduction.
std::vector<cplx> direct_dft(std::span<const cplx> x, int sign);

/// Cyclic convolution of two equal-length real sequences.
std::vector<double> cyclic_convolution(std::span<const double> a, std::span<const double> b);

}  // namespace mslat
