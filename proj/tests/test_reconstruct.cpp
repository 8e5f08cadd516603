#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>
#include <random>

#include "mslat/bench.hpp"
#include "mslat/dft.hpp"
#include "mslat/reconstruct.hpp"

using namespace mslat;

namespace {

cplx expi(double turns) { return std::polar(1.0, 2 * std::numbers::pi * turns); }

// Direct synthesis of sum_k c_k e^{2 pi i k.x}
cplx synth(const IndexSet& A, const std::vector<cplx>& c, std::span<const double> x) {
  cplx acc{};
  for (std::size_t i = 0; i < A.size(); ++i) {
    double ph = 0;
    for (int j = 0; j < A.dim(); ++j) ph += A[i][j] * x[j];
    acc += c[i] * expi(ph);
  }
  return acc;
}

std::vector<cplx> random_coeffs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> c(n);
  for (auto& v : c) v = {nd(rng), nd(rng)};
  return c;
}

Pipeline small(int d, std::int64_t N, double alpha = 1.0) {
  return build_pipeline(SpaceParams::with_power_weights(d, alpha, 0.1), N, MSelection::bisection);
}

}  // namespace

TEST_CASE("observables of a single character") {
  const Pipeline P = small(2, 13);
  const ShiftSet Y = *make_shifts(P, StrategySelector::adaptive, 0.95, 1);
  const double delta[] = {0.3, 0.71};
  for (std::size_t i = 0; i < P.A.size(); i += 3) {
    const auto l = P.A[i];
    const SampleFn f = [l](std::span<const double> x) { return expi(l[0] * x[0] + l[1] * x[1]); };
    const auto r = lattice_residue(P.lattice, l);
    for (auto path : {DftPath::fft, DftPath::direct}) {
      const Observables obs = observables(f, P.lattice, P.part, Y, delta, path);
      for (std::size_t s = 0; s < Y.S; ++s)
        for (std::size_t j = 0; j < P.part.J(); ++j) {
          const auto y = Y.point(s);
          const cplx expect = P.part.residues[j] == r ? expi(l[0] * (y[0] + delta[0]) + l[1] * (y[1] + delta[1])) : 0.0;
          CHECK(std::abs(obs(s, j) - expect) < 1e-12);
        }
    }
  }
}

TEST_CASE("observables of a constant") {
  const Pipeline P = small(2, 13);
  const ShiftSet Y = trivial_shifts(2);
  const SampleFn f = [](std::span<const double>) { return cplx{2.5, -1.0}; };
  const Observables obs = observables(f, P.lattice, P.part, Y, {});
  for (std::size_t j = 0; j < P.part.J(); ++j)
    CHECK(std::abs(obs(0, j) - (P.part.residues[j] == 0 ? cplx{2.5, -1.0} : cplx{})) < 1e-12);
}

TEST_CASE("DFT and direct observables agree") {
  for (std::int64_t N : {13, 257}) {
    const Pipeline P = small(2, N);
    const ShiftSet Y = *make_shifts(P, StrategySelector::adaptive, 0.95, 1);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    // a random, non-band-limited sample function: hashed point values
    std::vector<double> w(8);
    for (auto& v : w) v = nd(rng);
    const SampleFn f = [&w](std::span<const double> x) {
      return cplx{std::exp(w[0] * std::sin(7 * x[0]) + w[1] * x[1]), w[2] * std::cos(13 * x[0] * x[1])};
    };
    const auto a = observables(f, P.lattice, P.part, Y, {}, DftPath::fft);
    const auto b = observables(f, P.lattice, P.part, Y, {}, DftPath::direct);
    double err = 0;
    for (std::size_t i = 0; i < a.b.size(); ++i) err = std::max(err, std::abs(a.b[i] - b.b[i]));
    CHECK(err < 1e-12);
  }
}

TEST_CASE("solve_fiber scalar case") {
  const ShiftSet Y = polynomial_shifts(7, 2);
  const std::int32_t l[] = {2, -1};
  const FrequencyView fiber[] = {l};
  const double delta[] = {0.2, 0.45};
  std::vector<cplx> b(Y.S);
  std::mt19937 rng(1);
  std::normal_distribution<double> nd;
  for (auto& v : b) v = {nd(rng), nd(rng)};
  const auto x = solve_fiber(fiber, Y, delta, b);
  cplx expect{};
  for (std::size_t s = 0; s < Y.S; ++s) expect += expi(-(l[0] * Y.point(s)[0] + l[1] * Y.point(s)[1])) * b[s];
  expect *= expi(-(l[0] * delta[0] + l[1] * delta[1])) / static_cast<double>(Y.S);
  CHECK(std::abs(x[0] - expect) < 1e-13);
}

TEST_CASE("solve_fiber forward-model recovery") {
  const ShiftSet Y = polynomial_shifts(11, 3);
  const std::int32_t a[] = {0, 0, 0}, b[] = {3, -1, 2}, c[] = {-5, 4, 1};
  const FrequencyView fiber[] = {a, b, c};
  const double delta[] = {0.1, 0.7, 0.33};
  const auto x = random_coeffs(3, 4);
  std::vector<cplx> obs(Y.S);
  for (std::size_t s = 0; s < Y.S; ++s)
    for (std::size_t m = 0; m < 3; ++m) {
      double ph = 0;
      for (int j = 0; j < 3; ++j) ph += fiber[m][j] * (Y.point(s)[j] + delta[j]);
      obs[s] += expi(ph) * x[m];
    }
  const auto got = solve_fiber(fiber, Y, delta, obs);
  for (std::size_t m = 0; m < 3; ++m) CHECK(std::abs(got[m] - x[m]) < 1e-11);
  // zero delta is plain least squares
  const auto plain = solve_fiber(fiber, Y, {}, obs);
  CHECK(plain.size() == 3);
  const auto short_b = std::vector<cplx>(Y.S - 1);
  CHECK_THROWS_AS(solve_fiber(fiber, Y, delta, short_b), std::invalid_argument);
  const ShiftSet one = trivial_shifts(3);
  CHECK_THROWS_AS(solve_fiber(fiber, one, delta, std::vector<cplx>(1)), std::invalid_argument);
}

TEST_CASE("exact recovery of polynomials supported on A") {
  for (auto [d, N] : {std::pair{2, 257}, std::pair{3, 509}, std::pair{5, 1031}}) {
    const Pipeline P = small(d, N);
    const ShiftSet Y = *make_shifts(P, StrategySelector::adaptive, 0.95, 1);
    const auto c = random_coeffs(P.A.size(), 17);
    const SampleFn f = [&](std::span<const double> x) { return synth(P.A, c, x); };
    const double d0[] = {0.0, 0.0, 0.0, 0.0, 0.0};
    const auto F = approximate(f, P.lattice, P.A, P.part, Y, std::span<const double>(d0, d));
    double err = 0;
    for (std::size_t i = 0; i < c.size(); ++i) err = std::max(err, std::abs(F.coeffs[i] - c[i]));
    CHECK(err < 1e-10);
    // shift invariance on in-set polynomials
    std::vector<double> delta(d, 0.377);
    const auto G = approximate(f, P.lattice, P.A, P.part, Y, delta);
    double diff = 0;
    for (std::size_t i = 0; i < c.size(); ++i) diff = std::max(diff, std::abs(F.coeffs[i] - G.coeffs[i]));
    CHECK(diff < 1e-10);
    // evaluation against direct synthesis
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> x(d);
    for (int trial = 0; trial < 20; ++trial) {
      for (auto& v : x) v = u(rng);
      CHECK(std::abs(evaluate(F, x) - synth(P.A, F.coeffs, x)) < 1e-11 * (1 + std::abs(synth(P.A, F.coeffs, x))) * 10);
    }
  }
}

TEST_CASE("zero function and constant coefficient") {
  const Pipeline P = small(2, 127);
  const ShiftSet Y = *make_shifts(P, StrategySelector::adaptive, 0.95, 1);
  const auto F = approximate([](std::span<const double>) { return cplx{}; }, P.lattice, P.A, P.part, Y, {});
  for (auto c : F.coeffs) CHECK(c == cplx{});
  const double x[] = {0.3, 0.9};
  CHECK(evaluate(F, x) == cplx{});
  SpectralApprox one = F;
  const std::int32_t zero[] = {0, 0};
  one.coeffs[static_cast<std::size_t>(P.A.find(zero))] = 1.0;
  CHECK(std::abs(evaluate(one, x) - 1.0) < 1e-15);
  CHECK(one.coefficient(zero) == cplx{1.0});
  const std::int32_t far[] = {100000, 0};
  CHECK(one.coefficient(far) == cplx{});
}

TEST_CASE("real input gives Hermitian coefficients") {
  const Pipeline P = small(3, 1031);
  const ShiftSet Y = *make_shifts(P, StrategySelector::adaptive, 0.95, 1);
  const SampleFn f = [](std::span<const double> x) { return cplx{f1_periodic(x) + std::exp(std::sin(2 * std::numbers::pi * x[1])), 0}; };
  const auto F = approximate(f, P.lattice, P.A, P.part, Y, {});
  Frequency neg(3);
  double cmax = 0, err = 0;
  for (std::size_t i = 0; i < P.A.size(); ++i) {
    for (int j = 0; j < 3; ++j) neg[j] = -P.A[i][j];
    const auto k = static_cast<std::size_t>(P.A.find(neg));
    err = std::max(err, std::abs(F.coeffs[k] - std::conj(F.coeffs[i])));
    cmax = std::max(cmax, std::abs(F.coeffs[i]));
  }
  CHECK(err < 1e-10 * std::max(1.0, cmax));
}

TEST_CASE("f1 low-frequency coefficients against a 1-D oracle") {
  // 1-D coefficients of (x - 1/2)^2 sin(2 pi x - pi) by a 4096-point DFT (the
  // function is smooth and periodic, so the trapezoidal rule converges fast)
  const std::size_t n = 4096;
  std::vector<cplx> v(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double x = static_cast<double>(m) / n;
    v[m] = (x - 0.5) * (x - 0.5) * std::sin(2 * std::numbers::pi * x - std::numbers::pi);
  }
  Dft(n).forward(v);
  auto c1 = [&](int k) { return v[static_cast<std::size_t>((k % static_cast<int>(n) + n) % n)] / static_cast<double>(n); };

  const Pipeline P = small(2, 4099, 2.5);
  const ShiftSet Y = *make_shifts(P, StrategySelector::adaptive, 0.95, 1);
  const auto F = approximate([](std::span<const double> x) { return cplx{f1_periodic(x), 0}; }, P.lattice, P.A,
                             P.part, Y, {});
  for (int k1 = -3; k1 <= 3; ++k1)
    for (int k2 = -3; k2 <= 3; ++k2) {
      const std::int32_t k[] = {k1, k2};
      if (P.A.find(k) < 0) continue;
      CHECK(std::abs(F.coefficient(k) - c1(k1) * c1(k2)) < 1e-6);
    }
}

TEST_CASE("gram diagnostics") {
  const Pipeline P = small(4, 1031);
  for (auto s : {StrategySelector::adaptive, StrategySelector::polynomial, StrategySelector::single_lattice,
                 StrategySelector::multi_lattice}) {
    const auto Y = make_shifts(P, s, 0.95, 1);
    REQUIRE(Y);
    const auto diag = gram_diagnostics(P.A, P.part, *Y);
    const double S = static_cast<double>(Y->S);
    for (const auto& g : diag.fibers) {
      if (g.v == 1) {
        CHECK(g.lambda_min == S);
        CHECK(g.lambda_max == S);
      }
      CHECK(g.lambda_min >= 0.05 * S * (1 - 1e-8));
      CHECK(g.lambda_max <= 1.95 * S * (1 + 1e-8));
    }
    CHECK(diag.max_kappa <= 39.0);
    if (Y->strategy == ShiftStrategy::single_lattice) CHECK(std::abs(diag.max_kappa - 1) < 1e-10);
  }
}

TEST_CASE("aliasing amplification bound") {
  const Pipeline P = small(3, 509);
  const ShiftSet Y = *make_shifts(P, StrategySelector::adaptive, 0.95, 1);
  std::mt19937_64 rng(8);
  const double t = 0.95;
  std::vector<FrequencyView> fiber;
  for (std::size_t j = 0; j < P.part.J(); ++j) {
    if (P.part.fibers[j].size() < 2) continue;
    fiber.clear();
    for (auto i : P.part.fibers[j]) fiber.push_back(P.A[i]);
    const double bound = static_cast<double>(fiber.size()) / ((1 - t) * (1 - t));
    // out-of-set members of the same coset: k = l + m * (dual lattice vector)
    std::uniform_int_distribution<int> u(-40, 40);
    int found = 0;
    for (int attempt = 0; attempt < 5000 && found < 50; ++attempt) {
      // g_1 = 1, so k_1 is fixed by the other coordinates modulo N
      Frequency k(3);
      long long rest = 0;
      for (int jj = 1; jj < 3; ++jj) rest += static_cast<long long>(k[jj] = u(rng)) * P.lattice.g[jj];
      const long long k0 = ((P.part.residues[j] - rest) % P.N + P.N) % P.N;
      k[0] = static_cast<std::int32_t>(k0 + P.N * (u(rng) % 3) - (k0 > P.N / 2 ? P.N : 0));
      if (lattice_residue(P.lattice, k) != P.part.residues[j] || P.A.find(k) >= 0) continue;
      ++found;
      CHECK(aliasing_amplification(fiber, Y, k) <= bound);
    }
    CHECK(found > 0);
    break;
  }
}
