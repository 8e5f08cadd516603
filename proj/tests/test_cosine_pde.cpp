#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <map>
#include <numbers>
#include <random>

#include "mslat/bench.hpp"
#include "mslat/cosine_pde.hpp"

using namespace mslat;

namespace {

constexpr double kPi = std::numbers::pi;

double phi(std::span<const std::int32_t> k, std::span<const double> x) {
  double v = 1;
  for (std::size_t j = 0; j < k.size(); ++j)
    if (k[j] != 0) v *= std::numbers::sqrt2 * std::cos(kPi * k[j] * x[j]);
  return v;
}

Pipeline small(int d, std::int64_t N, double alpha = 1.0) {
  return build_pipeline(SpaceParams::with_power_weights(d, alpha, 0.1), N, MSelection::bisection);
}

ShiftSet adaptive(const Pipeline& P) { return *make_shifts(P, StrategySelector::adaptive, 0.95, 1); }

}  // namespace

TEST_CASE("tent examples") {
  const double z[] = {0.0, 1.0, 0.5, 0.25, 0.8};
  const auto x = tent(z);
  CHECK(x[0] == 0.0);
  CHECK(x[1] == 0.0);
  CHECK(x[2] == 1.0);
  CHECK(x[3] == 0.5);
  CHECK(x[4] == doctest::Approx(0.4));
  const double bad[] = {1.2};
  CHECK_THROWS_AS(tent(bad), std::domain_error);
  const double neg[] = {-0.1};
  CHECK_THROWS_AS(tent(neg), std::domain_error);
}

TEST_CASE("fourier_to_cosine examples") {
  // d = 1, A = {-2..2}
  const SpaceParams p(1, 1.0, {1.0});
  const IndexSet A = build_index_set(p, 2.5);
  REQUIRE(A.size() == 5);
  SpectralApprox F{A, std::vector<cplx>(5), Lattice{5, {1}}, 1, ShiftStrategy::trivial, {0.0}};
  const double a = 0.37;
  F.coeffs[0] = F.coeffs[4] = a;  // k = -2, 2
  F.coeffs[2] = 0.9;              // k = 0
  const auto C = fourier_to_cosine(F);
  REQUIRE(C.size() == 3);
  const std::int32_t k0[] = {0}, k2[] = {2}, k1[] = {1};
  CHECK(C.coefficient(k0) == doctest::Approx(0.9));
  CHECK(C.coefficient(k2) == doctest::Approx(std::sqrt(2.0) * a));
  CHECK(C.coefficient(k1) == 0.0);
  // complex coefficients that do not cancel
  F.coeffs[0] = cplx{a, 0.5};
  CHECK_THROWS_AS(fourier_to_cosine(F), std::runtime_error);
}

TEST_CASE("fourier_to_cosine rejects asymmetric support") {
  const SpaceParams p(1, 1.0, {1.0});
  const IndexSet A(p, 3.0, {-1, 0, 1, 2});
  SpectralApprox F{A, std::vector<cplx>(4), Lattice{5, {1}}, 1, ShiftStrategy::trivial, {0.0}};
  CHECK_THROWS_AS(fourier_to_cosine(F), std::invalid_argument);
}

TEST_CASE("fourier_to_cosine matches brute-force sign-pattern sums") {
  const auto p = SpaceParams::with_power_weights(3, 1.0, 0.2);
  const IndexSet A = build_index_set(p, 12.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  std::vector<cplx> c(A.size());
  Frequency neg(3);
  for (std::size_t i = 0; i < A.size(); ++i) {
    for (int j = 0; j < 3; ++j) neg[j] = -A[i][j];
    const auto k = static_cast<std::size_t>(A.find(neg));
    if (k < i) c[i] = std::conj(c[k]);
    else if (k == i) c[i] = nd(rng);
    else c[i] = {nd(rng), nd(rng)};
  }
  SpectralApprox F{A, c, Lattice{}, 1, ShiftStrategy::trivial, {}};
  const auto C = fourier_to_cosine(F);
  std::map<Frequency, cplx> ref;
  for (std::size_t i = 0; i < A.size(); ++i) {
    Frequency k(3);
    for (int j = 0; j < 3; ++j) k[j] = std::abs(A[i][j]);
    ref[k] += c[i];
  }
  REQUIRE(C.size() == ref.size());
  for (const auto& [k, v] : ref) {
    int nz = 0;
    for (auto x : k) nz += x != 0;
    CHECK(std::abs(v.imag()) < 1e-12);
    CHECK(C.coefficient(k) == doctest::Approx(v.real() * std::pow(2.0, -nz / 2.0)).epsilon(1e-13));
  }
}

TEST_CASE("evaluate_cosine examples") {
  CosineApprox C;
  C.d = 1;
  C.freqs = {0};
  C.coeffs = {1.0};
  const double x[] = {0.3};
  CHECK(evaluate_cosine(C, x) == 1.0);
  C.freqs = {1};
  CHECK(evaluate_cosine(C, x) == doctest::Approx(std::sqrt(2.0) * std::cos(kPi * 0.3)));

  CosineApprox D;
  D.d = 2;
  D.freqs = {0, 0, 1, 0, 0, 3, 2, 5};
  D.coeffs = {0.5, -1.25, 0.75, 2.0};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const double y[] = {u(rng), u(rng)};
    double ref = 0;
    for (std::size_t i = 0; i < D.size(); ++i) ref += D.coeffs[i] * phi(D.freq(i), y);
    CHECK(std::abs(evaluate_cosine(D, y) - ref) < 1e-11);
  }
}

TEST_CASE("approximate_nonperiodic recovers single cosine modes") {
  const Pipeline P = small(2, 257);
  const ShiftSet Y = adaptive(P);
  for (std::size_t i = 0; i < P.A.size(); i += 7) {
    const auto k = P.A[i];
    if (k[0] < 0 || k[1] < 0) continue;
    const Frequency kk(k.begin(), k.end());
    const RealFn f = [kk](std::span<const double> x) { return phi(kk, x); };
    const auto res = approximate_nonperiodic(f, P.lattice, P.A, P.part, Y, {});
    for (std::size_t m = 0; m < res.cosine.size(); ++m) {
      const bool same = std::ranges::equal(res.cosine.freq(m), k);
      CHECK(std::abs(res.cosine.coeffs[m] - (same ? 1.0 : 0.0)) <= 1e-10);
    }
  }
  const auto one = approximate_nonperiodic([](std::span<const double>) { return 1.0; }, P.lattice, P.A, P.part, Y, {});
  const std::int32_t zero[] = {0, 0};
  for (std::size_t m = 0; m < one.cosine.size(); ++m)
    CHECK(std::abs(one.cosine.coeffs[m] - (std::ranges::equal(one.cosine.freq(m), zero) ? 1.0 : 0.0)) < 1e-12);
  CHECK(one.cosine.coefficient(zero) == doctest::Approx(one.periodic.coefficient(zero).real()));
}

TEST_CASE("projection equivalence") {
  for (int d : {2, 3}) {
    const Pipeline P = small(d, 509, 1.5);
    const ShiftSet Y = adaptive(P);
    const std::vector<double> gamma = P.params.gamma;
    const RealFn f = [&gamma](std::span<const double> x) { return pde_source(x, gamma) + std::exp(x[0] * x[1]); };
    const auto res = approximate_nonperiodic(f, P.lattice, P.A, P.part, Y, {});
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> z(d);
    for (int trial = 0; trial < 200; ++trial) {
      for (auto& v : z) v = u(rng);
      const double lhs = evaluate_cosine(res.cosine, tent(z));
      const cplx rhs = sign_average(res.periodic, z);
      CHECK(std::abs(lhs - rhs) <= 1e-11);
    }
  }
}

TEST_CASE("isometry for a tensor polynomial with known cosine expansion") {
  const Pipeline P = small(2, 1031);
  const ShiftSet Y = adaptive(P);
  const std::int32_t k1[] = {1, 0}, k2[] = {2, 3}, k3[] = {0, 2};
  const RealFn f = [&](std::span<const double> x) { return 0.5 + phi(k1, x) - 0.25 * phi(k2, x) + 2.0 * phi(k3, x); };
  const auto res = approximate_nonperiodic(f, P.lattice, P.A, P.part, Y, {});
  double cos_norm = 0, four_norm = 0;
  for (auto c : res.cosine.coeffs) cos_norm += c * c;
  for (auto c : res.periodic.coeffs) four_norm += std::norm(c);
  CHECK(cos_norm == doctest::Approx(0.25 + 1 + 0.0625 + 4).epsilon(1e-10));
  CHECK(std::abs(cos_norm - four_norm) < 1e-10);
}

TEST_CASE("Poisson examples") {
  const Pipeline P = small(2, 257);
  const ShiftSet Y = adaptive(P);
  const std::int32_t k[] = {1, 0};
  const auto u = poisson_solve([&](std::span<const double> x) { return phi(k, x); }, 0.0, P.lattice, P.A, P.part, Y, {});
  for (double lambda : u.eigenvalues) CHECK(lambda >= kPi * kPi - 1e-12);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unif(0, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const double x[] = {unif(rng), unif(rng)};
    CHECK(std::abs(evaluate_poisson(u, x) + phi(k, x) / (kPi * kPi)) < 1e-11);
  }
  const auto c = poisson_solve([](std::span<const double>) { return 0.0; }, 3.25, P.lattice, P.A, P.part, Y, {});
  const double x[] = {0.4, 0.6};
  CHECK(evaluate_poisson(c, x) == doctest::Approx(3.25));
  const auto r = poisson_solve([](std::span<const double>) { return 0.7; }, 0.0, P.lattice, P.A, P.part, Y, {});
  CHECK(r.compatibility_residual == doctest::Approx(0.7));
}

TEST_CASE("PDE benchmark closed forms") {
  const std::vector<double> gamma{1.0, std::pow(2.0, -0.1), std::pow(2.0, -0.2)};
  // mean of u by 3-point Gauss-Legendre (exact for the degree-4 factors)
  const double nodes[] = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
  const double weights[] = {5.0 / 18, 8.0 / 18, 5.0 / 18};
  double integral = 1;
  for (double g : gamma) {
    double s = 0;
    for (int i = 0; i < 3; ++i) {
      const double x = nodes[i];
      s += weights[i] * (1.0 / 630 + g * (x * x * (1 - x) * (1 - x) - 1.0 / 630));
    }
    integral *= s;
  }
  CHECK(pde_mean(gamma) == doctest::Approx(integral).epsilon(1e-13));
  // f is the Laplacian of u (central differences)
  const double x[] = {0.21, 0.63, 0.9};
  const double h = 1e-4;
  double lap = 0;
  for (int j = 0; j < 3; ++j) {
    double xp[] = {x[0], x[1], x[2]}, xm[] = {x[0], x[1], x[2]};
    xp[j] += h;
    xm[j] -= h;
    lap += (pde_exact_u(xp, gamma) - 2 * pde_exact_u(x, gamma) + pde_exact_u(xm, gamma)) / (h * h);
  }
  CHECK(pde_source(x, gamma) == doctest::Approx(lap).epsilon(1e-6));
  // Neumann data: du/dx_j = 0 on the faces
  const double face[] = {0.0, 0.4, 1.0};
  double fp[] = {h, 0.4, 1.0};
  CHECK(std::abs(pde_exact_u(fp, gamma) - pde_exact_u(face, gamma)) < 1e-9);
}

TEST_CASE("PDE smoothing on a small grid") {
  const std::vector<std::int64_t> Ns{127, 257, 509};
  for (auto N : Ns) {
    const Pipeline P = small(2, N, 1.5);
    const ShiftSet Y = adaptive(P);
    const std::vector<double> gamma = P.params.gamma;
    const auto res = approximate_nonperiodic([&](std::span<const double> x) { return pde_source(x, gamma); }, P.lattice,
                                             P.A, P.part, Y, {});
    const auto u = poisson_from_source(res.cosine, pde_mean(gamma));
    const auto ef = estimate_errors([&](std::span<const double> x) { return cplx{pde_source(x, gamma)}; },
                                    [&](std::span<const double> pts) {
                                      const auto v = evaluate_cosine_many(res.cosine, pts);
                                      return std::vector<cplx>(v.begin(), v.end());
                                    },
                                    2, 4096, 1);
    const auto eu = estimate_errors([&](std::span<const double> x) { return cplx{pde_exact_u(x, gamma)}; },
                                    [&](std::span<const double> pts) {
                                      const auto v = evaluate_poisson_many(u, pts);
                                      return std::vector<cplx>(v.begin(), v.end());
                                    },
                                    2, 4096, 1);
    CHECK(eu.rel_l2 <= ef.rel_l2);
    CHECK(ef.rel_l2 < 0.1);
  }
}
