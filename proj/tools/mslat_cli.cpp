// Command-line front end: single-shot pipeline stages and the benchmark harness.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "mslat/bench.hpp"
#include "mslat/primes.hpp"

using namespace mslat;

namespace {

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  unsigned threads = 0;
  int d = 0;
  long long N = 0;
  double alpha = 0;
  std::string gamma, strategy, m_mode;
  double t = 0;
};

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
  if (c.seed_set) cfg.seed = c.seed;
  if (!c.out.empty()) cfg.out = c.out;
  if (c.threads) cfg.threads = c.threads;
  if (c.d) cfg.dims = {c.d};
  if (c.N) {
    cfg.N = {static_cast<std::int64_t>(nearest_prime(static_cast<std::uint64_t>(c.N)))};
    cfg.N_given = true;
  }
  if (c.alpha) cfg.alpha = c.alpha;
  if (!c.gamma.empty()) cfg.gamma_rule = c.gamma;
  if (!c.strategy.empty()) cfg.strategy = parse_strategy(c.strategy);
  if (c.m_mode == "theoretical") cfg.m_mode = MSelection::theoretical;
  else if (c.m_mode == "bisection") cfg.m_mode = MSelection::bisection;
  else if (!c.m_mode.empty()) throw std::invalid_argument("--M must be bisection or theoretical");
  if (c.t) cfg.t = c.t;
  cfg.validate();
  return cfg;
}

void add_problem_flags(CLI::App* app, Common& c) {
  app->add_option("--d", c.d, "dimension");
  app->add_option("--N", c.N, "lattice size (nudged to the nearest prime)");
  app->add_option("--alpha", c.alpha, "smoothness");
  app->add_option("--gamma", c.gamma, "weight rule: pow2:<decay> | const:<c> | list:<g1>,...");
  app->add_option("--t", c.t, "exponential-sum threshold in (0,1)");
  app->add_option("--M", c.m_mode, "bisection | theoretical");
  app->add_option("--strategy", c.strategy, "adaptive | polynomial | single_lattice | multi_lattice | crt_bound | probabilistic");
}

void print_shifts_summary(const Pipeline& P, const ShiftSet& Y) {
  std::printf("d=%d N=%lld M=%.10g |A|=%zu J=%zu R=%lld |H|=%zu\n", P.params.d, static_cast<long long>(P.N), P.M,
              P.A.size(), P.part.J(), static_cast<long long>(P.R()), P.H.size());
  std::printf("strategy=%s S=%zu N_tot=%lld", to_string(Y.strategy).c_str(), Y.S,
              static_cast<long long>(P.N) * static_cast<long long>(Y.S));
  if (!Y.primes.empty()) {
    std::printf(" primes=");
    for (std::size_t i = 0; i < Y.primes.size(); ++i) std::printf("%s%lld", i ? "," : "", static_cast<long long>(Y.primes[i]));
  }
  std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiple-shift rank-1 lattice approximation"};
  app.require_subcommand(1);
  Common c;
  app.add_option("--config", c.config, "key = value configuration file");
  app.add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { c.seed = s, c.seed_set = true; }, "RNG seed");
  app.add_option("--out", c.out, "output directory");
  app.add_option("--threads", c.threads, "worker threads for independent cells");

  auto* cbc = app.add_subcommand("cbc", "construct a generating vector");
  add_problem_flags(cbc, c);
  auto* shifts = app.add_subcommand("shifts", "build the index set, fibers and a shift set");
  add_problem_flags(shifts, c);
  auto* approx = app.add_subcommand("approx", "approximate the periodic test function f1");
  add_problem_flags(approx, c);
  auto* pde = app.add_subcommand("pde", "solve the Neumann Poisson benchmark");
  add_problem_flags(pde, c);
  auto* bench = app.add_subcommand("bench", "run an experiment and write CSV");
  std::string which;
  bool gnuplot = false;
  bench->add_option("which", which, "shift_growth | stability | korobov_f1 | pde")->required();
  bench->add_flag("--emit-gnuplot", gnuplot, "also write gnuplot scripts");

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig cfg = resolve(c);
    const int d = cfg.dims.front();
    const std::int64_t N = cfg.N.front();
    if (*cbc) {
      const Lattice lat = cbc_construct(cfg.params(d), N, cfg.cbc);
      std::printf("N=%lld g=", static_cast<long long>(lat.N));
      for (int j = 0; j < d; ++j) std::printf("%s%lld", j ? "," : "", static_cast<long long>(lat.g[j]));
      std::printf("\n");
    } else if (*shifts) {
      const Pipeline P = build_pipeline(cfg.params(d), N, cfg.m_mode, cfg.cbc);
      const auto Y = make_shifts(P, cfg.strategy, cfg.t, cfg.seed);
      if (!Y) {
        std::fprintf(stderr, "no %s shift set below the CRT budget\n", to_string(cfg.strategy).c_str());
        return 2;
      }
      print_shifts_summary(P, *Y);
    } else if (*approx) {
      const auto r = korobov_f1_cell(cfg, d, N);
      std::printf("d=%d N=%lld strategy=%s S=%lld N_tot=%lld max_kappa=%.6g L2=%.6e Linf=%.6e relL2=%.6e (%.2fs)\n",
                  r.d, static_cast<long long>(r.N), r.strategy.c_str(), static_cast<long long>(r.S),
                  static_cast<long long>(r.N_tot), r.max_kappa, r.l2, r.linf, r.rel_l2, r.seconds);
    } else if (*pde) {
      const auto r = pde_cell(cfg, d, N);
      std::printf("d=%d N=%lld strategy=%s S=%lld N_tot=%lld f_relL2=%.6e u_relL2=%.6e (%.2fs)\n", r.d,
                  static_cast<long long>(r.N), r.strategy.c_str(), static_cast<long long>(r.S),
                  static_cast<long long>(r.N_tot), r.rel_l2, r.u_rel_l2, r.seconds);
    } else if (*bench) {
      for (const auto& path : run_experiment(cfg, parse_experiment(which), gnuplot)) std::printf("wrote %s\n", path.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
