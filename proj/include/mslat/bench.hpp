#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mslat/cosine_pde.hpp"

namespace mslat {

/// Lattice, index set, fibers and difference set for one (params, N) cell.
struct Pipeline {
  SpaceParams params;
  std::int64_t N = 0;
  double M = 0;
  Lattice lattice;
  IndexSet A;
  FiberPartition part;
  DifferenceSet H;

  std::int64_t R() const { return static_cast<std::int64_t>(part.R); }
};

Pipeline build_pipeline(const SpaceParams& params, std::int64_t N, MSelection mode,
                        CbcMethod cbc = CbcMethod::automatic);

enum class StrategySelector { adaptive, polynomial, single_lattice, multi_lattice, crt_bound, probabilistic };

StrategySelector parse_strategy(const std::string& name);
std::string to_string(StrategySelector s);

/// Shift set for the pipeline under one strategy; std::nullopt if the
/// standalone search gives up at the CRT budget.
std::optional<ShiftSet> make_shifts(const Pipeline& P, StrategySelector s, double t, std::uint64_t seed);

enum class DeltaMode { zero, random };

struct ExperimentConfig {
  std::vector<int> dims{2};
  double alpha = 1.0;
  std::string gamma_rule = "pow2:0.1";  // pow2:<decay> | const:<c> | list:<g1>,<g2>,...
  double t = 0.95;
  std::vector<std::int64_t> N{127, 257, 509, 1021, 2053, 4099};  // primes after nudging
  bool N_given = false;  // false: shift_growth runs primes near 2^10..2^20 instead of N
  MSelection m_mode = MSelection::bisection;
  CbcMethod cbc = CbcMethod::automatic;
  StrategySelector strategy = StrategySelector::adaptive;
  DeltaMode delta = DeltaMode::zero;
  int delta_draws = 10;
  std::uint64_t delta_seed = 7;
  std::size_t budget = 1u << 14;
  std::uint64_t seed = 1;
  std::string out = "results";
  unsigned threads = 1;

  SpaceParams params(int d) const;
  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

/// key = value lines, '#' starts a comment. N accepts a list or pow2:<lo>-<hi>;
/// every N is replaced by its nearest prime.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Nearest primes to 2^lo, ..., 2^hi.
std::vector<std::int64_t> nearest_primes_pow2(int lo, int hi);

struct ErrorEstimate {
  double l2 = 0, linf = 0;
  double rel_l2 = 0, rel_linf = 0;
  double norm_l2 = 0, norm_linf = 0;
};

using BatchEval = std::function<std::vector<cplx>(std::span<const double>)>;

/// Monte Carlo L2 over `budget` uniform points from mt19937_64(seed); L-infinity
/// over the same points plus `extra_points` (e.g. lattice nodes).
/// relative = false skips the norm check and leaves rel_* at 0.
ErrorEstimate estimate_errors(const SampleFn& truth, const BatchEval& approx, int d, std::size_t budget,
                              std::uint64_t seed, std::span<const double> extra_points = {},
                              bool relative = true);

/// Lattice nodes shifted by the shift points, clipped to at most `limit` rows.
std::vector<double> lattice_nodes(const Lattice& lattice, const ShiftSet& Y, std::size_t limit);

// Test functions
double f1_periodic(std::span<const double> x);
double pde_exact_u(std::span<const double> x, std::span<const double> gamma);
double pde_source(std::span<const double> x, std::span<const double> gamma);
double pde_mean(std::span<const double> gamma);

struct ShiftGrowthRow {
  int d = 0;
  std::int64_t N = 0;
  std::size_t A = 0;
  std::int64_t R = 0;
  std::string strategy;
  std::int64_t S = -1;  // -1: not found below the CRT budget
};

struct StabilityRow {
  int d = 0;
  std::int64_t N = 0;
  std::int64_t R = 0;
  std::int64_t S_adaptive = 0, S_simplified = 0, S_standard = 0;
  std::string adaptive_strategy;
  double kappa_adaptive = 1, kappa_simplified = 1, kappa_standard = 1;
};

struct ConvergenceRow {
  int d = 0;
  std::int64_t N = 0;
  std::int64_t S = 0;
  std::int64_t N_tot = 0;
  std::string strategy;
  double max_kappa = 1;
  double l2 = 0, linf = 0, rel_l2 = 0, rel_linf = 0;
  double u_rel_l2 = 0;  // pde only
  double seconds = 0;
};

std::vector<ShiftGrowthRow> shift_growth_cell(const ExperimentConfig& cfg, int d, std::int64_t N);
StabilityRow stability_cell(const ExperimentConfig& cfg, int d, std::int64_t N);
ConvergenceRow korobov_f1_cell(const ExperimentConfig& cfg, int d, std::int64_t N);
ConvergenceRow pde_cell(const ExperimentConfig& cfg, int d, std::int64_t N);

enum class Experiment { shift_growth, stability, korobov_f1, pde };
Experiment parse_experiment(const std::string& name);
std::string to_string(Experiment e);

/// Runs every (d, N) cell (in parallel when cfg.threads > 1) and writes
/// <out>/<experiment>.csv; returns the paths written.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg, Experiment which, bool emit_gnuplot = false);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace mslat
