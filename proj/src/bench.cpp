#include "mslat/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mslat/primes.hpp"

namespace mslat {

namespace {

std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": " + v);
  }
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + ": " + v);
  }
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

template <class Row, class Fn>
std::vector<Row> run_cells(const ExperimentConfig& cfg, Fn&& cell) {
  struct Job {
    int d;
    std::int64_t N;
  };
  std::vector<Job> jobs;
  for (int d : cfg.dims)
    for (auto N : cfg.N) jobs.push_back({d, N});
  std::vector<std::vector<Row>> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        results[i] = cell(jobs[i].d, jobs[i].N);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned nthreads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < nthreads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<Row> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

std::vector<double> random_deltas(const ExperimentConfig& cfg, int d) {
  if (cfg.delta == DeltaMode::zero) return std::vector<double>(static_cast<std::size_t>(d), 0.0);
  std::mt19937_64 rng(cfg.delta_seed);
  std::vector<double> out(static_cast<std::size_t>(cfg.delta_draws) * d);
  for (auto& x : out) x = uniform01(rng);
  return out;
}

ShiftSet shifts_or_throw(const Pipeline& P, const ExperimentConfig& cfg) {
  auto Y = make_shifts(P, cfg.strategy, cfg.t, cfg.seed);
  if (!Y) throw std::runtime_error("no " + to_string(cfg.strategy) + " shift set below the CRT budget");
  return std::move(*Y);
}

}  // namespace

Pipeline build_pipeline(const SpaceParams& params, std::int64_t N, MSelection mode, CbcMethod cbc) {
  params.validate();
  Pipeline P;
  P.params = params;
  P.N = N;
  P.M = select_M(params, N, mode);
  P.lattice = cbc_construct(params, N, cbc);
  P.A = build_index_set(params, P.M);
  P.part = partition_fibers(P.A, P.lattice);
  P.H = difference_set(P.A, P.part);
  return P;
}

StrategySelector parse_strategy(const std::string& name) {
  if (name == "adaptive") return StrategySelector::adaptive;
  if (name == "polynomial") return StrategySelector::polynomial;
  if (name == "single_lattice") return StrategySelector::single_lattice;
  if (name == "multi_lattice") return StrategySelector::multi_lattice;
  if (name == "crt_bound") return StrategySelector::crt_bound;
  if (name == "probabilistic") return StrategySelector::probabilistic;
  throw std::invalid_argument("unknown strategy: " + name);
}

std::string to_string(StrategySelector s) {
  switch (s) {
    case StrategySelector::adaptive: return "adaptive";
    case StrategySelector::polynomial: return "polynomial";
    case StrategySelector::single_lattice: return "single_lattice";
    case StrategySelector::multi_lattice: return "multi_lattice";
    case StrategySelector::crt_bound: return "crt_bound";
    case StrategySelector::probabilistic: return "probabilistic";
  }
  return "?";
}

std::optional<ShiftSet> make_shifts(const Pipeline& P, StrategySelector s, double t, std::uint64_t seed) {
  const int d = P.params.d;
  const std::int64_t R = P.R();
  if (s == StrategySelector::probabilistic)
    return probabilistic_shifts(R, P.N, success_K(P.N), t, seed, d);
  if (R <= 1 || P.H.empty()) return trivial_shifts(d);
  if (s == StrategySelector::adaptive) return adaptive_shifts(P.H, R, t, P.N, P.M, P.params);

  const ProjectionVector z = construct_z(P.H);
  const auto X = projections(P.H, z);
  unsigned __int128 V = 2;
  for (auto x : X) V = std::max(V, x);
  const CrtSequence crt = crt_sequence(R, V, t);
  const std::int64_t cap = crt.total() + 1;

  switch (s) {
    case StrategySelector::polynomial:
      return search_polynomial(P.H, R, t, d, cap);
    case StrategySelector::single_lattice:
      return search_single_lattice(P.H, z, R, capacity_lower_bound(P.params, P.M, P.N), cap);
    case StrategySelector::multi_lattice: {
      auto g = greedy_multi_lattice(P.H, z, R, t, cap);
      if (!g) return std::nullopt;
      ShiftSet Y = lattice_shifts(g->primes, z, ShiftStrategy::multi_lattice);
      Y.achieved_ratio = exp_sum_ratio(Y, P.H);
      return Y;
    }
    case StrategySelector::crt_bound: {
      ShiftSet Y = lattice_shifts(crt.primes, z, ShiftStrategy::crt_bound);
      Y.achieved_ratio = exp_sum_ratio(Y, P.H);
      return Y;
    }
    default:
      return std::nullopt;
  }
}

SpaceParams ExperimentConfig::params(int d) const {
  const auto colon = gamma_rule.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("config: gamma rule needs kind:value");
  const std::string kind = gamma_rule.substr(0, colon), arg = gamma_rule.substr(colon + 1);
  if (kind == "pow2") return SpaceParams::with_power_weights(d, alpha, to_double("gamma", arg));
  if (kind == "const") return SpaceParams(d, alpha, std::vector<double>(static_cast<std::size_t>(d), to_double("gamma", arg)));
  if (kind == "list") {
    std::vector<double> g;
    for (const auto& v : split(arg, ',')) g.push_back(to_double("gamma", v));
    if (g.size() < static_cast<std::size_t>(d)) throw std::invalid_argument("config: gamma list shorter than d");
    g.resize(static_cast<std::size_t>(d));
    return SpaceParams(d, alpha, g);
  }
  throw std::invalid_argument("config: unknown gamma rule " + kind);
}

void ExperimentConfig::validate() const {
  if (dims.empty() || N.empty()) throw std::invalid_argument("config: empty d or N list");
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("config: t must lie in (0, 1)");
  if (budget < 1) throw std::invalid_argument("config: budget must be >= 1");
  if (delta_draws < 1) throw std::invalid_argument("config: delta draws must be >= 1");
  for (auto n : N)
    if (!is_prime(static_cast<std::uint64_t>(n))) throw std::invalid_argument("config: N not prime");
  for (int d : dims) params(d).validate();
}

std::vector<std::int64_t> nearest_primes_pow2(int lo, int hi) {
  std::vector<std::int64_t> out;
  for (int e = lo; e <= hi; ++e)
    out.push_back(static_cast<std::int64_t>(nearest_prime(std::uint64_t{1} << e)));
  return out;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": missing '='");
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key == "d") {
      cfg.dims.clear();
      for (const auto& v : split(val, ',')) cfg.dims.push_back(static_cast<int>(to_int(key, v)));
    } else if (key == "alpha") {
      cfg.alpha = to_double(key, val);
    } else if (key == "gamma") {
      cfg.gamma_rule = val;
    } else if (key == "t") {
      cfg.t = to_double(key, val);
    } else if (key == "N") {
      cfg.N.clear();
      cfg.N_given = true;
      if (val.rfind("pow2:", 0) == 0) {
        const auto range = split(val.substr(5), '-');
        if (range.size() != 2) throw std::invalid_argument("config: N = pow2:<lo>-<hi>");
        cfg.N = nearest_primes_pow2(static_cast<int>(to_int(key, range[0])), static_cast<int>(to_int(key, range[1])));
      } else {
        for (const auto& v : split(val, ',')) {
          const auto n = to_int(key, v);
          if (n < 2) throw std::invalid_argument("config: N must be >= 2");
          cfg.N.push_back(static_cast<std::int64_t>(nearest_prime(static_cast<std::uint64_t>(n))));
        }
      }
    } else if (key == "M") {
      if (val == "bisection") cfg.m_mode = MSelection::bisection;
      else if (val == "theoretical") cfg.m_mode = MSelection::theoretical;
      else throw std::invalid_argument("config: M must be bisection or theoretical");
    } else if (key == "cbc") {
      if (val == "automatic") cfg.cbc = CbcMethod::automatic;
      else if (val == "naive") cfg.cbc = CbcMethod::naive;
      else if (val == "fast") cfg.cbc = CbcMethod::fast;
      else throw std::invalid_argument("config: cbc must be automatic, naive or fast");
    } else if (key == "strategy") {
      cfg.strategy = parse_strategy(val);
    } else if (key == "delta") {
      const auto parts = split(val, ':');
      if (parts.empty()) throw std::invalid_argument("config: empty delta");
      if (parts[0] == "zero") {
        cfg.delta = DeltaMode::zero;
      } else if (parts[0] == "random") {
        cfg.delta = DeltaMode::random;
        if (parts.size() > 1) cfg.delta_draws = static_cast<int>(to_int(key, parts[1]));
        if (parts.size() > 2) cfg.delta_seed = static_cast<std::uint64_t>(to_int(key, parts[2]));
      } else {
        throw std::invalid_argument("config: delta must be zero or random[:count[:seed]]");
      }
    } else if (key == "budget") {
      cfg.budget = static_cast<std::size_t>(to_int(key, val));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(to_int(key, val));
    } else if (key == "out") {
      cfg.out = val;
    } else if (key == "threads") {
      cfg.threads = static_cast<unsigned>(std::max(1LL, to_int(key, val)));
    } else {
      throw std::invalid_argument("config: unknown key " + key);
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return parse_config(in);
}

ErrorEstimate estimate_errors(const SampleFn& truth, const BatchEval& approx, int d, std::size_t budget,
                              std::uint64_t seed, std::span<const double> extra_points, bool relative) {
  if (budget < 1) throw std::invalid_argument("estimate_errors: budget must be >= 1");
  const auto ud = static_cast<std::size_t>(d);
  std::mt19937_64 rng(seed);
  std::vector<double> pts(budget * ud);
  for (auto& x : pts) x = uniform01(rng);
  const std::size_t n_sample = budget;
  pts.insert(pts.end(), extra_points.begin(), extra_points.end());
  const std::size_t n_all = pts.size() / ud;

  const auto fa = approx(pts);
  ErrorEstimate e;
  double sq = 0, fsq = 0;
  for (std::size_t q = 0; q < n_all; ++q) {
    const cplx f = truth(std::span<const double>(pts.data() + q * ud, ud));
    const double err = std::abs(f - fa[q]);
    const double mag = std::abs(f);
    e.linf = std::max(e.linf, err);
    e.norm_linf = std::max(e.norm_linf, mag);
    if (q < n_sample) {
      sq += err * err;
      fsq += mag * mag;
    }
  }
  e.l2 = std::sqrt(sq / static_cast<double>(n_sample));
  e.norm_l2 = std::sqrt(fsq / static_cast<double>(n_sample));
  if (relative) {
    if (e.norm_l2 < 1e-300 || e.norm_linf < 1e-300)
      throw std::domain_error("estimate_errors: reference norm vanishes");
    e.rel_l2 = e.l2 / e.norm_l2;
    e.rel_linf = e.linf / e.norm_linf;
  }
  return e;
}

std::vector<double> lattice_nodes(const Lattice& lattice, const ShiftSet& Y, std::size_t limit) {
  const int d = lattice.dim();
  std::vector<double> out;
  const double invN = 1.0 / static_cast<double>(lattice.N);
  for (std::size_t s = 0; s < Y.S; ++s) {
    const auto y = Y.point(s);
    for (std::int64_t n = 0; n < lattice.N; ++n) {
      if (out.size() / static_cast<std::size_t>(d) >= limit) return out;
      for (int j = 0; j < d; ++j) {
        double v = static_cast<double>(lattice.residue(n, j)) * invN + y[j];
        out.push_back(v - std::floor(v));
      }
    }
  }
  return out;
}

double f1_periodic(std::span<const double> x) {
  double v = 1.0;
  for (double xj : x) v *= (xj - 0.5) * (xj - 0.5) * std::sin(2.0 * std::numbers::pi * xj - std::numbers::pi);
  return v;
}

namespace {
double pde_factor(double x, double g) { return 1.0 / 630.0 + g * (x * x * (1 - x) * (1 - x) - 1.0 / 630.0); }
}  // namespace

double pde_exact_u(std::span<const double> x, std::span<const double> gamma) {
  double v = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) v *= pde_factor(x[j], gamma[j]);
  return v;
}

double pde_source(std::span<const double> x, std::span<const double> gamma) {
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double term = gamma[j] * (12 * x[j] * x[j] - 12 * x[j] + 2);
    for (std::size_t i = 0; i < x.size(); ++i)
      if (i != j) term *= pde_factor(x[i], gamma[i]);
    sum += term;
  }
  return sum;
}

double pde_mean(std::span<const double> gamma) {
  double v = 1.0;
  for (double g : gamma) v *= (1.0 + 20.0 * g) / 630.0;
  return v;
}

std::vector<ShiftGrowthRow> shift_growth_cell(const ExperimentConfig& cfg, int d, std::int64_t N) {
  const Pipeline P = build_pipeline(cfg.params(d), N, cfg.m_mode, cfg.cbc);
  std::vector<ShiftGrowthRow> rows;
  for (auto s : {StrategySelector::adaptive, StrategySelector::polynomial, StrategySelector::single_lattice,
                 StrategySelector::multi_lattice, StrategySelector::crt_bound, StrategySelector::probabilistic}) {
    const auto Y = make_shifts(P, s, cfg.t, cfg.seed);
    rows.push_back({d, N, P.A.size(), P.R(), to_string(s), Y ? static_cast<std::int64_t>(Y->S) : -1});
  }
  return rows;
}

StabilityRow stability_cell(const ExperimentConfig& cfg, int d, std::int64_t N) {
  const Pipeline P = build_pipeline(cfg.params(d), N, cfg.m_mode, cfg.cbc);
  StabilityRow row;
  row.d = d;
  row.N = N;
  row.R = P.R();

  const ShiftSet Ya = *make_shifts(P, StrategySelector::adaptive, cfg.t, cfg.seed);
  row.S_adaptive = static_cast<std::int64_t>(Ya.S);
  row.adaptive_strategy = to_string(Ya.strategy);
  row.kappa_adaptive = gram_diagnostics(P.A, P.part, Ya).max_kappa;

  const ShiftSet Yp = probabilistic_shifts(row.R, N, success_K(N), cfg.t, cfg.seed, d);
  row.S_simplified = static_cast<std::int64_t>(Yp.S);
  row.kappa_simplified = gram_diagnostics(P.A, P.part, Yp).max_kappa;

  // Baseline: S_standard i.i.d. uniform shifts shared by every fiber.
  row.S_standard = standard_probabilistic_total(row.R, N);
  ShiftSet Ys;
  Ys.d = d;
  Ys.S = static_cast<std::size_t>(row.S_standard);
  Ys.strategy = ShiftStrategy::probabilistic;
  Ys.seed = cfg.seed + 1;
  std::mt19937_64 rng(Ys.seed);
  Ys.points.resize(Ys.S * static_cast<std::size_t>(d));
  for (auto& x : Ys.points) x = uniform01(rng);
  row.kappa_standard = gram_diagnostics(P.A, P.part, Ys).max_kappa;
  return row;
}

ConvergenceRow korobov_f1_cell(const ExperimentConfig& cfg, int d, std::int64_t N) {
  const auto t0 = std::chrono::steady_clock::now();
  const Pipeline P = build_pipeline(cfg.params(d), N, cfg.m_mode, cfg.cbc);
  const ShiftSet Y = shifts_or_throw(P, cfg);
  ConvergenceRow row;
  row.d = d;
  row.N = N;
  row.S = static_cast<std::int64_t>(Y.S);
  row.N_tot = N * row.S;
  row.strategy = to_string(Y.strategy);
  row.max_kappa = gram_diagnostics(P.A, P.part, Y).max_kappa;

  const SampleFn f = [](std::span<const double> x) { return cplx{f1_periodic(x), 0.0}; };
  const auto deltas = random_deltas(cfg, d);
  const std::size_t draws = deltas.size() / static_cast<std::size_t>(d);
  const auto nodes = lattice_nodes(P.lattice, Y, cfg.budget);
  double l2sq = 0, rel2sq = 0;
  for (std::size_t r = 0; r < draws; ++r) {
    const std::span<const double> delta(deltas.data() + r * d, static_cast<std::size_t>(d));
    const SpectralApprox F = approximate(f, P.lattice, P.A, P.part, Y, delta);
    const auto e = estimate_errors(
        f, [&F](std::span<const double> pts) { return evaluate_many(F, pts); }, d, cfg.budget, cfg.seed, nodes);
    l2sq += e.l2 * e.l2;
    rel2sq += e.rel_l2 * e.rel_l2;
    row.linf = std::max(row.linf, e.linf);
    row.rel_linf = std::max(row.rel_linf, e.rel_linf);
  }
  row.l2 = std::sqrt(l2sq / static_cast<double>(draws));
  row.rel_l2 = std::sqrt(rel2sq / static_cast<double>(draws));
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

ConvergenceRow pde_cell(const ExperimentConfig& cfg, int d, std::int64_t N) {
  const auto t0 = std::chrono::steady_clock::now();
  const SpaceParams params = cfg.params(d);
  const Pipeline P = build_pipeline(params, N, cfg.m_mode, cfg.cbc);
  const ShiftSet Y = shifts_or_throw(P, cfg);
  ConvergenceRow row;
  row.d = d;
  row.N = N;
  row.S = static_cast<std::int64_t>(Y.S);
  row.N_tot = N * row.S;
  row.strategy = to_string(Y.strategy);
  row.max_kappa = gram_diagnostics(P.A, P.part, Y).max_kappa;

  const std::vector<double> gamma = params.gamma;
  const RealFn f = [&gamma](std::span<const double> x) { return pde_source(x, gamma); };
  const SampleFn fc = [&gamma](std::span<const double> x) { return cplx{pde_source(x, gamma), 0.0}; };
  const SampleFn uc = [&gamma](std::span<const double> x) { return cplx{pde_exact_u(x, gamma), 0.0}; };
  const auto as_cplx = [](std::vector<double> v) { return std::vector<cplx>(v.begin(), v.end()); };

  const auto deltas = random_deltas(cfg, d);
  const std::size_t draws = deltas.size() / static_cast<std::size_t>(d);
  double f2 = 0, u2 = 0, fabs2 = 0;
  for (std::size_t r = 0; r < draws; ++r) {
    const std::span<const double> delta(deltas.data() + r * d, static_cast<std::size_t>(d));
    const auto res = approximate_nonperiodic(f, P.lattice, P.A, P.part, Y, delta);
    const PoissonSolution u = poisson_from_source(res.cosine, pde_mean(gamma));
    const auto ef = estimate_errors(
        fc, [&](std::span<const double> pts) { return as_cplx(evaluate_cosine_many(res.cosine, pts)); }, d,
        cfg.budget, cfg.seed);
    const auto eu = estimate_errors(
        uc, [&](std::span<const double> pts) { return as_cplx(evaluate_poisson_many(u, pts)); }, d, cfg.budget,
        cfg.seed);
    f2 += ef.rel_l2 * ef.rel_l2;
    fabs2 += ef.l2 * ef.l2;
    u2 += eu.rel_l2 * eu.rel_l2;
    row.linf = std::max(row.linf, ef.linf);
    row.rel_linf = std::max(row.rel_linf, ef.rel_linf);
  }
  row.l2 = std::sqrt(fabs2 / static_cast<double>(draws));
  row.rel_l2 = std::sqrt(f2 / static_cast<double>(draws));
  row.u_rel_l2 = std::sqrt(u2 / static_cast<double>(draws));
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

Experiment parse_experiment(const std::string& name) {
  if (name == "shift_growth") return Experiment::shift_growth;
  if (name == "stability") return Experiment::stability;
  if (name == "korobov_f1") return Experiment::korobov_f1;
  if (name == "pde") return Experiment::pde;
  throw std::invalid_argument("unknown experiment: " + name);
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::shift_growth: return "shift_growth";
    case Experiment::stability: return "stability";
    case Experiment::korobov_f1: return "korobov_f1";
    case Experiment::pde: return "pde";
  }
  return "?";
}

namespace {

void write_gnuplot(const std::filesystem::path& dir, Experiment which) {
  const std::string name = to_string(which);
  std::ofstream gp(dir / (name + ".gp"));
  gp << "set datafile separator ','\nset key autotitle columnhead\nset logscale xy\n"
     << "set terminal pngcairo size 900,600\nset output '" << name << ".png'\n";
  switch (which) {
    case Experiment::shift_growth:
      gp << "set ylabel 'S'\nset xlabel 'N'\n"
            "plot for [s in 'adaptive polynomial single_lattice multi_lattice probabilistic'] '"
         << name << ".csv' using 2:(strcol(5) eq s ? $6 : 1/0) with linespoints title s\n";
      break;
    case Experiment::stability:
      gp << "set xlabel 'N'\nset ylabel 'S'\nplot '" << name << ".csv' using 2:4 w lp t 'adaptive', '' using 2:7 w lp t "
         << "'simplified', '' using 2:9 w lp t 'standard'\n";
      break;
    case Experiment::korobov_f1:
      gp << "set xlabel 'N'\nplot '" << name << ".csv' using 2:7 w lp t 'L2', '' using 2:8 w lp t 'Linf'\n";
      break;
    case Experiment::pde:
      gp << "set xlabel 'N'\nplot '" << name << ".csv' using 2:7 w lp t 'f rel L2', '' using 2:8 w lp t 'u rel L2'\n";
      break;
  }
}

}  // namespace

std::vector<std::string> run_experiment(const ExperimentConfig& cfg, Experiment which, bool emit_gnuplot) {
  cfg.validate();
  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);
  const auto path = dir / (to_string(which) + ".csv");
  std::ofstream csv(path);
  if (!csv) throw std::runtime_error("cannot write " + path.string());

  switch (which) {
    case Experiment::shift_growth: {
      ExperimentConfig grown = cfg;
      if (!cfg.N_given) grown.N = nearest_primes_pow2(10, 20);  // never samples f, so large N is cheap
      const auto rows =
          run_cells<ShiftGrowthRow>(grown, [&](int d, std::int64_t N) { return shift_growth_cell(grown, d, N); });
      csv << "d,N,A,R,strategy,S\n";
      for (const auto& r : rows) csv << r.d << ',' << r.N << ',' << r.A << ',' << r.R << ',' << r.strategy << ',' << r.S << '\n';
      break;
    }
    case Experiment::stability: {
      const auto rows = run_cells<StabilityRow>(
          cfg, [&](int d, std::int64_t N) { return std::vector<StabilityRow>{stability_cell(cfg, d, N)}; });
      csv << "d,N,R,S_adaptive,adaptive_strategy,kappa_adaptive,S_simplified,kappa_simplified,S_standard,kappa_standard\n";
      for (const auto& r : rows)
        csv << r.d << ',' << r.N << ',' << r.R << ',' << r.S_adaptive << ',' << r.adaptive_strategy << ','
            << fmt(r.kappa_adaptive) << ',' << r.S_simplified << ',' << fmt(r.kappa_simplified) << ',' << r.S_standard
            << ',' << fmt(r.kappa_standard) << '\n';
      break;
    }
    case Experiment::korobov_f1:
    case Experiment::pde: {
      const bool pde = which == Experiment::pde;
      const auto rows = run_cells<ConvergenceRow>(cfg, [&](int d, std::int64_t N) {
        return std::vector<ConvergenceRow>{pde ? pde_cell(cfg, d, N) : korobov_f1_cell(cfg, d, N)};
      });
      if (pde) csv << "d,N,strategy,S,N_tot,max_kappa,f_rel_l2,u_rel_l2,f_l2,seconds\n";
      else csv << "d,N,strategy,S,N_tot,max_kappa,l2,linf,rel_l2,rel_linf,seconds\n";
      for (const auto& r : rows) {
        csv << r.d << ',' << r.N << ',' << r.strategy << ',' << r.S << ',' << r.N_tot << ',' << fmt(r.max_kappa) << ',';
        if (pde) csv << fmt(r.rel_l2) << ',' << fmt(r.u_rel_l2) << ',' << fmt(r.l2);
        else csv << fmt(r.l2) << ',' << fmt(r.linf) << ',' << fmt(r.rel_l2) << ',' << fmt(r.rel_linf);
        csv << ',' << fmt(r.seconds) << '\n';
      }
      break;
    }
  }
  std::vector<std::string> written{path.string()};
  if (emit_gnuplot) {
    write_gnuplot(dir, which);
    written.push_back((dir / (to_string(which) + ".gp")).string());
  }
  return written;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace mslat
