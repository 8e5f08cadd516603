#include "mslat/fibers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mslat {

FiberPartition partition_fibers(const IndexSet& A, const Lattice& lattice) {
  if (A.dim() != lattice.dim() && !A.empty())
    throw std::invalid_argument("partition_fibers: dimension mismatch");
  const std::size_t n = A.size();
  std::vector<std::int64_t> res(n);
  for (std::size_t i = 0; i < n; ++i) res[i] = lattice_residue(lattice, A[i]);

  // stable sort by residue keeps each fiber in lexicographic order
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return res[a] < res[b]; });

  FiberPartition part;
  for (std::size_t pos = 0; pos < n;) {
    const std::int64_t r = res[order[pos]];
    std::vector<std::size_t> members;
    while (pos < n && res[order[pos]] == r) members.push_back(order[pos++]);
    part.R = std::max(part.R, members.size());
    if (r == 0 && members.size() > 1) part.zero_fiber_trivial = false;
    part.residues.push_back(r);
    part.fibers.push_back(std::move(members));
  }
  return part;
}

DifferenceSet::DifferenceSet(int d, std::vector<std::int64_t> flat) : d_(d), flat_(std::move(flat)) {}

double difference_constant(double alpha) { return alpha <= 1.0 ? 1.0 : std::pow(2.0, alpha - 1.0); }

DifferenceSet difference_set(const IndexSet& A, const FiberPartition& part) {
  const int d = A.dim();
  const auto ud = static_cast<std::size_t>(d);
  const auto& p = A.params();
  const double bound = std::pow(2.0 * difference_constant(p.alpha) * A.threshold(), 1.0 / p.alpha);

  std::vector<std::vector<std::int64_t>> rows;
  std::vector<std::int64_t> h(ud);
  for (const auto& fiber : part.fibers) {
    for (std::size_t a = 0; a < fiber.size(); ++a) {
      for (std::size_t b = a + 1; b < fiber.size(); ++b) {
        const auto la = A[fiber[a]], lb = A[fiber[b]];
        for (std::size_t j = 0; j < ud; ++j) h[j] = static_cast<std::int64_t>(lb[j]) - la[j];
        // canonical sign: first nonzero entry positive
        auto first = std::find_if(h.begin(), h.end(), [](std::int64_t v) { return v != 0; });
        if (first == h.end()) continue;
        if (*first < 0)
          for (auto& v : h) v = -v;
        for (auto v : h)
          if (static_cast<double>(std::abs(v)) >= bound)
            throw std::logic_error("difference_set: component bound violated");
        rows.push_back(h);
      }
    }
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  std::vector<std::int64_t> flat;
  flat.reserve(rows.size() * ud);
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return DifferenceSet(d, std::move(flat));
}

double fiber_length_bound(const SpaceParams& params, double M) {
  const double root = std::pow(M, 1.0 / params.alpha);
  // 2^{m-1} < root <= 2^m
  double m = std::ceil(std::log2(root));
  if (std::exp2(m - 1) >= root) m -= 1;
  if (std::exp2(m) < root) m += 1;
  if (m < 1) m = 1;
  const double first = 2.0 * std::pow(1.0 + m / 2.0, params.d) / m;
  double second = 2.0 * root / m;
  for (double g : params.gamma) second *= 1.0 + std::pow(g, 1.0 / params.alpha) * m;
  return std::min(first, second);
}

}  // namespace mslat
