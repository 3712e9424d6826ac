#include "evfusion/coupling.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "evfusion/error.hpp"
#include "evfusion/information.hpp"

namespace evfusion {

namespace {

constexpr double kResidualFloor = 1e-12;

std::vector<std::size_t> validated_shape(const Marginals& marginals) {
  if (marginals.size() < 2) {
    throw Error(ErrorKind::InsufficientInput,
                fmt::format("a coupling needs at least 2 marginals, got {}", marginals.size()));
  }
  std::vector<std::size_t> shape;
  shape.reserve(marginals.size());
  for (const auto& m : marginals) {
    require_distribution(m, "marginal");
    shape.push_back(m.size());
  }
  return shape;
}

}  // namespace

CouplingTable min_mi_coupling(const Marginals& marginals) {
  auto shape = validated_shape(marginals);
  std::vector<double> cells{1.0};
  for (const auto& m : marginals) {
    std::vector<double> next;
    next.reserve(cells.size() * m.size());
    for (double c : cells) {
      for (double p : m) next.push_back(c * p);
    }
    cells = std::move(next);
  }
  return CouplingTable(std::move(shape), std::move(cells));
}

CouplingTable max_mi_coupling(const Marginals& marginals) {
  auto shape = validated_shape(marginals);
  const std::size_t n_cells = checked_cell_count(shape);

  Marginals residual = marginals;
  std::vector<double> cells(n_cells, 0.0);
  std::vector<std::size_t> pick(shape.size());
  double assigned = 0.0;

  // Every pass exhausts at least one residual entry, so this terminates within
  // sum(shape) passes.
  while (1.0 - assigned > kResidualFloor) {
    double m = 1.0;
    for (std::size_t a = 0; a < residual.size(); ++a) {
      const auto& r = residual[a];
      pick[a] = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
      m = std::min(m, r[pick[a]]);
    }
    if (m <= kResidualFloor) break;

    std::size_t flat = 0;
    for (std::size_t a = 0; a < shape.size(); ++a) flat = flat * shape[a] + pick[a];
    cells[flat] += m;
    assigned += m;
    for (std::size_t a = 0; a < residual.size(); ++a) {
      double& r = residual[a][pick[a]];
      r -= m;
      if (r < kResidualFloor) r = 0.0;
    }
  }

  double mass_gap = 0.0;
  for (const auto& r : residual) {
    double left = 0.0;
    for (double v : r) left += v;
    mass_gap = std::max(mass_gap, left);
  }
  if (mass_gap > kProbTolerance) {
    throw Error(ErrorKind::InvalidDistribution,
                fmt::format("marginals disagree in total mass by {:.3g}", mass_gap));
  }
  return CouplingTable(std::move(shape), std::move(cells));
}

CouplingTable blend_couplings(const CouplingTable& t_max, const CouplingTable& t_min, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw Error(ErrorKind::RhoOutOfRange, fmt::format("rho = {} is outside [0, 1]", rho));
  }
  if (!std::equal(t_max.shape().begin(), t_max.shape().end(), t_min.shape().begin(), t_min.shape().end())) {
    throw Error(ErrorKind::AxisMismatch, "blended tables have different shapes");
  }
  for (std::size_t a = 0; a < t_max.rank(); ++a) {
    const auto p = marginalize(t_max, a);
    const auto q = marginalize(t_min, a);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (std::abs(p[i] - q[i]) > kProbTolerance) {
        throw Error(ErrorKind::AxisMismatch, fmt::format("blended tables disagree on marginal {}", a));
      }
    }
  }
  const auto hi = t_max.cells();
  const auto lo = t_min.cells();
  std::vector<double> cells(hi.size());
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = rho * hi[i] + (1.0 - rho) * lo[i];
  return CouplingTable({t_max.shape().begin(), t_max.shape().end()}, std::move(cells));
}

CouplingTable blended_coupling(const Marginals& marginals, double rho) {
  return blend_couplings(max_mi_coupling(marginals), min_mi_coupling(marginals), rho);
}

}  // namespace evfusion
