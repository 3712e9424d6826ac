#include "evfusion/information.hpp"

#include <cmath>

#include <fmt/format.h>

#include "evfusion/error.hpp"

namespace evfusion {

namespace {

double entropy_unchecked(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

}  // namespace

double entropy(std::span<const double> p) {
  require_distribution(p);
  return entropy_unchecked(p);
}

double joint_entropy(const CouplingTable& t) { return entropy_unchecked(t.cells()); }

double mutual_information(const CouplingTable& t) {
  if (t.rank() != 2) {
    throw Error(ErrorKind::AxisMismatch,
                fmt::format("mutual information needs a 2-axis table, got {}", t.rank()));
  }
  const auto px = marginalize(t, 0);
  const auto py = marginalize(t, 1);
  double mi = 0.0;
  for (std::size_t i = 0; i < px.size(); ++i) {
    for (std::size_t j = 0; j < py.size(); ++j) {
      const double pxy = t.at(i, j);
      if (pxy > 0.0) mi += pxy * std::log2(pxy / (px[i] * py[j]));
    }
  }
  return mi;
}

std::vector<double> marginalize(const CouplingTable& t, std::size_t axis) {
  if (axis >= t.rank()) {
    throw Error(ErrorKind::AxisOutOfRange, fmt::format("axis {} of a {}-axis table", axis, t.rank()));
  }
  const auto shape = t.shape();
  std::size_t inner = 1;
  for (std::size_t a = axis + 1; a < shape.size(); ++a) inner *= shape[a];
  const std::size_t n = shape[axis];

  std::vector<double> out(n, 0.0);
  const auto cells = t.cells();
  for (std::size_t flat = 0; flat < cells.size(); ++flat) {
    out[(flat / inner) % n] += cells[flat];
  }
  return out;
}

}  // namespace evfusion
