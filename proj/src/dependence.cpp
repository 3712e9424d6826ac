#include "evfusion/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "evfusion/error.hpp"

namespace evfusion {

const char* to_string(RhoMethod method) noexcept {
  switch (method) {
    case RhoMethod::Pearson: return "pearson";
    case RhoMethod::DistanceCorrelation: return "distance-correlation";
    case RhoMethod::Fixed: return "fixed";
  }
  return "unknown";
}

RhoMethod parse_rho_method(std::string_view name) {
  if (name == "pearson") return RhoMethod::Pearson;
  if (name == "distance-correlation" || name == "dcor") return RhoMethod::DistanceCorrelation;
  throw Error(ErrorKind::InvalidConfig, fmt::format("unknown rho method '{}'", name));
}

namespace {

void check_samples(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::LengthMismatch, fmt::format("samples of length {} and {}", x.size(), y.size()));
  }
  if (x.size() < 2) throw Error(ErrorKind::InsufficientInput, "need at least 2 samples");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw Error(ErrorKind::NonFinite, "non-finite sample");
  }
}

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

// Double-centred distance matrix, row-major n x n.
std::vector<double> centred_distances(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<double> d(n * n);
  std::vector<double> row_mean(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      d[i * n + j] = std::abs(v[i] - v[j]);
      row_mean[i] += d[i * n + j];
    }
    row_mean[i] /= n;
  }
  const double grand = mean(row_mean);
  // Distance matrices are symmetric, so column means equal row means.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] += grand - row_mean[i] - row_mean[j];
  }
  return d;
}

}  // namespace

RhoEstimate pearson_rho(std::span<const double> x, std::span<const double> y,
                        std::pair<std::string, std::string> pair) {
  check_samples(x, y);
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  RhoEstimate est{0.0, RhoMethod::Pearson, std::move(pair), std::nullopt};
  if (sxx == 0.0 || syy == 0.0) {
    est.warning = "zero-variance sample; correlation set to 0";
    return est;
  }
  est.value = std::clamp(std::abs(sxy / std::sqrt(sxx * syy)), 0.0, 1.0);
  return est;
}

RhoEstimate distance_correlation(std::span<const double> x, std::span<const double> y,
                                 std::pair<std::string, std::string> pair) {
  check_samples(x, y);
  const auto a = centred_distances(x);
  const auto b = centred_distances(y);
  double cov = 0.0, var_x = 0.0, var_y = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    cov += a[k] * b[k];
    var_x += a[k] * a[k];
    var_y += b[k] * b[k];
  }
  RhoEstimate est{0.0, RhoMethod::DistanceCorrelation, std::move(pair), std::nullopt};
  if (var_x <= 0.0 || var_y <= 0.0) {
    est.warning = "zero distance variance; correlation set to 0";
    return est;
  }
  // The common 1/n^2 factors cancel in the ratio.
  const double r2 = cov / std::sqrt(var_x * var_y);
  est.value = std::sqrt(std::clamp(r2, 0.0, 1.0));
  return est;
}

RhoEstimate estimate_rho(std::span<const double> x, std::span<const double> y, RhoMethod method,
                         std::pair<std::string, std::string> pair) {
  switch (method) {
    case RhoMethod::Pearson: return pearson_rho(x, y, std::move(pair));
    case RhoMethod::DistanceCorrelation: return distance_correlation(x, y, std::move(pair));
    case RhoMethod::Fixed: break;
  }
  throw Error(ErrorKind::InvalidConfig, "a fixed rho cannot be estimated from data");
}

double estimate_rho_for_set(const std::vector<std::vector<double>>& columns, RhoMethod method) {
  if (columns.size() < 2) {
    throw Error(ErrorKind::InsufficientInput,
                fmt::format("need at least 2 feature columns, got {}", columns.size()));
  }
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    for (std::size_t j = i + 1; j < columns.size(); ++j) {
      total += estimate_rho(columns[i], columns[j], method).value;
      ++pairs;
    }
  }
  return std::clamp(total / static_cast<double>(pairs), 0.0, 1.0);
}

}  // namespace evfusion
