#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace evfusion {

enum class RhoMethod { Pearson, DistanceCorrelation, Fixed };

const char* to_string(RhoMethod method) noexcept;
/// Accepts "pearson" and "distance-correlation" (also "dcor").
RhoMethod parse_rho_method(std::string_view name);

/// Extent of dependence between two features, in [0, 1].
struct RhoEstimate {
  double value = 0.0;
  RhoMethod method = RhoMethod::Fixed;
  std::pair<std::string, std::string> pair;
  /// Set when an input was degenerate (e.g. zero variance) and `value` fell
  /// back to 0.
  std::optional<std::string> warning;
};

/// |Pearson r|. Zero, with a warning, when either sample is constant.
RhoEstimate pearson_rho(std::span<const double> x, std::span<const double> y,
                        std::pair<std::string, std::string> pair = {});

/// Sample distance correlation (V-statistic form), in [0, 1].
RhoEstimate distance_correlation(std::span<const double> x, std::span<const double> y,
                                 std::pair<std::string, std::string> pair = {});

RhoEstimate estimate_rho(std::span<const double> x, std::span<const double> y, RhoMethod method,
                         std::pair<std::string, std::string> pair = {});

/// Mean of the pairwise estimates over every unordered pair of columns.
double estimate_rho_for_set(const std::vector<std::vector<double>>& columns, RhoMethod method);

}  // namespace evfusion
