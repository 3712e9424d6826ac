#pragma once

#include <span>

#include "evfusion/model.hpp"

namespace evfusion {

/// Sigmoid p(s) = 1 / (1 + exp(a*s + b)) mapping a classifier score to the
/// probability of the positive label.
struct PlattModel {
  double a = 0.0;
  double b = 0.0;
};

struct PlattFitOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;
};

/// Maximum-likelihood sigmoid fit against the smoothed targets
/// (N+ + 1) / (N+ + 2) and 1 / (N- + 2), using Newton steps with step halving.
/// `labels` are 0/1; both values must occur.
PlattModel platt_fit(std::span<const double> scores, std::span<const int> labels, PlattFitOptions options = {});

/// Log-likelihood that `platt_fit` maximises, evaluated at `model`.
double platt_log_likelihood(std::span<const double> scores, std::span<const int> labels, const PlattModel& model);

/// Calibrated probability, clamped to [1e-12, 1 - 1e-12].
double platt_apply(double score, const PlattModel& model);

/// [mean - 2 sd, mean + 2 sd] with the sample (n - 1) standard deviation.
/// A zero spread is widened by 1e-6 * max(1, |mean|) on each side.
Interval derive_event_range(std::span<const double> samples, bool clamp_at_zero = false);

}  // namespace evfusion
